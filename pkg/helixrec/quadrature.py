"""Adaptive Simpson quadrature and the cumulative integrals built on it.

The turning integral ``theta(s)`` of the curvature, the helix phase ``phi = theta / sin(alpha)`` and the helix
position all start from zero at the first grid point; the position is then shifted by the constant ``C``.
"""
import logging
import math
import numpy as np
from dataclasses import dataclass
from tqdm import tqdm
from typing import Callable

from helixrec.errors import ClassificationError, HelixrecError, QuadratureError
from helixrec.utils import slope_components

__all__ = [
    'adaptive_simpson', 'CumulativeIntegral', 'cumulative', 'turning_integral', 'PhaseMap', 'phi_of_s',
    'position_quadrature'
]

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_DEPTH = 40


def _sample(f, x):
    try:
        value = f(x)
    except HelixrecError as err:
        raise QuadratureError(f'integrand failed at s={x!r}: {err}') from err
    value = np.asarray(value, dtype=float) if np.ndim(value) else float(value)
    if not np.all(np.isfinite(value)):
        raise QuadratureError(f'integrand is not finite at s={x!r}')
    return value


def _refine(f, a, b, fa, fm, fb, whole, tol, depth, max_depth):
    m = 0.5 * (a + b)
    flm = _sample(f, 0.5 * (a + m))
    frm = _sample(f, 0.5 * (m + b))
    left = (m - a) / 6 * (fa + 4 * flm + fm)
    right = (b - m) / 6 * (fm + 4 * frm + fb)
    delta = left + right - whole
    # Richardson: the halved estimate is off by about delta / 15
    if np.max(np.abs(delta)) / 15 < tol * (b - a):
        return left + right + delta / 15
    if depth >= max_depth:
        raise QuadratureError(f'refinement exceeded depth {max_depth} on [{a!r}, {b!r}]; '
                              'the integrand is close to singular there')
    return (_refine(f, a, m, fa, flm, fm, left, tol, depth + 1, max_depth) +
            _refine(f, m, b, fm, frm, fb, right, tol, depth + 1, max_depth))


def adaptive_simpson(f, a, b, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH, fa=None, fb=None):
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson with Richardson extrapolation.

    A sub-interval is accepted once its error estimate is below ``tol`` times its width.

    Args:
        f (callable): Scalar or vector valued integrand.
        a (float): Lower limit.
        b (float): Upper limit, ``b >= a``.
        tol (float): Error per unit length. Default: 1e-10.
        max_depth (int): Bisection depth cap. Default: 40.
        fa, fb: Already known integrand values at the ends.

    Returns:
        float | ndarray: The integral.
    """
    if b == a:
        return 0.0 * (_sample(f, a) if fa is None else fa)
    fa = _sample(f, a) if fa is None else fa
    fb = _sample(f, b) if fb is None else fb
    fm = _sample(f, 0.5 * (a + b))
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    return _refine(f, a, b, fa, fm, fb, whole, tol, 0, max_depth)


@dataclass(frozen=True, eq=False)
class CumulativeIntegral:
    """Running integral of an integrand on an increasing grid, zero at the first grid point.

    Off-grid values are integrated from the nearest grid point to the left with the same adaptive rule
    (Simpson, order 4), so they carry the grid values' accuracy.
    """
    grid: np.ndarray
    values: np.ndarray
    integrand: Callable
    integrand_values: np.ndarray
    tol: float = DEFAULT_TOL
    max_depth: int = DEFAULT_MAX_DEPTH
    order: int = 4

    @property
    def s0(self):
        return float(self.grid[0])

    @property
    def total(self):
        return self.values[-1]

    def at(self, s):
        grid = self.grid
        span = grid[-1] - grid[0]
        if s < grid[0] - 1e-12 * span or s > grid[-1] + 1e-12 * span:
            raise QuadratureError(f's={s!r} is outside the integration grid [{grid[0]!r}, {grid[-1]!r}]')
        s = min(max(float(s), float(grid[0])), float(grid[-1]))
        idx = int(np.searchsorted(grid, s, side='right')) - 1
        idx = min(max(idx, 0), len(grid) - 1)
        if s == grid[idx]:
            return self.values[idx]
        if idx == len(grid) - 1:
            idx -= 1
        return self.values[idx] + adaptive_simpson(
            self.integrand, float(grid[idx]), float(s), self.tol, self.max_depth, fa=self.integrand_values[idx])

    __call__ = at


def cumulative(f, s0, s1, n, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH, progress=False):
    """Cumulative integral of ``f`` on ``n`` uniform grid points over ``[s0, s1]``.

    Each panel is integrated adaptively; the running values are the panel sums in grid order.

    Raises:
        QuadratureError: Non-finite integrand sample or refinement beyond ``max_depth``.
    """
    if not s0 < s1:
        raise QuadratureError(f'integration needs s0 < s1, got [{s0!r}, {s1!r}]')
    if n < 2:
        raise QuadratureError(f'integration needs at least 2 grid points, got {n}')
    grid = np.linspace(s0, s1, int(n))
    fvals = np.array([_sample(f, float(x)) for x in grid])
    panels = np.empty((len(grid) - 1, ) + fvals.shape[1:])
    for i in tqdm(range(len(grid) - 1), desc='quadrature', disable=not progress, leave=False):
        a, b = float(grid[i]), float(grid[i + 1])
        fm = _sample(f, 0.5 * (a + b))
        whole = (b - a) / 6 * (fvals[i] + 4 * fm + fvals[i + 1])
        panels[i] = _refine(f, a, b, fvals[i], fm, fvals[i + 1], whole, tol, 0, max_depth)
    values = np.concatenate([np.zeros((1, ) + fvals.shape[1:]), np.cumsum(panels, axis=0)])
    logger.debug(f'cumulative integral on [{s0:g}, {s1:g}] with {n} points, tol={tol:g}')
    return CumulativeIntegral(grid, values, f, fvals, tol, max_depth)


def _curvature(profile):
    return lambda s: profile.evaluate(s)[0]


def turning_integral(profile, n, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH, progress=False):
    """``theta(s)``, the integral of the curvature from ``profile.s0``."""
    return cumulative(_curvature(profile), profile.s0, profile.s1, n, tol, max_depth, progress)


def _check_alpha(alpha):
    if not (0 < alpha <= math.pi / 2 + 1e-15):
        raise ClassificationError(f'helix angle must lie in (0, pi/2], got {alpha!r}')


class PhaseMap():
    """The helix phase ``phi(s) = theta(s) / sin(alpha)`` over a turning integral."""

    def __init__(self, theta, alpha):
        _check_alpha(alpha)
        self.theta = theta
        self.alpha = alpha
        self.sin_alpha, self.cos_alpha = slope_components(alpha)

    @property
    def values(self):
        return self.theta.values / self.sin_alpha

    def __call__(self, s):
        return self.theta.at(s) / self.sin_alpha


def phi_of_s(profile, alpha, s, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH):
    """Helix phase ``csc(alpha) * integral of kappa from s0 to s``."""
    _check_alpha(alpha)
    if not profile.contains(s):
        raise QuadratureError(f's={s!r} is outside the domain [{profile.s0}, {profile.s1}]')
    upper = min(max(float(s), profile.s0), profile.s1)
    theta = adaptive_simpson(_curvature(profile), profile.s0, upper, tol, max_depth)
    return theta / slope_components(alpha)[0]


def position_quadrature(profile, alpha, n, C=None, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH, theta=None,
                        progress=False):
    """Position of a general helix by quadrature of its tangent
    ``sin(alpha) * (cos(phi), sin(phi), cot(alpha))``.

    Args:
        profile (IntrinsicProfile): A helix-class profile.
        alpha (float): Angle between tangent and the e3 axis, in (0, pi/2].
        n (int): Grid points, at least 2.
        C (array-like | None): Position at ``s0``. Default: origin.
        theta (CumulativeIntegral | None): Turning integral on the same grid, if already computed.

    Returns:
        tuple[ndarray, ndarray]: Grid ``s`` of shape (n,) and positions of shape (n, 3).
    """
    phase = PhaseMap(theta if theta is not None else turning_integral(profile, n, tol, max_depth), alpha)
    sin_a, cos_a = phase.sin_alpha, phase.cos_alpha

    def velocity(s):
        phi = phase(s)
        return np.array([sin_a * math.cos(phi), sin_a * math.sin(phi), cos_a])

    positions = cumulative(velocity, profile.s0, profile.s1, n, tol, max_depth, progress)
    offset = np.zeros(3) if C is None else np.asarray(C, dtype=float)
    return positions.grid, positions.values + offset
