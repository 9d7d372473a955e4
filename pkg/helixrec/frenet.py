"""Frenet-Serret integration for arbitrary admissible curvature and torsion.

The state is the 4x3 array ``(psi, T, N, B)``; its derivative is ``(T, kappa N, -kappa T + tau B, -tau N)``.
"""
import dataclasses
import logging
import math
import numpy as np
from dataclasses import dataclass
from enum import Enum
from tqdm import tqdm
from typing import Optional

from helixrec.errors import DegenerateTorsionError, HelixrecError, IntegrationError, SampleFormatError
from helixrec.utils import FIRST_DERIVATIVE_O4, SECOND_DERIVATIVE_O4, apply_stencil, slope_components

__all__ = [
    'Method', 'FrenetState', 'CurveSample', 'canonical_initial_state', 'identity_initial_state', 'default_step',
    'integrate_frenet', 'binormal_from_tangent'
]

logger = logging.getLogger(__name__)

_GRID_RTOL = 1e-8


class Method(Enum):
    FRENET = 'frenet'
    HELIX_CLOSED_FORM = 'helix-closed-form'
    HELIX_QUADRATURE = 'helix-quadrature'
    EXAMPLE = 'example'


def _frame_drift(frame):
    """Largest deviation of a frame (rows T, N, B) from a right-handed orthonormal one."""
    gram = frame @ np.swapaxes(frame, -1, -2)
    drift = np.max(np.abs(gram - np.eye(3)), axis=(-2, -1))
    return np.maximum(drift, np.abs(np.linalg.det(frame) - 1.0))


@dataclass(frozen=True, eq=False)
class FrenetState:
    """Position and Frenet frame at arc length ``s``."""
    s: float
    psi: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray

    @property
    def frame(self):
        return np.vstack([self.T, self.N, self.B])

    def orthonormality_drift(self):
        return float(_frame_drift(self.frame))


@dataclass(frozen=True, eq=False)
class CurveSample:
    """Frenet states on a uniform arc-length grid, with the profile they came from.

    Args:
        s (ndarray): Grid, shape (n,), strictly increasing with constant step.
        psi, T, N, B (ndarray): Position and frame vectors, shape (n, 3) each.
        provenance (dict): ``kappa`` and ``tau`` text plus ``params``.
        method (Method): How the sample was produced.
        alpha (float | None): Helix angle when the profile is a helix class.
    """
    s: np.ndarray
    psi: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    provenance: dict
    method: Method
    alpha: Optional[float] = None

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float).reshape(-1)
        object.__setattr__(self, 's', s)
        for name in ('psi', 'T', 'N', 'B'):
            value = np.asarray(getattr(self, name), dtype=float).reshape(-1, 3)
            if value.shape[0] != s.shape[0]:
                raise SampleFormatError(f'{name} has {value.shape[0]} rows, expected {s.shape[0]}')
            object.__setattr__(self, name, value)
        if not np.all(np.isfinite(s)):
            raise SampleFormatError('s values must be finite')
        if s.size >= 2:
            steps = np.diff(s)
            if np.any(steps <= 0):
                idx = int(np.argmax(steps <= 0))
                raise SampleFormatError(f's not increasing at row {idx + 1}: {s[idx]!r} -> {s[idx + 1]!r}')
            h = (s[-1] - s[0]) / (s.size - 1)
            if np.max(np.abs(steps - h)) > _GRID_RTOL * max(h, abs(s[0]), abs(s[-1])):
                raise SampleFormatError('s grid is not uniform')
        object.__setattr__(self, 'method', Method(self.method))

    def __len__(self):
        return self.s.shape[0]

    def __getitem__(self, idx):
        return FrenetState(float(self.s[idx]), self.psi[idx], self.T[idx], self.N[idx], self.B[idx])

    @property
    def states(self):
        return [self[i] for i in range(len(self))]

    @property
    def h(self):
        if len(self) < 2:
            return math.nan
        return float((self.s[-1] - self.s[0]) / (len(self) - 1))

    @property
    def frames(self):
        return np.stack([self.T, self.N, self.B], axis=1)

    def orthonormality_drift(self):
        if len(self) == 0:
            return 0.0
        return float(np.max(_frame_drift(self.frames)))

    def speed_deviation(self):
        """Largest ``|chord / ds - 1|`` between consecutive samples."""
        if len(self) < 2:
            return 0.0
        chords = np.linalg.norm(np.diff(self.psi, axis=0), axis=1) / np.diff(self.s)
        return float(np.max(np.abs(chords - 1.0)))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def rigid_transform(self, rotation, translation=None):
        """Apply ``x -> R x + t`` to positions and ``v -> R v`` to the frame."""
        rotation = np.asarray(rotation, dtype=float)
        translation = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
        return self.replace(
            psi=self.psi @ rotation.T + translation, T=self.T @ rotation.T, N=self.N @ rotation.T,
            B=self.B @ rotation.T)

    def aligned_to(self, reference):
        """Move this sample rigidly so its first position and frame coincide with ``reference``'s."""
        rotation = reference[0].frame.T @ self[0].frame
        return self.rigid_transform(rotation, reference.psi[0] - rotation @ self.psi[0])


def canonical_initial_state(alpha, s0=0.0):
    """Frame of the canonical helix at phase 0: ``T = (sin a, 0, cos a)``, ``N = e2``, ``B = (-cos a, 0, sin a)``.

    Args:
        alpha (float): Angle between the tangent and the e3 axis, in (0, pi/2].
        s0 (float): Arc length of the state.
    """
    if not 0 < alpha <= math.pi / 2 + 1e-15:
        raise IntegrationError(f'helix angle must lie in (0, pi/2], got {alpha!r}')
    sin_a, cos_a = slope_components(alpha)
    return FrenetState(
        float(s0), np.zeros(3), np.array([sin_a, 0., cos_a]), np.array([0., 1., 0.]), np.array([-cos_a, 0., sin_a]))


def identity_initial_state(s0=0.0):
    return FrenetState(float(s0), np.zeros(3), np.array([1., 0., 0.]), np.array([0., 1., 0.]), np.array([0., 0., 1.]))


def default_step(profile, steps=4096):
    return profile.length / steps


def _curvature_torsion(profile, s, curvature_floor):
    try:
        kappa, tau = profile.evaluate(s)
    except HelixrecError as err:
        raise IntegrationError(f'profile evaluation failed at s={s!r}: {err}') from err
    if kappa < curvature_floor:
        raise IntegrationError(f'curvature below admissible floor {curvature_floor:g}: kappa({s!r}) = {kappa!r}')
    return kappa, tau


def _repair(y, repair_tol, s):
    """Re-orthonormalize in the order T, N, then B = T x N."""
    t, n = y[1], y[2]
    t_norm = np.linalg.norm(t)
    drift = max(abs(t_norm - 1.0), abs(np.linalg.norm(n) - 1.0), abs(np.dot(t, n)))
    if not drift <= repair_tol:
        raise IntegrationError(f'frame degenerated at s={s!r} (drift {drift:.3e} > {repair_tol:g})')
    t = t / t_norm
    n = n - np.dot(n, t) * t
    n = n / np.linalg.norm(n)
    return np.array([y[0], t, n, np.cross(t, n)])


def integrate_frenet(profile, init, h=None, n=None, curvature_floor=1e-9, repair_tol=1e-6, alpha=None, progress=False):
    """Integrate position and Frenet frame with the classical 4th-order Runge-Kutta scheme.

    Args:
        profile (IntrinsicProfile): Curvature and torsion.
        init (FrenetState): Initial state, a right-handed orthonormal frame.
        h (float | None): Step, ``h > 0``. Default: ``(s1 - s0) / 4096``.
        n (int | None): Number of steps; the sample holds ``n + 1`` states and ends at ``init.s + n * h <= s1``.
            Default: as many steps as fit before ``s1``.
        curvature_floor (float): Smallest admissible curvature. Default: 1e-9.
        repair_tol (float): Largest per-step frame drift that re-orthonormalization may repair. Default: 1e-6.
        alpha (float | None): Helix angle recorded in the sample.
        progress (bool): Show a progress bar.

    Returns:
        CurveSample: Method tag ``frenet``.

    Raises:
        IntegrationError: Curvature below the floor, evaluation failure mid-step or frame degeneration.
    """
    if h is None:
        h = default_step(profile)
    if n is None:
        n = int(math.floor((profile.s1 - init.s) / h + 1e-9))
    n = int(n)
    if not h > 0 or n < 1:
        raise IntegrationError(f'integration needs h > 0 and n >= 1, got h={h!r}, n={n}')
    start = float(init.s)
    if not (profile.contains(start) and profile.contains(start + n * h)):
        raise IntegrationError(f'[{start!r}, {start + n * h!r}] leaves the domain [{profile.s0}, {profile.s1}]')
    if init.orthonormality_drift() > 1e-9:
        raise IntegrationError('initial frame is not right-handed orthonormal')

    def rhs(s, y):
        kappa, tau = _curvature_torsion(profile, s, curvature_floor)
        return np.array([y[1], kappa * y[2], -kappa * y[1] + tau * y[3], -tau * y[2]])

    y = np.array([init.psi, init.T, init.N, init.B], dtype=float)
    states = np.empty((n + 1, 4, 3))
    states[0] = y
    for i in tqdm(range(n), desc='frenet', disable=not progress, leave=False):
        s = start + i * h
        k1 = rhs(s, y)
        k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(s + h, y + h * k3)
        y = _repair(y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4), repair_tol, s + h)
        states[i + 1] = y
    logger.debug(f'integrated {n} Frenet steps of h={h:g} from s={start:g}')
    return CurveSample(
        start + h * np.arange(n + 1), states[:, 0], states[:, 1], states[:, 2], states[:, 3], profile.provenance,
        Method.FRENET, alpha)


def binormal_from_tangent(sample, profile, torsion_floor=1e-6):
    """Rebuild the binormal from the tangent alone: ``B = (1/tau) d/ds(T' / kappa) + (kappa/tau) T``.

    ``T'`` and ``T''`` come from 4th-order central stencils; curvature derivatives from the profile.

    Returns:
        tuple[ndarray, ndarray]: Interior grid (two points dropped at each end) and binormals, shape (m, 3).

    Raises:
        DegenerateTorsionError: Torsion below ``torsion_floor * max kappa`` somewhere on the grid.
        IntegrationError: Fewer than 5 points.
    """
    if len(sample) < 5:
        raise IntegrationError(f'binormal reconstruction needs at least 5 points, got {len(sample)}')
    kappa, tau = profile.sample(sample.s)
    if np.min(np.abs(tau)) <= torsion_floor * np.max(kappa):
        raise DegenerateTorsionError('torsion below tolerance; B = (1/tau)(T\'/kappa)\' + (kappa/tau)T is undefined')
    dkappa, _ = profile.derivatives(sample.s)
    d1 = apply_stencil(sample.T, FIRST_DERIVATIVE_O4, sample.h, 1)
    d2 = apply_stencil(sample.T, SECOND_DERIVATIVE_O4, sample.h, 2)
    k, t = kappa[:, None], tau[:, None]
    binormal = (d2 / k - dkappa[:, None] * d1 / k**2) / t + (k / t) * sample.T
    return sample.s[2:-2], binormal[2:-2]
