import logging
import math
import numpy as np

from helixrec.errors import ClassificationError
from helixrec.frenet import CurveSample, Method
from helixrec.helix.geometry import HelixGeometry, frames_from_phase
from helixrec.intrinsics import CurveKind, classify
from helixrec.quadrature import DEFAULT_MAX_DEPTH, DEFAULT_TOL, PhaseMap, position_quadrature, turning_integral

__all__ = ['solve_general_helix']

logger = logging.getLogger(__name__)


def _circular_positions(s, curve_class, geometry):
    """``a sin(alpha) (sin(phi), 1 - cos(phi), cot(alpha) phi) + C`` with ``phi = (s - s0) / a``."""
    phi = (s - s[0]) / curve_class.a
    sin_a, cos_a = geometry.slope
    psi = curve_class.a * sin_a * np.stack([np.sin(phi), 1 - np.cos(phi), cos_a / sin_a * phi], axis=-1)
    return phi, psi + geometry.C


def solve_general_helix(profile, geometry=None, n=4097, tol=DEFAULT_TOL, max_depth=DEFAULT_MAX_DEPTH, class_tol=1e-9,
                        grid_n=256, progress=False):
    """Position and frames of a general helix from its intrinsic equations.

    The phase ``phi(s) = csc(alpha) * integral of kappa`` starts at 0 at ``s0``, and
    ``psi(s) = sin(alpha) * integral of (cos(phi), sin(phi), cot(alpha)) ds + C``. Circular helices use the closed
    form of that integral; every other helix class is integrated by adaptive quadrature.

    Args:
        profile (IntrinsicProfile): A Planar, CircularHelix or GeneralHelix profile.
        geometry (HelixGeometry | None): Placement. Its ``alpha`` must agree with the one recomputed from the
            profile. Default: canonical placement at the origin.
        n (int): Grid points. Default: 4097.
        tol (float): Quadrature tolerance per unit length. Default: 1e-10.
        max_depth (int): Quadrature depth cap. Default: 40.
        class_tol (float): Classification tolerance. Default: 1e-9.
        grid_n (int): Classification grid. Default: 256.
        progress (bool): Show quadrature progress bars.

    Returns:
        CurveSample: Method tag ``helix-closed-form`` or ``helix-quadrature``.

    Raises:
        ClassificationError: Generic profile, or ``geometry.alpha`` disagreeing with the profile.
        QuadratureError: Quadrature failure.
    """
    if n < 2:
        raise ClassificationError(f'a helix sample needs n >= 2, got {n}')
    curve_class = classify(profile, grid_n, class_tol)
    if not curve_class.is_helix:
        raise ClassificationError('profile is Generic; the helix method is inapplicable')
    alpha = curve_class.alpha
    if geometry is None:
        geometry = HelixGeometry(alpha)
    elif abs(geometry.alpha - alpha) > class_tol * (1 + math.pi):
        raise ClassificationError(f'geometry alpha {geometry.alpha!r} disagrees with the profile ({alpha!r})')

    if curve_class.kind is CurveKind.CIRCULAR_HELIX:
        s = profile.grid(n)
        phi, psi = _circular_positions(s, curve_class, geometry)
        method = Method.HELIX_CLOSED_FORM
    else:
        theta = turning_integral(profile, n, tol, max_depth, progress)
        s, psi = position_quadrature(profile, alpha, n, geometry.C, tol, max_depth, theta=theta, progress=progress)
        phi = PhaseMap(theta, alpha).values
        method = Method.HELIX_QUADRATURE
    T, N, B = frames_from_phase(phi, geometry)
    logger.debug(f'{curve_class} solved by {method.value} on {n} points')
    return CurveSample(s, psi, T, N, B, profile.provenance, method, alpha)
