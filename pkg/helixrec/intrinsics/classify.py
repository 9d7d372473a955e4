import logging
import math
import numpy as np
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from helixrec.errors import ClassificationError

__all__ = ['CurveKind', 'CurveClass', 'relative_spread', 'classify']

logger = logging.getLogger(__name__)


class CurveKind(Enum):
    PLANAR = 'Planar'
    CIRCULAR_HELIX = 'CircularHelix'
    GENERAL_HELIX = 'GeneralHelix'
    GENERIC = 'Generic'


@dataclass(frozen=True)
class CurveClass:
    """The curve type an intrinsic profile defines.

    Args:
        kind (CurveKind): Class tag.
        alpha (float | None): Angle between tangent and axis, in (0, pi/2]; pi/2 exactly for planar curves,
            None for generic ones.
        a (float | None): Circular helix scale, ``kappa = sin(alpha) / a``.
        tol (float): Relative tolerance the decision was made with.
    """
    kind: CurveKind
    alpha: Optional[float] = None
    a: Optional[float] = None
    tol: float = 1e-9

    @property
    def is_helix(self):
        """Planar curves count as the alpha = pi/2 helix."""
        return self.kind is not CurveKind.GENERIC

    def __str__(self):
        if self.kind is CurveKind.CIRCULAR_HELIX:
            return f'{self.kind.value}(alpha={self.alpha!r}, a={self.a!r})'
        if self.kind is CurveKind.GENERAL_HELIX:
            return f'{self.kind.value}(alpha={self.alpha!r})'
        return self.kind.value


def relative_spread(values):
    """``(max - min) / max|values|``, 0 for an all-zero array."""
    values = np.asarray(values, dtype=float)
    scale = np.max(np.abs(values))
    if scale == 0:
        return 0.0
    return float((np.max(values) - np.min(values)) / scale)


def classify(profile, grid_n=256, tol=1e-9, curvature_floor=1e-9):
    """Decide which curve class a profile defines, by Lancret's ratio test on a uniform grid.

    Args:
        profile (IntrinsicProfile): The profile.
        grid_n (int): Grid points, at least 8. Default: 256.
        tol (float): Relative tolerance. Default: 1e-9.
        curvature_floor (float): Absolute curvature floor. Default: 1e-9.

    Returns:
        CurveClass: Planar if the torsion vanishes, CircularHelix if curvature and torsion are constant,
            GeneralHelix if only their ratio is, Generic otherwise.

    Raises:
        ClassificationError: Curvature below tolerance somewhere on the grid.
    """
    if grid_n < 8:
        raise ClassificationError(f'classification needs at least 8 grid points, got {grid_n}')
    kappa, tau = profile.validate(grid_n)
    kappa_max = float(np.max(np.abs(kappa)))
    if np.min(kappa) < max(curvature_floor, tol * kappa_max):
        idx = int(np.argmin(kappa))
        raise ClassificationError(f'curvature vanishes on the grid: kappa = {kappa[idx]!r} at '
                                  f's = {profile.grid(grid_n)[idx]!r}')

    if np.max(np.abs(tau)) < tol * kappa_max:
        logger.debug(f'torsion below {tol:g} * max curvature: planar')
        return CurveClass(CurveKind.PLANAR, alpha=math.pi / 2, tol=tol)

    ratio = tau / kappa
    ratio_spread = relative_spread(ratio)
    logger.debug(f'classification on {grid_n} points: spread(kappa)={relative_spread(kappa):.3e}, '
                 f'spread(tau)={relative_spread(tau):.3e}, spread(tau/kappa)={ratio_spread:.3e}')
    if ratio_spread >= tol:
        return CurveClass(CurveKind.GENERIC, tol=tol)

    mean_ratio = float(np.mean(ratio))
    if mean_ratio <= 0:
        logger.warning(f'constant torsion/curvature ratio {mean_ratio:.6g} is negative; treated as generic')
        return CurveClass(CurveKind.GENERIC, tol=tol)
    # arccot of a positive ratio lies in (0, pi/2)
    alpha = min(math.atan2(1.0, mean_ratio), math.pi / 2)
    if relative_spread(kappa) < tol and relative_spread(tau) < tol:
        return CurveClass(CurveKind.CIRCULAR_HELIX, alpha=alpha, a=math.sin(alpha) / float(np.mean(kappa)), tol=tol)
    return CurveClass(CurveKind.GENERAL_HELIX, alpha=alpha, tol=tol)
