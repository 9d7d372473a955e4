import math
import numpy as np
from dataclasses import dataclass, field

from helixrec.errors import ClassificationError
from helixrec.utils import E3, slope_components

__all__ = [
    'HelixGeometry', 'tangent_closed_form', 'normal_closed_form', 'binormal_closed_form', 'frames_from_phase'
]


@dataclass(frozen=True, eq=False)
class HelixGeometry:
    """Canonical placement of a general helix: axis e3, phase 0, position ``C`` at ``s0``.

    Args:
        alpha (float): Angle between tangent and axis, in (0, pi/2]; pi/2 is the planar limit.
        C (ndarray): Integration constant. Default: origin.
    """
    alpha: float
    C: np.ndarray = field(default_factory=lambda: np.zeros(3))
    axis: np.ndarray = field(init=False, default=None)
    phase: float = field(init=False, default=0.0)

    def __post_init__(self):
        alpha = float(self.alpha)
        if not 0 < alpha <= math.pi / 2 + 1e-15:
            raise ClassificationError(f'helix angle must lie in (0, pi/2], got {alpha!r}')
        C = np.asarray(self.C, dtype=float).reshape(3)
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'C', C)
        object.__setattr__(self, 'axis', E3.copy())

    @property
    def slope(self):
        """``(sin(alpha), cos(alpha))``."""
        return slope_components(self.alpha)

    @property
    def cot_alpha(self):
        sin_a, cos_a = self.slope
        return cos_a / sin_a


def tangent_closed_form(phi, geometry):
    """``T(phi) = (sin(alpha) cos(phi), sin(alpha) sin(phi), cos(alpha))``; ``phi`` may be an array."""
    phi = np.asarray(phi, dtype=float)
    sin_a, cos_a = geometry.slope
    return np.stack([sin_a * np.cos(phi), sin_a * np.sin(phi), np.full(phi.shape, cos_a)], axis=-1)


def normal_closed_form(phi, geometry=None):
    phi = np.asarray(phi, dtype=float)
    return np.stack([-np.sin(phi), np.cos(phi), np.zeros(phi.shape)], axis=-1)


def binormal_closed_form(phi, geometry):
    """``B = T x N = (-cos(alpha) cos(phi), -cos(alpha) sin(phi), sin(alpha))``."""
    phi = np.asarray(phi, dtype=float)
    sin_a, cos_a = geometry.slope
    return np.stack([-cos_a * np.cos(phi), -cos_a * np.sin(phi), np.full(phi.shape, sin_a)], axis=-1)


def frames_from_phase(phi, geometry):
    """Frenet frames ``(T, N, B)`` of the canonical helix at the given phases, each of shape (n, 3)."""
    return tangent_closed_form(phi, geometry), normal_closed_form(phi), binormal_closed_form(phi, geometry)
