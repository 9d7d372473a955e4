import numpy as np

from helixrec.helix.base import CurveExample
from helixrec.utils import slope_components

__all__ = ['CircularCurve']


class CircularCurve(CurveExample):
    """Circular helix: ``psi = a sin(alpha) (sin(phi), -cos(phi), cot(alpha) phi)`` with ``phi = s / a``."""

    kind = 'circular'
    kappa_text = 'sin(alpha)/a'
    tau_text = 'cos(alpha)/a'
    default_domain = (0.0, 10.0)

    def phase(self, s, params):
        return np.asarray(s, dtype=float) / params['a']

    def position(self, s, params):
        a, alpha = params['a'], params['alpha']
        phi = self.phase(s, params)
        sin_a, cos_a = slope_components(alpha)
        return a * sin_a * np.stack([np.sin(phi), -np.cos(phi), cos_a / sin_a * phi], axis=-1)
