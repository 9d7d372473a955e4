import numpy as np

from helixrec.helix.base import CurveExample
from helixrec.utils import slope_components

__all__ = ['CatenaryCurve']


class CatenaryCurve(CurveExample):
    """Helix over a catenary: ``kappa = a sin(alpha) / (a^2 + s^2)``, ``tau = a cos(alpha) / (a^2 + s^2)``.

    ``phi = arctan(s / a)`` and, with ``t = asinh(s / a) = asinh(tan(phi))``,
    ``psi = a sin(alpha) (t, cosh(t), cot(alpha) sinh(t))``.
    """

    kind = 'catenary'
    kappa_text = 'a*sin(alpha)/(a^2+s^2)'
    tau_text = 'a*cos(alpha)/(a^2+s^2)'
    default_domain = (-2.0, 2.0)

    def phase(self, s, params):
        return np.arctan(np.asarray(s, dtype=float) / params['a'])

    def position(self, s, params):
        a, alpha = params['a'], params['alpha']
        t = np.arcsinh(np.asarray(s, dtype=float) / a)
        sin_a, cos_a = slope_components(alpha)
        return a * sin_a * np.stack([t, np.cosh(t), cos_a / sin_a * np.sinh(t)], axis=-1)
