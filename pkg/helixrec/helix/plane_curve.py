import math
import numpy as np
from scipy.special import fresnel

from helixrec.errors import ProfileError
from helixrec.helix.base import CurveExample

__all__ = ['PlaneCurve']


class PlaneCurve(CurveExample):
    """Euler spiral, a plane curve whose curvature grows linearly: ``kappa = s / a^2``, ``tau = 0``.

    Its turning angle is ``s^2 / (2 a^2)`` and its position ``a sqrt(pi) (C(u), S(u), 0)`` with
    ``u = s / (a sqrt(pi))``, C and S the Fresnel integrals.
    """

    kind = 'plane'
    required = ('a', )
    kappa_text = 's/a^2'
    tau_text = '0'
    default_domain = (0.5, 3.0)

    def check_domain(self, s0, s1, params):
        super().check_domain(s0, s1, params)
        if s0 <= 0:
            raise ProfileError(f'plane example: domain touches the zero of curvature at s=0, got s0={s0!r}')

    def alpha(self, params):
        return math.pi / 2

    def phase(self, s, params):
        return np.asarray(s, dtype=float)**2 / (2 * params['a']**2)

    def position(self, s, params):
        scale = params['a'] * math.sqrt(math.pi)
        sin_part, cos_part = fresnel(np.asarray(s, dtype=float) / scale)
        return scale * np.stack([cos_part, sin_part, np.zeros_like(sin_part)], axis=-1)
