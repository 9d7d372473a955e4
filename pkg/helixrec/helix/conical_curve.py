import numpy as np

from helixrec.errors import ProfileError
from helixrec.helix.base import CurveExample
from helixrec.utils import slope_components

__all__ = ['ConicalCurve']


class ConicalCurve(CurveExample):
    """Helix on a cone of revolution: ``kappa = sin(alpha) / (a s)``, ``tau = cos(alpha) / (a s)``.

    With ``phi = ln(s) / a`` the position is
    ``a sin(alpha) / (1 + a^2) exp(a phi) (sin(phi) + a cos(phi), a sin(phi) - cos(phi), (1 + a^2) cot(alpha) / a)``.
    """

    kind = 'conical'
    kappa_text = 'sin(alpha)/(a*s)'
    tau_text = 'cos(alpha)/(a*s)'
    default_domain = (1.0, 5.0)

    def check_domain(self, s0, s1, params):
        super().check_domain(s0, s1, params)
        if s0 <= 0:
            raise ProfileError(f'conical example: domain touches the singularity at s=0, got s0={s0!r}')

    def phase(self, s, params):
        return np.log(np.asarray(s, dtype=float)) / params['a']

    def position(self, s, params):
        a, alpha = params['a'], params['alpha']
        phi = self.phase(s, params)
        growth = np.exp(a * phi)
        sin_a, cos_a = slope_components(alpha)
        scale = a * sin_a / (1 + a**2)
        rise = (1 + a**2) * cos_a / (sin_a * a)
        return scale * growth[:, None] * np.stack(
            [np.sin(phi) + a * np.cos(phi), a * np.sin(phi) - np.cos(phi),
             np.full(phi.shape, rise)], axis=-1)
