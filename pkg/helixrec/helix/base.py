"""Base class of the closed-form example curves."""
import math
import numpy as np

from helixrec.errors import ConfigError, ProfileError
from helixrec.frenet import CurveSample, Method
from helixrec.helix.geometry import HelixGeometry, frames_from_phase
from helixrec.intrinsics import IntrinsicProfile

__all__ = ['CurveExample']


class CurveExample():
    """A helix-class curve known in closed form.

    Subclasses set ``kind``, ``required`` (parameter names), the profile texts and ``default_domain``, and implement
    :meth:`phase` and :meth:`position` with absolute phases (no shift to ``s0``).
    """

    kind = None
    required = ('a', 'alpha')
    kappa_text = None
    tau_text = None
    default_domain = (0.0, 1.0)

    def check_params(self, params):
        missing = [name for name in self.required if name not in params]
        if missing:
            raise ConfigError(f'example {self.kind!r} needs parameter(s): {", ".join(missing)}')
        values = {name: float(params[name]) for name in self.required}
        if 'a' in values and not values['a'] > 0:
            raise ConfigError(f'example {self.kind!r} needs a > 0, got {values["a"]!r}')
        if 'alpha' in values and not 0 < values['alpha'] <= math.pi / 2 + 1e-15:
            raise ConfigError(f'example {self.kind!r} needs alpha in (0, pi/2], got {values["alpha"]!r}')
        return values

    def check_domain(self, s0, s1, params):
        if not s0 < s1:
            raise ProfileError(f'domain must satisfy s0 < s1, got [{s0}, {s1}]')

    def alpha(self, params):
        return params['alpha']

    def phase(self, s, params):
        raise NotImplementedError

    def position(self, s, params):
        raise NotImplementedError

    def profile(self, params, domain=None):
        params = self.check_params(params)
        s0, s1 = self.default_domain if domain is None else domain
        self.check_domain(s0, s1, params)
        return IntrinsicProfile.from_text(self.kappa_text, self.tau_text, s0, s1, params)

    def sample(self, params, domain=None, n=1001, C=None):
        """Evaluate the closed form on ``n`` uniform points; frames come from the phase."""
        if n < 2:
            raise ConfigError(f'an example sample needs n >= 2, got {n}')
        profile = self.profile(params, domain)
        params = dict(profile.params)
        s = profile.grid(n)
        geometry = HelixGeometry(self.alpha(params), np.zeros(3) if C is None else C)
        T, N, B = frames_from_phase(self.phase(s, params), geometry)
        psi = self.position(s, params) + geometry.C
        return CurveSample(s, psi, T, N, B, profile.provenance, Method.EXAMPLE, geometry.alpha)
