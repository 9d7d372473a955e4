# flake8: noqa
from .errors import *
from .frenet import *
from .helix import *
from .intrinsics import *
from .quadrature import *
from .sample_io import *
from .utils import *
from .verify import *
from .version import *
