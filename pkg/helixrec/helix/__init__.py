# flake8: noqa
from .base import *
from .catenary_curve import *
from .circular_curve import *
from .conical_curve import *
from .geometry import *
from .plane_curve import *
from .registry import *
from .solver import *
