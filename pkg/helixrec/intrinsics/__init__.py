# flake8: noqa
from .classify import *
from .expression import *
from .profile import *
