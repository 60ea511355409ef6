__version__ = '0.1.0'

from . import classes
from . import helpers
from . import model
from . import profiles
from . import errors
from . import montecarlo
from . import tracker
from . import io
from . import pipelines
