__version__ = '0.1.0'

from . import (states, qfim, witnesses, bounds, multipartite, metrology, tools)
