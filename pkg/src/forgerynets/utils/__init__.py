from . import general
from . import logging
from . import metrics
