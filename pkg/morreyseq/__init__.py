from .typing import *
from .tools import *
from .norms import *
from .rational import *
from .sequences import *
from .stepfn import *
from .analysis import *
