from .config import Config
from .errors import FluidAoiError
from .model import AgeFunction, ClassSpec, NetworkSpec

__version__ = '0.1.0'

__all__ = ('AgeFunction', 'ClassSpec', 'Config', 'FluidAoiError',
           'NetworkSpec')
