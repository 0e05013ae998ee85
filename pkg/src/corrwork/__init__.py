"""Work cost of correlating interacting quantum systems."""
from .quantum import ThermoContext, ValidationError

__version__ = "0.1.0"

__all__ = ["ThermoContext", "ValidationError", "__version__"]
