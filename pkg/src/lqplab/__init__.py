"""lqplab: numerical experiments on L_{q,p}-cohomology and Sobolev inequalities."""

from lqplab._version import __version__
from lqplab.errors import LqpLabError

__all__ = ["__version__", "LqpLabError"]
