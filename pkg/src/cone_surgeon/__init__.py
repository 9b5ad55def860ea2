"""cone_surgeon: parsimonious cone complexes for logical-measurement surgery."""

from cone_surgeon.f2core import F2Matrix, F2Vector

__all__ = ["F2Matrix", "F2Vector"]

__version__ = "0.1.0"
