"""p-group generation over pc presentations, with constrained descendant searches."""

from .linalg import AbelianInvariants, is_quotient, smith_invariants
from .pcp import PcPresentation, parse_presentation, serialize

__version__ = "0.1.0"

__all__ = [
    "AbelianInvariants",
    "PcPresentation",
    "is_quotient",
    "parse_presentation",
    "serialize",
    "smith_invariants",
]
