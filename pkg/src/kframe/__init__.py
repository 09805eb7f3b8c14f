"""kframe: spacetime-structure classification and gauge verification on lattice charts."""

__version__ = "0.1.0"
