"""Normal surfaces, PL area and splitting certificates on triangulated 3-manifolds."""

__version__ = "0.1.0"
