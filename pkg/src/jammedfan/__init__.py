"""Exact verification of the jammed-fan classification of codimension-3 faces
of parallelohedral tilings, with an empirical harness on 3-D lattices."""

__version__ = "0.1.0"
