"""Exact-arithmetic calculus for SL(2) x SL(2) modules, Spencer
cohomology of the rank-six structure algebra, and the associated
torsion-free structure equations, with a batch verification CLI."""

__version__ = "1.0.0"
