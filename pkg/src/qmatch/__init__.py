"""Complex-valued semantic matching.

Words are complex superposition states over a learned basis, text windows
become density matrices, and matching is done by measuring those matrices
with trainable rank-one projectors.  A companion module audits distance
metrics between density matrices (trace inner product, von Neumann
divergence, fidelity) against the metric axioms.

Submodules are imported explicitly, e.g. ``from qmatch import matcher``.
The package root stays import-light so the command line entry point can
configure threading before numpy loads.
"""

__version__ = "0.1.0"
