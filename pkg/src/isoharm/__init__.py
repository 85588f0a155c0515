"""Isoharmonic deformations of multi-interval sets and the attached machinery.

Library layout mirrors the pipeline: curve (branch data) -> periods
(quadrature, normalized bases, third-kind differential) -> measures
(equilibrium/harmonic measures, Green functions, frequency map) -> deform
(Newton inversion, closed-form derivatives, continuation) -> schlesinger
(residue matrices and the constrained system) plus pell, comb, billiard
applications and a cli front end.
"""

__version__ = "0.1.0"
