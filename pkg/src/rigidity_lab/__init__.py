"""Exact q-series, lattice vertex-algebra characters, and elliptic-genus rigidity checks.

The subpackages are organised by what they compute:

- ``cyclotomic`` -- exact scalars in Q(zeta_N), the home of every phase e^{2 pi i r}
- ``series`` / ``laurent`` / ``nilpotent`` -- sparse truncated q-series over
  exchangeable coefficient rings (Laurent polynomials in z^{1/2}, rational
  functions of z, truncated cohomology rings)
- ``theta`` -- Dedekind eta, the odd Jacobi theta function, and its exact shift laws
- ``lattice`` -- even lattices, dual/discriminant data, short-vector enumeration,
  theta series with pluggable exponential characters
- ``characters`` -- lattice vertex-algebra characters, their elliptic and modular
  transformation checks, and the square-bracket coefficient table
- ``genus`` -- the equivariant elliptic genus of a fixed-point model, anomaly,
  rigidity, pole-cancellation and shift-law checks
- ``numeric`` -- floating-point evaluation, S-transformation and Jacobi-form
  checks, winding numbers
"""

from .cyclotomic import CycRat, Rational, cyclotomic_polynomial, root_of_unity
from .series import QSeries
from .laurent import LaurentZ, RationalZ, reduce_rational
from .nilpotent import NilModel, NilElement

__all__ = [
    "CycRat",
    "Rational",
    "cyclotomic_polynomial",
    "root_of_unity",
    "QSeries",
    "LaurentZ",
    "RationalZ",
    "reduce_rational",
    "NilModel",
    "NilElement",
]

__version__ = "0.1.0"
