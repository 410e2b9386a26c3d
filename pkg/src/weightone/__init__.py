"""Weight-one Jacobi forms workbench.

Exact q-series for the classical theta blocks, Weil representation characters
of finite metaplectic groups, a dimension formula for spaces of weight-one
Jacobi forms with level, elementary exponent-based vanishing criteria, and
verification of the bundled moonshine data tables.
"""

__version__ = "0.1.0"
