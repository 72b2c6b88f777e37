"""Near-diagonal asymptotics of partially contracted Green's-function kernels.

A numerics library and CLI that evaluates closed-form, quadrature, and
Monte-Carlo realizations of contracted interaction kernels, cross-verifies
them against each other, extracts singular expansion coefficients
(including logarithmic terms), and classifies kernels by asymptotic
smoothness order.
"""

__version__ = "0.1.0"
