"""Exact statistics of pattern counts on Catalan permutation families.

Weight enumerators and moments of pattern-occurrence counts on 132- and
123-avoiding permutations, computed through functional recurrences in exact
rational arithmetic, with brute-force oracles, sequence fitting (linear
recurrences with polynomial coefficients, algebraic equations, closed forms),
an averages census, and asymptotic-abnormality reports.
"""

__version__ = "0.1.0"
