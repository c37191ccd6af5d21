"""Independent reference implementations used to check the fast paths.

Deliberately brute-force: correctness over speed. These were written
before the code they check and stay frozen; if a test disagrees with an
oracle, suspect the implementation, not the oracle.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from itertools import combinations


def pass_at_k_by_enumeration(n: int, c: int, k: int) -> Fraction:
    """Probability that a uniform random k-subset of n candidates, exactly
    c of which pass, contains at least one passing candidate."""
    passing = [i < c for i in range(n)]
    subsets = list(combinations(range(n), k))
    hits = sum(1 for subset in subsets if any(passing[i] for i in subset))
    return Fraction(hits, len(subsets))


def round_half_away_from_zero(value: int | Fraction, decimals: int = 0) -> Decimal:
    """Decimal-based reference for display rounding (ties go away from zero)."""
    fraction = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 60
        quotient = Decimal(fraction.numerator) / Decimal(fraction.denominator)
        return quotient.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP)
