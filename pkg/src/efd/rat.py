"""Exact rationals as "p/q" strings.

Every number in this package is a fractions.Fraction.  Floats are never
accepted: they silently lose exactness and winners here are decided by
strict comparisons against epsilon.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rat(text: str | int) -> Fraction:
    """Parse "p/q" (or a bare integer string / int) into a Fraction.

    The denominator must be positive in the source text.
    """
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise ValueError("floats are not accepted; write the rational as 'p/q'")
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        d = int(den)
        if d <= 0:
            raise ValueError(f"denominator must be positive in {text!r}")
        return Fraction(int(num), d)
    return Fraction(int(s))


def fmt_rat(value: Fraction) -> str:
    """Canonical "p/q" form (gcd-reduced, q > 0, always with a slash)."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"
