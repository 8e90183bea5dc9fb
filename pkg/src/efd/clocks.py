"""Game clocks over linear orders.

A clock is a linear order; the running value starts at an implicit Top
above every order element and each round strictly decreases it.  Supported
orders: finite orders {0..n-1}, ordinals below w^w in Cantor normal form,
and the reversed order w* (star values k* with j* below k* iff j > k in
the naturals), which has no minimum.

Spec strings: "3" (finite order of size 3), "0" (the empty order),
"w", "w^2*1+w*0+5" (ordinals; zero-coefficient terms are dropped), "w*".
Ordinal values inside a clock use the same notation; star values are
written "k*", the starting value "top".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

CNF = tuple[tuple[int, int], ...]  # ((exponent, coefficient), ...), decreasing exponents


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class OrdVal:
    cnf: CNF


@dataclass(frozen=True)
class StarVal:
    k: int


ClockValue = Union[Top, OrdVal, StarVal]

TOP = Top()


@dataclass(frozen=True)
class FiniteClock:
    n: int  # order {0, ..., n-1}, n >= 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("finite clock needs at least one element; use '0' for the empty order")


@dataclass(frozen=True)
class OrdinalClock:
    cnf: CNF  # the order is the set of ordinals below this one; () is empty


@dataclass(frozen=True)
class OmegaStarClock:
    pass


ClockOrder = Union[FiniteClock, OrdinalClock, OmegaStarClock]


# ---------------------------------------------------------------------------
# CNF ordinals


def cnf_validate(cnf: CNF) -> None:
    last_exp: Optional[int] = None
    for exp, coeff in cnf:
        if exp < 0 or coeff < 1:
            raise ValueError(f"bad CNF term (w^{exp})*{coeff}")
        if last_exp is not None and exp >= last_exp:
            raise ValueError("CNF exponents must strictly decrease")
        last_exp = exp


def cnf_of_int(k: int) -> CNF:
    if k < 0:
        raise ValueError("ordinals are non-negative")
    return ((0, k),) if k else ()


def cnf_finite_part(cnf: CNF) -> Optional[int]:
    """The integer value if the ordinal is finite, else None."""
    if not cnf:
        return 0
    if len(cnf) == 1 and cnf[0][0] == 0:
        return cnf[0][1]
    return None


def cnf_cmp(a: CNF, b: CNF) -> int:
    for (ea, ca), (eb, cb) in zip(a, b):
        if ea != eb:
            return 1 if ea > eb else -1
        if ca != cb:
            return 1 if ca > cb else -1
    if len(a) != len(b):
        return 1 if len(a) > len(b) else -1
    return 0


def format_cnf(cnf: CNF) -> str:
    if not cnf:
        return "0"
    parts = []
    for exp, coeff in cnf:
        if exp == 0:
            parts.append(str(coeff))
        elif exp == 1:
            parts.append(f"w*{coeff}")
        else:
            parts.append(f"w^{exp}*{coeff}")
    return "+".join(parts)


_TERM_RE = re.compile(r"^(?:w(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


def parse_cnf(text: str) -> CNF:
    s = text.strip()
    if s == "0":
        return ()
    terms: list[tuple[int, int]] = []
    for raw in s.split("+"):
        m = _TERM_RE.match(raw.strip())
        if not m:
            raise ValueError(f"cannot parse ordinal term {raw!r}")
        if m.group(3) is not None:
            exp, coeff = 0, int(m.group(3))
        else:
            exp = int(m.group(1)) if m.group(1) is not None else 1
            coeff = int(m.group(2)) if m.group(2) is not None else 1
        if coeff == 0:
            continue  # zero terms are tolerated on input and dropped
        terms.append((exp, coeff))
    cnf = tuple(terms)
    cnf_validate(cnf)
    return cnf


# ---------------------------------------------------------------------------
# clock spec and value notation


def parse_clock_spec(text: str) -> ClockOrder:
    s = text.strip()
    if s == "w*":
        return OmegaStarClock()
    if s.isdigit():
        n = int(s)
        return OrdinalClock(()) if n == 0 else FiniteClock(n)
    return OrdinalClock(parse_cnf(s))


def format_clock_spec(order: ClockOrder) -> str:
    if isinstance(order, FiniteClock):
        return str(order.n)
    if isinstance(order, OrdinalClock):
        return format_cnf(order.cnf)
    return "w*"


def parse_clock_value(order: ClockOrder, text: str) -> ClockValue:
    s = text.strip()
    if s == "top":
        return TOP
    if isinstance(order, OmegaStarClock):
        if not s.endswith("*") or not s[:-1].isdigit():
            raise ValueError(f"star values are written 'k*', got {text!r}")
        return StarVal(int(s[:-1]))
    return OrdVal(parse_cnf(s))


def format_clock_value(value: ClockValue) -> str:
    if isinstance(value, Top):
        return "top"
    if isinstance(value, OrdVal):
        return format_cnf(value.cnf)
    return f"{value.k}*"


# ---------------------------------------------------------------------------
# order operations


def contains(order: ClockOrder, value: ClockValue) -> bool:
    if isinstance(value, Top):
        return False
    if isinstance(order, FiniteClock):
        if not isinstance(value, OrdVal):
            return False
        k = cnf_finite_part(value.cnf)
        return k is not None and k < order.n
    if isinstance(order, OrdinalClock):
        return isinstance(value, OrdVal) and cnf_cmp(value.cnf, order.cnf) < 0
    return isinstance(value, StarVal)


def precedes(a: ClockValue, b: ClockValue) -> bool:
    """a strictly below b in the clock order, with Top above everything."""
    if isinstance(b, Top):
        return not isinstance(a, Top)
    if isinstance(a, Top):
        return False
    if isinstance(a, OrdVal) and isinstance(b, OrdVal):
        return cnf_cmp(a.cnf, b.cnf) < 0
    if isinstance(a, StarVal) and isinstance(b, StarVal):
        return a.k > b.k
    raise ValueError("cannot compare values of different clock kinds")


def legal_decrement(order: ClockOrder, current: ClockValue, proposed: ClockValue) -> bool:
    return contains(order, proposed) and precedes(proposed, current)


def is_minimum(order: ClockOrder, value: ClockValue) -> bool:
    if isinstance(order, OmegaStarClock):
        return False
    return isinstance(value, OrdVal) and value.cnf == ()


def is_well_order(order: ClockOrder) -> bool:
    return not isinstance(order, OmegaStarClock)


def order_type_finite(order: ClockOrder) -> Optional[int]:
    """The order type as an integer when finite, else None."""
    if isinstance(order, FiniteClock):
        return order.n
    if isinstance(order, OrdinalClock):
        return cnf_finite_part(order.cnf)
    return None


def has_values(order: ClockOrder) -> bool:
    if isinstance(order, OrdinalClock):
        return order.cnf != ()
    return True


def effective_rank(order: ClockOrder, value: ClockValue, alpha_star: int) -> Optional[int]:
    """How much of the distance hierarchy the remaining game can still see.

    A finite clock value k means at most k further rounds, so rank
    min(k, alpha_star).  Infinite ordinal values, Top, and star values
    allow arbitrarily long descents on finite structures; None marks the
    stabilized regime.
    """
    if isinstance(value, OrdVal):
        k = cnf_finite_part(value.cnf)
        if k is not None:
            return min(k, alpha_star)
        return None
    return None


def list_values(order: ClockOrder) -> list[ClockValue]:
    """All values of a finite-type order, ascending.  Raises otherwise."""
    t = order_type_finite(order)
    if t is None:
        raise ValueError("order has infinitely many values")
    return [OrdVal(cnf_of_int(k)) for k in range(t)]
