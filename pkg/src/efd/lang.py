"""Metric languages and their formulas.

A language declares sorts with diameter bounds, relation symbols with a
compact value interval and a linear continuity modulus, function symbols
with a linear modulus, and constants.  Each sort additionally carries an
implicit metric predicate; it is never declared by the user.

Moduli are linear: Delta(d1, ..., dk) = sum(lam_i * d_i) with non-negative
rational coefficients.  A weak modulus assigns one coefficient per variable
index and is given by a finite explicit prefix plus a closed-form tail rule
(constant, or affine in the index), so truncations of any length can be
produced.

Formulas are finite trees over the atoms R(t1, ..., tk) and d(t, t') under
the 1-Lipschitz connective basis {max, min, x-.q, q-.x, midpoint} and the
quantifiers sup_x / inf_x.  (-. is truncated subtraction.)  Quantifier rank,
a derived linear modulus over the free variables, and a derived value
interval are all computed bottom-up.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .rat import fmt_rat, parse_rat

ZERO = Fraction(0)
ONE = Fraction(1)

# Reserved for the implicit metric predicate; user symbols may not take it.
METRIC_NAME = "d"


# ---------------------------------------------------------------------------
# declarations


@dataclass(frozen=True)
class SortDecl:
    name: str
    diameter: Fraction


@dataclass(frozen=True)
class RelationDecl:
    name: str
    args: tuple[str, ...]
    interval: tuple[Fraction, Fraction]
    modulus: tuple[Fraction, ...]


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    args: tuple[str, ...]
    result: str
    modulus: tuple[Fraction, ...]


@dataclass(frozen=True)
class ConstDecl:
    name: str
    sort: str


@dataclass(frozen=True)
class MetricLanguage:
    sorts: tuple[SortDecl, ...]
    relations: tuple[RelationDecl, ...] = ()
    functions: tuple[FunctionDecl, ...] = ()
    constants: tuple[ConstDecl, ...] = ()

    def sort(self, name: str) -> SortDecl:
        for s in self.sorts:
            if s.name == name:
                return s
        raise KeyError(f"unknown sort {name!r}")

    def sort_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.sorts)

    def relation(self, name: str) -> RelationDecl:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(f"unknown relation {name!r}")

    def function(self, name: str) -> FunctionDecl:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(f"unknown function {name!r}")

    def constant(self, name: str) -> ConstDecl:
        for c in self.constants:
            if c.name == name:
                return c
        raise KeyError(f"unknown constant {name!r}")


@dataclass
class ValidationReport:
    ok: bool
    defects: list[str] = field(default_factory=list)


def validate_language(lang: MetricLanguage) -> ValidationReport:
    """Structural checks; every defect names the offending declaration."""
    defects: list[str] = []
    sort_names = [s.name for s in lang.sorts]
    if not lang.sorts:
        defects.append("language: no sorts declared")
    for s in lang.sorts:
        if sort_names.count(s.name) > 1:
            defects.append(f"sort {s.name}: duplicate name")
        if s.diameter <= 0:
            defects.append(f"sort {s.name}: diameter must be positive")

    symbol_names: list[str] = []
    for r in lang.relations:
        symbol_names.append(r.name)
        if r.name == METRIC_NAME:
            defects.append(f"relation {r.name}: name reserved for the metric predicate")
        if not r.args:
            defects.append(f"relation {r.name}: needs at least one argument")
        for a in r.args:
            if a not in sort_names:
                defects.append(f"relation {r.name}: unknown argument sort {a!r}")
        lo, hi = r.interval
        if lo > hi:
            defects.append(f"relation {r.name}: empty value interval")
        if len(r.modulus) != len(r.args):
            defects.append(f"relation {r.name}: modulus arity {len(r.modulus)} != {len(r.args)}")
        for lam in r.modulus:
            if lam < 0:
                defects.append(f"relation {r.name}: negative modulus coefficient")
    for f in lang.functions:
        symbol_names.append(f.name)
        if f.name == METRIC_NAME:
            defects.append(f"function {f.name}: name reserved for the metric predicate")
        if not f.args:
            defects.append(f"function {f.name}: needs at least one argument")
        for a in f.args:
            if a not in sort_names:
                defects.append(f"function {f.name}: unknown argument sort {a!r}")
        if f.result not in sort_names:
            defects.append(f"function {f.name}: unknown result sort {f.result!r}")
        if len(f.modulus) != len(f.args):
            defects.append(f"function {f.name}: modulus arity {len(f.modulus)} != {len(f.args)}")
        for lam in f.modulus:
            if lam < 0:
                defects.append(f"function {f.name}: negative modulus coefficient")
    for c in lang.constants:
        symbol_names.append(c.name)
        if c.name == METRIC_NAME:
            defects.append(f"constant {c.name}: name reserved for the metric predicate")
        if c.sort not in sort_names:
            defects.append(f"constant {c.name}: unknown sort {c.sort!r}")
    seen: set[str] = set()
    for n in symbol_names:
        if n in seen:
            defects.append(f"symbol {n}: duplicate name")
        seen.add(n)
    return ValidationReport(ok=not defects, defects=defects)


# ---------------------------------------------------------------------------
# weak moduli


@dataclass(frozen=True)
class WeakModulus:
    """Coefficient sequence c_0, c_1, ... with a closed-form tail.

    Past the explicit prefix, tail_kind "const" gives c_i = tail_a and
    "affine" gives c_i = tail_a + tail_b * i (index 0-based, absolute).
    The default is the constant sequence 1, 1, 1, ...
    """

    prefix: tuple[Fraction, ...] = ()
    tail_kind: str = "const"
    tail_a: Fraction = ONE
    tail_b: Fraction = ZERO

    def __post_init__(self) -> None:
        if self.tail_kind not in ("const", "affine"):
            raise ValueError(f"unknown tail rule {self.tail_kind!r}")
        if any(c < 0 for c in self.prefix):
            raise ValueError("weak modulus coefficients must be non-negative")
        if self.tail_a < 0 or self.tail_b < 0:
            raise ValueError("weak modulus tail must stay non-negative")

    def coefficient(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError("coefficient index must be >= 0")
        if i < len(self.prefix):
            return self.prefix[i]
        if self.tail_kind == "const":
            return self.tail_a
        return self.tail_a + self.tail_b * i

    def truncation(self, n: int) -> tuple[Fraction, ...]:
        return tuple(self.coefficient(i) for i in range(n))


DEFAULT_OMEGA = WeakModulus()


def omega_truncate(omega: WeakModulus, n: int, deltas: Iterable[Fraction]) -> Fraction:
    """Evaluate the n-truncation sum(c_i * delta_i) on a delta vector."""
    ds = list(deltas)
    if len(ds) != n:
        raise ValueError(f"expected {n} deltas, got {len(ds)}")
    total = ZERO
    for i, d in enumerate(ds):
        total += omega.coefficient(i) * d
    return total


def modulus_dominates(big: Iterable[Fraction], small: Iterable[Fraction]) -> bool:
    """Coefficientwise small <= big; shorter vectors are zero-padded."""
    b = list(big)
    s = list(small)
    n = max(len(b), len(s))
    b += [ZERO] * (n - len(b))
    s += [ZERO] * (n - len(s))
    return all(si <= bi for bi, si in zip(b, s))


def parse_omega_spec(spec: str) -> WeakModulus:
    """Parse the compact weak-modulus syntax used by the CLI and service.

    Forms: "default" | "const:V" | "affine:A,B", optionally preceded by
    "prefix:V1,V2,...|".  V, A, B are rationals "p/q".
    """
    s = spec.strip()
    prefix: tuple[Fraction, ...] = ()
    if s.startswith("prefix:"):
        head, _, s = s.partition("|")
        if not s:
            raise ValueError("omega prefix needs a tail rule after '|'")
        vals = head[len("prefix:"):]
        prefix = tuple(parse_rat(v) for v in vals.split(","))
    if s == "default":
        return WeakModulus(prefix=prefix)
    if s.startswith("const:"):
        return WeakModulus(prefix=prefix, tail_kind="const", tail_a=parse_rat(s[len("const:"):]))
    if s.startswith("affine:"):
        parts = s[len("affine:"):].split(",")
        if len(parts) != 2:
            raise ValueError("affine omega takes exactly two parameters 'A,B'")
        return WeakModulus(prefix=prefix, tail_kind="affine",
                           tail_a=parse_rat(parts[0]), tail_b=parse_rat(parts[1]))
    raise ValueError(f"cannot parse omega spec {spec!r}")


def format_omega_spec(omega: WeakModulus) -> str:
    tail = ("default" if omega.tail_kind == "const" and omega.tail_a == ONE
            else f"const:{fmt_rat(omega.tail_a)}" if omega.tail_kind == "const"
            else f"affine:{fmt_rat(omega.tail_a)},{fmt_rat(omega.tail_b)}")
    if omega.prefix:
        return "prefix:" + ",".join(fmt_rat(c) for c in omega.prefix) + "|" + tail
    return tail


# ---------------------------------------------------------------------------
# terms and formulas


@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class ConstTerm:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: tuple["Term", ...]


Term = Union[Var, ConstTerm, App]


@dataclass(frozen=True)
class Dist:
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Max:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class Min:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class MonusConst:
    """body -. q  (truncated subtraction of a constant)."""
    body: "Formula"
    q: Fraction


@dataclass(frozen=True)
class ConstMonus:
    """q -. body."""
    q: Fraction
    body: "Formula"


@dataclass(frozen=True)
class Midpoint:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Sup:
    var: str
    sort: str
    body: "Formula"


@dataclass(frozen=True)
class Inf:
    var: str
    sort: str
    body: "Formula"


Formula = Union[Dist, Rel, Max, Min, MonusConst, ConstMonus, Midpoint, Sup, Inf]


def term_vars(t: Term) -> dict[str, str]:
    """Free variables of a term, as name -> sort."""
    if isinstance(t, Var):
        return {t.name: t.sort}
    if isinstance(t, ConstTerm):
        return {}
    out: dict[str, str] = {}
    for a in t.args:
        out.update(term_vars(a))
    return out


def free_vars(phi: Formula) -> dict[str, str]:
    if isinstance(phi, Dist):
        out = term_vars(phi.left)
        out.update(term_vars(phi.right))
        return out
    if isinstance(phi, Rel):
        out = {}
        for t in phi.args:
            out.update(term_vars(t))
        return out
    if isinstance(phi, (Max, Min)):
        out = {}
        for f in phi.items:
            out.update(free_vars(f))
        return out
    if isinstance(phi, (MonusConst, ConstMonus)):
        return free_vars(phi.body)
    if isinstance(phi, Midpoint):
        out = free_vars(phi.left)
        out.update(free_vars(phi.right))
        return out
    if isinstance(phi, (Sup, Inf)):
        out = free_vars(phi.body)
        out.pop(phi.var, None)
        return out
    raise TypeError(f"not a formula: {phi!r}")


def formula_rank(phi: Formula) -> int:
    """Quantifier rank: atoms 0, connectives take the max, quantifiers add 1."""
    if isinstance(phi, (Dist, Rel)):
        return 0
    if isinstance(phi, (Max, Min)):
        return max((formula_rank(f) for f in phi.items), default=0)
    if isinstance(phi, (MonusConst, ConstMonus)):
        return formula_rank(phi.body)
    if isinstance(phi, Midpoint):
        return max(formula_rank(phi.left), formula_rank(phi.right))
    if isinstance(phi, (Sup, Inf)):
        return 1 + formula_rank(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def term_sort(lang: MetricLanguage, t: Term) -> str:
    if isinstance(t, Var):
        lang.sort(t.sort)
        return t.sort
    if isinstance(t, ConstTerm):
        return lang.constant(t.name).sort
    decl = lang.function(t.func)
    if len(t.args) != len(decl.args):
        raise ValueError(f"function {t.func}: expected {len(decl.args)} arguments")
    for sub, want in zip(t.args, decl.args):
        got = term_sort(lang, sub)
        if got != want:
            raise ValueError(f"function {t.func}: argument of sort {got}, wanted {want}")
    return decl.result


def check_formula(lang: MetricLanguage, phi: Formula) -> None:
    """Raise ValueError if symbols or sorts do not line up."""
    if isinstance(phi, Dist):
        ls = term_sort(lang, phi.left)
        rs = term_sort(lang, phi.right)
        if ls != rs:
            raise ValueError(f"metric atom mixes sorts {ls} and {rs}")
    elif isinstance(phi, Rel):
        decl = lang.relation(phi.name)
        if len(phi.args) != len(decl.args):
            raise ValueError(f"relation {phi.name}: expected {len(decl.args)} arguments")
        for t, want in zip(phi.args, decl.args):
            got = term_sort(lang, t)
            if got != want:
                raise ValueError(f"relation {phi.name}: argument of sort {got}, wanted {want}")
    elif isinstance(phi, (Max, Min)):
        if not phi.items:
            raise ValueError("max/min needs at least one operand")
        for f in phi.items:
            check_formula(lang, f)
    elif isinstance(phi, (MonusConst, ConstMonus)):
        if phi.q < 0:
            raise ValueError("monus constant must be non-negative")
        check_formula(lang, phi.body)
    elif isinstance(phi, Midpoint):
        check_formula(lang, phi.left)
        check_formula(lang, phi.right)
    elif isinstance(phi, (Sup, Inf)):
        lang.sort(phi.sort)
        for name, sort in free_vars(phi.body).items():
            if name == phi.var and sort != phi.sort:
                raise ValueError(f"quantifier binds {name} at sort {phi.sort}, used at {sort}")
        check_formula(lang, phi.body)
    else:
        raise TypeError(f"not a formula: {phi!r}")


def term_modulus(lang: MetricLanguage, t: Term) -> dict[str, Fraction]:
    """Linear modulus of a term as coefficients over its free variables."""
    if isinstance(t, Var):
        return {t.name: ONE}
    if isinstance(t, ConstTerm):
        return {}
    decl = lang.function(t.func)
    out: dict[str, Fraction] = {}
    for lam, sub in zip(decl.modulus, t.args):
        for v, c in term_modulus(lang, sub).items():
            out[v] = out.get(v, ZERO) + lam * c
    return out


def _merge_max(a: dict[str, Fraction], b: dict[str, Fraction]) -> dict[str, Fraction]:
    out = dict(a)
    for v, c in b.items():
        out[v] = max(out.get(v, ZERO), c)
    return out


def derived_modulus(lang: MetricLanguage, phi: Formula) -> dict[str, Fraction]:
    """A linear modulus over the free variables dominating the formula's
    pointwise Lipschitz behaviour.  max/min take the coefficientwise max of
    their operands, which may over-approximate but never under-approximates.
    """
    if isinstance(phi, Dist):
        out: dict[str, Fraction] = {}
        for side in (phi.left, phi.right):
            for v, c in term_modulus(lang, side).items():
                out[v] = out.get(v, ZERO) + c
        return out
    if isinstance(phi, Rel):
        decl = lang.relation(phi.name)
        out = {}
        for lam, t in zip(decl.modulus, phi.args):
            for v, c in term_modulus(lang, t).items():
                out[v] = out.get(v, ZERO) + lam * c
        return out
    if isinstance(phi, (Max, Min)):
        out = {}
        for f in phi.items:
            out = _merge_max(out, derived_modulus(lang, f))
        return out
    if isinstance(phi, (MonusConst, ConstMonus)):
        return derived_modulus(lang, phi.body)
    if isinstance(phi, Midpoint):
        l = derived_modulus(lang, phi.left)
        r = derived_modulus(lang, phi.right)
        out = {}
        for v in set(l) | set(r):
            out[v] = (l.get(v, ZERO) + r.get(v, ZERO)) / 2
        return out
    if isinstance(phi, (Sup, Inf)):
        out = derived_modulus(lang, phi.body)
        out.pop(phi.var, None)
        return out
    raise TypeError(f"not a formula: {phi!r}")


def derived_interval(lang: MetricLanguage, phi: Formula) -> tuple[Fraction, Fraction]:
    if isinstance(phi, Dist):
        sort = term_sort(lang, phi.left)
        return (ZERO, lang.sort(sort).diameter)
    if isinstance(phi, Rel):
        return lang.relation(phi.name).interval
    if isinstance(phi, Max):
        bounds = [derived_interval(lang, f) for f in phi.items]
        return (max(b[0] for b in bounds), max(b[1] for b in bounds))
    if isinstance(phi, Min):
        bounds = [derived_interval(lang, f) for f in phi.items]
        return (min(b[0] for b in bounds), min(b[1] for b in bounds))
    if isinstance(phi, MonusConst):
        lo, hi = derived_interval(lang, phi.body)
        return (max(ZERO, lo - phi.q), max(ZERO, hi - phi.q))
    if isinstance(phi, ConstMonus):
        lo, hi = derived_interval(lang, phi.body)
        return (max(ZERO, phi.q - hi), max(ZERO, phi.q - lo))
    if isinstance(phi, Midpoint):
        llo, lhi = derived_interval(lang, phi.left)
        rlo, rhi = derived_interval(lang, phi.right)
        return ((llo + rlo) / 2, (lhi + rhi) / 2)
    if isinstance(phi, (Sup, Inf)):
        return derived_interval(lang, phi.body)
    raise TypeError(f"not a formula: {phi!r}")


_VAR_RE = re.compile(r"^x([1-9][0-9]*)$")


def var_index(name: str) -> int:
    """1-based index of a variable named x1, x2, ..."""
    m = _VAR_RE.match(name)
    if not m:
        raise ValueError(f"variable {name!r} is not of the form x<k>")
    return int(m.group(1))


def is_omega_formula(lang: MetricLanguage, phi: Formula, omega: WeakModulus) -> bool:
    """Whether phi lies in the omega-formula family: basis connectives only
    (guaranteed by the tree type), each quantifier binds the free variable
    of maximal index in its body, and every subformula's derived modulus is
    dominated coefficientwise by the weak modulus at the variable indices.
    Variables must follow the x1, x2, ... naming convention.
    """
    mod = derived_modulus(lang, phi)
    for v, c in mod.items():
        if c > omega.coefficient(var_index(v) - 1):
            return False
    if isinstance(phi, (Dist, Rel)):
        return True
    if isinstance(phi, (Max, Min)):
        return all(is_omega_formula(lang, f, omega) for f in phi.items)
    if isinstance(phi, (MonusConst, ConstMonus)):
        return is_omega_formula(lang, phi.body, omega)
    if isinstance(phi, Midpoint):
        return (is_omega_formula(lang, phi.left, omega)
                and is_omega_formula(lang, phi.right, omega))
    if isinstance(phi, (Sup, Inf)):
        fv = free_vars(phi.body)
        if phi.var not in fv:
            return False
        if var_index(phi.var) != max(var_index(v) for v in fv):
            return False
        return is_omega_formula(lang, phi.body, omega)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# JSON form


def language_to_json(lang: MetricLanguage) -> dict:
    return {
        "sorts": [{"name": s.name, "diameter": fmt_rat(s.diameter)} for s in lang.sorts],
        "relations": [
            {
                "name": r.name,
                "args": list(r.args),
                "interval": [fmt_rat(r.interval[0]), fmt_rat(r.interval[1])],
                "modulus": [fmt_rat(c) for c in r.modulus],
            }
            for r in lang.relations
        ],
        "functions": [
            {
                "name": f.name,
                "args": list(f.args),
                "result": f.result,
                "modulus": [fmt_rat(c) for c in f.modulus],
            }
            for f in lang.functions
        ],
        "constants": [{"name": c.name, "sort": c.sort} for c in lang.constants],
    }


def language_from_json(data: dict) -> MetricLanguage:
    try:
        sorts = tuple(SortDecl(s["name"], parse_rat(s["diameter"])) for s in data["sorts"])
        relations = tuple(
            RelationDecl(
                r["name"],
                tuple(r["args"]),
                (parse_rat(r["interval"][0]), parse_rat(r["interval"][1])),
                tuple(parse_rat(c) for c in r["modulus"]),
            )
            for r in data.get("relations", ())
        )
        functions = tuple(
            FunctionDecl(
                f["name"],
                tuple(f["args"]),
                f["result"],
                tuple(parse_rat(c) for c in f["modulus"]),
            )
            for f in data.get("functions", ())
        )
        constants = tuple(ConstDecl(c["name"], c["sort"]) for c in data.get("constants", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed language JSON: {exc}") from exc
    return MetricLanguage(sorts, relations, functions, constants)


def load_language(path: str) -> MetricLanguage:
    with open(path) as fh:
        return language_from_json(json.load(fh))


# ---------------------------------------------------------------------------
# fixtures


def _ball_sorts(n: int = 4) -> tuple[SortDecl, ...]:
    return tuple(SortDecl(f"B{k}", Fraction(2 * k)) for k in range(1, n + 1))


def _inclusions(n: int = 4) -> list[FunctionDecl]:
    return [
        FunctionDecl(f"inc_{m}_{k}", (f"B{m}",), f"B{k}", (ONE,))
        for m in range(1, n + 1)
        for k in range(m + 1, n + 1)
    ]


def _scalings(n: int = 4) -> list[FunctionDecl]:
    # negation, halving, and doubling stand in for a finite set of scalars
    out = [FunctionDecl(f"neg_{k}", (f"B{k}",), f"B{k}", (ONE,)) for k in range(1, n + 1)]
    out += [
        FunctionDecl(f"half_{k}", (f"B{k}",), f"B{(k + 1) // 2}", (Fraction(1, 2),))
        for k in range(1, n + 1)
    ]
    out += [FunctionDecl(f"twice_{k}", (f"B{k}",), f"B{2 * k}", (Fraction(2),))
            for k in range(1, n + 1) if 2 * k <= n]
    return out


def fixture(name: str) -> MetricLanguage:
    """Small built-in languages used across the test battery and the CLI.

    metric  one sort of diameter 2, no symbols
    graph   one sort, binary edge predicate, [0,1]-valued, modulus (1,1)
    chain   one sort, binary order predicate, [0,1]-valued, modulus (1,1)
    ous     ball sorts B1..B4 of an ordered normed space: addition on small
            balls, scalings, inclusions, a positivity predicate, 0 and 1
    cstar   ball sorts B1..B4 of an operator algebra: addition and
            multiplication on small balls, involution, scalings, inclusions
    """
    if name == "metric":
        return MetricLanguage(sorts=(SortDecl("M", Fraction(2)),))
    if name == "graph":
        return MetricLanguage(
            sorts=(SortDecl("V", ONE),),
            relations=(RelationDecl("E", ("V", "V"), (ZERO, ONE), (ONE, ONE)),),
        )
    if name == "chain":
        return MetricLanguage(
            sorts=(SortDecl("C", ONE),),
            relations=(RelationDecl("le", ("C", "C"), (ZERO, ONE), (ONE, ONE)),),
        )
    if name == "ous":
        adds = [FunctionDecl(f"add_{k}", (f"B{k}", f"B{k}"), f"B{2 * k}", (ONE, ONE))
                for k in (1, 2)]
        pos = [RelationDecl(f"pos_{k}", (f"B{k}",), (ZERO, Fraction(k)), (ONE,))
               for k in range(1, 5)]
        return MetricLanguage(
            sorts=_ball_sorts(),
            relations=tuple(pos),
            functions=tuple(adds + _scalings() + _inclusions()),
            constants=(ConstDecl("zero", "B1"), ConstDecl("one", "B1")),
        )
    if name == "cstar":
        adds = [FunctionDecl(f"add_{k}", (f"B{k}", f"B{k}"), f"B{2 * k}", (ONE, ONE))
                for k in (1, 2)]
        mults = [FunctionDecl(f"mult_{k}", (f"B{k}", f"B{k}"), f"B{k * k}",
                              (Fraction(k), Fraction(k)))
                 for k in (1, 2)]
        invol = [FunctionDecl(f"star_{k}", (f"B{k}",), f"B{k}", (ONE,))
                 for k in range(1, 5)]
        return MetricLanguage(
            sorts=_ball_sorts(),
            functions=tuple(adds + mults + invol + _scalings() + _inclusions()),
            constants=(ConstDecl("zero", "B1"),),
        )
    raise KeyError(f"unknown fixture {name!r}")
