"""Finite metric structures and maps between them.

A structure interprets every sort as a finite non-empty list of named
points with an exact rational metric, every relation symbol as a rational
table, every function symbol as a total table of points, and every
constant as a point.  Validation checks the metric axioms, value
intervals, and the declared moduli exhaustively; the modulus checks walk
all pairs of argument tuples, so they are meant for desk-scale structures
(a handful of points per sort).

Discrete structures use the metric constantly 1 off the diagonal.  A
relation value 0 plays the role of "true" so that discrete relational
structures embed with their classical semantics intact.

A map between structures can be encoded as its matrix of distances
delta(a, b) = d(m(a), b).  Rows of such a matrix attain 0 exactly at the
image point, the encoding is faithful, and matrices compose without ever
consulting the underlying maps; this gives a finite, exact realization of
composition by distance conditions alone.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import lang as L
from .rat import fmt_rat, parse_rat

ZERO = Fraction(0)


@dataclass
class FiniteStructure:
    language: L.MetricLanguage
    universes: dict[str, tuple[str, ...]]
    metric: dict[str, dict[tuple[str, str], Fraction]]
    relations: dict[str, dict[tuple[str, ...], Fraction]] = field(default_factory=dict)
    functions: dict[str, dict[tuple[str, ...], str]] = field(default_factory=dict)
    constants: dict[str, str] = field(default_factory=dict)
    name: str = ""

    def elems(self, sort: str) -> tuple[str, ...]:
        return self.universes[sort]

    def dist(self, sort: str, a: str, b: str) -> Fraction:
        if a == b:
            return ZERO
        return self.metric[sort][(a, b)]

    def rel(self, name: str, args: tuple[str, ...]) -> Fraction:
        return self.relations[name][args]

    def func(self, name: str, args: tuple[str, ...]) -> str:
        return self.functions[name][args]

    def sort_of(self, elem: str) -> str:
        for s, u in self.universes.items():
            if elem in u:
                return s
        raise KeyError(f"element {elem!r} not in any universe")


def discrete_metric(ids: Iterable[str]) -> dict[tuple[str, str], Fraction]:
    out: dict[tuple[str, str], Fraction] = {}
    ids = list(ids)
    for a in ids:
        for b in ids:
            out[(a, b)] = ZERO if a == b else Fraction(1)
    return out


def validate_structure(s: FiniteStructure) -> L.ValidationReport:
    defects: list[str] = []
    langrep = L.validate_language(s.language)
    if not langrep.ok:
        return L.ValidationReport(False, [f"language: {d}" for d in langrep.defects])

    for sort in s.language.sort_names():
        u = s.universes.get(sort, ())
        if not u:
            defects.append(f"sort {sort}: universe is empty")
            continue
        if len(set(u)) != len(u):
            defects.append(f"sort {sort}: duplicate element ids")
        diam = s.language.sort(sort).diameter
        for a in u:
            for b in u:
                try:
                    v = s.dist(sort, a, b)
                except KeyError:
                    defects.append(f"metric {sort}: missing entry ({a},{b})")
                    continue
                if a == b and v != 0:
                    defects.append(f"metric {sort}: d({a},{a}) != 0")
                if a != b and v <= 0:
                    defects.append(f"metric {sort}: d({a},{b}) must be positive")
                if v > diam:
                    defects.append(f"metric {sort}: d({a},{b}) = {fmt_rat(v)} exceeds diameter")
                if v != s.metric[sort].get((b, a), v):
                    defects.append(f"metric {sort}: d({a},{b}) not symmetric")
        for a in u:
            for b in u:
                for c in u:
                    try:
                        if s.dist(sort, a, c) > s.dist(sort, a, b) + s.dist(sort, b, c):
                            defects.append(f"metric {sort}: triangle fails at ({a},{b},{c})")
                    except KeyError:
                        pass

    for decl in s.language.relations:
        table = s.relations.get(decl.name)
        if table is None:
            defects.append(f"relation {decl.name}: table missing")
            continue
        lo, hi = decl.interval
        tuples = list(itertools.product(*(s.universes.get(a, ()) for a in decl.args)))
        for args in tuples:
            if args not in table:
                defects.append(f"relation {decl.name}: missing entry {args}")
            elif not (lo <= table[args] <= hi):
                defects.append(f"relation {decl.name}: value at {args} outside interval")
        for xs in tuples:
            for ys in tuples:
                if xs not in table or ys not in table:
                    continue
                bound = ZERO
                for lam, sort, x, y in zip(decl.modulus, decl.args, xs, ys):
                    bound += lam * s.dist(sort, x, y)
                if abs(table[xs] - table[ys]) > bound:
                    defects.append(
                        f"relation {decl.name}: modulus violated between {xs} and {ys}")

    for decl in s.language.functions:
        table = s.functions.get(decl.name)
        if table is None:
            defects.append(f"function {decl.name}: table missing")
            continue
        tuples = list(itertools.product(*(s.universes.get(a, ()) for a in decl.args)))
        for args in tuples:
            if args not in table:
                defects.append(f"function {decl.name}: missing entry {args}")
            elif table[args] not in s.universes.get(decl.result, ()):
                defects.append(f"function {decl.name}: value at {args} not in sort {decl.result}")
        for xs in tuples:
            for ys in tuples:
                if xs not in table or ys not in table:
                    continue
                if table[xs] not in s.universes.get(decl.result, ()):
                    continue
                if table[ys] not in s.universes.get(decl.result, ()):
                    continue
                bound = ZERO
                for lam, sort, x, y in zip(decl.modulus, decl.args, xs, ys):
                    bound += lam * s.dist(sort, x, y)
                if s.dist(decl.result, table[xs], table[ys]) > bound:
                    defects.append(
                        f"function {decl.name}: modulus violated between {xs} and {ys}")

    for decl in s.language.constants:
        target = s.constants.get(decl.name)
        if target is None:
            defects.append(f"constant {decl.name}: no interpretation")
        elif target not in s.universes.get(decl.sort, ()):
            defects.append(f"constant {decl.name}: {target!r} not in sort {decl.sort}")

    return L.ValidationReport(ok=not defects, defects=defects)


# ---------------------------------------------------------------------------
# evaluation


def eval_term(s: FiniteStructure, t: L.Term, assignment: dict[str, str]) -> str:
    if isinstance(t, L.Var):
        try:
            return assignment[t.name]
        except KeyError:
            raise ValueError(f"unassigned variable {t.name!r}") from None
    if isinstance(t, L.ConstTerm):
        return s.constants[t.name]
    args = tuple(eval_term(s, a, assignment) for a in t.args)
    return s.func(t.func, args)


def eval_formula(s: FiniteStructure, phi: L.Formula, assignment: dict[str, str]) -> Fraction:
    """Evaluate with sup/inf realized as max/min over the finite universes."""
    if isinstance(phi, L.Dist):
        sort = L.term_sort(s.language, phi.left)
        return s.dist(sort, eval_term(s, phi.left, assignment),
                      eval_term(s, phi.right, assignment))
    if isinstance(phi, L.Rel):
        args = tuple(eval_term(s, t, assignment) for t in phi.args)
        return s.rel(phi.name, args)
    if isinstance(phi, L.Max):
        return max(eval_formula(s, f, assignment) for f in phi.items)
    if isinstance(phi, L.Min):
        return min(eval_formula(s, f, assignment) for f in phi.items)
    if isinstance(phi, L.MonusConst):
        return max(ZERO, eval_formula(s, phi.body, assignment) - phi.q)
    if isinstance(phi, L.ConstMonus):
        return max(ZERO, phi.q - eval_formula(s, phi.body, assignment))
    if isinstance(phi, L.Midpoint):
        return (eval_formula(s, phi.left, assignment)
                + eval_formula(s, phi.right, assignment)) / 2
    if isinstance(phi, (L.Sup, L.Inf)):
        pick = max if isinstance(phi, L.Sup) else min
        vals = []
        for e in s.elems(phi.sort):
            inner = dict(assignment)
            inner[phi.var] = e
            vals.append(eval_formula(s, phi.body, inner))
        return pick(vals)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# maps and matrices


ElementMap = dict[str, dict[str, str]]  # sort -> (source element -> target element)


def is_homomorphism(m: ElementMap, src: FiniteStructure, tgt: FiniteStructure) -> bool:
    """True iff m commutes with functions and constants and is value-
    decreasing in absolute value on every relation, the metric included
    (so in particular it is metrically contractive)."""

    def image(sort: str, a: str) -> str:
        return m[sort][a]

    for sort in src.language.sort_names():
        for a in src.elems(sort):
            if sort not in m or a not in m[sort]:
                return False
            if image(sort, a) not in tgt.elems(sort):
                return False
    for decl in src.language.constants:
        if image(decl.sort, src.constants[decl.name]) != tgt.constants[decl.name]:
            return False
    for decl in src.language.functions:
        for args in itertools.product(*(src.elems(a) for a in decl.args)):
            mapped = tuple(image(s, x) for s, x in zip(decl.args, args))
            if tgt.func(decl.name, mapped) != image(decl.result, src.func(decl.name, args)):
                return False
    for decl in src.language.relations:
        for args in itertools.product(*(src.elems(a) for a in decl.args)):
            mapped = tuple(image(s, x) for s, x in zip(decl.args, args))
            if abs(tgt.rel(decl.name, mapped)) > abs(src.rel(decl.name, args)):
                return False
    for sort in src.language.sort_names():
        for a in src.elems(sort):
            for b in src.elems(sort):
                if tgt.dist(sort, image(sort, a), image(sort, b)) > src.dist(sort, a, b):
                    return False
    return True


@dataclass(frozen=True)
class MorphismMatrix:
    """Distance matrix of a map: entry(sort, a, b) = d(m(a), b) in the target."""

    src_universes: tuple[tuple[str, tuple[str, ...]], ...]
    tgt_universes: tuple[tuple[str, tuple[str, ...]], ...]
    entries: tuple[tuple[str, str, str, Fraction], ...]  # (sort, a, b, value)

    def entry(self, sort: str, a: str, b: str) -> Fraction:
        for s, x, y, v in self.entries:
            if (s, x, y) == (sort, a, b):
                return v
        raise KeyError((sort, a, b))

    def row(self, sort: str, a: str) -> list[tuple[str, Fraction]]:
        return [(y, v) for s, x, y, v in self.entries if s == sort and x == a]


def encode_morphism(m: ElementMap, src: FiniteStructure, tgt: FiniteStructure) -> MorphismMatrix:
    entries = []
    for sort in src.language.sort_names():
        for a in src.elems(sort):
            fa = m[sort][a]
            for b in tgt.elems(sort):
                entries.append((sort, a, b, tgt.dist(sort, fa, b)))
    return MorphismMatrix(
        src_universes=tuple((s, src.elems(s)) for s in src.language.sort_names()),
        tgt_universes=tuple((s, tgt.elems(s)) for s in tgt.language.sort_names()),
        entries=tuple(entries),
    )


def decode_matrix(matrix: MorphismMatrix) -> ElementMap:
    """Read the underlying map back off the rows' zero entries."""
    out: ElementMap = {}
    for sort, elems in matrix.src_universes:
        out[sort] = {}
        for a in elems:
            zeros = [b for b, v in matrix.row(sort, a) if v == 0]
            if not zeros:
                raise ValueError(f"matrix row ({sort}, {a}) has no zero entry")
            out[sort][a] = zeros[0]
    return out


def compose_matrices(rho: MorphismMatrix, mu: MorphismMatrix) -> MorphismMatrix:
    """Matrix of the composite map, computed from rho's row zeros: the
    composite row at a is mu's row at the unique b with rho(a, b) = 0."""
    entries = []
    for sort, elems in rho.src_universes:
        for a in elems:
            zeros = [b for b, v in rho.row(sort, a) if v == 0]
            if not zeros:
                raise ValueError(f"matrix row ({sort}, {a}) has no zero entry")
            b0 = zeros[0]
            for c, v in mu.row(sort, b0):
                entries.append((sort, a, c, v))
    return MorphismMatrix(
        src_universes=rho.src_universes,
        tgt_universes=mu.tgt_universes,
        entries=tuple(entries),
    )


def find_isomorphism(a: FiniteStructure, b: FiniteStructure) -> Optional[ElementMap]:
    """Exhaustive search for a bijection preserving every table exactly.
    Intended for desk-scale structures; the search is factorial per sort.
    """
    if a.language != b.language:
        return None
    sorts = a.language.sort_names()
    for s in sorts:
        if len(a.elems(s)) != len(b.elems(s)):
            return None

    def candidates(sort: str):
        src = a.elems(sort)
        for perm in itertools.permutations(b.elems(sort)):
            yield dict(zip(src, perm))

    for combo in itertools.product(*(candidates(s) for s in sorts)):
        m: ElementMap = dict(zip(sorts, combo))
        if _preserves_exactly(m, a, b):
            return m
    return None


def _preserves_exactly(m: ElementMap, a: FiniteStructure, b: FiniteStructure) -> bool:
    for sort in a.language.sort_names():
        for x in a.elems(sort):
            for y in a.elems(sort):
                if b.dist(sort, m[sort][x], m[sort][y]) != a.dist(sort, x, y):
                    return False
    for decl in a.language.relations:
        for args in itertools.product(*(a.elems(s) for s in decl.args)):
            mapped = tuple(m[s][x] for s, x in zip(decl.args, args))
            if b.rel(decl.name, mapped) != a.rel(decl.name, args):
                return False
    for decl in a.language.functions:
        for args in itertools.product(*(a.elems(s) for s in decl.args)):
            mapped = tuple(m[s][x] for s, x in zip(decl.args, args))
            if b.func(decl.name, mapped) != m[decl.result][a.func(decl.name, args)]:
                return False
    for decl in a.language.constants:
        if m[decl.sort][a.constants[decl.name]] != b.constants[decl.name]:
            return False
    return True


# ---------------------------------------------------------------------------
# JSON form


def _nest_table(ids_per_axis: list[tuple[str, ...]], get) -> list:
    if len(ids_per_axis) == 1:
        return [get((i,)) for i in ids_per_axis[0]]
    head, rest = ids_per_axis[0], ids_per_axis[1:]
    return [_nest_table(rest, lambda suffix, i=i: get((i,) + suffix)) for i in head]


def _walk_table(ids_per_axis: list[tuple[str, ...]], nested) -> Iterable[tuple[tuple[str, ...], object]]:
    if len(nested) != len(ids_per_axis[0]):
        raise ValueError("table does not match universe size")
    if len(ids_per_axis) == 1:
        for i, v in zip(ids_per_axis[0], nested):
            yield (i,), v
        return
    for i, sub in zip(ids_per_axis[0], nested):
        for suffix, v in _walk_table(ids_per_axis[1:], sub):
            yield (i,) + suffix, v


def structure_to_json(s: FiniteStructure, language_path: str | None = None) -> dict:
    data: dict = {
        "language": {"path": language_path} if language_path else L.language_to_json(s.language),
        "universes": {sort: list(s.universes[sort]) for sort in s.language.sort_names()},
        "metric": {},
        "relations": {},
        "functions": {},
        "constants": dict(sorted(s.constants.items())),
    }
    if s.name:
        data["name"] = s.name
    for sort in s.language.sort_names():
        ids = s.universes[sort]
        data["metric"][sort] = _nest_table(
            [ids, ids], lambda key: fmt_rat(s.dist(sort, key[0], key[1])))
    for decl in s.language.relations:
        axes = [s.universes[a] for a in decl.args]
        data["relations"][decl.name] = _nest_table(axes, lambda key: fmt_rat(s.rel(decl.name, key)))
    for decl in s.language.functions:
        axes = [s.universes[a] for a in decl.args]
        data["functions"][decl.name] = _nest_table(axes, lambda key: s.func(decl.name, key))
    return data


def structure_from_json(data: dict, language: L.MetricLanguage | None = None) -> FiniteStructure:
    try:
        if language is not None:
            lng = language
        else:
            lang_field = data["language"]
            if isinstance(lang_field, dict) and "path" in lang_field:
                lng = L.load_language(lang_field["path"])
            else:
                lng = L.language_from_json(lang_field)
        universes = {sort: tuple(data["universes"][sort]) for sort in lng.sort_names()}
        metric: dict[str, dict[tuple[str, str], Fraction]] = {}
        for sort in lng.sort_names():
            ids = universes[sort]
            metric[sort] = {}
            for key, v in _walk_table([ids, ids], data["metric"][sort]):
                metric[sort][key] = parse_rat(v)
        relations: dict[str, dict[tuple[str, ...], Fraction]] = {}
        for decl in lng.relations:
            axes = [universes[a] for a in decl.args]
            relations[decl.name] = {
                key: parse_rat(v) for key, v in _walk_table(axes, data["relations"][decl.name])}
        functions: dict[str, dict[tuple[str, ...], str]] = {}
        for decl in lng.functions:
            axes = [universes[a] for a in decl.args]
            functions[decl.name] = {
                key: str(v) for key, v in _walk_table(axes, data["functions"][decl.name])}
        constants = {k: str(v) for k, v in data.get("constants", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed structure JSON: {exc}") from exc
    return FiniteStructure(
        language=lng, universes=universes, metric=metric,
        relations=relations, functions=functions, constants=constants,
        name=str(data.get("name", "")),
    )


def load_structure(path: str, language: L.MetricLanguage | None = None) -> FiniteStructure:
    with open(path) as fh:
        return structure_from_json(json.load(fh), language)
