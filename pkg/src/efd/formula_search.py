"""Budgeted search for a separating formula.

Enumerates formulas in the 1-Lipschitz basis whose modulus the weak
modulus dominates, up to a quantifier rank, and reports the largest
value gap found between the two structures at a position.  The result is
a certified lower bound for the distance at that rank: every enumerated
formula is evaluated exactly on both sides, so the reported gap is
attained by the returned formula.

The build is layered from the innermost quantifier outward.  Variables
x1..xn are fixed to the pledged pairs; x(n+1)..x(n+alpha) are the
quantified ones, innermost last, so each quantifier binds the maximal
free index as the admissible fragment requires.  Per layer: atoms over
the available variables, a bounded number of connective closure passes
with value-signature deduplication, then both quantifiers over the
layer's variable.  Signatures (the formula's value on every assignment)
are composed pointwise, so closure passes never re-evaluate terms.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional

from . import lang as L
from .backforth import EMPTY, CanonPos
from .structures import FiniteStructure, eval_formula

ZERO = Fraction(0)


class _Budget:
    def __init__(self, n: int) -> None:
        self.left = n

    def spend(self) -> bool:
        if self.left <= 0:
            return False
        self.left -= 1
        return True


class _Cand:
    """A formula with its exact value signature on each structure and its
    running modulus (variable name -> coefficient)."""

    __slots__ = ("phi", "sig_a", "sig_b", "mod")

    def __init__(self, phi, sig_a, sig_b, mod) -> None:
        self.phi = phi
        self.sig_a = sig_a
        self.sig_b = sig_b
        self.mod = mod


def _monus_consts(a: FiniteStructure, b: FiniteStructure, cap: int = 6) -> list[Fraction]:
    vals = {ZERO}
    for r in a.language.relations:
        vals.add(r.interval[0])
        vals.add(r.interval[1])
    for s in (a, b):
        for table in s.relations.values():
            vals.update(table.values())
        for table in s.metric.values():
            vals.update(table.values())
    return sorted(vals)[:cap]


def _atoms(language: L.MetricLanguage, vs: list[L.Var]) -> list[L.Formula]:
    terms_by_sort: dict[str, list[L.Term]] = {}
    for v in vs:
        terms_by_sort.setdefault(v.sort, []).append(v)
    for c in language.constants:
        terms_by_sort.setdefault(c.sort, []).append(L.ConstTerm(c.name))
    if language.functions:
        base = {s: list(ts) for s, ts in terms_by_sort.items()}
        for f in language.functions:
            pools = [base.get(s, []) for s in f.args]
            if any(not p for p in pools):
                continue
            for combo in itertools.product(*pools):
                terms_by_sort.setdefault(f.result, []).append(L.App(f.name, tuple(combo)))
    for s in terms_by_sort:
        terms_by_sort[s] = terms_by_sort[s][:12]

    def has_var(t: L.Term) -> bool:
        return bool(L.term_vars(t))

    out: list[L.Formula] = []
    for s, ts in sorted(terms_by_sort.items()):
        for t1, t2 in itertools.combinations(ts, 2):
            if has_var(t1) or has_var(t2):
                out.append(L.Dist(t1, t2))
    for r in language.relations:
        pools = [terms_by_sort.get(s, []) for s in r.args]
        if any(not p for p in pools):
            continue
        for combo in itertools.product(*pools):
            if any(has_var(t) for t in combo):
                out.append(L.Rel(r.name, tuple(combo)))
    return out


def _dominated(mod: dict[str, Fraction], omega: L.WeakModulus) -> bool:
    for name, coeff in mod.items():
        if coeff > omega.coefficient(L.var_index(name) - 1):
            return False
    return True


def _merge_max(m1: dict[str, Fraction], m2: dict[str, Fraction]) -> dict[str, Fraction]:
    out = dict(m1)
    for k, v in m2.items():
        if v > out.get(k, ZERO):
            out[k] = v
    return out


def _merge_avg(m1: dict[str, Fraction], m2: dict[str, Fraction]) -> dict[str, Fraction]:
    out = {}
    for k in set(m1) | set(m2):
        out[k] = (m1.get(k, ZERO) + m2.get(k, ZERO)) / 2
    return out


class _Pool:
    def __init__(self, cap: int) -> None:
        self.cap = cap
        self.items: list[_Cand] = []
        self.seen: dict[tuple, int] = {}

    def add(self, cand: _Cand) -> None:
        if len(self.items) >= self.cap:
            return
        key = (cand.sig_a, cand.sig_b)
        at = self.seen.get(key)
        if at is not None:
            # same behaviour everywhere; keep the one with the smaller modulus
            old = self.items[at]
            if sum(cand.mod.values()) < sum(old.mod.values()):
                self.items[at] = cand
            return
        self.seen[key] = len(self.items)
        self.items.append(cand)


def formula_sup_lower_bound(
    a: FiniteStructure,
    b: FiniteStructure,
    alpha: int,
    position: CanonPos = EMPTY,
    omega: L.WeakModulus = L.DEFAULT_OMEGA,
    budget: int = 20000,
    pool_cap: int = 128,
    passes: int = 2,
) -> tuple[Fraction, Optional[L.Formula]]:
    """Largest |phi^A - phi^B| found over admissible formulas of rank at
    most alpha, with x1..xn pinned to the position's pledges.  Returns the
    gap and a witness formula (None when nothing non-trivial was found)."""
    if a.language != b.language:
        raise ValueError("structures must share a language")
    language = a.language
    pledges = sorted(position)
    n = len(pledges)
    pledge_vars = [L.Var(f"x{i + 1}", p[0]) for i, p in enumerate(pledges)]
    budget_box = _Budget(budget)
    consts = _monus_consts(a, b)
    sort_names = language.sort_names()

    best_gap = ZERO
    best_phi: Optional[L.Formula] = None

    def signature(struct: FiniteStructure, phi: L.Formula, vs: list[L.Var]) -> tuple:
        unis = [struct.elems(v.sort) for v in vs]
        names = [v.name for v in vs]
        return tuple(eval_formula(struct, phi, dict(zip(names, combo)))
                     for combo in itertools.product(*unis))

    def close(pool: _Pool, vs: list[L.Var]) -> None:
        for _ in range(passes):
            snapshot = list(pool.items)
            for cand in snapshot:
                for q in consts:
                    if not budget_box.spend():
                        return
                    pool.add(_Cand(L.MonusConst(cand.phi, q),
                                   tuple(max(v - q, ZERO) for v in cand.sig_a),
                                   tuple(max(v - q, ZERO) for v in cand.sig_b),
                                   cand.mod))
                    if not budget_box.spend():
                        return
                    pool.add(_Cand(L.ConstMonus(q, cand.phi),
                                   tuple(max(q - v, ZERO) for v in cand.sig_a),
                                   tuple(max(q - v, ZERO) for v in cand.sig_b),
                                   cand.mod))
            for c1, c2 in itertools.combinations(snapshot, 2):
                for kind in ("max", "min", "mid"):
                    if not budget_box.spend():
                        return
                    if kind == "max":
                        phi: L.Formula = L.Max((c1.phi, c2.phi))
                        sig_a = tuple(map(max, c1.sig_a, c2.sig_a))
                        sig_b = tuple(map(max, c1.sig_b, c2.sig_b))
                        mod = _merge_max(c1.mod, c2.mod)
                    elif kind == "min":
                        phi = L.Min((c1.phi, c2.phi))
                        sig_a = tuple(map(min, c1.sig_a, c2.sig_a))
                        sig_b = tuple(map(min, c1.sig_b, c2.sig_b))
                        mod = _merge_max(c1.mod, c2.mod)
                    else:
                        phi = L.Midpoint(c1.phi, c2.phi)
                        sig_a = tuple((u + v) / 2 for u, v in zip(c1.sig_a, c2.sig_a))
                        sig_b = tuple((u + v) / 2 for u, v in zip(c1.sig_b, c2.sig_b))
                        mod = _merge_avg(c1.mod, c2.mod)
                    if _dominated(mod, omega):
                        pool.add(_Cand(phi, sig_a, sig_b, mod))

    def seed(pool: _Pool, vs: list[L.Var]) -> None:
        for phi in _atoms(language, vs):
            if not budget_box.spend():
                return
            mod = L.derived_modulus(language, phi)
            if not _dominated(mod, omega):
                continue
            pool.add(_Cand(phi, signature(a, phi, vs), signature(b, phi, vs), mod))

    def run(quant_sorts: tuple[str, ...]) -> None:
        nonlocal best_gap, best_phi
        all_vars = pledge_vars + [L.Var(f"x{n + j + 1}", s)
                                  for j, s in enumerate(quant_sorts)]
        pool = _Pool(pool_cap)
        seed(pool, all_vars)
        close(pool, all_vars)
        for level in range(alpha, 0, -1):
            vs = all_vars[:n + level]
            bound = vs[-1]
            outer_vs = vs[:-1]
            block_a = len(a.elems(bound.sort))
            block_b = len(b.elems(bound.sort))
            nxt = _Pool(pool_cap)
            for cand in pool.items:
                body_mod = {k: v for k, v in cand.mod.items() if k != bound.name}
                for kind in ("inf", "sup"):
                    if kind == "inf":
                        phi: L.Formula = L.Inf(bound.name, bound.sort, cand.phi)
                        red = min
                    else:
                        phi = L.Sup(bound.name, bound.sort, cand.phi)
                        red = max
                    sig_a = tuple(red(cand.sig_a[i:i + block_a])
                                  for i in range(0, len(cand.sig_a), block_a))
                    sig_b = tuple(red(cand.sig_b[i:i + block_b])
                                  for i in range(0, len(cand.sig_b), block_b))
                    nxt.add(_Cand(phi, sig_a, sig_b, body_mod))
            seed(nxt, outer_vs)
            close(nxt, outer_vs)
            pool = nxt
        # index of the pledged assignment inside the full product signature
        idx_a = idx_b = 0
        for v, p in zip(pledge_vars, pledges):
            idx_a = idx_a * len(a.elems(v.sort)) + a.elems(v.sort).index(p[1])
            idx_b = idx_b * len(b.elems(v.sort)) + b.elems(v.sort).index(p[2])
        for cand in pool.items:
            gap = abs(cand.sig_a[idx_a] - cand.sig_b[idx_b])
            if gap > best_gap:
                best_gap = gap
                best_phi = cand.phi

    if alpha <= 0:
        run(())
    else:
        for quant_sorts in itertools.product(sort_names, repeat=alpha):
            if budget_box.left <= 0 and best_phi is not None:
                break
            run(quant_sorts)
    return best_gap, best_phi
