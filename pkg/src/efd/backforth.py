"""Back-and-forth pseudo-distances between finite structures.

The hierarchy r_0 <= r_1 <= ... compares two structures at a position, a
finite set of pledged pairs (one element from each side, tagged by sort):

  r_0       best separation achievable by a quantifier-free test.  All
            connectives in the basis are 1-Lipschitz for the sup norm, so
            closing atoms under them never increases a separation and the
            supremum collapses to a max over admissible atoms.
  r_{k+1}   one game round: the worst challenge (either side) against the
            best reply, taken over r_k of the extended positions.
  r_stab    the iteration's fixpoint.  Values per position are monotone
            in the rank and live in a finite set, so iterating until the
            whole table is unchanged for one step terminates; the first
            such rank is reported as alpha_star.

Positions are canonical sets: the order pledges were made in and repeated
pledges are quotiented away.  To keep r_0 independent of any enumeration
order of the pledges, an atom's chained modulus vector is compared against
the weak-modulus truncation by sorted coefficient multisets (an atom is
admissible iff some assignment of pledges to truncation slots dominates
it, which is exactly the sorted comparison).

Atoms range over the synchronized closure of the position: pledged pairs
and constant pairs, closed under applying each function symbol to both
sides simultaneously up to a depth cap, every reached pair carrying its
Pareto-minimal chained modulus vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .lang import DEFAULT_OMEGA, MetricLanguage, WeakModulus
from .structures import FiniteStructure

ZERO = Fraction(0)

# A pledge is (sort, element of A, element of B); a position is a set of them.
Pledge = tuple[str, str, str]
CanonPos = frozenset[Pledge]

EMPTY: CanonPos = frozenset()


def position_of(pairs: Iterable[Pledge]) -> CanonPos:
    return frozenset(pairs)


def position_key(pos: CanonPos) -> str:
    """Deterministic serialization, used in certificates and JSON output."""
    return "|".join(f"{s}:{a}:{b}" for s, a, b in sorted(pos))


def parse_position_key(key: str) -> CanonPos:
    if not key:
        return EMPTY
    out = []
    for part in key.split("|"):
        s, a, b = part.split(":")
        out.append((s, a, b))
    return frozenset(out)


# ---------------------------------------------------------------------------
# synchronized closure


def sync_closure(
    a: FiniteStructure,
    b: FiniteStructure,
    position: CanonPos,
    depth: int = 3,
) -> dict[tuple[str, str, str], list[tuple[Fraction, ...]]]:
    """Pairs reachable from the position by shared terms.

    Seeds are the pledges (unit modulus vectors over the sorted pledge
    list) and the constant pairs (zero vectors).  Each round applies every
    function symbol to both sides at once; a reached pair keeps the
    Pareto-minimal set of chained modulus vectors since incomparable term
    routes can trade coefficients against each other.
    """
    pledges = sorted(position)
    n = len(pledges)

    def unit(i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(1) if j == i else ZERO for j in range(n))

    zero = tuple([ZERO] * n)
    pairs: dict[tuple[str, str, str], list[tuple[Fraction, ...]]] = {}

    def add(key: tuple[str, str, str], vec: tuple[Fraction, ...]) -> bool:
        vecs = pairs.setdefault(key, [])
        for v in vecs:
            if all(vi <= wi for vi, wi in zip(v, vec)):
                return False  # dominated by an existing route
        vecs[:] = [v for v in vecs if not all(wi <= vi for vi, wi in zip(v, vec))]
        vecs.append(vec)
        return True

    for i, (sort, x, y) in enumerate(pledges):
        add((sort, x, y), unit(i))
    for decl in a.language.constants:
        add((decl.sort, a.constants[decl.name], b.constants[decl.name]), zero)

    for _ in range(depth):
        changed = False
        snapshot = [(key, tuple(vecs)) for key, vecs in pairs.items()]
        by_sort: dict[str, list[tuple[tuple[str, str, str], tuple]] ] = {}
        for key, vecs in snapshot:
            by_sort.setdefault(key[0], []).append((key, vecs))
        for decl in a.language.functions:
            pools = [by_sort.get(s, []) for s in decl.args]
            if any(not p for p in pools):
                continue
            for combo in itertools.product(*pools):
                ua = tuple(k[1] for k, _ in combo)
                ub = tuple(k[2] for k, _ in combo)
                key = (decl.result, a.func(decl.name, ua), b.func(decl.name, ub))
                for vecchoice in itertools.product(*(vs for _, vs in combo)):
                    vec = zero
                    for lam, v in zip(decl.modulus, vecchoice):
                        vec = tuple(c + lam * vi for c, vi in zip(vec, v))
                    if add(key, vec):
                        changed = True
        if not changed:
            break
    return pairs


# ---------------------------------------------------------------------------
# the engine


@dataclass
class DistanceTable:
    """Stabilized values over every canonical position, with the first rank
    at which one more iteration leaves the whole table unchanged."""

    values: dict[CanonPos, Fraction]
    alpha_star: int


class BnfEngine:
    """Shared caches for one structure pair under one weak modulus.

    Function-free languages with relations of arity at most 2 take a fast
    route: all atom gaps collapse into per-pledge and per-pledge-pair
    tables keyed by the atom's coefficient multiset, so r_0 of a position
    is a handful of lookups.  Everything else enumerates atoms over the
    synchronized closure directly.
    """

    def __init__(
        self,
        a: FiniteStructure,
        b: FiniteStructure,
        omega: WeakModulus = DEFAULT_OMEGA,
        depth: int = 3,
        max_stab_pairs: int = 16,
    ) -> None:
        if a.language != b.language:
            raise ValueError("structures must share a language")
        self.a = a
        self.b = b
        self.lang: MetricLanguage = a.language
        self.omega = omega
        self.depth = depth
        self.max_stab_pairs = max_stab_pairs
        self._r0_cache: dict[CanonPos, Fraction] = {}
        self._rk_cache: dict[tuple[int, CanonPos], Fraction] = {}
        self._adm_cache: dict[tuple[tuple[Fraction, ...], int], bool] = {}
        self._trunc_desc: dict[int, tuple[Fraction, ...]] = {}
        self._fast = (not self.lang.functions
                      and all(len(r.args) <= 2 for r in self.lang.relations))
        self._tables_built = False
        self._stab: Optional[DistanceTable] = None
        self._history: list[dict[CanonPos, Fraction]] = []
        self.max_gap = self._compute_max_gap()

    # -- bounds and admissibility ------------------------------------------

    def _compute_max_gap(self) -> Fraction:
        m = ZERO
        for s in self.lang.sorts:
            m = max(m, s.diameter)
        for r in self.lang.relations:
            m = max(m, r.interval[1] - r.interval[0])
        return m

    def _trunc(self, n: int) -> tuple[Fraction, ...]:
        if n not in self._trunc_desc:
            self._trunc_desc[n] = tuple(
                sorted((self.omega.coefficient(i) for i in range(n)), reverse=True))
        return self._trunc_desc[n]

    def _admissible(self, coeffs: tuple[Fraction, ...], n: int) -> bool:
        """coeffs: the atom's nonzero modulus coefficients, sorted descending."""
        key = (coeffs, n)
        cached = self._adm_cache.get(key)
        if cached is not None:
            return cached
        if len(coeffs) > n:
            ok = False
        else:
            trunc = self._trunc(n)
            ok = all(c <= t for c, t in zip(coeffs, trunc))
        self._adm_cache[key] = ok
        return ok

    # -- fast-path tables ----------------------------------------------------

    def _ensure_tables(self) -> None:
        if self._tables_built:
            return
        self._tables_built = True
        a, b, lang = self.a, self.b, self.lang
        pledge_list: list[Pledge] = []
        for sort in lang.sort_names():
            for x in a.elems(sort):
                for y in b.elems(sort):
                    pledge_list.append((sort, x, y))
        self.pledge_list = pledge_list
        self.pledge_index = {p: i for i, p in enumerate(pledge_list)}
        if not self._fast:
            return

        consts = [(c.sort, a.constants[c.name], b.constants[c.name])
                  for c in lang.constants]
        base = ZERO
        single: dict[tuple[Fraction, ...], dict[int, Fraction]] = {}
        pairwise: dict[tuple[Fraction, ...], dict[tuple[int, int], Fraction]] = {}

        def bump_single(cls: tuple[Fraction, ...], idx: int, gap: Fraction) -> None:
            t = single.setdefault(cls, {})
            if gap > t.get(idx, ZERO):
                t[idx] = gap

        def bump_pair(cls: tuple[Fraction, ...], i: int, j: int, gap: Fraction) -> None:
            key = (i, j) if i < j else (j, i)
            t = pairwise.setdefault(cls, {})
            if gap > t.get(key, ZERO):
                t[key] = gap

        # metric atoms
        for sort in lang.sort_names():
            members = [(self.pledge_index[p], p) for p in pledge_list if p[0] == sort]
            for (i, p), (j, q) in itertools.combinations(members, 2):
                gap = abs(a.dist(sort, p[1], q[1]) - b.dist(sort, p[2], q[2]))
                bump_pair((Fraction(1), Fraction(1)), i, j, gap)
            for i, p in members:
                for k in consts:
                    if k[0] != sort:
                        continue
                    gap = abs(a.dist(sort, p[1], k[1]) - b.dist(sort, p[2], k[2]))
                    bump_single((Fraction(1),), i, gap)
            for k1, k2 in itertools.combinations([k for k in consts if k[0] == sort], 2):
                base = max(base, abs(a.dist(sort, k1[1], k2[1]) - b.dist(sort, k1[2], k2[2])))

        # relation atoms, arity 1 and 2
        for decl in lang.relations:
            lam = decl.modulus
            if len(decl.args) == 1:
                sort = decl.args[0]
                for p in pledge_list:
                    if p[0] != sort:
                        continue
                    gap = abs(a.rel(decl.name, (p[1],)) - b.rel(decl.name, (p[2],)))
                    bump_single((lam[0],), self.pledge_index[p], gap)
                for k in consts:
                    if k[0] == sort:
                        base = max(base, abs(a.rel(decl.name, (k[1],)) - b.rel(decl.name, (k[2],))))
                continue
            s1, s2 = decl.args
            slots1 = [("p", p) for p in pledge_list if p[0] == s1] + \
                     [("k", k) for k in consts if k[0] == s1]
            slots2 = [("p", p) for p in pledge_list if p[0] == s2] + \
                     [("k", k) for k in consts if k[0] == s2]
            for kind1, e1 in slots1:
                for kind2, e2 in slots2:
                    gap = abs(a.rel(decl.name, (e1[1], e2[1]))
                              - b.rel(decl.name, (e1[2], e2[2])))
                    if kind1 == "p" and kind2 == "p":
                        i, j = self.pledge_index[e1], self.pledge_index[e2]
                        if i == j:
                            bump_single((lam[0] + lam[1],), i, gap)
                        else:
                            cls = tuple(sorted((lam[0], lam[1]), reverse=True))
                            bump_pair(cls, i, j, gap)
                    elif kind1 == "p":
                        bump_single((lam[0],), self.pledge_index[e1], gap)
                    elif kind2 == "p":
                        bump_single((lam[1],), self.pledge_index[e2], gap)
                    else:
                        base = max(base, gap)

        self._base_gap = base
        self._single = {cls: t for cls, t in single.items() if t}
        self._pairwise = {cls: t for cls, t in pairwise.items() if t}

    # -- r_0 -------------------------------------------------------------------

    def r0(self, position: CanonPos) -> Fraction:
        cached = self._r0_cache.get(position)
        if cached is not None:
            return cached
        value = self._r0_fast(position) if self._fast else self._r0_generic(position)
        self._r0_cache[position] = value
        return value

    def _r0_fast(self, position: CanonPos) -> Fraction:
        self._ensure_tables()
        n = len(position)
        idxs = [self.pledge_index[p] for p in position]
        best = self._base_gap
        m = self.max_gap
        for cls, table in self._single.items():
            if best >= m:
                break
            if not self._admissible(cls, n):
                continue
            for i in idxs:
                g = table.get(i)
                if g is not None and g > best:
                    best = g
        if best < m:
            for cls, table in self._pairwise.items():
                if best >= m:
                    break
                if not self._admissible(cls, n):
                    continue
                for i, j in itertools.combinations(sorted(idxs), 2):
                    g = table.get((i, j))
                    if g is not None and g > best:
                        best = g
                        if best >= m:
                            break
        return best

    def _r0_generic(self, position: CanonPos) -> Fraction:
        n = len(position)
        closure = sync_closure(self.a, self.b, position, self.depth)
        items = sorted(closure.items())
        best = ZERO
        m = self.max_gap

        def adm(vecs: Iterable[tuple[Fraction, ...]]) -> bool:
            for combo in itertools.product(*vecs):
                total = [ZERO] * n
                for v in combo:
                    for i, c in enumerate(v):
                        total[i] += c
                coeffs = tuple(sorted((c for c in total if c > 0), reverse=True))
                if self._admissible(coeffs, n):
                    return True
            return False

        for (k1, vs1), (k2, vs2) in itertools.combinations(items, 2):
            if k1[0] != k2[0]:
                continue
            sort = k1[0]
            gap = abs(self.a.dist(sort, k1[1], k2[1]) - self.b.dist(sort, k1[2], k2[2]))
            if gap > best and adm((vs1, vs2)):
                best = gap
                if best >= m:
                    return best
        for decl in self.lang.relations:
            pools = [[(k, vs) for k, vs in items if k[0] == s] for s in decl.args]
            if any(not p for p in pools):
                continue
            for combo in itertools.product(*pools):
                ua = tuple(k[1] for k, _ in combo)
                ub = tuple(k[2] for k, _ in combo)
                gap = abs(self.a.rel(decl.name, ua) - self.b.rel(decl.name, ub))
                if gap <= best:
                    continue
                scaled = []
                for lam, (_, vs) in zip(decl.modulus, combo):
                    scaled.append([tuple(lam * c for c in v) for v in vs])
                if adm(scaled):
                    best = gap
                    if best >= m:
                        return best
        return best

    # -- finite ranks, demand-driven -------------------------------------------

    def r_alpha(self, position: CanonPos, alpha: int) -> Fraction:
        if alpha <= 0:
            return self.r0(position)
        key = (alpha, position)
        cached = self._rk_cache.get(key)
        if cached is not None:
            return cached
        best = ZERO
        m = self.max_gap
        for sort in self.lang.sort_names():
            if best >= m:
                break
            for c in self.a.elems(sort):
                low: Optional[Fraction] = None
                for d in self.b.elems(sort):
                    v = self.r_alpha(position | {(sort, c, d)}, alpha - 1)
                    if low is None or v < low:
                        low = v
                        if low == ZERO:
                            break
                if low is not None and low > best:
                    best = low
                    if best >= m:
                        break
            if best >= m:
                break
            for d in self.b.elems(sort):
                low = None
                for c in self.a.elems(sort):
                    v = self.r_alpha(position | {(sort, c, d)}, alpha - 1)
                    if low is None or v < low:
                        low = v
                        if low == ZERO:
                            break
                if low is not None and low > best:
                    best = low
                    if best >= m:
                        break
        self._rk_cache[key] = best
        return best

    # -- the global fixpoint ----------------------------------------------------

    def _all_pledges(self) -> list[Pledge]:
        self._ensure_tables()
        return self.pledge_list

    def distance_table(self) -> DistanceTable:
        if self._stab is not None:
            return self._stab
        pledges = self._all_pledges()
        p = len(pledges)
        if p > self.max_stab_pairs:
            raise ValueError(
                f"stabilization enumerates all 2^{p} canonical positions; "
                f"raise max_stab_pairs above {self.max_stab_pairs} to allow it")
        size = 1 << p

        def mask_pos(mask: int) -> CanonPos:
            return frozenset(pledges[i] for i in range(p) if mask >> i & 1)

        current = [self.r0(mask_pos(mask)) for mask in range(size)]

        # challenge groups: for each element on each side, the reply bits
        groups: list[list[int]] = []
        for sort in self.lang.sort_names():
            for c in self.a.elems(sort):
                groups.append([1 << i for i, pl in enumerate(pledges)
                               if pl[0] == sort and pl[1] == c])
            for d in self.b.elems(sort):
                groups.append([1 << i for i, pl in enumerate(pledges)
                               if pl[0] == sort and pl[2] == d])

        history = [current]
        while True:
            nxt = []
            for mask in range(size):
                best = ZERO
                for bits in groups:
                    low = None
                    for bit in bits:
                        v = current[mask | bit]
                        if low is None or v < low:
                            low = v
                            if low == ZERO:
                                break
                    if low is not None and low > best:
                        best = low
                nxt.append(best)
            history.append(nxt)
            if nxt == current:
                break
            current = nxt

        alpha_star = len(history) - 2  # first rank whose table equals the next
        values = {mask_pos(mask): current[mask] for mask in range(size)}
        self._history = [
            {mask_pos(mask): table[mask] for mask in range(size)} for table in history]
        self._stab = DistanceTable(values=values, alpha_star=alpha_star)
        return self._stab

    def alpha_star(self) -> int:
        return self.distance_table().alpha_star

    def r_stab(self, position: CanonPos = EMPTY) -> tuple[Fraction, int]:
        table = self.distance_table()
        return table.values[position], table.alpha_star

    def rank_table(self, alpha: int) -> dict[CanonPos, Fraction]:
        """The full table at a finite rank (clamped to the fixpoint)."""
        self.distance_table()
        return self._history[min(alpha, len(self._history) - 1)]

    def value_at(self, position: CanonPos, rank: Optional[int]) -> Fraction:
        """Distance at a finite rank, or the stabilized value for None."""
        if rank is None:
            return self.distance_table().values[position]
        return self.r_alpha(position, rank)


# ---------------------------------------------------------------------------
# module-level wrappers


def r0(a: FiniteStructure, b: FiniteStructure, position: CanonPos = EMPTY,
       omega: WeakModulus = DEFAULT_OMEGA, depth: int = 3) -> Fraction:
    return BnfEngine(a, b, omega, depth).r0(position)


def r_alpha(a: FiniteStructure, b: FiniteStructure, alpha: int,
            position: CanonPos = EMPTY, omega: WeakModulus = DEFAULT_OMEGA,
            depth: int = 3) -> Fraction:
    return BnfEngine(a, b, omega, depth).r_alpha(position, alpha)


def r_stab(a: FiniteStructure, b: FiniteStructure, position: CanonPos = EMPTY,
           omega: WeakModulus = DEFAULT_OMEGA, depth: int = 3,
           max_stab_pairs: int = 16) -> tuple[Fraction, int]:
    return BnfEngine(a, b, omega, depth, max_stab_pairs).r_stab(position)


def equiv_bf(a: FiniteStructure, b: FiniteStructure, alpha: Optional[int] = None,
             omega: WeakModulus = DEFAULT_OMEGA, depth: int = 3) -> bool:
    """Back-and-forth equivalence: the distance at the given finite rank
    (or the stabilized distance, for alpha=None) is exactly zero."""
    engine = BnfEngine(a, b, omega, depth)
    if alpha is None:
        return engine.r_stab()[0] == 0
    return engine.r_alpha(EMPTY, alpha) == 0
