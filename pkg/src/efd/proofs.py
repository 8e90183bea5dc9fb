"""Hilbert-style proof checking over finite category presentations.

A finite category presentation induces a first-order language: one sort
Mor(x,y) per ordered object pair, a constant [f] per morphism, and a
composition symbol applied as c(outer, inner) = outer after inner, so
c(f,g) is defined when the target of g is the source of f.  Its theory
consists of all associativity instances (one per object quadruple),
both identity laws per sort, and one ground equation c([f],[g]) = [f.g]
per composable pair.

The checker validates proof sequences line by line: axioms (theory
members, propositional tautologies by truth table, equality schemes as
term instances, quantifier instance/introduction axioms with literal,
capture-avoiding matching), modus ponens, and the two generalization
rules, each with the side condition that the generalized variable is not
free in the fixed side of the implication.

Instance matching is literal: no alpha-renaming of binders.  The
tautology recognizer caps the propositional skeleton at 12 distinct
atoms and raises past that rather than answering wrongly.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .lang import ValidationReport

TAUT_ATOM_CAP = 12


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class FiniteCategoryPresentation:
    objects: tuple[str, ...]
    morphisms: tuple[tuple[str, str, str], ...]  # (id, source, target)
    identities: dict[str, str] = field(hash=False)
    composition: dict[tuple[str, str], str] = field(hash=False)  # (outer, inner)

    def src(self, m: str) -> str:
        return self._mor_index()[m][0]

    def tgt(self, m: str) -> str:
        return self._mor_index()[m][1]

    def _mor_index(self) -> dict[str, tuple[str, str]]:
        idx = getattr(self, "_idx", None)
        if idx is None:
            idx = {m: (s, t) for m, s, t in self.morphisms}
            object.__setattr__(self, "_idx", idx)
        return idx

    def mors(self, x: str, y: str) -> list[str]:
        return [m for m, s, t in self.morphisms if s == x and t == y]

    def compose(self, outer: str, inner: str) -> str:
        return self.composition[(outer, inner)]


def validate_category(cat: FiniteCategoryPresentation) -> ValidationReport:
    defects: list[str] = []
    objects = set(cat.objects)
    if len(cat.objects) != len(objects):
        defects.append("duplicate object ids")
    mor_ids = [m for m, _, _ in cat.morphisms]
    if len(mor_ids) != len(set(mor_ids)):
        defects.append("duplicate morphism ids")
    for m, s, t in cat.morphisms:
        if s not in objects or t not in objects:
            defects.append(f"morphism {m} has unknown endpoint")
    if defects:
        return ValidationReport(ok=False, defects=defects)
    idx = {m: (s, t) for m, s, t in cat.morphisms}
    for x in cat.objects:
        i = cat.identities.get(x)
        if i is None or i not in idx:
            defects.append(f"object {x} has no identity morphism")
        elif idx[i] != (x, x):
            defects.append(f"identity of {x} is not an endomorphism of {x}")
    extra = set(cat.identities) - objects
    for x in sorted(extra):
        defects.append(f"identity assigned to unknown object {x}")
    if defects:
        return ValidationReport(ok=False, defects=defects)
    # the table must cover exactly the composable pairs, land in the right
    # sort, satisfy both identity laws, and associate
    composable = {(f, g) for f in idx for g in idx if idx[g][1] == idx[f][0]}
    table_keys = set(cat.composition)
    for pair in sorted(composable - table_keys):
        defects.append(f"composition undefined for composable pair {pair}")
    for pair in sorted(table_keys - composable):
        defects.append(f"composition defined for non-composable pair {pair}")
    if defects:
        return ValidationReport(ok=False, defects=defects)
    for (f, g), h in cat.composition.items():
        if h not in idx:
            defects.append(f"composition c({f},{g}) names unknown morphism {h}")
        elif idx[h] != (idx[g][0], idx[f][1]):
            defects.append(f"composition c({f},{g}) = {h} lands in the wrong sort")
    if defects:
        # identity and associativity walks compose results; they need a
        # well-sorted table to be meaningful
        return ValidationReport(ok=False, defects=defects)
    for m, s, t in cat.morphisms:
        if cat.composition.get((m, cat.identities[s])) != m:
            defects.append(f"right identity fails at {m}")
        if cat.composition.get((cat.identities[t], m)) != m:
            defects.append(f"left identity fails at {m}")
    for f in idx:
        for g in idx:
            if idx[g][1] != idx[f][0]:
                continue
            for h in idx:
                if idx[h][1] != idx[g][0]:
                    continue
                if cat.compose(cat.compose(f, g), h) != cat.compose(f, cat.compose(g, h)):
                    defects.append(f"associativity fails at ({f},{g},{h})")
    return ValidationReport(ok=not defects, defects=defects)


def terminal_category() -> FiniteCategoryPresentation:
    return FiniteCategoryPresentation(
        objects=("x",),
        morphisms=(("i_x", "x", "x"),),
        identities={"x": "i_x"},
        composition={("i_x", "i_x"): "i_x"})


def two_object_groupoid() -> FiniteCategoryPresentation:
    comp = {
        ("i_x", "i_x"): "i_x", ("i_y", "i_y"): "i_y",
        ("f", "i_x"): "f", ("i_y", "f"): "f",
        ("g", "i_y"): "g", ("i_x", "g"): "g",
        ("f", "g"): "i_y", ("g", "f"): "i_x",
    }
    return FiniteCategoryPresentation(
        objects=("x", "y"),
        morphisms=(("i_x", "x", "x"), ("i_y", "y", "y"),
                   ("f", "x", "y"), ("g", "y", "x")),
        identities={"x": "i_x", "y": "i_y"},
        composition=comp)


def two_object_discrete() -> FiniteCategoryPresentation:
    return FiniteCategoryPresentation(
        objects=("x", "y"),
        morphisms=(("i_x", "x", "x"), ("i_y", "y", "y")),
        identities={"x": "i_x", "y": "i_y"},
        composition={("i_x", "i_x"): "i_x", ("i_y", "i_y"): "i_y"})


# ---------------------------------------------------------------------------
# sentences


@dataclass(frozen=True)
class CVar:
    name: str
    src: str
    tgt: str


@dataclass(frozen=True)
class CConst:
    morph: str
    src: str
    tgt: str


@dataclass(frozen=True)
class CComp:
    outer: "CTerm"
    inner: "CTerm"


CTerm = Union[CVar, CConst, CComp]


@dataclass(frozen=True)
class CEq:
    left: CTerm
    right: CTerm


@dataclass(frozen=True)
class CNot:
    body: "CatSentence"


@dataclass(frozen=True)
class CAnd:
    left: "CatSentence"
    right: "CatSentence"


@dataclass(frozen=True)
class COr:
    left: "CatSentence"
    right: "CatSentence"


@dataclass(frozen=True)
class CImp:
    left: "CatSentence"
    right: "CatSentence"


@dataclass(frozen=True)
class CForall:
    var: str
    src: str
    tgt: str
    body: "CatSentence"


@dataclass(frozen=True)
class CExists:
    var: str
    src: str
    tgt: str
    body: "CatSentence"


CatSentence = Union[CEq, CNot, CAnd, COr, CImp, CForall, CExists]


def term_sort(t: CTerm) -> tuple[str, str]:
    if isinstance(t, (CVar, CConst)):
        return (t.src, t.tgt)
    os, ot = term_sort(t.outer)
    ins, int_ = term_sort(t.inner)
    if int_ != os:
        raise ValueError(f"non-composable composition: inner lands in {int_}, "
                         f"outer starts at {os}")
    return (ins, ot)


def term_free_vars(t: CTerm) -> set[str]:
    if isinstance(t, CVar):
        return {t.name}
    if isinstance(t, CConst):
        return set()
    return term_free_vars(t.outer) | term_free_vars(t.inner)


def sentence_free_vars(phi: CatSentence) -> set[str]:
    if isinstance(phi, CEq):
        return term_free_vars(phi.left) | term_free_vars(phi.right)
    if isinstance(phi, CNot):
        return sentence_free_vars(phi.body)
    if isinstance(phi, (CAnd, COr, CImp)):
        return sentence_free_vars(phi.left) | sentence_free_vars(phi.right)
    return sentence_free_vars(phi.body) - {phi.var}


def sort_check(cat: FiniteCategoryPresentation, phi: CatSentence) -> None:
    """Raises ValueError on sort errors, unknown morphisms, or free variables
    whose annotation disagrees with their binder."""
    def term(t: CTerm, env: dict[str, tuple[str, str]]) -> tuple[str, str]:
        if isinstance(t, CVar):
            bound = env.get(t.name)
            if bound is None:
                raise ValueError(f"unbound variable {t.name}")
            if bound != (t.src, t.tgt):
                raise ValueError(f"variable {t.name} used at the wrong sort")
            return bound
        if isinstance(t, CConst):
            known = {m: (s, tt) for m, s, tt in cat.morphisms}
            if t.morph not in known:
                raise ValueError(f"unknown morphism constant [{t.morph}]")
            if known[t.morph] != (t.src, t.tgt):
                raise ValueError(f"constant [{t.morph}] annotated with wrong sort")
            return known[t.morph]
        if isinstance(t, CComp):
            os, ot = term(t.outer, env)
            ins, int_ = term(t.inner, env)
            if int_ != os:
                raise ValueError("non-composable composition")
            return (ins, ot)
        raise ValueError(f"not a term: {t!r}")

    def walk(f: CatSentence, env: dict[str, tuple[str, str]]) -> None:
        if isinstance(f, CEq):
            if term(f.left, env) != term(f.right, env):
                raise ValueError("equality between different sorts")
        elif isinstance(f, CNot):
            walk(f.body, env)
        elif isinstance(f, (CAnd, COr, CImp)):
            walk(f.left, env)
            walk(f.right, env)
        elif isinstance(f, (CForall, CExists)):
            if f.src not in cat.objects or f.tgt not in cat.objects:
                raise ValueError(f"quantifier over unknown sort Mor({f.src},{f.tgt})")
            walk(f.body, {**env, f.var: (f.src, f.tgt)})
        else:
            raise ValueError(f"not a sentence: {f!r}")

    walk(phi, {})


def eval_sentence(cat: FiniteCategoryPresentation, phi: CatSentence,
                  env: Optional[dict[str, str]] = None) -> bool:
    env = env or {}

    def term(t: CTerm) -> str:
        if isinstance(t, CVar):
            return env[t.name]
        if isinstance(t, CConst):
            return t.morph
        return cat.compose(term(t.outer), term(t.inner))

    if isinstance(phi, CEq):
        return term(phi.left) == term(phi.right)
    if isinstance(phi, CNot):
        return not eval_sentence(cat, phi.body, env)
    if isinstance(phi, CAnd):
        return eval_sentence(cat, phi.left, env) and eval_sentence(cat, phi.right, env)
    if isinstance(phi, COr):
        return eval_sentence(cat, phi.left, env) or eval_sentence(cat, phi.right, env)
    if isinstance(phi, CImp):
        return (not eval_sentence(cat, phi.left, env)
                or eval_sentence(cat, phi.right, env))
    if isinstance(phi, CForall):
        return all(eval_sentence(cat, phi.body, {**env, phi.var: m})
                   for m in cat.mors(phi.src, phi.tgt))
    if isinstance(phi, CExists):
        return any(eval_sentence(cat, phi.body, {**env, phi.var: m})
                   for m in cat.mors(phi.src, phi.tgt))
    raise TypeError(f"not a sentence: {phi!r}")


# ---------------------------------------------------------------------------
# the theory


def _const(cat: FiniteCategoryPresentation, m: str) -> CConst:
    return CConst(m, cat.src(m), cat.tgt(m))


def t0_axioms(cat: FiniteCategoryPresentation) -> list[CatSentence]:
    """All associativity instances (one per object quadruple), both identity
    laws per ordered object pair, and the ground composition equations."""
    out: list[CatSentence] = []
    for w, x, y, z in itertools.product(cat.objects, repeat=4):
        h = CVar("h", y, z)
        g = CVar("g", x, y)
        f = CVar("f", w, x)
        eq = CEq(CComp(h, CComp(g, f)), CComp(CComp(h, g), f))
        out.append(CForall("h", y, z, CForall("g", x, y, CForall("f", w, x, eq))))
    for x, y in itertools.product(cat.objects, repeat=2):
        f = CVar("f", x, y)
        left = CForall("f", x, y, CEq(CComp(_const(cat, cat.identities[y]), f), f))
        right = CForall("f", x, y, CEq(CComp(f, _const(cat, cat.identities[x])), f))
        out.append(left)
        out.append(right)
    for (outer, inner), result in sorted(cat.composition.items()):
        out.append(CEq(CComp(_const(cat, outer), _const(cat, inner)),
                       _const(cat, result)))
    return out


# ---------------------------------------------------------------------------
# axiom scheme recognizers


def _taut_atoms(phi: CatSentence, atoms: list[CatSentence]) -> None:
    if isinstance(phi, CNot):
        _taut_atoms(phi.body, atoms)
    elif isinstance(phi, (CAnd, COr, CImp)):
        _taut_atoms(phi.left, atoms)
        _taut_atoms(phi.right, atoms)
    elif phi not in atoms:
        atoms.append(phi)


def is_tautology(phi: CatSentence) -> bool:
    """Truth-table check of the propositional skeleton (quantified formulas
    and equalities are atoms).  Raises ValueError past the atom cap."""
    atoms: list[CatSentence] = []
    _taut_atoms(phi, atoms)
    if len(atoms) > TAUT_ATOM_CAP:
        raise ValueError(
            f"tautology skeleton has {len(atoms)} distinct atoms; "
            f"the truth-table recognizer caps at {TAUT_ATOM_CAP}")
    index = {a: i for i, a in enumerate(atoms)}

    def ev(f: CatSentence, row: tuple[bool, ...]) -> bool:
        if isinstance(f, CNot):
            return not ev(f.body, row)
        if isinstance(f, CAnd):
            return ev(f.left, row) and ev(f.right, row)
        if isinstance(f, COr):
            return ev(f.left, row) or ev(f.right, row)
        if isinstance(f, CImp):
            return not ev(f.left, row) or ev(f.right, row)
        return row[index[f]]

    return all(ev(phi, row) for row in itertools.product((False, True),
                                                         repeat=len(atoms)))


class _Mismatch(Exception):
    pass


def _match_instance(body, inst, var: str, sort: tuple[str, str]):
    """Check inst == body[t/var] for a single term t; returns t (or None when
    var has no free occurrence, in which case inst must equal body).

    Literal matching: binders are never renamed.  Capture is rejected: an
    occurrence of var under binders b requires the candidate term to avoid
    every name in b.
    """
    found: list = []

    def terms(b, i, bound: set[str]) -> None:
        if isinstance(b, CVar) and b.name == var and var not in bound:
            if (b.src, b.tgt) != sort:
                raise _Mismatch
            if not _is_term(i) or term_sort_safe(i) != sort:
                raise _Mismatch
            if term_free_vars(i) & bound:
                raise _Mismatch  # substituting here would capture
            found.append(i)
            return
        if type(b) is not type(i):
            raise _Mismatch
        if isinstance(b, CVar):
            if b != i:
                raise _Mismatch
        elif isinstance(b, CConst):
            if b != i:
                raise _Mismatch
        elif isinstance(b, CComp):
            terms(b.outer, i.outer, bound)
            terms(b.inner, i.inner, bound)
        else:
            raise _Mismatch

    def walk(b, i, bound: set[str]) -> None:
        if type(b) is not type(i):
            raise _Mismatch
        if isinstance(b, CEq):
            terms(b.left, i.left, bound)
            terms(b.right, i.right, bound)
        elif isinstance(b, CNot):
            walk(b.body, i.body, bound)
        elif isinstance(b, (CAnd, COr, CImp)):
            walk(b.left, i.left, bound)
            walk(b.right, i.right, bound)
        elif isinstance(b, (CForall, CExists)):
            if (b.var, b.src, b.tgt) != (i.var, i.src, i.tgt):
                raise _Mismatch
            walk(b.body, i.body, bound | {b.var})
        else:
            raise _Mismatch

    try:
        walk(body, inst, set())
    except _Mismatch:
        return False, None
    if not found:
        return True, None
    t0 = found[0]
    if any(t != t0 for t in found[1:]):
        return False, None
    return True, t0


def _is_term(t) -> bool:
    return isinstance(t, (CVar, CConst, CComp))


def term_sort_safe(t: CTerm) -> Optional[tuple[str, str]]:
    try:
        return term_sort(t)
    except ValueError:
        return None


def _eq_sorts_ok(t, s) -> bool:
    st, ss = term_sort_safe(t), term_sort_safe(s)
    return st is not None and st == ss


def matching_schemes(theory: Iterable[CatSentence], phi: CatSentence) -> list[str]:
    """All axiom schemes the sentence instantiates, in recognition order.
    May raise ValueError from the tautology atom cap."""
    out: list[str] = []
    theory_set = theory if isinstance(theory, (set, frozenset)) else set(theory)
    if phi in theory_set:
        out.append("T")
    if isinstance(phi, CEq) and phi.left == phi.right:
        out.append("eq-refl")
    if (isinstance(phi, CImp) and isinstance(phi.left, CEq)
            and isinstance(phi.right, CEq)
            and phi.left.left == phi.right.right
            and phi.left.right == phi.right.left
            and _eq_sorts_ok(phi.left.left, phi.left.right)):
        out.append("eq-sym")
    if (isinstance(phi, CImp) and isinstance(phi.left, CAnd)
            and isinstance(phi.left.left, CEq) and isinstance(phi.left.right, CEq)
            and isinstance(phi.right, CEq)
            and phi.left.left.right == phi.left.right.left
            and phi.right == CEq(phi.left.left.left, phi.left.right.right)
            and _eq_sorts_ok(phi.left.left.left, phi.left.left.right)
            and _eq_sorts_ok(phi.left.right.left, phi.left.right.right)):
        out.append("eq-trans")
    if (isinstance(phi, CImp) and isinstance(phi.left, CAnd)
            and isinstance(phi.left.left, CEq) and isinstance(phi.left.right, CEq)
            and isinstance(phi.right, CEq)
            and isinstance(phi.right.left, CComp) and isinstance(phi.right.right, CComp)
            and phi.right.left.outer == phi.left.left.left
            and phi.right.right.outer == phi.left.left.right
            and phi.right.left.inner == phi.left.right.left
            and phi.right.right.inner == phi.left.right.right
            and term_sort_safe(phi.right.left) is not None
            and term_sort_safe(phi.right.right) is not None):
        out.append("eq-cong")
    if isinstance(phi, CImp) and isinstance(phi.left, CForall):
        q = phi.left
        ok, _ = _match_instance(q.body, phi.right, q.var, (q.src, q.tgt))
        if ok:
            out.append("forall-inst")
    if isinstance(phi, CImp) and isinstance(phi.right, CExists):
        q = phi.right
        ok, _ = _match_instance(q.body, phi.left, q.var, (q.src, q.tgt))
        if ok:
            out.append("exists-intro")
    if is_tautology(phi):
        out.append("taut")
    return out


def is_axiom(theory: Iterable[CatSentence], phi: CatSentence) -> Optional[str]:
    """The first axiom scheme the sentence instantiates, or None."""
    schemes = matching_schemes(theory, phi)
    return schemes[0] if schemes else None


# ---------------------------------------------------------------------------
# proofs


@dataclass(frozen=True)
class JAxiom:
    scheme: str


@dataclass(frozen=True)
class JModusPonens:
    minor: int  # 1-based line of alpha
    major: int  # 1-based line of alpha -> beta


@dataclass(frozen=True)
class JGenForall:
    premise: int


@dataclass(frozen=True)
class JGenExists:
    premise: int


Justification = Union[JAxiom, JModusPonens, JGenForall, JGenExists]


@dataclass(frozen=True)
class ProofLine:
    sentence: CatSentence
    rule: Justification


ProofSequence = list[ProofLine]

SCHEME_IDS = ("T", "taut", "eq-refl", "eq-sym", "eq-trans", "eq-cong",
              "forall-inst", "exists-intro")


@dataclass(frozen=True)
class CheckResult:
    valid: bool
    index: Optional[int] = None  # 1-based first failing line
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.valid


def check_proof(theory: Iterable[CatSentence], proof: ProofSequence) -> CheckResult:
    theory_set = set(theory)
    for n, line in enumerate(proof, start=1):
        rule = line.rule
        if isinstance(rule, JAxiom):
            if rule.scheme not in SCHEME_IDS:
                return CheckResult(False, n, f"unknown axiom scheme {rule.scheme!r}")
            try:
                schemes = matching_schemes(theory_set, line.sentence)
            except ValueError as e:
                return CheckResult(False, n, str(e))
            if rule.scheme not in schemes:
                return CheckResult(
                    False, n, f"not an instance of scheme {rule.scheme!r}")
        elif isinstance(rule, JModusPonens):
            if not (1 <= rule.minor < n and 1 <= rule.major < n):
                return CheckResult(False, n, "cited index out of range")
            major = proof[rule.major - 1].sentence
            minor = proof[rule.minor - 1].sentence
            if not (isinstance(major, CImp) and major.left == minor
                    and major.right == line.sentence):
                return CheckResult(
                    False, n,
                    "major premise is not an implication with minor as antecedent")
        elif isinstance(rule, JGenForall):
            if not 1 <= rule.premise < n:
                return CheckResult(False, n, "cited index out of range")
            prem = proof[rule.premise - 1].sentence
            cur = line.sentence
            if not (isinstance(prem, CImp) and isinstance(cur, CImp)
                    and isinstance(cur.right, CForall)
                    and cur.left == prem.left
                    and cur.right.body == prem.right):
                return CheckResult(
                    False, n, "conclusion is not a forall generalization "
                              "of the premise")
            if cur.right.var in sentence_free_vars(prem.left):
                return CheckResult(
                    False, n, "generalized variable occurs free in the antecedent")
        elif isinstance(rule, JGenExists):
            if not 1 <= rule.premise < n:
                return CheckResult(False, n, "cited index out of range")
            prem = proof[rule.premise - 1].sentence
            cur = line.sentence
            if not (isinstance(prem, CImp) and isinstance(cur, CImp)
                    and isinstance(cur.left, CExists)
                    and cur.right == prem.right
                    and cur.left.body == prem.left):
                return CheckResult(
                    False, n, "conclusion is not an exists generalization "
                              "of the premise")
            if cur.left.var in sentence_free_vars(prem.right):
                return CheckResult(
                    False, n, "generalized variable occurs free in the consequent")
        else:
            return CheckResult(False, n, f"unknown justification {rule!r}")
    return CheckResult(True)


# ---------------------------------------------------------------------------
# the equivalence goal and its template proof


def equivalence_goal(cat: FiniteCategoryPresentation, x: str, y: str) -> CatSentence:
    """Exists al: Mor(x,y), be: Mor(y,x) with c(al,be) = [i(y)] and
    c(be,al) = [i(x)]."""
    if x not in cat.objects or y not in cat.objects:
        raise ValueError(f"unknown object: {x if x not in cat.objects else y}")
    al = CVar("al", x, y)
    be = CVar("be", y, x)
    body = CAnd(CEq(CComp(al, be), _const(cat, cat.identities[y])),
                CEq(CComp(be, al), _const(cat, cat.identities[x])))
    return CExists("al", x, y, CExists("be", y, x, body))


def synthesize_equivalence_proof(cat: FiniteCategoryPresentation, x: str,
                                 y: str) -> Optional[ProofSequence]:
    """A fixed 9-line proof of the equivalence goal when the table contains
    a two-sided inverse pair f: x->y, g: y->x; None when it does not."""
    if x not in cat.objects or y not in cat.objects:
        raise ValueError(f"unknown object: {x if x not in cat.objects else y}")
    ix, iy = cat.identities[x], cat.identities[y]
    pair = None
    for f in cat.mors(x, y):
        for g in cat.mors(y, x):
            if cat.compose(f, g) == iy and cat.compose(g, f) == ix:
                pair = (f, g)
                break
        if pair:
            break
    if pair is None:
        return None
    f, g = pair
    phi1 = CEq(CComp(_const(cat, f), _const(cat, g)), _const(cat, iy))
    phi2 = CEq(CComp(_const(cat, g), _const(cat, f)), _const(cat, ix))
    conj = CAnd(phi1, phi2)
    goal = equivalence_goal(cat, x, y)
    step_be = CExists("be", y, x,
                      CAnd(CEq(CComp(_const(cat, f), CVar("be", y, x)),
                               _const(cat, iy)),
                           CEq(CComp(CVar("be", y, x), _const(cat, f)),
                               _const(cat, ix))))
    return [
        ProofLine(phi1, JAxiom("T")),
        ProofLine(phi2, JAxiom("T")),
        ProofLine(CImp(phi1, CImp(phi2, conj)), JAxiom("taut")),
        ProofLine(CImp(phi2, conj), JModusPonens(minor=1, major=3)),
        ProofLine(conj, JModusPonens(minor=2, major=4)),
        ProofLine(CImp(conj, step_be), JAxiom("exists-intro")),
        ProofLine(step_be, JModusPonens(minor=5, major=6)),
        ProofLine(CImp(step_be, goal), JAxiom("exists-intro")),
        ProofLine(goal, JModusPonens(minor=7, major=8)),
    ]


# ---------------------------------------------------------------------------
# notation: parenthesized prefix text for sentences, JSON for files
#
#   term     := VAR | "[" id "]" | "(c" term term ")"
#   sentence := "(=" term term ")" | "(not" s ")" | "(and" s s ")"
#             | "(or" s s ")" | "(->" s s ")"
#             | "(forall" VAR "(Mor" obj obj ")" s ")"
#             | "(exists" VAR "(Mor" obj obj ")" s ")"


_TOKEN_RE = re.compile(r"\(|\)|\[[^\[\]\s()]+\]|[^\s()]+")


def format_sentence(phi: CatSentence) -> str:
    def term(t: CTerm) -> str:
        if isinstance(t, CVar):
            return t.name
        if isinstance(t, CConst):
            return f"[{t.morph}]"
        return f"(c {term(t.outer)} {term(t.inner)})"

    if isinstance(phi, CEq):
        return f"(= {term(phi.left)} {term(phi.right)})"
    if isinstance(phi, CNot):
        return f"(not {format_sentence(phi.body)})"
    if isinstance(phi, CAnd):
        return f"(and {format_sentence(phi.left)} {format_sentence(phi.right)})"
    if isinstance(phi, COr):
        return f"(or {format_sentence(phi.left)} {format_sentence(phi.right)})"
    if isinstance(phi, CImp):
        return f"(-> {format_sentence(phi.left)} {format_sentence(phi.right)})"
    if isinstance(phi, CForall):
        return (f"(forall {phi.var} (Mor {phi.src} {phi.tgt}) "
                f"{format_sentence(phi.body)})")
    if isinstance(phi, CExists):
        return (f"(exists {phi.var} (Mor {phi.src} {phi.tgt}) "
                f"{format_sentence(phi.body)})")
    raise TypeError(f"not a sentence: {phi!r}")


def parse_sentence(cat: FiniteCategoryPresentation, text: str) -> CatSentence:
    tokens = _TOKEN_RE.findall(text)
    if "".join(tokens).replace("(", "").replace(")", "") != \
            "".join(text.split()).replace("(", "").replace(")", ""):
        raise ValueError("unrecognized characters in sentence")
    pos = 0

    def peek() -> Optional[str]:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: Optional[str] = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of sentence")
        tok = tokens[pos]
        pos += 1
        if expected is not None and tok != expected:
            raise ValueError(f"expected {expected!r}, got {tok!r}")
        return tok

    known = {m: (s, t) for m, s, t in cat.morphisms}

    def term(env: dict[str, tuple[str, str]]) -> CTerm:
        tok = take()
        if tok == "(":
            take("c")
            outer = term(env)
            inner = term(env)
            take(")")
            return CComp(outer, inner)
        if tok.startswith("["):
            m = tok[1:-1]
            if m not in known:
                raise ValueError(f"unknown morphism constant [{m}]")
            return CConst(m, *known[m])
        if tok == ")":
            raise ValueError("unexpected ')' in term")
        if tok not in env:
            raise ValueError(f"unbound variable {tok}")
        return CVar(tok, *env[tok])

    def sort_ann() -> tuple[str, str]:
        take("(")
        take("Mor")
        s = take()
        t = take()
        take(")")
        if s not in cat.objects or t not in cat.objects:
            raise ValueError(f"unknown sort Mor({s},{t})")
        return s, t

    def sentence(env: dict[str, tuple[str, str]]) -> CatSentence:
        take("(")
        head = take()
        if head == "=":
            left = term(env)
            right = term(env)
            take(")")
            out: CatSentence = CEq(left, right)
        elif head == "not":
            out = CNot(sentence(env))
            take(")")
        elif head in ("and", "or", "->"):
            l = sentence(env)
            r = sentence(env)
            take(")")
            out = {"and": CAnd, "or": COr, "->": CImp}[head](l, r)
        elif head in ("forall", "exists"):
            var = take()
            if var in ("(", ")") or var.startswith("["):
                raise ValueError(f"bad variable name {var!r}")
            s, t = sort_ann()
            body = sentence({**env, var: (s, t)})
            take(")")
            out = (CForall if head == "forall" else CExists)(var, s, t, body)
        else:
            raise ValueError(f"unknown form {head!r}")
        return out

    result = sentence({})
    if pos != len(tokens):
        raise ValueError(f"trailing tokens after sentence: {tokens[pos:]}")
    sort_check(cat, result)
    return result


# JSON files


def category_to_json(cat: FiniteCategoryPresentation) -> dict:
    return {
        "schema": "efd/1",
        "objects": list(cat.objects),
        "morphisms": [{"id": m, "src": s, "tgt": t} for m, s, t in cat.morphisms],
        "identities": dict(cat.identities),
        "composition": [
            {"outer": o, "inner": i, "result": r}
            for (o, i), r in sorted(cat.composition.items())],
    }


def category_from_json(data: dict) -> FiniteCategoryPresentation:
    cat = FiniteCategoryPresentation(
        objects=tuple(data["objects"]),
        morphisms=tuple((m["id"], m["src"], m["tgt"]) for m in data["morphisms"]),
        identities=dict(data["identities"]),
        composition={(c["outer"], c["inner"]): c["result"]
                     for c in data["composition"]})
    report = validate_category(cat)
    if not report.ok:
        raise ValueError("invalid category: " + "; ".join(report.defects))
    return cat


_RULE_NAMES = {"axiom": JAxiom, "mp": JModusPonens,
               "gen-forall": JGenForall, "gen-exists": JGenExists}


def proof_to_json(proof: ProofSequence) -> dict:
    lines = []
    for line in proof:
        entry: dict = {"sentence": format_sentence(line.sentence)}
        rule = line.rule
        if isinstance(rule, JAxiom):
            entry["rule"] = "axiom"
            entry["scheme"] = rule.scheme
        elif isinstance(rule, JModusPonens):
            entry["rule"] = "mp"
            entry["from"] = [rule.minor, rule.major]
        elif isinstance(rule, JGenForall):
            entry["rule"] = "gen-forall"
            entry["from"] = [rule.premise]
        else:
            entry["rule"] = "gen-exists"
            entry["from"] = [rule.premise]
        lines.append(entry)
    return {"schema": "efd/1", "lines": lines}


def proof_from_json(cat: FiniteCategoryPresentation, data: dict) -> ProofSequence:
    proof: ProofSequence = []
    for i, entry in enumerate(data["lines"], start=1):
        sentence = parse_sentence(cat, entry["sentence"])
        name = entry.get("rule")
        if name == "axiom":
            rule: Justification = JAxiom(entry["scheme"])
        elif name == "mp":
            minor, major = entry["from"]
            rule = JModusPonens(minor=int(minor), major=int(major))
        elif name == "gen-forall":
            rule = JGenForall(int(entry["from"][0]))
        elif name == "gen-exists":
            rule = JGenExists(int(entry["from"][0]))
        else:
            raise ValueError(f"line {i}: unknown rule {name!r}")
        proof.append(ProofLine(sentence, rule))
    return proof
