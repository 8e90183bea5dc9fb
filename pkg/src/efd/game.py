"""The clocked comparison game between two finite structures.

Player I (the spoiler) opens each round by moving the clock strictly down
its order and naming an element of either structure; Player II (the
duplicator) answers with an element of the other structure, extending the
pledged position.  II wins a play when every completed round keeps the
quantifier-free discrepancy r0 of the position below epsilon; on
well-ordered clocks the game ends at the order's minimum, on omega* it
never ends and II wins by surviving forever.

Solving goes through the distance hierarchy instead of the game tree: on
a clock of finite order type t the winner is II iff r_t(empty) < epsilon,
and on clocks admitting unbounded descent iff the stabilized distance is
below epsilon.  Certificates quotient the winning strategy by effective
rank: clock values that allow k further rounds act like the finite rank
min(k, alpha_star), and all values above the stabilization rank act alike.

States are values: apply_move returns a new state and never mutates.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import clocks as C
from .backforth import EMPTY, BnfEngine, CanonPos, position_key, parse_position_key
from .lang import DEFAULT_OMEGA, WeakModulus, language_to_json, language_from_json
from .rat import fmt_rat, parse_rat
from .structures import FiniteStructure, structure_from_json, structure_to_json

Pledge = tuple[str, str, str]


class IllegalMove(ValueError):
    """Raised by apply_move; the message doubles as the rejection reason."""


@dataclass
class GameConfig:
    a: FiniteStructure
    b: FiniteStructure
    clock: C.ClockOrder
    epsilon: Fraction
    omega: WeakModulus = DEFAULT_OMEGA
    depth: int = 3
    _engine: Optional[BnfEngine] = field(default=None, repr=False, compare=False)

    def validate(self) -> None:
        if self.a.language != self.b.language:
            raise ValueError("structures must share a language")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def engine(self) -> BnfEngine:
        if self._engine is None:
            self._engine = BnfEngine(self.a, self.b, self.omega, self.depth)
        return self._engine

    def side(self, name: str) -> FiniteStructure:
        if name == "A":
            return self.a
        if name == "B":
            return self.b
        raise IllegalMove("side must be A or B")


Round = tuple[str, str, str, str, str]  # clock value, side, sort, spoiler, duplicator


@dataclass(frozen=True)
class GameState:
    config: GameConfig = field(compare=False, repr=False)
    clock_value: C.ClockValue = C.TOP
    pending: Optional[tuple[str, str, str]] = None  # side, sort, element
    history: tuple[Round, ...] = ()
    position: CanonPos = EMPTY
    status: str = "in_progress"  # or "finished"
    winner: Optional[str] = None
    survival: Optional[bool] = None  # omega* clocks only

    @property
    def finished(self) -> bool:
        return self.status == "finished"


def _pledge(side: str, sort: str, spoiler: str, duplicator: str) -> Pledge:
    return (sort, spoiler, duplicator) if side == "A" else (sort, duplicator, spoiler)


def _survival(config: GameConfig, position: CanonPos) -> Optional[bool]:
    if isinstance(config.clock, C.OmegaStarClock):
        return config.engine().r_stab(position)[0] < config.epsilon
    return None


def new_game(config: GameConfig) -> GameState:
    config.validate()
    state = GameState(config=config)
    if config.engine().r0(EMPTY) >= config.epsilon:
        return GameState(config=config, status="finished", winner="I")
    if not C.has_values(config.clock):
        # the order is empty: no round can be played, the 0-round check decides
        return GameState(config=config, status="finished", winner="II",
                         survival=_survival(config, EMPTY))
    return GameState(config=config, survival=_survival(config, EMPTY))


def legal_moves(state: GameState) -> dict:
    if state.finished:
        return {"status": "finished", "toMove": None, "winner": state.winner}
    cfg = state.config
    if state.pending is not None:
        side, sort, _ = state.pending
        reply_side = "B" if side == "A" else "A"
        return {
            "status": "in_progress",
            "toMove": "II",
            "side": reply_side,
            "sort": sort,
            "elements": list(cfg.side(reply_side).elems(sort)),
        }
    t = C.order_type_finite(cfg.clock)
    if t is not None:
        values = [C.format_clock_value(v) for v in C.list_values(cfg.clock)
                  if C.legal_decrement(cfg.clock, state.clock_value, v)]
        clock = {"kind": "wellorder", "order": C.format_clock_spec(cfg.clock),
                 "current": C.format_clock_value(state.clock_value),
                 "values": values}
    elif isinstance(cfg.clock, C.OmegaStarClock):
        k = state.clock_value.k if isinstance(state.clock_value, C.StarVal) else None
        clock = {"kind": "star", "order": "w*",
                 "current": C.format_clock_value(state.clock_value),
                 "minIndex": 0 if k is None else k + 1, "values": None}
    else:
        clock = {"kind": "wellorder", "order": C.format_clock_spec(cfg.clock),
                 "current": C.format_clock_value(state.clock_value),
                 "values": None}  # infinitely many; any CNF strictly below
    return {
        "status": "in_progress",
        "toMove": "I",
        "clock": clock,
        "elements": {
            "A": {s: list(cfg.a.elems(s)) for s in cfg.a.language.sort_names()},
            "B": {s: list(cfg.b.elems(s)) for s in cfg.b.language.sort_names()},
        },
    }


def apply_move(state: GameState, move: dict) -> GameState:
    if state.finished:
        raise IllegalMove("game is finished")
    cfg = state.config
    kind = move.get("kind")
    if state.pending is not None:
        if kind != "reply":
            raise IllegalMove("a challenge is pending; play a reply")
        side, sort, spoiler = state.pending
        reply_side = "B" if side == "A" else "A"
        element = move.get("element")
        if element not in cfg.side(reply_side).elems(sort):
            raise IllegalMove(f"unknown element {element!r} in {reply_side}:{sort}")
        pledge = _pledge(side, sort, spoiler, element)
        position = state.position | {pledge}
        history = state.history + (
            (C.format_clock_value(state.clock_value), side, sort, spoiler, element),)
        r0_now = cfg.engine().r0(position)
        if r0_now >= cfg.epsilon:
            return GameState(config=cfg, clock_value=state.clock_value, pending=None,
                             history=history, position=position,
                             status="finished", winner="I",
                             survival=state.survival)
        if C.is_well_order(cfg.clock) and C.is_minimum(cfg.clock, state.clock_value):
            return GameState(config=cfg, clock_value=state.clock_value, pending=None,
                             history=history, position=position,
                             status="finished", winner="II",
                             survival=state.survival)
        return GameState(config=cfg, clock_value=state.clock_value, pending=None,
                         history=history, position=position,
                         survival=_survival(cfg, position))
    if kind != "challenge":
        raise IllegalMove("player I must open the round with a challenge")
    clock_text = move.get("clock")
    if not isinstance(clock_text, str):
        raise IllegalMove("challenge needs a clock value")
    try:
        value = C.parse_clock_value(cfg.clock, clock_text)
    except ValueError as e:
        raise IllegalMove(f"bad clock value {clock_text!r}: {e}") from None
    if isinstance(value, C.Top):
        raise IllegalMove("clock must strictly decrease")
    if not C.legal_decrement(cfg.clock, state.clock_value, value):
        raise IllegalMove("clock must strictly decrease")
    side = move.get("side")
    if side not in ("A", "B"):
        raise IllegalMove("side must be A or B")
    sort = move.get("sort")
    struct = cfg.side(side)
    if sort not in struct.language.sort_names():
        raise IllegalMove(f"unknown sort {sort!r}")
    element = move.get("element")
    if element not in struct.elems(sort):
        raise IllegalMove(f"unknown element {element!r} in {side}:{sort}")
    return GameState(config=cfg, clock_value=value, pending=(side, sort, element),
                     history=state.history, position=state.position,
                     survival=state.survival)


# ---------------------------------------------------------------------------
# rank classes: how clock values collapse onto the finite hierarchy


class _Ranks:
    """Quotient of a clock's values by remaining game power.

    Finite-type orders keep their literal values as ranks.  Orders with
    unbounded descent collapse everything at or above the stabilization
    rank into the top class, which then allows staying at the same class
    for another round (the fixpoint makes that sound).
    """

    def __init__(self, config: GameConfig) -> None:
        self.order = config.clock
        t = C.order_type_finite(self.order)
        if t is not None:
            self.alpha_star: Optional[int] = None
            self.cap = t - 1  # empty orders never reach here
            self.top_loop = False
        else:
            self.alpha_star = config.engine().alpha_star()
            self.cap = self.alpha_star
            self.top_loop = True

    def initial(self) -> list[int]:
        if isinstance(self.order, C.OmegaStarClock):
            return [self.cap]
        return list(range(self.cap + 1))

    def drops(self, m: int) -> list[int]:
        if isinstance(self.order, C.OmegaStarClock):
            return [self.cap]
        if self.top_loop and m == self.cap:
            return list(range(self.cap + 1))
        return list(range(m))

    def of_value(self, value: C.ClockValue) -> int:
        if isinstance(value, C.OrdVal):
            k = C.cnf_finite_part(value.cnf)
            if k is not None:
                return k if self.alpha_star is None else min(k, self.alpha_star)
        # infinite ordinal or star value
        return self.cap

    def concrete(self, rank: int, current: C.ClockValue) -> C.ClockValue:
        """A legal clock value of the given rank class, below current."""
        if isinstance(self.order, C.OmegaStarClock):
            k = current.k + 1 if isinstance(current, C.StarVal) else 0
            return C.StarVal(k)
        return C.OrdVal(C.cnf_of_int(rank))


# ---------------------------------------------------------------------------
# solving


@dataclass
class SolveResult:
    winner: str
    stabilization_rank: int
    deciding_value: Fraction
    config: GameConfig = field(repr=False)
    _certificate: Optional["StrategyCertificate"] = field(default=None, repr=False)

    @property
    def certificate(self) -> "StrategyCertificate":
        if self._certificate is None:
            self._certificate = extract_strategy(self.config, self.winner)
        return self._certificate

    def to_json(self) -> dict:
        return {
            "winner": self.winner,
            "stabilizationRank": self.stabilization_rank,
            "decidingValue": fmt_rat(self.deciding_value),
            "epsilon": fmt_rat(self.config.epsilon),
            "clock": C.format_clock_spec(self.config.clock),
        }


def solve(config: GameConfig) -> SolveResult:
    """Winner by the correspondence: II iff the distance the clock can see
    at the empty position stays below epsilon.

    stabilization_rank is the first rank at which the deciding value has
    settled: for finite-type clocks the least j with r_j(empty) equal to
    the deciding value, for unbounded clocks the global fixpoint rank.
    """
    config.validate()
    engine = config.engine()
    t = C.order_type_finite(config.clock)
    if t is not None:
        value = engine.r_alpha(EMPTY, t)
        rank = t
        while rank > 0 and engine.r_alpha(EMPTY, rank - 1) == value:
            rank -= 1
    else:
        value, rank = engine.r_stab()
    winner = "II" if value < config.epsilon else "I"
    return SolveResult(winner=winner, stabilization_rank=rank,
                       deciding_value=value, config=config)


# ---------------------------------------------------------------------------
# strategy certificates


@dataclass
class StrategyCertificate:
    player: str
    epsilon: Fraction
    clock: str  # order spec string
    alpha_star: Optional[int]
    # II: (rank, position, side, element) -> reply element
    responses: dict[tuple[int, CanonPos, str, str], str] = field(default_factory=dict)
    # I: position -> (side, sort, element, target rank)
    challenges: dict[CanonPos, tuple[str, str, str, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict = {
            "schema": "efd/1",
            "player": self.player,
            "epsilon": fmt_rat(self.epsilon),
            "clock": self.clock,
            "alphaStar": self.alpha_star,
        }
        if self.player == "II":
            out["responses"] = [
                {"rank": m, "position": position_key(pos), "side": side,
                 "element": elem, "reply": reply}
                for (m, pos, side, elem), reply in sorted(
                    self.responses.items(),
                    key=lambda kv: (kv[0][0], position_key(kv[0][1]), kv[0][2], kv[0][3]))]
        else:
            out["challenges"] = [
                {"position": position_key(pos), "side": side, "sort": sort,
                 "element": elem, "rank": rank}
                for pos, (side, sort, elem, rank) in sorted(
                    self.challenges.items(), key=lambda kv: position_key(kv[0]))]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "StrategyCertificate":
        cert = cls(player=data["player"], epsilon=parse_rat(data["epsilon"]),
                   clock=data["clock"], alpha_star=data.get("alphaStar"))
        if cert.player == "II":
            for r in data.get("responses", []):
                key = (int(r["rank"]), parse_position_key(r["position"]),
                       r["side"], r["element"])
                cert.responses[key] = r["reply"]
        else:
            for r in data.get("challenges", []):
                cert.challenges[parse_position_key(r["position"])] = (
                    r["side"], r["sort"], r["element"], int(r["rank"]))
        return cert


def _spoiler_options(config: GameConfig):
    for side in ("A", "B"):
        struct = config.side(side)
        for sort in struct.language.sort_names():
            for elem in struct.elems(sort):
                yield side, sort, elem


def _replies(config: GameConfig, side: str, sort: str, spoiler: str) -> list[str]:
    """Reply candidates, mirror element first so copycat ties resolve to it."""
    src = config.side(side)
    reply_side = "B" if side == "A" else "A"
    tgt = config.side(reply_side)
    cands = list(tgt.elems(sort))
    idx = src.elems(sort).index(spoiler)
    if idx < len(cands):
        mirror = cands[idx]
        cands.remove(mirror)
        cands.insert(0, mirror)
    return cands


def extract_strategy(config: GameConfig, player: str) -> StrategyCertificate:
    config.validate()
    verdict = solve(config)
    if player != verdict.winner:
        raise ValueError(f"player {player} is not the winner ({verdict.winner})")
    engine = config.engine()
    eps = config.epsilon
    ranks = _Ranks(config)
    cert = StrategyCertificate(player=player, epsilon=eps,
                               clock=C.format_clock_spec(config.clock),
                               alpha_star=ranks.alpha_star)
    if player == "II":
        seen: dict[CanonPos, set[int]] = {}
        stack: list[tuple[CanonPos, tuple[int, ...]]] = [(EMPTY, tuple(ranks.initial()))]
        while stack:
            pos, arrival = stack.pop()
            done = seen.setdefault(pos, set())
            for m in arrival:
                if m in done:
                    continue
                done.add(m)
                for side, sort, elem in _spoiler_options(config):
                    best_d = None
                    best_v = None
                    for d in _replies(config, side, sort, elem):
                        v = engine.r_alpha(pos | {_pledge(side, sort, elem, d)}, m)
                        if best_v is None or v < best_v:
                            best_v, best_d = v, d
                            if v == 0:
                                break
                    cert.responses[(m, pos, side, elem)] = best_d
                    child = pos | {_pledge(side, sort, elem, best_d)}
                    nxt = tuple(ranks.drops(m))
                    if nxt:
                        stack.append((child, nxt))
        return cert

    # player I: least sufficient rank per position, maximizing challenge
    seen_i: set[CanonPos] = set()
    stack_i = [EMPTY]
    while stack_i:
        pos = stack_i.pop()
        if pos in seen_i:
            continue
        seen_i.add(pos)
        m_star = 0
        while engine.r_alpha(pos, m_star) < eps:
            m_star += 1
            if m_star > ranks.cap + 1:
                raise RuntimeError("no sufficient rank found; solver disagreement")
        if m_star == 0:
            continue  # position already lost for II, no challenge needed
        target = m_star - 1
        best = None
        best_v = None
        for side, sort, elem in _spoiler_options(config):
            worst = None
            for d in config.side("B" if side == "A" else "A").elems(sort):
                v = engine.r_alpha(pos | {_pledge(side, sort, elem, d)}, target)
                if worst is None or v < worst:
                    worst = v
            if best_v is None or worst > best_v:
                best_v, best = worst, (side, sort, elem, target)
        cert.challenges[pos] = best
        side, sort, elem, _ = best
        for d in config.side("B" if side == "A" else "A").elems(sort):
            child = pos | {_pledge(side, sort, elem, d)}
            if engine.r0(child) < eps:
                stack_i.append(child)
    return cert


@dataclass
class VerifyReport:
    ok: bool
    violations: list[str]

    def __bool__(self) -> bool:
        return self.ok


def verify_strategy(config: GameConfig, cert: StrategyCertificate,
                    unroll_depth: int = 64) -> VerifyReport:
    """Literal clause check of a certificate, unrolled round by round.

    Only the quantifier-free ground truth r0 is consulted: for II every
    prescribed reply must land on a position with r0 < epsilon at every
    unrolled round, for I every play following the prescribed challenges
    must reach r0 >= epsilon with strictly decreasing target ranks.
    """
    config.validate()
    engine = config.engine()
    eps = config.epsilon
    ranks = _Ranks(config)
    violations: list[str] = []
    limit = 25

    if cert.player == "II":
        if engine.r0(EMPTY) >= eps:
            violations.append("initial position already lost: r0(empty) >= epsilon")
        queue: deque[tuple[CanonPos, int, int]] = deque(
            (EMPTY, m, 1) for m in ranks.initial())
        seen: set[tuple[CanonPos, int]] = set()
        while queue and len(violations) < limit:
            pos, m, depth = queue.popleft()
            if (pos, m) in seen or depth > unroll_depth:
                continue
            seen.add((pos, m))
            for side, sort, elem in _spoiler_options(config):
                key = (m, pos, side, elem)
                reply = cert.responses.get(key)
                if reply is None:
                    violations.append(
                        f"missing response at ({m}, {side}:{elem}) "
                        f"from position '{position_key(pos)}'")
                    continue
                reply_side = "B" if side == "A" else "A"
                if reply not in config.side(reply_side).elems(sort):
                    violations.append(
                        f"response {reply!r} outside universe {reply_side}:{sort}")
                    continue
                child = pos | {_pledge(side, sort, elem, reply)}
                value = engine.r0(child)
                if value >= eps:
                    violations.append(
                        f"losing reply at ({m}, {side}:{elem}): "
                        f"r0 = {fmt_rat(value)} >= epsilon")
                    continue
                for m2 in ranks.drops(m):
                    if (child, m2) not in seen:
                        queue.append((child, m2, depth + 1))
        return VerifyReport(ok=not violations, violations=violations)

    # player I
    root = cert.challenges.get(EMPTY)
    if root is None:
        if engine.r0(EMPTY) >= eps:
            return VerifyReport(ok=True, violations=[])
        return VerifyReport(ok=False, violations=["missing challenge at position ''"])
    t = C.order_type_finite(config.clock)
    queue_i: deque[tuple[CanonPos, int, int]] = deque([(EMPTY, root[3] + 1, 1)])
    seen_i: set[tuple[CanonPos, int]] = set()
    while queue_i and len(violations) < limit:
        pos, rank_bound, depth = queue_i.popleft()
        if (pos, rank_bound) in seen_i or depth > unroll_depth:
            continue
        seen_i.add((pos, rank_bound))
        rec = cert.challenges.get(pos)
        if rec is None:
            violations.append(f"missing challenge at position '{position_key(pos)}'")
            continue
        side, sort, elem, rank = rec
        if rank >= rank_bound:
            violations.append(
                f"rank does not decrease at position '{position_key(pos)}'")
            continue
        if t is not None and rank > t - 1:
            violations.append(f"rank {rank} exceeds clock capacity {t - 1}")
            continue
        struct = config.side(side)
        if sort not in struct.language.sort_names() or elem not in struct.elems(sort):
            violations.append(f"challenge {side}:{sort}:{elem} outside universe")
            continue
        for d in config.side("B" if side == "A" else "A").elems(sort):
            child = pos | {_pledge(side, sort, elem, d)}
            if engine.r0(child) >= eps:
                continue  # loss exposed at this round, as claimed
            if rank == 0:
                violations.append(
                    f"challenge at rank 0 fails to force a loss: reply {d!r} "
                    f"keeps r0 = {fmt_rat(engine.r0(child))} below epsilon")
                continue
            queue_i.append((child, rank, depth + 1))
    return VerifyReport(ok=not violations, violations=violations)


# ---------------------------------------------------------------------------
# play support: engine moves and hints


def engine_move(state: GameState, cert: StrategyCertificate) -> dict:
    """The certificate's move in the current state.  Deterministic."""
    if state.finished:
        raise ValueError("game is finished")
    cfg = state.config
    ranks = _Ranks(cfg)
    if cert.player == "II":
        if state.pending is None:
            raise ValueError("not the certificate player's turn")
        side, sort, elem = state.pending
        m = ranks.of_value(state.clock_value)
        reply = cert.responses.get((m, state.position, side, elem))
        if reply is None:
            raise ValueError("position outside certificate")
        return {"kind": "reply", "element": reply}
    if state.pending is not None:
        raise ValueError("not the certificate player's turn")
    rec = cert.challenges.get(state.position)
    if rec is None:
        raise ValueError("position outside certificate")
    side, sort, elem, rank = rec
    value = ranks.concrete(rank, state.clock_value)
    if not C.legal_decrement(cfg.clock, state.clock_value, value):
        raise ValueError("position outside certificate")
    return {"kind": "challenge", "clock": C.format_clock_value(value),
            "side": side, "sort": sort, "element": elem}


def _reply_rank(config: GameConfig, value: C.ClockValue) -> int:
    """Rank governing the rest of the game once I moved the clock to value.
    Finite values answer directly; unbounded ones need the fixpoint rank."""
    if isinstance(value, C.OrdVal):
        k = C.cnf_finite_part(value.cnf)
        if k is not None:
            return k
    return config.engine().alpha_star()


def _challenge_cap(config: GameConfig, current: C.ClockValue) -> int:
    """Largest rank class I can still move the clock to."""
    order = config.clock
    if isinstance(order, C.OmegaStarClock):
        return config.engine().alpha_star()
    t = C.order_type_finite(order)
    if isinstance(current, C.Top):
        if t is not None:
            return t - 1
        return config.engine().alpha_star()
    k = C.cnf_finite_part(current.cnf)
    if k is not None:
        return k - 1
    return config.engine().alpha_star()


def hint(state: GameState) -> dict:
    """Exact r annotations for every candidate move of the side to move."""
    if state.finished:
        raise ValueError("game is finished")
    cfg = state.config
    engine = cfg.engine()
    eps = cfg.epsilon
    if state.pending is not None:
        side, sort, elem = state.pending
        m = _reply_rank(cfg, state.clock_value)
        reply_side = "B" if side == "A" else "A"
        options = []
        for d in cfg.side(reply_side).elems(sort):
            v = engine.r_alpha(state.position | {_pledge(side, sort, elem, d)}, m)
            options.append({"element": d, "value": fmt_rat(v), "winning": v < eps})
        return {"toMove": "II", "rank": m, "options": options}
    cap = _challenge_cap(cfg, state.clock_value)
    options = []
    for side, sort, elem in _spoiler_options(cfg):
        worst = None
        for d in cfg.side("B" if side == "A" else "A").elems(sort):
            v = engine.r_alpha(state.position | {_pledge(side, sort, elem, d)}, cap)
            if worst is None or v < worst:
                worst = v
        options.append({"side": side, "sort": sort, "element": elem,
                        "value": fmt_rat(worst), "winning": worst >= eps})
    return {"toMove": "I", "rank": cap, "options": options}


def greedy_move(state: GameState) -> dict:
    """Best-effort move from the hint table, for an engine without a
    winning certificate: II minimizes, I maximizes, ties break on option
    order.  I descends the clock as slowly as the rank classes allow."""
    h = hint(state)
    cfg = state.config
    if h["toMove"] == "II":
        best = min(h["options"], key=lambda o: (parse_rat(o["value"]),))
        return {"kind": "reply", "element": best["element"]}
    best = max(h["options"], key=lambda o: (parse_rat(o["value"]),))
    if isinstance(cfg.clock, C.OmegaStarClock):
        k = state.clock_value.k + 1 if isinstance(state.clock_value, C.StarVal) else 0
        clock = C.StarVal(k)
    else:
        clock = C.OrdVal(C.cnf_of_int(h["rank"]))
    return {"kind": "challenge", "clock": C.format_clock_value(clock),
            "side": best["side"], "sort": best["sort"], "element": best["element"]}


# ---------------------------------------------------------------------------
# serialization: states, configs, transcripts


def state_to_json(state: GameState) -> dict:
    cfg = state.config
    r0_now = cfg.engine().r0(state.position)
    return {
        "status": state.status,
        "winner": state.winner,
        "clock": C.format_clock_value(state.clock_value),
        "clockOrder": C.format_clock_spec(cfg.clock),
        "epsilon": fmt_rat(cfg.epsilon),
        "pending": None if state.pending is None else {
            "side": state.pending[0], "sort": state.pending[1],
            "element": state.pending[2]},
        "position": [list(p) for p in sorted(state.position)],
        "r0": fmt_rat(r0_now),
        "rounds": [{"clock": r[0], "side": r[1], "sort": r[2],
                    "spoiler": r[3], "duplicator": r[4]} for r in state.history],
        "survival": state.survival,
    }


def config_to_json(config: GameConfig) -> dict:
    from .lang import format_omega_spec
    return {
        "language": language_to_json(config.a.language),
        "A": structure_to_json(config.a),
        "B": structure_to_json(config.b),
        "clock": C.format_clock_spec(config.clock),
        "epsilon": fmt_rat(config.epsilon),
        "omega": format_omega_spec(config.omega),
        "closureDepth": config.depth,
    }


def config_from_json(data: dict) -> GameConfig:
    from .lang import parse_omega_spec
    language = language_from_json(data["language"])
    a = structure_from_json(data["A"], language=language)
    b = structure_from_json(data["B"], language=language)
    return GameConfig(
        a=a, b=b,
        clock=C.parse_clock_spec(data["clock"]),
        epsilon=parse_rat(data["epsilon"]),
        omega=parse_omega_spec(data.get("omega", "default")),
        depth=int(data.get("closureDepth", 3)),
    )


def transcript(config: GameConfig, moves: list[dict], final: GameState) -> dict:
    return {
        "schema": "efd/1",
        "config": config_to_json(config),
        "moves": moves,
        "verdict": {
            "status": final.status,
            "winner": final.winner,
            "finalR0": state_to_json(final)["r0"],
            "survival": final.survival,
        },
    }


def replay_transcript(data: dict) -> GameState:
    """Re-run an exported transcript; raises IllegalMove if any recorded
    move no longer applies (the export was tampered with or is stale)."""
    config = config_from_json(data["config"])
    state = new_game(config)
    for move in data["moves"]:
        state = apply_move(state, move)
    return state
