import copy
import json
from fractions import Fraction

import pytest

from efd import clocks as C
from efd.backforth import EMPTY
from efd.game import (GameConfig, IllegalMove, StrategyCertificate, apply_move,
                      engine_move, extract_strategy, greedy_move, hint,
                      legal_moves, new_game, replay_transcript, solve,
                      state_to_json, transcript, verify_strategy)

from helpers import chain_structure, two_point_pair

F = Fraction


def two_point_config(epsilon, clock="2"):
    a, b = two_point_pair()
    return GameConfig(a=a, b=b, clock=C.parse_clock_spec(clock), epsilon=epsilon)


def chain_config(epsilon=F(1, 2), clock="w*"):
    return GameConfig(a=chain_structure(2), b=chain_structure(3, "d"),
                      clock=C.parse_clock_spec(clock), epsilon=epsilon)


def copycat_config(epsilon=F(1, 2), clock="w*"):
    a, _ = two_point_pair()
    return GameConfig(a=a, b=a, clock=C.parse_clock_spec(clock), epsilon=epsilon)


# ---------------------------------------------------------------------------
# solving


def test_solve_two_point_tight_epsilon():
    result = solve(two_point_config(F(2, 5)))
    assert result.winner == "I"
    assert result.deciding_value == F(1, 2)
    assert result.stabilization_rank == 2


def test_solve_two_point_loose_epsilon():
    result = solve(two_point_config(F(3, 5)))
    assert result.winner == "II"
    assert result.to_json() == {
        "winner": "II",
        "stabilizationRank": 2,
        "decidingValue": "1/2",
        "epsilon": "3/5",
        "clock": "2",
    }


def test_solve_copycat_always_ii():
    for clock in ("1", "3", "w", "w*"):
        assert solve(copycat_config(clock=clock)).winner == "II"


def test_solve_chains_omega_star():
    result = solve(chain_config())
    assert result.winner == "I"
    assert result.deciding_value == F(1)
    assert result.stabilization_rank == 2


def test_solve_short_clock_hides_the_gap():
    """The 2-vs-3 chain gap needs two rounds; a one-round clock cannot
    expose it."""
    assert solve(chain_config(clock="1")).winner == "II"
    assert solve(chain_config(clock="2")).winner == "I"


def test_config_validation():
    a, b = two_point_pair()
    with pytest.raises(ValueError, match="epsilon must be positive"):
        solve(GameConfig(a=a, b=b, clock=C.parse_clock_spec("2"), epsilon=F(0)))
    c2 = chain_structure(2)
    with pytest.raises(ValueError, match="share a language"):
        solve(GameConfig(a=a, b=c2, clock=C.parse_clock_spec("2"), epsilon=F(1, 2)))


# ---------------------------------------------------------------------------
# game flow


def test_empty_clock_finishes_at_creation():
    state = new_game(two_point_config(F(2, 5), clock="0"))
    assert state.finished and state.winner == "II"


def test_round_flow_and_eager_loss():
    config = two_point_config(F(2, 5))
    state = new_game(config)
    assert not state.finished
    moves = legal_moves(state)
    assert moves["toMove"] == "I"
    assert moves["clock"]["values"] == ["0", "1"]

    state = apply_move(state, {"kind": "challenge", "clock": "1",
                               "side": "A", "sort": "M", "element": "a1"})
    assert state.pending == ("A", "M", "a1")
    assert legal_moves(state)["toMove"] == "II"
    state = apply_move(state, {"kind": "reply", "element": "b1"})
    assert not state.finished  # one pledge keeps every admissible gap at 0

    state = apply_move(state, {"kind": "challenge", "clock": "0",
                               "side": "A", "sort": "M", "element": "a2"})
    state = apply_move(state, {"kind": "reply", "element": "b2"})
    # the metric atom now shows |1 - 3/2| = 1/2 >= 2/5
    assert state.finished and state.winner == "I"


def test_survival_to_the_minimum():
    config = two_point_config(F(3, 5))
    state = new_game(config)
    state = apply_move(state, {"kind": "challenge", "clock": "0",
                               "side": "A", "sort": "M", "element": "a1"})
    state = apply_move(state, {"kind": "reply", "element": "b1"})
    assert state.finished and state.winner == "II"


def test_illegal_moves():
    config = two_point_config(F(2, 5))
    state = new_game(config)
    with pytest.raises(IllegalMove, match="open the round with a challenge"):
        apply_move(state, {"kind": "reply", "element": "b1"})
    with pytest.raises(IllegalMove, match="clock must strictly decrease"):
        apply_move(state, {"kind": "challenge", "clock": "2",
                           "side": "A", "sort": "M", "element": "a1"})
    with pytest.raises(IllegalMove, match="side must be A or B"):
        apply_move(state, {"kind": "challenge", "clock": "1",
                           "side": "X", "sort": "M", "element": "a1"})
    with pytest.raises(IllegalMove, match="unknown element"):
        apply_move(state, {"kind": "challenge", "clock": "1",
                           "side": "A", "sort": "M", "element": "zz"})
    state = apply_move(state, {"kind": "challenge", "clock": "1",
                               "side": "A", "sort": "M", "element": "a1"})
    with pytest.raises(IllegalMove, match="challenge is pending"):
        apply_move(state, {"kind": "challenge", "clock": "0",
                           "side": "A", "sort": "M", "element": "a1"})
    state = apply_move(state, {"kind": "reply", "element": "b1"})
    state = apply_move(state, {"kind": "challenge", "clock": "0",
                               "side": "B", "sort": "M", "element": "b2"})
    state = apply_move(state, {"kind": "reply", "element": "a2"})
    assert state.finished
    with pytest.raises(IllegalMove, match="game is finished"):
        apply_move(state, {"kind": "challenge", "clock": "0",
                           "side": "A", "sort": "M", "element": "a1"})


def test_omega_star_clock_descends_upward_in_index():
    state = new_game(chain_config(epsilon=F(2)))  # large epsilon: play on
    state = apply_move(state, {"kind": "challenge", "clock": "0*",
                               "side": "B", "sort": "C", "element": "d2"})
    state = apply_move(state, {"kind": "reply", "element": "c1"})
    with pytest.raises(IllegalMove, match="clock must strictly decrease"):
        apply_move(state, {"kind": "challenge", "clock": "0*",
                           "side": "B", "sort": "C", "element": "d1"})
    state = apply_move(state, {"kind": "challenge", "clock": "3*",
                               "side": "B", "sort": "C", "element": "d3"})
    state = apply_move(state, {"kind": "reply", "element": "c2"})
    assert not state.finished
    assert state.survival is not None


# ---------------------------------------------------------------------------
# strategies


def test_copycat_certificate_round_trip():
    config = copycat_config()
    result = solve(config)
    cert = result.certificate
    assert cert.player == "II"
    report = verify_strategy(config, cert)
    assert report.ok and report.violations == []


def test_copycat_certificate_with_deleted_response():
    config = copycat_config()
    cert = extract_strategy(config, "II")
    key = (0, EMPTY, "A", "a1")
    assert key in cert.responses
    del cert.responses[key]
    report = verify_strategy(config, cert)
    assert not report.ok
    assert "missing response at (0, A:a1) from position ''" in report.violations


def test_spoiler_certificate_on_chains():
    config = chain_config()
    cert = extract_strategy(config, "I")
    assert cert.challenges[EMPTY] == ("B", "C", "d2", 1)
    report = verify_strategy(config, cert)
    assert report.ok


def test_spoiler_certificate_missing_root():
    config = chain_config()
    cert = extract_strategy(config, "I")
    cert.challenges.pop(EMPTY)
    report = verify_strategy(config, cert)
    assert not report.ok
    assert report.violations[0] == "missing challenge at position ''"


def test_extract_for_the_loser_is_refused():
    config = chain_config()
    with pytest.raises(ValueError, match="not the winner"):
        extract_strategy(config, "II")


def test_certificate_json_round_trip():
    config = chain_config()
    cert = extract_strategy(config, "I")
    data = json.loads(json.dumps(cert.to_json()))
    back = StrategyCertificate.from_json(data)
    assert back.player == cert.player
    assert back.challenges == cert.challenges
    cc = extract_strategy(copycat_config(), "II")
    back2 = StrategyCertificate.from_json(json.loads(json.dumps(cc.to_json())))
    assert back2.responses == cc.responses


def test_engine_move_follows_certificate():
    config = copycat_config()
    cert = extract_strategy(config, "II")
    state = new_game(config)
    with pytest.raises(ValueError, match="not the certificate player's turn"):
        engine_move(state, cert)
    state = apply_move(state, {"kind": "challenge", "clock": "0*",
                               "side": "A", "sort": "M", "element": "a2"})
    move = engine_move(state, cert)
    assert move == {"kind": "reply", "element": "a2"}


def test_engine_move_opening_challenge():
    config = chain_config()
    cert = extract_strategy(config, "I")
    state = new_game(config)
    move = engine_move(state, cert)
    assert move["kind"] == "challenge"
    assert (move["side"], move["sort"], move["element"]) == ("B", "C", "d2")
    # playing the certificate out beats any duplicator reply
    state = apply_move(state, move)
    for reply in ("c1", "c2"):
        t = apply_move(state, {"kind": "reply", "element": reply})
        t = apply_move(t, engine_move(t, cert))
        replies = legal_moves(t)["elements"]
        finals = [apply_move(t, {"kind": "reply", "element": d}) for d in replies]
        assert all(f.finished and f.winner == "I" for f in finals)


# ---------------------------------------------------------------------------
# hints and greedy play


def test_hint_is_exact_for_the_challenger():
    config = two_point_config(F(3, 5))
    state = new_game(config)
    h = hint(state)
    assert h["toMove"] == "I" and h["rank"] == 1
    # any opening pledge leads to r_1 = 1/2: the follow-up round exposes
    # the metric gap, but 1/2 stays below epsilon, so I never wins
    assert all(o["value"] == "1/2" and not o["winning"] for o in h["options"])


def test_hint_flags_the_winning_reply():
    config = two_point_config(F(2, 5))
    state = new_game(config)
    state = apply_move(state, {"kind": "challenge", "clock": "1",
                               "side": "A", "sort": "M", "element": "a1"})
    h = hint(state)
    assert h["toMove"] == "II" and h["rank"] == 1
    values = {o["element"]: (o["value"], o["winning"]) for o in h["options"]}
    # either reply leaves a single pledge; rank-1 continuation already
    # exposes the metric gap
    assert values == {"b1": ("1/2", False), "b2": ("1/2", False)}


def test_hint_refuses_finished_games():
    state = new_game(two_point_config(F(2, 5), clock="0"))
    with pytest.raises(ValueError, match="finished"):
        hint(state)


def test_greedy_move_descends_slowly():
    config = chain_config(epsilon=F(2))
    state = new_game(config)
    move = greedy_move(state)
    assert move["kind"] == "challenge" and move["clock"] == "0*"
    state = apply_move(state, move)
    reply = greedy_move(state)
    assert reply["kind"] == "reply"
    state = apply_move(state, reply)
    assert greedy_move(state)["clock"] == "1*"

    finite = new_game(two_point_config(F(2, 5)))
    assert greedy_move(finite)["clock"] == "1"


# ---------------------------------------------------------------------------
# serialization and replay


def test_state_to_json_shape():
    config = two_point_config(F(2, 5))
    state = new_game(config)
    doc = state_to_json(state)
    assert doc["status"] == "in_progress"
    assert doc["clock"] == "top"
    assert doc["r0"] == "0/1"
    assert doc["rounds"] == [] and doc["position"] == []


def test_transcript_replay_round_trip():
    config = two_point_config(F(2, 5))
    moves = [
        {"kind": "challenge", "clock": "1", "side": "A", "sort": "M",
         "element": "a2"},
        {"kind": "reply", "element": "b2"},
        {"kind": "challenge", "clock": "0", "side": "A", "sort": "M",
         "element": "a1"},
        {"kind": "reply", "element": "b1"},
    ]
    state = new_game(config)
    for m in moves:
        state = apply_move(state, m)
    assert state.finished and state.winner == "I"
    doc = json.loads(json.dumps(transcript(config, moves, state)))
    replayed = replay_transcript(doc)
    assert state_to_json(replayed) == state_to_json(state)


def test_tampered_transcript_fails_replay():
    config = two_point_config(F(2, 5))
    moves = [{"kind": "challenge", "clock": "1", "side": "A", "sort": "M",
              "element": "a2"},
             {"kind": "reply", "element": "b2"}]
    state = new_game(config)
    for m in moves:
        state = apply_move(state, m)
    doc = transcript(config, moves, state)
    bad = copy.deepcopy(doc)
    bad["moves"][0]["clock"] = "5"
    with pytest.raises(IllegalMove):
        replay_transcript(bad)
