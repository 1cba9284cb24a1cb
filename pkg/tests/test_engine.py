from fractions import Fraction as Q

import pytest

from selgame.engine import (
    GameSpec, StrategyHandle, CoercionError, P1, P2, FULL, MARKOV, PREDETERMINED, CONSTANT,
    run_game, run_dual_game, judge, strength_coercion, adversary_p1, adversary_cover,
    serialize, parse_transcript, rejudge,
)
from selgame.strategies import markov_from_cofinality, chq_p1_compact_open, chq_p2_adversary
from selgame.topology.covers import CoverOracle, inside
from selgame.topology.descriptors import OpenDesc, Interval, FinSet, Closed, STAR, whole
from selgame.topology.spaces import OnePoint, RealLineModel, point
from selgame.witnesses import family_from_spec


def hemi(space):
    fam = "initial_segment" if space.kind == "DiscreteN" else "centered_interval"
    return family_from_spec(space, {"kind": "Hemicompact", "family": fam})


def constant_p2(i=0, arity="single"):
    return StrategyHandle(P2, CONSTANT, arity, lambda ctx: (lambda: i if arity == "single" else [i]))


def test_horizon_zero(reg):
    D = reg.get("discrete_n")
    t = run_game(GameSpec("single", "K", "K", D, 0), adversary_p1(D, "K", 0), markov_from_cofinality(hemi(D)))
    assert t.rounds == []
    assert t.report["battery_size"] == len(D.battery("compact"))
    text = serialize(t)
    assert [line.split('"type":"')[1].split('"')[0] for line in text.splitlines()] == ["header", "report"]


def test_one_point_single_round():
    S = OnePoint(id="pt", batteries={"points": [STAR]})
    cover = CoverOracle(S, "O", lambda ch: whole())
    cover.index_of(whole())
    t = run_game(GameSpec("single", "O", "O", S, 1), [cover], constant_p2())
    assert t.report["p2_wins"]


def test_markov_covers_discrete_battery(reg):
    D = reg.get("discrete_n")
    for seed in range(4):
        t = run_game(GameSpec("single", "Omega", "Omega", D, 32, seed),
                     adversary_p1(D, "Omega", seed), markov_from_cofinality(hemi(D)))
        assert t.report["p2_wins"], t.report["uncovered"]


def test_judge_empty_battery_and_named_point(reg):
    R = reg.get("real_line")
    cover = CoverOracle(R, "O", lambda ch: OpenDesc([Interval(Q(0), Q(1))]))
    cover.index_of(OpenDesc([Interval(Q(0), Q(1))]))
    t = run_game(GameSpec("single", "O", "O", R, 1, battery=[]), [cover], constant_p2(), legality="none")
    assert t.report["p2_wins"]
    rep = judge(t, [point(Q(5))], "O")
    assert not rep["p2_wins"] and rep["uncovered"] == point(Q(5))


def test_judge_rejects_class_mismatch(reg):
    R = reg.get("real_line")
    t = run_game(GameSpec("single", "O", "O", R, 0), [], constant_p2())
    with pytest.raises(ValueError):
        judge(t, [Closed(0, 1)], "O")


def test_judge_verdicts_rechecked(reg):
    D = reg.get("discrete_n")
    t = run_game(GameSpec("single", "K", "K", D, 16, 3), adversary_p1(D, "K", 3),
                 markov_from_cofinality(hemi(D)))
    sel = {(n, i): el for n, i, el in t.selections()}
    for v in t.report["verdicts"]:
        if v["covered_at"] is not None:
            n, i = v["covered_at"]
            assert inside(D, v["challenge"], sel[(n, i)])


def test_out_of_range_index_aborts(reg):
    D = reg.get("discrete_n")
    t = run_game(GameSpec("single", "O", "O", D, 4), adversary_p1(D, "O", 0), constant_p2(10 ** 6))
    assert t.aborted["player"] == P2 and t.aborted["round"] == 0
    assert t.rounds == []


def test_unsound_cover_aborts(reg):
    R = reg.get("real_line")
    bad = CoverOracle(R, "O", lambda ch: OpenDesc([Interval(Q(100), Q(101))]), label="bad")
    t = run_game(GameSpec("single", "O", "O", R, 3), [bad] * 3, constant_p2())
    assert t.aborted["player"] == P1 and "bad" in t.aborted["reason"]
    assert "aborted" in t.report


def test_short_move_list_rejected(reg):
    with pytest.raises(ValueError):
        run_game(GameSpec("single", "O", "O", reg.get("real_line"), 3), [], constant_p2())


def test_spec_validation():
    with pytest.raises(ValueError):
        GameSpec("double", "O", "O", None, 1)
    with pytest.raises(ValueError):
        GameSpec("single", "X", "O", None, 1)
    with pytest.raises(ValueError):
        GameSpec("single", "O", "O", None, -1)
    with pytest.raises(ValueError):
        GameSpec("single", "O", "O", None, 1, seed=2 ** 64)


def test_one_point_finite_open():
    S = OnePoint(id="pt", batteries={"points": [STAR]})
    p1 = StrategyHandle(P1, CONSTANT, "single", lambda ctx: (lambda: FinSet([STAR])))
    p2 = StrategyHandle(P2, CONSTANT, "single", lambda ctx: (lambda: whole()))
    t = run_dual_game(GameSpec("single", "finite-move", "avoid-cover", S, 3), p1, p2)
    assert t.aborted is None and not t.report["p2_wins"]


def test_compact_open_legality():
    R = RealLineModel(id="line", batteries={"compact": [Closed(-1, 1)], "points": [Q(0)]})
    p1 = StrategyHandle(P1, PREDETERMINED, "single", lambda ctx: (lambda n: Closed(-n, n)))
    good = StrategyHandle(P2, MARKOV, "single",
                          lambda ctx: (lambda K, n: OpenDesc([Interval(K.lo - 1, K.hi + 1)])))
    t = run_dual_game(GameSpec("single", "compact-move", "avoid-cover", R, 4), p1, good)
    assert t.aborted is None
    tight = StrategyHandle(P2, MARKOV, "single",
                           lambda ctx: (lambda K, n: OpenDesc([Interval(K.lo, K.hi + 1)])))
    t = run_dual_game(GameSpec("single", "compact-move", "avoid-cover", R, 4), p1, tight)
    assert t.aborted["player"] == P2 and t.aborted["round"] == 0


def test_chq_compact_open_p1_wins(reg):
    C = reg.get("chq")
    t = run_dual_game(GameSpec("single", "compact-move", "avoid-cover", C, 24, 1),
                      chq_p1_compact_open(), chq_p2_adversary(1))
    assert t.aborted is None and not t.report["p2_wins"]


# -- strengths -------------------------------------------------------------

def test_coercion_markov_to_full(reg):
    D = reg.get("discrete_n")
    h = markov_from_cofinality(hemi(D))
    full = strength_coercion(h, FULL)
    assert full.strength == FULL
    for seed in range(10):
        spec = GameSpec("single", "K", "K", D, 12, seed)
        a = serialize(run_game(spec, adversary_p1(D, "K", seed), h))
        b = serialize(run_game(spec, adversary_p1(D, "K", seed), full))
        assert a == b


def test_coercion_constant_to_markov(reg):
    D = reg.get("discrete_n")
    spec = GameSpec("single", "O", "O", D, 6, 2)
    h = constant_p2(0)
    a = serialize(run_game(spec, adversary_p1(D, "O", 2), h))
    b = serialize(run_game(spec, adversary_p1(D, "O", 2), strength_coercion(h, MARKOV)))
    assert a == b


def test_coercion_p1_predetermined_to_full(reg):
    D = reg.get("discrete_n")
    spec = GameSpec("single", "O", "O", D, 6, 2)
    p2 = markov_from_cofinality(hemi(D))
    a = serialize(run_game(spec, adversary_p1(D, "O", 2), p2))
    b = serialize(run_game(spec, strength_coercion(adversary_p1(D, "O", 2), FULL), p2))
    assert a == b


def test_widening_refused():
    h = StrategyHandle(P2, FULL, "single", lambda ctx: (lambda hist: 0))
    with pytest.raises(CoercionError):
        strength_coercion(h, MARKOV)
    with pytest.raises(CoercionError):
        strength_coercion(h, "Psychic")


def test_handle_validation():
    with pytest.raises(ValueError):
        StrategyHandle("P3", FULL, "single", None)
    with pytest.raises(ValueError):
        StrategyHandle(P1, "Often", "single", None)
    with pytest.raises(ValueError):
        StrategyHandle(P1, FULL, "many", None)


# -- determinism, windows and serialization --------------------------------

def test_byte_identical_replays(reg):
    P = reg.get("real_line_2")
    from selgame.suites import product_strategies
    sel, h = product_strategies(P)[0]
    spec = GameSpec(sel, "K", "K", P, 16, 9)
    runs = [serialize(run_game(spec, adversary_p1(P, "K", 9), h, legality="rotating", sample=4))
            for _ in range(2)]
    assert runs[0] == runs[1]


def test_markov_ignores_old_history(reg):
    D = reg.get("discrete_n")
    h = markov_from_cofinality(hemi(D))
    junk = adversary_cover(D, "K", 99, 99)

    def tamper(n, owner, history):
        if owner == P2:
            return [junk] * (len(history) - 1) + history[-1:]
        return ["garbage"] * len(history)

    spec = GameSpec("single", "K", "K", D, 20, 4)
    a = run_game(spec, adversary_p1(D, "K", 4), h)
    b = run_game(spec, adversary_p1(D, "K", 4), h, tamper=tamper)
    assert [r["p2"] for r in a.rounds] == [r["p2"] for r in b.rounds]


def test_single_selection_lifts_to_finite(reg):
    D = reg.get("discrete_n")
    w = hemi(D)
    for seed in range(3):
        a = run_game(GameSpec("single", "K", "K", D, 32, seed), adversary_p1(D, "K", seed),
                     markov_from_cofinality(w))
        b = run_game(GameSpec("finite", "K", "K", D, 32, seed), adversary_p1(D, "K", seed),
                     markov_from_cofinality(w, "finite"))
        assert a.report["p2_wins"] and b.report["p2_wins"]
        assert [r["p2"] for r in a.rounds] == [r["p2"][0] for r in b.rounds]


def test_transcript_round_trip(reg):
    D = reg.get("discrete_n")
    t = run_game(GameSpec("finite", "K", "K", D, 10, 5), adversary_p1(D, "K", 5),
                 markov_from_cofinality(hemi(D), "finite"), debug=True)
    parsed = parse_transcript(serialize(t))
    assert parsed.header["spec"]["seed"] == 5
    assert rejudge(parsed, D) == parsed.report


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_transcript('{"type":"weird"}\n')
    with pytest.raises(ValueError):
        parse_transcript('{"type":"round","n":0}\n')
