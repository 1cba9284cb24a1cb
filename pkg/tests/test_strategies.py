from fractions import Fraction as Q

import pytest

from selgame.combinatorics import build_pairing, range_constraint, enum_finseq
from selgame.engine import (
    GameSpec, StrategyHandle, P2, MARKOV, run_game, run_dual_game, adversary_p1, adversary_cover,
    scripted_p1,
)
from selgame.strategies import (
    markov_from_cofinality, markov_falsifier, FalsifierImpossible, galvin_defeating_cover, WitnessMissing,
    product_k_rothberger, product_k_menger, markov_product_k_rothberger, unfold_omega_to_open_rothberger,
    discrete_extractor, one_point_extractor, powers_to_omega_rothberger, lift_to_power,
    markov_omega_menger_from_src, topctble_witness_conversions, product_witnesses,
    baire_adversary, baire_escape, bounded_random_p2, BoundViolation,
    chq_initial_compact, chq_named_points, chq_p1_compact_open, chq_p2_adversary,
    chq_p1_finite, chq_p2_finite_open, chq_measure_ledger, ParseError,
)
from selgame.suites import (
    product_strategies, projection_law, power_strategy, _check_unfold_records, check_chq_bookkeeping,
)
from selgame.topology.covers import CoverOracle, battery_for, inside
from selgame.topology.descriptors import (
    OpenDesc, Interval, FinSet, Closed, CProd, Tup, Word, InjOpen, whole,
)
from selgame.strategies.examples import _fortissimo_part
from selgame.topology.spaces import PowerSpace, TypeMismatch
from selgame.witnesses import WitnessFamily, WitnessError, family_from_spec


def centered(space, scale=1):
    return family_from_spec(space, {"kind": "Hemicompact", "family": "centered_interval", "scale": scale})


def segments(space, scale=1):
    return family_from_spec(space, {"kind": "Hemicompact", "family": "initial_segment", "scale": scale})


# -- Markov strategies from witnesses --------------------------------------

def test_markov_response_contains_member(reg):
    R = reg.get("real_line")
    t = run_game(GameSpec("single", "K", "K", R, 12, 1), adversary_p1(R, "K", 1),
                 markov_from_cofinality(centered(R)))
    for n, _, el in t.selections():
        assert inside(R, Closed(-n, n), el)


def test_markov_on_one_point(reg):
    O = reg.get("one_point")
    w = family_from_spec(O, {"kind": "Hemicompact", "family": "one_point"})
    t = run_game(GameSpec("single", "O", "O", O, 5, 0), adversary_p1(O, "O", 0), markov_from_cofinality(w))
    assert t.report["p2_wins"]
    assert all(inside(O, FinSet(O.points(1)), el) for _, _, el in t.selections())


@pytest.mark.parametrize("seed", range(5))
def test_markov_wins_discrete_compacts(reg, seed):
    D = reg.get("discrete_n")
    assert all(max(F.points) < 32 for F in D.battery("compact") if F.points)
    t = run_game(GameSpec("single", "K", "K", D, 32, seed), adversary_p1(D, "K", seed),
                 markov_from_cofinality(segments(D)))
    assert t.aborted is None and t.report["p2_wins"]


def test_falsifier_shifted_family(reg):
    R = reg.get("real_line")
    shifted = WitnessFamily("Hemicompact", R, lambda n: Closed(1000 - n, 1000 + n))
    sigma = markov_from_cofinality(shifted)
    bad = Closed(2000, 2001)
    moves = markov_falsifier(sigma, R, bad, [2000 + Q(1, n + 2) for n in range(16)], 16)
    t = run_game(GameSpec("single", "K", "K", R, 16, 0, battery=[bad]), scripted_p1(moves), sigma)
    assert not t.report["p2_wins"] and t.report["uncovered"] == bad


def test_falsifier_against_whole_space_choice(reg):
    R = reg.get("real_line")
    sigma = StrategyHandle(P2, MARKOV, "single", lambda ctx: (lambda cover, n: cover.index_of(whole())))
    cover_builder = lambda x, n: CoverOracle(R, "K", lambda ch: whole())
    with pytest.raises(FalsifierImpossible):
        markov_falsifier(sigma, R, Closed(0, 1), [Q(0)] * 4, 4, cover_builder=cover_builder)


def test_falsifier_point_past_horizon(reg):
    D = reg.get("discrete_n")
    sigma = markov_from_cofinality(segments(D))
    h = 16
    bad = FinSet([h + 1])
    moves = markov_falsifier(sigma, D, bad, [h + 1] * h, h)
    t = run_game(GameSpec("single", "K", "K", D, h, 0, battery=[bad]), scripted_p1(moves), sigma)
    assert t.report["uncovered"] == bad


def test_falsifier_rejects_points_outside_bad(reg):
    D = reg.get("discrete_n")
    with pytest.raises(ValueError):
        markov_falsifier(markov_from_cofinality(segments(D)), D, FinSet([3]), [4], 1)


# -- defeating covers ------------------------------------------------------

def test_galvin_discrete_first_element(reg):
    D = reg.get("discrete_n")
    battery = [FinSet([1, 2]), FinSet([5]), FinSet([0, 7, 9])]
    family = [[whole()], [D.nbhd(FinSet([4]), 0)[0], whole()]]
    first = lambda els: els[0]
    cover, elements = galvin_defeating_cover(D, first, family, battery)
    assert first(family[0]) not in elements
    for F in battery:
        assert inside(D, F, cover[cover.select(F)])


def test_galvin_full_range_is_unsatisfiable(reg):
    D = reg.get("discrete_n")
    F = FinSet([3])
    nbhds = []
    for level in range(12):
        U = D.nbhd(F, level)[0]
        if U not in nbhds:
            nbhds.append(U)
    with pytest.raises(WitnessMissing):
        galvin_defeating_cover(D, lambda els: els[0], [[U] for U in nbhds], [F])


def test_galvin_real_line_shifted_witnesses(reg):
    R = reg.get("real_line")
    const = OpenDesc([Interval(Q(-1), Q(1))])
    battery = [FinSet([Q(3 * i)]) for i in range(10)]
    witnesses = {F: OpenDesc([Interval(x - Q(1, 2), x + 1)]) for F in battery for x in F.points}
    cover, elements = galvin_defeating_cover(R, lambda els: const, [[const]], battery, witnesses)
    assert len(elements) == 10 and const not in elements


# -- products ----------------------------------------------------------------

@pytest.mark.parametrize("sid", ["real_line_x_one", "discrete_n_x_one"])
def test_projection_law(reg, sid):
    P = reg.get(sid)
    for sel, strategy in product_strategies(P):
        assert projection_law(P, sel, strategy, 0, horizon=8) > 0


def test_rothberger_bookkeeping_records(reg):
    P = reg.get("real_line_2")
    sel, strategy = product_strategies(P)[0]
    assert strategy.name == "product_k_rothberger"
    t = run_game(GameSpec(sel, "K", "K", P, 24, 2), adversary_p1(P, "K", 2), strategy, debug=True,
                 legality="rotating", sample=4)
    pf = build_pairing(range_constraint())
    for r in t.rounds:
        d = r["debug"]
        assert pf.beta(d["row"], d["col"]) == r["n"]
        assert list(enum_finseq(d["row"])) == d["seq"]
        assert all(l < r["n"] for l in d["seq"])


def test_rothberger_real_square(reg):
    P = reg.get("real_line_2")
    X, Y = P.factors
    h = product_k_rothberger(markov_from_cofinality(centered(X, 5)), markov_from_cofinality(centered(Y, 5)))
    t = run_game(GameSpec("single", "K", "K", P, 64, 0), adversary_p1(P, "K", 0), h,
                 legality="rotating", sample=4)
    assert t.report["battery_size"] == 50 and t.report["p2_wins"]


def test_menger_selections_are_finite_index_lists(reg):
    P = reg.get("discrete_n_2")
    X, Y = P.factors
    h = product_k_menger(markov_from_cofinality(segments(X, 5), "finite"),
                         markov_from_cofinality(segments(Y, 5), "finite"))
    t = run_game(GameSpec("finite", "K", "K", P, 64, 1), adversary_p1(P, "K", 1), h,
                 legality="rotating", sample=4)
    assert t.aborted is None and t.report["p2_wins"]
    for r in t.rounds:
        assert isinstance(r["p2"], list) and r["p2"]
        assert all(isinstance(i, int) and i >= 0 for i in r["p2"])


def test_markov_product_witness_grid(reg):
    P = reg.get("real_line_2")
    X, Y = P.factors
    w = product_witnesses(centered(X), centered(Y), P)
    pf = w.pairing
    for j in range(4):
        for k in range(4):
            assert w[pf.beta(j, k)] == CProd([Closed(-j, j), Closed(-k, k)])
    h = markov_product_k_rothberger(centered(X, 5), centered(Y, 5))
    t = run_game(GameSpec("single", "K", "K", P, 64, 3), adversary_p1(P, "K", 3), h,
                 legality="rotating", sample=4)
    assert t.report["p2_wins"]


def test_product_rejects_non_product(reg):
    D = reg.get("discrete_n")
    h = product_k_rothberger(markov_from_cofinality(segments(D)), markov_from_cofinality(segments(D)))
    with pytest.raises(TypeMismatch):
        run_game(GameSpec("single", "K", "K", D, 2, 0), adversary_p1(D, "K", 0), h)


# -- unfolding ---------------------------------------------------------------

def test_unfold_discrete_points(reg):
    D = reg.get("discrete_n")
    w = WitnessFamily("Hemicompact", D, lambda n: FinSet([n]))
    t = run_game(GameSpec("single", "O", "O", D, 64, 0), adversary_p1(D, "O", 0),
                 unfold_omega_to_open_rothberger(markov_from_cofinality(w), discrete_extractor(D)), debug=True)
    assert t.report["p2_wins"]
    _check_unfold_records(t)
    for r in t.rounds:
        assert r["debug"]["M"] - r["debug"]["M_prev"] == r["debug"]["core_size"]


def test_unfold_one_point(reg):
    O = reg.get("one_point")
    w = family_from_spec(O, {"kind": "Hemicompact", "family": "one_point"})
    t = run_game(GameSpec("single", "O", "O", O, 1, 0), adversary_p1(O, "O", 0),
                 unfold_omega_to_open_rothberger(markov_from_cofinality(w), one_point_extractor(O)), debug=True)
    assert len(t.rounds) == 1 and t.report["p2_wins"]


def test_powers_first_row_matches_base_play(reg):
    D = reg.get("discrete_n")
    pf = build_pairing()
    covers = [adversary_cover(D, "Omega", 4, n) for n in range(40)]
    t = run_game(GameSpec("single", "Omega", "Omega", D, 40, 4), scripted_p1(covers),
                 powers_to_omega_rothberger(power_strategy))
    row0 = [n for n in range(40) if pf.inverse(n)[0] == 0]
    for k, n in enumerate(row0):
        # the power-1 strategy picks the element holding {0..k}
        assert inside(D, FinSet(range(k + 1)), covers[n][t.rounds[n]["p2"]])


def test_lifted_cover_classified_on_power(reg):
    D = reg.get("discrete_n")
    P = PowerSpace(D, 2, id="d2", batteries={}, flags=dict(D.flags))
    cover = adversary_cover(D, "Omega", 0, 0)
    lifted = lift_to_power(cover, P)
    for F in battery_for(D, "Omega")[:10]:
        pts = sorted(F.points)
        E = FinSet([Tup((pts[0], pts[-1]))])
        assert inside(P, E, lifted[lifted.select(E)])


def test_omega_menger_from_relatively_compact_powers(reg):
    R = reg.get("real_line")
    member = lambda j, l: CProd([Closed(-l, l)] * (j + 1))
    battery = [F for F in battery_for(R, "Omega") if all(-5 <= x <= 5 for x in F.points)]
    assert battery
    t = run_game(GameSpec("finite", "Omega", "Omega", R, 32, 0, battery=battery),
                 adversary_p1(R, "Omega", 0), markov_omega_menger_from_src(member), debug=True)
    assert t.aborted is None and t.report["p2_wins"]


# -- witness conversions -----------------------------------------------------

def test_points_to_prefix_sets(reg):
    D = reg.get("discrete_n")
    pts = family_from_spec(D, D.witness_specs["enumeration"])
    sets = topctble_witness_conversions(pts)
    assert sets.kind == "FiniteSets"
    for n in range(10):
        assert set(sets[n].points) == {pts[k] for k in range(n + 1)}
    back = topctble_witness_conversions(sets)
    assert [back[n] for n in range(10)] == [pts[n] for n in range(10)]


def test_right_order_integers_to_sets(reg):
    RO = reg.get("right_order")
    ints = family_from_spec(RO, RO.witness_specs["integers"])
    sets = topctble_witness_conversions(ints)
    assert sets[2].points and set(sets[2].points) == {ints[0], ints[1], ints[2]}


def test_conversion_rejects_compact_families(reg):
    with pytest.raises(WitnessError):
        topctble_witness_conversions(centered(reg.get("real_line")))


def test_product_point_grid_and_mixed_kinds(reg):
    P = reg.get("discrete_n_2")
    X, Y = P.factors
    px = family_from_spec(X, X.witness_specs["enumeration"])
    py = family_from_spec(Y, Y.witness_specs["enumeration"])
    w = product_witnesses(px, py, P, check=False)
    pf = w.pairing
    assert w[pf.beta(2, 3)] == Tup((px[2], py[3]))
    with pytest.raises(WitnessError):
        product_witnesses(px, segments(Y), P)


# -- Baire space -------------------------------------------------------------

def test_escape_avoids_zero_cylinder():
    f = baire_escape([[(0,)]], 4, 1)
    assert f[0] == 1


def test_escape_without_selections_is_zeros():
    assert tuple(baire_escape([[]] * 5, 4, 5)) == (0,) * 5


def test_escape_bound_enforced():
    with pytest.raises(BoundViolation):
        baire_escape([[(0,), (1,), (2,)]], 2, 1)
    with pytest.raises(BoundViolation):
        baire_adversary(None)


@pytest.mark.parametrize("seed", range(5))
def test_escape_outside_selected_cylinders(reg, seed):
    B = reg.get("baire")
    p1, escape = baire_adversary(4)
    t = run_game(GameSpec("finite", "O", "O", B, 64, seed, battery=[]), p1, bounded_random_p2(seed, 4),
                 legality="none")
    f = escape(t)
    assert len(f) >= 64
    assert not any(el.member(Word(f)) for _, _, el in t.selections())


# -- the sum of [0,1] and the Fortissimo space --------------------------------

def test_chq_first_move(reg):
    C = reg.get("chq")
    t = run_dual_game(GameSpec("single", "compact-move", "avoid-cover", C, 3, 0),
                      chq_p1_compact_open(), chq_p2_adversary(0), debug=True)
    assert t.rounds[0]["p1_set"] == chq_initial_compact()
    check_chq_bookkeeping(t)
    names = [chq_named_points(C, r["p2_open"]) for r in t.rounds]
    triangle = {names[j][k] for j in range(2) for k in range(min(2, len(names[j])))}
    assert triangle and triangle <= _fortissimo_part(t.rounds[2]["p1_set"])


def test_chq_named_points_needs_infinity(reg):
    C = reg.get("chq")
    with pytest.raises(ParseError):
        chq_named_points(C, OpenDesc([InjOpen(1, OpenDesc([]))]))


def test_chq_finite_open_ledger(reg):
    C = reg.get("chq")
    t = run_dual_game(GameSpec("single", "finite-move", "avoid-cover", C, 32, 0),
                      chq_p1_finite(0), chq_p2_finite_open(), debug=True)
    ledger = chq_measure_ledger([r["p2_open"] for r in t.rounds])
    for n, (length, bound, total) in enumerate(ledger):
        assert isinstance(length, Q) and length < bound == Q(1, 2 ** (n + 2))
    assert ledger[-1][2] < Q(1, 2)
    x = t.report["exhibited"]
    assert t.report["p2_wins"] and x.i == 0 and 0 <= x.p <= 1
    assert not any(r["p2_open"].member(x) for r in t.rounds)


# -- legality across seeds ---------------------------------------------------

def test_constructors_pass_legality_on_seeded_games(reg):
    D = reg.get("discrete_n")
    w = segments(D)
    for seed in range(100):
        t = run_game(GameSpec("single", "O", "O", D, 8, seed), adversary_p1(D, "O", seed),
                     markov_from_cofinality(w))
        assert t.aborted is None
