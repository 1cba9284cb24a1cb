"""The nine acceptance criteria as runnable checks.

Each suite returns (passed, detail); ``run_suite`` adds the wall time and
fails a suite that overruns its limit.  All verdicts are exact and relative
to the shipped batteries.
"""

import time
from dataclasses import dataclass, asdict
from fractions import Fraction
from importlib import resources

from .combinatorics import (
    build_pairing, empty_constraint, range_constraint, split_range_constraint,
    enum_finseq, enum_split_pairs,
)
from .engine import (
    GameSpec, run_game, run_dual_game, adversary_p1, adversary_cover, scripted_p1, serialize,
    StrategyHandle, P2, MARKOV,
)
from .topology.covers import (
    battery_for, classify_cover, finite_union_closure, rectangle_refine, cube_refine, inside,
)
from .topology.descriptors import (
    FinSet, Closed, CProd, CInj, CUnion, OpenDesc, Interval, Singleton, Whole, Rect, Inj,
    INF, STAR, whole, union, point_tree,
)
from .topology.registry import load_registry
from .topology.spaces import point
from .witnesses import (
    family_from_spec, WitnessFamily, check_cofinality, implication_chain, regular_collapse,
)
from .strategies import (
    markov_from_cofinality, markov_falsifier, product_k_rothberger, product_k_menger,
    markov_product_k_rothberger, markov_product_k_menger, powers_to_omega_rothberger,
    unfold_omega_to_open_rothberger, discrete_extractor, one_point_extractor,
    baire_adversary, bounded_random_p2, chq_p1_compact_open, chq_p2_adversary,
    chq_p2_finite_open, chq_p1_finite, chq_measure_ledger, chq_named_points,
)
from .strategies.examples import _fortissimo_part

__all__ = ["Result", "SUITES", "LIMITS", "run_suite", "run_all", "shipped_registry"]


def shipped_registry():
    return load_registry(str(resources.files("selgame").joinpath("data", "registry.json")))


@dataclass
class Result:
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float

    def line(self):
        return "%-10s %s  %6.2fs / %4.0fs  %s" % (
            self.name, "PASS" if self.passed else "FAIL", self.seconds, self.limit, self.detail)

    def as_dict(self):
        return asdict(self)


class _Fail(AssertionError):
    pass


def _need(cond, msg):
    if not cond:
        raise _Fail(msg)


# ---------------------------------------------------------------------------
# 1. pairing
# ---------------------------------------------------------------------------

def suite_pairing(reg):
    out = []
    for name, r, anchor in (("empty", empty_constraint(), None),
                            ("range", range_constraint(), lambda n: enum_finseq(n)),
                            ("split", split_range_constraint(), lambda n: enum_split_pairs(n)[0])):
        pf = build_pairing(r)
        _need(pf.gamma(0) == 0, "%s: gamma_0 = %d" % (name, pf.gamma(0)))
        seen = {}
        for m in range(5000):
            j, k = pf.inverse(m)
            _need(pf.beta(j, k) == m, "%s: beta(inverse(%d)) != %d" % (name, m, m))
            _need((j, k) not in seen, "%s: (%d,%d) hit twice" % (name, j, k))
            seen[(j, k)] = m
        rows = {}
        for (j, k), m in seen.items():
            rows.setdefault(j, []).append((k, m))
        for j, cells in rows.items():
            cells.sort()
            _need([k for k, _ in cells] == list(range(len(cells))),
                  "%s: row %d is not an initial segment below 5000" % (name, j))
            _need(all(a[1] < b[1] for a, b in zip(cells, cells[1:])),
                  "%s: row %d not increasing" % (name, j))
        if anchor is not None:
            for n in range(501):
                start = pf.beta(n, 0)
                _need(all(v < start for v in anchor(n)),
                      "%s: range of s_%d not below beta(%d,0) = %d" % (name, n, n, start))
        out.append("%s ok (%d rows)" % (name, len(rows)))
    return True, "; ".join(out)


# ---------------------------------------------------------------------------
# 2. cover laws
# ---------------------------------------------------------------------------

_IMPLIED = {"Krel": "K", "K": "Omega", "Omega": "Lambda", "Gamma": "Omega", "Lambda": "O"}


def _inner_compact(space, U, cap=1000):
    """A compact set inside the open U with nearly the same extent (exact descriptors)."""
    parts = []
    for a in U.atoms:
        if isinstance(a, Interval):
            d = (a.hi - a.lo) / 1024
            parts.append(Closed(a.lo + d, a.hi - d))
        elif isinstance(a, Singleton):
            parts.append(FinSet([a.p]))
        elif isinstance(a, Whole):
            parts.append(Closed(-cap, cap) if hasattr(space, "lo") else None)
        else:
            return None
    if any(p is None for p in parts) or not parts:
        return None
    if all(isinstance(p, FinSet) for p in parts):
        return FinSet(x for p in parts for x in p.points)
    return parts[0] if len(parts) == 1 else CUnion(parts)


def _rect_inside(space, R, W):
    """Re-verify R inside W through a slightly shrunk compact copy of each rectangle of R."""
    for a in R.atoms:
        if not isinstance(a, Rect):
            return W.is_whole()
        facs = [_inner_compact(f, U) for f, U in zip(space.factors, a.factors)]
        if any(f is None for f in facs):
            return False
        if not space.contains(CProd(facs), W):
            return False
    return True


def _grid_atom(space, x, side):
    if space.kind == "DiscreteN":
        return Singleton(x)
    k = (x / side).numerator // (x / side).denominator
    return Interval(k * side - side / 2, k * side + 3 * side / 2)


def grid_cover(space, side=Fraction(1)):
    """Open cover by overlapping cells of the given side, one per grid square (points only)."""
    from .topology.covers import CoverOracle

    def selector(ch):
        (p,) = ch.points
        if hasattr(space, "factors"):
            return OpenDesc([Rect([OpenDesc([_grid_atom(f, x, side)]) for f, x in zip(space.factors, p)])])
        return OpenDesc([_grid_atom(space, p, side)])
    return CoverOracle(space, "O", selector, label="grid")


def _class_lists(space, seed):
    c = adversary_cover(space, "K", seed, 0)
    picked = [c[c.select(ch)] for ch in battery_for(space, "Omega")[:8]]
    return [picked, picked + [whole()], [whole()]], c


def suite_covers(reg):
    notes = []
    for sid in ("discrete_n", "real_line", "real_line_2", "real_line_3"):
        space = reg.get(sid)
        checked = 0
        for seed in range(3):
            lists, c = _class_lists(space, seed)
            for els in lists:
                cls = classify_cover(space, els)
                if "Omega" in cls:
                    _need(any(U.is_whole() for U in els),
                          "%s: finite Omega cover without the whole space" % sid)
                for a, b in _IMPLIED.items():
                    _need(a not in cls or b in cls, "%s: %s without %s" % (sid, a, b))
            # a K-cover is sound on every weaker battery
            for cls_name in ("O", "Omega", "K"):
                for ch in battery_for(space, cls_name):
                    _need(c.sound_on(ch), "%s: K-cover misses %s challenge %r" % (sid, cls_name, ch))
                    checked += 1
            # finite unions of an open cover give relative k-covers
            o = adversary_cover(space, "O", seed, 1) if not hasattr(space, "factors") else grid_cover(space)
            fin = finite_union_closure(o)
            for ch in battery_for(space, "Krel"):
                i = fin.select(ch)
                _need(inside(space, ch, fin[i]), "%s: finite union misses %r" % (sid, ch))
                _need(all(j < o.size() for j in fin.key(i)), "%s: finite union uses unknown elements" % sid)
                checked += 1
            if hasattr(space, "factors"):
                R = rectangle_refine(space, c)
                for E in battery_for(space, "K"):
                    i = R.select(E)
                    _need(R[i].is_rect() and space.contains(E, R[i]), "%s: rectangle misses %r" % (sid, E))
                    _need(_rect_inside(space, R[i], c[R.parent_index(i)]),
                          "%s: rectangle %r not inside its parent" % (sid, R[i]))
                    checked += 1
                base = space.factors[0]
                if all(f is base for f in space.factors):
                    cube = cube_refine(space, c)
                    for K in battery_for(base, "K"):
                        i = cube.select(K)
                        U = cube[i]
                        _need(inside(base, K, U), "%s: cube side misses %r" % (sid, K))
                        power = OpenDesc([Rect([U] * len(space.factors))])
                        _need(_rect_inside(space, power, c[cube.parent_index(i)]),
                              "%s: cube over %r not inside its parent" % (sid, K))
                        checked += 1
        notes.append("%s %d" % (sid, checked))
    return True, "checks: " + ", ".join(notes)



# ---------------------------------------------------------------------------
# 3. Markov strategies from witnesses, and their falsifier
# ---------------------------------------------------------------------------

def _hemicompact(space, scale=1):
    fam = "initial_segment" if space.kind == "DiscreteN" else "centered_interval"
    return family_from_spec(space, {"kind": "Hemicompact", "family": fam, "scale": scale})


def suite_markov(reg):
    games = 0
    for sid in ("discrete_n", "real_line"):
        space = reg.get(sid)
        w = _hemicompact(space)
        for cls in ("O", "Omega", "K"):
            for seed in range(3):
                t = run_game(GameSpec("single", cls, cls, space, 32, seed),
                             adversary_p1(space, cls, seed), markov_from_cofinality(w))
                _need(t.aborted is None, "%s %s seed %d aborted: %s" % (sid, cls, seed, t.aborted))
                _need(t.report["p2_wins"], "%s %s seed %d leaves %r uncovered"
                      % (sid, cls, seed, t.report["uncovered"]))
                games += 1
    named = []
    R = reg.get("real_line")
    shifted = WitnessFamily("Hemicompact", R, lambda n: Closed(1000 - n, 1000 + n), name="shifted")
    bad = Closed(2000, 2001)
    named.append(_falsify(R, shifted, bad, [Fraction(2000) + Fraction(1, n + 2) for n in range(16)], 16))
    D = reg.get("discrete_n")
    truncated = WitnessFamily("Hemicompact", D, lambda n: FinSet(range(n + 1)), name="truncated")
    named.append(_falsify(D, truncated, FinSet([17]), [17] * 16, 16))
    return True, "%d winning games; falsifier leaves %s uncovered" % (games, " and ".join(named))


def _falsify(space, w, bad, xs, horizon):
    sigma = markov_from_cofinality(w)
    moves = markov_falsifier(sigma, space, bad, xs, horizon)
    t = run_game(GameSpec("single", "K", "K", space, horizon, 0, battery=[bad]), scripted_p1(moves), sigma)
    _need(t.aborted is None, "falsifier play aborted: %s" % (t.aborted,))
    _need(not t.report["p2_wins"] and t.report["uncovered"] == bad,
          "falsifier did not leave %r uncovered" % (bad,))
    _need(all(not inside(space, bad, el) for _, _, el in t.selections()),
          "a selected element contains %r" % (bad,))
    return repr(bad)


# ---------------------------------------------------------------------------
# 4. products
# ---------------------------------------------------------------------------

PRODUCT_SCALE = 5
PRODUCT_SAMPLE = 4


def product_strategies(P, scale=PRODUCT_SCALE):
    """The four product constructions over the factors of P, built from hemicompact witnesses."""
    X, Y = P.factors
    wx, wy = _hemicompact_or_point(X, scale), _hemicompact_or_point(Y, scale)
    single = (markov_from_cofinality(wx), markov_from_cofinality(wy))
    finite = (markov_from_cofinality(wx, "finite"), markov_from_cofinality(wy, "finite"))
    return [
        ("single", product_k_rothberger(*single)),
        ("single", markov_product_k_rothberger(wx, wy)),
        ("finite", product_k_menger(*finite)),
        ("finite", markov_product_k_menger(*finite)),
    ]


def _hemicompact_or_point(space, scale):
    if space.kind == "OnePoint":
        return family_from_spec(space, {"kind": "Hemicompact", "family": "one_point"})
    return _hemicompact(space, scale)


def _play_product(P, sel, strategy, seed, horizon=64, debug=False):
    return run_game(GameSpec(sel, "K", "K", P, horizon, seed), adversary_p1(P, "K", seed), strategy,
                    debug=debug, legality="rotating", sample=PRODUCT_SAMPLE)


def _projection(space, W):
    """pi_X of an open subset of X x {*}."""
    parts = [a.factors[0] for a in W.atoms if isinstance(a, Rect) and a.factors[1].member(STAR)]
    if any(isinstance(a, Whole) for a in W.atoms):
        return whole()
    return union(parts) if parts else OpenDesc([])


def projection_law(P, sel, strategy, seed, horizon=16):
    """Replay on X x {*}; the projected play is a legal X play with the same verdicts.

    Each P1 cover projects to a k-cover of X (checked on X's battery), each
    response projects to an element of that projected cover, and every
    challenge K x {*} is covered at the same round as K on the projection.
    """
    X = P.factors[0]
    covers = [adversary_cover(P, "K", seed, n) for n in range(horizon)]
    t = run_game(GameSpec(sel, "K", "K", P, horizon, seed), scripted_p1(covers), strategy,
                 legality="rotating", sample=PRODUCT_SAMPLE)
    _need(t.aborted is None, "%s aborted on %s: %s" % (strategy.name, P.id, t.aborted))
    for r in t.rounds[:4]:
        cover = covers[r["n"]]
        for K in battery_for(X, "K"):
            U = _projection(P, cover[cover.select(CProd([K, FinSet([STAR])]))])
            _need(inside(X, K, U), "round %d: projected cover misses %r" % (r["n"], K))
    for r in t.rounds:
        for i, el in r["p2_elements"]:
            _need(covers[r["n"]][i] is el, "round %d: response %d is not from the cover" % (r["n"], i))
    projected = [(n, i, _projection(P, el)) for n, i, el in t.selections()]
    for v in t.report["verdicts"]:
        E = v["challenge"]
        K = P.project(E, 0)
        hit = next(([n, i] for n, i, U in projected if inside(X, K, U)), None)
        _need(hit == v["covered_at"], "%s seed %d: %r covered at %r on the product, %r on the factor"
              % (strategy.name, seed, E, v["covered_at"], hit))
    return len(t.report["verdicts"])


def suite_products(reg):
    games = 0
    for sid in ("real_line_2", "discrete_n_2"):
        P = reg.get(sid)
        size = len(battery_for(P, "K"))
        _need(size >= 40, "%s battery has only %d rectangles" % (sid, size))
        for sel, strategy in product_strategies(P):
            for seed in range(20):
                t = _play_product(P, sel, strategy, seed)
                _need(t.aborted is None, "%s seed %d on %s aborted: %s" % (strategy.name, seed, sid, t.aborted))
                _need(t.report["p2_wins"], "%s seed %d on %s leaves %r uncovered"
                      % (strategy.name, seed, sid, t.report["uncovered"]))
                games += 1
    compared = 0
    for sid in ("real_line_x_one", "discrete_n_x_one"):
        P = reg.get(sid)
        for sel, strategy in product_strategies(P):
            for seed in range(2):
                compared += projection_law(P, sel, strategy, seed)
    return True, "%d winning games; %d projected verdicts agree" % (games, compared)


# ---------------------------------------------------------------------------
# 5. unfolding
# ---------------------------------------------------------------------------

def power_strategy(m, P):
    """Markov k-Rothberger strategy on the power P = X^(m+1) from the cubes {0..k}^(m+1)."""
    w = WitnessFamily("Hemicompact", P, lambda k: CProd([FinSet(range(k + 1))] * (m + 1)),
                      name="cube%d" % (m + 1))
    return markov_from_cofinality(w)


def _check_unfold_records(t):
    prev_block, prev_top = -1, -1
    for r in t.rounds:
        d = r["debug"]
        _need(d["M"] == d["M_prev"] + d["core_size"],
              "round %d: M = %d but M_prev + #F = %d" % (r["n"], d["M"], d["M_prev"] + d["core_size"]))
        if d["block"] != prev_block:
            _need(d["M_prev"] == prev_top, "round %d: block %d starts after %d, not %d"
                  % (r["n"], d["block"], d["M_prev"], prev_top))
            prev_block, prev_top = d["block"], d["M"]
        _need(d["M_prev"] < r["n"] <= d["M"], "round %d lies outside its block" % r["n"])


def suite_unfolding(reg):
    D = reg.get("discrete_n")
    battery = [F for F in battery_for(D, "Omega") if len(F.points) <= 3]
    for seed in range(3):
        t = run_game(GameSpec("single", "Omega", "Omega", D, 64, seed, battery=battery),
                     adversary_p1(D, "Omega", seed), powers_to_omega_rothberger(power_strategy))
        _need(t.aborted is None and t.report["p2_wins"],
              "powers seed %d: %s" % (seed, t.aborted or t.report["uncovered"]))
    rounds = 0
    cases = [(D, WitnessFamily("Hemicompact", D, lambda n: FinSet([n]), name="singletons"),
              discrete_extractor(D))]
    O = reg.get("one_point")
    cases.append((O, family_from_spec(O, {"kind": "Hemicompact", "family": "one_point"}),
                  one_point_extractor(O)))
    for space, w, extractor in cases:
        for seed in range(3):
            t = run_game(GameSpec("single", "O", "O", space, 64, seed), adversary_p1(space, "O", seed),
                         unfold_omega_to_open_rothberger(markov_from_cofinality(w), extractor), debug=True)
            _need(t.aborted is None and t.report["p2_wins"],
                  "unfold on %s seed %d: %s" % (space.id, seed, t.aborted or t.report["uncovered"]))
            _check_unfold_records(t)
            rounds += len(t.rounds)
    return True, "%d finite sets covered through powers; block arithmetic held for %d rounds" % (
        len(battery), rounds)


# ---------------------------------------------------------------------------
# 6. Baire space
# ---------------------------------------------------------------------------

def suite_baire(reg):
    B = reg.get("baire")
    p1, escape = baire_adversary(4)
    for seed in range(20):
        t = run_game(GameSpec("finite", "O", "O", B, 64, seed, battery=[]), p1, bounded_random_p2(seed, 4),
                     legality="none")
        _need(t.aborted is None, "seed %d aborted: %s" % (seed, t.aborted))
        f = escape(t)
        _need(len(f) >= 64, "escape shorter than the horizon")
        for n, i, el in t.selections():
            _need(not el.member(f), "seed %d: escape inside %r (round %d)" % (seed, el, n))
    return True, "20 escapes avoid every selected cylinder"


# ---------------------------------------------------------------------------
# 7. CHQ
# ---------------------------------------------------------------------------

def chq_compact_open(reg, rounds=128, seed=0, debug=True):
    C = reg.get("chq")
    return run_dual_game(GameSpec("single", "compact-move", "avoid-cover", C, rounds, seed),
                         chq_p1_compact_open(), chq_p2_adversary(seed), debug=debug)


def chq_finite_open(reg, rounds=128, seed=0, debug=True):
    C = reg.get("chq")
    return run_dual_game(GameSpec("single", "finite-move", "avoid-cover", C, rounds, seed),
                         chq_p1_finite(seed), chq_p2_finite_open(), debug=debug)


def check_chq_bookkeeping(t):
    space = t.spec.space
    names = []
    for r in t.rounds:
        n, K = r["n"], r["p1_set"]
        parts = K.parts if isinstance(K, CUnion) else (K,)
        _need(CInj(0, Closed(0, 1)) in parts and INF in _fortissimo_part(K),
              "round %d: K_0 not inside K_n" % n)
        expected = []
        for j in range(n):
            for k in range(min(n, len(names[j]))):
                if names[j][k] not in expected:
                    expected.append(names[j][k])
        _need(_fortissimo_part(K) == {INF} | set(expected),
              "round %d: K_n adds %r, expected the triangle %r" % (n, _fortissimo_part(K), expected))
        _need(r["debug"]["absorbed"] == [point_tree(p) for p in sorted(expected)],
              "round %d: bookkeeping record disagrees" % n)
        names.append(chq_named_points(space, r["p2_open"]))


def suite_chq(reg):
    t = chq_compact_open(reg)
    _need(t.aborted is None and len(t.rounds) == 128, "compact-open play stopped: %s" % (t.aborted,))
    check_chq_bookkeeping(t)
    missed = [v["challenge"] for v in t.report["verdicts"] if v["covered_at"] is None]
    _need(not missed and not t.report["p2_wins"], "compact battery not covered: %r" % (missed[:1],))
    f = chq_finite_open(reg)
    _need(f.aborted is None and len(f.rounds) == 128, "finite-open play stopped: %s" % (f.aborted,))
    ledger = chq_measure_ledger([r["p2_open"] for r in f.rounds])
    for n, (length, bound, total) in enumerate(ledger):
        _need(length < bound, "round %d length %s not below %s" % (n, length, bound))
        _need(str(total) == f.rounds[n]["debug"]["cumulative"], "round %d ledger disagrees" % n)
    total = ledger[-1][2]
    _need(total < Fraction(1, 2), "cumulative length %s" % total)
    x = f.report["exhibited"]
    _need(f.report["p2_wins"] and isinstance(x, Inj) and x.i == 0 and 0 <= x.p <= 1,
          "no uncovered point of [0,1] exhibited")
    _need(not any(r["p2_open"].member(x) for r in f.rounds), "exhibited point %r is covered" % (x,))
    return True, "%d compacts covered; exact cumulative length ~%.6f < 1/2; %s uncovered" % (
        len(t.report["verdicts"]), float(total), x.p)


# ---------------------------------------------------------------------------
# 8. witness chain
# ---------------------------------------------------------------------------

def _int_floor_oracle(x):
    # least n with x >= n, as an integer
    return x.numerator // x.denominator


def suite_witnesses(reg):
    R, D = reg.get("real_line"), reg.get("discrete_n")
    steps = 0
    for space, name in ((R, "hemicompact"), (R, "relhemicompact"), (D, "hemicompact"), (D, "enumeration")):
        w = family_from_spec(space, space.witness_specs[name], name=name)
        while True:
            try:
                w = implication_chain(w)
            except Exception as exc:   # end of the chain
                if "no implication" not in str(exc):
                    raise
                break
            steps += 1
    rel = family_from_spec(R, R.witness_specs["relhemicompact"])
    hemi = regular_collapse(rel)
    _need(hemi[3] == Closed(-3, 3), "closure of (-3,3) is %r" % (hemi[3],))
    h = family_from_spec(R, R.witness_specs["hemicompact"])
    back = regular_collapse(regular_collapse(h))
    _need(all(R.subset(h[n], back[n]) for n in range(16)), "collapse round trip lost points")
    agree = 0
    for sid in reg.ids():
        space = reg.get(sid)
        if not space.flags.get("T1"):
            continue
        for wname, spec in sorted(space.witness_specs.items()):
            w = family_from_spec(space, spec, name=wname)
            for cls in ("O", "Omega", "K"):
                battery = [B for B in battery_for(space, cls) if not isinstance(B, OpenDesc)]
                a, b = check_cofinality(w, battery, "cof", 32), check_cofinality(w, battery, "hatcof", 32)
                _need(a.ok == b.ok and getattr(a, "witness", None) == getattr(b, "witness", None),
                      "%s/%s/%s: cof and hatcof disagree" % (sid, wname, cls))
                agree += 1
    RO = reg.get("right_order")
    ints = family_from_spec(RO, RO.witness_specs["integers"])
    pts = RO.battery("points")
    _need(len(pts) == 100, "right_order battery has %d points" % len(pts))
    claim = check_cofinality(ints, [point(x) for x in pts], "hatcof", 64)
    _need(claim.ok, "integers fail hatcof at %r" % (getattr(claim, "member", None),))
    for x, n in zip(pts, claim.witness):
        _need(x >= ints[n], "%s assigned to integer %s" % (x, ints[n]))
        _need(all(x < ints[m] for m in range(n)), "%s has an earlier witness" % x)
    return True, "%d chain steps; %d cof/hatcof comparisons; 100 right-order points" % (steps, agree)


# ---------------------------------------------------------------------------
# 9. engine determinism and windows
# ---------------------------------------------------------------------------

def _spy(inner_h, log):
    """Markov P2 recording every cover it is handed."""
    def factory(ctx):
        inner = inner_h.instantiate(ctx)

        def sigma(cover, n):
            log.append(cover)
            return inner(cover, n)
        return sigma
    return StrategyHandle(P2, MARKOV, inner_h.arity, factory, name=inner_h.name)


def suite_engine(reg):
    D, P, C = reg.get("discrete_n"), reg.get("discrete_n_2"), reg.get("chq")
    w = _hemicompact(D)
    runs = [
        lambda: run_game(GameSpec("single", "K", "K", D, 32, 7), adversary_p1(D, "K", 7),
                         markov_from_cofinality(w), debug=True),
        lambda: _play_product(P, "single", product_strategies(P)[0][1], 3, horizon=16, debug=True),
        lambda: chq_finite_open(reg, rounds=32, seed=5),
    ]
    for k, run in enumerate(runs):
        _need(serialize(run()) == serialize(run()), "game %d is not reproducible" % k)
    junk = adversary_cover(D, "K", 999, 999)
    touched = [0]

    def tamper(n, owner, history):
        if owner == "P2":
            if len(history) > 1:
                touched[0] += 1
            return [junk] * (len(history) - 1) + history[-1:]
        touched[0] += 1
        return ["garbage"] * len(history)

    for seed in range(5):
        clean_log, dirty_log = [], []
        clean = run_game(GameSpec("single", "K", "K", D, 32, seed), adversary_p1(D, "K", seed),
                         _spy(markov_from_cofinality(w), clean_log))
        dirty = run_game(GameSpec("single", "K", "K", D, 32, seed), adversary_p1(D, "K", seed),
                         _spy(markov_from_cofinality(w), dirty_log), tamper=tamper)
        _need([r["p2"] for r in clean.rounds] == [r["p2"] for r in dirty.rounds],
              "seed %d: tampering changed a move" % seed)
        _need(serialize(clean) == serialize(dirty), "seed %d: transcripts differ" % seed)
        _need(all(c is not junk for c in dirty_log), "a Markov strategy saw tampered history")
    f_clean = chq_finite_open(reg, rounds=32, debug=False)
    f_dirty = run_dual_game(GameSpec("single", "finite-move", "avoid-cover", C, 32, 0),
                            chq_p1_finite(0), chq_p2_finite_open(),
                            tamper=lambda n, o, h: (h[-1:] and [FinSet([])] * (len(h) - 1) + h[-1:])
                            if o == "P2" else [None] * len(h))
    _need(serialize(f_clean) == serialize(f_dirty), "dual game moved under tampering")
    return True, "3 games reproducible byte for byte; %d tampered histories ignored" % touched[0]


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

SUITES = {
    "pairing": suite_pairing,
    "covers": suite_covers,
    "markov": suite_markov,
    "products": suite_products,
    "unfolding": suite_unfolding,
    "baire": suite_baire,
    "chq": suite_chq,
    "witnesses": suite_witnesses,
    "engine": suite_engine,
}

LIMITS = {"pairing": 1, "covers": 5, "markov": 2, "products": 20, "unfolding": 5,
          "baire": 2, "chq": 3, "witnesses": 2, "engine": 2}

TOTAL_LIMIT = 60


def run_suite(name, reg=None):
    if name not in SUITES:
        raise KeyError(name)
    reg = reg or shipped_registry()
    t0 = time.perf_counter()
    try:
        ok, detail = SUITES[name](reg)
    except _Fail as exc:
        ok, detail = False, str(exc)
    except Exception as exc:   # a crash is a failed criterion, reported with its type
        ok, detail = False, "%s: %s" % (type(exc).__name__, exc)
    secs = time.perf_counter() - t0
    limit = LIMITS[name]
    if ok and secs >= limit:
        ok, detail = False, "over the %ss limit (%s)" % (limit, detail)
    return Result(name, ok, detail, secs, limit)


def run_all(reg=None):
    reg = reg or shipped_registry()
    return [run_suite(name, reg) for name in SUITES]
