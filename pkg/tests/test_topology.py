from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from selgame.topology.descriptors import (
    INF, Word, Tup, Inj, Singleton, Interval, Ray, Cylinder, CofComp, Rect, InjOpen,
    OpenDesc, FinSet, Closed, CUnion, CProd, CInj, whole, union, DescriptorError,
    point_tree, point_from_tree, open_tree, open_from_tree, compact_tree, compact_from_tree,
)
from selgame.topology.spaces import (
    DiscreteN, RealLineModel, BaireModel, FortissimoModel, RightOrderModel, ProductSpace,
    PowerSpace, OnePoint, SumSpace, TypeMismatch, point, intersect, covers_interval,
)
from selgame.topology.covers import (
    CoverOracle, SelectorFailure, classify_cover, finite_union_closure, rectangle_refine,
    cube_refine, finite_subcover_product, countable_k_subcover, inside, battery_for,
)
from selgame.topology.registry import Registry, RegistryError, load_registry, dumps

R = RealLineModel(id="line")
R2 = ProductSpace([R, R], id="plane")
R3 = PowerSpace(R, 3, id="cube")
D = DiscreteN(id="nat")


def iv(a, b):
    return OpenDesc([Interval(Q(a), Q(b))])


def rect(*factors):
    return OpenDesc([Rect([iv(a, b) for a, b in factors])])


rats = st.fractions(min_value=-20, max_value=20, max_denominator=16)


# -- membership and containment -------------------------------------------

def test_membership_examples():
    assert R.member(Q(1, 2), iv(0, 1))
    F = FortissimoModel(id="fort")
    assert F.member(INF, OpenDesc([CofComp([Q(3), Q(7)])]))
    assert not F.member(Q(3), OpenDesc([CofComp([Q(3), Q(7)])]))
    B = BaireModel(id="baire")
    assert B.member(Word([0, 1, 2]), OpenDesc([Cylinder([0, 1])]))
    assert not B.member(Word([0, 2]), OpenDesc([Cylinder([0, 1])]))


def test_containment_examples():
    assert R.contains(Closed(0, 1), iv(-1, 2))
    assert not R.contains(Closed(0, 1), iv(0, 2))
    assert R2.contains(CProd([Closed(0, 1), Closed(0, 1)]), rect((-1, 2), (-1, 2)))
    assert not R2.contains(CProd([Closed(0, 1), Closed(0, 1)]), rect((-1, 2), (0, 2)))


def test_type_mismatch():
    with pytest.raises(TypeMismatch):
        D.member(Q(1, 2), OpenDesc([Singleton(1)]))
    with pytest.raises(TypeMismatch):
        R.contains(Closed(0, 1), OpenDesc([Cylinder([0])]))


def test_chained_intervals_cover_closed():
    U = OpenDesc([Interval(Q(-1), Q(1, 2)), Interval(Q(1, 4), Q(2))])
    assert R.contains(Closed(0, 1), U)
    gap = OpenDesc([Interval(Q(-1), Q(1, 2)), Interval(Q(1, 2), Q(2))])
    assert not R.contains(Closed(0, 1), gap)


@given(rats, rats, rats, rats)
def test_closed_in_interval_matches_endpoints(a, b, c, d):
    lo, hi = min(a, b), max(a, b)
    if c >= d:
        return
    assert R.contains(Closed(lo, hi), OpenDesc([Interval(c, d)])) == (c < lo and hi < d)


@given(rats, rats, rats, rats, st.lists(rats, max_size=6))
def test_intersection_is_pointwise(a, b, c, d, probes):
    U = OpenDesc([Interval(min(a, b), max(a, b) + 1)])
    V = OpenDesc([Interval(min(c, d), max(c, d) + 1), Ray(Q(10))])
    W = intersect(U, V)
    for p in probes + [a, b, c, d]:
        assert W.member(p) == (U.member(p) and V.member(p))


@given(st.lists(rats, min_size=1, max_size=6), rats)
def test_union_is_pointwise(centers, p):
    parts = [iv(c - 1, c + 1) for c in centers]
    assert union(parts).member(p) == any(U.member(p) for U in parts)


def test_covers_interval_helper():
    ivs = [(Q(0), False, Q(1), False), (Q(1, 2), False, Q(3), False)]
    assert covers_interval(ivs, Q(1, 4), True, Q(2), True)
    assert not covers_interval(ivs, Q(0), True, Q(2), True)


# -- descriptor trees -----------------------------------------------------

points = st.one_of(
    st.integers(0, 50),
    rats,
    st.lists(st.integers(0, 9), max_size=4).map(Word),
    st.just(INF),
)


@given(points)
def test_point_tree_round_trip(p):
    assert point_from_tree(point_tree(p)) == p


@given(st.lists(st.tuples(rats, rats), min_size=1, max_size=4))
def test_open_and_compact_tree_round_trip(pairs):
    U = OpenDesc(Interval(min(a, b), max(a, b) + 1) for a, b in pairs)
    assert open_from_tree(open_tree(U)) == U
    K = CUnion(Closed(min(a, b), max(a, b)) for a, b in pairs)
    assert compact_from_tree(compact_tree(K)) == K
    nested = CProd([K, FinSet([Q(1)])])
    assert compact_from_tree(compact_tree(nested)) == nested


def test_nested_trees():
    U = OpenDesc([InjOpen(0, iv(0, 1)), InjOpen(1, OpenDesc([CofComp([Q(2)])]))])
    assert open_from_tree(open_tree(U)) == U
    K = CUnion([CInj(0, Closed(0, 1)), CInj(1, FinSet([INF]))])
    assert compact_from_tree(compact_tree(K)) == K
    assert point_from_tree(point_tree(Tup((Inj(1, INF), Q(1, 3))))) == Tup((Inj(1, INF), Q(1, 3)))


def test_bad_trees():
    with pytest.raises(DescriptorError):
        point_from_tree({"nope": 1})
    with pytest.raises(DescriptorError):
        compact_from_tree([1, 2])
    with pytest.raises(DescriptorError):
        point_tree(True)


# -- classification -------------------------------------------------------

def test_whole_space_has_every_class(reg):
    for sid in ("discrete_n", "real_line", "real_line_2"):
        space = reg.get(sid)
        assert classify_cover(space, [whole()]) == {"O", "Lambda", "Omega", "Gamma", "K", "Krel"}


def test_big_interval_is_not_whole(reg):
    space = reg.get("real_line")
    got = classify_cover(space, [iv(-1000, 1000)])
    assert "Omega" not in got and "Lambda" not in got


def test_finite_omega_contains_whole(reg):
    space = reg.get("real_line")
    covers = [
        [iv(-100, 100), iv(-1000, 1000)],
        [whole(), iv(0, 1)],
        [iv(-n - 1, n + 1) for n in range(11)],
    ]
    for els in covers:
        if "Omega" in classify_cover(space, els):
            assert any(U.is_whole() for U in els)


def test_nested_intervals_k_relative_to_small_battery():
    battery = {"compact": [Closed(-n, n) for n in range(10)] + [Closed(Q(1, 3), Q(9, 2))],
               "points": [Q(k, 2) for k in range(-18, 19)]}
    space = RealLineModel(id="small", batteries=battery)
    els = [iv(-n - 1, n + 1) for n in range(11)]
    assert all(any(inside(space, K, U) for U in els) for K in battery["compact"])
    assert "O" in classify_cover(space, els)


def test_class_inclusions(reg):
    implied = {"Krel": "K", "K": "Omega", "Omega": "Lambda", "Gamma": "Omega", "Lambda": "O"}
    space = reg.get("discrete_n")
    samples = [
        [whole()],
        [OpenDesc([Singleton(i)]) for i in range(40)],
        [OpenDesc([CofComp([i])]) for i in range(3)] + [whole()],
        [OpenDesc([CofComp([0])])],
    ]
    for els in samples:
        got = classify_cover(space, els)
        for a, b in implied.items():
            if a in got:
                assert b in got


# -- transformations ------------------------------------------------------

def test_union_closure_of_whole():
    c = CoverOracle(R, "O", lambda ch: whole())
    fin = finite_union_closure(c)
    assert fin[fin.select(Closed(-5, 5))].is_whole()


def test_union_closure_discrete():
    c = CoverOracle(D, "O", lambda ch: OpenDesc([Singleton(next(iter(ch.points)))]))
    fin = finite_union_closure(c)
    F = FinSet([1, 5, 9])
    U = fin[fin.select(F)]
    assert sorted(a.p for a in U.atoms) == [1, 5, 9]


def unit_cover(space):
    # unit intervals at half-integer centers: an open cover of the line
    def sel(ch):
        (x,) = ch.points
        c = Q(int(2 * x), 2)
        return iv(c - Q(1, 2), c + 1)
    return CoverOracle(space, "O", sel, label="units")


def test_union_closure_on_line(reg):
    space = reg.get("real_line")
    fin = finite_union_closure(unit_cover(space))
    for K in space.battery("compact"):
        assert inside(space, K, fin[fin.select(K)])


def test_rectangle_refine_identity_on_rectangles():
    W = rect((-5, 5), (-5, 5))
    c = CoverOracle(R2, "K", lambda E: W)
    r = rectangle_refine(R2, c)
    E = CProd([Closed(0, 1), Closed(0, 1)])
    assert r[r.select(E)] == W


def test_rectangle_refine_whole():
    c = CoverOracle(R2, "K", lambda E: whole())
    r = rectangle_refine(R2, c)
    assert r[r.select(CProd([Closed(0, 1), Closed(2, 3)]))].is_whole()


def test_rectangle_refine_l_shape():
    L = OpenDesc([Rect([iv(-1, Q(1, 2)), iv(-1, 2)]), Rect([iv(Q(1, 4), 2), iv(-1, 2)])])
    E = CProd([Closed(0, 1), Closed(0, 1)])
    assert R2.contains(E, L)
    c = CoverOracle(R2, "K", lambda ch: L)
    r = rectangle_refine(R2, c)
    out = r[r.select(E)]
    assert out.is_rect() and R2.contains(E, out)
    # grid sweep: rational points of the output lie in L
    for i in range(-8, 25):
        for j in range(-8, 25):
            p = Tup((Q(i, 8), Q(j, 8)))
            if out.member(p):
                assert L.member(p)


def test_cube_refine_examples():
    P2 = PowerSpace(R, 2, id="sq")
    W = OpenDesc([Rect([iv(0, 3), iv(1, 4)])])
    c = CoverOracle(P2, "K", lambda E: W)
    cr = cube_refine(P2, c)
    # K = [3/2, 2]: its square lies in W, unlike [1, 2] whose corner sits on the boundary
    K = Closed(Q(3, 2), 2)
    U = cr[cr.select(K)]
    assert U == iv(1, 3)
    assert R.contains(K, U)
    with pytest.raises(SelectorFailure):
        cube_refine(P2, c).select(Closed(1, 2))
    P1 = PowerSpace(R, 1, id="one")
    c1 = CoverOracle(P1, "K", lambda E: OpenDesc([Rect([iv(-9, 9)])]))
    one = cube_refine(P1, c1)
    assert one[one.select(Closed(0, 1))] == iv(-9, 9)


def test_cube_refine_twenty_intervals():
    def sel(E):
        lo = min(k.lo for k in E.factors) - 1
        hi = max(k.hi for k in E.factors) + 1
        return OpenDesc([Rect([iv(lo, hi)] * 3)])
    c = CoverOracle(R3, "K", sel)
    cr = cube_refine(R3, c)
    for n in range(20):
        K = Closed(Q(-n, 3), Q(n, 2))
        U = cr[cr.select(K)]
        assert R.contains(K, U)
        assert R3.contains(CProd([K] * 3), c[cr.parent_index(cr.select(K))])


def test_finite_subcover_product_whole():
    c = CoverOracle(R2, "O", lambda ch: whole())
    assert finite_subcover_product(R2, Closed(0, 1), Closed(0, 1), c) == [0]


def test_finite_subcover_product_grid():
    # overlapping cells of side 1/2 centred on the quarter grid
    def sel(ch):
        (p,) = ch.points
        i, j = int(p[0] * 4), int(p[1] * 4)
        return rect((Q(i - 1, 4), Q(i + 1, 4)), (Q(j - 1, 4), Q(j + 1, 4)))
    c = CoverOracle(R2, "O", sel)
    idx = finite_subcover_product(R2, Closed(0, 1), Closed(0, 1), c)
    els = [c[i] for i in idx]
    U = union(els)
    assert R2.contains(CProd([Closed(0, 1), Closed(0, 1)]), U)
    for i in range(33):
        for j in range(33):
            assert U.member(Tup((Q(i, 32), Q(j, 32))))


def test_finite_subcover_product_points():
    c = CoverOracle(ProductSpace([D, D], id="dd"), "O",
                    lambda ch: OpenDesc([Rect([OpenDesc([Singleton(p[0])]), OpenDesc([Singleton(p[1])])])
                                         for p in ch.points]))
    idx = finite_subcover_product(c.space, FinSet([1, 2]), FinSet([3, 4, 5]), c)
    assert len(idx) == 6


def test_countable_k_subcover(reg):
    space = RealLineModel(id="ctbl", batteries={"compact": [Closed(-n, n) for n in range(11)]})
    c = CoverOracle(space, "K", lambda K: OpenDesc([Ray(K.lo - 1)]) if K.hi > 5 else iv(K.lo - 1, K.hi + 1))
    sub = countable_k_subcover(space, c)
    assert sub.size() <= 11
    for K in space.battery("compact"):
        assert inside(space, K, sub[sub.select(K)])
        assert inside(space, sub[sub.select(K)], c[sub.chosen[sub[sub.select(K)]]])
    whole_cover = countable_k_subcover(space, CoverOracle(space, "K", lambda K: whole()))
    assert whole_cover.size() == 1


def test_countable_subcover_baire():
    B = BaireModel(id="b", batteries={"compact": [FinSet([Word([i, i + 1])]) for i in range(5)]})
    c = CoverOracle(B, "K", lambda K: OpenDesc(Cylinder(w) for w in K.points))
    sub = countable_k_subcover(B, c)
    assert sub.size() == 5


def test_selector_soundness_on_batteries(reg):
    from selgame.engine import adversary_cover
    for sid in ("discrete_n", "real_line", "real_line_2"):
        space = reg.get(sid)
        for cls in ("O", "Omega", "K"):
            c = adversary_cover(space, cls, 7, 0)
            for ch in battery_for(space, cls):
                assert inside(space, ch, c[c.select_checked(ch)])


def test_select_checked_reports_unsound():
    c = CoverOracle(R, "O", lambda ch: iv(100, 101))
    with pytest.raises(SelectorFailure):
        c.select_checked(point(Q(0)))


# -- saturation ------------------------------------------------------------

def test_t1_sat_is_identity(reg):
    for sid in ("discrete_n", "real_line", "baire"):
        space = reg.get(sid)
        pts = space.points(30)
        A = FinSet(pts[:5])
        for x in pts:
            assert space.in_sat(x, A) == (x in A.points)


@given(rats, st.integers(-10, 10))
def test_right_order_sat(x, n):
    ro = RightOrderModel(id="ro")
    assert ro.in_sat(x, FinSet([Q(n)])) == (x >= n)


def test_sums():
    U = OpenDesc([InjOpen(0, iv(0, 1))])
    S = SumSpace([R, OnePoint(id="pt")], id="sum")
    assert S.member(Inj(0, Q(1, 2)), U)
    assert not S.member(Inj(1, next(iter(OnePoint().points(1)))), U)


# -- registry --------------------------------------------------------------

def test_registry_round_trip_is_byte_stable(reg):
    from importlib import resources
    text = resources.files("selgame").joinpath("data", "registry.json").read_text(encoding="utf-8")
    assert reg.dumps() == text
    again = Registry(__import__("json").loads(text))
    assert again.dumps() == text


def test_registry_rows_sorted(reg):
    rows = reg.rows()
    assert [r["id"] for r in rows] == sorted(r["id"] for r in rows)
    kinds = {r["kind"] for r in rows}
    assert {"DiscreteN", "RealLineModel", "BaireModel", "FortissimoModel"} <= kinds
    fort = next(r for r in rows if r["kind"] == "FortissimoModel")
    assert "fidelity_caveat" in fort["flags"]


def test_registry_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"spaces": [}')
    with pytest.raises(RegistryError, match="line 1"):
        load_registry(str(bad))
    with pytest.raises(RegistryError):
        Registry({"spaces": [{"id": "x", "kind": "Nope"}]})
    with pytest.raises(RegistryError):
        Registry({"spaces": [{"id": "x", "kind": "DiscreteN"}, {"id": "x", "kind": "DiscreteN"}]})
    with pytest.raises(RegistryError):
        Registry({"nothing": 1})
    with pytest.raises(RegistryError):
        Registry({"spaces": []}).get("missing")
    assert dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'


def test_registry_env_override(tmp_path, monkeypatch):
    p = tmp_path / "r.json"
    p.write_text('{"spaces": [{"id": "n", "kind": "DiscreteN"}]}')
    monkeypatch.setenv("SELGAME_REGISTRY", str(p))
    assert load_registry().ids() == ["n"]


def test_registry_generator_is_stable(reg):
    import importlib.util
    import pathlib
    path = pathlib.Path(__file__).resolve().parents[1] / "tools" / "make_registry.py"
    spec = importlib.util.spec_from_file_location("make_registry", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert dumps(mod.build()) == reg.dumps()
