"""Regenerate src/selgame/data/registry.json from a fixed seed.

The shipped file is the frozen output; rerunning this script must leave it
byte-identical.
"""

import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from selgame.topology.descriptors import (  # noqa: E402
    INF, STAR, Word, Tup, Inj, FinSet, Closed, CUnion, CProd, CInj, OpenDesc, Interval, Singleton,
)
from selgame.topology.registry import battery_tree, dumps  # noqa: E402
from selgame.topology.spaces import rationals  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "selgame" / "data" / "registry.json"


def rat(rng, lo, hi, dens=(1, 2, 3, 4, 8)):
    d = rng.choice(dens)
    return Fraction(rng.randrange(lo * d, hi * d + 1), d)


def closed(rng, lo, hi):
    a, b = sorted((rat(rng, lo, hi), rat(rng, lo, hi)))
    return Closed(a, b)


def finite_sets(rng, make, count, size=3):
    return [FinSet(make() for _ in range(rng.randrange(1, size + 1))) for _ in range(count)]


def entry(sid, kind, params=None, batteries=None, witnesses=None, flags=None):
    return {"id": sid, "kind": kind, "params": params or {},
            "batteries": battery_tree(batteries or {}),
            "witnesses": witnesses or {}, "flags": flags or {}}


def build():
    rng = random.Random("selgame-registry-v1")
    early_q = []
    for q in rationals():
        early_q.append(q)
        if len(early_q) >= 60:
            break
    spaces = []

    # points stay below 32 so a horizon-32 run of {0..n} can reach all of them
    pts = [p for p in sorted(rng.sample(range(40), 20)) if p < 32]
    fin = finite_sets(rng, lambda: rng.randrange(21), 20)
    spaces.append(entry("discrete_n", "DiscreteN", batteries={
        "points": pts, "finite": fin, "compact": fin[:12],
        "relcompact": [OpenDesc(Singleton(p) for p in s._key()) for s in fin[12:]],
    }, witnesses={
        "hemicompact": {"kind": "Hemicompact", "family": "initial_segment", "scale": 1},
        "enumeration": {"kind": "TopologicallyCountable", "family": "enumeration"},
    }))

    spaces.append(entry("real_line", "RealLineModel", batteries={
        "points": sorted({rat(rng, -10, 10) for _ in range(30)}),
        "finite": finite_sets(rng, lambda: rat(rng, -5, 5), 20),
        "compact": [closed(rng, -8, 8) for _ in range(20)] + finite_sets(rng, lambda: rat(rng, -8, 8), 4),
        "relcompact": [OpenDesc([Interval(c.lo, c.hi + 1)]) for c in (closed(rng, -8, 7) for _ in range(10))],
    }, witnesses={
        "hemicompact": {"kind": "Hemicompact", "family": "centered_interval", "scale": 1},
        "relhemicompact": {"kind": "RelativelyHemicompact", "family": "open_interval", "scale": 1},
        "sigma": {"kind": "SigmaRelativelyCompact", "family": "centered_interval", "scale": 1},
    }))

    qfin = finite_sets(rng, lambda: rng.choice(early_q), 20)
    spaces.append(entry("rational_line", "RationalLine", batteries={
        "points": sorted(set(rng.sample(early_q, 25))),
        "finite": qfin, "compact": qfin[:10],
    }, witnesses={
        "enumeration": {"kind": "TopologicallyCountable", "family": "enumeration"},
    }))

    def word():
        return Word(rng.randrange(4) for _ in range(rng.randrange(1, 5)))
    bfin = finite_sets(rng, word, 15)
    spaces.append(entry("baire", "BaireModel", batteries={
        "points": sorted({word() for _ in range(20)}), "finite": bfin, "compact": bfin[:8],
    }))

    def fort():
        return INF if rng.random() < 0.2 else rat(rng, -5, 5)
    ffin = finite_sets(rng, fort, 15)
    spaces.append(entry("fortissimo", "FortissimoModel", batteries={
        "points": [INF] + sorted({rat(rng, -5, 5) for _ in range(15)}),
        "finite": ffin, "compact": ffin[:8] + [FinSet([INF])],
    }))

    spaces.append(entry("right_order", "RightOrderModel", batteries={
        "points": sorted({rat(rng, -20, 20) for _ in range(300)})[:100],
        "finite": finite_sets(rng, lambda: rat(rng, -20, 20), 15),
        "compact": [closed(rng, -20, 20) for _ in range(15)],
    }, witnesses={
        "integers": {"kind": "TopologicallyCountable", "family": "integers"},
    }))

    spaces.append(entry("sorgenfrey", "SorgenfreyModel", batteries={
        "points": sorted({rat(rng, -5, 5) for _ in range(20)}),
        "finite": finite_sets(rng, lambda: rat(rng, -5, 5), 12),
    }))

    spaces.append(entry("one_point", "OnePoint", batteries={
        "points": [STAR], "finite": [FinSet([STAR])], "compact": [FinSet([STAR])],
    }, witnesses={
        "hemicompact": {"kind": "Hemicompact", "family": "one_point"},
    }))

    unit_pts = sorted({rat(rng, 0, 1, dens=(3, 5, 7, 8, 9)) for _ in range(12)} | {Fraction(0), Fraction(1)})
    spaces.append(entry("unit_interval", "RealLineModel", params={"lo": "0", "hi": "1"}, batteries={
        "points": unit_pts,
        "finite": finite_sets(rng, lambda: rng.choice(unit_pts), 10),
        "compact": [Closed(0, 1)] + [closed(rng, 0, 1) for _ in range(8)],
    }, witnesses={
        "hemicompact": {"kind": "Hemicompact", "family": "centered_interval", "scale": 1},
    }))

    fort_named = sorted({rat(rng, -3, 3) for _ in range(6)})
    chq_pts = [Inj(0, q) for q in unit_pts[:8]] + [Inj(1, INF)] + [Inj(1, q) for q in fort_named]
    spaces.append(entry("chq", "SumSpace", params={"summands": ["unit_interval", "fortissimo"]}, batteries={
        "points": chq_pts,
        "finite": finite_sets(rng, lambda: rng.choice(chq_pts), 10),
        "compact": [
            CInj(0, Closed(0, 1)),
            CInj(1, FinSet([INF])),
            CUnion([CInj(0, Closed(0, 1)), CInj(1, FinSet([INF]))]),
        ] + [CUnion([CInj(0, closed(rng, 0, 1)), CInj(1, FinSet([INF] + rng.sample(fort_named, 2)))])
             for _ in range(5)] + [CInj(1, FinSet([INF, q])) for q in fort_named[:3]],
    }))

    def pair(lo, hi):
        return Tup((rat(rng, lo, hi), rat(rng, lo, hi)))
    spaces.append(entry("real_line_2", "ProductSpace", params={"factors": ["real_line", "real_line"]}, batteries={
        "points": [pair(-5, 5) for _ in range(20)],
        "finite": finite_sets(rng, lambda: pair(-5, 5), 15),
        "compact": [CProd([closed(rng, -5, 5), closed(rng, -5, 5)]) for _ in range(50)],
    }))

    spaces.append(entry("real_line_3", "PowerSpace", params={"base": "real_line", "arity": 3}, batteries={
        "points": [Tup(rat(rng, -3, 3) for _ in range(3)) for _ in range(15)],
        "finite": finite_sets(rng, lambda: Tup(rat(rng, -3, 3) for _ in range(3)), 10),
        "compact": [CProd([closed(rng, -3, 3) for _ in range(3)]) for _ in range(15)],
    }))

    def dpair():
        return Tup((rng.randrange(6), rng.randrange(6)))

    def drect():
        return CProd([FinSet(rng.sample(range(6), rng.randrange(1, 4))),
                      FinSet(rng.sample(range(6), rng.randrange(1, 4)))])
    spaces.append(entry("discrete_n_2", "ProductSpace", params={"factors": ["discrete_n", "discrete_n"]}, batteries={
        "points": sorted({dpair() for _ in range(20)}),
        "finite": finite_sets(rng, dpair, 15),
        "compact": [drect() for _ in range(40)],
    }))

    spaces.append(entry("real_line_x_one", "ProductSpace", params={"factors": ["real_line", "one_point"]}, batteries={
        "points": [Tup((rat(rng, -5, 5), STAR)) for _ in range(10)],
        "finite": finite_sets(rng, lambda: Tup((rat(rng, -5, 5), STAR)), 8),
        "compact": [CProd([closed(rng, -5, 5), FinSet([STAR])]) for _ in range(12)],
    }))

    spaces.append(entry("discrete_n_x_one", "ProductSpace", params={"factors": ["discrete_n", "one_point"]}, batteries={
        "points": [Tup((p, STAR)) for p in sorted(rng.sample(range(20), 10))],
        "finite": finite_sets(rng, lambda: Tup((rng.randrange(20), STAR)), 8),
        "compact": [CProd([FinSet(rng.sample(range(8), rng.randrange(1, 4))), FinSet([STAR])])
                    for _ in range(12)],
    }))

    spaces.sort(key=lambda e: e["id"])
    return {"version": 1, "spaces": spaces}


def main():
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(dumps(build()), encoding="utf-8")
    print("wrote", OUT)


if __name__ == "__main__":
    main()
