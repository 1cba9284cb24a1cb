"""Worked examples: bounded play on Baire space, and the two compact/finite-open games
on the sum of the unit interval with the Fortissimo space.
"""

import random
from fractions import Fraction

from ..combinatorics import enum_finseq, finseq_index
from ..engine import StrategyHandle, P1, P2, FULL, MARKOV, PREDETERMINED
from ..topology.descriptors import (
    INF, Word, Inj, FinSet, Closed, CUnion, CInj, OpenDesc, Interval, Cylinder, CofComp,
    InjOpen, whole, point_tree,
)
from ..topology.covers import CoverOracle

__all__ = [
    "BoundViolation", "ParseError", "baire_cover", "baire_p1", "bounded_random_p2",
    "baire_adversary", "baire_escape", "chq_initial_compact", "chq_named_points", "chq_p1_compact_open",
    "chq_p2_adversary", "chq_p2_finite_open", "chq_p1_finite", "chq_measure_ledger",
]


class BoundViolation(ValueError):
    """P2 selected more cylinders in a round than the bound allows."""


class ParseError(ValueError):
    """An open set of the sum does not have the shape the CHQ strategies read."""


# ---------------------------------------------------------------------------
# Baire space
# ---------------------------------------------------------------------------

def baire_cover(space, label="cylinders"):
    """All basic cylinders [t], t nonempty, indexed in the canonical word order."""
    def selector(ch):
        (w,) = ch.points
        if not w:
            raise ValueError("the empty word names no point")
        return Word(w)
    return CoverOracle(space, "O", selector,
                       element=lambda t: OpenDesc([Cylinder(t)]),
                       stream=lambda i: Word(enum_finseq(i + 1)),
                       locate=lambda t: finseq_index(t) - 1,
                       label=label)


def baire_p1():
    def factory(ctx):
        return lambda n: baire_cover(ctx.space, "cyl%d" % n)
    return StrategyHandle(P1, PREDETERMINED, "single", factory, name="baire_cylinders")


def bounded_random_p2(seed, bound=4, pool=120):
    """Markov P2 picking at most ``bound`` cylinders per round, seeded."""
    def factory(ctx):
        def sigma(cover, n):
            rng = random.Random("baire:%d:%d" % (seed, n))
            return sorted(rng.sample(range(pool), rng.randint(1, bound)))
        return sigma
    return StrategyHandle(P2, MARKOV, "finite", factory, name="bounded(%d,b=%d)" % (seed, bound))


def baire_adversary(bound=4):
    """P1 playing all cylinders every round, and the escape read off a finished transcript."""
    if bound is None:
        raise BoundViolation("the escape needs a per-round bound on P2's selections")

    def escape(t):
        per = [[el.atoms[0].t for _, el in r["p2_elements"]] for r in t.rounds]
        return baire_escape(per, bound, len(t.rounds))
    return baire_p1(), escape


def baire_escape(selections, bound, horizon):
    """A point outside every selected cylinder, given at most ``bound`` picks per round.

    ``selections`` lists, per round, the words of the picked cylinders.  The
    escape is built digit by digit: at length i+1 it takes the least digit
    avoiding every selected word of that length, which finitely many picks
    can never exhaust.
    """
    words = []
    for n, picks in enumerate(selections):
        if len(picks) > bound:
            raise BoundViolation("round %d selected %d cylinders (bound %d)" % (n, len(picks), bound))
        words.extend(Word(t) for t in picks)
    length = max([horizon] + [len(t) for t in words])
    by_len = {}
    for t in words:
        by_len.setdefault(len(t), set()).add(t)
    f = []
    for i in range(length):
        blocked = {t[i] for t in by_len.get(i + 1, ()) if tuple(t[:i]) == tuple(f)}
        d = 0
        while d in blocked:
            d += 1
        f.append(d)
    f = Word(f)
    for t in words:
        if f[:len(t)] == t:
            raise AssertionError("escape %r lies in [%r]" % (f, t))
    return f


# ---------------------------------------------------------------------------
# the unit interval plus the Fortissimo space
# ---------------------------------------------------------------------------

def chq_initial_compact(named=()):
    return CUnion([CInj(0, Closed(0, 1)), CInj(1, FinSet([INF] + list(named)))])


def chq_named_points(space, U):
    """The finitely many Fortissimo points an open set containing infinity leaves out, sorted."""
    part = space.part(U, 1)
    if part.is_whole():
        return []
    cof = [a for a in part.atoms if isinstance(a, CofComp)]
    if not cof:
        raise ParseError("open set %r misses the point at infinity" % (U,))
    left = set(cof[0].excluded)
    for a in cof[1:]:
        left &= a.excluded
    return sorted(p for p in left if not part.member(p))


def _fortissimo_part(K):
    pts = set()
    if isinstance(K, CUnion):
        for p in K.parts:
            pts |= _fortissimo_part(p)
    elif isinstance(K, CInj) and K.i == 1:
        pts |= set(K.inner.points)
    elif isinstance(K, FinSet):
        pts |= {p.p for p in K.points if p.i == 1}
    return pts


def chq_p1_compact_open():
    """P1 in the compact-open game: [0,1] with infinity, plus a triangle of named points.

    At round n it adds x_{j,k}, the k-th point named by P2's answer j, for
    all j, k < n.  Every finite set of Fortissimo points P2 ever names is
    eventually absorbed.
    """
    def factory(ctx):
        def f(history):
            n = len(history)
            names = [chq_named_points(ctx.space, U) for U in history]
            added = []
            for j in range(n):
                for k in range(min(n, len(names[j]))):
                    if names[j][k] not in added:
                        added.append(names[j][k])
            K = chq_initial_compact(sorted(added))
            ctx.note(n, {"named": [point_tree(p) for p in (names[-1] if names else [])],
                         "absorbed": [point_tree(p) for p in sorted(added)]})
            return K
        return f
    return StrategyHandle(P1, FULL, "single", factory, name="chq_compact_open")


def chq_p2_adversary(seed, extras=2):
    """Markov P2 naming battery points outside P1's set, plus a few seeded rationals."""
    def factory(ctx):
        battery = sorted(p.p for p in ctx.space.battery("points")
                         if isinstance(p, Inj) and p.i == 1 and p.p is not INF)

        def sigma(K, n):
            inside = _fortissimo_part(K)
            rng = random.Random("chq:%d:%d" % (seed, n))
            named = [q for q in battery if q not in inside]
            for _ in range(extras):
                q = Fraction(rng.randrange(-400, 400), rng.choice((3, 5, 7)))
                if q not in inside and q not in named:
                    named.append(q)
            return OpenDesc([InjOpen(0, whole()), InjOpen(1, OpenDesc([CofComp(named)]))])
        return sigma
    return StrategyHandle(P2, MARKOV, "single", factory, name="chq_adversary(%d)" % seed)


def chq_p2_finite_open():
    """P2 in the finite-open game: the whole Fortissimo summand, tiny intervals on [0,1].

    Round n covers the m interval points P1 named with intervals of radius
    r = 1/(2^(n+4) m), total length at most 1/2^(n+3); the lengths sum to
    less than 1/2, so [0,1] is never covered.
    """
    def factory(ctx):
        total = [Fraction(0)]

        def sigma(F, n):
            xs = sorted(p.p for p in F.points if p.i == 0)
            parts = [InjOpen(1, whole())]
            length = Fraction(0)
            if xs:
                r = Fraction(1, 2 ** (n + 4) * len(xs))
                parts.append(InjOpen(0, OpenDesc(Interval(x - r, x + r) for x in xs)))
                length = 2 * r * len(xs)
            total[0] = total[0] + length if n else length
            ctx.note(n, {"length": str(length), "round_bound": str(Fraction(1, 2 ** (n + 2))),
                         "cumulative": str(total[0])})
            return OpenDesc(parts)
        return sigma
    return StrategyHandle(P2, MARKOV, "single", factory, name="chq_finite_open")


def chq_p1_finite(seed, extras=2):
    """Predetermined P1 naming the battery points first, then seeded rationals of [0,1]."""
    def factory(ctx):
        pts = list(ctx.space.battery("points"))

        def f(n):
            rng = random.Random("chqfin:%d:%d" % (seed, n))
            chunk = pts[3 * n:3 * n + 3]
            rest = [Inj(0, Fraction(rng.randrange(0, 1000), 1000)) for _ in range(extras)]
            return FinSet(chunk + rest + [Inj(1, INF)])
        return f
    return StrategyHandle(P1, PREDETERMINED, "single", factory, name="chq_finite(%d)" % seed)


def chq_measure_ledger(opens):
    """Exact per-round interval length on [0,1] and the running total.

    Returns a list of (length, round_bound, cumulative) Fractions; the
    lengths are summed without merging overlaps, an upper bound on measure.
    """
    out, total = [], Fraction(0)
    for n, U in enumerate(opens):
        length = Fraction(0)
        for a in U.atoms:
            if isinstance(a, InjOpen) and a.i == 0:
                for lo, lc, hi, hc in a.inner.intervals():
                    if lo is None or hi is None:
                        length = None
                        break
                    length += hi - lo
            if length is None:
                break
        if length is None:
            raise ParseError("round %d uses an unbounded interval" % n)
        total += length
        out.append((length, Fraction(1, 2 ** (n + 2)), total))
    return out
