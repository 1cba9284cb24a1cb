"""Strategies for k-cover games on binary products built from factor strategies.

The full-information constructions drive the two factor strategies on
hypothetical histories: every P1 cover of the product is refined to open
rectangles, then read as a family of covers of one factor indexed by
compact subsets of the other.  A pairing with increasing rows keeps the
bookkeeping consistent: row j of the pairing replays one X-game while the
finite sequence s_j names the earlier rounds whose Y-games it continues.
"""

from ..combinatorics import (
    build_pairing, range_constraint, split_range_constraint, empty_constraint,
    enum_finseq, enum_split_pairs,
)
from ..engine import (
    StrategyHandle, P2, FULL, MARKOV, strength_coercion, sub_context,
)
from ..topology.descriptors import CProd, whole, compact_tree
from ..topology.covers import CoverOracle, rectangle_refine
from ..topology.spaces import TypeMismatch, intersect

__all__ = [
    "product_k_rothberger", "product_k_menger",
    "markov_product_k_rothberger", "markov_product_k_menger",
    "BookkeepingError",
]


class BookkeepingError(RuntimeError):
    """An index the pairing promised would be in the past is not."""


def _factors(space):
    factors = getattr(space, "factors", None)
    if factors is None or len(factors) != 2:
        raise TypeMismatch("%s is not a binary product" % space.id)
    return factors


def _full(h):
    return strength_coercion(h, FULL)


def _slice_cover(Y, R, K, label):
    """Y-cover {pi_Y[W] : W in R, W containing K x L}, keyed by R's indices."""
    return CoverOracle(Y, "K", selector=lambda L: R.select(CProd([K, L])),
                       element=lambda r: R[r].factor(1), label=label)


class _Round:
    __slots__ = ("cover", "refined", "slices", "row", "col", "seq", "U", "picks",
                 "compact", "response", "finite", "fvec")

    def __init__(self, cover, refined):
        self.cover = cover
        self.refined = refined
        self.slices = {}
        self.picks = {}

    def slice(self, Y, K):
        v = self.slices.get(K)
        if v is None:
            v = _slice_cover(Y, self.refined, K, "%s|%r" % (self.cover.label, K))
            self.slices[K] = v
        return v


class _Replay:
    """Per-game state shared by the two full-information product strategies."""

    def __init__(self, ctx, pairing):
        self.ctx = ctx
        self.space = ctx.space
        self.X, self.Y = _factors(self.space)
        self.pf = pairing
        self.rounds = []

    def sync(self, history):
        # a history that disagrees with the stored prefix restarts the replay
        keep = 0
        while keep < min(len(self.rounds), len(history)) and self.rounds[keep].cover is history[keep]:
            keep += 1
        del self.rounds[keep:]
        for n in range(len(self.rounds), len(history)):
            self.rounds.append(self.step(n, history[n]))
        return self.rounds[-1].response

    def past(self, m, n):
        if m >= n:
            raise BookkeepingError("round %d refers to round %d" % (n, m))
        return self.rounds[m]


def product_k_rothberger(sx, sy, pairing=None, name="product_k_rothberger"):
    """Winning P2 strategy on X x Y from winning strategies on X and on Y (single selections)."""
    fx_h, fy_h = _full(sx), _full(sy)

    def factory(ctx):
        pf = pairing or build_pairing(range_constraint())
        game = _Replay(ctx, pf)
        X, Y = game.X, game.Y
        fx = fx_h.instantiate(sub_context(X, ctx.seed))
        fy = fy_h.instantiate(sub_context(Y, ctx.seed))

        def step(n, cover):
            j, k = pf.inverse(n)
            seq = enum_finseq(j)
            if any(l >= n for l in seq):
                raise BookkeepingError("round %d: range(s_%d) = %r reaches past the present" % (n, j, seq))
            rd = _Round(cover, rectangle_refine(game.space, cover))
            rd.row, rd.col, rd.seq = j, k, seq
            prefix = tuple(game.past(l, n).slice(Y, game.past(l, n).compact) for l in seq)

            def pick(K):
                r = rd.picks.get(K)
                if r is None:
                    v = rd.slice(Y, K)
                    r = v.key(fy(prefix + (v,)))
                    rd.picks[K] = r
                return r

            rd.U = CoverOracle(X, "K", selector=lambda K: K,
                               element=lambda K: rd.refined[pick(K)].factor(0),
                               label="U%d" % n)
            row = tuple(game.past(pf.beta(j, p), n).U for p in range(k)) + (rd.U,)
            rd.compact = rd.U.key(fx(row))
            r = pick(rd.compact)
            rd.response = rd.refined.parent_index(r)
            ctx.note(n, {"row": j, "col": k, "seq": list(seq), "compact": compact_tree(rd.compact),
                         "rectangle": r, "parent": rd.response})
            return rd

        game.step = step
        return game.sync

    return StrategyHandle(P2, FULL, "single", factory, name=name,
                          params={"x": sx.name, "y": sy.name})


def product_k_menger(sx, sy, pairing=None, name="product_k_menger"):
    """Winning P2 strategy on X x Y from winning strategies on X and on Y (finite selections)."""
    fx_h, fy_h = _full(sx), _full(sy)

    def factory(ctx):
        pf = pairing or build_pairing(split_range_constraint())
        game = _Replay(ctx, pf)
        X, Y = game.X, game.Y
        fx = fx_h.instantiate(sub_context(X, ctx.seed))
        fy = fy_h.instantiate(sub_context(Y, ctx.seed))

        def step(n, cover):
            j, k = pf.inverse(n)
            minus, plus = enum_split_pairs(j)
            if any(l >= n for l in minus):
                raise BookkeepingError("round %d: range(s_%d-) = %r reaches past the present" % (n, j, minus))
            rd = _Round(cover, rectangle_refine(game.space, cover))
            rd.row, rd.col, rd.seq = j, k, (minus, plus)
            prefix = []
            for l, u in zip(minus, plus):
                old = game.past(l, n)
                prefix.append(old.slice(Y, old.fvec(u)))
            prefix = tuple(prefix)

            def picks(K):
                rs = rd.picks.get(K)
                if rs is None:
                    v = rd.slice(Y, K)
                    rs = tuple(v.key(i) for i in fy(prefix + (v,)))
                    rd.picks[K] = rs
                return rs

            def core(K):
                U = None
                for r in picks(K):
                    P = rd.refined[r].factor(0)
                    U = P if U is None else intersect(U, P)
                return whole() if U is None else U

            rd.U = CoverOracle(X, "K", selector=lambda K: K, element=core, label="U%d" % n)
            row = tuple(game.past(pf.beta(j, p), n).U for p in range(k)) + (rd.U,)
            chosen = sorted(set(fx(row)))
            rd.finite = [rd.U.key(i) for i in chosen]
            if not rd.finite:
                raise BookkeepingError("round %d: the X strategy selected nothing" % n)

            def fvec(u):
                return rd.finite[u % len(rd.finite)]

            rd.fvec = fvec
            resp = []
            for K in rd.finite:
                for r in picks(K):
                    p = rd.refined.parent_index(r)
                    if p not in resp:
                        resp.append(p)
            rd.response = sorted(resp)
            ctx.note(n, {"row": j, "col": k, "minus": list(minus), "plus": list(plus),
                         "compacts": [compact_tree(K) for K in rd.finite], "parents": rd.response})
            return rd

        game.step = step
        return game.sync

    return StrategyHandle(P2, FULL, "finite", factory, name=name,
                          params={"x": sx.name, "y": sy.name})


def _markov(h):
    return strength_coercion(h, MARKOV)


def markov_product_k_rothberger(wx, wy, pairing=None, name="markov_product_k_rothberger"):
    """Markov strategy covering A_j x B_k at round beta(j, k), for nearly hemicompact factor families."""
    def factory(ctx):
        pf = pairing or build_pairing(empty_constraint())

        def sigma(cover, n):
            j, k = pf.inverse(n)
            R = rectangle_refine(ctx.space, cover)
            target = CProd([wx.as_set(j), wy.as_set(k)])
            r = R.select(target)
            ctx.note(n, {"row": j, "col": k, "target": compact_tree(target)})
            return R.parent_index(r)
        return sigma

    return StrategyHandle(P2, MARKOV, "single", factory, name=name,
                          params={"x": wx.name, "y": wy.name})


def markov_product_k_menger(sx, sy, pairing=None, name="markov_product_k_menger"):
    """Markov finite-selection strategy on X x Y from Markov strategies on the factors."""
    mx_h, my_h = _markov(sx), _markov(sy)

    def factory(ctx):
        pf = pairing or build_pairing(empty_constraint())
        X, Y = _factors(ctx.space)
        fx = mx_h.instantiate(sub_context(X, ctx.seed))
        fy = my_h.instantiate(sub_context(Y, ctx.seed))

        def sigma(cover, n):
            j, k = pf.inverse(n)
            R = rectangle_refine(ctx.space, cover)
            memo = {}

            def gamma(K):
                rs = memo.get(K)
                if rs is None:
                    v = _slice_cover(Y, R, K, "%s|%r" % (cover.label, K))
                    rs = tuple(v.key(i) for i in fy(v, k))
                    memo[K] = rs
                return rs

            def core(K):
                U = None
                for r in gamma(K):
                    P = R[r].factor(0)
                    U = P if U is None else intersect(U, P)
                return whole() if U is None else U

            WX = CoverOracle(X, "K", selector=lambda K: K, element=core, label="WX%d" % n)
            finite = [WX.key(i) for i in sorted(set(fx(WX, j)))]
            resp = []
            for K in finite:
                for r in gamma(K):
                    p = R.parent_index(r)
                    if p not in resp:
                        resp.append(p)
            ctx.note(n, {"row": j, "col": k, "compacts": [compact_tree(K) for K in finite]})
            return sorted(resp)
        return sigma

    return StrategyHandle(P2, MARKOV, "finite", factory, name=name,
                          params={"x": sx.name, "y": sy.name})
