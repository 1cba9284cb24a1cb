"""Unfolding omega-cover strategies into open-cover ones, and lifting through finite powers."""

from ..combinatorics import build_pairing
from ..engine import StrategyHandle, P2, FULL, MARKOV, strength_coercion, sub_context
from ..topology.descriptors import (
    FinSet, CProd, CUnion, OpenDesc, Rect, Singleton, STAR, union, point_tree,
)
from ..topology.covers import CoverOracle, SelectorFailure
from ..topology.spaces import PowerSpace, ModelLimitation, point

__all__ = [
    "GalvinExtractor", "ExtractorIncomplete", "discrete_extractor", "one_point_extractor",
    "unfold_omega_to_open_rothberger", "powers_to_omega_rothberger",
    "markov_omega_menger_from_src", "coordinate_union", "lift_to_power", "UnfoldState",
]


class ExtractorIncomplete(RuntimeError):
    """The extractor tables do not cover a history the unfolding reached."""


class GalvinExtractor:
    """Finite tables standing in for a choice of cores and covers.

    ``core(n, prefix)`` is the finite set of points to be covered in block n
    (prefix: the omega-covers fed to the inner strategy so far).
    ``realize(prefix, U)`` returns an omega-cover on which the inner strategy,
    after ``prefix``, picks exactly U.
    """

    def __init__(self, core, realize, name="extractor"):
        self._core = core
        self._realize = realize
        self.name = name

    def core(self, n, prefix):
        F = self._core(n, tuple(prefix))
        if F is None:
            raise ExtractorIncomplete("no core for block %d" % n)
        return list(F)

    def realize(self, prefix, U):
        W = self._realize(tuple(prefix), U)
        if W is None:
            raise ExtractorIncomplete("no cover realizing %r after %d steps" % (U, len(prefix)))
        return W


class UnfoldState:
    """Blocks of the unfolding: cores F_n, cumulative top indices M_n, recorded covers, points x_k.

    M_n is the index of the last point of block n, so M_(n+1) = M_n + #F_(n+1)
    and block n+1 lists x_(M_n + 1), ..., x_(M_(n+1)).
    """

    def __init__(self):
        self.cores, self.tops, self.covers, self.xs = [], [], [], []

    @property
    def top(self):
        return self.tops[-1] if self.tops else -1

    def start(self, n):
        return self.tops[n - 1] + 1 if n else 0

    def open_block(self, F):
        F = list(F)
        self.cores.append(F)
        self.xs.extend(F)
        self.tops.append(self.top + len(F))
        self.check()

    def check(self):
        prev = -1
        for n, F in enumerate(self.cores):
            if self.tops[n] != prev + len(F):
                raise AssertionError("block %d: M = %d, expected %d" % (n, self.tops[n], prev + len(F)))
            if self.xs[prev + 1:self.tops[n] + 1] != F:
                raise AssertionError("block %d is not enumerated in order" % n)
            prev = self.tops[n]
        return True


def discrete_extractor(space):
    """Cores {n}; the realized cover answers F with F together with U."""
    def realize(prefix, U):
        return CoverOracle(space, "Omega",
                           selector=lambda F: union([OpenDesc(Singleton(p) for p in F._key()), U]),
                           label="W%d" % len(prefix))
    return GalvinExtractor(lambda n, prefix: [n], realize, name="discrete")


def one_point_extractor(space):
    def realize(prefix, U):
        return CoverOracle(space, "Omega", selector=lambda F: U, label="W%d" % len(prefix))
    return GalvinExtractor(lambda n, prefix: [STAR], realize, name="one_point")


def unfold_omega_to_open_rothberger(sigma0, extractor, probe_extra=32, max_empty=1000):
    """Open-cover Rothberger strategy from an omega-cover one, driven block by block.

    Block n lists its core F_n = {x_{M_(n-1)+1}, ..., x_{M_n}}; round k picks
    the element holding x_k.  When a block closes, the union U of its picks
    is turned into an omega-cover on which sigma0 picks U, and that cover
    extends sigma0's history.
    """
    inner_h = strength_coercion(sigma0, FULL)

    def factory(ctx):
        space = ctx.space
        inner = inner_h.instantiate(sub_context(space, ctx.seed))
        probes = space.probe_points(probe_extra)
        st = {}

        def reset():
            st.update(state=UnfoldState(), picks=[])

        def open_block():
            state = st["state"]
            state.open_block(extractor.core(len(state.cores), state.covers))

        def close_block():
            state = st["state"]
            b = len(state.cores) - 1
            U = union(st["picks"][state.start(b):state.top + 1])
            W = extractor.realize(state.covers, U)
            i = inner(tuple(state.covers) + (W,))
            got = W[i]
            core = state.cores[b]
            pts = list(probes) + [x for x in core if x not in probes]
            if not all(got.member(p) == U.member(p) for p in pts):
                raise ExtractorIncomplete("block %d: inner pick differs from the union" % b)
            state.covers.append(W)

        reset()

        def sigma(history):
            k = len(history) - 1
            if k == 0:
                reset()
            state = st["state"]
            empty = 0
            while k > state.top:
                if state.cores:
                    close_block()
                before = state.top
                open_block()
                if state.top == before:
                    empty += 1
                    if empty > max_empty:
                        raise ExtractorIncomplete("cores stay empty")
            x = state.xs[k]
            i = history[k].select_checked(point(x))
            st["picks"].append(history[k][i])
            b = len(state.cores) - 1
            ctx.note(k, {"block": b, "M": state.top, "M_prev": state.start(b) - 1,
                         "core_size": len(state.cores[b]), "x": point_tree(x)})
            return i
        return sigma

    return StrategyHandle(P2, FULL, "single", factory, name="unfold[%s]" % extractor.name,
                          params={"inner": sigma0.name})


def coordinate_union(E):
    """Union of the coordinate projections of a compact subset of a power."""
    if isinstance(E, FinSet):
        return FinSet(x for p in E.points for x in p)
    if isinstance(E, CProd):
        facs = _dedupe(E.factors)
        if all(isinstance(f, FinSet) for f in facs):
            return FinSet(x for f in facs for x in f.points)
        return facs[0] if len(facs) == 1 else CUnion(facs)
    if isinstance(E, CUnion):
        parts = _dedupe(coordinate_union(p) for p in E.parts)
        return parts[0] if len(parts) == 1 else CUnion(parts)
    raise ModelLimitation("no coordinate union for %r" % (E,))


def _dedupe(xs):
    out = []
    for x in xs:
        if x not in out:
            out.append(x)
    return out


def lift_to_power(cover, power):
    """Cover of the power {U^(m+1) : U in cover}, keyed by the base index."""
    m1 = power.arity
    return CoverOracle(power, "K",
                       selector=lambda E: cover.select(coordinate_union(E)),
                       element=lambda i: OpenDesc([Rect([cover[i]] * m1)]),
                       label="%s^%d" % (cover.label, m1))


def powers_to_omega_rothberger(sigma_for_power, base=None, pairing=None, max_arity=64):
    """Omega-Rothberger strategy on X from k-Rothberger strategies on the powers X^(m+1).

    Round beta(m, k) plays the power strategy for m on row m of the pairing,
    each earlier cover lifted to the power; the lifted pick is the base index.
    """
    def factory(ctx):
        space = base or ctx.space
        pf = pairing or build_pairing()
        powers, strategies, lifted = {}, {}, {}

        def power_strategy(m):
            if m not in strategies:
                if m + 1 > max_arity:
                    raise ModelLimitation("power %d beyond the supported arity" % (m + 1))
                P = PowerSpace(space, m + 1, id="%s^%d" % (space.id, m + 1),
                               batteries={}, flags=dict(space.flags))
                powers[m] = P
                strategies[m] = strength_coercion(sigma_for_power(m, P), FULL).instantiate(sub_context(P, ctx.seed))
            return strategies[m]

        def lift(n, cover, m):
            key = (n, m)
            hit = lifted.get(key)
            if hit is None or hit[0] is not cover:
                hit = (cover, lift_to_power(cover, powers[m]))
                lifted[key] = hit
            return hit[1]

        def sigma(history):
            n = len(history) - 1
            m, k = pf.inverse(n)
            f = power_strategy(m)
            row = tuple(lift(pf.beta(m, l), history[pf.beta(m, l)], m) for l in range(k + 1))
            i = f(row)
            ctx.note(n, {"power": m + 1, "col": k})
            return row[-1].key(i)
        return sigma

    return StrategyHandle(P2, FULL, "single", factory, name="powers_to_omega")


def markov_omega_menger_from_src(member, base=None, budget=64):
    """Markov omega-Menger strategy from sigma-relatively-compact families on every power.

    ``member(j, l)`` is the l-th set of the family on X^(j+1).  Round n covers
    A_{j,l} for all j, l <= n with finitely many base elements.  Sets with
    the same coordinate union are treated once.
    """
    def factory(ctx):
        space = base or ctx.space

        def sigma(cover, n):
            picks, seen = [], set()
            for j in range(n + 1):
                for l in range(n + 1):
                    A = member(j, l)
                    C = coordinate_union(A) if isinstance(A, (FinSet, CProd, CUnion)) else A
                    if C in seen:
                        continue
                    seen.add(C)
                    for i in _finite_pick(space, cover, C, budget):
                        if i not in picks:
                            picks.append(i)
            ctx.note(n, {"challenges": len(seen), "picked": len(picks)})
            return picks
        return sigma

    return StrategyHandle(P2, MARKOV, "finite", factory, name="omega_menger_from_src")


def _finite_pick(space, cover, C, budget):
    # one element when the cover accepts C whole, else a finite subcover
    try:
        i = cover.select(C)
        if space.subset(C, cover[i]):
            return [i]
    except (SelectorFailure, ModelLimitation, TypeError):
        pass
    pieces = space.finite_subcover(C, cover, budget)
    if not pieces:
        raise ModelLimitation("no finite subcover of %r" % (C,))
    return pieces
