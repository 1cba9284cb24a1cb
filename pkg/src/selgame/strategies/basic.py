"""Markov strategies read off witness families, and two ways to refute them."""

from ..engine import StrategyHandle, P2, MARKOV, FULL, sub_context
from ..topology.descriptors import FinSet
from ..topology.covers import CoverOracle, SelectorFailure
from ..topology.spaces import ModelLimitation

__all__ = [
    "markov_from_cofinality", "markov_falsifier", "excluding_cover",
    "galvin_defeating_cover", "FalsifierImpossible", "WitnessMissing",
    "extensionally_equal",
]


class FalsifierImpossible(RuntimeError):
    """The strategy under attack already covers the point meant to escape it."""


class WitnessMissing(ValueError):
    """No usable neighborhood outside the strategy's range."""


def markov_from_cofinality(w, arity="single", name=None):
    """P2 Markov strategy: at round n pick the element of the current cover holding member n.

    A family that is cofinal in the challenge class makes this strategy
    winning: every challenge sits inside some member, and that member is
    covered at its own round.
    """
    def factory(ctx):
        def sigma(cover, n):
            i = cover.select_checked(w.as_set(n))
            return i if arity == "single" else [i]
        return sigma
    return StrategyHandle(P2, MARKOV, arity, factory,
                          name=name or "markov[%s]" % w.name, params={"family": w.name})


def excluding_cover(space, x, cls="K", max_level=40, label=None):
    """Cover whose element for a challenge is a tight neighborhood missing x, when one exists."""
    def selector(ch):
        for level in range(max_level):
            U, _ = space.nbhd(ch, level)
            if not U.member(x):
                return U
        U, _ = space.nbhd(ch, 0)
        return U
    return CoverOracle(space, cls, selector, label=label or "avoid[%r]" % (x,))


def markov_falsifier(sigma, space, bad, xs, horizon, cls="K", cover_builder=None, seed=0):
    """P1 moves defeating a Markov strategy that ignores the compact ``bad``.

    ``xs[n]`` is a point of ``bad``.  Round n's cover is built around x_n; if
    sigma's choice there still contains x_n, the attack cannot work and
    FalsifierImpossible is raised.  Returns the list of cover moves.
    """
    build = cover_builder or (lambda x, n: excluding_cover(space, x, cls, label="avoid%d" % n))
    strategy = sigma.instantiate(sub_context(space, seed))
    moves = []
    for n in range(horizon):
        x = xs[n]
        if not space.in_set(x, bad):
            raise ValueError("x_%d = %r is not in the bad set" % (n, x))
        cover = build(x, n)
        if sigma.strength == MARKOV:
            resp = strategy(cover, n)
        elif sigma.strength == FULL:
            resp = strategy(tuple(moves) + (cover,))
        else:
            raise ValueError("the falsifier attacks Markov or full-information strategies")
        idxs = [resp] if sigma.arity == "single" else list(resp)
        for i in idxs:
            if cover[i].member(x):
                raise FalsifierImpossible("round %d: the choice already contains %r" % (n, x))
        moves.append(cover)
    return moves


def extensionally_equal(space, U, V, probes):
    """Equal as descriptors, or agreeing on every probe point."""
    if U == V:
        return True
    return all(U.member(p) == V.member(p) for p in probes)


def galvin_defeating_cover(space, phi, family, battery, witnesses=None, cls="Omega", max_level=12):
    """Cover made of one neighborhood per challenge, each outside the range of phi.

    ``phi`` maps a list of open sets to one of them; its range is tabulated
    over the finite ``family`` of element lists.  ``witnesses`` may fix the
    neighborhood of a challenge; otherwise tight neighborhoods are tried.
    Returns (cover, elements).  Any value phi could take lies outside the
    cover, which is checked on probe points.
    """
    probes = list(space.probe_points(32))
    for ch in battery:
        if isinstance(ch, FinSet):
            probes.extend(p for p in ch.points if p not in probes)
    table = [phi(list(f)) for f in family]

    def in_range(U):
        return any(extensionally_equal(space, U, v, probes) for v in table)

    chosen = []
    for ch in battery:
        cands = []
        if witnesses and ch in witnesses:
            cands.append(witnesses[ch])
        else:
            for level in range(max_level):
                try:
                    U, _ = space.nbhd(ch, level)
                except ModelLimitation:
                    break
                if U not in cands:
                    cands.append(U)
        U = next((c for c in cands if space.subset(ch, c) and not in_range(c)), None)
        if U is None:
            raise WitnessMissing("every neighborhood tried for %r lies in the range of phi" % (ch,))
        chosen.append((ch, U))

    def selector(ch):
        for A, U in chosen:
            if A == ch or space.subset(ch, U):
                return U
        raise SelectorFailure("challenge %r is outside the defeating cover" % (ch,))

    cover = CoverOracle(space, cls, selector, label="defeat")
    for _, U in chosen:
        cover.index_of(U)
    elements = [cover[i] for i in range(cover.size())]
    for v in table:
        if any(extensionally_equal(space, v, U, probes) for U in elements):
            raise AssertionError("a value of phi landed in the defeating cover")
    return cover, elements
