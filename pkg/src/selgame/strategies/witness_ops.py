"""Conversions between witness families, and product families."""

from ..combinatorics import build_pairing
from ..topology.descriptors import FinSet, CProd, OpenDesc, Rect, Tup
from ..topology.covers import finite_subcover_product
from ..witnesses import (
    WitnessFamily, WitnessError, CofinalityClaim, Counterexample, validate, _target_battery, _absorbs,
)

__all__ = ["topctble_witness_conversions", "product_witnesses", "validate_grid", "check_relcompact"]

_SET_KINDS = ("SigmaRelativelyCompact", "Hemicompact", "NearlyHemicompact",
              "RelativelyHemicompact", "WeaklyRelativelyHemicompact")


def topctble_witness_conversions(w, bound=64):
    """Point enumeration <-> increasing finite sets, validated on the target battery.

    A point family {x_n} becomes F_n = {x_0, ..., x_n}; a family of finite
    sets becomes the enumeration of their union in order of appearance.
    """
    if w.kind == "TopologicallyCountable":
        out = WitnessFamily("FiniteSets", w.space, lambda n: FinSet(w[k] for k in range(n + 1)),
                            name=w.name + "^sets")
    elif w.kind == "FiniteSets":
        seen, order, src = set(), [], [0]

        def member(n):
            while len(order) <= n:
                fresh = [p for p in w[src[0]]._key() if p not in seen]
                seen.update(fresh)
                order.extend(fresh)
                src[0] += 1
                if src[0] > 100000:
                    raise WitnessError("the finite sets stop producing new points")
            return order[n]
        out = WitnessFamily("TopologicallyCountable", w.space, member, name=w.name + "^points")
    else:
        raise WitnessError("conversion applies to point or finite-set families, not %s" % w.kind)
    claim = validate(out, bound)
    if not claim.ok:
        raise WitnessError("%s fails validation at %r" % (out.name, claim.member))
    return out


def product_witnesses(wx, wy, space, pairing=None, bound=64, check=True):
    """Family on X x Y indexed through a pairing: member beta(j, k) pairs member j with member k."""
    pf = pairing or build_pairing()
    if wx.kind == "TopologicallyCountable" and wy.kind == "TopologicallyCountable":
        kind = "TopologicallyCountable"

        def member(n):
            j, k = pf.inverse(n)
            return Tup((wx[j], wy[k]))
    elif wx.kind in _SET_KINDS and wx.kind == wy.kind:
        kind = wx.kind

        def member(n):
            j, k = pf.inverse(n)
            a, b = wx[j], wy[k]
            if isinstance(a, OpenDesc) and isinstance(b, OpenDesc):
                return OpenDesc([Rect([a, b])])
            if isinstance(a, OpenDesc) or isinstance(b, OpenDesc):
                raise WitnessError("cannot pair an open member with a compact one")
            return CProd([a, b])
    else:
        raise WitnessError("no product rule for %s x %s" % (wx.kind, wy.kind))
    out = WitnessFamily(kind, space, member, name="%s*%s" % (wx.name, wy.name))
    out.pairing = pf
    if check:
        claim = validate_grid(out, pf, bound)
        if not claim.ok:
            raise WitnessError("%s fails validation at %r" % (out.name, claim.member))
    return out


def validate_grid(w, pf, bound=64):
    """Validation of a pairing-indexed family, searching pairs (j, k) with j, k <= bound.

    Pairing rows grow fast, so a flat index bound would only see a sliver
    of the grid.  Pairs are tried by increasing j + k; the claim records
    the flat index beta(j, k).
    """
    battery, mode = _target_battery(w)
    pairs = sorted(((j, k) for j in range(bound + 1) for k in range(bound + 1)),
                   key=lambda jk: (jk[0] + jk[1], jk[0]))
    found = []
    for B in battery:
        hit = next((pf.beta(j, k) for j, k in pairs
                    if _absorbs(w.space, w.as_set(pf.beta(j, k)), B, mode)), None)
        if hit is None:
            return Counterexample(w, B, mode, bound)
        found.append(hit)
    return CofinalityClaim(w, battery, mode, found)


def check_relcompact(space, A, cover, budget=10000):
    """Does a finite subfamily of ``cover`` contain the closure of the product member A?"""
    if isinstance(A, OpenDesc):
        A = space.closure(A)
    if not isinstance(A, CProd):
        raise WitnessError("expected a product member, got %r" % (A,))
    picked = finite_subcover_product(space, A.factors[0], A.factors[1], cover, budget)
    return bool(picked) and space.contains(A, OpenDesc([a for i in picked for a in cover[i].atoms]))
