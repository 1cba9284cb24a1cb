"""Witness families for the hemicompactness zoo and their cofinality checks.

Every property here is a countable quantifier over all compact (or
relatively compact) sets, so nothing is decided: families are verified
against finite batteries, which can refute a claim but never prove it.
"""

from fractions import Fraction

from .topology.descriptors import FinSet, Closed, OpenDesc, Interval, STAR, union
from .topology.spaces import ModelLimitation, point
from .topology.covers import battery_for, finite_union_closure

__all__ = [
    "KINDS", "WitnessFamily", "WitnessError", "SatUnavailable", "CofinalityClaim",
    "Counterexample", "family_from_spec", "check_cofinality", "validate",
    "implication_chain", "regular_collapse", "markov_menger_relcover_bridge",
]

KINDS = (
    "TopologicallyCountable", "SigmaRelativelyCompact", "Hemicompact",
    "NearlyHemicompact", "RelativelyHemicompact", "WeaklyRelativelyHemicompact",
    "FiniteSets",
)


class WitnessError(ValueError):
    pass


class SatUnavailable(WitnessError):
    """The model has no saturation predicate for this kind of set."""


class WitnessFamily:
    """Indexed family n -> member; members are points, finite sets, compacts or relatively compact opens."""

    def __init__(self, kind, space, member, name="", finders=None):
        if kind not in KINDS:
            raise WitnessError("unknown witness kind %r" % (kind,))
        self.kind = kind
        self.space = space
        self._member = member
        self.name = name or kind
        self.finders = finders
        self._cache = {}

    def __repr__(self):
        return "<WitnessFamily %s %s on %s>" % (self.name, self.kind, self.space.id)

    def __getitem__(self, n):
        if n < 0:
            raise IndexError(n)
        m = self._cache.get(n)
        if m is None:
            m = self._member(n)
            self._cache[n] = m
        return m

    def prefix(self, n):
        return [self[i] for i in range(n)]

    def as_set(self, n):
        """Member n as a challenge (points become singletons)."""
        m = self[n]
        if self.kind == "TopologicallyCountable":
            return point(m)
        return m

    def retag(self, kind, name=None):
        return WitnessFamily(kind, self.space, self._member, name or self.name, self.finders)


def _alternating_integers(n):
    # 0, -1, 1, -2, 2, ...
    return Fraction(-(n + 1) // 2) if n % 2 else Fraction(n // 2)


def family_from_spec(space, spec, name=""):
    """Build a family from its registry description {kind, family, scale, center}."""
    kind = spec["kind"]
    fam = spec["family"]
    s = Fraction(spec.get("scale", 1))
    c = Fraction(spec.get("center", 0))
    if fam == "initial_segment":
        member = lambda n: FinSet(range(int(s * n) + 1))
    elif fam == "centered_interval":
        member = lambda n: Closed(c - s * n, c + s * n)
    elif fam == "open_interval":
        member = lambda n: OpenDesc([Interval(-s * n, s * n)])
    elif fam == "enumeration":
        member = lambda n: space.points(n + 1)[n]
    elif fam == "integers":
        member = lambda n: _alternating_integers(n)
    elif fam == "one_point":
        member = lambda n: FinSet([STAR]) if kind != "TopologicallyCountable" else STAR
    else:
        raise WitnessError("unknown family generator %r" % (fam,))
    return WitnessFamily(kind, space, member, name=name or fam)


# ---------------------------------------------------------------------------
# cofinality
# ---------------------------------------------------------------------------

class CofinalityClaim:
    """Verified claim: ``witness[i]`` is the family index that absorbs battery member i."""

    def __init__(self, family, battery, mode, witness):
        self.family, self.battery, self.mode, self.witness = family, battery, mode, witness
        self.ok = True

    def __repr__(self):
        return "<CofinalityClaim %s %d members>" % (self.mode, len(self.witness))


class Counterexample:
    def __init__(self, family, member, mode, bound):
        self.family, self.member, self.mode, self.bound = family, member, mode, bound
        self.ok = False

    def __repr__(self):
        return "<Counterexample %r (no index <= %d, %s)>" % (self.member, self.bound, self.mode)


def _absorbs(space, A, B, mode):
    if mode == "cof":
        return space.subset(B, A)
    if mode == "hatcof":
        try:
            return space.sat_contains(A, B)
        except ModelLimitation as exc:
            raise SatUnavailable(str(exc)) from None
    raise WitnessError("mode must be 'cof' or 'hatcof'")


def check_cofinality(w, battery, mode="cof", bound=64):
    """Find for each battery member an index n <= bound with B inside A_n (or inside sat(A_n))."""
    space = w.space
    found = []
    for B in battery:
        hit = None
        for n in range(bound + 1):
            if _absorbs(space, w.as_set(n), B, mode):
                hit = n
                break
        if hit is None:
            return Counterexample(w, B, mode, bound)
        found.append(hit)
    return CofinalityClaim(w, battery, mode, found)


def _target_battery(w):
    space = w.space
    if w.kind in ("TopologicallyCountable", "SigmaRelativelyCompact"):
        return [point(p) for p in space.battery("points")], ("hatcof" if w.kind == "TopologicallyCountable" else "cof")
    if w.kind == "FiniteSets":
        return space.battery("finite"), "hatcof"
    if w.kind == "NearlyHemicompact":
        return battery_for(space, "K"), "hatcof"
    if w.kind == "RelativelyHemicompact":
        return battery_for(space, "Krel"), "cof"
    return battery_for(space, "K"), "cof"


def validate(w, bound=64):
    """Battery validity of a family for its own kind; returns the claim or counterexample."""
    battery, mode = _target_battery(w)
    return check_cofinality(w, battery, mode, bound)


# ---------------------------------------------------------------------------
# implications
# ---------------------------------------------------------------------------

_CHAIN = {
    "Hemicompact": "WeaklyRelativelyHemicompact",
    "RelativelyHemicompact": "WeaklyRelativelyHemicompact",
    "WeaklyRelativelyHemicompact": "SigmaRelativelyCompact",
    "TopologicallyCountable": "NearlyHemicompact",
}


def implication_chain(w, bound=64):
    """Follow one edge of the implication chain and re-verify the result."""
    target = _CHAIN.get(w.kind)
    if target is None:
        raise WitnessError("no implication out of %s" % w.kind)
    if w.kind == "TopologicallyCountable":
        # finite prefixes of the point family
        out = WitnessFamily(target, w.space, lambda n: FinSet(w[k] for k in range(n + 1)),
                            name=w.name + "^prefix")
    else:
        out = w.retag(target)
    claim = validate(out, bound)
    if not claim.ok:
        raise WitnessError("%s fails %s validation at %r" % (out.name, target, claim.member))
    return out


def regular_collapse(w, closure=None, bound=64):
    """Trade relatively compact members for their compact closures in a regular model (and back)."""
    space = w.space
    if not space.flags.get("regular"):
        raise WitnessError("%s is not flagged regular" % space.id)
    close = closure or space.closure
    if w.kind == "RelativelyHemicompact":
        def member(n):
            m = w[n]
            if isinstance(m, OpenDesc):
                if not m.atoms:
                    return FinSet([])
                try:
                    return close(m)
                except ModelLimitation as exc:
                    raise WitnessError("closure unavailable: %s" % exc) from None
            return m
        out = WitnessFamily("Hemicompact", space, member, name=w.name + "^closure")
        out[1]   # a missing closure operator fails here rather than mid-game
    elif w.kind == "Hemicompact":
        out = w.retag("RelativelyHemicompact")
    else:
        raise WitnessError("regular collapse applies to (relatively) hemicompact families")
    claim = validate(out, bound)
    if not claim.ok:
        raise WitnessError("%s fails validation at %r" % (out.name, claim.member))
    return out


# ---------------------------------------------------------------------------
# relative compactness from Markov strategies
# ---------------------------------------------------------------------------

def markov_menger_relcover_bridge(sigma, probes, n):
    """Intersect, over finitely many open-cover probes, the union of sigma's round-n pick from each closure.

    ``sigma(cover, n)`` is a Markov finite-selection callable.  Returns the
    descriptor together with, per probe, the finite list of probe indices
    that covers it.
    """
    if not probes:
        raise WitnessError("at least one probe cover is needed")
    space = probes[0].space
    A = None
    certificates = []
    for c in probes:
        fin = finite_union_closure(c)
        picks = sigma(fin, n)
        U = union(fin[i] for i in picks)
        members = sorted({j for i in picks for j in fin.key(i)})
        certificates.append(members)
        A = U if A is None else space.intersect(A, U)
    for c, members in zip(probes, certificates):
        if A.atoms and not space.subset(A, union(c[j] for j in members)):
            raise WitnessError("bridge set is not covered by its own selection")
    return A, certificates
