"""Effectively presented spaces.

Each model decides point membership in its open descriptors, containment of
compact (or relatively compact) descriptors in open ones, and the saturation
predicate ``x in sat(A)``.  Models also supply the constructive pieces the
strategies lean on: finite subcovers of compact challenges, shrinking
neighborhoods for the Wallace step, and sample points for slice sweeps.
"""

import itertools
from fractions import Fraction
from math import gcd

from .descriptors import (
    INF, STAR, Word, Tup, Inj, rat,
    Whole, Singleton, Interval, Ray, HalfOpen, Cylinder, CofComp, Rect, InjOpen,
    OpenDesc, FinSet, Closed, CUnion, CProd, CInj, whole,
    challenge_points,
)

__all__ = [
    "TypeMismatch", "ModelLimitation", "SpaceModel",
    "DiscreteN", "RationalLine", "RealLineModel", "BaireModel", "FortissimoModel",
    "RightOrderModel", "SorgenfreyModel", "OnePoint", "SumSpace", "ProductSpace",
    "PowerSpace", "point", "covers_interval", "rationals",
]


class TypeMismatch(TypeError):
    """A point or descriptor does not belong to the space it was used with."""


class ModelLimitation(RuntimeError):
    """The descriptor algebra of a model cannot carry out a requested step."""


def point(p):
    """A point as a singleton challenge."""
    return FinSet([p])


class _Extreme:
    __slots__ = ("sign",)

    def __init__(self, sign):
        self.sign = sign

    def __lt__(self, other):
        return self.sign < 0 and other is not self

    def __gt__(self, other):
        return self.sign > 0 and other is not self

    def __le__(self, other):
        return self.sign < 0 or other is self

    def __ge__(self, other):
        return self.sign > 0 or other is self

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash(self.sign)

    def __repr__(self):
        return "-oo" if self.sign < 0 else "+oo"


NEG, POS = _Extreme(-1), _Extreme(1)


def _norm(ivs):
    return [(NEG if lo is None else lo, lc, POS if hi is None else hi, hc) for lo, lc, hi, hc in ivs]


def _holds(iv, x):
    lo, lc, hi, hc = iv
    return (lo < x or (lo == x and lc)) and (x < hi or (x == hi and hc))


def components(ivs):
    """Merge intervals into disjoint maximal pieces, sorted left to right."""
    ivs = sorted(_norm(ivs), key=lambda iv: (iv[0], not iv[1]))
    out = []
    for lo, lc, hi, hc in ivs:
        if lo > hi or (lo == hi and not (lc and hc)):
            continue
        if out:
            plo, plc, phi, phc = out[-1]
            if lo < phi or (lo == phi and (phc or lc)):
                if hi > phi or (hi == phi and hc):
                    out[-1] = (plo, plc, hi, hc or (hi == phi and phc))
                continue
        out.append((lo, lc, hi, hc))
    return out


def _piece_holds(piece, lo, lc, hi, hc):
    plo, plc, phi, phc = piece
    left = plo < lo or (plo == lo and (plc or not lc))
    right = hi < phi or (hi == phi and (phc or not hc))
    return left and right


def covers_interval(ivs, a, a_closed, b, b_closed):
    """Is the interval <a, b> (ends given by flags, None infinite) inside the union of ``ivs``?"""
    a = NEG if a is None else a
    b = POS if b is None else b
    if a > b or (a == b and not (a_closed and b_closed)):
        return True
    norm = _norm(ivs)
    if any(_piece_holds(p, a, a_closed, b, b_closed) for p in norm):
        return True
    if len(norm) < 2:
        return False
    return any(_piece_holds(p, a, a_closed, b, b_closed) for p in components(ivs))


def _reach(ivs, x):
    """Right end (value, closed) of the piece of the union that contains x."""
    for lo, lc, hi, hc in components(ivs):
        if _holds((lo, lc, hi, hc), x):
            return hi, hc
    return x, False


def rationals():
    """0, 1, -1, 1/2, -1/2, 2, -2, ... (each rational exactly once)."""
    yield Fraction(0)
    s = 2
    while True:
        for q in range(1, s):
            p = s - q
            if gcd(p, q) == 1:
                yield Fraction(p, q)
                yield Fraction(-p, q)
        s += 1


class SpaceModel:
    """Base class; subclasses fill in the kind-specific parts."""

    kind = "space"
    default_flags = {}

    def __init__(self, id=None, params=None, batteries=None, witnesses=None, flags=None):
        self.id = id or self.kind
        self.params = dict(params or {})
        self.batteries = dict(batteries or {})
        self.witness_specs = dict(witnesses or {})
        f = dict(self.default_flags)
        f.update(flags or {})
        self.flags = f
        self._point_cache = []
        self._point_iter = None

    def __repr__(self):
        return "<%s %s>" % (self.kind, self.id)

    # -- typing -------------------------------------------------------------
    def is_point(self, p):
        raise NotImplementedError

    def check_point(self, p):
        if not self.is_point(p):
            raise TypeMismatch("%r is not a point of %s" % (p, self.id))

    def atom_ok(self, a):
        return isinstance(a, Whole)

    def check_open(self, U):
        if not isinstance(U, OpenDesc):
            raise TypeMismatch("%r is not an open descriptor" % (U,))
        for a in U.atoms:
            if not self.atom_ok(a):
                raise TypeMismatch("atom %r is not open in %s" % (a, self.id))

    def compact_ok(self, K):
        return isinstance(K, FinSet) and all(self.is_point(p) for p in K.points)

    def check_compact(self, K):
        if not self.compact_ok(K):
            raise TypeMismatch("%r is not a compact descriptor of %s" % (K, self.id))

    # -- decisions ----------------------------------------------------------
    def member(self, p, U):
        self.check_point(p)
        self.check_open(U)
        return U.member(p)

    def contains(self, K, U):
        """Is the compact descriptor K inside the open descriptor U?"""
        self.check_compact(K)
        self.check_open(U)
        return self._contains(K, U)

    def _contains(self, K, U):
        if U.is_whole():
            return True
        if isinstance(K, FinSet):
            return all(U.member(p) for p in K.points)
        raise TypeMismatch("cannot decide containment of %r" % (K,))

    def subset(self, B, A):
        """B inside A, where each of B, A is a compact or an open descriptor."""
        if isinstance(A, OpenDesc) and not isinstance(B, OpenDesc):
            return self.contains(B, A)
        return self._subset(B, A)

    def _subset(self, B, A):
        if isinstance(B, FinSet):
            return all(self.in_set(p, A) for p in B.points)
        raise ModelLimitation("%s cannot compare %r with %r" % (self.id, B, A))

    def in_set(self, p, A):
        if isinstance(A, OpenDesc):
            return A.member(p)
        return self._in_compact(p, A)

    def _in_compact(self, p, K):
        if isinstance(K, FinSet):
            return p in K.points
        if isinstance(K, CUnion):
            return any(self._in_compact(p, part) for part in K.parts)
        raise ModelLimitation("membership in %r" % (K,))

    # -- saturation ---------------------------------------------------------
    def specializes(self, x, a):
        """x in sat({a}); in T1 models this is equality."""
        return x == a

    def in_sat(self, x, A):
        """x in the intersection of all open neighborhoods of A."""
        if isinstance(A, FinSet):
            return any(self.specializes(x, a) for a in A.points)
        if self.flags.get("T1"):
            return self.in_set(x, A)
        raise ModelLimitation("sat of %r in %s" % (A, self.id))

    def sat_contains(self, A, B):
        """B inside sat(A)."""
        if self.flags.get("T1"):
            return self.subset(B, A)
        if isinstance(B, FinSet):
            return all(self.in_sat(x, A) for x in B.points)
        raise ModelLimitation("sat containment of %r in %s" % (B, self.id))

    # -- enumerations -------------------------------------------------------
    def _point_stream(self):
        raise NotImplementedError

    def points(self, n):
        """First n points of the point enumerator."""
        if self._point_iter is None:
            self._point_iter = self._point_stream()
        while len(self._point_cache) < n:
            try:
                self._point_cache.append(next(self._point_iter))
            except StopIteration:
                break
        return list(self._point_cache[:n])

    def basis(self, n):
        raise ModelLimitation("%s has no basis enumerator" % self.id)

    def battery(self, name):
        return list(self.batteries.get(name, []))

    def probe_points(self, extra=0):
        seen, out = set(), []
        for p in self.batteries.get("points", []):
            if p not in seen:
                seen.add(p)
                out.append(p)
        for name in ("finite", "compact", "relcompact"):
            for ch in self.batteries.get(name, []):
                pts = challenge_points(ch) if not isinstance(ch, OpenDesc) else []
                for p in pts:
                    if p not in seen:
                        seen.add(p)
                        out.append(p)
        for p in self.points(extra):
            if p not in seen:
                seen.add(p)
                out.append(p)
        return out

    # -- constructive helpers -----------------------------------------------
    def finite_subcover(self, K, cover, budget=10000):
        """Indices of finitely many cover elements jointly containing K."""
        if isinstance(K, OpenDesc):
            # relatively compact open challenge: cover its compact closure
            return self.finite_subcover(self.closure(K), cover, budget)
        if isinstance(K, FinSet):
            return _dedupe(cover.select(point(p)) for p in K._key())
        if isinstance(K, CUnion):
            out = []
            for part in K.parts:
                out.extend(self.finite_subcover(part, cover, budget))
            return _dedupe(out)
        raise ModelLimitation("%s has no finite-subcover finder for %r" % (self.id, K))

    def nbhd(self, K, level):
        """(open neighborhood of K, compact set between them or None); shrinks with level."""
        if isinstance(K, FinSet):
            return OpenDesc(Singleton(p) for p in K._key()), K
        raise ModelLimitation("%s has no neighborhood step for %r" % (self.id, K))

    def slice_samples(self, K, opens):
        if isinstance(K, FinSet):
            return K._key()
        raise ModelLimitation("%s cannot sample %r" % (self.id, K))

    def intersect(self, U, V):
        return intersect(U, V)

    def closure(self, U):
        raise ModelLimitation("%s has no closure operator" % self.id)

    def uncovered_point(self, opens, region=None):
        raise ModelLimitation("%s has no sweep" % self.id)

    def whole(self):
        return whole()


def _dedupe(xs):
    seen, out = set(), []
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


# ---------------------------------------------------------------------------
# descriptor intersection
# ---------------------------------------------------------------------------

def _iv_atom(lo, lc, hi, hc):
    if lo is None and hi is None:
        return Whole()
    if hi is None:
        if lc:
            raise ModelLimitation("closed ray [%s, oo) is not an atom" % lo)
        return Ray(lo)
    if lo is None:
        raise ModelLimitation("left ray (-oo, %s) is not an atom" % hi)
    if lo == hi and lc and hc:
        return Singleton(lo)
    if lc and not hc:
        return HalfOpen(lo, hi)
    if not lc and not hc:
        return Interval(lo, hi)
    raise ModelLimitation("interval with closed right end is not an atom")


def _iv_meet(x, y):
    a = _norm([x])[0]
    b = _norm([y])[0]
    if a[0] > b[0] or (a[0] == b[0] and not a[1]):
        lo, lc = a[0], a[1]
    else:
        lo, lc = b[0], b[1]
    if a[2] < b[2] or (a[2] == b[2] and not a[3]):
        hi, hc = a[2], a[3]
    else:
        hi, hc = b[2], b[3]
    if lo > hi or (lo == hi and not (lc and hc)):
        return None
    return (None if lo is NEG else lo, lc, None if hi is POS else hi, hc)


_LINE = (Interval, Ray, HalfOpen)


def _meet_atoms(a, b):
    if isinstance(a, Whole):
        return [b]
    if isinstance(b, Whole):
        return [a]
    if isinstance(a, Singleton):
        return [a] if b.member(a.p) else []
    if isinstance(b, Singleton):
        return [b] if a.member(b.p) else []
    if isinstance(a, CofComp) and isinstance(b, CofComp):
        return [CofComp(a.excluded | b.excluded)]
    if isinstance(a, _LINE + (CofComp,)) and isinstance(b, _LINE + (CofComp,)):
        out = []
        for x in a.intervals():
            for y in b.intervals():
                m = _iv_meet(x, y)
                if m is not None:
                    out.append(_iv_atom(*m))
        return out
    if isinstance(a, CofComp) or isinstance(b, CofComp):
        raise ModelLimitation("cannot intersect %r with %r" % (a, b))
    if isinstance(a, Cylinder) and isinstance(b, Cylinder):
        if a.t[:len(b.t)] == b.t:
            return [a]
        if b.t[:len(a.t)] == a.t:
            return [b]
        return []
    if isinstance(a, Rect) and isinstance(b, Rect):
        if len(a.factors) != len(b.factors):
            raise TypeMismatch("rectangles of different arity")
        fs = [intersect(f, g) for f, g in zip(a.factors, b.factors)]
        if any(not f.atoms for f in fs):
            return []
        return [Rect(fs)]
    if isinstance(a, InjOpen) and isinstance(b, InjOpen):
        if a.i != b.i:
            return []
        inner = intersect(a.inner, b.inner)
        return [InjOpen(a.i, inner)] if inner.atoms else []
    raise ModelLimitation("cannot intersect %r with %r" % (a, b))


def intersect(U, V):
    out = []
    for a in U.atoms:
        for b in V.atoms:
            out.extend(_meet_atoms(a, b))
    return OpenDesc(out)


# ---------------------------------------------------------------------------
# discrete naturals
# ---------------------------------------------------------------------------

class DiscreteN(SpaceModel):
    kind = "DiscreteN"
    default_flags = {"T1": True, "regular": True, "second_countable": True}

    def is_point(self, p):
        return isinstance(p, int) and not isinstance(p, bool) and p >= 0

    def atom_ok(self, a):
        if isinstance(a, Singleton):
            return self.is_point(a.p)
        if isinstance(a, CofComp):
            return all(self.is_point(p) for p in a.excluded)
        return isinstance(a, Whole)

    def _point_stream(self):
        return itertools.count()

    def basis(self, n):
        return [OpenDesc([Singleton(i)]) for i in range(n)]

    def _subset(self, B, A):
        if isinstance(B, OpenDesc):
            pts = []
            for a in B.atoms:
                if not isinstance(a, Singleton):
                    raise ModelLimitation("infinite open set in a subset test")
                pts.append(a.p)
            return all(self.in_set(p, A) for p in pts)
        return super()._subset(B, A)

    def closure(self, U):
        pts = []
        for a in U.atoms:
            if not isinstance(a, Singleton):
                raise ModelLimitation("closure of an infinite set is not compact")
            pts.append(a.p)
        return FinSet(pts)


class OnePoint(SpaceModel):
    kind = "OnePoint"
    default_flags = {"T1": True, "regular": True, "second_countable": True}

    def is_point(self, p):
        return p is STAR

    def atom_ok(self, a):
        return isinstance(a, Whole) or (isinstance(a, Singleton) and a.p is STAR)

    def _point_stream(self):
        return iter([STAR])

    def basis(self, n):
        return [whole()][:n]

    def closure(self, U):
        return FinSet([STAR]) if U.atoms else FinSet([])


class BaireModel(SpaceModel):
    """Sequences of naturals, each point given by a finite word it extends."""
    kind = "BaireModel"
    default_flags = {"T1": True, "regular": True, "second_countable": True}

    def is_point(self, p):
        return isinstance(p, Word) and all(isinstance(x, int) and x >= 0 for x in p)

    def atom_ok(self, a):
        return isinstance(a, (Whole, Cylinder))

    def _point_stream(self):
        from ..combinatorics import enum_finseq
        n = 1
        while True:
            yield Word(enum_finseq(n))
            n += 1

    def basis(self, n):
        from ..combinatorics import enum_finseq
        return [OpenDesc([Cylinder(enum_finseq(i))]) for i in range(n)]

    def nbhd(self, K, level):
        if isinstance(K, FinSet):
            return OpenDesc(Cylinder(w) for w in K._key()), None
        return super().nbhd(K, level)

    def _subset(self, B, A):
        if isinstance(B, OpenDesc) and isinstance(A, OpenDesc):
            if A.is_whole():
                return True
            for a in B.atoms:
                if isinstance(a, Whole):
                    return False
                # [w] sits inside [t] exactly when t is a prefix of w
                if not any(isinstance(c, Cylinder) and a.t[:len(c.t)] == c.t for c in A.atoms):
                    return False
            return True
        return super()._subset(B, A)


class FortissimoModel(SpaceModel):
    """Discrete rationals plus a point at infinity whose neighborhoods are co-small.

    Fidelity caveat: co-countable neighborhoods of infinity are represented by
    complements of explicitly named finite sets.
    """
    kind = "FortissimoModel"
    default_flags = {"T1": True, "regular": True, "second_countable": False,
                     "fidelity_caveat": True}

    def is_point(self, p):
        return p is INF or isinstance(p, Fraction)

    def atom_ok(self, a):
        if isinstance(a, Singleton):
            return self.is_point(a.p)
        if isinstance(a, CofComp):
            return all(isinstance(p, Fraction) for p in a.excluded)
        return isinstance(a, (Whole, Interval))

    def _point_stream(self):
        yield INF
        yield from rationals()


# ---------------------------------------------------------------------------
# line models
# ---------------------------------------------------------------------------

class _LineModel(SpaceModel):
    line_atoms = (Interval, Ray)
    compact_intervals = True

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        lo = self.params.get("lo")
        hi = self.params.get("hi")
        self.lo = None if lo is None else rat(lo)
        self.hi = None if hi is None else rat(hi)

    def is_point(self, p):
        if not isinstance(p, Fraction):
            return False
        if self.lo is not None and p < self.lo:
            return False
        if self.hi is not None and p > self.hi:
            return False
        return True

    def atom_ok(self, a):
        return isinstance(a, (Whole,) + self.line_atoms)

    def compact_ok(self, K):
        if isinstance(K, FinSet):
            return all(self.is_point(p) for p in K.points)
        if isinstance(K, Closed):
            return self.compact_intervals and self.is_point(K.lo) and self.is_point(K.hi)
        if isinstance(K, CUnion):
            return all(self.compact_ok(p) for p in K.parts)
        return False

    def _regions(self, D):
        if isinstance(D, OpenDesc):
            ivs = D.intervals()
        elif isinstance(D, FinSet):
            ivs = [(p, True, p, True) for p in D.points]
        elif isinstance(D, Closed):
            ivs = [(D.lo, True, D.hi, True)]
        elif isinstance(D, CUnion):
            ivs = []
            for part in D.parts:
                ivs.extend(self._regions(part))
        else:
            raise TypeMismatch("%r is not a line descriptor" % (D,))
        return ivs

    def _clip(self, iv):
        # restrict a region to the model's bounds
        lo, lc, hi, hc = iv
        if self.lo is not None and (lo is None or lo < self.lo):
            lo, lc = self.lo, True
        if self.hi is not None and (hi is None or hi > self.hi):
            hi, hc = self.hi, True
        if lo is not None and hi is not None and (lo > hi or (lo == hi and not (lc and hc))):
            return None
        return (lo, lc, hi, hc)

    def _contains(self, K, U):
        if U.is_whole():
            return True
        if isinstance(K, FinSet):
            return all(U.member(p) for p in K.points)
        ivs = U.intervals()
        for lo, lc, hi, hc in self._regions(K):
            if not covers_interval(ivs, lo, lc, hi, hc):
                return False
        return True

    def _subset(self, B, A):
        target = self._regions(A)
        for iv in self._regions(B):
            iv = self._clip(iv)
            if iv is None:
                continue
            if not covers_interval(target, *iv):
                return False
        return True

    def _in_compact(self, p, K):
        return any(_holds(iv, p) for iv in _norm(self._regions(K)))

    def _point_stream(self):
        for q in rationals():
            if self.is_point(q):
                yield q

    def basis(self, n):
        out = []
        for q in rationals():
            for r in rationals():
                if len(out) >= n:
                    return out
                if q < r:
                    out.append(OpenDesc([Interval(q, r)]))
                if abs(r) > abs(q) + 2:
                    break
        return out

    def finite_subcover(self, K, cover, budget=10000):
        if isinstance(K, Closed):
            return self._chain(K.lo, K.hi, cover, budget)
        return super().finite_subcover(K, cover, budget)

    def _chain(self, a, b, cover, budget):
        # greedy walk: cover the current point, jump to the end of its stretch
        out, x = [], a
        for _ in range(budget):
            i = cover.select(point(x))
            if i not in out:
                out.append(i)
            U = cover[i]
            hi, hc = _reach(U.intervals(), x)
            if hi is POS or hi > b or (hi == b and hc):
                return out
            if self.hi is not None and hi >= self.hi:
                return out
            if hc:
                raise ModelLimitation("open set with a closed right end")
            x = hi
        raise ModelLimitation("finite-subcover walk exceeded %d steps" % budget)

    def nbhd(self, K, level):
        d = Fraction(1, 2 ** level)
        atoms, parts = [], []
        for lo, lc, hi, hc in self._regions(K):
            atoms.append(Interval(lo - d, hi + d))
            parts.append(Closed(lo - d, hi + d))
        return OpenDesc(atoms), CUnion(parts)

    def slice_samples(self, K, opens):
        regs = self._regions(K)
        ends = set()
        for U in opens:
            for lo, lc, hi, hc in U.intervals():
                for e in (lo, hi):
                    if e is not None:
                        ends.add(e)
        out = []
        for lo, lc, hi, hc in regs:
            cut = sorted({lo, hi} | {e for e in ends if lo < e < hi})
            out.extend(cut)
            out.extend((u + v) / 2 for u, v in zip(cut, cut[1:]))
        return sorted(set(out))

    def closure(self, U):
        parts = []
        for lo, lc, hi, hc in U.intervals():
            if lo is None or hi is None:
                raise ModelLimitation("closure of an unbounded set is not compact")
            parts.append(Closed(lo, hi))
        if not parts:
            return FinSet([])
        return parts[0] if len(parts) == 1 else CUnion(parts)

    def uncovered_point(self, opens, region=None):
        """A rational of ``region`` (default: the model's bounds) outside every open, or None."""
        lo, hi = region if region is not None else (self.lo, self.hi)
        if lo is None or hi is None:
            raise ModelLimitation("sweep needs a bounded region")
        ivs = []
        for U in opens:
            if U.is_whole():
                return None
            ivs.extend(U.intervals())
        ivs = _norm(ivs)
        # an uncovered stretch contains an end of some interval or a midpoint between two ends
        ends = {lo, hi}
        for a, ac, b, bc in ivs:
            for e in (a, b):
                if e is not NEG and e is not POS and lo <= e <= hi:
                    ends.add(e)
        cut = sorted(ends)
        cands = [(u + v) / 2 for u, v in zip(cut, cut[1:])] + cut
        for q in cands:
            if not any(_holds(iv, q) for iv in ivs):
                return q
        return None


class RealLineModel(_LineModel):
    """Rational-endpoint model of the real line; compact battery of closed intervals."""
    kind = "RealLineModel"
    default_flags = {"T1": True, "regular": True, "second_countable": True}


class RationalLine(_LineModel):
    """The rationals: same opens as the line, but intervals are not compact."""
    kind = "RationalLine"
    compact_intervals = False
    default_flags = {"T1": True, "regular": True, "second_countable": True}


class SorgenfreyModel(_LineModel):
    kind = "SorgenfreyModel"
    line_atoms = (Interval, Ray, HalfOpen)
    compact_intervals = False
    default_flags = {"T1": True, "regular": True, "second_countable": False}

    def nbhd(self, K, level):
        d = Fraction(1, 2 ** level)
        if isinstance(K, FinSet):
            return OpenDesc(HalfOpen(p, p + d) for p in K._key()), K
        return super().nbhd(K, level)


class RightOrderModel(_LineModel):
    """Reals with the right-order topology: the opens are the rays (a, oo)."""
    kind = "RightOrderModel"
    line_atoms = (Ray,)
    default_flags = {"T1": False, "regular": False, "second_countable": True}

    def specializes(self, x, a):
        return x >= a

    def in_sat(self, x, A):
        if isinstance(A, OpenDesc):
            return A.member(x)
        return any(x >= lo for lo, lc, hi, hc in self._regions(A))

    def sat_contains(self, A, B):
        floor = min(lo for lo, lc, hi, hc in self._regions(A))
        return all(lo >= floor for lo, lc, hi, hc in self._regions(B))

    def basis(self, n):
        out = []
        for q in rationals():
            if len(out) >= n:
                break
            out.append(OpenDesc([Ray(q)]))
        return out

    def nbhd(self, K, level):
        d = Fraction(1, 2 ** level)
        floor = min(lo for lo, lc, hi, hc in self._regions(K))
        return OpenDesc([Ray(floor - d)]), None

    def closure(self, U):
        raise ModelLimitation("the right-order line is not regular")


# ---------------------------------------------------------------------------
# sums and products
# ---------------------------------------------------------------------------

class SumSpace(SpaceModel):
    kind = "SumSpace"

    def __init__(self, summands, **kwargs):
        super().__init__(**kwargs)
        self.summands = list(summands)
        self.flags.setdefault("T1", all(s.flags.get("T1") for s in self.summands))
        self.flags.setdefault("regular", all(s.flags.get("regular") for s in self.summands))
        self.flags.setdefault("second_countable", all(s.flags.get("second_countable") for s in self.summands))
        if any(s.flags.get("fidelity_caveat") for s in self.summands):
            self.flags.setdefault("fidelity_caveat", True)

    def is_point(self, p):
        return isinstance(p, Inj) and 0 <= p.i < len(self.summands) and self.summands[p.i].is_point(p.p)

    def atom_ok(self, a):
        if isinstance(a, Whole):
            return True
        if isinstance(a, InjOpen) and 0 <= a.i < len(self.summands):
            try:
                self.summands[a.i].check_open(a.inner)
                return True
            except TypeMismatch:
                return False
        return False

    def compact_ok(self, K):
        if isinstance(K, FinSet):
            return all(self.is_point(p) for p in K.points)
        if isinstance(K, CInj):
            return 0 <= K.i < len(self.summands) and self.summands[K.i].compact_ok(K.inner)
        if isinstance(K, CUnion):
            return all(self.compact_ok(p) for p in K.parts)
        return False

    def part(self, U, i):
        """The summand-i piece of an open descriptor."""
        if U.is_whole():
            return whole()
        atoms = []
        for a in U.atoms:
            if isinstance(a, InjOpen) and a.i == i:
                atoms.extend(a.inner.atoms)
        return OpenDesc(atoms)

    def _contains(self, K, U):
        if U.is_whole():
            return True
        if isinstance(K, FinSet):
            return all(U.member(p) for p in K.points)
        if isinstance(K, CInj):
            return self.summands[K.i]._contains(K.inner, self.part(U, K.i))
        if isinstance(K, CUnion):
            return all(self._contains(p, U) for p in K.parts)
        raise TypeMismatch(repr(K))

    def specializes(self, x, a):
        return x.i == a.i and self.summands[x.i].specializes(x.p, a.p)

    def _point_stream(self):
        streams = [s._point_stream() for s in self.summands]
        live = list(range(len(streams)))
        while live:
            for i in list(live):
                try:
                    yield Inj(i, next(streams[i]))
                except StopIteration:
                    live.remove(i)

    def uncovered_point(self, opens, region=None, summand=0):
        inner = [self.part(U, summand) for U in opens]
        q = self.summands[summand].uncovered_point(inner, region)
        return None if q is None else Inj(summand, q)

    def finite_subcover(self, K, cover, budget=10000):
        if isinstance(K, CInj):
            sub = _SummandView(self, K.i, cover)
            return self.summands[K.i].finite_subcover(K.inner, sub, budget)
        return super().finite_subcover(K, cover, budget)


class _SummandView:
    """A cover of a sum seen from one summand (indices stay those of the sum cover)."""

    def __init__(self, space, i, cover):
        self.space, self.i, self.cover = space, i, cover

    def select(self, challenge):
        if isinstance(challenge, FinSet):
            lifted = FinSet(Inj(self.i, p) for p in challenge.points)
        else:
            lifted = CInj(self.i, challenge)
        return self.cover.select(lifted)

    def __getitem__(self, idx):
        return self.space.part(self.cover[idx], self.i)


class ProductSpace(SpaceModel):
    kind = "ProductSpace"

    def __init__(self, factors, **kwargs):
        super().__init__(**kwargs)
        self.factors = list(factors)
        for key in ("T1", "regular", "second_countable"):
            self.flags.setdefault(key, all(f.flags.get(key) for f in self.factors))

    @property
    def arity(self):
        return len(self.factors)

    def is_point(self, p):
        return isinstance(p, Tup) and len(p) == self.arity and all(
            f.is_point(x) for f, x in zip(self.factors, p))

    def atom_ok(self, a):
        if isinstance(a, Whole):
            return True
        if isinstance(a, Rect) and len(a.factors) == self.arity:
            try:
                for f, U in zip(self.factors, a.factors):
                    f.check_open(U)
                return True
            except TypeMismatch:
                return False
        return False

    def compact_ok(self, K):
        if isinstance(K, FinSet):
            return all(self.is_point(p) for p in K.points)
        if isinstance(K, CProd):
            return len(K.factors) == self.arity and all(
                f.compact_ok(k) for f, k in zip(self.factors, K.factors))
        if isinstance(K, CUnion):
            return all(self.compact_ok(p) for p in K.parts)
        return False

    def project(self, K, i):
        """Coordinate projection of a compact descriptor."""
        if isinstance(K, CProd):
            return K.factors[i]
        if isinstance(K, FinSet):
            return FinSet(p[i] for p in K.points)
        if isinstance(K, CUnion):
            return CUnion(self.project(part, i) for part in K.parts)
        raise TypeMismatch(repr(K))

    def box(self, K):
        """Product of the coordinate projections (contains K)."""
        return CProd(self.project(K, i) for i in range(self.arity))

    def _contains(self, K, U):
        if U.is_whole():
            return True
        if isinstance(K, FinSet):
            return all(U.member(p) for p in K.points)
        if isinstance(K, CUnion):
            return all(self._contains(p, U) for p in K.parts)
        if isinstance(K, CProd):
            # cheap rejection: every corner of the box must be inside U
            ends = []
            for k in K.factors:
                pts = challenge_points(k)
                if not pts:
                    return True
                ends.append((pts[0], pts[-1]))
            if len(ends) <= 4:
                corners = itertools.product(*ends)
            else:
                corners = [tuple(e[0] for e in ends), tuple(e[1] for e in ends)]
            if not all(U.member(Tup(c)) for c in corners):
                return False
            rects = [a for a in U.atoms if isinstance(a, Rect)]
            return self._sweep(list(K.factors), [r.factors for r in rects], 0)
        raise TypeMismatch(repr(K))

    def _sweep(self, comps, rows, dim):
        # rows: factor tuples of the rectangles still alive at this slice
        for r in rows:
            if all(self.factors[d]._contains(comps[d], r[d]) for d in range(dim, self.arity)):
                return True
        f = self.factors[dim]
        if dim == self.arity - 1:
            return f._contains(comps[dim], OpenDesc(a for r in rows for a in r[dim].atoms))
        for x in f.slice_samples(comps[dim], [r[dim] for r in rows]):
            alive = [r for r in rows if r[dim].member(x)]
            if not alive or not self._sweep(comps, alive, dim + 1):
                return False
        return True

    def _subset(self, B, A):
        if isinstance(B, CProd) and isinstance(A, CProd):
            return all(f.subset(b, a) for f, b, a in zip(self.factors, B.factors, A.factors))
        if isinstance(B, FinSet):
            return all(self.in_set(p, A) for p in B.points)
        if isinstance(B, CUnion):
            return all(self._subset(p, A) for p in B.parts)
        if isinstance(B, CProd) and isinstance(A, CUnion):
            return any(self._subset(B, part) for part in A.parts)
        raise ModelLimitation("cannot compare %r with %r" % (B, A))

    def _in_compact(self, p, K):
        if isinstance(K, CProd):
            return all(f.in_set(x, k) for f, x, k in zip(self.factors, p, K.factors))
        return super()._in_compact(p, K)

    def specializes(self, x, a):
        return all(f.specializes(u, v) for f, u, v in zip(self.factors, x, a))

    def in_sat(self, x, A):
        if isinstance(A, CProd):
            return all(f.in_sat(u, k) for f, u, k in zip(self.factors, x, A.factors))
        return super().in_sat(x, A)

    def sat_contains(self, A, B):
        if self.flags.get("T1"):
            return self.subset(B, A)
        if isinstance(A, CProd) and isinstance(B, CProd):
            return all(f.sat_contains(a, b) for f, a, b in zip(self.factors, A.factors, B.factors))
        if isinstance(B, FinSet):
            return all(self.in_sat(x, A) for x in B.points)
        raise ModelLimitation("sat containment of %r" % (B,))

    def _point_stream(self):
        from ..combinatorics import build_pairing
        if self.arity == 1:
            for p in self.factors[0]._point_stream():
                yield Tup((p,))
            return
        pf = build_pairing()
        rest = ProductSpace(self.factors[1:])
        m = 0
        while True:
            j, k = pf.inverse(m)
            a = self.factors[0].points(j + 1)
            b = rest.points(k + 1)
            if len(a) > j and len(b) > k:
                yield Tup((a[j],) + tuple(b[k]))
            m += 1
            if m > 10 ** 7:
                return

    def nbhd(self, K, level):
        pieces = [f.nbhd(self.project(K, i), level) for i, f in enumerate(self.factors)]
        opens = [p[0] for p in pieces]
        closed = [p[1] for p in pieces]
        if any(c is None for c in closed):
            return OpenDesc([Rect(opens)]), None
        return OpenDesc([Rect(opens)]), CProd(closed)

    def slice_samples(self, K, opens):
        return sorted(challenge_points(K), key=repr)

    def rest_space(self):
        """The product of all factors but the first (the second factor itself when binary)."""
        if len(self.factors) == 2:
            return self.factors[1]
        if getattr(self, "_rest", None) is None:
            self._rest = ProductSpace(self.factors[1:], id="%s/rest" % self.id)
        return self._rest

    def finite_subcover(self, K, cover, budget=10000):
        if isinstance(K, CProd):
            from .covers import finite_subcover_product
            rest = K.factors[1] if self.arity == 2 else CProd(K.factors[1:])
            return finite_subcover_product(self, K.factors[0], rest, cover, budget)
        return super().finite_subcover(K, cover, budget)

    def closure(self, U):
        if U.is_rect() and not U.is_whole():
            return CProd(f.closure(g) for f, g in zip(self.factors, U.atoms[0].factors))
        raise ModelLimitation("closure of a non-rectangle")


class PowerSpace(ProductSpace):
    kind = "PowerSpace"

    def __init__(self, base, arity, **kwargs):
        super().__init__([base] * arity, **kwargs)
        self.base = base

    def diagonal(self, K):
        return CProd([K] * self.arity)
