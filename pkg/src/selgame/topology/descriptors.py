"""Symbolic points, open sets and compact sets.

Open sets are finite unions of basis atoms; compact sets are finite point
sets, closed rational intervals, finite unions, products and sum injections.
All arithmetic is exact (``fractions.Fraction``).  Descriptors are immutable
and hashable so they can serve as cover keys.
"""

from fractions import Fraction

__all__ = [
    "INF", "STAR", "Word", "Tup", "Inj", "rat",
    "Atom", "Whole", "Singleton", "Interval", "Ray", "HalfOpen", "Cylinder",
    "CofComp", "Rect", "InjOpen", "OpenDesc",
    "FinSet", "Closed", "CUnion", "CProd", "CInj",
    "whole", "empty", "union", "point_tree", "point_from_tree",
    "open_tree", "open_from_tree", "compact_tree", "compact_from_tree",
    "challenge_points", "DescriptorError",
]


class DescriptorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------

class _Symbol:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return (_symbol, (self.name,))


_SYMBOLS = {}


def _symbol(name):
    if name not in _SYMBOLS:
        _SYMBOLS[name] = _Symbol(name)
    return _SYMBOLS[name]


INF = _symbol("inf")     # the Fortissimo point at infinity
STAR = _symbol("star")   # the point of the one-point space


class Word(tuple):
    """Finite word over the naturals, standing for an infinite sequence it truncates."""

    def __repr__(self):
        return "w<%s>" % ",".join(map(str, self))


class Tup(tuple):
    """Point of a finite product."""

    def __repr__(self):
        return "(" + ", ".join(map(repr, self)) + ")"


class Inj(tuple):
    """Point of a sum: (summand index, point)."""

    def __new__(cls, i, p):
        return super().__new__(cls, (i, p))

    @property
    def i(self):
        return self[0]

    @property
    def p(self):
        return self[1]

    def __repr__(self):
        return "inj%d(%r)" % (self[0], self[1])


def rat(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise DescriptorError("not an exact rational: %r" % (x,))


def _is_rat(p):
    return isinstance(p, Fraction)


# ---------------------------------------------------------------------------
# open atoms
# ---------------------------------------------------------------------------

class Atom:
    __slots__ = ("_h",)
    kind = "atom"

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        try:
            return self._h
        except AttributeError:
            self._h = hash((self.kind, self._key()))
            return self._h

    def __repr__(self):
        return "%s%r" % (self.kind, self._key())

    def member(self, p):
        raise NotImplementedError

    def intervals(self):
        """Line atoms as (lo, lo_closed, hi, hi_closed); None is an infinite end."""
        raise DescriptorError("%s is not a line atom" % self.kind)


class Whole(Atom):
    __slots__ = ()
    kind = "whole"

    def _key(self):
        return ()

    def member(self, p):
        return True

    def intervals(self):
        return [(None, False, None, False)]


class Singleton(Atom):
    __slots__ = ("p",)
    kind = "point"

    def __init__(self, p):
        self.p = p

    def _key(self):
        return (self.p,)

    def member(self, p):
        return p == self.p and type(p) is type(self.p)

    def intervals(self):
        if not _is_rat(self.p):
            raise DescriptorError("singleton of non-rational has no interval form")
        return [(self.p, True, self.p, True)]


class Interval(Atom):
    """Open rational interval (lo, hi)."""
    __slots__ = ("lo", "hi")
    kind = "interval"

    def __init__(self, lo, hi):
        self.lo, self.hi = rat(lo), rat(hi)

    def _key(self):
        return (self.lo, self.hi)

    def member(self, p):
        return _is_rat(p) and self.lo < p < self.hi

    def intervals(self):
        return [(self.lo, False, self.hi, False)] if self.lo < self.hi else []


class Ray(Atom):
    """Right ray (lo, infinity)."""
    __slots__ = ("lo",)
    kind = "ray"

    def __init__(self, lo):
        self.lo = rat(lo)

    def _key(self):
        return (self.lo,)

    def member(self, p):
        return _is_rat(p) and p > self.lo

    def intervals(self):
        return [(self.lo, False, None, False)]


class HalfOpen(Atom):
    """Sorgenfrey basic set [lo, hi)."""
    __slots__ = ("lo", "hi")
    kind = "halfopen"

    def __init__(self, lo, hi):
        self.lo, self.hi = rat(lo), rat(hi)

    def _key(self):
        return (self.lo, self.hi)

    def member(self, p):
        return _is_rat(p) and self.lo <= p < self.hi

    def intervals(self):
        return [(self.lo, True, self.hi, False)] if self.lo < self.hi else []


class Cylinder(Atom):
    """All sequences extending the word t."""
    __slots__ = ("t",)
    kind = "cylinder"

    def __init__(self, t):
        self.t = Word(t)

    def _key(self):
        return (self.t,)

    def member(self, p):
        return isinstance(p, Word) and len(p) >= len(self.t) and p[:len(self.t)] == self.t


class CofComp(Atom):
    """Everything except a named finite set of points (the infinity point is never named)."""
    __slots__ = ("excluded",)
    kind = "cofinite"

    def __init__(self, excluded):
        self.excluded = frozenset(excluded)
        if INF in self.excluded:
            raise DescriptorError("the point at infinity cannot be excluded")

    def _key(self):
        return (tuple(sorted(self.excluded, key=_sort_key)),)

    def member(self, p):
        return p not in self.excluded

    def intervals(self):
        pts = sorted(self.excluded)
        if not all(_is_rat(q) for q in pts):
            raise DescriptorError("cofinite complement on the line needs rational exclusions")
        out, lo = [], None
        for q in pts:
            out.append((lo, False, q, False))
            lo = q
        out.append((lo, False, None, False))
        return out


class Rect(Atom):
    """Product of open sets, one per coordinate."""
    __slots__ = ("factors",)
    kind = "rect"

    def __init__(self, factors):
        self.factors = tuple(f if isinstance(f, OpenDesc) else OpenDesc([f]) for f in factors)

    def _key(self):
        return self.factors

    def member(self, p):
        return (isinstance(p, Tup) and len(p) == len(self.factors)
                and all(f.member(x) for f, x in zip(self.factors, p)))

    def __repr__(self):
        return " x ".join(repr(f) for f in self.factors)


class InjOpen(Atom):
    """Open set of one summand, injected into a sum."""
    __slots__ = ("i", "inner")
    kind = "inj"

    def __init__(self, i, inner):
        self.i = i
        self.inner = inner if isinstance(inner, OpenDesc) else OpenDesc([inner])

    def _key(self):
        return (self.i, self.inner)

    def member(self, p):
        return isinstance(p, Inj) and p.i == self.i and self.inner.member(p.p)


def _sort_key(p):
    if isinstance(p, Fraction):
        return (0, p)
    if isinstance(p, int):
        return (0, Fraction(p))
    return (1, repr(p))


class OpenDesc:
    """Finite union of atoms.  The empty union is the empty set."""
    __slots__ = ("atoms", "_hash", "_index")

    def __init__(self, atoms=()):
        seen, out = set(), []
        for a in atoms:
            if isinstance(a, OpenDesc):
                parts = a.atoms
            else:
                parts = (a,)
            for b in parts:
                if not isinstance(b, Atom):
                    raise DescriptorError("not an atom: %r" % (b,))
                if b not in seen:
                    seen.add(b)
                    out.append(b)
        self.atoms = tuple(out)
        self._hash = hash(self.atoms)
        self._index = None

    def __eq__(self, other):
        return isinstance(other, OpenDesc) and self.atoms == other.atoms

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.atoms:
            return "{}"
        return " u ".join(repr(a) for a in self.atoms)

    def __or__(self, other):
        return OpenDesc(self.atoms + other.atoms)

    def member(self, p):
        if self._index is None:
            # singletons are looked up by hash, everything else scanned
            pts = {(type(a.p), a.p) for a in self.atoms if type(a) is Singleton}
            rest = tuple(a for a in self.atoms if type(a) is not Singleton)
            self._index = (pts, rest)
        pts, rest = self._index
        if pts and (type(p), p) in pts:
            return True
        return any(a.member(p) for a in rest)

    def is_whole(self):
        return any(isinstance(a, Whole) for a in self.atoms)

    def intervals(self):
        out = []
        for a in self.atoms:
            out.extend(a.intervals())
        return out

    def factor(self, i):
        """Coordinate projection of a single rectangle (or of the whole space)."""
        if self.is_whole():
            return whole()
        if len(self.atoms) == 1 and isinstance(self.atoms[0], Rect):
            return self.atoms[0].factors[i]
        out = []
        for a in self.atoms:
            if not isinstance(a, Rect):
                raise DescriptorError("projection needs rectangles, got %s" % a.kind)
            out.extend(a.factors[i].atoms)
        return OpenDesc(out)

    def is_rect(self):
        return self.is_whole() or (len(self.atoms) == 1 and isinstance(self.atoms[0], Rect))


def whole():
    return OpenDesc([Whole()])


def empty():
    return OpenDesc([])


def union(descs):
    atoms = []
    for d in descs:
        atoms.extend(d.atoms)
    return OpenDesc(atoms)


# ---------------------------------------------------------------------------
# compact descriptors
# ---------------------------------------------------------------------------

class _Compact:
    __slots__ = ()
    kind = "compact"

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((self.kind, self._key()))

    def __repr__(self):
        return "%s%r" % (self.kind, self._key())


class FinSet(_Compact):
    __slots__ = ("points", "_sorted", "_h")
    kind = "finite"

    def __init__(self, points):
        self.points = frozenset(points)
        self._sorted = None
        self._h = None

    def _key(self):
        if self._sorted is None:
            self._sorted = tuple(sorted(self.points, key=_sort_key))
        return self._sorted

    def __eq__(self, other):
        return type(other) is FinSet and self.points == other.points

    def __hash__(self):
        if self._h is None:
            self._h = hash(("finite", self.points))
        return self._h

    def __repr__(self):
        return "{" + ", ".join(repr(p) for p in self._key()) + "}"


class Closed(_Compact):
    __slots__ = ("lo", "hi")
    kind = "closed"

    def __init__(self, lo, hi):
        self.lo, self.hi = rat(lo), rat(hi)
        if self.lo > self.hi:
            raise DescriptorError("empty closed interval [%s, %s]" % (lo, hi))

    def _key(self):
        return (self.lo, self.hi)

    def __repr__(self):
        return "[%s, %s]" % (self.lo, self.hi)


class CUnion(_Compact):
    __slots__ = ("parts",)
    kind = "cunion"

    def __init__(self, parts):
        self.parts = tuple(parts)

    def _key(self):
        return self.parts

    def __repr__(self):
        return " u ".join(repr(p) for p in self.parts)


class CProd(_Compact):
    __slots__ = ("factors",)
    kind = "cprod"

    def __init__(self, factors):
        self.factors = tuple(factors)

    def _key(self):
        return self.factors

    def __repr__(self):
        return " x ".join(repr(f) for f in self.factors)


class CInj(_Compact):
    __slots__ = ("i", "inner")
    kind = "cinj"

    def __init__(self, i, inner):
        self.i, self.inner = i, inner

    def _key(self):
        return (self.i, self.inner)


def challenge_points(K):
    """Finitely many named points of a compact (all of them for finite sets)."""
    if isinstance(K, FinSet):
        return list(K._key())
    if isinstance(K, Closed):
        return [K.lo, K.hi] if K.lo != K.hi else [K.lo]
    if isinstance(K, CUnion):
        out = []
        for part in K.parts:
            out.extend(challenge_points(part))
        return out
    if isinstance(K, CInj):
        return [Inj(K.i, p) for p in challenge_points(K.inner)]
    if isinstance(K, CProd):
        import itertools
        cols = [challenge_points(f) for f in K.factors]
        return [Tup(c) for c in itertools.product(*cols)]
    raise DescriptorError("not a compact descriptor: %r" % (K,))


# ---------------------------------------------------------------------------
# tagged trees (JSON-ready)
# ---------------------------------------------------------------------------

def _q(x):
    return str(x)


def point_tree(p):
    if isinstance(p, bool):
        raise DescriptorError("booleans are not points")
    if isinstance(p, int):
        return p
    if isinstance(p, Fraction):
        return {"q": _q(p)}
    if isinstance(p, Word):
        return {"w": list(p)}
    if isinstance(p, Inj):
        return {"i": p.i, "p": point_tree(p.p)}
    if isinstance(p, Tup):
        return {"t": [point_tree(x) for x in p]}
    if p is INF:
        return {"inf": 1}
    if p is STAR:
        return {"star": 1}
    raise DescriptorError("unknown point %r" % (p,))


def point_from_tree(t):
    if isinstance(t, int) and not isinstance(t, bool):
        return t
    if isinstance(t, dict):
        if "q" in t:
            return Fraction(t["q"])
        if "w" in t:
            return Word(t["w"])
        if "i" in t:
            return Inj(t["i"], point_from_tree(t["p"]))
        if "t" in t:
            return Tup(point_from_tree(x) for x in t["t"])
        if "inf" in t:
            return INF
        if "star" in t:
            return STAR
    raise DescriptorError("bad point tree %r" % (t,))


def _atom_tree(a):
    if isinstance(a, Whole):
        return {"kind": "whole"}
    if isinstance(a, Singleton):
        return {"kind": "point", "p": point_tree(a.p)}
    if isinstance(a, Interval):
        return {"kind": "interval", "lo": _q(a.lo), "hi": _q(a.hi)}
    if isinstance(a, Ray):
        return {"kind": "ray", "lo": _q(a.lo)}
    if isinstance(a, HalfOpen):
        return {"kind": "halfopen", "lo": _q(a.lo), "hi": _q(a.hi)}
    if isinstance(a, Cylinder):
        return {"kind": "cylinder", "t": list(a.t)}
    if isinstance(a, CofComp):
        return {"kind": "cofinite", "excluded": [point_tree(p) for p in a._key()[0]]}
    if isinstance(a, Rect):
        return {"kind": "rect", "factors": [open_tree(f) for f in a.factors]}
    if isinstance(a, InjOpen):
        return {"kind": "inj", "i": a.i, "open": open_tree(a.inner)}
    raise DescriptorError("unknown atom %r" % (a,))


def _atom_from_tree(t):
    k = t.get("kind")
    if k == "whole":
        return Whole()
    if k == "point":
        return Singleton(point_from_tree(t["p"]))
    if k == "interval":
        return Interval(Fraction(t["lo"]), Fraction(t["hi"]))
    if k == "ray":
        return Ray(Fraction(t["lo"]))
    if k == "halfopen":
        return HalfOpen(Fraction(t["lo"]), Fraction(t["hi"]))
    if k == "cylinder":
        return Cylinder(t["t"])
    if k == "cofinite":
        return CofComp(point_from_tree(p) for p in t["excluded"])
    if k == "rect":
        return Rect(open_from_tree(f) for f in t["factors"])
    if k == "inj":
        return InjOpen(t["i"], open_from_tree(t["open"]))
    raise DescriptorError("bad atom tree %r" % (t,))


def open_tree(U):
    return {"union": [_atom_tree(a) for a in U.atoms]}


def open_from_tree(t):
    if not isinstance(t, dict) or "union" not in t:
        raise DescriptorError("bad open tree %r" % (t,))
    return OpenDesc(_atom_from_tree(a) for a in t["union"])


def compact_tree(K):
    if isinstance(K, FinSet):
        return {"finite": [point_tree(p) for p in K._key()]}
    if isinstance(K, Closed):
        return {"closed": [_q(K.lo), _q(K.hi)]}
    if isinstance(K, CUnion):
        return {"cunion": [compact_tree(p) for p in K.parts]}
    if isinstance(K, CProd):
        return {"cprod": [compact_tree(f) for f in K.factors]}
    if isinstance(K, CInj):
        return {"cinj": [K.i, compact_tree(K.inner)]}
    raise DescriptorError("unknown compact %r" % (K,))


def compact_from_tree(t):
    if isinstance(t, dict):
        if "finite" in t:
            return FinSet(point_from_tree(p) for p in t["finite"])
        if "closed" in t:
            lo, hi = t["closed"]
            return Closed(Fraction(lo), Fraction(hi))
        if "cunion" in t:
            return CUnion(compact_from_tree(p) for p in t["cunion"])
        if "cprod" in t:
            return CProd(compact_from_tree(f) for f in t["cprod"])
        if "cinj" in t:
            i, inner = t["cinj"]
            return CInj(i, compact_from_tree(inner))
    raise DescriptorError("bad compact tree %r" % (t,))
