"""Cover oracles, battery-relative classification and cover transformations."""

import threading
from fractions import Fraction
from functools import lru_cache

from .descriptors import (
    INF, OpenDesc, FinSet, CProd, Tup, Word, Rect, Singleton, Cylinder, CofComp, union, whole,
)
from .spaces import ModelLimitation, TypeMismatch, intersect, point

__all__ = [
    "CLASSES", "CLASS_ORDER", "CoverOracle", "SelectorFailure",
    "challenge_kind_ok", "battery_for", "classify_cover", "inside",
    "finite_union_closure", "rectangle_refine", "cube_refine", "wallace_rectangle",
    "finite_subcover_product", "countable_k_subcover", "CountableSubfamily",
]

CLASSES = ("O", "Lambda", "Omega", "Gamma", "K", "Krel")

# strongest first; used to read class inclusions
CLASS_ORDER = {"Krel": 5, "K": 4, "Gamma": 3, "Omega": 3, "Lambda": 2, "O": 1}


class SelectorFailure(RuntimeError):
    """A cover's selector returned an element that does not contain the challenge."""


@lru_cache(maxsize=1 << 16)
def inside(space, challenge, U):
    """Is a challenge (point set, compact, or relatively compact open) inside U?

    Descriptors are immutable, so answers are cached per (space, challenge, U).
    """
    return space.subset(challenge, U)


class CoverOracle:
    """Intensional cover: keyed elements plus a selector.

    ``selector(challenge)`` returns a key, ``element(key)`` its open set
    (defaults to the key itself).  Indices are handed out in first-touch
    order unless ``stream``/``locate`` fix a canonical enumeration.
    """

    def __init__(self, space, cls, selector, element=None, stream=None, locate=None,
                 label="cover", convention=2):
        if cls not in CLASSES:
            raise ValueError("unknown cover class %r" % (cls,))
        if convention not in (2, 3):
            raise ValueError("convention must be 2 or 3")
        self.space = space
        self.cls = cls
        self.selector = selector
        self.element_of = element or (lambda key: key)
        self.stream = stream
        self.locate = locate
        self.label = label
        self.convention = convention
        self._keys = []
        self._index = {}
        self._elements = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return "<CoverOracle %s %s>" % (self.label, self.cls)

    # -- indices ------------------------------------------------------------
    def index_of(self, key):
        if self.locate is not None:
            return self.locate(key)
        with self._lock:
            i = self._index.get(key)
            if i is None:
                i = len(self._keys)
                self._keys.append(key)
                self._index[key] = i
            return i

    def key(self, i):
        if self.stream is not None:
            return self.stream(i)
        return self._keys[i]

    def has_index(self, i):
        if not isinstance(i, int) or isinstance(i, bool) or i < 0:
            return False
        return self.stream is not None or i < len(self._keys)

    def size(self):
        """Number of indices touched so far (canonical streams are unbounded)."""
        return len(self._keys)

    def __getitem__(self, i):
        if not self.has_index(i):
            raise IndexError("cover %s has no element %r" % (self.label, i))
        el = self._elements.get(i)
        if el is None:
            el = self.element_of(self.key(i))
            self._elements[i] = el
        return el

    # -- selection ----------------------------------------------------------
    def select(self, challenge):
        return self.index_of(self.selector(challenge))

    def peek(self, challenge):
        """The element the selector would pick, without assigning an index."""
        return self.element_of(self.selector(challenge))

    def sound_on(self, challenge):
        return inside(self.space, challenge, self.peek(challenge))

    def select_checked(self, challenge):
        i = self.select(challenge)
        if not inside(self.space, challenge, self[i]):
            raise SelectorFailure("%s: element %d misses %r" % (self.label, i, challenge))
        return i


def challenge_kind_ok(cls, challenge):
    if cls in ("O", "Lambda", "Gamma"):
        return isinstance(challenge, FinSet) and len(challenge.points) == 1
    if cls == "Omega":
        return isinstance(challenge, FinSet)
    return True


def battery_for(space, cls):
    """Challenge list used to judge ``cls`` on ``space``."""
    if cls in ("O", "Lambda", "Gamma"):
        return [point(p) for p in space.battery("points")]
    if cls == "Omega":
        return space.battery("finite")
    if cls == "K":
        return space.battery("compact")
    if cls == "Krel":
        return space.battery("relcompact") or space.battery("compact")
    raise ValueError("unknown cover class %r" % (cls,))


# ---------------------------------------------------------------------------
# classification of finite element lists
# ---------------------------------------------------------------------------

def _covered_by_one(space, ch, elements):
    return any(inside(space, ch, U) for U in elements)


def _escape_candidates(space, U):
    """Points that may lie outside U, read off its atoms.

    On the line a finite union of open atoms that is not everything misses
    one of its own endpoints, so endpoints (plus one step beyond the extremes)
    always contain a witness.  Products and sums recurse factor-wise.
    """
    from .spaces import ProductSpace, SumSpace, _LineModel, DiscreteN, BaireModel, FortissimoModel
    out = []
    if isinstance(space, ProductSpace):
        fill = [f.probe_points(1)[:1] or f.points(1) for f in space.factors]
        for a in U.atoms:
            if not isinstance(a, Rect):
                continue
            for k, (f, V) in enumerate(zip(space.factors, a.factors)):
                for c in _escape_candidates(f, V)[:8]:
                    pt = [x[0] for x in fill]
                    pt[k] = c
                    out.append(Tup(pt))
        if not U.atoms:
            out.append(Tup(x[0] for x in fill))
        return out
    if isinstance(space, SumSpace):
        from .descriptors import Inj, InjOpen
        for i, sub in enumerate(space.summands):
            inner = OpenDesc([x for a in U.atoms if isinstance(a, InjOpen) and a.i == i
                              for x in a.inner.atoms])
            out.extend(Inj(i, c) for c in _escape_candidates(sub, inner))
        return out
    nums = []
    for a in U.atoms:
        for name in ("lo", "hi"):
            v = getattr(a, name, None)
            if v is not None and not isinstance(v, Word):
                nums.append(v)
        if isinstance(a, CofComp):
            out.extend(a.excluded)
        if isinstance(a, Singleton) and isinstance(a.p, int):
            nums.append(a.p)
    if isinstance(space, _LineModel):
        out.extend(nums)
        if nums:
            out.extend([min(nums) - 1, max(nums) + 1])
        out.append(Fraction(0))
    elif isinstance(space, DiscreteN):
        out.append(max([n for n in nums if isinstance(n, int)] or [-1]) + 1)
    elif isinstance(space, BaireModel):
        firsts = [a.t[0] for a in U.atoms if isinstance(a, Cylinder) and a.t]
        out.append(Word([max(firsts or [-1]) + 1]))
    elif isinstance(space, FortissimoModel):
        out.append(INF)
        out.extend(n for n in nums if isinstance(n, Fraction))
    return [p for p in out if space.is_point(p)]


def _outside(space, U, probes):
    if U.is_whole():
        return None
    for p in list(probes) + _escape_candidates(space, U):
        if not U.member(p):
            return p
    return None


def classify_cover(space, elements, gamma_slack=0, extra_probes=16):
    """Battery-relative cover classes of a finite element list.

    Whole-space elements are admitted.  A finite list has no point in
    infinitely many elements, so Lambda and Gamma hold only through an
    element containing every probe point; Omega and the compact classes add
    the diagonal challenge {x_i : x_i outside element i} whenever one exists.
    """
    elements = list(elements)
    probes = space.probe_points(extra_probes)
    out = set()
    if not elements:
        return out
    if not all(any(U.member(p) for U in elements) for p in probes):
        return out
    if not all(_covered_by_one(space, ch, elements) for ch in battery_for(space, "O")):
        return out
    out.add("O")
    misses = [_outside(space, U, probes) for U in elements]
    full = [U for U, m in zip(elements, misses) if m is None]
    if full:
        out.add("Lambda")
    diag = None if full else misses
    omega_checks = list(battery_for(space, "Omega"))
    if diag:
        omega_checks.append(FinSet(diag))
    omega = full and all(_covered_by_one(space, ch, elements) for ch in omega_checks)
    if not omega:
        return out
    out.add("Omega")
    # Gamma: every probe point misses at most gamma_slack elements
    if all(sum(1 for U in elements if not U.member(p)) <= gamma_slack for p in probes):
        out.add("Gamma")
    if all(_covered_by_one(space, ch, elements) for ch in space.battery("compact")):
        out.add("K")
        if all(_covered_by_one(space, ch, elements) for ch in space.battery("relcompact")):
            out.add("Krel")
    return out


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------

def finite_union_closure(c, budget=10000):
    """Close an open cover under finite unions; selects via finite subcovers."""
    space = c.space

    def selector(challenge):
        return tuple(sorted(space.finite_subcover(challenge, c, budget)))

    def element(key):
        return union(c[i] for i in key)

    out = CoverOracle(space, "Krel", selector, element, label=c.label + "^fin",
                      convention=c.convention)
    out.parent = c
    return out


def wallace_rectangle(space, E, W, max_level=40):
    """An open rectangle containing the box hull of E and contained in W."""
    box = space.box(E)
    for a in W.atoms:
        if isinstance(a, Rect) and space.contains(box, OpenDesc([a])):
            return OpenDesc([a])
    if W.is_whole():
        return whole()
    for level in range(max_level):
        R, hull = space.nbhd(box, level)
        if hull is not None and space.contains(hull, W):
            return R
    raise ModelLimitation("no rectangle between %r and %r" % (box, W))


class _Refined(CoverOracle):
    """Keys are (element, parent index)."""

    def parent_index(self, i):
        return self.key(i)[1]

    def parent_element(self, i):
        return self.parent[self.parent_index(i)]


def rectangle_refine(space, c, max_level=40):
    """Rectangle k-cover refining c; key[1] of each element is its parent index in c."""
    memo = {}

    def selector(E):
        i = c.select(E)
        hit = memo.get((i, E))
        if hit is not None:
            return hit
        W = c[i]
        R = W if W.is_rect() else wallace_rectangle(space, E, W, max_level)
        memo[(i, E)] = (R, i)
        return (R, i)

    out = _Refined(space, c.cls, selector, element=lambda key: key[0],
                   label=c.label + "^rect", convention=c.convention)
    out.parent = c
    return out


def cube_refine(power, c, max_level=40):
    """Base-space k-cover {U : U^n inside some element of c}; key[1] is the parent index."""
    n = power.arity
    if not all(f is power.factors[0] for f in power.factors):
        raise TypeMismatch("cube refinement needs a power space")
    base = power.factors[0]
    src = c if isinstance(c, _Refined) and c.space is power else rectangle_refine(power, c, max_level)

    def selector(K):
        i = src.select(CProd([K] * n))
        W = src[i]
        U = W.factor(0)
        for k in range(1, n):
            U = intersect(U, W.factor(k))
        if not inside(base, K, U):
            raise SelectorFailure("projections of element %d do not contain %r" % (i, K))
        parent = src.parent_index(i) if isinstance(src, _Refined) else i
        return (U, parent)

    out = _Refined(base, c.cls, selector, element=lambda key: key[0],
                   label=c.label + "^cube", convention=c.convention)
    out.parent = c
    return out


def finite_subcover_product(space, A, B, c, budget=10000):
    """Indices of finitely many elements of c covering A x B, by the tube lemma.

    B lives in the product of the remaining factors (a plain factor when the
    space is binary).  Slices are taken through the rectangle of an element
    that holds the point, so elements made of several rectangles are safe.
    """
    if len(space.factors) < 2:
        raise TypeMismatch("need a product of at least two factors")
    X = space.factors[0]
    Y = space.rest_space()
    binary = len(space.factors) == 2

    def join(x, y):
        return Tup((x, y)) if binary else Tup((x,) + tuple(y))

    def yside(a):
        return a.factors[1] if binary else OpenDesc([Rect(a.factors[1:])])

    def rect_at(i, p):
        W = c[i]
        if W.is_whole():
            return None
        for k, a in enumerate(W.atoms):
            if isinstance(a, Rect) and a.member(p):
                return k
        raise SelectorFailure("element %d holds no rectangle around %r" % (i, p))

    def tube(xch):
        (x,) = xch.points

        def ysel(ych):
            (y,) = ych.points
            p = join(x, y)
            i = c.select(point(p))
            return (i, rect_at(i, p))

        ycover = CoverOracle(Y, "O", selector=ysel,
                             element=lambda key: whole() if key[1] is None else yside(c[key[0]].atoms[key[1]]),
                             label="slice")
        picked = Y.finite_subcover(B, ycover, budget)
        return (x, tuple(sorted({ycover.key(k) for k in picked}, key=repr)))

    def tube_open(key):
        x, pairs = key
        U = whole()
        for i, k in pairs:
            if k is None:
                continue
            U = intersect(U, c[i].atoms[k].factors[0])
            # any open piece around x will do; keep the one atom holding x
            U = OpenDesc([a for a in U.atoms if a.member(x)][:1])
        return U

    xcover = CoverOracle(X, "O", selector=tube, element=tube_open, label="tubes")
    picked = X.finite_subcover(A, xcover, budget)
    out = []
    for k in picked:
        for i, _ in xcover.key(k)[1]:
            if i not in out:
                out.append(i)
    return sorted(out)


class CountableSubfamily(CoverOracle):
    """Basis-union refinement of a k-cover; ``chosen`` maps each basis union to its parent index."""

    def __init__(self, space, c, max_level=40):
        self.source = c
        self.chosen = {}
        self.max_level = max_level
        super().__init__(space, c.cls, self._pick, label=c.label + "^ctbl",
                         convention=c.convention)

    def _pick(self, K):
        i = self.source.select(K)
        U = self.source[i]
        B = _basis_union(self.space, K, U, self.max_level)
        self.chosen.setdefault(B, i)
        return B


def _basis_union(space, K, U, max_level):
    if U.is_whole():
        return whole()
    for level in range(max_level):
        B, hull = space.nbhd(K, level)
        if hull is not None:
            if space.contains(hull, U):
                return B
        elif space.subset(B, U):
            return B
    raise ModelLimitation("no basis union between %r and %r" % (K, U))


def countable_k_subcover(space, c, battery=None, max_level=40):
    """Countable subfamily of the k-cover c built from basis unions; battery members pre-selected."""
    if not space.flags.get("second_countable"):
        raise ModelLimitation("%s is not flagged second-countable" % space.id)
    sub = CountableSubfamily(space, c, max_level)
    for K in (battery if battery is not None else battery_for(space, "K")):
        sub.select(K)
    return sub
