"""Finite-sequence enumerations and prime-power pairing bijections.

Every product strategy needs a bijection between round numbers and pairs
(row, column) such that row ``n`` only starts once the rounds named by the
n-th finite sequence have already been played.  This module builds those
bijections from a grid of prime powers and a lazily computed row relabeling.
"""

import threading
from bisect import bisect_left, insort

__all__ = [
    "FinSeq",
    "ConstraintViolation",
    "enum_finseq",
    "finseq_index",
    "finseq_bound",
    "enum_split_pairs",
    "split_pair_index",
    "beta_star",
    "beta_star_inverse",
    "nth_prime",
    "RangeConstraint",
    "empty_constraint",
    "range_constraint",
    "split_range_constraint",
    "PairingFamily",
    "build_pairing",
    "beta_inverse",
]


class ConstraintViolation(ValueError):
    """Raised when a range constraint leaves no admissible row within the search bound."""


class FinSeq(tuple):
    """A finite sequence of naturals; behaves like a tuple."""

    def __new__(cls, entries=()):
        entries = tuple(entries)
        for e in entries:
            if not isinstance(e, int) or isinstance(e, bool) or e < 0:
                raise ValueError("FinSeq entries must be naturals, got %r" % (e,))
        return super().__new__(cls, entries)

    def __repr__(self):
        return "<" + ",".join(str(e) for e in self) + ">"

    def grade(self):
        return max(len(self), 1 + max(self)) if self else 0


# ---------------------------------------------------------------------------
# finite sequences, graded by max(length, 1 + max entry), lexicographic inside
# ---------------------------------------------------------------------------

_grade_lock = threading.Lock()
_grades = [[FinSeq()]]      # _grades[g] = sorted sequences of grade g
_grade_starts = [0]         # index of the first sequence of each grade


def finseq_bound(g):
    """Number of sequences of grade <= g, i.e. length <= g and entries < g.

    Every sequence whose length and entries are both below ``g`` shows up among
    the first ``finseq_bound(g)`` indices.
    """
    return sum(g ** length for length in range(g + 1)) if g else 1


def _grade_members(g):
    out = []

    def walk(prefix, top):
        # lexicographic DFS: a prefix precedes its extensions
        if len(prefix) == g or top:
            out.append(FinSeq(prefix))
        if len(prefix) == g:
            return
        for d in range(g):
            prefix.append(d)
            walk(prefix, top or d == g - 1)
            prefix.pop()

    walk([], False)
    return out


def _ensure_index(n):
    with _grade_lock:
        while _grade_starts[-1] + len(_grades[-1]) <= n:
            g = len(_grades)
            _grade_starts.append(_grade_starts[-1] + len(_grades[-1]))
            _grades.append(_grade_members(g))


def _ensure_grade(g):
    with _grade_lock:
        while len(_grades) <= g:
            h = len(_grades)
            _grade_starts.append(_grade_starts[-1] + len(_grades[-1]))
            _grades.append(_grade_members(h))


def enum_finseq(n):
    """Return s_n, the n-th finite sequence; s_0 is the empty sequence."""
    if n < 0:
        raise ValueError("index must be a natural")
    _ensure_index(n)
    g = bisect_left(_grade_starts, n + 1) - 1
    return _grades[g][n - _grade_starts[g]]


def finseq_index(seq):
    """Inverse of :func:`enum_finseq`."""
    seq = FinSeq(seq)
    g = seq.grade()
    _ensure_grade(g)
    members = _grades[g]
    i = bisect_left(members, seq)
    if i == len(members) or members[i] != seq:
        raise AssertionError("grade table is missing %r" % (seq,))
    return _grade_starts[g] + i


# equal-half pairs are read off the even-length subsequence of the same order
_split_lock = threading.Lock()
_split_table = []
_split_cursor = [0]


def _ensure_split(n):
    with _split_lock:
        while len(_split_table) <= n:
            s = enum_finseq(_split_cursor[0])
            _split_cursor[0] += 1
            if len(s) % 2 == 0:
                h = len(s) // 2
                _split_table.append((FinSeq(s[:h]), FinSeq(s[h:])))


def enum_split_pairs(n):
    """Return the n-th pair (s_n^-, s_n^+) of equal-length halves; index 0 is (<>, <>)."""
    if n < 0:
        raise ValueError("index must be a natural")
    _ensure_split(n)
    return _split_table[n]


def split_pair_index(minus, plus):
    if len(minus) != len(plus):
        raise ValueError("halves must have equal length")
    target = (FinSeq(minus), FinSeq(plus))
    whole = FinSeq(tuple(minus) + tuple(plus))
    # the pair sits at the count of even-length sequences enumerated before it
    bound = finseq_index(whole)
    _ensure_split(0)
    while _split_cursor[0] <= bound:
        _ensure_split(len(_split_table))
    i = 0
    while _split_table[i] != target:
        i += 1
    return i


# ---------------------------------------------------------------------------
# primes and the prime-power grid
# ---------------------------------------------------------------------------

_prime_lock = threading.Lock()
_sieve_limit = [1]
_primes = []
_prime_index = {}
_prime_powers = []    # sorted list of p**e, e >= 1, below _sieve_limit
_pp_lookup = {}       # p**e -> (index of p, e)


def _extend_sieve(limit):
    with _prime_lock:
        if limit <= _sieve_limit[0]:
            return
        limit = max(limit, 2 * _sieve_limit[0], 1024)
        flags = bytearray([1]) * (limit + 1)
        flags[0] = flags[1] = 0
        for i in range(2, int(limit ** 0.5) + 1):
            if flags[i]:
                flags[i * i::i] = bytearray(len(range(i * i, limit + 1, i)))
        _primes[:] = [i for i in range(2, limit + 1) if flags[i]]
        _prime_index.clear()
        _pp_lookup.clear()
        for idx, p in enumerate(_primes, start=1):
            _prime_index[p] = idx
            q, e = p, 1
            while q <= limit:
                _pp_lookup[q] = (idx, e)
                q *= p
                e += 1
        _prime_powers[:] = sorted(_pp_lookup)
        _sieve_limit[0] = limit


def nth_prime(n):
    """p_1 = 2, p_2 = 3, ..."""
    if n < 1:
        raise ValueError("primes are indexed from 1")
    while len(_primes) < n:
        _extend_sieve(max(64, 2 * _sieve_limit[0]))
    return _primes[n - 1]


def _row0_value(k):
    # k-th natural that is not a prime power; the prime powers thin out, so
    # the answer is below 2k + 16 for every k and a sieve up to there suffices
    limit = 2 * k + 16
    if limit > _sieve_limit[0]:
        _extend_sieve(limit)
    lo, hi = k, limit
    while lo < hi:
        mid = (lo + hi) // 2
        below = mid + 1 - bisect_left(_prime_powers, mid + 1)
        if below >= k + 1:
            hi = mid
        else:
            lo = mid + 1
    return lo


def beta_star(n, k):
    """Prime-power grid: row n >= 1 is p_n^(k+1); row 0 enumerates the rest of omega."""
    if n < 0 or k < 0:
        raise ValueError("arguments must be naturals")
    if n == 0:
        return _row0_value(k)
    return nth_prime(n) ** (k + 1)


def _iroot(m, e):
    """Largest r with r**e <= m (integer Newton step from above)."""
    if m < 2:
        return m
    r = 1 << -(-m.bit_length() // e)
    while True:
        s = ((e - 1) * r + m // r ** (e - 1)) // e
        if s >= r:
            return r
        r = s


def _as_prime_power(m):
    """(p, e) with m == p**e and p prime, or None.  Sieves only up to the base."""
    e = m.bit_length()
    while e >= 1:
        r = _iroot(m, e)
        if r >= 2 and r ** e == m:
            if r >= _sieve_limit[0]:
                _extend_sieve(r + 1)
            if r in _prime_index:
                return r, e
            return None
        e -= 1
    return None


def beta_star_inverse(m):
    """Return the unique (n, k) with beta_star(n, k) == m."""
    if m < 0:
        raise ValueError("argument must be a natural")
    if m >= _sieve_limit[0]:
        pp = _as_prime_power(m)
        if pp is not None:
            return _prime_index[pp[0]], pp[1] - 1
        # a row-0 value: its column is about m / 2, so the sieve is linear in it
        _extend_sieve(m + 1)
    hit = _pp_lookup.get(m)
    if hit is not None:
        idx, e = hit
        return idx, e - 1
    return 0, m - bisect_left(_prime_powers, m)


# ---------------------------------------------------------------------------
# range constraints and the row relabeling
# ---------------------------------------------------------------------------

class RangeConstraint:
    """Map from sequence index to a finite set of naturals.

    ``values(n)`` must be a subset of the range of the sequence ``seq(n)``;
    ``name`` is only used in reports.
    """

    def __init__(self, values, seq=None, name="custom"):
        self._values = values
        self.seq = seq
        self.name = name

    def __call__(self, n):
        return frozenset(self._values(n))

    def check_prefix(self, count):
        """Check the subset-of-range invariant on the first ``count`` indices."""
        if self.seq is None:
            return True
        for n in range(count):
            if not self(n) <= set(self.seq(n)):
                return False
        return True

    def check_rows(self, m_max, need, scan):
        """For every 1 <= m <= m_max, at least ``need`` indices below ``scan`` satisfy r(s_n) < m."""
        for m in range(1, m_max + 1):
            hits = 0
            for n in range(scan):
                if all(v < m for v in self(n)):
                    hits += 1
                    if hits >= need:
                        break
            if hits < need:
                return False
        return True


def empty_constraint():
    return RangeConstraint(lambda n: (), seq=enum_finseq, name="empty")


def range_constraint():
    return RangeConstraint(lambda n: enum_finseq(n), seq=enum_finseq, name="range")


def split_range_constraint():
    """r(s_n) = range(s_n^-) over the equal-half enumeration."""
    return RangeConstraint(
        lambda n: enum_split_pairs(n)[0],
        seq=lambda n: enum_split_pairs(n)[0] + enum_split_pairs(n)[1],
        name="split",
    )


class PairingFamily:
    """Bijection beta: omega^2 -> omega with increasing rows anchored by a range constraint.

    ``gamma`` is computed on demand and memoized.  ``search_bound`` caps the
    number of candidate rows examined for one gamma value.
    """

    def __init__(self, r, search_bound=10 ** 6):
        self.r = r
        self.search_bound = search_bound
        self._gamma = []
        self._row_of = {}
        self._free = []        # sorted unused labels below _next_label
        self._next_label = 0
        self._lock = threading.Lock()

    # -- row relabeling ---------------------------------------------------
    def _threshold(self, n):
        # least label lambda with r(s_n) contained in beta_star(lambda, 0)
        vals = self.r(n)
        if not vals:
            return 0
        top = max(vals)
        lam = 1
        # beta_star(lam, 0) = p_lam is increasing, so search upward
        while nth_prime(lam) <= top:
            lam += 1
            if lam > self.search_bound:
                raise ConstraintViolation("no row start exceeds %d" % top)
        return lam

    def _extend(self, n):
        while len(self._gamma) <= n:
            i = len(self._gamma)
            t = self._threshold(i)
            pos = bisect_left(self._free, t)
            if pos < len(self._free):
                lam = self._free.pop(pos)
            else:
                lam = max(t, self._next_label)
                for skipped in range(self._next_label, lam):
                    insort(self._free, skipped)
                self._next_label = lam + 1
            if lam > self.search_bound:
                raise ConstraintViolation(
                    "gamma_%d would need label %d beyond search bound %d"
                    % (i, lam, self.search_bound))
            self._gamma.append(lam)
            self._row_of[lam] = i

    def gamma(self, n):
        with self._lock:
            self._extend(n)
            return self._gamma[n]

    def row_of_label(self, lam):
        """The n with gamma_n == lam."""
        with self._lock:
            probes = 0
            while lam not in self._row_of:
                self._extend(len(self._gamma))
                probes += 1
                if probes > self.search_bound:
                    raise ConstraintViolation("label %d not reached within search bound" % lam)
            return self._row_of[lam]

    # -- the bijection ----------------------------------------------------
    def beta(self, n, k):
        return beta_star(self.gamma(n), k)

    def beta_star(self, n, k):
        return beta_star(n, k)

    def inverse(self, m):
        lam, k = beta_star_inverse(m)
        return self.row_of_label(lam), k

    def __call__(self, n, k):
        return self.beta(n, k)


def build_pairing(r=None, search_bound=10 ** 6):
    """Pairing family for the range constraint ``r`` (default: r == empty)."""
    if r is None:
        r = empty_constraint()
    pf = PairingFamily(r, search_bound=search_bound)
    if pf.gamma(0) != 0:
        raise ConstraintViolation("r(s_0) must be empty")
    return pf


def beta_inverse(pf, m):
    return pf.inverse(m)
