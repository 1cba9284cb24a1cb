"""Finite-horizon executor and judge for selection games.

An omega-length game is cut at ``spec.horizon``; every verdict is relative
to a finite challenge battery.  P1 cover moves are cover oracles, P2
responses are indices into them (one, or a finite list).  In the dual
games P1 names compact or finite sets and P2 answers with open sets.
"""

import json
import random
from functools import lru_cache
from fractions import Fraction

from .topology.descriptors import (
    OpenDesc, FinSet, Rect, Interval, Singleton, Cylinder, Whole,
    open_tree, open_from_tree, compact_tree, compact_from_tree, point_tree,
)
from .topology.spaces import ModelLimitation, ProductSpace, SumSpace
from .topology.covers import CoverOracle, battery_for, inside, CLASSES

__all__ = [
    "FULL", "MARKOV", "PREDETERMINED", "CONSTANT", "STRENGTHS", "P1", "P2",
    "GameSpec", "StrategyHandle", "IllegalMove", "CoercionError", "Transcript",
    "run_game", "run_dual_game", "judge", "strength_coercion",
    "adversary_cover", "adversary_p1", "scripted_p1", "serialize", "parse_transcript",
    "rejudge", "GameContext", "sub_context",
]

FULL, MARKOV, PREDETERMINED, CONSTANT = "Full", "Markov", "Predetermined", "Constant"
STRENGTHS = {CONSTANT: 0, PREDETERMINED: 1, MARKOV: 2, FULL: 3}
P1, P2 = "P1", "P2"
DUAL_MOVES = ("compact-move", "finite-move")


class IllegalMove(RuntimeError):
    pass


class CoercionError(ValueError):
    pass


class GameSpec:
    """selection: single|finite; p1_class: a cover class or a dual move kind;
    p2_target: a cover class or avoid-cover."""

    def __init__(self, selection, p1_class, p2_target, space, horizon, seed=0, battery=None):
        if selection not in ("single", "finite"):
            raise ValueError("selection must be 'single' or 'finite'")
        if p1_class not in CLASSES and p1_class not in DUAL_MOVES:
            raise ValueError("unknown P1 class %r" % (p1_class,))
        if p2_target not in CLASSES and p2_target != "avoid-cover":
            raise ValueError("unknown P2 target %r" % (p2_target,))
        if not isinstance(horizon, int) or horizon < 0:
            raise ValueError("horizon must be a natural")
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")
        self.selection = selection
        self.p1_class = p1_class
        self.p2_target = p2_target
        self.space = space
        self.horizon = horizon
        self.seed = seed
        self.battery = battery

    @property
    def dual(self):
        return self.p1_class in DUAL_MOVES

    def header(self):
        return {
            "selection": self.selection,
            "p1_class": self.p1_class,
            "p2_target": self.p2_target,
            "space": self.space.id,
            "horizon": self.horizon,
            "seed": self.seed,
        }


class StrategyHandle:
    """A strategy for one player.

    ``factory(ctx)`` builds the per-game callable, so bookkeeping never leaks
    between games.  Call signatures by strength (the engine feeds nothing else):
    Full ``f(history)``, Markov ``f(last, n)``, Predetermined ``f(n)``, Constant ``f()``.
    P2's history is P1's moves including the current one; P1's history is
    P2's earlier responses.
    """

    def __init__(self, owner, strength, arity, factory, name="strategy", params=None):
        if owner not in (P1, P2):
            raise ValueError("owner must be P1 or P2")
        if strength not in STRENGTHS:
            raise ValueError("unknown strength %r" % (strength,))
        if arity not in ("single", "finite"):
            raise ValueError("arity must be single or finite")
        self.owner, self.strength, self.arity = owner, strength, arity
        self.factory = factory
        self.name = name
        self.params = dict(params or {})

    def __repr__(self):
        return "<%s %s %s %s>" % (self.owner, self.strength, self.arity, self.name)

    def instantiate(self, ctx):
        return self.factory(ctx)

    def clone(self):
        return StrategyHandle(self.owner, self.strength, self.arity, self.factory, self.name, self.params)


class GameContext:
    """What a strategy factory may look at: the space, the seed, a debug ledger."""

    def __init__(self, spec=None, debug=False, space=None, seed=0):
        self.spec = spec
        self.space = spec.space if spec is not None else space
        self.seed = spec.seed if spec is not None else seed
        self.debug = debug
        self.book = {}

    def rng(self, salt):
        return random.Random("%d:%s" % (self.seed, salt))

    def note(self, n, record):
        """Bookkeeping for round n; kept (and serialized) only in debug mode."""
        if self.debug:
            self.book.setdefault(n, {}).update(record)


def sub_context(space, seed=0):
    """Context for a factor strategy driven inside a composite one."""
    return GameContext(space=space, seed=seed)


def _call(fn, strength, history, n):
    if strength == FULL:
        return fn(tuple(history))
    if strength == MARKOV:
        return fn(history[-1] if history else None, n)
    if strength == PREDETERMINED:
        return fn(n)
    return fn()


def strength_coercion(h, to):
    """View ``h`` as a strategy of (weakly) wider window ``to``; narrowing is refused."""
    if to not in STRENGTHS:
        raise CoercionError("unknown strength %r" % (to,))
    if STRENGTHS[to] < STRENGTHS[h.strength]:
        raise CoercionError("cannot view a %s strategy as %s" % (h.strength, to))
    if to == h.strength:
        return h.clone()
    src = h.strength
    is_p2 = h.owner == P2

    def factory(ctx):
        inner = h.instantiate(ctx)

        def narrowed(history, n):
            # the inner strategy only ever sees its own window
            if src == MARKOV:
                return inner(history[-1] if history else None, n)
            if src == PREDETERMINED:
                return inner(n)
            return inner()

        if to == FULL:
            if is_p2:
                return lambda history: narrowed(history, len(history) - 1)
            return lambda history: narrowed(history, len(history))
        if to == MARKOV:
            return lambda last, n: narrowed([last], n)
        return lambda n: narrowed([], n)

    return StrategyHandle(h.owner, to, h.arity, factory, name=h.name, params=h.params)


# ---------------------------------------------------------------------------
# transcripts
# ---------------------------------------------------------------------------

class Transcript:
    def __init__(self, spec, p1_name="", p2_name=""):
        self.spec = spec
        self.p1_name, self.p2_name = p1_name, p2_name
        self.rounds = []
        self.aborted = None
        self.report = None
        self.extras = {}

    def append(self, record):
        if self.aborted is not None:
            raise RuntimeError("transcript is closed")
        if len(self.rounds) >= self.spec.horizon:
            raise RuntimeError("transcript is full")
        self.rounds.append(record)

    def selections(self):
        """(round, index, element) triples of everything P2 picked, in order."""
        out = []
        for r in self.rounds:
            for idx, el in r["p2_elements"]:
                out.append((r["n"], idx, el))
        return out


def _p2_indices(resp, arity):
    if arity == "single":
        return [resp]
    return list(resp)


def run_game(spec, p1, p2, tamper=None, debug=False, legality="battery", sample=8):
    """Play ``spec.horizon`` rounds of a cover game.

    ``p1`` is a StrategyHandle or a list of cover oracles.  ``tamper(n, owner,
    history)`` may rewrite the history handed to a strategy (for window tests).
    ``legality`` is 'battery' (every P1 cover checked against its class
    battery each round), 'rotating' (``sample`` battery challenges per round,
    cycling through the battery) or 'none'.
    """
    if spec.dual:
        raise ValueError("use run_dual_game for dual games")
    if isinstance(p2, StrategyHandle) and p2.owner != P2:
        raise ValueError("second strategy must belong to P2")
    if p2.arity != spec.selection:
        raise ValueError("P2 arity %s does not match %s selection" % (p2.arity, spec.selection))
    ctx = GameContext(spec, debug)
    scripted = not isinstance(p1, StrategyHandle)
    if scripted and len(p1) < spec.horizon:
        raise ValueError("move list shorter than the horizon")
    f1 = None if scripted else p1.instantiate(ctx)
    f2 = p2.instantiate(ctx)
    t = Transcript(spec, "scripted" if scripted else p1.name, p2.name)
    t.context = ctx
    space = spec.space
    if legality not in ("battery", "rotating", "none"):
        raise ValueError("unknown legality mode %r" % (legality,))
    legal_battery = battery_for(space, spec.p1_class) if legality != "none" else []
    h1, h2 = [], []
    for n in range(spec.horizon):
        view = list(h2) if tamper is None else tamper(n, P1, list(h2))
        try:
            move = p1[n] if scripted else _call(f1, p1.strength, view, n)
        except IllegalMove as exc:
            t.aborted = {"round": n, "player": P1, "reason": "strategy failed: %s" % exc}
            break
        if not isinstance(move, CoverOracle):
            t.aborted = {"round": n, "player": P1, "reason": "move is not a cover"}
            break
        checks = legal_battery
        if legality == "rotating" and len(legal_battery) > sample:
            checks = [legal_battery[(n * sample + i) % len(legal_battery)] for i in range(sample)]
        bad = next((ch for ch in checks if not move.sound_on(ch)), None)
        if bad is not None:
            t.aborted = {"round": n, "player": P1,
                         "reason": "cover %s misses challenge %r" % (move.label, bad)}
            break
        h1.append(move)
        view = list(h1) if tamper is None else tamper(n, P2, list(h1))
        try:
            resp = _call(f2, p2.strength, view, n)
            idxs = _p2_indices(resp, p2.arity)
        except (ModelLimitation, IllegalMove, TypeError) as exc:
            t.aborted = {"round": n, "player": P2, "reason": "strategy failed: %s" % exc}
            break
        if not all(move.has_index(i) for i in idxs):
            t.aborted = {"round": n, "player": P2, "reason": "index out of range: %r" % (resp,)}
            break
        els = [(i, move[i]) for i in idxs]
        rec = {"n": n, "p1_ref": move.label, "p2": resp if p2.arity == "single" else list(idxs),
               "p2_elements": els}
        if n in ctx.book:
            rec["debug"] = ctx.book[n]
        t.append(rec)
        h2.append(els[0][1] if p2.arity == "single" else tuple(e for _, e in els))
    t.report = judge(t, spec.battery if spec.battery is not None else battery_for(space, spec.p2_target),
                     spec.p2_target)
    return t


def run_dual_game(spec, p1, p2, tamper=None, debug=False):
    """Compact-open or finite-open game: P1 names sets, P2 answers with open sets containing them."""
    if not spec.dual:
        raise ValueError("run_dual_game needs a dual P1 move kind")
    ctx = GameContext(spec, debug)
    f1 = p1.instantiate(ctx)
    f2 = p2.instantiate(ctx)
    t = Transcript(spec, p1.name, p2.name)
    t.context = ctx
    space = spec.space
    h1, h2 = [], []
    for n in range(spec.horizon):
        view = list(h2) if tamper is None else tamper(n, P1, list(h2))
        try:
            K = _call(f1, p1.strength, view, n)
        except (ModelLimitation, IllegalMove) as exc:
            t.aborted = {"round": n, "player": P1, "reason": "strategy failed: %s" % exc}
            break
        ok = (isinstance(K, FinSet) if spec.p1_class == "finite-move" else space.compact_ok(K))
        if not ok or not space.compact_ok(K):
            t.aborted = {"round": n, "player": P1, "reason": "not a %s: %r" % (spec.p1_class, K)}
            break
        h1.append(K)
        view = list(h1) if tamper is None else tamper(n, P2, list(h1))
        try:
            U = _call(f2, p2.strength, view, n)
        except (ModelLimitation, IllegalMove) as exc:
            t.aborted = {"round": n, "player": P2, "reason": "strategy failed: %s" % exc}
            break
        if not isinstance(U, OpenDesc) or not space.contains(K, U):
            t.aborted = {"round": n, "player": P2, "reason": "open set does not contain %r" % (K,)}
            break
        rec = {"n": n, "p1_set": K, "p2_open": U, "p2_elements": [(0, U)]}
        if n in ctx.book:
            rec["debug"] = ctx.book[n]
        t.append(rec)
        h2.append(U)
    if spec.battery is not None:
        battery = spec.battery
    elif spec.p1_class == "compact-move":
        battery = battery_for(space, "K")
    else:
        battery = battery_for(space, "O")
    t.report = judge(t, battery, "avoid-cover")
    return t


# ---------------------------------------------------------------------------
# judging
# ---------------------------------------------------------------------------

def _sweep_region(space):
    """(summand, region) searched for an uncovered point when the battery is exhausted."""
    if isinstance(space, SumSpace):
        for i, s in enumerate(space.summands):
            if getattr(s, "lo", None) is not None and getattr(s, "hi", None) is not None:
                return i, (s.lo, s.hi)
        return None
    if getattr(space, "lo", None) is not None and getattr(space, "hi", None) is not None:
        return None, (space.lo, space.hi)
    return None


def judge_elements(space, selections, battery, target):
    verdicts = []
    for ch in battery:
        hit = None
        for n, idx, el in selections:
            if inside(space, ch, el):
                hit = [n, idx]
                break
        verdicts.append({"challenge": ch, "covered_at": hit})
    uncovered = [v["challenge"] for v in verdicts if v["covered_at"] is None]
    report = {"target": target, "battery_size": len(battery), "battery_relative": True,
              "verdicts": verdicts}
    if target == "avoid-cover":
        exhibited = None
        if not uncovered:
            where = _sweep_region(space)
            if where is not None:
                summand, region = where
                opens = [el for _, _, el in selections]
                if summand is None:
                    exhibited = space.uncovered_point(opens, region)
                else:
                    exhibited = space.uncovered_point(opens, region, summand)
        report["uncovered"] = uncovered[0] if uncovered else None
        report["exhibited"] = exhibited
        report["p2_wins"] = bool(uncovered) or exhibited is not None
    else:
        report["uncovered"] = uncovered[0] if uncovered else None
        report["p2_wins"] = not uncovered
    return report


def judge(t, battery, target):
    for ch in battery:
        if target in ("O", "Lambda", "Gamma") and not (isinstance(ch, FinSet) and len(ch.points) == 1):
            raise ValueError("battery member %r is not a point challenge" % (ch,))
    rep = judge_elements(t.spec.space, t.selections(), battery, target)
    if t.aborted is not None:
        rep["aborted"] = t.aborted
    return rep


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _challenge_tree(ch):
    if isinstance(ch, OpenDesc):
        return open_tree(ch)
    return compact_tree(ch)


def _challenge_from_tree(t):
    if isinstance(t, dict) and "union" in t:
        return open_from_tree(t)
    return compact_from_tree(t)


def _dumps(obj):
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _report_tree(rep):
    out = {
        "type": "report",
        "target": rep["target"],
        "p2_wins": rep["p2_wins"],
        "battery_relative": True,
        "battery_size": rep["battery_size"],
        "verdicts": [{"challenge": _challenge_tree(v["challenge"]), "covered_at": v["covered_at"]}
                     for v in rep["verdicts"]],
        "uncovered": None if rep.get("uncovered") is None else _challenge_tree(rep["uncovered"]),
    }
    if "exhibited" in rep:
        ex = rep["exhibited"]
        out["exhibited"] = None if ex is None else point_tree(ex)
    if "aborted" in rep:
        out["aborted"] = rep["aborted"]
    return out


def serialize(t):
    """JSON Lines: header, one record per round, report."""
    lines = []
    head = {"type": "header", "spec": t.spec.header(), "p1": t.p1_name, "p2": t.p2_name}
    if t.extras:
        head["extras"] = t.extras
    lines.append(_dumps(head))
    for r in t.rounds:
        if "p1_set" in r:
            rec = {"type": "round", "n": r["n"], "p1": {"set": compact_tree(r["p1_set"])},
                   "p2": {"open": open_tree(r["p2_open"])}}
        else:
            rec = {"type": "round", "n": r["n"],
                   "p1": {"ref": r["p1_ref"],
                          "elements": [[i, open_tree(el)] for i, el in r["p2_elements"]]},
                   "p2": r["p2"]}
        if "debug" in r:
            rec["debug"] = r["debug"]
        lines.append(_dumps(rec))
    if t.aborted is not None:
        lines.append(_dumps({"type": "abort", **t.aborted}))
    lines.append(_dumps(_report_tree(t.report)))
    return "\n".join(lines) + "\n"


class ParsedTranscript:
    def __init__(self, header, rounds, report, aborted):
        self.header, self.rounds, self.report, self.aborted = header, rounds, report, aborted

    def selections(self):
        out = []
        for r in self.rounds:
            if isinstance(r["p2"], dict):
                out.append((r["n"], 0, open_from_tree(r["p2"]["open"])))
            else:
                for i, tree in r["p1"]["elements"]:
                    out.append((r["n"], i, open_from_tree(tree)))
        return out

    def battery(self):
        return [_challenge_from_tree(v["challenge"]) for v in self.report["verdicts"]]


def parse_transcript(text):
    header, rounds, report, aborted = None, [], None, None
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        kind = rec.get("type")
        if kind == "header":
            header = rec
        elif kind == "round":
            rounds.append(rec)
        elif kind == "abort":
            aborted = rec
        elif kind == "report":
            report = rec
        else:
            raise ValueError("unknown record type %r" % (kind,))
    if header is None or report is None:
        raise ValueError("transcript needs a header and a report")
    return ParsedTranscript(header, rounds, report, aborted)


def rejudge(parsed, space):
    """Judge a parsed transcript again from its own records."""
    rep = judge_elements(space, parsed.selections(), parsed.battery(), parsed.report["target"])
    if parsed.aborted is not None:
        rep["aborted"] = {k: v for k, v in parsed.aborted.items() if k != "type"}
    return _report_tree(rep)


# ---------------------------------------------------------------------------
# seeded adversaries
# ---------------------------------------------------------------------------

def _decoy_atom(space, rng):
    from .topology.spaces import DiscreteN, BaireModel, _LineModel
    if isinstance(space, ProductSpace):
        return Rect([OpenDesc([_decoy_atom(f, rng)]) for f in space.factors])
    if isinstance(space, DiscreteN):
        return Singleton(rng.randrange(200, 400))
    if isinstance(space, BaireModel):
        return Cylinder([rng.randrange(50, 60), rng.randrange(10)])
    if isinstance(space, _LineModel):
        c = Fraction(rng.randrange(-400, 400), 4)
        return Interval(c, c + Fraction(1, 8))
    return Whole()


def _l_split(space, R, rng):
    # two rectangles, neither containing the box, jointly covering it
    (a,) = R.atoms
    fx = a.factors[0]
    if len(fx.atoms) != 1 or not isinstance(fx.atoms[0], Interval):
        return R
    iv = fx.atoms[0]
    lo, hi = iv.lo, iv.hi
    mid = lo + (hi - lo) * Fraction(rng.randrange(3, 6), 8)
    eps = (hi - lo) / 16
    left = Rect([OpenDesc([Interval(lo, mid + eps)])] + list(a.factors[1:]))
    right = Rect([OpenDesc([Interval(mid - eps, hi)])] + list(a.factors[1:]))
    return OpenDesc([left, right])


def adversary_cover(space, cls, seed, n, decoys=3, label=None):
    """Seeded cover: tight expansions of each challenge, decoy unions, decoy elements up front."""
    tag = "%d:%d" % (seed, n)
    memo = {}

    def selector(ch):
        U = memo.get(ch)
        if U is None:
            U = memo[ch] = _adversary_pick(space, tag, ch)
        return U

    c = CoverOracle(space, cls, selector, label=label or "adv[%s]" % tag)
    rng = random.Random("decoys:" + tag)
    for _ in range(decoys):
        c.index_of(OpenDesc([_decoy_atom(space, rng)]))
    return c


@lru_cache(maxsize=1 << 16)
def _adversary_pick(space, tag, ch):
    rng = random.Random("%s:%r" % (tag, ch))
    level = 1 + rng.randrange(4)
    if isinstance(space, ProductSpace):
        box = space.box(ch)
        U, _ = space.nbhd(box, level)
        if rng.random() < 0.5:
            U = _l_split(space, U, rng)
    else:
        U, _ = space.nbhd(ch, level)
    if rng.random() < 0.3:
        U = OpenDesc(U.atoms + (_decoy_atom(space, rng),))
    return U


def adversary_p1(space, cls, seed, decoys=3):
    """Predetermined P1 playing a fresh seeded cover each round."""
    def factory(ctx):
        return lambda n: adversary_cover(space, cls, seed, n, decoys)
    return StrategyHandle(P1, PREDETERMINED, "single", factory, name="adversary(%d)" % seed)


def scripted_p1(moves, name="scripted"):
    def factory(ctx):
        return lambda n: moves[n]
    return StrategyHandle(P1, PREDETERMINED, "single", factory, name=name)
