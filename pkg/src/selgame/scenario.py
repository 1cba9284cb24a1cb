"""Scenario files: which space, which game, which strategies, how long.

A scenario is a JSON object::

    {"name": "...", "space": "real_line_2",
     "game": {"selection": "single", "p1_class": "K", "p2_target": "K"},
     "horizon": 64, "seed": 0,
     "battery": null | "<registry battery name>" | [descriptor trees],
     "p1": {"strategy": "adversary", "params": {...}},
     "p2": {"strategy": "product_k_rothberger", "params": {...}},
     "legality": "battery" | "rotating" | "none", "sample": 8, "debug": false}

Strategies are named constructors from ``P1_STRATEGIES`` and ``P2_STRATEGIES``.
"""

import json
import os
import sys
from fractions import Fraction
from dataclasses import dataclass, field
from importlib import resources

from .engine import (
    GameSpec, StrategyHandle, IllegalMove, P1, P2, FULL, run_game, run_dual_game,
    adversary_cover, adversary_p1, scripted_p1, judge, _call,
)
from .topology.covers import CoverOracle, SelectorFailure, battery_for
from .topology.descriptors import (
    DescriptorError, FinSet, whole, point_from_tree, compact_from_tree, open_from_tree,
)
from .topology.registry import RegistryError
from .topology.spaces import ModelLimitation, ProductSpace, TypeMismatch, point
from .witnesses import WitnessError, family_from_spec
from .strategies import (
    markov_from_cofinality, markov_falsifier, FalsifierImpossible, baire_p1, baire_escape, bounded_random_p2,
    chq_p1_compact_open, chq_p1_finite, chq_p2_adversary, chq_p2_finite_open, chq_measure_ledger,
)

__all__ = [
    "MAX_HORIZON", "ScenarioError", "Scenario", "load_scenario", "parse_scenario",
    "shipped_scenarios", "build_game", "run_scenario", "duel", "summary_lines",
    "P1_STRATEGIES", "P2_STRATEGIES", "human_player",
]

MAX_HORIZON = 4096
KEYS = {"name", "space", "game", "horizon", "seed", "battery", "p1", "p2",
        "legality", "sample", "debug", "description"}


class ScenarioError(ValueError):
    """The scenario does not resolve against the registry or is malformed."""


@dataclass
class Scenario:
    name: str
    space: str
    selection: str
    p1_class: str
    p2_target: str
    horizon: int
    seed: int
    p1: dict
    p2: dict
    battery: object = None
    legality: str = "battery"
    sample: int = 8
    debug: bool = False
    source: str = "<memory>"
    raw: dict = field(default_factory=dict, repr=False)


def _scenario_dir():
    return resources.files("selgame").joinpath("data", "scenarios")


def shipped_scenarios():
    return sorted(p.name[:-5] for p in _scenario_dir().iterdir() if p.name.endswith(".json"))


def _strategy_ref(raw, who, table):
    ref = raw.get(who)
    if isinstance(ref, str):
        ref = {"strategy": ref}
    if not isinstance(ref, dict) or "strategy" not in ref:
        raise ScenarioError("%s needs {strategy, params}" % who)
    if ref["strategy"] not in table:
        raise ScenarioError("unknown %s strategy %r (known: %s)"
                            % (who, ref["strategy"], ", ".join(sorted(table))))
    params = ref.get("params", {})
    if not isinstance(params, dict):
        raise ScenarioError("%s params must be an object" % who)
    return {"strategy": ref["strategy"], "params": params}


def parse_scenario(raw, reg, source="<memory>"):
    """Check a decoded scenario object against the registry and return a Scenario."""
    if not isinstance(raw, dict):
        raise ScenarioError("%s: a scenario is a JSON object" % source)
    extra = set(raw) - KEYS
    if extra:
        raise ScenarioError("%s: unknown keys %s" % (source, sorted(extra)))
    for k in ("space", "game", "horizon", "p1", "p2"):
        if k not in raw:
            raise ScenarioError("%s: missing %r" % (source, k))
    try:
        reg.entry(raw["space"])
    except RegistryError as exc:
        raise ScenarioError("%s: %s" % (source, exc)) from None
    game = raw["game"]
    if not isinstance(game, dict):
        raise ScenarioError("%s: game must be an object" % source)
    h = raw["horizon"]
    if not isinstance(h, int) or isinstance(h, bool) or not 0 <= h <= MAX_HORIZON:
        raise ScenarioError("%s: horizon must be an integer in [0, %d]" % (source, MAX_HORIZON))
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        raise ScenarioError("%s: seed must be a 64-bit natural" % source)
    if raw.get("legality", "battery") not in ("battery", "rotating", "none"):
        raise ScenarioError("%s: legality must be battery, rotating or none" % source)
    sample = raw.get("sample", 8)
    if not isinstance(sample, int) or sample < 1:
        raise ScenarioError("%s: sample must be a positive integer" % source)
    sc = Scenario(
        name=raw.get("name", os.path.basename(source)),
        space=raw["space"],
        selection=game.get("selection", "single"),
        p1_class=game.get("p1_class", "O"),
        p2_target=game.get("p2_target", game.get("p1_class", "O")),
        horizon=h, seed=seed,
        p1=_strategy_ref(raw, "p1", P1_STRATEGIES),
        p2=_strategy_ref(raw, "p2", P2_STRATEGIES),
        battery=raw.get("battery"),
        legality=raw.get("legality", "battery"),
        sample=sample,
        debug=bool(raw.get("debug", False)),
        source=source, raw=raw,
    )
    try:
        GameSpec(sc.selection, sc.p1_class, sc.p2_target, None, sc.horizon, sc.seed)
    except ValueError as exc:
        raise ScenarioError("%s: %s" % (source, exc)) from None
    _battery(sc, reg.get(sc.space))
    return sc


def load_scenario(ref, reg):
    """Load a scenario from a file path or by the name of a shipped scenario."""
    if os.path.exists(ref):
        path, text = ref, None
    else:
        name = ref[:-5] if ref.endswith(".json") else ref
        res = _scenario_dir().joinpath(name + ".json")
        if not res.is_file():
            raise ScenarioError("no scenario file or shipped scenario named %r" % (ref,))
        path, text = "scenario:" + name, res.read_text(encoding="utf-8")
    try:
        if text is None:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        raw = json.loads(text)
    except OSError as exc:
        raise ScenarioError("cannot read %s: %s" % (path, exc)) from None
    except json.JSONDecodeError as exc:
        raise ScenarioError("%s: line %d column %d: %s" % (path, exc.lineno, exc.colno, exc.msg)) from None
    return parse_scenario(raw, reg, source=path)


def _battery(sc, space):
    b = sc.battery
    if b is None:
        return None
    if isinstance(b, str):
        if b not in space.batteries:
            raise ScenarioError("%s: space %s has no battery %r" % (sc.source, space.id, b))
        if b == "points":
            return [FinSet([p]) for p in space.battery("points")]
        return space.battery(b)
    if isinstance(b, list):
        out = []
        try:
            for t in b:
                out.append(open_from_tree(t) if isinstance(t, dict) and "union" in t
                           else compact_from_tree(t))
        except (DescriptorError, ValueError, TypeError) as exc:
            raise ScenarioError("%s: bad battery member: %s" % (sc.source, exc)) from None
        return out
    raise ScenarioError("%s: battery must be a name or a list of descriptor trees" % sc.source)


# ---------------------------------------------------------------------------
# strategy constructors
# ---------------------------------------------------------------------------

def _family(space, params):
    if "witness" in params:
        spec = space.witness_specs.get(params["witness"])
        if spec is None:
            raise ScenarioError("space %s has no witness %r" % (space.id, params["witness"]))
        return family_from_spec(space, spec, name=params["witness"])
    if "family" in params:
        try:
            return family_from_spec(space, params["family"], name=params.get("name", ""))
        except (KeyError, WitnessError, ValueError) as exc:
            raise ScenarioError("bad family %r: %s" % (params["family"], exc)) from None
    raise ScenarioError("markov_from_cofinality needs a witness name or a family")


def _markov(space, params, sc):
    return markov_from_cofinality(_family(space, params), params.get("arity", sc.selection))


def _product(which):
    def build(space, params, sc):
        from .suites import product_strategies, PRODUCT_SCALE
        if not isinstance(space, ProductSpace) or len(space.factors) != 2:
            raise ScenarioError("%s needs a product of two spaces" % which)
        names = ["product_k_rothberger", "markov_product_k_rothberger",
                 "product_k_menger", "markov_product_k_menger"]
        sel, h = product_strategies(space, params.get("scale", PRODUCT_SCALE))[names.index(which)]
        if sel != sc.selection:
            raise ScenarioError("%s plays %s selections, the game asks for %s" % (which, sel, sc.selection))
        return h
    return build


P2_STRATEGIES = {
    "markov_from_cofinality": _markov,
    "product_k_rothberger": _product("product_k_rothberger"),
    "markov_product_k_rothberger": _product("markov_product_k_rothberger"),
    "product_k_menger": _product("product_k_menger"),
    "markov_product_k_menger": _product("markov_product_k_menger"),
    "chq_adversary": lambda space, params, sc: chq_p2_adversary(sc.seed, params.get("extras", 2)),
    "chq_finite_open": lambda space, params, sc: chq_p2_finite_open(),
    "bounded_random": lambda space, params, sc: bounded_random_p2(sc.seed, params.get("bound", 4)),
}


def _falsifier(space, params, sc, p2):
    try:
        bad = compact_from_tree(params["bad"])
        xs = [point_from_tree(p) for p in params["points"]]
    except (KeyError, DescriptorError, ValueError, TypeError) as exc:
        raise ScenarioError("falsifier needs 'bad' and 'points' trees: %s" % exc) from None
    if len(xs) < sc.horizon:
        raise ScenarioError("falsifier has %d points for horizon %d" % (len(xs), sc.horizon))
    try:
        moves = markov_falsifier(p2, space, bad, xs, sc.horizon, cls=sc.p1_class, seed=sc.seed)
    except (FalsifierImpossible, ValueError, ModelLimitation) as exc:
        raise ScenarioError("falsifier cannot be built: %s" % exc) from None
    return scripted_p1(moves, name="falsifier")


P1_STRATEGIES = {
    "adversary": lambda space, params, sc, p2: adversary_p1(
        space, params.get("cls", sc.p1_class), sc.seed, params.get("decoys", 3)),
    "falsifier": _falsifier,
    "chq_compact_open": lambda space, params, sc, p2: chq_p1_compact_open(),
    "chq_finite": lambda space, params, sc, p2: chq_p1_finite(sc.seed, params.get("extras", 2)),
    "baire_cylinders": lambda space, params, sc, p2: baire_p1(),
}


def build_game(sc, reg, seed=None):
    """(GameSpec, P1 handle, P2 handle) for the scenario, optionally reseeded."""
    if seed is not None and seed != sc.seed:
        sc = Scenario(**{**sc.__dict__, "seed": seed})
    space = reg.get(sc.space)
    spec = GameSpec(sc.selection, sc.p1_class, sc.p2_target, space, sc.horizon, sc.seed,
                    battery=_battery(sc, space))
    p2 = P2_STRATEGIES[sc.p2["strategy"]](space, sc.p2["params"], sc)
    p1 = P1_STRATEGIES[sc.p1["strategy"]](space, sc.p1["params"], sc, p2)
    return spec, p1, p2


# ---------------------------------------------------------------------------
# a human at the keyboard
# ---------------------------------------------------------------------------

def _stdin_ask(prompt):
    sys.stderr.write(prompt)
    sys.stderr.flush()
    line = sys.stdin.readline()
    return None if line == "" else line


def _stderr_say(text):
    sys.stderr.write(text + "\n")


def _choose(ask, say, prompt, size, many=False):
    """Read an index (or comma-separated indices) below ``size``; re-prompt until legal."""
    while True:
        line = ask(prompt)
        if line is None:
            raise IllegalMove("input closed, player quit")
        parts = [p.strip() for p in line.replace(",", " ").split()]
        try:
            idxs = [int(p) for p in parts]
        except ValueError:
            say("  not a number: %r" % line.strip())
            continue
        if not idxs or (not many and len(idxs) != 1):
            say("  enter %s" % ("one or more indices" if many else "exactly one index"))
            continue
        bad = [i for i in idxs if not 0 <= i < size]
        if bad:
            say("  out of range: %s (choose 0..%d)" % (bad, size - 1))
            continue
        return idxs if many else idxs[0]


def _materialize(cover, battery):
    """Touch the cover at every battery challenge so its elements can be listed."""
    for ch in battery:
        try:
            cover.select(ch)
        except (SelectorFailure, ModelLimitation, TypeMismatch):
            pass
    return [cover[i] for i in range(cover.size())]


def _human_p2_cover(spec, ask, say):
    battery = spec.battery if spec.battery is not None else battery_for(spec.space, spec.p2_target)
    many = spec.selection == "finite"

    def factory(ctx):
        def f(history):
            n = len(history) - 1
            cover = history[-1]
            els = _materialize(cover, battery)
            say("round %d: P1 plays cover %s" % (n, cover.label))
            for i, el in enumerate(els):
                say("  [%d] %r" % (i, el))
            return _choose(ask, say, "P2 selects %s: " % ("indices" if many else "an index"),
                           len(els), many)
        return f
    return StrategyHandle(P2, FULL, spec.selection, factory, name="human")


def _human_p1_cover(spec, ask, say, options=5):
    space, cls = spec.space, spec.p1_class

    def factory(ctx):
        def f(history):
            n = len(history)
            if history:
                say("round %d: P2 took %r" % (n - 1, history[-1]))
            menu = [adversary_cover(space, cls, s, n) for s in range(options)]
            menu.append(CoverOracle(space, cls, lambda ch: whole(), label="whole"))
            say("round %d: choose a cover" % n)
            for i, c in enumerate(menu):
                say("  [%d] %s" % (i, c.label))
            return menu[_choose(ask, say, "P1 plays: ", len(menu))]
        return f
    return StrategyHandle(P1, FULL, "single", factory, name="human")


def _human_dual(owner, spec, builtin, ask, say):
    """Menu player for dual games: the scenario strategy's move, then alternatives."""
    space = spec.space

    def alternatives(last):
        if owner == P2:
            out = []
            for level in range(4):
                try:
                    U, _ = space.nbhd(last, level)
                except (ModelLimitation, TypeMismatch):
                    break
                if U not in out:
                    out.append(U)
            return out
        if spec.p1_class == "finite-move":
            return [K for K in space.battery("finite") if isinstance(K, FinSet)]
        return [K for K in space.battery("compact") if space.compact_ok(K)]

    def factory(ctx):
        inner = builtin.instantiate(ctx)

        def f(history):
            n = len(history) - 1 if owner == P2 else len(history)
            suggested = _call(inner, builtin.strength, list(history), n)
            if owner == P2:
                say("round %d: P1 names %r" % (n, history[-1]))
                menu = [suggested] + [U for U in alternatives(history[-1]) if U != suggested]
            else:
                if history:
                    say("round %d: P2 answered %r" % (n - 1, history[-1]))
                menu = [suggested] + [K for K in alternatives(None) if K != suggested]
            for i, m in enumerate(menu):
                say("  [%d] %r%s" % (i, m, "  (scenario strategy)" if i == 0 else ""))
            return menu[_choose(ask, say, "%s plays: " % owner, len(menu))]
        return f
    return StrategyHandle(owner, FULL, "single", factory, name="human")


def human_player(owner, spec, builtin, ask=None, say=None):
    """Interactive stand-in for ``owner``; ``ask`` returns a line or None at end of input."""
    ask = ask or _stdin_ask
    say = say or _stderr_say
    if spec.dual:
        return _human_dual(owner, spec, builtin, ask, say)
    if owner == P2:
        return _human_p2_cover(spec, ask, say)
    return _human_p1_cover(spec, ask, say)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def _ledger_extras(t):
    rows = chq_measure_ledger([r["p2_open"] for r in t.rounds])
    total = rows[-1][2] if rows else 0
    return {
        "measure_ledger": [[n, str(a), str(b), str(c)] for n, (a, b, c) in enumerate(rows)],
        "cumulative_length": str(total),
        "below_half": bool(total < 0.5) if rows else True,
    }


def run_scenario(sc, reg, seed=None, interactive=None, ask=None, say=None):
    """Play the scenario once and return its Transcript."""
    spec, p1, p2 = build_game(sc, reg, seed)
    if interactive == P1:
        p1 = human_player(P1, spec, p1, ask, say)
    elif interactive == P2:
        p2 = human_player(P2, spec, p2, ask, say)
    elif interactive is not None:
        raise ScenarioError("interactive side must be P1 or P2")
    if spec.dual:
        t = run_dual_game(spec, p1, p2, debug=sc.debug)
    else:
        t = run_game(spec, p1, p2, debug=sc.debug, legality=sc.legality, sample=sc.sample)
    if spec.dual and sc.p2["strategy"] == "chq_finite_open" and interactive != P2:
        t.extras = _ledger_extras(t)
    if sc.p1["strategy"] == "baire_cylinders" and interactive != P1 and t.aborted is None:
        _judge_escape(t, sc.p2["params"].get("bound", 4))
    return t


def _judge_escape(t, bound):
    """Judge a Baire play against the escaping sequence built from P2's own picks."""
    per = [[el.atoms[0].t for _, el in r["p2_elements"]] for r in t.rounds]
    f = baire_escape(per, bound, len(t.rounds))
    t.extras = {"escape": list(f)}
    t.report = judge(t, [point(f)], t.spec.p2_target)


def duel(sc, reg, seeds):
    """Play the scenario once per seed in 0..seeds-1; returns (seed, transcript) pairs in seed order."""
    return [(s, run_scenario(sc, reg, seed=s)) for s in range(seeds)]


def summary_lines(t):
    """Human-readable report: winner, coverage, named challenge, any abort."""
    rep = t.report
    covered = sum(1 for v in rep["verdicts"] if v["covered_at"] is not None)
    winner = "P2" if rep["p2_wins"] else "P1"
    out = ["rounds played: %d of %d" % (len(t.rounds), t.spec.horizon),
           "battery covered: %d/%d (%s)" % (covered, rep["battery_size"], rep["target"]),
           "winner: %s" % winner]
    if rep.get("uncovered") is not None:
        out.append("uncovered challenge: %r" % (rep["uncovered"],))
    if rep.get("exhibited") is not None:
        out.append("uncovered point: %r" % (rep["exhibited"],))
    if t.extras.get("cumulative_length") is not None:
        total = Fraction(t.extras["cumulative_length"])
        out.append("cumulative interval length: ~%.6f, below 1/2: %s" % (total, t.extras["below_half"]))
    if t.extras.get("escape") is not None:
        out.append("escape prefix: %s" % t.extras["escape"][:16])
    if t.aborted is not None:
        out.append("aborted at round %d by %s: %s"
                   % (t.aborted["round"], t.aborted["player"], t.aborted["reason"]))
    return out
