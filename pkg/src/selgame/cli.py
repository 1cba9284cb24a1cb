"""Command line front end.

    selgame spaces list
    selgame play <scenario> [--interactive=P1|P2] [--out FILE] [--seed N]
    selgame verify <suite>|--all [--json]
    selgame duel <scenario> --seeds K [--json]

Exit codes: 0 success, 2 configuration error, 3 aborted game or failed check.
"""

import argparse
import json
import sys

from .engine import serialize
from .scenario import ScenarioError, load_scenario, run_scenario, duel, summary_lines, shipped_scenarios
from .topology.descriptors import compact_tree, open_tree
from .topology.registry import RegistryError, load_registry

OK, CONFIG, ABORTED = 0, 2, 3


def _err(msg):
    sys.stderr.write("selgame: %s\n" % msg)


def cmd_spaces_list(args):
    reg = load_registry()
    rows = reg.rows()
    if args.json:
        print(json.dumps(rows, indent=2))
        return OK
    head = ("id", "kind", "flags", "witnesses", "batteries")
    table = [head] + [(
        r["id"], r["kind"], ",".join(r["flags"]) or "-", ",".join(r["witnesses"]) or "-",
        " ".join("%s:%d" % kv for kv in r["batteries"].items()) or "-",
    ) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(head))]
    for row in table:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return OK


def cmd_play(args):
    reg = load_registry()
    sc = load_scenario(args.scenario, reg)
    t = run_scenario(sc, reg, seed=args.seed, interactive=args.interactive)
    text = serialize(t)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise ScenarioError("cannot write %s: %s" % (args.out, exc)) from None
        for line in summary_lines(t):
            print(line)
    else:
        sys.stdout.write(text)
        for line in summary_lines(t):
            sys.stderr.write(line + "\n")
    return ABORTED if t.aborted is not None else OK


def cmd_verify(args):
    from .suites import SUITES, TOTAL_LIMIT, run_suite, shipped_registry
    if args.all == (args.suite is not None):
        raise ScenarioError("give one suite name or --all")
    if args.suite is not None and args.suite not in SUITES:
        raise ScenarioError("unknown suite %r (known: %s)" % (args.suite, ", ".join(SUITES)))
    names = list(SUITES) if args.all else [args.suite]
    reg = shipped_registry()
    results = []
    for name in names:
        r = run_suite(name, reg)
        results.append(r)
        if not args.json:
            print(r.line(), flush=True)
    total = sum(r.seconds for r in results)
    passed = all(r.passed for r in results) and (not args.all or total < TOTAL_LIMIT)
    if args.json:
        print(json.dumps({"passed": passed, "seconds": round(total, 3),
                          "suites": [dict(r.as_dict(), seconds=round(r.seconds, 3)) for r in results]},
                         indent=2))
    else:
        print("%-10s %s  %6.2fs%s" % ("total", "PASS" if passed else "FAIL", total,
                                      " / %4ds" % TOTAL_LIMIT if args.all else ""))
    return OK if passed else ABORTED


def _tree(ch):
    from .topology.descriptors import OpenDesc
    return open_tree(ch) if isinstance(ch, OpenDesc) else compact_tree(ch)


def cmd_duel(args):
    if args.seeds < 1:
        raise ScenarioError("--seeds must be positive")
    reg = load_registry()
    sc = load_scenario(args.scenario, reg)
    games = duel(sc, reg, args.seeds)
    rows = []
    for seed, t in games:
        rep = t.report
        covered = sum(1 for v in rep["verdicts"] if v["covered_at"] is not None)
        rows.append({
            "seed": seed,
            "winner": "P2" if rep["p2_wins"] else "P1",
            "covered": covered,
            "battery_size": rep["battery_size"],
            "uncovered": None if rep.get("uncovered") is None else rep["uncovered"],
            "aborted": t.aborted,
        })
    wins = sum(1 for r in rows if r["winner"] == "P2")
    aborted = sum(1 for r in rows if r["aborted"] is not None)
    if args.json:
        out = [dict(r, uncovered=None if r["uncovered"] is None else _tree(r["uncovered"])) for r in rows]
        print(json.dumps({"scenario": sc.name, "seeds": args.seeds, "p2_wins": wins,
                          "aborted": aborted, "games": out}, indent=2))
    else:
        for r in rows:
            line = "seed %d: %s wins, covered %d/%d" % (r["seed"], r["winner"], r["covered"], r["battery_size"])
            if r["uncovered"] is not None:
                line += ", uncovered challenge %r" % (r["uncovered"],)
            if r["aborted"] is not None:
                line += ", aborted: %s" % r["aborted"]["reason"]
            print(line)
        print("%s: P2 won %d of %d games" % (sc.name, wins, len(rows)))
    return ABORTED if aborted else OK


def build_parser():
    p = argparse.ArgumentParser(prog="selgame", description="Selection games on desk-scale spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spaces", help="inspect the space registry")
    sp_sub = sp.add_subparsers(dest="action", required=True)
    ls = sp_sub.add_parser("list", help="one row per registry entry")
    ls.add_argument("--json", action="store_true")
    ls.set_defaults(func=cmd_spaces_list)

    pl = sub.add_parser("play", help="play a scenario and write its transcript",
                        epilog="shipped scenarios: " + ", ".join(shipped_scenarios()))
    pl.add_argument("scenario", help="scenario file or shipped scenario name")
    pl.add_argument("--interactive", choices=("P1", "P2"), help="take one side yourself")
    pl.add_argument("--out", help="write the JSONL transcript here instead of stdout")
    pl.add_argument("--seed", type=int, help="override the scenario seed")
    pl.set_defaults(func=cmd_play)

    vf = sub.add_parser("verify", help="run acceptance suites")
    vf.add_argument("suite", nargs="?")
    vf.add_argument("--all", action="store_true")
    vf.add_argument("--json", action="store_true")
    vf.set_defaults(func=cmd_verify)

    du = sub.add_parser("duel", help="replay a scenario over seeds 0..K-1")
    du.add_argument("scenario")
    du.add_argument("--seeds", type=int, required=True)
    du.add_argument("--json", action="store_true")
    du.set_defaults(func=cmd_duel)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RegistryError, ScenarioError) as exc:
        _err(str(exc))
        return CONFIG


if __name__ == "__main__":
    sys.exit(main())
