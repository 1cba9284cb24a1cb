"""Space registry: JSON entries {id, kind, params, batteries, witnesses, flags}.

Battery members are tagged descriptor trees.  ``dumps`` writes keys sorted
with two-space indentation, so a canonical file survives load/dump unchanged.
"""

import json
import os
from importlib import resources

from .descriptors import (
    point_from_tree, point_tree, compact_from_tree, compact_tree,
    open_from_tree, open_tree, OpenDesc,
)
from . import spaces as _sp

__all__ = ["RegistryError", "Registry", "load_registry", "default_registry_path",
           "battery_from_tree", "battery_tree", "dumps", "KINDS"]

KINDS = {
    "DiscreteN": _sp.DiscreteN,
    "RationalLine": _sp.RationalLine,
    "RealLineModel": _sp.RealLineModel,
    "BaireModel": _sp.BaireModel,
    "FortissimoModel": _sp.FortissimoModel,
    "RightOrderModel": _sp.RightOrderModel,
    "SorgenfreyModel": _sp.SorgenfreyModel,
    "OnePoint": _sp.OnePoint,
    "SumSpace": _sp.SumSpace,
    "ProductSpace": _sp.ProductSpace,
    "PowerSpace": _sp.PowerSpace,
}

ENTRY_KEYS = ("id", "kind", "params", "batteries", "witnesses", "flags")


class RegistryError(ValueError):
    """Malformed registry document."""


def default_registry_path():
    env = os.environ.get("SELGAME_REGISTRY")
    if env:
        return env
    return str(resources.files("selgame").joinpath("data", "registry.json"))


def _member_from_tree(t):
    if isinstance(t, dict) and "union" in t:
        return open_from_tree(t)
    return compact_from_tree(t)


def _member_tree(m):
    if isinstance(m, OpenDesc):
        return open_tree(m)
    return compact_tree(m)


def battery_from_tree(raw):
    out = {}
    for name, items in raw.items():
        if name == "points":
            out[name] = [point_from_tree(p) for p in items]
        else:
            out[name] = [_member_from_tree(m) for m in items]
    return out


def battery_tree(batteries):
    out = {}
    for name, items in batteries.items():
        if name == "points":
            out[name] = [point_tree(p) for p in items]
        else:
            out[name] = [_member_tree(m) for m in items]
    return out


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class Registry:
    def __init__(self, doc, source="<memory>"):
        self.source = source
        if not isinstance(doc, dict) or not isinstance(doc.get("spaces"), list):
            raise RegistryError("%s: top level must be an object with a 'spaces' list" % source)
        self.doc = doc
        self.entries = {}
        for e in doc["spaces"]:
            if not isinstance(e, dict) or "id" not in e or "kind" not in e:
                raise RegistryError("%s: every entry needs 'id' and 'kind'" % source)
            extra = set(e) - set(ENTRY_KEYS)
            if extra:
                raise RegistryError("%s: entry %s has unknown keys %s" % (source, e["id"], sorted(extra)))
            if e["kind"] not in KINDS:
                raise RegistryError("%s: entry %s has unknown kind %s" % (source, e["id"], e["kind"]))
            if e["id"] in self.entries:
                raise RegistryError("%s: duplicate id %s" % (source, e["id"]))
            self.entries[e["id"]] = e
        self._built = {}

    def ids(self):
        return sorted(self.entries)

    def entry(self, sid):
        try:
            return self.entries[sid]
        except KeyError:
            raise RegistryError("unknown space id %r" % (sid,)) from None

    def get(self, sid):
        """Build (once) and return the space model for ``sid``."""
        if sid in self._built:
            return self._built[sid]
        e = self.entry(sid)
        cls = KINDS[e["kind"]]
        params = dict(e.get("params", {}))
        kw = dict(id=sid, params=params,
                  batteries=battery_from_tree(e.get("batteries", {})),
                  witnesses=e.get("witnesses", {}), flags=e.get("flags", {}))
        self._built[sid] = None   # cycle guard
        try:
            if cls is _sp.ProductSpace:
                space = cls([self.get(f) for f in params["factors"]], **kw)
            elif cls is _sp.PowerSpace:
                space = cls(self.get(params["base"]), params["arity"], **kw)
            elif cls is _sp.SumSpace:
                space = cls([self.get(f) for f in params["summands"]], **kw)
            else:
                space = cls(**kw)
        except KeyError as exc:
            raise RegistryError("entry %s lacks parameter %s" % (sid, exc)) from None
        self._built[sid] = space
        return space

    def dumps(self):
        return dumps(self.doc)

    def rows(self):
        """One summary row per entry, ordered by id."""
        out = []
        for sid in self.ids():
            e = self.entries[sid]
            flags = dict(KINDS[e["kind"]].default_flags)
            flags.update(e.get("flags", {}))
            out.append({
                "id": sid,
                "kind": e["kind"],
                "flags": sorted(k for k, v in flags.items() if v),
                "witnesses": sorted(e.get("witnesses", {})),
                "batteries": {k: len(v) for k, v in sorted(e.get("batteries", {}).items())},
            })
        return out


def load_registry(path=None):
    path = path or default_registry_path()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise RegistryError("cannot read registry %s: %s" % (path, exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegistryError("%s: line %d column %d: %s" % (path, exc.lineno, exc.colno, exc.msg)) from None
    return Registry(doc, source=path)
