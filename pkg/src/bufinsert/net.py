"""Routing trees, buffer libraries and their JSON file formats.

All values are held internally in SI units (ohms, farads, seconds).
Files carry a per-object ``units`` tag which the loaders convert from.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Optional

RESISTANCE_UNITS = {"ohm": 1.0, "Ω": 1.0, "kohm": 1e3, "kΩ": 1e3}
CAPACITANCE_UNITS = {"F": 1.0, "fF": 1e-15, "pF": 1e-12}
TIME_UNITS = {"s": 1.0, "ps": 1e-12, "ns": 1e-9}
LENGTH_UNITS = {"m": 1.0, "um": 1e-6, "µm": 1e-6}

_FIELD_UNITS = {
    "r": RESISTANCE_UNITS,
    "c": CAPACITANCE_UNITS,
    "k": TIME_UNITS,
    "rat": TIME_UNITS,
}
_SI_TAGS = {"r": "ohm", "c": "F", "k": "s", "rat": "s"}


class NetError(ValueError):
    """Base class for malformed or invalid net and library inputs."""


class NetFormatError(NetError):
    """The document does not parse or does not follow the file schema."""


class ValidationError(NetError):
    """The document parses but violates a structural or numeric invariant."""


@dataclass(frozen=True)
class BufferType:
    id: str
    R: float
    C: float
    K: float

    def __post_init__(self):
        for name in ("R", "C", "K"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"buffer {self.id!r}: {name} is not finite")
        if self.R <= 0:
            raise ValidationError(f"buffer {self.id!r}: R must be positive, got {self.R}")
        if self.C < 0 or self.K < 0:
            raise ValidationError(f"buffer {self.id!r}: C and K must be non-negative")


@dataclass(frozen=True)
class BufferLibrary:
    """An indexed set of buffer types.

    ``order_by_R`` lists buffer indices by non-increasing driving resistance
    (ties: ascending input capacitance, then id). ``order_by_C`` lists them by
    non-decreasing input capacitance (ties: id).
    """

    name: str
    buffers: tuple[BufferType, ...]

    def __post_init__(self):
        object.__setattr__(self, "buffers", tuple(self.buffers))
        if not self.buffers:
            raise ValidationError(f"library {self.name!r} has no buffers")
        seen = set()
        for buf in self.buffers:
            if buf.id in seen:
                raise ValidationError(f"library {self.name!r}: duplicate buffer id {buf.id!r}")
            seen.add(buf.id)

    def __len__(self):
        return len(self.buffers)

    @cached_property
    def order_by_R(self) -> tuple[int, ...]:
        bufs = self.buffers
        return tuple(sorted(range(len(bufs)), key=lambda i: (-bufs[i].R, bufs[i].C, bufs[i].id)))

    @cached_property
    def order_by_C(self) -> tuple[int, ...]:
        bufs = self.buffers
        return tuple(sorted(range(len(bufs)), key=lambda i: (bufs[i].C, bufs[i].id)))

    @cached_property
    def index(self) -> dict[str, int]:
        return {buf.id: i for i, buf in enumerate(self.buffers)}

    def __getitem__(self, buffer_id: str) -> BufferType:
        return self.buffers[self.index[buffer_id]]


@dataclass(frozen=True)
class Sink:
    C: float
    RAT: float


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    R: float
    C: float


@dataclass(frozen=True)
class Driver:
    R: float
    K: float


@dataclass(frozen=True)
class RoutingTree:
    """A net rooted at ``source``.

    ``internal`` maps every non-sink, non-source vertex to the ids of the
    buffer types allowed there; an empty tuple means the vertex is a plain
    Steiner/branch point. Edges point away from the source.
    """

    source: str
    sinks: Mapping[str, Sink]
    internal: Mapping[str, tuple[str, ...]]
    edges: tuple[Edge, ...]
    driver: Optional[Driver] = None
    library_ref: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "sinks", dict(self.sinks))
        object.__setattr__(self, "internal", {v: tuple(b) for v, b in self.internal.items()})
        object.__setattr__(self, "edges", tuple(self.edges))
        self._validate()

    def _validate(self):
        if self.source in self.sinks or self.source in self.internal:
            raise ValidationError(f"source {self.source!r} is also declared as a sink or internal vertex")
        overlap = set(self.sinks) & set(self.internal)
        if overlap:
            raise ValidationError(f"vertex {sorted(overlap)[0]!r} declared both sink and internal")
        if not self.sinks:
            raise ValidationError("net has no sinks")
        for sid, s in self.sinks.items():
            if not (math.isfinite(s.C) and math.isfinite(s.RAT)):
                raise ValidationError(f"sink {sid!r}: non-finite value")
            if s.C < 0:
                raise ValidationError(f"sink {sid!r}: negative capacitance {s.C}")
        if self.driver is not None:
            d = self.driver
            if not (math.isfinite(d.R) and math.isfinite(d.K)) or d.R < 0 or d.K < 0:
                raise ValidationError("driver R and K must be finite and non-negative")

        vertices = set(self.sinks) | set(self.internal) | {self.source}
        parent: dict[str, str] = {}
        for e in self.edges:
            for end in (e.src, e.dst):
                if end not in vertices:
                    raise ValidationError(f"edge {e.src!r}->{e.dst!r} references unknown vertex {end!r}")
            if not (math.isfinite(e.R) and math.isfinite(e.C)) or e.R < 0 or e.C < 0:
                raise ValidationError(f"edge {e.src!r}->{e.dst!r}: R and C must be finite and non-negative")
            if e.dst == self.source:
                raise ValidationError(f"edge {e.src!r}->{e.dst!r} points into the source")
            if e.dst in parent:
                raise ValidationError(f"vertex {e.dst!r} has more than one parent")
            parent[e.dst] = e.src
            if e.src in self.sinks:
                raise ValidationError(f"sink {e.src!r} has a downstream edge")

        reached = {self.source}
        stack = [self.source]
        children = self.children
        while stack:
            v = stack.pop()
            for e in children.get(v, ()):
                reached.add(e.dst)
                stack.append(e.dst)
        for v in sorted(vertices - reached):
            raise ValidationError(f"vertex {v!r} is not reachable from the source (cycle or disconnected)")
        for v in self.internal:
            if not children.get(v):
                raise ValidationError(f"internal vertex {v!r} is a leaf; every leaf must be a sink")
        if not children.get(self.source):
            raise ValidationError(f"source {self.source!r} drives nothing")

    @cached_property
    def children(self) -> dict[str, tuple[Edge, ...]]:
        """Outgoing edges per vertex, in child-id order."""
        out: dict[str, list[Edge]] = {}
        for e in self.edges:
            out.setdefault(e.src, []).append(e)
        return {v: tuple(sorted(es, key=lambda e: e.dst)) for v, es in out.items()}

    @cached_property
    def postorder(self) -> tuple[str, ...]:
        order = []
        stack = [(self.source, False)]
        children = self.children
        while stack:
            v, done = stack.pop()
            if done:
                order.append(v)
                continue
            stack.append((v, True))
            for e in reversed(children.get(v, ())):
                stack.append((e.dst, False))
        return tuple(order)

    @property
    def positions(self) -> list[str]:
        """Internal vertices that may hold a buffer, sorted by id."""
        return sorted(v for v, allowed in self.internal.items() if allowed)

    def check_library(self, lib: BufferLibrary) -> None:
        for v, allowed in self.internal.items():
            for b in allowed:
                if b not in lib.index:
                    raise ValidationError(f"vertex {v!r} allows unknown buffer {b!r} (library {lib.name!r})")


@dataclass(frozen=True)
class Assignment:
    """Buffer placements: internal vertex id -> buffer type id."""

    placements: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "placements", dict(sorted(self.placements.items())))

    def check(self, tree: RoutingTree) -> None:
        for v, b in self.placements.items():
            if v not in tree.internal:
                raise ValidationError(f"buffer placed at {v!r}, which is not an internal vertex")
            if b not in tree.internal[v]:
                raise ValidationError(f"buffer {b!r} is not allowed at vertex {v!r}")

    def to_json(self) -> dict:
        return dict(self.placements)


# ---------------------------------------------------------------------------
# file formats


def _reject_unknown(obj: Mapping, allowed: Iterable[str], where: str) -> None:
    if not isinstance(obj, Mapping):
        raise NetFormatError(f"{where}: expected an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise NetFormatError(f"{where}: unknown key {sorted(extra)[0]!r}")


def _number(obj: Mapping, key: str, where: str) -> float:
    if key not in obj:
        raise NetFormatError(f"{where}: missing field {key!r}")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NetFormatError(f"{where}: field {key!r} must be a number")
    units = obj.get("units", {})
    if not isinstance(units, Mapping):
        raise NetFormatError(f"{where}: units must be an object")
    tag = units.get(key, _SI_TAGS[key])
    scale = _FIELD_UNITS[key].get(tag)
    if scale is None:
        raise NetFormatError(f"{where}: unknown unit {tag!r} for field {key!r}")
    value = float(value)
    return value if scale == 1.0 else value * scale


def _check_units(obj: Mapping, fields: Iterable[str], where: str) -> None:
    units = obj.get("units", {})
    if not isinstance(units, Mapping):
        raise NetFormatError(f"{where}: units must be an object")
    extra = set(units) - set(fields)
    if extra:
        raise NetFormatError(f"{where}: unit tag for unknown field {sorted(extra)[0]!r}")


def _read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetFormatError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise NetFormatError(f"{path}: top level must be an object")
    return doc


def library_from_dict(doc: Mapping) -> BufferLibrary:
    _reject_unknown(doc, ("name", "buffers"), "library")
    if not isinstance(doc.get("name"), str):
        raise NetFormatError("library: 'name' must be a string")
    bufs = doc.get("buffers")
    if not isinstance(bufs, list):
        raise NetFormatError("library: 'buffers' must be a list")
    out = []
    for i, b in enumerate(bufs):
        where = f"library buffer #{i}"
        _reject_unknown(b, ("id", "r", "c", "k", "units"), where)
        _check_units(b, ("r", "c", "k"), where)
        if not isinstance(b.get("id"), str):
            raise NetFormatError(f"{where}: 'id' must be a string")
        out.append(BufferType(b["id"], _number(b, "r", where), _number(b, "c", where), _number(b, "k", where)))
    return BufferLibrary(doc["name"], tuple(out))


def library_to_dict(lib: BufferLibrary) -> dict:
    return {
        "name": lib.name,
        "buffers": [
            {"id": b.id, "r": b.R, "c": b.C, "k": b.K, "units": {"r": "ohm", "c": "F", "k": "s"}}
            for b in lib.buffers
        ],
    }


def net_from_dict(doc: Mapping, library: Optional[BufferLibrary] = None) -> RoutingTree:
    _reject_unknown(doc, ("source", "driver", "sinks", "internal", "edges", "library_ref"), "net")
    if not isinstance(doc.get("source"), str):
        raise NetFormatError("net: 'source' must be a string")
    driver = None
    if doc.get("driver") is not None:
        d = doc["driver"]
        _reject_unknown(d, ("r", "k", "units"), "driver")
        _check_units(d, ("r", "k"), "driver")
        driver = Driver(_number(d, "r", "driver"), _number(d, "k", "driver"))

    sinks = {}
    raw_sinks = doc.get("sinks")
    if not isinstance(raw_sinks, Mapping):
        raise NetFormatError("net: 'sinks' must be an object")
    for sid, s in raw_sinks.items():
        where = f"sink {sid!r}"
        _reject_unknown(s, ("c", "rat", "units"), where)
        _check_units(s, ("c", "rat"), where)
        sinks[sid] = Sink(_number(s, "c", where), _number(s, "rat", where))

    internal = {}
    raw_internal = doc.get("internal", {})
    if not isinstance(raw_internal, Mapping):
        raise NetFormatError("net: 'internal' must be an object")
    for vid, v in raw_internal.items():
        _reject_unknown(v, ("buffers",), f"internal {vid!r}")
        allowed = v.get("buffers", [])
        if not isinstance(allowed, list) or not all(isinstance(b, str) for b in allowed):
            raise NetFormatError(f"internal {vid!r}: 'buffers' must be a list of ids")
        if len(set(allowed)) != len(allowed):
            raise ValidationError(f"internal {vid!r}: duplicate buffer id in allowed set")
        internal[vid] = tuple(allowed)

    edges = []
    raw_edges = doc.get("edges")
    if not isinstance(raw_edges, list):
        raise NetFormatError("net: 'edges' must be a list")
    for i, e in enumerate(raw_edges):
        where = f"edge #{i}"
        _reject_unknown(e, ("from", "to", "r", "c", "units"), where)
        _check_units(e, ("r", "c"), where)
        if not isinstance(e.get("from"), str) or not isinstance(e.get("to"), str):
            raise NetFormatError(f"{where}: 'from' and 'to' must be vertex ids")
        edges.append(Edge(e["from"], e["to"], _number(e, "r", where), _number(e, "c", where)))

    library_ref = doc.get("library_ref")
    if library_ref is not None and not isinstance(library_ref, str):
        raise NetFormatError("net: 'library_ref' must be a string")
    tree = RoutingTree(doc["source"], sinks, internal, tuple(edges), driver, library_ref)
    if library is not None:
        if library_ref is not None and library_ref != library.name:
            raise ValidationError(f"net references library {library_ref!r} but {library.name!r} was given")
        tree.check_library(library)
    return tree


def net_to_dict(tree: RoutingTree) -> dict:
    doc: dict = {"source": tree.source}
    if tree.driver is not None:
        doc["driver"] = {"r": tree.driver.R, "k": tree.driver.K, "units": {"r": "ohm", "k": "s"}}
    doc["sinks"] = {
        sid: {"c": s.C, "rat": s.RAT, "units": {"c": "F", "rat": "s"}} for sid, s in tree.sinks.items()
    }
    doc["internal"] = {vid: {"buffers": list(allowed)} for vid, allowed in tree.internal.items()}
    doc["edges"] = [
        {"from": e.src, "to": e.dst, "r": e.R, "c": e.C, "units": {"r": "ohm", "c": "F"}} for e in tree.edges
    ]
    if tree.library_ref is not None:
        doc["library_ref"] = tree.library_ref
    return doc


def load_library(path) -> BufferLibrary:
    return library_from_dict(_read_json(path))


def load_net(path, library: Optional[BufferLibrary] = None) -> RoutingTree:
    """Read and validate a net file; with ``library`` also resolve buffer ids."""
    return net_from_dict(_read_json(path), library)


def _dump(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def save_net(tree: RoutingTree, path) -> None:
    _dump(net_to_dict(tree), path)


def save_library(lib: BufferLibrary, path) -> None:
    _dump(library_to_dict(lib), path)


def load_assignment(path) -> Assignment:
    doc = _read_json(path)
    placements = doc.get("assignment", doc)
    if not isinstance(placements, Mapping) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in placements.items()
    ):
        raise NetFormatError(f"{path}: assignment must map vertex ids to buffer ids")
    return Assignment(placements)
