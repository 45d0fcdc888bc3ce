"""Spectral-network graph core: walls, vertex taxonomy, consistency, JSON.

A network is a directed graph of walls (edges decorated with an ordered sheet
pair) and vertices (initial branch points, interaction joints, benign
crossings).  Both the combinatorial (weave) and numerical (WKB) pipelines
build the same structure; routes are polylines with exact-rational or float
coordinates respectively.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

SCHEMA = "spectral-network/1"

OPEN_END_PREFIX = "end:"  # target marker for walls running off to a chord/ray
TRUNCATED = "end:truncated"


@dataclass
class Wall:
    id: int
    label: Tuple[int, int]  # ordered sheet pair (i, j), i != j
    source: int  # vertex id
    target: str | int  # vertex id, or "end:<ray name>" open-end marker
    route: List[Tuple]  # polyline points (Fraction or float pairs)
    mass: float | int
    stage: int
    meta: dict = field(default_factory=dict)  # pipeline extras, not serialized

    def __post_init__(self):
        i, j = self.label
        if i == j:
            raise ValueError("wall label must have distinct sheets")
        if self.mass < 0:
            raise ValueError("wall mass must be nonnegative")


VERTEX_KINDS = (
    "initial",
    "interaction_creation",
    "interaction_hexavalent",
    "non_interaction",
    "inconsistent",
)


@dataclass
class NetworkVertex:
    id: int
    kind: str
    position: Tuple
    incoming: List[int] = field(default_factory=list)  # wall ids
    outgoing: List[int] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in VERTEX_KINDS:
            raise ValueError("unknown vertex kind %r" % self.kind)


def classify_vertex(stubs: Sequence[Tuple[Tuple[int, int], str]]) -> str:
    """Classify a vertex from (label, role) stubs, role in {'in', 'out'}.

    Local models: initial (3 outgoing, one sheet pair); creation joint
    (in (ij),(jk); out (ij),(jk),(ik)); hexavalent (those three in and out);
    non-interaction (two transversal walls with disjoint or misaligned
    pairs passing through); inconsistent (a creation-shaped crossing whose
    (ik) output is missing).
    """
    ins = sorted(label for label, role in stubs if role == "in")
    outs = sorted(label for label, role in stubs if role == "out")
    if not ins and len(outs) == 3 and len({frozenset(l) for l in outs}) == 1:
        return "initial"
    composed = _compose_labels(ins)
    if len(ins) == 2:
        if composed is not None and outs == sorted(ins + [composed]):
            return "interaction_creation"
        if outs == ins:
            if composed is not None:
                return "inconsistent"
            return "non_interaction"
    if len(ins) == 3 and outs == ins and _hexavalent_triple(ins):
        return "interaction_hexavalent"
    raise ValueError("no local model matches stubs %r" % (stubs,))


def _compose_labels(labels) -> Optional[Tuple[int, int]]:
    """The (i,k) produced by a pair (i,j),(j,k) among ``labels``, if any."""
    if len(labels) < 2:
        return None
    for a in labels:
        for b in labels:
            if a is not b and a[1] == b[0] and a[0] != b[1]:
                return (a[0], b[1])
    return None


def _hexavalent_triple(ins) -> bool:
    for a in ins:
        for b in ins:
            if a is not b and a[1] == b[0] and (a[0], b[1]) in ins:
                return True
    return False


class SpectralNetwork:
    def __init__(self, cutoff: Optional[float] = None):
        self.vertices: Dict[int, NetworkVertex] = {}
        self.walls: Dict[int, Wall] = {}
        self.cutoff = cutoff
        self.warnings: List[str] = []

    # ----- construction -----
    def add_vertex(self, kind: str, position) -> NetworkVertex:
        vertex = NetworkVertex(len(self.vertices), kind, tuple(position))
        self.vertices[vertex.id] = vertex
        return vertex

    def add_wall(self, label, source: int, target, route, mass, stage, **meta) -> Wall:
        wall = Wall(len(self.walls), tuple(label), source, target, list(route),
                    mass, stage, dict(meta))
        self.walls[wall.id] = wall
        self.vertices[source].outgoing.append(wall.id)
        if isinstance(target, int):
            self.vertices[target].incoming.append(wall.id)
        return wall

    def inconsistent_vertices(self) -> List[int]:
        return [v.id for v in self.vertices.values() if v.kind == "inconsistent"]

    def stubs(self, vertex_id: int):
        vertex = self.vertices[vertex_id]
        return ([(self.walls[w].label, "in") for w in vertex.incoming]
                + [(self.walls[w].label, "out") for w in vertex.outgoing])

    def validate_decorations(self):
        """Assert every vertex matches its local model."""
        for vertex in self.vertices.values():
            kind = classify_vertex(self.stubs(vertex.id))
            if kind != vertex.kind:
                raise ValueError("vertex %d stored as %s but classifies as %s"
                                 % (vertex.id, vertex.kind, kind))


def consistent_extension(net: SpectralNetwork, wall_seeder) -> SpectralNetwork:
    """One extension round: resolve every currently inconsistent vertex.

    ``wall_seeder(net, vertex_id)`` must add the missing (ik) wall (and any
    further vertices it produces) to ``net`` and return the new wall; it is
    the pipeline-specific continuation.  Vertices are processed in id order
    (creation order, which the combinatorial pipeline arranges to be
    weave-column order).
    """
    for vertex_id in sorted(net.inconsistent_vertices()):
        try:
            wall_seeder(net, vertex_id)
        except Exception as err:
            raise RuntimeError("wall seeder failed at vertex %d: %s" % (vertex_id, err)) from err
        net.vertices[vertex_id].kind = "interaction_creation"
    return net


def is_flow_acyclic(net: SpectralNetwork) -> bool:
    """True iff the wall digraph has no decoration-compatible directed cycle.

    Wall u feeds wall w when u ends at w's source vertex and either the
    labels agree (continuation through a joint) or w's label composes from
    u's at a creation joint ((i,j) into (i,k) or (k,j)).
    """
    feeds: Dict[int, List[int]] = {w: [] for w in net.walls}
    for u in net.walls.values():
        if not isinstance(u.target, int):
            continue
        vertex = net.vertices[u.target]
        for wid in vertex.outgoing:
            w = net.walls[wid]
            if w.label == u.label or w.label[0] == u.label[0] or w.label[1] == u.label[1]:
                feeds[u.id].append(wid)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {w: WHITE for w in net.walls}

    def dfs(start) -> bool:  # returns True when a cycle is found
        stack = [(start, iter(feeds[start]))]
        color[start] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GRAY:
                    return True
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(feeds[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
        return False

    return not any(dfs(w) for w in net.walls if color[w] == WHITE)


def energy_truncate(net: SpectralNetwork, bound) -> SpectralNetwork:
    """Subnetwork of walls with mass <= bound, closed under ancestry.

    Mass is monotone along creation ancestry in both pipelines, so the mass
    filter is automatically ancestry-closed; this is asserted.  Walls whose
    target joint is dropped become open-ended with a truncation marker.
    """
    for wall in net.walls.values():
        if wall.mass is None:
            raise ValueError("wall %d has no mass record" % wall.id)
    keep = {w.id for w in net.walls.values() if w.mass <= bound}
    for wid in keep:  # ancestry closure check
        wall = net.walls[wid]
        source = net.vertices[wall.source]
        for parent in source.incoming:
            if parent not in keep:
                raise AssertionError("mass filter not ancestry-closed at wall %d" % wid)
    out = SpectralNetwork(cutoff=bound)
    vertex_map = {}
    for vertex in net.vertices.values():
        incident = set(vertex.incoming) | set(vertex.outgoing)
        if incident & keep:
            if set(vertex.outgoing) - keep and vertex.kind == "interaction_creation":
                kind = vertex.kind  # joint kept; dropped outputs recorded below
            else:
                kind = vertex.kind
            copy = out.add_vertex(kind, vertex.position)
            vertex_map[vertex.id] = copy.id
    for wall in sorted(net.walls.values(), key=lambda w: w.id):
        if wall.id not in keep:
            continue
        target = wall.target
        if isinstance(target, int):
            target = vertex_map.get(target, TRUNCATED)
        out.add_wall(wall.label, vertex_map[wall.source], target, wall.route,
                     wall.mass, wall.stage, **wall.meta)
    # re-grade joints that lost walls
    for vertex in out.vertices.values():
        try:
            vertex.kind = classify_vertex(out.stubs(vertex.id))
        except ValueError:
            vertex.kind = "inconsistent" if vertex.incoming else vertex.kind
    return out


# ----- serialization -----

def _point_to_json(point):
    return [str(c) if isinstance(c, Fraction) else float(c) for c in point]


def _point_from_json(raw):
    return tuple(Fraction(c) if isinstance(c, str) else float(c) for c in raw)


def network_to_json(net: SpectralNetwork) -> str:
    doc = {
        "schema": SCHEMA,
        "cutoff": net.cutoff,
        "vertices": [
            {"id": v.id, "kind": v.kind, "position": _point_to_json(v.position),
             "incoming": list(v.incoming), "outgoing": list(v.outgoing)}
            for v in sorted(net.vertices.values(), key=lambda v: v.id)
        ],
        "walls": [
            {"id": w.id, "label": list(w.label), "source": w.source,
             "target": w.target, "route": [_point_to_json(p) for p in w.route],
             "mass": w.mass, "stage": w.stage}
            for w in sorted(net.walls.values(), key=lambda w: w.id)
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def network_from_json(text: str) -> SpectralNetwork:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError("unsupported schema %r" % doc.get("schema"))
    net = SpectralNetwork(cutoff=doc.get("cutoff"))
    for raw in doc["vertices"]:
        vertex = NetworkVertex(raw["id"], raw["kind"], _point_from_json(raw["position"]))
        net.vertices[vertex.id] = vertex
    for raw in doc["walls"]:
        wall = Wall(raw["id"], tuple(raw["label"]), raw["source"], raw["target"],
                    [_point_from_json(p) for p in raw["route"]], raw["mass"], raw["stage"])
        net.walls[wall.id] = wall
        net.vertices[wall.source].outgoing.append(wall.id)
        if isinstance(wall.target, int):
            net.vertices[wall.target].incoming.append(wall.id)
    return net
