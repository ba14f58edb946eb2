"""Edge-by-edge composition of engines over a graph of groups.

Each decomposition step gets its own engine whose base actions are the actions
built for the step's children. Before an engine is built, every nontrivial
element of the edge group images must carry an empty-fixed-set guarantee in the
relevant base. For a finite subgroup that is the same as acting freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .actions import Action, TranslationAction, upgrade_almost_free
from .composed import include_vertex
from .engine import Engine, PiAction
from .errors import LedgerGap, StructuralError
from .graph import GraphOfGroups, Leaf, components


@dataclass(frozen=True)
class PlanStep:
    edge: str
    kind: str
    inputs: tuple  # vertex ids or edge ids of the child steps

    def line(self) -> str:
        return f"{self.edge} {self.kind} " + ",".join(self.inputs)


def _label(node) -> str:
    return node.vertex if isinstance(node, Leaf) else node.edge.id


def plan(graph: GraphOfGroups) -> list[PlanStep]:
    """Decomposition steps, outermost first, with the connectivity of every cut re-checked."""
    out = []
    for step in graph.steps():
        vertices = set()
        edges = set()
        stack = [step]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                vertices.add(node.vertex)
            else:
                edges.add(node.edge.id)
                stack.extend(node.children)
        rest = [graph.edges[i] for i in edges - {step.edge.id}]
        pieces = len(components(vertices, rest))
        if pieces != (1 if step.kind == "hnn" else 2):
            raise StructuralError(f"step {step.edge.id}: cut gives {pieces} components for a {step.kind} step")
        out.append(PlanStep(step.edge.id, step.kind, tuple(_label(c) for c in step.children)))
    return out


def prepare_vertex_action(graph: GraphOfGroups, vertex: str) -> Action:
    """Translation action of the vertex group, made free on every incident edge group image."""
    G = graph.vertices[vertex]
    if G.is_finite:
        raise StructuralError(
            f"vertex {vertex} has a finite group; such fundamental groups are virtually free "
            "and are not handled by this construction"
        )
    action = TranslationAction(G)
    tracked = []
    for h in graph.edge_images_at(vertex):
        if h != G.identity and h not in tracked:
            tracked.append(h)
    return upgrade_almost_free(action, tracked)


@dataclass(frozen=True)
class LedgerEntry:
    vertex: str
    element: object
    chain: tuple


@dataclass
class Composition:
    graph: GraphOfGroups
    plan: list
    engines: dict  # edge id -> Engine, outermost first
    action: Action
    ledger: list = field(default_factory=list)

    @property
    def top(self) -> Engine:
        return next(iter(self.engines.values()))


def _require_free(base: Action, images, edge: str) -> None:
    for h in images:
        if h == base.group.identity:
            continue
        if base.fix_empty(h) is None:
            raise LedgerGap(f"edge {edge}: no empty-fixed-set guarantee for an edge group element", h)


def compose(graph: GraphOfGroups, vertex_actions: dict | None = None) -> Composition:
    vertex_actions = dict(vertex_actions or {})
    engines: dict = {}

    def build(node):
        if isinstance(node, Leaf):
            if node.vertex not in vertex_actions:
                vertex_actions[node.vertex] = prepare_vertex_action(graph, node.vertex)
            return vertex_actions[node.vertex]
        engines[node.edge.id] = None  # keep outermost-first order
        bases = [build(c) for c in node.children]
        G = node.group
        if node.kind == "hnn":
            _require_free(bases[0], G.sigma_sub.images, node.edge.id)
            _require_free(bases[0], G.theta_sub.images, node.edge.id)
        else:
            _require_free(bases[0], G.subs[1].images, node.edge.id)
            _require_free(bases[1], G.subs[2].images, node.edge.id)
        engine = Engine(node.edge.id, G, bases)
        engines[node.edge.id] = engine
        return PiAction(engine)

    action = build(graph.root)
    comp = Composition(graph, plan(graph), engines, action)
    top = graph.group
    for vertex in graph.vertex_order():
        G = graph.vertices[vertex]
        seen = []
        for h in graph.edge_images_at(vertex):
            if h == G.identity or h in seen:
                continue
            seen.append(h)
            chain = action.fix_empty(include_vertex(top, vertex, h))
            if chain is None:
                raise LedgerGap(f"vertex {vertex}: empty fixed set not preserved", h)
            comp.ledger.append(LedgerEntry(vertex, h, chain))
    return comp
