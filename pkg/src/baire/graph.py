"""Graphs of groups: the text input format, validation, words and normal forms.

Input format, one declaration per line, ``#`` starts a comment::

    budget 30
    vertex v0 group Z^1 x table:0,1;1,0 names:e,a
    vertex v1 group Z^1
    edge e1 from v0 to v0 sigma table:0,1;1,0 s_images:(0;e),(0;a) r_images:(0;e),(0;a)
    edge e2 from v0 to v1 sigma table:0 s_images:(0;e) r_images:(0;e) tree

Images are listed in the order of the edge group's elements. An element of
``Z^d x F`` is written ``(v1,...,vd;f)`` with ``f`` a name or an index. If no edge
carries ``tree``, the maximal subtree is chosen by breadth-first search from the
least vertex id, ties broken by edge id.

The fundamental group is realized by peeling edges: non-tree edges first (each an
HNN extension of what remains), then tree edges (each an amalgam of the two
components left behind), always taking the least edge id.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .composed import AmalgamGroup, HNNGroup, format_element, include_vertex, stable_letter
from .errors import EmbeddingError, StructuralError, ValidationError
from .groups import BaseGroup, Embedding, FiniteGroup, check_embedding


def natural_key(name: str) -> tuple:
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name))


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    sigma: FiniteGroup
    s_images: tuple
    r_images: tuple
    line: int | None = None

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class Leaf:
    vertex: str
    group: BaseGroup


@dataclass(frozen=True)
class Step:
    """One HNN or amalgam step of the decomposition; ``children`` are its inputs."""

    edge: Edge
    kind: str  # "hnn" or "amalgam"
    group: object
    children: tuple

    def walk(self):
        yield self
        for c in self.children:
            if isinstance(c, Step):
                yield from c.walk()


@dataclass
class GraphOfGroups:
    vertices: dict  # id -> BaseGroup
    edges: dict  # id -> Edge
    tree: frozenset
    header: dict = field(default_factory=dict)
    vertex_lines: dict = field(default_factory=dict)

    def __post_init__(self):
        self._root = None

    # -- structure -------------------------------------------------------

    def vertex_order(self) -> list[str]:
        return sorted(self.vertices, key=natural_key)

    def edge_order(self) -> list[str]:
        return sorted(self.edges, key=natural_key)

    def incident(self, vertex: str) -> list[Edge]:
        return [e for e in (self.edges[i] for i in self.edge_order()) if vertex in (e.source, e.target)]

    def edge_images_at(self, vertex: str) -> list:
        """Images of every incident edge group inside the vertex group."""
        out = []
        for e in self.incident(vertex):
            if e.source == vertex:
                out.extend(e.s_images)
            if e.target == vertex:
                out.extend(e.r_images)
        return out

    @property
    def root(self):
        if self._root is None:
            self._root = decompose(self, frozenset(self.vertices), frozenset(self.edges))
        return self._root

    @property
    def group(self):
        """The fundamental group, as nested HNN/amalgam groups over the vertex groups."""
        return self.root.group

    def steps(self) -> list[Step]:
        """Decomposition steps, outermost first."""
        return list(self.root.walk()) if isinstance(self.root, Step) else []

    # -- words -----------------------------------------------------------

    def letter(self, token: str):
        return parse_letter(self, token)

    def evaluate(self, word) -> object:
        """The element of the fundamental group spelled by ``word`` (tree edges are 1)."""
        G = self.group
        out = G.identity
        for kind, name, value in word:
            if kind == "v":
                x = include_vertex(G, name, value)
            else:
                if name in self.tree:
                    continue
                x = stable_letter(G, name)
                if value == -1:
                    x = G.inv(x)
            out = G.mul(out, x)
        return out


def components(vertices, edges: list[Edge]) -> list[frozenset]:
    adj = {v: [] for v in vertices}
    for e in edges:
        adj[e.source].append(e.target)
        adj[e.target].append(e.source)
    seen, out = set(), []
    for v in sorted(vertices, key=natural_key):
        if v in seen:
            continue
        comp, queue = {v}, deque([v])
        seen.add(v)
        while queue:
            u = queue.popleft()
            for x in adj[u]:
                if x not in seen:
                    seen.add(x)
                    comp.add(x)
                    queue.append(x)
        out.append(frozenset(comp))
    return out


def bfs_tree(vertices, edges: list[Edge]) -> frozenset:
    order = sorted(edges, key=lambda e: natural_key(e.id))
    start = min(vertices, key=natural_key)
    seen, tree, queue = {start}, set(), deque([start])
    while queue:
        u = queue.popleft()
        for e in order:
            if u not in (e.source, e.target):
                continue
            v = e.target if e.source == u else e.source
            if v not in seen:
                seen.add(v)
                tree.add(e.id)
                queue.append(v)
    return frozenset(tree)


def decompose(graph: GraphOfGroups, vertices: frozenset, edges: frozenset):
    if not edges:
        if len(vertices) != 1:
            raise StructuralError("edgeless piece with more than one vertex")
        (v,) = vertices
        return Leaf(v, graph.vertices[v])
    ids = sorted(edges, key=natural_key)
    loose = [i for i in ids if i not in graph.tree]
    e = graph.edges[(loose or ids)[0]]
    rest = edges - {e.id}
    if loose:
        if len(components(vertices, [graph.edges[i] for i in rest])) != 1:
            raise StructuralError(f"removing non-tree edge {e.id} disconnects the graph")
        inner = decompose(graph, vertices, rest)
        H = inner.group
        group = HNNGroup(
            H,
            e.sigma,
            [include_vertex(H, e.target, x) for x in e.r_images],
            [include_vertex(H, e.source, x) for x in e.s_images],
            edge=e.id,
        )
        return Step(e, "hnn", group, (inner,))
    comps = components(vertices, [graph.edges[i] for i in rest])
    if len(comps) != 2:
        raise StructuralError(f"removing tree edge {e.id} does not split the graph in two")
    left_v = next(c for c in comps if e.source in c)
    right_v = next(c for c in comps if e.target in c)
    left = decompose(graph, left_v, frozenset(i for i in rest if graph.edges[i].source in left_v))
    right = decompose(graph, right_v, frozenset(i for i in rest if graph.edges[i].source in right_v))
    G1, G2 = left.group, right.group
    group = AmalgamGroup(
        G1,
        G2,
        e.sigma,
        [include_vertex(G1, e.source, x) for x in e.s_images],
        [include_vertex(G2, e.target, x) for x in e.r_images],
        edge=e.id,
    )
    return Step(e, "amalgam", group, (left, right))


# ---------------------------------------------------------------------------
# parsing

_GROUP_RE = re.compile(r"^Z\^(\d+)$")


def _parse_table(text: str, line: int) -> list[list[int]]:
    if not text.startswith("table:"):
        raise ValidationError(f"expected table:<rows>, got {text!r}", line)
    try:
        return [[int(v) for v in row.split(",")] for row in text[len("table:"):].split(";")]
    except ValueError:
        raise ValidationError(f"table entries must be integers: {text!r}", line) from None


def _finite(options: dict, line: int) -> FiniteGroup:
    if "table" not in options:
        return FiniteGroup.trivial()
    table = _parse_table("table:" + options["table"], line)
    names = options["names"].split(",") if "names" in options else None
    try:
        return FiniteGroup(table, names)
    except ValidationError as exc:
        raise ValidationError(str(exc), line) from None


def _options(tokens: list[str]) -> tuple[dict, list[str]]:
    opts, flags = {}, []
    for tok in tokens:
        if ":" in tok:
            k, v = tok.split(":", 1)
            opts[k] = v
        else:
            flags.append(tok)
    return opts, flags


def parse_element(group: BaseGroup, text: str, line: int | None = None):
    m = re.fullmatch(r"\(([^;()]*)(?:;([^;()]*))?\)", text.strip())
    if not m:
        raise ValidationError(f"malformed element {text!r}", line)
    vec_s, fin_s = m.group(1), m.group(2)
    if fin_s is None:
        # "(a)" in a finite group, "(3)" in Z with trivial finite part
        if group.rank == 0:
            vec_s, fin_s = "", vec_s
        else:
            fin_s = "0"
    vec = [int(v) for v in vec_s.split(",")] if vec_s.strip() else []
    F = group.finite_part
    fin_s = fin_s.strip()
    if fin_s in F.names:
        fin = F.names.index(fin_s)
    elif fin_s.isdigit():
        fin = int(fin_s)
    else:
        raise ValidationError(f"unknown finite element {fin_s!r} in {text!r}", line)
    try:
        return group.element(vec, fin)
    except StructuralError as exc:
        raise ValidationError(f"{text!r} is not in {group.name}: {exc}", line) from None


def _split_images(text: str) -> list[str]:
    return re.findall(r"\([^()]*\)", text)


def parse(text: str) -> GraphOfGroups:
    """Parse and validate a graph of groups. Errors carry the offending line number."""
    vertices: dict = {}
    vertex_lines: dict = {}
    raw_edges: list = []
    header: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kw = tokens[0]
        if kw == "vertex":
            if len(tokens) < 4 or tokens[2] != "group":
                raise ValidationError("expected: vertex <id> group Z^<d> [x table:<rows>]", lineno)
            vid = tokens[1]
            if vid in vertices:
                raise ValidationError(f"duplicate vertex {vid}", lineno)
            m = _GROUP_RE.match(tokens[3])
            if not m:
                raise ValidationError(f"vertex group must be Z^<d>, got {tokens[3]!r}", lineno)
            rest = tokens[4:]
            if rest and rest[0] == "x":
                rest = rest[1:]
            opts, flags = _options(rest)
            if flags:
                raise ValidationError(f"unexpected tokens {flags}", lineno)
            vertices[vid] = BaseGroup(int(m.group(1)), _finite(opts, lineno), name=vid)
            vertex_lines[vid] = lineno
        elif kw == "edge":
            if len(tokens) < 8 or tokens[2] != "from" or tokens[4] != "to" or tokens[6] != "sigma":
                raise ValidationError(
                    "expected: edge <id> from <v> to <v> sigma table:<rows> s_images:... r_images:...",
                    lineno,
                )
            group_tok = tokens[7]
            if not group_tok.startswith("table:"):
                raise ValidationError(
                    f"edge {tokens[1]}: edge group must be finite, given by table:<rows>", lineno
                )
            opts, flags = _options(tokens[7:])
            extra = [f for f in flags if f != "tree"]
            if extra:
                raise ValidationError(f"edge {tokens[1]}: unexpected tokens {extra}", lineno)
            raw_edges.append((lineno, tokens[1], tokens[3], tokens[5], opts, "tree" in flags))
        else:
            if len(tokens) != 2:
                raise ValidationError(f"unknown declaration {kw!r}", lineno)
            header[kw] = tokens[1]

    if not raw_edges:
        raise ValidationError("the graph needs at least one edge")
    edges: dict = {}
    marked = set()
    for lineno, eid, src, dst, opts, is_tree in raw_edges:
        if eid in edges or eid in vertices:
            raise ValidationError(f"duplicate id {eid}", lineno)
        for v in (src, dst):
            if v not in vertices:
                raise ValidationError(f"edge {eid} refers to undeclared vertex {v}", lineno)
        sigma = _finite(opts, lineno)
        imgs = {}
        for key, v in (("s_images", src), ("r_images", dst)):
            if key not in opts:
                raise ValidationError(f"edge {eid}: missing {key}", lineno)
            imgs[key] = tuple(parse_element(vertices[v], t, lineno) for t in _split_images(opts[key]))
            try:
                check_embedding(Embedding(sigma, vertices[v], imgs[key]))
            except EmbeddingError as exc:
                raise EmbeddingError(f"edge {eid} {key}: {exc}", exc.pair, lineno) from None
        edges[eid] = Edge(eid, src, dst, sigma, imgs["s_images"], imgs["r_images"], lineno)
        if is_tree:
            marked.add(eid)

    edge_list = list(edges.values())
    comps = components(vertices, edge_list)
    if len(comps) != 1:
        raise ValidationError(
            "graph is disconnected: " + " | ".join(",".join(sorted(c, key=natural_key)) for c in comps)
        )
    if marked:
        tree_edges = [edges[i] for i in marked]
        if any(e.is_loop for e in tree_edges) or len(marked) != len(vertices) - 1 or len(
            components(vertices, tree_edges)
        ) != 1:
            raise ValidationError("edges marked tree do not form a spanning tree")
        tree = frozenset(marked)
    else:
        tree = bfs_tree(vertices, edge_list)
    return GraphOfGroups(vertices, edges, tree, header, vertex_lines)


# ---------------------------------------------------------------------------
# words and normal forms


def parse_letter(graph: GraphOfGroups, token: str):
    if ":" in token:
        vid, elem = token.split(":", 1)
        if vid not in graph.vertices:
            raise ValidationError(f"unknown vertex {vid!r}")
        return ("v", vid, parse_element(graph.vertices[vid], elem))
    name, exp = token, 1
    if token.endswith("^-1"):
        name, exp = token[:-3], -1
    if name not in graph.edges:
        raise ValidationError(f"unknown letter {token!r}")
    return ("e", name, exp)


def parse_word(graph: GraphOfGroups, text: str) -> tuple:
    return tuple(parse_letter(graph, t) for t in text.split())


@dataclass(frozen=True)
class NormalForm:
    group: object
    element: object

    @property
    def is_trivial(self) -> bool:
        return self.element == self.group.identity

    def __str__(self):
        return format_element(self.group, self.element)


def britton_reduce(graph: GraphOfGroups, word) -> NormalForm:
    """Reduced normal form of a word; trivial exactly when the word spells 1."""
    return NormalForm(graph.group, graph.evaluate(word))


def coset_rep(group, g, side: int | None = None):
    """Canonical representative of ``H g`` for the distinguished subgroup of the last step."""
    if isinstance(group, HNNGroup):
        return group.split(g)[1]
    if isinstance(group, AmalgamGroup):
        if side not in (1, 2):
            raise ValueError("amalgam coset representatives need side 1 or 2")
        return group.split(g, side)[1]
    raise StructuralError("coset representatives are defined for HNN and amalgam groups")
