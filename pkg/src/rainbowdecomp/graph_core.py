"""Edge-coloured simple graphs and boundedness primitives."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateEdge, EmptyGraph, FormatError, SelfLoop, VertexOutOfRange


class EdgeColouredGraph:
    """Immutable simple graph on ``range(n)`` with a colour id in ``range(m)`` per edge.

    Edges are stored canonically as rows ``(u, v)`` with ``u < v`` sorted
    lexicographically; ``colours[i]`` is the colour of ``edges[i]``.
    ``labels[c]`` is the original symbol that colour id ``c`` was remapped from.
    """

    __slots__ = ("n", "edges", "colours", "labels", "__dict__")

    def __init__(self, n: int, edges: np.ndarray, colours: np.ndarray, labels: Sequence[int]):
        self.n = int(n)
        self.edges = edges
        self.colours = colours
        self.labels = tuple(labels)
        self.edges.setflags(write=False)
        self.colours.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    def __repr__(self) -> str:
        return f"EdgeColouredGraph(n={self.n}, edges={self.num_edges}, m={self.m})"

    @cached_property
    def edge_index(self) -> dict:
        return {(int(u), int(v)): i for i, (u, v) in enumerate(self.edges.tolist())}

    @cached_property
    def class_index(self) -> list:
        """colour id -> array of edge indices."""
        order = np.argsort(self.colours, kind="stable")
        bounds = np.searchsorted(self.colours[order], np.arange(self.m + 1))
        return [order[bounds[c]:bounds[c + 1]] for c in range(self.m)]

    @cached_property
    def adjacency(self) -> list:
        """vertex -> dict neighbour -> colour."""
        adj = [dict() for _ in range(self.n)]
        for (u, v), c in zip(self.edges.tolist(), self.colours.tolist()):
            adj[u][v] = c
            adj[v][u] = c
        return adj

    @cached_property
    def neighbour_sets(self) -> list:
        return [frozenset(a) for a in self.adjacency]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float32)
        if self.num_edges:
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    @cached_property
    def colour_matrix(self) -> np.ndarray:
        """n x n matrix of colour ids, -1 for non-edges."""
        cm = np.full((self.n, self.n), -1, dtype=np.int32)
        if self.num_edges:
            cm[self.edges[:, 0], self.edges[:, 1]] = self.colours
            cm[self.edges[:, 1], self.edges[:, 0]] = self.colours
        return cm

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def colour(self, u: int, v: int) -> int:
        return self.adjacency[u][v]

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return self.edge_index[(u, v)]

    def density(self) -> float:
        if self.n < 2:
            return 0.0
        return 2.0 * self.num_edges / (self.n * (self.n - 1))

    def triples(self) -> list:
        """Edges as ``(u, v, original colour label)`` tuples."""
        lab = self.labels
        return [(u, v, lab[c]) for (u, v), c in zip(self.edges.tolist(), self.colours.tolist())]


def _from_arrays(n: int, edges: np.ndarray, colours: np.ndarray, labels) -> EdgeColouredGraph:
    if edges.shape[0]:
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        colours = colours[order]
    return EdgeColouredGraph(n, np.ascontiguousarray(edges, dtype=np.int64),
                             np.ascontiguousarray(colours, dtype=np.int64), labels)


def build_graph(n: int, coloured_edges: Iterable[tuple]) -> EdgeColouredGraph:
    """Build a graph from ``(u, v, c)`` triples.

    Colour symbols are remapped to dense ids in increasing symbol order; the
    original symbols are kept in ``labels``.
    """
    n = int(n)
    if n < 0:
        raise VertexOutOfRange(f"negative vertex count {n}")
    triples = list(coloured_edges)
    seen = set()
    rows = []
    for item in triples:
        if len(item) != 3:
            raise FormatError(f"expected (u, v, c), got {item!r}")
        u, v, c = (int(x) for x in item)
        if not (0 <= u < n and 0 <= v < n):
            raise VertexOutOfRange(f"edge ({u}, {v}) outside range(0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if c < 0:
            raise FormatError(f"negative colour {c}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}")
        seen.add(key)
        rows.append((key[0], key[1], c))
    if not rows:
        return _from_arrays(n, np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64), ())
    arr = np.array(rows, dtype=np.int64)
    labels, dense = np.unique(arr[:, 2], return_inverse=True)
    return _from_arrays(n, arr[:, :2].copy(), dense.astype(np.int64), [int(x) for x in labels])


def from_edge_arrays(n: int, edges: np.ndarray, colours: np.ndarray) -> EdgeColouredGraph:
    """Vectorised constructor for generated instances; validates like ``build_graph``."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    colours = np.asarray(colours, dtype=np.int64).ravel()
    if edges.shape[0] != colours.shape[0]:
        raise FormatError("edge and colour arrays differ in length")
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise VertexOutOfRange("edge endpoint out of range")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise SelfLoop("self-loop in edge array")
    if colours.size and colours.min() < 0:
        raise FormatError("negative colour")
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    keys = lo * n + hi
    if np.unique(keys).size != keys.size:
        raise DuplicateEdge("duplicate edge in edge array")
    if colours.size == 0:
        return _from_arrays(n, np.zeros((0, 2), dtype=np.int64), colours, ())
    labels, dense = np.unique(colours, return_inverse=True)
    return _from_arrays(n, np.stack([lo, hi], axis=1), dense.astype(np.int64), [int(x) for x in labels])


@dataclass(frozen=True)
class BoundednessReport:
    g: int
    ell: int
    worst_colour: int
    worst_vertex: int
    worst_local_colour: int
    n: int
    m: int
    num_edges: int

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m, "edges": self.num_edges, "g": self.g, "ell": self.ell,
            "worst_colour": self.worst_colour, "worst_vertex": self.worst_vertex,
            "worst_local_colour": self.worst_local_colour,
        }


def boundedness(G: EdgeColouredGraph) -> BoundednessReport:
    """Global bound g (largest colour class) and local bound ell (largest colour degree)."""
    if G.num_edges == 0:
        raise EmptyGraph("boundedness of an edgeless graph is undefined")
    sizes = np.bincount(G.colours, minlength=G.m)
    worst_colour = int(np.argmax(sizes))
    keys = np.concatenate([G.edges[:, 0] * G.m + G.colours, G.edges[:, 1] * G.m + G.colours])
    uniq, counts = np.unique(keys, return_counts=True)
    k = int(np.argmax(counts))
    return BoundednessReport(
        g=int(sizes[worst_colour]), ell=int(counts[k]), worst_colour=worst_colour,
        worst_vertex=int(uniq[k] // G.m), worst_local_colour=int(uniq[k] % G.m),
        n=G.n, m=G.m, num_edges=G.num_edges,
    )


def colour_subgraph(G: EdgeColouredGraph, I: Iterable[int]) -> EdgeColouredGraph:
    """Spanning subgraph on the edges whose colour id lies in ``I``; colour ids are preserved."""
    keep = np.zeros(G.m, dtype=bool)
    ids = np.fromiter((int(c) for c in I), dtype=np.int64)
    if ids.size:
        if ids.min() < 0 or ids.max() >= G.m:
            raise ValueError("colour id outside range(m)")
        keep[ids] = True
    mask = keep[G.colours] if G.num_edges else np.zeros(0, dtype=bool)
    return EdgeColouredGraph(G.n, G.edges[mask].copy(), G.colours[mask].copy(), G.labels)


def edge_subgraph(G: EdgeColouredGraph, mask: np.ndarray) -> EdgeColouredGraph:
    """Spanning subgraph on the edges selected by a boolean mask; colour ids are preserved."""
    return EdgeColouredGraph(G.n, G.edges[mask].copy(), G.colours[mask].copy(), G.labels)


def induced_subgraph(G: EdgeColouredGraph, vertices: Sequence[int]) -> tuple:
    """Induced subgraph relabelled to ``range(len(vertices))``.

    Returns ``(H, vertices)`` where ``vertices[i]`` is the original name of vertex ``i``.
    Colour ids are preserved.
    """
    vertices = np.asarray(sorted(int(v) for v in vertices), dtype=np.int64)
    pos = np.full(G.n, -1, dtype=np.int64)
    pos[vertices] = np.arange(vertices.size)
    if G.num_edges:
        a, b = pos[G.edges[:, 0]], pos[G.edges[:, 1]]
        mask = (a >= 0) & (b >= 0)
        edges = np.stack([a[mask], b[mask]], axis=1)
        cols = G.colours[mask].copy()
    else:
        edges, cols = np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return EdgeColouredGraph(int(vertices.size), edges, cols, G.labels), vertices


def mono_codegree(G: EdgeColouredGraph, u: int, v: int) -> tuple:
    """Number and set of common neighbours w with colour(uw) == colour(vw)."""
    if u == v:
        raise ValueError("mono_codegree needs two distinct vertices")
    au, av = G.adjacency[u], G.adjacency[v]
    if len(au) > len(av):
        au, av = av, au
    wit = {w for w, c in au.items() if av.get(w, -1) == c}
    return len(wit), wit


def read_graph(source) -> EdgeColouredGraph:
    """Parse the text format: header ``n m`` then ``m`` lines ``u v c``."""
    if isinstance(source, (str, os.PathLike)) and not (isinstance(source, str) and "\n" in source):
        with open(source) as fh:
            text = fh.read()
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise FormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"bad header: {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != m:
        raise FormatError(f"header declares {m} edges, found {len(body)}")
    triples = []
    for k, ln in enumerate(body, start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise FormatError(f"line {k}: expected 'u v c', got {ln!r}")
        try:
            triples.append(tuple(int(x) for x in parts))
        except ValueError as exc:
            raise FormatError(f"line {k}: non-integer field in {ln!r}") from exc
    return build_graph(n, triples)


def write_graph(G: EdgeColouredGraph, target=None) -> str:
    """Serialise with original colour symbols; writes to ``target`` if given."""
    buf = io.StringIO()
    buf.write(f"{G.n} {G.num_edges}\n")
    for u, v, c in G.triples():
        buf.write(f"{u} {v} {c}\n")
    text = buf.getvalue()
    if target is not None:
        with open(target, "w") as fh:
            fh.write(text)
    return text
