"""Auxiliary hypergraph encoding rainbow copies as hyperedges over edges, vertex-layers
and colour-layers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError, NonRainbowMember
from ..graph_core import EdgeColouredGraph
from ..hmatch import MultiHypergraph
from ..rng import stream
from .family import CopyFamily, _rows_distinct


@dataclass
class AuxHypergraph:
    """Vertex ids: graph edge e -> e; (v, i) -> E + i*n + v; (c, i) -> E + n*t + i*m + c.
    Hyperedge k is copy k of the family."""

    H: MultiHypergraph
    layer_of: np.ndarray
    t: int
    n: int
    m: int
    E: int

    def vertex_layer_ids(self) -> np.ndarray:
        return self.E + np.arange(self.n * self.t)

    def role(self, x: int) -> tuple:
        x = int(x)
        if x < self.E:
            return ("edge", x)
        x -= self.E
        if x < self.n * self.t:
            return ("vertex", x % self.n, x // self.n)
        x -= self.n * self.t
        return ("colour", x % self.m, x // self.m)


def build_aux_hypergraph(G: EdgeColouredGraph, fam: CopyFamily, t: int, seed: int = 0) -> AuxHypergraph:
    """One hyperedge of size 2h+f per copy; layers are drawn uniformly from ``seed``."""
    if t < 1:
        raise InputError("need t >= 1")
    if fam.size and not np.all(_rows_distinct(fam.colours)):
        raise NonRainbowMember("family member repeats a colour")
    n, m, E = G.n, G.m, G.num_edges
    rng = stream(seed, "rainbow_decomp.layers")
    layer = rng.integers(0, t, fam.size).astype(np.int64)
    L = layer[:, None]
    rows = np.concatenate([fam.edge_ids, E + L * n + fam.verts, E + n * t + L * m + fam.colours], axis=1)
    r = 2 * fam.pattern.h + fam.pattern.f
    H = MultiHypergraph(E + n * t + m * t, rows.reshape(-1, r), r)
    return AuxHypergraph(H, layer, t, n, m, E)
