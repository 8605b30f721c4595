"""Configuration and result containers for the decomposition pipelines."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np


@dataclass
class DecompConfig:
    """Knobs shared by the factor, matching and transversal pipelines.

    ``alpha`` only filters the emitted layers; nothing upstream reads it except the
    colour pre-check, so the factor count is monotone in ``alpha``.
    """

    alpha: float = 0.3
    eps: float = 0.1              # condition-audit tolerance
    zeta: float = 0.1             # cleaning tolerance
    d: Optional[float] = None     # density; measured from G when None
    clean: bool = True
    clean_max_loss: float = 0.5   # skip cleaning if it would delete more than this edge share
    defect_delta: float = 0.1
    defect_attempts: int = 3
    regularize: bool = False
    reg_eps: float = 0.75
    theta: float = 0.1
    copies_per_target: float = 20.0
    copy_cap: int = 60_000
    exact_limit: int = 20_000     # enumerate exactly when the embedding estimate is below this
    augment: bool = True
    find_budget: int = 1500       # search nodes per augmentation attempt
    find_tries: int = 2
    layer_cap: Optional[int] = None  # stop augmenting a layer at this many copies
    audit: bool = True
    swap_passes: int = 3          # matching kinds only
    general_swap_limit: int = 0
    completion_passes: int = 50   # transversals only
    restarts: int = 10            # transversals only: reruns while cell coverage is under target

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CycleConfig:
    alpha: float = 0.3
    s: int = 12
    delta1: float = 0.12          # vertex share of each linker part
    gamma: float = 0.24           # vertex share outside the main part
    colour_gamma: float = 0.2     # colour share reserved for linking
    delta: float = 0.1            # special-edge property thresholds
    zeta: float = 0.1
    d: Optional[float] = None
    qr_retries: int = 10
    special_retries: int = 20
    link_restarts: int = 20
    drop_retries: int = 6
    borrow_colours: bool = True
    inner: DecompConfig = field(default_factory=lambda: DecompConfig(alpha=1.0, audit=False))
    experimental_spanning: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Factor:
    """One emitted subgraph: edges as vertex pairs, dense colour ids, and the copies
    (vertex tuples in pattern order, or the cycle's vertex sequence)."""

    edges: list
    colours: list
    copies: list = field(default_factory=list)

    @property
    def vertices(self) -> set:
        return {x for e in self.edges for x in e}


@dataclass
class Decomposition:
    kind: str                      # F-factor | matching | cycle | transversal
    factors: list
    metrics: dict = field(default_factory=dict)
    pattern: Optional[dict] = None
    seed: Optional[int] = None
    config: Optional[dict] = None

    def to_dict(self, labels: Optional[tuple] = None) -> dict:
        def lab(c):
            return labels[c] if labels is not None else int(c)

        return {
            "kind": self.kind,
            "seed": self.seed,
            "pattern": self.pattern,
            "config": self.config,
            "factors": [{"edges": [[int(u), int(v)] for u, v in f.edges],
                         "colours": [lab(c) for c in f.colours],
                         "copies": [[int(x) for x in cp] for cp in f.copies]} for f in self.factors],
            "metrics": _plain(self.metrics),
        }

    def to_json(self, labels: Optional[tuple] = None) -> str:
        return json.dumps(self.to_dict(labels), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, data: dict, labels: Optional[tuple] = None) -> "Decomposition":
        lookup = {str(x): i for i, x in enumerate(labels)} if labels is not None else None
        factors = []
        for f in data.get("factors", []):
            cols = f.get("colours", [])
            if lookup is not None:
                cols = [lookup.get(str(c), -1) for c in cols]
            factors.append(Factor([tuple(int(x) for x in e) for e in f.get("edges", [])],
                                  [int(c) for c in cols],
                                  [tuple(int(x) for x in cp) for cp in f.get("copies", [])]))
        return cls(data.get("kind", ""), factors, data.get("metrics", {}), data.get("pattern"),
                   data.get("seed"), data.get("config"))

    @classmethod
    def from_json(cls, text: str, labels: Optional[tuple] = None) -> "Decomposition":
        return cls.from_dict(json.loads(text), labels)


def _plain(x):
    """Recursively convert numpy scalars and arrays for JSON; timing fields are
    dropped so equal runs serialise to identical bytes."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items() if k != "seconds"}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return round(v, 10) if np.isfinite(v) else str(v)
    return x
