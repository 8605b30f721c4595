"""Command-line front end: instance generation, audits, decompositions and verification.

Exit codes: 0 pass, 1 failed check or pipeline failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, RainbowError
from .generators import array_to_graph, generate
from .graph_core import EdgeColouredGraph, boundedness, read_graph, write_graph
from .pattern_count import count_copies, estimate_rainbow, parse_pattern
from .rainbow_decomp import (
    CycleConfig,
    DecompConfig,
    Decomposition,
    array_boundedness,
    decompose_F_factors,
    decompose_matchings_sparse,
    decompose_near_spanning_cycles,
    decompose_transversals,
    read_array,
    verify_decomposition,
    write_array,
)
from .rainbow_decomp.types import _plain
from .regularity import colour_irregularity_graph, quasirandom_check

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
THREADS_ENV = "RAINBOW_DECOMP_THREADS"
GENERATORS = ("kn-proper", "kn-bounded", "gnp-coloured", "latin-cyclic", "latin-random")
PIPELINES = ("factors", "matchings", "cycles", "transversals")


@dataclass
class RunConfig:
    """Everything one invocation depends on; echoed into every report."""

    subcommand: str
    pipeline: Optional[str] = None
    source: Optional[str] = None
    decomp: Optional[str] = None
    gen: Optional[str] = None
    n: Optional[int] = None
    p: float = 0.5
    g: Optional[int] = None
    ell: int = 1
    pattern: str = "k3"
    alpha: float = 0.3
    delta: float = 0.1
    eps: float = 0.1
    zeta: float = 0.1
    gamma: float = 0.24
    d: Optional[float] = None
    cycle_len: int = 12
    anchor: Optional[str] = None
    mode: str = "exact"
    samples: int = 2000
    seed: int = 0
    out: Optional[str] = None
    json: bool = False
    threads: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        for name in ("alpha", "delta", "eps", "zeta", "gamma"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise InputError(f"--{name} must lie in (0, 1], got {v}")
        if self.d is not None and not 0 < self.d <= 1:
            raise InputError(f"--d must lie in (0, 1], got {self.d}")
        if self.seed < 0:
            raise InputError("--seed must be non-negative")


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1").strip() or "1"
    try:
        k = int(raw)
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {k}")
    return k


# instance loading

def _is_array_kind(cfg: RunConfig) -> bool:
    return cfg.gen in ("latin-cyclic", "latin-random")


def _load_instance(cfg: RunConfig, want_array: bool = False):
    """Return ``(host, array_or_None)``; arrays are also returned as their cell graph
    unless ``want_array``."""
    if cfg.gen is not None:
        if cfg.n is None:
            raise InputError("--gen needs --n")
        inst = generate(cfg.gen, cfg.n, seed=cfg.seed, p=cfg.p, g=cfg.g, ell=cfg.ell)
    elif cfg.source is not None:
        if not os.path.exists(cfg.source):
            raise InputError(f"no such file: {cfg.source}")
        inst = read_array(cfg.source) if want_array or cfg.source.endswith(".csv") else read_graph(cfg.source)
    else:
        raise InputError("give an instance with --in FILE or --gen KIND --n N")
    if isinstance(inst, np.ndarray):
        return (inst if want_array else array_to_graph(inst)), inst
    if want_array:
        raise InputError("this command needs a symbol array (CSV)")
    return inst, None


def _instance_summary(host, A) -> dict:
    if A is not None:
        return {"type": "array", **array_boundedness(A)}
    out = {"type": "graph", "n": host.n, "edges": host.num_edges, "colours": host.m}
    if host.num_edges:
        out.update({"g": boundedness(host).g, "ell": boundedness(host).ell, "density": host.density()})
    return out


# subcommands

def cmd_generate(cfg: RunConfig) -> tuple:
    if cfg.gen is None or cfg.n is None:
        raise InputError("generate needs KIND and --n")
    inst = generate(cfg.gen, cfg.n, seed=cfg.seed, p=cfg.p, g=cfg.g, ell=cfg.ell)
    if isinstance(inst, np.ndarray):
        text = write_array(inst, cfg.out)
        summary = _instance_summary(None, inst)
    else:
        text = write_graph(inst, cfg.out)
        summary = _instance_summary(inst, None)
    report = {"instance": summary, "written": cfg.out}
    if cfg.out is None and not cfg.json:
        sys.stdout.write(text)
        return None, EXIT_OK
    return report, EXIT_OK


def cmd_check_colouring(cfg: RunConfig) -> tuple:
    if cfg.source is not None and cfg.source.endswith(".csv") or _is_array_kind(cfg):
        _, A = _load_instance(cfg, want_array=True)
        return {"array": array_boundedness(A)}, EXIT_OK
    G, _ = _load_instance(cfg)
    rep = boundedness(G).to_dict()
    rep["proper"] = rep["ell"] == 1
    return {"colouring": rep}, EXIT_OK


def cmd_check_regularity(cfg: RunConfig) -> tuple:
    G, _ = _load_instance(cfg)
    d = cfg.d if cfg.d is not None else G.density()
    if d <= 0:
        raise InputError("graph has no edges")
    q = quasirandom_check(G, cfg.eps, d, mode=cfg.mode, samples=cfg.samples if cfg.mode == "sampled" else 0,
                          seed=cfg.seed)
    report = {"quasirandom": q.to_dict()}
    if G.num_edges:
        ell = boundedness(G).ell
        thr = math.sqrt(ell * G.n)
        ir = colour_irregularity_graph(G, thr)
        report["colour_irregularity"] = {**ir.summary(), "bound": thr,
                                         "within_bound": bool(ir.max_degree() <= thr + 1e-9)}
    return report, EXIT_OK if q.passes else EXIT_FAIL


def cmd_count(cfg: RunConfig) -> tuple:
    G, _ = _load_instance(cfg)
    F = parse_pattern(cfg.pattern)
    anchor, kind = None, "none"
    if cfg.anchor:
        parts = [int(x) for x in cfg.anchor.replace("-", ",").split(",") if x.strip()]
        if len(parts) == 1:
            anchor, kind = parts[0], "vertex"
        elif len(parts) == 2:
            anchor, kind = (parts[0], parts[1]), "edge"
        else:
            raise InputError("--anchor takes a vertex 'v' or an edge 'u,v'")
    c = count_copies(G, F, anchor=anchor)
    d = cfg.d if cfg.d is not None else G.density()
    est = estimate_rainbow(G.n, d, F, anchor=kind) if d > 0 else 0.0
    return {"pattern": F.to_dict(), "anchor": cfg.anchor, "total": c.total, "rainbow": c.rainbow,
            "nonrainbow": c.nonrainbow, "estimate_rainbow": est, "d": d}, EXIT_OK


def _run_pipeline(cfg: RunConfig):
    if cfg.pipeline == "transversals":
        A, _ = _load_instance(cfg, want_array=True)
        D = decompose_transversals(A, delta=cfg.delta, seed=cfg.seed)
        return A, None, D, None
    G, A = _load_instance(cfg)
    if cfg.pipeline == "factors":
        dc = DecompConfig(alpha=cfg.alpha, eps=cfg.eps, zeta=cfg.zeta, d=cfg.d)
        D = decompose_F_factors(G, parse_pattern(cfg.pattern), seed=cfg.seed, config=dc)
    elif cfg.pipeline == "matchings":
        D = decompose_matchings_sparse(G, delta=cfg.delta, seed=cfg.seed,
                                       config=DecompConfig(eps=cfg.eps, zeta=cfg.zeta, d=cfg.d))
    elif cfg.pipeline == "cycles":
        cc = CycleConfig(alpha=cfg.alpha, s=cfg.cycle_len, gamma=cfg.gamma, zeta=cfg.zeta, delta=cfg.delta, d=cfg.d)
        D = decompose_near_spanning_cycles(G, seed=cfg.seed, config=cc)
    else:
        raise InputError(f"unknown pipeline {cfg.pipeline!r}")
    return G, G.labels, D, A


def cmd_decompose(cfg: RunConfig) -> tuple:
    host, labels, D, _ = _run_pipeline(cfg)
    rep = verify_decomposition(host, D)
    doc = D.to_dict(labels)
    if cfg.out is not None:
        with open(cfg.out, "w") as fh:
            fh.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    report = {"kind": D.kind, "factors": len(D.factors), "metrics": doc["metrics"], "verify": rep.to_dict(),
              "passed": rep.passed, "written": cfg.out}
    if cfg.out is None:
        report["decomposition"] = {k: doc[k] for k in ("kind", "pattern", "factors")}
    return report, EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> tuple:
    if cfg.decomp is None or not os.path.exists(cfg.decomp):
        raise InputError("verify needs --decomp FILE")
    try:
        with open(cfg.decomp) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"decomposition is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("decomposition JSON must be an object")
    if data.get("kind") == "transversal":
        A, _ = _load_instance(cfg, want_array=True)
        host, labels = A, None
    else:
        host, _ = _load_instance(cfg)
        labels = host.labels
    try:
        D = Decomposition.from_dict(data, labels)
    except (TypeError, ValueError) as exc:
        rep = {"passed": False, "checks": {"well_formed": {"passed": False, "witness": str(exc)}}}
        return {"verify": rep, "passed": False}, EXIT_FAIL
    rep = verify_decomposition(host, D)
    return {"verify": rep.to_dict(), "passed": rep.passed}, EXIT_OK if rep.passed else EXIT_FAIL


COMMANDS = {
    "generate": cmd_generate,
    "check-colouring": cmd_check_colouring,
    "check-regularity": cmd_check_regularity,
    "count": cmd_count,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
}


# argument parsing

def _add_instance(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--in", "--graph", "--array", dest="source", help="graph text file or CSV symbol array")
    g.add_argument("--gen", choices=GENERATORS, help="generate the instance instead of reading it")
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--g", type=int)
    g.add_argument("--ell", type=int, default=1)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the primary artifact here")
    p.add_argument("--json", action="store_true", help="print the JSON report on stdout")


def _add_constants(p: argparse.ArgumentParser) -> None:
    c = p.add_argument_group("constants")
    c.add_argument("--alpha", type=float, default=0.3, help="allowed uncovered fraction (default 0.3)")
    c.add_argument("--delta", type=float, default=0.1, help="matching/transversal defect (default 0.1)")
    c.add_argument("--eps", type=float, default=0.1, help="quasirandomness tolerance (default 0.1)")
    c.add_argument("--zeta", type=float, default=0.1, help="partition tolerance (default 0.1)")
    c.add_argument("--gamma", type=float, default=0.24, help="reserve share for cycle linking (default 0.24)")
    c.add_argument("--d", type=float, help="target density (default: measured)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rainbow-decomp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("generate", help="write a generated instance")
    p.add_argument("gen", choices=GENERATORS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--g", type=int)
    p.add_argument("--ell", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("check-colouring", help="global and local colour bounds")
    _add_instance(p)
    _add_common(p)

    p = sub.add_parser("check-regularity", help="quasirandomness and colour irregularity audit")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--d", type=float)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--samples", type=int, default=2000)

    p = sub.add_parser("count", help="exact copy counts of a pattern")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--pattern", default="k3")
    p.add_argument("--anchor", help="vertex 'v' or edge 'u,v'")
    p.add_argument("--d", type=float)

    p = sub.add_parser("decompose", help="run a decomposition pipeline and verify it")
    p.add_argument("pipeline", choices=PIPELINES)
    _add_instance(p)
    _add_common(p)
    _add_constants(p)
    p.add_argument("--pattern", default="k3", help="pattern for the factors pipeline (default k3)")
    p.add_argument("--cycle-len", type=int, default=12, help="segment length s for cycles (default 12)")

    p = sub.add_parser("verify", help="check a decomposition file against its host")
    _add_instance(p)
    _add_common(p)
    p.add_argument("--decomp", required=True)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__}
    vals = {k: v for k, v in vars(ns).items() if k in known and v is not None}
    return RunConfig(**vals)


def _emit(report: dict, cfg: RunConfig, code: int) -> None:
    full = _plain({"command": cfg.subcommand, "seed": cfg.seed, "exit_code": code,
                   "config": {k: v for k, v in asdict(cfg).items() if k != "extra"}, **report})
    if cfg.json:
        sys.stdout.write(json.dumps(full, sort_keys=True, indent=1) + "\n")
        return
    for k in sorted(full):
        v = full[k]
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True)
            if len(v) > 160:
                v = v[:157] + "..."
        print(f"{k}: {v}")


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INPUT
    try:
        cfg = config_from_args(ns)
        cfg.threads = _threads()
        cfg.validate()
        report, code = COMMANDS[cfg.subcommand](cfg)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RainbowError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if report is not None:
        _emit(report, cfg, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
