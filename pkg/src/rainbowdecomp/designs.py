"""Resolvable designs: 1-factorizations, affine resolutions, small backtracking
systems, and cyclic mutually orthogonal Latin squares."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NonPrimeOrder, OddOrder, TooManySquares, UnsupportedParameters

BACKTRACK_MAX_POINTS = 30
BACKTRACK_NODE_BUDGET = 50_000


@dataclass(frozen=True)
class ResolvableDesign:
    """``classes[k]`` is a tuple of blocks partitioning ``range(b)`` into r-sets."""

    r: int
    b: int
    classes: tuple

    @property
    def g(self) -> int:
        return (self.b - 1) // (self.r - 1)

    @property
    def degree(self) -> int:
        return len(self.classes)

    def blocks(self) -> list:
        return [blk for cls in self.classes for blk in cls]

    def audit(self) -> dict:
        """Recheck the three structural invariants by direct enumeration."""
        partition_ok = True
        for cls in self.classes:
            pts = sorted(x for blk in cls for x in blk)
            if pts != list(range(self.b)) or any(len(blk) != self.r for blk in cls):
                partition_ok = False
        deg = np.zeros(self.b, dtype=np.int64)
        cod = np.zeros((self.b, self.b), dtype=np.int64)
        for blk in self.blocks():
            for x in blk:
                deg[x] += 1
            for x, y in itertools.combinations(blk, 2):
                cod[x, y] += 1
                cod[y, x] += 1
        iu = np.triu_indices(self.b, 1)
        return {
            "classes_are_partitions": partition_ok,
            "regular": bool(np.all(deg == self.degree)),
            "max_codegree": int(cod[iu].max()) if self.b > 1 else 0,
            "full_pair_cover": bool(self.b > 1 and np.all(cod[iu] == 1)),
        }

    def to_json(self) -> str:
        return json.dumps({"r": self.r, "b": self.b, "classes": [[list(blk) for blk in c] for c in self.classes]})

    @classmethod
    def from_json(cls, text: str) -> "ResolvableDesign":
        data = json.loads(text)
        return cls(int(data["r"]), int(data["b"]),
                   tuple(tuple(tuple(int(x) for x in blk) for blk in c) for c in data["classes"]))


def one_factorization(b: int) -> ResolvableDesign:
    """Round-robin 1-factorization of K_b into b-1 perfect matchings."""
    if b < 2 or b % 2:
        raise OddOrder(f"1-factorization needs an even order >= 2, got {b}")
    m = b - 1
    classes = []
    for k in range(m):
        cls = [tuple(sorted((k, b - 1)))]
        for i in range(1, b // 2):
            x, y = (k + i) % m, (k - i) % m
            cls.append((min(x, y), max(x, y)))
        classes.append(tuple(sorted(cls)))
    return ResolvableDesign(2, b, tuple(classes))


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    return all(x % q for q in range(2, int(x ** 0.5) + 1))


def _prime_power(b: int, p: int):
    k = 0
    while b > 1 and b % p == 0:
        b //= p
        k += 1
    return k if b == 1 else None


def affine_resolution(p: int, k: int) -> ResolvableDesign:
    """Lines of AG(k, p), p prime, grouped into parallel classes by direction."""
    b = p ** k
    pts = np.array(list(itertools.product(range(p), repeat=k)))[:, ::-1]  # pts[i] digits of i, low first
    weights = p ** np.arange(k)
    dirs = []
    for v in itertools.product(range(p), repeat=k):
        nz = [c for c in v if c]
        if nz and nz[0] == 1:
            dirs.append(np.array(v))
    classes = []
    ts = np.arange(p)
    for dvec in dirs:
        seen = np.zeros(b, dtype=bool)
        cls = []
        for i in range(b):
            if seen[i]:
                continue
            line = (pts[i][None, :] + ts[:, None] * dvec[None, :]) % p
            idx = tuple(sorted(int(x) for x in line @ weights))
            seen[list(idx)] = True
            cls.append(idx)
        classes.append(tuple(sorted(cls)))
    return ResolvableDesign(p, b, tuple(classes))


def _backtrack(r: int, b: int, budget: int, seed: int = 0):
    """Class-by-class exact-cover search for a resolvable pair-packing with g classes."""
    g = (b - 1) // (r - 1)
    rng = np.random.default_rng(seed)
    used = set()
    classes: list = []
    nodes = 0

    def fill_class(cover, current):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise TimeoutError
        free = [x for x in range(b) if x not in cover]
        if not free:
            return list(current)
        x = free[0]
        rest = free[1:]
        options = list(itertools.combinations(rest, r - 1))
        rng.shuffle(options)
        for combo in options:
            blk = (x,) + combo
            pairs = list(itertools.combinations(blk, 2))
            if any(pq in used for pq in pairs):
                continue
            used.update(pairs)
            cover.update(blk)
            current.append(blk)
            res = fill_class(cover, current)
            if res is not None:
                return res
            current.pop()
            cover.difference_update(blk)
            used.difference_update(pairs)
        return None

    def rec():
        if len(classes) == g:
            return True
        tried = 0
        while tried < 4:
            tried += 1
            cls = fill_class(set(), [])
            if cls is None:
                return False
            classes.append(tuple(sorted(cls)))
            for blk in cls:
                used.update(itertools.combinations(blk, 2))
            if rec():
                return True
            classes.pop()
            for blk in cls:
                used.difference_update(itertools.combinations(blk, 2))
        return False

    try:
        ok = rec()
    except TimeoutError:
        return None
    return tuple(classes) if ok else None


@lru_cache(maxsize=None)
def _full_design(r: int, b: int):
    if r == 2:
        return one_factorization(b)
    k = _prime_power(b, r) if is_prime(r) else None
    if k is not None and k >= 1:
        return affine_resolution(r, k)
    if b == r:
        return ResolvableDesign(r, b, (((tuple(range(b))),),))
    if b <= BACKTRACK_MAX_POINTS:
        for seed in range(2):
            classes = _backtrack(r, b, BACKTRACK_NODE_BUDGET, seed)
            if classes is not None:
                return ResolvableDesign(r, b, classes)
    return None


def design_available(r: int, b: int) -> bool:
    if r < 2 or b < r or (b - r) % (r * (r - 1)):
        return False
    return _full_design(r, b) is not None


def resolvable_design(r: int, b_prime: int, rho: float = 1.0) -> ResolvableDesign:
    """Resolvable r-design on b = r(r-1)b' + r points with floor(rho g) classes."""
    if r < 2 or b_prime < 0:
        raise ValueError("need r >= 2 and b' >= 0")
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    b = r * (r - 1) * b_prime + r
    full = _full_design(r, b)
    if full is None:
        raise UnsupportedParameters(f"no construction for r={r}, b={b}")
    keep = int(np.floor(rho * full.g + 1e-12))
    return ResolvableDesign(r, b, full.classes[:keep])


def mols(k: int, b: int) -> list:
    """k cyclic mutually orthogonal Latin squares L_a(i, j) = i + a j mod b, a = 1..k."""
    if not is_prime(b):
        raise NonPrimeOrder(f"order {b} is not prime")
    if k > b - 1:
        raise TooManySquares(f"at most {b - 1} squares of order {b}")
    i, j = np.meshgrid(np.arange(b), np.arange(b), indexing="ij")
    return [(i + a * j) % b for a in range(1, k + 1)]


def orthogonal(A: np.ndarray, B: np.ndarray) -> bool:
    n = A.shape[0]
    return len(set(zip(A.ravel().tolist(), B.ravel().tolist()))) == n * n
