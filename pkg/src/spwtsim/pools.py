"""Construction of the three random subcarrier index pools.

LSS: arithmetic progression a*l + b          (linear subcarrier set)
QSS: quadratic values a*s^2 + b*s + c        (quadratic subcarrier set)
PSS: all primes below the subcarrier count   (prime subcarrier set)

Pools are immutable, strictly increasing index sequences inside
[0, num_subcarriers - 1]; plans are drawn from them uniformly without
replacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SubcarrierPlan

LSS = "lss"
QSS = "qss"
PSS = "pss"
POOL_KINDS = (LSS, QSS, PSS)


@dataclass(frozen=True)
class SubcarrierPool:
    """An index pool with its construction parameters."""

    kind: str
    num_subcarriers: int
    indices: tuple[int, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in POOL_KINDS:
            raise ValueError(f"unknown pool kind {self.kind!r}")
        idx = tuple(int(k) for k in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("pool indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.num_subcarriers):
            raise ValueError("pool indices must lie in [0, num_subcarriers)")

    @property
    def cardinality(self) -> int:
        return len(self.indices)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "num_subcarriers": self.num_subcarriers,
                "params": dict(self.params), "indices": list(self.indices)}

    @classmethod
    def from_dict(cls, d: dict) -> "SubcarrierPool":
        return cls(kind=d["kind"], num_subcarriers=d["num_subcarriers"],
                   indices=tuple(d["indices"]), params=dict(d.get("params", {})))


def build_lss(num_subcarriers: int, a: int = 2, b: int = 0) -> SubcarrierPool:
    """All indices a*l + b (l >= 0) below num_subcarriers."""
    if a < 1:
        raise ValueError("LSS step a must be >= 1")
    if not 0 <= b < num_subcarriers:
        raise ValueError("LSS offset b must lie in [0, num_subcarriers)")
    idx = range(b, num_subcarriers, a)
    return SubcarrierPool(LSS, num_subcarriers, tuple(idx), {"a": a, "b": b})


def lss_cardinality(num_subcarriers: int, a: int, b: int) -> int:
    """floor((N_S - 1 - b)/a) + 1, without materializing the pool."""
    if b > num_subcarriers - 1:
        return 0
    return (num_subcarriers - 1 - b) // a + 1


def build_qss(num_subcarriers: int, a: int = 1, b: int = 0, c: int = 0) -> SubcarrierPool:
    """All indices a*s^2 + b*s + c (s >= 0) inside [0, num_subcarriers).

    The canonical parameters (1, 0, 0) take s in {0, ..., isqrt(N_S)-1}
    so the cardinality is exactly floor(sqrt(N_S)) for every N_S; other
    parameterizations keep every generated value below N_S.
    """
    if a < 1:
        raise ValueError("QSS leading coefficient a must be >= 1")
    if (a, b, c) == (1, 0, 0):
        vals = [s * s for s in range(math.isqrt(num_subcarriers))]
    else:
        vertex = -b / (2.0 * a)
        vals = []
        s = 0
        while True:
            v = a * s * s + b * s + c
            if v > num_subcarriers - 1 and s > vertex:
                break
            if 0 <= v <= num_subcarriers - 1:
                vals.append(v)
            s += 1
    if len(set(vals)) != len(vals):
        raise ValueError("QSS parameters generate duplicate indices")
    if not vals:
        raise ValueError("QSS parameters generate an empty pool")
    return SubcarrierPool(QSS, num_subcarriers, tuple(sorted(vals)),
                          {"a": a, "b": b, "c": c})


def qss_cardinality(num_subcarriers: int) -> int:
    """Pool size for the canonical (a, b, c) = (1, 0, 0): floor(sqrt(N_S))."""
    return math.isqrt(num_subcarriers)


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit (Eratosthenes)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def build_pss(num_subcarriers: int) -> SubcarrierPool:
    """All prime indices below num_subcarriers."""
    if num_subcarriers < 3:
        raise ValueError("PSS needs num_subcarriers >= 3")
    primes = sieve_primes(num_subcarriers - 1)
    return SubcarrierPool(PSS, num_subcarriers, tuple(int(p) for p in primes), {})


def pss_cardinality(num_subcarriers: int) -> int:
    """Exact prime count below num_subcarriers (sieve)."""
    return int(sieve_primes(num_subcarriers - 1).size)


def pss_cardinality_estimate(num_subcarriers: int) -> float:
    """Classic N_S/ln(N_S) prime-count approximation (reporting only)."""
    return num_subcarriers / math.log(num_subcarriers)


def build_pool(kind: str, num_subcarriers: int, **params) -> SubcarrierPool:
    """Dispatch on pool kind; params are the kind's constructor arguments."""
    if kind == LSS:
        return build_lss(num_subcarriers, **params)
    if kind == QSS:
        return build_qss(num_subcarriers, **params)
    if kind == PSS:
        return build_pss(num_subcarriers, **params)
    raise ValueError(f"unknown pool kind {kind!r}")


def select_random(pool: SubcarrierPool, num_antennas: int, seed) -> SubcarrierPlan:
    """Uniformly random N_T-subset of the pool, in ascending order.

    Deterministic for a fixed seed; seed may be an int or a sequence of
    ints (numpy SeedSequence entropy).
    """
    if num_antennas > pool.cardinality:
        raise ValueError(
            f"cannot select {num_antennas} indices from a pool of {pool.cardinality}")
    rng = np.random.default_rng(seed)
    picked = rng.choice(pool.cardinality, size=num_antennas, replace=False)
    chosen = sorted(pool.indices[i] for i in picked)
    return SubcarrierPlan(indices=tuple(chosen), source_kind=pool.kind)
