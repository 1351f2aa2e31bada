"""Interception probability of a pattern-guessing eavesdropper.

With N_T active subcarriers drawn from a pool of M, a guesser picks the
right pattern with probability 1/C(M, N_T).  These numbers underflow any
native float for realistic sizes, so everything is carried in log10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pools import LSS, PSS, QSS, lss_cardinality, pss_cardinality, qss_cardinality

_EXACT_LIMIT = 200  # big-integer binomials are cheap up to here


@dataclass(frozen=True)
class InterceptReport:
    """log10 interception probability for one (pool, N_T) pairing."""

    kind: str
    pool_cardinality: int
    num_antennas: int
    log10_probability: float

    def to_dict(self) -> dict:
        return {"kind": self.kind, "pool_cardinality": self.pool_cardinality,
                "num_antennas": self.num_antennas,
                "log10_probability": self.log10_probability}


@dataclass(frozen=True)
class SweepRow:
    """One grid point of an interception sweep; infeasible rows are kept."""

    sweep_var: int
    kind: str
    pool_cardinality: int
    log10_probability: float | None
    feasible: bool


def log10_binomial(m: int, n: int) -> float:
    """log10 C(m, n); exact big-integer route for small m, log-gamma above."""
    if n < 0 or n > m:
        raise ValueError(f"need 0 <= n <= m, got n={n}, m={m}")
    if m <= _EXACT_LIMIT:
        return math.log10(math.comb(m, n))
    return (math.lgamma(m + 1) - math.lgamma(n + 1) - math.lgamma(m - n + 1)) / math.log(10.0)


def log10_intercept_prob(pool_cardinality: int, num_antennas: int) -> float:
    """-log10 C(M, N_T): log10 of the single-guess interception probability."""
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    if num_antennas > pool_cardinality:
        raise ValueError(
            f"num_antennas {num_antennas} exceeds pool cardinality {pool_cardinality}")
    return -log10_binomial(pool_cardinality, num_antennas)


def pool_cardinality(kind: str, num_subcarriers: int, lss_a: int = 2, lss_b: int = 0) -> int:
    """Pool size by kind: LSS by formula, QSS floor(sqrt), PSS by sieve."""
    if kind == LSS:
        return lss_cardinality(num_subcarriers, lss_a, lss_b)
    if kind == QSS:
        return qss_cardinality(num_subcarriers)
    if kind == PSS:
        return pss_cardinality(num_subcarriers)
    raise ValueError(f"unknown pool kind {kind!r}")


def intercept_report(kind: str, num_subcarriers: int, num_antennas: int,
                     lss_a: int = 2, lss_b: int = 0) -> InterceptReport:
    """Single-point interception report for one pool/antenna pairing."""
    m = pool_cardinality(kind, num_subcarriers, lss_a, lss_b)
    return InterceptReport(kind=kind, pool_cardinality=m, num_antennas=num_antennas,
                           log10_probability=log10_intercept_prob(m, num_antennas))


def _sweep(kinds, grid, num_antennas_of, num_subcarriers_of, lss_a, lss_b):
    rows = []
    for value in grid:
        for kind in kinds:
            m = pool_cardinality(kind, num_subcarriers_of(value), lss_a, lss_b)
            n_t = num_antennas_of(value)
            if 1 <= n_t <= m:
                rows.append(SweepRow(value, kind, m, log10_intercept_prob(m, n_t), True))
            else:
                rows.append(SweepRow(value, kind, m, None, False))
    return rows


def sweep_vs_ns(kinds, ns_values, num_antennas: int,
                lss_a: int = 2, lss_b: int = 0) -> list[SweepRow]:
    """Interception probability versus total subcarrier count."""
    ns_values = [int(v) for v in ns_values]
    if not ns_values or not kinds:
        raise ValueError("sweep needs at least one subcarrier count and one kind")
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    return _sweep(kinds, ns_values, lambda _: num_antennas, lambda v: v, lss_a, lss_b)


def sweep_vs_nt(kinds, nt_values, num_subcarriers: int,
                lss_a: int = 2, lss_b: int = 0) -> list[SweepRow]:
    """Interception probability versus antenna count at fixed N_S."""
    nt_values = [int(v) for v in nt_values]
    if not nt_values or not kinds:
        raise ValueError("sweep needs at least one antenna count and one kind")
    if min(nt_values) < 1:
        raise ValueError("antenna counts must be >= 1")
    return _sweep(kinds, nt_values, lambda v: v, lambda _: num_subcarriers, lss_a, lss_b)


def sweep_rows_to_csv(rows, path) -> None:
    """CSV with columns sweep_var, kind, M, log10_p, feasible ('.' decimals, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("sweep_var,kind,M,log10_p,feasible\n")
        for r in rows:
            p = "" if r.log10_probability is None else format(r.log10_probability, ".12g")
            fh.write(f"{r.sweep_var},{r.kind},{r.pool_cardinality},{p},"
                     f"{str(r.feasible).lower()}\n")
