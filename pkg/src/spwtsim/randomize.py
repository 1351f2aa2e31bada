"""Randomization procedure (RP) for subcarrier-to-antenna mappings.

An ascending selection of subcarrier indices is turned into a random,
spread-out antenna ordering by (1) partitioning into residue classes
modulo a prime p and concatenating them (each class ascending), then
(2) zero-padded block interleaving through a J x I array, repeated with
growing column counts until the spacing-variance metric exceeds a
threshold.  If a selection cannot be randomized within the interleave
cap, a fresh selection is drawn from the pool, up to a redraw cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SubcarrierPlan
from .pools import SubcarrierPool, select_random

# out-of-band interleaver pad: 0 is a legal subcarrier index, so the pad
# must never collide with payload values
_PAD = None


class RpExhaustedError(RuntimeError):
    """Raised when the threshold is not met within the redraw budget.

    Carries the full trace; the best metric found is trace.best_metric.
    """

    def __init__(self, trace: "RpTrace"):
        super().__init__(
            f"randomization exhausted after {trace.redraws_used} redraws; "
            f"best metric {trace.best_metric:.6g} <= threshold {trace.threshold:.6g}")
        self.trace = trace


def random_metric(plan_indices) -> float:
    """Variance of adjacent-antenna subcarrier index spacings.

    delta_I = mean((|k_i - k_{i+1}| - mean_spacing)^2) over the N_T - 1
    adjacent pairs.  Larger values mean a more spread-out mapping.
    """
    k = np.asarray(plan_indices, dtype=float)
    if k.size < 2:
        raise ValueError("random metric needs at least 2 indices")
    spacings = np.abs(np.diff(k))
    return float(np.mean((spacings - spacings.mean()) ** 2))


def spacing_vector(plan_indices) -> np.ndarray:
    """Adjacent spacings |k_i - k_{i+1}|, length N_T - 1."""
    return np.abs(np.diff(np.asarray(plan_indices, dtype=float)))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, math.isqrt(n) + 1))


def default_modulus(num_antennas: int) -> int:
    """Largest prime strictly below sqrt(N_T); needs N_T >= 5."""
    bound = math.isqrt(num_antennas)
    if bound * bound == num_antennas:
        bound -= 1  # strict: p < sqrt(N_T)
    for p in range(bound, 1, -1):
        if is_prime(p):
            return p
    raise ValueError(f"no prime below sqrt({num_antennas}); need num_antennas >= 5")


def choose_block_dims(num_antennas: int) -> tuple[int, int]:
    """Smallest I >= ceil(sqrt(N_T)) with N_T % I != 0, and J = ceil(N_T/I).

    Guarantees the strict inequality (J-1)*I < N_T < J*I.
    """
    if num_antennas < 3:
        raise ValueError("block interleaving needs at least 3 elements")
    i_cols = math.isqrt(num_antennas)
    if i_cols * i_cols < num_antennas:
        i_cols += 1
    while num_antennas % i_cols == 0:
        i_cols += 1
    return i_cols, -(-num_antennas // i_cols)


def _next_block_dims(num_antennas: int, i_cols: int) -> tuple[int, int]:
    """Next valid column count above i_cols (same divisibility rule)."""
    i_cols += 1
    while num_antennas % i_cols == 0:
        i_cols += 1
    return i_cols, -(-num_antennas // i_cols)


def mod_partition_order(selection, p: int) -> list[int]:
    """Concatenate residue classes mod p, each sorted ascending.

    Output K' = K'_0 || K'_1 || ... || K'_{p-1} is a permutation of the
    input.
    """
    if p < 2:
        raise ValueError("modulus must be >= 2")
    sel = [int(k) for k in selection]
    out: list[int] = []
    for r in range(p):
        out.extend(sorted(k for k in sel if k % p == r))
    return out


def block_interleave(sequence, block_cols: int, block_rows: int) -> list[int]:
    """Zero-padded block interleave through a block_rows x block_cols array.

    Rows 1..J-1 are filled left to right; the last row gets J*I - N pads
    at its front followed by the remaining elements; reading column by
    column (pads skipped) yields a permutation of the input.
    """
    seq = list(sequence)
    n = len(seq)
    i_cols, j_rows = block_cols, block_rows
    if not (j_rows - 1) * i_cols < n < j_rows * i_cols:
        raise ValueError(
            f"block dims must satisfy (J-1)*I < len < J*I, got I={i_cols} J={j_rows} len={n}")
    pad = j_rows * i_cols - n
    rows = [seq[r * i_cols:(r + 1) * i_cols] for r in range(j_rows - 1)]
    rows.append([_PAD] * pad + seq[(j_rows - 1) * i_cols:])
    out = []
    for col in range(i_cols):
        for row in rows:
            if row[col] is not _PAD:
                out.append(row[col])
    return out


@dataclass(frozen=True)
class RpParams:
    """Knobs of the randomization procedure."""

    modulus_p: int
    block_cols: int
    block_rows: int
    metric_threshold: float
    max_interleaves: int = 8
    max_redraws: int = 20
    seed: int = 0

    def __post_init__(self):
        if not is_prime(self.modulus_p):
            raise ValueError("modulus_p must be prime")
        if self.metric_threshold < 0:
            raise ValueError("metric_threshold must be >= 0")
        if self.max_interleaves < 1 or self.max_redraws < 0:
            raise ValueError("iteration caps must be >= 1 interleave and >= 0 redraws")
        if self.block_cols < 1 or self.block_rows < 1:
            raise ValueError("block dims must be positive")

    @classmethod
    def for_antennas(cls, num_antennas: int, metric_threshold: float,
                     max_interleaves: int = 8, max_redraws: int = 20,
                     seed: int = 0) -> "RpParams":
        """Standard parameterization: p = largest prime < sqrt(N_T), near-square block."""
        i_cols, j_rows = choose_block_dims(num_antennas)
        return cls(modulus_p=default_modulus(num_antennas), block_cols=i_cols,
                   block_rows=j_rows, metric_threshold=metric_threshold,
                   max_interleaves=max_interleaves, max_redraws=max_redraws, seed=seed)

    def to_dict(self) -> dict:
        return {"modulus_p": self.modulus_p, "block_cols": self.block_cols,
                "block_rows": self.block_rows, "metric_threshold": self.metric_threshold,
                "max_interleaves": self.max_interleaves, "max_redraws": self.max_redraws,
                "seed": self.seed}


@dataclass
class RpTrace:
    """Audit record of one randomization run."""

    threshold: float
    iterations: list = field(default_factory=list)  # (sequence tuple, metric) per interleave
    redraws_used: int = 0
    interleaves_used: int = 0
    succeeded: bool = False
    best_metric: float = -1.0
    final_indices: tuple[int, ...] = ()

    def record(self, sequence, metric: float) -> None:
        self.iterations.append((tuple(sequence), float(metric)))
        if metric > self.best_metric:
            self.best_metric = float(metric)

    def to_dict(self) -> dict:
        return {"threshold": self.threshold,
                "iterations": [{"sequence": list(s), "metric": m} for s, m in self.iterations],
                "redraws_used": self.redraws_used,
                "interleaves_used": self.interleaves_used,
                "succeeded": self.succeeded,
                "best_metric": self.best_metric,
                "final_indices": list(self.final_indices)}


def randomize(selection, params: RpParams,
              pool: SubcarrierPool | None = None) -> tuple[SubcarrierPlan, RpTrace]:
    """Run the full randomization loop on a selection.

    Partition mod p, then interleave repeatedly; each repeat advances the
    column count to the next valid value so the permutation cannot cycle.
    When the interleave cap is hit, a fresh selection is drawn from the
    pool (when given) and the loop restarts.  Succeeds as soon as the
    spacing metric strictly exceeds the threshold.

    Raises RpExhaustedError (carrying the trace) when the budget runs out.
    """
    sel = [int(k) for k in selection]
    n = len(sel)
    if params.modulus_p ** 2 >= n:
        raise ValueError("modulus_p must be < sqrt(len(selection))")
    if not (params.block_rows - 1) * params.block_cols < n < params.block_rows * params.block_cols:
        raise ValueError("block dims incompatible with selection length")
    source_kind = pool.kind if pool is not None else "custom"
    trace = RpTrace(threshold=params.metric_threshold)
    max_redraws = params.max_redraws if pool is not None else 0
    for redraw in range(max_redraws + 1):
        if redraw > 0:
            plan = select_random(pool, n, seed=[params.seed, redraw])
            sel = list(plan.indices)
            trace.redraws_used = redraw
        current = mod_partition_order(sel, params.modulus_p)
        i_cols, j_rows = params.block_cols, params.block_rows
        for _ in range(params.max_interleaves):
            current = block_interleave(current, i_cols, j_rows)
            trace.interleaves_used += 1
            metric = random_metric(current)
            trace.record(current, metric)
            if metric > params.metric_threshold:
                trace.succeeded = True
                trace.final_indices = tuple(current)
                return SubcarrierPlan(indices=tuple(current), source_kind=source_kind), trace
            i_cols, j_rows = _next_block_dims(n, i_cols)
    raise RpExhaustedError(trace)


def calibrate_threshold(pool: SubcarrierPool, num_antennas: int,
                        num_samples: int = 10000, quantile: float = 0.5,
                        seed: int = 0) -> float:
    """Empirical quantile of the spacing metric over random selections.

    Each sample draws an ascending N_T-subset (per-sample RNG streams are
    derived from (seed, sample index), so results do not depend on
    evaluation order) and measures its spacing variance.  The returned
    quantile is the acceptance threshold used by the randomization loop.
    """
    if num_samples < 100:
        raise ValueError("need at least 100 calibration samples")
    if not 0.0 <= quantile <= 1.0:
        raise ValueError("quantile must lie in [0, 1]")
    if num_antennas > pool.cardinality:
        raise ValueError("pool smaller than the requested selection size")
    pool_idx = np.asarray(pool.indices)
    metrics = np.empty(num_samples)
    for i in range(num_samples):
        rng = np.random.default_rng([seed, i])
        picked = rng.choice(pool_idx.size, size=num_antennas, replace=False)
        chosen = np.sort(pool_idx[picked])
        metrics[i] = random_metric(chosen)
    return float(np.quantile(metrics, quantile))


def build_plan(pool: SubcarrierPool, num_antennas: int, params: RpParams,
               apply_rp: bool = True) -> tuple[SubcarrierPlan, RpTrace | None]:
    """Select an N_T-subset and (optionally) randomize it."""
    plan = select_random(pool, num_antennas, seed=params.seed)
    if not apply_rp:
        return plan, None
    return randomize(plan.indices, params, pool=pool)
