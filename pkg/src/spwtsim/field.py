"""SINR surface evaluation over an (angle, distance) grid.

The per-cell phase difference against Bob separates per antenna into a
distance factor and an angle factor, so a field evaluation is a sum of
N_T complex outer products.  The sum is accumulated antenna-by-antenna
in a fixed order inside each work chunk, which makes the result
bit-identical no matter how the grid is partitioned across threads.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .model import Position, SubcarrierPlan, SystemConfig, sinr_from_coherent_sum, to_db


@dataclass(frozen=True)
class Grid:
    """Inclusive (angle, distance) evaluation lattice."""

    angle_start_deg: float = 0.0
    angle_stop_deg: float = 180.0
    angle_step_deg: float = 0.5
    dist_start_m: float = 2.5
    dist_stop_m: float = 1000.0
    dist_step_m: float = 2.5

    def __post_init__(self):
        if self.angle_step_deg <= 0 or self.dist_step_m <= 0:
            raise ValueError("grid steps must be positive")
        if self.angle_stop_deg < self.angle_start_deg or self.dist_stop_m < self.dist_start_m:
            raise ValueError("grid stop must be >= start")
        if not 0.0 <= self.angle_start_deg <= self.angle_stop_deg <= 180.0:
            raise ValueError("grid angles must lie in [0, 180] degrees")
        if self.dist_start_m <= 0:
            raise ValueError("grid distances must be positive")

    @staticmethod
    def _axis(start: float, stop: float, step: float) -> np.ndarray:
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(n)

    def angles_deg(self) -> np.ndarray:
        return self._axis(self.angle_start_deg, self.angle_stop_deg, self.angle_step_deg)

    def distances_m(self) -> np.ndarray:
        return self._axis(self.dist_start_m, self.dist_stop_m, self.dist_step_m)

    @classmethod
    def single_cell(cls, pos: Position) -> "Grid":
        return cls(pos.angle_deg, pos.angle_deg, 1.0, pos.distance_m, pos.distance_m, 1.0)

    def to_dict(self) -> dict:
        return {"angle_start_deg": self.angle_start_deg, "angle_stop_deg": self.angle_stop_deg,
                "angle_step_deg": self.angle_step_deg, "dist_start_m": self.dist_start_m,
                "dist_stop_m": self.dist_stop_m, "dist_step_m": self.dist_step_m}

    @classmethod
    def from_dict(cls, d: dict) -> "Grid":
        return cls(**d)


@dataclass
class SinrField:
    """SINR values in dB, shaped (num angles, num distances)."""

    grid: Grid
    values_db: np.ndarray
    fingerprint: str

    def cell_nearest(self, pos: Position) -> tuple[int, int]:
        i = int(np.argmin(np.abs(self.grid.angles_deg() - pos.angle_deg)))
        j = int(np.argmin(np.abs(self.grid.distances_m() - pos.distance_m)))
        return i, j

    def contains(self, pos: Position) -> bool:
        g = self.grid
        return (g.angle_start_deg <= pos.angle_deg <= g.angle_stop_deg
                and g.dist_start_m <= pos.distance_m <= g.dist_stop_m)

    def to_csv(self, path) -> None:
        """Rows of (angle_deg, distance_m, sinr_db); '.' decimals, LF endings."""
        angles = self.grid.angles_deg()
        dists = self.grid.distances_m()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("angle_deg,distance_m,sinr_db\n")
            for i, a in enumerate(angles):
                row = self.values_db[i]
                for j, r in enumerate(dists):
                    fh.write(f"{a:.10g},{r:.10g},{row[j]:.12g}\n")

    def to_binary(self, path, sidecar_path) -> None:
        """Raw little-endian float64 matrix plus a JSON axes sidecar."""
        with open(path, "wb") as fh:
            fh.write(np.ascontiguousarray(self.values_db, dtype="<f8").tobytes())
        meta = {"shape": list(self.values_db.shape), "dtype": "<f8", "order": "C",
                "rows": "angle_deg", "cols": "distance_m",
                "grid": self.grid.to_dict(), "fingerprint": self.fingerprint}
        with open(sidecar_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _fingerprint(config: SystemConfig, plan: SubcarrierPlan, bob: Position,
                 grid: Grid, phase_mode: str) -> str:
    blob = json.dumps({"config": asdict(config),
                       "plan": plan.to_dict(),
                       "bob": [bob.angle_rad, bob.distance_m],
                       "grid": grid.to_dict(), "phase_mode": phase_mode},
                      sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _coherent_power(config: SystemConfig, plan: SubcarrierPlan, bob: Position,
                    angles_rad: np.ndarray, dists: np.ndarray, phase_mode: str,
                    threads: int) -> np.ndarray:
    """|sum_n exp(j dphi_n)|^2 on the lattice, deterministically accumulated."""
    k = plan.as_array()
    n_off = np.arange(config.num_antennas, dtype=float)
    two_pi_c = 2.0 * math.pi / config.lightspeed_m_s
    # dphi_n(pos) = A_n*(R_B - R) + B_n*(cos theta_B - cos theta)
    coef_dist = two_pi_c * k * config.subchannel_bw_hz
    if phase_mode == "exact":
        coef_ang = -two_pi_c * (config.carrier_freq_hz + k * config.subchannel_bw_hz) \
            * n_off * config.element_spacing_m
    elif phase_mode == "approx":
        coef_ang = -two_pi_c * config.carrier_freq_hz * n_off * config.element_spacing_m
    else:
        raise ValueError(f"unknown phase mode {phase_mode!r}")
    dcos = math.cos(bob.angle_rad) - np.cos(angles_rad)
    ddist = bob.distance_m - dists
    # phase factors are separable: precompute the distance factors once and
    # the angle factors per chunk; per-cell accumulation order over antennas
    # is fixed, so results are invariant to how rows are chunked
    dist_factors = np.exp(1j * np.outer(coef_dist, ddist))  # (N_T, n_dist)

    def accumulate(rows: slice) -> np.ndarray:
        ang_factors = np.exp(1j * np.outer(coef_ang, dcos[rows]))  # (N_T, n_rows)
        acc = np.zeros((dcos[rows].size, ddist.size), dtype=complex)
        for n in range(config.num_antennas):
            acc += ang_factors[n][:, None] * dist_factors[n][None, :]
        return acc

    if threads <= 1 or dcos.size < 2:
        total = accumulate(slice(None))
    else:
        bounds = np.linspace(0, dcos.size, min(threads, dcos.size) + 1, dtype=int)
        chunks = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(accumulate, chunks))
        total = np.vstack(parts)
    return np.abs(total) ** 2


def compute_field(config: SystemConfig, plan: SubcarrierPlan, bob: Position,
                  grid: Grid, phase_mode: str = "exact", threads: int = 1) -> SinrField:
    """Analytic-expectation SINR (dB) at every grid cell.

    Deterministic and invariant to `threads`: thread count only changes
    how grid rows are partitioned, never any per-cell summation order.
    """
    angles = np.radians(grid.angles_deg())
    dists = grid.distances_m()
    if angles.size == 0 or dists.size == 0:
        raise ValueError("grid is empty")
    power = _coherent_power(config, plan, bob, angles, dists, phase_mode, threads)
    values = to_db(sinr_from_coherent_sum(config, power))
    return SinrField(grid=grid, values_db=values,
                     fingerprint=_fingerprint(config, plan, bob, grid, phase_mode))


@dataclass
class PeakReport:
    """Main peak, side peaks, and leakage summary of one field."""

    main_cell: tuple[int, int]
    main_angle_deg: float
    main_distance_m: float
    main_value_db: float
    side_peaks: list  # (cell, angle_deg, distance_m, value_db), best first
    side_to_main_ratios: list  # linear power ratios, aligned with side_peaks
    leakage_fraction: float
    leakage_threshold_db: float
    exclusion: tuple[float, float]

    @property
    def max_side_ratio(self) -> float:
        return self.side_to_main_ratios[0] if self.side_to_main_ratios else 0.0

    def to_dict(self) -> dict:
        return {"main_cell": list(self.main_cell), "main_angle_deg": self.main_angle_deg,
                "main_distance_m": self.main_distance_m, "main_value_db": self.main_value_db,
                "side_peaks": [{"cell": list(c), "angle_deg": a, "distance_m": r,
                                "value_db": v} for c, a, r, v in self.side_peaks],
                "side_to_main_ratios": list(self.side_to_main_ratios),
                "max_side_ratio": self.max_side_ratio,
                "leakage_fraction": self.leakage_fraction,
                "leakage_threshold_db": self.leakage_threshold_db,
                "exclusion": list(self.exclusion)}


def _exclusion_mask(field: SinrField, bob: Position,
                    exclusion: tuple[float, float]) -> np.ndarray:
    if exclusion[0] <= 0 or exclusion[1] <= 0:
        raise ValueError("exclusion window must be positive in both axes")
    da = np.abs(field.grid.angles_deg() - bob.angle_deg)
    dd = np.abs(field.grid.distances_m() - bob.distance_m)
    return (da[:, None] <= exclusion[0]) & (dd[None, :] <= exclusion[1])


def _local_maxima(values: np.ndarray) -> np.ndarray:
    """Strict 8-neighbor local maxima (plateaus excluded)."""
    padded = np.pad(values, 1, constant_values=-np.inf)
    center = padded[1:-1, 1:-1]
    mask = np.ones(values.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= center > padded[1 + di: padded.shape[0] - 1 + di,
                                    1 + dj: padded.shape[1] - 1 + dj]
    return mask


def find_peaks(field: SinrField, bob: Position,
               exclusion: tuple[float, float] = (2.0, 20.0),
               leakage_threshold_db: float = 3.0) -> PeakReport:
    """Main peak inside the window around Bob; side peaks outside it."""
    if not field.contains(bob):
        raise ValueError("Bob lies outside the grid; main peak undefined")
    window = _exclusion_mask(field, bob, exclusion)
    vals = field.values_db
    masked = np.where(window, vals, -np.inf)
    main_cell = np.unravel_index(int(np.argmax(masked)), vals.shape)
    main_value = float(vals[main_cell])
    side_mask = _local_maxima(vals) & ~window
    cells = np.argwhere(side_mask)
    order = np.argsort(-vals[side_mask])
    angles = field.grid.angles_deg()
    dists = field.grid.distances_m()
    side_peaks = []
    ratios = []
    for idx in order:
        i, j = cells[idx]
        v = float(vals[i, j])
        side_peaks.append(((int(i), int(j)), float(angles[i]), float(dists[j]), v))
        ratios.append(10.0 ** ((v - main_value) / 10.0))
    frac = leakage_fraction(field, main_value, leakage_threshold_db, bob, exclusion)
    return PeakReport(main_cell=(int(main_cell[0]), int(main_cell[1])),
                      main_angle_deg=float(angles[main_cell[0]]),
                      main_distance_m=float(dists[main_cell[1]]),
                      main_value_db=main_value, side_peaks=side_peaks,
                      side_to_main_ratios=ratios, leakage_fraction=frac,
                      leakage_threshold_db=leakage_threshold_db, exclusion=exclusion)


def leakage_fraction(field: SinrField, main_value_db: float, threshold_db: float,
                     bob: Position | None = None,
                     exclusion: tuple[float, float] | None = None) -> float:
    """Fraction of cells within threshold_db of the main value.

    When an exclusion window is given, its cells are removed from both
    the numerator and the denominator.
    """
    if threshold_db <= 0:
        raise ValueError("threshold_db must be positive")
    vals = field.values_db
    keep = np.ones(vals.shape, dtype=bool)
    if bob is not None and exclusion is not None:
        keep &= ~_exclusion_mask(field, bob, exclusion)
    if not keep.any():
        return 0.0
    return float(np.mean(vals[keep] >= main_value_db - threshold_db))
