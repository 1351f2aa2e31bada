"""Coherent-leak auditing of subcarrier plans.

A plan whose indices are affine in the antenna number, or which repeats
an adjacent-pair index spacing, admits positions other than Bob where
several antennas' signals combine coherently.  This module detects both
patterns and solves the closed-form (angle, distance) of the partial
coherent-combination position implied by two equal-spacing adjacent
pairs, then verifies candidate positions by measuring the circular
spread of the per-antenna phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Position, SubcarrierPlan, SystemConfig, steering_phases


class LeakGeometryError(ValueError):
    """Predicted leak position is not physically realizable."""


@dataclass(frozen=True)
class DuplicateSpacing:
    """One spacing value shared by >= 2 adjacent antenna pairs."""

    spacing: int
    pairs: tuple[tuple[int, int], ...]  # 1-based (n, n+1) antenna pairs


@dataclass(frozen=True)
class PredictedLeak:
    """A solved coherent-combination position for a 4-antenna subset."""

    position: Position
    antennas: tuple[int, int, int, int]
    m_diffs: tuple[int, int]
    residual_approx_rad: float
    residual_exact_rad: float

    def to_dict(self) -> dict:
        return {"angle_deg": self.position.angle_deg,
                "distance_m": self.position.distance_m,
                "antennas": list(self.antennas),
                "m_diffs": list(self.m_diffs),
                "residual_approx_rad": self.residual_approx_rad,
                "residual_exact_rad": self.residual_exact_rad}


@dataclass
class LeakReport:
    """Audit result for one plan."""

    affine_pattern: tuple[float, float] | None
    duplicate_spacings: list[DuplicateSpacing]
    predicted_leaks: list[PredictedLeak] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"affine_pattern": list(self.affine_pattern) if self.affine_pattern else None,
                "duplicate_spacings": [
                    {"spacing": d.spacing, "pairs": [list(p) for p in d.pairs]}
                    for d in self.duplicate_spacings],
                "predicted_leaks": [p.to_dict() for p in self.predicted_leaks]}


def detect_affine_pattern(plan: SubcarrierPlan) -> tuple[int, int] | None:
    """(slope, intercept) iff k_n = slope*n + intercept exactly for all n."""
    k = plan.indices
    if len(k) < 3:
        raise ValueError("affine detection needs at least 3 antennas")
    slope = k[1] - k[0]
    intercept = k[0] - slope  # n is 1-based
    if all(k[n - 1] == slope * n + intercept for n in range(1, len(k) + 1)):
        return slope, intercept
    return None


def audit_spacings(plan: SubcarrierPlan) -> list[DuplicateSpacing]:
    """Group equal adjacent |spacings|; empty means all spacings distinct."""
    k = plan.indices
    if len(k) < 3:
        raise ValueError("spacing audit needs at least 3 antennas")
    groups: dict[int, list[tuple[int, int]]] = {}
    for n in range(1, len(k)):
        groups.setdefault(abs(k[n] - k[n - 1]), []).append((n, n + 1))
    return [DuplicateSpacing(spacing=s, pairs=tuple(p))
            for s, p in sorted(groups.items()) if len(p) >= 2]


def predict_illegal_position(config: SystemConfig, bob: Position, plan: SubcarrierPlan,
                             n1: int, n2: int, m_diffs: tuple[int, int]) -> Position:
    """Solve the coherent-combination position for pairs (n1,n1+1), (n2,n2+1).

    Both adjacent pairs must share the same signed index spacing dk.
    With dk' = k_{n2} - k_{n1} - dk and free integer offsets
    (m2-m1, m3-m2), the normalized distance/angle offsets are

        p = [(n2-n1-1)(m2-m1) - (m3-m2)] / [(n2-n1-1) dk - dk']
        q = [dk'(m2-m1) - dk (m3-m2)]    / [(n2-n1-1) dk - dk']

    mapping to R = R_B - p c/df and theta = arccos(cos theta_B - c q/(f_c d)).
    At the returned position the four phases 2 pi (k_n p - (n-1) q) are
    congruent mod 2 pi; m_diffs = (0, 0) returns Bob itself.
    """
    k = plan.indices
    n_t = len(k)
    if not (1 <= n1 and n1 + 1 < n2 and n2 + 1 <= n_t):
        raise ValueError("need 1 <= n1, n1+1 < n2, and pair (n2, n2+1) inside the plan")
    dk = k[n1] - k[n1 - 1]
    dk2 = k[n2] - k[n2 - 1]
    if dk != dk2:
        raise ValueError(f"adjacent spacings differ: {dk} at n1={n1}, {dk2} at n2={n2}")
    dkp = k[n2 - 1] - k[n1 - 1] - dk
    gap = n2 - n1 - 1
    den = gap * dk - dkp
    if den == 0:
        raise LeakGeometryError("degenerate pair geometry: zero denominator")
    dm21, dm32 = m_diffs
    p = (gap * dm21 - dm32) / den
    q = (dkp * dm21 - dk * dm32) / den
    dist = bob.distance_m - p * config.lightspeed_m_s / config.subchannel_bw_hz
    if dist <= 0:
        raise LeakGeometryError(f"solved distance {dist:.3g} m is behind the array")
    if q == 0.0:
        angle = bob.angle_rad  # exact: arccos(cos(x)) round-trips with rounding
    else:
        cos_angle = math.cos(bob.angle_rad) - q * config.lightspeed_m_s / (
            config.carrier_freq_hz * config.element_spacing_m)
        if not -1.0 <= cos_angle <= 1.0:
            raise LeakGeometryError(f"no real angle: cos would be {cos_angle:.6g}")
        angle = math.acos(cos_angle)
    return Position(angle_rad=angle, distance_m=dist)


def _wrap(phi: np.ndarray) -> np.ndarray:
    return (phi + math.pi) % (2.0 * math.pi) - math.pi


def alignment_residual(config: SystemConfig, plan: SubcarrierPlan, bob: Position,
                       pos: Position, antennas, mode: str = "approx") -> float:
    """Max circular distance of the subset's phases from their circular mean.

    Phases are phi_n - psi_n(pos) with the precoder phases phi_n matched
    to Bob; 0 means the subset combines perfectly coherently at pos.  For
    a two-antenna subset the mean is the arc bisector, so an antipodal
    pair yields pi/2.
    """
    idx = [int(a) for a in antennas]
    if not idx:
        raise ValueError("antenna subset must be non-empty")
    if any(not 1 <= a <= plan.num_antennas for a in idx):
        raise ValueError("antenna subset out of range")
    dphi = (steering_phases(config, plan, bob, mode)
            - steering_phases(config, plan, pos, mode))[np.asarray(idx) - 1]
    if len(idx) == 1:
        return 0.0
    if len(idx) == 2:
        return float(abs(_wrap(np.array([dphi[1] - dphi[0]]))[0])) / 2.0
    resultant = np.sum(np.exp(1j * dphi))
    mean = math.atan2(resultant.imag, resultant.real) if abs(resultant) > 1e-12 else float(dphi[0])
    return float(np.max(np.abs(_wrap(dphi - mean))))


def sweep_illegal_positions(config: SystemConfig, bob: Position, plan: SubcarrierPlan,
                            m_max: int = 3,
                            angle_range_deg: tuple[float, float] = (0.0, 180.0),
                            dist_range_m: tuple[float, float] = (1.0, 1000.0)) -> LeakReport:
    """Full audit: affine check, spacing audit, and leak enumeration.

    For every two adjacent pairs sharing a signed spacing, enumerates the
    integer offsets |m| <= m_max and keeps realizable positions inside
    the given region (Bob's own position, the (0, 0) solution, excluded).
    Residuals are reported in both phase models; the closed form is
    derived in the approximate model, so residual_approx is the
    certificate and residual_exact quantifies the model gap.
    """
    report = LeakReport(affine_pattern=detect_affine_pattern(plan),
                        duplicate_spacings=audit_spacings(plan))
    k = plan.indices
    lo_a, hi_a = angle_range_deg
    lo_d, hi_d = dist_range_m
    seen: set[tuple[float, float]] = set()
    for group in report.duplicate_spacings:
        firsts = [pair[0] for pair in group.pairs]
        for i, n1 in enumerate(firsts):
            for n2 in firsts[i + 1:]:
                if n2 <= n1 + 1 or n2 + 1 > len(k):
                    continue
                if k[n1] - k[n1 - 1] != k[n2] - k[n2 - 1]:
                    continue  # same |spacing| but opposite signs
                for dm21 in range(-m_max, m_max + 1):
                    for dm32 in range(-m_max, m_max + 1):
                        if dm21 == 0 and dm32 == 0:
                            continue
                        try:
                            pos = predict_illegal_position(
                                config, bob, plan, n1, n2, (dm21, dm32))
                        except LeakGeometryError:
                            continue
                        if not (lo_a <= pos.angle_deg <= hi_a and lo_d <= pos.distance_m <= hi_d):
                            continue
                        key = (round(pos.angle_deg, 9), round(pos.distance_m, 6))
                        if key in seen:
                            continue
                        seen.add(key)
                        ants = (n1, n1 + 1, n2, n2 + 1)
                        report.predicted_leaks.append(PredictedLeak(
                            position=pos, antennas=ants, m_diffs=(dm21, dm32),
                            residual_approx_rad=alignment_residual(
                                config, plan, bob, pos, ants, "approx"),
                            residual_exact_rad=alignment_residual(
                                config, plan, bob, pos, ants, "exact")))
    report.predicted_leaks.sort(key=lambda leak: leak.residual_approx_rad)
    return report


def affine_alignment_position(config: SystemConfig, bob: Position, slope: int,
                              cycles: int = 1) -> Position:
    """Full-alignment position implied by an affine plan k_n = slope*n + b.

    With every adjacent spacing equal to `slope`, all N_T phases align in
    the approximate model whenever slope*p is an integer and q = 0, i.e.
    at Bob's angle, one distance period c/(slope*df) away per cycle.
    """
    if slope == 0:
        raise ValueError("affine slope must be nonzero")
    dist = bob.distance_m - cycles * config.lightspeed_m_s / (slope * config.subchannel_bw_hz)
    if dist <= 0:
        raise LeakGeometryError(f"alignment position {dist:.3g} m is behind the array")
    return Position(angle_rad=bob.angle_rad, distance_m=dist)
