"""Physical-layer math for precise-transmission simulation.

Geometry, per-antenna steering phases, matched-filter precoding,
artificial-noise (AN) projection onto the null space of the desired
user's channel, and receive SINR at arbitrary (angle, distance)
positions for a uniform linear array transmitting one data symbol over
per-antenna subcarriers.

Conventions
-----------
* Antenna 1 is the reference element; the n-th element sits at
  (n-1)*d along the array axis, so its distance to a receiver at
  (theta, R) is R_n = R - (n-1)*d*cos(theta).
* The steering phase of element n carrying subcarrier index k_n is

      psi_n(theta, R) = 2*pi*(f_c + k_n*df)*R_n/c - 2*pi*f_c*R/c

  (reference phase of element 1 at carrier frequency subtracted).
* The matched-filter precoder aligns all phases at Bob:
  v_n = exp(j*psi_n(bob))/sqrt(N_T), and the coherent beam gain at an
  arbitrary position is g = sum_n exp(j*(psi_n(bob)-psi_n(pos)))/sqrt(N_T),
  so |g| <= sqrt(N_T) with equality exactly at Bob.
* Receiver noise accumulates over the N_T combined subcarrier branches,
  so the SINR denominator carries N_T*noise_power and the SINR at Bob
  reduces exactly to alpha1*P_s/noise_power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

C_VACUUM = 3.0e8  # m/s, rounded so f_c = 3 GHz gives d = lambda/2 = 0.05 m exactly


@dataclass(frozen=True)
class SystemConfig:
    """Carrier/array/power parameters shared by all physics operations.

    Defaults are the standard simulation setup: 3 GHz carrier, 16384
    subcarriers at 10 kHz spacing, 120 half-wavelength-spaced elements,
    equal power split between signal and AN, P_s/noise = 10 dB.
    """

    carrier_freq_hz: float = 3.0e9
    subchannel_bw_hz: float = 1.0e4
    num_subcarriers: int = 16384
    num_antennas: int = 120
    element_spacing_m: float = 0.05
    alpha1: float = 0.5
    alpha2: float = 0.5
    total_power: float = 10.0
    noise_power: float = 1.0
    lightspeed_m_s: float = C_VACUUM

    def __post_init__(self):
        if self.num_antennas < 2:
            raise ValueError("num_antennas must be >= 2")
        if self.num_subcarriers < self.num_antennas:
            raise ValueError("num_subcarriers must be >= num_antennas")
        if min(self.total_power, self.noise_power, self.element_spacing_m,
               self.carrier_freq_hz, self.subchannel_bw_hz, self.lightspeed_m_s) <= 0:
            raise ValueError("powers, spacing, frequencies and c must be positive")
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ValueError("power allocation fractions must be non-negative")
        if abs(self.alpha1 + self.alpha2 - 1.0) > 1e-12:
            raise ValueError("alpha1 + alpha2 must equal 1")
        # narrowband assumption: total occupied bandwidth well below carrier
        if self.num_subcarriers * self.subchannel_bw_hz > 0.1 * self.carrier_freq_hz:
            raise ValueError("num_subcarriers * subchannel_bw_hz must be <= 0.1 * carrier_freq_hz")

    @property
    def wavelength_m(self) -> float:
        return self.lightspeed_m_s / self.carrier_freq_hz

    @property
    def snr_db(self) -> float:
        """Total transmit power over single-branch noise power, in dB."""
        return 10.0 * math.log10(self.total_power / self.noise_power)


@dataclass(frozen=True)
class Position:
    """Receiver position: angle from array axis in [0, pi], distance > 0."""

    angle_rad: float
    distance_m: float

    def __post_init__(self):
        if not 0.0 <= self.angle_rad <= math.pi:
            raise ValueError("angle_rad must lie in [0, pi]")
        if self.distance_m <= 0.0:
            raise ValueError("distance_m must be positive")

    @classmethod
    def from_degrees(cls, angle_deg: float, distance_m: float) -> "Position":
        return cls(math.radians(angle_deg), distance_m)

    @property
    def angle_deg(self) -> float:
        return math.degrees(self.angle_rad)


@dataclass(frozen=True)
class SubcarrierPlan:
    """Ordered assignment of subcarrier indices to antennas 1..N_T."""

    indices: tuple[int, ...]
    source_kind: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(k) for k in self.indices))
        if len(self.indices) < 1:
            raise ValueError("plan must assign at least one subcarrier")
        if any(k < 0 for k in self.indices):
            raise ValueError("subcarrier indices must be non-negative")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("subcarrier indices must be distinct")

    @property
    def num_antennas(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=float)

    def to_dict(self) -> dict:
        return {"indices": list(self.indices), "source_kind": self.source_kind}

    @classmethod
    def from_dict(cls, d: dict) -> "SubcarrierPlan":
        return cls(indices=tuple(d["indices"]), source_kind=d.get("source_kind", "custom"))


def _check_plan(config: SystemConfig, plan: SubcarrierPlan) -> None:
    if plan.num_antennas != config.num_antennas:
        raise ValueError(
            f"plan has {plan.num_antennas} indices, config expects {config.num_antennas}")
    if max(plan.indices) >= config.num_subcarriers:
        raise ValueError("plan contains subcarrier indices outside [0, num_subcarriers)")


def element_distance(config: SystemConfig, pos: Position, n: int) -> float:
    """Distance from the n-th element (1-based) to the receiver."""
    if not 1 <= n <= config.num_antennas:
        raise ValueError(f"antenna index {n} out of range 1..{config.num_antennas}")
    return pos.distance_m - (n - 1) * config.element_spacing_m * math.cos(pos.angle_rad)


def steering_phases(config: SystemConfig, plan: SubcarrierPlan, pos: Position,
                    mode: str = "exact") -> np.ndarray:
    """Steering phases psi_n for all antennas, raw (unwrapped) radians.

    exact:  2*pi*[k_n*df*R_n - f_c*(n-1)*d*cos(theta)] / c
            (algebraically identical to 2*pi*(f_c+k_n*df)*R_n/c - 2*pi*f_c*R/c,
            written in the cancellation-free form)
    approx: 2*pi*[k_n*df*R   - f_c*(n-1)*d*cos(theta)] / c
            (drops the k_n*df*(n-1)*d*cos(theta) cross term)
    """
    _check_plan(config, plan)
    k = plan.as_array()
    n_off = np.arange(config.num_antennas, dtype=float)  # (n-1)
    cos_t = math.cos(pos.angle_rad)
    d = config.element_spacing_m
    two_pi_c = 2.0 * math.pi / config.lightspeed_m_s
    carrier_term = config.carrier_freq_hz * n_off * d * cos_t
    if mode == "exact":
        r_n = pos.distance_m - n_off * d * cos_t
        return two_pi_c * (k * config.subchannel_bw_hz * r_n - carrier_term)
    if mode == "approx":
        return two_pi_c * (k * config.subchannel_bw_hz * pos.distance_m - carrier_term)
    raise ValueError(f"unknown phase mode {mode!r}")


def steering_phase(config: SystemConfig, plan: SubcarrierPlan, pos: Position,
                   n: int, mode: str = "exact") -> float:
    """Steering phase of the n-th element (1-based), raw radians."""
    if not 1 <= n <= config.num_antennas:
        raise ValueError(f"antenna index {n} out of range 1..{config.num_antennas}")
    return float(steering_phases(config, plan, pos, mode)[n - 1])


def steering_vector(config: SystemConfig, plan: SubcarrierPlan, pos: Position,
                    mode: str = "exact") -> np.ndarray:
    """Channel phase vector h with entries exp(j*psi_n(pos))."""
    return np.exp(1j * steering_phases(config, plan, pos, mode))


def precoder(config: SystemConfig, plan: SubcarrierPlan, bob: Position,
             mode: str = "exact") -> np.ndarray:
    """Matched-filter precoder v_n = exp(j*psi_n(bob)) / sqrt(N_T)."""
    return steering_vector(config, plan, bob, mode) / math.sqrt(config.num_antennas)


def coherent_sum(config: SystemConfig, plan: SubcarrierPlan, bob: Position,
                 pos: Position, mode: str = "exact") -> complex:
    """Unnormalized beam sum S = sum_n exp(j*(psi_n(bob) - psi_n(pos))).

    Phase differences are formed before exponentiation so that S equals
    exactly N_T at pos == bob.
    """
    dphi = steering_phases(config, plan, bob, mode) - steering_phases(config, plan, pos, mode)
    return complex(np.sum(np.exp(1j * dphi)))


def steering_gain(config: SystemConfig, plan: SubcarrierPlan, bob: Position,
                  pos: Position, mode: str = "exact") -> complex:
    """Beam gain g = S/sqrt(N_T); |g| <= sqrt(N_T), g(bob) = sqrt(N_T)."""
    return coherent_sum(config, plan, bob, pos, mode) / math.sqrt(config.num_antennas)


def an_vector(h_bob: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Project z onto the null space of h_bob and normalize.

    w = (I - h_bob h_bob^H / N_T) z / sqrt(N_T - 1), so h_bob^H w = 0 to
    machine precision and E||w||^2 = 1 for unit-variance circular
    Gaussian z.  Requires ||h_bob||^2 = N_T (unit-modulus entries).
    """
    h_bob = np.asarray(h_bob, dtype=complex)
    z = np.asarray(z, dtype=complex)
    n_t = h_bob.shape[0]
    if n_t < 2:
        raise ValueError("AN projection needs at least 2 antennas")
    if z.shape != h_bob.shape:
        raise ValueError("z must have the same length as h_bob")
    return (z - h_bob * (np.vdot(h_bob, z) / n_t)) / math.sqrt(n_t - 1)


def draw_noise_basis(num_antennas: int, rng: np.random.Generator) -> np.ndarray:
    """One circular-Gaussian z ~ CN(0, I_{N_T}) draw."""
    re = rng.standard_normal(num_antennas)
    im = rng.standard_normal(num_antennas)
    return (re + 1j * im) / math.sqrt(2.0)


def expected_an_power(config: SystemConfig, abs_sum_sq) -> np.ndarray:
    """Closed-form E|h_pos^H w|^2 given |S|^2 = |sum_n exp(j dphi_n)|^2.

    With P the null-space projector of h_bob, E|h^H w|^2 = ||P h||^2/(N_T-1)
    and ||P h||^2 = N_T - |h_bob^H h|^2/N_T = N_T - |S|^2/N_T.
    """
    n_t = config.num_antennas
    proj = np.maximum(n_t - np.asarray(abs_sum_sq) / n_t, 0.0)
    return proj / (n_t - 1)


def sinr_from_coherent_sum(config: SystemConfig, abs_sum_sq) -> np.ndarray:
    """Analytic SINR (linear) from |S|^2; vectorizes over grids.

        SINR = alpha1 P_s |g|^2 / (alpha2 P_s E|h^H w|^2 + N_T delta^2)

    with |g|^2 = |S|^2/N_T.  The N_T*delta^2 term is the receiver noise
    accumulated over the N_T combined subcarrier branches; at Bob
    (|S|^2 = N_T^2, AN nulled) this reduces exactly to alpha1*P_s/delta^2.
    """
    abs_sum_sq = np.asarray(abs_sum_sq, dtype=float)
    n_t = config.num_antennas
    signal = config.alpha1 * config.total_power * abs_sum_sq / n_t
    an = config.alpha2 * config.total_power * expected_an_power(config, abs_sum_sq)
    return signal / (an + n_t * config.noise_power)


def sinr(config: SystemConfig, plan: SubcarrierPlan, bob: Position, pos: Position,
         mode: str = "analytic", phase_mode: str = "exact",
         num_realizations: int = 1000, seed: int = 0) -> float:
    """Receive SINR (linear ratio) at pos for a precoder matched to bob.

    analytic:    AN power from the closed-form expectation over z.
    monte_carlo: AN power averaged over `num_realizations` fresh z draws
                 (estimates the same expectation; converges to analytic).
    """
    s = coherent_sum(config, plan, bob, pos, phase_mode)
    abs_sum_sq = abs(s) ** 2
    n_t = config.num_antennas
    if mode == "analytic":
        return float(sinr_from_coherent_sum(config, abs_sum_sq))
    if mode == "monte_carlo":
        if num_realizations < 1:
            raise ValueError("num_realizations must be >= 1")
        rng = np.random.default_rng(seed)
        h_b = steering_vector(config, plan, bob, phase_mode)
        h_p = steering_vector(config, plan, pos, phase_mode)
        acc = 0.0
        for _ in range(num_realizations):
            w = an_vector(h_b, draw_noise_basis(n_t, rng))
            acc += abs(np.vdot(h_p, w)) ** 2
        an = config.alpha2 * config.total_power * (acc / num_realizations)
        signal = config.alpha1 * config.total_power * abs_sum_sq / n_t
        return float(signal / (an + n_t * config.noise_power))
    raise ValueError(f"unknown sinr mode {mode!r}")


def bob_sinr(config: SystemConfig) -> float:
    """Plan-independent SINR at the matched position: alpha1*P_s/delta^2."""
    return config.alpha1 * config.total_power / config.noise_power


def approx_phase_bound(config: SystemConfig, plan: SubcarrierPlan) -> float:
    """Worst-case |exact - approx| steering-phase discrepancy, radians.

    The dropped cross term is 2*pi*k_n*df*(n-1)*d*cos(theta)/c, bounded by
    2*pi*k_max*df*(N_T-1)*d/c over all positions and antennas.
    """
    k_max = max(plan.indices)
    return (2.0 * math.pi * k_max * config.subchannel_bw_hz
            * (config.num_antennas - 1) * config.element_spacing_m
            / config.lightspeed_m_s)


def to_db(linear) -> np.ndarray:
    """10*log10 of a linear power ratio."""
    return 10.0 * np.log10(np.asarray(linear, dtype=float))
