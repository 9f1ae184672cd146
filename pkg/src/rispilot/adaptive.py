"""Adaptive selection of surface configurations during pilot transmission.

Pilot-time configurations are drawn from a pool of N candidates, one per
plausible angle. The angles are chosen so their sines are equally spaced,
which keeps the candidate beams well separated. After an initial pair of
pilots, each further pilot reuses the unused candidate closest (largest
inner-product magnitude) to the configuration that would be optimal if
the current angle estimate were exact. The estimate is recomputed from
all received pilots after every transmission.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateDirectionError,
    DimensionError,
    InsufficientPilotsError,
    PoolExhaustedError,
)
from .estimators import (
    AoaSearchGrid,
    EstimationResult,
    PilotCampaign,
    UtilitySamples,
)
from .model import (
    TWO_PI,
    ArrayModel,
    KnownBsRisChannel,
    LosChannel,
    RisConfiguration,
    array_response,
    effective_channel,
    expand_channel,
    steering_matrix,
)


@dataclass(frozen=True, eq=False)
class PlausibleAngleSet:
    """Candidate angles whose sines are equally spaced in [-1, 1]."""

    angles: np.ndarray

    def __post_init__(self) -> None:
        angles = np.array(self.angles, dtype=float)
        if angles.ndim != 1 or angles.size == 0:
            raise ValueError("angle set must be a nonempty 1-D array")
        if np.any(np.abs(angles) > np.pi / 2):
            raise ValueError("plausible angles must lie in [-pi/2, pi/2]")
        if angles.size > 1 and np.any(np.diff(angles) <= 0):
            raise ValueError("plausible angles must be strictly increasing")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    def __len__(self) -> int:
        return self.angles.size

    def __iter__(self):
        return iter(self.angles)


def plausible_angles(num_elements: int) -> PlausibleAngleSet:
    """The N angles arcsin(2m/N) for m = -floor((N-1)/2), ..., floor(N/2).

    Beams of an N-element ULA separated by a sine difference of 2/N are
    nearly orthogonal, so these candidates cover the half-plane evenly.
    For even N the last index reaches arcsin(1) = pi/2.
    """
    if num_elements < 1:
        raise ValueError("num_elements must be a positive integer")
    m = np.arange(-((num_elements - 1) // 2), num_elements // 2 + 1)
    return PlausibleAngleSet(np.arcsin(2.0 * m / num_elements))


def optimal_configuration(
    bs_ris_channel: KnownBsRisChannel, aoa: float, array: ArrayModel
) -> RisConfiguration:
    """Capacity-achieving configuration for a LOS channel from ``aoa``.

    Entry n is exp(-1j*arg(h_n)) * conj(a(aoa)_n): it cancels the BS-RIS
    phase and the arrival phase so all element paths add coherently.
    """
    if array.num_elements != bs_ris_channel.num_elements:
        raise DimensionError(
            f"array has {array.num_elements} elements but the BS-RIS channel "
            f"has {bs_ris_channel.num_elements}"
        )
    compensation = np.exp(-1j * np.angle(bs_ris_channel.coefficients))
    return RisConfiguration(compensation * np.conj(array_response(array, aoa)))


@dataclass(frozen=True, eq=False)
class PoolEntry:
    """A candidate configuration tagged with the angle it points at."""

    angle: float
    configuration: RisConfiguration


class ConfigurationPool:
    """Candidate configurations split into unused and consumed ones.

    Entries are kept sorted by angle; ties in the selection rules resolve
    to the smallest remaining angle.
    """

    def __init__(self, entries: Iterable[PoolEntry]):
        self._remaining = sorted(entries, key=lambda entry: entry.angle)
        self._used: list[PoolEntry] = []
        self._size = len(self._remaining)
        if self._size == 0:
            raise ValueError("configuration pool must not be empty")

    @property
    def size(self) -> int:
        return self._size

    @property
    def remaining(self) -> tuple[PoolEntry, ...]:
        return tuple(self._remaining)

    @property
    def used(self) -> tuple[PoolEntry, ...]:
        return tuple(self._used)

    def _take(self, index: int) -> PoolEntry:
        entry = self._remaining.pop(index)
        self._used.append(entry)
        return entry

    def take_nearest(self, angle: float) -> PoolEntry:
        """Consume the unused entry whose sine is closest to sin(angle)."""
        if not self._remaining:
            raise PoolExhaustedError("no unused configurations left in the pool")
        sines = np.sin([entry.angle for entry in self._remaining])
        return self._take(int(np.argmin(np.abs(sines - np.sin(angle)))))

    def take_best_match(self, reference: RisConfiguration) -> PoolEntry:
        """Consume the unused entry maximizing |reference^H entry|."""
        if not self._remaining:
            raise PoolExhaustedError("no unused configurations left in the pool")
        scores = [
            config_correlation(reference, entry.configuration)
            for entry in self._remaining
        ]
        return self._take(int(np.argmax(scores)))


def build_configuration_pool(
    bs_ris_channel: KnownBsRisChannel,
    angles: PlausibleAngleSet,
    array: ArrayModel,
) -> ConfigurationPool:
    """One candidate configuration per plausible angle, all unused."""
    entries = [
        PoolEntry(float(angle), optimal_configuration(bs_ris_channel, angle, array))
        for angle in angles
    ]
    return ConfigurationPool(entries)


def config_correlation(a: RisConfiguration, b: RisConfiguration) -> float:
    """Magnitude of the inner product |a^H b| between two configurations.

    For pool configurations over a ULA this is the Dirichlet kernel
    |sin(N*pi*rho*d) / sin(pi*rho*d)| in the sine difference d of their
    angles, with rho the spacing-to-wavelength ratio.
    """
    if len(a) != len(b):
        raise DimensionError(
            f"configurations of length {len(a)} and {len(b)} cannot be compared"
        )
    return float(np.abs(np.vdot(a.phases, b.phases)))


#: Sines of the two starting beams: the one-third and two-thirds
#: quantiles of the sine range, far apart without being endfire.
INITIAL_SINES = (-0.5, 0.5)


def select_initial_pair(
    pool: ConfigurationPool,
) -> tuple[RisConfiguration, RisConfiguration]:
    """Consume and return the two starting configurations.

    Picks the entries whose sines are nearest -1/2 and +1/2.
    """
    if len(pool.remaining) < 2:
        raise PoolExhaustedError("the pool must hold at least two configurations")
    first = pool.take_nearest(float(np.arcsin(INITIAL_SINES[0])))
    second = pool.take_nearest(float(np.arcsin(INITIAL_SINES[1])))
    return first.configuration, second.configuration


def simulate_pilot_reception(
    config_row: RisConfiguration,
    h: KnownBsRisChannel,
    g,
    pilot_power: float,
    noise_std: float,
    rng,
) -> complex:
    """One received pilot sample theta^T D_h g sqrt(P_p) + w.

    The noise w is circularly-symmetric complex Gaussian with variance
    ``noise_std**2`` (independent real and imaginary parts of variance
    ``noise_std**2 / 2``). With ``noise_std == 0`` nothing is drawn and
    the noise-free value is returned.
    """
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")
    signal = effective_channel(config_row, h, g) * np.sqrt(pilot_power)
    if noise_std == 0.0:
        return signal
    rng = np.random.default_rng(rng)
    re, im = rng.standard_normal(2)
    return signal + (re + 1j * im) * (noise_std / np.sqrt(2.0))


def local_peak_indices(values) -> np.ndarray:
    """Indices of strict local maxima, boundaries included."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("values must be 1-D")
    if v.size <= 1:
        return np.arange(v.size)
    left = np.empty(v.size, dtype=bool)
    right = np.empty(v.size, dtype=bool)
    left[0] = True
    left[1:] = v[1:] > v[:-1]
    right[-1] = True
    right[:-1] = v[:-1] > v[1:]
    return np.nonzero(left & right)[0]


def top_two_peak_gap_db(values) -> float:
    """Gap in dB between the largest and second-largest local maxima.

    Returns ``inf`` when fewer than two peaks exist or the runner-up is
    zero, and 0.0 for an all-flat profile.
    """
    v = np.asarray(values, dtype=float)
    idx = local_peak_indices(v)
    if idx.size == 0:
        return 0.0
    peaks = np.sort(v[idx])[::-1]
    if peaks.size < 2:
        return float("inf")
    if peaks[0] <= 0.0:
        return 0.0
    if peaks[1] <= 0.0:
        return float("inf")
    return float(10.0 * np.log10(peaks[0] / peaks[1]))


@dataclass(frozen=True, eq=False)
class AdaptiveStep:
    """State after one pilot: what was sent, what came back, what is believed.

    ``aoa_estimate``/``gain_estimate``/``phase_estimate`` use all pilots
    up to and including this one; they are ``None`` for the very first
    pilot because a single projection cannot identify the angle.
    """

    pilot_index: int
    config_angle: float
    received: complex
    aoa_estimate: float | None
    gain_estimate: float | None
    phase_estimate: float | None
    utility: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.utility is not None:
            vec = np.array(self.utility, dtype=float)
            vec.setflags(write=False)
            object.__setattr__(self, "utility", vec)


@dataclass(frozen=True, eq=False)
class AdaptiveRunRecord:
    """Full transcript of one adaptive estimation run."""

    steps: tuple[AdaptiveStep, ...]
    campaign: PilotCampaign
    result: EstimationResult
    grid: AoaSearchGrid

    def step_for(self, num_pilots: int) -> AdaptiveStep:
        """Step holding the estimate based on the first ``num_pilots`` pilots."""
        if not 1 <= num_pilots <= len(self.steps):
            raise ValueError(
                f"run holds {len(self.steps)} pilots, not {num_pilots}"
            )
        return self.steps[num_pilots - 1]


def _pilot_power_for_snr(
    pilot_snr: float, gain: float, bs_ris_channel: KnownBsRisChannel
) -> tuple[float, float]:
    """(pilot_power, noise_std) realizing a per-element pilot SNR.

    Noise power is normalized to 1 and the pilot power is scaled so that
    pilot_power * gain * mean(|h_n|^2) equals ``pilot_snr``. An infinite
    SNR maps to zero noise with unit pilot power.
    """
    if np.isinf(pilot_snr) and pilot_snr > 0:
        return 1.0, 0.0
    if not pilot_snr > 0:
        raise ValueError("pilot_snr must be positive (use inf for noise-free)")
    mean_h2 = float(np.mean(np.abs(bs_ris_channel.coefficients) ** 2))
    if gain > 0:
        return float(pilot_snr) / (gain * mean_h2), 1.0
    return float(pilot_snr), 1.0


def run_adaptive_estimation(
    true_channel: LosChannel,
    bs_ris_channel: KnownBsRisChannel,
    array: ArrayModel,
    num_pilots: int,
    pilot_snr: float,
    rng=None,
    grid: AoaSearchGrid | None = None,
    *,
    record_utility: bool = False,
    initial_angles: tuple[float, float] | None = None,
    peak_gap_db: float | None = None,
) -> AdaptiveRunRecord:
    """Run the adaptive estimation loop for ``num_pilots`` pilots.

    The first two pilots use the starting pair (or ``initial_angles``
    nearest-sine matches when prior knowledge is available). After every
    pilot i >= 2 the angle and coefficient estimates are refreshed from
    all data so far; while pilots remain, the unused pool configuration
    best matching the would-be-optimal configuration is transmitted
    next. ``pilot_snr`` is the per-element pilot SNR in linear scale
    (``inf`` for noise-free runs). When ``peak_gap_db`` is set, the run
    stops early once the utility's top two peaks differ by more than
    that many dB.

    The returned record exposes one step per transmitted pilot; the
    estimate stored at step i is exactly what a run with budget i would
    have returned under the same noise draws.
    """
    n = array.num_elements
    if num_pilots < 2:
        raise InsufficientPilotsError("at least two pilots are required")
    if num_pilots > n:
        raise PoolExhaustedError(
            f"budget {num_pilots} exceeds the {n} available configurations"
        )
    if bs_ris_channel.num_elements != n:
        raise DimensionError(
            f"BS-RIS channel length {bs_ris_channel.num_elements} does not "
            f"match the {n}-element array"
        )
    if grid is None:
        grid = AoaSearchGrid()
    rng = np.random.default_rng(rng)

    pilot_power, noise_std = _pilot_power_for_snr(
        pilot_snr, true_channel.gain, bs_ris_channel
    )
    g = expand_channel(true_channel, array)
    pool = build_configuration_pool(bs_ris_channel, plausible_angles(n), array)
    grid_angles = grid.angles
    # Columns hold D_h a(angle); every pilot row projects onto them.
    directions = bs_ris_channel.coefficients[:, None] * steering_matrix(
        array, grid_angles
    )

    inner_acc = np.zeros(grid.num_points, dtype=np.complex128)  # y^H B D_h a
    energy_acc = np.zeros(grid.num_points, dtype=float)  # ||B D_h a||^2
    rows: list[np.ndarray] = []
    samples: list[complex] = []
    pilot_angles: list[float] = []

    def transmit(entry: PoolEntry) -> None:
        sample = simulate_pilot_reception(
            entry.configuration, bs_ris_channel, g, pilot_power, noise_std, rng
        )
        row_projection = entry.configuration.phases @ directions
        inner_acc[:] += np.conj(sample) * row_projection
        energy_acc[:] += np.abs(row_projection) ** 2
        rows.append(entry.configuration.phases)
        samples.append(sample)
        pilot_angles.append(entry.angle)

    if initial_angles is None:
        transmit(pool.take_nearest(float(np.arcsin(INITIAL_SINES[0]))))
        transmit(pool.take_nearest(float(np.arcsin(INITIAL_SINES[1]))))
    else:
        start_a, start_b = initial_angles
        transmit(pool.take_nearest(float(start_a)))
        transmit(pool.take_nearest(float(start_b)))

    steps: list[AdaptiveStep] = [
        AdaptiveStep(1, pilot_angles[0], samples[0], None, None, None)
    ]

    aoa_hat = gain_hat = phase_hat = 0.0
    last_utility: np.ndarray | None = None
    for i in range(2, num_pilots + 1):
        if np.all(energy_acc == 0.0):
            raise DegenerateDirectionError(
                "no grid direction carries pilot energy"
            )
        # directions on shared kernel nulls explain nothing and score 0,
        # matching ml_utility_profile
        utility = np.divide(
            np.abs(inner_acc) ** 2,
            energy_acc,
            out=np.zeros_like(energy_acc),
            where=energy_acc > 0.0,
        )
        peak = int(np.argmax(utility))
        if energy_acc[peak] == 0.0:
            # only reachable when every utility is zero and the tie-break
            # lands on a dead direction; matches estimate_scalar_coefficient
            raise DegenerateDirectionError(
                "the selected direction carries no pilot energy"
            )
        aoa_hat = float(grid_angles[peak])
        inner = inner_acc[peak]
        gain_hat = abs(inner) ** 2 / (pilot_power * energy_acc[peak] ** 2)
        phase_hat = float((-np.angle(inner)) % TWO_PI)
        last_utility = utility
        steps.append(
            AdaptiveStep(
                i,
                pilot_angles[i - 1],
                samples[i - 1],
                aoa_hat,
                gain_hat,
                phase_hat,
                utility if record_utility else None,
            )
        )
        if i == num_pilots:
            break
        if peak_gap_db is not None and top_two_peak_gap_db(utility) > peak_gap_db:
            break
        reference = optimal_configuration(bs_ris_channel, aoa_hat, array)
        transmit(pool.take_best_match(reference))

    campaign = PilotCampaign(
        np.vstack(rows), np.asarray(samples), pilot_power, bs_ris_channel
    )
    channel_estimate = (
        np.sqrt(gain_hat) * np.exp(1j * phase_hat) * array_response(array, aoa_hat)
    )
    trace = (
        UtilitySamples(grid_angles, last_utility)
        if record_utility and last_utility is not None
        else None
    )
    result = EstimationResult(aoa_hat, gain_hat, phase_hat, channel_estimate, trace)
    return AdaptiveRunRecord(tuple(steps), campaign, result, grid)
