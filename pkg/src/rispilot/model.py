"""Signal-model primitives for a passive reflecting-surface link.

A uniform linear array (ULA) of phase-shifting elements relays a
single-antenna user toward a single-antenna base station. Conventions
used throughout the package:

* angles are radians and live in the front half-plane [-pi/2, pi/2],
* element 0 of the array is the phase reference,
* complex values are double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AngleDomainError, DimensionError, SingularChannelError

TWO_PI = 2.0 * np.pi

#: Tolerance on | |entry| - 1 | for phase-only configuration vectors.
UNIT_MODULUS_TOL = 1e-12


def _check_front_half_plane(aoa: float) -> None:
    if not -np.pi / 2 <= aoa <= np.pi / 2:
        raise AngleDomainError(
            f"angle {aoa!r} rad lies outside the front half-plane [-pi/2, pi/2]"
        )


def _readonly_complex_vector(values, what: str) -> np.ndarray:
    vec = np.array(values, dtype=np.complex128)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError(f"{what} must be a nonempty 1-D complex vector")
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True)
class ArrayModel:
    """Uniform linear array geometry.

    ``spacing_ratio`` is the element spacing divided by the carrier
    wavelength; only this ratio enters the array response.
    """

    num_elements: int
    spacing_ratio: float = 0.25

    def __post_init__(self) -> None:
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise ValueError("num_elements must be a positive integer")
        if not self.spacing_ratio > 0:
            raise ValueError("spacing_ratio must be positive")
        object.__setattr__(self, "num_elements", int(self.num_elements))
        object.__setattr__(self, "spacing_ratio", float(self.spacing_ratio))


@dataclass(frozen=True)
class LosChannel:
    """Single-path channel from the user to the array.

    Parameterized by a linear power gain, the phase at the reference
    element, and the azimuth angle of arrival. The phase is wrapped to
    [0, 2*pi) on construction.
    """

    gain: float
    phase: float
    aoa: float

    def __post_init__(self) -> None:
        if not self.gain >= 0:
            raise ValueError("gain must be nonnegative")
        _check_front_half_plane(self.aoa)
        object.__setattr__(self, "gain", float(self.gain))
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)
        object.__setattr__(self, "aoa", float(self.aoa))

    @property
    def coefficient(self) -> complex:
        """Complex channel coefficient at the reference element."""
        return complex(np.sqrt(self.gain) * np.exp(1j * self.phase))


@dataclass(frozen=True, eq=False)
class RisConfiguration:
    """Phase-shift vector of the surface, stored as unit-modulus entries.

    Entry n holds exp(-1j * theta_n) for the phase shift theta_n applied
    by element n.
    """

    phases: np.ndarray

    def __post_init__(self) -> None:
        vec = _readonly_complex_vector(self.phases, "configuration")
        deviation = np.max(np.abs(np.abs(vec) - 1.0))
        if deviation > UNIT_MODULUS_TOL:
            raise ValueError(
                f"configuration entries must have unit modulus "
                f"(worst deviation {deviation:.3e})"
            )
        object.__setattr__(self, "phases", vec)

    def __len__(self) -> int:
        return self.phases.size


@dataclass(frozen=True, eq=False)
class KnownBsRisChannel:
    """Known channel coefficients between the surface and the base station.

    All entries must be nonzero so the diagonal channel matrix can be
    inverted when undoing its effect.
    """

    coefficients: np.ndarray

    def __post_init__(self) -> None:
        vec = _readonly_complex_vector(self.coefficients, "BS-RIS channel")
        if np.any(vec == 0):
            raise SingularChannelError("BS-RIS channel coefficients must be nonzero")
        object.__setattr__(self, "coefficients", vec)

    def __len__(self) -> int:
        return self.coefficients.size

    @property
    def num_elements(self) -> int:
        return self.coefficients.size


def array_response(array: ArrayModel, aoa: float) -> np.ndarray:
    """Response of the ULA to a plane wave arriving from ``aoa``.

    Element n carries exp(-1j * 2*pi * spacing_ratio * n * sin(aoa)), so
    the reference element is exactly 1 and every entry has unit modulus.
    """
    _check_front_half_plane(aoa)
    indices = np.arange(array.num_elements)
    return np.exp(-1j * TWO_PI * array.spacing_ratio * np.sin(aoa) * indices)


def steering_matrix(array: ArrayModel, aoas) -> np.ndarray:
    """Array responses for many angles at once, one column per angle."""
    angles = np.atleast_1d(np.asarray(aoas, dtype=float))
    if np.any(np.isnan(angles)) or np.any(np.abs(angles) > np.pi / 2):
        raise AngleDomainError("all angles must lie in [-pi/2, pi/2]")
    indices = np.arange(array.num_elements)[:, None]
    return np.exp(-1j * TWO_PI * array.spacing_ratio * indices * np.sin(angles)[None, :])


def expand_channel(channel: LosChannel, array: ArrayModel) -> np.ndarray:
    """Vector form of a LOS channel: sqrt(gain) * e^{j phase} * response(aoa)."""
    return channel.coefficient * array_response(array, channel.aoa)


def effective_channel(
    ris: RisConfiguration, h: KnownBsRisChannel, g
) -> complex:
    """Scalar end-to-end channel sum_n h_n * g_n * exp(-1j*theta_n)."""
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim != 1 or not (len(ris) == len(h) == g.size):
        raise DimensionError(
            f"configuration ({len(ris)}), BS-RIS channel ({len(h)}) and channel "
            f"vector ({g.size}) must share one length"
        )
    return complex(np.sum(ris.phases * h.coefficients * g))


def achievable_rate(effective: complex, data_snr_scale: float) -> float:
    """Rate log2(1 + |effective|^2 * P_d / sigma^2) in bits/s/Hz."""
    if not data_snr_scale > 0:
        raise ValueError("data_snr_scale must be positive")
    return float(np.log2(1.0 + np.abs(effective) ** 2 * data_snr_scale))


def capacity(h: KnownBsRisChannel, g, data_snr_scale: float) -> float:
    """Rate upper bound log2(1 + (sum_n |h_n g_n|)^2 * P_d / sigma^2).

    Attained by the configuration that phase-aligns all reflected paths,
    theta_n = arg(h_n) + arg(g_n).
    """
    if not data_snr_scale > 0:
        raise ValueError("data_snr_scale must be positive")
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim != 1 or g.size != len(h):
        raise DimensionError(
            f"channel vector ({g.size}) must match BS-RIS channel ({len(h)})"
        )
    aligned = np.sum(np.abs(h.coefficients * g))
    return float(np.log2(1.0 + aligned**2 * data_snr_scale))


def random_bs_ris_channel(num_elements: int, rng) -> KnownBsRisChannel:
    """Unit-magnitude BS-RIS channel with phases drawn uniformly.

    The magnitude profile is irrelevant once the configuration fully
    compensates the channel phases, so unit entries are the default.
    """
    rng = np.random.default_rng(rng)
    phases = rng.uniform(0.0, TWO_PI, size=num_elements)
    return KnownBsRisChannel(np.exp(1j * phases))
