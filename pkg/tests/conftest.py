"""Shared helpers for the test suite."""

import numpy as np
import pytest

from rispilot import (
    ArrayModel,
    KnownBsRisChannel,
    LosChannel,
    PilotCampaign,
    expand_channel,
    optimal_configuration,
)


def circular_diff(a: float, b: float) -> float:
    """Distance between two phases on the circle."""
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def pool_config_rows(h: KnownBsRisChannel, angles, array: ArrayModel) -> np.ndarray:
    """Stack of candidate-configuration rows for the given angles."""
    return np.vstack(
        [optimal_configuration(h, float(a), array).phases for a in angles]
    )


def make_campaign(
    rows: np.ndarray,
    h: KnownBsRisChannel,
    channel: LosChannel,
    array: ArrayModel,
    pilot_power: float,
    noise_std: float = 0.0,
    rng=None,
) -> PilotCampaign:
    """Simulate a whole campaign at once: y = B D_h g sqrt(P_p) + w."""
    g = expand_channel(channel, array)
    received = rows @ (h.coefficients * g) * np.sqrt(pilot_power)
    if noise_std > 0:
        rng = np.random.default_rng(rng)
        noise = rng.standard_normal(rows.shape[0]) + 1j * rng.standard_normal(
            rows.shape[0]
        )
        received = received + noise * (noise_std / np.sqrt(2.0))
    return PilotCampaign(rows, received, pilot_power, h)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
