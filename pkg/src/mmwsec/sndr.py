"""Signal-to-noise-plus-distortion ratios at destination and eavesdropper."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import EffectiveCoeffs


@dataclass(frozen=True)
class SndrPair:
    """Both receivers' SNDRs at one power split."""

    y_D: float
    y_E: float
    tau: float


def sndr_pair(tau: float, u: float, v: float, coeffs: EffectiveCoeffs) -> SndrPair:
    """Evaluate both SNDRs for one channel state and split."""
    return SndrPair(
        y_D=sndr_destination(tau, coeffs),
        y_E=float(sndr_eve(tau, u, v, coeffs)),
        tau=tau,
    )


def sndr_destination_values(tau, d, e):
    """Destination SNDR tau*d/(tau*e + 1) on raw scalars or arrays."""
    return tau * d / (tau * e + 1.0)


def sndr_eve_values(tau, u, v, a, b, c):
    """Eavesdropper SNDR tau*a*u / ((1-tau)*b*v + tau*c*u + 1) on raw values."""
    return tau * a * u / ((1.0 - tau) * b * v + tau * c * u + 1.0)


def sndr_destination(tau: float, coeffs: EffectiveCoeffs) -> float:
    """Destination SNDR at power split tau."""
    return sndr_destination_values(tau, coeffs.d, coeffs.e)


def sndr_eve(tau: float, u, v, coeffs: EffectiveCoeffs):
    """Eavesdropper SNDR at power split tau; accepts scalar or array u, v."""
    return sndr_eve_values(tau, u, v, coeffs.a, coeffs.b, coeffs.c)


def sndr_destination_ideal(tau: float, coeffs: EffectiveCoeffs) -> float:
    """Ideal-hardware destination SNR tau*d."""
    return tau * coeffs.d


def sndr_eve_ideal(tau: float, u, v, coeffs: EffectiveCoeffs, n_ec: int):
    """Ideal-hardware eavesdropper SNR N_EC*tau*a*u / ((1-tau)*beta_E*v + N_EC)."""
    return n_ec * tau * coeffs.a * u / ((1.0 - tau) * coeffs.beta_E * v + n_ec)


def high_snr_ceiling(k_tot2: float) -> float:
    """Large-power limit of the destination SNDR, 1/k_tot^2 (inf if ideal)."""
    if k_tot2 < 0.0:
        raise ValueError("k_tot2 must be non-negative")
    if k_tot2 == 0.0:
        return math.inf
    return 1.0 / k_tot2
