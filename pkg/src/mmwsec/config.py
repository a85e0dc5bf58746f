"""System parameters, unit conversions and the derived scalar coefficients.

Everything downstream of this module works in linear units (watts,
dimensionless SNRs); dB/dBm appear only at the configuration boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .errors import InfeasibleError


def dbm_to_watt(p_dbm: float) -> float:
    """Convert a power in dBm to watts."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_watt: float) -> float:
    """Convert a power in watts to dBm."""
    if p_watt <= 0.0:
        raise ValueError(f"power must be positive, got {p_watt}")
    return 10.0 * math.log10(p_watt) + 30.0


def path_loss_linear(d_m: float, pl_a: float, pl_b: float) -> float:
    """Linear attenuation of the log-distance path loss model.

    The loss in dB is ``pl_a + pl_b * 10 * log10(d_m)``; the returned value
    is the corresponding linear power attenuation in (0, 1].
    """
    if d_m <= 0.0:
        raise ValueError(f"distance must be positive, got {d_m}")
    alpha_db = pl_a + pl_b * 10.0 * math.log10(d_m)
    return 10.0 ** (-alpha_db / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """All physical and protocol parameters of one scenario.

    Resolvable-path counts follow the single-cluster angular-domain model:
    the destination and eavesdropper occupy N_D and N_E angular bins of
    which N_C are shared.
    """

    M: int = 100              # transmit antennas (uniform linear array, half-wavelength spacing)
    N_D: int = 20             # destination resolvable paths, N_D < M
    N_E: int | None = None    # eavesdropper resolvable paths; defaults to N_D
    N_C: int = 16             # common paths, N_C <= min(N_D, N_E)
    P_dBm: float = 5.0        # total transmit power
    sigma_n2_dBm: float = -50.0   # receiver noise power
    k_tx: float = 0.1         # transmitter error vector magnitude, [0, 1)
    k_rx: float = 0.1         # receiver error vector magnitude, [0, 1)
    d_D_m: float = 100.0      # source->destination distance, meters
    d_E_m: float = 100.0      # source->eavesdropper distance, meters
    pl_a: float = 61.4        # path loss intercept, dB (28 GHz measurement)
    pl_b: float = 2.0         # path loss slope
    R_s: float = 5.0          # target secrecy rate, bits/s/Hz
    epsilon: float = 0.01     # maximum tolerable secrecy outage probability

    def __post_init__(self):
        if self.N_E is None:
            object.__setattr__(self, "N_E", self.N_D)
        if self.M < 1:
            raise ValueError("M must be a positive integer")
        if not (0 <= self.N_D < self.M and 0 <= self.N_E < self.M):
            raise ValueError("path counts must satisfy 0 <= N_D, N_E < M")
        if not (0 <= self.N_C <= min(self.N_D, self.N_E)):
            raise ValueError("N_C must satisfy 0 <= N_C <= min(N_D, N_E)")
        if not (0.0 <= self.k_tx < 1.0 and 0.0 <= self.k_rx < 1.0):
            raise ValueError("EVMs k_tx, k_rx must lie in [0, 1)")
        if self.d_D_m <= 0.0 or self.d_E_m <= 0.0:
            raise ValueError("distances must be positive")
        if self.R_s < 0.0:
            raise ValueError("R_s must be non-negative")
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError("epsilon must lie in (0, 1]")

    # -- derived scalars ---------------------------------------------------

    @property
    def n_ec(self) -> int:
        """Eavesdropper-only path count N_E - N_C."""
        return self.N_E - self.N_C

    @property
    def n_dc(self) -> int:
        """Destination-only path count N_D - N_C."""
        return self.N_D - self.N_C

    @property
    def k_tot2(self) -> float:
        """Aggregate impairment level k_tx^2 + k_rx^2."""
        return self.k_tx**2 + self.k_rx**2

    @property
    def power_watt(self) -> float:
        return dbm_to_watt(self.P_dBm)

    @property
    def noise_watt(self) -> float:
        return dbm_to_watt(self.sigma_n2_dBm)

    def alpha_d(self) -> float:
        """Linear path attenuation of the destination link."""
        return path_loss_linear(self.d_D_m, self.pl_a, self.pl_b)

    def alpha_e(self) -> float:
        """Linear path attenuation of the eavesdropper link."""
        return path_loss_linear(self.d_E_m, self.pl_a, self.pl_b)

    def beta_d(self) -> float:
        """Per-link SNR scale of the destination, P*M*alpha_D/(N_D*sigma_n^2)."""
        if self.N_D == 0:
            raise InfeasibleError("beta_D undefined for N_D = 0")
        return self.power_watt * self.M * self.alpha_d() / (self.N_D * self.noise_watt)

    def beta_e(self) -> float:
        """Per-link SNR scale of the eavesdropper, P*M*alpha_E/(N_E*sigma_n^2)."""
        if self.N_E == 0:
            raise InfeasibleError("beta_E undefined for N_E = 0")
        return self.power_watt * self.M * self.alpha_e() / (self.N_E * self.noise_watt)

    def with_overrides(self, **kwargs) -> "SystemConfig":
        """Return a copy with the given fields replaced."""
        return replace(self, **kwargs)


@dataclass(frozen=True)
class EffectiveCoeffs:
    """The five scalars feeding every closed form, plus their scale factors.

    For a channel state with common/non-common destination gains
    (G_hat, G_check), G = G_hat + G_check:

        a = beta_E * G_hat / G        leakage scale along the beam
        b = beta_E * (1 + k_tx^2) / N_EC   AN-plus-distortion scale at E
        c = k_tx^2 * a                transmit-distortion scale at E
        d = beta_D * G                destination SNR scale
        e = k_tot^2 * d               aggregate-distortion scale at D

    The bar variants are the gain-normalized versions (a = a_bar*G_hat/G,
    d = d_bar*G, ...), constant across channel draws.
    """

    beta_D: float
    beta_E: float
    k_tx2: float
    k_tot2: float
    a: float
    b: float
    c: float
    d: float
    e: float
    a_bar: float = field(default=0.0)
    c_bar: float = field(default=0.0)
    d_bar: float = field(default=0.0)
    e_bar: float = field(default=0.0)


def derive_coeffs(cfg: SystemConfig, draw) -> EffectiveCoeffs:
    """Build the effective scalar coefficients for one channel state.

    Args:
        cfg: system parameters.
        draw: any object with ``G_hat``, ``G_check`` and ``G`` attributes
            (a full ChannelDraw or a lightweight stand-in).

    Raises:
        InfeasibleError: if N_E == N_C, which leaves no eavesdropper-only
            direction to carry artificial noise (b would divide by zero).
    """
    if cfg.n_ec <= 0:
        raise InfeasibleError(
            f"N_E - N_C must be positive to aim artificial noise (got {cfg.n_ec})"
        )
    g_hat = float(draw.G_hat)
    g_check = float(draw.G_check)
    g_tot = float(draw.G)
    if cfg.N_D > 0 and g_tot <= 0.0:
        raise ValueError("draw.G must be positive when N_D > 0")

    beta_d = cfg.beta_d()
    beta_e = cfg.beta_e()
    k_tx2 = cfg.k_tx**2
    k_tot2 = cfg.k_tot2

    a = beta_e * g_hat / g_tot
    b = beta_e * (1.0 + k_tx2) / cfg.n_ec
    c = k_tx2 * a
    d = beta_d * g_tot
    e = k_tot2 * d
    return EffectiveCoeffs(
        beta_D=beta_d,
        beta_E=beta_e,
        k_tx2=k_tx2,
        k_tot2=k_tot2,
        a=a,
        b=b,
        c=c,
        d=d,
        e=e,
        a_bar=beta_e,
        c_bar=k_tx2 * beta_e,
        d_bar=beta_d,
        e_bar=k_tot2 * beta_d,
    )


# -- flat key=value configuration files ------------------------------------

_INT_FIELDS = {"M", "N_D", "N_E", "N_C"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key in _INT_FIELDS:
        return int(raw)
    return float(raw)


def load_config(path: str, overrides: dict | None = None) -> SystemConfig:
    """Read a flat ``key=value`` configuration file.

    Blank lines and lines starting with ``#`` are ignored.  Keys must match
    SystemConfig field names; ``overrides`` (same conventions, values may
    already be numeric) win over file contents.
    """
    known = {f.name for f in fields(SystemConfig)}
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown configuration key {key!r}")
            values[key] = _parse_value(key, raw)
    values.update(coerce_overrides(overrides or {}))
    return SystemConfig(**values)


def coerce_overrides(overrides: dict) -> dict:
    """Normalize a key->value mapping onto SystemConfig field types."""
    known = {f.name for f in fields(SystemConfig)}
    out: dict = {}
    for key, value in overrides.items():
        if key not in known:
            raise ValueError(f"unknown configuration key {key!r}")
        out[key] = _parse_value(key, str(value)) if isinstance(value, str) else value
    return out


def save_config(cfg: SystemConfig, path: str) -> None:
    """Write a configuration in the flat key=value format."""
    with open(path, "w", encoding="utf-8") as fh:
        for f in fields(SystemConfig):
            fh.write(f"{f.name}={getattr(cfg, f.name)!r}\n")
