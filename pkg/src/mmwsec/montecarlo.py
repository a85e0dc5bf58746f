"""Stochastic oracles for every closed form in the package.

Estimates are reproducible by construction: trials are split into
fixed-size chunks, each chunk draws from its own counter-derived stream,
and chunk results are reduced in index order, so the outcome is identical
for any worker count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import an_beamformer, build_basis, channel_row, sample_channel, sample_path_sets
from .config import EffectiveCoeffs, SystemConfig, derive_coeffs
from .sndr import sndr_destination, sndr_destination_values, sndr_eve, sndr_eve_values
from .sop import SecrecyTarget, outage_threshold

_CHUNK = 1 << 17
_ACCEPT_WARN = 1e-4


@dataclass(frozen=True)
class McEstimate:
    """A Monte-Carlo estimate with its standard error and provenance."""

    value: float
    std_error: float
    n: int
    seed: int
    accept_rate: float = 1.0


def as_rng(rng) -> np.random.Generator:
    """Accept either a 64-bit seed or a live numpy Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.Philox(int(rng) & 0xFFFFFFFFFFFFFFFF))


def _substream(seed: int, chunk: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, chunk], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _chunk_sums(n: int, rng, chunk_fn, width: int, workers: int = 1) -> np.ndarray:
    """Accumulate chunk_fn(stream, size) -> length-``width`` sums over n trials.

    With an integer seed every chunk gets its own counter-derived stream and
    the reduction order is fixed, so results do not depend on ``workers``.
    A live Generator forces sequential execution on that stream.
    """
    if isinstance(rng, np.random.Generator):
        total = np.zeros(width)
        done = 0
        while done < n:
            m = min(_CHUNK, n - done)
            total += chunk_fn(rng, m)
            done += m
        return total
    seed = int(rng)
    sizes = [(i, min(_CHUNK, n - i * _CHUNK)) for i in range((n + _CHUNK - 1) // _CHUNK)]
    if workers <= 1:
        parts = [chunk_fn(_substream(seed, i), m) for i, m in sizes]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda im: chunk_fn(_substream(seed, im[0]), im[1]), sizes))
    total = np.zeros(width)
    for part in parts:  # fixed order keeps the reduction deterministic
        total += part
    return total


def _seed_of(rng) -> int:
    return -1 if isinstance(rng, np.random.Generator) else int(rng)


def _binomial_se(p: float, n: int) -> float:
    if n <= 0:
        return 0.0
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


# ---------------------------------------------------------------------------
# conditional SOP oracle (destination state fixed, eavesdropper random)
# ---------------------------------------------------------------------------

def empirical_sop_conditional(
    coeffs: EffectiveCoeffs,
    tau: float,
    target: SecrecyTarget,
    n_ec: int,
    n: int,
    rng,
    workers: int = 1,
) -> McEstimate:
    """Frequency of the outage event over the eavesdropper randomness (u, v).

    The event is evaluated through the SNDR expressions, independently of
    the closed-form algebra it validates.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    x_th = outage_threshold(tau, target, coeffs)

    def chunk(stream: np.random.Generator, m: int) -> np.ndarray:
        u = stream.exponential(1.0, size=m)
        v = stream.gamma(n_ec, 1.0, size=m) if n_ec > 0 else np.zeros(m)
        y_e = sndr_eve(tau, u, v, coeffs)
        return np.array([float(np.count_nonzero(y_e > x_th))])

    hits = _chunk_sums(n, rng, chunk, width=1, workers=workers)[0]
    p = hits / n
    return McEstimate(value=p, std_error=_binomial_se(p, n), n=n, seed=_seed_of(rng))


# ---------------------------------------------------------------------------
# full SOP oracle (channel state random, conditioned on the on-off region)
# ---------------------------------------------------------------------------

def empirical_sop(
    cfg: SystemConfig,
    tau: float,
    target: SecrecyTarget,
    n: int,
    rng,
    workers: int = 1,
) -> McEstimate:
    """Outage frequency over full channel randomness, given transmission.

    Conditioning on the on-off region (the destination gain supports the
    target rate at full power) is by rejection; the acceptance rate is
    reported and a near-empty region raises a warning.  A rate factor at or
    past the impairment ceiling makes the outage event certain for every
    channel state, so the estimate is 1 by convention even though the
    protocol never transmits there.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    beta_d, beta_e = cfg.beta_d(), cfg.beta_e()
    k_tx2, k_tot2 = cfg.k_tx**2, cfg.k_tot2
    b = beta_e * (1.0 + k_tx2) / cfg.n_ec
    t_bar = target.T_bar
    if k_tot2 * t_bar >= 1.0:  # destination SNDR ceiling below the target rate
        warnings.warn(
            "target rate exceeds the impairment ceiling: outage is certain",
            stacklevel=2,
        )
        return McEstimate(value=1.0, std_error=0.0, n=0, seed=_seed_of(rng), accept_rate=0.0)

    def chunk(stream: np.random.Generator, m: int) -> np.ndarray:
        g_hat = stream.gamma(cfg.N_C, 1.0, size=m) if cfg.N_C > 0 else np.zeros(m)
        g_check = stream.gamma(cfg.n_dc, 1.0, size=m) if cfg.n_dc > 0 else np.zeros(m)
        u = stream.exponential(1.0, size=m) if cfg.N_C > 0 else np.zeros(m)
        v = stream.gamma(cfg.n_ec, 1.0, size=m) if cfg.n_ec > 0 else np.zeros(m)
        g = g_hat + g_check
        d = beta_d * g
        e = k_tot2 * d
        # on-off region: the full-power destination SNDR clears the target
        accepted = d > (e + 1.0) * t_bar
        a = np.where(g > 0.0, beta_e * g_hat / np.maximum(g, 1e-300), 0.0)
        y_d = sndr_destination_values(tau, d, e)
        y_e = sndr_eve_values(tau, u, v, a, b, k_tx2 * a)
        outage = accepted & (np.log2((1.0 + y_d) / (1.0 + y_e)) < target.R_s)
        return np.array(
            [float(np.count_nonzero(outage)), float(np.count_nonzero(accepted))]
        )

    outage_n, accept_n = _chunk_sums(n, rng, chunk, width=2, workers=workers)
    accept_rate = accept_n / n
    if accept_rate < _ACCEPT_WARN:
        warnings.warn(
            f"transmission region nearly empty: acceptance rate {accept_rate:.2e}",
            stacklevel=2,
        )
    p = outage_n / accept_n if accept_n > 0 else 0.0
    return McEstimate(
        value=p,
        std_error=_binomial_se(p, int(accept_n)),
        n=int(accept_n),
        seed=_seed_of(rng),
        accept_rate=accept_rate,
    )


# ---------------------------------------------------------------------------
# eavesdropper SNDR CDF oracle
# ---------------------------------------------------------------------------

def empirical_cdf_Y_E(
    coeffs: EffectiveCoeffs,
    tau: float,
    x_grid,
    n: int,
    rng,
    n_ec: int,
    workers: int = 1,
) -> list[McEstimate]:
    """Pointwise empirical CDF of the eavesdropper SNDR at a fixed state."""
    x_grid = np.asarray(x_grid, float)
    if np.any(np.diff(x_grid) < 0):
        raise ValueError("x_grid must be sorted ascending")

    def chunk(stream: np.random.Generator, m: int) -> np.ndarray:
        u = stream.exponential(1.0, size=m)
        v = stream.gamma(n_ec, 1.0, size=m) if n_ec > 0 else np.zeros(m)
        y_e = np.sort(sndr_eve(tau, u, v, coeffs))
        return np.searchsorted(y_e, x_grid, side="right").astype(float)

    counts = _chunk_sums(n, rng, chunk, width=len(x_grid), workers=workers)
    seed = _seed_of(rng)
    return [
        McEstimate(value=c / n, std_error=_binomial_se(c / n, n), n=n, seed=seed)
        for c in counts
    ]


# ---------------------------------------------------------------------------
# distortion-level SNDR reconstruction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SndrReconstruction:
    """Sample SNDR ratios rebuilt from synthesized distortion noise."""

    y_d: McEstimate
    y_e: McEstimate
    y_d_formula: float
    y_e_formula: float


def _ratio_estimate(num: np.ndarray, den: np.ndarray, seed: int) -> McEstimate:
    n = len(num)
    num_mean, den_mean = float(np.mean(num)), float(np.mean(den))
    ratio = num_mean / den_mean
    rel_var = np.var(num, ddof=1) / (n * num_mean**2) + np.var(den, ddof=1) / (
        n * den_mean**2
    )
    return McEstimate(value=ratio, std_error=abs(ratio) * math.sqrt(rel_var), n=n, seed=seed)


def empirical_sndr_from_distortion(
    cfg: SystemConfig, tau: float, n: int, rng, sets=None
) -> SndrReconstruction:
    """Rebuild both SNDRs from signal-level synthesis of the distortion model.

    Draws one full-vector channel state, then synthesizes n transmissions
    with transmit distortion distributed like the transmit signal (scaled
    by k_tx) and receive distortion scaled to the received signal power.
    The sample power ratios must land on the closed-form SNDRs, which
    validates the algebra collapsing the received-signal expressions.
    """
    gen = as_rng(rng)
    seed = _seed_of(rng)
    if sets is None:
        sets = sample_path_sets(cfg.M, cfg.N_D, cfg.N_E, cfg.N_C, gen)
    draw = sample_channel(sets, gen, keep_vectors=True)
    coeffs = derive_coeffs(cfg, draw)

    basis = build_basis(cfg.M)
    g_d = np.zeros(cfg.N_D, dtype=complex)
    # reassemble the destination gain vector in xi_d order from its partitions
    xi_d = list(sets.xi_d)
    for g, xi in ((draw.g_hat_d, sets.xi_c), (draw.g_check_d, sets.xi_p)):
        for gain, idx in zip(g, xi):
            g_d[xi_d.index(idx)] = gain
    g_e = np.zeros(cfg.N_E, dtype=complex)
    xi_e = list(sets.xi_e)
    for g, xi in ((draw.g_hat_e, sets.xi_c), (draw.g_check_e, sets.xi_a)):
        for gain, idx in zip(g, xi):
            g_e[xi_e.index(idx)] = gain

    h_d = channel_row(basis, sets.xi_d, g_d, cfg.alpha_d())
    h_e = channel_row(basis, sets.xi_e, g_e, cfg.alpha_e())
    f1, f_an = an_beamformer(basis, sets, h_d)

    p_watt, sigma2 = cfg.power_watt, cfg.noise_watt
    n_ec = cfg.n_ec
    sig_amp = math.sqrt(tau * p_watt)
    an_amp = math.sqrt((1.0 - tau) * p_watt / n_ec) if n_ec > 0 else 0.0

    hd_f1 = complex(h_d @ f1)
    hd_F = np.asarray(h_d @ f_an)
    he_f1 = complex(h_e @ f1)
    he_F = np.asarray(h_e @ f_an)

    def cn(size) -> np.ndarray:
        return (gen.standard_normal(size) + 1j * gen.standard_normal(size)) / math.sqrt(2.0)

    s = cn(n)
    z = cn((n_ec, n))
    s_dist = cn(n)
    z_dist = cn((n_ec, n))
    eta_rx = cn(n) * (cfg.k_rx * sig_amp * np.linalg.norm(h_d))
    noise_d = cn(n) * math.sqrt(sigma2)
    noise_e = cn(n) * math.sqrt(sigma2)

    sig_d = sig_amp * hd_f1 * s
    an_d = an_amp * (hd_F @ z)
    dist_d = cfg.k_tx * (sig_amp * hd_f1 * s_dist + an_amp * (hd_F @ z_dist))
    y_d_est = _ratio_estimate(
        np.abs(sig_d) ** 2, np.abs(an_d + dist_d + eta_rx + noise_d) ** 2, seed
    )

    sig_e = sig_amp * he_f1 * s
    an_e = an_amp * (he_F @ z)
    dist_e = cfg.k_tx * (sig_amp * he_f1 * s_dist + an_amp * (he_F @ z_dist))
    y_e_est = _ratio_estimate(
        np.abs(sig_e) ** 2, np.abs(an_e + dist_e + noise_e) ** 2, seed
    )

    return SndrReconstruction(
        y_d=y_d_est,
        y_e=y_e_est,
        y_d_formula=sndr_destination(tau, coeffs),
        y_e_formula=float(sndr_eve(tau, draw.u, draw.v, coeffs)),
    )
