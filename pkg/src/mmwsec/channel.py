"""Discrete angular-domain channel: basis, path index sets, realizations.

The transmit array is a uniform linear array with half-wavelength spacing.
Its angular domain is sampled on the M-point grid that renders the steering
matrix unitary, so resolvable paths live in disjoint orthogonal bins and
masking the destination's bins is exact.

Index sets use 1-based column indices throughout, matching the selection
operator convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateChannelError


def build_basis(m: int) -> np.ndarray:
    """Unitary M x M steering-vector basis of the angular domain.

    Column i (1-based) is the normalized steering vector at direction
    cosine phi_i = (2i - M - 1)/M; with half-wavelength element spacing the
    columns are exactly orthonormal.
    """
    if m < 1:
        raise ValueError(f"M must be a positive integer, got {m}")
    ant = np.arange(m)[:, None]
    phi = (2.0 * np.arange(1, m + 1)[None, :] - m - 1) / m
    return np.exp(-1j * np.pi * ant * phi) / np.sqrt(m)


def select_columns(b: np.ndarray, xi: Sequence[int]) -> np.ndarray:
    """Sub-matrix of the columns of ``b`` named by the 1-based index set ``xi``.

    Indices must be strictly increasing and within [1, columns(b)].
    """
    b = np.atleast_2d(b)
    n_cols = b.shape[1]
    xi = list(xi)
    for prev, cur in zip(xi, xi[1:]):
        if cur <= prev:
            raise ValueError(f"index set must be strictly increasing, got {xi}")
    if xi and (xi[0] < 1 or xi[-1] > n_cols):
        raise ValueError(f"index set {xi} out of range [1, {n_cols}]")
    return b[:, [i - 1 for i in xi]]


@dataclass(frozen=True)
class PathSets:
    """Resolvable-path index sets of destination and eavesdropper.

    xi_c/xi_a/xi_p are the common, eavesdropper-only and destination-only
    partitions derived from xi_d and xi_e.
    """

    xi_d: tuple
    xi_e: tuple
    xi_c: tuple = field(init=False)
    xi_a: tuple = field(init=False)
    xi_p: tuple = field(init=False)

    def __post_init__(self):
        xi_d = tuple(sorted(set(self.xi_d)))
        xi_e = tuple(sorted(set(self.xi_e)))
        if xi_d != tuple(self.xi_d) or xi_e != tuple(self.xi_e):
            raise ValueError("index sets must be strictly increasing and duplicate-free")
        common = set(xi_d) & set(xi_e)
        object.__setattr__(self, "xi_c", tuple(sorted(common)))
        object.__setattr__(self, "xi_a", tuple(sorted(set(xi_e) - common)))
        object.__setattr__(self, "xi_p", tuple(sorted(set(xi_d) - common)))

    @property
    def n_d(self) -> int:
        return len(self.xi_d)

    @property
    def n_e(self) -> int:
        return len(self.xi_e)

    @property
    def n_c(self) -> int:
        return len(self.xi_c)


def sample_path_sets(
    m: int, n_d: int, n_e: int, n_c: int, rng: np.random.Generator
) -> PathSets:
    """Draw destination/eavesdropper bin sets sharing exactly n_c bins.

    xi_d is uniform among size-n_d subsets of [1, m]; xi_e reuses a uniform
    size-n_c subset of xi_d and fills the rest outside xi_d.  This realizes
    an eavesdropper whose angular position is unknown a priori.
    """
    if not (0 <= n_c <= min(n_d, n_e)):
        raise ValueError("need 0 <= n_c <= min(n_d, n_e)")
    if max(n_d, n_e) >= m or n_d + n_e - n_c > m:
        raise ValueError(
            f"cannot place n_d={n_d}, n_e={n_e}, n_c={n_c} paths in {m} bins"
        )
    all_bins = np.arange(1, m + 1)
    xi_d = rng.choice(all_bins, size=n_d, replace=False)
    common = rng.choice(xi_d, size=n_c, replace=False)
    outside = np.setdiff1d(all_bins, xi_d, assume_unique=False)
    extra = rng.choice(outside, size=n_e - n_c, replace=False)
    return PathSets(
        xi_d=tuple(sorted(int(i) for i in xi_d)),
        xi_e=tuple(sorted(int(i) for i in np.concatenate([common, extra]))),
    )


@dataclass(frozen=True)
class ChannelDraw:
    """One realization of the random channel state.

    Scalars are what every closed form consumes; the gain sub-vectors are
    kept only when requested, so high-volume sampling stays cheap.
    ``eve_orthogonal`` marks draws with no common path (u forced to 0, the
    eavesdropper receives nothing along the beam).
    """

    G_hat: float
    G_check: float
    u: float
    v: float
    eve_orthogonal: bool = False
    g_hat_d: np.ndarray | None = None
    g_check_d: np.ndarray | None = None
    g_hat_e: np.ndarray | None = None
    g_check_e: np.ndarray | None = None

    @property
    def G(self) -> float:
        return self.G_hat + self.G_check


def _cn_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. circularly-symmetric complex Gaussians of unit variance."""
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def sample_channel(
    sets: PathSets, rng: np.random.Generator, keep_vectors: bool = False
) -> ChannelDraw:
    """Sample i.i.d. CN(0,1) gains on the in-set bins and reduce to scalars."""
    n_c = sets.n_c
    g_hat_d = _cn_vector(n_c, rng)
    g_check_d = _cn_vector(len(sets.xi_p), rng)
    g_hat_e = _cn_vector(n_c, rng)
    g_check_e = _cn_vector(len(sets.xi_a), rng)

    g_hat = float(np.sum(np.abs(g_hat_d) ** 2))
    g_check = float(np.sum(np.abs(g_check_d) ** 2))
    if n_c > 0 and g_hat > 0.0:
        u = float(np.abs(g_hat_e @ g_hat_d.conj()) ** 2 / g_hat)
        orthogonal = False
    else:
        u = 0.0
        orthogonal = True
    v = float(np.sum(np.abs(g_check_e) ** 2))
    return ChannelDraw(
        G_hat=g_hat,
        G_check=g_check,
        u=u,
        v=v,
        eve_orthogonal=orthogonal,
        g_hat_d=g_hat_d if keep_vectors else None,
        g_check_d=g_check_d if keep_vectors else None,
        g_hat_e=g_hat_e if keep_vectors else None,
        g_check_e=g_check_e if keep_vectors else None,
    )


def sample_gain_scalars(
    n_c: int, n_dc: int, n_ec: int, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized fast path: n draws of (G_hat, G_check, u, v).

    Exploits the known laws of the scalar reductions: G_hat ~ Gamma(n_c,1),
    G_check ~ Gamma(n_dc,1), u ~ Exp(1) (0 if no common path),
    v ~ Gamma(n_ec,1).
    """
    g_hat = rng.gamma(n_c, 1.0, size=n) if n_c > 0 else np.zeros(n)
    g_check = rng.gamma(n_dc, 1.0, size=n) if n_dc > 0 else np.zeros(n)
    u = rng.exponential(1.0, size=n) if n_c > 0 else np.zeros(n)
    v = rng.gamma(n_ec, 1.0, size=n) if n_ec > 0 else np.zeros(n)
    return g_hat, g_check, u, v


def dump_draws_csv(path: str, n_c: int, n_dc: int, n_ec: int, n: int, seed: int) -> None:
    """Write n scalar channel draws to CSV for external verification.

    Columns: seed, G_hat, G_check, u, v.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    g_hat, g_check, u, v = sample_gain_scalars(n_c, n_dc, n_ec, n, rng)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("seed,G_hat,G_check,u,v\n")
        for i in range(n):
            fh.write(
                f"{seed},{float(g_hat[i])!r},{float(g_check[i])!r},"
                f"{float(u[i])!r},{float(v[i])!r}\n"
            )


def channel_row(
    basis: np.ndarray, xi: Sequence[int], gains: np.ndarray, alpha: float
) -> np.ndarray:
    """Assemble a 1 x M channel row vector sqrt(M*alpha/N) * g * W_sel^H."""
    m = basis.shape[0]
    n = len(xi)
    if n == 0:
        return np.zeros(m, dtype=complex)
    if len(gains) != n:
        raise ValueError("gain vector length must match the index set size")
    w_sel = select_columns(basis, xi)
    return np.sqrt(m * alpha / n) * (gains @ w_sel.conj().T)


def an_beamformer(
    basis: np.ndarray, sets: PathSets, h_d: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Masked beamforming pair (f1, F) for a destination channel row h_d.

    f1 carries the information signal along h_d; F spans the eavesdropper-
    only bins, which are orthogonal to every destination bin, so the
    artificial noise is invisible at the destination by construction.
    """
    norm = np.linalg.norm(h_d)
    if norm == 0.0:
        raise DegenerateChannelError("h_d has zero norm; no beamforming direction")
    f1 = h_d.conj() / norm
    f_an = select_columns(basis, sets.xi_a)
    return f1, f_an
