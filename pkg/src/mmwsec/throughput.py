"""Throughput-maximizing power allocation under a secrecy outage cap.

The secrecy-rate cap at split tau is set by the (1-eps)-quantile of the
eavesdropper SNDR, expressed through the implicit function k(tau) solved by
bisection on the monotone survival gap Q(k).  The module also carries the
full-power (MRT) closed forms: the per-state rate, its transmission
threshold, and the expected throughput as an exponential-integral sum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .channel import sample_gain_scalars
from .config import EffectiveCoeffs, SystemConfig, derive_coeffs
from .errors import ConvergenceError, InfeasibleError
from .montecarlo import McEstimate, as_rng
from .sndr import sndr_destination

EULER_GAMMA = 0.5772156649015328606

LN2 = math.log(2.0)

# |x| at which the exponential-integral evaluation switches from the power
# series to the continued fraction; at 6 the series cancellation already
# eats the 1e-12 accuracy target in doubles.
_EI_SERIES_CUTOFF = 5.0


# ---------------------------------------------------------------------------
# exponential integral Ei on the negative axis
# ---------------------------------------------------------------------------

def _e1_scaled(z: float) -> float:
    """exp(z) * E1(z) for z > 0, stable for arbitrarily large z."""
    if z <= _EI_SERIES_CUTOFF:
        # E1(z) = -gamma - ln z + sum (-1)^(n-1) z^n / (n n!)
        acc = -EULER_GAMMA - math.log(z)
        term = 1.0
        for n in range(1, 200):
            term *= -z / n
            delta = -term / n
            acc += delta
            if abs(delta) <= 1e-18 * max(abs(acc), 1e-300):
                break
        return math.exp(z) * acc
    # modified Lentz on the standard continued fraction
    tiny = 1e-300
    b = z + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 400):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise ConvergenceError(f"continued fraction for E1({z}) did not settle")


def exp_integral_ei(x: float) -> float:
    """Exponential integral Ei(x) for strictly negative arguments."""
    if x >= 0.0:
        raise ValueError(f"exp_integral_ei requires x < 0, got {x}")
    z = -x
    if z <= _EI_SERIES_CUTOFF:
        acc = EULER_GAMMA + math.log(z)
        term = 1.0
        for n in range(1, 200):
            term *= x / n
            delta = term / n
            acc += delta
            if abs(delta) <= 1e-18 * max(abs(acc), 1e-300):
                break
        return acc
    return -_e1_scaled(z) * math.exp(-z)


# ---------------------------------------------------------------------------
# the implicit secrecy-cap function k(tau)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KTauSolver:
    """Eavesdropper-side scalars and tolerances for solving k(tau).

    a, b, c are the leakage, artificial-noise and transmit-distortion
    scales of one channel state; epsilon is the outage cap.
    """

    a: float
    b: float
    c: float
    n_ec: int
    epsilon: float
    tol_k: float | None = None   # absolute; default 1e-10 * max(1, k_max)
    max_iters: int = 200

    def __post_init__(self):
        if not (0.0 < self.epsilon <= 1.0):
            raise ValueError("epsilon must lie in (0, 1]")
        if self.n_ec < 1:
            raise InfeasibleError("n_ec must be at least 1 to carry artificial noise")
        if min(self.a, self.b, self.c) < 0.0:
            raise ValueError("coefficients a, b, c must be non-negative")


def q_of_k(
    k: float, tau: float, a: float, b: float, c: float, n_ec: int, epsilon: float
) -> float:
    """Survival gap Q(k): eavesdropper outage survival at level tau*k, minus eps.

    Zero at k = k(tau); positive below, negative above (Q is strictly
    decreasing in k on the feasible bracket).
    """
    rest = a - c * tau * k
    if rest <= 0.0:
        raise ValueError(f"a - c*tau*k must stay positive (got {rest:.3g})")
    bracket = 1.0 + (1.0 - tau) * b * k / rest
    return math.exp(-k / rest) * bracket ** (-n_ec) - epsilon


def k_max_tau1(a: float, c: float, epsilon: float) -> float:
    """Closed-form k(1): the cap at full power, -a*ln(eps) / (1 - c*ln(eps))."""
    if not (0.0 < epsilon <= 1.0):
        raise ValueError("epsilon must lie in (0, 1]")
    if a < 0.0 or c < 0.0:
        raise ValueError("a and c must be non-negative")
    log_eps = math.log(epsilon)
    return -a * log_eps / (1.0 - c * log_eps)


def _survival_batch(k, tau, a, b, c, n_ec):
    """Vectorized outage survival exp(-k/rest) * (1 + (1-tau)*b*k/rest)^-n_ec."""
    rest = a - c * tau * k
    out = np.exp(-k / rest) * (1.0 + (1.0 - tau) * b * k / rest) ** (-n_ec)
    return out


def solve_k_batch(
    tau, a, b, c, n_ec: int, epsilon: float, tol: float, max_iters: int = 200
):
    """Bisect k(tau) elementwise over broadcastable tau/a/b/c arrays."""
    tau, a, b, c = np.broadcast_arrays(
        np.asarray(tau, float), np.asarray(a, float), np.asarray(b, float), np.asarray(c, float)
    )
    if epsilon >= 1.0:
        return np.zeros(tau.shape)
    lo = np.zeros(tau.shape)
    log_eps = math.log(epsilon)
    hi = -a * log_eps / (1.0 - c * log_eps)
    live = a > 0.0
    # guard against a violated upper bracket (k(tau) is increasing in tau for
    # practical parameters, so hi = k(1) should already cover it)
    for _ in range(64):
        bad = live & (_survival_batch(hi, tau, a, b, c, n_ec) > epsilon)
        if not bad.any():
            break
        cap = np.where(c * tau > 0.0, a / np.maximum(c * tau, 1e-300), np.inf)
        hi = np.where(bad, np.minimum(2.0 * hi, 0.5 * (hi + cap)), hi)
    span = float(np.max(hi - lo, initial=0.0))
    if span <= 0.0:
        return np.where(live, lo, 0.0)
    iters = min(max_iters, max(1, int(math.ceil(math.log2(span / tol))) + 2))
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        high_side = _survival_batch(mid, tau, a, b, c, n_ec) > epsilon
        lo = np.where(high_side, mid, lo)
        hi = np.where(high_side, hi, mid)
    out = 0.5 * (lo + hi)
    return np.where(live, out, 0.0)


def solve_k(tau: float, solver: KTauSolver) -> float:
    """Bisect the unique root of Q(k) on [0, k(1)] for one split value."""
    if not (0.0 <= tau <= 1.0):
        raise ValueError("tau must lie in [0, 1]")
    if solver.epsilon >= 1.0 or solver.a == 0.0:
        return 0.0
    k_hi = k_max_tau1(solver.a, solver.c, solver.epsilon)
    tol = solver.tol_k if solver.tol_k is not None else 1e-10 * max(1.0, k_hi)
    lo, hi = 0.0, k_hi
    expand = 0
    while q_of_k(hi, tau, solver.a, solver.b, solver.c, solver.n_ec, solver.epsilon) > 0.0:
        cap = solver.a / (solver.c * tau) if solver.c * tau > 0.0 else math.inf
        hi = min(2.0 * hi, 0.5 * (hi + cap))
        expand += 1
        if expand > 200:
            raise ConvergenceError(
                f"could not bracket k(tau): tau={tau}, bracket=[{lo}, {hi}]"
            )
    for _ in range(solver.max_iters):
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if q_of_k(mid, tau, solver.a, solver.b, solver.c, solver.n_ec, solver.epsilon) > 0.0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError(
        f"bisection for k(tau) exhausted {solver.max_iters} iterations; "
        f"bracket=[{lo}, {hi}], width={hi - lo:.3g}, tol={tol:.3g}"
    )


def dk_dtau(k, tau, solver: KTauSolver):
    """Implicit-function derivative of k(tau); vectorizes over k, tau."""
    a, b, c, n = solver.a, solver.b, solver.c, solver.n_ec
    rest = a - c * tau * k
    s = (1.0 - tau) * b * k / rest
    num = n * b * k * (a - c * k) - c * k * k * (1.0 + s)
    den = a * (1.0 + s) + n * (1.0 - tau) * a * b
    return num / den


# ---------------------------------------------------------------------------
# secrecy rate and its optimizer
# ---------------------------------------------------------------------------

def rs_of_tau(tau: float, k: float, coeffs: EffectiveCoeffs) -> float:
    """Secrecy rate log2((tau(d+e)+1) / ((tau*e+1)(1+tau*k))) in bits/s/Hz."""
    d, e = coeffs.d, coeffs.e
    num = tau * (d + e) + 1.0
    den = (tau * e + 1.0) * (1.0 + tau * k)
    return math.log2(num / den)


def drs_dtau(tau: float, coeffs: EffectiveCoeffs, solver: KTauSolver, k: float | None = None) -> float:
    """Derivative of the secrecy rate in tau, using the implicit dk/dtau."""
    if k is None:
        k = solve_k(tau, solver)
    d, e = coeffs.d, coeffs.e
    dest = d / ((tau * (d + e) + 1.0) * (tau * e + 1.0))
    cap = (k + tau * dk_dtau(k, tau, solver)) / (1.0 + tau * k)
    return (dest - cap) / LN2


class ThroughputCase(enum.Enum):
    CONCAVE_BOUNDARY = "Concave_Boundary"
    CONCAVE_INTERIOR = "Concave_Interior"
    NONCONCAVE_TAU1_VS_1 = "NonConcave_Tau1_vs_1"
    NONCONCAVE_TAU1P_VS_TAU3 = "NonConcave_Tau1p_vs_Tau3"
    SILENT = "Silent"


@dataclass(frozen=True)
class ThroughputResult:
    tau_star: float
    R_s_star: float
    case_tag: ThroughputCase
    transmit: bool
    k_star: float = 0.0


def _scan_grid(tau_floor: float, n_log: int = 33, n_lin: int = 96) -> np.ndarray:
    """Log-spaced points below 0.1 plus a linear sweep up to 1.0."""
    log_part = np.geomspace(tau_floor, 0.1, n_log, endpoint=False)
    lin_part = np.linspace(0.1, 1.0, n_lin)
    return np.concatenate([log_part, lin_part])


def _bisect_stationary(
    lo: float, hi: float, coeffs: EffectiveCoeffs, solver: KTauSolver, iters: int = 80
) -> float:
    """Bisect a sign change of dR_s/dtau bracketed in (lo, hi)."""
    f_lo = drs_dtau(lo, coeffs, solver)
    for _ in range(iters):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        f_mid = drs_dtau(mid, coeffs, solver)
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimize_tau_throughput(
    coeffs: EffectiveCoeffs,
    solver: KTauSolver,
    tau_floor: float = 1e-6,
    concavity_points: int = 64,
    validate_grid: int = 0,
) -> ThroughputResult:
    """Maximize the capped secrecy rate over the power split.

    Concavity of the rate in tau is classified numerically (central
    differences of the analytic derivative at ``concavity_points`` interior
    points).  The concave case follows the boundary-or-unique-root rule;
    otherwise all stationary points found by a sign-change scan are
    compared against the full-power boundary.  A channel state whose rate
    is negative even at the optimum cannot transmit and returns Silent.

    ``validate_grid`` > 0 additionally audits the result against a uniform
    grid of that many splits and returns the grid point when it wins by
    more than 1e-6 bits.
    """
    grid = _scan_grid(tau_floor)
    k_grid = solve_k_batch(
        grid, solver.a, solver.b, solver.c, solver.n_ec, solver.epsilon,
        tol=1e-12 * max(1.0, k_max_tau1(solver.a, solver.c, solver.epsilon)),
    )
    d, e = coeffs.d, coeffs.e
    dest = d / ((grid * (d + e) + 1.0) * (grid * e + 1.0))
    cap = (k_grid + grid * dk_dtau(k_grid, grid, solver)) / (1.0 + grid * k_grid)
    rp = (dest - cap) / LN2

    # concavity probe: derivative differences at evenly spread interior points
    idx = np.linspace(1, len(grid) - 2, concavity_points).astype(int)
    second = (rp[idx + 1] - rp[idx - 1]) / (grid[idx + 1] - grid[idx - 1])
    concave = bool(np.all(second <= 1e-8))

    z_sign = drs_dtau(1.0, coeffs, solver, k=float(k_grid[-1]))

    def rate_at(tau: float) -> tuple[float, float]:
        k = solve_k(tau, solver)
        return rs_of_tau(tau, k, coeffs), k

    if concave:
        if z_sign > 0.0:
            tau_star, case = 1.0, ThroughputCase.CONCAVE_BOUNDARY
        else:
            sign = rp > 0.0
            flips = np.nonzero(sign[:-1] != sign[1:])[0]
            lo = float(grid[flips[0]]) if len(flips) else tau_floor
            hi = float(grid[flips[0] + 1]) if len(flips) else 1.0
            tau_star, case = _bisect_stationary(lo, hi, coeffs, solver), ThroughputCase.CONCAVE_INTERIOR
    else:
        sign = rp > 0.0
        flips = np.nonzero(sign[:-1] != sign[1:])[0]
        candidates = [1.0]
        for i in flips:
            candidates.append(_bisect_stationary(float(grid[i]), float(grid[i + 1]), coeffs, solver))
        rated = [(rate_at(t)[0], t) for t in candidates]
        tau_star = max(rated)[1]
        case = (
            ThroughputCase.NONCONCAVE_TAU1_VS_1
            if z_sign > 0.0
            else ThroughputCase.NONCONCAVE_TAU1P_VS_TAU3
        )

    r_star, k_star = rate_at(tau_star)

    if validate_grid > 0:
        taus = np.linspace(1.0 / validate_grid, 1.0, validate_grid)
        ks = solve_k_batch(
            taus, solver.a, solver.b, solver.c, solver.n_ec, solver.epsilon,
            tol=1e-12 * max(1.0, k_max_tau1(solver.a, solver.c, solver.epsilon)),
        )
        rates = np.log2((taus * (d + e) + 1.0) / ((taus * e + 1.0) * (1.0 + taus * ks)))
        j = int(np.argmax(rates))
        if float(rates[j]) > r_star + 1e-6:
            tau_star = float(taus[j])
            r_star, k_star = rate_at(tau_star)

    # transmission region test at the chosen split
    if sndr_destination(tau_star, coeffs) + 1e-12 < tau_star * k_star:
        return ThroughputResult(tau_star, 0.0, ThroughputCase.SILENT, False, k_star)
    return ThroughputResult(tau_star, max(r_star, 0.0), case, True, k_star)


# ---------------------------------------------------------------------------
# full-power (MRT) closed forms
# ---------------------------------------------------------------------------

def _bar_scales(cfg: SystemConfig) -> tuple[float, float, float, float]:
    """Draw-independent (a_bar, c_bar, d_bar, e_bar) for a configuration."""
    beta_e = cfg.beta_e()
    beta_d = cfg.beta_d()
    return beta_e, cfg.k_tx**2 * beta_e, beta_d, cfg.k_tot2 * beta_d


def mrt_rate(g_hat, g_check, cfg: SystemConfig):
    """Full-power secrecy rate of a channel state (vectorizes over gains).

    Gain-normalized form: with C1 = 1 - c_bar*ln(eps) and
    C3 = 1 - (a_bar + c_bar)*ln(eps),

        R = log2( (G_check + G_hat*C1) * ((e_bar+d_bar)*G + 1)
                  / ((e_bar*G + 1) * (G_check + G_hat*C3)) ).

    Negative values mean the state is outside the transmission region.
    """
    a_bar, c_bar, d_bar, e_bar = _bar_scales(cfg)
    log_eps = math.log(cfg.epsilon)
    g_hat = np.asarray(g_hat, float)
    g_check = np.asarray(g_check, float)
    g = g_hat + g_check
    c1 = 1.0 - c_bar * log_eps
    c3 = 1.0 - (a_bar + c_bar) * log_eps
    num = (g_check + g_hat * c1) * ((e_bar + d_bar) * g + 1.0)
    den = (e_bar * g + 1.0) * (g_check + g_hat * c3)
    out = np.log2(num / den)
    return float(out) if out.ndim == 0 else out


def mrt_rate_direct(coeffs: EffectiveCoeffs, epsilon: float) -> float:
    """Full-power rate from the per-state coefficients, log2((1+Y_D)/(1+k(1)))."""
    k1 = k_max_tau1(coeffs.a, coeffs.c, epsilon)
    y_d = coeffs.d / (coeffs.e + 1.0)
    return math.log2((1.0 + y_d) / (1.0 + k1))


def mrt_transmit_threshold(g_hat, cfg: SystemConfig):
    """Non-common gain threshold beta: the state transmits iff G_check > beta.

    Root of the quadratic form of the full-power transmission inequality;
    may be negative (always transmit).  Vectorizes over g_hat.
    """
    a_bar, c_bar, d_bar, e_bar = _bar_scales(cfg)
    log_eps = math.log(cfg.epsilon)
    g_hat = np.asarray(g_hat, float)
    c1 = 1.0 - c_bar * log_eps
    ratio = a_bar * e_bar / d_bar
    a1 = g_hat * (1.0 + c1 + ratio * log_eps)
    a2 = g_hat**2 * (c1 + ratio * log_eps) + (a_bar / d_bar) * g_hat * log_eps
    disc = np.maximum(a1 * a1 - 4.0 * a2, 0.0)
    out = 0.5 * (-a1 + np.sqrt(disc))
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _laguerre_rule(order_m: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = special.roots_genlaguerre(160, order_m)
    return nodes, weights / math.gamma(order_m + 1)


def log_moment(q: float, m: int) -> float:
    """E[log2(1 + q*X)] for X ~ Gamma(m+1, 1), via the Ei closed form.

    The alternating closed form loses digits when (1/q)^m/m! is large, in
    which case a generalized Gauss-Laguerre rule takes over.
    """
    if q < 0.0:
        raise ValueError("q must be non-negative")
    if q == 0.0 or m < 0:
        return 0.0
    w = 1.0 / q
    a_scaled = _e1_scaled(w)
    total = 0.0
    peak = 0.0
    pow_w = 1.0  # (-w)^j / j!
    for j in range(m + 1):
        if j > 0:
            pow_w *= -w / j
        inner = 0.0
        fact = 1.0  # (n-1)!
        for n in range(1, j + 1):
            if n > 1:
                fact *= n - 1
            inner += fact * (-w) ** (j - n)
        term = pow_w * a_scaled + inner / math.factorial(j)
        total += term
        peak = max(peak, abs(term))
    if peak * 5e-16 > 1e-10 * max(abs(total), 1e-12):
        nodes, weights = _laguerre_rule(m)
        return float(np.sum(weights * np.log2(1.0 + q * nodes)))
    return total / LN2


def _gamma_pdf(x, shape: int):
    return np.exp(-x) * x ** (shape - 1) / math.gamma(shape)


def _mrt_kernel(y: float, cfg: SystemConfig) -> float:
    """Inner closed form of the expected MRT throughput at common gain y."""
    a_bar, c_bar, d_bar, e_bar = _bar_scales(cfg)
    log_eps = math.log(cfg.epsilon)
    n_dc = cfg.n_dc
    beta = max(0.0, float(mrt_transmit_threshold(y, cfg)))
    c1 = 1.0 - c_bar * log_eps
    c3 = 1.0 - (a_bar + c_bar) * log_eps
    de = e_bar + d_bar
    q1 = 1.0 / (beta + y * c1)
    q2 = de / (de * (beta + y) + 1.0)
    q3 = 1.0 / (beta + y * c3)
    q4 = e_bar / (e_bar * (beta + y) + 1.0)
    q5 = math.log2((beta + y * c1) * (de * (beta + y) + 1.0) / ((beta + y * c3) * (e_bar * (beta + y) + 1.0)))
    total = 0.0
    for m in range(n_dc):
        kernel = log_moment(q1, m) + log_moment(q2, m) - log_moment(q3, m) - log_moment(q4, m) + q5
        total += beta ** (n_dc - 1 - m) / math.factorial(n_dc - 1 - m) * kernel
    return math.exp(-beta) * float(_gamma_pdf(y, cfg.N_C)) * total


def _gamma_cap(shape: int, tail: float = 1e-10) -> float:
    return float(special.gammainccinv(shape, tail))


def mrt_throughput_closed_form(cfg: SystemConfig) -> float:
    """Expected MRT secrecy throughput via the exponential-integral sum."""
    if cfg.N_C < 1 or cfg.n_dc < 1:
        raise ValueError("closed form needs N_C >= 1 and N_D - N_C >= 1")
    y_cap = _gamma_cap(cfg.N_C)
    value, _ = integrate.quad(
        _mrt_kernel, 0.0, y_cap, args=(cfg,), limit=300, epsabs=1e-12, epsrel=1e-9
    )
    return value


def mrt_throughput_quad2d(cfg: SystemConfig) -> float:
    """Reference: direct 2-D quadrature of the rate against both gain laws."""
    if cfg.N_C < 1 or cfg.n_dc < 1:
        raise ValueError("2-D quadrature needs N_C >= 1 and N_D - N_C >= 1")
    y_cap = _gamma_cap(cfg.N_C)
    x_cap = _gamma_cap(cfg.n_dc)

    def outer(y: float) -> float:
        beta = max(0.0, float(mrt_transmit_threshold(y, cfg)))
        hi = max(x_cap, beta * 4.0 + 40.0)
        if beta >= hi:
            return 0.0

        def inner(x: float) -> float:
            return float(_gamma_pdf(x, cfg.n_dc)) * float(mrt_rate(y, x, cfg))

        val, _ = integrate.quad(inner, beta, hi, limit=300, epsabs=1e-12, epsrel=1e-9)
        return float(_gamma_pdf(y, cfg.N_C)) * val

    value, _ = integrate.quad(outer, 0.0, y_cap, limit=300, epsabs=1e-12, epsrel=1e-8)
    return value


def _mrt_throughput_no_common(cfg: SystemConfig) -> float:
    """No common paths: no leakage, full region, rate log2(1 + Y_D(1))."""
    beta_d = cfg.beta_d()
    k_tot2 = cfg.k_tot2
    g_cap = _gamma_cap(cfg.N_D)

    def f(g: float) -> float:
        y_d = beta_d * g / (k_tot2 * beta_d * g + 1.0)
        return float(_gamma_pdf(g, cfg.N_D)) * math.log2(1.0 + y_d)

    value, _ = integrate.quad(f, 0.0, g_cap, limit=200, epsabs=1e-12, epsrel=1e-9)
    return value


def mrt_throughput(cfg: SystemConfig, cross_check: bool = True, rel_tol: float = 1e-3) -> float:
    """Expected MRT secrecy throughput; optionally audited by 2-D quadrature.

    Raises ConvergenceError when the two quadrature routes disagree beyond
    ``rel_tol`` relative, reporting both estimates.
    """
    if cfg.N_C == 0:
        return _mrt_throughput_no_common(cfg)
    closed = mrt_throughput_closed_form(cfg)
    if cross_check:
        direct = mrt_throughput_quad2d(cfg)
        gap = abs(closed - direct)
        if gap > rel_tol * max(abs(closed), abs(direct), 1e-9):
            raise ConvergenceError(
                f"throughput quadratures disagree: closed={closed:.9g}, "
                f"direct={direct:.9g}, gap={gap:.3g}"
            )
    return closed


# ---------------------------------------------------------------------------
# Monte-Carlo averaged throughputs over channel states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _ScalarDraw:
    G_hat: float
    G_check: float

    @property
    def G(self) -> float:
        return self.G_hat + self.G_check


def _coeffs_from_scalars(cfg: SystemConfig, g_hat: float, g_check: float) -> EffectiveCoeffs:
    return derive_coeffs(cfg, _ScalarDraw(g_hat, g_check))


def avg_throughput_opa(cfg: SystemConfig, trials: int, rng, tau_floor: float = 1e-6) -> McEstimate:
    """Sample mean of the per-state optimized secrecy rate over the region."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seed = int(rng) if not isinstance(rng, np.random.Generator) else -1
    gen = as_rng(rng)
    g_hat, g_check, _, _ = sample_gain_scalars(cfg.N_C, cfg.n_dc, cfg.n_ec, trials, gen)
    rates = np.zeros(trials)
    for i in range(trials):
        coeffs = _coeffs_from_scalars(cfg, float(g_hat[i]), float(g_check[i]))
        solver = KTauSolver(coeffs.a, coeffs.b, coeffs.c, cfg.n_ec, cfg.epsilon)
        res = optimize_tau_throughput(coeffs, solver, tau_floor=tau_floor)
        rates[i] = res.R_s_star if res.transmit else 0.0
    value = float(np.mean(rates))
    stderr = float(np.std(rates, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return McEstimate(value=value, std_error=stderr, n=trials, seed=seed)


def avg_throughput_fixed_tau(cfg: SystemConfig, tau: float, trials: int, rng) -> McEstimate:
    """Sample mean secrecy rate at a fixed split (0 outside the region)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seed = int(rng) if not isinstance(rng, np.random.Generator) else -1
    gen = as_rng(rng)
    g_hat, g_check, _, _ = sample_gain_scalars(cfg.N_C, cfg.n_dc, cfg.n_ec, trials, gen)
    g = g_hat + g_check
    beta_d, beta_e = cfg.beta_d(), cfg.beta_e()
    a = np.where(g > 0.0, beta_e * g_hat / np.maximum(g, 1e-300), 0.0)
    b = beta_e * (1.0 + cfg.k_tx**2) / cfg.n_ec
    c = cfg.k_tx**2 * a
    d = beta_d * g
    e = cfg.k_tot2 * d
    ks = solve_k_batch(tau, a, b, c, cfg.n_ec, cfg.epsilon, tol=1e-12)
    rates = np.log2((tau * (d + e) + 1.0) / ((tau * e + 1.0) * (1.0 + tau * ks)))
    rates = np.maximum(rates, 0.0)
    value = float(np.mean(rates))
    stderr = float(np.std(rates, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return McEstimate(value=value, std_error=stderr, n=trials, seed=seed)


def avg_throughput_mrt(cfg: SystemConfig, trials: int, rng) -> McEstimate:
    """Sample mean full-power secrecy rate over the transmission region."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seed = int(rng) if not isinstance(rng, np.random.Generator) else -1
    gen = as_rng(rng)
    g_hat, g_check, _, _ = sample_gain_scalars(cfg.N_C, cfg.n_dc, cfg.n_ec, trials, gen)
    rates = np.maximum(mrt_rate(g_hat, g_check, cfg), 0.0)
    value = float(np.mean(rates))
    stderr = float(np.std(rates, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return McEstimate(value=value, std_error=stderr, n=trials, seed=seed)


# ---------------------------------------------------------------------------
# high-SNR limits
# ---------------------------------------------------------------------------

def high_snr_k_and_rate(
    tau: float, coeffs: EffectiveCoeffs, epsilon: float, n_ec: int
) -> tuple[float, float]:
    """Large-power limits (k_inf, rate) at split tau.

    The noise floor drops out of the quantile equation, which then inverts
    algebraically; the destination SNDR sits at its impairment ceiling.
    """
    if not (0.0 < tau < 1.0):
        raise ValueError("tau must lie strictly inside (0, 1)")
    if not (0.0 < epsilon <= 1.0):
        raise ValueError("epsilon must lie in (0, 1]")
    if coeffs.k_tot2 <= 0.0:
        raise InfeasibleError("high-SNR ceiling requires k_tot2 > 0")
    phi_eps = epsilon ** (-1.0 / n_ec) - 1.0
    if coeffs.c * phi_eps >= coeffs.b and phi_eps > 0.0:
        raise InfeasibleError(
            "outside the monotone region: c * (eps^(-1/N)-1) >= b"
        )
    k_inf = phi_eps * coeffs.a / ((1.0 - tau) * coeffs.b + coeffs.c * tau * phi_eps)
    if coeffs.c > 0.0 and k_inf * tau * coeffs.c >= coeffs.a:
        raise InfeasibleError("k_inf lands outside its feasible bracket")
    ceiling = 1.0 / coeffs.k_tot2
    rate = math.log2((1.0 + ceiling) / (1.0 + tau * k_inf))
    return k_inf, rate
