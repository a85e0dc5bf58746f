"""Power allocation minimizing the secrecy outage probability.

Minimizing the conditional SOP over the power split is equivalent to
maximizing the capacity ratio phi(tau) = (1 + Y_D)/(1 + Y_E), a rational
quadratic whose derivative sign is a plain quadratic Omega(tau).  The
optimizer classifies the sign pattern of Omega at the feasible-set
endpoints and compares the resulting candidate points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import EffectiveCoeffs
from .errors import SilentSourceError
from .sndr import sndr_destination, sndr_eve
from .sop import SecrecyTarget, sop_conditional, sop_conditional_grid, tau_min

# Relative epsilon-1 magnitude below which Omega is treated as linear.
_LINEAR_RTOL = 1e-12
# Offset used when the open tau_min endpoint wins the candidate comparison.
_ENDPOINT_NUDGE = 1e-9


@dataclass(frozen=True)
class PhiCoeffs:
    """Quadratic-over-quadratic coefficients of phi and of its derivative sign.

    c3 == c6 structurally; eps1..eps3 define Omega(tau), whose sign equals
    the sign of dphi/dtau.
    """

    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    eps1: float
    eps2: float
    eps3: float


class OpaCase(enum.Enum):
    BOTH_SIGN = "BothPositiveOrBothNegative"
    CONVEX_ENDPOINTS = "ConvexEndpoints"
    CONCAVE_INTERIOR = "ConcaveInterior"
    DEGENERATE_LINEAR = "DegenerateLinear"
    GRID_FALLBACK = "GridFallback"


@dataclass(frozen=True)
class OpaResult:
    tau_star: float
    case_tag: OpaCase
    objective_value: float


def phi(tau: float, u: float, v: float, coeffs: EffectiveCoeffs) -> float:
    """Capacity ratio (1 + Y_D(tau)) / (1 + Y_E(tau)), evaluated via the SNDRs."""
    return (1.0 + sndr_destination(tau, coeffs)) / (1.0 + sndr_eve(tau, u, v, coeffs))


def phi_coeffs(u: float, v: float, coeffs: EffectiveCoeffs) -> PhiCoeffs:
    """Expand phi into its rational-quadratic coefficients for given (u, v)."""
    a, b, c, d, e = coeffs.a, coeffs.b, coeffs.c, coeffs.d, coeffs.e
    bv = b * v
    cu = c * u
    au = a * u
    c1 = (e + d) * (cu - bv)
    c2 = (e + d) * (bv + 1.0) + cu - bv
    c3 = bv + 1.0
    c4 = e * (cu + au - bv)
    c5 = e * (bv + 1.0) + cu + au - bv
    c6 = c3
    eps1 = c1 * c5 - c2 * c4
    eps2 = 2.0 * c3 * (c1 - c4)
    eps3 = c3 * (c2 - c5)
    return PhiCoeffs(c1, c2, c3, c4, c5, c6, eps1, eps2, eps3)


def phi_rational(tau, pc: PhiCoeffs):
    """phi via the expanded rational form; accepts scalar or array tau."""
    num = (pc.c1 * tau + pc.c2) * tau + pc.c3
    den = (pc.c4 * tau + pc.c5) * tau + pc.c6
    return num / den


def omega(tau, pc: PhiCoeffs):
    """Derivative-sign quadratic eps1*tau^2 + eps2*tau + eps3."""
    return (pc.eps1 * tau + pc.eps2) * tau + pc.eps3


def omega_roots(pc: PhiCoeffs) -> tuple[float, ...]:
    """Real zero crossings of Omega, ascending; empty when complex.

    Uses the cancellation-safe quadratic formula.  A vanishing leading
    coefficient degrades to the linear root.
    """
    scale = max(abs(pc.eps1), abs(pc.eps2), abs(pc.eps3))
    if scale == 0.0:
        return ()
    if abs(pc.eps1) <= _LINEAR_RTOL * scale:
        if pc.eps2 == 0.0:
            return ()
        return (-pc.eps3 / pc.eps2,)
    disc = pc.eps2 * pc.eps2 - 4.0 * pc.eps1 * pc.eps3
    if disc < 0.0:
        return ()
    sq = math.sqrt(disc)
    if pc.eps2 == 0.0:
        r = 0.5 * sq / abs(pc.eps1)
        return (-r, r)
    q = -0.5 * (pc.eps2 + math.copysign(sq, pc.eps2))
    r1 = q / pc.eps1
    r2 = pc.eps3 / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def _descending_root(pc: PhiCoeffs, lo: float, hi: float) -> float | None:
    """Root in (lo, hi) where Omega crosses from positive to negative."""
    for r in omega_roots(pc):
        if lo < r < hi:
            slope = 2.0 * pc.eps1 * r + pc.eps2
            if slope < 0.0 or len(omega_roots(pc)) == 1:
                return r
    return None


def optimize_tau_sop(
    target: SecrecyTarget,
    coeffs: EffectiveCoeffs,
    n_ec: int,
    policy: str = "mean",
    u: float | None = None,
    v: float | None = None,
    grid_points: int = 10_000,
    grid_tol: float = 1e-6,
) -> OpaResult:
    """Choose the power split maximizing phi over the feasible set (tau_min, 1].

    The source cannot observe the eavesdropper's instantaneous channel, so
    the default ``mean`` policy substitutes the mean values (u = 1,
    v = N_EC) before optimizing; the ``oracle`` policy takes the realized
    (u, v) and exists to validate the optimizer against draw-level search.

    When ``grid_points`` > 0 the analytic result is audited against a
    uniform grid; a disagreement beyond ``grid_tol`` returns the grid
    maximizer tagged GridFallback instead.

    Raises SilentSourceError when no feasible split exists (tau_min >= 1).
    """
    t_min = tau_min(target, coeffs)  # raises when d <= e*(T-1)
    if t_min >= 1.0:
        raise SilentSourceError(
            f"feasible set empty: tau_min={t_min:.6g} >= 1; source suspends"
        )
    if policy == "mean":
        u_eff, v_eff = 1.0, float(n_ec)
    elif policy == "oracle":
        if u is None or v is None:
            raise ValueError("oracle policy requires explicit u and v")
        u_eff, v_eff = float(u), float(v)
    else:
        raise ValueError(f"unknown u_v_policy {policy!r}")

    pc = phi_coeffs(u_eff, v_eff, coeffs)
    om_lo = omega(t_min, pc)
    om_hi = omega(1.0, pc)
    scale = max(abs(pc.eps1), abs(pc.eps2), abs(pc.eps3), 1.0)
    degenerate = abs(pc.eps1) <= _LINEAR_RTOL * scale

    interior = [r for r in omega_roots(pc) if t_min < r < 1.0]
    if degenerate:
        case = OpaCase.DEGENERATE_LINEAR
        candidates = [t_min, 1.0] + interior
    elif om_lo > 0.0 and om_hi < 0.0:
        case = OpaCase.CONCAVE_INTERIOR
        root = _descending_root(pc, t_min, 1.0)
        candidates = [root] if root is not None else [t_min, 1.0] + interior
    elif om_lo < 0.0 and om_hi > 0.0:
        case = OpaCase.CONVEX_ENDPOINTS
        candidates = [t_min, 1.0]
    else:
        case = OpaCase.BOTH_SIGN
        candidates = [t_min, 1.0] + interior

    values = [float(phi_rational(t, pc)) for t in candidates]
    best = max(range(len(candidates)), key=values.__getitem__)
    tau_star = candidates[best]
    if tau_star <= t_min:  # supremum on the open endpoint; step just inside
        tau_star = t_min + _ENDPOINT_NUDGE * (1.0 - t_min)
    phi_star = float(phi_rational(tau_star, pc))

    if grid_points > 0:
        grid = t_min + (np.arange(1, grid_points + 1) / grid_points) * (1.0 - t_min)
        vals = phi_rational(grid, pc)
        k = int(np.argmax(vals))
        if float(vals[k]) - phi_star > grid_tol * max(1.0, abs(phi_star)):
            return OpaResult(float(grid[k]), OpaCase.GRID_FALLBACK, float(vals[k]))

    return OpaResult(float(tau_star), case, phi_star)


def minimize_sop_tau(
    target: SecrecyTarget,
    coeffs: EffectiveCoeffs,
    n_ec: int,
    grid_points: int = 512,
) -> tuple[float, float]:
    """Split minimizing the closed-form conditional SOP itself.

    The capacity-ratio proxy above substitutes a fixed (u, v) into phi and
    can land far from the minimum of the (u, v)-averaged SOP; this routine
    minimizes that averaged closed form directly (grid bracket plus
    golden-section refinement) and is what figure-level sweeps use.

    Returns (tau_star, sop value).  Raises SilentSourceError when no
    feasible split exists.
    """
    t_min = tau_min(target, coeffs)
    if t_min >= 1.0:
        raise SilentSourceError(
            f"feasible set empty: tau_min={t_min:.6g} >= 1; source suspends"
        )
    if coeffs.a == 0.0:  # no leakage: any feasible split is outage-free
        return 1.0, 0.0
    grid = t_min + (np.arange(1, grid_points + 1) / grid_points) * (1.0 - t_min)
    vals = sop_conditional_grid(grid, target, coeffs, n_ec)
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_points - 1)]

    inv_gold = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_gold * (hi - lo)
    x2 = lo + inv_gold * (hi - lo)
    f1 = sop_conditional(x1, target, coeffs, n_ec)
    f2 = sop_conditional(x2, target, coeffs, n_ec)
    for _ in range(60):
        if hi - lo < 1e-12:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_gold * (hi - lo)
            f1 = sop_conditional(x1, target, coeffs, n_ec)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_gold * (hi - lo)
            f2 = sop_conditional(x2, target, coeffs, n_ec)
    tau_star = 0.5 * (lo + hi)
    return float(tau_star), float(sop_conditional(tau_star, target, coeffs, n_ec))
