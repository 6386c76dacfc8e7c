"""Expectation propagation for probit regression, dense variant.

Maintains the full p x p posterior covariance and updates it with two
rank-one corrections per site visit (cavity removal, then moment-matched
replacement), for a per-sweep cost of O(p^2 n).  Suited to p < n; for
large p see ep_lowrank, which reproduces these trajectories exactly.

Model: y_i ~ Bernoulli(Phi(x_i' beta)), beta ~ N_p(0, nu2 I).  The EP
approximation is Gaussian with natural parameters (Q, r); each site i
contributes a rank-one precision k_i x_i x_i' and shift m_i x_i.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .model_data import Dataset, PriorConfig
from .special_functions import zeta1, zeta2

# Cavity guard: a site is skipped for the sweep when the downdate
# denominator 1 - k_i x_i' Q^{-1} x_i falls to this level or below.
EPS_CAV = 1e-12

__all__ = [
    "EPS_CAV",
    "SiteState",
    "DenseGlobalState",
    "HybridSNParams",
    "EPConfig",
    "FitReport",
    "PosteriorSummary",
    "ep_dense_fit",
    "hybrid_moments",
    "cavity_for_site",
]


@dataclass
class SiteState:
    """Per-site scalars: precisions k (> 0 after an update) and shifts m."""

    k: np.ndarray
    m: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "SiteState":
        return cls(k=np.zeros(n), m=np.zeros(n))


@dataclass
class DenseGlobalState:
    """Natural shift r and explicit covariance Q^{-1}."""

    r: np.ndarray
    Qinv: np.ndarray


@dataclass
class HybridSNParams:
    """Extended skew-normal parameters of one site's hybrid distribution.

    xi is the cavity mean, Omega_x the product Omega_i x_i; s and tau are
    the scalar tilt parameters.  Only the pieces the moment formulas
    consume are stored; the full Omega_i matrix never needs to be formed.
    """

    xi: np.ndarray
    Omega_x: np.ndarray
    s: float
    tau: float
    x_Omega_x: float


@dataclass(frozen=True)
class EPConfig:
    """Convergence and instrumentation knobs shared by both EP variants.

    tol bounds the largest per-sweep site-parameter change |dm| + |dk|;
    damping < 1 commits a convex combination of old and new site values.
    record_history stores per-sweep copies of (k, m) on the report;
    check_invariants enables in-loop positivity/shrinkage assertions.
    """

    tol: float = 1e-5
    max_sweeps: int = 200
    damping: float = 1.0
    record_history: bool = False
    check_invariants: bool = False

    def __post_init__(self):
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must be in (0, 1]")


@dataclass
class FitReport:
    """Outcome of one EP run."""

    sweeps_run: int
    converged: bool
    final_change: float
    wall_time: float
    skipped_sites: int = 0
    cavity_skips: int = 0
    degenerate_skips: int = 0
    k_history: list | None = None
    m_history: list | None = None


@dataclass
class PosteriorSummary:
    """Approximate posterior mean and marginal standard deviations."""

    mean: np.ndarray
    sd: np.ndarray
    cov: np.ndarray | None = None
    clamped_variances: int = 0


def _summary_from_dense(state: DenseGlobalState) -> PosteriorSummary:
    mean = state.Qinv @ state.r
    var = np.diagonal(state.Qinv).copy()
    clamped = int(np.sum(var < 0.0))
    np.clip(var, 0.0, None, out=var)
    return PosteriorSummary(mean=mean, sd=np.sqrt(var), clamped_variances=clamped)


def ep_dense_fit(
    data: Dataset, prior: PriorConfig, cfg: EPConfig = EPConfig()
) -> tuple[PosteriorSummary, SiteState, DenseGlobalState, FitReport]:
    """Run EP sweeps with the explicit covariance update.

    Sites are visited in natural order.  One visit removes site i from
    the global approximation (rank-one Woodbury downdate to the cavity),
    moment-matches the tilted cavity against the exact likelihood factor
    Phi((2 y_i - 1) x_i' beta), and folds the refreshed site back in.
    Both rank-one corrections share the direction u = Q^{-1} x_i, so they
    are applied as a single update of Q^{-1} with coefficient
    -dk / (1 + dk * x_i' Q^{-1} x_i), dk the committed precision change;
    this is the same Sherman-Morrison form the low-rank variant uses and
    is what keeps the two trajectories in lockstep.

    Returns (summary, sites, state, report); non-convergence is reported,
    not raised.
    """
    t0 = time.perf_counter()
    n, p = data.n, data.p
    X = data.X
    y = data.y
    nu2 = prior.nu2
    diag_cap = nu2 * (1.0 + 1e-10)

    Qinv = nu2 * np.eye(p)
    r = np.zeros(p)
    sites = SiteState.zeros(n)
    k, m = sites.k, sites.m
    sgn = 2.0 * np.asarray(y, dtype=float) - 1.0

    # Zero covariate rows carry a constant likelihood Phi(0); their exact
    # site contribution is k = m = 0, so they are never visited.
    active = [i for i in range(n) if X[i].any()]
    skipped = set(range(n)) - set(active)
    cavity_skips = 0
    degenerate_skips = 0

    # The rank-one update is written block-wise through a bounded scratch
    # buffer instead of materializing a full p x p outer product.
    bw = max(1, (5 * p) // 8)
    buf = np.empty((p, bw))
    u = np.empty(p)
    uc = np.empty(p)

    k_hist: list | None = [] if cfg.record_history else None
    m_hist: list | None = [] if cfg.record_history else None
    tol = cfg.tol
    damping = cfg.damping
    sweeps = 0
    converged = False
    delta = math.inf

    for _ in range(cfg.max_sweeps):
        k_prev = k.copy()
        m_prev = m.copy()
        for i in active:
            x = X[i]
            np.dot(Qinv, x, out=u)
            a = float(x @ u)
            den = 1.0 - k[i] * a
            if den <= EPS_CAV:
                skipped.add(i)
                cavity_skips += 1
                continue
            ur = float(u @ r)
            mi = m[i]
            wr = (ur - mi * a) / den
            axx = a / den
            s = sgn[i] / math.sqrt(1.0 + axx)
            tau = s * wr
            z1 = zeta1(tau)
            z2 = -z1 * (z1 + tau)
            k_new = -z2 / (1.0 + axx + z2 * axx)
            m_new = z1 * s + k_new * wr + k_new * z1 * s * axx
            if damping != 1.0:
                k_new = k[i] + damping * (k_new - k[i])
                m_new = mi + damping * (m_new - mi)
            dk = k_new - k[i]
            cden = 1.0 + dk * a
            if cden <= EPS_CAV:
                skipped.add(i)
                degenerate_skips += 1
                continue
            np.multiply(u, -dk / cden, out=uc)
            for j0 in range(0, p, bw):
                j1 = min(j0 + bw, p)
                b = buf[:, : j1 - j0]
                np.multiply(uc[:, None], u[None, j0:j1], out=b)
                Qinv[:, j0:j1] += b
            r += (m_new - mi) * x
            k[i] = k_new
            m[i] = m_new
            if cfg.check_invariants:
                if not k_new > 0.0:
                    raise AssertionError(f"site precision k[{i}] = {k_new} not positive")
                if np.max(np.diagonal(Qinv)) > diag_cap:
                    raise AssertionError("covariance diagonal exceeded the prior variance")
        Qinv += Qinv.T
        Qinv *= 0.5
        sweeps += 1
        if cfg.record_history:
            k_hist.append(k.copy())
            m_hist.append(m.copy())
        delta = float(np.max(np.abs(k - k_prev) + np.abs(m - m_prev))) if n else 0.0
        if delta < tol:
            converged = True
            break

    state = DenseGlobalState(r=r, Qinv=Qinv)
    summary = _summary_from_dense(state)
    report = FitReport(
        sweeps_run=sweeps,
        converged=converged,
        final_change=delta,
        wall_time=time.perf_counter() - t0,
        skipped_sites=len(skipped),
        cavity_skips=cavity_skips,
        degenerate_skips=degenerate_skips,
        k_history=k_hist,
        m_history=m_hist,
    )
    return summary, sites, state, report


def cavity_for_site(
    i: int, data: Dataset, state: DenseGlobalState, sites: SiteState
) -> HybridSNParams:
    """Rebuild site i's cavity parameters from a fitted dense state.

    Used after convergence to re-derive the hybrid distribution whose
    moments the site update matched; the cavity covariance enters only
    through the products Omega_i x_i and x_i' Omega_i x_i, so no second
    p x p matrix is formed.
    """
    x = data.X[i]
    u = state.Qinv @ x
    a = float(x @ u)
    den = 1.0 - sites.k[i] * a
    if den <= EPS_CAV:
        raise ValueError(f"site {i} has a degenerate cavity (denominator {den})")
    w = u / den
    axx = a / den
    r_mi = state.r - sites.m[i] * x
    # xi = Omega_i r_{-i} with Omega_i = Q^{-1} + (k_i/den) u u'
    xi = state.Qinv @ r_mi + (sites.k[i] / den) * float(u @ r_mi) * u
    s = (2.0 * float(data.y[i]) - 1.0) / math.sqrt(1.0 + axx)
    tau = s * float(w @ r_mi)
    return HybridSNParams(xi=xi, Omega_x=w, s=s, tau=tau, x_Omega_x=axx)


def hybrid_moments(cavity: HybridSNParams) -> tuple[np.ndarray, float]:
    """First moment of the hybrid and the rank-one coefficient of its second.

    mu_h = xi + zeta1(tau) * s * Omega_x; the hybrid covariance equals
    Omega + coeff * Omega_x Omega_x' with coeff = zeta2(tau) * s^2.  The
    coefficient is returned rather than the p x p matrix so fixed-point
    checks stay cheap.
    """
    z1 = zeta1(cavity.tau)
    mu_h = cavity.xi + z1 * cavity.s * cavity.Omega_x
    coeff = zeta2(cavity.tau) * cavity.s * cavity.s
    return mu_h, coeff
