"""Closed-form CDFs and average block error rates.

Everything here is deterministic math on top of the gamma fit: the CDF of a
direct-plus-reflected gain (exponential plus squared-gamma), the SINR CDFs
it induces for each decoding step, and the averaged BLERs.  Averages of the
piecewise-linear BLER surrogate reduce, via the first-order midpoint rule,
to a single CDF evaluation at the threshold beta -- the slope times the knee
width is exactly one -- so every "average" below is one CDF call.

Provides:
    SinrKind           -- which decoding step's SINR, plus the doubled flag
    effective_gain_cdf -- CDF of T/Z/W at a point
    sinr_cdf           -- CDF of the step's SINR (threshold-mapped)
    avg_psi            -- average linearized BLER of one decoding step
    avg_bler_cu        -- central user average BLER (analytic form)
    avg_bler_ceu_sc    -- edge user average BLER, selective combining
    avg_bler_ceu_mrc   -- edge user average BLER, MRC (lower bound)
    diversity_order    -- asymptotic log-log BLER slopes
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import GammaFit, SystemConfig, gamma_fit
from .fbl import CodeSpec, linearization_params
from .numerics import chebyshev_rule, reg_lower_inc_gamma, stable_exp_combine

__all__ = [
    "SinrKind",
    "CC",
    "CE",
    "E1",
    "E2",
    "effective_gain_cdf",
    "sinr_cdf",
    "avg_psi",
    "avg_bler_cu",
    "avg_bler_ceu_sc",
    "avg_bler_ceu_mrc",
    "diversity_order",
]


@dataclass(frozen=True)
class SinrKind:
    """Identifies one decoding step's SINR.

    tag: "cc" (CU decodes its own data after SIC), "ce" (CU decodes the
    edge user's data), "e1" (CEU decodes the direct phase), "e2" (CEU
    decodes the relayed phase).  doubled=True denotes the distribution of
    2*gamma, used by the MRC bound; its CDF at omega is the plain CDF at
    omega/2.
    """

    tag: str
    doubled: bool = False

    def __post_init__(self) -> None:
        if self.tag not in ("cc", "ce", "e1", "e2"):
            raise ValueError(f"unknown SINR kind {self.tag!r}")


CC = SinrKind("cc")
CE = SinrKind("ce")
E1 = SinrKind("e1")
E2 = SinrKind("e2")

_rule_cache: dict[int, object] = {}


def _cached_rule(order: int):
    rule = _rule_cache.get(order)
    if rule is None:
        rule = chebyshev_rule(order)
        _rule_cache[order] = rule
    return rule


def effective_gain_cdf(
    t: float,
    direct_var: float,
    fit: GammaFit,
    eta: float,
    quad_order: int,
) -> float:
    """CDF at t of gain = p + (eta*q)^2, p ~ Exp(direct_var), q ~ fit.

    Evaluates the regularized-incomplete-gamma head minus a Gauss-Chebyshev
    correction sum over transformed nodes zeta_u = (sqrt(t)/(2 eta))(xi_u+1).
    Every term of the correction is assembled in the exponent domain via
    stable_exp_combine (the combined exponent is <= 0 by construction), so
    deep-tail evaluations neither overflow nor lose sign structure.
    """
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if direct_var <= 0.0:
        raise ValueError("direct_var must be positive")
    if eta <= 0.0:
        raise ValueError("eta must be positive for the analytic CDF")
    if t == 0.0:
        return 0.0

    sqrt_t = math.sqrt(t)
    head = reg_lower_inc_gamma(fit.kappa + 1.0, sqrt_t / (eta * fit.b))

    ln_front = math.log(sqrt_t / (2.0 * eta))
    ln_b = math.log(fit.b)
    lg = math.lgamma(fit.kappa + 1.0)
    rule = _cached_rule(quad_order)

    corr = 0.0
    for xi, w in zip(rule.nodes, rule.weights):
        zeta = (sqrt_t / (2.0 * eta)) * (xi + 1.0)
        if zeta <= 0.0 or w <= 0.0:
            continue
        corr += stable_exp_combine(
            [
                math.log(w),
                ln_front,
                fit.kappa * math.log(zeta),
                -fit.kappa * ln_b,
                -lg,
                (eta * eta * zeta * zeta - t) / direct_var,
                -zeta / fit.b,
            ]
        )
    return min(1.0, max(0.0, head - corr))


def _kind_channel(kind: SinrKind, cfg: SystemConfig, relay_direct_var: float | None):
    """(direct_var, fit, eta) triple of the gain underlying this SINR kind."""
    if kind.tag in ("cc", "ce"):
        return cfg.lambda_c, gamma_fit(cfg.R, cfg.lambda_gc, cfg.lambda_rc), cfg.eta_c
    if kind.tag == "e1":
        return cfg.lambda_e, gamma_fit(cfg.R, cfg.lambda_ge, cfg.lambda_re), cfg.eta_e
    # relay hop: the direct CU->CEU link has variance lambda_ce by the system
    # model; an alternative reading uses lambda_e, kept switchable for the
    # simulation arbitration test
    var = cfg.lambda_ce if relay_direct_var is None else relay_direct_var
    return var, gamma_fit(cfg.R, cfg.lambda_gce, cfg.lambda_rce), cfg.eta_e


def sinr_cdf(
    omega: float,
    kind: SinrKind,
    cfg: SystemConfig,
    relay_direct_var: float | None = None,
) -> float:
    """CDF of the decoding step's SINR at threshold omega.

    Maps omega to a threshold on the underlying gain and delegates to
    effective_gain_cdf:
        cc:      t = omega / (alpha_c rho_s)
        ce, e1:  t = omega / (alpha_e rho_s - alpha_c rho_s omega),
                 saturating to 1 once omega >= alpha_e/alpha_c
        e2:      t = omega / rho_c
    A doubled kind halves omega first (CDF of 2*gamma).
    """
    if omega < 0.0:
        raise ValueError(f"omega must be >= 0, got {omega}")
    w = omega / 2.0 if kind.doubled else omega
    if w == 0.0:
        return 0.0
    direct_var, fit, eta = _kind_channel(kind, cfg, relay_direct_var)
    if kind.tag == "cc":
        t = w / (cfg.alpha_c * cfg.rho_s)
    elif kind.tag in ("ce", "e1"):
        ratio = cfg.alpha_e / cfg.alpha_c
        if w >= ratio:
            return 1.0  # interference-limited SINR can never reach w
        t = w / (cfg.alpha_e * cfg.rho_s - cfg.alpha_c * cfg.rho_s * w)
    else:  # e2
        t = w / cfg.rho_c
    return effective_gain_cdf(t, direct_var, fit, eta, cfg.quad_order)


def avg_psi(
    kind: SinrKind,
    code: CodeSpec,
    cfg: SystemConfig,
    relay_direct_var: float | None = None,
) -> float:
    """Average linearized BLER of one decoding step.

    The midpoint (first-order Riemann) reduction: the average of the linear
    surrogate over the fading is delta*sqrt(m) * integral of the SINR CDF
    from v to u, and since delta*sqrt(m)*(u - v) = 1 with beta the midpoint,
    this is exactly the CDF evaluated at beta (beta/2 when doubled).
    """
    lin = linearization_params(code)
    return sinr_cdf(lin.beta, kind, cfg, relay_direct_var)


def avg_bler_cu(cfg: SystemConfig) -> float:
    """Central user average BLER: max of the two decoding steps' averages.

    SIC at the CU fails if either the edge user's message or its own
    message fails to decode; the max of the two step averages is the
    standard analytic stand-in for that union.
    """
    e_cc = avg_psi(CC, cfg.code_c, cfg)
    e_ce = avg_psi(CE, cfg.code_e, cfg)
    return max(e_cc, e_ce)


def avg_bler_ceu_sc(cfg: SystemConfig) -> float:
    """Edge user average BLER under selective combining."""
    e_ce = avg_psi(CE, cfg.code_e, cfg)
    p_e1 = avg_psi(E1, cfg.code_e, cfg)
    p_e2 = avg_psi(E2, cfg.code_e, cfg)
    val = e_ce * p_e1 + (1.0 - e_ce) * p_e1 * p_e2
    return min(1.0, max(0.0, val))


def avg_bler_ceu_mrc(cfg: SystemConfig) -> float:
    """Edge user average BLER under MRC -- analytic lower bound.

    Uses psi(g1 + g2) >= psi(2 g1) psi(2 g2): the combined-phase term
    factors into doubled-SINR averages, each of which is the plain CDF at
    beta/2.  The result under-estimates the true MRC average, by design.
    """
    e_ce = avg_psi(CE, cfg.code_e, cfg)
    p_e1 = avg_psi(E1, cfg.code_e, cfg)
    p_e1_d = avg_psi(SinrKind("e1", doubled=True), cfg.code_e, cfg)
    p_e2_d = avg_psi(SinrKind("e2", doubled=True), cfg.code_e, cfg)
    val = e_ce * p_e1 + (1.0 - e_ce) * p_e1_d * p_e2_d
    return min(1.0, max(0.0, val))


def diversity_order(R: int, scheme: str) -> float:
    """Asymptotic slope of log BLER versus log SNR for each scheme.

    With kappa the fitted shape parameter for R elements: the central user
    and the SC edge user achieve (kappa+1)/2 (the CU value is a lower
    bound); MRC squares it.  Variance factors cancel in kappa, so only R
    enters.
    """
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    kappa = gamma_fit(R, 1.0, 1.0).kappa
    half = (kappa + 1.0) / 2.0
    if scheme == "cu":
        return half
    if scheme == "ceu_sc":
        return half
    if scheme == "ceu_mrc":
        return half * half
    raise ValueError(f"unknown scheme {scheme!r}")
