"""Fading models for all links and the cascaded-gain gamma fit.

The surface is split into two zones of R elements, one phase-aligned to the
central user and one to the edge user.  With aligned phases each cascaded
link collapses to q = sum over elements of |g|*|h|, a sum of products of
independent Rayleigh magnitudes; its distribution is approximated by a
gamma distribution via moment matching.

Provides:
    SystemConfig        -- full physical configuration (linear SNRs)
    GammaFit            -- (kappa, b) gamma approximation of q
    FadingSample        -- one draw of every direct power / cascaded sum
    gamma_fit           -- moment-matched (kappa, b) for R elements
    sample_aligned      -- one aligned-phase draw of all nine channels
    sample_random_phase -- single-zone baseline with uniform random phases
    effective_gain      -- combined direct + reflected gain T / Z / W
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fbl import CodeSpec

__all__ = [
    "SystemConfig",
    "GammaFit",
    "FadingSample",
    "gamma_fit",
    "sample_aligned",
    "sample_random_phase",
    "effective_gain",
]

_PI_SQ = math.pi * math.pi


@dataclass(frozen=True)
class SystemConfig:
    """Physical parameters of the two-user cooperative link.

    SNRs are linear power ratios (transmit power over noise power); the CLI
    converts from dB exactly once at load.  alpha_c + alpha_e = 1 with the
    central user taking the smaller share.  lambda_* are mean channel power
    gains: lambda_c / lambda_e / lambda_ce for the direct links (BS->CU,
    BS->CEU, CU->CEU) and per-hop pairs (lambda_g*, lambda_r*) for the
    cascaded surface links of each zone.
    """

    rho_s: float
    rho_c: float
    alpha_c: float
    alpha_e: float
    code_c: CodeSpec
    code_e: CodeSpec
    R: int
    eta_c: float = 1.0
    eta_e: float = 1.0
    lambda_c: float = 1.0
    lambda_e: float = 0.3
    lambda_ce: float = 1.0
    lambda_rc: float = 1.0
    lambda_gc: float = 0.8
    lambda_re: float = 1.0
    lambda_ge: float = 0.3
    lambda_rce: float = 1.0
    lambda_gce: float = 0.8
    quad_order: int = 50

    def __post_init__(self) -> None:
        if self.rho_s <= 0.0 or self.rho_c <= 0.0:
            raise ValueError("transmit SNRs must be positive")
        if abs(self.alpha_c + self.alpha_e - 1.0) > 1e-9:
            raise ValueError(
                f"power allocation must satisfy alpha_c + alpha_e = 1, "
                f"got {self.alpha_c} + {self.alpha_e}"
            )
        if not (0.0 < self.alpha_c < self.alpha_e):
            raise ValueError(
                f"need 0 < alpha_c < alpha_e, got alpha_c={self.alpha_c}, "
                f"alpha_e={self.alpha_e}"
            )
        if self.R < 0:
            raise ValueError(f"element count R must be >= 0, got {self.R}")
        for name in ("eta_c", "eta_e"):
            val = getattr(self, name)
            # eta = 0 is allowed as an explicit "no surface" in simulation
            if not (0.0 <= val <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        for name in (
            "lambda_c", "lambda_e", "lambda_ce",
            "lambda_rc", "lambda_gc", "lambda_re",
            "lambda_ge", "lambda_rce", "lambda_gce",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.quad_order < 1:
            raise ValueError(f"quad_order must be >= 1, got {self.quad_order}")


@dataclass(frozen=True)
class GammaFit:
    """Gamma approximation of the cascaded sum q: shape kappa+1, scale b."""

    kappa: float
    b: float


@dataclass(frozen=True)
class FadingSample:
    """One joint draw: direct power gains p_* and cascaded magnitude sums q_*."""

    p_c: float
    p_e: float
    p_ce: float
    q_c: float = 0.0
    q_e: float = 0.0
    q_ce: float = 0.0


def gamma_fit(R: int, lambda_g: float, lambda_r: float) -> GammaFit:
    """Moment-matched gamma parameters for q = sum_{r=1..R} |g_r||h_r|.

    Each |g||h| product of independent Rayleigh magnitudes has mean
    (pi/4)sqrt(lambda_g lambda_r) and variance (1 - pi^2/16)lambda_g lambda_r;
    matching the first two moments of the R-term sum gives

        kappa = ((R+1)pi^2 - 16)/(16 - pi^2)
        b     = (4/pi - pi/4) sqrt(lambda_g lambda_r)

    so that (kappa+1)b and (kappa+1)b^2 reproduce the exact mean and
    variance.  Undefined for R = 0 (no cascade to fit): callers branch.
    """
    if R < 1:
        raise ValueError(f"gamma fit requires R >= 1, got R={R}")
    if lambda_g <= 0.0 or lambda_r <= 0.0:
        raise ValueError("per-hop variances must be positive")
    kappa = ((R + 1) * _PI_SQ - 16.0) / (16.0 - _PI_SQ)
    b = (4.0 / math.pi - math.pi / 4.0) * math.sqrt(lambda_g * lambda_r)
    return GammaFit(kappa=kappa, b=b)


def _rayleigh_magnitudes(rng: np.random.Generator, mean_power: float, size) -> np.ndarray:
    # |h| with E|h|^2 = mean_power, i.e. sqrt of an exponential draw
    return np.sqrt(rng.exponential(mean_power, size=size))


def sample_aligned(cfg: SystemConfig, rng: np.random.Generator) -> FadingSample:
    """One draw of all links with the surface phases aligned per zone.

    Direct powers p_* are exponential with their lambda means; each cascaded
    sum q_* adds R independent |g||h| products.  Nine independent draw
    groups in a fixed order, so a given stream state fixes the sample.
    """
    batch = _sample_aligned_batch(cfg, rng, 1, with_cascade=cfg.R > 0)
    return FadingSample(
        p_c=float(batch["p_c"][0]),
        p_e=float(batch["p_e"][0]),
        p_ce=float(batch["p_ce"][0]),
        q_c=float(batch["q_c"][0]),
        q_e=float(batch["q_e"][0]),
        q_ce=float(batch["q_ce"][0]),
    )


def _sample_aligned_batch(
    cfg: SystemConfig,
    rng: np.random.Generator,
    n: int,
    with_cascade: bool,
) -> dict[str, np.ndarray]:
    """Vectorized aligned sampling: n trials at once (Monte Carlo hot path).

    Draw order is fixed (p_c, p_e, p_ce, then the three cascades hop by
    hop); skipping the cascade (with_cascade=False) leaves the direct draws
    untouched, which is what makes the no-surface scenario bit-compatible
    with eta = 0.
    """
    p_c = rng.exponential(cfg.lambda_c, size=n)
    p_e = rng.exponential(cfg.lambda_e, size=n)
    p_ce = rng.exponential(cfg.lambda_ce, size=n)
    zeros = np.zeros(n, dtype=np.float64)
    if not with_cascade or cfg.R == 0:
        return {"p_c": p_c, "p_e": p_e, "p_ce": p_ce,
                "q_c": zeros, "q_e": zeros, "q_ce": zeros.copy()}
    shape = (n, cfg.R)
    q_c = np.sum(
        _rayleigh_magnitudes(rng, cfg.lambda_gc, shape)
        * _rayleigh_magnitudes(rng, cfg.lambda_rc, shape),
        axis=1,
    )
    q_e = np.sum(
        _rayleigh_magnitudes(rng, cfg.lambda_ge, shape)
        * _rayleigh_magnitudes(rng, cfg.lambda_re, shape),
        axis=1,
    )
    q_ce = np.sum(
        _rayleigh_magnitudes(rng, cfg.lambda_gce, shape)
        * _rayleigh_magnitudes(rng, cfg.lambda_rce, shape),
        axis=1,
    )
    return {"p_c": p_c, "p_e": p_e, "p_ce": p_ce, "q_c": q_c, "q_e": q_e, "q_ce": q_ce}


def _complex_normal(rng: np.random.Generator, mean_power: float, size) -> np.ndarray:
    s = math.sqrt(mean_power / 2.0)
    return rng.normal(0.0, s, size=size) + 1j * rng.normal(0.0, s, size=size)


def sample_random_phase(
    cfg: SystemConfig, rng: np.random.Generator, total_elements: int
) -> FadingSample:
    """Single-zone baseline: one surface, phases i.i.d. uniform, no alignment.

    For each link the effective power is |h + eta * sum_r g_r e^{j phi_r}
    h_r|^2 with independent uniform phases, reported in the p_* fields; the
    q_* fields are zero because the aligned-cascade CDF machinery does not
    apply to this baseline.
    """
    batch = _sample_random_phase_batch(cfg, rng, 1, total_elements)
    return FadingSample(
        p_c=float(batch["p_c"][0]),
        p_e=float(batch["p_e"][0]),
        p_ce=float(batch["p_ce"][0]),
    )


def _sample_random_phase_batch(
    cfg: SystemConfig,
    rng: np.random.Generator,
    n: int,
    total_elements: int,
) -> dict[str, np.ndarray]:
    """Vectorized random-phase sampling for the single-zone baseline."""
    links = (
        ("p_c", cfg.lambda_c, cfg.lambda_gc, cfg.lambda_rc, cfg.eta_c),
        ("p_e", cfg.lambda_e, cfg.lambda_ge, cfg.lambda_re, cfg.eta_e),
        ("p_ce", cfg.lambda_ce, cfg.lambda_gce, cfg.lambda_rce, cfg.eta_e),
    )
    out: dict[str, np.ndarray] = {}
    for name, lam_direct, lam_g, lam_r, eta in links:
        h = _complex_normal(rng, lam_direct, n)
        if total_elements > 0:
            shape = (n, total_elements)
            g = _complex_normal(rng, lam_g, shape)
            hr = _complex_normal(rng, lam_r, shape)
            phi = rng.uniform(0.0, 2.0 * np.pi, size=shape)
            reflected = np.sum(g * np.exp(1j * phi) * hr, axis=1)
            total = h + eta * reflected
        else:
            total = h
        out[name] = np.abs(total) ** 2
    zeros = np.zeros(n, dtype=np.float64)
    out["q_c"] = zeros
    out["q_e"] = zeros.copy()
    out["q_ce"] = zeros.copy()
    return out


def effective_gain(sample: FadingSample, link: str, cfg: SystemConfig) -> float:
    """Combined channel gain seen by a decoder: direct power + (eta*q)^2.

    link is one of "cu" (BS->CU, gain T), "ceu_direct" (BS->CEU, gain Z),
    "relay" (CU->CEU, gain W).
    """
    if link == "cu":
        return sample.p_c + (cfg.eta_c * sample.q_c) ** 2
    if link == "ceu_direct":
        return sample.p_e + (cfg.eta_e * sample.q_e) ** 2
    if link == "relay":
        return sample.p_ce + (cfg.eta_e * sample.q_ce) ** 2
    raise ValueError(f"unknown link {link!r}")
