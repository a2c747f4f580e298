"""Reduced-energy constants and the two-ring landscape functions.

With the ground-state quadratures M = ∫w², P = ∫φ_w w² and the
synchronization amplitudes (α, γ), every constant of the reduced model is
explicit:

    A₀ = (α²+γ²)P/4                single inner-peak energy
    Ã  = λ^(3/2) P/(4μ₃)           single outer-peak energy
    B₁ = α²M/2,  B₂ = γ²M/2,  B₃ = (√λ/μ₃)M/2
    C_w = M²                       far-field interaction constant
    D₀ = (μ₁α⁴+μ₂γ⁴+2β₁₂α²γ²)·C_w/(4π)   [= (α²+γ²)C_w/(4π)]
    D₁ = (λ/μ₃)·C_w/(4π)
    D₂ = (β₁₃α²+β₂₃γ²)·(√λ/μ₃)·C_w/(2π)

The landscape in rescaled radii (x, y) = (r, ρ)/(k ln k)^(1/(1-m)) is

    f(x,y) = a₁B₁/x^m₁ + a₂B₂/x^m₂ + a₃B₃/y^m₃ - D₀/x - D₁/y
             - D₂·π/(k ln k) · g(x, y, k),

whose separable parts have the closed-form maximizers d₁, d₂ and maxima
f₁(d₁), f₂(d₂).  The physical-radii expansion per peak carries the ring
cross term with coefficient π·D₂ (the grid oracle fixes this
normalization; see ``asymptotic_energy``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .profiles import SystemParams, sync_coefficients
from .radial import GroundStateStats
from .ring_kernel import g_sum

__all__ = ["ReducedConstants", "compute_constants", "f_xy", "F_hat",
           "asymptotic_energy"]


@dataclass(frozen=True)
class ReducedConstants:
    M_w: float
    K_w: float
    P_w: float
    C_w: float
    alpha: float
    gamma: float
    A0: float
    A_tilde: float
    B1: float
    B2: float
    B3: float
    D0: float
    D1: float
    D2: float
    Lambda: float
    m: float
    d1: float
    d2: float
    f1_at_d1: float
    f2_at_d2: float
    branch: str                       # "m1<m2", "m2<m1" or "m1=m2"
    valid_for_theorem: bool
    notes: tuple[str, ...]
    params: SystemParams = field(repr=False)

    @property
    def cross_ring_coefficient(self) -> float:
        """Coefficient of Σ_j 1/|x¹-y^j| in the per-peak energy: π·D₂."""
        return math.pi * self.D2

    def to_dict(self) -> dict:
        keys = ["M_w", "K_w", "P_w", "C_w", "alpha", "gamma", "A0", "A_tilde",
                "B1", "B2", "B3", "D0", "D1", "D2", "Lambda", "m", "d1", "d2",
                "f1_at_d1", "f2_at_d2", "branch", "valid_for_theorem"]
        d = {k: getattr(self, k) for k in keys}
        d["cross_ring_coefficient"] = self.cross_ring_coefficient
        d["notes"] = list(self.notes)
        return d


# provenance of each constant, emitted next to the values by the CLI
PROVENANCE = {
    "M_w": "radial quadrature of w^2",
    "K_w": "radial quadrature of |grad w|^2",
    "P_w": "radial quadrature of phi_w w^2",
    "C_w": "M_w^2; far-field law of the two-center integral, oracle-checked",
    "alpha": "root of mu1*a^2 + b12*g^2 = 1, b12*a^2 + mu2*g^2 = 1",
    "gamma": "root of the same 2x2 system",
    "A0": "(alpha^2+gamma^2)*P_w/4 (single synchronized peak energy)",
    "A_tilde": "lambda^(3/2)*P_w/(4*mu3) (single rescaled peak energy)",
    "B1": "alpha^2*M_w/2", "B2": "gamma^2*M_w/2", "B3": "sqrt(lambda)*M_w/(2*mu3)",
    "D0": "(mu1*a^4+mu2*g^4+2*b12*a^2*g^2)*C_w/(4*pi)",
    "D1": "(lambda/mu3)*C_w/(4*pi)",
    "D2": "(b13*a^2+b23*g^2)*sqrt(lambda)*C_w/(2*pi*mu3)",
    "cross_ring_coefficient": "pi*D2; per-peak weight of the mixed ring sum, "
                              "normalization fixed against the grid oracle",
    "Lambda": "a3*(alpha^2+gamma^2) / (branch a-combination * sqrt(lambda))",
    "m": "min(m1, m2)",
    "d1": "(D0/(aB_eff*m))^(1/(1-m)), argmax of the inner separable part",
    "d2": "(D1/(a3*B3*m))^(1/(1-m)), argmax of the outer separable part",
    "f1_at_d1": "(1-m)*(aB_eff)^(1/(1-m))*(m/D0)^(m/(1-m))",
    "f2_at_d2": "(1-m)*(a3*B3)^(1/(1-m))*(m/D1)^(m/(1-m))",
}


def compute_constants(params: SystemParams, gs: GroundStateStats) -> ReducedConstants:
    """Assemble every reduced constant from the parameters and quadratures.

    Sign conditions required by the existence result are *not* enforced
    here; violating parameter sets still get their constants, with the
    offending conditions recorded in ``notes`` and ``valid_for_theorem``
    set False (d's and f-maxima that need a positive coefficient come out
    NaN).
    """
    mu1, mu2, mu3 = params.mu
    lam = params.lam
    sync = sync_coefficients(mu1, mu2, params.beta12)
    a, g = sync.alpha, sync.gamma
    a2, g2 = a * a, g * g
    M, P = gs.M_w, gs.P_w
    Cw = M * M
    A0 = 0.25 * (a2 + g2) * P
    At = lam ** 1.5 / (4.0 * mu3) * P
    B1 = 0.5 * a2 * M
    B2 = 0.5 * g2 * M
    B3 = 0.5 * math.sqrt(lam) / mu3 * M
    D0 = 0.25 * (mu1 * a2 * a2 + mu2 * g2 * g2 + 2 * params.beta12 * a2 * g2) * Cw / math.pi
    D1 = 0.25 * (lam / mu3) * Cw / math.pi
    D2 = 0.5 * (params.beta13 * a2 + params.beta23 * g2) * math.sqrt(lam) / mu3 * Cw / math.pi

    p1, p2, p3 = params.potentials
    a1c, a2c, a3c = p1.a, p2.a, p3.a
    if p1.m < p2.m:
        branch = "m1<m2"
        a_eff = a1c * B1
        lam_den = a1c * a2
    elif p2.m < p1.m:
        branch = "m2<m1"
        a_eff = a2c * B2
        lam_den = a2c * g2
    else:
        branch = "m1=m2"
        a_eff = a1c * B1 + a2c * B2
        lam_den = a1c * a2 + a2c * g2

    notes = []
    valid = True
    if a3c <= 0:
        notes.append("a3 > 0 violated")
        valid = False
    if a_eff <= 0:
        notes.append(f"branch {branch} requires a positive inner decay "
                     "combination; got a_eff <= 0")
        valid = False
    Lambda = (a3c * (a2 + g2) / (lam_den * math.sqrt(lam))
              if lam_den != 0 else math.nan)
    if math.isnan(Lambda):
        notes.append("Lambda undefined (zero inner decay combination)")
        valid = False

    m = params.m
    expo = 1.0 / (1.0 - m)
    d1 = (D0 / (a_eff * m)) ** expo if a_eff > 0 else math.nan
    f1 = (1 - m) * a_eff ** expo * (m / D0) ** (m * expo) if a_eff > 0 else math.nan
    d2 = (D1 / (a3c * B3 * m)) ** expo if a3c > 0 else math.nan
    f2 = (1 - m) * (a3c * B3) ** expo * (m / D1) ** (m * expo) if a3c > 0 else math.nan

    return ReducedConstants(
        M_w=M, K_w=gs.K_w, P_w=P, C_w=Cw, alpha=a, gamma=g, A0=A0, A_tilde=At,
        B1=B1, B2=B2, B3=B3, D0=D0, D1=D1, D2=D2, Lambda=Lambda, m=m,
        d1=d1, d2=d2, f1_at_d1=f1, f2_at_d2=f2, branch=branch,
        valid_for_theorem=valid, notes=tuple(notes), params=params,
    )


def _potential_sum(consts: ReducedConstants, x, y):
    p1, p2, p3 = consts.params.potentials
    out = 0.0
    if not p1.is_constant:
        out = out + p1.a * consts.B1 / x ** p1.m
    if not p2.is_constant:
        out = out + p2.a * consts.B2 / x ** p2.m
    if not p3.is_constant:
        out = out + p3.a * consts.B3 / y ** p3.m
    return out


def f_xy(x, y, k: int, consts: ReducedConstants):
    """The rescaled two-ring landscape; broadcasts over (x, y) arrays."""
    if k < 2:
        raise ValueError(f"the rescaled landscape needs k >= 2, got {k}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ring = consts.D2 * math.pi / (k * math.log(k)) * g_sum(x, y, k)
    val = (_potential_sum(consts, x, y) - consts.D0 / x - consts.D1 / y - ring)
    return float(val) if np.ndim(val) == 0 else val


def F_hat(x, y, k: int, consts: ReducedConstants):
    """Per-configuration total k·[A₀ + Ã + (k ln k)^(-m/(1-m)) f(x,y)].

    The vanishing remainder of the underlying expansion is dropped; this
    is the monotone affine wrapper of f at fixed k.
    """
    m = consts.m
    damp = (k * math.log(k)) ** (-m / (1.0 - m))
    return k * (consts.A0 + consts.A_tilde + damp * f_xy(x, y, k, consts))


def asymptotic_energy(r, rho, k: int, consts: ReducedConstants):
    """Leading-order ansatz energy at physical ring radii (r, ρ).

    Per peak: A₀ + Ã + potential tails a_iB_i/r^m_i - D₀(k ln k)/r
    - D₁(k ln k)/ρ - π·D₂·g(r, ρ, k).  The π on the ring cross term is
    the normalization that matches both the rescaled landscape f and the
    3D grid oracle (a bare D₂·g would undercount by π).
    """
    r = np.asarray(r, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(r <= 0) or np.any(rho <= 0):
        raise ValueError("ring radii must be positive")
    kl = k * math.log(k)  # vanishes at k = 1 along with the same-ring pairs
    ring = math.pi * consts.D2 * g_sum(r, rho, k)
    val = (consts.A0 + consts.A_tilde + _potential_sum(consts, r, rho)
           - consts.D0 * kl / r - consts.D1 * kl / rho - ring)
    out = k * val
    return float(out) if np.ndim(out) == 0 else out
