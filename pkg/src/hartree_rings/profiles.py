"""Model parameters, the synchronized pair (αw, γw), and the scaled bump.

The two synchronized components solve the coupled limit system when the
amplitudes satisfy the 2×2 linear system

    μ₁α² + β₁₂γ² = 1,      β₁₂α² + μ₂γ² = 1,

so α² = (μ₂-β₁₂)/(μ₁μ₂-β₁₂²) and γ² = (μ₁-β₁₂)/(μ₁μ₂-β₁₂²).  These are
the amplitudes actually substituted back into the system; ``sync_coefficients``
verifies both identities to 1e-12.

The third component uses the rescaled bump W(r) = (λ/√μ₃)·w(√λ r), which
solves -ΔW + λW = μ₃ φ_W W whenever w solves the unit-parameter problem.

Concrete potential family used for all numerics:

    V_i(r) = λ_i + a_i · (1 + r²)^(-m_i/2),

smooth at the origin with far-field expansion λ_i + a_i/r^m_i + O(1/r^(m_i+2)).
Constant potentials are encoded as a_i = 0 with m_i = +inf.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import simpson

from .errors import (
    GridRangeError,
    OutsideRegimeError,
    SingularityError,
    ValidationError,
)
from .radial import RadialProfile, radial_derivative, _newtonian_potential_values

__all__ = [
    "PotentialSpec",
    "SystemParams",
    "SyncCoefficients",
    "DomainVerdict",
    "sync_coefficients",
    "domain_membership",
    "scaled_bump",
    "radial_pde_residual",
]

BETA_SEQUENCE_CAVEAT = (
    "branch (I) with negative coupling excludes a non-constructive decreasing "
    "sequence of couplings accumulating at -sqrt(mu*nu); membership cannot "
    "rule out landing on it"
)


@dataclass(frozen=True)
class PotentialSpec:
    """One component's trapping potential V(r) = lam + a·(1+r²)^(-m/2)."""

    a: float
    m: float
    lam: float = 1.0
    theta: float = 2.0

    @classmethod
    def constant(cls, lam: float = 1.0) -> "PotentialSpec":
        # a = 0 with the decay exponent pushed past every finite one
        return cls(a=0.0, m=math.inf, lam=lam)

    @property
    def is_constant(self) -> bool:
        return self.a == 0.0

    def values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.is_constant:
            return np.full(r.shape, self.lam)
        return self.lam + self.a * (1.0 + r * r) ** (-self.m / 2.0)

    def infimum(self) -> float:
        # monotone in r: inf is at r=0 for a<0, at infinity for a>0
        return self.lam + min(0.0, self.a)

    def cumulative_moment(self, x) -> np.ndarray:
        """∫₀^x s·(V(s) - lam) ds in closed form (needed by ring energies)."""
        x = np.asarray(x, dtype=float)
        if self.is_constant:
            return np.zeros(x.shape)
        if self.m == 2.0:
            return 0.5 * self.a * np.log1p(x * x)
        p = (2.0 - self.m) / 2.0
        return self.a * ((1.0 + x * x) ** p - 1.0) / (2.0 - self.m)


@dataclass(frozen=True)
class SystemParams:
    """All model parameters: self couplings μ_i, cross couplings β_ij,
    third-component frequency λ, and the three potentials."""

    mu: tuple[float, float, float]
    beta12: float
    beta13: float
    beta23: float
    lam: float
    potentials: tuple[PotentialSpec, PotentialSpec, PotentialSpec]

    @property
    def m(self) -> float:
        """The governing decay exponent m = min(m₁, m₂)."""
        return min(self.potentials[0].m, self.potentials[1].m)

    def validate(self) -> None:
        """Enforce the standing assumptions; raises ValidationError."""
        reasons = []
        mu1, mu2, mu3 = self.mu
        if not mu3 > 0:
            reasons.append(f"mu3 must be positive, got {mu3}")
        if not self.lam > 0:
            reasons.append(f"lambda must be positive, got {self.lam}")
        p1, p2, p3 = self.potentials
        if p1.lam != 1.0 or p2.lam != 1.0:
            reasons.append("components 1 and 2 must have far-field level 1")
        if p3.lam != self.lam:
            reasons.append(
                f"component 3 far-field level {p3.lam} must equal lambda={self.lam}"
            )
        for i, p in enumerate(self.potentials, start=1):
            if p.infimum() <= 0:
                reasons.append(f"potential {i} has non-positive infimum {p.infimum()}")
            if not p.is_constant and p.m <= 0:
                reasons.append(f"potential {i} decay exponent must be positive")
            if not p.is_constant and p.theta <= 0:
                reasons.append(f"potential {i} theta must be positive")
        m = self.m
        if not (p1.is_constant and p2.is_constant) and not 0.5 <= m < 1.0:
            reasons.append(f"m = min(m1, m2) = {m} must lie in [1/2, 1)")
        if not p3.is_constant:
            if not math.isfinite(m):
                reasons.append("component 3 decays but components 1-2 are both "
                               "constant; the decay exponents cannot match")
            elif p3.m != m:
                reasons.append(f"m3 = {p3.m} must equal min(m1, m2) = {m}")
        if reasons:
            raise ValidationError("invalid system parameters", reasons=reasons)

    # --- JSON round trip -------------------------------------------------

    def to_dict(self) -> dict:
        def pot(p: PotentialSpec) -> dict:
            d = {"a": p.a, "m": (None if math.isinf(p.m) else p.m),
                 "lambda_i": p.lam, "theta": p.theta}
            if p.is_constant:
                d["constant"] = True
            return d

        return {
            "mu": list(self.mu),
            "beta": {"b12": self.beta12, "b13": self.beta13, "b23": self.beta23},
            "lambda": self.lam,
            "potentials": [pot(p) for p in self.potentials],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SystemParams":
        lam = float(d["lambda"])
        pots = []
        for i, pd in enumerate(d["potentials"]):
            default_lam = lam if i == 2 else 1.0
            lam_i = float(pd.get("lambda_i", default_lam))
            if pd.get("constant") or pd.get("m") is None:
                pots.append(PotentialSpec(a=float(pd.get("a", 0.0)), m=math.inf,
                                          lam=lam_i, theta=float(pd.get("theta", 2.0))))
            else:
                pots.append(PotentialSpec(a=float(pd["a"]), m=float(pd["m"]),
                                          lam=lam_i, theta=float(pd.get("theta", 2.0))))
        beta = d["beta"]
        return cls(mu=tuple(float(x) for x in d["mu"]),
                   beta12=float(beta["b12"]), beta13=float(beta["b13"]),
                   beta23=float(beta["b23"]), lam=lam, potentials=tuple(pots))

    @classmethod
    def from_json(cls, path) -> "SystemParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class SyncCoefficients:
    alpha: float
    gamma: float
    system_residual: float


@dataclass(frozen=True)
class DomainVerdict:
    member: bool
    branch: str  # one of "I", "II", "III", "outside"
    caveat: str = ""


def sync_coefficients(mu1: float, mu2: float, beta12: float) -> SyncCoefficients:
    """Amplitudes (α, γ) of the synchronized pair (αw, γw).

    Solves the linear system in (α², γ²); raises SingularityError when
    μ₁μ₂ = β₁₂² and OutsideRegimeError when a square comes out
    non-positive.
    """
    det = mu1 * mu2 - beta12 * beta12
    scale = max(abs(mu1 * mu2), beta12 * beta12, 1.0)
    if abs(det) < 1e-14 * scale:
        raise SingularityError(
            f"mu1*mu2 == beta12^2 (det = {det:.3e}); amplitudes undefined"
        )
    alpha2 = (mu2 - beta12) / det
    gamma2 = (mu1 - beta12) / det
    if alpha2 <= 0 or gamma2 <= 0:
        raise OutsideRegimeError(
            f"squared amplitudes not positive (alpha^2={alpha2:.6g}, "
            f"gamma^2={gamma2:.6g}); synchronized pair does not exist here"
        )
    alpha = math.sqrt(alpha2)
    gamma = math.sqrt(gamma2)
    residual = max(abs(mu1 * alpha2 + beta12 * gamma2 - 1.0),
                   abs(beta12 * alpha2 + mu2 * gamma2 - 1.0))
    return SyncCoefficients(alpha=alpha, gamma=gamma, system_residual=residual)


def domain_membership(mu1: float, mu2: float, beta12: float) -> DomainVerdict:
    """Classify (μ₁, μ₂, β₁₂) against the existence region for the pair.

    Branch I:   μ, ν > 0 and β₁₂ ∈ (-√(μν), 0) ∪ (0, min{μ,ν}) ∪ (max{μ,ν}, ∞),
                minus a non-constructive excluded sequence on the negative part;
    Branch II:  μ, ν < 0 and β₁₂ > √(μν);
    Branch III: μν ≤ 0 and β₁₂ > max{μ, ν}.
    """
    mu, nu, b = mu1, mu2, beta12
    if mu > 0 and nu > 0:
        root = math.sqrt(mu * nu)
        lo, hi = min(mu, nu), max(mu, nu)
        if -root < b < 0:
            return DomainVerdict(True, "I", caveat=BETA_SEQUENCE_CAVEAT)
        if 0 < b < lo or b > hi:
            return DomainVerdict(True, "I")
        return DomainVerdict(False, "outside")
    if mu < 0 and nu < 0:
        if b > math.sqrt(mu * nu):
            return DomainVerdict(True, "II")
        return DomainVerdict(False, "outside")
    # here mu*nu <= 0
    if b > max(mu, nu):
        return DomainVerdict(True, "III")
    return DomainVerdict(False, "outside")


def scaled_bump(w: RadialProfile, lam: float, mu3: float) -> RadialProfile:
    """Third-component bump W(r) = (λ/√μ₃)·w(√λ r) on w's grid.

    For λ < 1 the rescaled profile is wider than w; if the part of its
    mass falling beyond the grid exceeds 1e-6 the resampling is refused.
    """
    if lam <= 0 or mu3 <= 0:
        raise ValueError("lam and mu3 must be positive")
    root = math.sqrt(lam)
    if lam < 1.0 and w.tail_rate is not None and w.tail_amplitude is not None:
        # mass of W beyond r_max equals the mass of w beyond root*r_max
        q, amp = w.tail_rate, w.tail_amplitude
        r = w.grid.nodes()
        mass = 4.0 * np.pi * simpson(w.values**2 * r * r, dx=w.grid.spacing)
        tail = 4.0 * np.pi * amp**2 * np.exp(-2 * q * root * w.grid.r_max) / (2 * q)
        if mass > 0 and tail / mass > 1e-6:
            raise GridRangeError(
                f"rescaling by sqrt(lam)={root:.3g} pushes {tail / mass:.2e} "
                "of the bump mass beyond the grid"
            )
    spline = w.interpolator()
    vals = (lam / math.sqrt(mu3)) * w.evaluate(root * w.grid.nodes(), spline=spline)
    rate = None if w.tail_rate is None else root * w.tail_rate
    amp = None if w.tail_amplitude is None else (root / math.sqrt(mu3)) * w.tail_amplitude
    return RadialProfile(grid=w.grid, values=vals, tail_rate=rate, tail_amplitude=amp)


def radial_pde_residual(u: RadialProfile, lam: float, mu: float) -> float:
    """L² norm of  -Δu + λu - μ φ_u u  on the radial grid.

    Discretized with a solver-independent fourth-order stencil on v = r·u,
    so the number measures genuine truncation and modeling error rather
    than echoing the ground-state iteration.
    """
    r = u.grid.nodes()
    h = u.grid.spacing
    v = r * u.values
    phi = _newtonian_potential_values(r, u.values**2)
    vpp = np.zeros_like(v)
    vpp[2:-2] = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (12 * h * h)
    res_v = -vpp + lam * v - mu * r * phi * u.values
    core = slice(2, -2)
    return float(np.sqrt(4.0 * np.pi * simpson(res_v[core] ** 2, dx=h)))
