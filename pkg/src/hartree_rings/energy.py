"""Ansatz assembly, the full grid energy, and its pairwise expansion.

The functional evaluated on the box is

    I(u₁,u₂,u₃) = ½ Σ_i ∫(|∇u_i|² + V_i u_i²)
                  - ¼ Σ_i μ_i ∫φ_{u_i} u_i²
                  - ½ (β₁₂ ∫φ_{u₂}u₁² + β₁₃ ∫φ_{u₃}u₁² + β₂₃ ∫φ_{u₃}u₂²)

with all integrals as midpoint sums on the cell-centered grid, gradients
by second-order central differences, and the nonlocal potentials by the
zero-padded convolution of ``grid_potential``.

``pairwise_energy`` evaluates the same quantity semi-analytically:
single-peak energies k·(A₀+Ã), exact radial quadrature of the potential
tails ∫(V_i-λ_i)·bump², and every two-center tail interaction through the
bipolar integral at the exact inter-center distance.  Products of bumps at
different centers (triple-overlap terms) are neglected — they decay like
e^(-(1-τ)·distance) and sit far below the quadrature noise at the
separations used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .configurations import PeakConfig, s_k_window
from .errors import GeometryError
from .potential import Field3D, grid_potential, radial_potential, two_center_integral
from .profiles import PotentialSpec, SystemParams, scaled_bump, sync_coefficients
from .radial import RadialGrid, RadialProfile, ground_state_stats
from .reduced import ReducedConstants, compute_constants

__all__ = [
    "AnsatzFields",
    "EnergyBreakdown",
    "PairwiseEnergy",
    "ResidualNorms",
    "StudyRow",
    "ScalingStudy",
    "assemble_ansatz",
    "full_energy",
    "pairwise_energy",
    "pairwise_energy_parts",
    "pde_residual",
    "residual_scaling_study",
]

REQUIRED_MARGIN = 10.0
# margin that brings the squared bump tails under the 1e-10 boundary
# contract of grid_potential at desk-scale radii, with slack for the
# half-cell offset of the boundary face centers on coarse grids
CONVOLUTION_MARGIN = 18.0
RESOLVED_SPACING = 0.5


@dataclass(frozen=True)
class AnsatzFields:
    u1: Field3D
    u2: Field3D
    u3: Field3D
    config: PeakConfig
    params: SystemParams


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic_and_potential: tuple[float, float, float]  # ½∫(|∇u_i|²+V_i u_i²)
    self_interaction: tuple[float, float, float]       # ∫φ_{u_i} u_i²
    cross_12: float                                    # ∫φ_{u_2} u_1²
    cross_13: float
    cross_23: float
    total: float


@dataclass(frozen=True)
class PairwiseEnergy:
    single: float        # k·(A₀ + Ã)
    potential: float     # k·Σ (1/2)∫(V_i-λ_i)·bump_i²
    same_ring_12: float  # inner-ring tail interactions (components 1 and 2)
    same_ring_3: float   # outer-ring tail interactions (component 3)
    cross: float         # inner-outer tail interactions (β₁₃, β₂₃)
    total: float

    @property
    def interaction(self) -> float:
        return self.same_ring_12 + self.same_ring_3 + self.cross


@dataclass(frozen=True)
class ResidualNorms:
    per_component: tuple[float, float, float]

    @property
    def total(self) -> float:
        return math.sqrt(sum(x * x for x in self.per_component))


def assemble_ansatz(config: PeakConfig, params: SystemParams, w: RadialProfile,
                    box_half_width: float, n_per_axis: int = 128) -> AnsatzFields:
    """Sample the signed multi-bump ansatz on a box grid.

    u₁ = α·Σ s_j w(·-x^j),  u₂ = γ·Σ s_j w(·-x^j),  u₃ = Σ s'_j W(·-y^j),
    with radial spline interpolation of the profiles.  The box must leave
    at least 10 length units between every ring and the boundary.
    """
    margin = box_half_width - max(config.r, config.rho)
    if margin < REQUIRED_MARGIN:
        raise GeometryError(
            f"box half-width {box_half_width} leaves margin {margin:.2f} < "
            f"{REQUIRED_MARGIN} around rings of radii ({config.r}, {config.rho})"
        )
    sync = sync_coefficients(params.mu[0], params.mu[1], params.beta12)
    W = scaled_bump(w, params.lam, params.mu[2])

    h = 2.0 * box_half_width / n_per_axis
    ax = -box_half_width + (np.arange(n_per_axis) + 0.5) * h
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")

    def signed_sum(profile: RadialProfile, centers, signs) -> np.ndarray:
        spline = profile.interpolator()
        out = np.zeros_like(X)
        for (cx, cy, cz), s in zip(centers, signs):
            rr = np.sqrt((X - cx) ** 2 + (Y - cy) ** 2 + (Z - cz) ** 2)
            out += s * profile.evaluate(rr, spline=spline)
        return out

    inner = signed_sum(w, config.centers_inner, config.signs_inner)
    outer = signed_sum(W, config.centers_outer, config.signs_outer)

    def field(vals):
        return Field3D(box_half_width=box_half_width, n_per_axis=n_per_axis,
                       values=vals)

    return AnsatzFields(
        u1=field(sync.alpha * inner), u2=field(sync.gamma * inner),
        u3=field(outer), config=config, params=params,
    )


# ----------------------------------------------------------------------
# full grid energy
# ----------------------------------------------------------------------

def _gradient_square_sum(values: np.ndarray, h: float) -> float:
    out = 0.0
    for axis in range(3):
        g = np.gradient(values, h, axis=axis, edge_order=2)
        out += float(np.sum(g * g))
    return out


def _component_potentials(fields: AnsatzFields):
    """Newtonian potential of each component's square (None if the field is 0)."""
    phis = []
    for u in (fields.u1, fields.u2, fields.u3):
        if np.max(np.abs(u.values)) == 0.0:
            phis.append(None)
        else:
            sq = Field3D(u.box_half_width, u.n_per_axis, u.values * u.values)
            phis.append(grid_potential(sq))
    return phis


def full_energy(fields: AnsatzFields) -> EnergyBreakdown:
    """Brute-force evaluation of the functional on the grid."""
    params = fields.params
    comps = (fields.u1, fields.u2, fields.u3)
    n = comps[0].n_per_axis
    h = comps[0].spacing
    vol = h ** 3
    ax = comps[0].axis_coords()
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    R = np.sqrt(X * X + Y * Y + Z * Z)
    del X, Y, Z

    phis = _component_potentials(fields)

    kp = []
    self_int = []
    for u, pot, phi in zip(comps, params.potentials, phis):
        if phi is None:
            kp.append(0.0)
            self_int.append(0.0)
            continue
        grad2 = _gradient_square_sum(u.values, h)
        vterm = float(np.sum(pot.values(R) * u.values * u.values))
        kp.append(0.5 * (grad2 + vterm) * vol)
        self_int.append(float(np.sum(phi.values * u.values**2)) * vol)

    def cross(i, j):
        if phis[i] is None or phis[j] is None:
            return 0.0
        a = float(np.sum(phis[j].values * comps[i].values ** 2))
        b = float(np.sum(phis[i].values * comps[j].values ** 2))
        return 0.5 * (a + b) * vol

    c12, c13, c23 = cross(0, 1), cross(0, 2), cross(1, 2)
    mu = params.mu
    total = (sum(kp)
             - 0.25 * (mu[0] * self_int[0] + mu[1] * self_int[1] + mu[2] * self_int[2])
             - 0.5 * (params.beta12 * c12 + params.beta13 * c13 + params.beta23 * c23))
    return EnergyBreakdown(
        kinetic_and_potential=tuple(kp), self_interaction=tuple(self_int),
        cross_12=c12, cross_13=c13, cross_23=c23, total=total,
    )


# ----------------------------------------------------------------------
# semi-analytic pairwise expansion
# ----------------------------------------------------------------------

def _squared_profile(p: RadialProfile) -> RadialProfile:
    return RadialProfile(grid=p.grid, values=p.values * p.values)


def _extended_grid(base: RadialGrid, max_distance: float) -> RadialGrid:
    r_max = max_distance + base.r_max + 5.0
    n = int(math.ceil(r_max / base.spacing))
    return RadialGrid(r_max=n * base.spacing, n_points=n)


def _potential_bump_integral(pot: PotentialSpec, bump_sq: RadialProfile,
                             d: float) -> float:
    """∫ (V(|x|) - λ)·B²(|x - c|) dx with |c| = d, by bipolar reduction.

    The radial factor of the potential enters through its closed-form
    cumulative moment, so the slowly decaying tail carries no truncation.
    """
    r = bump_sq.grid.nodes()
    if d == 0.0:
        integrand = (pot.values(r) - pot.lam) * bump_sq.values * r * r
        return 4.0 * np.pi * simpson(integrand, dx=bump_sq.grid.spacing)
    upper = pot.cumulative_moment(r + d)
    lower = pot.cumulative_moment(np.abs(r - d))
    integrand = r * bump_sq.values * (upper - lower)
    return 2.0 * np.pi / d * simpson(integrand, dx=bump_sq.grid.spacing)


def pairwise_energy_parts(config: PeakConfig, params: SystemParams,
                          w: RadialProfile, stats=None) -> PairwiseEnergy:
    """Semi-analytic ansatz energy split into its contributions."""
    stats = stats or ground_state_stats(w)
    consts = compute_constants(params, stats)
    a2 = consts.alpha ** 2
    g2 = consts.gamma ** 2
    mu1, mu2, mu3 = params.mu
    W = scaled_bump(w, params.lam, mu3)

    inner_d = config.inner_pair_distances()
    outer_d = config.outer_pair_distances()
    mixed_d = config.mixed_distances()
    dmax = max([2 * config.r, 2 * config.rho, float(np.max(mixed_d))])
    ext = _extended_grid(w.grid, dmax)
    phi_w = radial_potential(w, out_grid=ext)
    phi_W = radial_potential(W, out_grid=ext)
    w_sq = _squared_profile(w)
    W_sq = _squared_profile(W)

    k = config.k
    single = k * (consts.A0 + consts.A_tilde)
    potential = k * (
        0.5 * a2 * _potential_bump_integral(params.potentials[0], w_sq, config.r)
        + 0.5 * g2 * _potential_bump_integral(params.potentials[1], w_sq, config.r)
        + 0.5 * _potential_bump_integral(params.potentials[2], W_sq, config.rho)
    )

    # ordered-pair sums collapse to k times the sums over peak 1's partners
    same12_coeff = 0.25 * (mu1 * a2 * a2 + mu2 * g2 * g2) + 0.5 * params.beta12 * a2 * g2
    same12 = -same12_coeff * k * sum(
        two_center_integral(phi_w, w_sq, d) for d in inner_d)
    same3 = -0.25 * mu3 * k * sum(
        two_center_integral(phi_W, W_sq, d) for d in outer_d)
    cross_coeff = 0.5 * (params.beta13 * a2 + params.beta23 * g2)
    cross = -cross_coeff * k * sum(
        two_center_integral(phi_w, W_sq, d) for d in mixed_d)

    total = single + potential + same12 + same3 + cross
    return PairwiseEnergy(single=single, potential=potential,
                          same_ring_12=same12, same_ring_3=same3,
                          cross=cross, total=total)


def pairwise_energy(config: PeakConfig, params: SystemParams,
                    w: RadialProfile, stats=None) -> float:
    return pairwise_energy_parts(config, params, w, stats=stats).total


# ----------------------------------------------------------------------
# PDE residual of the ansatz
# ----------------------------------------------------------------------

def _laplacian(values: np.ndarray, h: float) -> np.ndarray:
    # 7-point stencil; np.roll wraps, which is harmless for fields that
    # decay at the boundary (the assembly margin guarantees that)
    out = -6.0 * values.copy()
    for axis in range(3):
        out += np.roll(values, 1, axis) + np.roll(values, -1, axis)
    return out / (h * h)


def pde_residual(fields: AnsatzFields) -> ResidualNorms:
    """L² norm of the strong-form residual of each component.

    res_i = -Δu_i + V_i u_i - μ_i φ_{u_i} u_i - Σ_{j≠i} β_ij φ_{u_j} u_i
    """
    params = fields.params
    comps = (fields.u1, fields.u2, fields.u3)
    h = comps[0].spacing
    vol = h ** 3
    ax = comps[0].axis_coords()
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    R = np.sqrt(X * X + Y * Y + Z * Z)
    del X, Y, Z

    phis = _component_potentials(fields)
    phi_vals = [None if p is None else p.values for p in phis]
    betas = {(0, 1): params.beta12, (1, 0): params.beta12,
             (0, 2): params.beta13, (2, 0): params.beta13,
             (1, 2): params.beta23, (2, 1): params.beta23}

    norms = []
    for i, (u, pot) in enumerate(zip(comps, params.potentials)):
        if phi_vals[i] is None and np.max(np.abs(u.values)) == 0.0:
            norms.append(0.0)
            continue
        res = -_laplacian(u.values, h) + pot.values(R) * u.values
        if phi_vals[i] is not None:
            res -= params.mu[i] * phi_vals[i] * u.values
        for j in range(3):
            if j != i and phi_vals[j] is not None:
                res -= betas[(i, j)] * phi_vals[j] * u.values
        norms.append(float(np.sqrt(np.sum(res * res) * vol)))
    return ResidualNorms(per_component=tuple(norms))


# ----------------------------------------------------------------------
# residual scaling study
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class StudyRow:
    k: int
    radius: float
    residual: float       # sqrt(Σ_i ||res_i||²)
    per_peak: float       # residual / sqrt(2k)
    under_resolved: bool


@dataclass(frozen=True)
class ScalingStudy:
    rows: tuple[StudyRow, ...]
    fitted_exponent: float     # slope of log(residual) vs log(k)
    spacing: float
    box_half_width: float
    n_per_axis: int


def residual_scaling_study(k_values, radius_coefficients, params: SystemParams,
                           w: RadialProfile, n_per_axis: int = 128,
                           variant: str = "PPP",
                           box_half_width: float | None = None) -> ScalingStudy:
    """Tabulate per-peak residuals over k and window-rule radii r = c·(k ln k)^(1/(1-m)).

    One shared box is used for every row so that the discretization floor
    stays fixed while the physical part of the residual moves; rows whose
    bump cores are sampled coarser than ~2 points per unit length are
    flagged under-resolved.
    """
    from .configurations import build_config

    m = params.m
    rows_spec = []
    for k in k_values:
        scale = (k * math.log(k)) ** (1.0 / (1.0 - m))
        for c in radius_coefficients:
            rows_spec.append((int(k), c * scale))
    max_radius = max(r for _, r in rows_spec)
    L = box_half_width if box_half_width is not None else max_radius + CONVOLUTION_MARGIN
    h = 2.0 * L / n_per_axis

    rows = []
    for k, radius in rows_spec:
        cfg = build_config(k, radius, radius, variant)
        fields = assemble_ansatz(cfg, params, w, box_half_width=L,
                                 n_per_axis=n_per_axis)
        norms = pde_residual(fields)
        total = norms.total
        rows.append(StudyRow(k=k, radius=radius, residual=total,
                             per_peak=total / math.sqrt(2 * k),
                             under_resolved=h > RESOLVED_SPACING))

    ks = sorted({row.k for row in rows})
    if len(ks) >= 2:
        mid = radius_coefficients[len(radius_coefficients) // 2]
        pts = []
        for k in ks:
            scale = (k * math.log(k)) ** (1.0 / (1.0 - m))
            target = mid * scale
            row = min((r for r in rows if r.k == k),
                      key=lambda r: abs(r.radius - target))
            pts.append((math.log(k), math.log(row.per_peak)))
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        slope = float(np.polyfit(xs, ys, 1)[0])
    else:
        slope = math.nan
    return ScalingStudy(rows=tuple(rows), fitted_exponent=slope, spacing=h,
                        box_half_width=L, n_per_axis=n_per_axis)
