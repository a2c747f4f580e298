"""Newtonian potentials φ_u(x) = ∫ u²(y)/|x-y| dy and two-center integrals.

Three evaluation routes, used as mutual oracles:

* ``radial_potential``   exact radial reduction for radial densities,
* ``grid_potential``     zero-padded FFT convolution with 1/|x| on a 3D box,
* ``two_center_integral``  bipolar-coordinate reduction of
  ∫ f(|x-a|) g(|x-b|) dx with |a-b| = d.

The convolution doubles the domain (zero padding) so there is no periodic
aliasing; the kernel sample at the origin is the exact average of 1/|x|
over one grid cell, which has the closed form (h²·side integrals of a cube
split into pyramids)

    (1/h³) ∫_cell dx/|x| = 3·(2 ln((1+√3)/√2) - π/6) / h.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
from scipy.integrate import cumulative_trapezoid, simpson

from .errors import ChecksumError, ContractViolationError, DomainError
from .radial import RadialGrid, RadialProfile, _newtonian_potential_values

__all__ = [
    "Field3D",
    "radial_potential",
    "grid_potential",
    "two_center_integral",
    "cell_average_inverse_radius",
    "save_field",
    "load_field",
    "CELL_AVERAGE_COEFF",
]

# (1/h³)∫_cell 1/|x| dx = CELL_AVERAGE_COEFF / h  for a cube cell of side h
CELL_AVERAGE_COEFF = 3.0 * (2.0 * np.log((1.0 + np.sqrt(3.0)) / np.sqrt(2.0)) - np.pi / 6.0)

BOUNDARY_DECAY_LIMIT = 1e-10


def cell_average_inverse_radius(h: float) -> float:
    """Exact average of 1/|x| over a cube cell of side h centered at 0."""
    return CELL_AVERAGE_COEFF / h


@dataclass(frozen=True)
class Field3D:
    """Scalar samples on the cell-centered uniform grid over [-L, L]³.

    Nodes sit at cell centers, x_i = -L + (i + 1/2)·h with h = 2L/n, so
    that reflections x_h → -x_h and quarter turns about the x₃-axis map
    nodes to nodes exactly.  ``n_per_axis`` must be even and ≥ 32; powers
    of two give the fastest transforms but 3·2^m sizes (e.g. 192) are
    accepted.
    """

    box_half_width: float
    n_per_axis: int
    values: np.ndarray

    def __post_init__(self):
        if self.n_per_axis < 32 or self.n_per_axis % 2 != 0:
            raise ValueError(f"n_per_axis must be even and >= 32, got {self.n_per_axis}")
        if self.box_half_width <= 0:
            raise ValueError("box_half_width must be positive")
        vals = np.asarray(self.values, dtype=float)
        n = self.n_per_axis
        if vals.shape != (n, n, n):
            raise ValueError(f"values must have shape {(n, n, n)}, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def spacing(self) -> float:
        return 2.0 * self.box_half_width / self.n_per_axis

    def axis_coords(self) -> np.ndarray:
        return -self.box_half_width + (np.arange(self.n_per_axis) + 0.5) * self.spacing

    def boundary_max_ratio(self) -> float:
        """max |values| over the six boundary faces, relative to the global max."""
        v = np.abs(self.values)
        peak = v.max()
        if peak == 0.0:
            return 0.0
        faces = max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max(),
                    v[:, :, 0].max(), v[:, :, -1].max())
        return float(faces / peak)


def radial_potential(u: RadialProfile, out_grid: RadialGrid | None = None) -> RadialProfile:
    """Newtonian potential of the radial density u².

    φ(r) = (4π/r) ∫₀^r s²u²(s) ds + 4π ∫_r^rmax s·u²(s) ds, the integrals
    truncated at u's grid end.  With ``out_grid`` the potential can be
    sampled on a larger grid (beyond u's support it is exactly mass/r up
    to the truncation), which is what interaction integrals at large
    center separations need.
    """
    r = u.grid.nodes()
    u2 = u.values * u.values
    if out_grid is None or out_grid == u.grid:
        phi = _newtonian_potential_values(r, u2)
        out = u.grid
    else:
        out = out_grid
        rout = out.nodes()
        inner = cumulative_trapezoid(r * r * u2, r, initial=0.0)
        outer = cumulative_trapezoid(r * u2, r, initial=0.0)
        outer = outer[-1] - outer
        inner_o = np.interp(rout, r, inner, right=float(inner[-1]))
        outer_o = np.interp(rout, r, outer, right=0.0)
        phi = np.empty_like(rout)
        phi[1:] = 4.0 * np.pi * (inner_o[1:] / rout[1:] + outer_o[1:])
        phi[0] = 4.0 * np.pi * outer_o[0]
    warn = ()
    mass = 4.0 * np.pi * simpson(r * r * u2, dx=u.grid.spacing)
    from .radial import _tail_mass_fraction
    frac = _tail_mass_fraction(u.grid, u.values, mass) if mass > 0 else 0.0
    if frac > 1e-6:
        warn = (f"density tail mass fraction {frac:.2e} beyond r_max exceeds 1e-6; "
                "potential is truncated",)
    return RadialProfile(grid=out, values=phi, warnings=warn)


# ----------------------------------------------------------------------
# free-space convolution on the box
# ----------------------------------------------------------------------

_KERNEL_CACHE: dict = {}


def _kernel_fft(n: int, h: float) -> np.ndarray:
    key = (n, round(h, 14))
    hit = _KERNEL_CACHE.get(key)
    if hit is not None:
        return hit
    n2 = 2 * n
    disp = np.fft.fftfreq(n2, d=1.0 / n2) * h  # wrapped displacement coordinates
    d2 = disp * disp
    r2 = d2[:, None, None] + d2[None, :, None] + d2[None, None, :]
    kern = np.zeros_like(r2)
    nz = r2 > 0
    kern[nz] = 1.0 / np.sqrt(r2[nz])
    kern[0, 0, 0] = cell_average_inverse_radius(h)
    out = sfft.rfftn(kern)
    del kern, r2
    while len(_KERNEL_CACHE) >= 2:  # the transforms are large; keep at most two
        _KERNEL_CACHE.pop(next(iter(_KERNEL_CACHE)))
    _KERNEL_CACHE[key] = out
    return out


def grid_potential(sq: Field3D) -> Field3D:
    """Free-space convolution of a squared field with 1/|x|.

    Zero-padded to (2n)³ so the result carries no periodic images.  The
    input must decay below 1e-10 of its max on the box boundary; fields
    that do not are rejected (their potential would be dominated by
    truncation).
    """
    ratio = sq.boundary_max_ratio()
    if ratio > BOUNDARY_DECAY_LIMIT:
        raise ContractViolationError(
            f"input does not decay at the box boundary "
            f"(boundary/max = {ratio:.2e} > {BOUNDARY_DECAY_LIMIT:.0e})"
        )
    n = sq.n_per_axis
    n2 = 2 * n
    khat = _kernel_fft(n, sq.spacing)
    pad = np.zeros((n2, n2, n2))
    pad[:n, :n, :n] = sq.values
    spec = sfft.rfftn(pad)
    spec *= khat
    conv = sfft.irfftn(spec, s=(n2, n2, n2))[:n, :n, :n]
    del pad, spec
    conv *= sq.spacing**3
    return Field3D(box_half_width=sq.box_half_width, n_per_axis=n, values=conv)


# ----------------------------------------------------------------------
# two-center integrals in bipolar coordinates
# ----------------------------------------------------------------------

def _tc_one_sided(rf, fvals, hf, rg, gvals, d):
    # (2π/d) ∫ s f(s) [G(s+d) - G(|s-d|)] ds with G(x) = ∫₀^x t g(t) dt;
    # the triangle constraint |s-t| ≤ d ≤ s+t is exact in the limits of G.
    G = cumulative_trapezoid(rg * gvals, rg, initial=0.0)
    upper = np.interp(rf + d, rg, G, right=float(G[-1]))
    lower = np.interp(np.abs(rf - d), rg, G, right=float(G[-1]))
    return 2.0 * np.pi / d * simpson(rf * fvals * (upper - lower), dx=hf)


def two_center_integral(f: RadialProfile, g: RadialProfile, d: float) -> float:
    """∫_{R³} f(|x|)·g(|x - d·ê|) dx for radial factors f, g.

    Both directions of the bipolar reduction are evaluated and averaged,
    which makes the result exactly symmetric under f ↔ g.  Profiles are
    treated as zero beyond their grids.
    """
    if d < 0:
        raise DomainError(f"center distance must be >= 0, got {d}")
    rf = f.grid.nodes()
    rg = g.grid.nodes()
    if d == 0:
        a = simpson(f.values * np.interp(rf, rg, g.values, right=0.0) * rf * rf,
                    dx=f.grid.spacing)
        b = simpson(g.values * np.interp(rg, rf, f.values, right=0.0) * rg * rg,
                    dx=g.grid.spacing)
        return 4.0 * np.pi * 0.5 * (a + b)
    a = _tc_one_sided(rf, f.values, f.grid.spacing, rg, g.values, d)
    b = _tc_one_sided(rg, g.values, g.grid.spacing, rf, f.values, d)
    return 0.5 * (a + b)


# ----------------------------------------------------------------------
# binary serialization (raw float64, x-fastest) with JSON sidecar
# ----------------------------------------------------------------------

def save_field(field: Field3D, path) -> None:
    """Write raw little-endian float64 in x-fastest order plus a sidecar."""
    path = str(path)
    raw = np.ascontiguousarray(
        field.values.astype("<f8").ravel(order="F")
    ).tobytes()
    with open(path, "wb") as fh:
        fh.write(raw)
    sidecar = {
        "box_half_width": field.box_half_width,
        "n_per_axis": field.n_per_axis,
        "dtype": "<f8",
        "order": "x-fastest",
        "checksum": hashlib.sha256(raw).hexdigest(),
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_field(path) -> Field3D:
    path = str(path)
    with open(path + ".json") as fh:
        meta = json.load(fh)
    with open(path, "rb") as fh:
        raw = fh.read()
    if hashlib.sha256(raw).hexdigest() != meta["checksum"]:
        raise ChecksumError(f"{path}: checksum mismatch")
    n = int(meta["n_per_axis"])
    vals = np.frombuffer(raw, dtype="<f8")
    if vals.size != n**3:
        raise ChecksumError(f"{path}: expected {n**3} samples, found {vals.size}")
    vals = vals.reshape((n, n, n), order="F")
    return Field3D(box_half_width=float(meta["box_half_width"]),
                   n_per_axis=n, values=np.array(vals))
