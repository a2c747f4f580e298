"""Interleaved peak rings, the admissible radius window, and symmetry checks.

The k inner centers sit at angles 2(j-1)π/k on a ring of radius r, the k
outer centers at the half-step angles (2j-1)π/k on a ring of radius ρ; all
peaks lie in the x₃ = 0 plane.  Sign patterns are either all +1 (``P``) or
alternating (-1)^j (``A``, which requires even k).  The four variants map
the letters onto (components 1&2, component 3):

    PPP  (+, +)      AAA  (alt, alt)      PPA  (+, alt)      AAP  (alt, +)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParityError
from .potential import Field3D

__all__ = [
    "VARIANTS",
    "PeakConfig",
    "build_config",
    "s_k_window",
    "symmetry_deviation",
]

VARIANTS = ("PPP", "AAA", "PPA", "AAP")


def _signs(letter: str, k: int) -> np.ndarray:
    if letter == "P":
        return np.ones(k)
    return np.array([(-1.0) ** j for j in range(1, k + 1)])


@dataclass(frozen=True)
class PeakConfig:
    k: int
    r: float
    rho: float
    variant: str
    centers_inner: np.ndarray
    centers_outer: np.ndarray
    signs_inner: np.ndarray
    signs_outer: np.ndarray

    def __post_init__(self):
        for name in ("centers_inner", "centers_outer", "signs_inner", "signs_outer"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    def inner_pair_distances(self) -> np.ndarray:
        """|x¹ - x^j| for j = 2..k (all other same-ring distances by symmetry)."""
        j = np.arange(1, self.k)
        return 2.0 * self.r * np.sin(j * np.pi / self.k)

    def outer_pair_distances(self) -> np.ndarray:
        j = np.arange(1, self.k)
        return 2.0 * self.rho * np.sin(j * np.pi / self.k)

    def mixed_distances(self) -> np.ndarray:
        """|x¹ - y^j| for j = 1..k."""
        j = np.arange(1, self.k + 1)
        ang = (2 * j - 1) * np.pi / self.k
        return np.sqrt(self.r**2 + self.rho**2 - 2 * self.r * self.rho * np.cos(ang))

    def to_dict(self) -> dict:
        return {"k": self.k, "r": self.r, "rho": self.rho, "variant": self.variant}

    @classmethod
    def from_dict(cls, d: dict) -> "PeakConfig":
        return build_config(int(d["k"]), float(d["r"]), float(d["rho"]),
                            str(d["variant"]))

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "PeakConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def build_config(k: int, r: float, rho: float, variant: str) -> PeakConfig:
    """Generate the interleaved ring configuration for one variant.

    k = 1 is allowed for single-bump baselines; alternating letters
    require even k.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if r <= 0 or rho <= 0:
        raise ValueError("ring radii must be positive")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if "A" in variant and k % 2 != 0:
        raise ParityError(f"alternating pattern requires even k, got k={k}")
    j = np.arange(1, k + 1)
    ang_in = 2 * (j - 1) * np.pi / k
    ang_out = (2 * j - 1) * np.pi / k
    centers_inner = np.column_stack(
        [r * np.cos(ang_in), r * np.sin(ang_in), np.zeros(k)])
    centers_outer = np.column_stack(
        [rho * np.cos(ang_out), rho * np.sin(ang_out), np.zeros(k)])
    return PeakConfig(
        k=k, r=r, rho=rho, variant=variant,
        centers_inner=centers_inner, centers_outer=centers_outer,
        signs_inner=_signs(variant[0], k), signs_outer=_signs(variant[2], k),
    )


def s_k_window(k: float, m: float, C1: float, C2: float) -> tuple[float, float]:
    """Admissible radius interval [C₁·(k ln k)^(1/(1-m)), C₂·(k ln k)^(1/(1-m))]."""
    if m >= 1.0:
        raise DomainError(f"exponent 1/(1-m) blows up for m = {m}")
    if m <= 0.0:
        raise DomainError(f"decay exponent must be positive, got m = {m}")
    if k <= 1.0:
        raise DomainError(f"k·ln(k) must be positive, got k = {k}")
    if not 0 < C1 <= C2:
        raise ValueError(f"need 0 < C1 <= C2, got ({C1}, {C2})")
    scale = (k * math.log(k)) ** (1.0 / (1.0 - m))
    return (C1 * scale, C2 * scale)


# ----------------------------------------------------------------------
# symmetry verification
# ----------------------------------------------------------------------

def _rotation_character(signs: np.ndarray) -> float:
    """Sign picked up when the ring is rotated one step (j -> j+1)."""
    k = len(signs)
    sig = signs[1 % k] / signs[0]
    for j in range(k):
        if signs[(j + 1) % k] / signs[j] != sig:
            raise ValueError("sign pattern has no rotation character")
    return float(sig)


def _reflection_character(signs: np.ndarray, ring: str) -> float:
    """Sign picked up under x₂ -> -x₂ (angle θ -> -θ) for this ring."""
    k = len(signs)
    if ring == "inner":          # angle 2jπ/k -> -2jπ/k: j -> -j (0-based)
        perm = [(-j) % k for j in range(k)]
    else:                        # angle (2j+1)π/k -> -(2j+1)π/k: j -> k-1-j
        perm = [(k - 1 - j) % k for j in range(k)]
    sig = signs[perm[0]] / signs[0]
    for j in range(k):
        if signs[perm[j]] / signs[j] != sig:
            raise ValueError("sign pattern is not reflection covariant")
    return float(sig)


def _rotated_samples(field: Field3D, angle: float) -> np.ndarray:
    """Sample u(R_angle x) at every node.

    Quarter turns (and multiples) map the cell-centered lattice onto
    itself and are evaluated by exact index permutation; other angles use
    trilinear interpolation (bilinear per x₃ slice, since the rotation
    leaves x₃ alone).
    """
    v = field.values
    quarter = angle / (np.pi / 2)
    if abs(quarter - round(quarter)) < 1e-12:
        q = int(round(quarter)) % 4
        out = v
        # one quarter turn samples u(-y, x, z): node (i, j) pulls from
        # (n-1-j, i), exact on the cell-centered lattice
        for _ in range(q):
            out = np.transpose(out[::-1, :, :], (1, 0, 2))
        return out
    from scipy.ndimage import map_coordinates
    coords = field.axis_coords()
    X, Y = np.meshgrid(coords, coords, indexing="ij")
    c, s = np.cos(angle), np.sin(angle)
    xr = c * X - s * Y
    yr = s * X + c * Y
    # fractional indices on the cell-centered grid
    ix = (xr + field.box_half_width) / field.spacing - 0.5
    iy = (yr + field.box_half_width) / field.spacing - 0.5
    n = field.n_per_axis
    out = np.empty_like(v)
    plane = np.vstack([ix.ravel(), iy.ravel()])
    for iz in range(n):
        sl = map_coordinates(v[:, :, iz], plane, order=1, mode="constant", cval=0.0)
        out[:, :, iz] = sl.reshape(n, n)
    return out


def symmetry_deviation(field: Field3D, k: int, signs, ring: str = "inner") -> float:
    """Largest violation of the dihedral symmetry class over all nodes.

    Checks (a) rotation by 2π/k against the sign pattern's rotation
    character, (b) evenness in x₂ up to the pattern's reflection
    character, and (c) evenness in x₃; returns the max of the three
    sup-norm deviations.
    """
    signs = np.asarray(signs, dtype=float)
    if ring not in ("inner", "outer"):
        raise ValueError("ring must be 'inner' or 'outer'")
    v = field.values
    rot = _rotated_samples(field, 2 * np.pi / k)
    dev = float(np.max(np.abs(rot - _rotation_character(signs) * v)))
    refl = _reflection_character(signs, ring)
    dev = max(dev, float(np.max(np.abs(v[:, ::-1, :] - refl * v))))
    dev = max(dev, float(np.max(np.abs(v[:, :, ::-1] - v))))
    return dev
