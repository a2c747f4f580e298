"""Hypothesis checks and the interior maximizer of the two-ring landscape.

The existence result splits into three regimes, classified here from the
reduced constants:

* case 1:  Λ ≠ 1 (separable maximizers d₁ ≠ d₂, the certified ball around
  (d₁, d₂) stays off the diagonal),
* case 2:  Λ = 1 and 0 ≤ D₂ < (d₁/2)·min{f₁(d₁), f₂(d₂)},
* case 3:  Λ = 1, D₂ < 0 and D₀ + D₁ + 2D₂ > 0,

all under the common gates: parameter domain membership for (μ₁, μ₂, β₁₂),
μ₃ > 0, a₃ > 0, and the branch sign condition on the inner decay
coefficients.  The threshold constant β₀ bounding positive cross
couplings is non-constructive; verdicts only distinguish "vacuous
(couplings ≤ 0)" from "depends on the unknown threshold" via
``beta0_caveat``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .configurations import s_k_window
from .errors import DomainError
from .profiles import SystemParams, domain_membership
from .reduced import ReducedConstants, f_xy

__all__ = [
    "CaseVerdict",
    "MaximizerResult",
    "PeakRadii",
    "LandscapeScan",
    "theorem_conditions",
    "maximize_f",
    "peak_radii",
    "landscape_scan",
]

LAMBDA_UNIT_TOL = 1e-9
GRADIENT_TOL = 1e-8


@dataclass(frozen=True)
class CaseVerdict:
    theorem_case: str            # "case1", "case2", "case3" or "none"
    reasons: tuple[str, ...]
    beta0_caveat: bool


@dataclass(frozen=True)
class MaximizerResult:
    x_star: float
    y_star: float
    f_value: float
    interior_margin: float
    converged: bool
    gradient: tuple[float, float]
    k: int


@dataclass(frozen=True)
class PeakRadii:
    r_star: float
    rho_star: float
    scale: float                  # (k ln k)^(1/(1-m))
    window: tuple[float, float]
    in_window: bool
    suggested_C1: float
    suggested_C2: float


def theorem_conditions(params: SystemParams, consts: ReducedConstants) -> CaseVerdict:
    """Classify the parameter set against the three existence regimes."""
    reasons = []
    ok = True

    verdict = domain_membership(params.mu[0], params.mu[1], params.beta12)
    if verdict.member:
        reasons.append(f"(mu1, mu2, beta12) in existence domain, branch {verdict.branch}")
        if verdict.caveat:
            reasons.append(f"caveat: {verdict.caveat}")
    else:
        reasons.append("(mu1, mu2, beta12) outside the existence domain")
        ok = False

    if params.mu[2] > 0:
        reasons.append("mu3 > 0 satisfied")
    else:
        reasons.append(f"mu3 > 0 violated (mu3 = {params.mu[2]})")
        ok = False

    a3 = params.potentials[2].a
    if a3 > 0:
        reasons.append("a3 > 0 satisfied")
    else:
        reasons.append("a3 > 0 violated")
        ok = False

    sign_name = {"m1<m2": "a1 > 0", "m2<m1": "a2 > 0",
                 "m1=m2": "a1*alpha^2 + a2*gamma^2 > 0"}[consts.branch]
    p1, p2 = params.potentials[0], params.potentials[1]
    a_comb = {"m1<m2": p1.a, "m2<m1": p2.a,
              "m1=m2": p1.a * consts.alpha**2 + p2.a * consts.gamma**2}[consts.branch]
    if a_comb > 0:
        reasons.append(f"{sign_name} satisfied (branch {consts.branch})")
    else:
        reasons.append(f"{sign_name} violated (branch {consts.branch})")
        ok = False

    caveat = params.beta13 > 0 or params.beta23 > 0
    if caveat:
        reasons.append("positive cross coupling: smallness threshold is "
                       "non-constructive, existence conditional")
    else:
        reasons.append("cross couplings nonpositive: smallness constraint vacuous")

    if not ok:
        return CaseVerdict("none", tuple(reasons), caveat)

    lam_gap = abs(consts.Lambda - 1.0) / max(1.0, abs(consts.Lambda))
    if lam_gap > LAMBDA_UNIT_TOL:
        reasons.append(f"Lambda = {consts.Lambda:.6g} != 1 (case 1)")
        if lam_gap < 1e-6:
            reasons.append("Lambda within 1e-6 of 1: near the case-1/case-2 "
                           "threshold, neighboring case 2 may also apply")
        return CaseVerdict("case1", tuple(reasons), caveat)

    reasons.append("Lambda = 1 within tolerance (d1 = d2)")
    D0, D1, D2 = consts.D0, consts.D1, consts.D2
    upper = 0.5 * consts.d1 * min(consts.f1_at_d1, consts.f2_at_d2)
    if D2 >= 0:
        if D2 < upper:
            reasons.append(f"0 <= D2 = {D2:.6g} < {upper:.6g} (case 2)")
            return CaseVerdict("case2", tuple(reasons), caveat)
        reasons.append(f"D2 = {D2:.6g} >= upper bound {upper:.6g}")
        return CaseVerdict("none", tuple(reasons), caveat)
    if D0 + D1 + 2 * D2 > 0:
        reasons.append(f"D2 = {D2:.6g} < 0 with D0+D1+2*D2 = "
                       f"{D0 + D1 + 2 * D2:.6g} > 0 (case 3)")
        return CaseVerdict("case3", tuple(reasons), caveat)
    reasons.append(f"D0+D1+2*D2 = {D0 + D1 + 2 * D2:.6g} <= 0")
    return CaseVerdict("none", tuple(reasons), caveat)


# ----------------------------------------------------------------------
# maximization
# ----------------------------------------------------------------------

def _fd_gradient(fun, x, y, step):
    gx = (fun(x + step, y) - fun(x - step, y)) / (2 * step)
    gy = (fun(x, y + step) - fun(x, y - step)) / (2 * step)
    return gx, gy


def _fd_newton_polish(fun, x, y, region, iterations=6):
    """Few damped Newton steps on finite differences to sharpen the max."""
    (x_lo, x_hi), (y_lo, y_hi) = region
    for _ in range(iterations):
        step = 1e-5 * max(abs(x), abs(y), 1.0)
        gx, gy = _fd_gradient(fun, x, y, step)
        fxx = (fun(x + step, y) - 2 * fun(x, y) + fun(x - step, y)) / step**2
        fyy = (fun(x, y + step) - 2 * fun(x, y) + fun(x, y - step)) / step**2
        fxy = (fun(x + step, y + step) - fun(x + step, y - step)
               - fun(x - step, y + step) + fun(x - step, y - step)) / (4 * step**2)
        det = fxx * fyy - fxy * fxy
        if det == 0 or not np.isfinite(det):
            break
        dx = -(fyy * gx - fxy * gy) / det
        dy = -(fxx * gy - fxy * gx) / det
        nx = min(max(x + dx, x_lo), x_hi)
        ny = min(max(y + dy, y_lo), y_hi)
        if abs(nx - x) < 1e-14 * max(1.0, abs(x)) and \
           abs(ny - y) < 1e-14 * max(1.0, abs(y)):
            x, y = nx, ny
            break
        x, y = nx, ny
    return x, y


def maximize_f(k: int, consts: ReducedConstants,
               search_region=None) -> MaximizerResult:
    """Multi-start simplex maximization of f with a Newton polish.

    Five starts: (d₁, d₂) and its four ±20% axis perturbations (falling
    back to the region center when the d's are undefined).  The winner is
    polished by finite-difference Newton steps and certified stationary
    (central-difference gradient below 1e-8 per coordinate) and interior.
    """
    if search_region is None:
        if not (np.isfinite(consts.d1) and np.isfinite(consts.d2)):
            raise DomainError("separable maximizers undefined; pass an "
                              "explicit search region")
        lo = 0.1 * min(consts.d1, consts.d2)
        hi = 10.0 * max(consts.d1, consts.d2)
        search_region = ((lo, hi), (lo, hi))
    (x_lo, x_hi), (y_lo, y_hi) = search_region
    if not (0 < x_lo < x_hi and 0 < y_lo < y_hi):
        raise DomainError(f"degenerate search region {search_region}")

    def fun(x, y):
        if not (x_lo <= x <= x_hi and y_lo <= y <= y_hi):
            return -np.inf
        return f_xy(x, y, k, consts)

    if np.isfinite(consts.d1) and np.isfinite(consts.d2):
        cx = min(max(consts.d1, x_lo), x_hi)
        cy = min(max(consts.d2, y_lo), y_hi)
    else:
        cx = math.sqrt(x_lo * x_hi)
        cy = math.sqrt(y_lo * y_hi)
    starts = [(cx, cy), (1.2 * cx, cy), (0.8 * cx, cy), (cx, 1.2 * cy), (cx, 0.8 * cy)]

    best = None
    for sx, sy in starts:
        res = minimize(lambda p: -fun(p[0], p[1]), x0=[sx, sy],
                       method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14,
                                "maxiter": 4000, "maxfev": 8000})
        if best is None or -res.fun > best[2]:
            best = (res.x[0], res.x[1], -res.fun)

    x, y = _fd_newton_polish(fun, best[0], best[1],
                             ((x_lo, x_hi), (y_lo, y_hi)))
    if fun(x, y) < best[2]:
        x, y = best[0], best[1]
    fv = fun(x, y)
    step = 1e-5 * max(abs(x), abs(y), 1.0)
    gx, gy = _fd_gradient(fun, x, y, step)
    margin = min(x - x_lo, x_hi - x, y - y_lo, y_hi - y)
    converged = bool(max(abs(gx), abs(gy)) < GRADIENT_TOL and margin > 0)
    return MaximizerResult(x_star=float(x), y_star=float(y), f_value=float(fv),
                           interior_margin=float(margin), converged=converged,
                           gradient=(float(gx), float(gy)), k=k)


def peak_radii(k: int, consts: ReducedConstants, result: MaximizerResult,
               C1: float | None = None, C2: float | None = None) -> PeakRadii:
    """Physical ring radii from the rescaled maximizer, plus a window check.

    Default window constants bracket the separable maximizers by a factor
    of two; the suggested pair is the tightest one (10% slack) that
    contains the result.
    """
    if not result.converged:
        raise ValueError("peak radii need a converged maximizer")
    m = consts.m
    scale = (k * math.log(k)) ** (1.0 / (1.0 - m))
    r_star = result.x_star * scale
    rho_star = result.y_star * scale
    if C1 is None:
        C1 = 0.5 * min(consts.d1, consts.d2)
    if C2 is None:
        C2 = 2.0 * max(consts.d1, consts.d2)
    window = s_k_window(k, float(m), float(C1), float(C2))
    in_window = bool(window[0] <= r_star <= window[1]
                     and window[0] <= rho_star <= window[1])
    return PeakRadii(
        r_star=float(r_star), rho_star=float(rho_star), scale=scale,
        window=window, in_window=in_window,
        suggested_C1=0.9 * min(result.x_star, result.y_star),
        suggested_C2=1.1 * max(result.x_star, result.y_star),
    )


@dataclass(frozen=True)
class LandscapeScan:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray           # values[i, j] = f(xs[i], ys[j])
    k: int

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.xs[i]), float(self.ys[j])

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("x,y,f\n")
            for i, x in enumerate(self.xs):
                for j, y in enumerate(self.ys):
                    fh.write(f"{float(x)!r},{float(y)!r},{float(self.values[i, j])!r}\n")


def landscape_scan(k: int, consts: ReducedConstants, x_range, y_range,
                   resolution: int = 200) -> LandscapeScan:
    """Dense evaluation of f over a rectangle in the open positive quadrant."""
    x_lo, x_hi = x_range
    y_lo, y_hi = y_range
    if not (0 < x_lo < x_hi and 0 < y_lo < y_hi):
        raise DomainError("scan rectangle must lie in the open positive quadrant")
    xs = np.linspace(x_lo, x_hi, resolution)
    ys = np.linspace(y_lo, y_hi, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    vals = f_xy(X, Y, k, consts)
    return LandscapeScan(xs=xs, ys=ys, values=vals, k=k)
