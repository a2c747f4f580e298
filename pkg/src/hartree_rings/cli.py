"""Command line entry point wiring configuration, caching, and reports.

Every subcommand reads a JSON run configuration (see configs/ for shipped
examples), validates it before any heavy computation, and writes
deterministic JSON/CSV outputs; report-style commands also render figures
next to the delimited output unless --no-figures is given.
"""

from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import figures
from .configurations import build_config, s_k_window
from .energy import (assemble_ansatz, full_energy, pairwise_energy_parts,
                     residual_scaling_study)
from .errors import ChecksumError, HartreeRingsError
from .landscape import landscape_scan, maximize_f, peak_radii, theorem_conditions
from .potential import save_field
from .profiles import SystemParams
from .radial import (GroundStateStats, RadialGrid, SolverOptions, decay_report,
                     ground_state_stats, load_profile, save_profile,
                     solve_ground_state)
from .reduced import PROVENANCE, compute_constants
from .ring_kernel import g_sum, ring_bounds

ENVELOPE = {"k": 8, "box_half_width": 40.0, "n_per_axis": 192}


class RunConfig:
    """Parsed run configuration with CLI overrides applied."""

    def __init__(self, data: dict):
        self.params = SystemParams.from_dict(data["params"])
        solver = data.get("solver", {})
        self.grid = RadialGrid(r_max=float(solver.get("r_max", 30.0)),
                               n_points=int(solver.get("n_points", 3000)))
        self.solver_opts = SolverOptions(
            tolerance=float(solver.get("tolerance", 1e-10)),
            max_iterations=int(solver.get("max_iterations", 500)))
        box = data.get("grid", {})
        self.box_half_width = float(box.get("box_half_width", 35.0))
        self.n_per_axis = int(box.get("n_per_axis", 128))
        self.k_list = [int(k) for k in data.get("k_list", [6])]
        self.variant = str(data.get("variant", "PPP"))
        window = data.get("window", {})
        self.C1 = window.get("C1")
        self.C2 = window.get("C2")
        construct = data.get("construct", {})
        self.construct_r = construct.get("r")
        self.construct_rho = construct.get("rho")
        self.raw = data

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        with open(path) as fh:
            return cls(json.load(fh))


def _check_envelope(cfg: RunConfig, allow_large: bool, k_values=None):
    ks = k_values if k_values is not None else cfg.k_list
    too_big = []
    if ks and max(ks) > ENVELOPE["k"]:
        too_big.append(f"k = {max(ks)} > {ENVELOPE['k']}")
    if cfg.box_half_width > ENVELOPE["box_half_width"]:
        too_big.append(f"box_half_width = {cfg.box_half_width} > "
                       f"{ENVELOPE['box_half_width']}")
    if cfg.n_per_axis > ENVELOPE["n_per_axis"]:
        too_big.append(f"n_per_axis = {cfg.n_per_axis} > {ENVELOPE['n_per_axis']}")
    if too_big and not allow_large:
        raise click.ClickException(
            "request exceeds the desk-scale envelope (" + "; ".join(too_big)
            + "); pass --allow-large to proceed")


def _write_json(doc: dict, path: Path) -> None:
    doc = dict(doc)
    stamp = doc.pop("generated_at", None)
    body = json.dumps(doc, indent=2, sort_keys=True, allow_nan=True)
    if stamp is not None:
        # keep the timestamp in a separate trailing field so the rest of
        # the document is byte-identical across reruns
        body = body[:-2] + f',\n  "generated_at": "{stamp}"\n}}'
    path.write_text(body + "\n")


def _ground_state(cfg: RunConfig, cache_dir: Path):
    cache_dir.mkdir(parents=True, exist_ok=True)
    cache = cache_dir / f"ground_state_rmax{cfg.grid.r_max:g}_n{cfg.grid.n_points}.csv"
    if cache.exists():
        try:
            return load_profile(cache, expected_grid=cfg.grid), cache
        except ChecksumError as exc:
            click.echo(f"warning: cache rejected ({exc}); re-solving", err=True)
    profile = solve_ground_state(cfg.grid, cfg.solver_opts)
    save_profile(profile, cache)
    return profile, cache


def _stats_doc(stats: GroundStateStats, report) -> dict:
    return {
        "K_w": stats.K_w, "M_w": stats.M_w, "P_w": stats.P_w, "E_w": stats.E_w,
        "nehari_residual": stats.nehari_residual,
        "pohozaev_residual": stats.pohozaev_residual,
        "tail_mass_fraction": stats.tail_mass_fraction,
        "mass_to_kinetic_ratio": stats.M_w / stats.K_w,
        "nonlocal_to_kinetic_ratio": stats.P_w / stats.K_w,
        "decay": {
            "window": list(report.window),
            "plateau_mean": report.plateau_mean,
            "plateau_variation": report.plateau_variation,
            "corrected_mean": report.corrected_mean,
            "corrected_variation": report.corrected_variation,
            "mass_exponent": report.mass_exponent,
        },
        "tolerances": {"identity_suite": 1e-4},
    }


@click.group()
def main():
    """Multi-peak ring constructions for the three-component Hartree system."""


opt_config = click.option("--config", "-c", "config_path", required=True,
                          type=click.Path(exists=True), help="run configuration JSON")
opt_out = click.option("--out", "-o", "out_dir", default="out",
                       type=click.Path(), help="output directory")
opt_cache = click.option("--cache", "cache_dir", default="cache",
                         type=click.Path(), help="profile cache directory")
opt_large = click.option("--allow-large", is_flag=True,
                         help="lift the desk-scale envelope guard")
opt_figures = click.option("--figures/--no-figures", "render_figures",
                           default=True, help="render PNG figures")


@main.command("ground-state")
@opt_config
@opt_out
@opt_cache
@opt_figures
def cmd_ground_state(config_path, out_dir, cache_dir, render_figures):
    """Solve (or load) the radial ground state; write cache + stats JSON."""
    cfg = RunConfig.load(config_path)
    cfg.params.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile, cache = _ground_state(cfg, Path(cache_dir))
    stats = ground_state_stats(profile)
    window = (min(10.0, 0.5 * cfg.grid.r_max), min(15.0, 0.7 * cfg.grid.r_max))
    report = decay_report(profile, window=window)
    doc = _stats_doc(stats, report)
    doc["cache_file"] = str(cache)
    doc["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    if stats.tail_mass_fraction > 1e-6:
        doc["status"] = "accuracy-error: tail mass beyond r_max exceeds 1e-6"
        _write_json(doc, out / "ground_state.json")
        click.echo(f"tail mass fraction {stats.tail_mass_fraction:.2e} too "
                   "large for this r_max", err=True)
        sys.exit(2)
    suite_ok = max(stats.nehari_residual, stats.pohozaev_residual) < 1e-4
    doc["status"] = "ok" if suite_ok else "identity-suite-failure"
    _write_json(doc, out / "ground_state.json")
    if render_figures:
        figures.ground_state_figure(profile, stats, report,
                                    out / "ground_state.png")
    click.echo(f"ground state written to {out / 'ground_state.json'}")
    if not suite_ok:
        click.echo("identity suite failed", err=True)
        sys.exit(2)


@main.command("constants")
@opt_config
@opt_out
@opt_cache
def cmd_constants(config_path, out_dir, cache_dir):
    """Reduced constants as JSON with per-field provenance notes."""
    cfg = RunConfig.load(config_path)
    cfg.params.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile, _ = _ground_state(cfg, Path(cache_dir))
    consts = compute_constants(cfg.params, ground_state_stats(profile))
    doc = {"constants": consts.to_dict(),
           "provenance": {k: PROVENANCE.get(k, "") for k in consts.to_dict()
                          if k in PROVENANCE},
           "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    _write_json(doc, out / "constants.json")
    click.echo(json.dumps(consts.to_dict(), indent=2, sort_keys=True))


@main.command("ring-kernel")
@click.option("--x", "x", default=1.0, show_default=True)
@click.option("--y", "y", default=1.0, show_default=True)
@click.option("--k-exponents", default="4:15", show_default=True,
              help="powers of two to sweep, as lo:hi")
@opt_out
@opt_figures
def cmd_ring_kernel(x, y, k_exponents, out_dir, render_figures):
    """CSV of the ring kernel and its bounds over a k sweep."""
    lo, hi = (int(t) for t in k_exponents.split(":"))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ks, ratios = [], []
    with open(out / "ring_kernel.csv", "w") as fh:
        fh.write("k,x,y,g,lower,upper_distance,upper_log,ratio_to_nominal\n")
        for e in range(lo, hi):
            k = 2 ** e
            rep = ring_bounds(x, y, k)
            ratio = rep.value * math.pi * min(x, y) / (2 * k * math.log(k))
            ks.append(k)
            ratios.append(ratio)
            fh.write(f"{k},{x!r},{y!r},{rep.value!r},{rep.lower_bound!r},"
                     f"{rep.upper_bound_distance!r},{rep.upper_bound_log!r},"
                     f"{ratio!r}\n")
    if render_figures and x == y:
        figures.ring_kernel_figure(ks, ratios, out / "ring_kernel.png")
    click.echo(f"wrote {out / 'ring_kernel.csv'}")


@main.command("landscape")
@opt_config
@opt_out
@opt_cache
@click.option("--k", "k_override", type=int, default=None, help="single k override")
@click.option("--resolution", default=200, show_default=True)
@click.option("--force-case", is_flag=True,
              help="scan even when no theorem case applies")
@opt_figures
def cmd_landscape(config_path, out_dir, cache_dir, k_override, resolution,
                  force_case, render_figures):
    """Landscape scan + verdict + maximizer for each configured k."""
    cfg = RunConfig.load(config_path)
    cfg.params.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile, _ = _ground_state(cfg, Path(cache_dir))
    consts = compute_constants(cfg.params, ground_state_stats(profile))
    verdict = theorem_conditions(cfg.params, consts)
    ks = [k_override] if k_override else cfg.k_list
    doc = {"verdict": {"theorem_case": verdict.theorem_case,
                       "reasons": list(verdict.reasons),
                       "beta0_caveat": verdict.beta0_caveat},
           "constants": consts.to_dict(), "per_k": {},
           "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    if verdict.theorem_case == "none" and not force_case:
        _write_json(doc, out / "landscape.json")
        click.echo("no theorem case applies; rerun with --force-case to scan anyway")
        return
    for k in ks:
        result = maximize_f(k, consts)
        radii = peak_radii(k, consts, result, C1=cfg.C1, C2=cfg.C2)
        lo = 0.2 * min(result.x_star, result.y_star)
        hi = 3.0 * max(result.x_star, result.y_star)
        scan = landscape_scan(k, consts, (lo, hi), (lo, hi), resolution)
        scan.write_csv(out / f"landscape_k{k}.csv")
        if render_figures:
            figures.landscape_figure(scan, result, out / f"landscape_k{k}.png")
        doc["per_k"][str(k)] = {
            "maximizer": {"x": result.x_star, "y": result.y_star,
                          "f": result.f_value, "converged": result.converged,
                          "gradient": list(result.gradient),
                          "interior_margin": result.interior_margin},
            "peak_radii": {"r": radii.r_star, "rho": radii.rho_star,
                           "scale": radii.scale, "window": list(radii.window),
                           "in_window": radii.in_window,
                           "suggested_C1": radii.suggested_C1,
                           "suggested_C2": radii.suggested_C2},
        }
    _write_json(doc, out / "landscape.json")
    click.echo(f"wrote {out / 'landscape.json'}")


@main.command("verify-expansion")
@opt_config
@opt_out
@opt_cache
@opt_large
@opt_figures
def cmd_verify_expansion(config_path, out_dir, cache_dir, allow_large,
                         render_figures):
    """Pairwise expansion vs 3D grid energy for each configured k."""
    cfg = RunConfig.load(config_path)
    cfg.params.validate()
    _check_envelope(cfg, allow_large)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile, _ = _ground_state(cfg, Path(cache_dir))
    stats = ground_state_stats(profile)
    r = cfg.construct_r or 25.0
    rho = cfg.construct_rho or r
    rows = []
    for k in cfg.k_list:
        peaks = build_config(k, r, rho, cfg.variant)
        fields = assemble_ansatz(peaks, cfg.params, profile,
                                 box_half_width=cfg.box_half_width,
                                 n_per_axis=cfg.n_per_axis)
        grid_bd = full_energy(fields)
        single = build_config(1, r, rho, "PPP")
        f_single = assemble_ansatz(single, cfg.params, profile,
                                   box_half_width=cfg.box_half_width,
                                   n_per_axis=cfg.n_per_axis)
        grid_single = full_energy(f_single).total
        pair = pairwise_energy_parts(peaks, cfg.params, profile, stats=stats)
        # the single-bump subtraction removes the shared per-peak energy
        # (including the potential tails, which are radius-equal for ring
        # and isolated bumps), leaving the pairwise tail interactions
        grid_int = grid_bd.total - k * grid_single
        pair_int = pair.interaction
        rows.append({
            "k": k, "r": r, "rho": rho,
            "grid_total": grid_bd.total, "pairwise_total": pair.total,
            "grid_single": grid_single,
            "grid_interaction": grid_int, "pairwise_interaction": pair_int,
            "interaction_gap_rel": (abs(grid_int - pair_int) / abs(pair_int)
                                    if pair_int else 0.0),
        })
    with open(out / "expansion.csv", "w") as fh:
        cols = list(rows[0].keys())
        fh.write(",".join(cols) + "\n")
        for row in rows:
            fh.write(",".join(repr(row[c]) for c in cols) + "\n")
    doc = {"rows": rows, "tolerances": {"interaction_rel": 0.05},
           "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    _write_json(doc, out / "expansion.json")
    if render_figures:
        figures.expansion_figure(
            [f"k={row['k']}" for row in rows],
            [row["grid_interaction"] for row in rows],
            [row["pairwise_interaction"] for row in rows],
            out / "expansion.png")
    click.echo(f"wrote {out / 'expansion.json'}")


@main.command("residual-scaling")
@opt_config
@opt_out
@opt_cache
@opt_large
@click.option("--coefficients", default="0.65,1.0,1.3", show_default=True,
              help="window-rule multipliers for the radius sweep")
@opt_figures
def cmd_residual_scaling(config_path, out_dir, cache_dir, allow_large,
                         coefficients, render_figures):
    """Per-peak PDE residual table over k and window-rule radii."""
    cfg = RunConfig.load(config_path)
    cfg.params.validate()
    _check_envelope(cfg, allow_large)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile, _ = _ground_state(cfg, Path(cache_dir))
    coeffs = [float(c) for c in coefficients.split(",")]
    study = residual_scaling_study(cfg.k_list, coeffs, cfg.params, profile,
                                   n_per_axis=cfg.n_per_axis,
                                   variant=cfg.variant)
    if study.box_half_width > ENVELOPE["box_half_width"] and not allow_large:
        raise click.ClickException(
            f"window radii need box_half_width {study.box_half_width:.0f}; "
            "pass --allow-large")
    with open(out / "residual_scaling.csv", "w") as fh:
        fh.write("k,radius,residual,per_peak,under_resolved\n")
        for row in study.rows:
            fh.write(f"{row.k},{row.radius!r},{row.residual!r},"
                     f"{row.per_peak!r},{row.under_resolved}\n")
    doc = {"rows": [row.__dict__ for row in study.rows],
           "fitted_exponent": study.fitted_exponent,
           "spacing": study.spacing,
           "box_half_width": study.box_half_width,
           "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
    _write_json(doc, out / "residual_scaling.json")
    if render_figures:
        figures.residual_scaling_figure(study, out / "residual_scaling.png")
    click.echo(f"wrote {out / 'residual_scaling.json'}")


@main.command("construct")
@opt_config
@opt_out
@opt_cache
@opt_large
@click.option("--r", "r_override", type=float, default=None)
@click.option("--rho", "rho_override", type=float, default=None)
def cmd_construct(config_path, out_dir, cache_dir, allow_large, r_override,
                  rho_override):
    """Assemble the ansatz fields and dump them as binary + JSON sidecars."""
    cfg = RunConfig.load(config_path)
    cfg.params.validate()
    _check_envelope(cfg, allow_large)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile, _ = _ground_state(cfg, Path(cache_dir))
    r = r_override or cfg.construct_r or 25.0
    rho = rho_override or cfg.construct_rho or r
    for k in cfg.k_list:
        peaks = build_config(k, r, rho, cfg.variant)
        fields = assemble_ansatz(peaks, cfg.params, profile,
                                 box_half_width=cfg.box_half_width,
                                 n_per_axis=cfg.n_per_axis)
        for name, fld in (("u1", fields.u1), ("u2", fields.u2), ("u3", fields.u3)):
            save_field(fld, out / f"{name}_k{k}_{cfg.variant}.f64")
        peaks.to_json(out / f"config_k{k}_{cfg.variant}.json")
    click.echo(f"fields written under {out}")


@main.command("report")
@opt_config
@opt_out
@opt_cache
@opt_large
@click.option("--k", "k_csv", default=None, help="comma list override of k values")
@click.option("--variant", "variant_override", default=None,
              type=click.Choice(["PPP", "AAA", "PPA", "AAP"]))
@click.option("--with-expansion", is_flag=True,
              help="include the (slow) grid-vs-pairwise expansion check")
@opt_figures
def cmd_report(config_path, out_dir, cache_dir, allow_large, k_csv,
               variant_override, with_expansion, render_figures):
    """Composite JSON report: constants, verdict, maximizer, peak radii."""
    cfg = RunConfig.load(config_path)
    cfg.params.validate()
    if k_csv:
        cfg.k_list = [int(t) for t in k_csv.split(",") if t.strip()]
    if variant_override:
        cfg.variant = variant_override
    if not cfg.k_list:
        click.echo("empty k list: nothing to do (set k_list in the config "
                   "or pass --k)", err=True)
        return
    _check_envelope(cfg, allow_large)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    profile, cache = _ground_state(cfg, Path(cache_dir))
    stats = ground_state_stats(profile)
    consts = compute_constants(cfg.params, stats)
    verdict = theorem_conditions(cfg.params, consts)

    for k in cfg.k_list:
        doc = {
            "k": k,
            "variant": cfg.variant,
            "constants": consts.to_dict(),
            "ground_state": {"M_w": stats.M_w, "K_w": stats.K_w, "P_w": stats.P_w,
                             "nehari_residual": stats.nehari_residual,
                             "pohozaev_residual": stats.pohozaev_residual,
                             "tolerance": 1e-4},
            "verdict": {"theorem_case": verdict.theorem_case,
                        "reasons": list(verdict.reasons),
                        "beta0_caveat": verdict.beta0_caveat},
            "status": {},
            "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S"),
        }
        try:
            result = maximize_f(k, consts)
            radii = peak_radii(k, consts, result, C1=cfg.C1, C2=cfg.C2)
            doc["maximizer"] = {"x": result.x_star, "y": result.y_star,
                                "f": result.f_value, "converged": result.converged,
                                "gradient": list(result.gradient),
                                "gradient_tolerance": 1e-8}
            doc["peak_radii"] = {"r": radii.r_star, "rho": radii.rho_star,
                                 "scale": radii.scale, "window": list(radii.window),
                                 "in_window": radii.in_window,
                                 "suggested_C1": radii.suggested_C1,
                                 "suggested_C2": radii.suggested_C2}
            doc["status"]["landscape"] = "ok"
            if render_figures:
                lo = 0.2 * min(result.x_star, result.y_star)
                hi = 3.0 * max(result.x_star, result.y_star)
                scan = landscape_scan(k, consts, (lo, hi), (lo, hi), 160)
                figures.landscape_figure(scan, result,
                                         out / f"report_landscape_k{k}.png")
        except HartreeRingsError as exc:
            doc["status"]["landscape"] = f"failed: {exc}"
        if with_expansion:
            try:
                r = cfg.construct_r or 25.0
                rho = cfg.construct_rho or r
                peaks = build_config(k, r, rho, cfg.variant)
                fields = assemble_ansatz(peaks, cfg.params, profile,
                                         box_half_width=cfg.box_half_width,
                                         n_per_axis=cfg.n_per_axis)
                pair = pairwise_energy_parts(peaks, cfg.params, profile,
                                             stats=stats)
                doc["expansion"] = {"grid_total": full_energy(fields).total,
                                    "pairwise_total": pair.total,
                                    "interaction": pair.interaction,
                                    "tolerance_interaction_rel": 0.05}
                doc["status"]["expansion"] = "ok"
            except HartreeRingsError as exc:
                doc["status"]["expansion"] = f"failed: {exc}"
        _write_json(doc, out / f"report_k{k}_{cfg.variant}.json")
    click.echo(f"reports written under {out}")


if __name__ == "__main__":
    main()
