"""Command line entry point: ``dislocation-lab <subcommand> --config FILE``.

Each subcommand writes ``<subcommand>_<confighash>.{json,csv,svg}`` into the
output directory and prints a short summary.  Exit status: 0 on success, 1
on usage or validation errors, 2 when a numerical invariant fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import SweepConfig, run_sweep, solve_delta
from .bloch import band_structure, default_xi_grid, essential_gap, two_band_model
from .config import RunConfig, load_config
from .dirac_point import dirac_point, pauli_identity_residuals
from .effective import (
    DomainWall, EffectiveDiracOperator, dirac_spectrum_evans, dirac_spectrum_grid, grid_tolerance,
)
from .errors import InvariantError, ValidationError
from .plotting import emit_svg_scatter
from .tables import ResultTable, emit_table

SUBCOMMANDS = ("bands", "dirac", "effective", "dislocated", "sweep")


@dataclass
class Outputs:
    """What a subcommand produced: summary document, table, figure and printable lines."""

    summary: dict
    table: ResultTable
    figure: dict | None = None
    lines: list[str] = field(default_factory=list)
    extra_tables: dict[str, ResultTable] = field(default_factory=dict)


def _cpx(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def model(cfg: RunConfig):
    V, W = cfg.potentials()
    dp = dirac_point(V, W, cfg.numerics.K, cfg.model.dirac_index)
    width = cfg.model.wall_width
    if cfg.model.wall_units == "natural":
        width *= abs(dp.nu_star) / abs(dp.theta_star)
    return V, W, dp, DomainWall(cfg.model.wall, width)


def cmd_bands(cfg: RunConfig, tag: str) -> Outputs:
    V, W, dp, _ = model(cfg)
    n = cfg.numerics
    delta = cfg.run.delta
    xi = default_xi_grid(n.xi_points)
    bands = band_structure(V, W, delta, xi, n.K, max(n.n_bands, dp.j_star + 1), cfg.run.threads)
    gap = essential_gap(bands, dp.j_star) if delta > 0 else None
    lo, hi = two_band_model(dp.nu_star, dp.theta_star, delta, xi, dp.E_star)
    near = np.abs(xi - np.pi) <= 0.2
    summary = {"delta": delta, "E_star": dp.E_star, "j_star": dp.j_star,
               "gap": None if gap is None else [gap.lower_edge, gap.upper_edge],
               "gap_width": None if gap is None else gap.width}
    table = ResultTable(bands.header(), bands.rows().tolist(), tag)
    series = {f"band{j}": (xi, bands.band(j)) for j in range(1, bands.n_bands + 1)}
    lines = {"two_band_lower": (xi[near], lo[near]), "two_band_upper": (xi[near], hi[near])}
    fig = {"points": [], "lines": lines, "series": series, "xlabel": "xi", "ylabel": "E"}
    out = [f"bands: {bands.n_bands} curves on {len(xi)} quasimomenta at delta={delta:g}"]
    if gap is not None:
        out.append(f"gap above band {gap.j_star}: [{gap.lower_edge:.10f}, {gap.upper_edge:.10f}]"
                   f" width {gap.width:.6g}")
    return Outputs(summary, table, fig, out)


def cmd_dirac(cfg: RunConfig, tag: str) -> Outputs:
    V, W, dp, _ = model(cfg)
    rD, rW = pauli_identity_residuals(dp, W)
    summary = {"E_star": dp.E_star, "j_star": dp.j_star, "nu_star": dp.nu_star,
               "theta_star": _cpx(dp.theta_star), "theta_star_abs": abs(dp.theta_star),
               "pauli_residuals": [rD, rW], "K": dp.K}
    table = ResultTable(["m", "phi_plus"], [[int(m), complex(d)] for m, d in zip(dp.harmonics, dp.phi_plus)], tag)
    x = np.linspace(0, 2, 401)
    phi = dp.evaluate_plus(x)
    fig = {"points": [], "lines": {}, "xlabel": "x", "ylabel": "phi_plus",
           "series": {"re": (x, phi.real), "im": (x, phi.imag), "abs": (x, np.abs(phi))}}
    out = [f"E_star = {dp.E_star:.10f}  (band {dp.j_star})",
           f"nu_star = {dp.nu_star:.10f}",
           f"theta_star = {dp.theta_star.real:.10f} {dp.theta_star.imag:+.10f}i  |theta_star| = {abs(dp.theta_star):.10f}",
           f"Pauli residuals: {rD:.3g}, {rW:.3g}"]
    return Outputs(summary, table, fig, out)


def cmd_effective(cfg: RunConfig, tag: str) -> Outputs:
    V, W, dp, wall = model(cfg)
    n = cfg.numerics
    op = EffectiveDiracOperator.from_dirac_point(dp, wall)
    evans = dirac_spectrum_evans(op, None, n.evans_steps, n.scan_points)
    grid = dirac_spectrum_grid(op, n.Y, n.grid_n)
    if len(evans.thetas) != len(grid.thetas):
        raise InvariantError(f"Evans finds {len(evans.thetas)} eigenvalues, grid oracle {len(grid.thetas)}")
    disc = float(np.max(np.abs(evans.thetas - grid.thetas))) if len(grid.thetas) else 0.0
    summary = {"theta_star_abs": op.gap, "nu_star": op.nu_star,
               "wall": {"shape": wall.shape, "width": wall.width},
               "thetas_evans": evans.thetas.tolist(), "thetas_grid": grid.thetas.tolist(),
               "max_discrepancy": disc, "grid_tolerance": grid_tolerance(grid, op)}
    N = grid.N
    rows = [[j, float(te), float(tg)] for j, te, tg in zip(range(-N, N + 1), evans.thetas, grid.thetas)]
    table = ResultTable(["j", "theta_evans", "theta_grid"], rows, tag)
    series = {f"alpha_{j}": (grid.y, np.linalg.norm(grid.eigenvector(j), axis=1) ** 2) for j in range(-N, N + 1)}
    fig = {"points": [], "lines": {}, "series": series, "xlabel": "y", "ylabel": "|alpha|^2"}
    out = [f"{len(grid.thetas)} eigenvalues in (-{op.gap:.6g}, {op.gap:.6g})",
           "thetas: " + " ".join(f"{t:.8f}" for t in grid.thetas),
           f"max |Evans - grid| = {disc:.3g}"]
    return Outputs(summary, table, fig, out)


def _sweep_config(cfg: RunConfig, V, W, wall, deltas) -> SweepConfig:
    n = cfg.numerics
    return SweepConfig(list(deltas), V, W, wall, h=n.h, richardson=n.richardson,
                       theta_sharp=cfg.sweep.theta_sharp, margin=n.margin,
                       quasimodes=cfg.sweep.quasimodes, grid_n=n.grid_n, Y=n.Y,
                       seed=cfg.run.seed, threads=cfg.run.threads)


def cmd_dislocated(cfg: RunConfig, tag: str) -> Outputs:
    V, W, dp, wall = model(cfg)
    delta = cfg.run.delta
    if delta <= 0:
        raise ValidationError("dislocated needs run.delta > 0")
    scfg = _sweep_config(cfg, V, W, wall, [delta])
    scfg.quasimodes = False
    op = EffectiveDiracOperator.from_dirac_point(dp, wall)
    spec = dirac_spectrum_grid(op, scfg.Y, scfg.grid_n)
    r = solve_delta(scfg, dp, spec, op, delta, cfg.numerics.X, keep_vectors=cfg.output.eigenvectors)
    summary = {"delta": delta, "gap": list(r.gap), "eigenvalues": r.energies.tolist(),
               "eigenvalues_fd": r.energies_raw.tolist(), "E_star_fd": r.E_star_h,
               "predicted": r.predicted.tolist(), "assignments": r.assignments,
               "conflict": r.conflict, "richardson": scfg.richardson}
    rows = [[j, float(E), float(p), float(E - p)] for j, E, p in zip(r.assignments, r.energies, r.predicted)]
    table = ResultTable(["j", "E", "prediction", "residual"], rows, tag)
    extra = {}
    if cfg.output.eigenvectors:
        cols = ["x"] + [f"u_{j}" for j in r.assignments]
        data = np.column_stack([r.x] + r.vectors)
        extra["vectors"] = ResultTable(cols, data.tolist(), tag)
    pts = [(j, (E - dp.E_star) / delta) for j, E in zip(r.assignments, r.energies)]
    fig = {"points": pts, "lines": {}, "xlabel": "j", "ylabel": "(E - E_star)/delta",
           "series": {"predicted": (np.arange(-spec.N, spec.N + 1), spec.thetas)}}
    out = [f"delta={delta:g}: {len(r.energies)} gap eigenvalues in [{r.gap[0]:.8f}, {r.gap[1]:.8f}]"]
    out += [f"  j={j:+d}  E={E:.12f}  predicted={p:.12f}" for j, E, p in zip(r.assignments, r.energies, r.predicted)]
    if r.conflict:
        out.append("  WARNING: two eigenvalues share an interval")
    return Outputs(summary, table, fig, out, extra)


def cmd_sweep(cfg: RunConfig, tag: str) -> Outputs:
    V, W, dp, wall = model(cfg)
    rep = run_sweep(_sweep_config(cfg, V, W, wall, cfg.sweep.deltas), dp)
    per = []
    rows = []
    for r in rep.results:
        per.append({"delta": r.delta, "gap": list(r.gap), "window": list(r.window),
                    "E_star_fd": r.E_star_h, "eigenvalues": r.energies.tolist(),
                    "eigenvalues_fd": r.energies_raw.tolist(), "assignments": r.assignments,
                    "conflict": r.conflict, "predicted": r.predicted.tolist(),
                    "residuals": r.residuals.tolist(), "count_window": r.count_window,
                    "overlaps": {str(k): v for k, v in r.overlaps.items()},
                    "quasimode_residuals": {str(k): v for k, v in r.quasimode_residuals.items()}})
        rows += [[j, r.delta, float(E), float(p), float(E - p)]
                 for j, E, p in zip(r.assignments, r.energies, r.predicted)]
    summary = {"E_star": rep.E_star, "nu_star": rep.nu_star, "theta_star": _cpx(rep.theta_star),
               "thetas": rep.thetas.tolist(), "theta_sharp": rep.theta_sharp,
               "expected_count": rep.expected_count(), "per_delta": per,
               "fits": {str(k): v for k, v in rep.fits.items()}}
    table = ResultTable(["j", "delta", "E", "prediction", "residual"], rows, tag)
    dmax = max(cfg.sweep.deltas) * 1.1
    lines = {f"{j}": ([0.0, dmax], [rep.E_star, rep.E_star + t * dmax])
             for j, t in zip(range(-(len(rep.thetas) // 2), len(rep.thetas) // 2 + 1), rep.thetas)}
    pts = [(row[1], row[2]) for row in rows]
    fig = {"points": pts, "lines": lines, "xlabel": "delta", "ylabel": "E"}
    out = [f"sweep over delta = {', '.join(f'{d:g}' for d in rep.deltas)}; expected {rep.expected_count()}"
           f" eigenvalues with |theta_j| < {rep.theta_sharp:g} |theta_star|"]
    for r in rep.results:
        ov = min(r.overlaps.values()) if r.overlaps else float("nan")
        out.append(f"  delta={r.delta:g}: count {r.count_window}, conflict={r.conflict}, min overlap {ov:.6f}")
    for j, f in rep.fits.items():
        if "slope" in f:
            out.append(f"  branch {j:+d}: slope {f['slope']:.6f} (theta {f['theta']:.6f}), curvature {f['curvature']:.4g}")
    return Outputs(summary, table, fig, out)


COMMANDS = {"bands": cmd_bands, "dirac": cmd_dirac, "effective": cmd_effective,
            "dislocated": cmd_dislocated, "sweep": cmd_sweep}


def write_outputs(sub: str, res: Outputs, cfg: RunConfig, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{sub}_{cfg.hash()}"
    written = []
    if "json" in cfg.output.formats:
        doc = {"subcommand": sub, "config_hash": cfg.hash(), "version": __version__, "result": res.summary}
        p = out_dir / f"{stem}.json"
        p.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        written.append(p)
    if "csv" in cfg.output.formats:
        written.append(emit_table(res.table, "csv", out_dir / f"{stem}.csv"))
        for name, t in res.extra_tables.items():
            written.append(emit_table(t, "csv", out_dir / f"{stem}.{name}.csv"))
    if "svg" in cfg.output.formats and res.figure is not None:
        f = res.figure
        written.append(emit_svg_scatter(f["points"], f["lines"], f["xlabel"], f["ylabel"],
                                        out_dir / f"{stem}.svg", title=sub, series=f.get("series")))
    return written


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dislocation-lab", description="Spectral laboratory for dislocated periodic operators")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="run configuration file")
        s.add_argument("--out", help="output directory (overrides output.directory)")
        s.add_argument("--seed", type=int, help="random seed (overrides run.seed)")
        s.add_argument("--threads", type=int, help="worker threads (overrides run.threads)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.run.seed = args.seed
        if args.threads is not None:
            if args.threads < 1:
                raise ValidationError("--threads must be positive")
            cfg.run.threads = args.threads
        _set_threads(cfg.run.threads)
        res = COMMANDS[args.command](cfg, f"{args.command} {cfg.hash()}")
        out_dir = Path(args.out or cfg.output.directory)
        written = write_outputs(args.command, res, cfg, out_dir)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 2
    for line in res.lines:
        print(line)
    for p in written:
        print(f"wrote {p}")
    return 0


def _set_threads(n: int) -> None:
    import numba

    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


if __name__ == "__main__":
    sys.exit(main())
