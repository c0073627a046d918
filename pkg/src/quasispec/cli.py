"""Command-line front end. Every subcommand writes a deterministic CSV."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .asymptotics import TruncationError, counting, riesz_mean, weyl_residual
from .boundarywaves import edge_mass_distribution, polygon_waves, zigzag_wave
from .enumeration import phi_zigzag, polygon_counting, psi_functions, zigzag_count
from .geometry import TOL_ANGLE, GeometryError, PolygonSpec, ZigzagSpec, load_spec
from .oracles import disk_exact, preset_polygon, preset_reference, square_exact_steklov
from .quantumgraph import graph_laplacian_spectrum, secular_residual
from .rootfind import ScanOptions, polygon_spectrum, transfer_trace_spectrum, zigzag_spectrum
from .trigpoly import polygon_amplitude_scale, polygon_char_poly

EXIT_OK, EXIT_INVALID, EXIT_WEYL = 0, 2, 3
SUBCOMMANDS = ("polygon-spectrum", "zigzag-spectrum", "counting", "wave", "stats",
               "secular-check", "oracle", "compare")


class CliError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    preset: str | None = None
    spec: str | None = None
    sigma_max: float = 50.0
    tol_angle: float = TOL_ANGLE
    refine_tol: float = 1e-12
    double_root_tol: float = 1e-7
    grid: str | None = None
    output: str | None = None
    extra: dict = field(default_factory=dict)

    def digest(self) -> str:
        data = asdict(self)
        data.pop("output")
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]

    def scan_options(self) -> ScanOptions:
        try:
            return ScanOptions(sigma_max=self.sigma_max, refine_tol=self.refine_tol,
                               double_root_tol=self.double_root_tol)
        except ValueError as exc:
            raise CliError(str(exc)) from exc


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        x = 0.0  # no "-0"
    return format(x, ".17g")


def parse_grid(text: str) -> np.ndarray:
    """'a:b:h' -> a, a+h, ..., up to b inclusive (within h/1e6)."""
    try:
        a, b, h = (float(t) for t in text.split(":"))
    except ValueError as exc:
        raise CliError(f"grid must look like a:b:h, got {text!r}") from exc
    if not h > 0 or b < a:
        raise CliError("grid needs h > 0 and b >= a")
    count = int(math.floor((b - a) / h + 1e-6)) + 1
    return a + h * np.arange(count)


def _source(cfg: RunConfig):
    if (cfg.preset is None) == (cfg.spec is None):
        raise CliError("give exactly one of --preset and --spec")
    if cfg.preset is not None:
        return preset_polygon(cfg.preset)
    return load_spec(cfg.spec, tol_angle=cfg.tol_angle)


def _polygon(cfg: RunConfig) -> PolygonSpec:
    p = _source(cfg)
    if not isinstance(p, PolygonSpec):
        raise CliError("this subcommand needs a closed polygon")
    return p


def _zigzag(cfg: RunConfig) -> ZigzagSpec:
    z = _source(cfg)
    if not isinstance(z, ZigzagSpec):
        raise CliError("zigzag specs carry a 'bc' pair")
    return z


def _flat_rows(spec):
    rows, m = [], 0
    for q in spec.values:
        for _ in range(q.multiplicity):
            m += 1
            rows.append([m, q.sigma, q.multiplicity, q.provenance])
    return rows


def _weyl_alarm(spectrum, perimeter, n) -> bool:
    return weyl_residual(spectrum, perimeter) > n + 2


def cmd_polygon_spectrum(cfg):
    p = _polygon(cfg)
    if cfg.extra.get("polynomial"):
        if p.is_exceptional:
            raise CliError("exceptional polygons have one polynomial per component")
        fp = polygon_char_poly(p)
        rows = [[f, a.real, a.imag] for f, a in zip(fp.freqs, fp.amps)]
        return ["frequency", "re_amp", "im_amp"], rows, EXIT_OK
    spec = polygon_spectrum(p, cfg.scan_options())
    code = EXIT_WEYL if _weyl_alarm(spec, p.perimeter, p.n) else EXIT_OK
    return ["index", "sigma", "multiplicity", "provenance"], _flat_rows(spec), code


def cmd_zigzag_spectrum(cfg):
    z = _zigzag(cfg)
    spec = zigzag_spectrum(z, cfg.scan_options())
    return ["index", "sigma", "multiplicity", "provenance"], _flat_rows(spec), EXIT_OK


def _grid(cfg, default_step=0.01):
    return parse_grid(cfg.grid) if cfg.grid else parse_grid(f"0:{cfg.sigma_max}:{default_step}")


def cmd_counting(cfg):
    src = _source(cfg)
    grid = _grid(cfg)
    if isinstance(src, ZigzagSpec):
        counts = np.atleast_1d(zigzag_count(src, grid))
        if src.is_exceptional:
            return ["sigma", "count"], [[s, c] for s, c in zip(grid, counts)], EXIT_OK
        phi = np.atleast_1d(phi_zigzag(src, grid))
        return ["sigma", "count", "phi"], [[s, c, f] for s, c, f in zip(grid, counts, phi)], EXIT_OK
    counts = np.atleast_1d(polygon_counting(src, grid))
    if src.is_exceptional:
        return ["sigma", "count"], [[s, c] for s, c in zip(grid, counts)], EXIT_OK
    psi = np.atleast_2d(psi_functions(src, grid))
    rows = [[s, c, a, b] for s, c, (a, b) in zip(grid, counts, psi)]
    return ["sigma", "count", "psi1", "psi2"], rows, EXIT_OK


def cmd_wave(cfg):
    src = _source(cfg)
    index = int(cfg.extra.get("index") or 1)
    if index < 1:
        raise CliError("--index counts from 1")
    opts = cfg.scan_options()
    if isinstance(src, ZigzagSpec):
        flat = zigzag_spectrum(src, opts).flat()
    else:
        flat = polygon_spectrum(src, opts).flat()
    if index > flat.size:
        raise TruncationError(f"only {flat.size} values up to sigma_max = {cfg.sigma_max}")
    sigma = float(flat[index - 1])
    waves = zigzag_wave(src, sigma) if isinstance(src, ZigzagSpec) else polygon_waves(src, sigma)
    if cfg.extra.get("what") == "coefficients":
        rows = []
        for w in waves:
            masses = edge_mass_distribution(w)
            for j in range(len(w.lengths)):
                rows.append([w.label, j + 1, w.sigma, w.c_in[j].real, w.c_in[j].imag,
                             w.c_out[j].real, w.c_out[j].imag, masses[j]])
        return ["wave", "side", "sigma", "c_in_re", "c_in_im", "c_out_re", "c_out_im", "mass"], rows, EXIT_OK
    points = int(cfg.extra.get("points") or 50)
    rows = []
    for w in waves:
        s, v = w.sample(points)
        rows += [[w.label, w.sigma, a, b] for a, b in zip(s, v)]
    return ["wave", "sigma", "arclength", "value"], rows, EXIT_OK


def cmd_stats(cfg):
    p = _polygon(cfg)
    spec = polygon_spectrum(p, cfg.scan_options())
    grid = _grid(cfg, default_step=0.1)
    L = p.perimeter
    rows = [["counting", s, counting(spec, s), L * s / math.pi] for s in grid]
    rows += [["riesz", s, riesz_mean(spec, s), L * s * s / (2 * math.pi)]
             for s in grid if s <= spec.sigma_max]
    code = EXIT_WEYL if _weyl_alarm(spec, L, p.n) else EXIT_OK
    return ["quantity", "x", "value", "leading_term"], rows, code


def cmd_secular_check(cfg):
    p = _polygon(cfg)
    grid = _grid(cfg)
    res = secular_residual(p, grid)
    scale = polygon_amplitude_scale(p)
    return ["max_residual", "amplitude_sum", "relative"], [[res, scale, res / scale]], EXIT_OK


def _named_values(name: str, sigma_max: float, count: int | None) -> np.ndarray:
    kind, _, rest = name.partition(":")
    if kind == "oracle":
        if rest == "square-exact":
            return square_exact_steklov(count or 200).values
        if rest == "disk-exact":
            return disk_exact(count or 200).values
        return preset_reference(rest, sigma_max).values
    if kind in ("quasi", "graph", "trace"):
        p = preset_polygon(rest)
        opts = ScanOptions(sigma_max=sigma_max)
        route = {"quasi": polygon_spectrum, "graph": lambda q, o: graph_laplacian_spectrum(q, sigma_max, o),
                 "trace": transfer_trace_spectrum}[kind]
        vals = route(p, opts).flat()
        return vals[:count] if count else vals
    raise CliError(f"unknown spectrum source {name!r}: use oracle:, quasi:, graph: or trace:")


def cmd_oracle(cfg):
    if cfg.preset is None:
        raise CliError("oracle needs --preset")
    count = cfg.extra.get("count")
    vals = _named_values("oracle:" + cfg.preset, cfg.sigma_max, count)
    return ["index", "sigma"], [[m + 1, v] for m, v in enumerate(vals)], EXIT_OK


def cmd_compare(cfg):
    left, right = cfg.extra.get("left"), cfg.extra.get("right")
    if not left or not right:
        raise CliError("compare needs --left and --right")
    count = cfg.extra.get("count")
    a = _named_values(left, cfg.sigma_max, count)
    b = _named_values(right, cfg.sigma_max, count)
    k = min(a.size, b.size)
    return ["index", "left", "right", "abs_diff"], [[m + 1, a[m], b[m], abs(a[m] - b[m])] for m in range(k)], EXIT_OK


HANDLERS = {
    "polygon-spectrum": cmd_polygon_spectrum,
    "zigzag-spectrum": cmd_zigzag_spectrum,
    "counting": cmd_counting,
    "wave": cmd_wave,
    "stats": cmd_stats,
    "secular-check": cmd_secular_check,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="named polygon, e.g. square or droplet:2")
    common.add_argument("--spec", help="JSON file with angles, lengths and optionally bc")
    common.add_argument("--sigma-max", type=float, default=50.0)
    common.add_argument("--tol-angle", type=float, default=TOL_ANGLE)
    common.add_argument("--refine-tol", type=float, default=1e-12)
    common.add_argument("--double-root-tol", type=float, default=1e-7)
    common.add_argument("--grid", help="a:b:h")
    common.add_argument("--output", help="write CSV here instead of stdout")

    parser = argparse.ArgumentParser(prog="quasispec", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    ps = sub.add_parser("polygon-spectrum", parents=[common])
    ps.add_argument("--polynomial", action="store_true", help="dump the characteristic polynomial instead")
    sub.add_parser("zigzag-spectrum", parents=[common])
    sub.add_parser("counting", parents=[common])
    wv = sub.add_parser("wave", parents=[common])
    wv.add_argument("--index", type=int, default=1)
    wv.add_argument("--what", choices=("trace", "coefficients"), default="trace")
    wv.add_argument("--points", type=int, default=50)
    sub.add_parser("stats", parents=[common])
    sub.add_parser("secular-check", parents=[common])
    oc = sub.add_parser("oracle", parents=[common])
    oc.add_argument("--count", type=int)
    cp = sub.add_parser("compare", parents=[common])
    cp.add_argument("--left")
    cp.add_argument("--right")
    cp.add_argument("--count", type=int)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = {"subcommand", "preset", "spec", "sigma_max", "tol_angle", "refine_tol",
            "double_root_tol", "grid", "output"}
    extra = {k: v for k, v in vars(ns).items() if k not in base}
    cfg = RunConfig(ns.subcommand, ns.preset, ns.spec, ns.sigma_max, ns.tol_angle, ns.refine_tol,
                    ns.double_root_tol, ns.grid, ns.output, extra)
    if not (cfg.sigma_max > 0 and cfg.tol_angle > 0 and cfg.refine_tol > 0 and cfg.double_root_tol > 0):
        raise CliError("sigma-max and tolerances must be positive")
    return cfg


def render(cfg: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    buf.write(f"# config {cfg.digest()}\n")
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        cfg = config_from_args(ns)
        header, rows, code = HANDLERS[cfg.subcommand](cfg)
    except (GeometryError, CliError, TruncationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = render(cfg, header, rows)
    if cfg.output:
        Path(cfg.output).write_text(text, newline="\n")
    else:
        stdout.write(text)
    if code == EXIT_WEYL:
        print("alarm: Weyl residual exceeds n + 2", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
