"""Command-line front end.

Every command writes one table (CSV or JSON) to ``--out`` or stdout.  Exit
status: 0 complete, 1 partial (failures listed in ``<out>.failures.txt`` or
on stderr), 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from ptrabi.diagnostics import fs_scan
from ptrabi.errors import (
    ConfigurationError,
    NoDegeneracyError,
    NoExceptionalPointError,
    PTRabiError,
)
from ptrabi.gfunction import N_MAX, TOL_SERIES, evaluate_G_grid
from ptrabi.model import FockSpace, ModelParams
from ptrabi.oracle import trace_spectrum
from ptrabi.solver import assemble_spectrum, degenerate_points, locate_degenerate, locate_ep

COMMANDS = ("gfun", "spectrum", "ep", "degenerate", "fs")
EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2
MATCH_TOL = 1e-8


@dataclass
class RunConfig:
    command: str = ""
    delta: float = 2.5
    g: float | None = None
    g_min: float | None = None
    g_max: float | None = None
    steps: int = 200
    e_min: float = -1.0
    e_max: float = 4.0
    im_min: float = 0.0
    im_max: float = 1.0
    im_steps: int = 100
    complex: bool = False
    cutoff: int = 120
    tol: float = TOL_SERIES
    out: str | None = None
    format: str = "csv"
    jobs: int = 1
    seed: str = "oracle"
    levels: int = 8
    verify: bool = True
    n: str = "1"
    parity: int | None = None
    interval: int | None = None
    branches: str = "1,3,5"
    eps: float | None = None
    tracking: str = "sorted"
    plot_script: bool = False

    def validate(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigurationError(f"{f.name} must be finite, got {v}")
        if self.steps < 1 or self.im_steps < 1:
            raise ConfigurationError("steps must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"format must be csv or json, got {self.format!r}")
        if self.seed not in ("oracle", "grid"):
            raise ConfigurationError(f"seed must be oracle or grid, got {self.seed!r}")
        if self.e_max < self.e_min:
            raise ConfigurationError("e-max must not be below e-min")
        if self.tol <= 0:
            raise ConfigurationError(f"tol must be positive, got {self.tol}")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1")
        FockSpace(self.cutoff)
        return self

    def g_grid(self) -> np.ndarray:
        if self.g_min is None and self.g_max is None:
            if self.g is None:
                raise ConfigurationError("give --g or --g-min/--g-max")
            return np.array([self.g])
        lo = self.g_min if self.g_min is not None else 0.0
        hi = self.g_max if self.g_max is not None else lo
        if hi < lo or lo < 0:
            raise ConfigurationError(f"bad coupling range [{lo}, {hi}]")
        if self.steps == 1 or hi == lo:
            return np.array([lo])
        return np.linspace(lo, hi, self.steps)


def _coerce(name, text):
    kind = {f.name: f.type for f in fields(RunConfig)}.get(name)
    if kind is None:
        raise ConfigurationError(f"unknown config key {name!r}")
    if text.lower() in ("none", ""):
        return None
    if "bool" in kind:
        return text.lower() in ("1", "true", "yes", "on")
    if "int" in kind:
        return int(text)
    if "float" in kind:
        return float(text)
    return text


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use underscores or dashes."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    a = common.add_argument
    # defaults stay None so a config file can fill the gaps
    a("--delta", type=float)
    a("--g", type=float)
    a("--g-min", type=float)
    a("--g-max", type=float)
    a("--steps", type=int, help="number of grid points")
    a("--e-min", type=float)
    a("--e-max", type=float)
    a("--cutoff", type=int, help="photon cutoff N_ph")
    a("--tol", type=float, help="series tolerance")
    a("--out")
    a("--format", choices=("csv", "json"))
    a("--jobs", type=int)
    a("--config", help="key = value file; flags override it")
    a("--show-config", action="store_true", help="print the resolved configuration and exit")
    a("--plot-script", action="store_true", default=None,
      help="also write a matplotlib script next to --out")

    parser = argparse.ArgumentParser(prog="ptrabi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gfun", parents=[common], help="G-functions on a real or complex energy grid")
    p.add_argument("--complex", action="store_true", default=None)
    p.add_argument("--im-min", type=float)
    p.add_argument("--im-max", type=float)
    p.add_argument("--im-steps", type=int)

    p = sub.add_parser("spectrum", parents=[common], help="spectrum along a coupling grid")
    p.add_argument("--levels", type=int)
    p.add_argument("--seed", choices=("oracle", "grid"))
    p.add_argument("--no-verify", dest="verify", action="store_false", default=None,
                   help="skip the G-zero cross-check and intersection refinement")

    p = sub.add_parser("ep", parents=[common], help="locate exceptional points")
    p.add_argument("--parity", type=int, choices=(1, -1))
    p.add_argument("--interval", type=int)
    p.add_argument("--levels", type=int)

    p = sub.add_parser("degenerate", parents=[common], help="doubly degenerate points on pole lines")
    p.add_argument("--n", help="pole index or comma-separated list")

    p = sub.add_parser("fs", parents=[common], help="fidelity susceptibility and c-product scan")
    p.add_argument("--branches", help="comma-separated sorted level indices")
    p.add_argument("--eps", type=float, help="fixed eps; default compares adjacent grid points")
    p.add_argument("--tracking", choices=("sorted", "branch"))
    return parser


def resolve_config(argv=None) -> tuple[RunConfig, bool]:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        try:
            values.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file: {exc}") from exc
    for key, value in vars(args).items():
        if key in ("config", "show_config") or value is None:
            continue
        values[key] = value
    return RunConfig(**values).validate(), args.show_config


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.16e}"
    return str(x)


def _json_value(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(header, rows, fmt) -> str:
    if fmt == "json":
        recs = [{k: _json_value(v) for k, v in zip(header, row)} for row in rows]
        return json.dumps(recs, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(cfg, header, rows, failures, out=None):
    text = render(header, rows, cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text, newline="")
        side = Path(cfg.out + ".failures.txt")
        if failures:
            side.write_text("\n".join(failures) + "\n")
        elif side.exists():
            side.unlink()
        if cfg.plot_script and cfg.format == "csv":
            Path(cfg.out + ".plot.py").write_text(_plot_script(cfg.out, header))
    else:
        (out or sys.stdout).write(text)
        for line in failures:
            print(line, file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def _plot_script(path, header):
    x, ys = header[0], [h for h in header[1:] if h.startswith(("re_", "im_", "abs_"))]
    return (
        "import matplotlib.pyplot as plt\n"
        "import numpy as np\n\n"
        f"data = np.genfromtxt({str(path)!r}, delimiter=',', names=True, dtype=None, encoding=None)\n"
        "fig, ax = plt.subplots()\n"
        f"for col in {ys!r}:\n"
        f"    ax.plot(data[{x!r}], data[col], '.', ms=2, label=col)\n"
        f"ax.set_xlabel({x!r})\n"
        "ax.legend()\n"
        "plt.show()\n"
    )


def cmd_gfun(cfg: RunConfig):
    g = cfg.g if cfg.g is not None else cfg.g_min
    if g is None:
        raise ConfigurationError("gfun needs --g")
    params = ModelParams(cfg.delta, g)
    n_re = 1 if cfg.e_max == cfg.e_min else cfg.steps
    re = np.linspace(cfg.e_min, cfg.e_max, n_re)
    failures = []
    if cfg.complex:
        n_im = 1 if cfg.im_max == cfg.im_min else cfg.im_steps
        im = np.linspace(cfg.im_min, cfg.im_max, n_im)
        E = (re[None, :] + 1j * im[:, None]).ravel()
        header = ["re_E", "im_E", "ln_abs2_Gp", "ln_abs2_Gm"]
    else:
        E = re.astype(complex)
        header = ["E", "re_Gp", "re_Gm"]
    grid = evaluate_G_grid(params, E, tol=cfg.tol, n_max=N_MAX)
    rows = []
    with np.errstate(divide="ignore"):
        for k, e in enumerate(E):
            ok = grid["converged"][k]
            if not ok and not grid["pole"][k]:
                failures.append(f"E={e!r}: G-series did not converge")
            gp, gm = grid["plus"][k], grid["minus"][k]
            if cfg.complex:
                vals = [np.log(abs(gp) ** 2), np.log(abs(gm) ** 2)] if ok else [None, None]
                rows.append([e.real, e.imag, *vals])
            else:
                rows.append([e.real, *([gp.real, gm.real] if ok else [None, None])])
    return header, rows, failures


SPECTRUM_HEADER = ["g", "re_E", "im_E", "parity", "branch_id", "provenance"]


def cmd_spectrum(cfg: RunConfig):
    grid = cfg.g_grid()
    space = FockSpace(cfg.cutoff)
    trace = trace_spectrum(cfg.delta, grid, space, levels=cfg.levels, jobs=cfg.jobs, audit=False)
    failures, extra = [], []
    if cfg.verify:
        assembled = assemble_spectrum(cfg.delta, grid, levels=cfg.levels, space=space,
                                      seed=cfg.seed, jobs=cfg.jobs)
        for rec, zeros in zip(trace.records, assembled):
            failures += [f"g={rec.g!r}: {msg}" for msg in zeros.failures]
            n = min(len(rec.values), len(zeros.values))
            for v, p, prov in zip(zeros.values[:n], zeros.parity[:n], zeros.provenance[:n]):
                d = np.abs(rec.values - v)
                k = int(np.argmin(d))
                if d[k] > MATCH_TOL * (1 + abs(v)) or (rec.parity[k] != p and prov == "G-zero"):
                    failures.append(f"g={rec.g!r}: G-zero {v!r} (parity {p}) has no oracle match")
        for cand in trace.coalescences:
            try:
                ep = locate_ep(cfg.delta, (cand.g_lo, cand.g_hi), parity=cand.parity[0], space=space)
            except PTRabiError as exc:
                failures.append(f"EP near g={cand.g_lo!r}: {exc}")
                continue
            for b in cand.branch_ids:
                extra.append((ep.g_star, ep.E_star, 0.0, ep.parity, b, "ep"))
        for cand in trace.crossings:
            for d in degenerate_points(cfg.delta, cand.pole, (cand.g_lo, cand.g_hi), samples=16) \
                    if cand.pole >= 1 else []:
                for b, p in zip(cand.branch_ids, cand.parity):
                    extra.append((d.g_n, d.E_n, 0.0, p, b, "injected-degeneracy"))
    rows = []
    for rec in trace.records:
        for v, p, b, prov in zip(rec.values, rec.parity, rec.branch_id, rec.provenance):
            rows.append((rec.g, v.real, v.imag, p, b, prov))
    # intersections go right after the grid point below them
    rows += extra
    rows.sort(key=lambda r: r[0])
    return SPECTRUM_HEADER, rows, failures


EP_HEADER = ["delta", "kind", "n", "level_a", "level_b", "g_star", "E_star", "parity",
             "res_G", "res_dG", "found", "reason"]


def _ints(text):
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_ep(cfg: RunConfig):
    space = FockSpace(cfg.cutoff)
    rows, failures = [], []

    def record(ep):
        return [cfg.delta, "ep", ep.interval, ep.level_pair[0], ep.level_pair[1], ep.g_star,
                ep.E_star, ep.parity, ep.residuals[0], ep.residuals[1], True, ""]

    def missing(reason):
        return [cfg.delta, "ep", None, None, None, None, None, cfg.parity, None, None, False, reason]

    if cfg.g_min is not None and cfg.g_max is not None:
        try:
            rows.append(record(locate_ep(cfg.delta, (cfg.g_min, cfg.g_max), parity=cfg.parity,
                                         interval=cfg.interval, space=space)))
        except NoExceptionalPointError as exc:
            rows.append(missing(str(exc)))
        except PTRabiError as exc:
            failures.append(str(exc))
        return EP_HEADER, rows, failures

    # no window: coarse oracle trace, then refine every coalescence it shows
    hi = cfg.g_max if cfg.g_max is not None else 1.0
    grid = np.linspace(hi / cfg.steps, hi, cfg.steps)
    trace = trace_spectrum(cfg.delta, grid, space, levels=cfg.levels, jobs=cfg.jobs, audit=False)
    for cand in trace.coalescences:
        if cfg.parity is not None and cand.parity[0] != cfg.parity:
            continue
        try:
            rows.append(record(locate_ep(cfg.delta, (cand.g_lo, cand.g_hi), parity=cand.parity[0],
                                         space=space)))
        except PTRabiError as exc:
            failures.append(f"EP near g={cand.g_lo!r}: {exc}")
    if not rows and not failures:
        rows.append(missing(f"no coalescence for g in (0, {hi}]"))
    return EP_HEADER, rows, failures


def cmd_degenerate(cfg: RunConfig):
    lo = cfg.g_min if cfg.g_min is not None else 1e-3
    hi = cfg.g_max if cfg.g_max is not None else 3.0
    rows = []
    for n in _ints(cfg.n):
        try:
            d = locate_degenerate(cfg.delta, n, (lo, hi))
            rows.append([cfg.delta, "degenerate", n, None, None, d.g_n, d.E_n, None,
                         d.f_n_residual, None, True, ""])
        except NoDegeneracyError as exc:
            rows.append([cfg.delta, "degenerate", n, None, None, None, None, None, None, None,
                         False, str(exc)])
    return EP_HEADER, rows, []


FS_HEADER = ["g", "branch_id", "re_chi", "im_chi", "re_F", "im_F", "re_c", "im_c", "abs_c",
             "epsilon", "flag"]


def cmd_fs(cfg: RunConfig):
    grid = cfg.g_grid()
    scans = fs_scan(cfg.delta, grid, _ints(cfg.branches), FockSpace(cfg.cutoff), eps=cfg.eps,
                    tracking=cfg.tracking, jobs=cfg.jobs)
    rows, failures = [], []
    for level, points in scans.items():
        for p in points:
            rows.append([p.g, p.branch_id, p.chi.real, p.chi.imag, p.fidelity.real, p.fidelity.imag,
                         p.c_product.real, p.c_product.imag, abs(p.c_product), p.epsilon_used, p.flag])
            if p.flag:
                failures.append(f"level {level} at g={p.g!r}: {p.flag}")
    return FS_HEADER, rows, failures


HANDLERS = {
    "gfun": cmd_gfun,
    "spectrum": cmd_spectrum,
    "ep": cmd_ep,
    "degenerate": cmd_degenerate,
    "fs": cmd_fs,
}


def main(argv=None) -> int:
    try:
        cfg, show = resolve_config(argv)
        if show:
            print(json.dumps(asdict(cfg), indent=1))
            return EXIT_OK
        header, rows, failures = HANDLERS[cfg.command](cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PTRabiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    if not rows and failures:
        _emit(cfg, header, rows, failures)
        return EXIT_PARTIAL
    return _emit(cfg, header, rows, failures)


if __name__ == "__main__":
    sys.exit(main())
