"""Flat key=value configuration, CSV writers, convergence studies and the command line.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from phasebound import diagnostics as diag
from phasebound.glimm import GlimmConfig, GlimmError, GlimmRun, InitialData, report_window
from phasebound.glimm import run as glimm_run
from phasebound.kinetics import KineticFunction, entropy_dissipation_rate
from phasebound.material import MaterialLaw, State
from phasebound.riemann_full import RiemannError, WaveFan, boundary_states, fan_entropy_production, solve_riemann
from phasebound.riemann_half import solve_half

class ConfigError(ValueError):
    """Malformed or invalid configuration."""


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def _choice(*options):
    def parse(text: str) -> str:
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {t!r}")
        return t
    return parse


# key -> (parser, default); a default of None means optional without default,
# the sentinel REQUIRED marks keys every configuration must define.
REQUIRED = object()
SCHEMA = {
    "material.k1": (float, REQUIRED),
    "material.k3": (float, REQUIRED),
    "material.wM": (float, REQUIRED),
    "material.wm": (float, REQUIRED),
    "material.wMcr": (float, None),
    "material.wmcr": (float, None),
    "kinetic.type": (_choice("max_dissipation", "tabulated"), "max_dissipation"),
    "kinetic.table": (Path, None),
    "grid.h": (float, None),
    "grid.lambda": (float, None),
    "grid.xmin": (float, -3.0),
    "grid.xmax": (float, 3.0),
    "grid.domain": (_choice("full", "half-left", "half-right"), "full"),
    "grid.report_xmin": (float, None),
    "grid.report_xmax": (float, None),
    "time.t_end": (float, None),
    "sequence.type": (_choice("van_der_corput", "linear_congruential"), "van_der_corput"),
    "sequence.seed": (int, 0),
    "init.type": (_choice("riemann", "boundary", "perturbed", "table"), "riemann"),
    "init.table": (Path, None),
    "init.vL": (float, 0.0),
    "init.wL": (float, 0.0),
    "init.vR": (float, 0.0),
    "init.wR": (float, None),
    "init.x0": (float, 0.0),
    "init.V": (float, None),
    "init.n1": (float, 0.05),
    "init.seed": (int, 0),
    "init.pieces": (int, 8),
    "init.width": (float, 1.0),
    "init.sides": (_choice("both", "left", "right"), "both"),
    "init.family": (_choice("any", "left-invariant"), "any"),
    "riemann.vL": (float, 0.0),
    "riemann.wL": (float, 0.0),
    "riemann.vR": (float, 0.0),
    "riemann.wR": (float, 0.0),
    "riemann.v0": (float, 0.0),
    "riemann.w0": (float, 0.0),
    "riemann.side": (_choice("left", "right"), "left"),
    "riemann.t": (float, None),
    "riemann.xmin": (float, -1.0),
    "riemann.xmax": (float, 1.0),
    "riemann.samples": (int, 201),
    "riemann.output": (Path, None),
    "converge.h": (_floats, (0.02, 0.01, 0.005)),
    "output.dir": (Path, Path(".")),
    "output.prefix": (str, "run"),
    "output.snapshots": (_floats, None),
    "output.track": (_bool, True),
    "output.diag": (_bool, True),
    "output.K": (float, None),
    "output.bumps": (int, 50),
    "output.bump_seed": (int, 0),
}
PATH_KEYS = ("kinetic.table", "init.table")
RUN_KEYS = ("grid.h", "time.t_end")


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ",".join(format(x, ".17g") for x in value)
    return str(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed configuration values; keys not set explicitly take their schema default."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str):
        if key not in SCHEMA:
            raise KeyError(key)
        if key in self.values:
            return self.values[key]
        default = SCHEMA[key][1]
        return None if default is REQUIRED else default

    def law(self) -> MaterialLaw:
        return MaterialLaw(self["material.k1"], self["material.k3"], self["material.wM"], self["material.wm"],
                           self["material.wMcr"], self["material.wmcr"])

    def kinetic(self, law: MaterialLaw | None = None) -> KineticFunction:
        law = self.law() if law is None else law
        if self["kinetic.type"] == "tabulated":
            if self["kinetic.table"] is None:
                raise ConfigError("kinetic.type = tabulated needs kinetic.table")
            return KineticFunction.from_file(law, self["kinetic.table"])
        return KineticFunction(law)

    def glimm_config(self, h: float | None = None) -> GlimmConfig:
        self.require(*RUN_KEYS)
        return GlimmConfig(
            h=self["grid.h"] if h is None else h, t_end=self["time.t_end"],
            xmin=self["grid.xmin"], xmax=self["grid.xmax"], lam=self["grid.lambda"],
            sequence=self["sequence.type"], seed=self["sequence.seed"], domain=self["grid.domain"],
            report_xmin=self["grid.report_xmin"], report_xmax=self["grid.report_xmax"],
        )

    def initial_data(self, law: MaterialLaw, kinetic: KineticFunction) -> InitialData:
        kind = self["init.type"]
        if kind == "table":
            if self["init.table"] is None:
                raise ConfigError("init.type = table needs init.table")
            return InitialData.from_table(self["init.table"], law)
        if kind == "riemann":
            if self["init.wR"] is None:
                raise ConfigError("init.type = riemann needs init.wR")
            uL = State(self["init.vL"], self["init.wL"])
            uR = State(self["init.vR"], self["init.wR"])
            return InitialData.riemann(uL, uR, self["init.x0"])
        if self["init.V"] is None:
            raise ConfigError(f"init.type = {kind} needs init.V")
        if kind == "boundary":
            return InitialData.boundary(law, kinetic, self["init.V"], self["init.vL"], self["init.wR"])
        uL, uR = boundary_states(law, kinetic, self["init.V"], self["init.vL"], self["init.wR"])
        rng = np.random.default_rng(self["init.seed"])
        return InitialData.perturbed(law, uL, uR, self["init.n1"], rng, pieces=self["init.pieces"],
                                     width=self["init.width"], sides=self["init.sides"],
                                     family=self["init.family"])

    def require(self, *keys: str) -> None:
        missing = [k for k in keys if self[k] is None]
        if missing:
            raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    def to_text(self) -> str:
        """Echo of the explicitly set keys, parseable by :func:`parse_config_text`."""
        return "".join(f"{k} = {_format_value(self.values[k])}\n" for k in sorted(self.values))


def _parse_pairs(lines, origin: str) -> list[tuple[str, str, int]]:
    out = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{origin}:{lineno}: empty key")
        out.append((key, value, lineno))
    return out


def build_config(pairs: list[tuple[str, str, int | None]], origin: str = "<config>",
                 base_dir: Path | None = None, required=("material.k1", "material.k3", "material.wM", "material.wm"),
                 overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Type-check ``(key, value, line)`` triples and apply command-line overrides."""
    seen: dict[str, int] = {}
    raw: dict[str, tuple[str, str]] = {}
    for key, value, lineno in pairs:
        where = f"{origin}:{lineno}"
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{origin}: duplicate key {key!r} on lines {seen[key]} and {lineno}")
        seen[key] = lineno
        raw[key] = (value, where)
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise ConfigError(f"command line: unknown key {key!r}")
        raw[key] = (value, "command line")
    values = {}
    for key, (value, where) in raw.items():
        parser = SCHEMA[key][0]
        try:
            typed = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{where}: invalid value for {key}: {exc}") from exc
        if key in PATH_KEYS or key == "output.dir" or key == "riemann.output":
            if not typed.is_absolute() and base_dir is not None:
                typed = base_dir / typed
        if key in PATH_KEYS and not typed.exists():
            raise ConfigError(f"{where}: {key} refers to a missing file {str(typed)!r}")
        values[key] = typed
    cfg = ExperimentConfig(values)
    cfg.require(*required)
    try:
        law = cfg.law()
    except ValueError as exc:
        raise ConfigError(f"material: {exc}") from exc
    if cfg["kinetic.type"] == "tabulated":
        try:
            cfg.kinetic(law)
        except ValueError as exc:
            raise ConfigError(f"kinetic.table: {exc}") from exc
    return cfg


def parse_config_text(text: str, origin: str = "<config>", base_dir: Path | None = None, **kwargs) -> ExperimentConfig:
    return build_config(_parse_pairs(text.splitlines(), origin), origin, base_dir, **kwargs)


def parse_config(path: str | Path, overrides: dict[str, str] | None = None, **kwargs) -> ExperimentConfig:
    """Read a flat ``key = value`` file.  Relative paths resolve against its directory."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from exc
    kwargs.setdefault("required", ("material.k1", "material.k3", "material.wM", "material.wm") + RUN_KEYS)
    return parse_config_text(text, str(path), path.parent, overrides=overrides, **kwargs)


# -- CSV writers ---------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {str(path)!r}: {exc.strerror}") from exc
    return path


def write_snapshot(run: GlimmRun, times, path: str | Path) -> Path:
    """Cell-centre values ``t, x, v, w, phase`` of the levels nearest to ``times``."""
    lo, hi = report_window(run.config, run.law)
    rows = []
    for t in times:
        n = run.level_at(t)
        edges, v, w = run.cells(n)
        centres = 0.5 * (edges[:-1] + edges[1:])
        phase = run.law.phase_array(w)
        tn = n * run.tau
        for j in np.flatnonzero((centres >= lo) & (centres <= hi)):
            rows.append((tn, centres[j], v[j], w[j], int(phase[j])))
    return write_csv(path, ["t", "x", "v", "w", "phase"], rows)


def write_track(run: GlimmRun, path: str | Path) -> Path:
    rows = [(n, n * run.tau, lev.chi, lev.chidot, lev.a) for n, lev in enumerate(run.levels)]
    return write_csv(path, ["n", "t", "chi", "chidot", "a_n"], rows)


DIAG_HEADER = ["n", "t", "L", "B", "Q", "G", "TV", "sup", "chidot", "kinetic_residual_max", "entropy_pairing_min"]


def diagnostics_table(run: GlimmRun, K: float | None = None, bumps: int = 50, bump_seed: int = 0):
    """Per-level diagnostics rows plus the weighting constant used for ``G``."""
    series = diag.functionals(run)
    if K is None:
        K = diag.calibrate_K([series])
        K = 1.0 if K is None else K
    tv = diag.tv_monitor(run)
    kres = diag.kinetic_residuals(run)
    lo, hi = report_window(run.config, run.law)
    rng = np.random.default_rng(bump_seed)

    def centre(t):
        return float(np.nan_to_num(run.chi_at(t)[0], nan=0.5 * (lo + hi)))

    path = None if np.all(np.isnan(run.chi)) else centre
    blist = diag.random_bumps(rng, bumps, run.config.t_end, (lo, hi), path) if bumps > 0 else []
    pairing = diag.entropy_pairing(run, blist, per_level=True) if blist else np.zeros((len(run.levels), 0))
    rows = []
    for n, lev in enumerate(run.levels):
        pmin = float(np.min(pairing[n])) if pairing.shape[1] else 0.0
        rows.append((n, n * run.tau, series["L"][n], series["B"][n], series["Q"][n],
                     series["L"][n] + K * series["Q"][n], tv.tv_level[n], tv.sup[n], lev.chidot,
                     kres[n], pmin))
    return rows, K, series


def write_diag(run: GlimmRun, path: str | Path, K: float | None = None, bumps: int = 50, bump_seed: int = 0) -> Path:
    rows, _, _ = diagnostics_table(run, K, bumps, bump_seed)
    return write_csv(path, DIAG_HEADER, rows)


def write_fan_samples(fan: WaveFan, t: float, xs, path: str | Path, x0: float = 0.0) -> Path:
    v, w = fan.evaluate(t, np.asarray(xs, dtype=float) - x0)
    return write_csv(path, ["t", "x", "v", "w"], [(t, x, a, b) for x, a, b in zip(xs, v, w)])


def format_fan(law: MaterialLaw, fan: WaveFan) -> str:
    """One line per state and per wave (kind, speed, dissipation rate, entropy production)."""
    lines = [f"case {fan.case}"]
    prod = fan_entropy_production(law, fan)
    for i, s in enumerate(fan.states):
        lines.append(f"state {i} v={_fmt(s.v)} w={_fmt(s.w)} phase={law.phase(s.w).name}")
        if i < len(fan.waves):
            wv = fan.waves[i]
            rate = entropy_dissipation_rate(law, fan.states[i], fan.states[i + 1])
            lines.append(f"wave {i} kind={wv.kind.name.lower()} speed={_fmt(wv.speed)} "
                         f"dissipation={_fmt(rate)} entropy_production={_fmt(prod[i])}")
    return "\n".join(lines)


# -- convergence study ---------------------------------------------------------------

CONVERGE_HEADER = ["h", "chi_error", "l1_error", "chi_order", "l1_order", "status"]


def _exact_fan(law, kinetic, data: InitialData) -> tuple[WaveFan, float] | None:
    if data.pieces is None or len(data.pieces) != 2:
        return None
    x0 = data.pieces[1][0]
    return solve_riemann(law, kinetic, data.pieces[0][1], data.pieces[1][1]), x0


def _chi_error(run: GlimmRun, exact: tuple[WaveFan, float] | None) -> float:
    if exact is None:
        return math.nan
    fan, x0 = exact
    b = fan.boundary()
    tracked = ~np.isnan(run.chi)
    if b is None:
        return 0.0 if not np.any(tracked) else math.nan
    V = b[0].speed
    t = run.times
    start = np.abs(run.chi - (x0 + V * t))
    end = np.abs(run.chi[:-1] + run.chidot[:-1] * run.tau - (x0 + V * t[1:]))
    return float(max(np.max(start), np.max(end)))


def _l1_error(run: GlimmRun, exact: tuple[WaveFan, float] | None) -> float:
    if exact is None:
        return math.nan
    fan, x0 = exact
    lo, hi = report_window(run.config, run.law)
    n = run.nsteps
    t = n * run.tau
    edges, v, w = run.cells(n)
    fe = np.concatenate([[min(lo, edges[0]) - 1.0], x0 + fan.speeds * t])
    fv = np.array([s.v for s in fan.states])
    fw = np.array([s.w for s in fan.states])
    return diag.pc_l1(edges, v, w, fe, fv, fw, lo, hi)


def run_convergence_study(cfg: ExperimentConfig, hs=None) -> list[tuple]:
    """One row per mesh size; failed rows carry NaN errors and the error message."""
    law = cfg.law()
    kinetic = cfg.kinetic(law)
    hs = list(cfg["converge.h"] if hs is None else hs)
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ConfigError("converge.h must be strictly decreasing")
    data = cfg.initial_data(law, kinetic)
    exact = _exact_fan(law, kinetic, data) if cfg["grid.domain"] == "full" else None
    rows = []
    prev = None
    for h in hs:
        try:
            r = glimm_run(law, kinetic, data, cfg.glimm_config(h))
            ce, le = _chi_error(r, exact), _l1_error(r, exact)
            status = "ok"
        except (GlimmError, RiemannError, ValueError) as exc:
            ce = le = math.nan
            status = f"error: {exc}".replace(",", ";")
        co = lo_ = math.nan
        if prev is not None:
            ph, pc, pl = prev
            ratio = math.log(ph / h)
            if pc > 0.0 and ce > 0.0:
                co = math.log(pc / ce) / ratio
            if pl > 0.0 and le > 0.0:
                lo_ = math.log(pl / le) / ratio
        rows.append((h, ce, le, co, lo_, status))
        prev = (h, ce, le)
    return rows


# -- command line --------------------------------------------------------------------

ALIASES = {"side": "riemann.side"}


def _split_overrides(extra: list[str]) -> dict[str, str]:
    out = {}
    for item in extra:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(f"unrecognised argument {item!r} (overrides take the form --key=value)")
        key, value = item[2:].split("=", 1)
        key = ALIASES.get(key, key)
        if key in out:
            raise ConfigError(f"command line: key {key!r} given twice")
        out[key] = value
    return out


def _load(args, overrides, required) -> ExperimentConfig:
    if args.config is not None:
        return parse_config(args.config, overrides, required=required)
    return build_config([], "command line", Path.cwd(), required=required, overrides=overrides)


def _cmd_riemann(cfg: ExperimentConfig, half: bool) -> int:
    law = cfg.law()
    kinetic = cfg.kinetic(law)
    if half:
        fan = solve_half(law, kinetic, State(cfg["riemann.v0"], cfg["riemann.w0"]), cfg["riemann.side"])
    else:
        fan = solve_riemann(law, kinetic, State(cfg["riemann.vL"], cfg["riemann.wL"]),
                            State(cfg["riemann.vR"], cfg["riemann.wR"]))
    print(format_fan(law, fan))
    if cfg["riemann.t"] is not None:
        if cfg["riemann.output"] is None:
            raise ConfigError("riemann.t needs riemann.output")
        xs = np.linspace(cfg["riemann.xmin"], cfg["riemann.xmax"], cfg["riemann.samples"])
        write_fan_samples(fan, cfg["riemann.t"], xs, cfg["riemann.output"])
    return 0


def _outputs(cfg: ExperimentConfig) -> tuple[Path, str]:
    return Path(cfg["output.dir"]), cfg["output.prefix"]


def _cmd_run(cfg: ExperimentConfig) -> int:
    law = cfg.law()
    kinetic = cfg.kinetic(law)
    data = cfg.initial_data(law, kinetic)
    r = glimm_run(law, kinetic, data, cfg.glimm_config())
    out, prefix = _outputs(cfg)
    times = cfg["output.snapshots"] or (0.0, cfg["time.t_end"])
    write_snapshot(r, times, out / f"{prefix}_snapshots.csv")
    if cfg["output.track"]:
        write_track(r, out / f"{prefix}_track.csv")
    if cfg["output.diag"]:
        write_diag(r, out / f"{prefix}_diag.csv", cfg["output.K"], cfg["output.bumps"], cfg["output.bump_seed"])
    (out / f"{prefix}_config.txt").write_text(cfg.to_text())
    print(f"levels {len(r.levels)} tau {_fmt(r.tau)} lambda {_fmt(r.lam)} written to {out}")
    return 0


def check_run(r: GlimmRun, K: float | None = None, bumps: int = 50, bump_seed: int = 0):
    """Invariant checks on one run: ``(name, passed, detail)`` triples plus the diagnostics rows."""
    rows, K_used, series = diagnostics_table(r, K, bumps, bump_seed)
    results = []
    chi = r.chi
    tracked = ~np.isnan(chi)
    if np.any(tracked):
        t = r.times[tracked]
        c = chi[tracked]
        gap = np.abs(c[:, None] - c[None, :]) - (r.lam * np.abs(t[:, None] - t[None, :]) + 2.0 * r.h)
        results.append(("boundary Lipschitz bound", bool(np.max(gap) <= 1e-12), f"max excess {np.max(gap):.3e}"))
        cd = r.chidot[tracked]
        results.append(("boundary slope within lambda", bool(np.all(np.abs(cd) <= r.lam)), f"max |chidot| {np.max(np.abs(cd)):.6g}"))
    kres = np.array([row[9] for row in rows], dtype=float)
    kmax = float(np.nanmax(kres)) if np.any(~np.isnan(kres)) else 0.0
    results.append(("kinetic residual <= 1e-9", kmax <= 1e-9, f"max {kmax:.3e}"))
    viol = diag.monotonicity_violations(series, K_used)
    results.append((f"L+KQ and B+KQ non-increasing (K={_fmt(K_used)})", not viol, f"{len(viol)} violations"))
    return results, rows


def _cmd_check(cfg: ExperimentConfig) -> int:
    law = cfg.law()
    kinetic = cfg.kinetic(law)
    data = cfg.initial_data(law, kinetic)
    r = glimm_run(law, kinetic, data, cfg.glimm_config())
    results, rows = check_run(r, cfg["output.K"], cfg["output.bumps"], cfg["output.bump_seed"])
    out, prefix = _outputs(cfg)
    write_csv(out / f"{prefix}_diag.csv", DIAG_HEADER, rows)
    ok = True
    for name, passed, detail in results:
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return 0 if ok else 2


def _cmd_converge(cfg: ExperimentConfig) -> int:
    rows = run_convergence_study(cfg)
    out, prefix = _outputs(cfg)
    write_csv(out / f"{prefix}_converge.csv", CONVERGE_HEADER, rows)
    print(" ".join(CONVERGE_HEADER))
    for row in rows:
        print(" ".join(_fmt(x) for x in row))
    return 0 if all(row[-1] == "ok" for row in rows) else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phasebound", description="Phase-boundary Riemann solvers and Glimm scheme.",
                                epilog="Any configuration key can be overridden with --key=value.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("riemann", "solve a whole-line Riemann problem"),
                       ("riemann-half", "solve a Riemann problem at a fixed end (--side=left|right)"),
                       ("run", "run the Glimm scheme and write snapshots, track and diagnostics"),
                       ("check", "run the Glimm scheme and check the stability invariants"),
                       ("converge", "run a mesh-refinement study")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("config", nargs="?", type=Path, help="flat key = value configuration file")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    material = ("material.k1", "material.k3", "material.wM", "material.wm")
    try:
        overrides = _split_overrides(extra)
        if args.command in ("riemann", "riemann-half"):
            cfg = _load(args, overrides, material)
            return _cmd_riemann(cfg, args.command == "riemann-half")
        cfg = _load(args, overrides, material + RUN_KEYS)
        return {"run": _cmd_run, "check": _cmd_check, "converge": _cmd_converge}[args.command](cfg)
    except (GlimmError, RiemannError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
