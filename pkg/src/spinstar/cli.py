"""Scenario orchestration and serialization: config ingestion, series and
report generation, CSV/JSON output with a checksummed run manifest.

Subcommands: evolve, distance, envelope, timescales, rates, measure, verify.
A scenario is described by a flat ``key = value`` text file (or JSON with the
same keys); the subcommand chooses which outputs to produce.  Output is
deterministic for a fixed config and seed: grids are evaluated in fixed
chunk order regardless of thread count, and floats are rendered with a fixed
significant-digit format.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import coefficients, envelope_general, envelope_x, envelope_z
from .distances import (X_PAIR, Z_PAIR, DistanceSeries, PairCoefficients,
                        blp_measure_windowed, distance_general, series_from_grid,
                        sigma_series)
from .dynamics import (ORACLE_MAX_BATH, BlochVector, default_threads, evolve_bloch,
                       full_hilbert_evolve, propagator_grid, propagator_sample)
from .errors import (AlphaXDegenerateError, ConfigError, DimensionTooLargeError,
                     InsufficientSpanError, NoPeakFoundError, ResonanceError,
                     SpinStarError)
from .master_eq import rates_grid
from .model import ModelParams, compute_spectrum, thermal_weights
from .timescales import fwhm_analytic, fwhm_numeric, period
from .asymptotics import xi_sum_closed, xi_sum_direct

__all__ = ["ScenarioConfig", "RunManifest", "parse_config", "run_scenario",
           "verify_mode", "main"]

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class ScenarioConfig:
    """Resolved scenario description (model, grid, pair, toggles, output)."""

    n_bath: int = 4
    g: float = 1.0
    omega_s: float = 3.0
    omega_b: float = 1.0
    t_bath: float = 10.0

    t_start: float = 0.0
    t_end: float = 10.0
    n_points: int = 2001
    step: float = 0.0  # 0 = derive from n_points and the fast frequency

    pair: str = "z"  # z | x | general
    alpha_x: float | None = None
    alpha_z: float | None = None
    bloch1: tuple[float, float, float] | None = None
    bloch2: tuple[float, float, float] | None = None

    exact: bool = False
    envelope: bool = False
    timescales: bool = False
    rates: bool = False
    measure: bool = False
    verify: bool = False

    out: str = "spinstar_run"
    format: str = "csv"  # csv | json
    precision: int = 12
    seed: int = 0
    threads: int | None = None

    def model_params(self) -> ModelParams:
        return ModelParams(n_bath=self.n_bath, g=self.g, omega_s=self.omega_s,
                           omega_b=self.omega_b, t_bath=self.t_bath)

    def pair_coefficients(self) -> PairCoefficients:
        if self.pair == "z":
            return Z_PAIR
        if self.pair == "x":
            return X_PAIR
        if self.pair != "general":
            raise ConfigError(f"pair must be z, x, or general, got {self.pair!r}")
        if self.bloch1 is not None and self.bloch2 is not None:
            v1 = BlochVector(*self.bloch1)
            v2 = BlochVector(*self.bloch2)
            for v in (v1, v2):
                if v.norm() > 1.0 + 1e-9:
                    raise ConfigError(f"Bloch vector {v} lies outside the unit ball")
            return PairCoefficients.from_bloch_pair(v1, v2)
        if self.alpha_x is None or self.alpha_z is None:
            raise ConfigError("general pair needs alpha_x and alpha_z, or bloch1/bloch2")
        return PairCoefficients(alpha_x=self.alpha_x, alpha_z=self.alpha_z,
                                description="configured pair")

    def grid(self, fast_freq: float | None) -> tuple[float, float, int]:
        """(t0, dt, n): explicit step wins; otherwise resolve the fast scale."""
        if self.t_end <= self.t_start:
            raise ConfigError("t_end must exceed t_start")
        if self.n_points < 2:
            raise ConfigError("n_points must be at least 2")
        span = self.t_end - self.t_start
        if self.step > 0:
            dt = self.step
        else:
            dt = span / (self.n_points - 1)
            if fast_freq and fast_freq > 0:
                dt = min(math.pi / (8.0 * fast_freq), dt)
        n = int(math.floor(span / dt + 1e-9)) + 1
        return self.t_start, dt, n


_BOOL_KEYS = {"exact", "envelope", "timescales", "rates", "measure", "verify"}
_INT_KEYS = {"n_bath", "n_points", "precision", "seed", "threads"}
_FLOAT_KEYS = {"g", "omega_s", "omega_b", "t_bath", "t_start", "t_end", "step",
               "alpha_x", "alpha_z"}
_VEC_KEYS = {"bloch1", "bloch2"}
_STR_KEYS = {"pair", "out", "format"}


def _coerce(key: str, raw) -> object:
    if key in _BOOL_KEYS:
        if isinstance(raw, bool):
            return raw
        token = str(raw).strip().lower()
        if token in _TRUE:
            return True
        if token in _FALSE:
            return False
        raise ConfigError(f"field {key!r}: expected a boolean, got {raw!r}")
    if key in _INT_KEYS:
        return int(str(raw))
    if key in _FLOAT_KEYS:
        return float(str(raw))
    if key in _VEC_KEYS:
        if isinstance(raw, (list, tuple)):
            vals = [float(v) for v in raw]
        else:
            vals = [float(v) for v in str(raw).split(",")]
        if len(vals) != 3:
            raise ConfigError(f"field {key!r}: expected 3 components, got {raw!r}")
        return tuple(vals)
    if key in _STR_KEYS:
        return str(raw)
    raise ConfigError(f"unknown config key {key!r}")


def parse_config(path: str | Path) -> ScenarioConfig:
    """Load a scenario from flat ``key = value`` text or a JSON document."""
    text = Path(path).read_text()
    cfg = ScenarioConfig()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        items = data.items()
        for key, raw in items:
            try:
                setattr(cfg, key, _coerce(key, raw))
            except ConfigError as exc:
                raise ConfigError(f"{path}: {exc}") from None
        return cfg
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, value = line.partition("=")
        try:
            setattr(cfg, key.strip(), _coerce(key.strip(), value.strip()))
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
    return cfg


@dataclass
class RunManifest:
    """Metadata describing one scenario run and its emitted data files."""

    config: dict
    version: str
    wall_time_s: float
    validity: dict
    nonexistence: dict
    files: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "validity": self.validity,
            "nonexistence": self.nonexistence,
            "files": self.files,
        }


def _fmt(value: float, precision: int) -> str:
    return format(value, f".{precision}g")


def _write_csv(path: Path, columns: dict[str, np.ndarray], precision: int) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[c]) for c in names]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*arrays):
            fh.write(",".join(
                str(int(v)) if isinstance(v, (bool, np.bool_)) else _fmt(float(v), precision)
                for v in row) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _config_echo(cfg: ScenarioConfig) -> dict:
    echo = {}
    for f in fields(cfg):
        echo[f.name] = getattr(cfg, f.name)
    return echo


def run_scenario(cfg: ScenarioConfig) -> RunManifest:
    """Produce every series and report the toggles request, plus a manifest.

    CSV format writes <out>.csv (series), <out>_report.json (reports, only
    when any were produced), and <out>_manifest.json.  JSON format writes a
    single <out>.json document {"manifest", "series", "reports"}.
    """
    start = time.perf_counter()
    params = cfg.model_params()
    spec = compute_spectrum(params)
    weights = thermal_weights(params)
    pc = cfg.pair_coefficients()

    validity: dict = {}
    nonexistence: dict = {}
    coeffs = None
    try:
        coeffs = coefficients(params)
        validity["validity_ok"] = coeffs.validity_ok
        validity["a3_finite"] = math.isfinite(coeffs.a3)
        fast = coeffs.nu0
    except ResonanceError as exc:
        validity["validity_ok"] = False
        validity["resonance"] = str(exc)
        fast = None

    t0, dt, n = cfg.grid(fast)
    threads = cfg.threads

    columns: dict[str, np.ndarray] = {}
    reports: dict = {}
    times = t0 + dt * np.arange(n)
    columns["t"] = times

    need_series = cfg.exact or cfg.measure or cfg.timescales
    series = None
    grid = None
    if need_series:
        grid = propagator_grid(spec, weights, t0, dt, n,
                               need_x=pc.alpha_x > 0, need_z=pc.alpha_z > 0,
                               threads=threads)
        series = series_from_grid(grid, pc)
        if cfg.exact:
            columns["d_exact"] = series.d_values

    if cfg.bloch1 is not None and cfg.exact:
        # evolve toggle piggybacks on exact when an initial vector is supplied
        g_full = grid if (grid is not None and grid.x1 is not None and grid.z1 is not None) \
            else propagator_grid(spec, weights, t0, dt, n, threads=threads)
        x0, y0, z0 = cfg.bloch1
        columns["x"] = x0 * g_full.x1 + y0 * g_full.x2
        columns["y"] = y0 * g_full.x1 - x0 * g_full.x2
        columns["z"] = z0 * g_full.z1 + g_full.z2

    if cfg.envelope:
        if coeffs is None or not coeffs.validity_ok:
            validity["envelope_skipped"] = "outside the expansion validity region"
        else:
            try:
                if cfg.pair == "z":
                    env = envelope_z(params, coeffs, times)
                elif cfg.pair == "x":
                    env = envelope_x(params, coeffs, times)
                else:
                    env = envelope_general(params, coeffs, pc, times)
                columns["env_mean"] = env.mean
                columns["env_upper"] = env.upper
                columns["env_lower"] = env.lower
                if env.simplified_upper is not None:
                    columns["env_upper_simplified"] = env.simplified_upper
                    columns["env_lower_simplified"] = env.simplified_lower
            except ResonanceError as exc:
                validity["envelope_skipped"] = str(exc)

    if cfg.rates:
        rg = rates_grid(spec, weights, t0, dt, n, threads=threads)
        for name in ("omega", "gamma_d", "gamma_minus", "gamma_plus"):
            columns[name] = rg[name]
        columns["singular"] = rg["singular"].astype(int)
        columns["any_negative"] = rg["any_negative"].astype(int)

    if cfg.measure and series is not None:
        series = sigma_series(series)
        columns["sigma"] = series.sigma_values
        value = blp_measure_windowed(series)
        rep = period(params, coeffs)
        window = float(times[-1] - times[0])
        per_period = value * rep.t_cr / window if math.isfinite(rep.t_cr) else None
        reports["measure"] = {
            "blp_windowed": value,
            "window": window,
            "measure_per_period": per_period,
            "normalization_note": "per-period normalization (window T_cr) is a "
                                  "reporting choice; the infinite-time integral diverges",
        }

    if cfg.timescales:
        rep = period(params, coeffs)
        nonexistence["pattern_exists"] = rep.exists
        nonexistence["scale_separation"] = rep.scale_separation
        ts_report: dict = {
            "t_cr": rep.t_cr,
            "exists": rep.exists,
            "regime": rep.regime,
            "c_ratio": rep.c_ratio,
            "approx_large_gn": rep.approx_large_gn,
            "approx_order_one_c": rep.approx_order_one_c,
            "approx_small_gn": rep.approx_small_gn,
            "scale_separation": rep.scale_separation,
        }
        if coeffs is not None and rep.exists:
            try:
                fa = fwhm_analytic(params, coeffs, pc)
                ts_report["analytic"] = {
                    "t_p": fa.t_p, "t_r": fa.t_r, "t_c": fa.t_c, "ratio": fa.ratio,
                    "h_plus": fa.h_plus, "h_minus": fa.h_minus, "w_value": fa.w_value,
                }
            except (AlphaXDegenerateError, SpinStarError) as exc:
                ts_report["analytic_error"] = str(exc)
        if series is not None:
            try:
                window = 4.0 * math.pi / coeffs.nu0 if coeffs is not None else None
                fn = fwhm_numeric(series, window=window)
                ts_report["numeric"] = {
                    "t_cr": fn.t_cr, "t_p": fn.t_p, "t_r": fn.t_r,
                    "t_c": fn.t_c, "ratio": fn.ratio,
                }
            except (NoPeakFoundError, InsufficientSpanError) as exc:
                ts_report["numeric_error"] = str(exc)
        reports["timescales"] = ts_report

    if cfg.verify:
        reports["verify"] = verify_report(cfg)

    manifest = RunManifest(
        config=_config_echo(cfg),
        version=__version__,
        wall_time_s=0.0,
        validity=validity,
        nonexistence=nonexistence,
    )

    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if cfg.format == "csv":
        series_path = out.with_suffix(".csv")
        _write_csv(series_path, columns, cfg.precision)
        manifest.files.append({"path": str(series_path), "sha256": _sha256(series_path)})
        if reports:
            report_path = Path(str(out) + "_report.json")
            report_path.write_text(json.dumps(reports, indent=2, sort_keys=True) + "\n")
            manifest.files.append({"path": str(report_path), "sha256": _sha256(report_path)})
        manifest.wall_time_s = time.perf_counter() - start
        manifest_path = Path(str(out) + "_manifest.json")
        manifest_path.write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True,
                                            default=str) + "\n")
    elif cfg.format == "json":
        manifest.wall_time_s = time.perf_counter() - start
        doc = {
            "manifest": manifest.to_dict(),
            "series": [{
                "name": "series",
                "columns": list(columns),
                "data": {k: [_fmt(float(v), cfg.precision) for v in np.asarray(vals)]
                         for k, vals in columns.items()},
            }],
            "reports": reports,
        }
        out.with_suffix(".json").write_text(json.dumps(doc, indent=2, sort_keys=True,
                                                       default=str) + "\n")
    else:
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    return manifest


# ---------------------------------------------------------------------------
# verification mode
# ---------------------------------------------------------------------------

def _check(name: str, dev: float, tol: float) -> dict:
    return {"name": name, "max_deviation": dev, "tolerance": tol,
            "passed": bool(dev <= tol)}


def verify_report(cfg: ScenarioConfig) -> dict:
    """Oracle-equivalence, ladder-identity, and FWHM cross-checks.

    Dynamics and distance checks run at the configured bath size (must be
    <= ORACLE_MAX_BATH); the ladder identities and the FWHM cross-check run
    at a fixed large-N reference scale where the expansions apply.  All
    random draws derive from the configured seed.
    """
    if cfg.n_bath > ORACLE_MAX_BATH:
        raise DimensionTooLargeError(
            f"verify mode needs n_bath <= {ORACLE_MAX_BATH}, got {cfg.n_bath}")
    rng = np.random.default_rng(cfg.seed)
    checks = []

    # dynamics + distances against the full-Hilbert oracle
    params = cfg.model_params()
    spec = compute_spectrum(params)
    weights = thermal_weights(params)
    dev_dyn = 0.0
    dev_dist = 0.0
    for _ in range(5):
        t = float(rng.uniform(0.0, 20.0))
        sample = propagator_sample(spec, weights, t)
        for _ in range(3):
            v = rng.normal(size=3)
            v /= max(1.0, float(np.linalg.norm(v)) + 1e-12)
            v0 = BlochVector.from_array(v)
            got = evolve_bloch(sample, v0).as_array()
            want = full_hilbert_evolve(params, v0, t).as_array()
            dev_dyn = max(dev_dyn, float(np.abs(got - want).max()))
        va = BlochVector.from_array(rng.normal(size=3) / 2.0)
        vb = BlochVector.from_array(rng.normal(size=3) / 2.0)
        pc = PairCoefficients.from_bloch_pair(va, vb)
        d_formula = distance_general(sample, pc)
        ra = full_hilbert_evolve(params, va, t).as_array()
        rb = full_hilbert_evolve(params, vb, t).as_array()
        d_oracle = 0.5 * float(np.linalg.norm(ra - rb))
        dev_dist = max(dev_dist, abs(d_formula - d_oracle))
    checks.append(_check("dynamics_oracle_equivalence", dev_dyn, 1e-9))
    checks.append(_check("distance_oracle_equivalence", dev_dist, 1e-9))

    # ladder-sum identities at the reference large-N scale
    ref = ModelParams(n_bath=1000, g=1.0, omega_s=3.0, omega_b=1.0, t_bath=10.0)
    ref_co = coefficients(ref)
    dev_xi = 0.0
    for t in rng.uniform(0.0, 4.0 * math.pi / abs(ref_co.nu_cr), size=20):
        for j in range(3):
            direct = xi_sum_direct(ref, ref_co, j, float(t))
            closed = xi_sum_closed(ref, ref_co, j, float(t))
            dev_xi = max(dev_xi, abs(closed - direct) / abs(direct))
    checks.append(_check("xi_sum_identities_rel", dev_xi, 1e-3))

    # FWHM analytic vs numeric at a reduced desk scale
    fp = ModelParams(n_bath=400, g=1.0, omega_s=3.0, omega_b=1.0, t_bath=10.0)
    fco = coefficients(fp)
    fpc = PairCoefficients(alpha_x=0.188, alpha_z=3.614)
    fspec = compute_spectrum(fp)
    fweights = thermal_weights(fp)
    t_cr = 2.0 * math.pi / abs(fco.nu_cr)
    dt = math.pi / (4.0 * fco.nu0)
    n = int(2.35 * t_cr / dt)
    fgrid = propagator_grid(fspec, fweights, 0.0, dt, n, threads=cfg.threads)
    fseries = series_from_grid(fgrid, fpc)
    fa = fwhm_analytic(fp, fco, fpc)
    fn = fwhm_numeric(fseries, window=4.0 * math.pi / fco.nu0)
    dev_period = abs(fn.t_cr - t_cr) / t_cr
    dev_tr = abs(fn.t_r - fa.t_r) / fn.t_r
    checks.append(_check("fwhm_period_rel", dev_period, 1e-2))
    checks.append(_check("fwhm_revival_time_rel", dev_tr, 5e-2))

    return {"seed": cfg.seed, "n_bath": cfg.n_bath,
            "passed": all(c["passed"] for c in checks), "checks": checks}


def verify_mode(cfg: ScenarioConfig) -> dict:
    """Run the verification suite and write its report."""
    report = verify_report(cfg)
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    path = Path(str(out) + "_verify.json")
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_SUBCOMMANDS = ("evolve", "distance", "envelope", "timescales", "rates",
                "measure", "verify")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinstar",
        description="Central-spin information-flow dynamics: exact series, "
                    "envelopes, time scales, master-equation rates.")
    parser.add_argument("--version", action="version", version=f"spinstar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", required=True, help="scenario config file (flat key=value or JSON)")
        p.add_argument("--out", default=None, help="output path stem")
        p.add_argument("--format", default=None, choices=("csv", "json"))
        p.add_argument("--precision", default=None, type=int, help="significant digits (default 12)")
        p.add_argument("--seed", default=None, type=int, help="seed for randomized checks")
        p.add_argument("--threads", default=None, type=int,
                       help="worker threads (default: SPINSTAR_THREADS or cpu count)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        for key in ("out", "format", "precision", "seed", "threads"):
            val = getattr(args, key)
            if val is not None:
                setattr(cfg, key, val)
        if cfg.threads is None:
            cfg.threads = default_threads()

        command = args.command
        if command == "verify":
            report = verify_mode(cfg)
            for check in report["checks"]:
                status = "pass" if check["passed"] else "FAIL"
                print(f"[{status}] {check['name']}: dev={check['max_deviation']:.3e} "
                      f"tol={check['tolerance']:.0e}")
            return 0 if report["passed"] else 1

        cfg.exact = command in ("evolve", "distance", "envelope", "timescales",
                                "measure") or cfg.exact
        cfg.envelope = command == "envelope" or cfg.envelope
        cfg.timescales = command == "timescales" or cfg.timescales
        cfg.rates = command == "rates" or cfg.rates
        cfg.measure = command == "measure" or cfg.measure
        if command == "evolve" and cfg.bloch1 is None:
            cfg.bloch1 = (0.0, 0.0, 1.0)
        manifest = run_scenario(cfg)
        for entry in manifest.files:
            print(f"wrote {entry['path']}")
        return 0
    except (ConfigError, DimensionTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SpinStarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
