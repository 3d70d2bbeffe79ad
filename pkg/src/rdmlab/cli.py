"""Batch experiment runner with seeded, byte-reproducible outputs.

Configs are plain text with dotted keys::

    experiment = electron-interference
    seed = 7
    splitter.alpha_sq = 0.5
    screen.p_x = 5.0

A JSON manifest written by a previous run is also accepted as a config
source, so every run can be reproduced from its own manifest.  Exit
codes: 0 success, 1 runtime failure, 2 usage/validation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import aharonov_casher as ac
from . import dynamics, grid, optics, rdm, relativity
from .errors import ConfigError, RdmLabError
from .sampling import inverse_cdf_sample

SAMPLE_CHUNK = 65536
TRIAL_CHUNK = 8192


# ----------------------------------------------------------------------
# serialization helpers

def format_number(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "NaN"
        return f"{float(v):.17g}"
    raise TypeError(f"not a number: {v!r}")


def to_json(obj, indent=0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {to_json(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = [f"{pad}  {to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, float, np.integer, np.floating)):
        if isinstance(obj, (float, np.floating)) and math.isnan(obj):
            return '"NaN"'
        return format_number(obj)
    return json.dumps(str(obj))


def write_csv(path, header: str, columns) -> None:
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in zip(*cols):
            fh.write(",".join(format_number(v) if isinstance(v, (int, float, np.integer, np.floating))
                              else str(v) for v in row) + "\n")


# ----------------------------------------------------------------------
# configuration

class Param:
    """One config key: expected type, default, and an optional range check."""

    def __init__(self, type, default=None, check=None, message=""):
        self.type = type
        self.default = default
        self.check = check
        self.message = message


def _power_of_two(v):
    return v >= 16 and (v & (v - 1)) == 0


GRID_PARAMS = {
    "grid.x_min": Param(float, -40.0),
    "grid.x_max": Param(float, 40.0),
    "grid.n_points": Param(int, 1024, _power_of_two, "power of two >= 16 required"),
}

EXPERIMENT_SCHEMAS = {
    "electron-interference": {
        **GRID_PARAMS,
        "splitter.alpha_sq": Param(float, 0.5, lambda v: 0.0 <= v <= 1.0,
                                   "must be in [0,1]"),
        "screen.p_x": Param(float, 5.0, lambda v: v > 0, "must be > 0"),
        "envelope.width": Param(float, 12.0, lambda v: v > 0, "must be > 0"),
        "envelope.center": Param(float, 0.0),
        "n_samples": Param(int, 100_000, lambda v: v >= 1, "must be >= 1"),
    },
    "rdm-sample": {
        **GRID_PARAMS,
        "density": Param(str, "gaussian",
                         lambda v: v in ("uniform", "gaussian", "screen"),
                         "must be one of uniform|gaussian|screen"),
        "gaussian.width": Param(float, 2.0, lambda v: v > 0, "must be > 0"),
        "screen.p_x": Param(float, 5.0, lambda v: v > 0, "must be > 0"),
        "screen.alpha_sq": Param(float, 0.5, lambda v: 0.0 <= v <= 1.0,
                                 "must be in [0,1]"),
        "envelope.width": Param(float, 12.0, lambda v: v > 0, "must be > 0"),
        "n_samples": Param(int, 100_000, lambda v: v >= 1, "must be >= 1"),
    },
    "rdm-trajectory": {
        **GRID_PARAMS,
        "sigma0": Param(float, 1.0, lambda v: v > 0, "must be > 0"),
        "jump_rate": Param(float, 1000.0, lambda v: v > 0, "must be > 0"),
        "t_final": Param(float, 2.0, lambda v: v > 0, "must be > 0"),
        "n_states": Param(int, 21, lambda v: v >= 2, "must be >= 2"),
    },
    "detector-scenario": {
        "alpha_sq": Param(float, 0.64, lambda v: 0.0 <= v <= 1.0, "must be in [0,1]"),
        "rdm.locking": Param(bool, True),
        "trials": Param(int, 100_000, lambda v: v >= 1, "must be >= 1"),
        "t_d2": Param(float, 1.0, lambda v: v >= 0, "must be >= 0"),
        "t_d3": Param(float, 2.0, lambda v: v >= 0, "must be >= 0"),
        "t_d1": Param(float, 3.0, lambda v: v >= 0, "must be >= 0"),
    },
    "relativity-scan": {
        "relativity.c": Param(float, 1.0, lambda v: v > 0, "must be > 0"),
        "speed": Param(float, 0.95, lambda v: v > 0, "must be > 0"),
        "d_max": Param(float, 10.0, lambda v: v > 0, "must be > 0"),
        "d_min_fraction": Param(float, 0.1, lambda v: 0 < v <= 1, "must be in (0,1]"),
        "n_placements": Param(int, 10, lambda v: v >= 1, "must be >= 1"),
    },
    "ac-phase": {
        "field": Param(str, "line-charge",
                       lambda v: v in ("line-charge", "two-channel"),
                       "must be line-charge or two-channel"),
        "lambda": Param(float, 1.0),
        "mu": Param(float, 1.0, lambda v: v != 0, "must be nonzero"),
        "e_mag": Param(float, 0.5, lambda v: v >= 0, "must be >= 0"),
        "channel_length": Param(float, 2.0, lambda v: v > 0, "must be > 0"),
        "quadrature": Param(int, 16, lambda v: v >= 2, "must be >= 2"),
        "loop_csv": Param(str, ""),
    },
    "hydrogen-cloud": {
        "a0": Param(float, 1.0, lambda v: v > 0, "must be > 0"),
        "n_samples": Param(int, 100_000, lambda v: v >= 1, "must be >= 1"),
    },
}


@dataclass
class RunConfig:
    experiment: str
    parameters: dict
    seed: int = 0
    output_dir: Path = Path("out")
    threads: int = 1
    warnings: list = field(default_factory=list)

    def dotted(self) -> dict:
        out = {"experiment": self.experiment, "seed": self.seed}
        out.update(self.parameters)
        return out

    @property
    def config_hash(self) -> str:
        canonical = "\n".join(
            f"{k}={format_number(v) if isinstance(v, (int, float, bool)) else v}"
            for k, v in sorted(self.dotted().items()))
        return hashlib.sha256(canonical.encode()).hexdigest()


def parse_config_text(text: str) -> dict:
    """Dotted key/value lines; values parsed as JSON scalars when possible."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError([f"line {lineno}: expected 'key = value'"])
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            raw[key] = json.loads(value)
        except json.JSONDecodeError:
            raw[key] = value
    return raw


def load_config_source(path: Path) -> dict:
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        data = json.loads(text)
        raw = dict(data.get("config", {}))
        raw.setdefault("experiment", data.get("experiment"))
        raw.setdefault("seed", data.get("seed"))
        return {k: v for k, v in raw.items() if v is not None}
    return parse_config_text(text)


def validate(raw: dict, overrides: dict | None = None) -> RunConfig:
    """Type- and range-check everything before any computation starts.

    All violations are collected and reported together.
    """
    raw = dict(raw)
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    problems = []
    warnings = []

    experiment = raw.pop("experiment", None)
    if experiment is None:
        problems.append("experiment: missing (choose one of "
                        + ", ".join(sorted(EXPERIMENT_SCHEMAS)) + ")")
    elif experiment not in EXPERIMENT_SCHEMAS:
        problems.append(f"experiment: unknown '{experiment}'")

    seed = raw.pop("seed", None)
    if seed is None:
        seed = 0
        warnings.append("seed missing; defaulting to 0")
    elif not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        problems.append("seed: must be a nonnegative integer")
        seed = 0

    output_dir = Path(raw.pop("output_dir", "out"))
    threads = raw.pop("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        problems.append("threads: must be a positive integer")
        threads = 1

    params = {}
    if experiment in EXPERIMENT_SCHEMAS:
        schema = EXPERIMENT_SCHEMAS[experiment]
        for key, spec in schema.items():
            if key in raw:
                value = raw.pop(key)
                if spec.type is float and isinstance(value, int) and not isinstance(value, bool):
                    value = float(value)
                if not isinstance(value, spec.type) or (spec.type is int and isinstance(value, bool)):
                    problems.append(f"{key}: expected {spec.type.__name__}, got {value!r}")
                    continue
            else:
                value = spec.default
            if spec.check is not None and not spec.check(value):
                problems.append(f"{key}: {spec.message} (got {value!r})")
                continue
            params[key] = value
        for key in sorted(raw):
            problems.append(f"{key}: unknown key for experiment '{experiment}'")
        if experiment == "detector-scenario" and not problems:
            if not params["t_d2"] < params["t_d3"]:
                problems.append("t_d2: must be strictly less than t_d3")

    if problems:
        raise ConfigError(problems)
    return RunConfig(experiment, params, seed, output_dir, threads, warnings)


# ----------------------------------------------------------------------
# deterministic chunked sampling (thread-count independent)

def chunked_density_samples(x, density, dx, total, seed, threads) -> np.ndarray:
    sizes = [(i, min(SAMPLE_CHUNK, total - i * SAMPLE_CHUNK))
             for i in range((total + SAMPLE_CHUNK - 1) // SAMPLE_CHUNK)]

    def one(arg):
        idx, count = arg
        rng = np.random.default_rng([seed, idx])
        return inverse_cdf_sample(x, density, dx, count, rng)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, sizes))
    else:
        parts = [one(s) for s in sizes]
    return np.concatenate(parts)


# ----------------------------------------------------------------------
# experiment runners

def _make_grid(p) -> grid.Grid1D:
    return grid.Grid1D(p["grid.x_min"], p["grid.x_max"], p["grid.n_points"])


def run_electron_interference(cfg: RunConfig, out: Path) -> dict:
    p = cfg.parameters
    gr = _make_grid(p)
    alpha = math.sqrt(p["splitter.alpha_sq"])
    env = optics.GaussianEnvelope(p["envelope.center"], p["envelope.width"])
    psi = optics.screen_state(gr, alpha, p["screen.p_x"], env)
    density = grid.probability_density(psi)
    samples = chunked_density_samples(gr.x, density, gr.dx, p["n_samples"],
                                      cfg.seed, cfg.threads)
    pattern = optics.accumulate_screen(samples, gr)
    optics.export_pattern_csv(pattern, out / "pattern.csv")
    beta = math.sqrt(1.0 - alpha**2)
    return {
        "visibility": pattern.visibility,
        "period": pattern.period,
        "visibility_expected": 2.0 * alpha * beta,
        "period_expected": math.pi / p["screen.p_x"],
        "n_samples": p["n_samples"],
    }


def run_rdm_sample(cfg: RunConfig, out: Path) -> dict:
    p = cfg.parameters
    gr = _make_grid(p)
    kind = p["density"]
    if kind == "uniform":
        density = np.ones(gr.n_points)
    elif kind == "gaussian":
        psi = grid.gaussian_packet(gr, width=p["gaussian.width"])
        density = grid.probability_density(psi)
    else:
        alpha = math.sqrt(p["screen.alpha_sq"])
        env = optics.GaussianEnvelope(0.0, p["envelope.width"])
        psi = optics.screen_state(gr, alpha, p["screen.p_x"], env)
        density = grid.probability_density(psi)
    density = density / (density.sum() * gr.dx)
    samples = chunked_density_samples(gr.x, density, gr.dx, p["n_samples"],
                                      cfg.seed, cfg.threads)
    write_csv(out / "samples.csv", "x", [samples])
    return {"density": kind, "n_samples": p["n_samples"],
            "mean": float(samples.mean()), "std": float(samples.std())}


def run_rdm_trajectory(cfg: RunConfig, out: Path) -> dict:
    p = cfg.parameters
    gr = _make_grid(p)
    psi = grid.gaussian_packet(gr, width=p["sigma0"])
    times = np.linspace(0.0, p["t_final"], p["n_states"])
    states = [(0.0, psi)]
    for t_prev, t in zip(times, times[1:]):
        psi = dynamics.evolve(psi, dynamics.FREE, t - t_prev).final
        states.append((float(t), psi))
    traj = rdm.simulate_trajectory(states, p["jump_rate"], cfg.seed,
                                   t_final=p["t_final"])
    rdm.export_trajectory_csv(traj, out / "trajectory.csv")
    return {"n_jumps": int(len(traj.jumps)), "jump_rate": p["jump_rate"],
            "t_final": p["t_final"]}


def run_detector_scenario(cfg: RunConfig, out: Path) -> dict:
    p = cfg.parameters
    detectors = [
        rdm.DetectorSpec("D1", 1, p["t_d1"]),
        rdm.DetectorSpec("D2", 2, p["t_d2"]),
        rdm.DetectorSpec("D3", 2, p["t_d3"]),
    ]
    alpha = math.sqrt(p["alpha_sq"])
    total = p["trials"]
    chunks = [(i * TRIAL_CHUNK, min(TRIAL_CHUNK, total - i * TRIAL_CHUNK))
              for i in range((total + TRIAL_CHUNK - 1) // TRIAL_CHUNK)]

    def one(arg):
        offset, count = arg
        return rdm.run_detector_scenario(alpha, detectors, p["rdm.locking"],
                                         count, cfg.seed, trial_offset=offset)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(one, chunks))
    else:
        outcomes = [one(c) for c in chunks]

    clicks = {d.id: 0 for d in detectors}
    d3_after = 0
    for o in outcomes:
        for k, v in o.clicks.items():
            clicks[k] += v
        d3_after += o.d3_after_silent_d2
    return {"trials": total, "clicks": clicks, "d3_after_silent_d2": d3_after,
            "mode": "locking-on" if p["rdm.locking"] else "locking-off",
            "alpha_sq": p["alpha_sq"], "seed": cfg.seed}


def run_relativity_scan(cfg: RunConfig, out: Path) -> dict:
    p = cfg.parameters
    c = p["relativity.c"]
    positions = np.linspace(p["d_max"], p["d_max"] * p["d_min_fraction"],
                            p["n_placements"])
    records = relativity.fig3_scan(p["speed"], positions, c)
    relativity.export_scan_csv(records, out / "scan.csv")
    residual = 0.0
    for r in records:
        if r.boost is not None:
            v0 = relativity.lorentz_transform(records[0].v_event, r.boost)
            e0 = relativity.lorentz_transform(r.e_event, r.boost)
            residual = max(residual, abs(v0.t - e0.t))
    return {
        "n_placements": p["n_placements"],
        "all_spacelike": all(r.interval_class == "spacelike" for r in records),
        "all_e_before_v": all(r.e_before_v for r in records),
        "max_simultaneity_residual": residual,
    }


def run_ac_phase(cfg: RunConfig, out: Path) -> dict:
    p = cfg.parameters
    spec = ac.NeutronSpec(mu=p["mu"])
    units = grid.NATURAL_UNITS
    if p["field"] == "line-charge":
        fld = ac.LineCharge(p["lambda"], (0.0, 0.0))
        if p["loop_csv"]:
            loop = ac.load_loop_csv(p["loop_csv"])
        else:
            loop = ac.rectangle_loop(-2.0, -1.5, 2.0, 1.5)
        phase = ac.ac_phase(loop, fld, spec, units, p["quadrature"])
        analytic = spec.mu * p["lambda"] / (units.eps0 * units.hbar * units.c**2)
    else:
        phase = ac.two_channel_loop(p["e_mag"], p["channel_length"], spec,
                                    units, p["quadrature"])
        analytic = ac.two_channel_phase(p["e_mag"], p["channel_length"], spec, units)
    return {"field": p["field"], "phase": phase, "phase_analytic": analytic,
            "abs_error": abs(phase - analytic)}


def run_hydrogen_cloud(cfg: RunConfig, out: Path) -> dict:
    p = cfg.parameters
    radii = rdm.sample_hydrogen_ground_state(p["n_samples"], p["a0"], cfg.seed)
    write_csv(out / "radii.csv", "r", [radii])
    counts, edges = np.histogram(radii, bins=200, range=(0.0, 8.0 * p["a0"]))
    modal = 0.5 * (edges[np.argmax(counts)] + edges[np.argmax(counts) + 1])
    return {"n_samples": p["n_samples"], "a0": p["a0"],
            "mean_radius": float(radii.mean()), "modal_radius": float(modal)}


RUNNERS = {
    "electron-interference": run_electron_interference,
    "rdm-sample": run_rdm_sample,
    "rdm-trajectory": run_rdm_trajectory,
    "detector-scenario": run_detector_scenario,
    "relativity-scan": run_relativity_scan,
    "ac-phase": run_ac_phase,
    "hydrogen-cloud": run_hydrogen_cloud,
}


def run(cfg: RunConfig, quiet: bool = False) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = RUNNERS[cfg.experiment](cfg, out)
    summary = {"experiment": cfg.experiment, "seed": cfg.seed,
               "config_hash": cfg.config_hash, "results": results}
    (out / "summary.json").write_text(to_json(summary) + "\n")
    manifest = {"experiment": cfg.experiment, "seed": cfg.seed,
                "config": {k: v for k, v in cfg.dotted().items()
                           if k not in ("experiment", "seed")},
                "config_hash": cfg.config_hash,
                "versions": {"rdmlab": __version__,
                             "numpy": np.__version__,
                             "python": sys.version.split()[0]}}
    (out / "manifest.json").write_text(to_json(manifest) + "\n")
    if not quiet:
        print(f"{cfg.experiment}: wrote {out}/summary.json")
        for w in cfg.warnings:
            print(f"warning: {w}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rdmlab", description="Run a seeded experiment scenario.")
    parser.add_argument("--config", type=Path, help="config file (text or manifest JSON)")
    parser.add_argument("--experiment", choices=sorted(EXPERIMENT_SCHEMAS),
                        help="experiment name (overrides config)")
    parser.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        raw = load_config_source(args.config) if args.config else {}
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return 2

    overrides = {"experiment": args.experiment, "seed": args.seed}
    try:
        cfg = validate(raw, overrides)
    except ConfigError as exc:
        for p in exc.problems:
            print(f"error: {p}", file=sys.stderr)
        return 2
    if args.out is not None:
        cfg.output_dir = args.out
    cfg.threads = args.threads

    try:
        return run(cfg, quiet=args.quiet)
    except RdmLabError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
