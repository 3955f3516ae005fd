"""Command-line interface: one executable, reproducible run manifests.

Subcommands: stats, simulate, sweep, estimate-sa, estimate-ee, gof,
degen-check, enumerate. Every run with --out writes its outputs plus a
manifest recording the resolved settings, input digests and seed; rerunning
with --manifest reproduces the outputs bit-exactly and refuses if any input
file has drifted (unless --force).

Exit codes: 0 success, 1 usage error, 2 estimation divergence or a
non-existent MLE (machine-detectable degeneracy), 3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import degeneracy_check, default_gof_suite, gof
from .effects import (BoundaryStatisticError, Model, UnknownEffectError,
                      parse_effect)
from .estimation import (CollinearEffectsError, EeConfig, SaConfig,
                         default_theta0, estimate_ee, estimate_sa)
from .experiments import SweepConfig, detect_transition, sweep
from .graph import (CovariateError, Graph, GraphFormatError,
                    descriptive_stats, load_covariates, load_graph,
                    outcome_degree_stats, outcome_from, parse_attr_types)
from .oracle import enumerate_distribution
from .sampler import SamplerConfig, simulate

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_IO = 0, 1, 2, 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; we reserve 2
        raise UsageError(message)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def parse_config_file(path) -> dict:
    """Declarative config: ``key = value`` lines plus effect lines
    ``effect Name [theta=X] [fixed]``; ``#`` comments. One format for every
    subcommand. ``theta`` is the simulation value or the estimation start;
    ``fixed`` pins the parameter during estimation."""
    settings: dict = {"effects": []}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("effect "):
                parts = line.split()
                theta, fixed = None, False
                for extra in parts[2:]:
                    if extra.startswith("theta="):
                        theta = float(extra[len("theta="):])
                    elif extra == "fixed":
                        fixed = True
                    else:
                        raise UsageError(f"{path}: line {lineno}: expected "
                                         "'effect Name [theta=X] [fixed]'")
                if len(parts) < 2:
                    raise UsageError(f"{path}: line {lineno}: effect line "
                                     "needs a name")
                if fixed and theta is None:
                    raise UsageError(f"{path}: line {lineno}: a fixed effect "
                                     "needs an explicit theta")
                settings["effects"].append((parts[1], theta, fixed))
            elif "=" in line:
                key, val = (s.strip() for s in line.split("=", 1))
                settings[key.replace("-", "_")] = val
            else:
                raise UsageError(f"{path}: line {lineno}: not a 'key = value' "
                                 "or 'effect ...' line")
    return settings


class RunSettings:
    """Resolved settings: flags override config-file entries."""

    def __init__(self, args: argparse.Namespace, manifest: dict | None):
        self.from_config: dict = {}
        if manifest is not None:
            self.from_config.update(manifest["settings"])
            self.from_config["effects"] = [tuple(e) for e in manifest["settings"].get("effects", [])]
        config_path = getattr(args, "config", None)
        if config_path:
            self.from_config.update(parse_config_file(config_path))
        self.args = args

    def get(self, key: str, default=None, cast=str):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        if key in self.from_config and self.from_config[key] is not None:
            val = self.from_config[key]
            if cast is bool and isinstance(val, str):
                return val.lower() in ("1", "true", "yes")
            return cast(val) if isinstance(val, str) else val
        return default

    def require(self, key: str, cast=str):
        val = self.get(key, None, cast)
        if val is None:
            raise UsageError(f"missing required setting --{key.replace('_', '-')}")
        return val

    def effect_list(self) -> list[tuple[str, float | None, bool]]:
        names = getattr(self.args, "effects", None)
        if names:
            thetas = getattr(self.args, "theta", None)
            specs = [s.strip() for s in names.split(",")]
            tvals = [float(t) for t in thetas.split(",")] if thetas \
                else [None] * len(specs)
            if len(tvals) != len(specs):
                raise UsageError("--theta must list one value per effect")
            return [(s, t, False) for s, t in zip(specs, tvals)]
        if self.from_config.get("effects"):
            return [tuple(e) for e in self.from_config["effects"]]
        raise UsageError("no effects given; use --effects or config 'effect' lines")

    def snapshot(self, extra: dict) -> dict:
        snap = dict(self.from_config)
        for key, val in vars(self.args).items():
            if key in ("func", "config", "manifest", "force", "out") or val is None:
                continue
            snap[key] = val
        if getattr(self, "resolved_effects", None) is not None:
            snap["effects"] = self.resolved_effects
            snap.pop("theta", None)
        snap.update(extra)
        return snap


def _load_inputs(s: RunSettings):
    graph_path = s.require("graph")
    directed = bool(s.get("directed", False, bool))
    g = load_graph(graph_path, directed=directed)
    inputs = {str(graph_path): _sha256(graph_path)}
    w = None
    attrs = s.get("attrs")
    if attrs:
        types = parse_attr_types(s.get("attr_types", "", str) or "")
        w = load_covariates(attrs, g.n, types=types or None)
        inputs[str(attrs)] = _sha256(attrs)
    y = None
    outcome = s.get("outcome")
    if outcome:
        if w is None:
            raise UsageError("--outcome needs --attrs")
        y = outcome_from(w, outcome)
    return g, w, y, inputs


def _model(s: RunSettings, g: Graph, w) -> Model:
    """Model from settings; theta entries may be None (estimation default)."""
    triples = s.effect_list()
    effects, theta, fixed = [], [], []
    for text, t, fx in triples:
        effects.append(parse_effect(text, covariates=w))
        theta.append(0.0 if t is None else float(t))
        fixed.append(bool(fx))
    m = Model(effects, np.array(theta))
    m.validate(g, w)
    s.resolved_effects = [(e.name, t, bool(fx))
                          for e, (_, t, fx) in zip(effects, triples)]
    s.theta_given = [t is not None for _, t, _ in triples]
    s.fixed_mask = fixed
    return m


def _sampler_cfg(s: RunSettings, g: Graph, default_initial="observed") -> SamplerConfig:
    return SamplerConfig(
        burn_in=int(s.get("burn_in", 100 * g.n, int)),
        interval=int(s.get("interval", 10 * g.n, int)),
        n_samples=int(s.get("samples", 100, int)),
        seed=int(s.get("seed", 0, int)),
        initial_y=s.get("initial", default_initial),
        store_y=bool(s.get("store_y", False, bool)),
    )


def _write_manifest(out: Path, subcommand: str, settings: dict, inputs: dict,
                    seed: int, outputs: list[str], t0: float) -> None:
    manifest = {
        "tool_version": __version__,
        "subcommand": subcommand,
        "settings": settings,
        "inputs": inputs,
        "seed": seed,
        "outputs": outputs,
        "wall_time_s": round(time.time() - t0, 3),
    }
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, default=str)


def _outdir(s: RunSettings) -> Path | None:
    out = getattr(s.args, "out", None) or s.from_config.get("out")
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _verify_manifest(args) -> dict | None:
    if not getattr(args, "manifest", None):
        return None
    with open(args.manifest) as f:
        manifest = json.load(f)
    if manifest.get("subcommand") != args.subcommand:
        raise UsageError(
            f"manifest records subcommand {manifest.get('subcommand')!r}, "
            f"got {args.subcommand!r}")
    for path, digest in manifest.get("inputs", {}).items():
        current = _sha256(path)
        if current != digest and not args.force:
            raise OSError(
                f"input {path} drifted since the manifest was written "
                "(rerun with --force to accept)")
    return manifest


# --- subcommand handlers -----------------------------------------------------


def cmd_stats(s: RunSettings) -> int:
    t0 = time.time()
    g, w, y, inputs = _load_inputs(s)
    rep = descriptive_stats(g)
    print(rep.to_text())
    orep = None
    if y is not None:
        orep = outcome_degree_stats(g, y)
        print(orep.to_text())
    out = _outdir(s)
    if out:
        (out / "graph_report.txt").write_text(rep.to_text() + "\n")
        with open(out / "graph_report.csv", "w") as f:
            keys = list(rep.as_dict())
            f.write(",".join(keys) + "\n")
            f.write(",".join(str(rep.as_dict()[k]) for k in keys) + "\n")
        outputs = ["graph_report.txt", "graph_report.csv"]
        if orep is not None:
            with open(out / "outcome_report.csv", "w") as f:
                keys = list(orep.as_dict())
                f.write(",".join(keys) + "\n")
                f.write(",".join(repr(orep.as_dict()[k]) for k in keys) + "\n")
            outputs.append("outcome_report.csv")
        if g.labels is not None:
            with open(out / "idmap.csv", "w") as f:
                f.write("label,index\n")
                for i, lab in enumerate(g.labels):
                    f.write(f"{lab},{i}\n")
            outputs.append("idmap.csv")
        _write_manifest(out, "stats", s.snapshot({}), inputs,
                        int(s.get("seed", 0, int)), outputs, t0)
    return EXIT_OK


def cmd_simulate(s: RunSettings) -> int:
    t0 = time.time()
    g, w, y, inputs = _load_inputs(s)
    m = _model(s, g, w)
    cfg = _sampler_cfg(s, g, default_initial="observed" if y is not None else "random:0.5")
    batch = simulate(m, g, w, cfg, y_obs=y)
    out = _outdir(s)
    print(f"simulated {batch.n_samples} samples; acceptance rate "
          f"{batch.provenance['accept_rate']:.3f}")
    if out:
        batch.write_csv(out / "batch.csv")
        _write_manifest(out, "simulate", s.snapshot({"resolved_sampler": cfg.__dict__}),
                        inputs, cfg.seed, ["batch.csv"], t0)
    return EXIT_OK


def cmd_sweep(s: RunSettings) -> int:
    t0 = time.time()
    g, w, y, inputs = _load_inputs(s)
    m = _model(s, g, w)
    varied = parse_effect(s.require("vary"), covariates=w)
    cfg = SweepConfig(
        varied,
        lo=float(s.get("lo", -1.0, float)),
        hi=float(s.get("hi", 1.0, float)),
        step=float(s.get("step", 0.01, float)),
        sampler=_sampler_cfg(s, g, default_initial="random" if y is not None else "random:0.5"),
        threads=s.get("threads", None, int),
    )
    res = sweep(cfg, m, g, w, y_obs=y)
    report = detect_transition(res) if res.thetas.size >= 20 else None
    if report:
        print(report.to_text())
    out = _outdir(s)
    if out:
        res.write_samples_csv(out / "sweep_samples.csv")
        res.write_summary_csv(out / "sweep_summary.csv")
        outputs = ["sweep_samples.csv", "sweep_summary.csv"]
        if report:
            report.write_csv(out / "transition.csv")
            outputs.append("transition.csv")
        _write_manifest(out, "sweep", s.snapshot({}), inputs,
                        cfg.sampler.seed, outputs, t0)
    return EXIT_OK


def _estimate(s: RunSettings, method: str) -> int:
    t0 = time.time()
    g, w, y, inputs = _load_inputs(s)
    if y is None:
        raise UsageError("estimation needs --outcome (a binary attribute column)")
    m = _model(s, g, w)
    seed = int(s.get("seed", 0, int))
    theta0 = default_theta0(m, y)
    for j, given in enumerate(s.theta_given):
        if given:
            theta0[j] = m.theta[j]
    free = tuple(not fx for fx in s.fixed_mask)
    free_arg = free if not all(free) else None
    if method == "sa":
        cfg = SaConfig(
            seed=seed,
            steps_per_update=s.get("steps_per_update", None, int),
            phase1_samples=int(s.get("phase1_samples", 100, int)),
            subphases=int(s.get("subphases", 5, int)),
            updates_per_subphase=int(s.get("updates_per_subphase", 200, int)),
            phase3_samples=int(s.get("phase3_samples", 1000, int)),
            theta0=theta0,
            free=free_arg,
        )
        result = estimate_sa(m, g, w, y, cfg)
    else:
        cfg = EeConfig(
            seed=seed,
            replicates=int(s.get("replicates", 20, int)),
            updates=int(s.get("updates", 2000, int)),
            steps_per_update=s.get("steps_per_update", None, int),
            threads=s.get("threads", None, int),
            theta0=theta0,
            free=free_arg,
        )
        result = estimate_ee(m, g, w, y, cfg)
    print(result.to_text())
    out = _outdir(s)
    if out:
        result.write_csv(out / "estimates.csv")
        outputs = ["estimates.csv"]
        if result.trajectory is not None:
            np.savetxt(out / "trajectory.csv", result.trajectory, delimiter=",",
                       header=",".join(result.effect_names), comments="")
            outputs.append("trajectory.csv")
        _write_manifest(out, f"estimate-{method}", s.snapshot({}), inputs,
                        seed, outputs, t0)
    return EXIT_DEGENERATE if result.diverged else EXIT_OK


def cmd_gof(s: RunSettings) -> int:
    t0 = time.time()
    g, w, y, inputs = _load_inputs(s)
    if y is None:
        raise UsageError("gof needs --outcome")
    m = _model(s, g, w)
    suite_arg = s.get("suite")
    suite = ([parse_effect(t.strip(), covariates=w) for t in suite_arg.split(",")]
             if suite_arg else default_gof_suite(g, m))
    cfg = SamplerConfig(**{**_sampler_cfg(s, g).__dict__, "n_samples":
                           int(s.get("samples", 1000, int))})
    report = gof(m, g, w, y, suite=suite, cfg=cfg)
    print(report.to_text())
    out = _outdir(s)
    if out:
        report.write_csv(out / "gof.csv")
        report.batch.write_csv(out / "gof_batch.csv")
        _write_manifest(out, "gof", s.snapshot({}), inputs, cfg.seed,
                        ["gof.csv", "gof_batch.csv"], t0)
    return EXIT_OK


def cmd_degen_check(s: RunSettings) -> int:
    t0 = time.time()
    g, w, y, inputs = _load_inputs(s)
    if y is None:
        raise UsageError("degen-check needs --outcome")
    m = _model(s, g, w)
    cfg = SamplerConfig(**{**_sampler_cfg(s, g).__dict__, "n_samples":
                           int(s.get("samples", 100, int))})
    check = degeneracy_check(m, g, w, y, cfg=cfg)
    print(check.to_text())
    out = _outdir(s)
    if out:
        check.write_trace_csv(out / "degen_trace.csv")
        check.write_summary_csv(out / "degen_summary.csv")
        _write_manifest(out, "degen-check", s.snapshot({}), inputs, cfg.seed,
                        ["degen_trace.csv", "degen_summary.csv"], t0)
    return EXIT_OK if check.passed else EXIT_DEGENERATE


def cmd_enumerate(s: RunSettings) -> int:
    t0 = time.time()
    g, w, _, inputs = _load_inputs(s)
    m = _model(s, g, w)
    dist = enumerate_distribution(m, g, w)
    print(f"log_kappa = {dist.log_kappa!r}")
    for name, e in zip(dist.effect_names, dist.expected_z):
        print(f"E[{name}] = {e!r}")
    out = _outdir(s)
    if out:
        with open(out / "expected.csv", "w") as f:
            f.write("effect,expected\n")
            for name, e in zip(dist.effect_names, dist.expected_z):
                f.write(f"{name},{e!r}\n")
        np.savetxt(out / "cov.csv", dist.cov_z, delimiter=",",
                   header=",".join(dist.effect_names), comments="")
        with open(out / "enumerate.json", "w") as f:
            json.dump({"log_kappa": dist.log_kappa,
                       "effects": dist.effect_names,
                       "expected_z": dist.expected_z.tolist(),
                       "cov_z": dist.cov_z.tolist()}, f, indent=2)
        _write_manifest(out, "enumerate", s.snapshot({}), inputs,
                        int(s.get("seed", 0, int)),
                        ["expected.csv", "cov.csv", "enumerate.json"], t0)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="alaam", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--graph", help="edge-list file")
        p.add_argument("--directed", action="store_const", const=True, default=None)
        p.add_argument("--attrs", help="attribute file (header row, one row per node)")
        p.add_argument("--attr-types", dest="attr_types",
                       help="column types, e.g. age:continuous,class:categorical")
        p.add_argument("--outcome", help="binary attribute column used as the outcome")
        p.add_argument("--config", help="declarative config file")
        p.add_argument("--manifest", help="rerun from a previous run's manifest")
        p.add_argument("--force", action="store_true",
                       help="rerun even if manifest input digests drifted")
        p.add_argument("--out", help="output directory (outputs + manifest)")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)

    def model_flags(p):
        p.add_argument("--effects", help="comma-separated effect names")
        p.add_argument("--theta", help="comma-separated parameter values")

    def sampler_flags(p):
        p.add_argument("--burn-in", dest="burn_in", type=int)
        p.add_argument("--interval", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--initial", help="observed | zeros | random[:p]")
        p.add_argument("--store-y", dest="store_y", action="store_const", const=True,
                       default=None)

    handlers = {
        "stats": (cmd_stats, ()),
        "simulate": (cmd_simulate, ("model", "sampler")),
        "sweep": (cmd_sweep, ("model", "sampler", "sweep")),
        "estimate-sa": (lambda s: _estimate(s, "sa"), ("model", "estimation")),
        "estimate-ee": (lambda s: _estimate(s, "ee"), ("model", "estimation")),
        "gof": (cmd_gof, ("model", "sampler", "gof")),
        "degen-check": (cmd_degen_check, ("model", "sampler")),
        "enumerate": (cmd_enumerate, ("model",)),
    }
    for name, (func, groups) in handlers.items():
        p = sub.add_parser(name)
        common(p)
        if "model" in groups:
            model_flags(p)
        if "sampler" in groups:
            sampler_flags(p)
        if "sweep" in groups:
            p.add_argument("--vary", help="effect whose parameter is swept")
            p.add_argument("--lo", type=float)
            p.add_argument("--hi", type=float)
            p.add_argument("--step", type=float)
        if "estimation" in groups:
            p.add_argument("--steps-per-update", dest="steps_per_update", type=int)
            p.add_argument("--subphases", type=int)
            p.add_argument("--updates-per-subphase", dest="updates_per_subphase", type=int)
            p.add_argument("--phase1-samples", dest="phase1_samples", type=int)
            p.add_argument("--phase3-samples", dest="phase3_samples", type=int)
            p.add_argument("--replicates", type=int)
            p.add_argument("--updates", type=int)
        if "gof" in groups:
            p.add_argument("--suite", help="comma-separated statistic names")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        manifest = _verify_manifest(args)
        settings = RunSettings(args, manifest)
        return args.func(settings)
    except (UsageError, UnknownEffectError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BoundaryStatisticError, CollinearEffectsError) as exc:
        print(f"degenerate estimation problem: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, GraphFormatError, CovariateError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
