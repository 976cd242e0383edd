"""Command line front end covering the pipeline from corpus to serving.

Each subcommand reads an optional TOML config file named with --config;
command line flags override config values, which override built-in
defaults. Config sections are named after the subcommand with dashes
turned into underscores ([synth_data], [preprocess], [train], [serve]);
the three eval-* subcommands share one [eval] section.

Exit codes: 0 on success, 1 for a bad invocation or bad configuration,
2 for a failure while doing the work.
"""

from __future__ import annotations

import argparse
import difflib
import json
import math
import sys
from dataclasses import replace
from itertools import combinations, permutations
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:         # python < 3.11
    import tomli as tomllib

import numpy as np

from .errors import ConfigError, MotionStyleError, ParseError
from .evaluation import (DEFAULT_THRESHOLDS, AbilityMatrix, StyleClassifier,
                         format_matrix, interpolation_eval, make_run_dir,
                         replay_suite, style_mse, transition_eval,
                         write_ability_matrix, write_mse_table,
                         write_replay_csv)
from .features import (DEFAULT_STYLES, StyleSpec, build_dataset,
                       generate_synthetic_corpus, load_dataset, save_dataset)
from .models import ModelConfig, read_checkpoint
from .motion import parse_bvh, write_bvh
from .nn import OptimizerConfig
from .runtime import serve as run_service
from .training import SamplingSchedule, TrainConfig, train


class UsageError(Exception):
    """Bad command line or config file; maps to exit code 1."""


_KNOWN_FLAGS: set = set()

_STYLE_FIELDS = ("name", "stride_length", "cadence", "arm_swing",
                 "torso_lean", "bounce")
_EVAL_KEYS = {"data", "checkpoint", "out", "replay_threshold", "trigger_s",
              "settle_s", "duration_s", "interp_seconds"}


class _Parser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting the process."""

    def error(self, message):
        for token in message.replace(",", " ").split():
            if token.startswith("--"):
                near = difflib.get_close_matches(token, sorted(_KNOWN_FLAGS),
                                                 n=1)
                if near:
                    message += f" (did you mean {near[0]}?)"
                break
        raise UsageError(message)


def _flag(parser, *names, **kwargs):
    parser.add_argument(*names, **kwargs)
    _KNOWN_FLAGS.update(n for n in names if n.startswith("--"))


def _load_section(path, *names) -> dict:
    """Read one (possibly nested) table from a TOML config file."""
    if path is None:
        return {}
    file = Path(path)
    if not file.is_file():
        raise UsageError(f"config file {path} does not exist")
    try:
        with open(file, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config file {path} is not valid TOML: {exc}")
    for depth, name in enumerate(names):
        data = data.get(name, {})
        if not isinstance(data, dict):
            raise UsageError(
                f"config section [{'.'.join(names[:depth + 1])}] "
                "must be a table")
    return data


def _check_keys(section: str, table: dict, allowed) -> None:
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        hints = []
        for key in unknown:
            near = difflib.get_close_matches(key, sorted(allowed), n=1)
            hints.append(key + (f" (did you mean {near[0]}?)" if near else ""))
        raise UsageError(f"unknown key(s) in [{section}]: " + ", ".join(hints))


def _pick(cli_value, table: dict, key: str, default):
    if cli_value is not None:
        return cli_value
    return table.get(key, default)


def _require(value, what: str, section: str, key: str):
    if value is None:
        raise UsageError(f"{what} is required (flag or `{key}` "
                         f"under [{section}])")
    return value


def _existing_file(path, what: str) -> Path:
    file = Path(path)
    if not file.is_file():
        raise UsageError(f"{what} {path} does not exist")
    return file


def _finite_or_none(value):
    value = float(value)
    return value if math.isfinite(value) else None


# ---------------------------------------------------------------- synth-data

def _style_specs(raw):
    """Resolve the config/CLI style selection to StyleSpec tuples."""
    if raw is None:
        return DEFAULT_STYLES
    by_name = {s.name: s for s in DEFAULT_STYLES}
    specs = []
    for item in raw:
        if isinstance(item, str):
            if item not in by_name:
                raise UsageError(f"unknown style {item!r}, built-ins are: "
                                 + ", ".join(s.name for s in DEFAULT_STYLES))
            specs.append(by_name[item])
        elif isinstance(item, dict):
            _check_keys("synth_data.styles", item, _STYLE_FIELDS)
            missing = [f for f in _STYLE_FIELDS if f not in item]
            if missing:
                raise UsageError("style table is missing: "
                                 + ", ".join(missing))
            specs.append(StyleSpec(**item))
        else:
            raise UsageError("styles entries must be names or tables")
    return tuple(specs)


def _cmd_synth_data(args) -> int:
    table = _load_section(args.config, "synth_data")
    _check_keys("synth_data", table,
                {"out", "styles", "seconds", "fps", "seed"})
    out = _require(_pick(args.out, table, "out", None),
                   "--out", "synth_data", "out")
    raw_styles = args.styles.split(",") if args.styles is not None \
        else table.get("styles")
    specs = _style_specs(raw_styles)
    seconds = float(_pick(args.seconds, table, "seconds", 15.0))
    fps = int(_pick(args.fps, table, "fps", 60))
    seed = int(_pick(args.seed, table, "seed", 0))

    clips = generate_synthetic_corpus(specs, seconds, fps, seed)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for clip in clips:
        (out_dir / f"{clip.name}.bvh").write_text(write_bvh(clip))
        labels = {
            "style": clip.style_label,
            "action": [int(a) for a in clip.action_labels],
            "contact": [[bool(c) for c in row]
                        for row in clip.contact_labels],
        }
        (out_dir / f"{clip.name}.json").write_text(
            json.dumps(labels, sort_keys=True) + "\n")
    manifest = {"fps": fps, "seconds_per_style": seconds, "seed": seed,
                "styles": [s.name for s in specs],
                "clips": [c.name for c in clips]}
    (out_dir / "corpus.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    print(f"wrote {len(clips)} clips to {out_dir}")
    return 0


# ---------------------------------------------------------------- preprocess

def _cmd_preprocess(args) -> int:
    table = _load_section(args.config, "preprocess")
    _check_keys("preprocess", table, {"in", "out"})
    src = _require(_pick(args.in_dir, table, "in", None),
                   "--in", "preprocess", "in")
    out = _require(_pick(args.out, table, "out", None),
                   "--out", "preprocess", "out")
    src_dir = Path(src)
    if not src_dir.is_dir():
        raise UsageError(f"input directory {src} does not exist")

    clips = []
    for bvh_path in sorted(src_dir.glob("*.bvh")):
        sidecar = bvh_path.with_suffix(".json")
        if not sidecar.is_file():
            raise ParseError(f"{bvh_path.name} has no label sidecar "
                             f"{sidecar.name}")
        clip = parse_bvh(bvh_path.read_text())
        try:
            labels = json.loads(sidecar.read_text())
            style = labels["style"]
            action = np.asarray(labels["action"], dtype=np.int64)
            contact = np.asarray(labels["contact"], dtype=bool)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad label sidecar {sidecar.name}: {exc}") \
                from exc
        clips.append(replace(clip, name=bvh_path.stem, style_label=style,
                             action_labels=action, contact_labels=contact))

    ds = build_dataset(clips)
    save_dataset(ds, out)
    print(f"dataset: {ds.n_frames} frames from {len(ds.clip_names)} clips, "
          f"styles {', '.join(ds.style_names)}; wrote {out}")
    return 0


# --------------------------------------------------------------------- train

def _cmd_train(args) -> int:
    table = _load_section(args.config, "train")
    _check_keys("train", table,
                {"data", "out", "epochs", "batch_size", "rollout_length",
                 "seed", "learning_rate", "weight_decay", "telemetry",
                 "model", "schedule"})
    model_table = table.get("model", {})
    sched_table = table.get("schedule", {})
    if not isinstance(model_table, dict) or not isinstance(sched_table, dict):
        raise UsageError("[train.model] and [train.schedule] must be tables")
    _check_keys("train.model", model_table,
                {"variant", "n_experts", "n_moe_layers", "moe_hidden",
                 "gating_hidden", "dropout_rate", "tcn_channels",
                 "tcn_kernel", "history_frames", "win_std_floor"})
    _check_keys("train.schedule", sched_table,
                {"p_start", "p_end", "ramp_epochs", "reverse"})

    data = _require(_pick(args.data, table, "data", None),
                    "--data", "train", "data")
    out = _require(_pick(args.out, table, "out", None),
                   "--out", "train", "out")
    _existing_file(data, "data file")

    model_kwargs = dict(model_table)
    if args.variant is not None:
        model_kwargs["variant"] = args.variant
    if "tcn_channels" in model_kwargs:
        model_kwargs["tcn_channels"] = tuple(
            int(c) for c in model_kwargs["tcn_channels"])
    optim_kwargs = {}
    if "learning_rate" in table:
        optim_kwargs["learning_rate"] = float(table["learning_rate"])
    if "weight_decay" in table:
        optim_kwargs["weight_decay"] = float(table["weight_decay"])
    try:
        cfg = TrainConfig(
            model=ModelConfig(**model_kwargs),
            batch_size=int(_pick(args.batch_size, table, "batch_size", 64)),
            epochs=int(_pick(args.epochs, table, "epochs", 100)),
            rollout_length=int(table.get("rollout_length", 8)),
            schedule=SamplingSchedule(**sched_table),
            optimizer=OptimizerConfig(**optim_kwargs),
            seed=int(_pick(args.seed, table, "seed", 0)),
        ).validated()
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad train config: {exc}") from exc

    ds = load_dataset(data)
    telemetry = _pick(args.telemetry, table, "telemetry", None)
    model, report = train(ds, cfg, telemetry_path=telemetry,
                          checkpoint_path=out)
    print(f"trained {model.variant} for {cfg.epochs} epochs in "
          f"{report.wall_seconds:.1f}s, final loss "
          f"{report.epoch_loss[-1]:.6f}; wrote {out}")
    return 0


# -------------------------------------------------------------------- eval-*

def _eval_setup(args, command: str):
    """Shared [eval] section handling; returns everything eval-* needs."""
    table = _load_section(args.config, "eval")
    _check_keys("eval", table, _EVAL_KEYS)
    data = _require(_pick(args.data, table, "data", None),
                    "--data", "eval", "data")
    ckpt = _require(_pick(args.checkpoint, table, "checkpoint", None),
                    "--checkpoint", "eval", "checkpoint")
    out_base = _pick(args.out, table, "out", "runs")
    _existing_file(data, "data file")
    _existing_file(ckpt, "checkpoint")

    thresholds = dict(DEFAULT_THRESHOLDS)
    if "replay_threshold" in table:
        thresholds["replay_mse_over_target_variance"] = \
            float(table["replay_threshold"])

    ds = load_dataset(data)
    model = read_checkpoint(ckpt)
    run_config = {"command": command, "data": str(data),
                  "checkpoint": str(ckpt), "variant": model.variant,
                  "thresholds": thresholds}
    return ds, model, table, thresholds, out_base, run_config


def _cmd_eval_replay(args) -> int:
    ds, model, table, thresholds, out_base, run_config = \
        _eval_setup(args, "eval-replay")
    results = replay_suite(model, ds)
    run_dir = make_run_dir(out_base, run_config)
    seen = set()
    for result in results:
        if result.style not in seen:       # one error curve per style
            seen.add(result.style)
            write_replay_csv(run_dir, result)
    write_mse_table(run_dir, results)

    target = float(ds.pose.var(axis=0).mean())
    factor = thresholds["replay_mse_over_target_variance"]
    pooled = style_mse(results)
    ok = all(mse < factor * target for mse in pooled.values())
    matrix = AbilityMatrix({model.variant: {"replay_ok": ok}}, thresholds)
    write_ability_matrix(run_dir, matrix)

    diverged = {r.style for r in results if r.diverged}
    for style in sorted(pooled):
        note = "  (diverged)" if style in diverged else ""
        print(f"replay {style}: mse {pooled[style]:.6f}{note}")
    print(f"mean pose channel variance {target:.6f}, threshold factor "
          f"{factor}, replay_ok: {ok}")
    print(f"artifacts in {run_dir}")
    return 0


def _cmd_eval_transfer(args) -> int:
    ds, model, table, thresholds, out_base, run_config = \
        _eval_setup(args, "eval-transfer")
    if (args.source is None) != (args.target is None):
        raise UsageError("--source and --target must be given together")
    trigger_s = float(table.get("trigger_s", 2.0))
    settle_s = float(table.get("settle_s", 1.0))
    duration_s = float(table.get("duration_s", 1.0))
    if args.source is not None:
        pairs = [(args.source, args.target)]
    else:
        pairs = list(permutations(ds.style_names, 2))

    classifier = StyleClassifier.fit(ds)
    runs = [transition_eval(model, ds, source, target, classifier,
                            trigger_s=trigger_s, settle_s=settle_s,
                            duration_s=duration_s)
            for source, target in pairs]

    run_dir = make_run_dir(out_base, run_config)
    report = {"variant": model.variant, "trigger_s": trigger_s,
              "settle_s": settle_s, "duration_s": duration_s,
              "runs": [{"source": r.source, "target": r.target,
                        "passed": r.passed, "completed": r.completed,
                        "classified": r.classified,
                        "continuity": _finite_or_none(r.continuity),
                        "steady_state": _finite_or_none(r.steady_state),
                        "continuity_factor": r.continuity_factor}
                       for r in runs]}
    (run_dir / "transitions.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n")
    ok = all(r.passed for r in runs)
    matrix = AbilityMatrix({model.variant: {"transition_ok": ok}}, thresholds)
    write_ability_matrix(run_dir, matrix)

    for r in runs:
        verdict = "pass" if r.passed else "FAIL"
        print(f"transition {r.source} -> {r.target}: {verdict} "
              f"(classified {r.classified or 'nothing'})")
    print(f"transition_ok: {ok}")
    print(f"artifacts in {run_dir}")
    return 0


def _cmd_eval_interp(args) -> int:
    ds, model, table, thresholds, out_base, run_config = \
        _eval_setup(args, "eval-interp")
    interp_seconds = float(table.get("interp_seconds", 3.0))
    duration = int(round(interp_seconds * ds.fps))

    classifier = StyleClassifier.fit(ds)
    runs = [interpolation_eval(model, ds, a, b, classifier, duration)
            for a, b in combinations(ds.style_names, 2)]

    run_dir = make_run_dir(out_base, run_config)
    report = {"variant": model.variant, "duration_frames": duration,
              "runs": [{"parent_a": r.parent_a, "parent_b": r.parent_b,
                        "passed": r.passed, "completed": r.completed,
                        "bounded": r.bounded, "classified": r.classified,
                        "margins": [_finite_or_none(m) for m in r.margins],
                        "references": [float(v) for v in r.references]}
                       for r in runs]}
    (run_dir / "interpolation.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n")
    ok = all(r.passed for r in runs)
    matrix = AbilityMatrix({model.variant: {"interpolation_ok": ok}},
                           thresholds)
    write_ability_matrix(run_dir, matrix)

    for r in runs:
        verdict = "pass" if r.passed else "FAIL"
        print(f"interpolation {r.parent_a} + {r.parent_b}: {verdict} "
              f"(classified {r.classified or 'nothing'})")
    print(f"interpolation_ok: {ok}")
    print(f"artifacts in {run_dir}")
    return 0


# --------------------------------------------------------------------- serve

def _cmd_serve(args) -> int:
    table = _load_section(args.config, "serve")
    _check_keys("serve", table, {"checkpoint", "host", "port", "fps",
                                 "record"})
    ckpt = _require(_pick(args.checkpoint, table, "checkpoint", None),
                    "--checkpoint", "serve", "checkpoint")
    _existing_file(ckpt, "checkpoint")
    host = _pick(args.host, table, "host", "127.0.0.1")
    port = int(_pick(args.port, table, "port", 8765))
    fps = _pick(args.fps, table, "fps", None)
    record = _pick(args.record, table, "record", None)

    model = read_checkpoint(ckpt)
    shown_fps = float(fps) if fps is not None else model.meta.fps
    print(f"serving {model.variant} at ws://{host}:{port}/session, "
          f"{shown_fps:g} fps", flush=True)
    run_service(model, host, port,
                fps=float(fps) if fps is not None else None,
                record_dir=record)
    return 0


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="motionstyle",
        description="style-aware motion synthesis: corpus generation, "
                    "preprocessing, training, evaluation and serving")
    subs = parser.add_subparsers(dest="command", metavar="command",
                                 required=True)

    def add(name, func, help_text):
        sub = subs.add_parser(name, help=help_text, description=help_text)
        sub.set_defaults(func=func)
        _flag(sub, "--config", metavar="TOML",
              help="config file; flags override its values")
        return sub

    sub = add("synth-data", _cmd_synth_data,
              "generate the synthetic multi-style corpus as BVH clips "
              "with JSON label sidecars")
    _flag(sub, "--out", metavar="DIR", help="corpus output directory")
    _flag(sub, "--styles", metavar="NAMES",
          help="comma separated built-in style names")
    _flag(sub, "--seconds", type=float, metavar="S",
          help="seconds per style clip")
    _flag(sub, "--fps", type=int)
    _flag(sub, "--seed", type=int)

    sub = add("preprocess", _cmd_preprocess,
              "featurize a labeled BVH corpus into a training dataset")
    _flag(sub, "--in", dest="in_dir", metavar="DIR",
          help="corpus directory from synth-data")
    _flag(sub, "--out", metavar="FILE", help="dataset file to write")

    sub = add("train", _cmd_train,
              "train a synthesizer variant on a preprocessed dataset")
    _flag(sub, "--data", metavar="FILE", help="dataset from preprocess")
    _flag(sub, "--out", metavar="FILE", help="checkpoint file to write")
    _flag(sub, "--variant", choices=("phase", "tcn", "tcn_win"))
    _flag(sub, "--epochs", type=int)
    _flag(sub, "--batch-size", type=int)
    _flag(sub, "--seed", type=int)
    _flag(sub, "--telemetry", metavar="CSV",
          help="write per-epoch loss telemetry here")

    for name, func, text in (
            ("eval-replay", _cmd_eval_replay,
             "replay training clips under recorded controls and report "
             "per-style reconstruction error"),
            ("eval-transfer", _cmd_eval_transfer,
             "run style transition evaluations between style pairs"),
            ("eval-interp", _cmd_eval_interp,
             "evaluate half-and-half style interpolations")):
        sub = add(name, func, text)
        _flag(sub, "--data", metavar="FILE", help="dataset from preprocess")
        _flag(sub, "--checkpoint", metavar="FILE", help="trained model")
        _flag(sub, "--out", metavar="DIR",
              help="base directory for run artifacts (default: runs)")
        if name == "eval-transfer":
            _flag(sub, "--source", metavar="STYLE",
                  help="run a single pair: source style")
            _flag(sub, "--target", metavar="STYLE",
                  help="run a single pair: target style")

    sub = add("serve", _cmd_serve,
              "serve a trained model over a websocket for live control")
    _flag(sub, "--checkpoint", metavar="FILE", help="trained model")
    _flag(sub, "--host")
    _flag(sub, "--port", type=int)
    _flag(sub, "--fps", type=float,
          help="serve rate; defaults to the training corpus rate")
    _flag(sub, "--record", metavar="DIR",
          help="write one session recording per connection here")

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MotionStyleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
