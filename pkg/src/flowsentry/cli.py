"""Command-line front door for the whole pipeline.

Every command works inside one run directory (``--out``): simulate writes
the detector log there, dataset/train/eval/explain/triage/pca chain off the
artifacts already present.  Stages are glued together by content digests
(each consumer refuses inputs whose sha256 does not match the manifest it
was built against), and a cumulative ``run.json`` records what was produced.
All outputs are deterministic given the same seeds: rerunning a command
reproduces its files byte for byte.

Exit codes: 0 success, 1 runtime failure (I/O, digest mismatch, bad data),
2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._util import read_json, sha256_file, write_json
from .dataset import WINDOW_ROWS, DatasetBundle, build_dataset, load_bundle, save_bundle
from .errors import ConfigError, DigestMismatchError, FlowSentryError
from .neuralnet import CnnModel, evaluate, load_model, predict_in_batches, save_model, train
from .simnet import FEATURE_NAMES, load_record_log, load_scenario, run_scenario
from .triage import TriageThresholds, build_report, collect_errors
from .xai import (
    BaselinePolicy,
    control_baseline,
    kernel_shap,
    lime_explain,
    occlusion_map,
    pca_fit,
    pca_project,
    select_components,
)

RECORDS_CSV = "records.csv"
RECORDS_MANIFEST = "records.json"
DATASET_MANIFEST = "dataset.json"
MODEL_FILE = "model.bin"
MODEL_MANIFEST = "model.json"
METRICS_FILE = "metrics.json"
TRIAGE_FILE = "triage.json"
PCA_CSV = "pca.csv"
PCA_MANIFEST = "pca.json"
RUN_MANIFEST = "run.json"

_SECTION_KEYS = {
    "dataset": {"rows", "layers", "seed", "ratio", "balance", "k_neighbors"},
    "train": {"epochs", "batch_size", "lr", "seed"},
    "explain": {
        "n_samples",
        "n_coalitions",
        "patch_rows",
        "patch_cols",
        "stride",
        "baseline",
        "top_k",
        "seed",
    },
    "triage": {
        "recover_seconds",
        "low_traffic_percentile",
        "threshold",
        "n_coalitions",
        "seed",
        "attach_shap",
    },
    "pca": {"components", "variance_target", "split"},
}


# --------------------------------------------------------------------------
# shared plumbing

def _section(args, name: str) -> dict:
    """Defaults for one command from the scenario file, if one was given."""
    if getattr(args, "config", None) is None:
        return {}
    _, _, _, raw = load_scenario(args.config)
    section = raw.get(name, {})
    unknown = set(section) - _SECTION_KEYS[name]
    if unknown:
        raise ConfigError(f"unknown [{name}] keys: {sorted(unknown)}")
    return section


def _opt(flag_value, section: dict, key: str, fallback):
    if flag_value is not None:
        return flag_value
    if key in section:
        return section[key]
    return fallback


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise ConfigError(f"{path} not found; run `flowsentry {hint}` first")
    return path


def _update_run_manifest(out: Path, stage: str, payload: dict) -> None:
    path = out / RUN_MANIFEST
    run = read_json(path) if path.exists() else {"kind": "run_manifest", "stages": {}}
    run["stages"][stage] = payload
    write_json(path, run)


def _file_digests(out: Path, names) -> dict:
    return {name: sha256_file(out / name) for name in names}


def _load_records(out: Path):
    csv_path = _require(out / RECORDS_CSV, "simulate")
    manifest_path = _require(out / RECORDS_MANIFEST, "simulate")
    manifest = read_json(manifest_path)
    actual = sha256_file(csv_path)
    if actual != manifest.get("csv_digest"):
        raise DigestMismatchError(
            f"{csv_path}: digest {actual} does not match its manifest; "
            "the record log was modified after simulation"
        )
    return load_record_log(csv_path, manifest_path)


def _load_dataset(out: Path) -> tuple[DatasetBundle, str]:
    manifest_path = _require(out / DATASET_MANIFEST, "dataset")
    bundle = load_bundle(manifest_path)
    return bundle, sha256_file(manifest_path)


def _load_model_for(out: Path, dataset_digest: str) -> CnnModel:
    path = _require(out / MODEL_FILE, "train")
    manifest_path = out / MODEL_MANIFEST
    if manifest_path.exists():
        recorded = read_json(manifest_path).get("model_digest")
        actual = sha256_file(path)
        if recorded is not None and recorded != actual:
            raise DigestMismatchError(
                f"{path}: digest {actual} does not match {MODEL_MANIFEST}; "
                "the model file was modified after training"
            )
    model = load_model(path)
    if model.stats_digest != dataset_digest:
        raise DigestMismatchError(
            f"{path} was trained against dataset {model.stats_digest[:12]}..., "
            f"but {DATASET_MANIFEST} now digests to {dataset_digest[:12]}...; "
            "retrain or restore the matching dataset"
        )
    return model


def _control_column_means(bundle: DatasetBundle) -> np.ndarray:
    if bundle.control_rows.shape[0] == 0:
        raise ConfigError("dataset has no control rows to build a baseline from")
    return bundle.control_rows.mean(axis=0)


# --------------------------------------------------------------------------
# commands

def cmd_simulate(args) -> int:
    if args.config is None:
        raise ConfigError("simulate needs --config pointing at a scenario file")
    config, attacks, duration, _ = load_scenario(args.config)
    if args.seed is not None:
        config.seed = args.seed
        config.validate()
    out = _out_dir(args)

    log = run_scenario(config, attacks, duration)
    log.save(out / RECORDS_CSV, out / RECORDS_MANIFEST)

    print(
        f"simulated {duration} s on a {config.grid_rows}x{config.grid_cols} grid "
        f"(seed {config.seed}): {len(log.records)} records from intersection "
        f"{log.monitored_intersection} ({len(log.detector_ids)} detectors)"
    )
    if log.timeline:
        for event in log.timeline:
            print(
                f"  attack {event['mode']} on intersection {event['target']} "
                f"during [{event['start']:g}, {event['end']:g}) s"
            )
    else:
        print("  no attacks scheduled")

    _update_run_manifest(
        out,
        "simulate",
        {
            "seed": config.seed,
            "duration": duration,
            "record_count": len(log.records),
            "config_digest": log.config_digest,
            "files": _file_digests(out, [RECORDS_CSV, RECORDS_MANIFEST]),
        },
    )
    return 0


def cmd_dataset(args) -> int:
    out = _out_dir(args)
    section = _section(args, "dataset")
    rows = int(_opt(args.rows, section, "rows", 18))
    layers = int(_opt(args.layers, section, "layers", 1))
    seed = int(_opt(args.seed, section, "seed", 0))
    ratio = float(_opt(args.ratio, section, "ratio", 0.8))
    k_neighbors = int(_opt(args.k_neighbors, section, "k_neighbors", 5))
    balance = False if args.no_balance else bool(section.get("balance", True))
    if rows not in WINDOW_ROWS:
        raise ConfigError(f"rows must be one of {WINDOW_ROWS}, got {rows}")
    if layers not in (1, 3):
        raise ConfigError(f"layers must be 1 or 3, got {layers}")

    log = _load_records(out)
    bundle = build_dataset(
        log,
        rows,
        seed=seed,
        layered=layers == 3,
        balance=balance,
        ratio=ratio,
        k_neighbors=k_neighbors,
    )
    manifest_path = save_bundle(bundle, out)

    train_labels = bundle.split.train_labels
    test_labels = bundle.split.test_labels
    print(
        f"dataset: {rows}-row windows, {bundle.channels} channel(s), "
        f"{len(train_labels)} train / {len(test_labels)} test samples"
        f"{' (minority oversampled)' if bundle.smote_applied else ''}"
    )
    print(
        f"  train hacked/normal: {int((train_labels == 0).sum())}/{int((train_labels == 1).sum())}"
        f"   test hacked/normal: {int((test_labels == 0).sum())}/{int((test_labels == 1).sum())}"
    )

    _update_run_manifest(
        out,
        "dataset",
        {
            "rows": rows,
            "channels": bundle.channels,
            "seed": seed,
            "ratio": ratio,
            "balance": balance,
            "source_digest": bundle.source_digest,
            "files": _file_digests(
                out, [DATASET_MANIFEST, "train.bin", "test.bin", "control.bin"]
            ),
        },
    )
    print(f"wrote {manifest_path}")
    return 0


def cmd_train(args) -> int:
    out = _out_dir(args)
    section = _section(args, "train")
    epochs = int(_opt(args.epochs, section, "epochs", 10))
    batch_size = int(_opt(args.batch_size, section, "batch_size", 32))
    lr = float(_opt(args.lr, section, "lr", 0.001))
    seed = int(_opt(args.seed, section, "seed", 0))
    if epochs < 1 or batch_size < 1:
        raise ConfigError("epochs and batch size must be positive")

    bundle, dataset_digest = _load_dataset(out)
    model = CnnModel(
        bundle.split.train_inputs.shape[1:], stats_digest=dataset_digest, seed=seed
    )
    model, history = train(
        model,
        bundle.split.train_inputs,
        bundle.split.train_labels,
        epochs=epochs,
        batch_size=batch_size,
        seed=seed,
        lr=lr,
    )
    save_model(model, out / MODEL_FILE)
    write_json(
        out / MODEL_MANIFEST,
        {
            "kind": "model",
            "input_shape": list(model.input_shape),
            "epochs": epochs,
            "batch_size": batch_size,
            "lr": lr,
            "seed": seed,
            "dataset_digest": dataset_digest,
            "loss_history": history,
            "model_digest": sha256_file(out / MODEL_FILE),
        },
    )

    print(
        f"trained {epochs} epochs on {bundle.split.train_inputs.shape[0]} samples "
        f"(batch {batch_size}, lr {lr:g}, seed {seed}); "
        f"mean loss {history[0]:.4f} -> {history[-1]:.4f}"
    )
    _update_run_manifest(
        out,
        "train",
        {
            "epochs": epochs,
            "batch_size": batch_size,
            "lr": lr,
            "seed": seed,
            "dataset_digest": dataset_digest,
            "files": _file_digests(out, [MODEL_FILE, MODEL_MANIFEST]),
        },
    )
    return 0


def cmd_eval(args) -> int:
    out = _out_dir(args)
    threshold = args.threshold if args.threshold is not None else 0.5

    bundle, dataset_digest = _load_dataset(out)
    model = _load_model_for(out, dataset_digest)
    metrics = evaluate(
        model, bundle.split.test_inputs, bundle.split.test_labels, threshold=threshold
    )
    write_json(
        out / METRICS_FILE,
        {
            "kind": "metrics",
            "threshold": threshold,
            "dataset_digest": dataset_digest,
            "model_digest": sha256_file(out / MODEL_FILE),
            "metrics": metrics.as_dict(),
        },
    )

    print(f"test windows: {metrics.n} ({bundle.rows} rows each)")
    print(metrics.format_table())
    _update_run_manifest(
        out,
        "eval",
        {
            "threshold": threshold,
            "accuracy": metrics.accuracy,
            "files": _file_digests(out, [METRICS_FILE]),
        },
    )
    return 0


def _explain_baseline(bundle: DatasetBundle, sample_shape: tuple, mode: str) -> np.ndarray:
    if mode == "zero":
        return np.zeros(sample_shape)
    means = _control_column_means(bundle)
    return np.broadcast_to(means, sample_shape).copy()


def _locate_flat(flat_index: int, shape: tuple) -> dict:
    channels, rows, cols = shape
    channel, rest = divmod(flat_index, rows * cols)
    row, col = divmod(rest, cols)
    return {"channel": channel, "row": row, "feature": FEATURE_NAMES[col]}


def _write_grid_csv(path: Path, grid: np.ndarray) -> None:
    lines = [",".join(FEATURE_NAMES)]
    for row in grid:
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_explain(args) -> int:
    out = _out_dir(args)
    section = _section(args, "explain")
    n_samples = int(_opt(args.samples, section, "n_samples", 1000))
    n_coalitions = int(_opt(args.coalitions, section, "n_coalitions", 2048))
    patch_rows = int(_opt(args.patch_rows, section, "patch_rows", 1))
    patch_cols = int(_opt(args.patch_cols, section, "patch_cols", 1))
    stride = int(_opt(args.stride, section, "stride", 1))
    top_k = int(_opt(args.top_k, section, "top_k", 10))
    seed = int(_opt(args.seed, section, "seed", 0))
    baseline_mode = _opt(args.baseline, section, "baseline", "zero")
    if baseline_mode not in ("zero", "control"):
        raise ConfigError(f"baseline must be 'zero' or 'control', got {baseline_mode!r}")

    bundle, dataset_digest = _load_dataset(out)
    model = _load_model_for(out, dataset_digest)
    inputs = bundle.split.test_inputs
    labels = bundle.split.test_labels

    if args.errors:
        probs = predict_in_batches(model.predict, inputs)
        predicted = (probs >= 0.5).astype(np.int64)
        indices = [int(i) for i in np.nonzero(predicted != labels)[0]]
        if not indices:
            print("no misclassified test samples; nothing to explain")
            return 0
    else:
        indices = args.sample if args.sample else [0]
        for i in indices:
            if not 0 <= i < inputs.shape[0]:
                raise ConfigError(
                    f"sample {i} out of range; test split has {inputs.shape[0]} samples"
                )

    xai_dir = out / "xai"
    xai_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for i in indices:
        x = inputs[i]
        meta = {
            "sample_index": i,
            "window_begin": float(bundle.test_window_begin[i]),
            "window_end": float(bundle.test_window_end[i]),
            "true_label": int(labels[i]),
            "probability": float(model.predict(x[None])[0]),
            "dataset_digest": dataset_digest,
        }
        if args.method == "occlusion":
            if baseline_mode == "control":
                if bundle.control is None:
                    raise ConfigError(
                        "control baseline needs the per-row control statistics; "
                        "rebuild the dataset with layers=3 or use --baseline zero"
                    )
                base = control_baseline(
                    np.asarray(bundle.control.mean),
                    np.asarray(bundle.control.std),
                    x.shape[0],
                )
                att = occlusion_map(
                    model,
                    x,
                    patch=(patch_rows, patch_cols),
                    stride=stride,
                    policy=BaselinePolicy.CONTROL_MEAN,
                    baseline=base,
                )
            else:
                att = occlusion_map(model, x, patch=(patch_rows, patch_cols), stride=stride)
            csv_path = xai_dir / f"occlusion_{i:04d}.csv"
            _write_grid_csv(csv_path, att.grid(x.shape[1:]))
            write_json(xai_dir / f"occlusion_{i:04d}.json", {**att.as_dict(), **meta})
            written += [csv_path, xai_dir / f"occlusion_{i:04d}.json"]
        elif args.method == "lime":
            base = None
            if baseline_mode == "control":
                base = _explain_baseline(bundle, x.shape, "control")
            att = lime_explain(
                model, x, n_samples=n_samples, top_k=top_k, seed=seed, baseline=base
            )
            payload = {**att.as_dict(), **meta}
            payload["locations"] = {
                str(k): _locate_flat(int(k), x.shape) for k in att.scores
            }
            path = xai_dir / f"lime_{i:04d}.json"
            write_json(path, payload)
            written.append(path)
        else:
            base = _explain_baseline(bundle, x.shape, baseline_mode)
            att = kernel_shap(model, x, base, n_coalitions=n_coalitions, seed=seed)
            path = xai_dir / f"shap_{i:04d}.json"
            write_json(path, {**att.as_dict(), **meta})
            written.append(path)

    for path in written:
        print(f"wrote {path}")
    _update_run_manifest(
        out,
        f"explain:{args.method}",
        {
            "samples": indices,
            "baseline": baseline_mode,
            "seed": seed,
            "files": {
                str(p.relative_to(out)): sha256_file(p) for p in sorted(written)
            },
        },
    )
    return 0


def cmd_triage(args) -> int:
    out = _out_dir(args)
    section = _section(args, "triage")
    recover = float(_opt(args.recover_seconds, section, "recover_seconds", 120.0))
    percentile = float(
        _opt(args.low_traffic_percentile, section, "low_traffic_percentile", 25.0)
    )
    threshold = float(_opt(args.threshold, section, "threshold", 0.5))
    n_coalitions = int(_opt(args.coalitions, section, "n_coalitions", 2048))
    seed = int(_opt(args.seed, section, "seed", 0))
    attach_shap = False if args.no_shap else bool(section.get("attach_shap", True))
    thresholds = TriageThresholds(recover_seconds=recover, low_traffic_percentile=percentile)

    bundle, dataset_digest = _load_dataset(out)
    model = _load_model_for(out, dataset_digest)
    cases = collect_errors(
        model,
        bundle.split.test_inputs,
        bundle.split.test_labels,
        bundle.test_window_begin,
        bundle.test_window_end,
        bundle.timeline,
        bundle.control_rows,
        thresholds=thresholds,
        threshold=threshold,
        n_coalitions=n_coalitions,
        seed=seed,
        attach_shap=attach_shap,
    )
    report = build_report(cases, thresholds, test_count=bundle.split.test_labels.shape[0])
    write_json(
        out / TRIAGE_FILE,
        {
            **report.as_dict(),
            "dataset_digest": dataset_digest,
            "model_digest": sha256_file(out / MODEL_FILE),
        },
    )

    print(report.narrative())
    _update_run_manifest(
        out,
        "triage",
        {
            "thresholds": thresholds.as_dict(),
            "counts": report.counts,
            "seed": seed,
            "files": _file_digests(out, [TRIAGE_FILE]),
        },
    )
    return 0


def cmd_pca(args) -> int:
    out = _out_dir(args)
    section = _section(args, "pca")
    split_choice = _opt(args.split, section, "split", "all")
    components = _opt(args.components, section, "components", None)
    variance_target = _opt(args.variance, section, "variance_target", None)
    if split_choice not in ("train", "test", "all"):
        raise ConfigError(f"split must be train, test, or all, got {split_choice!r}")

    bundle, dataset_digest = _load_dataset(out)
    parts = []
    if split_choice in ("train", "all"):
        parts.append((bundle.split.train_inputs, bundle.split.train_labels))
    if split_choice in ("test", "all"):
        parts.append((bundle.split.test_inputs, bundle.split.test_labels))
    data = np.concatenate([p[0].reshape(p[0].shape[0], -1) for p in parts])
    labels = np.concatenate([p[1] for p in parts])

    pca = pca_fit(data)
    if components is not None:
        k = int(components)
        if not 1 <= k <= pca.explained_variance_ratio.shape[0]:
            raise ConfigError(
                f"components must lie in [1, {pca.explained_variance_ratio.shape[0]}]"
            )
    elif variance_target is not None:
        k = select_components(pca, float(variance_target))
    else:
        k = min(2, pca.explained_variance_ratio.shape[0])
    coords = pca_project(pca, data, k=k)

    header = ",".join([f"pc{j + 1}" for j in range(k)] + ["label"])
    lines = [header]
    for row, label in zip(coords, labels):
        lines.append(",".join(repr(float(v)) for v in row) + f",{int(label)}")
    (out / PCA_CSV).write_text("\n".join(lines) + "\n", encoding="utf-8")

    ratios = [float(r) for r in pca.explained_variance_ratio]
    explained = float(sum(ratios[:k]))
    write_json(
        out / PCA_MANIFEST,
        {
            "kind": "pca",
            "split": split_choice,
            "components": k,
            "n_samples": int(data.shape[0]),
            "explained_variance_ratio": ratios,
            "explained_variance_of_projection": explained,
            "dataset_digest": dataset_digest,
            "csv_digest": sha256_file(out / PCA_CSV),
        },
    )

    print(
        f"projected {data.shape[0]} {split_choice} samples onto {k} components "
        f"({100 * explained:.2f}% of variance); wrote {out / PCA_CSV}"
    )
    _update_run_manifest(
        out,
        "pca",
        {
            "split": split_choice,
            "components": k,
            "explained_variance_of_projection": explained,
            "files": _file_digests(out, [PCA_CSV, PCA_MANIFEST]),
        },
    )
    return 0


# --------------------------------------------------------------------------
# parser

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, help="run directory for all artifacts")
    common.add_argument("--config", help="scenario file (required for simulate, "
                                         "optional elsewhere for section defaults)")

    parser = argparse.ArgumentParser(
        prog="flowsentry",
        description="Simulate tampered traffic signals, train a detector, explain it.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="run a scenario and write the detector record log")
    p.add_argument("--seed", type=int, help="override the scenario's simulation seed")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("dataset", parents=[common],
                       help="window, split, normalize, and rebalance the record log")
    p.add_argument("--rows", type=int, help=f"window height, one of {WINDOW_ROWS}")
    p.add_argument("--layers", type=int, choices=(1, 3),
                   help="1 for plain windows, 3 to stack control mean/std layers")
    p.add_argument("--seed", type=int, help="split and oversampling seed")
    p.add_argument("--ratio", type=float, help="train fraction (default 0.8)")
    p.add_argument("--k-neighbors", type=int, help="oversampling neighbor count")
    p.add_argument("--no-balance", action="store_true",
                   help="skip minority oversampling on the training split")
    p.set_defaults(handler=cmd_dataset)

    p = sub.add_parser("train", parents=[common], help="fit the detector on the train split")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--seed", type=int, help="weight init and shuffle seed")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", parents=[common], help="score the model on the test split")
    p.add_argument("--threshold", type=float, help="decision threshold (default 0.5)")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("explain", parents=[common],
                       help="write attributions for selected test samples")
    p.add_argument("method", choices=("occlusion", "lime", "shap"))
    p.add_argument("--sample", type=int, action="append",
                   help="test sample index (repeatable; default 0)")
    p.add_argument("--errors", action="store_true",
                   help="explain every misclassified test sample instead")
    p.add_argument("--baseline", choices=("zero", "control"),
                   help="masking baseline (default zero)")
    p.add_argument("--samples", type=int, help="lime perturbation count")
    p.add_argument("--coalitions", type=int, help="shap coalition budget")
    p.add_argument("--patch-rows", type=int, help="occlusion patch height")
    p.add_argument("--patch-cols", type=int, help="occlusion patch width")
    p.add_argument("--stride", type=int, help="occlusion patch stride")
    p.add_argument("--top-k", type=int, help="lime coefficients to keep")
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_explain)

    p = sub.add_parser("triage", parents=[common],
                       help="categorize the model's test-set mistakes")
    p.add_argument("--recover-seconds", type=float,
                   help="post-attack recovery horizon (default 120)")
    p.add_argument("--low-traffic-percentile", type=float,
                   help="control vehicle-level percentile for the low-traffic rule")
    p.add_argument("--threshold", type=float, help="decision threshold (default 0.5)")
    p.add_argument("--coalitions", type=int, help="shap coalition budget per case")
    p.add_argument("--no-shap", action="store_true", help="skip per-case attributions")
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_triage)

    p = sub.add_parser("pca", parents=[common],
                       help="project dataset windows onto principal components")
    p.add_argument("--split", choices=("train", "test", "all"))
    p.add_argument("--components", type=int, help="fixed component count (default 2)")
    p.add_argument("--variance", type=float,
                   help="pick the smallest k reaching this explained-variance share")
    p.set_defaults(handler=cmd_pca)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FlowSentryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
