"""Binary dataset container and its JSON manifest."""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .._util import read_json, sha256_file, write_json
from ..errors import DataFormatError, DigestMismatchError
from ..simnet.records import FEATURE_COLUMNS, Label

_MAGIC = b"FSDATA1\n"


def save_array(path: Path | str, inputs: np.ndarray, labels: np.ndarray) -> None:
    """Write shape header, row-major doubles, then the int64 label vector."""
    inputs = np.ascontiguousarray(inputs, dtype="<f8")
    labels = np.ascontiguousarray(labels, dtype="<i8")
    if inputs.shape[0] != labels.shape[0]:
        raise DataFormatError("inputs and labels disagree on sample count")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", inputs.ndim))
        fh.write(struct.pack(f"<{inputs.ndim}Q", *inputs.shape))
        fh.write(inputs.tobytes())
        fh.write(labels.tobytes())


def load_array(path: Path | str) -> tuple[np.ndarray, np.ndarray]:
    blob = Path(path).read_bytes()
    if blob[: len(_MAGIC)] != _MAGIC:
        raise DataFormatError(f"{path}: not a dataset container")
    offset = len(_MAGIC)
    (ndim,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    if not 1 <= ndim <= 8:
        raise DataFormatError(f"{path}: implausible rank {ndim}")
    shape = struct.unpack_from(f"<{ndim}Q", blob, offset)
    offset += 8 * ndim
    count = int(np.prod(shape))
    expected = offset + 8 * count + 8 * shape[0]
    if len(blob) != expected:
        raise DataFormatError(f"{path}: size {len(blob)} does not match header ({expected})")
    inputs = np.frombuffer(blob, dtype="<f8", count=count, offset=offset).reshape(shape)
    labels = np.frombuffer(blob, dtype="<i8", count=shape[0], offset=offset + 8 * count)
    return inputs.copy(), labels.copy()


def _class_counts(labels: np.ndarray) -> dict:
    labels = np.asarray(labels)
    return {
        "hacked": int((labels == Label.HACKED).sum()),
        "normal": int((labels == Label.NORMAL).sum()),
    }


def save_bundle(bundle, out_dir: Path | str) -> Path:
    """Write train/test/control containers plus the manifest; returns its path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_array(out / "train.bin", bundle.split.train_inputs, bundle.split.train_labels)
    save_array(out / "test.bin", bundle.split.test_inputs, bundle.split.test_labels)
    save_array(
        out / "control.bin",
        bundle.control_rows,
        np.full(bundle.control_rows.shape[0], int(Label.NORMAL), dtype=np.int64),
    )
    manifest = {
        "kind": "dataset",
        "rows": bundle.rows,
        "channels": bundle.channels,
        "seed": bundle.seed,
        "split_ratio": bundle.split.ratio,
        "smote_applied": bundle.smote_applied,
        "source_digest": bundle.source_digest,
        "attack_timeline": bundle.timeline,
        "normalization": bundle.stats.as_dict(),
        "control": None if bundle.control is None else bundle.control.as_dict(),
        "counts": {
            "train": _class_counts(bundle.split.train_labels),
            "test": _class_counts(bundle.split.test_labels),
        },
        "test_window_begin": [float(b) for b in bundle.test_window_begin],
        "test_window_end": [float(e) for e in bundle.test_window_end],
        "files": {
            name: {"path": f"{name}.bin", "sha256": sha256_file(out / f"{name}.bin")}
            for name in ("train", "test", "control")
        },
    }
    path = out / "dataset.json"
    write_json(path, manifest)
    return path


def load_bundle(manifest_path: Path | str):
    from .normalize import NormalizationStats
    from .pipeline import DatasetBundle
    from .splits import SplitDataset
    from .windows import ControlStats

    manifest_path = Path(manifest_path)
    manifest = read_json(manifest_path)
    if manifest.get("kind") != "dataset":
        raise DataFormatError(f"{manifest_path}: not a dataset manifest")
    base = manifest_path.parent
    arrays = {}
    for name, entry in manifest["files"].items():
        path = base / entry["path"]
        digest = sha256_file(path)
        if digest != entry["sha256"]:
            raise DigestMismatchError(f"{path}: digest {digest} != manifest {entry['sha256']}")
        arrays[name] = load_array(path)
    train_inputs, train_labels = arrays["train"]
    test_inputs, test_labels = arrays["test"]
    control_rows, _ = arrays["control"]
    return DatasetBundle(
        split=SplitDataset(
            train_inputs=train_inputs,
            train_labels=train_labels,
            test_inputs=test_inputs,
            test_labels=test_labels,
            ratio=float(manifest["split_ratio"]),
            seed=int(manifest["seed"]),
        ),
        stats=NormalizationStats.from_dict(manifest["normalization"]),
        control=None
        if manifest["control"] is None
        else ControlStats.from_dict(manifest["control"]),
        control_rows=control_rows,
        rows=int(manifest["rows"]),
        channels=int(manifest["channels"]),
        seed=int(manifest["seed"]),
        smote_applied=bool(manifest["smote_applied"]),
        source_digest=str(manifest["source_digest"]),
        timeline=list(manifest["attack_timeline"]),
        test_window_begin=np.asarray(manifest["test_window_begin"], dtype=np.float64),
        test_window_end=np.asarray(manifest["test_window_end"], dtype=np.float64),
    )


def export_csv(path: Path | str, inputs: np.ndarray, labels: np.ndarray,
               begins: np.ndarray, ends: np.ndarray) -> None:
    """Dump window rows in the detector-log column layout for external tools."""
    inputs = np.asarray(inputs)
    if inputs.ndim == 4:
        inputs = inputs[:, 0]      # layer 0 carries the observations
    header = ",".join(("begin", "end", "id", "target") + FEATURE_COLUMNS)
    lines = [header]
    for w in range(inputs.shape[0]):
        for r in range(inputs.shape[1]):
            cells = [repr(float(v)) for v in inputs[w, r]]
            lines.append(
                f"{begins[w]:g},{ends[w]:g},{w}:{r},{int(labels[w])}," + ",".join(cells)
            )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
