"""Binary checkpoint container for trained synthesizer models.

Layout: 8-byte magic, little-endian u32 header length, JSON header, then
raw little-endian float32 blobs in header order. The header carries
everything needed to rebuild the model without the training dataset:
variant and architecture config, style vocabulary, skeleton, frame rate,
phase advance rate, normalization statistics, and the parameter manifest.
Saving is canonical (sorted JSON keys, fixed blob order), so save, load
and save again yields identical bytes.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import CheckpointError, MotionStyleError
from ..features.dataset import DatasetStats, _skeleton_from_header, _skeleton_header
from .variants import ModelConfig, ModelMeta, build_model

MAGIC = b"MCKP0001"
FORMAT_VERSION = 1

_STATS_FIELDS = ("input_mean", "input_std", "target_mean", "target_std")
_HEADER_FIELDS = ("format_version", "variant", "config", "styles", "fps",
                  "walk_phase_rate", "skeleton", "stats", "params")


def save_checkpoint(model) -> bytes:
    params = model.named_parameters()
    stats = model.meta.stats
    header = {
        "format_version": FORMAT_VERSION,
        "variant": model.variant,
        "config": _config_header(model.config),
        "styles": list(model.meta.style_names),
        "fps": float(model.meta.fps),
        "walk_phase_rate": float(model.meta.walk_phase_rate),
        "skeleton": _skeleton_header(model.meta.skeleton),
        "stats": [{"name": k, "shape": list(getattr(stats, k).shape)}
                  for k in _STATS_FIELDS],
        "params": [{"name": k, "shape": list(v.data.shape)}
                   for k, v in params.items()],
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    blobs = [np.ascontiguousarray(getattr(stats, k), dtype="<f4").tobytes()
             for k in _STATS_FIELDS]
    blobs += [np.ascontiguousarray(v.data, dtype="<f4").tobytes()
              for v in params.values()]
    return MAGIC + struct.pack("<I", len(head)) + head + b"".join(blobs)


def load_checkpoint(data: bytes):
    header, blob = _split(data)
    config = _config_from_header(header["config"], header["variant"])
    styles = header["styles"]
    if not isinstance(styles, list) or not all(isinstance(s, str) for s in styles):
        raise CheckpointError("field 'styles' must be a list of names")
    try:
        skeleton = _skeleton_from_header(header["skeleton"])
    except MotionStyleError as exc:
        raise CheckpointError(f"field 'skeleton': {exc}") from exc

    blob, stats_arrays = _take_arrays(blob, header["stats"], "stats")
    for k in _STATS_FIELDS:
        if k not in stats_arrays:
            raise CheckpointError(f"field 'stats' is missing array '{k}'")
    stats = DatasetStats(**{k: stats_arrays[k] for k in _STATS_FIELDS})

    meta = ModelMeta(stats=stats, style_names=tuple(styles),
                     skeleton=skeleton, fps=float(header["fps"]),
                     walk_phase_rate=float(header["walk_phase_rate"]))
    try:
        model = build_model(config, meta, seed=0)
    except MotionStyleError as exc:
        raise CheckpointError(f"cannot build model from header: {exc}") from exc

    blob, loaded = _take_arrays(blob, header["params"], "params")
    if blob:
        raise CheckpointError(f"{len(blob)} trailing bytes after parameters")
    expected = model.named_parameters()
    for name in loaded:
        if name not in expected:
            raise CheckpointError(
                f"parameter '{name}' does not exist in variant "
                f"'{model.variant}'")
    for name, param in expected.items():
        if name not in loaded:
            raise CheckpointError(f"checkpoint is missing parameter '{name}'")
        arr = loaded[name]
        if arr.shape != param.data.shape:
            raise CheckpointError(
                f"parameter '{name}': checkpoint shape {arr.shape}, model "
                f"expects {param.data.shape}")
        param.data = arr
    return model


def write_checkpoint(model, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_checkpoint(model))


def read_checkpoint(path):
    with open(path, "rb") as fh:
        return load_checkpoint(fh.read())


def _config_header(config: ModelConfig) -> dict:
    return {
        "n_experts": config.n_experts,
        "n_moe_layers": config.n_moe_layers,
        "moe_hidden": config.moe_hidden,
        "gating_hidden": config.gating_hidden,
        "dropout_rate": config.dropout_rate,
        "tcn_channels": list(config.tcn_channels),
        "tcn_kernel": config.tcn_kernel,
        "history_frames": config.history_frames,
        "win_std_floor": config.win_std_floor,
    }


def _config_from_header(raw: dict, variant) -> ModelConfig:
    if not isinstance(raw, dict):
        raise CheckpointError("field 'config' must be an object")
    try:
        config = ModelConfig(
            variant=variant,
            tcn_channels=tuple(raw["tcn_channels"]),
            **{k: raw[k] for k in ("n_experts", "n_moe_layers", "moe_hidden",
                                   "gating_hidden", "dropout_rate",
                                   "tcn_kernel", "history_frames",
                                   "win_std_floor")})
        return config.validated()
    except KeyError as exc:
        raise CheckpointError(f"field 'config' is missing {exc}") from exc
    except MotionStyleError as exc:
        raise CheckpointError(f"field 'config' is invalid: {exc}") from exc


def _split(data: bytes) -> tuple[dict, bytes]:
    if len(data) < len(MAGIC) + 4 or data[:len(MAGIC)] != MAGIC:
        raise CheckpointError(
            f"bad checkpoint magic, expected {MAGIC.decode()}")
    (head_len,) = struct.unpack_from("<I", data, len(MAGIC))
    start = len(MAGIC) + 4
    if start + head_len > len(data):
        raise CheckpointError("checkpoint header is truncated")
    try:
        header = json.loads(data[start:start + head_len])
    except json.JSONDecodeError as exc:
        raise CheckpointError(
            f"checkpoint header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise CheckpointError("checkpoint header must be a JSON object")
    for field in _HEADER_FIELDS:
        if field not in header:
            raise CheckpointError(f"checkpoint header missing field '{field}'")
    if header["format_version"] != FORMAT_VERSION:
        raise CheckpointError(
            f"field 'format_version': unsupported value "
            f"{header['format_version']!r}, this reader handles "
            f"{FORMAT_VERSION}")
    return header, data[start + head_len:]


def _take_arrays(blob: bytes, manifest, which: str
                 ) -> tuple[bytes, dict[str, np.ndarray]]:
    if not isinstance(manifest, list):
        raise CheckpointError(f"field '{which}' must be a list")
    out: dict[str, np.ndarray] = {}
    for entry in manifest:
        try:
            name, shape = entry["name"], tuple(int(n) for n in entry["shape"])
        except (TypeError, KeyError) as exc:
            raise CheckpointError(
                f"field '{which}': malformed manifest entry {entry!r}") from exc
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        nbytes = 4 * count
        if len(blob) < nbytes:
            raise CheckpointError(
                f"blob for '{name}' is truncated: need {nbytes} bytes, "
                f"have {len(blob)}")
        out[name] = np.frombuffer(blob[:nbytes], dtype="<f4").reshape(shape).copy()
        blob = blob[nbytes:]
    return blob, out
