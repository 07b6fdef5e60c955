"""Extended local binary pattern descriptors for facial micro-expression clips.

Volumes are numpy arrays shaped (frames, height, width) on the 8-bit scale.
Functions that produce reports return plain dicts.
"""

import json

import numpy as np

from . import _elbptop
from ._elbptop import (
    BorderError,
    ConfigError,
    DegenerateDataError,
    Error,
    IngestError,
    PreprocessError,
    ProtocolError,
    ShapeError,
    WpcaModel,
    adlbp_code,
    descriptor_dimension,
    extract_descriptor,
    lbp_code,
    magnify,
    rdlbp_code,
    synth_clip,
    synth_generate,
    tim_interpolate,
    wpca_fit,
)

__all__ = [
    "BorderError",
    "ConfigError",
    "DegenerateDataError",
    "Error",
    "IngestError",
    "PreprocessError",
    "ProtocolError",
    "ShapeError",
    "WpcaModel",
    "adlbp_code",
    "compute_metrics",
    "default_config",
    "descriptor_dimension",
    "extract_descriptor",
    "fusion_search",
    "lbp_code",
    "loso_evaluate",
    "magnify",
    "preset",
    "rdlbp_code",
    "run_pipeline",
    "synth_clip",
    "synth_generate",
    "tim_interpolate",
    "wpca_fit",
]


def compute_metrics(predictions, truths, subjects, num_classes):
    return json.loads(_elbptop.compute_metrics(list(predictions), list(truths), list(subjects), num_classes))


def loso_evaluate(features, labels, subjects, class_names, c_grid=None, standardize=False, threads=1):
    features = np.asarray(features, dtype=np.float64)
    return json.loads(
        _elbptop.loso_evaluate(features, list(labels), list(subjects), list(class_names), c_grid, standardize, threads)
    )


def default_config():
    return json.loads(_elbptop.default_config())


def preset(name):
    return json.loads(_elbptop.preset(name))


def _config_text(config):
    if config is None:
        config = default_config()
    return json.dumps(config)


def run_pipeline(manifest_path, config=None):
    return json.loads(_elbptop.run_pipeline(_config_text(config), str(manifest_path)))


def fusion_search(manifest_path, config=None):
    return json.loads(_elbptop.fusion_search(_config_text(config), str(manifest_path)))
