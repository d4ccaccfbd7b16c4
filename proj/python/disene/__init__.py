"""Disentangled self-explainable node embeddings.

Configs are plain dicts with the same schema as the CLI's --config files;
missing keys take the defaults returned by ``default_config()``.
"""

import json

from . import _core
from ._core import Error, auc_pr, generate, jaccard, pearson, run_cli

__all__ = [
    "Error",
    "auc_pr",
    "config_hash",
    "default_config",
    "downstream",
    "evaluate",
    "explain",
    "generate",
    "jaccard",
    "pearson",
    "run_cli",
    "train",
]


def default_config():
    return json.loads(_core.default_config())


def _dump(config):
    return json.dumps(default_config() if config is None else config)


def config_hash(config=None):
    return _core.config_hash(_dump(config))


def train(config=None, seed=0):
    """Returns (H, sidecar) with H a float64 array of shape (n, K)."""
    H, sidecar = _core.train(_dump(config), seed)
    return H, json.loads(sidecar)


def explain(H, config=None, seed=0):
    return json.loads(_core.explain(H, _dump(config), seed))


def evaluate(H, config=None, seed=0):
    return json.loads(_core.evaluate(H, _dump(config), seed))


def downstream(H, config=None, seed=0):
    return json.loads(_core.downstream(H, _dump(config), seed))
