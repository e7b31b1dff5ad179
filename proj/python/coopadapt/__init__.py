"""Planar manipulator dynamics and cooperative payload adaptation."""

import json
from dataclasses import dataclass

import numpy as np

from ._core import PlanarModel, ScenarioError, is_physical
from . import _core

__all__ = ["PlanarModel", "Run", "ScenarioError", "is_physical", "resolved", "run", "validate"]


def _pairs(overrides):
    # Values are passed through as text and parsed as JSON on the C++ side.
    return [(k, v if isinstance(v, str) else json.dumps(v)) for k, v in (overrides or {}).items()]


@dataclass
class Run:
    columns: list
    data: np.ndarray
    summary: dict

    def __getitem__(self, name):
        return self.data[:, self.columns.index(name)]


def validate(path, overrides=None):
    return _core.validate(str(path), _pairs(overrides))


def resolved(path, overrides=None):
    return json.loads(_core.resolved(str(path), _pairs(overrides)))


def run(path, overrides=None, decimate=0):
    columns, data, summary = _core.run(str(path), _pairs(overrides), decimate)
    return Run(list(columns), np.asarray(data), json.loads(summary))
