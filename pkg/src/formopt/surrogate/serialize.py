"""Versioned JSON documents for trained surrogates."""

from __future__ import annotations

import json

from ..errors import SchemaError
from .anfis import AnfisSystem
from .data import MinMaxScaler
from .mlp import MlpNetwork
from .model import Surrogate

FORMAT = "formopt-surrogate"
VERSION = 1


def surrogate_to_dict(model: Surrogate) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "kind": model.kind,
        "input_names": list(model.input_names),
        "output_names": list(model.output_names),
        "x_scaler": model.x_scaler.to_dict(),
        "y_scaler": model.y_scaler.to_dict(),
        "models": [m.to_dict() for m in model.models],
    }


def surrogate_from_dict(doc: dict) -> Surrogate:
    if doc.get("format") != FORMAT:
        raise SchemaError("not a surrogate document")
    if doc.get("version") != VERSION:
        raise SchemaError(f"unsupported surrogate document version {doc.get('version')!r}")
    cls = {"mlp": MlpNetwork, "anfis": AnfisSystem}.get(doc["kind"])
    if cls is None:
        raise SchemaError(f"unknown surrogate kind {doc['kind']!r}")
    return Surrogate(doc["kind"], [cls.from_dict(m) for m in doc["models"]],
                     MinMaxScaler.from_dict(doc["x_scaler"]), MinMaxScaler.from_dict(doc["y_scaler"]),
                     list(doc["input_names"]), list(doc["output_names"]))


def save_surrogate(model: Surrogate, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(surrogate_to_dict(model), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_surrogate(path) -> Surrogate:
    with open(path, encoding="utf-8") as fh:
        return surrogate_from_dict(json.load(fh))
