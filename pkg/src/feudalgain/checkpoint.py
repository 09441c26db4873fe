"""Versioned policy checkpoints plus scripted pseudo-checkpoints.

Real checkpoints are ``.npz`` archives holding every network parameter
and a JSON metadata blob. A ``.json`` file with a ``kind`` field loads a
scripted policy instead (useful as an evaluation fixture).
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .dialogue import AlwaysBye, ScriptedOracle
from .domain import EntityDatabase, Ontology, builtin_domain
from .policy import PolicyConfig, PolicySet

FORMAT_VERSION = 1

SCRIPTED_POLICIES = {
    "scripted_oracle": ScriptedOracle,
    "always_bye": AlwaysBye,
}


class CheckpointError(RuntimeError):
    pass


def save_checkpoint(path, ps: PolicySet, extra: dict | None = None):
    meta = {
        "format_version": FORMAT_VERSION,
        "ontology": ps.ontology.name,
        "config": dataclasses.asdict(ps.cfg),
        "dialogues_trained": ps.dialogues_trained,
    }
    if extra:
        meta.update(extra)
    arrays = {key: np.ascontiguousarray(arr)
              for key, arr in ps.parameters().items()}
    np.savez(path, __meta__=np.frombuffer(
        json.dumps(meta).encode("utf-8"), dtype=np.uint8), **arrays)


def read_meta(path) -> dict:
    with np.load(path) as data:
        return json.loads(bytes(data["__meta__"]).decode("utf-8"))


def load_checkpoint(path, ontology: Ontology | None = None,
                    db: EntityDatabase | None = None):
    """Load a policy ready for inference/evaluation.

    Returns (policy, meta). The domain is resolved from the checkpoint
    metadata when not supplied.
    """
    path = Path(path)
    if path.suffix == ".json":
        spec = json.loads(path.read_text(encoding="utf-8"))
        kind = spec.get("kind")
        if kind not in SCRIPTED_POLICIES:
            raise CheckpointError(f"unknown scripted policy {kind!r}")
        if ontology is None or db is None:
            ontology, db = builtin_domain(spec.get("domain", "toy_cr"))
        if kind == "always_bye":
            return AlwaysBye(), {"kind": kind, "ontology": ontology.name}
        return (SCRIPTED_POLICIES[kind](ontology, db),
                {"kind": kind, "ontology": ontology.name})

    with np.load(path) as data:
        meta = json.loads(bytes(data["__meta__"]).decode("utf-8"))
        if meta.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(
                f"unsupported checkpoint version {meta.get('format_version')}")
        if ontology is None or db is None:
            ontology, db = builtin_domain(meta["ontology"])
        if ontology.name != meta["ontology"]:
            raise CheckpointError(
                f"checkpoint was trained on {meta['ontology']!r}, "
                f"not {ontology.name!r}")
        cfg_fields = {f.name for f in dataclasses.fields(PolicyConfig)}
        cfg = PolicyConfig(**{k: _tupled(v)
                              for k, v in meta["config"].items()
                              if k in cfg_fields})
        ps = PolicySet(ontology, db, cfg, seed=0)
        ps.load_parameters({k: data[k] for k in data.files
                            if k != "__meta__"})
        ps.dialogues_trained = meta.get("dialogues_trained", 0)
    return ps, meta


def _tupled(value):
    return tuple(value) if isinstance(value, list) else value
