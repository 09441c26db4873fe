"""Fixed-size feature vectors fed to the policy networks.

Every entry is kept inside [0, 1] so the tiny networks see a uniform
scale. Per-slot blocks are index-stable with the ontology ordering.
"""

from __future__ import annotations

import numpy as np

from .belief import BeliefState
from .dialogue import matching_entities
from .domain import EntityDatabase, Ontology

SLOT_BLOCK_DIM = 7
SYSTEM_ACT_KINDS = ("none", "request", "confirm", "select", "inform",
                    "inform_alternatives", "reqmore", "bye", "repeat",
                    "pass")
MAX_VALUE_COUNT = 10.0


def slot_block(dist: np.ndarray, n_values: int) -> np.ndarray:
    """[top-3 value probs, p(dontcare), p(none), norm. entropy, value count]."""
    values = dist[:n_values]
    top3 = np.sort(values)[::-1][:3]
    if top3.size < 3:
        top3 = np.pad(top3, (0, 3 - top3.size))
    p = dist[dist > 0.0]
    entropy = float(-(p * np.log(p)).sum()) / np.log(len(dist))
    return np.concatenate([
        top3,
        [dist[n_values], dist[n_values + 1], entropy,
         min(n_values / MAX_VALUE_COUNT, 1.0)],
    ])


def match_bucket(count: int) -> np.ndarray:
    onehot = np.zeros(4)
    if count == 0:
        onehot[0] = 1.0
    elif count == 1:
        onehot[1] = 1.0
    elif count <= 4:
        onehot[2] = 1.0
    else:
        onehot[3] = 1.0
    return onehot


def _last_action_onehot(b: BeliefState) -> np.ndarray:
    onehot = np.zeros(len(SYSTEM_ACT_KINDS))
    label = b.last_system_action or "none"
    kind = label.split("(", 1)[0]
    try:
        onehot[SYSTEM_ACT_KINDS.index(kind)] = 1.0
    except ValueError:
        pass
    return onehot


def global_block(b: BeliefState, ontology: Ontology, db: EntityDatabase,
                 max_turns: int) -> np.ndarray:
    requested = np.array([1.0 if slot in b.requested else 0.0
                          for slot in ontology.requestable])
    offered = np.array([1.0 if b.offered_entity is not None else 0.0])
    return np.concatenate([
        match_bucket(len(matching_entities(b, ontology, db))),
        requested,
        _last_action_onehot(b),
        offered,
        [min(b.turn / max_turns, 1.0)],
    ])


def global_dim(ontology: Ontology) -> int:
    return 4 + len(ontology.requestable) + len(SYSTEM_ACT_KINDS) + 2


def info_features(b: BeliefState, slot: str, ontology: Ontology,
                  db: EntityDatabase, max_turns: int) -> np.ndarray:
    return np.concatenate([
        slot_block(b.distribution(slot), len(ontology.values(slot))),
        global_block(b, ontology, db, max_turns),
    ])


def info_dim(ontology: Ontology) -> int:
    return SLOT_BLOCK_DIM + global_dim(ontology)


def merged_features(b: BeliefState, ontology: Ontology, db: EntityDatabase,
                    max_turns: int) -> np.ndarray:
    blocks = [slot_block(b.distribution(slot), len(ontology.values(slot)))
              for slot in ontology.slots]
    blocks.append(global_block(b, ontology, db, max_turns))
    return np.concatenate(blocks)


def merged_dim(ontology: Ontology) -> int:
    return SLOT_BLOCK_DIM * len(ontology.slots) + global_dim(ontology)


def all_features(b: BeliefState, ontology: Ontology, db: EntityDatabase,
                 max_turns: int) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Merged-policy features plus per-slot info-policy features.

    Shares one global-block computation across all vectors (the DB match
    count is the expensive part).
    """
    glob = global_block(b, ontology, db, max_turns)
    blocks = {slot: slot_block(b.distribution(slot),
                               len(ontology.values(slot)))
              for slot in ontology.slots}
    merged = np.concatenate([blocks[s] for s in ontology.slots] + [glob])
    per_slot = {slot: np.concatenate([blocks[slot], glob])
                for slot in ontology.slots}
    return merged, per_slot
