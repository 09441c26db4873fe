"""Ontology, entity database, semantic acts and system action spaces."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

DONTCARE = "dontcare"
NONE_VALUE = "none"
RESERVED_VALUES = (DONTCARE, NONE_VALUE)

USER_ACT_TYPES = {"inform", "affirm", "negate", "request", "hello", "bye",
                  "null"}
SYSTEM_ACT_TYPES = {"request", "confirm", "select", "inform",
                    "inform_alternatives", "reqmore", "bye", "repeat", "pass"}
ACT_TYPES = USER_ACT_TYPES | SYSTEM_ACT_TYPES

GENERAL_ACTIONS = ("inform", "inform_alternatives", "reqmore", "bye", "repeat")
INFO_ACTION_KINDS = ("request", "confirm", "select")


class DomainError(ValueError):
    """Invalid ontology/database content or an unknown slot or value."""


@dataclass(frozen=True)
class Ontology:
    """Informable slots with their value lists plus requestable slot names.

    Ordering of slots and values is exactly the file order and is part of
    the contract: feature vectors, belief supports and action indices all
    key off these indices.
    """

    name: str
    informable: tuple[tuple[str, tuple[str, ...]], ...]
    requestable: tuple[str, ...]
    synonyms: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for slot, values in self.informable:
            if slot in seen:
                raise DomainError(f"duplicate slot {slot!r}")
            seen.add(slot)
            if len(values) < 2:
                raise DomainError(f"slot {slot!r} needs at least 2 values")
            if len(set(values)) != len(values):
                raise DomainError(f"slot {slot!r} has duplicate values")
            for v in values:
                if v in RESERVED_VALUES:
                    raise DomainError(
                        f"slot {slot!r} uses reserved value {v!r}")
        if not self.informable:
            raise DomainError("ontology has no informable slots")
        if len(set(self.requestable)) != len(self.requestable):
            raise DomainError("duplicate requestable slot")
        missing = seen - set(self.requestable)
        if missing:
            raise DomainError(
                f"informable slots missing from requestables: {missing}")

    @property
    def slots(self) -> tuple[str, ...]:
        return tuple(slot for slot, _ in self.informable)

    def values(self, slot: str) -> tuple[str, ...]:
        for name, values in self.informable:
            if name == slot:
                return values
        raise DomainError(f"unknown slot {slot!r}")

    def slot_index(self, slot: str) -> int:
        try:
            return self.slots.index(slot)
        except ValueError:
            raise DomainError(f"unknown slot {slot!r}") from None


@dataclass(frozen=True)
class EntityDatabase:
    """Immutable entity table; every entity defines all requestable slots."""

    entities: tuple[dict[str, str], ...]

    @staticmethod
    def validate(entities, ontology: Ontology) -> "EntityDatabase":
        required = set(ontology.requestable)
        for i, ent in enumerate(entities):
            missing = required - set(ent)
            if missing:
                raise DomainError(f"entity {i} missing slots {missing}")
            for slot, values in ontology.informable:
                if ent[slot] not in values:
                    raise DomainError(
                        f"entity {i} has unknown value {ent[slot]!r} "
                        f"for slot {slot!r}")
        return EntityDatabase(tuple(dict(e) for e in entities))


@dataclass(frozen=True)
class DialogueAct:
    """Typed semantic act with (slot, value) payload.

    ``confidence`` is only meaningful on the user-to-system channel;
    system acts always carry confidence 1.
    """

    act_type: str
    items: tuple[tuple[str, str | None], ...] = ()
    confidence: float = 1.0

    def __post_init__(self):
        if self.act_type not in ACT_TYPES:
            raise DomainError(f"unknown act type {self.act_type!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise DomainError("confidence outside [0, 1]")
        if self.act_type == "request":
            if len(self.items) != 1 or self.items[0][1] is not None:
                raise DomainError("request carries one slot and no value")
        elif self.act_type == "confirm":
            if len(self.items) != 1 or self.items[0][1] is None:
                raise DomainError("confirm carries exactly one (slot, value)")
        elif self.act_type == "select":
            if len(self.items) < 2:
                raise DomainError("select carries one slot and >= 2 values")
            if len({s for s, _ in self.items}) != 1:
                raise DomainError("select values must share one slot")
        elif self.act_type == "pass" and self.items:
            raise DomainError("pass carries nothing")

    @property
    def slot(self) -> str | None:
        return self.items[0][0] if self.items else None

    @property
    def value(self) -> str | None:
        return self.items[0][1] if self.items else None

    def to_json(self) -> dict:
        return {"act_type": self.act_type,
                "items": [list(it) for it in self.items],
                "confidence": self.confidence}


@dataclass(frozen=True)
class InfoAction:
    kind: str  # request | confirm | select
    slot: str

    def __str__(self):
        return f"{self.kind}({self.slot})"


@dataclass(frozen=True)
class SystemActionSpace:
    """Ordered action inventories for the two policy levels."""

    info_actions: tuple[InfoAction | str, ...]
    general_actions: tuple[str, ...]
    master_actions: tuple[str, ...]
    merged_actions: tuple[str, ...]
    mode: str


def load_ontology(path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"ontology parse error: {exc}") from exc
    try:
        informable = tuple((entry["slot"], tuple(entry["values"]))
                           for entry in raw["informable"])
        requestable = tuple(raw["requestable"])
        name = raw["name"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"ontology schema error: {exc}") from exc
    return Ontology(name=name, informable=informable, requestable=requestable,
                    synonyms=raw.get("synonyms", {}))


def load_database(path, ontology: Ontology) -> EntityDatabase:
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"database parse error: {exc}") from exc
    if "entities" not in raw:
        raise DomainError("database schema error: missing 'entities'")
    return EntityDatabase.validate(raw["entities"], ontology)


def query(db: EntityDatabase, ontology: Ontology,
          constraints) -> list[dict[str, str]]:
    """Entities matching all non-dontcare constraints, in database order."""
    checked = []
    for slot, value in constraints:
        ontology.values(slot)  # raises on unknown slot
        if value != DONTCARE:
            checked.append((slot, value))
    return [ent for ent in db.entities
            if all(ent[slot] == value for slot, value in checked)]


def enumerate_actions(ontology: Ontology, mode: str) -> SystemActionSpace:
    """Build A_i, A_g, A_m and the merged action list for a mode.

    The baseline feudal mode appends a pass action to both sub-policy
    spaces; the merged mode has no pass and instead exposes A_g plus the
    abstract choice of deferring to the information policy.
    """
    if mode not in ("feudal_baseline", "feudalgain"):
        raise DomainError(f"unknown action-space mode {mode!r}")
    info: list[InfoAction | str] = [InfoAction(kind, slot)
                                    for slot in ontology.slots
                                    for kind in INFO_ACTION_KINDS]
    general: list[str] = list(GENERAL_ACTIONS)
    if mode == "feudal_baseline":
        info.append("pass")
        general.append("pass")
    return SystemActionSpace(
        info_actions=tuple(info),
        general_actions=tuple(general),
        master_actions=("take_info_action", "take_general_action"),
        merged_actions=tuple(GENERAL_ACTIONS) + ("take_info_action",),
        mode=mode,
    )


def builtin_domain(name: str) -> tuple[Ontology, EntityDatabase]:
    """Load one of the bundled toy domains (``toy_cr`` or ``toy_sfr``)."""
    data = resources.files("feudalgain.data")
    onto_path = data / f"{name}.ontology.json"
    db_path = data / f"{name}.db.json"
    if not onto_path.is_file():
        raise DomainError(f"unknown builtin domain {name!r}")
    ontology = load_ontology(onto_path)
    db = load_database(db_path, ontology)
    return ontology, db
