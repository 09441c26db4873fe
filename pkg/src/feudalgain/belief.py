"""Focus-rule belief tracking over per-slot value distributions.

Every slot distribution lives on the ordered support
``values + (dontcare, none)``. Updates are value-semantics: they return a
new BeliefState and never mutate the input.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .domain import DONTCARE, DialogueAct, DomainError, Ontology

logger = logging.getLogger(__name__)

NORMALISATION_TOL = 1e-9


def slot_support(ontology: Ontology, slot: str) -> tuple[str, ...]:
    return ontology.values(slot) + (DONTCARE, "none")


@dataclass(frozen=True)
class BeliefState:
    """Tracker output for one turn.

    ``distributions`` maps slot name to a probability vector over the
    slot's support; ``requested`` holds requestable slots the user asked
    for and which the system has not answered yet.
    """

    distributions: dict[str, np.ndarray]
    requested: frozenset[str] = frozenset()
    last_user_act_type: str | None = None
    last_system_action: str | None = None
    turn: int = 0
    offered_entity: dict[str, str] | None = None

    def distribution(self, slot: str) -> np.ndarray:
        return self.distributions[slot]

    def to_json(self, ontology: Ontology) -> dict:
        return {
            "turn": self.turn,
            "requested": sorted(self.requested),
            "last_user_act_type": self.last_user_act_type,
            "last_system_action": self.last_system_action,
            "offered_entity": self.offered_entity,
            "slots": {
                slot: dict(zip(slot_support(ontology, slot),
                               np.round(dist, 6).tolist()))
                for slot, dist in self.distributions.items()
            },
        }


@dataclass(frozen=True)
class TurnEvidence:
    """Per-slot evidence mass extracted from one observed user act.

    ``slot_evidence`` maps slot -> {value: mass}; masses per slot must sum
    to at most 1. ``requests`` are newly requested slots.
    """

    slot_evidence: dict[str, dict[str, float]] = field(default_factory=dict)
    requests: frozenset[str] = frozenset()
    act_type: str | None = None

    def validate(self, ontology: Ontology):
        for slot, q in self.slot_evidence.items():
            support = slot_support(ontology, slot)  # raises on unknown slot
            total = 0.0
            for value, mass in q.items():
                if value not in support or value == "none":
                    raise DomainError(
                        f"evidence for unknown value {value!r} of {slot!r}")
                if mass < 0.0:
                    raise DomainError("negative evidence mass")
                total += mass
            if total > 1.0 + NORMALISATION_TOL:
                raise DomainError(f"evidence mass for {slot!r} exceeds 1")
        for slot in self.requests:
            if slot not in ontology.requestable:
                raise DomainError(f"request for unknown slot {slot!r}")


def initial_belief(ontology: Ontology) -> BeliefState:
    """Point mass on 'none' for every slot; nothing requested; turn 0."""
    distributions = {}
    for slot in ontology.slots:
        dist = np.zeros(len(slot_support(ontology, slot)))
        dist[-1] = 1.0
        distributions[slot] = dist
    return BeliefState(distributions=distributions)


def apply_system_act(b: BeliefState, act: DialogueAct,
                     offered_entity: dict[str, str] | None = None
                     ) -> BeliefState:
    """Record the system act; informs answer (clear) requested slots."""
    requested = b.requested
    offered = b.offered_entity
    if act.act_type in ("inform", "inform_alternatives"):
        answered = {slot for slot, _ in act.items}
        requested = frozenset(requested - answered)
        if offered_entity is not None:
            offered = offered_entity
    label = act.act_type
    if act.act_type in ("request", "confirm", "select"):
        label = f"{act.act_type}({act.slot})"
    return replace(b, requested=requested, last_system_action=label,
                   offered_entity=offered)


def focus_update(b: BeliefState, ev: TurnEvidence,
                 ontology: Ontology) -> BeliefState:
    """Focus rule: p'(v) = q(v) + (1 - m) * p(v) with m the evidence mass."""
    ev.validate(ontology)
    distributions = {}
    for slot, p in b.distributions.items():
        q = ev.slot_evidence.get(slot)
        if not q:
            distributions[slot] = p.copy()
            continue
        support = slot_support(ontology, slot)
        q_vec = np.zeros(len(support))
        for value, mass in q.items():
            q_vec[support.index(value)] = mass
        m = q_vec.sum()
        distributions[slot] = q_vec + (1.0 - m) * p
    return BeliefState(
        distributions=distributions,
        requested=frozenset(b.requested | ev.requests),
        last_user_act_type=ev.act_type,
        last_system_action=b.last_system_action,
        turn=b.turn + 1,
        offered_entity=b.offered_entity,
    )


def evidence_from_act(act: DialogueAct, ontology: Ontology,
                      last_system_act: DialogueAct | None) -> TurnEvidence:
    """Turn an observed user act into focus-rule evidence.

    Affirm/negate are interpreted against the system's last confirm; with
    no confirm context they degrade to null evidence.
    """
    c = act.confidence
    evidence: dict[str, dict[str, float]] = {}
    requests: set[str] = set()

    def confirm_context() -> tuple[str, str] | None:
        if last_system_act is not None and last_system_act.act_type == "confirm":
            return last_system_act.items[0]  # type: ignore[return-value]
        return None

    if act.act_type == "inform":
        for slot, value in act.items:
            if value is None:
                continue
            evidence.setdefault(slot, {})[value] = c
    elif act.act_type == "request":
        requests.add(act.slot)  # type: ignore[arg-type]
    elif act.act_type == "affirm":
        ctx = confirm_context()
        if ctx is None:
            logger.warning("affirm without a preceding confirm; ignored")
        else:
            slot, value = ctx
            evidence[slot] = {value: c}
    elif act.act_type == "negate":
        ctx = confirm_context()
        if act.items:
            # negation with an explicit correction
            for slot, value in act.items:
                if value is not None:
                    evidence.setdefault(slot, {})[value] = c
        elif ctx is None:
            logger.warning("bare negate without a preceding confirm; ignored")
        else:
            slot, denied = ctx
            others = [v for v in ontology.values(slot) if v != denied]
            if others:
                share = c / len(others)
                evidence[slot] = {v: share for v in others}
    # hello / bye / null carry no slot evidence

    return TurnEvidence(slot_evidence=evidence, requests=frozenset(requests),
                        act_type=act.act_type)
