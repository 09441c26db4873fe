"""Agenda-style simulated user with behaviour profiles and a noise channel."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import (DONTCARE, DialogueAct, EntityDatabase, Ontology, query)

PATIENCE = 5
CONSTRAINT_PROB = 0.6
DONTCARE_PROB = 0.05
VOLUNTEER_PROB = 0.3
UNFRIENDLY_NULL_PROB = 0.3
MAX_GOAL_RESAMPLES = 100

ENV_PROFILE_TABLE = {
    "env1": (0.00, True, "standard"),
    "env2": (0.00, False, "standard"),
    "env3": (0.15, True, "standard"),
    "env4": (0.15, False, "standard"),
    "env5": (0.15, True, "unfriendly"),
    "env6": (0.30, True, "standard"),
}


@dataclass(frozen=True)
class EnvProfile:
    id: str
    semantic_error_rate: float
    action_masks: bool
    user_profile: str

    @staticmethod
    def by_name(name: str) -> "EnvProfile":
        key = name.lower()
        if key not in ENV_PROFILE_TABLE:
            raise ValueError(f"unknown environment profile {name!r}")
        rate, masks, profile = ENV_PROFILE_TABLE[key]
        return EnvProfile(key, rate, masks, profile)

    def with_error_rate(self, rate: float) -> "EnvProfile":
        return EnvProfile(self.id, rate, self.action_masks, self.user_profile)


@dataclass(frozen=True)
class UserGoal:
    constraints: tuple[tuple[str, str], ...]
    requests: tuple[str, ...]
    patience: int = PATIENCE

    def constraint_value(self, slot: str) -> str | None:
        for s, v in self.constraints:
            if s == slot:
                return v
        return None

    def satisfied_by(self, entity: dict[str, str] | None) -> bool:
        if entity is None:
            return False
        return all(v == DONTCARE or entity[s] == v
                   for s, v in self.constraints)


def sample_goal(ontology: Ontology, db: EntityDatabase,
                rng: np.random.Generator) -> UserGoal:
    """Sample a satisfiable goal; relax constraints if resampling stalls."""
    extra = [r for r in ontology.requestable if r not in ontology.slots]
    request_pool = extra or list(ontology.requestable)
    for attempt in range(MAX_GOAL_RESAMPLES + 1):
        constraints = []
        for slot, values in ontology.informable:
            if rng.random() < CONSTRAINT_PROB:
                if rng.random() < DONTCARE_PROB:
                    constraints.append((slot, DONTCARE))
                else:
                    constraints.append((slot, values[rng.integers(len(values))]))
        if not constraints:
            continue
        if attempt == MAX_GOAL_RESAMPLES:
            # keep relaxing to dontcare until an entity matches
            while not query(db, ontology, constraints):
                for i, (slot, value) in enumerate(constraints):
                    if value != DONTCARE:
                        constraints[i] = (slot, DONTCARE)
                        break
                else:
                    break
        if not query(db, ontology, constraints):
            continue
        n_requests = int(rng.integers(1, min(3, len(request_pool)) + 1))
        picks = rng.choice(len(request_pool), size=n_requests, replace=False)
        requests = tuple(request_pool[i] for i in sorted(picks))
        return UserGoal(constraints=tuple(constraints), requests=requests)
    raise RuntimeError("goal sampling failed")  # pragma: no cover


@dataclass
class UserState:
    """Mutable per-dialogue user bookkeeping."""

    conveyed: set[str] = field(default_factory=set)
    answered: set[str] = field(default_factory=set)
    offer_ok: bool = False
    consecutive_bad: int = 0
    seen_system_acts: set = field(default_factory=set)
    hung_up: bool = False
    last_act: DialogueAct | None = None

    def satisfied(self, goal: UserGoal) -> bool:
        return self.offer_ok and set(goal.requests) <= self.answered


def _inform_items(goal: UserGoal, state: UserState, slots,
                  volunteer: bool, rng: np.random.Generator):
    """Volunteer up to two not-yet-conveyed constraints with prob 0.3 each."""
    items = list(slots)
    if volunteer:
        pool = [(s, v) for s, v in goal.constraints
                if s not in state.conveyed and s not in {x[0] for x in items}]
        added = 0
        for s, v in pool:
            if added >= 2:
                break
            if rng.random() < VOLUNTEER_PROB:
                items.append((s, v))
                added += 1
    for s, _ in items:
        state.conveyed.add(s)
    return DialogueAct("inform", tuple(items))


def user_respond(goal: UserGoal, state: UserState, system_act: DialogueAct,
                 offered_entity: dict[str, str] | None, profile: str,
                 rng: np.random.Generator) -> DialogueAct:
    """True (uncorrupted) user response to one system act.

    A system turn counts against patience when it does not advance the
    user's agenda: exact repeats, offers that violate a constraint or
    come up empty, re-requests of slots the user already stated, and
    contentless prompts. ``goal.patience`` consecutive bad turns make the
    user hang up.
    """
    signature = (system_act.act_type, system_act.items)
    repeated = signature in state.seen_system_acts
    state.seen_system_acts.add(signature)

    volunteer = profile == "standard"
    bad_turn = repeated
    if profile == "unfriendly" and rng.random() < UNFRIENDLY_NULL_PROB:
        response = DialogueAct("null")
        return _book_patience(goal, state, bad_turn, response)

    act_type = system_act.act_type
    if act_type == "request":
        slot = system_act.slot
        bad_turn = bad_turn or slot in state.conveyed
        value = goal.constraint_value(slot) or DONTCARE
        response = _inform_items(goal, state, [(slot, value)], volunteer, rng)
    elif act_type == "confirm":
        slot, value = system_act.items[0]
        goal_value = goal.constraint_value(slot) or DONTCARE
        state.conveyed.add(slot)
        if value == goal_value:
            response = DialogueAct("affirm")
        else:
            response = DialogueAct("negate", ((slot, goal_value),))
    elif act_type == "select":
        slot = system_act.slot
        bad_turn = bad_turn or slot in state.conveyed
        value = goal.constraint_value(slot) or DONTCARE
        response = _inform_items(goal, state, [(slot, value)], volunteer, rng)
    elif act_type in ("inform", "inform_alternatives"):
        if offered_entity is None:
            # the system found nothing; restate one constraint
            bad_turn = True
            real = [(s, v) for s, v in goal.constraints if v != DONTCARE]
            if real:
                # an annoyed correction restates a single constraint;
                # volunteering happens only when answering a question
                pick = real[int(rng.integers(len(real)))]
                response = _inform_items(goal, state, [pick], False, rng)
            else:
                response = DialogueAct("null")
        else:
            violated = [(s, v) for s, v in goal.constraints
                        if v != DONTCARE and offered_entity[s] != v]
            if violated:
                bad_turn = True
                state.offer_ok = False
                pick = violated[int(rng.integers(len(violated)))]
                response = _inform_items(goal, state, [pick], False, rng)
            else:
                bad_turn = repeated
                state.offer_ok = True
                for slot, _ in system_act.items:
                    if slot in goal.requests:
                        state.answered.add(slot)
                pending = [r for r in goal.requests
                           if r not in state.answered]
                if pending:
                    response = DialogueAct("request", ((pending[0], None),))
                else:
                    response = DialogueAct("bye")
    elif act_type in ("reqmore", "repeat"):
        if state.offer_ok and set(goal.requests) <= state.answered:
            response = DialogueAct("bye")
        elif state.last_act is not None:
            # a contentless prompt makes the user repeat themselves
            # verbatim (the top agenda item is re-pushed, not popped)
            bad_turn = True
            response = state.last_act
        else:
            unconveyed = [(s, v) for s, v in goal.constraints
                          if s not in state.conveyed]
            response = _inform_items(goal, state, [unconveyed[0]],
                                     volunteer, rng)
    else:
        bad_turn = True
        response = DialogueAct("null")
    response = _book_patience(goal, state, bad_turn, response)
    if response.act_type in ("inform", "request"):
        state.last_act = response
    return response


def _book_patience(goal: UserGoal, state: UserState, bad_turn: bool,
                   response: DialogueAct) -> DialogueAct:
    if response.act_type == "bye":
        return response
    if bad_turn:
        state.consecutive_bad += 1
        if state.consecutive_bad >= goal.patience:
            state.hung_up = True
            return DialogueAct("bye")
    else:
        state.consecutive_bad = 0
    return response


def corrupt(act: DialogueAct, error_rate: float, ontology: Ontology,
            rng: np.random.Generator) -> DialogueAct:
    """Semantic error channel; returns the observed act with confidence."""
    if not 0.0 <= error_rate <= 1.0:
        raise ValueError("error rate outside [0, 1]")
    if rng.random() >= error_rate:
        conf = rng.uniform(0.6, 1.0)
        return DialogueAct(act.act_type, act.items, conf)
    conf = rng.uniform(0.2, 0.7)
    kind = ("substitute", "null", "flip")[int(rng.integers(3))]
    if kind == "substitute":
        slots_with_values = [i for i, (s, v) in enumerate(act.items)
                             if v is not None and v != DONTCARE
                             and s in ontology.slots]
        if slots_with_values:
            idx = slots_with_values[int(rng.integers(len(slots_with_values)))]
            slot, value = act.items[idx]
            others = [v for v in ontology.values(slot) if v != value]
            new_value = others[int(rng.integers(len(others)))]
            items = tuple((s, new_value) if i == idx else (s, v)
                          for i, (s, v) in enumerate(act.items))
            return DialogueAct(act.act_type, items, conf)
        return DialogueAct("null", confidence=conf)
    if kind == "flip":
        if act.act_type == "affirm":
            return DialogueAct("negate", confidence=conf)
        if act.act_type == "negate":
            return DialogueAct("affirm", confidence=conf)
        return DialogueAct("null", confidence=conf)
    return DialogueAct("null", confidence=conf)
