"""Dialogue episodes: system-action realisation and the user-system loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .belief import (BeliefState, apply_system_act, evidence_from_act,
                     focus_update, initial_belief)
from .domain import (DONTCARE, DialogueAct, EntityDatabase, InfoAction,
                     Ontology, query)
from .rewards import RewardConfig, extrinsic_reward
from .usersim import EnvProfile, UserGoal, UserState, corrupt, sample_goal, user_respond

MAX_TURNS = 25


@dataclass(frozen=True)
class ActionChoice:
    """A policy decision plus the metadata learners need later."""

    act: DialogueAct
    branch: str  # "info" | "general"
    merged_index: int | None = None
    merged_probs: tuple[float, ...] | None = None
    master_index: int | None = None
    master_probs: tuple[float, ...] | None = None
    general_index: int | None = None
    general_probs: tuple[float, ...] | None = None
    info_index: int | None = None
    info_slot: str | None = None
    info_kind: str | None = None


@dataclass
class TurnRecord:
    belief_before: BeliefState
    choice: ActionChoice
    system_act: DialogueAct
    belief_after: BeliefState
    reward: float
    terminal: bool


@dataclass
class Episode:
    goal: UserGoal
    turns: list[TurnRecord] = field(default_factory=list)
    success: bool = False
    masks_on: bool = True

    @property
    def length(self) -> int:
        return len(self.turns)

    @property
    def total_reward(self) -> float:
        return sum(t.reward for t in self.turns)


def belief_constraints(b: BeliefState, ontology: Ontology):
    """Top-value constraints implied by the belief (dontcare/none = free)."""
    constraints = []
    for slot in ontology.slots:
        dist = b.distribution(slot)
        top = int(np.argmax(dist))
        values = ontology.values(slot)
        if top < len(values):
            constraints.append((slot, values[top]))
        elif top == len(values):
            constraints.append((slot, DONTCARE))
    return constraints


def matching_entities(b: BeliefState, ontology: Ontology,
                      db: EntityDatabase) -> list[dict[str, str]]:
    return query(db, ontology, belief_constraints(b, ontology))


def top_values(dist: np.ndarray, values: tuple[str, ...], k: int) -> list[str]:
    order = np.argsort(-dist[:len(values)], kind="stable")
    return [values[int(i)] for i in order[:k]]


def realise_action(kind: str, slot: str | None, b: BeliefState,
                   ontology: Ontology, db: EntityDatabase
                   ) -> tuple[DialogueAct, dict[str, str] | None]:
    """Turn an abstract action into a concrete act (plus offered entity)."""
    if kind == "request":
        return DialogueAct("request", ((slot, None),)), None
    if kind == "confirm":
        value = top_values(b.distribution(slot), ontology.values(slot), 1)[0]
        return DialogueAct("confirm", ((slot, value),)), None
    if kind == "select":
        vals = top_values(b.distribution(slot), ontology.values(slot), 2)
        return DialogueAct("select", tuple((slot, v) for v in vals)), None
    if kind in ("inform", "inform_alternatives"):
        matches = matching_entities(b, ontology, db)
        if not matches:
            return DialogueAct("inform", (("name", "none"),)), None
        entity = matches[0]
        if kind == "inform_alternatives" and b.offered_entity is not None:
            alts = [e for e in matches
                    if e["name"] != b.offered_entity["name"]]
            if alts:
                entity = alts[0]
        items = [("name", entity["name"])]
        for req in sorted(b.requested):
            if req != "name":
                items.append((req, entity[req]))
        return DialogueAct(kind, tuple(items)), entity
    if kind in ("reqmore", "bye", "repeat"):
        return DialogueAct(kind), None
    raise ValueError(f"cannot realise action kind {kind!r}")


def run_dialogue(policy, env: EnvProfile, ontology: Ontology,
                 db: EntityDatabase, user_rng: np.random.Generator,
                 policy_rng: np.random.Generator | None = None,
                 mode: str = "eval", max_turns: int = MAX_TURNS,
                 reward_cfg: RewardConfig = RewardConfig(),
                 goal: UserGoal | None = None) -> Episode:
    """Run one dialogue between a policy and the simulated user.

    ``policy`` needs an ``act(belief, masks_on, mode, rng) -> ActionChoice``
    method. Termination: system bye, user bye (incl. lost patience), or
    the turn cap.
    """
    policy_rng = policy_rng or user_rng
    if hasattr(policy, "begin_dialogue"):
        policy.begin_dialogue(policy_rng)
    if goal is None:
        goal = sample_goal(ontology, db, user_rng)
    state = UserState()
    episode = Episode(goal=goal, masks_on=env.action_masks)
    b = initial_belief(ontology)

    for turn in range(max_turns):
        choice = policy.act(b, env.action_masks, mode, policy_rng)
        sys_act = choice.act
        offered = None
        if sys_act.act_type in ("inform", "inform_alternatives"):
            offered = _entity_by_name(sys_act, ontology, db)
        b_sys = apply_system_act(b, sys_act, offered)

        if sys_act.act_type == "bye":
            success = state.satisfied(goal)
            episode.turns.append(TurnRecord(
                b, choice, sys_act, b_sys,
                extrinsic_reward(True, success, reward_cfg), True))
            episode.success = success
            return episode

        true_act = user_respond(goal, state, sys_act,
                                b_sys.offered_entity, env.user_profile,
                                user_rng)
        user_bye = true_act.act_type == "bye"
        observed = corrupt(true_act, env.semantic_error_rate, ontology,
                           user_rng)
        ev = evidence_from_act(observed, ontology, sys_act)
        b_next = focus_update(b_sys, ev, ontology)

        final = user_bye or turn == max_turns - 1
        success = user_bye and state.satisfied(goal) and not state.hung_up
        episode.turns.append(TurnRecord(
            b, choice, sys_act, b_next,
            extrinsic_reward(final, success, reward_cfg), final))
        if final:
            episode.success = success
            return episode
        b = b_next
    return episode  # pragma: no cover


def _entity_by_name(act: DialogueAct, ontology: Ontology,
                    db: EntityDatabase) -> dict[str, str] | None:
    for slot, value in act.items:
        if slot == "name":
            if value == "none":
                return None
            for ent in db.entities:
                if ent["name"] == value:
                    return ent
    return None


class ScriptedOracle:
    """Request every slot once, offer, answer requests, let the user close.

    Serves as the perfect-information reference: with a noise-free channel
    it succeeds on every goal.
    """

    def __init__(self, ontology: Ontology, db: EntityDatabase):
        self.ontology = ontology
        self.db = db

    def act(self, b: BeliefState, masks_on: bool, mode: str,
            rng: np.random.Generator) -> ActionChoice:
        for slot in self.ontology.slots:
            dist = b.distribution(slot)
            if dist[-1] >= dist.max():  # still 'none'-dominated: ask
                act, _ = realise_action("request", slot, b, self.ontology,
                                        self.db)
                return ActionChoice(act=act, branch="info", info_slot=slot,
                                    info_kind="request")
        act, _ = realise_action("inform", None, b, self.ontology, self.db)
        return ActionChoice(act=act, branch="general")


class AlwaysBye:
    def act(self, b, masks_on, mode, rng) -> ActionChoice:
        return ActionChoice(act=DialogueAct("bye"), branch="general")
