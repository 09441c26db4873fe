"""Feudal policy sets: masking, action selection and the two learners.

The information policy is a slot-shared dueling Q-network trained with
double-DQN targets; the master level is an actor-critic with experience
replay over whole episodes, using truncated importance weights with a
bias-correction term.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .belief import BeliefState
from .dialogue import ActionChoice, Episode, realise_action
from .domain import (GENERAL_ACTIONS, INFO_ACTION_KINDS, EntityDatabase,
                     Ontology, enumerate_actions)
from .features import all_features, info_dim, merged_dim
from .neural import Adam, ActorCriticNetwork, DuelingQNetwork, softmax
from .rewards import RewardConfig, information_gain, thresholded_gain

logger = logging.getLogger(__name__)

MODES = ("feudalgain", "feudal", "feudal-nn")
PASS_INDEX = len(INFO_ACTION_KINDS)  # fourth head output in baseline modes
REQUEST_CERTAINTY_MASK = 0.8
MIN_BEHAVIOUR_PROB = 1e-6


class PolicyError(RuntimeError):
    pass


@dataclass(frozen=True)
class PolicyConfig:
    mode: str = "feudalgain"
    use_pass: bool = True      # baseline modes only
    use_ig: bool = True        # feudalgain only; off trains pi_i on r_e
    hidden_mg: tuple[int, ...] = (250, 130)
    hidden_i: tuple[int, ...] = (130, 50)
    lr_i: float = 3e-4
    lr_mg: float = 1e-3
    gamma: float = 0.99
    batch_size: int = 64
    replay_capacity: int = 10_000
    episode_capacity: int = 2_000
    target_sync: int = 200
    updates_i: int = 2
    replay_updates_mg: int = 4
    truncation_c: float = 10.0
    entropy_bonus: float = 0.01
    trust_delta: float = 1.0
    avg_tau: float = 0.99
    sigma_init: float = 0.5
    epsilon_start: float = 0.3
    epsilon_end: float = 0.05
    epsilon_decay_dialogues: int = 2_000
    explore_floor: float = 0.05
    explore_half_life: float = 250.0
    max_turns: int = 25
    loss_probe_size: int = 512

    def __post_init__(self):
        if self.mode not in MODES:
            raise PolicyError(f"unknown mode {self.mode!r}")

    @property
    def noisy(self) -> bool:
        return self.mode in ("feudalgain", "feudal-nn")

    @property
    def merged(self) -> bool:
        return self.mode == "feudalgain"


@dataclass(frozen=True)
class SlotTransition:
    slot: str
    features: np.ndarray
    action: int  # index into INFO_ACTION_KINDS, or PASS_INDEX
    reward: float
    next_features: np.ndarray
    terminal: bool
    next_valid: tuple[bool, ...] | None = None  # None = all actions valid


@dataclass(frozen=True)
class MasterStep:
    features: np.ndarray
    action: int
    behaviour_probs: tuple[float, ...]
    reward: float
    terminal: bool


def apply_masks(b: BeliefState, ontology: Ontology, db: EntityDatabase,
                masks_on: bool) -> tuple[np.ndarray, np.ndarray]:
    """Boolean allow-masks over (info actions, general actions).

    Info actions are slot-major in ontology order with the kinds
    (request, confirm, select) per slot.
    """
    n_slots = len(ontology.slots)
    info = np.ones(n_slots * len(INFO_ACTION_KINDS), dtype=bool)
    general = np.ones(len(GENERAL_ACTIONS), dtype=bool)
    if not masks_on:
        return info, general

    any_real_top = False
    for i, slot in enumerate(ontology.slots):
        dist = b.distribution(slot)
        n_values = len(ontology.values(slot))
        none_is_max = dist[-1] >= dist.max()
        top_real = float(dist[:n_values].max())
        base = i * len(INFO_ACTION_KINDS)
        if top_real >= REQUEST_CERTAINTY_MASK:
            info[base + 0] = False
        if none_is_max:
            info[base + 1] = False
            info[base + 2] = False
        else:
            if int(np.argmax(dist)) < n_values:
                any_real_top = True

    offered = b.offered_entity is not None
    general[GENERAL_ACTIONS.index("inform")] = any_real_top
    general[GENERAL_ACTIONS.index("inform_alternatives")] = offered
    general[GENERAL_ACTIONS.index("bye")] = offered
    general[GENERAL_ACTIONS.index("repeat")] = False
    return info, general


def _masked_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    z = np.where(mask, logits, -np.inf)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    return int(rng.choice(len(probs), p=probs / probs.sum()))


class ReplayBuffer:
    """FIFO transition buffer with uniform sampling."""

    def __init__(self, capacity: int):
        self._items: deque = deque(maxlen=capacity)

    def __len__(self):
        return len(self._items)

    def extend(self, items):
        self._items.extend(items)

    def sample(self, n: int, rng: np.random.Generator):
        idx = rng.integers(len(self._items), size=n)
        return [self._items[int(i)] for i in idx]


class DdqnLearner:
    """Slot-shared dueling double-DQN over the info action kinds."""

    def __init__(self, n_in: int, n_actions: int, cfg: PolicyConfig,
                 rng: np.random.Generator):
        self.cfg = cfg
        self.n_actions = n_actions
        self.online = DuelingQNetwork(n_in, list(cfg.hidden_i), n_actions,
                                      noisy=cfg.noisy, rng=rng,
                                      sigma_init=cfg.sigma_init)
        self.target = DuelingQNetwork(n_in, list(cfg.hidden_i), n_actions,
                                      noisy=cfg.noisy, rng=rng,
                                      sigma_init=cfg.sigma_init)
        self.target.mlp.copy_from(self.online.mlp)
        self.optimiser = Adam(lr=cfg.lr_i)
        self.replay = ReplayBuffer(cfg.replay_capacity)
        self.updates = 0
        self.loss_log: list[tuple[int, float]] = []

    def store(self, transitions: list[SlotTransition]):
        if self.n_actions == len(INFO_ACTION_KINDS):
            for tr in transitions:
                if tr.action == PASS_INDEX:
                    raise PolicyError("pass transition in merged mode")
        self.replay.extend(transitions)

    def _batch_update(self, rng: np.random.Generator):
        cfg = self.cfg
        batch = self.replay.sample(cfg.batch_size, rng)
        x = np.stack([t.features for t in batch])
        x_next = np.stack([t.next_features for t in batch])
        actions = np.array([t.action for t in batch])
        rewards = np.array([t.reward for t in batch])
        terminal = np.array([t.terminal for t in batch])

        next_valid = np.array([t.next_valid or (True,) * self.n_actions
                               for t in batch])
        q_online_next = self.online.q_values(x_next, "mean")
        a_star = np.where(next_valid, q_online_next, -np.inf).argmax(axis=1)
        q_target_next = self.target.q_values(x_next, "mean")
        bootstrap = q_target_next[np.arange(len(batch)), a_star]
        y = rewards + np.where(terminal, 0.0, cfg.gamma * bootstrap)

        mode = "sample" if cfg.noisy else "mean"
        q = self.online.q_values(x, mode, rng)
        picked = q[np.arange(len(batch)), actions]
        err = picked - y
        dq = np.zeros_like(q)
        # Huber gradient: bounded per-sample TD error keeps the
        # bootstrapped targets from running away late in training
        dq[np.arange(len(batch)), actions] = np.clip(err, -1.0, 1.0) \
            / len(batch)
        self.online.mlp.zero_grad()
        self.online.backward_q(dq)
        self.optimiser.step(self.online.mlp.params(),
                            self.online.mlp.grads())
        self.online.mlp.project()
        self.updates += 1
        if self.updates % cfg.target_sync == 0:
            self.target.mlp.copy_from(self.online.mlp)
        self.loss_log.append((self.updates, self._probe_loss(rng)))

    def _probe_loss(self, rng: np.random.Generator) -> float:
        n = min(self.cfg.loss_probe_size, len(self.replay))
        batch = self.replay.sample(n, rng)
        x = np.stack([t.features for t in batch])
        x_next = np.stack([t.next_features for t in batch])
        actions = np.array([t.action for t in batch])
        rewards = np.array([t.reward for t in batch])
        terminal = np.array([t.terminal for t in batch])
        next_valid = np.array([t.next_valid or (True,) * self.n_actions
                               for t in batch])
        q_online_next = self.online.q_values(x_next, "mean")
        a_star = np.where(next_valid, q_online_next, -np.inf).argmax(axis=1)
        q_target_next = self.target.q_values(x_next, "mean")
        bootstrap = q_target_next[np.arange(n), a_star]
        y = rewards + np.where(terminal, 0.0, self.cfg.gamma * bootstrap)
        q = self.online.q_values(x, "mean")
        return float(np.mean((q[np.arange(n), actions] - y) ** 2))

    def update(self, rng: np.random.Generator):
        if len(self.replay) < self.cfg.batch_size:
            return
        for _ in range(self.cfg.updates_i):
            self._batch_update(rng)


class AcerLearner:
    """Episode-replay actor-critic with truncated importance sampling."""

    def __init__(self, n_in: int, n_actions: int, cfg: PolicyConfig,
                 rng: np.random.Generator):
        self.cfg = cfg
        self.n_actions = n_actions
        self.net = ActorCriticNetwork(n_in, list(cfg.hidden_mg), n_actions,
                                      noisy=cfg.noisy, rng=rng,
                                      sigma_init=cfg.sigma_init)
        self.optimiser = Adam(lr=cfg.lr_mg)
        self.episodes = ReplayBuffer(cfg.episode_capacity)
        # slow-moving average policy anchoring the trust region
        self.avg_net = ActorCriticNetwork(n_in, list(cfg.hidden_mg),
                                          n_actions, noisy=cfg.noisy,
                                          rng=rng, sigma_init=cfg.sigma_init)
        self.avg_net.mlp.copy_from(self.net.mlp)

    def store(self, episode: list[MasterStep]):
        if not episode or not episode[-1].terminal:
            raise PolicyError("episode must end with a terminal step")
        self.episodes.extend([episode])

    def _update_episode(self, steps: list[MasterStep],
                        rng: np.random.Generator):
        cfg = self.cfg
        T = len(steps)
        x = np.stack([s.features for s in steps])
        actions = np.array([s.action for s in steps])
        rewards = np.array([s.reward for s in steps])
        mu_raw = np.stack([s.behaviour_probs for s in steps])
        # the behaviour policy was a masked softmax, so a zero entry marks
        # an action that was masked in that state; the update must respect
        # the same support or V(b) absorbs Q-values of untrainable actions
        valid = mu_raw > 0.0
        mu = np.clip(mu_raw, MIN_BEHAVIOUR_PROB, None)

        mode = "sample" if cfg.noisy else "mean"
        logits, q = self.net.forward(x, mode, rng)
        masked_logits = np.where(valid, logits, -np.inf)
        shifted = masked_logits - masked_logits.max(axis=1, keepdims=True)
        exp = np.where(valid, np.exp(shifted), 0.0)
        pi = exp / exp.sum(axis=1, keepdims=True)
        rho = np.where(valid, pi / mu, 0.0)
        v = (pi * q).sum(axis=1)
        q_taken = q[np.arange(T), actions]
        rho_taken = rho[np.arange(T), actions]

        q_ret = np.empty(T)
        q_ret[T - 1] = rewards[T - 1]
        for t in range(T - 2, -1, -1):
            q_ret[t] = rewards[t] + cfg.gamma * (
                min(1.0, rho_taken[t + 1]) * (q_ret[t + 1] - q_taken[t + 1])
                + v[t + 1])

        # critic: squared error against the retrace-style target
        dq = np.zeros_like(q)
        dq[np.arange(T), actions] = 2.0 * (q_taken - q_ret) / T

        # actor: truncated importance weight + bias correction, as gradient
        # ascent on logits (collected into a descent direction below)
        onehot = np.zeros_like(pi)
        onehot[np.arange(T), actions] = 1.0
        w = np.minimum(cfg.truncation_c, rho_taken)
        adv_taken = q_ret - v
        gain = (w * adv_taken)[:, None] * (onehot - pi)
        coef = np.maximum(
            0.0, 1.0 - cfg.truncation_c / np.maximum(rho, 1e-12)) * pi
        adv_all = q - v[:, None]
        # sum over correction actions a of coef_a * adv_a * dlogpi_a/dlogits
        gain += coef * adv_all - ((coef * adv_all).sum(axis=1, keepdims=True) * pi)
        logpi = np.log(np.clip(pi, 1e-12, None))
        entropy = -(pi * logpi).sum(axis=1, keepdims=True)
        gain += cfg.entropy_bonus * (-pi * (logpi + entropy))

        # trust region against the average policy: project the ascent
        # direction so each step keeps KL(avg || pi) growth below delta
        avg_logits, _ = self.avg_net.forward(x, "mean")
        avg_masked = np.where(valid, avg_logits, -np.inf)
        avg_shifted = avg_masked - avg_masked.max(axis=1, keepdims=True)
        avg_exp = np.where(valid, np.exp(avg_shifted), 0.0)
        pa = avg_exp / avg_exp.sum(axis=1, keepdims=True)
        k = pi - pa
        kg = (k * gain).sum(axis=1)
        kk = (k * k).sum(axis=1)
        scale = np.maximum(0.0, (kg - cfg.trust_delta)
                           / np.maximum(kk, 1e-12))
        gain = gain - scale[:, None] * k
        dlogits = -gain / T

        self.net.mlp.zero_grad()
        self.net.backward(dlogits, dq)
        self.optimiser.step(self.net.mlp.params(), self.net.mlp.grads())
        self.net.mlp.project()
        avg = self.avg_net.mlp.params()
        cur = self.net.mlp.params()
        for key, arr in avg.items():
            arr *= cfg.avg_tau
            arr += (1.0 - cfg.avg_tau) * cur[key]

    def update(self, episode: list[MasterStep], rng: np.random.Generator):
        """One on-policy update plus replayed-episode updates."""
        self._update_episode(episode, rng)
        for _ in range(self.cfg.replay_updates_mg):
            if len(self.episodes) == 0:
                break
            self._update_episode(self.episodes.sample(1, rng)[0], rng)


class PolicySet:
    """The trainable policy hierarchy for one mode."""

    def __init__(self, ontology: Ontology, db: EntityDatabase,
                 cfg: PolicyConfig, seed: int = 0):
        self.ontology = ontology
        self.db = db
        self.cfg = cfg
        rng = np.random.default_rng(seed)
        self.space = enumerate_actions(
            ontology, "feudalgain" if cfg.merged else "feudal_baseline")
        n_info_out = len(INFO_ACTION_KINDS) + (0 if cfg.merged else 1)
        self.pi_i = DdqnLearner(info_dim(ontology), n_info_out, cfg, rng)
        d_mg = merged_dim(ontology)
        if cfg.merged:
            self.pi_mg = AcerLearner(d_mg, len(GENERAL_ACTIONS) + 1, cfg, rng)
            self.pi_m = None
            self.pi_g = None
        else:
            self.pi_mg = None
            self.pi_m = AcerLearner(d_mg, 2, cfg, rng)
            self.pi_g = AcerLearner(d_mg, len(GENERAL_ACTIONS) + 1, cfg, rng)
        self.dialogues_trained = 0
        self._noise_key = None

    # -- action selection ---------------------------------------------------

    def begin_dialogue(self, rng: np.random.Generator):
        """Fix the exploration noise for the next dialogue.

        Sampling one noisy-layer perturbation per dialogue (instead of per
        turn) makes exploration temporally consistent, which is what lets
        the policy stumble onto multi-turn information-seeking chains.
        """
        self._noise_key = int(rng.integers(1 << 31))

    def _noise_rng(self, tag: int,
                   rng: np.random.Generator) -> np.random.Generator:
        if self._noise_key is None:
            return rng
        return np.random.default_rng([self._noise_key, tag])

    def _epsilon(self) -> float:
        cfg = self.cfg
        frac = min(1.0, self.dialogues_trained / cfg.epsilon_decay_dialogues)
        return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)

    def _explore_eps(self) -> float:
        cfg = self.cfg
        return max(cfg.explore_floor,
                   0.5 ** (self.dialogues_trained / cfg.explore_half_life))

    def _explore_mix(self, probs: np.ndarray, mask: np.ndarray,
                     mode: str) -> np.ndarray:
        """Anneal a uniform floor into the training behaviour policy.

        The mixture keeps early behaviour broad enough to stumble on the
        first successes (terminating early is otherwise a safe local
        optimum) and is stored as the true behaviour distribution, so the
        off-policy updates stay unbiased.
        """
        if mode != "train":
            return probs
        eps = self._explore_eps()
        uniform = mask.astype(float)
        uniform /= uniform.sum()
        return (1.0 - eps) * probs + eps * uniform

    def _select_info(self, per_slot_feats: dict[str, np.ndarray],
                     info_mask: np.ndarray, mode: str,
                     rng: np.random.Generator) -> tuple[int, str, str]:
        slots = self.ontology.slots
        x = np.stack([per_slot_feats[s] for s in slots])
        noise = "sample" if (mode == "train" and self.cfg.noisy) else "mean"
        q = self.pi_i.online.q_values(x, noise,
                                      self._noise_rng(2, rng))
        q = q[:, :len(INFO_ACTION_KINDS)].reshape(-1)
        q = np.where(info_mask, q, -np.inf)
        if (mode == "train" and not self.cfg.noisy
                and rng.random() < self._epsilon()):
            allowed = np.flatnonzero(info_mask)
            idx = int(allowed[rng.integers(len(allowed))])
        else:
            idx = int(np.argmax(q))
        slot = slots[idx // len(INFO_ACTION_KINDS)]
        kind = INFO_ACTION_KINDS[idx % len(INFO_ACTION_KINDS)]
        return idx, slot, kind

    def act(self, b: BeliefState, masks_on: bool, mode: str,
            rng: np.random.Generator) -> ActionChoice:
        cfg = self.cfg
        merged_feats, per_slot = all_features(b, self.ontology, self.db,
                                              cfg.max_turns)
        info_mask, general_mask = apply_masks(b, self.ontology, self.db,
                                              masks_on)
        info_available = bool(info_mask.any())
        if not info_available and not general_mask.any():
            logger.warning("all actions masked; falling back to reqmore")
            act, _ = realise_action("reqmore", None, b, self.ontology,
                                    self.db)
            g_probs = tuple(1.0 if a == "reqmore" else 0.0
                            for a in GENERAL_ACTIONS) + (0.0,)
            return ActionChoice(act=act, branch="general",
                                merged_index=GENERAL_ACTIONS.index("reqmore"),
                                merged_probs=g_probs,
                                master_index=1, master_probs=(0.0, 1.0),
                                general_index=GENERAL_ACTIONS.index("reqmore"),
                                general_probs=g_probs)
        noise = "sample" if (mode == "train" and cfg.noisy) else "mean"

        if cfg.merged:
            merged_mask = np.append(general_mask, info_available)
            logits, _ = self.pi_mg.net.forward(merged_feats, noise,
                                                self._noise_rng(0, rng))
            probs = self._explore_mix(_masked_softmax(logits[0], merged_mask),
                                      merged_mask, mode)
            m_idx = _sample(probs, rng) if mode == "train" \
                else int(np.argmax(probs))
            merged_probs = tuple(probs)
            if m_idx == len(GENERAL_ACTIONS):  # defer to the info policy
                i_idx, slot, kind = self._select_info(per_slot, info_mask,
                                                      mode, rng)
                act, _ = realise_action(kind, slot, b, self.ontology, self.db)
                return ActionChoice(act=act, branch="info",
                                    merged_index=m_idx,
                                    merged_probs=merged_probs,
                                    info_index=i_idx, info_slot=slot,
                                    info_kind=kind)
            kind = GENERAL_ACTIONS[m_idx]
            act, _ = realise_action(kind, None, b, self.ontology, self.db)
            return ActionChoice(act=act, branch="general",
                                merged_index=m_idx, merged_probs=merged_probs)

        # baseline: master chooses the sub-policy, then pi_i or pi_g acts
        master_mask = np.array([info_available, bool(general_mask.any())])
        m_logits, _ = self.pi_m.net.forward(merged_feats, noise,
                                            self._noise_rng(0, rng))
        m_probs = self._explore_mix(_masked_softmax(m_logits[0], master_mask),
                                    master_mask, mode)
        m_idx = _sample(m_probs, rng) if mode == "train" \
            else int(np.argmax(m_probs))
        if m_idx == 0:
            i_idx, slot, kind = self._select_info(per_slot, info_mask, mode,
                                                  rng)
            act, _ = realise_action(kind, slot, b, self.ontology, self.db)
            return ActionChoice(act=act, branch="info",
                                master_index=0, master_probs=tuple(m_probs),
                                info_index=i_idx, info_slot=slot,
                                info_kind=kind)
        g_mask = np.append(general_mask, False)  # pass never selectable
        g_logits, _ = self.pi_g.net.forward(merged_feats, noise,
                                            self._noise_rng(1, rng))
        g_probs = self._explore_mix(_masked_softmax(g_logits[0], g_mask),
                                    g_mask, mode)
        g_idx = _sample(g_probs, rng) if mode == "train" \
            else int(np.argmax(g_probs))
        kind = GENERAL_ACTIONS[g_idx]
        act, _ = realise_action(kind, None, b, self.ontology, self.db)
        return ActionChoice(act=act, branch="general",
                            master_index=1, master_probs=tuple(m_probs),
                            general_index=g_idx, general_probs=tuple(g_probs))

    # -- learning -----------------------------------------------------------

    def build_transitions(self, episode: Episode, reward_cfg: RewardConfig
                          ) -> tuple[list[SlotTransition],
                                     dict[str, list[MasterStep]]]:
        """Episode -> slot-level transitions and master-level sequences."""
        cfg = self.cfg
        slot_transitions: list[SlotTransition] = []
        sequences: dict[str, list[MasterStep]] = (
            {"pi_mg": []} if cfg.merged else {"pi_m": [], "pi_g": []})

        feats_cache = [all_features(t.belief_before, self.ontology, self.db,
                                    cfg.max_turns) for t in episode.turns]
        feats_after = [all_features(t.belief_after, self.ontology, self.db,
                                    cfg.max_turns) for t in episode.turns]

        slots = self.ontology.slots
        n_kinds = len(INFO_ACTION_KINDS)
        for t, turn in enumerate(episode.turns):
            merged_feats, per_slot = feats_cache[t]
            _, per_slot_after = feats_after[t]
            choice = turn.choice
            is_info = choice.branch == "info"
            # validity of info actions in the successor state; the Q
            # bootstrap must range over the same support the greedy policy
            # acts on, or never-taken masked actions inflate the targets
            next_info_mask, _ = apply_masks(turn.belief_after, self.ontology,
                                            self.db, episode.masks_on)

            def _next_valid(slot: str) -> tuple[bool, ...]:
                base = slots.index(slot) * n_kinds
                nv = tuple(bool(v)
                           for v in next_info_mask[base:base + n_kinds])
                if cfg.merged:
                    return nv
                return nv + (True,)  # pass stays available

            if is_info:
                kind_idx = INFO_ACTION_KINDS.index(choice.info_kind)
                if cfg.merged and cfg.use_ig:
                    gain = information_gain(turn.belief_before,
                                            turn.system_act,
                                            turn.belief_after, reward_cfg)
                    r = float(thresholded_gain(gain, reward_cfg.delta))
                else:
                    r = turn.reward
                slot_transitions.append(SlotTransition(
                    slot=choice.info_slot,
                    features=per_slot[choice.info_slot],
                    action=kind_idx, reward=r,
                    next_features=per_slot_after[choice.info_slot],
                    terminal=turn.terminal,
                    next_valid=_next_valid(choice.info_slot)))
            elif not cfg.merged and cfg.use_pass:
                for slot in self.ontology.slots:
                    slot_transitions.append(SlotTransition(
                        slot=slot, features=per_slot[slot],
                        action=PASS_INDEX, reward=turn.reward,
                        next_features=per_slot_after[slot],
                        terminal=turn.terminal,
                        next_valid=_next_valid(slot)))

            if cfg.merged:
                sequences["pi_mg"].append(MasterStep(
                    features=merged_feats,
                    action=choice.merged_index,
                    behaviour_probs=choice.merged_probs,
                    reward=turn.reward, terminal=turn.terminal))
            else:
                sequences["pi_m"].append(MasterStep(
                    features=merged_feats,
                    action=choice.master_index,
                    behaviour_probs=choice.master_probs,
                    reward=turn.reward, terminal=turn.terminal))
                n_g = len(GENERAL_ACTIONS) + 1
                if is_info:
                    pass_probs = tuple(0.0 if i < n_g - 1 else 1.0
                                       for i in range(n_g))
                    sequences["pi_g"].append(MasterStep(
                        features=merged_feats, action=n_g - 1,
                        behaviour_probs=pass_probs,
                        reward=turn.reward, terminal=turn.terminal))
                else:
                    sequences["pi_g"].append(MasterStep(
                        features=merged_feats,
                        action=choice.general_index,
                        behaviour_probs=choice.general_probs,
                        reward=turn.reward, terminal=turn.terminal))
        return slot_transitions, sequences

    def learn_from(self, episode: Episode, reward_cfg: RewardConfig,
                   rng: np.random.Generator):
        slot_transitions, sequences = self.build_transitions(episode,
                                                             reward_cfg)
        self.pi_i.store(slot_transitions)
        self.pi_i.update(rng)
        if self.cfg.merged:
            self.pi_mg.store(sequences["pi_mg"])
            self.pi_mg.update(sequences["pi_mg"], rng)
        else:
            self.pi_m.store(sequences["pi_m"])
            self.pi_m.update(sequences["pi_m"], rng)
            self.pi_g.store(sequences["pi_g"])
            self.pi_g.update(sequences["pi_g"], rng)
        self.dialogues_trained += 1

    # -- persistence --------------------------------------------------------

    def learners(self) -> dict[str, object]:
        out: dict[str, object] = {"pi_i": self.pi_i}
        if self.cfg.merged:
            out["pi_mg"] = self.pi_mg
        else:
            out["pi_m"] = self.pi_m
            out["pi_g"] = self.pi_g
        return out

    def parameters(self) -> dict[str, np.ndarray]:
        out = {}
        for name, learner in self.learners().items():
            mlp = learner.online.mlp if isinstance(learner, DdqnLearner) \
                else learner.net.mlp
            for key, arr in mlp.params().items():
                out[f"{name}.{key}"] = arr
        return out

    def load_parameters(self, values: dict[str, np.ndarray]):
        own = self.parameters()
        if set(own) != set(values):
            raise PolicyError("checkpoint parameter names do not match")
        for key, arr in own.items():
            src = np.asarray(values[key], dtype=np.float64)
            if src.shape != arr.shape:
                raise PolicyError(f"checkpoint shape mismatch for {key}")
            arr[...] = src
        self.pi_i.target.mlp.copy_from(self.pi_i.online.mlp)
        for learner in self.learners().values():
            if isinstance(learner, AcerLearner):
                learner.avg_net.mlp.copy_from(learner.net.mlp)
