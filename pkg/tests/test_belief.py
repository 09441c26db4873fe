"""Focus-rule tracker: normalization, update arithmetic, evidence parsing."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from feudalgain.belief import (
    TurnEvidence,
    apply_system_act,
    evidence_from_act,
    focus_update,
    initial_belief,
    slot_support,
)
from feudalgain.domain import DONTCARE, DialogueAct, DomainError, builtin_domain

ONTOLOGY, DB = builtin_domain("toy_cr")


def _random_evidence(rng):
    evidence = {}
    for slot in ONTOLOGY.slots:
        if rng.random() < 0.5:
            continue
        support = slot_support(ONTOLOGY, slot)[:-1]  # anything but 'none'
        k = int(rng.integers(1, min(3, len(support)) + 1))
        picks = rng.choice(len(support), size=k, replace=False)
        masses = rng.random(k)
        masses *= rng.random() / max(masses.sum(), 1e-12)
        evidence[slot] = {support[i]: float(m)
                          for i, m in zip(picks, masses)}
    return TurnEvidence(slot_evidence=evidence, act_type="inform")


class TestInitialBelief:
    def test_point_mass_on_none(self):
        b = initial_belief(ONTOLOGY)
        for slot in ONTOLOGY.slots:
            dist = b.distribution(slot)
            assert dist[-1] == 1.0
            assert dist.sum() == 1.0
        assert b.turn == 0
        assert not b.requested


class TestFocusUpdate:
    def test_focus_arithmetic(self):
        b = initial_belief(ONTOLOGY)
        ev = TurnEvidence(slot_evidence={"area": {"north": 0.8}})
        b2 = focus_update(b, ev, ONTOLOGY)
        dist = b2.distribution("area")
        support = slot_support(ONTOLOGY, "area")
        assert dist[support.index("north")] == pytest.approx(0.8)
        assert dist[-1] == pytest.approx(0.2)

    def test_second_update_rescales_prior(self):
        b = initial_belief(ONTOLOGY)
        b = focus_update(b, TurnEvidence({"area": {"north": 0.8}}), ONTOLOGY)
        b = focus_update(b, TurnEvidence({"area": {"south": 0.5}}), ONTOLOGY)
        support = slot_support(ONTOLOGY, "area")
        dist = b.distribution("area")
        assert dist[support.index("south")] == pytest.approx(0.5)
        assert dist[support.index("north")] == pytest.approx(0.4)
        assert dist[-1] == pytest.approx(0.1)

    def test_input_not_mutated(self):
        b = initial_belief(ONTOLOGY)
        before = b.distribution("food").copy()
        focus_update(b, TurnEvidence({"food": {"thai": 1.0}}), ONTOLOGY)
        np.testing.assert_array_equal(b.distribution("food"), before)

    def test_normalisation_over_many_updates(self):
        rng = np.random.default_rng(11)
        b = initial_belief(ONTOLOGY)
        for _ in range(1000):
            b = focus_update(b, _random_evidence(rng), ONTOLOGY)
            for slot in ONTOLOGY.slots:
                dist = b.distribution(slot)
                assert abs(dist.sum() - 1.0) < 1e-9
                assert np.all(dist >= -1e-15)

    @given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
    @settings(max_examples=100, deadline=None)
    def test_evidence_mass_bounds_posterior(self, seed, mass):
        rng = np.random.default_rng(seed)
        b = initial_belief(ONTOLOGY)
        for _ in range(int(rng.integers(0, 5))):
            b = focus_update(b, _random_evidence(rng), ONTOLOGY)
        ev = TurnEvidence({"food": {"thai": mass}})
        b2 = focus_update(b, ev, ONTOLOGY)
        support = slot_support(ONTOLOGY, "food")
        p_before = b.distribution("food")[support.index("thai")]
        p_after = b2.distribution("food")[support.index("thai")]
        expected = mass + (1.0 - mass) * p_before
        assert p_after == pytest.approx(expected, abs=1e-12)

    def test_rejects_overfull_evidence(self):
        b = initial_belief(ONTOLOGY)
        ev = TurnEvidence({"area": {"north": 0.7, "south": 0.7}})
        with pytest.raises(DomainError):
            focus_update(b, ev, ONTOLOGY)

    def test_rejects_evidence_on_none(self):
        b = initial_belief(ONTOLOGY)
        with pytest.raises(DomainError):
            focus_update(b, TurnEvidence({"area": {"none": 0.5}}), ONTOLOGY)

    def test_rejects_unknown_slot(self):
        b = initial_belief(ONTOLOGY)
        with pytest.raises(DomainError):
            focus_update(b, TurnEvidence({"colour": {"red": 0.5}}), ONTOLOGY)


class TestEvidenceFromAct:
    def test_inform_uses_confidence_as_mass(self):
        act = DialogueAct("inform", (("area", "north"),), confidence=0.65)
        ev = evidence_from_act(act, ONTOLOGY, None)
        assert ev.slot_evidence == {"area": {"north": 0.65}}

    def test_request_collects_requested_slot(self):
        act = DialogueAct("request", (("phone", None),))
        ev = evidence_from_act(act, ONTOLOGY, None)
        assert ev.requests == frozenset({"phone"})
        assert not ev.slot_evidence

    def test_affirm_confirms_the_questioned_value(self):
        confirm = DialogueAct("confirm", (("food", "thai"),))
        ev = evidence_from_act(DialogueAct("affirm", confidence=0.9),
                               ONTOLOGY, confirm)
        assert ev.slot_evidence == {"food": {"thai": 0.9}}

    def test_affirm_without_context_is_ignored(self):
        ev = evidence_from_act(DialogueAct("affirm"), ONTOLOGY, None)
        assert not ev.slot_evidence

    def test_bare_negate_spreads_mass_over_alternatives(self):
        confirm = DialogueAct("confirm", (("area", "north"),))
        ev = evidence_from_act(DialogueAct("negate", confidence=0.8),
                               ONTOLOGY, confirm)
        shares = ev.slot_evidence["area"]
        assert "north" not in shares
        assert sum(shares.values()) == pytest.approx(0.8)
        assert len(set(shares.values())) == 1

    def test_negate_with_correction_informs_it(self):
        confirm = DialogueAct("confirm", (("area", "north"),))
        act = DialogueAct("negate", (("area", "south"),), confidence=0.7)
        ev = evidence_from_act(act, ONTOLOGY, confirm)
        assert ev.slot_evidence == {"area": {"south": 0.7}}

    def test_null_and_bye_carry_nothing(self):
        for kind in ("null", "bye", "hello"):
            ev = evidence_from_act(DialogueAct(kind), ONTOLOGY, None)
            assert not ev.slot_evidence
            assert not ev.requests

    def test_dontcare_is_ordinary_evidence(self):
        act = DialogueAct("inform", (("area", DONTCARE),), confidence=1.0)
        ev = evidence_from_act(act, ONTOLOGY, None)
        assert ev.slot_evidence == {"area": {DONTCARE: 1.0}}


class TestApplySystemAct:
    def test_inform_answers_requests_and_records_offer(self):
        b = initial_belief(ONTOLOGY)
        b = focus_update(b, TurnEvidence(requests=frozenset({"phone"})),
                         ONTOLOGY)
        entity = dict(DB.entities[0])
        act = DialogueAct("inform",
                          (("name", entity["name"]), ("phone", entity["phone"])))
        b2 = apply_system_act(b, act, entity)
        assert "phone" not in b2.requested
        assert b2.offered_entity == entity

    def test_request_label_includes_slot(self):
        b = initial_belief(ONTOLOGY)
        b2 = apply_system_act(b, DialogueAct("request", (("area", None),)))
        assert b2.last_system_action == "request(area)"
