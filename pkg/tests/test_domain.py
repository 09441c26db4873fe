import json

import pytest

from feudalgain.domain import (DONTCARE, DialogueAct, DomainError,
                               EntityDatabase, GENERAL_ACTIONS,
                               INFO_ACTION_KINDS, Ontology, builtin_domain,
                               enumerate_actions, load_database,
                               load_ontology, query)


@pytest.fixture(scope="module")
def cr():
    return builtin_domain("toy_cr")


class TestOntology:
    def test_builtin_domains_load(self):
        for name in ("toy_cr", "toy_sfr", "toy_lap"):
            ontology, db = builtin_domain(name)
            assert len(db.entities) > 0
            assert set(ontology.slots) <= set(ontology.requestable)

    def test_unknown_builtin(self):
        with pytest.raises(DomainError):
            builtin_domain("nope")

    def test_duplicate_slot_rejected(self):
        with pytest.raises(DomainError):
            Ontology("d", (("a", ("x", "y")), ("a", ("p", "q"))), ("a",))

    def test_single_value_slot_rejected(self):
        with pytest.raises(DomainError):
            Ontology("d", (("a", ("x",)),), ("a",))

    def test_reserved_value_rejected(self):
        for bad in (DONTCARE, "none"):
            with pytest.raises(DomainError):
                Ontology("d", (("a", ("x", bad)),), ("a",))

    def test_informable_must_be_requestable(self):
        with pytest.raises(DomainError):
            Ontology("d", (("a", ("x", "y")),), ("b",))

    def test_parse_errors(self, tmp_path):
        bad = tmp_path / "broken.json"
        bad.write_text("{not json")
        with pytest.raises(DomainError):
            load_ontology(bad)
        missing = tmp_path / "missing.json"
        missing.write_text(json.dumps({"name": "d"}))
        with pytest.raises(DomainError):
            load_ontology(missing)


class TestDatabase:
    def test_entity_with_unknown_value_rejected(self, cr):
        ontology, _ = cr
        ent = {s: ontology.values(s)[0] for s in ontology.slots}
        for req in ontology.requestable:
            ent.setdefault(req, "x")
        ent["area"] = "moon"
        with pytest.raises(DomainError):
            EntityDatabase.validate([ent], ontology)

    def test_entity_with_none_value_rejected(self, cr, tmp_path):
        ontology, db = cr
        ent = dict(db.entities[0])
        ent["food"] = "none"
        path = tmp_path / "db.json"
        path.write_text(json.dumps({"entities": [ent]}))
        with pytest.raises(DomainError):
            load_database(path, ontology)

    def test_query_dontcare_matches_everything(self, cr):
        ontology, db = cr
        assert query(db, ontology, [("area", DONTCARE)]) == list(db.entities)

    def test_query_filters(self, cr):
        ontology, db = cr
        hits = query(db, ontology, [("area", "north"), ("food", "thai")])
        assert all(e["area"] == "north" and e["food"] == "thai"
                   for e in hits)
        assert hits == [e for e in db.entities
                        if e["area"] == "north" and e["food"] == "thai"]

    def test_query_unknown_slot(self, cr):
        ontology, db = cr
        with pytest.raises(DomainError):
            query(db, ontology, [("colour", "red")])


class TestDialogueAct:
    def test_request_shape(self):
        DialogueAct("request", (("area", None),))
        with pytest.raises(DomainError):
            DialogueAct("request", (("area", "north"),))
        with pytest.raises(DomainError):
            DialogueAct("request", (("area", None), ("food", None)))

    def test_confirm_needs_value(self):
        DialogueAct("confirm", (("area", "north"),))
        with pytest.raises(DomainError):
            DialogueAct("confirm", (("area", None),))

    def test_select_needs_two_values_same_slot(self):
        DialogueAct("select", (("area", "north"), ("area", "south")))
        with pytest.raises(DomainError):
            DialogueAct("select", (("area", "north"),))
        with pytest.raises(DomainError):
            DialogueAct("select", (("area", "north"), ("food", "thai")))

    def test_confidence_range(self):
        with pytest.raises(DomainError):
            DialogueAct("inform", (("area", "north"),), confidence=1.5)

    def test_unknown_type(self):
        with pytest.raises(DomainError):
            DialogueAct("shout")

    def test_json_roundtrip_fields(self):
        act = DialogueAct("inform", (("area", "north"),), confidence=0.8)
        blob = act.to_json()
        assert blob["act_type"] == "inform"
        assert blob["confidence"] == 0.8


class TestActionSpaces:
    def test_merged_space(self, cr):
        ontology, _ = cr
        space = enumerate_actions(ontology, "feudalgain")
        assert space.merged_actions == GENERAL_ACTIONS + ("take_info_action",)
        assert len(space.info_actions) == \
            len(ontology.slots) * len(INFO_ACTION_KINDS)
        assert "pass" not in space.info_actions

    def test_baseline_space_has_pass(self, cr):
        ontology, _ = cr
        space = enumerate_actions(ontology, "feudal_baseline")
        assert space.info_actions[-1] == "pass"
        assert space.general_actions[-1] == "pass"

    def test_unknown_mode(self, cr):
        ontology, _ = cr
        with pytest.raises(DomainError):
            enumerate_actions(ontology, "flat")
