"""HTTP service exposing a trained policy to human users.

Rule-based NLU maps free text onto dialogue acts using the ontology's
value and synonym tables; template NLG renders system acts back to text.
Closed sessions (transcript + questionnaire) are appended to a JSON-lines
record log, and ``/api/summary`` aggregates it per policy.
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .belief import (BeliefState, apply_system_act, evidence_from_act,
                     focus_update, initial_belief)
from .checkpoint import load_checkpoint
from .domain import DONTCARE, DialogueAct, EntityDatabase, Ontology

BYE_PHRASES = ("bye", "goodbye", "good bye", "that is all", "thats all",
               "that's all", "thank you")
AFFIRM_WORDS = frozenset({"yes", "yeah", "yep", "correct", "right", "sure",
                          "ok", "okay"})
NEGATE_WORDS = frozenset({"no", "nope", "wrong", "incorrect"})
DONTCARE_PHRASES = ("dont care", "don't care", "do not care", "any",
                    "doesnt matter", "doesn't matter", "whatever")
REQUEST_KEYWORDS = {
    "address": ("address", "where is"),
    "phone": ("phone", "telephone", "number"),
    "postcode": ("postcode", "post code", "zip"),
    "name": ("name", "called"),
}


def load_templates(domain: str) -> dict[str, str]:
    ref = resources.files("feudalgain.data") / f"{domain}.templates.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def _contains(text: str, phrase: str) -> bool:
    return re.search(r"\b" + re.escape(phrase) + r"\b", text) is not None


def nlu_parse(text: str, ontology: Ontology,
              last_system_act: DialogueAct | None) -> DialogueAct:
    """Deterministic keyword NLU: text -> observed dialogue act.

    Exact value mentions carry confidence 1.0, synonym (fuzzy) matches
    0.7. Bare affirm/negate/dontcare are resolved against the last system
    act where needed.
    """
    text = " ".join(text.lower().split())
    words = text.split()
    if not words:
        return DialogueAct("null")

    if any(_contains(text, p) for p in BYE_PHRASES):
        return DialogueAct("bye")
    if words[0] in AFFIRM_WORDS and not _values_in(text, ontology):
        return DialogueAct("affirm")
    if words[0] in NEGATE_WORDS:
        correction = _values_in(text, ontology)
        if correction:
            slot, value, conf = correction[0]
            return DialogueAct("negate", ((slot, value),), confidence=conf)
        return DialogueAct("negate")

    matches = _values_in(text, ontology)
    if any(_contains(text, p) for p in DONTCARE_PHRASES):
        slot = _slot_in(text, ontology)
        if slot is None and last_system_act is not None \
                and last_system_act.act_type in ("request", "select",
                                                 "confirm"):
            slot = last_system_act.slot
        if slot is not None:
            matches = [(slot, DONTCARE, 1.0)] + matches

    if matches:
        conf = min(c for _, _, c in matches)
        return DialogueAct("inform",
                           tuple((s, v) for s, v, _ in matches),
                           confidence=conf)

    for slot, keywords in REQUEST_KEYWORDS.items():
        if slot in ontology.requestable and slot not in ontology.slots:
            if any(_contains(text, k) for k in keywords):
                return DialogueAct("request", ((slot, None),))
    return DialogueAct("null")


def _values_in(text: str, ontology: Ontology) -> list[tuple[str, str, float]]:
    found = []
    for slot in ontology.slots:
        for value in ontology.values(slot):
            if _contains(text, value):
                found.append((slot, value, 1.0))
                continue
            for syn in ontology.synonyms.get(value, ()):
                if _contains(text, syn):
                    found.append((slot, value, 0.7))
                    break
    return found


def _slot_in(text: str, ontology: Ontology) -> str | None:
    for slot in ontology.slots:
        if _contains(text, slot):
            return slot
    return None


def render_act(act: DialogueAct, templates: dict[str, str],
               ontology: Ontology) -> str:
    kind = act.act_type
    if kind == "request":
        key = f"request.{act.slot}"
        template = templates.get(key, templates["request.default"])
        return template.format(slot=act.slot)
    if kind == "confirm":
        slot, value = act.items[0]
        return templates["confirm"].format(slot=slot, value=value)
    if kind == "select":
        values = " or ".join(v for _, v in act.items)
        return templates["select"].format(slot=act.slot, values=values)
    if kind in ("inform", "inform_alternatives"):
        pairs = dict(act.items)
        name = pairs.pop("name", None)
        if name is None or name == "none":
            return templates["no_match"]
        details = "".join(
            templates["inform_detail"].format(slot=s, value=v)
            for s, v in sorted(pairs.items()))
        return templates[kind].format(name=name, details=details)
    return templates.get(kind, templates["repeat"])


@dataclass
class Session:
    session_id: str
    policy_id: str
    belief: BeliefState
    status: str = "active"  # active | awaiting_questionnaire | closed
    last_system_act: DialogueAct | None = None
    transcript: list[dict] = field(default_factory=list)


class TurnBody(BaseModel):
    text: str


class SessionBody(BaseModel):
    policy: str


class QuestionnaireBody(BaseModel):
    success: bool
    ask_if_nec: int = Field(ge=1, le=5)
    overall: int = Field(ge=1, le=5)


class DialogueService:
    """Holds loaded policies, live sessions, and the record log."""

    def __init__(self, checkpoints: dict[str, str | Path],
                 record_log: str | Path = "trial_records.jsonl"):
        if not checkpoints:
            raise ValueError("at least one policy checkpoint is required")
        self.policies: dict[str, tuple] = {}
        for policy_id, path in checkpoints.items():
            policy, meta = load_checkpoint(path)
            ontology: Ontology = policy.ontology
            db: EntityDatabase = policy.db
            templates = load_templates(meta.get("ontology", ontology.name))
            self.policies[policy_id] = (policy, ontology, db, templates)
        self.record_log = Path(record_log)
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._rng = np.random.default_rng(0)

    def create_session(self, policy_id: str) -> tuple[str, str]:
        if policy_id not in self.policies:
            raise KeyError(policy_id)
        _, ontology, _, templates = self.policies[policy_id]
        session = Session(session_id=uuid.uuid4().hex,
                          policy_id=policy_id,
                          belief=initial_belief(ontology))
        with self._lock:
            self.sessions[session.session_id] = session
        return session.session_id, templates["greeting"]

    def _get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def user_turn(self, session_id: str, text: str) -> dict:
        session = self._get(session_id)
        if session.status != "active":
            raise RuntimeError("session is not active")
        policy, ontology, db, templates = self.policies[session.policy_id]

        user_act = nlu_parse(text, ontology, session.last_system_act)
        if user_act.act_type == "bye":
            sys_act = DialogueAct("bye")
        else:
            ev = evidence_from_act(user_act, ontology,
                                   session.last_system_act)
            session.belief = focus_update(session.belief, ev, ontology)
            choice = policy.act(session.belief, True, "eval", self._rng)
            sys_act = choice.act
        session.belief = apply_system_act(
            session.belief, sys_act,
            _entity_for(sys_act, db))
        session.last_system_act = sys_act
        system_text = render_act(sys_act, templates, ontology)
        if sys_act.act_type == "bye":
            session.status = "awaiting_questionnaire"
        session.transcript.append({
            "user_text": text,
            "user_act": user_act.to_json(),
            "system_act": sys_act.to_json(),
            "system_text": system_text,
        })
        return {
            "system_text": system_text,
            "status": session.status,
            "debug": {
                "user_act": user_act.to_json(),
                "system_act": sys_act.to_json(),
                "belief": session.belief.to_json(ontology),
            },
        }

    def submit_questionnaire(self, session_id: str, success: bool,
                             ask_if_nec: int, overall: int) -> None:
        session = self._get(session_id)
        if session.status == "closed":
            raise RuntimeError("questionnaire already submitted")
        if session.status != "awaiting_questionnaire":
            raise RuntimeError("dialogue is still active")
        record = {
            "session_id": session.session_id,
            "policy": session.policy_id,
            "success": bool(success),
            "ask_if_nec": int(ask_if_nec),
            "overall": int(overall),
            "turns": len(session.transcript),
            "transcript": session.transcript,
        }
        with self._lock:
            with self.record_log.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")
            session.status = "closed"

    def summary(self) -> dict:
        if not self.record_log.exists():
            raise LookupError("no records yet")
        groups: dict[str, list[dict]] = {}
        with self.record_log.open(encoding="utf-8") as fh:
            for line in fh:
                rec = json.loads(line)
                groups.setdefault(rec["policy"], []).append(rec)
        if not groups:
            raise LookupError("no records yet")
        out = {}
        for policy_id, recs in sorted(groups.items()):
            out[policy_id] = {
                "sessions": len(recs),
                **_mean_std("success",
                            [float(r["success"]) for r in recs]),
                **_mean_std("turns", [float(r["turns"]) for r in recs]),
                **_mean_std("ask_if_nec",
                            [float(r["ask_if_nec"]) for r in recs]),
                **_mean_std("overall",
                            [float(r["overall"]) for r in recs]),
            }
        return out


def _mean_std(name: str, xs: list[float]) -> dict[str, float]:
    arr = np.asarray(xs)
    return {f"{name}_mean": float(arr.mean()),
            f"{name}_std": float(arr.std())}


def _entity_for(act: DialogueAct, db: EntityDatabase):
    if act.act_type not in ("inform", "inform_alternatives"):
        return None
    for slot, value in act.items:
        if slot == "name" and value != "none":
            for ent in db.entities:
                if ent["name"] == value:
                    return ent
    return None


def create_app(checkpoints: dict[str, str | Path],
               record_log: str | Path = "trial_records.jsonl",
               static_dir: str | Path | None = None) -> FastAPI:
    service = DialogueService(checkpoints, record_log)
    app = FastAPI(title="feudalgain dialogue service")
    app.state.service = service

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "policies": sorted(service.policies)}

    @app.post("/api/session")
    def create_session(body: SessionBody):
        try:
            session_id, greeting = service.create_session(body.policy)
        except KeyError:
            raise HTTPException(404, f"unknown policy {body.policy!r}")
        return {"session_id": session_id, "greeting": greeting}

    @app.post("/api/session/{session_id}/turn")
    def turn(session_id: str, body: TurnBody):
        try:
            return service.user_turn(session_id, body.text)
        except KeyError:
            raise HTTPException(404, "unknown session")
        except RuntimeError as exc:
            raise HTTPException(409, str(exc))

    @app.post("/api/session/{session_id}/questionnaire")
    def questionnaire(session_id: str, body: QuestionnaireBody):
        try:
            service.submit_questionnaire(session_id, body.success,
                                         body.ask_if_nec, body.overall)
        except KeyError:
            raise HTTPException(404, "unknown session")
        except RuntimeError as exc:
            raise HTTPException(409, str(exc))
        return {"status": "recorded"}

    @app.get("/api/summary")
    def summary():
        try:
            return service.summary()
        except LookupError as exc:
            raise HTTPException(404, str(exc))

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    return app
