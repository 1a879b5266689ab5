"""Persisted sessions: a fitted projector together with the dataset it was
fitted on, stored as one canonical JSON file per session id."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .core import Dataset
from .errors import DataError, InputError
from .linear import LinearProjector
from .neural import AutoencoderProjector, PtsneProjector
from .som import Som

API_VERSION = "1.0"

_PROJECTOR_TYPES = {
    "linear": LinearProjector,
    "som": Som,
    "ae": AutoencoderProjector,
    "ptsne": PtsneProjector,
}


def projector_from_json(obj: dict):
    kind = obj.get("kind")
    if kind not in _PROJECTOR_TYPES:
        raise DataError(f"unknown projector kind {kind!r}")
    return _PROJECTOR_TYPES[kind].from_json_dict(obj)


@dataclass(frozen=True)
class Session:
    session_id: str
    dataset: Dataset
    projector: object
    config: dict

    def __post_init__(self):
        if self.projector.d != self.dataset.d:
            raise InputError("projector dimension does not match dataset")

    def to_json_dict(self) -> dict:
        return {
            "api_version": API_VERSION,
            "session_id": self.session_id,
            "dataset": self.dataset.to_json_dict(),
            "projector": self.projector.to_json_dict(),
            "config": self.config,
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "Session":
        return Session(
            session_id=obj["session_id"],
            dataset=Dataset.from_json_dict(obj["dataset"]),
            projector=projector_from_json(obj["projector"]),
            config=obj.get("config", {}),
        )


def save_session(session: Session, path: str):
    with open(path, "w") as fh:
        json.dump(session.to_json_dict(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_session(path: str) -> Session:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"session file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid session file {path}: {exc}") from None
    return Session.from_json_dict(obj)


class SessionStore:
    """Read-only collection of sessions backed by a directory of JSON files.

    Sessions are loaded once and never mutated, so concurrent reads are safe.
    """

    def __init__(self, directory: str):
        self.directory = directory
        self._sessions: dict[str, Session] = {}
        if os.path.isdir(directory):
            for name in sorted(os.listdir(directory)):
                if name.endswith(".json"):
                    sess = load_session(os.path.join(directory, name))
                    self._sessions[sess.session_id] = sess

    def ids(self):
        return sorted(self._sessions)

    def get(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)
