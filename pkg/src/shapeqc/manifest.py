"""Run manifests: every CLI command records how to reproduce its outputs.

A manifest stores the command name and its fully resolved configuration
(all defaults materialized, every seed explicit). Replaying one re-executes
the command with that configuration; because the whole pipeline is seeded,
the listed outputs come out byte-identical. Only the manifest's own
timestamp differs between a run and its replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .errors import ParseError, SchemaMismatchError

RUN_MANIFEST_VERSION = "1"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class RunManifest:
    command: str
    master_seed: int | None
    inputs: dict
    outputs: dict
    config: dict
    backend: str
    timestamp: str = field(default_factory=_now)
    version: str = RUN_MANIFEST_VERSION

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "command": self.command,
            "timestamp": self.timestamp,
            "master_seed": self.master_seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "config": self.config,
            "backend": self.backend,
        }
        return json.dumps(payload, indent=2) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @staticmethod
    def load(path) -> "RunManifest":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid run manifest JSON ({exc})", path) from None
        if not isinstance(payload, dict):
            raise ParseError("run manifest must hold a JSON object", path)
        if payload.get("version") != RUN_MANIFEST_VERSION:
            raise SchemaMismatchError(
                f"run manifest version {payload.get('version')!r} unsupported"
            )
        try:
            return RunManifest(
                command=str(payload["command"]),
                master_seed=payload["master_seed"],
                inputs=dict(payload["inputs"]),
                outputs=dict(payload["outputs"]),
                config=dict(payload["config"]),
                backend=str(payload.get("backend", "")),
                timestamp=str(payload.get("timestamp", "")),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed run manifest ({exc})", path) from None
