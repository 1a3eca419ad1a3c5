"""Run manifests: config echo, output checksums, and seed lineage."""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .rng import stream_spec


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class RunManifest:
    """Collects provenance while an experiment runs, then serializes it.

    Stream indices are claimed through ``claim_streams`` so the manifest
    records which derived RNG lanes each stage consumed; two runs with the
    same config and seed therefore produce identical data outputs and
    identical checksum tables (timestamps excepted).
    """

    def __init__(self, config: dict):
        self.config = config
        self.started = datetime.now(timezone.utc).isoformat()
        self.ended: str | None = None
        self.outputs: dict[str, str] = {}
        self.stream_ranges: dict[str, list[int]] = {}
        self._next_stream = 0
        self.exit_status: int | None = None

    def claim_streams(self, purpose: str, count: int) -> int:
        """Reserve ``count`` consecutive stream indices; returns the first."""
        start = self._next_stream
        self._next_stream += count
        self.stream_ranges[purpose] = [start, self._next_stream]
        return start

    def record_output(self, path: Path):
        self.outputs[path.name] = sha256_file(path)

    def finish(self, exit_status: int):
        self.ended = datetime.now(timezone.utc).isoformat()
        self.exit_status = exit_status

    def to_dict(self) -> dict:
        return {
            "artifact": {"name": "statewalk", "version": __version__},
            "config": self.config,
            "rng": stream_spec(self.config["seed"]),
            "stream_ranges": self.stream_ranges,
            "started_utc": self.started,
            "ended_utc": self.ended,
            "outputs": self.outputs,
            "exit_status": self.exit_status,
        }

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / "manifest.json"
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path
