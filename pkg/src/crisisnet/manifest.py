"""Run configuration and provenance records.

A run is reproducible from its PipelineConfig: the config hash, input
checksums, per-stage timings and the output listing all land in one
manifest JSON written exactly once at the end of a command.
"""

from __future__ import annotations

import hashlib
import json
import resource
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .errors import InputFormatError


@dataclass
class PipelineConfig:
    tweets: str | None = None
    tweet_format: str = "jsonl"
    edges: str | None = None
    edge_format: str = "csv"
    activity: str | None = None
    keyword: str = "sandy"
    lang: str = "en"
    require_lang: bool = False
    thresholds: list[int] = field(default_factory=lambda: [10])
    betweenness: str = "auto"        # "auto", "exact", or "sampled:K"
    censor: float | None = None      # defaults to the threshold at fit time
    regressors: list[str] = field(
        default_factory=lambda: ["in_deg", "out_deg", "ecc", "cc_close"]
    )
    fit_families: list[str] = field(
        default_factory=lambda: [
            "power_law",
            "truncated_power_law",
            "lognormal",
            "exponential",
        ]
    )
    x_min: float | None = None
    out: str = "out"
    seed: int = 0
    threads: int | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputFormatError(f"{path}: invalid config JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise InputFormatError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise InputFormatError(f"{path}: unknown config keys {unknown}")
        return cls(**raw)

    def merged(self, overrides: dict) -> "PipelineConfig":
        """New config with non-None override values applied (flags win)."""
        data = asdict(self)
        for key, value in overrides.items():
            if value is not None:
                data[key] = value
        return PipelineConfig(**data)

    def hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def file_checksum(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _peak_rss_kb() -> int:
    return int(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)


@dataclass
class RunManifest:
    command: str
    config: PipelineConfig
    inputs: dict[str, str] = field(default_factory=dict)     # path -> sha256
    stages: list[dict] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    _written: bool = field(default=False, repr=False)

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = file_checksum(path)

    def add_output(self, path: str | Path) -> None:
        self.outputs.append(str(path))

    def stage(self, name: str):
        """Context manager recording wall time and peak RSS for one stage."""
        return _Stage(self, name)

    def write(self, path: str | Path) -> None:
        if self._written:
            raise RuntimeError("manifest already written for this run")
        doc = {
            "tool_version": __version__,
            "command": self.command,
            "config": asdict(self.config),
            "config_hash": self.config.hash(),
            "inputs": dict(sorted(self.inputs.items())),
            "stages": self.stages,
            "outputs": sorted(self.outputs),
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self._written = True


class _Stage:
    def __init__(self, manifest: RunManifest, name: str):
        self.manifest = manifest
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.manifest.stages.append(
            {
                "name": self.name,
                "wall_seconds": round(time.perf_counter() - self.t0, 6),
                "peak_rss_kb": _peak_rss_kb(),
                "ok": exc_type is None,
            }
        )
        return False
