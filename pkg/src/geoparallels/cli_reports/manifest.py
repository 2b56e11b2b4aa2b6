"""Run manifests: flat ``key=value`` text written last and atomically."""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .artifacts import sha256_file

__all__ = ["MANIFEST_NAME", "ManifestError", "RunManifest", "read_manifest", "verify_manifest"]

MANIFEST_NAME = "manifest.txt"
FORMAT = "geoparallels-manifest/1"


class ManifestError(ValueError):
    pass


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    subcommand: str
    target: str
    seed: int
    started: str
    finished: str = ""
    artifacts: dict = field(default_factory=dict)  # relative path -> sha256
    checks: dict = field(default_factory=dict)  # name -> pass | fail | n/a

    @property
    def passed(self) -> int:
        return sum(v == "pass" for v in self.checks.values())

    @property
    def failed(self) -> int:
        return sum(v == "fail" for v in self.checks.values())

    @property
    def status(self) -> str:
        return "fail" if self.failed else "pass"

    def to_text(self) -> str:
        lines = [
            f"format={FORMAT}",
            f"config_hash={self.config_hash}",
            f"tool_version={self.tool_version}",
            f"subcommand={self.subcommand}",
            f"target={self.target}",
            f"seed={self.seed}",
            f"started={self.started}",
            f"finished={self.finished}",
        ]
        lines += [f"artifact.{k}={v}" for k, v in self.artifacts.items()]
        lines += [f"check.{k}={v}" for k, v in self.checks.items()]
        lines += [f"summary.passed={self.passed}", f"summary.failed={self.failed}", f"status={self.status}"]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunManifest":
        kv: dict[str, str] = {}
        arts: dict[str, str] = {}
        checks: dict[str, str] = {}
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ManifestError(f"line {n} is not key=value")
            if key.startswith("artifact."):
                arts[key[9:]] = val
            elif key.startswith("check."):
                checks[key[6:]] = val
            else:
                kv[key] = val
        if kv.get("format") != FORMAT:
            raise ManifestError("unknown or missing manifest format")
        try:
            m = cls(
                kv["config_hash"], kv["tool_version"], kv["subcommand"], kv["target"], int(kv["seed"]),
                kv["started"], kv["finished"], arts, checks,
            )
        except (KeyError, ValueError) as exc:
            raise ManifestError(f"incomplete manifest: {exc}") from None
        if "summary.passed" in kv and (int(kv["summary.passed"]), int(kv["summary.failed"])) != (m.passed, m.failed):
            raise ManifestError("summary counts disagree with the check entries")
        return m

    def write(self, run_dir) -> Path:
        """Write atomically: a temporary file in the same directory, then rename."""
        run_dir = Path(run_dir)
        fd, tmp = tempfile.mkstemp(prefix=".manifest-", dir=run_dir)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(self.to_text())
            os.replace(tmp, run_dir / MANIFEST_NAME)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return run_dir / MANIFEST_NAME


def read_manifest(run_dir) -> RunManifest:
    try:
        text = (Path(run_dir) / MANIFEST_NAME).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ManifestError(str(exc)) from None
    return RunManifest.from_text(text)


def verify_manifest(run_dir, manifest: RunManifest) -> list[str]:
    """Problems with the listed artifacts: ``missing:<path>`` or ``hash-mismatch:<path>``."""
    out = []
    for rel, digest in manifest.artifacts.items():
        p = Path(run_dir) / rel
        if not p.is_file():
            out.append(f"missing:{rel}")
        elif sha256_file(p) != digest:
            out.append(f"hash-mismatch:{rel}")
    return out
