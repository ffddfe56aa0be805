"""JSON-document persistence with per-case optimistic concurrency.

Each case lives in ``<data_dir>/cases/<id>.json`` (human-inspectable, with a
``version`` counter bumped on every write) plus an append-only
``<id>.audit.jsonl`` file holding one audit record per line. Writers carry
the version they read; a compare-and-set rejects stale writes. Unknown
top-level fields in a case document survive rewrites.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import asdict
from pathlib import Path

from .errors import CaseExistsError, CaseNotFoundError, InvalidElementError, VersionConflictError
from .model import AssuranceCase, AuditRecord

_SAFE_ID = re.compile(r"^[A-Za-z0-9_.-]+$")


class CaseStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.cases_dir = self.data_dir / "cases"
        self.cases_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock(self, case_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(case_id, threading.Lock())

    def _doc_path(self, case_id: str) -> Path:
        if not _SAFE_ID.match(case_id):
            raise InvalidElementError(f"unusable case id {case_id!r}", field="id")
        return self.cases_dir / f"{case_id}.json"

    def _audit_path(self, case_id: str) -> Path:
        return self.cases_dir / f"{case_id}.audit.jsonl"

    def list_cases(self) -> list[str]:
        return sorted(p.stem for p in self.cases_dir.glob("*.json"))

    def exists(self, case_id: str) -> bool:
        return self._doc_path(case_id).exists()

    def create(self, case: AssuranceCase) -> int:
        with self._lock(case.id):
            path = self._doc_path(case.id)
            if path.exists():
                raise CaseExistsError(f"case {case.id} already exists")
            self._write(case, version=1, persisted_audit=0)
            return 1

    def load(self, case_id: str) -> tuple[AssuranceCase, int]:
        path = self._doc_path(case_id)
        if not path.exists():
            raise CaseNotFoundError(f"unknown case {case_id}")
        doc = json.loads(path.read_text(encoding="utf-8"))
        version = doc.pop("version", 1)
        case = AssuranceCase.from_dict(doc)
        audit_path = self._audit_path(case_id)
        if audit_path.exists():
            for line in audit_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    case.audit.append(AuditRecord(**json.loads(line)))
        return case, version

    def save(self, case: AssuranceCase, expected_version: int) -> int:
        """Compare-and-set write; exactly one of two concurrent writers with
        the same expected version succeeds."""
        with self._lock(case.id):
            path = self._doc_path(case.id)
            if not path.exists():
                raise CaseNotFoundError(f"unknown case {case.id}")
            current = json.loads(path.read_text(encoding="utf-8")).get("version", 1)
            if current != expected_version:
                raise VersionConflictError(
                    f"case {case.id} is at version {current}, write expected {expected_version}"
                )
            audit_path = self._audit_path(case.id)
            persisted = 0
            if audit_path.exists():
                persisted = sum(
                    1 for line in audit_path.read_text(encoding="utf-8").splitlines() if line.strip()
                )
            new_version = current + 1
            self._write(case, version=new_version, persisted_audit=persisted)
            return new_version

    def _write(self, case: AssuranceCase, version: int, persisted_audit: int) -> None:
        doc = case.to_dict()
        doc["version"] = version
        path = self._doc_path(case.id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(
            json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        os.replace(tmp, path)
        fresh = [r for r in case.audit if r.seq > persisted_audit]
        if fresh:
            with self._audit_path(case.id).open("a", encoding="utf-8") as fh:
                for record in fresh:
                    fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")
