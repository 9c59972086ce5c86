"""UDDI-like store of service records with tModel metadata and a journal.

Keyed in-memory map, write-ahead journal, full snapshot files. Writes are
serialized through a single lock; reads see either the pre-write or the
post-write state.
"""
from __future__ import annotations

import json
import os
import re
import threading
from typing import Optional

from . import canonjson
from .errors import CorruptSnapshot, DuplicateKey, MissingCertificate, UnknownService
from .models import (
    Certificate,
    ProviderInfo,
    QoSProfile,
    ResourceType,
    ServiceRecord,
    TimeSlot,
    TModel,
    format_timestamp,
    parse_timestamp,
    tmodel_from_record,
)

SNAPSHOT_HEADER = {"format": "wscr-snapshot", "version": 1}
JOURNAL_HEADER = {"format": "wscr-journal", "version": 1}

_WS = re.compile(r"\s+")


def normalize_name(name: str) -> str:
    """Lowercase and collapse internal whitespace."""
    return _WS.sub(" ", name.strip()).lower()


def record_to_dict(record: ServiceRecord) -> dict:
    cert = record.certificate
    return {
        "service_key": record.service_key,
        "name": record.name,
        "keywords": sorted(record.keywords),
        "concept": record.concept,
        "description": record.description,
        "provider": {
            "company_name": record.provider.company_name,
            "address": record.provider.address,
            "website": record.provider.website,
            "contact": record.provider.contact,
        },
        "resource_type": record.resource_type.value,
        "qos": record.qos.as_dict(),
        "time_slots": [
            {"start": format_timestamp(s.start), "end": format_timestamp(s.end)}
            for s in record.time_slots
        ],
        "certificate": None if cert is None else {
            "certificate_id": cert.certificate_id,
            "service_key": cert.service_key,
            "digest": cert.digest,
            "issued_at": format_timestamp(cert.issued_at),
        },
    }


def record_from_dict(data: dict) -> ServiceRecord:
    cert = data.get("certificate")
    return ServiceRecord(
        service_key=data["service_key"],
        name=data["name"],
        keywords=frozenset(data["keywords"]),
        concept=data["concept"],
        description=data["description"],
        provider=ProviderInfo(**data["provider"]),
        resource_type=ResourceType(data["resource_type"]),
        qos=QoSProfile(**data["qos"]),
        time_slots=tuple(
            TimeSlot(parse_timestamp(s["start"]), parse_timestamp(s["end"]))
            for s in data["time_slots"]
        ),
        certificate=None if cert is None else Certificate(
            certificate_id=cert["certificate_id"],
            service_key=cert["service_key"],
            digest=cert["digest"],
            issued_at=parse_timestamp(cert["issued_at"]),
        ),
    )


def canonical_record_line(record: ServiceRecord) -> str:
    return canonjson.dumps(record_to_dict(record))


class Store:
    """In-memory record map with optional write-ahead journal.

    If a journal path is given and the file exists, records are replayed
    from it at open; every save appends one canonical record line.
    """

    def __init__(self, journal_path: Optional[str] = None):
        self._lock = threading.Lock()
        self._records: dict[str, ServiceRecord] = {}
        self._tmodels: dict[str, TModel] = {}
        self._journal_path = journal_path
        self._journal = None
        if journal_path:
            if os.path.exists(journal_path):
                self._replay_journal(journal_path)
            self._journal = open(journal_path, "a", encoding="utf-8")
            if os.path.getsize(journal_path) == 0:
                self._journal.write(canonjson.dumps(JOURNAL_HEADER) + "\n")
                self._journal.flush()

    def _replay_journal(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorruptSnapshot(lineno, str(exc)) from exc
                if lineno == 1 and data.get("format") == "wscr-journal":
                    continue
                record = record_from_dict(data)
                self._records[record.service_key] = record
                self._tmodels[record.service_key] = tmodel_from_record(record)

    # -- write side -----------------------------------------------------

    def save_service(self, record: ServiceRecord) -> str:
        if record.certificate is None:
            raise MissingCertificate(record.service_key)
        if not record.name:
            raise ValueError("service name must be non-empty")
        with self._lock:
            if record.service_key in self._records:
                raise DuplicateKey(record.service_key)
            if self._journal is not None:
                self._journal.write(canonical_record_line(record) + "\n")
                self._journal.flush()
            self._records[record.service_key] = record
            self._tmodels[record.service_key] = tmodel_from_record(record)
        return record.service_key

    # -- read side ------------------------------------------------------

    def get_service(self, service_key: str) -> ServiceRecord:
        try:
            return self._records[service_key]
        except KeyError:
            raise UnknownService(service_key) from None

    def has_service(self, service_key: str) -> bool:
        return service_key in self._records

    def get_tmodel(self, service_key: str) -> TModel:
        try:
            return self._tmodels[service_key]
        except KeyError:
            raise UnknownService(service_key) from None

    def search_by_name(self, name: str) -> list[ServiceRecord]:
        """Exact-name recall: case-insensitive, whitespace-normalized
        equality, results in key order."""
        if not name:
            raise ValueError("name must be non-empty")
        target = normalize_name(name)
        return [self._records[k] for k in sorted(self._records)
                if normalize_name(self._records[k].name) == target]

    def all_services(self) -> list[ServiceRecord]:
        return [self._records[k] for k in sorted(self._records)]

    def __len__(self) -> int:
        return len(self._records)

    # -- persistence ----------------------------------------------------

    def snapshot(self, path: str) -> int:
        with self._lock:
            records = [self._records[k] for k in sorted(self._records)]
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(canonjson.dumps(SNAPSHOT_HEADER) + "\n")
                for record in records:
                    fh.write(canonical_record_line(record) + "\n")
        return len(records)

    def restore(self, path: str) -> int:
        records: dict[str, ServiceRecord] = {}
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        elif lines:
            raise CorruptSnapshot(len(lines), "truncated: missing trailing newline")
        if not lines:
            raise CorruptSnapshot(1, "empty file, header missing")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise CorruptSnapshot(1, str(exc)) from exc
        if header != SNAPSHOT_HEADER:
            raise CorruptSnapshot(1, f"unexpected header {header!r}")
        for lineno, line in enumerate(lines[1:], start=2):
            try:
                data = json.loads(line)
                record = record_from_dict(data)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorruptSnapshot(lineno, str(exc)) from exc
            records[record.service_key] = record
        with self._lock:
            self._records = records
            self._tmodels = {k: tmodel_from_record(r) for k, r in records.items()}
        return len(records)

    def close(self) -> None:
        if self._journal is not None:
            self._journal.flush()
            self._journal.close()
            self._journal = None
