"""Service Publisher Block: QoS validation, certificate issue/verify, publish."""
from __future__ import annotations

import hashlib
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import InvalidQoS
from .models import (
    QOS_ATTRIBUTES,
    QOS_DOMAINS,
    Certificate,
    QoSProfile,
    ServiceRecord,
    format_decimal,
)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[tuple[str, str], ...]


def validate_qos(qos: QoSProfile) -> ValidationReport:
    """Check every attribute against its domain plus cross-field consistency.

    Accepts arbitrary field values; violations are reported as data,
    one entry per broken rule.
    """
    violations: list[tuple[str, str]] = []
    for attr in QOS_ATTRIBUTES:
        lo, hi, integral = QOS_DOMAINS[attr]
        try:
            v = float(qos.value(attr))
        except (TypeError, ValueError):
            violations.append((attr, "not a number"))
            continue
        if v != v:  # NaN
            violations.append((attr, "not a number"))
            continue
        if not (lo <= v <= hi):
            violations.append((attr, f"value {v!r} outside [{lo}, {hi}]"))
        elif integral and not float(v).is_integer():
            violations.append((attr, f"value {v!r} is not an integer"))
        elif attr == "response_time" and v <= 0:
            violations.append((attr, "response_time must be > 0"))
    try:
        if float(qos.latency) > float(qos.response_time):
            violations.append(("latency", "latency must be <= response_time"))
    except (TypeError, ValueError):
        pass
    return ValidationReport(valid=not violations, violations=tuple(violations))


def canonical_qos_string(service_key: str, qos: QoSProfile) -> str:
    """Canonical serialization digested by certificates: the service key,
    then one 'name=value' line per attribute in sorted order, 6 fraction
    digits, every line newline-terminated."""
    lines = [service_key]
    for attr in QOS_ATTRIBUTES:
        lines.append(f"{attr}={format_decimal(qos.value(attr))}")
    return "\n".join(lines) + "\n"


def qos_digest(service_key: str, qos: QoSProfile) -> str:
    return hashlib.sha256(canonical_qos_string(service_key, qos).encode("utf-8")).hexdigest()


def issue_certificate(record: ServiceRecord, issued_at: datetime | None = None) -> Certificate:
    """Issue a tamper-evident certificate over the record's QoS profile."""
    report = validate_qos(record.qos)
    if not report.valid:
        raise InvalidQoS(report)
    digest = qos_digest(record.service_key, record.qos)
    when = (issued_at or datetime.now(timezone.utc)).replace(microsecond=0)
    return Certificate(
        certificate_id=f"cert:{uuid.uuid5(uuid.NAMESPACE_URL, record.service_key + ':' + digest)}",
        service_key=record.service_key,
        digest=digest,
        issued_at=when,
    )


def verify_certificate(record: ServiceRecord, cert: Certificate) -> bool:
    if cert.service_key != record.service_key:
        return False
    return qos_digest(record.service_key, record.qos) == cert.digest


def publish(record: ServiceRecord, store) -> tuple[str, Certificate]:
    """Validate, certify and save a record atomically.

    On any failure nothing is stored; InvalidQoS and DuplicateKey propagate.
    """
    report = validate_qos(record.qos)
    if not report.valid:
        raise InvalidQoS(report)
    cert = issue_certificate(record)
    certified = record.with_certificate(cert)
    key = store.save_service(certified)
    return key, cert
