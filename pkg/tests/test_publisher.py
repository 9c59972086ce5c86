import hashlib
import random
from dataclasses import replace

import pytest

from wscr.errors import DuplicateKey, InvalidQoS
from wscr.models import QOS_ATTRIBUTES, QoSProfile
from wscr.publisher import (
    issue_certificate,
    publish,
    validate_qos,
    verify_certificate,
)
from wscr.registry import Store, canonical_record_line

from conftest import make_qos, make_record, random_qos


def test_valid_profile():
    report = validate_qos(make_qos())
    assert report.valid
    assert report.violations == ()


@pytest.mark.parametrize("field,value", [
    ("reliability", 1.5),
    ("reliability", -0.1),
    ("availability", 2.0),
    ("response_time", 0.0),
    ("response_time", -5.0),
    ("latency", -1.0),
    ("price", -0.01),
    ("security", 6),
    ("security", 2.5),
    ("compliance", -1),
])
def test_out_of_domain_field_flagged(field, value):
    report = validate_qos(make_qos(**{field: value}))
    assert not report.valid
    assert any(attr == field for attr, _ in report.violations)


def test_latency_exceeding_response_time_flagged():
    report = validate_qos(make_qos(latency=300.0, response_time=200.0))
    assert not report.valid
    assert any(attr == "latency" and "response_time" in msg
               for attr, msg in report.violations)


def test_every_violation_reported_separately():
    report = validate_qos(make_qos(reliability=3.0, security=9))
    flagged = {attr for attr, _ in report.violations}
    assert {"reliability", "security"} <= flagged


def test_certificate_deterministic():
    record = make_record(certified=False)
    a = issue_certificate(record)
    b = issue_certificate(record)
    assert a.digest == b.digest
    assert a.certificate_id == b.certificate_id


def test_certificate_sensitive_to_qos_change():
    record = make_record(certified=False)
    changed = replace(record, qos=make_qos(availability=0.98))
    assert issue_certificate(record).digest != issue_certificate(changed).digest


def test_digest_matches_spelled_out_canonical_string():
    record = make_record(key="svc-001", certified=False)
    canonical = (
        "svc-001\n"
        "availability=0.999000\n"
        "compliance=2.000000\n"
        "latency=50.000000\n"
        "price=1.000000\n"
        "reliability=0.990000\n"
        "response_time=200.000000\n"
        "security=3.000000\n"
    )
    expected = hashlib.sha256(canonical.encode()).hexdigest()
    assert issue_certificate(record).digest == expected


def test_issue_rejects_invalid_qos():
    record = make_record(certified=False, reliability=1.5)
    with pytest.raises(InvalidQoS):
        issue_certificate(record)


def test_verify_round_trip():
    record = make_record(certified=False)
    cert = issue_certificate(record)
    assert verify_certificate(record, cert)


def test_verify_detects_any_field_tamper():
    rng = random.Random(3)
    for _ in range(20):
        record = make_record(certified=False, qos=random_qos(rng))
        cert = issue_certificate(record)
        for attr in QOS_ATTRIBUTES:
            tampered = replace(record, qos=QoSProfile(**{
                **record.qos.as_dict(), attr: record.qos.value(attr) + 1e-6}))
            assert not verify_certificate(tampered, cert), attr


def test_verify_rejects_foreign_certificate():
    a = make_record(key="svc-a", certified=False)
    b = make_record(key="svc-b", certified=False)
    assert not verify_certificate(b, issue_certificate(a))


def test_publish_pipeline_attaches_certificate():
    store = Store()
    key, cert = publish(make_record(certified=False), store)
    stored = store.get_service(key)
    assert stored.certificate == cert
    assert verify_certificate(stored, cert)


def test_publish_invalid_qos_leaves_store_unchanged():
    store = Store()
    publish(make_record(key="svc-keep", certified=False), store)
    before = [canonical_record_line(r) for r in store.all_services()]
    with pytest.raises(InvalidQoS):
        publish(make_record(key="svc-bad", certified=False, availability=7.0), store)
    assert [canonical_record_line(r) for r in store.all_services()] == before


def test_publish_duplicate_leaves_store_unchanged():
    store = Store()
    publish(make_record(key="svc-dup", certified=False), store)
    before = [canonical_record_line(r) for r in store.all_services()]
    with pytest.raises(DuplicateKey):
        publish(make_record(key="svc-dup", name="Other", certified=False), store)
    assert [canonical_record_line(r) for r in store.all_services()] == before
