import random
from datetime import datetime, timedelta, timezone

import pytest

from wscr.models import (
    DiscoveryQuery,
    NumericRequirement,
    PreferenceWeights,
    ProviderInfo,
    QoSConstraint,
    QoSProfile,
    ResourceType,
    ServiceRecord,
    TimeSlot,
)
from wscr.ontology import parse_ontology
from wscr.publisher import issue_certificate
from wscr.registry import Store

BASE_TIME = datetime(2026, 1, 1, tzinfo=timezone.utc)

SMALL_TAXONOMY = """
# five-concept taxonomy
Service
Service>ComputeService
Service>StorageService
StorageService>BlockStorage
StorageService>ObjectStorage
"""


def make_qos(**overrides) -> QoSProfile:
    values = dict(reliability=0.99, availability=0.999, response_time=200.0,
                  latency=50.0, price=1.0, security=3, compliance=2)
    values.update(overrides)
    return QoSProfile(**values)


def make_slot(start_hour=9, end_hour=17) -> TimeSlot:
    return TimeSlot(BASE_TIME + timedelta(hours=start_hour),
                    BASE_TIME + timedelta(hours=end_hour))


def make_record(key="svc-001", name="Currency Converter", keywords=("currency", "convert"),
                concept="Service", resource_type=ResourceType.COMPUTE,
                qos=None, slots=(), certified=True, **qos_overrides) -> ServiceRecord:
    record = ServiceRecord(
        service_key=key,
        name=name,
        keywords=frozenset(keywords),
        concept=concept,
        description=f"test service {key}",
        provider=ProviderInfo(company_name="Acme Cloud", address="1 Cloud Way",
                              website="https://acme.example", contact="ops@acme.example"),
        resource_type=resource_type,
        qos=qos if qos is not None else make_qos(**qos_overrides),
        time_slots=tuple(slots),
    )
    if certified:
        record = record.with_certificate(issue_certificate(record))
    return record


def random_qos(rng: random.Random) -> QoSProfile:
    response_time = round(rng.uniform(1.0, 1000.0), 6)
    return QoSProfile(
        reliability=round(rng.uniform(0.0, 1.0), 6),
        availability=round(rng.uniform(0.0, 1.0), 6),
        response_time=response_time,
        latency=round(rng.uniform(0.0, response_time), 6),
        price=round(rng.uniform(0.0, 100.0), 6),
        security=rng.randint(0, 5),
        compliance=rng.randint(0, 5),
    )


WORDS = ["pay", "invoice", "ship", "store", "compute", "convert", "currency",
         "mail", "queue", "cache", "backup", "stream", "render", "archive"]


def random_record(rng: random.Random, key: str, concepts=("Service",)) -> ServiceRecord:
    name = " ".join(rng.sample(WORDS, rng.randint(1, 3))).title()
    return make_record(
        key=key,
        name=name,
        keywords=tuple(rng.sample(WORDS, rng.randint(1, 5))),
        concept=rng.choice(list(concepts)),
        resource_type=rng.choice(list(ResourceType)),
        qos=random_qos(rng),
        slots=(make_slot(rng.randint(0, 11), rng.randint(12, 23)),),
    )


def random_taxonomy(rng: random.Random, size: int) -> str:
    """Random single-inheritance tree as ontology file text."""
    names = [f"C{i}" for i in range(size)]
    lines = [names[0]]
    for i in range(1, size):
        parent = names[rng.randrange(i)]
        lines.append(f"{parent}>{names[i]}")
    return "\n".join(lines) + "\n"


def random_weights(rng: random.Random) -> PreferenceWeights:
    attrs = rng.sample(["reliability", "availability", "response_time", "latency",
                        "price", "security", "compliance"], rng.randint(1, 7))
    weights = {a: round(rng.uniform(0.0, 10.0), 6) for a in attrs}
    weights[rng.choice(attrs)] = round(rng.uniform(0.1, 10.0), 6)
    if all(w == 0 for w in weights.values()):
        weights[attrs[0]] = 1.0
    return PreferenceWeights(weights)


def random_constraints(rng: random.Random, count: int) -> list[QoSConstraint]:
    out = []
    for _ in range(count):
        attr = rng.choice(["reliability", "availability", "response_time",
                           "latency", "price", "security", "compliance"])
        if attr in ("reliability", "availability"):
            value = round(rng.uniform(0.0, 1.0), 6)
        elif attr in ("security", "compliance"):
            value = rng.randint(0, 5)
        else:
            value = round(rng.uniform(0.0, 500.0), 6)
        bound = rng.choice(["min", "max"])
        out.append(QoSConstraint(attr, bound, float(value)))
    return out


def random_query(rng: random.Random, records, concepts=("Service",)) -> DiscoveryQuery:
    name = rng.choice(records).name if records and rng.random() < 0.5 else \
        " ".join(rng.sample(WORDS, 2)).title()
    return DiscoveryQuery(
        name=name,
        keywords=frozenset(rng.sample(WORDS, rng.randint(0, 4))),
        concept=rng.choice(list(concepts)) if rng.random() < 0.5 else None,
        resource_type=rng.choice(list(ResourceType)) if rng.random() < 0.3 else None,
        constraints=tuple(random_constraints(rng, rng.randint(0, 3))),
        weights=random_weights(rng),
        price_ceiling=round(rng.uniform(10.0, 120.0), 6) if rng.random() < 0.3 else None,
        threshold=round(rng.uniform(0.1, 0.9), 6) if rng.random() < 0.5 else None,
    )


def seeded_store(rng: random.Random, n: int, concepts=("Service",)) -> Store:
    store = Store()
    for i in range(n):
        store.save_service(random_record(rng, f"svc-{i:04d}", concepts))
    return store


@pytest.fixture
def small_ontology():
    return parse_ontology(SMALL_TAXONOMY)


@pytest.fixture
def store():
    return Store()
