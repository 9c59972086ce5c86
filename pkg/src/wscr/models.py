"""Core domain types shared across the broker pipeline."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional

# The seven non-functional attributes and their directions. Benefit
# attributes are better when larger, cost attributes when smaller.
BENEFIT_ATTRIBUTES = ("reliability", "availability", "security", "compliance")
COST_ATTRIBUTES = ("response_time", "latency", "price")
QOS_ATTRIBUTES = tuple(sorted(BENEFIT_ATTRIBUTES + COST_ATTRIBUTES))

# attribute -> (lower bound, upper bound, must be integer)
QOS_DOMAINS = {
    "reliability": (0.0, 1.0, False),
    "availability": (0.0, 1.0, False),
    "response_time": (0.0, float("inf"), False),  # strictly > 0, checked separately
    "latency": (0.0, float("inf"), False),
    "price": (0.0, float("inf"), False),
    "security": (0.0, 5.0, True),
    "compliance": (0.0, 5.0, True),
}


def is_benefit(attribute: str) -> bool:
    return attribute in BENEFIT_ATTRIBUTES


def format_decimal(value) -> str:
    """Canonical decimal rendering: exactly 6 fraction digits."""
    return format(float(value), ".6f")


def format_timestamp(ts: datetime) -> str:
    """RFC3339 with Z suffix, second precision."""
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(text: str) -> datetime:
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


class ResourceType(str, enum.Enum):
    COMPUTE = "Compute"
    STORAGE = "Storage"
    COMMUNICATION = "Communication"


@dataclass(frozen=True)
class QoSProfile:
    """The seven QoS attributes. Fields are not validated on construction;
    use publisher.validate_qos for domain checks."""

    reliability: float
    availability: float
    response_time: float
    latency: float
    price: float
    security: float
    compliance: float

    def value(self, attribute: str) -> float:
        return float(getattr(self, attribute))

    def as_dict(self) -> dict[str, float]:
        return {a: self.value(a) for a in QOS_ATTRIBUTES}


@dataclass(frozen=True)
class ProviderInfo:
    company_name: str
    address: str = ""
    website: str = ""
    contact: str = ""


@dataclass(frozen=True)
class TimeSlot:
    start: datetime
    end: datetime

    def contains(self, other: "TimeSlot") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class Certificate:
    certificate_id: str
    service_key: str
    digest: str
    issued_at: datetime


@dataclass(frozen=True)
class ServiceRecord:
    service_key: str
    name: str
    keywords: frozenset[str]
    concept: str
    description: str
    provider: ProviderInfo
    resource_type: ResourceType
    qos: QoSProfile
    time_slots: tuple[TimeSlot, ...] = ()
    certificate: Optional[Certificate] = None

    def with_certificate(self, cert: Certificate) -> "ServiceRecord":
        return replace(self, certificate=cert)


@dataclass(frozen=True)
class TModel:
    tmodel_key: str
    service_key: str
    entries: tuple[tuple[str, float], ...]  # (attribute, value) in sorted attribute order


def tmodel_from_record(record: ServiceRecord) -> TModel:
    entries = tuple((a, record.qos.value(a)) for a in QOS_ATTRIBUTES)
    return TModel(tmodel_key=f"tmodel:{record.service_key}",
                  service_key=record.service_key, entries=entries)


@dataclass(frozen=True)
class Feedback:
    consumer_id: str
    service_key: str
    rating: int
    at: datetime


@dataclass(frozen=True)
class NumericRequirement:
    attribute: str
    lo: float = float("-inf")
    hi: float = float("inf")

    def matches(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class QoSConstraint:
    attribute: str
    bound: str  # "min" or "max"
    value: float

    def holds(self, v: float) -> bool:
        return v >= self.value if self.bound == "min" else v <= self.value


@dataclass(frozen=True)
class PreferenceWeights:
    weights: dict[str, float] = field(default_factory=dict)

    def weight(self, attribute: str) -> float:
        return float(self.weights.get(attribute, 0.0))

    def is_valid(self) -> bool:
        return any(w > 0 for w in self.weights.values()) and all(
            w >= 0 for w in self.weights.values())


@dataclass(frozen=True)
class PriorityGroups:
    groups: tuple[frozenset[str], ...]


@dataclass(frozen=True)
class DiscoveryQuery:
    name: str = ""
    keywords: frozenset[str] = frozenset()
    concept: Optional[str] = None
    resource_type: Optional[ResourceType] = None
    constraints: tuple[QoSConstraint, ...] = ()
    weights: PreferenceWeights = field(default_factory=PreferenceWeights)
    groups: Optional[PriorityGroups] = None
    price_ceiling: Optional[float] = None
    window: Optional[TimeSlot] = None
    threshold: Optional[float] = None
    exact_only: bool = False
    numeric: tuple[NumericRequirement, ...] = ()

    def has_subject(self) -> bool:
        return bool(self.name) or bool(self.keywords) or self.concept is not None


@dataclass(frozen=True)
class MatchCandidate:
    record: ServiceRecord
    name_similarity: float
    match_reason: str  # "Exact" | "Keyword" | "Ontology"


@dataclass(frozen=True)
class RankedService:
    record: ServiceRecord
    name_similarity: float
    normalized: dict[str, float]
    qos_score: float
    final_score: float
    rank: int


@dataclass(frozen=True)
class DiscoveryResult:
    status: str  # "OK" | "NoMatch"
    services: tuple[RankedService, ...]
    matched_keys: tuple[str, ...] = ()
    filtered_keys: tuple[str, ...] = ()
