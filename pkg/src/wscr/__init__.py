"""QoS-aware web service registry and discovery broker."""

from .discovery import Broker
from .models import (
    Certificate,
    DiscoveryQuery,
    DiscoveryResult,
    Feedback,
    NumericRequirement,
    PreferenceWeights,
    PriorityGroups,
    ProviderInfo,
    QoSConstraint,
    QoSProfile,
    RankedService,
    ResourceType,
    ServiceRecord,
    TimeSlot,
)
from .ontology import Ontology, load_ontology, parse_ontology
from .ranking import FeedbackStore
from .registry import Store

__all__ = [
    "Broker",
    "Certificate",
    "DiscoveryQuery",
    "DiscoveryResult",
    "Feedback",
    "FeedbackStore",
    "NumericRequirement",
    "Ontology",
    "PreferenceWeights",
    "PriorityGroups",
    "ProviderInfo",
    "QoSConstraint",
    "QoSProfile",
    "RankedService",
    "ResourceType",
    "ServiceRecord",
    "Store",
    "TimeSlot",
    "load_ontology",
    "parse_ontology",
]
