"""Service Name Matching Block: candidate retrieval over the registry.

Each stored record is scored on three channels (exact name, keyword
Jaccard, ontology similarity); the maximum decides inclusion against the
threshold. Resource-type compatibility and numeric requirements act as
hard prefilters.
"""
from __future__ import annotations

from .errors import EmptyQuery
from .models import DiscoveryQuery, MatchCandidate, ServiceRecord
from .ontology import Ontology, compatible, concept_similarity, numeric_match
from .registry import Store, normalize_name

DEFAULT_THRESHOLD = 0.5

_REASON_ORDER = ("Exact", "Keyword", "Ontology")


def token_similarity(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    """Jaccard index; two empty sets score 0."""
    if not a and not b:
        return 0.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def _raw_value(record: ServiceRecord, attribute: str) -> float | None:
    if attribute in record.qos.as_dict():
        return record.qos.value(attribute)
    return None


def score_record(query: DiscoveryQuery, record: ServiceRecord,
                 ontology: Ontology) -> tuple[float, str]:
    """Best channel score and the channel that attained it
    (tie order Exact > Keyword > Ontology)."""
    exact = 0.0
    if query.name and normalize_name(query.name) == normalize_name(record.name):
        exact = 1.0
    keyword = token_similarity(query.keywords, record.keywords) if query.keywords else 0.0
    onto = 0.0
    if (query.concept is not None and query.concept in ontology.concepts
            and record.concept in ontology.concepts):
        onto = concept_similarity(query.concept, record.concept, ontology)
    by_reason = {"Exact": exact, "Keyword": keyword, "Ontology": onto}
    best = max(by_reason.values())
    for reason in _REASON_ORDER:
        if by_reason[reason] == best:
            return best, reason
    raise AssertionError("unreachable")


def passes_prefilters(query: DiscoveryQuery, record: ServiceRecord) -> bool:
    if query.resource_type is not None and not compatible(query.resource_type,
                                                          record.resource_type):
        return False
    for req in query.numeric:
        value = _raw_value(record, req.attribute)
        if value is None or not numeric_match(req, value):
            return False
    return True


def match(query: DiscoveryQuery, store: Store, ontology: Ontology,
          threshold: float = DEFAULT_THRESHOLD) -> list[MatchCandidate]:
    """Candidate set sorted by (-similarity, service_key)."""
    if not query.has_subject():
        raise EmptyQuery()
    if not (0.0 < threshold <= 1.0):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")

    if query.exact_only:
        records = store.search_by_name(query.name) if query.name else []
    else:
        records = store.all_services()

    candidates: list[MatchCandidate] = []
    for record in records:
        if not passes_prefilters(query, record):
            continue
        score, reason = score_record(query, record, ontology)
        if score >= threshold:
            candidates.append(MatchCandidate(record=record, name_similarity=score,
                                             match_reason=reason))
    candidates.sort(key=lambda c: (-c.name_similarity, c.record.service_key))
    return candidates
