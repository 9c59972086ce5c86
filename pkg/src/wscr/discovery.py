"""Discovery pipeline: name matching, constraint filtering, ranking.

The Broker ties the publisher, registry, ontology and feedback stream
together and runs the three-stage pipeline for each query.
"""
from __future__ import annotations

from typing import Optional

from . import matcher, publisher, ranking
from .models import (
    Certificate,
    DiscoveryQuery,
    DiscoveryResult,
    Feedback,
    ServiceRecord,
)
from .ontology import Ontology
from .ranking import FeedbackStore
from .registry import Store


class Broker:
    def __init__(self, store: Store, ontology: Ontology,
                 feedback: Optional[FeedbackStore] = None,
                 tau: float = matcher.DEFAULT_THRESHOLD,
                 beta: float = ranking.DEFAULT_BETA):
        self.store = store
        self.ontology = ontology
        self.feedback = feedback if feedback is not None else FeedbackStore()
        self.tau = tau
        self.beta = beta

    def publish(self, record: ServiceRecord) -> tuple[str, Certificate]:
        return publisher.publish(record, self.store)

    def record_feedback(self, fb: Feedback) -> int:
        return self.feedback.record(fb, registry=self.store)

    def discover(self, query: DiscoveryQuery) -> DiscoveryResult:
        """Run match -> filter -> rank; NoMatch when either of the first
        two stages empties the candidate set."""
        threshold = query.threshold if query.threshold is not None else self.tau
        candidates = matcher.match(query, self.store, self.ontology, threshold)
        matched_keys = tuple(c.record.service_key for c in candidates)
        if not candidates:
            return DiscoveryResult(status="NoMatch", services=())

        survivors = ranking.filter_by_constraints(
            candidates, query.constraints, query.price_ceiling, query.window)
        filtered_keys = tuple(c.record.service_key for c in survivors)
        if not survivors:
            return DiscoveryResult(status="NoMatch", services=(),
                                   matched_keys=matched_keys)

        ranked = ranking.rank_services(survivors, query.weights, query.groups,
                                       self.feedback, self.beta)
        return DiscoveryResult(status="OK", services=tuple(ranked),
                               matched_keys=matched_keys,
                               filtered_keys=filtered_keys)

    def close(self) -> None:
        self.store.close()
        self.feedback.close()
