"""QoS Parameter Matching Block: constraint filtering, min-max
normalization, simple-additive-weighting rank, consumer feedback blend.
"""
from __future__ import annotations

import json
import os
import threading
from typing import Optional, Sequence

from . import canonjson
from .errors import EmptyCandidateSet, InvalidRating, UnknownService
from .models import (
    QOS_ATTRIBUTES,
    Feedback,
    MatchCandidate,
    PreferenceWeights,
    PriorityGroups,
    QoSConstraint,
    RankedService,
    TimeSlot,
    format_timestamp,
    is_benefit,
    parse_timestamp,
)

DEFAULT_BETA = 0.2

FEEDBACK_HEADER = {"format": "wscr-feedback", "version": 1}


def filter_by_constraints(candidates: Sequence[MatchCandidate],
                          constraints: Sequence[QoSConstraint],
                          price_ceiling: Optional[float] = None,
                          window: Optional[TimeSlot] = None) -> list[MatchCandidate]:
    """Keep candidates meeting every constraint (inclusive bounds), the
    price ceiling, and offering a slot that fully contains the window.
    Order is preserved."""
    survivors = []
    for cand in candidates:
        qos = cand.record.qos
        if not all(c.holds(qos.value(c.attribute)) for c in constraints):
            continue
        if price_ceiling is not None and qos.price > price_ceiling:
            continue
        if window is not None and not any(slot.contains(window)
                                          for slot in cand.record.time_slots):
            continue
        survivors.append(cand)
    return survivors


def normalize(candidates: Sequence[MatchCandidate]) -> dict[tuple[str, str], float]:
    """Min-max normalization per attribute over the candidate set.

    Benefit attributes map to (v-min)/(max-min), cost attributes to
    (max-v)/(max-min); a degenerate attribute (max == min) maps to 1.0
    for every candidate.
    """
    if not candidates:
        raise EmptyCandidateSet()
    out: dict[tuple[str, str], float] = {}
    for attr in QOS_ATTRIBUTES:
        values = [c.record.qos.value(attr) for c in candidates]
        lo, hi = min(values), max(values)
        span = hi - lo
        for cand, v in zip(candidates, values):
            if span == 0:
                n = 1.0
            elif is_benefit(attr):
                n = (v - lo) / span
            else:
                n = (hi - v) / span
            out[(cand.record.service_key, attr)] = n
    return out


def saw_score(normalized: dict[str, float], weights: PreferenceWeights,
              attributes: Sequence[str]) -> float:
    """Weighted average of normalized scores restricted to the given
    attributes; zero total weight falls back to a plain mean."""
    total = sum(weights.weight(a) for a in attributes)
    if total == 0:
        return sum(normalized[a] for a in attributes) / len(attributes)
    return sum(weights.weight(a) * normalized[a] for a in attributes) / total


class FeedbackStore:
    """Append-only consumer rating journal with per-service means."""

    def __init__(self, journal_path: Optional[str] = None):
        self._lock = threading.Lock()
        self._ratings: dict[str, list[int]] = {}
        self._journal = None
        if journal_path:
            if os.path.exists(journal_path):
                self._replay(journal_path)
            self._journal = open(journal_path, "a", encoding="utf-8")
            if os.path.getsize(journal_path) == 0:
                self._journal.write(canonjson.dumps(FEEDBACK_HEADER) + "\n")
                self._journal.flush()

    def _replay(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                data = json.loads(line)
                if data.get("format") == "wscr-feedback":
                    continue
                self._ratings.setdefault(data["service_key"], []).append(int(data["rating"]))

    def record(self, fb: Feedback, registry=None) -> int:
        """Append one rating; returns the accepted entry count for the service."""
        if not isinstance(fb.rating, int) or not (1 <= fb.rating <= 5):
            raise InvalidRating(fb.rating)
        if registry is not None and not registry.has_service(fb.service_key):
            raise UnknownService(fb.service_key)
        with self._lock:
            if self._journal is not None:
                self._journal.write(canonjson.dumps({
                    "consumer_id": fb.consumer_id,
                    "service_key": fb.service_key,
                    "rating": fb.rating,
                    "at": format_timestamp(fb.at),
                }) + "\n")
                self._journal.flush()
            self._ratings.setdefault(fb.service_key, []).append(fb.rating)
            return len(self._ratings[fb.service_key])

    def mean_rating(self, service_key: str) -> Optional[float]:
        ratings = self._ratings.get(service_key)
        if not ratings:
            return None
        return sum(ratings) / len(ratings)

    def close(self) -> None:
        if self._journal is not None:
            self._journal.flush()
            self._journal.close()
            self._journal = None


def rank_services(survivors: Sequence[MatchCandidate],
                  prefs: PreferenceWeights,
                  groups: Optional[PriorityGroups] = None,
                  feedback: Optional[FeedbackStore] = None,
                  beta: float = DEFAULT_BETA) -> list[RankedService]:
    """Rank survivors by preference-weighted normalized QoS.

    Without priority groups the order is descending final score, where a
    service with ratings blends its mean rating in at weight beta. With
    groups the order is lexicographic over per-group scores (each group
    scored by weighted average restricted to its attributes), ungrouped
    weighted attributes forming a last implicit group. Ties break by
    ascending service key; ranks run 1..n.
    """
    if not survivors:
        raise EmptyCandidateSet()
    if not prefs.is_valid():
        raise ValueError("preference weights must be non-negative with at least one > 0")

    norm = normalize(survivors)
    weighted_attrs = [a for a in QOS_ATTRIBUTES if prefs.weight(a) > 0]

    scored = []
    for cand in survivors:
        key = cand.record.service_key
        per_attr = {a: norm[(key, a)] for a in QOS_ATTRIBUTES}
        qos_score = saw_score(per_attr, prefs, weighted_attrs or QOS_ATTRIBUTES)
        mean = feedback.mean_rating(key) if feedback is not None else None
        if mean is not None:
            final = (1.0 - beta) * qos_score + beta * (mean / 5.0)
        else:
            final = qos_score
        if groups is not None:
            grouped = set().union(*groups.groups) if groups.groups else set()
            implicit = [a for a in weighted_attrs if a not in grouped]
            group_scores = tuple(
                saw_score(per_attr, prefs, sorted(g)) for g in groups.groups
            ) + ((saw_score(per_attr, prefs, implicit),) if implicit else ())
            sort_key = tuple(-s for s in group_scores) + (key,)
        else:
            sort_key = (-final, key)
        scored.append((sort_key, cand, per_attr, qos_score, final))

    scored.sort(key=lambda item: item[0])
    return [
        RankedService(record=cand.record, name_similarity=cand.name_similarity,
                      normalized=per_attr, qos_score=qos_score,
                      final_score=final, rank=i + 1)
        for i, (_, cand, per_attr, qos_score, final) in enumerate(scored)
    ]
