"""XML wire formats: discovery queries, records, certificates, feedback,
results, and the minimal Envelope/Body wrapper.

Serialization is canonical: fixed element order, no inter-element
whitespace, decimals with 6 fraction digits.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional
from xml.sax.saxutils import escape, quoteattr

from .errors import MalformedXML, SchemaViolation, UnknownAttribute
from .models import (
    QOS_ATTRIBUTES,
    Certificate,
    DiscoveryQuery,
    DiscoveryResult,
    Feedback,
    PreferenceWeights,
    PriorityGroups,
    ProviderInfo,
    QoSConstraint,
    QoSProfile,
    ResourceType,
    ServiceRecord,
    TimeSlot,
    format_decimal,
    format_timestamp,
    parse_timestamp,
)


def _parse_root(doc: str) -> ET.Element:
    try:
        return ET.fromstring(doc)
    except ET.ParseError as exc:
        raise MalformedXML(getattr(exc, "position", None), str(exc)) from exc


def _attr(elem: ET.Element, name: str) -> str:
    value = elem.get(name)
    if value is None:
        raise SchemaViolation(elem.tag, f"missing attribute {name!r}")
    return value


def _decimal(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise SchemaViolation(where, f"not a decimal: {text!r}") from None


def _qos_attr_name(name: str) -> str:
    if name not in QOS_ATTRIBUTES:
        raise UnknownAttribute(name)
    return name


def _tokens(text: Optional[str]) -> frozenset[str]:
    if not text:
        return frozenset()
    return frozenset(t.strip().lower() for t in text.split(",") if t.strip())


# -- DiscoveryQuery ----------------------------------------------------


def parse_query_xml(doc: str) -> DiscoveryQuery:
    """Parse a canonical DiscoveryQuery document; unknown elements and
    attributes outside the seven-name universe are rejected."""
    root = _parse_root(doc)
    if root.tag != "DiscoveryQuery":
        raise SchemaViolation(root.tag, "expected DiscoveryQuery root")

    name = ""
    keywords: frozenset[str] = frozenset()
    concept = None
    resource_type = None
    constraints: list[QoSConstraint] = []
    weights: dict[str, float] = {}
    groups: list[frozenset[str]] = []
    price_ceiling = None
    window = None
    threshold = None

    for child in root:
        tag = child.tag
        if tag == "ServiceName":
            name = (child.text or "").strip()
        elif tag == "Keywords":
            keywords = _tokens(child.text)
        elif tag == "Concept":
            concept = (child.text or "").strip() or None
        elif tag == "ResourceType":
            text = (child.text or "").strip()
            try:
                resource_type = ResourceType(text)
            except ValueError:
                raise SchemaViolation(tag, f"unknown resource type {text!r}") from None
        elif tag == "Constraints":
            for c in child:
                if c.tag != "Constraint":
                    raise SchemaViolation(c.tag)
                attr = _qos_attr_name(_attr(c, "attr"))
                lo, hi = c.get("min"), c.get("max")
                if lo is None and hi is None:
                    raise SchemaViolation("Constraint", "needs min or max")
                if lo is not None:
                    constraints.append(QoSConstraint(attr, "min", _decimal(lo, "Constraint")))
                if hi is not None:
                    constraints.append(QoSConstraint(attr, "max", _decimal(hi, "Constraint")))
        elif tag == "Preferences":
            for w in child:
                if w.tag != "Weight":
                    raise SchemaViolation(w.tag)
                attr = _qos_attr_name(_attr(w, "attr"))
                weights[attr] = _decimal(_attr(w, "value"), "Weight")
        elif tag == "Groups":
            for g in child:
                if g.tag != "Group":
                    raise SchemaViolation(g.tag)
                members = frozenset(_qos_attr_name(t) for t in _tokens(g.text))
                if not members:
                    raise SchemaViolation("Group", "empty group")
                groups.append(members)
        elif tag == "PriceCeiling":
            price_ceiling = _decimal((child.text or "").strip(), tag)
        elif tag == "TimeSlot":
            start = parse_timestamp(_attr(child, "start"))
            end = parse_timestamp(_attr(child, "end"))
            if not start < end:
                raise SchemaViolation(tag, "start must precede end")
            window = TimeSlot(start, end)
        elif tag == "Threshold":
            threshold = _decimal((child.text or "").strip(), tag)
        else:
            raise SchemaViolation(tag)

    if groups:
        seen: set[str] = set()
        for g in groups:
            if g & seen:
                raise SchemaViolation("Groups", "groups must be disjoint")
            seen |= g

    return DiscoveryQuery(
        name=name, keywords=keywords, concept=concept, resource_type=resource_type,
        constraints=tuple(constraints), weights=PreferenceWeights(weights),
        groups=PriorityGroups(tuple(groups)) if groups else None,
        price_ceiling=price_ceiling, window=window, threshold=threshold,
    )


def serialize_query(q: DiscoveryQuery) -> str:
    parts = ["<DiscoveryQuery>"]
    if q.name:
        parts.append(f"<ServiceName>{escape(q.name)}</ServiceName>")
    if q.keywords:
        parts.append(f"<Keywords>{escape(','.join(sorted(q.keywords)))}</Keywords>")
    if q.concept is not None:
        parts.append(f"<Concept>{escape(q.concept)}</Concept>")
    if q.resource_type is not None:
        parts.append(f"<ResourceType>{q.resource_type.value}</ResourceType>")
    if q.constraints:
        parts.append("<Constraints>")
        for c in q.constraints:
            parts.append(f'<Constraint attr="{c.attribute}" {c.bound}='
                         f'"{format_decimal(c.value)}" />')
        parts.append("</Constraints>")
    if q.weights.weights:
        parts.append("<Preferences>")
        for attr in sorted(q.weights.weights):
            parts.append(f'<Weight attr="{attr}" value='
                         f'"{format_decimal(q.weights.weights[attr])}" />')
        parts.append("</Preferences>")
    if q.groups is not None and q.groups.groups:
        parts.append("<Groups>")
        for g in q.groups.groups:
            parts.append(f"<Group>{','.join(sorted(g))}</Group>")
        parts.append("</Groups>")
    if q.price_ceiling is not None:
        parts.append(f"<PriceCeiling>{format_decimal(q.price_ceiling)}</PriceCeiling>")
    if q.window is not None:
        parts.append(f'<TimeSlot start="{format_timestamp(q.window.start)}" '
                     f'end="{format_timestamp(q.window.end)}" />')
    if q.threshold is not None:
        parts.append(f"<Threshold>{format_decimal(q.threshold)}</Threshold>")
    parts.append("</DiscoveryQuery>")
    return "".join(parts)


# -- ServiceRecord -----------------------------------------------------


def serialize_certificate(cert: Certificate) -> str:
    return (f'<Certificate id={quoteattr(cert.certificate_id)} '
            f'serviceKey={quoteattr(cert.service_key)} '
            f'digest="{cert.digest}" '
            f'issuedAt="{format_timestamp(cert.issued_at)}" />')


def _parse_certificate(elem: ET.Element) -> Certificate:
    return Certificate(
        certificate_id=_attr(elem, "id"),
        service_key=_attr(elem, "serviceKey"),
        digest=_attr(elem, "digest"),
        issued_at=parse_timestamp(_attr(elem, "issuedAt")),
    )


def serialize_record(record: ServiceRecord) -> str:
    parts = [f"<ServiceRecord key={quoteattr(record.service_key)}>"]
    parts.append(f"<Name>{escape(record.name)}</Name>")
    if record.keywords:
        parts.append(f"<Keywords>{escape(','.join(sorted(record.keywords)))}</Keywords>")
    parts.append(f"<Concept>{escape(record.concept)}</Concept>")
    if record.description:
        parts.append(f"<Description>{escape(record.description)}</Description>")
    p = record.provider
    parts.append(f"<Provider company={quoteattr(p.company_name)} "
                 f"address={quoteattr(p.address)} website={quoteattr(p.website)} "
                 f"contact={quoteattr(p.contact)} />")
    parts.append(f"<ResourceType>{record.resource_type.value}</ResourceType>")
    qos_attrs = " ".join(f'{a}="{format_decimal(record.qos.value(a))}"'
                         for a in QOS_ATTRIBUTES)
    parts.append(f"<QoS {qos_attrs} />")
    if record.time_slots:
        parts.append("<TimeSlots>")
        for slot in record.time_slots:
            parts.append(f'<TimeSlot start="{format_timestamp(slot.start)}" '
                         f'end="{format_timestamp(slot.end)}" />')
        parts.append("</TimeSlots>")
    if record.certificate is not None:
        parts.append(serialize_certificate(record.certificate))
    parts.append("</ServiceRecord>")
    return "".join(parts)


def parse_record_xml(doc: str) -> ServiceRecord:
    root = _parse_root(doc)
    if root.tag != "ServiceRecord":
        raise SchemaViolation(root.tag, "expected ServiceRecord root")
    key = _attr(root, "key")

    name = ""
    keywords: frozenset[str] = frozenset()
    concept = ""
    description = ""
    provider = ProviderInfo(company_name="")
    resource_type = None
    qos = None
    slots: list[TimeSlot] = []
    cert = None

    for child in root:
        tag = child.tag
        if tag == "Name":
            name = (child.text or "").strip()
        elif tag == "Keywords":
            keywords = _tokens(child.text)
        elif tag == "Concept":
            concept = (child.text or "").strip()
        elif tag == "Description":
            description = (child.text or "").strip()
        elif tag == "Provider":
            provider = ProviderInfo(
                company_name=_attr(child, "company"),
                address=child.get("address", ""),
                website=child.get("website", ""),
                contact=child.get("contact", ""),
            )
        elif tag == "ResourceType":
            text = (child.text or "").strip()
            try:
                resource_type = ResourceType(text)
            except ValueError:
                raise SchemaViolation(tag, f"unknown resource type {text!r}") from None
        elif tag == "QoS":
            values = {}
            for attr_name in child.keys():
                values[_qos_attr_name(attr_name)] = _decimal(child.get(attr_name), "QoS")
            missing = set(QOS_ATTRIBUTES) - set(values)
            if missing:
                raise SchemaViolation("QoS", f"missing attributes {sorted(missing)}")
            qos = QoSProfile(**values)
        elif tag == "TimeSlots":
            for s in child:
                if s.tag != "TimeSlot":
                    raise SchemaViolation(s.tag)
                start = parse_timestamp(_attr(s, "start"))
                end = parse_timestamp(_attr(s, "end"))
                if not start < end:
                    raise SchemaViolation("TimeSlot", "start must precede end")
                slots.append(TimeSlot(start, end))
        elif tag == "Certificate":
            cert = _parse_certificate(child)
        else:
            raise SchemaViolation(tag)

    if not name:
        raise SchemaViolation("Name", "service name required")
    if resource_type is None:
        raise SchemaViolation("ResourceType", "required")
    if qos is None:
        raise SchemaViolation("QoS", "required")
    return ServiceRecord(
        service_key=key, name=name, keywords=keywords, concept=concept,
        description=description, provider=provider, resource_type=resource_type,
        qos=qos, time_slots=tuple(slots), certificate=cert,
    )


# -- Feedback ----------------------------------------------------------


def serialize_feedback(fb: Feedback) -> str:
    return (f'<Feedback consumer={quoteattr(fb.consumer_id)} '
            f'serviceKey={quoteattr(fb.service_key)} '
            f'rating="{fb.rating}" at="{format_timestamp(fb.at)}" />')


def parse_feedback_xml(doc: str) -> Feedback:
    root = _parse_root(doc)
    if root.tag != "Feedback":
        raise SchemaViolation(root.tag, "expected Feedback root")
    rating_text = _attr(root, "rating")
    try:
        rating = int(rating_text)
    except ValueError:
        raise SchemaViolation("Feedback", f"rating not an integer: {rating_text!r}") from None
    return Feedback(
        consumer_id=_attr(root, "consumer"),
        service_key=_attr(root, "serviceKey"),
        rating=rating,
        at=parse_timestamp(_attr(root, "at")),
    )


# -- DiscoveryResult ---------------------------------------------------


def serialize_result(result: DiscoveryResult, debug: bool = False) -> str:
    parts = [f'<DiscoveryResult status="{result.status}">']
    for svc in result.services:
        parts.append(
            f'<Service rank="{svc.rank}" key={quoteattr(svc.record.service_key)} '
            f'name={quoteattr(svc.record.name)} '
            f'nameSimilarity="{format_decimal(svc.name_similarity)}" '
            f'qosScore="{format_decimal(svc.qos_score)}" '
            f'finalScore="{format_decimal(svc.final_score)}">')
        norm_attrs = " ".join(f'{a}="{format_decimal(svc.normalized[a])}"'
                              for a in QOS_ATTRIBUTES)
        parts.append(f"<Normalized {norm_attrs} />")
        parts.append("</Service>")
    if debug:
        parts.append("<Stages>")
        parts.append(f"<Matched>{escape(','.join(result.matched_keys))}</Matched>")
        parts.append(f"<Filtered>{escape(','.join(result.filtered_keys))}</Filtered>")
        parts.append("</Stages>")
    parts.append("</DiscoveryResult>")
    return "".join(parts)


# -- Envelope / Fault --------------------------------------------------


def wrap_envelope(payload: str) -> str:
    return f"<Envelope><Body>{payload}</Body></Envelope>"


_ENV_PREFIX = "<Envelope><Body>"
_ENV_SUFFIX = "</Body></Envelope>"


def unwrap_envelope(doc: str) -> str:
    """Return the inner payload XML of an Envelope/Body document; a bare
    payload document passes through unchanged. Canonical envelopes are
    stripped textually so the payload bytes survive untouched."""
    if doc.startswith(_ENV_PREFIX) and doc.endswith(_ENV_SUFFIX):
        return doc[len(_ENV_PREFIX):-len(_ENV_SUFFIX)]
    root = _parse_root(doc)
    if root.tag != "Envelope":
        return doc
    body = list(root)
    if len(body) != 1 or body[0].tag != "Body":
        raise SchemaViolation("Envelope", "expected a single Body child")
    inner = list(body[0])
    if len(inner) != 1:
        raise SchemaViolation("Body", "expected exactly one payload element")
    return ET.tostring(inner[0], encoding="unicode")


def serialize_fault(code: str, message: str) -> str:
    return f'<Fault code={quoteattr(code)}>{escape(message)}</Fault>'
