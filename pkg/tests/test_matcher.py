import random

import pytest

from wscr.errors import EmptyQuery
from wscr.matcher import match, passes_prefilters, score_record, token_similarity
from wscr.models import DiscoveryQuery, NumericRequirement, PreferenceWeights, ResourceType
from wscr.ontology import parse_ontology
from wscr.registry import Store, normalize_name

from conftest import SMALL_TAXONOMY, make_record, random_query, random_taxonomy, seeded_store


def query(**kwargs) -> DiscoveryQuery:
    kwargs.setdefault("weights", PreferenceWeights({"price": 1.0}))
    return DiscoveryQuery(**kwargs)


@pytest.mark.parametrize("a,b,expected", [
    ({"pay", "invoice"}, {"pay", "invoice"}, 1.0),
    ({"pay"}, {"ship"}, 0.0),
    ({"a", "b", "c"}, {"b", "c", "d"}, 0.5),
    (set(), set(), 0.0),
    (set(), {"x"}, 0.0),
])
def test_token_similarity(a, b, expected):
    assert token_similarity(a, b) == expected


def test_exact_name_hit(small_ontology, store):
    store.save_service(make_record(key="svc-001", name="Currency Converter"))
    store.save_service(make_record(key="svc-002", name="Mail Relay", keywords=("mail",)))
    out = match(query(name="currency  CONVERTER"), store, small_ontology, 0.5)
    assert len(out) == 1
    assert out[0].record.service_key == "svc-001"
    assert out[0].name_similarity == 1.0
    assert out[0].match_reason == "Exact"


def test_keyword_channel(small_ontology, store):
    store.save_service(make_record(key="svc-001", name="Something Else",
                                   keywords=("b", "c", "d")))
    out = match(query(name="No Match", keywords=frozenset({"a", "b", "c"})),
                store, small_ontology, 0.5)
    assert len(out) == 1
    assert out[0].name_similarity == 0.5
    assert out[0].match_reason == "Keyword"


def test_ontology_channel(small_ontology, store):
    store.save_service(make_record(key="svc-001", name="Blocks", keywords=(),
                                   concept="BlockStorage"))
    out = match(query(name="Storage Please", concept="ObjectStorage"),
                store, small_ontology, 0.5)
    assert len(out) == 1
    assert out[0].name_similarity == pytest.approx(2 / 3)
    assert out[0].match_reason == "Ontology"


def test_resource_type_gate(small_ontology, store):
    store.save_service(make_record(key="svc-001", name="X",
                                   resource_type=ResourceType.COMPUTE))
    out = match(query(name="X", resource_type=ResourceType.STORAGE),
                store, small_ontology, 0.5)
    assert out == []


def test_numeric_prefilter(small_ontology, store):
    store.save_service(make_record(key="svc-001", name="X", price=5.0))
    req = (NumericRequirement("price", 0.0, 4.0),)
    assert match(query(name="X", numeric=req), store, small_ontology, 0.5) == []
    req = (NumericRequirement("price", 0.0, 5.0),)
    assert len(match(query(name="X", numeric=req), store, small_ontology, 0.5)) == 1


def test_tie_reason_order(small_ontology, store):
    # exact name and identical keywords both score 1.0; Exact wins the tie
    store.save_service(make_record(key="svc-001", name="X", keywords=("a",)))
    out = match(query(name="X", keywords=frozenset({"a"})), store, small_ontology, 0.5)
    assert out[0].match_reason == "Exact"


def test_exact_only_uses_name_index(small_ontology, store):
    store.save_service(make_record(key="svc-001", name="X", keywords=("a", "b")))
    store.save_service(make_record(key="svc-002", name="Y", keywords=("a", "b")))
    out = match(query(name="X", keywords=frozenset({"a", "b"}), exact_only=True),
                store, small_ontology, 0.5)
    assert [c.record.service_key for c in out] == ["svc-001"]


def test_empty_query_rejected(small_ontology, store):
    with pytest.raises(EmptyQuery):
        match(query(), store, small_ontology, 0.5)


def test_bad_threshold_rejected(small_ontology, store):
    store.save_service(make_record())
    with pytest.raises(ValueError):
        match(query(name="X"), store, small_ontology, 0.0)


def brute_force_match(q, store, ontology, threshold):
    """Linear-scan oracle reapplying the channel formulas independently."""
    out = []
    for record in store.all_services():
        if q.resource_type is not None and record.resource_type != q.resource_type:
            continue
        skip = False
        for req in q.numeric:
            v = record.qos.as_dict().get(req.attribute)
            if v is None or not (req.lo <= v <= req.hi):
                skip = True
        if skip:
            continue
        exact = 1.0 if q.name and normalize_name(q.name) == normalize_name(record.name) else 0.0
        union = q.keywords | record.keywords
        kw = len(q.keywords & record.keywords) / len(union) if q.keywords and union else 0.0
        onto = 0.0
        if q.concept in ontology.concepts and record.concept in ontology.concepts:
            ca = {c: i for i, c in enumerate(ontology.ancestors(q.concept))}
            chain_b = ontology.ancestors(record.concept)
            lca = next(c for c in chain_b if c in ca)
            onto = 2.0 * ontology.depth(lca) / (
                ontology.depth(q.concept) + ontology.depth(record.concept))
        s = max(exact, kw, onto)
        if s >= threshold:
            out.append((record.service_key, s))
    out.sort(key=lambda t: (-t[1], t[0]))
    return out


def test_oracle_equivalence_random_registries():
    rng = random.Random(19)
    for _ in range(20):
        taxonomy = parse_ontology(random_taxonomy(rng, 12))
        concepts = sorted(taxonomy.concepts)
        store = seeded_store(rng, rng.randint(1, 60), concepts)
        q = random_query(rng, store.all_services(), concepts)
        tau = q.threshold or 0.5
        got = [(c.record.service_key, c.name_similarity)
               for c in match(q, store, taxonomy, tau)]
        assert got == brute_force_match(q, store, taxonomy, tau)


def test_threshold_monotonicity():
    rng = random.Random(23)
    for _ in range(10):
        taxonomy = parse_ontology(random_taxonomy(rng, 8))
        concepts = sorted(taxonomy.concepts)
        store = seeded_store(rng, 40, concepts)
        q = random_query(rng, store.all_services(), concepts)
        t1, t2 = sorted((rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)))
        low = {c.record.service_key for c in match(q, store, taxonomy, t1)}
        high = {c.record.service_key for c in match(q, store, taxonomy, t2)}
        assert high <= low


def test_determinism(small_ontology):
    rng = random.Random(29)
    store = seeded_store(rng, 30)
    q = random_query(rng, store.all_services())
    a = match(q, store, small_ontology, 0.3)
    b = match(q, store, small_ontology, 0.3)
    assert a == b
