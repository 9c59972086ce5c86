"""Cloud service taxonomy: loading plus similarity / compatibility /
numeric reasoning primitives.

File format: UTF-8 text, '#' comments, blank lines ignored. One bare line
declares the root concept; every other line is an edge "Parent>Child".
Single inheritance only.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import CycleDetected, OntologyError, UnknownConcept, UnknownParent
from .models import NumericRequirement, ResourceType


@dataclass(frozen=True)
class Ontology:
    concepts: frozenset[str]
    parent: dict[str, str]  # child -> parent; root absent
    root: str

    def depth(self, concept: str) -> int:
        """Edge-counting depth with depth(root) = 1."""
        if concept not in self.concepts:
            raise UnknownConcept(concept)
        d = 1
        c = concept
        while c != self.root:
            c = self.parent[c]
            d += 1
        return d

    def ancestors(self, concept: str) -> list[str]:
        """Concept itself up to the root, in order."""
        if concept not in self.concepts:
            raise UnknownConcept(concept)
        chain = [concept]
        c = concept
        while c != self.root:
            c = self.parent[c]
            chain.append(c)
        return chain

    def lca(self, a: str, b: str) -> str:
        above_a = set(self.ancestors(a))
        for c in self.ancestors(b):
            if c in above_a:
                return c
        return self.root

    def is_subconcept(self, a: str, b: str) -> bool:
        """True iff a is b or a descendant of b."""
        return b in self.ancestors(a)


def parse_ontology(text: str) -> Ontology:
    roots: list[str] = []
    edges: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ">" in line:
            parent, _, child = (p.strip() for p in line.partition(">"))
            if not parent or not child:
                raise OntologyError(f"malformed edge line {raw!r}")
            edges.append((parent, child))
        else:
            roots.append(line)

    if not roots:
        raise OntologyError("no root concept declared")
    if len(roots) > 1:
        raise OntologyError(f"multiple root declarations: {roots}")
    root = roots[0]

    declared = {root} | {child for _, child in edges}
    parent_map: dict[str, str] = {}
    for parent, child in edges:
        if parent not in declared:
            raise UnknownParent(parent, child)
        if child == root:
            raise OntologyError(f"root {root!r} may not have a parent")
        if child in parent_map:
            raise OntologyError(f"concept {child!r} has multiple parents")
        parent_map[child] = parent

    # cycle check: walk each chain with a visited set
    for start in parent_map:
        seen = set()
        c = start
        while c in parent_map:
            if c in seen:
                raise CycleDetected(c)
            seen.add(c)
            c = parent_map[c]

    concepts = declared
    for c in concepts:
        if c == root:
            continue
        walker = c
        while walker in parent_map:
            walker = parent_map[walker]
        if walker != root:
            raise OntologyError(f"concept {c!r} does not reach root {root!r}")

    return Ontology(concepts=frozenset(concepts), parent=parent_map, root=root)


def load_ontology(path: str) -> Ontology:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_ontology(fh.read())


def concept_similarity(a: str, b: str, o: Ontology) -> float:
    """Wu-Palmer: 2*depth(lca) / (depth(a) + depth(b)), depth(root) = 1."""
    da, db = o.depth(a), o.depth(b)
    dl = o.depth(o.lca(a, b))
    return 2.0 * dl / (da + db)


def compatible(required: ResourceType, offered: ResourceType) -> bool:
    return required == offered


def numeric_match(req: NumericRequirement, value: float) -> bool:
    return req.matches(value)
