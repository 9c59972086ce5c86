"""Exception hierarchy for the registry broker."""


class WscrError(Exception):
    """Base class for all broker errors."""


class DuplicateKey(WscrError):
    def __init__(self, service_key):
        super().__init__(f"DuplicateKey: service key {service_key!r} already registered")
        self.service_key = service_key


class MissingCertificate(WscrError):
    def __init__(self, service_key):
        super().__init__(f"MissingCertificate: record {service_key!r} has no certificate")
        self.service_key = service_key


class UnknownService(WscrError):
    def __init__(self, service_key):
        super().__init__(f"UnknownService: no record with key {service_key!r}")
        self.service_key = service_key


class CorruptSnapshot(WscrError):
    def __init__(self, line_number, reason):
        super().__init__(f"CorruptSnapshot at line {line_number}: {reason}")
        self.line_number = line_number


class InvalidQoS(WscrError):
    def __init__(self, report):
        msgs = "; ".join(f"{a}: {m}" for a, m in report.violations)
        super().__init__(f"InvalidQoS: {msgs}")
        self.report = report


class OntologyError(WscrError):
    pass


class CycleDetected(OntologyError):
    def __init__(self, concept):
        super().__init__(f"CycleDetected: concept {concept!r} lies on a parent cycle")
        self.concept = concept


class UnknownParent(OntologyError):
    def __init__(self, parent, child):
        super().__init__(f"UnknownParent: edge {parent!r}>{child!r} names undeclared parent {parent!r}")
        self.parent = parent
        self.child = child


class UnknownConcept(WscrError):
    def __init__(self, concept):
        super().__init__(f"UnknownConcept: {concept!r} not in ontology")
        self.concept = concept


class EmptyQuery(WscrError):
    def __init__(self):
        super().__init__("EmptyQuery: query needs a name, keywords, or a concept")


class EmptyCandidateSet(WscrError):
    def __init__(self):
        super().__init__("EmptyCandidateSet: ranking requires at least one survivor")


class InvalidRating(WscrError):
    def __init__(self, rating):
        super().__init__(f"InvalidRating: rating must be an integer 1-5, got {rating!r}")
        self.rating = rating


class MalformedXML(WscrError):
    def __init__(self, position, reason):
        super().__init__(f"MalformedXML at {position}: {reason}")
        self.position = position


class SchemaViolation(WscrError):
    def __init__(self, element, reason=""):
        detail = f" ({reason})" if reason else ""
        super().__init__(f"SchemaViolation: element {element!r}{detail}")
        self.element = element


class UnknownAttribute(WscrError):
    def __init__(self, name):
        super().__init__(f"UnknownAttribute: {name!r} is not a QoS attribute")
        self.name = name


class ConfigError(WscrError):
    def __init__(self, field, reason):
        super().__init__(f"ConfigError: {field}: {reason}")
        self.field = field


class RegistryUnreachable(WscrError):
    pass


class UnknownMethod(WscrError):
    def __init__(self, method):
        super().__init__(f"UnknownMethod: contract does not provide {method!r}")
        self.method = method


class EndpointUnreachable(WscrError):
    pass
