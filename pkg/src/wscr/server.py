"""FastAPI front end for the broker.

POST bodies are XML payloads, optionally wrapped in the minimal
<Envelope><Body>...</Body></Envelope>; responses are always
envelope-wrapped. Errors come back as <Fault> bodies.
"""
from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, Response
from pydantic import BaseModel

from . import xmlio
from .config import BrokerConfig
from .discovery import Broker
from .errors import (
    DuplicateKey,
    InvalidQoS,
    InvalidRating,
    MalformedXML,
    SchemaViolation,
    UnknownAttribute,
    UnknownService,
    WscrError,
)
from .ontology import Ontology, load_ontology, parse_ontology
from .ranking import FeedbackStore
from .registry import Store

MEDIA_XML = "application/xml"

# minimal single-concept taxonomy used when no ontology file is configured
DEFAULT_ONTOLOGY = parse_ontology("Service\n")


class HealthResponse(BaseModel):
    status: str
    services: int


def _fault(code: str, message: str, status: int) -> Response:
    body = xmlio.wrap_envelope(xmlio.serialize_fault(code, message))
    return Response(content=body, media_type=MEDIA_XML, status_code=status)


def _ok(payload: str, status: int = 200) -> Response:
    return Response(content=xmlio.wrap_envelope(payload), media_type=MEDIA_XML,
                    status_code=status)


def create_app(broker: Broker) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        broker.close()

    app = FastAPI(title="wscr", lifespan=lifespan)
    app.state.broker = broker

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", services=len(broker.store))

    @app.post("/publish")
    async def publish(request: Request) -> Response:
        raw = (await request.body()).decode("utf-8")
        try:
            record = xmlio.parse_record_xml(xmlio.unwrap_envelope(raw))
            _, cert = broker.publish(record)
        except DuplicateKey as exc:
            return _fault("DuplicateKey", str(exc), 409)
        except (MalformedXML, SchemaViolation, UnknownAttribute, InvalidQoS,
                ValueError) as exc:
            return _fault(type(exc).__name__, str(exc), 400)
        return _ok(xmlio.serialize_certificate(cert))

    @app.post("/discover")
    async def discover(request: Request, debug: bool = False) -> Response:
        raw = (await request.body()).decode("utf-8")
        try:
            query = xmlio.parse_query_xml(xmlio.unwrap_envelope(raw))
            result = broker.discover(query)
        except (MalformedXML, SchemaViolation, UnknownAttribute, WscrError,
                ValueError) as exc:
            return _fault(type(exc).__name__, str(exc), 400)
        return _ok(xmlio.serialize_result(result, debug=debug))

    @app.post("/feedback")
    async def feedback(request: Request) -> Response:
        raw = (await request.body()).decode("utf-8")
        try:
            fb = xmlio.parse_feedback_xml(xmlio.unwrap_envelope(raw))
            count = broker.record_feedback(fb)
        except UnknownService as exc:
            return _fault("UnknownService", str(exc), 404)
        except (MalformedXML, SchemaViolation, InvalidRating, ValueError) as exc:
            return _fault(type(exc).__name__, str(exc), 400)
        return _ok(f'<FeedbackAccepted serviceKey={_xml_attr(fb.service_key)} '
                   f'count="{count}" />')

    @app.get("/services/{service_key}")
    def get_service(service_key: str) -> Response:
        try:
            record = broker.store.get_service(service_key)
        except UnknownService as exc:
            return _fault("UnknownService", str(exc), 404)
        return Response(content=xmlio.serialize_record(record),
                        media_type=MEDIA_XML)

    return app


def _xml_attr(value: str) -> str:
    from xml.sax.saxutils import quoteattr
    return quoteattr(value)


def build_broker(cfg: BrokerConfig) -> Broker:
    store = Store(journal_path=cfg.journal_path)
    if cfg.snapshot_path:
        import os
        if os.path.exists(cfg.snapshot_path):
            store.restore(cfg.snapshot_path)
    ontology: Ontology
    if cfg.ontology_path:
        ontology = load_ontology(cfg.ontology_path)
    else:
        ontology = DEFAULT_ONTOLOGY
    feedback = FeedbackStore(journal_path=cfg.feedback_path)
    return Broker(store, ontology, feedback, tau=cfg.tau, beta=cfg.beta)


def serve(cfg: BrokerConfig) -> None:
    """Run the broker service until interrupted; journals flush on shutdown."""
    import uvicorn

    app = create_app(build_broker(cfg))
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
