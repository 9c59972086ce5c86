"""Thin command-line client for the broker service (plus `serve`)."""
from __future__ import annotations

import os
import sys
import xml.etree.ElementTree as ET
from datetime import datetime, timezone

import click

from . import xmlio
from .config import load_config
from .errors import (
    ConfigError,
    EndpointUnreachable,
    InvalidRating,
    RegistryUnreachable,
    WscrError,
)
from .models import Feedback
from .proxy import ProxyClient

DEFAULT_ENDPOINT = "http://127.0.0.1:8080"

EXIT_OK = 0
EXIT_USER = 1
EXIT_TRANSPORT = 2


def _endpoint(override: str | None) -> str:
    return override or os.environ.get("WSCR_ENDPOINT", DEFAULT_ENDPOINT)


def _client(ctx: click.Context) -> ProxyClient:
    return ctx.obj["client"]


@click.group()
@click.option("--endpoint", default=None, metavar="URL",
              help="Broker base URL (default: $WSCR_ENDPOINT or "
                   f"{DEFAULT_ENDPOINT}).")
@click.pass_context
def cli(ctx: click.Context, endpoint: str | None) -> None:
    """QoS-aware service registry client."""
    ctx.ensure_object(dict)
    ctx.obj.setdefault("client", ProxyClient(_endpoint(endpoint)))


@cli.command()
@click.argument("record_file", type=click.File("r"))
@click.pass_context
def publish(ctx: click.Context, record_file) -> None:
    """Publish a service record from an XML file."""
    try:
        status, payload = _client(ctx).publish(record_file.read())
    except RegistryUnreachable as exc:
        _die_transport(exc)
    click.echo(payload)
    if status != 200:
        _fail(payload)
    click.echo("published", err=True)


@cli.command()
@click.argument("query_file", type=click.File("r"))
@click.option("--top", type=int, default=None, help="Show only the top N rows.")
@click.option("--debug-stages", is_flag=True, help="Include per-stage candidate keys.")
@click.pass_context
def discover(ctx: click.Context, query_file, top, debug_stages) -> None:
    """Run a discovery query from an XML file."""
    try:
        query = xmlio.parse_query_xml(query_file.read())
    except WscrError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_USER)
    try:
        payload = _client(ctx).discover(query, debug=debug_stages)
    except RegistryUnreachable as exc:
        _die_transport(exc)
    click.echo(payload)
    _print_result_table(payload, top)


@cli.command()
@click.argument("service_key")
@click.argument("rating", type=int)
@click.option("--consumer", default="cli", help="Consumer id recorded with the rating.")
@click.pass_context
def feedback(ctx: click.Context, service_key: str, rating: int, consumer: str) -> None:
    """Submit a 1-5 rating for a service."""
    if not (1 <= rating <= 5):
        click.echo(str(InvalidRating(rating)), err=True)
        sys.exit(EXIT_USER)
    fb = Feedback(consumer_id=consumer, service_key=service_key, rating=rating,
                  at=datetime.now(timezone.utc))
    try:
        status, payload = _client(ctx).send_feedback(xmlio.serialize_feedback(fb))
    except RegistryUnreachable as exc:
        _die_transport(exc)
    click.echo(payload)
    if status != 200:
        _fail(payload)
    click.echo(f"recorded rating {rating} for {service_key}", err=True)


@cli.command()
@click.argument("service_key")
@click.pass_context
def get(ctx: click.Context, service_key: str) -> None:
    """Fetch a stored service record."""
    try:
        status, payload = _client(ctx).get_service(service_key)
    except RegistryUnreachable as exc:
        _die_transport(exc)
    click.echo(payload)
    if status != 200:
        _fail(payload)


@cli.command()
@click.argument("config_file", type=click.Path(exists=True))
def serve(config_file: str) -> None:
    """Run the broker service from a key=value config file."""
    from .server import serve as run_server

    try:
        cfg = load_config(config_file)
    except ConfigError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_USER)
    try:
        run_server(cfg)
    except OSError as exc:
        click.echo(f"PortInUse: {exc}", err=True)
        sys.exit(EXIT_TRANSPORT)


def _print_result_table(payload: str, top: int | None) -> None:
    try:
        root = ET.fromstring(payload)
    except ET.ParseError:
        return
    if root.tag != "DiscoveryResult":
        return
    services = root.findall("Service")
    click.echo(f"status: {root.get('status')}  matches: {len(services)}", err=True)
    rows = services[:top] if top is not None else services
    if rows:
        click.echo(f"{'rank':>4}  {'key':<20} {'score':>10}  name", err=True)
    for s in rows:
        click.echo(f"{s.get('rank'):>4}  {s.get('key'):<20} "
                   f"{s.get('finalScore'):>10}  {s.get('name')}", err=True)


def _fail(payload: str) -> None:
    try:
        root = ET.fromstring(payload)
        if root.tag == "Fault":
            click.echo(f"{root.get('code')}: {root.text or ''}", err=True)
    except ET.ParseError:
        pass
    sys.exit(EXIT_USER)


def _die_transport(exc: Exception) -> None:
    click.echo(f"transport error: {exc}", err=True)
    sys.exit(EXIT_TRANSPORT)


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.UsageError as exc:
        click.echo(exc.format_message(), err=True)
        click.echo(cli.get_help(click.Context(cli)), err=True)
        return EXIT_USER
    except (RegistryUnreachable, EndpointUnreachable) as exc:
        click.echo(f"transport error: {exc}", err=True)
        return EXIT_TRANSPORT
    except click.Abort:
        return EXIT_USER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
