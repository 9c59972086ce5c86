"""Consumer-side service proxy: discovery caching, local method
execution, remote invocation, with exact network-call accounting.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import httpx

from . import xmlio
from .errors import EndpointUnreachable, RegistryUnreachable, UnknownMethod
from .models import DiscoveryQuery


@dataclass(frozen=True)
class MethodSignature:
    name: str
    params: tuple[str, ...]
    local_capable: bool = False


@dataclass(frozen=True)
class ServiceContract:
    service_key: str
    name: str
    methods: tuple[MethodSignature, ...]
    endpoint: str

    def method(self, name: str) -> MethodSignature:
        for m in self.methods:
            if m.name == name:
                return m
        raise UnknownMethod(name)


class HttpxTransport:
    """Default transport; tests may substitute any object with the same
    request() signature."""

    def __init__(self, client: Optional[httpx.Client] = None):
        self._client = client or httpx.Client(timeout=10.0)

    def request(self, method: str, url: str, body: Optional[str] = None) -> tuple[int, str]:
        try:
            resp = self._client.request(
                method, url, content=body,
                headers={"content-type": "application/xml"} if body else None)
        except httpx.TransportError as exc:
            raise ConnectionError(str(exc)) from exc
        return resp.status_code, resp.text


def query_fingerprint(query: DiscoveryQuery) -> str:
    return hashlib.sha256(xmlio.serialize_query(query).encode("utf-8")).hexdigest()


def _tip_calculator(amount: float, rate: float) -> float:
    return amount * rate


LOCAL_METHODS = {
    "tip_calculator": _tip_calculator,
    # currency_convert is special-cased: it needs a one-shot rate table
}


@dataclass
class _CacheEntry:
    payload: str
    fetched_at: float


class ProxyClient:
    """Caches discovery results and service contracts; executes data-free
    methods locally; counts every network request it issues."""

    def __init__(self, endpoint: str, transport=None, ttl: float = 60.0,
                 clock: Callable[[], float] = time.monotonic):
        self.endpoint = endpoint.rstrip("/")
        self.ttl = ttl
        self.network_calls = 0
        self._transport = transport or HttpxTransport()
        self._clock = clock
        self._results: dict[str, _CacheEntry] = {}
        self._contracts: dict[str, ServiceContract] = {}
        self._rate_tables: dict[str, dict[str, float]] = {}

    # -- transport ------------------------------------------------------

    def _send(self, method: str, url: str, body: Optional[str] = None,
              unreachable=RegistryUnreachable) -> tuple[int, str]:
        self.network_calls += 1
        try:
            return self._transport.request(method, url, body)
        except ConnectionError as exc:
            raise unreachable(str(exc)) from exc

    # -- registry operations -------------------------------------------

    def discover(self, query: DiscoveryQuery, debug: bool = False) -> str:
        """Remote discovery; returns the DiscoveryResult payload XML."""
        url = f"{self.endpoint}/discover" + ("?debug=true" if debug else "")
        status, body = self._send("POST", url, xmlio.wrap_envelope(xmlio.serialize_query(query)))
        payload = xmlio.unwrap_envelope(body)
        if status != 200:
            raise RegistryUnreachable(f"discover failed ({status}): {payload}")
        return payload

    def discover_cached(self, query: DiscoveryQuery) -> tuple[str, bool]:
        """Serve from cache within ttl; on a miss go remote and store.
        A hit issues zero network requests."""
        fp = query_fingerprint(query)
        entry = self._results.get(fp)
        now = self._clock()
        if entry is not None and (now - entry.fetched_at) < self.ttl:
            return entry.payload, True
        payload = self.discover(query)
        self._results[fp] = _CacheEntry(payload=payload, fetched_at=now)
        return payload, False

    def publish(self, record_xml: str) -> tuple[int, str]:
        status, body = self._send("POST", f"{self.endpoint}/publish",
                                  xmlio.wrap_envelope(record_xml))
        return status, xmlio.unwrap_envelope(body)

    def get_service(self, service_key: str) -> tuple[int, str]:
        status, body = self._send("GET", f"{self.endpoint}/services/{service_key}")
        return status, xmlio.unwrap_envelope(body)

    def send_feedback(self, feedback_xml: str) -> tuple[int, str]:
        status, body = self._send("POST", f"{self.endpoint}/feedback",
                                  xmlio.wrap_envelope(feedback_xml))
        return status, xmlio.unwrap_envelope(body)

    # -- contracts and invocation --------------------------------------

    def register_contract(self, contract: ServiceContract) -> None:
        self._contracts[contract.service_key] = contract

    def contract_for(self, service_key: str) -> ServiceContract:
        return self._contracts[service_key]

    def invoke(self, contract: ServiceContract, method: str, **args):
        """Execute a contract method: locally when the contract marks it
        local-capable and the proxy knows how, remotely otherwise."""
        sig = contract.method(method)
        if sig.local_capable:
            if method == "currency_convert":
                return self._currency_convert(contract, **args)
            impl = LOCAL_METHODS.get(method)
            if impl is not None:
                return impl(**args)
        return self._invoke_remote(contract, method, args)

    def _currency_convert(self, contract: ServiceContract, amount: float,
                          source: str, target: str) -> float:
        # rate table is fetched once per contract and reused thereafter
        rates = self._rate_tables.get(contract.service_key)
        if rates is None:
            status, body = self._send("GET", f"{contract.endpoint}/rates",
                                      unreachable=EndpointUnreachable)
            if status != 200:
                raise EndpointUnreachable(f"rate table fetch failed ({status})")
            rates = {k: float(v) for k, v in json.loads(body).items()}
            self._rate_tables[contract.service_key] = rates
        return amount * rates[target] / rates[source]

    def _invoke_remote(self, contract: ServiceContract, method: str, args: dict):
        arg_elems = "".join(
            f'<Arg name="{name}" value="{args[name]}" />' for name in sorted(args))
        body = f'<Invoke method="{method}">{arg_elems}</Invoke>'
        status, text = self._send("POST", f"{contract.endpoint}/invoke",
                                  xmlio.wrap_envelope(body),
                                  unreachable=EndpointUnreachable)
        if status != 200:
            raise EndpointUnreachable(f"invoke failed ({status}): {text}")
        return xmlio.unwrap_envelope(text)
