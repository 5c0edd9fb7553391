"""
How a twin reaches the registry: in-process through a node, or over the
chain node HTTP API. Configs are cached for a bounded time.
"""
from __future__ import annotations

import logging
import threading

import requests

from ..contracts.types import Deny, DenyReason, DigitalTwinConfig, Grant
from ..errors import ChainUnreachable, LedgerError, MismatchedTwin, UnknownContract, UnknownTwin

logger = logging.getLogger(__name__)


class LocalChainClient:
    def __init__(self, reader, confirmations=3):
        self.reader = reader
        self.confirmations = confirmations

    def lookup_twin(self, twin_id):
        try:
            return self.reader.lookup_twin(twin_id, self.confirmations)
        except UnknownContract as e:
            raise ChainUnreachable(str(e)) from e

    def validate_access(self, trustee, twin_id, now):
        try:
            return self.reader.validate_access(trustee, twin_id, now, self.confirmations)
        except UnknownContract as e:
            raise ChainUnreachable(str(e)) from e


class HttpChainClient:
    def __init__(self, base_url, confirmations=3, timeout=5, session=None):
        self.base_url = base_url.rstrip("/")
        self.confirmations = confirmations
        self.timeout = timeout
        self.session = session or requests.Session()

    def _get(self, path, params):
        try:
            response = self.session.get(
                f"{self.base_url}{path}", params=params, timeout=self.timeout
            )
        except requests.RequestException as e:
            raise ChainUnreachable(f"{self.base_url}: {e}") from e
        if response.status_code >= 500:
            raise ChainUnreachable(f"{self.base_url}{path} answered {response.status_code}")
        return response

    def lookup_twin(self, twin_id):
        response = self._get(f"/twins/{twin_id}", {"confirmations": self.confirmations})
        if response.status_code == 404:
            raise UnknownTwin(twin_id)
        resp_json = response.json()
        self.check_response(resp_json, "config")
        return DigitalTwinConfig.from_dict(resp_json["config"])

    def validate_access(self, trustee, twin_id, now):
        response = self._get(
            "/access",
            {
                "trustee": trustee.hex,
                "twin_id": twin_id,
                "now": now,
                "confirmations": self.confirmations,
            },
        )
        resp_json = response.json()
        self.check_response(resp_json, "granted")
        if resp_json["granted"]:
            self.check_response(resp_json, "config")
            return Grant(DigitalTwinConfig.from_dict(resp_json["config"]))
        return Deny(DenyReason(resp_json["reason"]))

    def next_nonce(self, address):
        resp_json = self._get(f"/accounts/{address.hex}/nonce", {}).json()
        self.check_response(resp_json, "next_nonce")
        return resp_json["next_nonce"]

    def submit_transaction(self, tx):
        try:
            response = self.session.post(
                f"{self.base_url}/transactions",
                json={"transaction": tx.to_dict()},
                timeout=self.timeout,
            )
        except requests.RequestException as e:
            raise ChainUnreachable(f"{self.base_url}: {e}") from e
        resp_json = response.json()
        if response.status_code != 200:
            raise LedgerError(resp_json.get("message", f"rejected with {response.status_code}"))
        self.check_response(resp_json, "tx_id")
        return bytes.fromhex(resp_json["tx_id"])

    def check_response(self, resp, key):
        if not isinstance(resp, dict) or key not in resp:
            raise ChainUnreachable(f"chain node response lacks {key!r}")


class ConfigCache:
    """
    Twin configs with a freshness TTL. An expired entry is refetched once;
    concurrent readers wait for that fetch and share its result.
    """

    def __init__(self, client, clock, ttl=10):
        self.client = client
        self.clock = clock
        self.ttl = ttl
        self._entries = {}
        self._fetch_lock = threading.Lock()

    def _fresh(self, twin_id):
        entry = self._entries.get(twin_id)
        if entry is not None and self.clock.now() - entry[1] < self.ttl:
            return entry[0]
        return None

    def get(self, twin_id):
        config = self._fresh(twin_id)
        if config is not None:
            logger.debug("[HIT] config %s", twin_id)
            return config
        with self._fetch_lock:
            config = self._fresh(twin_id)
            if config is not None:
                logger.debug("[HIT] config %s after waiting", twin_id)
                return config
            logger.info("[MISS] fetching config %s", twin_id)
            config = self.fetch_config(twin_id)
            self._entries[twin_id] = (config, self.clock.now())
            return config

    def fetch_config(self, twin_id):
        """Fetch from the chain and check the record is the twin asked for."""
        config = self.client.lookup_twin(twin_id)
        if config.twin_id != twin_id:
            raise MismatchedTwin(f"asked for {twin_id}, chain returned {config.twin_id}")
        return config

    def invalidate(self, twin_id=None):
        if twin_id is None:
            self._entries.clear()
        else:
            self._entries.pop(twin_id, None)
