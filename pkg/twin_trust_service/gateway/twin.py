"""
The digital twin runtime. Third parties and peer twins only ever reach the
sensor through one of these instances.
"""
from __future__ import annotations

import json
import logging

from ..contracts.types import ViewFormat
from ..errors import (
    EmptyWindow,
    GatewayError,
    MalformedMessage,
    MismatchedTwin,
    BadCredential,
    PeerUnreachable,
    ReplyTooLarge,
    Unauthorized,
    UnknownTwin,
    WindowTooLarge,
)
from .chain_client import ConfigCache
from .coap import Code, TwinMessageClient, TwinMessageServer
from .credentials import CredentialVerifier, TrusteeCredential
from .views import DataViewPayload, build_payload

logger = logging.getLogger(__name__)

TALK_TO_DT = "/coap_api/talk_to_dt"
TALK_TO_BC = "/http_api/talk_to_bc"
TALK_TO_THIRD_PARTY = "/http_api/talk_to_third_party"

# Most samples a single view may hold; larger windows are refused.
MAX_VIEW_SAMPLES = 10_000


class TwinInstance:
    def __init__(
        self,
        twin_id,
        chain_client,
        fleet,
        resource_id,
        clock,
        cache_ttl=10,
        replay_window=60,
        peers=None,
        message_client=None,
        keypair=None,
    ):
        self.twin_id = twin_id
        self.chain = chain_client
        self.fleet = fleet
        self.resource_id = resource_id
        self.clock = clock
        self.cache = ConfigCache(chain_client, clock, ttl=cache_ttl)
        self.verifier = CredentialVerifier(clock, replay_window=replay_window)
        self.peers = dict(peers or {})
        self.messages = message_client or TwinMessageClient()
        self.keypair = keypair
        self.server = None

    def __repr__(self):
        return f"TwinInstance({self.twin_id!r}, resource={self.resource_id!r})"

    @property
    def config(self):
        return self.cache.get(self.twin_id)

    @property
    def coap_address(self):
        return self.server.address if self.server is not None else None

    def endpoints(self):
        host, port = self.coap_address or ("", 0)
        return {
            "talk_to_dt": f"coap://{host}:{port}{TALK_TO_DT}",
            "talk_to_bc": TALK_TO_BC,
            "talk_to_third_party": TALK_TO_THIRD_PARTY,
        }

    def start(self, host="127.0.0.1", port=0):
        """Fetch the on-chain config, then listen for peer twins."""
        self.fleet.get(self.resource_id)
        config = self.config
        self.server = TwinMessageServer(host, port)
        self.server.add_route(TALK_TO_DT, self.handle_twin_message)
        self.server.start()
        logger.info(
            "twin %s started for settlor %s over resource %s",
            self.twin_id,
            config.twin_settlor.hex[:12],
            self.resource_id,
        )
        return self

    def stop(self):
        if self.server is not None:
            self.server.stop()
            self.server = None

    # Views

    def _window(self, config, start, end):
        lo = config.streaming_start if start is None else max(int(start), config.streaming_start)
        hi = min(config.streaming_end, self.clock.now())
        if end is not None:
            hi = min(hi, int(end))
        if lo > hi:
            raise EmptyWindow(f"no part of [{start}, {end}] is open for {config.twin_id}")
        return lo, hi

    def view(self, config, start=None, end=None):
        """
        Render ``config``'s data view. Samples sit on the view period counted
        from ``streaming_start``, so a view is the same whatever ``start`` a
        caller asks for.
        """
        lo, hi = self._window(config, start, end)
        period = config.streaming_view.streaming_period
        if not config.streaming_view.active:
            return build_payload(config.twin_id, [], config.streaming_view, lo, hi)
        anchor = config.streaming_start
        first = anchor + -(-(lo - anchor) // period) * period
        if first <= hi and (hi - first) // period + 1 > MAX_VIEW_SAMPLES:
            raise WindowTooLarge(
                f"[{lo}, {hi}] holds more than {MAX_VIEW_SAMPLES} samples of {config.twin_id}"
            )
        timestamps = range(first, hi + 1, period)
        samples = self.fleet.read_at(self.resource_id, timestamps)
        return build_payload(config.twin_id, samples, config.streaming_view, lo, hi, anchor)

    def handle_third_party_request(self, credential, start=None, end=None):
        """A rendered view for a granted trustee, the Deny otherwise."""
        trustee = self.verifier.verify(credential, self.twin_id)
        decision = self.chain.validate_access(trustee, self.twin_id, self.clock.now())
        if not decision.granted:
            logger.info("[DENY] %s for %s: %s", self.twin_id, trustee.hex[:12], decision.reason.value)
            return decision
        if decision.config.twin_id != self.twin_id:
            raise MismatchedTwin(f"grant names {decision.config.twin_id}, not {self.twin_id}")
        payload = self.view(decision.config, start, end)
        logger.info(
            "[GRANT] %s for %s: %s samples", self.twin_id, trustee.hex[:12], len(payload.samples)
        )
        return payload

    def talk_to_bc(self, credential):
        """The cached config, for its settlor only."""
        caller = self.verifier.verify(credential, self.twin_id)
        config = self.config
        if caller != config.twin_settlor:
            raise Unauthorized(f"{caller.hex[:12]} is not the settlor of {self.twin_id}")
        return config

    # Twin to twin

    def authorize_peer(self, peer_twin_id, signer):
        """
        A peer twin may read this one if ``signer`` settles it and the two
        twins share a settlor or a trust links them.
        """
        own = self.config
        try:
            peer = self.cache.get(peer_twin_id)
        except UnknownTwin:
            return False
        if peer.twin_settlor != signer:
            return False
        if peer.twin_settlor == own.twin_settlor:
            return True
        return self.chain.validate_access(peer.twin_settlor, self.twin_id, self.clock.now()).granted

    def handle_twin_message(self, request):
        """
        Peer requests carry a credential for this twin signed by the peer's
        settlor; requests without a valid one are answered 4.01.
        """
        if request.code != Code.GET:
            return request.reply(Code.BAD_REQUEST)
        try:
            body = json.loads(request.payload or b"{}")
            peer_twin_id = body["twin_id"]
        except (ValueError, KeyError, TypeError):
            return request.reply(Code.BAD_REQUEST)
        try:
            credential = TrusteeCredential.from_headers(body.get("credential"))
            signer = self.verifier.verify(credential, self.twin_id)
        except BadCredential as e:
            logger.info("[DENY] %s for peer twin %s: %s", self.twin_id, peer_twin_id, e)
            return request.reply(Code.UNAUTHORIZED)
        if not self.authorize_peer(peer_twin_id, signer):
            logger.info("[DENY] %s for peer twin %s", self.twin_id, peer_twin_id)
            return request.reply(Code.UNAUTHORIZED)
        try:
            views = [self.view(self.config, body.get("from"), body.get("to"))]
        except EmptyWindow:
            return request.reply(Code.BAD_REQUEST)
        except WindowTooLarge:
            return request.reply(Code.REQUEST_ENTITY_TOO_LARGE)
        if body.get("composite"):
            for other in sorted(self.peers):
                if other == peer_twin_id:
                    continue
                try:
                    views.extend(self.twin_to_twin(other, body.get("from"), body.get("to")))
                except GatewayError as e:
                    logger.warning("composite view skips %s: %s", other, e)
        logger.info("[GRANT] %s for peer twin %s: %s views", self.twin_id, peer_twin_id, len(views))
        return request.reply(Code.CONTENT, encode_views(views))

    def twin_to_twin(self, peer_twin_id, start=None, end=None, composite=False):
        """Ask a peer twin for its view; returns the peer's views."""
        try:
            peer = self.peers[peer_twin_id]
        except KeyError:
            raise PeerUnreachable(f"no endpoint known for {peer_twin_id}") from None
        if self.keypair is None:
            raise Unauthorized(f"{self.twin_id} holds no settlor key to sign peer requests")
        credential = TrusteeCredential.issue(self.keypair, peer_twin_id, self.clock.now())
        body = {
            "twin_id": self.twin_id,
            "from": start,
            "to": end,
            "composite": composite,
            "credential": credential.to_headers(),
        }
        reply = self.messages.request(
            tuple(peer), Code.GET, TALK_TO_DT, json.dumps(body).encode()
        )
        if reply.code == Code.UNAUTHORIZED:
            raise Unauthorized(f"{peer_twin_id} refused {self.twin_id}")
        if reply.code == Code.REQUEST_ENTITY_TOO_LARGE:
            raise ReplyTooLarge(f"{peer_twin_id} cannot fit the view in one message; narrow the window")
        if not reply.code.is_success:
            raise GatewayError(f"{peer_twin_id} answered {reply.code}")
        return decode_views(reply.payload)


def encode_views(views):
    return json.dumps(
        {
            "views": [
                {
                    "twin_id": view.twin_id,
                    "format": view.view_format.value,
                    "body": view.render().decode("utf-8"),
                }
                for view in views
            ]
        }
    ).encode()


def decode_views(payload):
    try:
        entries = json.loads(payload)["views"]
        return [
            DataViewPayload.parse(entry["body"].encode("utf-8"), ViewFormat(entry["format"]))
            for entry in entries
        ]
    except (ValueError, KeyError, TypeError) as e:
        raise MalformedMessage(f"bad views payload: {e}") from e


def start_twin(twin_id, chain_client, fleet, resource_id, clock, host="127.0.0.1", port=0, **options):
    """A running instance for ``twin_id``; raises UnknownTwin or PortUnavailable."""
    return TwinInstance(twin_id, chain_client, fleet, resource_id, clock, **options).start(host, port)
