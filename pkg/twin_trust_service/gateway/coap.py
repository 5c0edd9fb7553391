"""
A small CoAP-shaped datagram protocol for twin-to-twin requests.

Wire layout (big endian)::

    byte 0    version (2 bits) | type (2 bits) | token length (4 bits)
    byte 1    code
    bytes 2-3 message id
    token     0..8 bytes
    path      2-byte length + utf-8
    payload   the rest
"""
from __future__ import annotations

import enum
import itertools
import logging
import secrets
import socket
import socketserver
import struct
import threading
from collections import OrderedDict
from dataclasses import dataclass

from ..errors import MalformedMessage, PeerUnreachable, PortUnavailable

logger = logging.getLogger(__name__)

VERSION = 1
MAX_TOKEN = 8
MAX_DATAGRAM = 65507
_HEADER = struct.Struct(">BBH")
_PATH_LENGTH = struct.Struct(">H")


class MessageType(enum.IntEnum):
    CON = 0
    NON = 1
    ACK = 2
    RST = 3


class Code(enum.IntEnum):
    GET = 0x01
    POST = 0x02
    CONTENT = 0x45
    BAD_REQUEST = 0x80
    UNAUTHORIZED = 0x81
    FORBIDDEN = 0x83
    NOT_FOUND = 0x84
    REQUEST_ENTITY_TOO_LARGE = 0x8D
    INTERNAL_ERROR = 0xA0

    def __str__(self):
        return f"{self.value >> 5}.{self.value & 0x1F:02d}"

    @property
    def is_success(self):
        return self.value >> 5 == 2


@dataclass(frozen=True)
class TwinMessage:
    code: Code
    message_id: int
    token: bytes = b""
    path: str = ""
    payload: bytes = b""
    mtype: MessageType = MessageType.CON

    def __post_init__(self):
        if not 0 <= self.message_id <= 0xFFFF:
            raise MalformedMessage(f"message id {self.message_id} is not 16 bits")
        if len(self.token) > MAX_TOKEN:
            raise MalformedMessage(f"token longer than {MAX_TOKEN} bytes")

    def reply(self, code, payload=b""):
        """Acknowledgement echoing this request's message id and token."""
        return TwinMessage(
            code=code,
            message_id=self.message_id,
            token=self.token,
            path=self.path,
            payload=payload,
            mtype=MessageType.ACK,
        )

    def encode(self):
        path = self.path.encode("utf-8")
        first = (VERSION << 6) | (self.mtype << 4) | len(self.token)
        return b"".join(
            [
                _HEADER.pack(first, self.code, self.message_id),
                self.token,
                _PATH_LENGTH.pack(len(path)),
                path,
                self.payload,
            ]
        )

    @classmethod
    def decode(cls, data):
        try:
            first, code, message_id = _HEADER.unpack_from(data, 0)
            if first >> 6 != VERSION:
                raise MalformedMessage(f"unsupported version {first >> 6}")
            token_length = first & 0x0F
            offset = _HEADER.size
            token = data[offset : offset + token_length]
            offset += token_length
            (path_length,) = _PATH_LENGTH.unpack_from(data, offset)
            offset += _PATH_LENGTH.size
            path = data[offset : offset + path_length]
            if len(token) != token_length or len(path) != path_length:
                raise MalformedMessage("truncated message")
            return cls(
                code=Code(code),
                message_id=message_id,
                token=token,
                path=path.decode("utf-8"),
                payload=data[offset + path_length :],
                mtype=MessageType((first >> 4) & 0x03),
            )
        except (struct.error, ValueError) as e:
            raise MalformedMessage(str(e)) from e


class _DatagramHandler(socketserver.BaseRequestHandler):
    def handle(self):
        data, sock = self.request
        reply = self.server.dispatch(data, self.client_address)
        if reply is not None:
            sock.sendto(reply, self.client_address)


class TwinMessageServer(socketserver.ThreadingUDPServer):
    daemon_threads = True
    allow_reuse_address = False

    def __init__(self, host="127.0.0.1", port=0, dedupe_size=256):
        try:
            super().__init__((host, port), _DatagramHandler)
        except OSError as e:
            raise PortUnavailable(f"cannot listen on {host}:{port}: {e}") from e
        self._routes = {}
        self._replies = OrderedDict()
        self._replies_lock = threading.Lock()
        self._dedupe_size = dedupe_size
        self._thread = None

    @property
    def address(self):
        return self.server_address[:2]

    def add_route(self, path, handler):
        self._routes[path] = handler

    def dispatch(self, data, peer):
        try:
            request = TwinMessage.decode(data)
        except MalformedMessage as e:
            logger.warning("dropping malformed datagram from %s: %s", peer, e)
            return None
        key = (peer, request.message_id)
        with self._replies_lock:
            cached = self._replies.get(key)
        if cached is not None:
            logger.debug("duplicate message %s from %s", request.message_id, peer)
            return cached
        handler = self._routes.get(request.path)
        if handler is None:
            reply = request.reply(Code.NOT_FOUND)
        else:
            try:
                reply = handler(request)
            except Exception:
                logger.exception("handler for %s failed", request.path)
                reply = request.reply(Code.INTERNAL_ERROR)
        encoded = reply.encode()
        if len(encoded) > MAX_DATAGRAM:
            logger.warning(
                "reply to %s on %s is %s bytes, over the %s byte datagram limit",
                peer,
                request.path,
                len(encoded),
                MAX_DATAGRAM,
            )
            encoded = request.reply(Code.REQUEST_ENTITY_TOO_LARGE).encode()
        with self._replies_lock:
            self._replies[key] = encoded
            while len(self._replies) > self._dedupe_size:
                self._replies.popitem(last=False)
        return encoded

    def start(self):
        self._thread = threading.Thread(
            target=self.serve_forever, name=f"coap-{self.address[1]}", daemon=True
        )
        self._thread.start()
        logger.info("listening for twin messages on %s:%s", *self.address)
        return self

    def stop(self):
        if self._thread is not None:
            self.shutdown()
            self._thread.join()
            self._thread = None
        self.server_close()


class TwinMessageClient:
    """Confirmable requests; unanswered ones are resent with doubling timeouts."""

    def __init__(self, ack_timeout=0.5, max_retransmit=3):
        self.ack_timeout = ack_timeout
        self.max_retransmit = max_retransmit
        self._ids = itertools.count(secrets.randbelow(0x10000))
        self._ids_lock = threading.Lock()

    def _next_id(self):
        with self._ids_lock:
            return next(self._ids) & 0xFFFF

    def request(self, peer, code, path, payload=b""):
        message = TwinMessage(
            code=code,
            message_id=self._next_id(),
            token=secrets.token_bytes(4),
            path=path,
            payload=payload,
        )
        return self.exchange(peer, message)

    def exchange(self, peer, message):
        data = message.encode()
        timeout = self.ack_timeout
        with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
            for attempt in range(self.max_retransmit + 1):
                if attempt:
                    logger.debug(
                        "retransmit %s of message %s to %s", attempt, message.message_id, peer
                    )
                try:
                    sock.sendto(data, peer)
                    reply = self._await_reply(sock, message, timeout)
                except OSError as e:
                    logger.debug("exchange with %s failed: %s", peer, e)
                    reply = None
                if reply is not None:
                    return reply
                timeout *= 2
        raise PeerUnreachable(
            f"no reply from {peer[0]}:{peer[1]} after {self.max_retransmit} retransmits"
        )

    def _await_reply(self, sock, message, timeout):
        sock.settimeout(timeout)
        while True:
            try:
                data, _ = sock.recvfrom(MAX_DATAGRAM)
            except socket.timeout:
                return None
            try:
                reply = TwinMessage.decode(data)
            except MalformedMessage:
                continue
            if reply.message_id == message.message_id and reply.token == message.token:
                return reply
