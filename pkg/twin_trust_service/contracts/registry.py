"""
The digital twin registry and its trust structures, in both storage modes.

Every operation validates first and writes last, so a call that raises leaves
the registry untouched.
"""
from __future__ import annotations

from ..encoding import encode_fields, hash256
from ..errors import (
    BadCall,
    DuplicateTrust,
    DuplicateTwin,
    IndexOutOfRange,
    NoActiveTrust,
    NotSettlor,
    UnknownTwin,
)
from ..keys import Address
from ..ledger.types import LogEntry, pack_topic
from . import codec
from .definitions import (
    ACCESS_REGISTRATION,
    ACCESS_REVOCATION,
    PROPERTY_TRANSFER,
    TWIN_REGISTRATION,
)
from .gas import OpKind
from .storage import (
    WORD,
    ZERO_WORD,
    SlotStorage,
    slot_key,
    text_word,
    uint_word,
    view_word,
    word_text,
    word_uint,
    word_view,
)
from .types import (
    Deny,
    DenyReason,
    DigitalTwinConfig,
    Grant,
    StorageMode,
    TrustStructure,
)


class TwinRegistry:
    mode = None

    def __init__(self, address):
        self.address = address
        self._index = {}

    # Storage hooks

    def __len__(self):
        return len(self._index)

    def _config(self, index):
        raise NotImplementedError

    def _trust(self, settlor, twin_id):
        raise NotImplementedError

    def _put_twin(self, index, config, meter):
        raise NotImplementedError

    def _put_trust(self, trust, meter):
        raise NotImplementedError

    def _move_trust(self, trust, index, new_trustee, meter):
        raise NotImplementedError

    def _drop_trust(self, trust, meter):
        raise NotImplementedError

    def _put_hashes(self, settlor, trustee, twin_id, meter):
        raise NotImplementedError

    def active_trusts(self):
        raise NotImplementedError

    def state_root(self):
        raise NotImplementedError

    # Calls

    def execute(self, caller, call, meter):
        """Run a decoded call; returns ``(output, logs)``."""
        if isinstance(call, codec.SetDigitalTwin):
            return self.set_digital_twin(caller, call.config, meter)
        if isinstance(call, codec.RegisterTrust):
            return self.register_trust(caller, call.settlor, call.trustee, call.twin_id, meter)
        if isinstance(call, codec.TransferProperty):
            return self.transfer_property(
                caller, call.settlor, call.twin_id, call.new_trustee, meter
            )
        if isinstance(call, codec.RevokeTrust):
            return self.revoke_trust(caller, call.settlor, call.twin_id, meter)
        if isinstance(call, codec.StoreTrustHashes):
            return self.store_trust_hashes(
                caller, call.settlor, call.trustee, call.twin_id, meter
            )
        raise BadCall(f"unsupported call {call!r}")

    def set_digital_twin(self, caller, config, meter):
        if caller != config.twin_settlor:
            raise NotSettlor("only the settlor registers its twins")
        config.validate()
        text_word(config.twin_id)
        if config.twin_id in self._index:
            raise DuplicateTwin(config.twin_id)
        index = len(self._index)
        logs = self._put_twin(index, config, meter)
        self._index[config.twin_id] = index
        return encode_fields(index), logs

    def register_trust(self, caller, settlor, trustee, twin_id, meter):
        config = self._settled_twin(caller, settlor, twin_id)
        if settlor == trustee:
            raise BadCall("a settlor cannot be its own trustee")
        if self._trust(config.twin_settlor, twin_id) is not None:
            raise DuplicateTrust(f"{twin_id} already has an active trustee")
        logs = self._put_trust(TrustStructure(twin_id, settlor, trustee), meter)
        return b"", logs

    def transfer_property(self, caller, settlor, twin_id, new_trustee, meter):
        self._settled_twin(caller, settlor, twin_id)
        trust = self._trust(settlor, twin_id)
        if trust is None:
            raise NoActiveTrust(twin_id)
        if new_trustee == settlor:
            raise BadCall("a settlor cannot be its own trustee")
        logs = self._move_trust(trust, self._index[twin_id], new_trustee, meter)
        return b"", logs

    def revoke_trust(self, caller, settlor, twin_id, meter):
        self._settled_twin(caller, settlor, twin_id)
        trust = self._trust(settlor, twin_id)
        if trust is None:
            raise NoActiveTrust(twin_id)
        return b"", self._drop_trust(trust, meter)

    def store_trust_hashes(self, caller, settlor, trustee, twin_id, meter):
        if caller != settlor:
            raise NotSettlor("only the settlor stores its trust records")
        return b"", self._put_hashes(settlor, trustee, twin_id, meter)

    def _settled_twin(self, caller, settlor, twin_id):
        index = self._index.get(twin_id)
        if index is None:
            raise UnknownTwin(twin_id)
        config = self._config(index)
        if caller != settlor or config.twin_settlor != settlor:
            raise NotSettlor(f"{caller.hex} does not settle {twin_id}")
        return config

    # Reads

    def get_digital_twin(self, caller, index):
        if index < 0 or index >= len(self._index):
            raise IndexOutOfRange(f"index {index} of {len(self._index)}")
        config = self._config(index)
        if config.twin_settlor != caller:
            raise NotSettlor("only the settlor reads a twin from the registry")
        return config

    def lookup_twin(self, twin_id):
        index = self._index.get(twin_id)
        if index is None:
            raise UnknownTwin(twin_id)
        return self._config(index)

    def configs(self):
        return [self._config(index) for index in range(len(self._index))]

    def validate_access(self, trustee, twin_id, now):
        index = self._index.get(twin_id)
        if index is None:
            return Deny(DenyReason.NO_TRUST)
        config = self._config(index)
        trust = self._trust(config.twin_settlor, twin_id)
        if trust is None or trust.t_trustee != trustee:
            return Deny(DenyReason.NO_TRUST)
        if config.twin_trustee != trustee:
            return Deny(DenyReason.WRONG_TRUSTEE)
        if not config.streaming_start <= now <= config.streaming_end:
            return Deny(DenyReason.WINDOW_CLOSED)
        return Grant(config)


class VariablesRegistry(TwinRegistry):
    """Configs and trusts in contract state slots, one slot per field."""

    mode = StorageMode.VARIABLES

    def __init__(self, address):
        super().__init__(address)
        self._storage = SlotStorage()
        self._records = 0

    def _config(self, index):
        load = self._storage.load
        return DigitalTwinConfig(
            twin_id=word_text(load(slot_key("twin", index, 0))),
            twin_settlor=Address(load(slot_key("twin", index, 1))),
            twin_trustee=Address(load(slot_key("twin", index, 2))),
            streaming_start=word_uint(load(slot_key("twin", index, 3))),
            streaming_end=word_uint(load(slot_key("twin", index, 4))),
            streaming_view=word_view(load(slot_key("twin", index, 5))),
        )

    def _trust_keys(self, settlor, twin_id):
        return [slot_key("trust", settlor, twin_id, field) for field in range(3)]

    def _trust(self, settlor, twin_id):
        twin_key, settlor_key, trustee_key = self._trust_keys(settlor, twin_id)
        trustee = self._storage.load(trustee_key)
        if trustee == ZERO_WORD:
            return None
        return TrustStructure(
            word_text(self._storage.load(twin_key)),
            Address(self._storage.load(settlor_key)),
            Address(trustee),
        )

    def _put_twin(self, index, config, meter):
        words = (
            text_word(config.twin_id),
            config.twin_settlor.digest,
            config.twin_trustee.digest,
            uint_word(config.streaming_start),
            uint_word(config.streaming_end),
            view_word(config.streaming_view),
        )
        self._storage.commit(
            [(slot_key("twin", index, field), word) for field, word in enumerate(words)],
            meter,
        )
        return ()

    def _put_trust(self, trust, meter):
        keys = self._trust_keys(trust.t_settlor, trust.twin)
        words = (text_word(trust.twin), trust.t_settlor.digest, trust.t_trustee.digest)
        self._storage.commit(list(zip(keys, words)), meter)
        return ()

    def _move_trust(self, trust, index, new_trustee, meter):
        trustee_key = self._trust_keys(trust.t_settlor, trust.twin)[2]
        self._storage.commit(
            [
                (trustee_key, new_trustee.digest),
                (slot_key("twin", index, 2), new_trustee.digest),
            ],
            meter,
        )
        return ()

    def _drop_trust(self, trust, meter):
        keys = self._trust_keys(trust.t_settlor, trust.twin)
        self._storage.commit([(key, ZERO_WORD) for key in keys], meter)
        return ()

    def _put_hashes(self, settlor, trustee, twin_id, meter):
        words = (settlor.digest, trustee.digest, pack_topic(twin_id))
        self._storage.commit(
            [(slot_key("record", self._records, field), word) for field, word in enumerate(words)],
            meter,
        )
        self._records += 1
        return ()

    def active_trusts(self):
        trusts = set()
        for config in self.configs():
            trust = self._trust(config.twin_settlor, config.twin_id)
            if trust is not None:
                trusts.add(trust)
        return trusts

    def state_root(self):
        return hash256(
            encode_fields(
                self.mode.value, len(self._index), self._records, self._storage.root()
            )
        )


class LogsRegistry(TwinRegistry):
    """
    Nothing in contract state: every change is an event. The registry keeps
    a fold of its own events, which ``from_logs`` rebuilds from a log query.
    """

    mode = StorageMode.LOGS

    def __init__(self, address):
        super().__init__(address)
        self._twins = []
        self._trusts = {}
        self._records = 0

    @classmethod
    def from_logs(cls, address, entries):
        registry = cls(address)
        for entry in entries:
            if entry.emitter == address:
                registry.apply_event(entry)
        return registry

    def _config(self, index):
        return self._twins[index]

    def _trust(self, settlor, twin_id):
        return self._trusts.get((settlor, twin_id))

    def _emit(self, topics, data, meter):
        entry = LogEntry(self.address, tuple(topics), data)
        meter.charge(OpKind.LOG, (len(entry.topics), len(entry.data)))
        self.apply_event(entry)
        return (entry,)

    def _access_event(self, declaration, twin_id, settlor, trustee, meter):
        return self._emit(
            (declaration.topic, settlor.digest, trustee.digest), text_word(twin_id), meter
        )

    def _put_twin(self, index, config, meter):
        data = b"".join(
            (
                text_word(config.twin_id),
                uint_word(config.streaming_start),
                uint_word(config.streaming_end),
                view_word(config.streaming_view),
            )
        )
        return self._emit(
            (TWIN_REGISTRATION.topic, config.twin_settlor.digest, config.twin_trustee.digest),
            data,
            meter,
        )

    def _put_trust(self, trust, meter):
        return self._access_event(
            ACCESS_REGISTRATION, trust.twin, trust.t_settlor, trust.t_trustee, meter
        )

    def _move_trust(self, trust, index, new_trustee, meter):
        return self._access_event(
            PROPERTY_TRANSFER, trust.twin, trust.t_settlor, new_trustee, meter
        )

    def _drop_trust(self, trust, meter):
        return self._access_event(
            ACCESS_REVOCATION, trust.twin, trust.t_settlor, trust.t_trustee, meter
        )

    def _put_hashes(self, settlor, trustee, twin_id, meter):
        return self._emit((settlor.digest, trustee.digest, pack_topic(twin_id)), b"", meter)

    def apply_event(self, entry):
        topics = entry.topics
        signature = topics[0] if topics else None
        if signature == TWIN_REGISTRATION.topic:
            words = [entry.data[i : i + WORD] for i in range(0, len(entry.data), WORD)]
            config = DigitalTwinConfig(
                twin_id=word_text(words[0]),
                twin_settlor=Address(topics[1]),
                twin_trustee=Address(topics[2]),
                streaming_start=word_uint(words[1]),
                streaming_end=word_uint(words[2]),
                streaming_view=word_view(words[3]),
            )
            self._index[config.twin_id] = len(self._twins)
            self._twins.append(config)
        elif signature == ACCESS_REGISTRATION.topic:
            trust = TrustStructure(word_text(entry.data), Address(topics[1]), Address(topics[2]))
            self._trusts[(trust.t_settlor, trust.twin)] = trust
        elif signature == PROPERTY_TRANSFER.topic:
            twin_id = word_text(entry.data)
            settlor, new_trustee = Address(topics[1]), Address(topics[2])
            self._trusts[(settlor, twin_id)] = TrustStructure(twin_id, settlor, new_trustee)
            index = self._index[twin_id]
            self._twins[index] = self._twins[index].with_trustee(new_trustee)
        elif signature == ACCESS_REVOCATION.topic:
            self._trusts.pop((Address(topics[1]), word_text(entry.data)), None)
        else:
            self._records += 1

    def active_trusts(self):
        return set(self._trusts.values())

    def state_root(self):
        twins = [
            field
            for config in self._twins
            for field in (
                config.twin_id,
                config.twin_settlor,
                config.twin_trustee,
                config.streaming_start,
                config.streaming_end,
                view_word(config.streaming_view),
            )
        ]
        trusts = [
            field
            for trust in sorted(self._trusts.values(), key=lambda t: (t.t_settlor, t.twin))
            for field in (trust.twin, trust.t_settlor, trust.t_trustee)
        ]
        return hash256(
            encode_fields(self.mode.value, self._records, len(self._twins), *twins, *trusts)
        )


REGISTRIES = {
    StorageMode.VARIABLES: VariablesRegistry,
    StorageMode.LOGS: LogsRegistry,
}


def make_registry(mode, address):
    return REGISTRIES[StorageMode(mode)](address)
