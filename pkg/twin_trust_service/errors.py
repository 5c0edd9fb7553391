class TwinTrustError(Exception):
    """Base class for every error raised by the service."""


# Ledger


class LedgerError(TwinTrustError):
    pass


class DecodeError(LedgerError):
    pass


class BadSignature(LedgerError):
    pass


class StaleNonce(LedgerError):
    pass


class NonceGap(LedgerError):
    pass


class UnknownAccount(LedgerError):
    pass


class TooManyTopics(LedgerError):
    pass


class IncompatibleGenesis(LedgerError):
    pass


class MiningCancelled(LedgerError):
    pass


class InvalidBlock(LedgerError):
    def __init__(self, reason, detail=""):
        super().__init__(f"{reason}: {detail}" if detail else str(reason))
        self.reason = reason


# Contracts


class ContractError(TwinTrustError):
    """Raised inside a contract call; the host turns it into a reverted receipt."""


class BadCall(ContractError):
    pass


class UnknownContract(ContractError):
    pass


class NotSettlor(ContractError):
    pass


class InvalidWindow(ContractError):
    pass


class IndexOutOfRange(ContractError):
    pass


class UnknownTwin(ContractError):
    pass


class DuplicateTwin(ContractError):
    pass


class DuplicateTrust(ContractError):
    pass


class NoActiveTrust(ContractError):
    pass


class TextTooLong(ContractError):
    pass


class TransactionReverted(ContractError):
    def __init__(self, receipt):
        super().__init__(f"transaction {receipt.tx_id.hex()} reverted: {receipt.error}")
        self.receipt = receipt


# Gateway


class GatewayError(TwinTrustError):
    pass


class ChainUnreachable(GatewayError):
    pass


class MismatchedTwin(GatewayError):
    pass


class BadCredential(GatewayError):
    pass


class EmptyWindow(GatewayError):
    pass


class WindowTooLarge(GatewayError):
    pass


class PeerUnreachable(GatewayError):
    pass


class ReplyTooLarge(GatewayError):
    pass


class Unauthorized(GatewayError):
    pass


class PortUnavailable(GatewayError):
    pass


class MalformedMessage(GatewayError):
    pass


# Sensors


class SensorError(TwinTrustError):
    pass


class DuplicateId(SensorError):
    pass


class UnknownResource(SensorError):
    pass


class BadWindow(SensorError):
    pass


# Bench


class BenchError(TwinTrustError):
    pass


class IoFailure(BenchError):
    pass
