from .chain import AddOutcome, Chain, resolve_fork
from .genesis import Genesis
from .network import MessageBus, Network
from .node import Node
from .pow import Accept, Reject, RejectReason, mine_block, verify_block, verify_block_bytes
from .types import (
    Block,
    LogEntry,
    Receipt,
    ReceiptStatus,
    Transaction,
    pack_topic,
    sign_transaction,
)
