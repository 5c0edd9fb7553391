from .client import RegistryClient, RegistryReader, twin_index
from .definitions import definition_size
from .gas import DEFAULT_SCHEDULE, GasMeter, GasSchedule, OpKind, charge
from .host import ContractHost
from .registry import LogsRegistry, VariablesRegistry, make_registry
from .types import (
    DataView,
    Deny,
    DenyReason,
    DigitalTwinConfig,
    Grant,
    StorageMode,
    TrustStructure,
    ViewFormat,
)
