"""
Deployment and storage gas of the two registry styles.
"""
from __future__ import annotations

import logging

from ..clock import LogicalClock
from ..contracts import DEFAULT_SCHEDULE, ContractHost, RegistryClient, StorageMode
from ..errors import BenchError
from ..keys import KeyPair
from ..ledger import Genesis, Network
from .reports import GasReport, saving_vs_variables

logger = logging.getLogger(__name__)

OPERATIONS = ("deploy", "store")
# Largest Logs/Variables deployment ratio the registry design allows.
MAX_DEPLOY_RATIO = 0.70


def measure_mode(network, mode, settlor, trustee, twin_id="twin001"):
    """(deploy gas, 3-value store gas) for one storage mode."""
    client = RegistryClient(network, settlor, confirmations=1)
    _, deploy_gas = client.deploy_registry(mode)
    receipt = client.store_trust_hashes(trustee.address, twin_id)
    if not receipt.succeeded:
        raise BenchError(f"{mode.value} store reverted: {receipt.error}")
    return {"deploy": deploy_gas, "store": receipt.gas_used}


def run_gas_bench(modes=None, schedule=DEFAULT_SCHEDULE, seed=0):
    modes = list(modes or StorageMode)
    network = Network(
        Genesis(difficulty=0, node_count=1),
        ContractHost.factory(schedule),
        confirmations=1,
        clock=LogicalClock(),
    )
    settlor = KeyPair.from_seed(f"bench-settlor-{seed}")
    trustee = KeyPair.from_seed(f"bench-trustee-{seed}")
    try:
        measured = {mode: measure_mode(network, mode, settlor, trustee) for mode in modes}
    finally:
        network.shutdown()

    both = StorageMode.VARIABLES in measured and StorageMode.LOGS in measured
    rows = []
    for operation in OPERATIONS:
        for mode in modes:
            saving = None
            if both:
                saving = saving_vs_variables(
                    measured[mode][operation], measured[StorageMode.VARIABLES][operation]
                )
            rows.append(GasReport(mode, operation, measured[mode][operation], saving))
            logger.info("%s %s: %s gas", mode.value, operation, measured[mode][operation])
    return rows


def check_gas_rows(rows):
    """Failed claims, as messages; empty when the Logs registry deploys cheaply enough."""
    gas = {(row.mode, row.operation): row.gas_used for row in rows}
    failures = []
    for operation in OPERATIONS:
        logs = gas.get((StorageMode.LOGS, operation))
        variables = gas.get((StorageMode.VARIABLES, operation))
        if logs is None or variables is None:
            continue
        if logs >= variables:
            failures.append(f"{operation}: Logs {logs} is not below Variables {variables}")
        if operation == "deploy" and logs > MAX_DEPLOY_RATIO * variables:
            failures.append(
                f"deploy: Logs/Variables ratio {logs / variables:.3f} above {MAX_DEPLOY_RATIO}"
            )
    return failures
