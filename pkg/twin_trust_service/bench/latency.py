"""
Twin-creation latency: wall-clock time from the first submission until every
``set_digital_twin`` transaction has the wanted confirmations.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor

from ..contracts import (
    DEFAULT_SCHEDULE,
    ContractHost,
    DataView,
    DigitalTwinConfig,
    RegistryClient,
    StorageMode,
)
from ..contracts.codec import SetDigitalTwin, encode_call
from ..errors import BenchError
from ..keys import KeyPair
from ..ledger import Genesis, Network, sign_transaction
from .reports import LatencyReport

logger = logging.getLogger(__name__)

DEFAULT_N_LIST = (1000, 2000, 3000, 4000, 5000)
DEFAULT_NODE_COUNT = 3
# Eight more difficulty bits must raise the mean latency per twin at least tenfold.
WIDE_GAP_BITS = 8
WIDE_GAP_FACTOR = 10.0


def parse_n_list(value):
    """``1000..5000`` (step 1000), ``1000..5000..500`` or ``1000,3000``."""
    value = str(value).strip()
    if ".." in value:
        parts = [int(part) for part in value.split("..")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1000
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ValueError(f"bad range {value!r}")
        if step <= 0 or start <= 0 or stop < start:
            raise ValueError(f"bad range {value!r}")
        return list(range(start, stop + 1, step))
    values = [int(part) for part in value.split(",") if part.strip()]
    if not values or any(n <= 0 for n in values):
        raise ValueError(f"bad twin counts {value!r}")
    return values


def presign_batches(address, n, settlors, trustee):
    """One ordered batch per settlor; twin ``i`` belongs to settlor ``i % len(settlors)``."""
    batches = [[] for _ in settlors]
    for i in range(n):
        worker = i % len(settlors)
        settlor = settlors[worker]
        config = DigitalTwinConfig(
            twin_id=f"twin{i:06d}",
            twin_settlor=settlor.address,
            twin_trustee=trustee.address,
            streaming_start=0,
            streaming_end=2**32,
            streaming_view=DataView(streaming_period=60),
        )
        payload = encode_call(SetDigitalTwin(config))
        batches[worker].append(
            sign_transaction(settlor, address, payload, len(batches[worker]))
        )
    return batches


def run_latency_once(
    mode,
    n,
    difficulty,
    workers=4,
    seed=0,
    confirmations=1,
    max_block_txs=10,
    schedule=DEFAULT_SCHEDULE,
    node_count=DEFAULT_NODE_COUNT,
):
    """Seconds until ``n`` twin registrations are confirmed on a ``node_count`` node network."""
    network = Network(
        Genesis(difficulty=difficulty, node_count=node_count),
        ContractHost.factory(schedule),
        confirmations=confirmations,
        max_block_txs=max_block_txs,
    )
    try:
        operator = KeyPair.from_seed(f"bench-operator-{seed}")
        address, _ = RegistryClient(network, operator, confirmations=1).deploy_registry(mode)
        settlors = [KeyPair.from_seed(f"bench-settlor-{seed}-{w}") for w in range(workers)]
        trustee = KeyPair.from_seed(f"bench-trustee-{seed}")
        batches = presign_batches(address, n, settlors, trustee)

        started = time.perf_counter()
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="submit") as pool:
            submitted = pool.map(lambda batch: [network.submit(tx) for tx in batch], batches)
            tx_ids = [tx_id for batch_ids in submitted for tx_id in batch_ids]
        receipts = network.wait_for(tx_ids, confirmations, max_rounds=n + 100)
        elapsed = time.perf_counter() - started
    finally:
        network.shutdown()

    reverted = [receipt for receipt in receipts if not receipt.succeeded]
    if reverted:
        raise BenchError(f"{len(reverted)} registrations reverted, first: {reverted[0].error}")
    logger.info("%s n=%s difficulty=%s: %.3f s", mode.value, n, difficulty, elapsed)
    return elapsed


def run_latency_bench(
    n_list=DEFAULT_N_LIST,
    difficulty=12,
    runs=5,
    workers=4,
    seed=0,
    modes=None,
    confirmations=1,
    max_block_txs=10,
    node_count=DEFAULT_NODE_COUNT,
):
    """One row per mode, difficulty and twin count; ``difficulty`` may be a list."""
    difficulties = [difficulty] if isinstance(difficulty, int) else list(difficulty)
    rows = []
    for mode in list(modes or StorageMode):
        for bits in difficulties:
            for n in n_list:
                totals = [
                    run_latency_once(
                        mode,
                        n,
                        bits,
                        workers=workers,
                        seed=seed + run,
                        confirmations=confirmations,
                        max_block_txs=max_block_txs,
                        node_count=node_count,
                    )
                    for run in range(runs)
                ]
                rows.append(LatencyReport.from_runs(mode, n, totals, bits))
    return rows


def check_difficulty_rows(rows):
    """Failed claims that a harder proof of work slows registration, as messages."""
    failures = []
    groups = {}
    for row in rows:
        groups.setdefault((row.mode, row.n_twins), []).append(row)
    for (mode, n), group in groups.items():
        group.sort(key=lambda row: row.difficulty)
        for easier, harder in zip(group, group[1:]):
            if harder.difficulty == easier.difficulty:
                continue
            factor = WIDE_GAP_FACTOR if harder.difficulty - easier.difficulty >= WIDE_GAP_BITS else 1.0
            if harder.mean_per_tx <= factor * easier.mean_per_tx:
                failures.append(
                    f"{mode.value} n={n}: difficulty {harder.difficulty} mean "
                    f"{harder.mean_per_tx:.3f} ms is not above {factor:g} x difficulty "
                    f"{easier.difficulty} mean {easier.mean_per_tx:.3f} ms"
                )
    return failures


def check_latency_rows(rows, tolerance=1.02):
    """Failed trend claims, as messages."""
    failures = []
    by_mode = {}
    for row in rows:
        by_mode.setdefault((row.mode, row.difficulty), []).append(row)
    for (mode, _), mode_rows in by_mode.items():
        mode_rows.sort(key=lambda row: row.n_twins)
        for before, after in zip(mode_rows, mode_rows[1:]):
            if after.total_latency <= before.total_latency:
                failures.append(
                    f"{mode.value}: total latency did not grow from n={before.n_twins} to n={after.n_twins}"
                )
    for difficulty in sorted({row.difficulty for row in rows}):
        logs_rows = by_mode.get((StorageMode.LOGS, difficulty), [])
        variables_rows = by_mode.get((StorageMode.VARIABLES, difficulty), [])
        if logs_rows and variables_rows:
            logs_mean = sum(row.mean_per_tx for row in logs_rows) / len(logs_rows)
            variables_mean = sum(row.mean_per_tx for row in variables_rows) / len(variables_rows)
            if logs_mean > tolerance * variables_mean:
                failures.append(
                    f"Logs mean {logs_mean:.3f} ms above {tolerance} x Variables {variables_mean:.3f} ms"
                )
    return failures + check_difficulty_rows(rows)
