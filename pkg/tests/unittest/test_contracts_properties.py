import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from twin_trust_service.contracts import (
    ContractHost,
    DataView,
    DigitalTwinConfig,
    GasMeter,
    GasSchedule,
    LogsRegistry,
    StorageMode,
    ViewFormat,
    make_registry,
)
from twin_trust_service.contracts.codec import StoreTrustHashes, encode_call, encode_deploy
from twin_trust_service.errors import ContractError
from twin_trust_service.keys import Address, KeyPair

REGISTRY = Address(b"\xcc" * 32)
PARTIES = [KeyPair.from_seed(f"party-{i}").address for i in range(4)]
TWINS = ["t0", "t1", "t2"]
LONG_RUN = 1000

party = st.integers(0, len(PARTIES) - 1)
twin = st.sampled_from(TWINS)

set_twin = st.builds(
    lambda twin_id, settlor, trustee, start, length, period, xml: (
        "set",
        DigitalTwinConfig(
            twin_id,
            PARTIES[settlor],
            PARTIES[trustee],
            start,
            start + length,
            DataView(period, ViewFormat.XML if xml else ViewFormat.JSON),
        ),
    ),
    twin,
    party,
    party,
    st.integers(0, 100),
    st.integers(0, 100),
    st.integers(0, 60),
    st.booleans(),
)
register = st.tuples(st.just("register"), party, party, twin)
transfer = st.tuples(st.just("transfer"), party, twin, party)
revoke = st.tuples(st.just("revoke"), party, twin)
store = st.tuples(st.just("store"), party, party, twin)
operations = st.lists(st.one_of(set_twin, register, transfer, revoke, store), max_size=25)


def apply(registry, operation):
    """(the call's output or the name of the error it raised, its logs, gas used)"""
    kind, *args = operation
    meter = GasMeter()
    try:
        if kind == "set":
            (config,) = args
            result = registry.set_digital_twin(config.twin_settlor, config, meter)
        elif kind == "register":
            settlor, trustee, twin_id = args
            result = registry.register_trust(
                PARTIES[settlor], PARTIES[settlor], PARTIES[trustee], twin_id, meter
            )
        elif kind == "transfer":
            settlor, twin_id, trustee = args
            result = registry.transfer_property(
                PARTIES[settlor], PARTIES[settlor], twin_id, PARTIES[trustee], meter
            )
        elif kind == "revoke":
            settlor, twin_id = args
            result = registry.revoke_trust(PARTIES[settlor], PARTIES[settlor], twin_id, meter)
        else:
            settlor, trustee, twin_id = args
            result = registry.store_trust_hashes(
                PARTIES[settlor], PARTIES[settlor], PARTIES[trustee], twin_id, meter
            )
    except ContractError as e:
        return type(e).__name__, (), meter.used
    output, logs = result
    return output, logs, meter.used


def random_operation(rnd):
    kind = rnd.choice(["set", "register", "transfer", "revoke", "store"])

    def pick():
        return rnd.randrange(len(PARTIES))

    if kind == "set":
        start = rnd.randint(0, 100)
        config = DigitalTwinConfig(
            rnd.choice(TWINS),
            PARTIES[pick()],
            PARTIES[pick()],
            start,
            start + rnd.randint(0, 100),
            DataView(rnd.randint(0, 60), rnd.choice(list(ViewFormat))),
        )
        return ("set", config)
    if kind == "transfer":
        return ("transfer", pick(), rnd.choice(TWINS), pick())
    if kind == "revoke":
        return ("revoke", pick(), rnd.choice(TWINS))
    return (kind, pick(), pick(), rnd.choice(TWINS))


long_runs = st.randoms(use_true_random=True).map(
    lambda rnd: [random_operation(rnd) for _ in range(LONG_RUN)]
)


def observe(registry):
    decisions = [
        registry.validate_access(trustee, twin_id, now)
        for trustee in PARTIES
        for twin_id in TWINS
        for now in (0, 50, 150, 250)
    ]
    return registry.configs(), registry.active_trusts(), decisions


class TestModeEquivalence(unittest.TestCase):
    @settings(max_examples=200, deadline=None)
    @given(operations)
    def test_both_modes_answer_alike(self, ops):
        variables = make_registry(StorageMode.VARIABLES, REGISTRY)
        logs = make_registry(StorageMode.LOGS, REGISTRY)
        for operation in ops:
            self.assertEqual(apply(variables, operation)[0], apply(logs, operation)[0])
        self.assertEqual(observe(variables), observe(logs))

    @settings(max_examples=30, deadline=None)
    @given(long_runs)
    def test_long_runs_answer_alike_and_logs_cost_less(self, ops):
        variables = make_registry(StorageMode.VARIABLES, REGISTRY)
        logs = make_registry(StorageMode.LOGS, REGISTRY)
        succeeded = 0
        for operation in ops:
            by_variables, _, variables_gas = apply(variables, operation)
            by_logs, _, logs_gas = apply(logs, operation)
            self.assertEqual(by_variables, by_logs)
            if not isinstance(by_logs, str):
                succeeded += 1
                self.assertLess(logs_gas, variables_gas, operation)
        self.assertGreater(succeeded, 0)
        self.assertEqual(observe(variables), observe(logs))

    @settings(max_examples=100, deadline=None)
    @given(operations)
    def test_events_rebuild_the_same_registry(self, ops):
        registry = make_registry(StorageMode.LOGS, REGISTRY)
        entries = []
        for operation in ops:
            before = registry.state_root()
            outcome, logs, _ = apply(registry, operation)
            if isinstance(outcome, str):
                self.assertEqual(registry.state_root(), before)
            entries.extend(logs)
        rebuilt = LogsRegistry.from_logs(REGISTRY, entries)
        self.assertEqual(rebuilt.state_root(), registry.state_root())
        self.assertEqual(observe(rebuilt), observe(registry))


schedules = st.integers(50, 2000).flatmap(
    lambda topic: st.builds(
        GasSchedule,
        tx_base=st.integers(1, 50000),
        log_base=st.integers(1, 1000),
        log_topic=st.just(topic),
        log_data_byte=st.integers(1, 16),
        sstore_set=st.integers(10 * topic, 40000),
        sstore_update=st.integers(1, 10000),
        deploy_base=st.integers(1, 64000),
        code_byte=st.integers(1, 400),
    )
)


class TestGasOrdering(unittest.TestCase):
    settlor = KeyPair.from_seed("ordering-settlor").address
    trustee = KeyPair.from_seed("ordering-trustee").address

    def measure(self, schedule, mode):
        host = ContractHost(schedule)
        deploy = host.execute(self.settlor, None, encode_deploy(mode))
        store = host.execute(
            self.settlor,
            Address(deploy.output),
            encode_call(StoreTrustHashes(self.settlor, self.trustee, "twin001")),
        )
        self.assertTrue(store.succeeded)
        return deploy.gas_used, store.gas_used

    @settings(max_examples=200, deadline=None)
    @given(schedules)
    def test_logs_mode_is_cheaper(self, schedule):
        logs_deploy, logs_store = self.measure(schedule, StorageMode.LOGS)
        variables_deploy, variables_store = self.measure(schedule, StorageMode.VARIABLES)
        self.assertLess(logs_deploy, variables_deploy)
        self.assertLess(logs_store, variables_store)
