import unittest

from twin_trust_service.contracts import (
    DEFAULT_SCHEDULE,
    ContractHost,
    DataView,
    DigitalTwinConfig,
    GasMeter,
    GasSchedule,
    OpKind,
    StorageMode,
    charge,
    definition_size,
)
from twin_trust_service.contracts.codec import (
    RegisterTrust,
    RevokeTrust,
    SetDigitalTwin,
    StoreTrustHashes,
    TransferProperty,
    encode_call,
    encode_deploy,
)
from twin_trust_service.contracts.storage import ZERO_WORD, SlotStorage, slot_key, uint_word
from twin_trust_service.keys import Address, KeyPair


class TestCharge(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(charge(OpKind.LOG, (0, 0)), 375)
        self.assertEqual(charge(OpKind.TX), 21000)
        self.assertEqual(charge(OpKind.LOG, (3, 32)), 375 + 3 * 375 + 32 * 8)
        self.assertEqual(charge("log", (3, 64)), 2012)

    def test_sstore(self):
        self.assertEqual(charge(OpKind.SSTORE_SET, 3), 60000)
        self.assertEqual(charge(OpKind.SSTORE_UPDATE, 2), 10000)

    def test_deploy(self):
        self.assertEqual(charge(OpKind.DEPLOY, 10), 32000 + 2000)

    def test_custom_schedule(self):
        schedule = GasSchedule.from_dict({"log_topic": 100})
        self.assertEqual(charge(OpKind.LOG, (2, 0), schedule), 375 + 200)

    def test_meter_accumulates(self):
        meter = GasMeter()
        meter.charge(OpKind.TX)
        meter.charge(OpKind.LOG, (1, 0))
        self.assertEqual(meter.used, 21750)
        self.assertEqual([kind for kind, _, _ in meter.charges], [OpKind.TX, OpKind.LOG])


class TestGasSchedule(unittest.TestCase):
    def test_defaults(self):
        self.assertEqual(DEFAULT_SCHEDULE.tx_base, 21000)
        self.assertEqual(DEFAULT_SCHEDULE.log_base, 375)

    def test_unknown_entry(self):
        with self.assertRaises(ValueError):
            GasSchedule.from_dict({"sload": 800})

    def test_non_positive_entry(self):
        with self.assertRaises(ValueError):
            GasSchedule(tx_base=0)

    def test_to_dict_round_trip(self):
        schedule = GasSchedule.from_dict({"code_byte": 150})
        self.assertEqual(GasSchedule.from_dict(schedule.to_dict()), schedule)


class TestDefinitionSize(unittest.TestCase):
    def test_logs_definition_is_smaller(self):
        self.assertEqual(definition_size(StorageMode.VARIABLES), 2976)
        self.assertEqual(definition_size(StorageMode.LOGS), 1632)


class TestTransactionGas(unittest.TestCase):
    """Whole-transaction gas per registry operation under the default schedule."""

    settlor = KeyPair.from_seed("gas-settlor").address
    trustee = KeyPair.from_seed("gas-trustee").address
    other = KeyPair.from_seed("gas-other").address

    def run_operations(self, mode):
        host = ContractHost()
        deploy = host.execute(self.settlor, None, encode_deploy(mode))
        address = Address(deploy.output)
        config = DigitalTwinConfig(
            "twin001", self.settlor, self.trustee, 0, 86400, DataView(60)
        )
        calls = [
            ("set_digital_twin", SetDigitalTwin(config)),
            ("register_trust", RegisterTrust(self.settlor, self.trustee, "twin001")),
            ("transfer_property", TransferProperty(self.settlor, "twin001", self.other)),
            ("revoke_trust", RevokeTrust(self.settlor, "twin001")),
            ("store_trust_hashes", StoreTrustHashes(self.settlor, self.trustee, "twin001")),
        ]
        gas = {"deploy": deploy.gas_used}
        for name, call in calls:
            receipt = host.execute(self.settlor, address, encode_call(call))
            self.assertTrue(receipt.succeeded, f"{name}: {receipt.error}")
            gas[name] = receipt.gas_used
        return gas

    def test_variables_mode(self):
        self.assertEqual(
            self.run_operations(StorageMode.VARIABLES),
            {
                "deploy": 627200,
                "set_digital_twin": 141000,
                "register_trust": 81000,
                "transfer_property": 31000,
                "revoke_trust": 36000,
                "store_trust_hashes": 81000,
            },
        )

    def test_logs_mode(self):
        self.assertEqual(
            self.run_operations(StorageMode.LOGS),
            {
                "deploy": 358400,
                "set_digital_twin": 23524,
                "register_trust": 22756,
                "transfer_property": 22756,
                "revoke_trust": 22756,
                "store_trust_hashes": 22500,
            },
        )

    def test_reverted_call_charges_at_least_the_base(self):
        host = ContractHost()
        deploy = host.execute(self.settlor, None, encode_deploy(StorageMode.LOGS))
        address = Address(deploy.output)
        receipt = host.execute(
            self.settlor, address, encode_call(RevokeTrust(self.settlor, "missing"))
        )
        self.assertFalse(receipt.succeeded)
        self.assertEqual(receipt.error, "UnknownTwin")
        self.assertEqual(receipt.gas_used, 21000)
        self.assertEqual(receipt.logs, ())


class TestSlotStorage(unittest.TestCase):
    def test_zero_value_first_write_is_a_set(self):
        storage, meter = SlotStorage(), GasMeter()
        storage.commit([(slot_key("a"), ZERO_WORD), (slot_key("b"), uint_word(7))], meter)
        self.assertEqual(meter.used, 2 * DEFAULT_SCHEDULE.sstore_set)
        self.assertTrue(storage.occupied(slot_key("a")))

    def test_rewrite_is_an_update(self):
        storage, meter = SlotStorage(), GasMeter()
        storage.commit([(slot_key("a"), ZERO_WORD)], GasMeter())
        storage.commit([(slot_key("a"), uint_word(1))], meter)
        self.assertEqual(meter.used, DEFAULT_SCHEDULE.sstore_update)
        self.assertEqual(storage.load(slot_key("a")), uint_word(1))

    def test_clearing_frees_the_slot(self):
        storage, meter = SlotStorage(), GasMeter()
        storage.commit([(slot_key("a"), uint_word(1))], GasMeter())
        storage.commit([(slot_key("a"), ZERO_WORD)], meter)
        self.assertEqual(meter.used, DEFAULT_SCHEDULE.sstore_update)
        self.assertFalse(storage.occupied(slot_key("a")))
        self.assertEqual(len(storage), 0)


class TestZeroFieldTwin(unittest.TestCase):
    settlor = KeyPair.from_seed("gas-settlor").address
    trustee = KeyPair.from_seed("gas-trustee").address

    def test_zero_fields_cost_the_same(self):
        host = ContractHost()
        address = Address(host.execute(self.settlor, None, encode_deploy("Variables")).output)
        config = DigitalTwinConfig("twin001", self.settlor, self.trustee, 0, 180, DataView(0))
        receipt = host.execute(self.settlor, address, encode_call(SetDigitalTwin(config)))
        self.assertTrue(receipt.succeeded, receipt.error)
        self.assertEqual(receipt.gas_used, 21000 + 6 * 20000)
