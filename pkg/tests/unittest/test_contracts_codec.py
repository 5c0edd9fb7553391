import unittest

from twin_trust_service.contracts import DataView, DigitalTwinConfig, StorageMode, ViewFormat
from twin_trust_service.contracts.codec import (
    RegisterTrust,
    RevokeTrust,
    SetDigitalTwin,
    StoreTrustHashes,
    TransferProperty,
    decode_call,
    decode_deploy,
    encode_call,
    encode_deploy,
)
from twin_trust_service.errors import BadCall
from twin_trust_service.keys import Address

SETTLOR = Address(b"\x11" * 32)
TRUSTEE = Address(b"\x22" * 32)


class TestGoldenVectors(unittest.TestCase):
    def test_register_trust(self):
        payload = encode_call(RegisterTrust(SETTLOR, TRUSTEE, "twin001"))
        expected = (
            "02"
            + "00000020"
            + "11" * 32
            + "00000020"
            + "22" * 32
            + "00000007"
            + "7477696e303031"
        )
        self.assertEqual(payload.hex(), expected)

    def test_revoke_trust(self):
        payload = encode_call(RevokeTrust(SETTLOR, "t"))
        self.assertEqual(payload.hex(), "04" + "00000020" + "11" * 32 + "00000001" + "74")

    def test_deploy(self):
        self.assertEqual(encode_deploy(StorageMode.LOGS).hex(), "00" + "00000004" + "4c6f6773")

    def test_set_digital_twin(self):
        config = DigitalTwinConfig("a", SETTLOR, TRUSTEE, 1, 2, DataView(60, ViewFormat.XML))
        payload = encode_call(SetDigitalTwin(config))
        expected = (
            "01"
            + "00000001" + "61"
            + "00000020" + "11" * 32
            + "00000020" + "22" * 32
            + "00000008" + "0000000000000001"
            + "00000008" + "0000000000000002"
            + "00000008" + "000000000000003c"
            + "00000008" + "0000000000000001"
        )
        self.assertEqual(payload.hex(), expected)


class TestDecode(unittest.TestCase):
    def test_decode_every_call(self):
        config = DigitalTwinConfig("twin", SETTLOR, TRUSTEE, 0, 10, DataView(5))
        calls = [
            SetDigitalTwin(config),
            RegisterTrust(SETTLOR, TRUSTEE, "twin"),
            TransferProperty(SETTLOR, "twin", TRUSTEE),
            RevokeTrust(SETTLOR, "twin"),
            StoreTrustHashes(SETTLOR, TRUSTEE, "twin"),
        ]
        for call in calls:
            self.assertEqual(decode_call(encode_call(call)), call)

    def test_decode_deploy(self):
        self.assertIs(decode_deploy(encode_deploy("Variables")), StorageMode.VARIABLES)

    def test_empty_payload(self):
        with self.assertRaises(BadCall):
            decode_call(b"")

    def test_unknown_selector(self):
        with self.assertRaises(BadCall):
            decode_call(b"\x09")

    def test_trailing_bytes(self):
        payload = encode_call(RevokeTrust(SETTLOR, "t")) + b"\x00"
        with self.assertRaises(BadCall):
            decode_call(payload)

    def test_truncated(self):
        payload = encode_call(RegisterTrust(SETTLOR, TRUSTEE, "twin001"))
        with self.assertRaises(BadCall):
            decode_call(payload[:-3])

    def test_deploy_payload_is_not_a_call(self):
        with self.assertRaises(BadCall):
            decode_call(encode_deploy(StorageMode.LOGS))

    def test_unknown_mode(self):
        with self.assertRaises(BadCall):
            decode_deploy(b"\x00" + b"\x00\x00\x00\x03abc")

    def test_unknown_view_format(self):
        config = DigitalTwinConfig("a", SETTLOR, TRUSTEE, 1, 2)
        payload = bytearray(encode_call(SetDigitalTwin(config)))
        payload[-1] = 7
        with self.assertRaises(BadCall):
            decode_call(bytes(payload))
