import unittest
from dataclasses import replace

from hypothesis import given, settings
from hypothesis import strategies as st

from twin_trust_service.contracts import ContractHost, StorageMode
from twin_trust_service.contracts.codec import encode_deploy
from twin_trust_service.errors import (
    BadSignature,
    LedgerError,
    NonceGap,
    StaleNonce,
    UnknownAccount,
)
from twin_trust_service.keys import KeyPair
from twin_trust_service.ledger import Genesis, Network, Node, mine_block, sign_transaction
from twin_trust_service.ledger.mempool import Mempool

ALICE = KeyPair.from_seed("net-alice")
BOB = KeyPair.from_seed("net-bob")


def deploy(keypair, nonce):
    return sign_transaction(keypair, None, encode_deploy(StorageMode.VARIABLES), nonce)


class TestMempool(unittest.TestCase):
    def setUp(self):
        self.mempool = Mempool()

    def test_add_in_order(self):
        self.mempool.add(deploy(ALICE, 0), 0)
        self.mempool.add(deploy(ALICE, 1), 0)
        self.assertEqual(len(self.mempool), 2)
        self.assertEqual(self.mempool.next_nonce(ALICE.address, 0), 2)

    def test_stale_nonce(self):
        with self.assertRaises(StaleNonce):
            self.mempool.add(deploy(ALICE, 0), 1)

    def test_nonce_gap(self):
        with self.assertRaises(NonceGap):
            self.mempool.add(deploy(ALICE, 2), 0)

    def test_readding_is_a_no_op(self):
        tx = deploy(ALICE, 0)
        self.assertEqual(self.mempool.add(tx, 0), self.mempool.add(tx, 0))
        self.assertEqual(len(self.mempool), 1)

    def test_select_keeps_submission_order(self):
        txs = [deploy(ALICE, 0), deploy(BOB, 0), deploy(ALICE, 1)]
        for tx in txs:
            self.mempool.add(tx, 0)
        self.assertEqual(self.mempool.select(2), txs[:2])

    def test_discard_included(self):
        first, second = deploy(ALICE, 0), deploy(ALICE, 1)
        self.mempool.add(first, 0)
        self.mempool.add(second, 0)
        self.mempool.discard_included([first], {ALICE.address: 1})
        self.assertEqual(self.mempool.select(10), [second])

    def test_rebuild_readmits_abandoned(self):
        first = deploy(ALICE, 0)
        self.mempool.rebuild({}, extra=[first, deploy(BOB, 3)])
        self.assertEqual(self.mempool.select(10), [first])


class TestNetwork(unittest.TestCase):
    def setUp(self):
        self.network = Network(Genesis(difficulty=0, node_count=3), ContractHost.factory())

    def tearDown(self):
        self.network.shutdown()

    def test_gossip_and_convergence(self):
        tx_id = self.network.submit(deploy(ALICE, 0), node=2)
        (receipt,) = self.network.wait_for([tx_id])
        self.assertTrue(receipt.succeeded)
        self.assertTrue(self.network.converged())
        roots = {node.chain.state_root() for node in self.network.nodes}
        self.assertEqual(len(roots), 1)
        for node in self.network.nodes:
            self.assertEqual(node.receipt(tx_id)[1], 3)
            self.assertEqual(len(node.mempool), 0)

    def test_next_nonce_counts_pending(self):
        self.network.submit(deploy(ALICE, 0))
        self.assertEqual(self.network.next_nonce(ALICE.address), 1)

    def test_competing_miners_converge(self):
        self.network.nodes[1].submit_transaction(deploy(ALICE, 0), gossip=False)
        blocks = self.network.mine_competing([0, 1])
        self.assertEqual(len(blocks), 2)
        self.assertTrue(self.network.converged())
        self.assertEqual(self.network.primary.chain.tip, min(blocks, key=lambda b: b.hash))

    def test_partition_then_resync(self):
        self.network.bus.partition(0, 2)
        self.network.bus.partition(1, 2)
        self.network.submit(deploy(ALICE, 0))
        for _ in range(3):
            self.network.mine_round()
        self.assertFalse(self.network.converged())
        self.network.bus.heal()
        self.network.resync()
        self.assertTrue(self.network.converged())
        self.assertEqual(self.network.nodes[2].chain.height, 2)
        self.assertEqual(self.network.nodes[2].chain.next_nonce(ALICE.address), 1)

    def test_reorged_transactions_return_to_the_mempool(self):
        self.network.bus.partition(0, 2)
        self.network.bus.partition(1, 2)
        tx_id = self.network.submit(deploy(BOB, 0), node=2)
        self.network.mine_round()
        self.network.mine_round()
        self.network.mine_round()
        self.assertIsNotNone(self.network.nodes[2].receipt(tx_id))
        self.network.bus.heal()
        self.network.resync()
        self.assertIsNone(self.network.nodes[2].receipt(tx_id))
        self.assertEqual(len(self.network.nodes[2].mempool), 1)

    def test_wait_for_gives_up(self):
        with self.assertRaises(LedgerError):
            self.network.wait_for([b"\x00" * 32], max_rounds=2)

    def test_bad_signature(self):
        forged = replace(deploy(ALICE, 0), signature=BOB.sign(b"x"))
        with self.assertRaises(BadSignature):
            self.network.submit(forged)

    def test_genesis_accounts(self):
        genesis = Genesis(difficulty=0, node_count=1, allocations=(ALICE.address,))
        network = Network(genesis, ContractHost.factory())
        try:
            network.submit(deploy(ALICE, 0))
            with self.assertRaises(UnknownAccount):
                network.submit(deploy(BOB, 0))
        finally:
            network.shutdown()

    def test_from_settings(self):
        network = Network.from_settings(
            {"difficulty": 0, "node_count": 2, "confirmations": 1}, ContractHost.factory()
        )
        try:
            self.assertEqual(len(network.nodes), 2)
            self.assertEqual(network.confirmations, 1)
        finally:
            network.shutdown()


class TestOrphans(unittest.TestCase):
    def setUp(self):
        self.genesis = Genesis(difficulty=0, node_count=1)
        self.node = Node(0, self.genesis, ContractHost.factory(), max_orphans=4)

    def test_orphan_waits_for_its_parent(self):
        parent = mine_block([], 0, self.genesis.block(), 1).block
        child = mine_block([], 0, parent, 2).block
        self.node.receive_block(child)
        self.assertEqual(self.node.orphan_count, 1)
        self.node.receive_block(parent)
        self.assertEqual(self.node.chain.tip, child)
        self.assertEqual(self.node.orphan_count, 0)

    def test_orphans_are_bounded(self):
        stray = mine_block([], 0, self.genesis.block(), 1).block
        children = [mine_block([], 0, stray, timestamp).block for timestamp in range(2, 12)]
        for child in children:
            self.node.receive_block(child)
        self.assertEqual(self.node.orphan_count, 4)
        self.node.receive_block(stray)
        self.assertEqual(self.node.orphan_count, 0)
        self.assertEqual(self.node.chain.height, 2)
        self.assertIn(self.node.chain.tip, children[-4:])
        for dropped in children[:-4]:
            self.assertIsNone(self.node.chain.get_block(dropped.hash))

class TestConvergenceProperty(unittest.TestCase):
    @settings(max_examples=20, deadline=None)
    @given(
        bus_seed=st.integers(0, 2**16),
        targets=st.lists(st.integers(0, 2), min_size=1, max_size=6),
        forks=st.integers(0, 2),
    )
    def test_nodes_agree(self, bus_seed, targets, forks):
        network = Network(
            Genesis(difficulty=0, node_count=3), ContractHost.factory(), bus_seed=bus_seed
        )
        try:
            tx_ids = []
            for nonce, node in enumerate(targets):
                tx_ids.append(network.submit(deploy(ALICE, nonce), node=node))
                network.bus.deliver_all()
            for _ in range(forks):
                network.mine_competing([0, 1, 2])
            network.wait_for(tx_ids, confirmations=1, max_rounds=50)
            network.resync()
            self.assertTrue(network.converged())
            self.assertEqual(
                len({node.chain.state_root() for node in network.nodes}), 1
            )
        finally:
            network.shutdown()
