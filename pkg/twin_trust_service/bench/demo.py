"""
Smart-city scenario: one consumption meter, two provider trustees, one
settlor. Every step goes through real chain transactions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from ..clock import LogicalClock
from ..contracts import (
    ContractHost,
    DataView,
    DigitalTwinConfig,
    RegistryClient,
    StorageMode,
    ViewFormat,
)
from ..errors import BenchError
from ..gateway.chain_client import LocalChainClient
from ..gateway.credentials import TrusteeCredential
from ..gateway.twin import start_twin
from ..keys import KeyPair
from ..ledger import Genesis, Network
from ..sensors import ResourceSpec, SensorFleet, Waveform

logger = logging.getLogger(__name__)

PASSED = "passed"
FAILED = "failed"
SKIPPED = "skipped"

METER = "meter-district-7"
ENERGY_TWIN = "twin-energy"
WATER_TWIN = "twin-water"


@dataclass
class DemoResult:
    checks: List[Tuple[str, str]] = field(default_factory=list)
    transcript: List[str] = field(default_factory=list)

    @property
    def exit_code(self):
        return 1 if any(status == FAILED for _, status in self.checks) else 0

    def check(self, name, ok, echo):
        status = PASSED if ok else FAILED
        self.checks.append((name, status))
        self.say(f"[{status.upper()}] {name}", echo)

    def skip(self, name, echo):
        self.checks.append((name, SKIPPED))
        self.say(f"[SKIPPED] {name}", echo)

    def say(self, line, echo):
        self.transcript.append(line)
        echo(line)


def _pull(twin, trustee, clock, start, end):
    credential = TrusteeCredential.issue(trustee, twin.twin_id, clock.now())
    return twin.handle_third_party_request(credential, start, end)


def run_smartcity(
    difficulty=0,
    skip_revocation=False,
    mode=StorageMode.VARIABLES,
    confirmations=3,
    node_count=3,
    echo=None,
):
    echo = echo or logger.info
    result = DemoResult()
    clock = LogicalClock(start=3600)
    network = Network(
        Genesis(difficulty=difficulty, node_count=node_count),
        ContractHost.factory(),
        confirmations=confirmations,
        clock=clock,
    )
    fleet = SensorFleet()
    fleet.spawn(
        ResourceSpec(
            METER, Waveform.SINUSOID, base=40.0, amplitude=15.0, tick=60, seed=7, unit="kWh"
        )
    )
    settlor = KeyPair.from_seed("city-hall")
    energy = KeyPair.from_seed("energy-provider")
    water = KeyPair.from_seed("water-provider")
    twins = []
    try:
        client = RegistryClient(network, settlor, confirmations=confirmations)
        address, gas_used = client.deploy_registry(mode)
        result.say(f"deployed {mode.value} registry {address.hex[:12]} ({gas_used} gas)", echo)

        for twin_id, trustee, view in (
            (ENERGY_TWIN, energy, DataView(600, ViewFormat.JSON)),
            (WATER_TWIN, water, DataView(1800, ViewFormat.XML)),
        ):
            config = DigitalTwinConfig(twin_id, settlor.address, trustee.address, 0, 86400, view)
            for receipt in (
                client.set_digital_twin(config),
                client.register_trust(trustee.address, twin_id),
            ):
                if not receipt.succeeded:
                    raise BenchError(f"setting up {twin_id} reverted: {receipt.error}")
            result.say(f"registered {twin_id} for {trustee.address.hex[:12]}", echo)

        chain_client = LocalChainClient(client.reader(), confirmations=confirmations)
        energy_twin = start_twin(ENERGY_TWIN, chain_client, fleet, METER, clock, keypair=settlor)
        twins.append(energy_twin)
        water_twin = start_twin(WATER_TWIN, chain_client, fleet, METER, clock, keypair=settlor)
        twins.append(water_twin)

        energy_view = _pull(energy_twin, energy, clock, 0, 3600)
        water_view = _pull(water_twin, water, clock, 0, 3600)
        result.check(
            "energy provider receives its JSON view",
            energy_view.granted
            and energy_view.view_format is ViewFormat.JSON
            and len(energy_view.samples) == 7,
            echo,
        )
        result.check(
            "water provider receives its XML view",
            water_view.granted
            and water_view.view_format is ViewFormat.XML
            and len(water_view.samples) == 3,
            echo,
        )
        energy_before = energy_view.render()
        result.check("views of the same meter differ", energy_before != water_view.render(), echo)

        crossed = _pull(water_twin, energy, clock, 0, 3600)
        result.check(
            "energy provider is denied the water twin",
            not crossed.granted and not getattr(crossed, "samples", ()),
            echo,
        )

        if skip_revocation:
            result.skip("revoked water provider is denied", echo)
        else:
            receipt = client.revoke_trust(WATER_TWIN)
            result.say(f"revoked {WATER_TWIN} trust ({receipt.gas_used} gas)", echo)
            revoked = _pull(water_twin, water, clock, 0, 3600)
            result.check(
                "revoked water provider is denied",
                receipt.succeeded and not revoked.granted and not getattr(revoked, "samples", ()),
                echo,
            )

        energy_after = _pull(energy_twin, energy, clock, 0, 3600)
        result.check(
            "energy view is byte-identical after the water change",
            energy_after.granted and energy_after.render() == energy_before,
            echo,
        )
    finally:
        for twin in twins:
            twin.stop()
        network.shutdown()
    return result
