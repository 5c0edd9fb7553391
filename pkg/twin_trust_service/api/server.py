import logging
import threading

from flask import Flask
from flask_cors import CORS
from werkzeug.exceptions import HTTPException
from werkzeug.middleware.proxy_fix import ProxyFix

from ..clock import SystemClock
from ..contracts import ContractHost, GasSchedule, RegistryClient, RegistryReader, StorageMode
from ..gateway.chain_client import HttpChainClient
from ..gateway.coap import TwinMessageClient
from ..gateway.twin import start_twin
from ..keys import KeyPair
from ..ledger.network import Network
from ..sensors import SensorFleet
from ..settings import load_config
from .callbacks import after_request, before_request, exceptions
from .extensions import set_logger, set_prometheus_metrics

logger = logging.getLogger(__name__)


def _base_app(config):
    application = Flask(__name__)
    application.wsgi_app = ProxyFix(application.wsgi_app, x_host=1, x_prefix=1)
    application.config["SERVER_SETTINGS"] = config["SERVER_SETTINGS"]
    application.config["TESTING"] = bool(config["test_mode"])
    CORS(application)

    set_prometheus_metrics(application)
    set_logger(application)

    @application.before_request
    def beforerequest():
        before_request()

    @application.after_request
    def afterrequest(response):
        return after_request(response, application.logger)

    @application.errorhandler(Exception)
    def unhandled(e):
        if isinstance(e, HTTPException):
            return e
        return exceptions(e, application.logger)

    return application


def build_twin(config, chain_client=None, fleet=None, clock=None):
    """A started twin from TWIN_SETTINGS and SENSOR_SETTINGS."""
    settings = config["TWIN_SETTINGS"]
    chain_client = chain_client or HttpChainClient(
        settings["chain_url"], confirmations=int(settings["confirmations"])
    )
    fleet = fleet or SensorFleet.from_settings(config["SENSOR_SETTINGS"])
    seed = settings.get("settlor_seed")
    return start_twin(
        settings["twin_id"],
        chain_client,
        fleet,
        settings["resource"],
        clock or SystemClock(),
        host=settings["host"],
        port=int(settings["coap_port"]),
        cache_ttl=float(settings["cache_ttl"]),
        replay_window=int(settings["replay_window"]),
        peers={twin_id: tuple(address) for twin_id, address in settings["peers"].items()},
        message_client=TwinMessageClient(
            ack_timeout=float(settings["ack_timeout"]),
            max_retransmit=int(settings["max_retransmit"]),
        ),
        keypair=KeyPair.from_seed(seed) if seed else None,
    )


def create_app(config_path, twin=None):
    """The HTTP surface of one twin instance."""
    config = load_config(config_path)
    application = _base_app(config)
    application.config["TWIN_SETTINGS"] = config["TWIN_SETTINGS"]

    with application.app_context():
        application.config["TWIN"] = twin or build_twin(config)

        from .resources import api

        api.init_app(application)
    return application


class ChainService:
    """
    A network plus its deployed registry, mining in the background while
    transactions are pending.
    """

    def __init__(self, network, registry_address, mode, clock=None, block_interval=1.0):
        self.network = network
        self.registry_address = registry_address
        self.mode = mode
        self.clock = clock or SystemClock()
        self.block_interval = block_interval
        self.reader = RegistryReader(network.primary, registry_address)
        self._stop = threading.Event()
        self._thread = None

    @property
    def confirmations(self):
        return self.network.confirmations

    @classmethod
    def from_settings(cls, config, clock=None):
        ledger = config["LEDGER_SETTINGS"]
        contract = config["CONTRACT_SETTINGS"]
        schedule = GasSchedule.from_dict(contract["gas_schedule"])
        network = Network.from_settings(ledger, ContractHost.factory(schedule), clock=clock)
        mode = StorageMode(contract["storage_mode"])
        operator = KeyPair.from_seed(ledger["operator_seed"])
        client = RegistryClient(network, operator, confirmations=network.confirmations)
        address, gas_used = client.deploy_registry(mode)
        logger.info("%s registry deployed at %s for %s gas", mode.value, address.hex, gas_used)
        return cls(
            network,
            address,
            mode,
            clock=clock,
            block_interval=float(ledger["block_interval"]),
        )

    def needs_block(self):
        """True while transactions wait for inclusion or for their confirmations."""
        if any(len(node.mempool) for node in self.network.nodes):
            return True
        if self.confirmations < 2:
            return False
        recent = self.network.primary.chain.canonical()[-(self.confirmations - 1) :]
        return any(block.transactions for block in recent)

    def _run(self):
        while not self._stop.is_set():
            if self.needs_block():
                self.network.mine_round()
            else:
                self._stop.wait(self.block_interval)

    def start(self):
        self._thread = threading.Thread(target=self._run, name="chain-miner", daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
        self.network.shutdown()


def create_chain_app(config_path, service=None):
    """The HTTP surface of a chain node."""
    config = load_config(config_path)
    application = _base_app(config)

    with application.app_context():
        application.config["CHAIN"] = service or ChainService.from_settings(config).start()

        from .chain_resources import api

        api.init_app(application)
    return application
