import copy
import logging

from envyaml import EnvYAML

logger = logging.getLogger(__name__)

DEFAULTS = {
    "test_mode": False,
    "SERVER_SETTINGS": {
        "server_software": "",
    },
    "LEDGER_SETTINGS": {
        "difficulty": 0,
        "node_count": 3,
        "confirmations": 3,
        "max_block_txs": 10,
        "genesis": None,
        "block_interval": 1.0,
        "operator_seed": "operator",
    },
    "CONTRACT_SETTINGS": {
        "storage_mode": "Variables",
        "gas_schedule": {},
    },
    "TWIN_SETTINGS": {
        "twin_id": None,
        "chain_url": None,
        "registry": None,
        "resource": None,
        "host": "127.0.0.1",
        "coap_port": 5683,
        "http_port": 5000,
        "confirmations": 3,
        "cache_ttl": 10,
        "replay_window": 60,
        "ack_timeout": 0.5,
        "max_retransmit": 3,
        "peers": {},
        "settlor_seed": None,
    },
    "SENSOR_SETTINGS": [],
    "BENCH_SETTINGS": {
        "n_list": [1000, 2000, 3000, 4000, 5000],
        "difficulty": 12,
        "runs": 5,
        "workers": 4,
        "seed": 0,
        "confirmations": 1,
        "node_count": 3,
    },
}


def merge_settings(loaded):
    """Overlay ``loaded`` on the defaults, one level deep per section."""
    config = copy.deepcopy(DEFAULTS)
    for key, value in (loaded or {}).items():
        if isinstance(config.get(key), dict) and isinstance(value, dict):
            config[key].update(value)
        elif value is not None:
            config[key] = value
    return config


def load_config(path=None):
    """
    Read a YAML (or JSON) config with environment substitution, falling back
    to the defaults for every missing key.
    """
    if path is None:
        return merge_settings({})
    env_yaml = EnvYAML(path, strict=False)
    loaded = {key: env_yaml.get(key) for key in DEFAULTS}
    logger.debug(
        "loaded config sections %s from %s",
        sorted(key for key, value in loaded.items() if value is not None),
        path,
    )
    return merge_settings(loaded)
