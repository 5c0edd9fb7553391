from .server import ChainService, build_twin, create_app, create_chain_app
