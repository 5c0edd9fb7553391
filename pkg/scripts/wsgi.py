import sys

sys.path.append("..")
from twin_trust_service.api.server import create_chain_app


if __name__ == "__main__":
    create_chain_app("../config.yml").run(debug=True, use_reloader=False, port=8545)
