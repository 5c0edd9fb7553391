from flask import current_app as app, jsonify, request
from flask_restx import Api, Resource, reqparse
from werkzeug.exceptions import BadRequest, NotFound, ServiceUnavailable

from ..errors import LedgerError, TooManyTopics, UnknownContract, UnknownTwin
from ..keys import Address
from ..ledger.types import Transaction

confirmations_parser = reqparse.RequestParser()
confirmations_parser.add_argument(
    "confirmations", type=int, help="Minimum confirmations", default=None
)

access_parser = confirmations_parser.copy()
access_parser.add_argument("trustee", type=str, help="Trustee address (hex)", required=True)
access_parser.add_argument("twin_id", type=str, help="Twin ID", required=True)
access_parser.add_argument("now", type=int, help="Unix seconds", default=None)

logs_parser = confirmations_parser.copy()
logs_parser.add_argument("emitter", type=str, help="Emitter address (hex)", default=None)
logs_parser.add_argument(
    "topic", type=str, help="Topic (hex), empty for any", action="append", default=[]
)

api = Api(
    version="1.0.0",
    title="Twin Trust Chain Node",
    description="Transactions, receipts and registry reads for one ledger.",
)


def parse_address(value, name):
    try:
        return Address.from_hex(value)
    except ValueError:
        raise BadRequest(f"{name} is not a 32-byte hex address")


def wanted_confirmations(args):
    service = app.config["CHAIN"]
    value = args.get("confirmations")
    return service.confirmations if value is None else value


@api.route("/transactions")
@api.response(200, "Accepted")
@api.response(400, "Rejected transaction")
class TransactionsResource(Resource):
    def post(self):
        body = request.get_json(silent=True) or {}
        try:
            tx = Transaction.from_dict(body["transaction"])
        except (KeyError, TypeError, ValueError) as e:
            raise BadRequest(f"malformed transaction: {e}")
        try:
            tx_id = app.config["CHAIN"].network.submit(tx)
        except LedgerError as e:
            raise BadRequest(f"{type(e).__name__}: {e}")
        return jsonify({"tx_id": tx_id.hex()})


@api.route("/transactions/<string:tx_id>")
@api.response(200, "Success")
@api.response(404, "Transaction not in the canonical chain")
class ReceiptResource(Resource):
    def get(self, tx_id):
        try:
            found = app.config["CHAIN"].network.primary.receipt(bytes.fromhex(tx_id))
        except ValueError:
            raise BadRequest("tx_id must be hex")
        if found is None:
            raise NotFound(f"transaction {tx_id} not found")
        receipt, depth = found
        return jsonify({"receipt": receipt.to_dict(), "confirmations": depth})


@api.route("/tip")
class TipResource(Resource):
    def get(self):
        tip = app.config["CHAIN"].network.primary.chain.tip
        return jsonify({"height": tip.height, "hash": tip.hash.hex()})


@api.route("/accounts/<string:address>/nonce")
class NonceResource(Resource):
    def get(self, address):
        sender = parse_address(address, "address")
        return jsonify({"next_nonce": app.config["CHAIN"].network.next_nonce(sender)})


@api.route("/registry")
class RegistryResource(Resource):
    def get(self):
        service = app.config["CHAIN"]
        return jsonify({"address": service.registry_address.hex, "mode": service.mode.value})


@api.route("/twins/<string:twin_id>")
@api.response(200, "Success")
@api.response(404, "Twin not registered")
class TwinResource(Resource):
    @api.expect(confirmations_parser)
    def get(self, twin_id):
        args = confirmations_parser.parse_args()
        try:
            config = app.config["CHAIN"].reader.lookup_twin(twin_id, wanted_confirmations(args))
        except UnknownTwin:
            raise NotFound(f"twin {twin_id} not registered")
        except UnknownContract as e:
            raise ServiceUnavailable(str(e))
        return jsonify({"config": config.to_dict()})


@api.route("/access")
class AccessResource(Resource):
    @api.expect(access_parser)
    def get(self):
        args = access_parser.parse_args()
        service = app.config["CHAIN"]
        trustee = parse_address(args["trustee"], "trustee")
        now = args["now"] if args["now"] is not None else service.clock.now()
        try:
            decision = service.reader.validate_access(
                trustee, args["twin_id"], now, wanted_confirmations(args)
            )
        except UnknownContract as e:
            raise ServiceUnavailable(str(e))
        if decision.granted:
            return jsonify({"granted": True, "reason": None, "config": decision.config.to_dict()})
        return jsonify({"granted": False, "reason": decision.reason.value, "config": None})


@api.route("/logs")
@api.response(200, "Success")
@api.response(400, "More than three topics")
class LogsResource(Resource):
    @api.expect(logs_parser)
    def get(self):
        args = logs_parser.parse_args()
        service = app.config["CHAIN"]
        emitter = parse_address(args["emitter"], "emitter") if args["emitter"] else None
        try:
            topics = [bytes.fromhex(topic) if topic else None for topic in args["topic"]]
        except ValueError:
            raise BadRequest("topics must be hex")
        try:
            entries = service.network.primary.query_logs(
                emitter, topics, wanted_confirmations(args)
            )
        except TooManyTopics as e:
            raise BadRequest(str(e))
        return jsonify({"logs": [entry.to_dict() for entry in entries]})

