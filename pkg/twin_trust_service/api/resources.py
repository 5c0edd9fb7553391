from flask import Response, current_app as app, jsonify, request
from flask_restx import Api, Resource, reqparse
from werkzeug.exceptions import BadRequest, Forbidden, NotFound, ServiceUnavailable
from werkzeug.exceptions import Unauthorized as NotAuthenticated

from ..errors import (
    BadCredential,
    ChainUnreachable,
    EmptyWindow,
    MismatchedTwin,
    Unauthorized,
    UnknownTwin,
    WindowTooLarge,
)
from ..gateway.credentials import TrusteeCredential
from ..gateway.twin import TALK_TO_BC, TALK_TO_THIRD_PARTY

third_party_parser = reqparse.RequestParser()
third_party_parser.add_argument("from", type=int, help="Window start, unix seconds", default=None)
third_party_parser.add_argument("to", type=int, help="Window end, unix seconds", default=None)

api = Api(
    version="1.0.0",
    title="Digital Twin Gateway",
    description="Trustee-specific data views of virtual IoT resources.",
)


def credential_from_request():
    try:
        return TrusteeCredential.from_headers(request.headers)
    except BadCredential as e:
        raise NotAuthenticated(str(e))


@api.route(TALK_TO_THIRD_PARTY)
@api.response(200, "Success")
@api.response(400, "Empty or oversized window")
@api.response(401, "Bad credential")
@api.response(403, "Access denied")
@api.response(503, "Chain unreachable")
class ThirdPartyResource(Resource):
    @api.expect(third_party_parser, validate=True)
    def get(self):
        args = third_party_parser.parse_args()
        twin = app.config["TWIN"]
        credential = credential_from_request()
        try:
            result = twin.handle_third_party_request(credential, args["from"], args["to"])
        except BadCredential as e:
            raise NotAuthenticated(str(e))
        except (EmptyWindow, WindowTooLarge) as e:
            raise BadRequest(str(e))
        except (ChainUnreachable, MismatchedTwin) as e:
            raise ServiceUnavailable(str(e))
        if not result.granted:
            response = jsonify({"twin_id": twin.twin_id, "granted": False, "reason": result.reason.value})
            response.status_code = 403
            return response
        return Response(result.render(), mimetype=result.mimetype)


@api.route(TALK_TO_BC)
@api.response(200, "Success")
@api.response(401, "Bad credential")
@api.response(403, "Not the settlor")
@api.response(404, "Twin not registered")
class BlockchainResource(Resource):
    def get(self):
        twin = app.config["TWIN"]
        credential = credential_from_request()
        try:
            config = twin.talk_to_bc(credential)
        except BadCredential as e:
            raise NotAuthenticated(str(e))
        except Unauthorized as e:
            raise Forbidden(str(e))
        except UnknownTwin as e:
            raise NotFound(f"twin {e} is not registered")
        except (ChainUnreachable, MismatchedTwin) as e:
            raise ServiceUnavailable(str(e))
        return jsonify(config.to_dict())
