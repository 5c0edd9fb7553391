import traceback
from time import perf_counter

from flask import g, request

from ..gateway.credentials import KEY_HEADER

SKIPPED_PATHS = ("/metrics", "/swagger.json")


def requester():
    """Short form of the presenting trustee key, or '-' for anonymous calls."""
    key = request.headers.get(KEY_HEADER)
    return key[:12] if key else "-"


def before_request():
    g.started = perf_counter()


def after_request(response, logger):
    if request.path in SKIPPED_PATHS:
        return response
    elapsed_ms = (perf_counter() - g.pop("started", perf_counter())) * 1000
    logger.info(
        "%s %s %s trustee=%s -> %s in %.1f ms",
        request.remote_addr,
        request.method,
        request.full_path.rstrip("?"),
        requester(),
        response.status_code,
        elapsed_ms,
    )
    return response


def exceptions(e, logger):
    logger.error(
        "%s %s %s trustee=%s failed with %s\n%s",
        request.remote_addr,
        request.method,
        request.full_path.rstrip("?"),
        requester(),
        type(e).__name__,
        traceback.format_exc(),
    )
    return {"message": "internal error", "error": type(e).__name__}, 500
