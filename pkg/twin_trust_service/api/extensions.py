import logging

from prometheus_client import CollectorRegistry
from prometheus_flask_exporter import PrometheusMetrics
from prometheus_flask_exporter.multiprocess import GunicornInternalPrometheusMetrics


def is_gunicorn(app):
    return "gunicorn" in (app.config["SERVER_SETTINGS"].get("server_software") or "")


def set_prometheus_metrics(app):
    if is_gunicorn(app):
        prometheus_metrics = GunicornInternalPrometheusMetrics.for_app_factory()
    else:
        # one registry per app, so several apps can live in one process
        prometheus_metrics = PrometheusMetrics.for_app_factory(registry=CollectorRegistry())

    prometheus_metrics.init_app(app)
    return prometheus_metrics


def set_logger(app):
    if is_gunicorn(app):
        gunicorn_logger = logging.getLogger("gunicorn.error")
        app.logger.handlers = gunicorn_logger.handlers
        app.logger.setLevel(gunicorn_logger.level)
