"""Exact group-ring checks around the Alon-Jaeger-Tarsi conjecture."""

__version__ = "0.1.0"
