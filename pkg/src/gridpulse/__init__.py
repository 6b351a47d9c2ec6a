"""Outage decision-support pipeline: ingestion lifecycle, vulnerability
ranking, statistical analytics, influence-graph prediction, HTTP API and
report rendering."""

__version__ = "0.1.0"
