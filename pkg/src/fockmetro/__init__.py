"""Metrological power and photon-number exposure of two-mode optical probes."""

__version__ = "0.1.0"
