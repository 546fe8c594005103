"""Broadcast-CONGEST simulator and distributed minimum-degree spanning tree algorithms."""
__version__ = "0.1.0"
