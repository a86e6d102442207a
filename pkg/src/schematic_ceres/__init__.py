"""Schematic CERES: proof schemata, characteristic clause sets, resolution
refutation schemata and Herbrand sequents, with the ECA case study."""

__version__ = "0.1.0"
