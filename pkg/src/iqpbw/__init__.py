"""Exact symbolic computations for iquantum groups: root vectors, PBW bases and integral forms."""

__version__ = "0.1.0"
