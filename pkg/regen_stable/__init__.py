"""
regen-stable: simulation and numerical verification of stable-regenerative
multiple-stable processes.
"""

__version__ = "1.0.0"
