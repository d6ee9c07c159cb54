"""
Computational services of the regen-stable laboratory.
"""
from regen_stable.services.experiments import RUNNERS, run_experiment

__all__ = ["RUNNERS", "run_experiment"]
