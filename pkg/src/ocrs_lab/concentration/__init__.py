"""Empirical checks of the scaled tail bound, with classical comparators and a counterexample."""
from .bounds import bound_chernoff, bound_mcdiarmid, bound_new, scale
from .counterexample import CounterexampleReport, counterexample_starstar, exact_tail, piecewise_occupancy
from .functions import (CappedSum, CoordinateMax, MatroidRank, OccupancyDerived, SetFunction, occupancy_instance,
                        spot_check)
from .tails import TailEstimate, default_grid, empirical_tail, estimate_mean, sweep, sweep_rows

__all__ = [
    "bound_chernoff", "bound_mcdiarmid", "bound_new", "scale", "CounterexampleReport", "counterexample_starstar",
    "exact_tail", "piecewise_occupancy", "CappedSum", "CoordinateMax", "MatroidRank", "OccupancyDerived",
    "SetFunction", "occupancy_instance", "spot_check", "TailEstimate", "default_grid", "empirical_tail",
    "estimate_mean", "sweep", "sweep_rows",
]
