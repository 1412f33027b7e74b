"""Spin-1/2 dynamics in time-dependent fields.

Forward integration (``propagate``), field synthesis from prescribed
trajectories (``synthesize``), transition probabilities (``resonance``) and
evolution-loop certification with phase bookkeeping (``loops``).
"""

__version__ = "0.1.0"
