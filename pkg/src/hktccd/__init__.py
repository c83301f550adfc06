"""Control co-design toolkit for hydrokinetic turbines.

Co-optimizes blade geometry (per-segment chord and twist) and torque
control (open-loop trajectory or fixed feedback gain) for energy capture,
and evaluates robustness of the resulting designs under inflow uncertainty
and sensor noise.
"""

__version__ = "0.1.0"
