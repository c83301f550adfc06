"""Hot-kernel backend selection.

Default lane is numba-jitted; set HKTCCD_NO_NUMBA=1 (or any of 1/true/yes)
to force the pure-numpy/python lane. The numpy lane is also the automatic
fallback when numba is not importable. Selection happens once at import;
both lanes stay importable directly for parity tests and benchmarks.
"""

import os

_flag = os.environ.get("HKTCCD_NO_NUMBA", "").strip().lower()
FORCE_NUMPY = _flag in ("1", "true", "yes")

if FORCE_NUMPY:
    from . import bem_numpy as bem
    from . import sim_numpy as sim
else:
    try:
        from . import bem_numba as bem
        from . import sim_numba as sim
    except ImportError:  # numba missing or broken: degrade, stay usable
        from . import bem_numpy as bem
        from . import sim_numpy as sim

BACKEND = bem.BACKEND_NAME

solve_sections = bem.solve_sections
simulate_loop = sim.simulate_loop

FLOW_CONSTANT = sim.FLOW_CONSTANT
FLOW_STEP = sim.FLOW_STEP
FLOW_SINUSOID = sim.FLOW_SINUSOID
LAW_OPEN_LOOP = sim.LAW_OPEN_LOOP
LAW_LINEAR = sim.LAW_LINEAR
LAW_QUADRATIC = sim.LAW_QUADRATIC
