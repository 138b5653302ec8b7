"""iabsim: slot-level simulator for multi-hop IAB backhaul networks.

Models a donor-rooted relay grid with line-of-sight mmWave links that toggle
between available and blocked (two-state Markov chain), uplink flows that
duplicate every packet over two node-disjoint routes, and per-slot link
scheduling under pairwise interference constraints. Three schedulers are
provided: "hybrid" (queue differential plus destination data age), "queue"
(backpressure only) and "age" (age only).
"""

from iabsim.config import ScenarioConfig, parse_config
from iabsim.engine import SimulationResult, run_simulation
from iabsim.kernel import active_lane, compiled_available

__version__ = "0.1.0"

__all__ = [
    "ScenarioConfig",
    "SimulationResult",
    "active_lane",
    "compiled_available",
    "parse_config",
    "run_simulation",
    "__version__",
]
