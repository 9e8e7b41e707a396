"""holodfrc: RIS-aided wideband holographic DFRC beamforming simulator.

Physical model (steering, channels, holographic surface), SINR metrics, the
numerical solver kernels, the alternating block optimizer, and an experiment
harness with a CLI.
"""

from .channel import ChannelSet, synthesize
from .metrics import BeamformerState, SINRReport, sinr_report
from .model import SystemModel
from .orchestrator import DEFAULT_MODE, MODES, AmResult, Mode, am_loop
from .scenario import ScenarioConfig

__all__ = [
    "AmResult",
    "BeamformerState",
    "ChannelSet",
    "DEFAULT_MODE",
    "MODES",
    "Mode",
    "ScenarioConfig",
    "SINRReport",
    "SystemModel",
    "am_loop",
    "sinr_report",
    "synthesize",
]

__version__ = "0.1.0"
