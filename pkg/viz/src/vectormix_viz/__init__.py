"""Post-processing for vectormix runs: field panels and decay plots.

Strictly file-based: consumes the documented snapshot and CSV formats and
never links against the simulator.
"""

from .formats import Snapshot, read_series, read_snapshot
from .panels import build_decay_figure, build_panel_figure, render_decay, render_panel

__version__ = "0.1.0"
