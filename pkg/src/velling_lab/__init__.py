"""Numerical lab for the Velling-Kirillov metric on the universal Teichmuller curve."""

from .diskquad import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .experiments import EXPERIMENTS, ExperimentConfig, GridConfig, run_experiment
from .metrics import *  # noqa: F401,F403
from .prebers import *  # noqa: F401,F403
from .report import Check, Report, emit_report, report_digest
from .schwarzian import QuadDifferential, solve_pretheta, solve_schwarzian, tangent_u
from .series import *  # noqa: F401,F403
from .transport import *  # noqa: F401,F403

__version__ = "0.1.0"
