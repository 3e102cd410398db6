"""Entanglement dynamics of two interacting qubits coupled to local baths."""
from .analytics import AnalyticParams, EsdVerdict, c_tilde_decay, c_tilde_dephasing
from .concurrence import ConcurrenceValue, concurrence_general, concurrence_x, spin_flip
from .core import (Environment, ModelParams, WernerFamilyInit, XState, project_to_x_form,
                   to_density_matrix)
from .errors import (ConfigError, GridTooCoarse, InvalidState, ModelMismatch,
                     NumericalBreakdown, PositivityViolation, QubitDynError, StepTooLarge)
from .liouvillian import build_superoperator, decay_rhs, dephasing_rhs, hamiltonian
from .propagators import IntegratorConfig, Method, StateTrajectory, integrate_exp, integrate_rk
from .timeline import EntanglementTimeline, extract_timeline

__version__ = "0.1.0"
