"""Tsallis-q entanglement of qubit systems and its monogamy and polygamy relations."""

from .concurrence import coa_2q, concurrence_2q, concurrence_pure, spin_flip
from .entropy import EntropicIndex, tsallis_entropy, von_neumann
from .gq_analysis import g_q, g_q_d1, g_q_d2
from .qmath import DensityMatrix, DomainError, PureState, QubitCut, partial_trace
from .roof import Budget, roof_extremize
from .tsallis_ent import eof_2q, teoa_2q_lower, tq_2q, tq_mixed_bound, tq_pure

__version__ = "0.1.0"
