"""Error-rate analysis of space shift keying and spatial modulation MIMO links
over Extended Generalized-K, Generalized-K and Nakagami-m fading."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .asymptotics import (asym_pep, c_egk, c_gk, c_nakagami, c_numeric,
                          coefficient, gains)
from .errors import (ConsistencyError, ContourError, ConvergenceError,
                     DivergenceError, DomainError, SmFadingError)
from .exactperf import (SM, SSK, Mode, SnrPoint, SystemConfig, abep_signal_mpsk,
                        abep_sm_bound, abep_ssk_bound, diversity_report, mgf_z,
                        pep_exact)
from .fading import (BranchPair, EgkLinkParams, GeneralizedK, Nakagami,
                     hankel_kernel, mgf_link_snr, sample_envelope)
from .montecarlo import StopRule, simulate_ber
