"""Robust tensor ring completion with half-quadratic weighting and coarse-to-fine refinement."""

from .c2f import C2FResult, PatchPlan, RankRule, global_complete, run_c2f, run_c2f_detailed
from .config import ConfigError, RunConfig, load_config, parse_config
from .corrupt import CorruptionError, CorruptionSpec, corrupt, psnr
from .fileio import FormatError, read_netpbm, read_trt, write_netpbm, write_trt
from .hqwtrr import DivergenceError, SolveReport, SolverConfig, solve
from .loss import AdaptiveC, Estimator
from .rng import Streams
from .synth import TrCores, random_tr_tensor, tensor_from_cores
from .tensor import tr_fold, tr_unfold

__version__ = "0.1.0"
