"""Approximation and online (secretary) algorithms for non-monotone submodular maximization."""

from .bruteforce import BruteForceResult, brute_force_opt
from .constraints import (GraphicMatroid, IndependenceSystem, IntersectionSystem, KnapsackConstraint,
                          PartitionMatroid, UniformMatroid, is_independent, matroid_axiom_check, p_parameter,
                          rank_and_lower_rank)
from .core import (CoverageFunction, CoverageMinusCostFunction, CoverGadget, CutFunction, GroundSet,
                   ModularFunction, SetFunction, check_monotone, check_nonneg_and_zero, check_submodular,
                   evaluate, marginal, restrict)
from .errors import (CapExceeded, ContractViolation, GenerationFailed, InvalidConfig, InvalidParameter,
                     InvalidSubset, SubmaxError)
from .experiments import ExperimentConfig, RunReport, emit_report, run_experiment
from .instances import Instance, generate_corpus, load_instance, save_instance
from .lowerbound import optimal_policy_value, two_gadget_lower_bound
from .offline import (greedy_cardinality, greedy_psystem, knapsack_candidate_collection, submod_max_cardinality,
                      submod_max_knapsack, submod_max_psystem)
from .rng import Rng
from .secretary import (AdviceCardinalityPolicy, DynkinPolicy, MatroidSecretaryPolicy, PartitionContiguousPolicy,
                        PartitionGeneralPolicy, Stream, SubmodularSecretariesPolicy, TauGrid, monte_carlo_eval,
                        run_policy, threshold_online)
from .unconstrained import FmvBackend, fmv_exact, fmv_local_search, fmv_random_subset

__version__ = "0.1.0"
