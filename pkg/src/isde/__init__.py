"""Independence structure density estimation.

Select a partition of the features and a product of per-block kernel density
estimates that maximizes held-out log-likelihood.
"""
from ._backend import BACKEND
from .baselines import (FittedModel, Forest, ForestModel, IsdeFit, assemble_isde, fit_cvkde, fit_fde,
                        fit_isde, fitted_model_log_density, forest_log_density, validation_score)
from .combinatorics import (count_pair_partitions, count_partitions, count_subsets, enumerate_partitions,
                            enumerate_subsets)
from .data import (Dataset, DataError, Partition, SplitSpec, derive_seed, load_csv, rescale_unit,
                   restrict, split)
from .gaussian import (BlockStructure, blockwise_covariance, build_block_covariance, empirical_covariance,
                       gaussian_kl, run_gaussian_experiment, sample_gaussian)
from .kde import BandwidthGrid, KdeModel, log_density, make_grid, mean_log_density, select_bandwidth_cv
from .partition_space import edit_distance, edit_profile, random_partition, random_walk, walk_neighbors
from .scoring import SubsetScoreTable, gaussian_score_all_subsets, partition_score, score_all_subsets
from .solver import SolveResult, solve_best, solve_bruteforce, solve_kbest, solve_worst
from .synth import StructureSpec, SynthConfig, gen_block, gen_structure, run_synthetic_benchmark

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BandwidthGrid", "BlockStructure", "DataError", "Dataset", "FittedModel", "Forest",
    "ForestModel", "IsdeFit", "KdeModel", "Partition", "SolveResult", "SplitSpec", "StructureSpec",
    "SubsetScoreTable", "SynthConfig", "assemble_isde", "blockwise_covariance",
    "build_block_covariance", "count_pair_partitions", "count_partitions", "count_subsets",
    "derive_seed", "edit_distance", "edit_profile", "empirical_covariance", "enumerate_partitions",
    "enumerate_subsets", "fit_cvkde", "fit_fde", "fit_isde", "fitted_model_log_density",
    "forest_log_density", "gaussian_kl", "gaussian_score_all_subsets", "gen_block", "gen_structure",
    "load_csv", "log_density", "make_grid", "mean_log_density", "partition_score", "random_partition",
    "random_walk", "rescale_unit", "restrict", "run_gaussian_experiment", "run_synthetic_benchmark",
    "sample_gaussian", "score_all_subsets", "select_bandwidth_cv", "solve_best", "solve_bruteforce",
    "solve_kbest", "solve_worst", "split", "validation_score", "walk_neighbors",
]
