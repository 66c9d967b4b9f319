"""Cancer progression extraction from cross-sectional genotype data.

CAPRESE scores candidate causes with a shrinkage-like blend of probability
raising and correlation, then filters independent progressions; the
oncotree baseline solves a maximum-weight branching.
"""

from .bootstrap import BootstrapReport, nonparametric_bootstrap, parametric_bootstrap
from .errors import (CapreseError, ConfigError, DivisionGuard, DuplicateEvent, FitError,
                     LabelMismatch, ParseError, RootNotScorable, ShapeError, SizeError,
                     Unreachable, ValidationError)
from .estimators import (ScoreMatrix, alpha, beta, correlation_score, oncotree_weight,
                         score_all, shrinkage_score)
from .forest import ProgressionForest
from .genotype import (ROOT, GenotypeMatrix, Violation, load_matrix, merge_indistinguishable,
                       read_matrix, validate_probabilities, write_matrix)
from .metrics import EdgeConfusion, edge_confusion, hamming, ted
from .probability import NoiseSpec, ProbabilityTables, corrupt_tables, empirical_tables
from .reconstruct import caprese, caprese_from_tables, oncotree, oncotree_from_tables, reconstruct
from .synthesis import (GenerativeModel, GeneratorConfig, apply_errors, apply_noise,
                        exact_distribution, exact_tables, fit_alpha, random_dag, random_forest,
                        random_tree, sample)
from .branching import max_branching

__version__ = "0.1.0"

__all__ = [
    "BootstrapReport",
    "nonparametric_bootstrap",
    "parametric_bootstrap",
    "CapreseError",
    "ConfigError",
    "DivisionGuard",
    "DuplicateEvent",
    "FitError",
    "LabelMismatch",
    "ParseError",
    "RootNotScorable",
    "ShapeError",
    "SizeError",
    "Unreachable",
    "ValidationError",
    "ScoreMatrix",
    "alpha",
    "beta",
    "correlation_score",
    "oncotree_weight",
    "score_all",
    "shrinkage_score",
    "ProgressionForest",
    "ROOT",
    "GenotypeMatrix",
    "Violation",
    "load_matrix",
    "merge_indistinguishable",
    "read_matrix",
    "validate_probabilities",
    "write_matrix",
    "EdgeConfusion",
    "edge_confusion",
    "hamming",
    "ted",
    "NoiseSpec",
    "ProbabilityTables",
    "corrupt_tables",
    "empirical_tables",
    "caprese",
    "caprese_from_tables",
    "oncotree",
    "oncotree_from_tables",
    "reconstruct",
    "GenerativeModel",
    "GeneratorConfig",
    "apply_errors",
    "apply_noise",
    "exact_distribution",
    "exact_tables",
    "fit_alpha",
    "random_dag",
    "random_forest",
    "random_tree",
    "sample",
    "max_branching",
]
