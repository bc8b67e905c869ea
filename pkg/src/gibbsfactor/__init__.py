"""Relative pressure sequences and Gibbs properties of one-block factor maps.

Typical use::

    from gibbsfactor import build_system, build_factor, TwoBlockPotential, h_table
    X = build_system(3, [[0, 1, 1], [1, 1, 0], [1, 0, 1]])
    Y = build_system(2, [[0, 1], [1, 1]])
    fs = build_factor(X, Y, [1, 2, 2])
    h = h_table(fs, TwoBlockPotential.zero(X), 12)
"""
__version__ = "0.1.0"

from .errors import (BadDimension, CaseMismatch, ConfigError, DepthOverflow, EmptyFiber,
                     GibbsFactorError, InsufficientDepth, NotIrreducible, NotShiftCommuting,
                     NotStochastic, NotSurjective, SettingCViolation, SupportMismatch,
                     UndefinedAtPoint, UndefinedBranch, ZeroMass, ZeroMatrix, ZeroRowOrColumn)
from .sft import (StructureReport, TransitionSystem, build_system, format_word, full_shift,
                  golden_mean_shift, is_irreducible, parse_word, structure_report, words)
from .factor import (FactorSystem, FiberMixingReport, SettingCProfile, build_factor,
                     fiber_submixing, preimage_words, settingc_profile)
from .tables import WordTable, custom_table
from .sequences import (AdditivityReport, RatioEstimates, SandwichResult, TwoBlockPotential,
                        additivity_report, g_table, h_table, measure_ratio_estimates,
                        ratio_potential_estimates, sandwich_check)
from .jordan import (Jordan2x2Report, RatioLimits, WeightMatrices, block_product, closed_form,
                     jordan2x2, pattern_value, ratio_limits, weight_matrices)
from .hhat import (FactorClassification, PiecewisePotential, PointClass, build_hhat,
                   classify_factor, point_class)
from .measures import (GibbsDiagnostics, MarkovMeasure, bernoulli, check_gibbs_on_domain,
                       cylinder_table, gibbs_diagnostics_vs_potential,
                       gibbs_diagnostics_vs_sequence, gibbs_from_potential, markov_measure,
                       parry_measure, perron, pushforward)
from .config import RunConfig, load_config, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
