"""Sumsets built from a few translates: exact set arithmetic, selection
strategies, theorem checkers and reproducible search campaigns."""

__version__ = "0.1.0"

from ._kernels import available_backends, backend, use_backend
from .checks import (
    CheckReport,
    cd_bound,
    check_equality_inverse,
    check_freiman,
    check_stability_zp,
    check_three_translates,
    check_vosper,
)
from .continuous import (
    IntervalUnion,
    check_continuous_translates,
    discretize,
    measure_union,
    sum_with_points,
)
from .core import (
    APSpec,
    FibreDecomposition,
    ForbiddenPairs,
    ZpSet,
    ZSet,
    difference_set,
    forbidden_degree,
    min_ap_cover,
    min_ap_cover_zp,
    project_fibres,
    restricted_sumset,
    shift_gain,
    sumset,
    translate_union,
)
from .errors import BudgetExceededError, CampaignError, InvalidInputError, SumsetLabError
from .hunt import CampaignConfig, conjecture1_scan, generate_family, random_coverage_experiment, run_campaign
from .restricted import (
    RestrictedInstance,
    check_small_forbidden,
    eh_search,
    extremal_family_deg,
    extremal_family_size,
)
from .select import (
    PopularitySplit,
    SelectionResult,
    best_pair,
    best_subset_exhaustive,
    endpoint_plus_scan,
    expected_union_exact,
    fibre_strategy,
    greedy_select,
    popularity_split,
    scan_lower_bound,
)
