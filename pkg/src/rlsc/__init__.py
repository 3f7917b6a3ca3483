"""Runlength-constrained superimposed codes, selectors and group testing."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundReport,
    agarwal_min_length,
    bound_report,
    cheng_bound,
    lll_min_length,
    lll_min_length_best_w,
    lower_bound,
    selector_best_w,
    selector_lll_min_length,
    union_min_length,
)
from .combinatorics import (  # noqa: E402
    BitColumn,
    ConstrainedVectorSpace,
    count_constrained,
    enumerate_constrained,
    rank_constrained,
    sample_constrained,
    unrank_constrained,
)
from .construction import (  # noqa: E402
    BudgetExhausted,
    ConstructionLog,
    identity_code,
    moser_tardos_construct,
    qary_construct,
    sample_matrix,
)
from .estimators import SuperimposedCodeTester, TwoStageTester  # noqa: E402
from .group_testing import (  # noqa: E402
    SimReport,
    cover_decode,
    nagt_simulate,
    syndrome,
    two_stage_simulate,
)
from .matrix import CodeMatrix, CodeParams, Event  # noqa: E402
from .verification import (  # noqa: E402
    VerificationReport,
    WorkLimitExceeded,
    check_column_weight,
    check_runlength,
    find_violated_event,
    is_selector_exact,
    is_superimposed_exact,
    monte_carlo_check,
)
