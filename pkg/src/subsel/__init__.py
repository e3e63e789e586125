"""Budgeted training-data subset selection.

The toolkit scores examples by utility (perplexity plus reasoning loss),
measures diversity through cosine-similarity kernels, and selects subsets
under a budget with greedy submodular maximization, a utility-diversity
balanced greedy, and DPP / random baselines. A brute-force oracle certifies
approximation quality on small instances.
"""

__version__ = "0.1.0"

from .baselines import GENERATOR, RandomConfig, dpp_greedy_select, random_select
from .evaluation import (
    ComparisonRecord,
    CoverageStat,
    coverage_summary,
    diversity_score,
    format_comparison,
    load_results,
    objective_value,
    write_results,
)
from .formats import (
    FormatError,
    load_embeddings,
    load_scores,
    load_selection,
    load_token_probs,
    write_embeddings,
    write_scores,
    write_selection,
    write_token_probs,
)
from .greedy import MODES, GreedyConfig, greedy_maximize, utility_diversity_select
from .model import (
    EmbeddingMatrix,
    ExampleRecord,
    ScoreTable,
    SelectionResult,
    SimilarityMatrix,
    TokenProbRecord,
    ValidationError,
    check_dense_ids,
)
from .oracle import (
    APPROXIMATION_BOUND,
    OracleReport,
    brute_force_optimum,
    certify,
    certify_utility_diversity,
    report_line,
)
from .scoring import (
    DISTANCE_MODES,
    UtilityParams,
    combined_utility,
    minmax_normalize,
    pairwise_utility,
    perplexity_from_probs,
    pmi_utility,
    utility_for_record,
)
from .selectors import DppSelector, RandomSelector, SubmodularSelector, UtilityDiversitySelector
from .similarity import (
    KERNEL_MODES,
    KernelTransform,
    apply_transform,
    cosine_similarity_matrix,
    load_similarity,
    write_similarity,
)
from .submodular import (
    DEFAULT_RIDGE,
    VARIANTS,
    GainState,
    NotPositiveDefiniteError,
    SubmodularSpec,
    evaluate,
)
