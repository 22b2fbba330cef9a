"""Detection and scoring of large publishing consortia in bibliographic corpora.

The pipeline ingests article records, finds consortia as connected
components of an author-overlap graph, scores each consortium's
field-normalized citation impact (MNLCS) and degree of alphabetical author
ordering, and can generate synthetic corpora with planted consortia for
ground-truth validation.
"""

from .authorship import (
    ConsortiumAlpha,
    alpha_pair_counts,
    alpha_score,
    classify_alpha,
    consortium_alpha,
    order_key,
)
from .cluster import (
    BRUTE_FORCE_GUARD,
    CandidatePair,
    TooLarge,
    brute_force_cluster,
    build_candidate_pairs,
    cluster_consortia,
    link_predicate,
    qualifying_positions,
    shared_authors,
)
from .impact import (
    MissingStratum,
    MnlcsResult,
    build_norm_table,
    mnlcs,
    nlcs,
    read_norm_table,
    write_norm_table,
)
from .ingest import (
    Corpus,
    DuplicateArticleId,
    MalformedLine,
    UnknownArticleId,
    dedupe_authors,
    load_corpus,
    parse_corpus,
    write_corpus,
)
from .model import (
    AlphaBand,
    Article,
    AuthorRef,
    CitationModel,
    ClusterParams,
    Consortium,
    ConsortiumReport,
    EmptyArticleId,
    EmptyAuthors,
    EmptyFields,
    InvalidSpec,
    NegativeCitations,
    NormTable,
    OrderingPolicy,
    OutOfRange,
    OverlapMode,
    PlantedSpec,
    StratumStat,
    SynthSpec,
    ValidationError,
    normalize_name,
    satisfies_invariants,
    validate_article,
)
from .stats import (
    BandTally,
    ConstantInput,
    CorrelationSummary,
    LengthMismatch,
    SizeHistogram,
    SpearmanResult,
    TooShort,
    correlate_consortia,
    size_distribution,
    spearman,
    tally_bands,
)
from .synth import (
    DetectionMetrics,
    GroundTruth,
    SynthResult,
    evaluate_detection,
    generate_corpus,
    read_ground_truth,
    write_ground_truth,
)

__version__ = "0.1.0"
