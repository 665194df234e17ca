"""daytopics: per-day topic detection for short social-media text.

Sentence-level embedding, seeded k-means++ clustering with small-cluster
merging, TextRank summaries and keywords, TF-IDF and LDA baselines, and a
top-k precision/recall/F1 evaluation harness, all batch-driven from files.
"""

__version__ = "0.1.0"

from .baselines import (
    GibbsLda,
    LdaModel,
    TfidfMatrix,
    TfidfVectorizer,
    densify_for_clustering,
    lda_fit,
    lda_topic_keywords,
    tfidf_fit_transform,
)
from .clustering import (
    ClusterModel,
    KMeans,
    MergePlan,
    kmeans_fit,
    kmeans_pp_init,
    merge_small,
    top_clusters,
)
from .corpus import (
    DayPartition,
    Sentence,
    Tweet,
    clean_and_segment,
    clean_corpus,
    index_sentences,
    ingest,
    partition_by_day,
    remove_stopwords,
    tokenize,
    word_frequencies,
)
from .encoders import (
    EmbeddingMatrix,
    EncoderSpec,
    HashedNgramEncoder,
    encode_sentences,
    load_external,
    similarity,
    write_emb1,
)
from .errors import (
    ConfigError,
    DaytopicsError,
    EmbeddingLoadError,
    MergeError,
    ParseError,
    StageError,
    ValidationError,
)
from .evaluation import (
    EvalReport,
    GoldTopic,
    GoldTopicSet,
    compare_methods,
    evaluate_method,
    format_comparison,
    load_gold,
    match_predictions,
    precision_recall_f1_at_k,
    score_day,
)
from .pipeline import (
    RunConfig,
    RunManifest,
    evaluate_run,
    parse_config,
    reservoir_sample,
    run_baseline,
    run_pipeline,
)
from .projection import Projection2D, drop_outliers, pca_2d
from .stopwords import ENGLISH_STOPWORDS, load_stoplist
from .summarizer import (
    RankVector,
    SimilarityGraph,
    TopicSummary,
    build_graph,
    extract_keywords,
    summarize_cluster,
    textrank,
)
