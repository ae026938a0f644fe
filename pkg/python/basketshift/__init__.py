"""基于共现图熵的购物篮结构变化检测库.

提供周数据集的解析 (loads/load) 与序列化 (dumps/dump), PMI 共现图,
GBE 变化检测, 排名变化 oracle, 评估与合成数据生成.
"""

from .api import dump, dumps, load, load_category, load_schedule, load_series, loads
from .config import DetectionParams, GraphFormat, InputFormat, RunConfig
from .dataset import (
    Basket,
    ItemCatalog,
    ProportionTable,
    ProportionVector,
    WeeklyDataset,
    item_proportions,
    parse_baskets,
    proportion_table,
    restrict_category,
    window,
)
from .evaluation import (
    EvalReport,
    TopicVector,
    alerts_from_scores,
    compare_methods,
    paired_t_test_one_sided,
    precision_recall_f1,
    summarize_reports,
    topic_change_series,
    vector_change_score,
)
from .exceptions import (
    GenerationError,
    ParameterError,
    ParseError,
    ShiftError,
    ShiftValueError,
    WeekRangeError,
)
from .gbe import (
    ChangeScoreSeries,
    ClusterFrequencies,
    change_score,
    cluster_frequencies,
    detect,
    gbe_series,
    graph_entropy,
    nearest_cluster,
    score_series,
    snapshot,
    top_alerts,
)
from .graph import (
    ClusterPartition,
    CooccurrenceGraph,
    EdgeScore,
    build_graph,
    classify_bridges,
    connected_components,
    cooccurrence_scores,
    export_graph,
    select_edges,
)
from .rankchange import (
    RankChangeSeries,
    RankTable,
    rank_alerts,
    rank_change_score,
    rank_change_series,
    rank_table,
    top_ranked,
)
from .runner import RunResult, run
from .synth import PhaseConfig, SynthGroundTruth, four_phase_schedule, generate

__all__ = [
    "Basket",
    "ChangeScoreSeries",
    "ClusterFrequencies",
    "ClusterPartition",
    "CooccurrenceGraph",
    "DetectionParams",
    "EdgeScore",
    "EvalReport",
    "GenerationError",
    "GraphFormat",
    "InputFormat",
    "ItemCatalog",
    "ParameterError",
    "ParseError",
    "PhaseConfig",
    "ProportionTable",
    "ProportionVector",
    "RankChangeSeries",
    "RankTable",
    "RunConfig",
    "RunResult",
    "ShiftError",
    "ShiftValueError",
    "SynthGroundTruth",
    "TopicVector",
    "WeekRangeError",
    "WeeklyDataset",
    "alerts_from_scores",
    "build_graph",
    "change_score",
    "classify_bridges",
    "cluster_frequencies",
    "compare_methods",
    "connected_components",
    "cooccurrence_scores",
    "detect",
    "dump",
    "dumps",
    "export_graph",
    "four_phase_schedule",
    "gbe_series",
    "generate",
    "graph_entropy",
    "item_proportions",
    "load",
    "load_category",
    "load_schedule",
    "load_series",
    "loads",
    "nearest_cluster",
    "paired_t_test_one_sided",
    "parse_baskets",
    "precision_recall_f1",
    "proportion_table",
    "rank_alerts",
    "rank_change_score",
    "rank_change_series",
    "rank_table",
    "restrict_category",
    "run",
    "score_series",
    "select_edges",
    "snapshot",
    "summarize_reports",
    "top_alerts",
    "top_ranked",
    "topic_change_series",
    "vector_change_score",
    "window",
]
