"""检测结果评估.

以排名变化 oracle 的告警为真值计算 precision/recall/F1,
用单侧配对 t 检验比较两种方法, 并为外部主题向量提供变化分数.
"""

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field
from scipy.spatial.distance import cosine
from scipy.stats import ttest_rel

from .config import Metric
from .exceptions import ShiftValueError
from .gbe import top_alerts

_CONSTANT_RTOL = 1e-12


class EvalReport(BaseModel):
    """一种方法相对真实告警的评估结果."""

    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)
    n_alerts_method: int = Field(ge=0)
    n_alerts_real: int = Field(ge=0)
    n_hits: int = Field(ge=0)
    zero_denominator_flags: list[str] = Field(default_factory=list)


def precision_recall_f1(alerts_method: Iterable[int], alerts_real: Iterable[int]) -> EvalReport:
    """计算命中数与 P/R/F1.

    分母为 0 的指标记为 0, 并在 `zero_denominator_flags` 中注明.

    Examples:
        >>> r = precision_recall_f1({4, 5, 9}, {5, 9, 20})
        >>> r.n_hits, round(r.f1, 4)
        (2, 0.6667)
    """
    method, real = set(alerts_method), set(alerts_real)
    hits = len(method & real)
    flags: list[str] = []

    if method:
        precision = hits / len(method)
    else:
        precision = 0.0
        flags.append("precision")
    if real:
        recall = hits / len(real)
    else:
        recall = 0.0
        flags.append("recall")
    if precision + recall > 0:
        # 等价于 2PR/(P+R)
        f1 = 2 * hits / (len(method) + len(real))
    else:
        f1 = 0.0
        flags.append("f1")

    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        n_alerts_method=len(method),
        n_alerts_real=len(real),
        n_hits=hits,
        zero_denominator_flags=flags,
    )


@dataclass(frozen=True)
class TopicVector:
    """某一周的主题权重向量."""

    values: tuple[float, ...]


def vector_change_score(cur: TopicVector, prev: TopicVector) -> float:
    """`1 - cos(cur, prev)`, 取值 [0, 2].

    Raises:
        ShiftValueError: 长度不一致, 含非有限值, 或范数为 0 (含下溢).
    """
    if len(cur.values) != len(prev.values):
        raise ShiftValueError(
            f"主题向量长度不一致: {len(cur.values)} != {len(prev.values)}"
        )
    u = np.asarray(cur.values, dtype=float)
    v = np.asarray(prev.values, dtype=float)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ShiftValueError("主题向量必须为有限实数")
    if np.linalg.norm(u) == 0 or np.linalg.norm(v) == 0:
        raise ShiftValueError("主题向量的范数不能为 0")
    return float(np.clip(cosine(u, v), 0.0, 2.0))


def topic_change_series(vectors: Mapping[int, TopicVector]) -> dict[int, float | None]:
    """对相邻周的主题向量逐周计算变化分数; 缺少上一周时为 `None`."""
    scores: dict[int, float | None] = {}
    for t in sorted(vectors):
        prev = vectors.get(t - 1)
        scores[t] = None if prev is None else vector_change_score(vectors[t], prev)
    return scores


def alerts_from_scores(scores: Mapping[int, float | None], theta_r: int) -> dict[int, bool]:
    """对外部方法 (LLR, DTM 等) 的分数序列同样取前 theta_r 周告警."""
    return top_alerts(scores, theta_r)


def paired_t_test_one_sided(x: Sequence[float], y: Sequence[float]) -> float:
    """单侧配对 t 检验, 返回 X 不优于 Y 的 p 值.

    差值在浮点误差内为常数时: 均值 > 0 返回 0, < 0 返回 1, 约为 0 返回 0.5.

    Args:
        x: 方法 X 在各数据集上的指标.
        y: 方法 Y 在相同数据集上的指标.

    Returns:
        p 值.

    Raises:
        ShiftValueError: 长度不一致或样本数少于 2.
    """
    if len(x) != len(y):
        raise ShiftValueError(f"配对样本长度不一致: {len(x)} != {len(y)}")
    if len(x) < 2:
        raise ShiftValueError("配对 t 检验至少需要 2 个样本")

    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    d = xs - ys
    mean = float(d.mean())
    tol = _CONSTANT_RTOL * max(1.0, abs(mean))
    if np.ptp(d) <= tol:
        if mean > tol:
            return 0.0
        if mean < -tol:
            return 1.0
        return 0.5
    return float(ttest_rel(xs, ys, alternative="greater").pvalue)


class ReportSummary(BaseModel):
    """多个数据集上评估结果的均值与样本标准差."""

    n_reports: int
    precision_mean: float
    precision_std: float
    recall_mean: float
    recall_std: float
    f1_mean: float
    f1_std: float


def metric_values(reports: Sequence[EvalReport], metric: Metric) -> list[float]:
    """取出每份报告的某一指标."""
    return [getattr(report, metric) for report in reports]


def summarize_reports(reports: Sequence[EvalReport]) -> ReportSummary:
    """汇总多份评估报告.

    Raises:
        ShiftValueError: 报告列表为空.
    """
    if not reports:
        raise ShiftValueError("没有可汇总的评估报告")

    def stats(metric: Metric) -> tuple[float, float]:
        values = np.asarray(metric_values(reports, metric))
        std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        return float(values.mean()), std

    p_mean, p_std = stats("precision")
    r_mean, r_std = stats("recall")
    f_mean, f_std = stats("f1")
    return ReportSummary(
        n_reports=len(reports),
        precision_mean=p_mean,
        precision_std=p_std,
        recall_mean=r_mean,
        recall_std=r_std,
        f1_mean=f_mean,
        f1_std=f_std,
    )


class ComparisonSummary(BaseModel):
    """方法与对照方法在多个数据集上的比较."""

    metric: Metric
    method: ReportSummary
    baseline: ReportSummary | None = None
    p_value: float | None = None


def compare_methods(
    method_reports: Sequence[EvalReport],
    baseline_reports: Sequence[EvalReport] = (),
    metric: Metric = "f1",
) -> ComparisonSummary:
    """汇总方法的评估结果, 有对照方法时对 `metric` 做单侧配对 t 检验.

    p 值为 "方法不优于对照" 的概率, 仅在至少 2 个数据集时计算.
    """
    summary = ComparisonSummary(metric=metric, method=summarize_reports(method_reports))
    if not baseline_reports:
        return summary
    summary.baseline = summarize_reports(baseline_reports)
    if len(method_reports) >= 2:
        summary.p_value = paired_t_test_one_sided(
            metric_values(method_reports, metric),
            metric_values(baseline_reports, metric),
        )
    return summary
