"""基于图的熵 (GBE) 变化检测.

把窗口内的每个篮子分配给余弦相似度最高的簇, 用簇频率计算熵 Hg(t),
再由 Hg 相对前 delta_t 周均值的下降得到变化分数 cps(t), 取前 theta_r 周告警.

熵在内部以 nats 计算, 告警基于 nats 分数排序, 输出时再换算为 `log_base` 单位,
因此告警与对数底无关.
"""

import math
from collections.abc import Collection, Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.stats import entropy

from .config import DetectionParams
from .const import FLOAT_DECIMALS, NA
from .dataset import Basket, BasketSet, ItemCatalog, WeeklyDataset, incidence_matrix, window
from .exceptions import ParameterError
from .graph import ClusterPartition, CooccurrenceGraph, build_graph, connected_components
from .log import logger


def nearest_cluster(
    basket: Basket | Collection[str],
    partition: ClusterPartition | Sequence[Collection[str]],
) -> int | None:
    """返回与篮子余弦相似度最高的簇编号.

    `cos = |basket ∩ cluster| / sqrt(|basket ∩ 窗口商品| * |cluster|)`.
    分母中的篮子规模对所有簇相同, 因此比较 `overlap^2 / |cluster|` 的精确有理数.
    同分时取编号最小的簇.

    Args:
        basket: 篮子或商品集合.
        partition: 簇划分, 也接受任意簇列表.

    Returns:
        簇编号; 篮子与窗口商品没有交集时返回 `None`.
    """
    items = basket.items if isinstance(basket, Basket) else frozenset(basket)
    clusters = partition.clusters if isinstance(partition, ClusterPartition) else partition

    best: int | None = None
    best_overlap, best_size = 0, 1
    for cid, cluster in enumerate(clusters):
        overlap = len(items.intersection(cluster))
        if overlap == 0:
            continue
        size = len(cluster)
        if best is None or overlap * overlap * best_size > best_overlap * best_overlap * size:
            best, best_overlap, best_size = cid, overlap, size
    return best


@dataclass(frozen=True)
class ClusterFrequencies:
    """每个簇被分配到的篮子数.

    Attributes:
        counts: 按簇编号排列的计数.
    """

    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        """可分配篮子总数."""
        return sum(self.counts)


def cluster_frequencies(bs: BasketSet, partition: ClusterPartition) -> ClusterFrequencies:
    """统计窗口内每个簇作为最近簇的篮子数, 无法分配的篮子不计入."""
    n_clusters = len(partition)
    if not bs or n_clusters == 0:
        return ClusterFrequencies(counts=(0,) * n_clusters)

    local = ItemCatalog.of(partition.items)
    x = incidence_matrix(bs, local)
    member = np.zeros((len(local), n_clusters), dtype=np.int64)
    for item, cid in partition.membership.items():
        member[local.index[item], cid] = 1

    overlap = x @ member
    sizes = member.sum(axis=0)
    # overlap^2 / size 为小整数之比, 相等的有理数得到相等的浮点数
    closeness = overlap * overlap / sizes
    assignable = overlap.max(axis=1) > 0
    nearest = np.argmax(closeness, axis=1)

    skipped = int((~assignable).sum())
    if skipped:
        logger.warning("%d 个篮子与窗口商品没有交集, 已跳过", skipped)

    counts = np.bincount(nearest[assignable], minlength=n_clusters)
    return ClusterFrequencies(counts=tuple(int(c) for c in counts))


def graph_entropy(freqs: ClusterFrequencies, log_base: float | None = 2.0) -> float | None:
    """簇频率分布的香农熵.

    计数为 0 的簇贡献 0. `log_base=None` 表示自然对数 (nats).

    Returns:
        熵值; 总数为 0 时返回 `None`.

    Raises:
        ParameterError: log_base 不大于 1.
    """
    if log_base is not None and not log_base > 1.0:
        raise ParameterError(f"log_base 必须大于 1, 实际为 {log_base}")
    if freqs.total == 0:
        return None
    # entr(1) 为 -0.0, 加 0.0 归一
    return float(entropy(freqs.counts, base=log_base)) + 0.0


@dataclass(frozen=True)
class WindowSnapshot:
    """一个窗口的中间结果."""

    week: int
    baskets: tuple[Basket, ...]
    graph: CooccurrenceGraph
    partition: ClusterPartition
    freqs: ClusterFrequencies


def snapshot(ds: WeeklyDataset, t: int, params: DetectionParams) -> WindowSnapshot:
    """构建第 t 周窗口的共现图, 划分与簇频率."""
    bs = window(ds, t, params.delta_t)
    graph = build_graph(bs, ds.catalog, params.rho)
    partition = connected_components(graph.items, graph.edges)
    return WindowSnapshot(
        week=t,
        baskets=bs,
        graph=graph,
        partition=partition,
        freqs=cluster_frequencies(bs, partition),
    )


def _nat_series(
    ds: WeeklyDataset, params: DetectionParams
) -> tuple[dict[int, float | None], dict[int, int]]:
    hg: dict[int, float | None] = {}
    n_clusters: dict[int, int] = {}
    for t in range(1, ds.horizon + 1):
        snap = snapshot(ds, t, params)
        hg[t] = graph_entropy(snap.freqs, None)
        n_clusters[t] = len(snap.partition)
        if hg[t] is None:
            logger.debug("第 %d 周窗口没有可分配的篮子, Hg 无定义", t)
    return hg, n_clusters


def _scaled(values: Mapping[int, float | None], scale: float) -> dict[int, float | None]:
    return {t: None if v is None else v / scale for t, v in values.items()}


def gbe_series(ds: WeeklyDataset, params: DetectionParams) -> dict[int, float | None]:
    """逐周计算 Hg(t), 单位为 `params.log_base`.

    Returns:
        周序号到 Hg 的映射; 窗口内没有可分配篮子的周为 `None`.
    """
    hg, _ = _nat_series(ds, params)
    return _scaled(hg, params.log_scale)


def change_score(hg: Mapping[int, float | None], t: int, delta_t: int) -> float | None:
    """变化分数 `max(前 delta_t 周 Hg 均值 - Hg(t), 0)`.

    均值只取已定义的前序周 (序列开头允许部分均值).

    Returns:
        分数; Hg(t) 无定义或没有任何已定义前序周时为 `None`.
    """
    current = hg.get(t)
    if current is None:
        return None
    prior = [v for dt in range(1, delta_t + 1) if (v := hg.get(t - dt)) is not None]
    if not prior:
        return None
    return max(math.fsum(prior) / len(prior) - current, 0.0)


def top_alerts(cps: Mapping[int, float | None], theta_r: int) -> dict[int, bool]:
    """在分数最高的 theta_r 个已定义周告警, 同分取较早的周.

    Raises:
        ParameterError: theta_r < 1.
    """
    if theta_r < 1:
        raise ParameterError(f"theta_r 必须 >= 1, 实际为 {theta_r}")
    defined = [(v, t) for t, v in cps.items() if v is not None]
    chosen = {t for _, t in sorted(defined, key=lambda vt: (-vt[0], vt[1]))[:theta_r]}
    return {t: t in chosen for t in sorted(cps)}


def _fmt(value: float | None) -> str:
    return NA if value is None else f"{value:.{FLOAT_DECIMALS}f}"


@dataclass(frozen=True)
class ChangeScoreSeries:
    """一种方法的逐周 Hg, cps 与告警.

    Attributes:
        hg: 周到熵 (单位为 log_base) 的映射.
        cps: 周到变化分数的映射.
        alerts: 周到是否告警的映射.
        log_base: 对数底.
        n_clusters: 每周窗口的簇数.
    """

    hg: Mapping[int, float | None]
    cps: Mapping[int, float | None]
    alerts: Mapping[int, bool]
    log_base: float
    n_clusters: Mapping[int, int]

    @property
    def alert_weeks(self) -> list[int]:
        """告警周, 升序."""
        return [t for t, flag in sorted(self.alerts.items()) if flag]

    def to_csv(self) -> str:
        """导出 CSV: `week,hg,cps_gbe,alert`, 无定义值写 `NA`."""
        out = ["week,hg,cps_gbe,alert"]
        out.extend(
            f"{t},{_fmt(self.hg[t])},{_fmt(self.cps[t])},{'true' if self.alerts[t] else 'false'}"
            for t in sorted(self.hg)
        )
        return "\n".join(out) + "\n"


def _scores(
    ds: WeeklyDataset, params: DetectionParams
) -> tuple[dict[int, float | None], dict[int, float | None], dict[int, int]]:
    hg_nat, n_clusters = _nat_series(ds, params)
    cps_nat = {t: change_score(hg_nat, t, params.delta_t) for t in hg_nat}
    return hg_nat, cps_nat, n_clusters


def _series(
    hg_nat: Mapping[int, float | None],
    cps_nat: Mapping[int, float | None],
    alerts: Mapping[int, bool],
    n_clusters: Mapping[int, int],
    params: DetectionParams,
) -> ChangeScoreSeries:
    scale = params.log_scale
    return ChangeScoreSeries(
        hg=_scaled(hg_nat, scale),
        cps=_scaled(cps_nat, scale),
        alerts=alerts,
        log_base=params.log_base,
        n_clusters=n_clusters,
    )


def score_series(ds: WeeklyDataset, params: DetectionParams) -> ChangeScoreSeries:
    """只计算逐周 Hg 与 cps, 不发出告警.

    参照标签没有告警时告警数为 0, 此时所有周的 `alert` 都为假. 忽略 `params.theta_r`.
    """
    hg_nat, cps_nat, n_clusters = _scores(ds, params)
    return _series(hg_nat, cps_nat, dict.fromkeys(cps_nat, False), n_clusters, params)


def detect(ds: WeeklyDataset, params: DetectionParams) -> ChangeScoreSeries:
    """完整的 GBE 检测流水线.

    Args:
        ds: 数据集.
        params: 检测参数, 必须给出 theta_r.

    Returns:
        ChangeScoreSeries: 逐周结果.

    Raises:
        ParameterError: 未给出 theta_r.
    """
    if params.theta_r is None:
        raise ParameterError("detect 需要 theta_r")

    hg_nat, cps_nat, n_clusters = _scores(ds, params)
    alerts = top_alerts(cps_nat, params.theta_r)
    logger.debug("告警周: %s", [t for t, flag in alerts.items() if flag])
    return _series(hg_nat, cps_nat, alerts, n_clusters, params)
