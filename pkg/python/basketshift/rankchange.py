"""周排名变化 oracle.

按每周包含各商品的篮子数取前 R 名, 以排名位移与新上榜商品计算 cps_real(t),
当未来两周内出现高于过去三周均值的分数时给出真实变化标签 alert_real(t).
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .const import NA, RANK_LOOKAHEAD_WEEKS, RANK_TRAILING_WEEKS
from .dataset import BasketSet, ItemCatalog, WeeklyDataset, incidence_matrix
from .exceptions import ParameterError, ShiftValueError


def _check_r(r: int) -> None:
    if r < 1:
        raise ParameterError(f"R 必须 >= 1, 实际为 {r}")


def top_ranked(bs: BasketSet, r: int, catalog: ItemCatalog) -> list[str]:
    """按包含商品的篮子数降序取前 R 个商品, 同数按目录顺序.

    Raises:
        ParameterError: R < 1.
    """
    _check_r(r)
    if not bs:
        return []
    counts = incidence_matrix(bs, catalog).sum(axis=0).tolist()
    bought = [i for i, c in enumerate(counts) if c > 0]
    bought.sort(key=lambda i: (-counts[i], i))
    return [catalog.items[i] for i in bought[:r]]


def rank_change_score(cur: Sequence[str], prev: Sequence[str], r: int) -> int:
    """第 t 周相对第 t-1 周的排名变化分数.

    `cur` 中第 i 名若在 `prev` 中位于第 j 名, 贡献 `(R - i) * |i - j|`;
    否则贡献 `R * (R - i)`.

    Raises:
        ParameterError: R < 1.
        ShiftValueError: 排名列表含重复商品或长度超过 R.
    """
    _check_r(r)
    for name, ranking in (("cur", cur), ("prev", prev)):
        if len(set(ranking)) != len(ranking):
            raise ShiftValueError(f"{name} 排名中存在重复商品")
        if len(ranking) > r:
            raise ShiftValueError(f"{name} 排名长度 {len(ranking)} 超过 R = {r}")

    position = {item: j for j, item in enumerate(prev)}
    total = 0
    for i, item in enumerate(cur):
        j = position.get(item)
        total += r * (r - i) if j is None else (r - i) * abs(i - j)
    return total


def rank_alerts(cps_real: Mapping[int, int | None], horizon: int) -> dict[int, bool]:
    """由 cps_real 得到真实变化标签.

    alert_real(t) 为真当且仅当第 t-3..t-1 周的分数全部有定义,
    且 `[t, min(t+2, T)]` 中存在严格大于其均值的分数.

    Returns:
        周 `1..T` 到标签的映射.
    """
    alerts: dict[int, bool] = {}
    for t in range(1, horizon + 1):
        trailing = [cps_real.get(w) for w in range(t - RANK_TRAILING_WEEKS, t)]
        if any(v is None for v in trailing):
            alerts[t] = False
            continue
        threshold = sum(v for v in trailing if v is not None)
        ahead = range(t, min(t + RANK_LOOKAHEAD_WEEKS, horizon) + 1)
        # 整数比较: v > threshold / 3
        alerts[t] = any(
            (v := cps_real.get(w)) is not None and RANK_TRAILING_WEEKS * v > threshold
            for w in ahead
        )
    return alerts


@dataclass(frozen=True)
class RankTable:
    """每周的前 R 名商品.

    Attributes:
        r: 上榜名额 R.
        ranking: 周到有序商品元组的映射.
    """

    r: int
    ranking: Mapping[int, tuple[str, ...]]


def rank_table(ds: WeeklyDataset, r: int) -> RankTable:
    """逐周计算前 R 名."""
    _check_r(r)
    return RankTable(
        r=r,
        ranking={
            t: tuple(top_ranked(ds.weeks[t], r, ds.catalog))
            for t in range(1, ds.horizon + 1)
        },
    )


@dataclass(frozen=True)
class RankChangeSeries:
    """排名变化分数与真实标签.

    Attributes:
        cps_real: 周到分数的映射, 第 1 周为 `None`.
        alert_real: 周到标签的映射.
    """

    cps_real: Mapping[int, int | None]
    alert_real: Mapping[int, bool]

    @property
    def alert_weeks(self) -> list[int]:
        """真实变化周, 升序."""
        return [t for t, flag in sorted(self.alert_real.items()) if flag]

    def to_csv(self) -> str:
        """导出 CSV: `week,cps_real,alert_real`."""
        out = ["week,cps_real,alert_real"]
        for t in sorted(self.cps_real):
            score = self.cps_real[t]
            flag = "true" if self.alert_real[t] else "false"
            out.append(f"{t},{NA if score is None else score},{flag}")
        return "\n".join(out) + "\n"


def rank_change_series(ds: WeeklyDataset, r: int) -> RankChangeSeries:
    """对整个数据集运行排名变化 oracle."""
    table = rank_table(ds, r)
    cps: dict[int, int | None] = {1: None}
    for t in range(2, ds.horizon + 1):
        cps[t] = rank_change_score(table.ranking[t], table.ranking[t - 1], r)
    return RankChangeSeries(cps_real=cps, alert_real=rank_alerts(cps, ds.horizon))


def default_theta_r(series: RankChangeSeries) -> int:
    """默认告警数: 与真实标签数相同."""
    return len(series.alert_weeks)
