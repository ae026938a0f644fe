"""basketshift 文件接口.

提供篮子数据的 `loads`, `load`, `dumps`, `dump`,
以及品类文件, 告警/分数/主题向量 CSV 和阶段表 JSON 的读取.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import IO, Literal

import numpy as np
import pandas as pd
from pydantic import TypeAdapter, ValidationError

from .config import InputFormat
from .const import NA
from .dataset import WeeklyDataset, format_baskets, parse_baskets, read_table
from .evaluation import TopicVector, alerts_from_scores, topic_change_series
from .exceptions import ParseError, ShiftValueError
from .synth import PhaseConfig

SeriesKind = Literal["alerts", "scores", "topics"]

_schedule_adapter = TypeAdapter(list[PhaseConfig])


def loads(text: str, fmt: InputFormat = "csv") -> WeeklyDataset:
    """从文本解析篮子数据.

    Args:
        text: CSV 或 JSONL 文本.
        fmt: 输入格式.

    Returns:
        WeeklyDataset: 数据集.

    Examples:
        >>> ds = loads("week,basket_id,item\\n1,b1,apple\\n1,b1,bread\\n2,b2,apple\\n")
        >>> ds.horizon, ds.counts, ds.catalog.items
        (2, {1: 1, 2: 1}, ('apple', 'bread'))
    """
    return parse_baskets(text.splitlines(), fmt)


def load(fp: IO[str], fmt: InputFormat = "csv") -> WeeklyDataset:
    """从文本文件对象解析篮子数据."""
    return parse_baskets(fp, fmt)


def dumps(ds: WeeklyDataset, fmt: InputFormat = "csv") -> str:
    """把数据集序列化为 CSV 或 JSONL 文本."""
    return format_baskets(ds, fmt)


def dump(ds: WeeklyDataset, fp: IO[str], fmt: InputFormat = "csv") -> None:
    """把数据集写入文本文件对象."""
    fp.write(dumps(ds, fmt))


def load_category(lines: Iterable[str]) -> set[str]:
    """读取品类文件: 每行一个商品 ID, 忽略空行和 `#` 注释行."""
    keep: set[str] = set()
    for raw in lines:
        item = raw.strip()
        if item and not item.startswith("#"):
            keep.add(item)
    return keep


def _weeks(table: pd.DataFrame) -> pd.Series:
    bad = ~table["week"].str.fullmatch(r"[0-9]+") | (table["week"].str.lstrip("0") == "")
    if bad.any():
        lineno = int(bad.idxmax())
        raise ParseError(f"week 必须为正整数, 实际为 {table.at[lineno, 'week']!r}", line=lineno)
    return table["week"].astype("int64")


def _numbers(column: pd.Series, *, allow_na: bool) -> pd.Series:
    """把字符串列转为有限浮点数; `NA` 在 `allow_na` 时转为 NaN."""
    na = column == NA
    values = pd.to_numeric(column.where(~na), errors="coerce")
    bad = ~np.isfinite(values.to_numpy(dtype=float)) & ~na.to_numpy()
    if not allow_na:
        bad |= na.to_numpy()
    if bad.any():
        lineno = int(column.index[np.flatnonzero(bad)[0]])
        raise ParseError(f"不是有效的有限数值: {column[lineno]!r}", line=lineno)
    return values


@dataclass(frozen=True)
class SeriesFile:
    """一份按周的方法输出.

    Attributes:
        kind: `alerts` (带告警列), `scores` (`week,score`) 或 `topics` (`week,v0,...`).
        alerts: 告警周 (仅 alerts).
        scores: 周到分数 (scores 与 topics; topics 为相邻周的向量变化分数).
    """

    kind: SeriesKind
    alerts: frozenset[int] = frozenset()
    scores: Mapping[int, float | None] | None = None

    def alert_weeks(self, theta_r: int) -> set[int]:
        """告警周; 分数型输出取前 theta_r 周."""
        if self.scores is None:
            return set(self.alerts)
        return {t for t, flag in alerts_from_scores(self.scores, theta_r).items() if flag}


def _topic_vectors(table: pd.DataFrame) -> dict[int, TopicVector]:
    header = list(table.columns)
    if header[0] != "week" or header[1:] != [f"v{k}" for k in range(len(header) - 1)]:
        raise ParseError("主题向量 CSV 表头必须为 week,v0,v1,...", line=table.attrs["header_line"])
    weeks = _weeks(table)
    columns = [_numbers(table[name], allow_na=False) for name in header[1:]]
    if columns:
        values = pd.concat(columns, axis=1).to_numpy(dtype=float)
    else:
        values = np.empty((len(table), 0))
    return {int(week): TopicVector(tuple(map(float, row))) for week, row in zip(weeks, values)}


def load_topic_vectors(lines: Iterable[str]) -> dict[int, TopicVector]:
    """读取主题向量 CSV: 表头 `week,v0,v1,...`, 值必须为有限实数."""
    return _topic_vectors(read_table(lines))


def load_series(lines: Iterable[str]) -> SeriesFile:
    """读取方法输出 CSV, 按表头识别类型.

    - 含以 `alert` 开头的列 (如 `scores.csv` 的 `alert`, `rank_change.csv` 的 `alert_real`):
      告警文件, 值为 `true` 的周即告警周.
    - `week,score`: 外部分数序列, `NA` 表示无定义.
    - `week,v0,v1,...`: 主题向量, 转为相邻周的向量变化分数.

    Raises:
        ParseError: 表头无法识别或数值无效.
    """
    table = read_table(lines)
    header = list(table.columns)
    header_line = table.attrs["header_line"]
    if header[0] != "week":
        raise ParseError("CSV 第一列必须为 week", line=header_line)

    alert_cols = [name for name in header if name.startswith("alert")]
    if alert_cols:
        flags = table[alert_cols[0]].str.lower()
        bad = ~flags.isin(["true", "false"])
        if bad.any():
            lineno = int(bad.idxmax())
            raise ParseError(
                f"告警列只能为 true/false, 实际为 {table.at[lineno, alert_cols[0]]!r}",
                line=lineno,
            )
        weeks = _weeks(table)
        return SeriesFile(kind="alerts", alerts=frozenset(int(t) for t in weeks[flags == "true"]))

    if header == ["week", "score"]:
        weeks = _weeks(table)
        values = _numbers(table["score"], allow_na=True)
        scores = {
            int(t): None if np.isnan(v) else float(v)
            for t, v in zip(weeks, values.to_numpy(dtype=float))
        }
        return SeriesFile(kind="scores", scores=scores)

    if len(header) > 1 and header[1] == "v0":
        return SeriesFile(kind="topics", scores=topic_change_series(_topic_vectors(table)))

    raise ParseError(f"无法识别的 CSV 表头: {','.join(header)}", line=header_line)


def load_schedule(text: str) -> list[PhaseConfig]:
    """读取阶段表 JSON (PhaseConfig 对象的列表).

    Raises:
        ShiftValueError: JSON 无效或阶段配置不合法.
    """
    try:
        schedule = _schedule_adapter.validate_json(text)
    except ValidationError as e:
        raise ShiftValueError(f"阶段表无效: {e}") from e
    if not schedule:
        raise ShiftValueError("阶段表不能为空")
    return schedule
