"""按周索引的篮子数据.

提供商品目录 `ItemCatalog`, 篮子 `Basket`, 周数据集 `WeeklyDataset`,
以及解析, 序列化, 品类过滤, 窗口切片和比例特征导出.
"""

import io
import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, StrictInt, ValidationError

from .config import InputFormat
from .const import CSV_HEADER, FLOAT_DECIMALS
from .exceptions import ParameterError, ParseError, ShiftValueError, WeekRangeError
from .log import get_line_context, logger


@dataclass(frozen=True)
class ItemCatalog:
    """按字典序排列的商品目录.

    目录顺序决定下游所有的平局规则 (边选择, 簇编号, 排名).

    Attributes:
        items: 严格递增的商品 ID 元组.
        index: 商品 ID 到 0 起序号的映射.
    """

    items: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for prev, cur in zip(self.items, self.items[1:]):
            if prev >= cur:
                raise ShiftValueError(
                    f"商品目录必须严格按字典序排列且无重复: {prev!r} >= {cur!r}"
                )
        object.__setattr__(self, "index", {item: i for i, item in enumerate(self.items)})

    @classmethod
    def of(cls, items: Iterable[str]) -> "ItemCatalog":
        """由任意商品集合构建目录 (去重并排序)."""
        return cls(tuple(sorted(set(items))))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[str]:
        return iter(self.items)

    def __contains__(self, item: object) -> bool:
        return item in self.index


@dataclass(frozen=True)
class Basket:
    """一次交易购买的商品集合.

    Attributes:
        week: 周序号 (>= 1).
        basket_id: 篮子 ID, 在同一周内唯一.
        items: 去重后的商品集合.
    """

    week: int
    basket_id: str
    items: frozenset[str]

    def sorted_items(self) -> list[str]:
        """按目录顺序 (字典序) 返回商品列表."""
        return sorted(self.items)


BasketSet = Sequence[Basket]


@dataclass(frozen=True)
class WeeklyDataset:
    """按周索引的篮子集合.

    `weeks` 的键恰好覆盖 `1..T`, 没有篮子的周对应空元组.

    Attributes:
        catalog: 商品目录.
        weeks: 周序号到该周篮子元组的映射.
    """

    catalog: ItemCatalog
    weeks: Mapping[int, tuple[Basket, ...]]

    def __post_init__(self) -> None:
        if not self.weeks:
            raise ShiftValueError("数据集至少需要一周")
        horizon = max(self.weeks)
        if sorted(self.weeks) != list(range(1, horizon + 1)):
            raise ShiftValueError("数据集的周序号必须连续覆盖 1..T")
        for week, baskets in self.weeks.items():
            for basket in baskets:
                if basket.week != week:
                    raise ShiftValueError(
                        f"篮子 {basket.basket_id!r} 的周序号 {basket.week} 与所在周 {week} 不一致"
                    )
                if not basket.items:
                    raise ShiftValueError(f"第 {week} 周的篮子 {basket.basket_id!r} 为空")
                missing = [item for item in basket.items if item not in self.catalog]
                if missing:
                    raise ShiftValueError(f"商品不在目录中: {sorted(missing)!r}")

    @classmethod
    def from_baskets(
        cls,
        catalog: ItemCatalog,
        baskets: Iterable[Basket],
        horizon: int | None = None,
    ) -> "WeeklyDataset":
        """按周归并篮子, 保持输入顺序.

        Args:
            catalog: 商品目录.
            baskets: 篮子序列.
            horizon: 周数 T; 缺省时取篮子中的最大周序号.

        Returns:
            WeeklyDataset: 数据集.
        """
        grouped: dict[int, list[Basket]] = {}
        for basket in baskets:
            if basket.week < 1:
                raise ShiftValueError(f"周序号必须为正整数, 实际为 {basket.week}")
            grouped.setdefault(basket.week, []).append(basket)
        if horizon is None:
            if not grouped:
                raise ShiftValueError("数据集为空")
            horizon = max(grouped)
        if grouped and max(grouped) > horizon:
            raise ShiftValueError(f"篮子周序号 {max(grouped)} 超出 T = {horizon}")
        weeks = {t: tuple(grouped.get(t, ())) for t in range(1, horizon + 1)}
        return cls(catalog=catalog, weeks=weeks)

    @property
    def horizon(self) -> int:
        """周数 T."""
        return len(self.weeks)

    @property
    def counts(self) -> dict[int, int]:
        """每周篮子数 L_t."""
        return {t: len(baskets) for t, baskets in self.weeks.items()}

    def baskets(self) -> Iterator[Basket]:
        """按周顺序遍历全部篮子."""
        for t in range(1, self.horizon + 1):
            yield from self.weeks[t]


class BasketRecord(BaseModel):
    """JSONL 输入的一行."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    week: StrictInt
    basket_id: str
    items: list[str]


def read_table(lines: Iterable[str]) -> pd.DataFrame:
    """把逗号分隔的文本行读成全部为字符串的 DataFrame.

    空行被跳过; 第一个非空行是表头 (允许 UTF-8 BOM). 返回值以源文本的行号 (1 起) 为索引,
    表头所在行号记在 `attrs["header_line"]`.

    Raises:
        ShiftValueError: 没有任何非空行.
        ParseError: 列数与表头不一致, 字段为空缺, 或字段首尾带空白.
    """
    numbered = [(n, raw.rstrip("\r\n")) for n, raw in enumerate(lines, start=1)]
    numbered = [(n, text) for n, text in numbered if text.strip()]
    if not numbered:
        raise ShiftValueError("CSV 为空")
    linenos = [n for n, _ in numbered]
    body = "\n".join(text for _, text in numbered).removeprefix("\ufeff")

    try:
        frame = pd.read_csv(
            io.StringIO(body),
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
        )
    except pd.errors.ParserError as e:
        # pandas 的行号按喂入的文本计, 从 1 起
        match = re.search(r"line (\d+)", str(e))
        line = linenos[int(match[1]) - 1] if match else None
        raise ParseError(f"列数与表头不一致: {str(e).strip()}", line=line) from e
    frame.index = pd.Index(linenos)

    short = frame.isna().any(axis=1)
    if short.any():
        raise ParseError(f"期望 {frame.shape[1]} 列", line=int(short.idxmax()))
    padded = (frame != frame.apply(lambda col: col.str.strip())).any(axis=1)
    if padded.any():
        raise ParseError("字段首尾不能有空白", line=int(padded.idxmax()))

    table = frame.iloc[1:].copy()
    table.columns = pd.Index(frame.iloc[0].tolist())
    table.attrs["header_line"] = linenos[0]
    return table


def _parse_csv(lines: list[str]) -> pd.DataFrame:
    table = read_table(lines)
    if tuple(table.columns) != CSV_HEADER:
        raise ParseError(
            f"CSV 表头必须为 {','.join(CSV_HEADER)}", line=table.attrs["header_line"]
        )
    bad_week = ~table["week"].str.fullmatch(r"-?[0-9]+")
    if bad_week.any():
        lineno = int(bad_week.idxmax())
        raise ParseError(f"week 不是十进制整数: {table.at[lineno, 'week']!r}", line=lineno)
    blank = (table[["basket_id", "item"]] == "").any(axis=1)
    if blank.any():
        raise ParseError("basket_id 与 item 不能为空", line=int(blank.idxmax()))
    return table.astype({"week": "int64"})


def _parse_jsonl(lines: list[str]) -> pd.DataFrame:
    records: list[dict[str, object]] = []
    linenos: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            record = BasketRecord.model_validate_json(raw)
        except ValidationError as e:
            raise ParseError(
                f"无效的 JSONL 记录: {e.errors(include_url=False)[0]['msg']}",
                line=lineno,
            ) from e
        if not record.basket_id or any(not item for item in record.items):
            raise ParseError("basket_id 与 item 不能为空", line=lineno)
        records.append({"week": record.week, "basket_id": record.basket_id, "item": record.items})
        linenos.append(lineno)
    frame = pd.DataFrame(records, columns=list(CSV_HEADER), index=pd.Index(linenos))
    # items 为空的行展开为 NaN, 合并时丢弃
    return frame.explode("item")


def parse_baskets(stream: Iterable[str], fmt: InputFormat = "csv") -> WeeklyDataset:
    """解析篮子数据.

    `(week, basket_id)` 相同的行合并为一个篮子; 篮子按首次出现顺序保存;
    合并后仍为空的篮子 (仅 JSONL 可能出现) 被丢弃.
    目录为所有出现过的商品的字典序集合. 标识符原样保留, 首尾带空白的 CSV 字段视为格式错误.

    Args:
        stream: 文本行的可迭代对象 (如打开的文件).
        fmt: 输入格式, `csv` 或 `jsonl`.

    Returns:
        WeeklyDataset: 解析得到的数据集.

    Raises:
        ParseError: 行格式错误 (带行号).
        ShiftValueError: 周序号 <= 0 或输入为空.
    """
    lines = [line.rstrip("\r\n") for line in stream]
    try:
        rows = _parse_csv(lines) if fmt == "csv" else _parse_jsonl(lines)
    except ParseError as e:
        if e.line is not None:
            logger.debug(get_line_context(lines, e.line))
        raise

    non_positive = rows["week"] < 1
    if non_positive.any():
        lineno = int(non_positive.idxmax())
        week = int(rows["week"][non_positive].iloc[0])
        raise ShiftValueError(f"第 {lineno} 行: 周序号必须为正整数, 实际为 {week}")

    merged = rows.groupby(["week", "basket_id"], sort=False)["item"].unique()
    baskets: list[Basket] = []
    for (week, basket_id), items in merged.items():
        kept = frozenset(item for item in items if isinstance(item, str))
        if kept:
            baskets.append(Basket(week=int(week), basket_id=str(basket_id), items=kept))
    dropped = len(merged) - len(baskets)
    if dropped:
        logger.debug("丢弃 %d 个空篮子", dropped)
    if not baskets:
        raise ShiftValueError("输入为空: 没有任何非空篮子")

    catalog = ItemCatalog.of(item for basket in baskets for item in basket.items)
    ds = WeeklyDataset.from_baskets(catalog, baskets)
    logger.debug(
        "解析完成: T=%d, 篮子数=%d, 商品数=%d",
        ds.horizon,
        len(baskets),
        len(catalog),
    )
    return ds


def format_baskets(ds: WeeklyDataset, fmt: InputFormat = "csv") -> str:
    """将数据集序列化为 CSV 或 JSONL 文本.

    篮子按存储顺序输出, 篮内商品按目录顺序输出.
    """
    out: list[str] = []
    if fmt == "csv":
        out.append(",".join(CSV_HEADER))
        for basket in ds.baskets():
            out.extend(
                f"{basket.week},{basket.basket_id},{item}" for item in basket.sorted_items()
            )
    else:
        out.extend(
            BasketRecord(
                week=basket.week,
                basket_id=basket.basket_id,
                items=basket.sorted_items(),
            ).model_dump_json()
            for basket in ds.baskets()
        )
    return "\n".join(out) + "\n"


def restrict_category(ds: WeeklyDataset, keep: Iterable[str]) -> WeeklyDataset:
    """仅保留目标品类的商品.

    被过滤为空的篮子被丢弃, L_t 相应减少; 周数 T 保持不变.

    Raises:
        ShiftValueError: keep 为空或与目录无交集.
    """
    keep_set = frozenset(keep)
    if not keep_set:
        raise ShiftValueError("品类集合不能为空")
    kept = keep_set.intersection(ds.catalog.items)
    if not kept:
        raise ShiftValueError("品类集合与商品目录没有交集")

    catalog = ItemCatalog.of(kept)
    weeks: dict[int, tuple[Basket, ...]] = {}
    for t, baskets in ds.weeks.items():
        restricted = []
        for basket in baskets:
            items = basket.items & kept
            if items:
                restricted.append(Basket(week=t, basket_id=basket.basket_id, items=items))
        weeks[t] = tuple(restricted)
    return WeeklyDataset(catalog=catalog, weeks=weeks)


def window(ds: WeeklyDataset, t: int, delta_t: int) -> tuple[Basket, ...]:
    """返回截至第 t 周的 delta_t 周窗口 `[max(1, t - delta_t + 1), t]` 中的篮子.

    Raises:
        WeekRangeError: t 不在 `[1, T]`.
        ParameterError: delta_t < 1.
    """
    if not 1 <= t <= ds.horizon:
        raise WeekRangeError(f"周序号 {t} 超出范围 [1, {ds.horizon}]")
    if delta_t < 1:
        raise ParameterError(f"delta_t 必须为正整数, 实际为 {delta_t}")
    start = max(1, t - delta_t + 1)
    return tuple(basket for w in range(start, t + 1) for basket in ds.weeks[w])


def incidence_matrix(bs: BasketSet, catalog: ItemCatalog) -> np.ndarray:
    """篮子-商品 0/1 关联矩阵, 形状为 `(len(bs), len(catalog))`, dtype 为 int64."""
    matrix = np.zeros((len(bs), len(catalog)), dtype=np.int64)
    index = catalog.index
    for row, basket in enumerate(bs):
        cols = [index[item] for item in basket.items if item in index]
        matrix[row, cols] = 1
    return matrix


@dataclass(frozen=True)
class ProportionVector:
    """各商品出现的篮子比例.

    以整数计数保存, `values` 即计数除以篮子总数.

    Attributes:
        catalog: 商品目录.
        counts: 每个商品出现的篮子数 (目录顺序).
        total: 篮子总数; 为 0 时所有比例为 0.
    """

    catalog: ItemCatalog
    counts: tuple[int, ...]
    total: int

    @property
    def values(self) -> dict[str, float]:
        """商品到比例的映射."""
        if self.total == 0:
            return dict.fromkeys(self.catalog.items, 0.0)
        return {
            item: count / self.total
            for item, count in zip(self.catalog.items, self.counts)
        }

    def __getitem__(self, item: str) -> float:
        if self.total == 0:
            return 0.0
        return self.counts[self.catalog.index[item]] / self.total


def item_proportions(bs: BasketSet, catalog: ItemCatalog) -> ProportionVector:
    """计算每个商品出现的篮子比例.

    Raises:
        ShiftValueError: 篮子集合为空.
    """
    if not bs:
        raise ShiftValueError("篮子集合为空, 无法计算比例")
    counts = incidence_matrix(bs, catalog).sum(axis=0)
    return ProportionVector(
        catalog=catalog,
        counts=tuple(int(c) for c in counts),
        total=len(bs),
    )


@dataclass(frozen=True)
class ProportionTable:
    """按周的比例特征表, 可导出为外部变化检测工具的输入."""

    catalog: ItemCatalog
    rows: Mapping[int, ProportionVector]

    def to_csv(self) -> str:
        """导出 CSV: 表头 `week,<item1>,<item2>,...`, 比例保留 6 位小数."""
        out = [",".join(("week", *self.catalog.items))]
        for t in sorted(self.rows):
            vector = self.rows[t]
            values = vector.values
            out.append(
                ",".join(
                    [str(t)]
                    + [f"{values[item]:.{FLOAT_DECIMALS}f}" for item in self.catalog.items]
                )
            )
        return "\n".join(out) + "\n"


def proportion_table(ds: WeeklyDataset, delta_t: int = 1) -> ProportionTable:
    """逐周计算比例向量; 没有篮子的周输出全 0 行."""
    rows: dict[int, ProportionVector] = {}
    for t in range(1, ds.horizon + 1):
        bs = window(ds, t, delta_t)
        if bs:
            rows[t] = item_proportions(bs, ds.catalog)
        else:
            rows[t] = ProportionVector(
                catalog=ds.catalog, counts=(0,) * len(ds.catalog), total=0
            )
    return ProportionTable(catalog=ds.catalog, rows=rows)
