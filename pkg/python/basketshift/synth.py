"""带植入变化点的合成篮子数据.

每个阶段给出若干上下文 (商品下标集合) 及其权重. 每个篮子先按权重抽一个上下文,
上下文内的商品以 p_in 独立入篮, 其余商品以 p_noise 入篮; 空篮子重抽.

随机数发生器为 numpy 的 PCG64, 抽样顺序见 FORMATS.md.
"""

from collections.abc import Sequence
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from .const import ITEM_ID_WIDTH, MAX_EMPTY_REDRAWS
from .dataset import Basket, ItemCatalog, WeeklyDataset
from .exceptions import GenerationError, ParameterError, ShiftValueError
from .log import logger

PhaseKind = Literal["single", "split", "focus", "merged"]


class PhaseConfig(BaseModel):
    """一个偏好阶段.

    Attributes:
        kind: 阶段类型.
        duration: 持续周数.
        contexts: 活跃的上下文, 每个是商品下标列表.
        weights: 上下文的抽取概率, 和为 1.
        p_in: 上下文内商品的入篮概率.
        p_noise: 上下文外商品的入篮概率.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: PhaseKind
    duration: int = Field(ge=1)
    contexts: list[list[int]] = Field(min_length=1)
    weights: list[float]
    p_in: float
    p_noise: float

    @model_validator(mode="after")
    def _check(self) -> Self:
        if len(self.weights) != len(self.contexts):
            raise ValueError("weights 与 contexts 的长度必须一致")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights 不能为负")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights 之和必须为 1, 实际为 {sum(self.weights)}")
        if not 0.0 < self.p_in <= 1.0:
            raise ValueError(f"p_in 必须位于 (0, 1], 实际为 {self.p_in}")
        if not 0.0 <= self.p_noise < self.p_in:
            raise ValueError("p_noise 必须满足 0 <= p_noise < p_in")
        for ctx in self.contexts:
            if not ctx:
                raise ValueError("上下文不能为空")
            if min(ctx) < 0:
                raise ValueError("商品下标不能为负")
        return self


class Transition(BaseModel):
    """一次阶段切换, week 为新阶段的第一周."""

    week: int
    from_phase: PhaseKind
    to_phase: PhaseKind


class SynthGroundTruth(BaseModel):
    """生成数据的真实切换点."""

    horizon: int
    transitions: list[Transition]


def item_ids(n_items: int) -> list[str]:
    """合成商品 ID, 补零使字典序与下标顺序一致."""
    width = max(ITEM_ID_WIDTH, len(str(n_items - 1)))
    return [f"item{i:0{width}d}" for i in range(n_items)]


def _context_masks(phase: PhaseConfig, n_items: int) -> np.ndarray:
    masks = np.zeros((len(phase.contexts), n_items), dtype=bool)
    for k, ctx in enumerate(phase.contexts):
        if max(ctx) >= n_items:
            raise ShiftValueError(f"上下文中的商品下标 {max(ctx)} 超出 n_items = {n_items}")
        masks[k, ctx] = True
    return masks


def _draw(
    rng: np.random.Generator,
    cum_weights: np.ndarray,
    masks: np.ndarray,
    phase: PhaseConfig,
    n_rows: int,
) -> np.ndarray:
    ctx = np.searchsorted(cum_weights, rng.random(n_rows), side="right")
    ctx = np.minimum(ctx, len(cum_weights) - 1)
    prob = np.where(masks[ctx], phase.p_in, phase.p_noise)
    return rng.random((n_rows, masks.shape[1])) < prob


def generate(
    schedule: Sequence[PhaseConfig],
    n_items: int,
    baskets_per_week: int,
    seed: int,
) -> tuple[WeeklyDataset, SynthGroundTruth]:
    """按阶段表生成数据集.

    每周: 先为每个篮子抽一个均匀数选上下文, 再抽 `baskets × n_items` 的均匀矩阵
    决定入篮; 空篮子按行号升序成轮重抽, 每轮同样先抽上下文再抽入篮.

    Args:
        schedule: 阶段表.
        n_items: 商品数, >= 2.
        baskets_per_week: 每周篮子数, >= 1.
        seed: 随机种子.

    Returns:
        (数据集, 真实切换点). 数据集目录为实际出现过的商品.

    Raises:
        ParameterError: 参数越界.
        GenerationError: 某个篮子重抽 100 次后仍为空.
    """
    if n_items < 2:
        raise ParameterError(f"n_items 必须 >= 2, 实际为 {n_items}")
    if baskets_per_week < 1:
        raise ParameterError(f"baskets_per_week 必须 >= 1, 实际为 {baskets_per_week}")
    if not schedule:
        raise ShiftValueError("阶段表不能为空")
    if seed < 0:
        raise ParameterError(f"seed 必须为非负整数, 实际为 {seed}")

    rng = np.random.Generator(np.random.PCG64(seed))
    ids = np.array(item_ids(n_items))
    baskets: list[Basket] = []
    transitions: list[Transition] = []
    week = 0

    for phase_no, phase in enumerate(schedule):
        if phase_no > 0:
            transitions.append(
                Transition(
                    week=week + 1,
                    from_phase=schedule[phase_no - 1].kind,
                    to_phase=phase.kind,
                )
            )
        masks = _context_masks(phase, n_items)
        cum_weights = np.cumsum(phase.weights)

        for _ in range(phase.duration):
            week += 1
            included = _draw(rng, cum_weights, masks, phase, baskets_per_week)
            empty = np.flatnonzero(~included.any(axis=1))
            rounds = 0
            while empty.size:
                rounds += 1
                if rounds > MAX_EMPTY_REDRAWS:
                    raise GenerationError(
                        f"第 {week} 周有 {empty.size} 个篮子重抽 "
                        f"{MAX_EMPTY_REDRAWS} 次后仍为空"
                    )
                included[empty] = _draw(rng, cum_weights, masks, phase, empty.size)
                empty = empty[~included[empty].any(axis=1)]
            if rounds:
                logger.debug("第 %d 周重抽 %d 轮空篮子", week, rounds)

            baskets.extend(
                Basket(
                    week=week,
                    basket_id=f"w{week}b{k}",
                    items=frozenset(ids[row].tolist()),
                )
                for k, row in enumerate(included)
            )

    catalog = ItemCatalog.of(item for basket in baskets for item in basket.items)
    ds = WeeklyDataset.from_baskets(catalog, baskets, horizon=week)
    return ds, SynthGroundTruth(horizon=week, transitions=transitions)


def _groups(n_items: int, n_contexts: int) -> list[list[int]]:
    size = n_items // n_contexts
    groups = [list(range(k * size, (k + 1) * size)) for k in range(n_contexts)]
    groups[-1].extend(range(n_contexts * size, n_items))
    return groups


def four_phase_schedule(
    n_items: int = 40,
    n_contexts: int = 4,
    weeks_per_phase: int = 8,
    p_in: float = 0.6,
    p_noise: float = 0.02,
    include_merged: bool = True,
) -> list[PhaseConfig]:
    """单一兴趣 -> 分化 -> 聚焦 -> 合并 的阶段表.

    分化阶段把商品等分为 `n_contexts` 个互不相交的上下文并等概率抽取;
    聚焦阶段只保留第 0 个上下文; 合并阶段把第 0, 1 个上下文合为一个.

    Raises:
        ParameterError: n_contexts 不在 [2, n_items].
    """
    if not 2 <= n_contexts <= n_items:
        raise ParameterError(f"n_contexts 必须位于 [2, {n_items}], 实际为 {n_contexts}")
    groups = _groups(n_items, n_contexts)

    def phase(kind: PhaseKind, contexts: list[list[int]]) -> PhaseConfig:
        return PhaseConfig(
            kind=kind,
            duration=weeks_per_phase,
            contexts=contexts,
            weights=[1.0 / len(contexts)] * len(contexts),
            p_in=p_in,
            p_noise=p_noise,
        )

    schedule = [
        phase("single", [list(range(n_items))]),
        phase("split", groups),
        phase("focus", [groups[0]]),
    ]
    if include_merged:
        schedule.append(phase("merged", [groups[0] + groups[1]]))
    return schedule
