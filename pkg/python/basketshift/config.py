"""basketshift 配置对象."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from .const import DEFAULT_DELTA_T, DEFAULT_LOG_BASE, DEFAULT_RHO, DEFAULT_TOP_R
from .exceptions import ParameterError

InputFormat = Literal["csv", "jsonl"]
GraphFormat = Literal["dot", "json"]
Command = Literal["detect", "rankscore", "eval", "graph", "synth", "features"]
Metric = Literal["precision", "recall", "f1"]


@dataclass(frozen=True)
class DetectionParams:
    """GBE 检测参数 (不可变).

    在 API 入口层创建, 然后传递给 `gbe_series` / `detect`.

    Attributes:
        rho: 边密度, 取值 (0, 1].
        delta_t: 窗口长度 (周), 窗口为 `[t - delta_t + 1, t]`.
        theta_r: 告警数; `None` 表示由调用方决定 (如取 oracle 告警数).
        log_base: 熵的对数底, 必须大于 1.
    """

    rho: float = DEFAULT_RHO
    delta_t: int = DEFAULT_DELTA_T
    theta_r: int | None = None
    log_base: float = DEFAULT_LOG_BASE

    def __post_init__(self) -> None:
        if not (0.0 < self.rho <= 1.0):
            raise ParameterError(f"rho 必须位于 (0, 1], 实际为 {self.rho}")
        if isinstance(self.delta_t, bool) or self.delta_t < 1:
            raise ParameterError(f"delta_t 必须为正整数, 实际为 {self.delta_t}")
        if self.theta_r is not None and self.theta_r < 1:
            raise ParameterError(f"theta_r 必须 >= 1, 实际为 {self.theta_r}")
        if not (math.isfinite(self.log_base) and self.log_base > 1.0):
            raise ParameterError(f"log_base 必须为大于 1 的有限实数, 实际为 {self.log_base}")

    @classmethod
    def from_params(
        cls,
        rho: float | None = None,
        delta_t: int | None = None,
        theta_r: int | None = None,
        log_base: float | None = None,
    ) -> "DetectionParams":
        """从可选参数构建配置对象, 缺省项取默认值.

        Args:
            rho: 边密度.
            delta_t: 窗口长度.
            theta_r: 告警数.
            log_base: 对数底.

        Returns:
            DetectionParams: 配置对象.
        """
        return cls(
            rho=DEFAULT_RHO if rho is None else rho,
            delta_t=DEFAULT_DELTA_T if delta_t is None else delta_t,
            theta_r=theta_r,
            log_base=DEFAULT_LOG_BASE if log_base is None else log_base,
        )

    @property
    def log_scale(self) -> float:
        """nats 到 `log_base` 单位的换算因子 `ln(log_base)`."""
        return math.log(self.log_base)


def parse_week_range(text: str) -> tuple[int, int]:
    """解析 `a:b` 形式的闭区间周范围.

    Args:
        text: 如 `"6:11"`.

    Returns:
        (a, b), 满足 1 <= a <= b.

    Raises:
        ParameterError: 格式错误或区间为空.
    """
    head, sep, tail = text.partition(":")
    if not sep:
        raise ParameterError(f"周范围必须写作 a:b, 实际为 {text!r}")
    try:
        start, end = int(head), int(tail)
    except ValueError:
        raise ParameterError(f"周范围必须写作 a:b, 实际为 {text!r}") from None
    if start < 1 or end < start:
        raise ParameterError(f"周范围必须满足 1 <= a <= b, 实际为 {text!r}")
    return start, end


@dataclass(frozen=True)
class RunConfig:
    """一次命令行运行的完整配置 (不可变).

    Attributes:
        command: 子命令.
        input: 篮子数据文件 (detect/rankscore/graph/features).
        output_dir: 输出目录.
        fmt: 输入格式.
        params: 检测参数.
        top_r: 排名变化 oracle 的 R.
        category: 品类过滤文件, 每行一个商品 ID.
        weeks: graph 子命令导出的周范围.
        graph_format: 图快照格式.
        seed: 合成数据随机种子.
        schedule: 合成数据阶段表 JSON.
        n_items: 合成数据商品数.
        baskets_per_week: 合成数据每周篮子数.
        methods: eval 的方法告警/分数文件 (与 reals 一一配对).
        reals: eval 的真实告警文件.
        baselines: eval 的对照方法文件 (与 reals 一一配对).
        metric: t 检验所比较的指标.
    """

    command: Command
    output_dir: Path
    input: Path | None = None
    fmt: InputFormat = "csv"
    params: DetectionParams = field(default_factory=DetectionParams)
    top_r: int = DEFAULT_TOP_R
    category: Path | None = None
    weeks: tuple[int, int] | None = None
    graph_format: GraphFormat = "dot"
    seed: int = 0
    schedule: Path | None = None
    n_items: int = 40
    baskets_per_week: int = 300
    methods: tuple[Path, ...] = ()
    reals: tuple[Path, ...] = ()
    baselines: tuple[Path, ...] = ()
    metric: Metric = "f1"

    def __post_init__(self) -> None:
        if self.top_r < 1:
            raise ParameterError(f"top_r 必须 >= 1, 实际为 {self.top_r}")
        if self.seed < 0:
            raise ParameterError(f"seed 必须为非负整数, 实际为 {self.seed}")
        if len(self.methods) != len(self.reals):
            raise ParameterError("--method 与 --real 的数量必须一致")
        if self.baselines and len(self.baselines) != len(self.reals):
            raise ParameterError("--baseline 与 --real 的数量必须一致")
