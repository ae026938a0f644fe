"""basketshift 命令行工具."""

import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import TYPE_CHECKING, Any, cast

from .config import (
    DetectionParams,
    GraphFormat,
    InputFormat,
    Metric,
    RunConfig,
    parse_week_range,
)
from .const import DEFAULT_DELTA_T, DEFAULT_LOG_BASE, DEFAULT_RHO, DEFAULT_TOP_R
from .exceptions import ShiftError
from .log import logger
from .runner import EXIT_INVALID, run

if TYPE_CHECKING:
    import click as click_module
    from rich.console import Console
    from rich.logging import RichHandler
else:
    try:
        import click as click_module
        from rich.console import Console
        from rich.logging import RichHandler
    except ImportError:
        click_module = None
        Console = None
        RichHandler = None

click = click_module


if not click:

    def main() -> None:
        """入口函数 (缺少 click)."""
        print("错误: 未检测到 'click' 模块,无法运行 CLI 工具。", file=sys.stderr)
        print(
            "\n该功能属于可选组件,请通过以下命令安装依赖:\n"
            "  pip install 'basketshift[cli]'\n"
            "\n或者如果您使用 uv:\n"
            "  uv add 'basketshift[cli]'",
            file=sys.stderr,
        )
        sys.exit(1)

else:

    def _setup_logging(verbose: bool) -> None:
        """把 basketshift logger 接到 stderr 上的 RichHandler."""
        handler = RichHandler(
            console=Console(stderr=True),
            show_time=False,
            show_path=False,
        )
        logger.addHandler(handler)
        logger.setLevel(logging.DEBUG if verbose else logging.WARNING)

    def _execute(ctx: click.Context, verbose: bool, build: Callable[[], RunConfig]) -> None:
        """构建配置并运行, 按退出码约定退出.

        参数越界在构建配置时就会抛出, 同样以退出码 1 结束.
        退出前恢复 logger 原有的 handler 与级别.
        """
        handlers, level = list(logger.handlers), logger.level
        _setup_logging(verbose)
        try:
            try:
                config = build()
            except ShiftError as e:
                logger.error("%s", e)
                ctx.exit(EXIT_INVALID)

            result = run(config)
            for path in result.outputs:
                click.echo(f"结果已保存到: {path}", err=True)
            ctx.exit(result.exit_code)
        finally:
            logger.handlers[:] = handlers
            logger.setLevel(level)

    def _dataset_options(f: Callable[..., Any]) -> Callable[..., Any]:
        f = click.option(
            "--category",
            type=click.Path(dir_okay=False, path_type=Path),
            help="品类文件, 每行一个商品 ID",
        )(f)
        f = click.option(
            "--format",
            "fmt",
            type=click.Choice(["csv", "jsonl"]),
            default="csv",
            show_default=True,
            help="输入格式",
        )(f)
        f = click.option(
            "-i",
            "--input",
            "input_path",
            required=True,
            type=click.Path(dir_okay=False, path_type=Path),
            help="篮子数据文件",
        )(f)
        return _common_options(f)

    def _common_options(f: Callable[..., Any]) -> Callable[..., Any]:
        f = click.option("-v", "--verbose", is_flag=True, help="显示详细的处理过程信息")(f)
        return click.option(
            "-o",
            "--output-dir",
            type=click.Path(file_okay=False, path_type=Path),
            default=Path("."),
            show_default=True,
            help="输出目录",
        )(f)

    def _detection_options(f: Callable[..., Any]) -> Callable[..., Any]:
        f = click.option(
            "--log-base",
            type=float,
            default=DEFAULT_LOG_BASE,
            show_default=True,
            help="熵的对数底 (告警与其无关)",
        )(f)
        f = click.option(
            "--top-r",
            type=int,
            default=DEFAULT_TOP_R,
            show_default=True,
            help="排名变化 oracle 的前 R 名",
        )(f)
        f = click.option(
            "--theta-r",
            type=int,
            default=None,
            help="告警数; 缺省取排名变化 oracle 的告警数",
        )(f)
        f = click.option(
            "--delta-t",
            type=int,
            default=DEFAULT_DELTA_T,
            show_default=True,
            help="窗口长度 (周)",
        )(f)
        return click.option(
            "--rho",
            type=float,
            default=DEFAULT_RHO,
            show_default=True,
            help="共现图的边密度",
        )(f)

    @click.group(help="基于共现图熵的购物篮结构变化检测工具")
    def cli() -> None:
        """basketshift 命令行工具.

        Examples:
          # 生成带植入变化点的合成数据
          basketshift synth --seed 7 -o out

          # 检测并输出逐周分数
          basketshift detect -i out/dataset.csv -o out

          # 导出第 6 到 11 周的图快照
          basketshift graph -i out/dataset.csv --theta-r 3 --weeks 6:11 -o out/graphs
        """

    @cli.command(help="计算逐周 Hg, cps_gbe 与告警, 写出 scores.csv")
    @_detection_options
    @_dataset_options
    @click.pass_context
    def detect(
        ctx: click.Context,
        input_path: Path,
        fmt: str,
        category: Path | None,
        output_dir: Path,
        verbose: bool,
        rho: float,
        delta_t: int,
        theta_r: int | None,
        top_r: int,
        log_base: float,
    ) -> None:
        """detect 子命令."""
        _execute(
            ctx,
            verbose,
            lambda: RunConfig(
                command="detect",
                input=input_path,
                fmt=cast(InputFormat, fmt),
                category=category,
                output_dir=output_dir,
                params=DetectionParams.from_params(rho, delta_t, theta_r, log_base),
                top_r=top_r,
            ),
        )

    @cli.command(help="计算排名变化分数与真实告警, 写出 rank_change.csv")
    @click.option("--top-r", type=int, default=DEFAULT_TOP_R, show_default=True, help="前 R 名")
    @_dataset_options
    @click.pass_context
    def rankscore(
        ctx: click.Context,
        input_path: Path,
        fmt: str,
        category: Path | None,
        output_dir: Path,
        verbose: bool,
        top_r: int,
    ) -> None:
        """rankscore 子命令."""
        _execute(
            ctx,
            verbose,
            lambda: RunConfig(
                command="rankscore",
                input=input_path,
                fmt=cast(InputFormat, fmt),
                category=category,
                output_dir=output_dir,
                top_r=top_r,
            ),
        )

    @cli.command(help="导出逐周商品比例特征, 写出 proportions.csv")
    @_dataset_options
    @click.pass_context
    def features(
        ctx: click.Context,
        input_path: Path,
        fmt: str,
        category: Path | None,
        output_dir: Path,
        verbose: bool,
    ) -> None:
        """features 子命令."""
        _execute(
            ctx,
            verbose,
            lambda: RunConfig(
                command="features",
                input=input_path,
                fmt=cast(InputFormat, fmt),
                category=category,
                output_dir=output_dir,
            ),
        )

    @cli.command(help="导出共现图快照 graph_wNNN.dot/json")
    @click.option("--weeks", default=None, help="周范围 a:b; 缺省时导出各告警周附近的周")
    @click.option(
        "--graph-format",
        type=click.Choice(["dot", "json"]),
        default="dot",
        show_default=True,
        help="快照格式",
    )
    @_detection_options
    @_dataset_options
    @click.pass_context
    def graph(
        ctx: click.Context,
        input_path: Path,
        fmt: str,
        category: Path | None,
        output_dir: Path,
        verbose: bool,
        rho: float,
        delta_t: int,
        theta_r: int | None,
        top_r: int,
        log_base: float,
        graph_format: str,
        weeks: str | None,
    ) -> None:
        """graph 子命令."""
        _execute(
            ctx,
            verbose,
            lambda: RunConfig(
                command="graph",
                input=input_path,
                fmt=cast(InputFormat, fmt),
                category=category,
                output_dir=output_dir,
                params=DetectionParams.from_params(rho, delta_t, theta_r, log_base),
                top_r=top_r,
                weeks=None if weeks is None else parse_week_range(weeks),
                graph_format=cast(GraphFormat, graph_format),
            ),
        )

    @cli.command(help="生成合成数据, 写出 dataset.csv 与 ground_truth.json")
    @click.option("--seed", type=int, default=0, show_default=True, help="随机种子")
    @click.option(
        "--schedule",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="阶段表 JSON; 缺省为四阶段表",
    )
    @click.option("--n-items", type=int, default=40, show_default=True, help="商品数")
    @click.option(
        "--baskets-per-week", type=int, default=300, show_default=True, help="每周篮子数"
    )
    @click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "jsonl"]),
        default="csv",
        show_default=True,
        help="输出格式",
    )
    @_common_options
    @click.pass_context
    def synth(
        ctx: click.Context,
        output_dir: Path,
        verbose: bool,
        fmt: str,
        baskets_per_week: int,
        n_items: int,
        schedule: Path | None,
        seed: int,
    ) -> None:
        """synth 子命令."""
        _execute(
            ctx,
            verbose,
            lambda: RunConfig(
                command="synth",
                output_dir=output_dir,
                fmt=cast(InputFormat, fmt),
                seed=seed,
                schedule=schedule,
                n_items=n_items,
                baskets_per_week=baskets_per_week,
            ),
        )

    @cli.command(name="eval", help="以真实告警评估方法输出, 写出 eval_report.json")
    @click.option(
        "--method",
        "methods",
        multiple=True,
        required=True,
        type=click.Path(dir_okay=False, path_type=Path),
        help="方法输出 (告警 CSV, week,score 或 week,v0,... 主题向量); 可重复",
    )
    @click.option(
        "--real",
        "reals",
        multiple=True,
        required=True,
        type=click.Path(dir_okay=False, path_type=Path),
        help="真实告警 CSV (如 rank_change.csv); 与 --method 一一配对",
    )
    @click.option(
        "--baseline",
        "baselines",
        multiple=True,
        type=click.Path(dir_okay=False, path_type=Path),
        help="对照方法输出; 与 --real 一一配对",
    )
    @click.option("--theta-r", type=int, default=None, help="分数型输出的告警数; 缺省取真实告警数")
    @click.option(
        "--metric",
        type=click.Choice(["precision", "recall", "f1"]),
        default="f1",
        show_default=True,
        help="配对 t 检验比较的指标",
    )
    @_common_options
    @click.pass_context
    def evaluate(
        ctx: click.Context,
        output_dir: Path,
        verbose: bool,
        metric: str,
        theta_r: int | None,
        baselines: tuple[Path, ...],
        reals: tuple[Path, ...],
        methods: tuple[Path, ...],
    ) -> None:
        """eval 子命令."""
        _execute(
            ctx,
            verbose,
            lambda: RunConfig(
                command="eval",
                output_dir=output_dir,
                params=DetectionParams.from_params(theta_r=theta_r),
                methods=methods,
                reals=reals,
                baselines=baselines,
                metric=cast(Metric, metric),
            ),
        )

    def main() -> None:
        """入口函数."""
        cli()


if __name__ == "__main__":
    main()
