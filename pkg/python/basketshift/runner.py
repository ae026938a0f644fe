"""子命令执行.

`run` 把 `RunConfig` 映射到各模块的流水线, 只向输出目录写文件,
诊断信息全部经由 `basketshift` logger 输出.
"""

from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path

from pydantic import ValidationError

from .api import dumps, load, load_category, load_schedule, load_series
from .config import RunConfig
from .dataset import WeeklyDataset, proportion_table, restrict_category
from .evaluation import EvalReport, compare_methods, precision_recall_f1
from .exceptions import ParameterError, ShiftError, WeekRangeError
from .gbe import ChangeScoreSeries, detect, score_series, snapshot
from .graph import export_graph
from .log import logger
from .rankchange import default_theta_r, rank_change_series
from .synth import four_phase_schedule, generate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


@dataclass
class RunResult:
    """一次运行的结果.

    Attributes:
        exit_code: 0 成功, 1 校验错误, 2 I/O 错误.
        outputs: 已写出的文件.
        error: 失败时的错误描述.
    """

    exit_code: int = EXIT_OK
    outputs: list[Path] = field(default_factory=list)
    error: str | None = None


def _write(result: RunResult, path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    result.outputs.append(path)
    logger.info("已写出 %s", path)


def _read_text(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _load_dataset(config: RunConfig) -> WeeklyDataset:
    if config.input is None:
        raise ParameterError(f"{config.command} 需要 --input")
    with config.input.open(encoding="utf-8") as fp:
        ds = load(fp, config.fmt)
    if config.category is not None:
        keep = load_category(_read_text(config.category).splitlines())
        ds = restrict_category(ds, keep)
        logger.debug("品类过滤后商品数=%d", len(ds.catalog))
    return ds


def _detect(ds: WeeklyDataset, config: RunConfig) -> ChangeScoreSeries:
    """运行检测. 未指定 theta_r 时取排名变化 oracle 的告警数, 为 0 时不告警."""
    if config.params.theta_r is not None:
        return detect(ds, config.params)
    theta_r = default_theta_r(rank_change_series(ds, config.top_r))
    if theta_r == 0:
        logger.warning("排名变化 oracle 没有给出任何告警, 所有周都不告警")
        return score_series(ds, config.params)
    logger.info("theta_r 取 oracle 告警数 %d", theta_r)
    return detect(ds, replace(config.params, theta_r=theta_r))


def _run_detect(config: RunConfig, result: RunResult) -> None:
    ds = _load_dataset(config)
    series = _detect(ds, config)
    _write(result, config.output_dir / "scores.csv", series.to_csv())


def _run_rankscore(config: RunConfig, result: RunResult) -> None:
    ds = _load_dataset(config)
    series = rank_change_series(ds, config.top_r)
    _write(result, config.output_dir / "rank_change.csv", series.to_csv())


def _run_features(config: RunConfig, result: RunResult) -> None:
    ds = _load_dataset(config)
    _write(result, config.output_dir / "proportions.csv", proportion_table(ds).to_csv())


def _graph_weeks(ds: WeeklyDataset, config: RunConfig) -> list[int]:
    if config.weeks is not None:
        start, end = config.weeks
        if end > ds.horizon:
            raise WeekRangeError(f"周范围 {start}:{end} 超出 [1, {ds.horizon}]")
        return list(range(start, end + 1))
    series = _detect(ds, config)
    weeks = {
        w
        for a in series.alert_weeks
        for w in range(max(1, a - 2), min(ds.horizon, a + 1) + 1)
    }
    if not weeks:
        logger.warning("没有告警周, 不导出快照")
    logger.info("按告警周 %s 导出周 %s", series.alert_weeks, sorted(weeks))
    return sorted(weeks)


def _run_graph(config: RunConfig, result: RunResult) -> None:
    ds = _load_dataset(config)
    ext = config.graph_format
    for t in _graph_weeks(ds, config):
        snap = snapshot(ds, t, config.params)
        text = export_graph(snap.graph, snap.partition, config.graph_format)
        _write(result, config.output_dir / f"graph_w{t:03d}.{ext}", text)


def _run_synth(config: RunConfig, result: RunResult) -> None:
    if config.schedule is not None:
        schedule = load_schedule(_read_text(config.schedule))
    else:
        schedule = four_phase_schedule(n_items=config.n_items)
    ds, truth = generate(schedule, config.n_items, config.baskets_per_week, config.seed)
    _write(result, config.output_dir / f"dataset.{config.fmt}", dumps(ds, config.fmt))
    _write(result, config.output_dir / "ground_truth.json", truth.model_dump_json(indent=2) + "\n")


def _evaluate(method: Path, real: Path, theta_r: int | None) -> EvalReport:
    truth = load_series(_read_text(real).splitlines())
    if truth.kind != "alerts":
        raise ParameterError(f"{real} 不是告警文件")
    source = load_series(_read_text(method).splitlines())
    real_weeks = truth.alert_weeks(0)
    budget = theta_r if theta_r is not None else len(real_weeks)
    if source.kind != "alerts" and budget == 0:
        method_weeks: set[int] = set()
    else:
        method_weeks = source.alert_weeks(budget)
    return precision_recall_f1(method_weeks, real_weeks)


def _run_eval(config: RunConfig, result: RunResult) -> None:
    if not config.methods:
        raise ParameterError("eval 需要至少一对 --method/--real")
    theta_r = config.params.theta_r
    reports = [_evaluate(m, r, theta_r) for m, r in zip(config.methods, config.reals)]
    baselines = [_evaluate(b, r, theta_r) for b, r in zip(config.baselines, config.reals)]

    out = config.output_dir
    if len(reports) == 1:
        _write(result, out / "eval_report.json", reports[0].model_dump_json(indent=2) + "\n")
        if baselines:
            _write(
                result,
                out / "baseline_report.json",
                baselines[0].model_dump_json(indent=2) + "\n",
            )
            logger.warning("只有一个数据集, 跳过配对 t 检验")
        return

    for i, report in enumerate(reports, start=1):
        _write(result, out / f"eval_report_{i:03d}.json", report.model_dump_json(indent=2) + "\n")
    summary = compare_methods(reports, baselines, config.metric)
    _write(result, out / "eval_summary.json", summary.model_dump_json(indent=2) + "\n")


_COMMANDS: dict[str, Callable[[RunConfig, RunResult], None]] = {
    "detect": _run_detect,
    "rankscore": _run_rankscore,
    "eval": _run_eval,
    "graph": _run_graph,
    "synth": _run_synth,
    "features": _run_features,
}


def run(config: RunConfig) -> RunResult:
    """执行一个子命令.

    Args:
        config: 运行配置.

    Returns:
        RunResult: 退出码与写出的文件. 校验错误退出码为 1, I/O 错误为 2.
    """
    result = RunResult()
    try:
        _COMMANDS[config.command](config, result)
    except (ShiftError, ValidationError, UnicodeDecodeError) as e:
        logger.error("%s", e)
        result.exit_code, result.error = EXIT_INVALID, str(e)
    except OSError as e:
        logger.error("I/O 错误: %s", e)
        result.exit_code, result.error = EXIT_IO, str(e)
    return result
