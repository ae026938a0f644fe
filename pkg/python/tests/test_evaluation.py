"""测试评估模块."""

import math

import pytest
from basketshift import (
    EvalReport,
    ShiftValueError,
    TopicVector,
    alerts_from_scores,
    compare_methods,
    paired_t_test_one_sided,
    precision_recall_f1,
    summarize_reports,
    topic_change_series,
    vector_change_score,
)
from scipy.stats import t as student_t


# --- P/R/F1 ---


def test_precision_recall_f1_hand_count() -> None:
    """{4,5,9} 对 {5,9,20} 命中 2 个, 各指标均为 2/3."""
    report = precision_recall_f1({4, 5, 9}, {5, 9, 20})

    assert report.n_hits == 2
    assert report.precision == 2 / 3
    assert report.recall == 2 / 3
    assert report.f1 == 2 / 3
    assert report.zero_denominator_flags == []


def test_precision_recall_f1_identity() -> None:
    """方法告警等于真实告警时各指标为 1."""
    report = precision_recall_f1([3, 7], [7, 3])

    assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)


def test_precision_recall_f1_empty_method() -> None:
    """方法没有告警时各指标为 0 并标记分母为 0."""
    report = precision_recall_f1(set(), {5})

    assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)
    assert report.zero_denominator_flags == ["precision", "f1"]


def test_precision_recall_f1_both_empty() -> None:
    """两边都为空时三个指标都被标记."""
    report = precision_recall_f1([], [])

    assert report.zero_denominator_flags == ["precision", "recall", "f1"]


def test_precision_recall_f1_no_hits() -> None:
    """没有命中时 F1 为 0."""
    report = precision_recall_f1({1}, {2})

    assert report.f1 == 0.0
    assert report.zero_denominator_flags == ["f1"]


def test_eval_report_json_round_trip() -> None:
    """EvalReport 应能序列化为 JSON 并还原."""
    report = precision_recall_f1({4, 5, 9}, {5, 9, 20})

    assert EvalReport.model_validate_json(report.model_dump_json()) == report


# --- 主题向量 ---


def test_vector_change_score_identity() -> None:
    """相同向量的变化分数为 0."""
    v = TopicVector((0.2, 0.3, 0.5))

    assert vector_change_score(v, v) == pytest.approx(0.0, abs=1e-12)


def test_vector_change_score_orthogonal() -> None:
    """正交向量的变化分数为 1."""
    score = vector_change_score(TopicVector((1.0, 0.0)), TopicVector((0.0, 2.0)))

    assert score == pytest.approx(1.0)


def test_vector_change_score_value() -> None:
    """(1,1,0) 与 (1,0,0) 的变化分数为 1 - 1/sqrt(2)."""
    score = vector_change_score(TopicVector((1.0, 1.0, 0.0)), TopicVector((1.0, 0.0, 0.0)))

    assert score == pytest.approx(1 - 1 / math.sqrt(2), abs=1e-6)


@pytest.mark.parametrize(
    ("cur", "prev"),
    [
        ((1.0, 0.0), (1.0, 0.0, 0.0)),
        ((0.0, 0.0), (1.0, 0.0)),
        ((1.0, 0.0), (0.0, 0.0)),
        ((math.nan, 1.0), (1.0, 0.0)),
        ((1.0, 0.0), (math.inf, 1.0)),
        ((1e-200, 0.0), (1.0, 0.0)),
    ],
)
def test_vector_change_score_invalid(
    cur: tuple[float, ...], prev: tuple[float, ...]
) -> None:
    """长度不一致, 非有限值或范数为 0 (含下溢) 应抛出 ShiftValueError."""
    with pytest.raises(ShiftValueError):
        vector_change_score(TopicVector(cur), TopicVector(prev))


def test_topic_change_series() -> None:
    """逐周比较相邻主题向量, 缺少上一周时分数无定义."""
    vectors = {
        1: TopicVector((1.0, 0.0)),
        2: TopicVector((1.0, 0.0)),
        3: TopicVector((0.0, 1.0)),
        5: TopicVector((0.0, 1.0)),
    }

    scores = topic_change_series(vectors)

    assert scores[1] is None
    assert scores[2] == pytest.approx(0.0, abs=1e-12)
    assert scores[3] == pytest.approx(1.0)
    assert scores[5] is None


def test_alerts_from_scores() -> None:
    """外部分数同样取前 theta_r 周告警."""
    alerts = alerts_from_scores({1: None, 2: 0.3, 3: 0.9, 4: 0.1}, 2)

    assert alerts == {1: False, 2: True, 3: True, 4: False}


# --- 配对 t 检验 ---


def test_t_test_equal_samples() -> None:
    """x = y 时 p = 0.5."""
    x = [0.2, 0.5, 0.1, 0.4]

    assert paired_t_test_one_sided(x, x) == pytest.approx(0.5, abs=1e-9)


def test_t_test_degenerate_exact() -> None:
    """差值全部相同 (标准差为 0) 时不依赖 t 分布."""
    y = [1.0, 2.0, 3.0]

    assert paired_t_test_one_sided([2.0, 3.0, 4.0], y) == 0.0
    assert paired_t_test_one_sided([0.0, 1.0, 2.0], y) == 1.0


def test_t_test_degenerate_within_rounding() -> None:
    """差值只在舍入误差内不同时仍按常数差处理."""
    assert paired_t_test_one_sided([0.3, 0.5, 0.7], [0.1, 0.3, 0.5]) == 0.0
    assert paired_t_test_one_sided([0.1, 0.3, 0.5], [0.3, 0.5, 0.7]) == 1.0
    assert paired_t_test_one_sided([0.1 + 0.2, 0.3], [0.3, 0.1 + 0.2]) == 0.5


def test_t_test_thirty_pairs() -> None:
    """n=30, 差值均值 0.035, 标准差 0.09 时 t = 2.13, p 约为 0.0209."""
    z = math.sqrt(29 / 30)
    d = [0.035 + 0.09 * (z if k % 2 == 0 else -z) for k in range(30)]
    t_stat = 0.035 / (0.09 / math.sqrt(30))

    p = paired_t_test_one_sided(d, [0.0] * 30)

    assert t_stat == pytest.approx(2.1300, abs=1e-4)
    assert p == pytest.approx(float(student_t.sf(t_stat, 29)), abs=1e-9)
    assert p == pytest.approx(0.0209, abs=1e-3)


def test_t_test_antisymmetric() -> None:
    """交换 x 与 y 时 p 值互补."""
    x = [0.5, 0.4, 0.7, 0.3, 0.6]
    y = [0.45, 0.5, 0.55, 0.2, 0.4]

    assert paired_t_test_one_sided(x, y) + paired_t_test_one_sided(y, x) == pytest.approx(1.0)


@pytest.mark.parametrize(("x", "y"), [([0.1, 0.2], [0.1]), ([0.1], [0.2])])
def test_t_test_invalid(x: list[float], y: list[float]) -> None:
    """长度不一致或样本数少于 2 应抛出 ShiftValueError."""
    with pytest.raises(ShiftValueError):
        paired_t_test_one_sided(x, y)


# --- 汇总 ---


def _reports(pairs: list[tuple[set[int], set[int]]]) -> list[EvalReport]:
    return [precision_recall_f1(m, r) for m, r in pairs]


def test_summarize_reports() -> None:
    """汇总应给出均值与样本标准差."""
    reports = _reports([({1}, {1}), ({1}, {2})])

    summary = summarize_reports(reports)

    assert summary.n_reports == 2
    assert summary.f1_mean == pytest.approx(0.5)
    assert summary.f1_std == pytest.approx(math.sqrt(0.5))


def test_summarize_single_report() -> None:
    """只有一份报告时标准差为 0."""
    summary = summarize_reports(_reports([({1}, {1})]))

    assert summary.precision_std == 0.0


def test_summarize_empty() -> None:
    """空报告列表应抛出 ShiftValueError."""
    with pytest.raises(ShiftValueError):
        summarize_reports([])


def test_compare_methods_with_baseline() -> None:
    """有对照方法时应给出 p 值."""
    method = _reports([({1}, {1}), ({2}, {2}), ({3}, {3, 4})])
    baseline = _reports([({5}, {1}), ({2}, {2}), ({9}, {3, 4})])

    summary = compare_methods(method, baseline, "f1")

    assert summary.metric == "f1"
    assert summary.baseline is not None
    assert summary.p_value is not None
    assert 0.0 <= summary.p_value < 0.5


def test_compare_methods_without_baseline() -> None:
    """没有对照方法时只汇总."""
    summary = compare_methods(_reports([({1}, {1}), ({1}, {1})]))

    assert summary.baseline is None
    assert summary.p_value is None
    assert summary.method.f1_mean == 1.0
