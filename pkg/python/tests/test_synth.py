"""测试合成数据生成."""

import pytest
from basketshift import (
    DetectionParams,
    GenerationError,
    ParameterError,
    PhaseConfig,
    ShiftValueError,
    detect,
    dumps,
    four_phase_schedule,
    gbe_series,
    generate,
)
from basketshift.synth import item_ids
from pydantic import ValidationError


def _phase(kind: str, contexts: list[list[int]], duration: int = 4, **kw: float) -> PhaseConfig:
    return PhaseConfig.model_validate(
        {
            "kind": kind,
            "duration": duration,
            "contexts": contexts,
            "weights": [1.0 / len(contexts)] * len(contexts),
            "p_in": kw.get("p_in", 0.6),
            "p_noise": kw.get("p_noise", 0.0),
        }
    )


GROUPS_OF_3 = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]]


# --- 确定性与真实切换点 ---


def test_generate_deterministic() -> None:
    """相同输入和种子应生成逐字节相同的数据集."""
    schedule = four_phase_schedule(n_items=12, n_contexts=3, weeks_per_phase=2)

    first, truth1 = generate(schedule, 12, 50, seed=3)
    second, truth2 = generate(schedule, 12, 50, seed=3)

    assert dumps(first) == dumps(second)
    assert truth1 == truth2


def test_generate_seed_matters() -> None:
    """不同种子应生成不同的数据集."""
    schedule = four_phase_schedule(n_items=12, n_contexts=3, weeks_per_phase=2)

    first, _ = generate(schedule, 12, 50, seed=1)
    second, _ = generate(schedule, 12, 50, seed=2)

    assert dumps(first) != dumps(second)


def test_ground_truth_weeks() -> None:
    """切换周为阶段持续时间的累计边界."""
    ds, truth = generate(four_phase_schedule(), 40, 20, seed=0)

    assert truth.horizon == 32
    assert ds.horizon == 32
    assert [(t.week, t.from_phase, t.to_phase) for t in truth.transitions] == [
        (9, "single", "split"),
        (17, "split", "focus"),
        (25, "focus", "merged"),
    ]


def test_generate_week_layout() -> None:
    """每周恰好 baskets_per_week 个非空篮子, 编号为 w{周}b{序号}."""
    ds, _ = generate([_phase("split", GROUPS_OF_3)], 12, 30, seed=5)

    assert ds.counts == {t: 30 for t in range(1, 5)}
    assert ds.weeks[2][0].basket_id == "w2b0"
    assert all(b.items for b in ds.baskets())
    assert set(ds.catalog.items) <= set(item_ids(12))


def test_disjoint_contexts_without_noise() -> None:
    """p_noise=0 时篮子不会同时包含两个上下文的商品."""
    ds, _ = generate([_phase("split", GROUPS_OF_3)], 12, 200, seed=9)
    ids = item_ids(12)
    owner = {ids[i]: k for k, group in enumerate(GROUPS_OF_3) for i in group}

    for basket in ds.baskets():
        assert len({owner[item] for item in basket.items}) == 1


def test_item_ids_sort_by_index() -> None:
    """商品 ID 补零, 字典序与下标顺序一致."""
    assert item_ids(3) == ["item000", "item001", "item002"]
    ids = item_ids(1500)
    assert ids == sorted(ids)
    assert ids[-1] == "item1499"


# --- 下游熵 ---


def test_single_context_gives_zero_entropy() -> None:
    """单一上下文覆盖全部商品时共现图为一个簇, Hg 为 0."""
    ds, _ = generate([_phase("single", [list(range(8))], duration=6)], 8, 300, seed=4)

    hg = gbe_series(ds, DetectionParams(rho=1.0, delta_t=4))

    assert all(hg[t] == 0.0 for t in range(4, 7))


def test_split_entropy_near_two_bits() -> None:
    """4 个等权互不相交的上下文, 完整窗口的 Hg 接近 2 比特."""
    schedule = [_phase("split", GROUPS_OF_3, duration=6)]
    for seed in range(20):
        ds, _ = generate(schedule, 12, 1000, seed=seed)

        hg = gbe_series(ds, DetectionParams(rho=1.0, delta_t=4))

        for t in range(4, 7):
            assert hg[t] == pytest.approx(2.0, abs=0.15)


def test_entropy_follows_phases() -> None:
    """Hg 在分化周上升, 在聚焦周下降."""
    schedule = [
        _phase("single", [list(range(12))]),
        _phase("split", GROUPS_OF_3),
        _phase("focus", [GROUPS_OF_3[0]]),
    ]
    ds, truth = generate(schedule, 12, 1000, seed=11)
    split_week, focus_week = (t.week for t in truth.transitions)

    hg = gbe_series(ds, DetectionParams(rho=1.0, delta_t=1))

    assert hg[split_week] > hg[split_week - 1] + 1.0
    assert hg[focus_week] < hg[focus_week - 1] - 1.0


def test_detection_benchmark() -> None:
    """分化转聚焦后的 cps 峰值落在切换周起 4 周内 (50 个种子中至少 80%)."""
    schedule = four_phase_schedule(n_items=40, include_merged=False)
    params = DetectionParams(rho=0.06, delta_t=4, theta_r=3)
    hits = 0
    for seed in range(50):
        ds, truth = generate(schedule, 40, 300, seed=seed)
        focus_week = truth.transitions[1].week

        series = detect(ds, params)

        band = range(focus_week, focus_week + params.delta_t)
        hits += any(t in band for t in series.alert_weeks)
    assert hits >= 40


# --- 参数校验 ---


@pytest.mark.parametrize(
    "overrides",
    [
        {"weights": [0.3, 0.3]},
        {"weights": [1.5, -0.5]},
        {"p_in": 0.0},
        {"p_in": 1.2},
        {"p_noise": 0.7},
        {"contexts": [[0], []]},
        {"contexts": [[0], [-1]]},
        {"duration": 0},
        {"kind": "shrink"},
        {"extra": 1},
    ],
)
def test_phase_config_invalid(overrides: dict) -> None:
    """无效的阶段配置应抛出 ValidationError."""
    fields = {
        "kind": "split",
        "duration": 2,
        "contexts": [[0], [1]],
        "weights": [0.5, 0.5],
        "p_in": 0.6,
        "p_noise": 0.0,
    }
    fields.update(overrides)

    with pytest.raises(ValidationError):
        PhaseConfig.model_validate(fields)


@pytest.mark.parametrize(
    ("n_items", "baskets_per_week", "seed"),
    [(1, 10, 0), (12, 0, 0), (12, 10, -1)],
)
def test_generate_invalid_parameters(n_items: int, baskets_per_week: int, seed: int) -> None:
    """越界参数应抛出 ParameterError."""
    with pytest.raises(ParameterError):
        generate([_phase("single", [[0, 1]])], n_items, baskets_per_week, seed)


def test_generate_empty_schedule() -> None:
    """空阶段表应抛出 ShiftValueError."""
    with pytest.raises(ShiftValueError):
        generate([], 12, 10, 0)


def test_generate_context_out_of_range() -> None:
    """上下文下标超出 n_items 应抛出 ShiftValueError."""
    with pytest.raises(ShiftValueError):
        generate([_phase("single", [[0, 12]])], 12, 10, 0)


def test_generate_gives_up_on_empty_baskets() -> None:
    """篮子几乎必然为空时, 重抽 100 轮后应抛出 GenerationError."""
    phase = _phase("single", [[0]], p_in=1e-12)

    with pytest.raises(GenerationError):
        generate([phase], 2, 5, 0)


def test_four_phase_schedule_layout() -> None:
    """四阶段表: 单一, 4 组分化, 聚焦第 0 组, 合并第 0 和第 1 组."""
    schedule = four_phase_schedule(n_items=40)

    assert [p.kind for p in schedule] == ["single", "split", "focus", "merged"]
    assert schedule[0].contexts == [list(range(40))]
    assert [len(c) for c in schedule[1].contexts] == [10, 10, 10, 10]
    assert schedule[2].contexts == [list(range(10))]
    assert schedule[3].contexts == [list(range(20))]
    assert schedule[1].weights == [0.25] * 4


def test_four_phase_schedule_uneven_groups() -> None:
    """商品数不能整除时余下的商品归入最后一组."""
    schedule = four_phase_schedule(n_items=10, n_contexts=3)

    assert [len(c) for c in schedule[1].contexts] == [3, 3, 4]


@pytest.mark.parametrize("n_contexts", [1, 41])
def test_four_phase_schedule_invalid(n_contexts: int) -> None:
    """n_contexts 不在 [2, n_items] 时应抛出 ParameterError."""
    with pytest.raises(ParameterError):
        four_phase_schedule(n_items=40, n_contexts=n_contexts)
