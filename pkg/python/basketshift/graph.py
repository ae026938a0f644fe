"""窗口级 PMI 共现图.

对一个时间窗口内的篮子计算商品对的 PMI 比值, 按密度 rho 选边,
用连通分量聚类, 标记桥边, 并导出 DOT/JSON 解释快照.
"""

import json
import math
from collections.abc import Collection, Iterable, Mapping
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .config import GraphFormat
from .const import WEIGHT_DECIMALS
from .dataset import BasketSet, ItemCatalog, incidence_matrix
from .exceptions import ParameterError, ShiftValueError
from .log import logger

Pair = tuple[str, str]


@dataclass(frozen=True)
class EdgeScore:
    """商品对 (a, b) 的 PMI 比值, a < b.

    Attributes:
        a: 目录顺序较前的商品.
        b: 目录顺序较后的商品.
        score: `p(a, b) / (p(a) p(b))`, 非负.
    """

    a: str
    b: str
    score: float

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise ShiftValueError(f"边端点必须满足 a < b: ({self.a!r}, {self.b!r})")

    @property
    def pair(self) -> Pair:
        """无序商品对 (a, b)."""
        return (self.a, self.b)


EdgeLike = EdgeScore | Pair


def _pair_of(edge: EdgeLike) -> Pair:
    if isinstance(edge, EdgeScore):
        return edge.pair
    a, b = edge
    return (a, b) if a < b else (b, a)


def cooccurrence_scores(bs: BasketSet, catalog: ItemCatalog) -> list[EdgeScore]:
    """计算窗口内每对出现过的商品的 PMI 比值.

    `p_B(x)` 为包含 x 的篮子比例; 从未出现的商品不参与 (PMI 无定义).
    结果按 (a, b) 的目录顺序排列.

    Args:
        bs: 窗口内的篮子.
        catalog: 商品目录.

    Returns:
        list[EdgeScore]: 每个无序商品对一条记录.

    Raises:
        ShiftValueError: 篮子集合为空.
    """
    if not bs:
        raise ShiftValueError("篮子集合为空, 无法计算共现分数")

    x = incidence_matrix(bs, catalog)
    occurring = np.flatnonzero(x.sum(axis=0))
    sub = x[:, occurring]
    co = sub.T @ sub
    single = np.diag(co)
    # p(ab) / (p(a) p(b)) = c_ab * n / (c_a * c_b)
    ratio = co * len(bs) / np.outer(single, single)

    rows, cols = np.triu_indices(len(occurring), k=1)
    items = catalog.items
    return [
        EdgeScore(items[occurring[i]], items[occurring[j]], float(ratio[i, j]))
        for i, j in zip(rows.tolist(), cols.tolist())
    ]


def edge_budget(rho: float, n: int) -> int:
    """`round(rho * n * (n - 1) / 2)`, 四舍五入取半进一."""
    return math.floor(rho * n * (n - 1) / 2 + 0.5)


def select_edges(scores: Iterable[EdgeScore], rho: float, n: int) -> tuple[EdgeScore, ...]:
    """按 PMI 选出前 E 条边.

    E = min(round(rho * n(n-1)/2), 正分商品对数). 同分时目录顺序靠前的商品对优先;
    分数为 0 的商品对永不入选.

    Args:
        scores: 候选商品对.
        rho: 边密度, (0, 1].
        n: 窗口内出现的商品数.

    Returns:
        入选的边, 按 (a, b) 排序.

    Raises:
        ParameterError: rho 不在 (0, 1].
    """
    if not (0.0 < rho <= 1.0):
        raise ParameterError(f"rho 必须位于 (0, 1], 实际为 {rho}")
    positive = [s for s in scores if s.score > 0]
    budget = min(edge_budget(rho, n), len(positive))
    ranked = sorted(positive, key=lambda s: (-s.score, s.a, s.b))
    return tuple(sorted(ranked[:budget], key=lambda s: s.pair))


def _nx_graph(items: Iterable[str], edges: Iterable[EdgeLike]) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(sorted(items))
    for edge in edges:
        a, b = _pair_of(edge)
        if a not in g or b not in g:
            raise ShiftValueError(f"边 ({a!r}, {b!r}) 的端点不在商品集合中")
        if a == b:
            raise ShiftValueError(f"不允许自环: {a!r}")
        g.add_edge(a, b)
    return g


@dataclass(frozen=True)
class ClusterPartition:
    """商品集合的连通分量划分.

    簇按各自字典序最小的成员排序, 簇编号即其下标.

    Attributes:
        clusters: 每个簇的有序商品元组.
        membership: 商品到簇编号的映射.
    """

    clusters: tuple[tuple[str, ...], ...]
    membership: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        membership: dict[str, int] = {}
        for cid, cluster in enumerate(self.clusters):
            for item in cluster:
                if item in membership:
                    raise ShiftValueError(f"商品 {item!r} 同时属于多个簇")
                membership[item] = cid
        object.__setattr__(self, "membership", membership)

    @classmethod
    def of(cls, clusters: Iterable[Collection[str]]) -> "ClusterPartition":
        """由任意簇集合构建规范划分."""
        canonical = [tuple(sorted(c)) for c in clusters if c]
        return cls(tuple(sorted(canonical, key=lambda c: c[0])))

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def items(self) -> frozenset[str]:
        """划分覆盖的商品集合."""
        return frozenset(self.membership)


def connected_components(items: Iterable[str], edges: Iterable[EdgeLike]) -> ClusterPartition:
    """将商品划分为极大连通分量, 无边的商品自成一簇.

    Raises:
        ShiftValueError: 边端点不在商品集合中.
    """
    g = _nx_graph(items, edges)
    return ClusterPartition.of(nx.connected_components(g))


def classify_bridges(items: Iterable[str], edges: Iterable[EdgeLike]) -> dict[Pair, bool]:
    """标记每条边是否为桥 (删除后连通分量数增加).

    Returns:
        (a, b) 到是否为桥的映射, a < b.

    Raises:
        ShiftValueError: 边端点不在商品集合中.
    """
    edges = list(edges)
    g = _nx_graph(items, edges)
    bridges = {_pair_of(e) for e in nx.bridges(g)}
    return {_pair_of(e): _pair_of(e) in bridges for e in edges}


@dataclass(frozen=True)
class CooccurrenceGraph:
    """一个窗口的共现图.

    Attributes:
        items: 窗口内出现的商品.
        edges: 入选的边 (按 (a, b) 排序).
        rho: 选边密度.
        bridges: 每条边是否为桥.
    """

    items: ItemCatalog
    edges: tuple[EdgeScore, ...]
    rho: float
    bridges: Mapping[Pair, bool]


def build_graph(bs: BasketSet, catalog: ItemCatalog, rho: float) -> CooccurrenceGraph:
    """由窗口篮子构建共现图; 空窗口得到空图."""
    if not bs:
        return CooccurrenceGraph(items=ItemCatalog(()), edges=(), rho=rho, bridges={})
    scores = cooccurrence_scores(bs, catalog)
    items = ItemCatalog.of(item for basket in bs for item in basket.items if item in catalog)
    edges = select_edges(scores, rho, len(items))
    logger.debug(
        "共现图: 篮子数=%d, 商品数=%d, 边数=%d", len(bs), len(items), len(edges)
    )
    return CooccurrenceGraph(
        items=items,
        edges=edges,
        rho=rho,
        bridges=classify_bridges(items, edges),
    )


def _quote(ident: str) -> str:
    escaped = ident.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _to_dot(graph: CooccurrenceGraph, partition: ClusterPartition) -> str:
    out = ["graph G {"]
    for cid, cluster in enumerate(partition.clusters):
        out.append(f"  subgraph cluster_{cid} {{")
        out.extend(f"    {_quote(item)} [label={_quote(item)}];" for item in cluster)
        out.append("  }")
    for edge in graph.edges:
        style = "dashed" if graph.bridges[edge.pair] else "solid"
        out.append(
            f"  {_quote(edge.a)} -- {_quote(edge.b)} "
            f"[style={style}, weight={edge.score:.{WEIGHT_DECIMALS}f}];"
        )
    out.append("}")
    return "\n".join(out) + "\n"


def _to_json(graph: CooccurrenceGraph, partition: ClusterPartition) -> str:
    doc = {
        "nodes": list(graph.items.items),
        "edges": [
            {
                "a": edge.a,
                "b": edge.b,
                "score": edge.score,
                "bridge": graph.bridges[edge.pair],
            }
            for edge in graph.edges
        ],
        "clusters": [list(cluster) for cluster in partition.clusters],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def export_graph(
    graph: CooccurrenceGraph,
    partition: ClusterPartition,
    fmt: GraphFormat = "dot",
) -> str:
    """导出解释用图快照.

    DOT 中每个簇包在 `subgraph cluster_<id>` 块内, 桥边为 `style=dashed`,
    其余为 `style=solid`, `weight` 为 4 位小数的 PMI 比值.
    输出逐字节确定 (处处按目录顺序).

    Args:
        graph: 共现图.
        partition: 由该图的边得到的划分.
        fmt: `dot` 或 `json`.

    Returns:
        导出文本.

    Raises:
        ShiftValueError: 划分与图不一致.
    """
    if partition != connected_components(graph.items, graph.edges):
        raise ShiftValueError("划分与共现图的连通分量不一致")
    if fmt == "dot":
        return _to_dot(graph, partition)
    return _to_json(graph, partition)
