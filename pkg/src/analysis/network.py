"""
Emoji co-occurrence networks.

Builds a weighted undirected graph where an edge counts the tweets holding
both emojis, reports components and weighted degree, lays the graph out
with Fruchterman–Reingold and exports it as an edge CSV, GraphML or SVG.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd
from matplotlib.patches import Circle
from tqdm import tqdm

from analysis.emojis import emoji_keys
from analysis.geo import Gazetteer, split_by_region
from models.entities import (
    AffectedRegionSet,
    CooccurrenceGraph,
    EdgeKey,
    LayoutConfig,
    TweetRecord,
    edge_key,
)
from utils.errors import NumericError
from utils.io_utils import ensure_parent
from utils.parallel import parallel_count
from utils.plot_utils import new_canvas, save_svg
from utils.random_utils import make_rng


PAIR_MODES = ("presence", "occurrences")
REGIONS = ("affected", "other", "all")
EXPORT_FORMATS = ("edge-csv", "graphml", "svg")

Position = Tuple[float, float]


# ---------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------


def _count_chunk(records: Sequence[TweetRecord], pair_mode: str) -> Counter:
    """Node and edge tallies for one chunk, keyed ("n", key) / ("e", a, b)."""
    tally: Counter = Counter()
    for record in records:
        per_tweet = Counter(emoji_keys(record.text))
        for key, count in per_tweet.items():
            tally[("n", key)] += count
        for a, b in combinations(sorted(per_tweet), 2):
            weight = 1 if pair_mode == "presence" else per_tweet[a] * per_tweet[b]
            tally[("e", a, b)] += weight
    return tally


def build_cooccurrence(
    records: Sequence[TweetRecord],
    pair_mode: str = "presence",
    threads: int = 1,
) -> CooccurrenceGraph:
    """
    Build the co-occurrence graph of a tweet subset.

    Node counts are emoji occurrences. In ``presence`` mode every unordered
    pair of distinct emojis in a tweet adds 1 to its edge; ``occurrences``
    mode adds the product of the two per-tweet counts instead.

    Args:
        records: Tweets.
        pair_mode: "presence" or "occurrences".
        threads: Worker count for chunked counting.

    Returns:
        CooccurrenceGraph with nodes and edges in key order.
    """
    if pair_mode not in PAIR_MODES:
        raise ValueError(f"pair_mode must be one of {PAIR_MODES}")

    tally = parallel_count(list(records), lambda chunk: _count_chunk(chunk, pair_mode), threads)

    nodes = {item[1]: count for item, count in tally.items() if item[0] == "n"}
    edges = {(item[1], item[2]): count for item, count in tally.items() if item[0] == "e"}

    return CooccurrenceGraph(
        nodes=dict(sorted(nodes.items())),
        edges=dict(sorted(edges.items())),
    )


def to_networkx(graph: CooccurrenceGraph) -> nx.Graph:
    """networkx view with ``count`` node and ``weight`` edge attributes."""
    g = nx.Graph()
    for key, count in graph.nodes.items():
        g.add_node(key, count=count)
    for (a, b), weight in graph.edges.items():
        g.add_edge(a, b, weight=weight)
    return g


def subset_by_region(
    records: Sequence[TweetRecord],
    gazetteer: Gazetteer,
    affected: AffectedRegionSet,
    region: str = "all",
) -> List[TweetRecord]:
    """
    Restrict tweets to the affected region, the rest of the world, or all.

    ``all`` keeps every record, geotagged or not.
    """
    if region not in REGIONS:
        raise ValueError(f"region must be one of {REGIONS}")
    if region == "all":
        return list(records)

    inside, outside, _ = split_by_region(records, gazetteer, affected)
    return inside if region == "affected" else outside


def prune(graph: CooccurrenceGraph, min_weight: int = 1, drop_isolated: bool = False) -> CooccurrenceGraph:
    """
    Drop edges lighter than ``min_weight``.

    Args:
        graph: Graph to prune.
        min_weight: Minimum edge weight kept.
        drop_isolated: Also drop nodes left without edges.

    Returns:
        New graph.
    """
    edges = {pair: w for pair, w in graph.edges.items() if w >= min_weight}
    if drop_isolated:
        linked = {key for pair in edges for key in pair}
        nodes = {key: c for key, c in graph.nodes.items() if key in linked}
    else:
        nodes = dict(graph.nodes)
    return CooccurrenceGraph(nodes=nodes, edges=edges)


# ---------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------


def components(graph: CooccurrenceGraph) -> List[FrozenSet[str]]:
    """
    Connected components, largest first, ties by their sorted members.

    Isolated nodes form singleton components.
    """
    found = [frozenset(c) for c in nx.connected_components(to_networkx(graph))]
    return sorted(found, key=lambda c: (-len(c), sorted(c)))


def degree_centrality(graph: CooccurrenceGraph) -> Dict[str, int]:
    """Weighted degree (sum of incident edge weights) per node."""
    degree = dict(to_networkx(graph).degree(weight="weight"))
    return {key: int(degree.get(key, 0)) for key in graph.nodes}


def top_pairs(graph: CooccurrenceGraph, n: int = 10) -> List[Tuple[EdgeKey, int]]:
    """The ``n`` heaviest edges, ties by pair."""
    ranked = sorted(graph.edges.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:n]


def summarize(graph: CooccurrenceGraph, n: int = 10) -> Dict[str, object]:
    """JSON-ready overview: sizes, components, central nodes, top pairs."""
    centrality = degree_centrality(graph)
    central = sorted(centrality.items(), key=lambda item: (-item[1], item[0]))[:n]
    return {
        "n_nodes": len(graph.nodes),
        "n_edges": len(graph.edges),
        "components": [sorted(c) for c in components(graph)],
        "central_nodes": [{"emoji": key, "weighted_degree": deg} for key, deg in central],
        "top_pairs": [{"a": a, "b": b, "weight": w} for (a, b), w in top_pairs(graph, n)],
    }


# ---------------------------------------------------------------------
# Layout
# ---------------------------------------------------------------------


def layout_force_directed(
    graph: CooccurrenceGraph,
    config: Optional[LayoutConfig] = None,
    quiet: bool = True,
) -> Dict[str, Position]:
    """
    Fruchterman–Reingold layout inside a ``width × height`` frame.

    Repulsion k²/d acts between all pairs, attraction d²/k along edges.
    Displacements are capped by a temperature that cools linearly to zero
    (or geometrically with ``decay``). Start positions are seeded uniform
    draws; positions are clamped to the frame after every step.

    Args:
        graph: Graph with at least one node.
        config: Layout parameters.
        quiet: Disable the progress bar.

    Returns:
        Mapping of node key to ``(x, y)``.

    Raises:
        ValueError: If the graph has no nodes.
        NumericError: If a coordinate becomes non-finite.
    """
    config = config or LayoutConfig()
    keys = sorted(graph.nodes)
    n = len(keys)
    if n == 0:
        raise ValueError("Cannot lay out an empty graph")

    width, height = float(config.width), float(config.height)
    if n == 1:
        return {keys[0]: (width / 2.0, height / 2.0)}

    k = config.k if config.k is not None else math.sqrt(width * height / n)
    temperature = (
        config.initial_temperature
        if config.initial_temperature is not None
        else min(width, height) / 10.0
    )
    step = temperature / (config.iterations + 1)

    index = {key: i for i, key in enumerate(keys)}
    src = np.array([index[a] for a, _ in graph.edges], dtype=np.int64)
    dst = np.array([index[b] for _, b in graph.edges], dtype=np.int64)

    rng = make_rng(config.seed)
    pos = rng.uniform(low=(0.0, 0.0), high=(width, height), size=(n, 2))

    for _ in tqdm(range(config.iterations), desc="Force layout", leave=False, disable=quiet):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.maximum(np.linalg.norm(delta, axis=2), 1e-9)
        np.fill_diagonal(dist, np.inf)
        disp = (delta * (k * k / dist**2)[:, :, None]).sum(axis=1)

        if len(src):
            edge_delta = pos[src] - pos[dst]
            edge_dist = np.linalg.norm(edge_delta, axis=1)
            pull = edge_delta * (edge_dist / k)[:, None]
            np.add.at(disp, src, -pull)
            np.add.at(disp, dst, pull)

        length = np.linalg.norm(disp, axis=1)
        scale = np.where(length > 0, np.minimum(length, temperature) / np.maximum(length, 1e-12), 0.0)
        pos = pos + disp * scale[:, None]
        pos[:, 0] = np.clip(pos[:, 0], 0.0, width)
        pos[:, 1] = np.clip(pos[:, 1], 0.0, height)

        if config.cooling == "linear":
            temperature = max(temperature - step, 0.0)
        else:
            temperature *= config.decay

    if not np.all(np.isfinite(pos)):
        raise NumericError("Layout produced non-finite coordinates")

    return {key: (float(pos[i, 0]), float(pos[i, 1])) for key, i in index.items()}


# ---------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------


def _export_svg(
    graph: CooccurrenceGraph,
    layout: Dict[str, Position],
    path: Path,
    width: float,
    height: float,
    title: str,
) -> None:
    pad = 40.0
    fig, ax = new_canvas(width + 2 * pad, height + 2 * pad)
    max_weight = max(graph.edges.values(), default=1)
    max_count = max(graph.nodes.values(), default=1) or 1

    for i, ((a, b), weight) in enumerate(graph.edges.items()):
        (x1, y1), (x2, y2) = layout[a], layout[b]
        ax.plot(
            [x1 + pad, x2 + pad],
            [y1 + pad, y2 + pad],
            color="#999999",
            alpha=0.6,
            linewidth=0.5 + 4.5 * weight / max_weight,
            gid=f"edge-{i}",
            zorder=1,
        )

    for i, (key, count) in enumerate(graph.nodes.items()):
        x, y = layout[key]
        radius = 4.0 + 16.0 * math.sqrt(count / max_count)
        ax.add_patch(
            Circle(
                (x + pad, y + pad),
                radius,
                facecolor="#fde68a",
                edgecolor="#92400e",
                gid=f"node-{i}",
                zorder=2,
            )
        )
        ax.text(x + pad, y + pad, key, ha="center", va="center", fontsize=radius, zorder=3)

    save_svg(fig, path, title=title)


def export_graph(
    graph: CooccurrenceGraph,
    path: str | Path,
    fmt: str,
    layout: Optional[Dict[str, Position]] = None,
    config: Optional[LayoutConfig] = None,
    title: str = "Emoji co-occurrence network",
) -> Path:
    """
    Write a graph as an edge CSV, GraphML or SVG drawing.

    Args:
        graph: Graph to export.
        path: Destination file.
        fmt: "edge-csv", "graphml" or "svg".
        layout: Node positions (required for svg).
        config: Layout frame used to size the SVG canvas.
        title: SVG title.

    Returns:
        Written path.
    """
    if fmt not in EXPORT_FORMATS:
        raise ValueError(f"fmt must be one of {EXPORT_FORMATS}")

    path = ensure_parent(path)

    if fmt == "edge-csv":
        frame = pd.DataFrame(
            [(a, b, w) for (a, b), w in graph.edges.items()],
            columns=["a", "b", "weight"],
        )
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    elif fmt == "graphml":
        nx.write_graphml(to_networkx(graph), path, encoding="utf-8")
    else:
        if layout is None:
            raise ValueError("An SVG export needs a layout")
        missing = set(graph.nodes) - set(layout)
        if missing:
            raise ValueError(f"Layout is missing {len(missing)} nodes")
        config = config or LayoutConfig()
        _export_svg(graph, layout, path, float(config.width), float(config.height), title)

    print(f"[✅] Wrote {fmt} graph ({len(graph.nodes):,} nodes, {len(graph.edges):,} edges) to {path}")
    return path


def load_graphml(path: str | Path) -> CooccurrenceGraph:
    """Read a GraphML file written by :func:`export_graph`."""
    g = nx.read_graphml(path)
    nodes = {str(key): int(data.get("count", 0)) for key, data in g.nodes(data=True)}
    edges = {edge_key(str(a), str(b)): int(data.get("weight", 1)) for a, b, data in g.edges(data=True)}
    return CooccurrenceGraph(nodes=dict(sorted(nodes.items())), edges=dict(sorted(edges.items())))


if __name__ == "__main__":
    from utils.date_utils import parse_timestamp

    moment = parse_timestamp("2017-09-07T12:00:00Z")
    sample = [
        TweetRecord(id=str(i), text=text, created_at=moment)
        for i, text in enumerate(["🙏❤️", "🙏🙏", "🙏💔 stay safe", "🌀🌊"])
    ]

    print("=== network demo ===")
    demo = build_cooccurrence(sample)
    print(demo.edges)
    print(components(demo))
    print(layout_force_directed(demo, LayoutConfig(iterations=50)))
