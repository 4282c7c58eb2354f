"""Branched architectures as rooted DAGs and their composed complexity.

Layers sit on nodes; edges are pure precedence. A branch-free graph is a
plain layer sequence. For a tree that forks, the total complexity is the
sum over root-to-leaf paths minus, at every branch point, (out_degree - 1)
times the complexity of the root-to-branch-point prefix, so shared
prefixes are counted exactly once. Each path or prefix is analyzed as a
standalone sequence with its own N and bin grid.

Merge nodes (in-degree > 1) have no defined composition rule and are
rejected; an explicit topological linearization is available instead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .container import Container
from .divergence import CpseReport
from .errors import GraphError
from .pipeline import RunConfig, __version__, analyze_sequence


@dataclass(eq=False)
class ArchGraph:
    """Validated rooted DAG over container layer names."""

    root: str
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def successors(self, node: str) -> list[str]:
        """Children in deterministic order (position in the node list)."""
        rank = {n: i for i, n in enumerate(self.nodes)}
        kids = [b for a, b in self.edges if a == node]
        kids.sort(key=lambda n: rank[n])
        return kids

    def out_degree(self, node: str) -> int:
        return sum(1 for a, _ in self.edges if a == node)


@dataclass(eq=False)
class BranchDecomposition:
    """All root-to-leaf paths and all branch points with their out-degrees."""

    paths: list[list[str]]
    branch_points: list[tuple[str, int]]


def parse_graph(doc: dict, allow_merge: bool = False) -> ArchGraph:
    """Validate a graph document ``{"root":, "nodes":, "edges":}``.

    Rejects cycles, multiple roots, unreachable nodes, duplicate edges and,
    unless ``allow_merge`` is set, merge nodes.
    """
    if not isinstance(doc, dict):
        raise GraphError("graph document is not a JSON object")
    root = doc.get("root")
    nodes = doc.get("nodes")
    edges = doc.get("edges")
    if not isinstance(root, str) or not isinstance(nodes, list) or not isinstance(edges, list):
        raise GraphError("graph document needs 'root', 'nodes' and 'edges'")
    if not all(isinstance(n, str) for n in nodes):
        raise GraphError("node names must be strings")
    if len(set(nodes)) != len(nodes):
        raise GraphError("duplicate node names")
    node_set = set(nodes)
    if root not in node_set:
        raise GraphError(f"unknown layer name '{root}' as root")

    pairs = []
    seen = set()
    for e in edges:
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise GraphError(f"bad edge {e!r}")
        a, b = e
        for name in (a, b):
            if name not in node_set:
                raise GraphError(f"unknown layer name '{name}' in edge")
        if (a, b) in seen:
            raise GraphError(f"duplicate edge {a!r} -> {b!r}")
        seen.add((a, b))
        pairs.append((a, b))

    indeg = {n: 0 for n in nodes}
    for _, b in pairs:
        indeg[b] += 1
    roots = [n for n in nodes if indeg[n] == 0]
    if roots != [root]:
        if root in roots:
            others = [n for n in roots if n != root]
            raise GraphError(f"multiple roots: {others} also have in-degree 0")
        raise GraphError(f"root '{root}' has incoming edges")
    if not allow_merge:
        for n in nodes:
            if indeg[n] > 1:
                raise GraphError(
                    f"merge nodes unsupported: '{n}' has {indeg[n]} parents"
                )

    # Kahn's algorithm: anything left over sits on a cycle.
    g = ArchGraph(root=root, nodes=tuple(nodes), edges=tuple(pairs))
    remaining = dict(indeg)
    ready = [n for n in nodes if remaining[n] == 0]
    visited = 0
    while ready:
        n = ready.pop()
        visited += 1
        for kid in g.successors(n):
            remaining[kid] -= 1
            if remaining[kid] == 0:
                ready.append(kid)
    if visited != len(nodes):
        raise GraphError("cycle detected")

    reachable = set()
    stack = [root]
    while stack:
        n = stack.pop()
        if n in reachable:
            continue
        reachable.add(n)
        stack.extend(g.successors(n))
    unreachable = [n for n in nodes if n not in reachable]
    if unreachable:
        raise GraphError(f"unreachable node '{unreachable[0]}'")
    return g


def decompose(g: ArchGraph) -> BranchDecomposition:
    """Enumerate root-to-leaf paths (deterministic order) and branch points."""
    paths: list[list[str]] = []
    branch_points: list[tuple[str, int]] = []

    def walk(node: str, path: list[str]) -> None:
        path = path + [node]
        kids = g.successors(node)
        if not kids:
            paths.append(path)
            return
        if len(kids) > 1:
            branch_points.append((node, len(kids)))
        for kid in kids:
            walk(kid, path)

    walk(g.root, [])
    return BranchDecomposition(paths=paths, branch_points=branch_points)


def linearize(g: ArchGraph, order: str = "topological") -> list[str]:
    """Flatten a graph (merge nodes allowed) to one deterministic sequence."""
    if order != "topological":
        raise GraphError(f"unknown linearization '{order}'")
    rank = {n: i for i, n in enumerate(g.nodes)}
    indeg = {n: 0 for n in g.nodes}
    for _, b in g.edges:
        indeg[b] += 1
    ready = sorted([n for n in g.nodes if indeg[n] == 0], key=rank.get)
    out = []
    while ready:
        n = ready.pop(0)
        out.append(n)
        changed = False
        for kid in g.successors(n):
            indeg[kid] -= 1
            if indeg[kid] == 0:
                ready.append(kid)
                changed = True
        if changed:
            ready.sort(key=rank.get)
    return out


def _prefix_to(g: ArchGraph, target: str) -> list[str]:
    # Unique root path in a merge-free graph: walk parents backwards.
    parent = {b: a for a, b in g.edges}
    path = [target]
    while path[-1] != g.root:
        path.append(parent[path[-1]])
    return list(reversed(path))


def branched_cpse(
    g: ArchGraph, c: Container, config: RunConfig = RunConfig()
) -> CpseReport:
    """Composed complexity of a branched architecture.

    A chain reduces to the plain feedforward analysis of the same sequence
    (identical code path, bit-identical result).
    """
    by_name = {t.name: t for t in c.layers}
    for node in g.nodes:
        if node not in by_name:
            raise GraphError(f"unknown layer name '{node}': not in container")

    dec = decompose(g)

    def run(names: list[str]) -> CpseReport:
        if len(names) == 1:
            # A depth-1 sequence has no consecutive pair; the sum over
            # pairs is empty and the measure is exactly zero. This arises
            # for the root-to-branch prefix when the fork sits at the root.
            return CpseReport(
                cpse=0.0, series=None, layer_count=1, log_floor_hits=0,
                floor=config.log_floor, skip_first=config.skip_first,
            )
        return analyze_sequence([by_name[n] for n in names], config).report

    path_results = [(path, run(path)) for path in dec.paths]
    if not dec.branch_points and len(path_results) == 1:
        return path_results[0][1]

    prefix_results = [
        (node, deg, run(_prefix_to(g, node))) for node, deg in dec.branch_points
    ]
    total = sum(r.cpse for _, r in path_results)
    total -= sum((deg - 1) * r.cpse for _, deg, r in prefix_results)
    hits = sum(r.log_floor_hits for _, r in path_results)
    hits += sum(r.log_floor_hits for _, _, r in prefix_results)
    report = CpseReport(
        cpse=total,
        series=None,
        layer_count=len(g.nodes),
        log_floor_hits=hits,
        floor=config.log_floor,
        skip_first=config.skip_first,
    )
    report.config = {"tool_version": __version__, **config.as_dict()}
    report.branches = {
        "paths": [
            {"nodes": path, "cpse": r.cpse} for path, r in path_results
        ],
        "branch_points": [
            {"node": node, "out_degree": deg, "cpse": r.cpse}
            for node, deg, r in prefix_results
        ],
    }
    return report
