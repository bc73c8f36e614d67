"""Coloured directed multigraphs of permutation families.

A family sigma_c of permutations of [n] defines a loopless directed
multigraph with an edge u -> v of colour c whenever u != v and
(u)sigma_c = v.  Components always mean components of the underlying
undirected multigraph.  The merge calculus (component counts under edge
adjunction, merged-component sets) is provided both for these graphs and
for raw undirected edge multisets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .perms import is_permutation


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if self.size[x] < self.size[y]:
            x, y = y, x
        self.parent[y] = x
        self.size[x] += self.size[y]
        self.count -= 1
        return True

    def copy(self) -> "UnionFind":
        other = UnionFind.__new__(UnionFind)
        other.parent = list(self.parent)
        other.size = list(self.size)
        other.count = self.count
        return other


class ColoredDigraph:
    """Loopless coloured digraph of a permutation family; treat as immutable."""

    __slots__ = ("n", "_sigma")

    def __init__(self, n: int, sigma: dict):
        for c, p in sigma.items():
            if not is_permutation(p, n):
                raise ValueError(f"colour {c}: not a permutation of [{n}]")
        self.n = n
        self._sigma = {c: tuple(sigma[c]) for c in sorted(sigma)}

    @property
    def colors(self) -> tuple:
        return tuple(self._sigma)

    def perm(self, c) -> tuple:
        return self._sigma[c]

    def edges(self) -> list:
        """All (u, v, colour) triples, ordered by colour then tail."""
        out = []
        for c, p in self._sigma.items():
            out.extend((u, p[u], c) for u in range(self.n) if p[u] != u)
        return out

    def edge_set(self, c) -> tuple:
        """The directed pairs of colour c (the non-fixed part of its permutation)."""
        p = self._sigma[c]
        return tuple((u, p[u]) for u in range(self.n) if p[u] != u)

    def undirected_support(self) -> list:
        """One undirected pair per edge, multiplicities kept."""
        return [(u, v) for u, v, _ in self.edges()]

    def out_neighbors(self, v: int) -> set:
        return {p[v] for p in self._sigma.values() if p[v] != v}

    def __repr__(self):
        return f"ColoredDigraph(n={self.n}, colors={self.colors})"


def build_graph(n: int, sigma: dict) -> ColoredDigraph:
    """Graph of the permutation family; sigma maps colour -> permutation."""
    return ColoredDigraph(n, dict(sigma))


def rack_graph(rack, colors=None) -> ColoredDigraph:
    """The graph of a rack restricted to a colour subset (all colours if None)."""
    if colors is None:
        colors = range(rack.n)
    return ColoredDigraph(rack.n, {c: rack.maps[c] for c in colors})


def reduced_graph(graph: ColoredDigraph) -> tuple:
    """Distinct directed pairs with at least one edge, sorted."""
    return tuple(sorted({(u, v) for u, v, _ in graph.edges()}))


@dataclass(frozen=True)
class ComponentStructure:
    parts: tuple        # disjoint sorted vertex tuples, ordered by minimum
    eta: tuple          # eta[q-1] = number of vertices in parts of size q
    cp: int             # number of parts
    part_index: tuple   # vertex -> index into parts

    def part_of(self, v: int) -> tuple:
        return self.parts[self.part_index[v]]


def component_structure(n: int, pairs) -> ComponentStructure:
    """Components of the undirected multigraph on [n] with the given pairs."""
    uf = UnionFind(n)
    for u, v in pairs:
        uf.union(u, v)
    groups = {}
    for v in range(n):
        groups.setdefault(uf.find(v), []).append(v)
    parts = tuple(tuple(sorted(g)) for g in sorted(groups.values(), key=min))
    eta = [0] * n
    for part in parts:
        eta[len(part) - 1] += len(part)
    index = [0] * n
    for i, part in enumerate(parts):
        for v in part:
            index[v] = i
    return ComponentStructure(parts=parts, eta=tuple(eta), cp=len(parts),
                              part_index=tuple(index))


def components(graph: ColoredDigraph) -> ComponentStructure:
    return component_structure(graph.n, graph.undirected_support())


def out_degree(graph: ColoredDigraph, v: int) -> int:
    """Number of distinct heads over all colours at v."""
    return len(graph.out_neighbors(v))


def out_degrees(graph: ColoredDigraph) -> tuple:
    return tuple(out_degree(graph, v) for v in range(graph.n))


def directed_path_exists(graph: ColoredDigraph, u: int, v: int) -> bool:
    """True iff v is reachable from u following edge directions."""
    if u == v:
        raise ValueError("endpoints must be distinct")
    succ = [set() for _ in range(graph.n)]
    for a, b, _ in graph.edges():
        succ[a].add(b)
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in succ[x]:
            if y == v:
                return True
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


# ---------------------------------------------------------------------------
# merge calculus; works on raw undirected edge multisets so that arbitrary
# multigraphs can be exercised, not only graphs of permutation families

def validate_edges(n: int, edges) -> list:
    edges = list(edges)
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) out of range")
        if u == v:
            raise ValueError(f"loop at {u}")
    return edges


def multigraph_component_count(n: int, *edge_sets) -> int:
    """cp of the undirected multigraph on [n] with all given edge multisets."""
    uf = UnionFind(n)
    for edges in edge_sets:
        for u, v in validate_edges(n, edges):
            uf.union(u, v)
    return uf.count


def multigraph_merged_parts(n: int, base_edges, extra_edges) -> tuple:
    """Components of (n, base_edges) having an extra edge to their complement.

    Only the support of extra_edges matters, but multiplicities are accepted.
    """
    structure = component_structure(n, validate_edges(n, base_edges))
    merged = set()
    for u, v in validate_edges(n, extra_edges):
        iu, iv = structure.part_index[u], structure.part_index[v]
        if iu != iv:
            merged.add(iu)
            merged.add(iv)
    return tuple(structure.parts[i] for i in sorted(merged))


def count_components_with(graph: ColoredDigraph, extra_edges) -> int:
    """cp of the graph after adjoining extra_edges as uncoloured edges."""
    return multigraph_component_count(graph.n, graph.undirected_support(), extra_edges)


def merged_components(graph: ColoredDigraph, extra_edges) -> tuple:
    """The component vertex sets of the graph merged by extra_edges."""
    return multigraph_merged_parts(graph.n, graph.undirected_support(), extra_edges)


# ---------------------------------------------------------------------------
# greedy merge ordering: repeatedly pick the colour whose edges join up the
# most components of the graph of the colours chosen so far

def greedy_merge_order(n: int, maps_by_color: dict, candidates) -> tuple:
    """Order all candidate colours greedily; returns (order, cp_sequence).

    cp_sequence[i] is the component count after the first i+1 picks; ties are
    broken by the smallest colour label, so the result is deterministic.
    """
    remaining = sorted(candidates)
    for c in remaining:
        if not is_permutation(maps_by_color[c], n):
            raise ValueError(f"colour {c}: not a permutation of [{n}]")
    current = UnionFind(n)
    order = []
    cps = []
    while remaining:
        best_c = None
        best_cp = None
        for c in remaining:
            trial = current.copy()
            p = maps_by_color[c]
            for u in range(n):
                if p[u] != u:
                    trial.union(u, p[u])
            if best_cp is None or trial.count < best_cp:
                best_cp = trial.count
                best_c = c
        p = maps_by_color[best_c]
        for u in range(n):
            if p[u] != u:
                current.union(u, p[u])
        order.append(best_c)
        cps.append(current.count)
        remaining.remove(best_c)
    return tuple(order), tuple(cps)


def component_out_degree_constant(rack, subset) -> bool:
    """True iff every component of the subset-coloured graph is out-regular.

    Out-degree is taken with respect to the same colour subset.
    """
    g = rack_graph(rack, subset)
    structure = components(g)
    degs = out_degrees(g)
    return all(len({degs[v] for v in part}) == 1 for part in structure.parts)


def to_dot(graph: ColoredDigraph) -> str:
    """DOT text of the coloured digraph, deterministic ordering."""
    lines = [f"digraph g{graph.n} {{"]
    for v in range(graph.n):
        lines.append(f"  {v};")
    for u, v, c in graph.edges():
        lines.append(f'  {u} -> {v} [label="{c}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
