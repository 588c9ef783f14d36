"""Targeted objects: bipartite graphs with a cycle basis, and their prototype classes.

An object is described by its VNs, CNs, edges and a basis of fundamental cycles. Each basis
cycle is an alternating node sequence (v1, c1, v2, c2, ..., vg, cg); edge (v_i, c_i) carries
sign +1 and edge (v_{i+1}, c_i) sign -1 in that cycle's column of the incidence matrix.

A prototype class is a pair of equivalence partitions on VNs and CNs (nodes in one block
land on the same column/row of the base matrix).
"""
from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import combinations

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import GraphMatcher

from .errors import ValidationError

logger = logging.getLogger(__name__)

Partition = tuple[tuple[str, ...], ...]

PATH_KINDS = (1, 2, 3)
CONCATENATED_KINDS = ("2-1-2", "2-1-3", "2-2-2", "3-1-3")


@dataclass(frozen=True, slots=True, eq=False)
class ObjectGraph:
    """Connected bipartite object graph with a cycle basis and its sign incidence."""

    name: str
    vns: tuple[str, ...]
    cns: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    basis: tuple[tuple[str, ...], ...]
    incidence: np.ndarray

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[str]], name: str = "") -> ObjectGraph:
        """Build an object as the union of alternating cycles, which become its basis.

        Raises:
            ValidationError: If a cycle is not alternating, the union is disconnected, or the
                cycles are not a basis of the union's cycle space.
        """
        vns: dict[str, None] = {}
        cns: dict[str, None] = {}
        edges: dict[tuple[str, str], None] = {}
        for cycle in cycles:
            if len(cycle) < 4 or len(cycle) % 2:
                raise ValidationError(f"cycle {tuple(cycle)} is not an alternating cycle")
            for position, node in enumerate(cycle):
                (vns if position % 2 == 0 else cns)[node] = None
            half = len(cycle) // 2
            for k in range(half):
                vn, cn, nxt = cycle[2 * k], cycle[2 * k + 1], cycle[(2 * k + 2) % len(cycle)]
                edges[(vn, cn)] = None
                edges[(nxt, cn)] = None
        if set(vns) & set(cns):
            raise ValidationError("a node appears both as VN and CN")
        return cls._assemble(name, tuple(vns), tuple(cns), tuple(edges), cycles)

    @classmethod
    def from_edges(
        cls,
        vns: Sequence[str],
        cns: Sequence[str],
        edges: Sequence[tuple[str, str]],
        name: str = "",
    ) -> ObjectGraph:
        """Build an object from its edge list, with a minimum cycle basis from networkx."""
        graph = _bipartite(vns, cns, edges)
        basis = [_ordered_cycle(graph, nodes) for nodes in nx.minimum_cycle_basis(graph)]
        basis.sort(key=lambda cycle: (len(cycle), cycle))
        return cls._assemble(name, tuple(vns), tuple(cns), tuple(edges), basis)

    @classmethod
    def _assemble(
        cls,
        name: str,
        vns: tuple[str, ...],
        cns: tuple[str, ...],
        edges: tuple[tuple[str, str], ...],
        cycles: Sequence[Sequence[str]],
    ) -> ObjectGraph:
        graph = _bipartite(vns, cns, edges)
        if not nx.is_connected(graph):
            raise ValidationError(f"object {name!r} is not connected")
        rank = len(edges) - len(vns) - len(cns) + 1
        if len(cycles) != rank:
            raise ValidationError(f"basis has {len(cycles)} cycles, cycle space rank is {rank}")

        edge_index = {edge: k for k, edge in enumerate(edges)}
        incidence = np.zeros((len(edges), len(cycles)), dtype=np.int64)
        for s, cycle in enumerate(cycles):
            half = len(cycle) // 2
            for k in range(half):
                vn, cn, nxt = cycle[2 * k], cycle[2 * k + 1], cycle[(2 * k + 2) % len(cycle)]
                if (vn, cn) not in edge_index or (nxt, cn) not in edge_index:
                    raise ValidationError(f"cycle {tuple(cycle)} leaves the object")
                incidence[edge_index[(vn, cn)], s] += 1
                incidence[edge_index[(nxt, cn)], s] -= 1
        if rank and np.linalg.matrix_rank(incidence) != rank:
            raise ValidationError("basis cycles are not independent")
        return cls(name, vns, cns, edges, tuple(tuple(c) for c in cycles), incidence)

    @property
    def basis_size(self) -> int:
        return len(self.basis)

    def to_networkx(self) -> nx.Graph:
        return _bipartite(self.vns, self.cns, self.edges)

    def automorphisms(self) -> list[dict[str, str]]:
        """Graph automorphisms that keep VNs on the VN side and CNs on the CN side."""
        graph = self.to_networkx()
        matcher = GraphMatcher(graph, graph, node_match=lambda a, b: a["side"] == b["side"])
        return list(matcher.isomorphisms_iter())


@dataclass(frozen=True, slots=True)
class PrototypeClass:
    """Equivalence partitions of an object's VNs and CNs with their automorphism order."""

    vn_partition: Partition
    cn_partition: Partition
    aut_order: int

    @property
    def vn_classes(self) -> int:
        return len(self.vn_partition)

    @property
    def cn_classes(self) -> int:
        return len(self.cn_partition)

    def cardinality(self, gamma: int, kappa: int) -> int:
        """Number of distinct prototypes of this class in a gamma x kappa base matrix."""
        assignments = math.factorial(self.vn_classes) * math.factorial(self.cn_classes)
        return (
            assignments // self.aut_order
            * math.comb(kappa, self.vn_classes)
            * math.comb(gamma, self.cn_classes)
        )


def _bipartite(
    vns: Sequence[str],
    cns: Sequence[str],
    edges: Sequence[tuple[str, str]],
) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(vns, side="v")
    graph.add_nodes_from(cns, side="c")
    graph.add_edges_from(edges)
    return graph


def _ordered_cycle(graph: nx.Graph, nodes: Sequence[str]) -> tuple[str, ...]:
    """Walk a chordless cycle given as a node set, starting from its first VN."""
    sub = graph.subgraph(nodes)
    if any(degree != 2 for _, degree in sub.degree()):
        raise ValidationError(f"basis cycle {sorted(nodes)} is not chordless")
    start = min(node for node in nodes if graph.nodes[node]["side"] == "v")
    order = [start]
    previous, current = None, start
    while True:
        step = min(n for n in sub.neighbors(current) if n != previous)
        if step == start:
            break
        order.append(step)
        previous, current = current, step
        if len(order) > len(nodes):
            raise ValidationError("cycle walk did not close")
    return tuple(order)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def cycle_object(girth_half: int) -> ObjectGraph:
    """Single cycle of length 2g: v1-c1-v2-c2-...-vg-cg."""
    if girth_half < 2:
        raise ValidationError("a cycle needs at least two VNs")
    cycle: list[str] = []
    for k in range(1, girth_half + 1):
        cycle += [f"v{k}", f"c{k}"]
    return ObjectGraph.from_cycles([cycle], name=f"cycle-{2 * girth_half}")


def concatenated_cycles(kind: str) -> ObjectGraph:
    """Two cycles joined at degree-3 VNs u=v1, w=v2 by three paths of the given types.

    ``kind`` is "i-j-k": the middle (type-j) path is shared by both fundamental cycles, the
    first cycle closes through the type-i path and the second through the type-k path.
    """
    try:
        first, shared, second = (int(part) for part in kind.split("-"))
    except ValueError as exc:
        raise ValidationError(f"object kind must look like '3-1-3', got {kind!r}") from exc
    if any(part not in PATH_KINDS for part in (first, shared, second)):
        raise ValidationError(f"path types must be 1, 2 or 3, got {kind!r}")

    counters = {"v": 2, "c": 0}

    def fresh(side: str) -> str:
        counters[side] += 1
        return f"{side}{counters[side]}"

    def path(length: int) -> list[str]:
        nodes = ["v1"]
        for step in range(length):
            nodes.append(fresh("c"))
            nodes.append("v2" if step == length - 1 else fresh("v"))
        return nodes

    middle = path(shared)
    closing = [path(first), path(second)]
    cycles = [middle[:-1] + list(reversed(other))[:-1] for other in closing]
    return ObjectGraph.from_cycles(cycles, name=kind)


# ---------------------------------------------------------------------------
# Prototype classes
# ---------------------------------------------------------------------------

def _conflicts(graph: nx.Graph, nodes: Sequence[str]) -> set[frozenset[str]]:
    """Pairs of same-side nodes with a common neighbour; they may never share a block."""
    pairs: set[frozenset[str]] = set()
    for a, b in combinations(nodes, 2):
        if set(graph.neighbors(a)) & set(graph.neighbors(b)):
            pairs.add(frozenset((a, b)))
    return pairs


def _partitions(
    nodes: Sequence[str],
    conflicts: set[frozenset[str]],
    max_blocks: int,
) -> Iterator[Partition]:
    """Set partitions of ``nodes`` avoiding conflicting pairs, with at most max_blocks blocks."""
    blocks: list[list[str]] = []

    def place(position: int) -> Iterator[Partition]:
        if position == len(nodes):
            yield tuple(tuple(block) for block in blocks)
            return
        node = nodes[position]
        for block in blocks:
            if all(frozenset((node, other)) not in conflicts for other in block):
                block.append(node)
                yield from place(position + 1)
                block.pop()
        if len(blocks) < max_blocks:
            blocks.append([node])
            yield from place(position + 1)
            blocks.pop()

    yield from place(0)


def _canonical_key(
    vn_partition: Partition,
    cn_partition: Partition,
    automorphisms: list[dict[str, str]],
    index: dict[str, int],
) -> tuple:
    images = []
    for sigma in automorphisms:
        v_image = tuple(sorted(tuple(sorted(index[sigma[n]] for n in b)) for b in vn_partition))
        c_image = tuple(sorted(tuple(sorted(index[sigma[n]] for n in b)) for b in cn_partition))
        images.append((v_image, c_image))
    return min(images)


def _induced_permutation(partition: Partition, sigma: dict[str, str]) -> tuple[int, ...] | None:
    block_of = {node: k for k, block in enumerate(partition) for node in block}
    image = []
    for block in partition:
        targets = {block_of[sigma[node]] for node in block}
        if len(targets) != 1:
            return None
        image.append(targets.pop())
    return tuple(image)


def automorphism_order(
    vn_partition: Partition,
    cn_partition: Partition,
    automorphisms: list[dict[str, str]],
) -> int:
    """Number of distinct class-level permutations induced by partition-preserving automorphisms."""
    induced: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for sigma in automorphisms:
        v_perm = _induced_permutation(vn_partition, sigma)
        c_perm = _induced_permutation(cn_partition, sigma)
        if v_perm is not None and c_perm is not None:
            induced.add((v_perm, c_perm))
    return len(induced)


def enumerate_prototype_classes(graph: ObjectGraph, gamma: int, kappa: int) -> list[PrototypeClass]:
    """All non-isomorphic prototype classes of ``graph`` fitting a gamma x kappa base matrix.

    Args:
        graph: Object to place.
        gamma: Row count; bounds the number of CN blocks.
        kappa: Column count; bounds the number of VN blocks.

    Returns:
        Classes in discovery order (coarser VN partitions first), each with its aut order.
    """
    nx_graph = graph.to_networkx()
    automorphisms = graph.automorphisms()
    index = {node: k for k, node in enumerate(graph.vns + graph.cns)}
    vn_options = list(_partitions(graph.vns, _conflicts(nx_graph, graph.vns), kappa))
    cn_options = list(_partitions(graph.cns, _conflicts(nx_graph, graph.cns), gamma))

    seen: set[tuple] = set()
    classes: list[PrototypeClass] = []
    for vn_partition in vn_options:
        for cn_partition in cn_options:
            key = _canonical_key(vn_partition, cn_partition, automorphisms, index)
            if key in seen:
                continue
            seen.add(key)
            order = automorphism_order(vn_partition, cn_partition, automorphisms)
            classes.append(PrototypeClass(vn_partition, cn_partition, order))
    logger.debug(
        "object %s: %d prototype classes (|Aut|=%d)", graph.name, len(classes), len(automorphisms)
    )
    return classes


def typical_class(graph: ObjectGraph) -> PrototypeClass:
    """All-singleton class: every node on its own row/column."""
    automorphisms = graph.automorphisms()
    vn_partition = tuple((node,) for node in graph.vns)
    cn_partition = tuple((node,) for node in graph.cns)
    return PrototypeClass(
        vn_partition, cn_partition, automorphism_order(vn_partition, cn_partition, automorphisms)
    )


def edge_class_monomials(graph: ObjectGraph, cls: PrototypeClass) -> list[tuple[int, ...]]:
    """Exponent vector of every edge-equivalence class, in first-edge order.

    Edges whose VN and CN blocks coincide land on the same base-matrix entry; their
    incidence rows add up.
    """
    vn_block = {node: k for k, block in enumerate(cls.vn_partition) for node in block}
    cn_block = {node: k for k, block in enumerate(cls.cn_partition) for node in block}
    sums: dict[tuple[int, int], np.ndarray] = {}
    for row, (vn, cn) in enumerate(graph.edges):
        key = (vn_block[vn], cn_block[cn])
        if key in sums:
            sums[key] = sums[key] + graph.incidence[row]
        else:
            sums[key] = graph.incidence[row].copy()
    return [tuple(int(v) for v in vector) for vector in sums.values()]
