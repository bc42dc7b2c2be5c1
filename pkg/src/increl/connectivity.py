"""Source-sink connectivity and per-vector component bookkeeping.

For every state vector the induced subgraph is summarized as a node
partition: the component holding the source, the component holding the
sink, and the remaining components. A vector is feasible exactly when
source and sink share a component. Partitions of infeasible vectors are
kept and updated in place when new arcs arrive, so later growth stages
never search the full graph again.

Middle components are stored individually rather than as one flat node
set: an arriving arc that touches one node of a middle component must
drag the whole component into whichever side it connects to, and only
a per-component representation can express that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from increl.model import Expansion, ExpansionError, Network


@dataclass(frozen=True)
class LayerTrace:
    """Layers discovered by a breadth-first sweep from the source.

    `layers` starts with {source}; each later layer holds the nodes
    first reached via a working arc from the previous one. `connected`
    is true exactly when the sink appears in the last layer.
    """

    layers: tuple[frozenset[int], ...]
    connected: bool


@dataclass(frozen=True)
class NodePartition:
    """Connected components of an induced subgraph, split three ways.

    `source_side` is the component of the source, `sink_side` the
    component of the sink, and `middle` every remaining component,
    ordered by smallest member. When source and sink share a component
    both fields hold the same set (the same object, so the feasibility
    test is an identity check in the common case).
    """

    source_side: frozenset[int]
    sink_side: frozenset[int]
    middle: tuple[frozenset[int], ...]

    def all_nodes(self) -> frozenset[int]:
        """The node universe this partition covers."""
        return self.source_side | self.sink_side | frozenset(
            v for comp in self.middle for v in comp
        )

    def middle_union(self) -> frozenset[int]:
        """All middle nodes as one flat set, the display granularity."""
        return frozenset(v for comp in self.middle for v in comp)


def _adjacency(net: Network, bits: Sequence[int]) -> dict[int, list[int]]:
    if len(bits) != len(net.arcs):
        raise ValueError(
            f"vector covers {len(bits)} arcs but the network has {len(net.arcs)}"
        )
    adj: dict[int, list[int]] = {v: [] for v in net.nodes}
    for (u, v), bit in zip(net.arcs, bits):
        if bit:
            adj[u].append(v)
            adj[v].append(u)
    return adj


def layered_search(net: Network, bits: Sequence[int]) -> LayerTrace:
    """Decide source-sink connectivity by growing disjoint node layers.

    Stops as soon as the sink enters a layer or a layer comes up empty.
    """
    adj = _adjacency(net, bits)
    seen = {net.source}
    layers = [frozenset(seen)]
    frontier = [net.source]
    connected = False
    while True:
        nxt = {w for u in frontier for w in adj[u] if w not in seen}
        if not nxt:
            break
        seen |= nxt
        layers.append(frozenset(nxt))
        if net.sink in nxt:
            connected = True
            break
        frontier = list(nxt)
    return LayerTrace(tuple(layers), connected)


def partition_nodes(net: Network, bits: Sequence[int]) -> NodePartition:
    """Split the node set into exact connected components of G(bits).

    One graph sweep per component; isolated nodes form singleton
    components. If the result has source_side == sink_side the vector
    is feasible and the partition is normally discarded.
    """
    adj = _adjacency(net, bits)
    assigned: set[int] = set()
    comps: list[set[int]] = []
    for start in sorted(net.nodes):
        if start in assigned:
            continue
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        assigned |= comp
        comps.append(comp)
    src_comp = next(c for c in comps if net.source in c)
    snk_comp = next(c for c in comps if net.sink in c)
    source_side = frozenset(src_comp)
    sink_side = source_side if snk_comp is src_comp else frozenset(snk_comp)
    middle = tuple(
        sorted(
            (frozenset(c) for c in comps if c is not src_comp and c is not snk_comp),
            key=min,
        )
    )
    return NodePartition(source_side, sink_side, middle)


def is_connected(partition: NodePartition) -> bool:
    """True when source and sink sit in the same component.

    Components are identical or disjoint, so a single shared element
    settles it; the identity check makes the usual case O(1).
    """
    return partition.source_side is partition.sink_side or not partition.source_side.isdisjoint(
        partition.sink_side
    )


def extend_partition(
    partition: NodePartition, selected: Sequence[int], expansion: Expansion
) -> NodePartition | None:
    """Update a partition by the selected arcs of an expansion.

    `selected` has one bit per expansion arc. Returns None as soon as
    the source and sink components merge (the vector became feasible,
    nothing is retained); otherwise returns the updated partition with
    the expansion's new nodes included.
    """
    connected, part = _extend(partition, selected, expansion, want_partition=False)
    return None if connected else part


def extend_partition_detail(
    partition: NodePartition, selected: Sequence[int], expansion: Expansion
) -> tuple[bool, NodePartition]:
    """Like extend_partition, but always materializes the partition.

    Used by tracing: when the sides merge, the returned partition shows
    the state at the moment of the merge, with source and sink fields
    holding the same merged set.
    """
    connected, part = _extend(partition, selected, expansion, want_partition=True)
    assert part is not None
    return connected, part


def _extend(
    partition: NodePartition,
    selected: Sequence[int],
    expansion: Expansion,
    want_partition: bool,
) -> tuple[bool, NodePartition | None]:
    if len(selected) != len(expansion.arcs):
        raise ExpansionError(
            f"selection covers {len(selected)} arcs but the expansion has "
            f"{len(expansion.arcs)}"
        )
    if is_connected(partition):
        # Connectivity is never lost by adding arcs.
        return True, (partition if want_partition else None)

    if not any(selected):
        # No arcs selected: sides unchanged, new nodes become singleton
        # middle components, and a disconnected graph stays disconnected.
        middle = tuple(
            sorted(
                [*partition.middle, *(frozenset((v,)) for v in expansion.new_nodes)],
                key=min,
            )
        )
        return False, NodePartition(partition.source_side, partition.sink_side, middle)

    # Union-find over component representatives: one element per current
    # component plus one per new node. Ids 0 and 1 are the two sides.
    groups: list[frozenset[int]] = [
        partition.source_side,
        partition.sink_side,
        *partition.middle,
    ]
    owner: dict[int, int] = {}
    for gid, grp in enumerate(groups):
        for node in grp:
            owner[node] = gid
    first_new = len(groups)
    new_ids: dict[int, int] = {}
    for node in sorted(expansion.new_nodes):
        gid = first_new + len(new_ids)
        new_ids[node] = gid
        owner[node] = gid
    parent = list(range(first_new + len(new_ids)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merged = False
    for bit, (u, v) in zip(selected, expansion.arcs):
        if not bit:
            continue
        try:
            ru, rv = find(owner[u]), find(owner[v])
        except KeyError as exc:
            raise ExpansionError(f"arc endpoint {exc} is not a known node") from None
        if ru == rv:
            continue
        parent[rv] = ru
        if find(0) == find(1):
            merged = True
            break
    if merged and not want_partition:
        return True, None

    clusters: dict[int, set[int]] = {}
    for gid, grp in enumerate(groups):
        clusters.setdefault(find(gid), set()).update(grp)
    for node, gid in new_ids.items():
        clusters.setdefault(find(gid), set()).add(node)
    root_src = find(0)
    root_snk = find(1)
    source_side = frozenset(clusters.pop(root_src))
    sink_side = source_side if root_snk == root_src else frozenset(clusters.pop(root_snk))
    middle = tuple(sorted((frozenset(c) for c in clusters.values()), key=min))
    return merged, NodePartition(source_side, sink_side, middle)
