"""Shared test utilities: the bridge scenario and random scenario drawing."""

from __future__ import annotations

import random
from pathlib import Path

from increl import Expansion, Network, extend_network

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_DIR = Path(__file__).parent.parent / "fixtures"

BRIDGE_ARCS = ((1, 2), (1, 3), (2, 3), (2, 4), (3, 4))
BRIDGE_STAGE1 = ((2, 5, 0.9), (4, 5, 0.9))
BRIDGE_STAGE2 = ((3, 5, 0.9),)


def bridge(p: float = 0.9) -> Network:
    return Network(
        nodes=frozenset({1, 2, 3, 4}),
        arcs=BRIDGE_ARCS,
        probabilities=(p,) * 5,
        source=1,
        sink=4,
    )


def bridge_stages(p: float = 0.9):
    return [
        tuple((u, v, p) for u, v, _ in BRIDGE_STAGE1),
        tuple((u, v, p) for u, v, _ in BRIDGE_STAGE2),
    ]


def cumulative_networks(net: Network, stages) -> list[Network]:
    """The network as grown after each stage, index 0 = original."""
    nets = [net]
    for specs in stages:
        nets.append(extend_network(nets[-1], Expansion.for_network(nets[-1], specs)))
    return nets


def _probability(rng: random.Random) -> float:
    while (p := rng.random()) == 0.0:
        pass
    return p


def random_scenario(rng: random.Random, max_nodes: int = 8, max_total_arcs: int = 14):
    """Draw a random growth scenario.

    Original network: 2..6 nodes, up to 10 arcs. Then 1..3 growth
    batches of 1..3 arcs each; batches may reuse free node pairs or
    bring in new nodes (occasionally two at once). The total arc count
    is capped so the brute-force cross-check stays fast.
    """
    n = rng.randint(2, 6)
    all_pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    rng.shuffle(all_pairs)
    m = rng.randint(1, min(10, len(all_pairs)))
    arcs = tuple(all_pairs[:m])
    net = Network(
        nodes=frozenset(range(1, n + 1)),
        arcs=arcs,
        probabilities=tuple(_probability(rng) for _ in range(m)),
        source=1,
        sink=n,
    )

    stages = []
    nodes = set(range(1, n + 1))
    used = {frozenset(a) for a in arcs}
    budget = max_total_arcs - m
    for _ in range(rng.randint(1, 3)):
        batch = []
        for _ in range(rng.randint(1, 3)):
            if budget <= 0:
                break
            free = [
                (u, v)
                for u in sorted(nodes)
                for v in sorted(nodes)
                if u < v and frozenset((u, v)) not in used
            ]
            fresh = len(nodes) < max_nodes
            if fresh and (not free or rng.random() < 0.35):
                w = max(nodes) + 1
                if len(nodes) + 1 < max_nodes and rng.random() < 0.1:
                    u, v = w, w + 1  # a floating arc between two new nodes
                    nodes.add(w + 1)
                else:
                    u, v = rng.choice(sorted(nodes)), w
                nodes.add(w)
            elif free:
                u, v = rng.choice(free)
            else:
                break
            used.add(frozenset((u, v)))
            batch.append((u, v, _probability(rng)))
            budget -= 1
        if batch:
            stages.append(tuple(batch))
    assert stages, "scenario generator always finds room for one batch"
    return net, stages
