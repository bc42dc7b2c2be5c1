"""Parsing and serialization of the NET and INC text formats.

NET (a whole network)::

    # comments run to end of line
    nodes 4
    arc 1 2 0.9
    arc 1 3 0.9

The header declares node ids 1..n; node 1 is the source and node n the
sink. Arc ids are assigned in file order starting at 1. INC files (one
growth batch per file) contain only arc lines and may introduce new
node ids.
"""

from __future__ import annotations

import math

from increl.model import ArcSpec, Network, ParseError


def _significant_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", lineno) from None


def _parse_arc_line(fields: list[str], lineno: int) -> ArcSpec:
    if fields[0] != "arc":
        raise ParseError(f"expected an 'arc' line, got {fields[0]!r}", lineno)
    if len(fields) != 4:
        raise ParseError("arc lines take exactly 'arc <u> <v> <p>'", lineno)
    u = _parse_int(fields[1], "node id", lineno)
    v = _parse_int(fields[2], "node id", lineno)
    try:
        p = float(fields[3])
    except ValueError:
        raise ParseError(f"probability must be a number, got {fields[3]!r}", lineno) from None
    if not math.isfinite(p) or p < 0.0 or p > 1.0:
        raise ParseError(f"probability {fields[3]} outside [0, 1]", lineno)
    if u < 1 or v < 1:
        raise ParseError(f"node ids must be positive, got {u} and {v}", lineno)
    if u == v:
        raise ParseError(f"self-loop at node {u}", lineno)
    return u, v, p


def parse_network(text: str) -> Network:
    """Parse NET file contents into a validated network.

    Node ids must lie in 1..n so that the source (1) and sink (n)
    exist; files that would need renumbering are rejected.
    """
    count: int | None = None
    arcs: list[tuple[int, int]] = []
    probs: list[float] = []
    pairs: set[frozenset[int]] = set()
    for lineno, fields in _significant_lines(text):
        if count is None:
            if fields[0] != "nodes" or len(fields) != 2:
                raise ParseError("file must start with 'nodes <n>'", lineno)
            count = _parse_int(fields[1], "node count", lineno)
            if count < 2:
                raise ParseError("a network needs at least 2 nodes", lineno)
            continue
        u, v, p = _parse_arc_line(fields, lineno)
        if u > count or v > count:
            raise ParseError(
                f"arc ({u}, {v}) references a node beyond the declared {count}", lineno
            )
        pair = frozenset((u, v))
        if pair in pairs:
            raise ParseError(f"parallel arc between {u} and {v}", lineno)
        pairs.add(pair)
        arcs.append((u, v))
        probs.append(p)
    if count is None:
        raise ParseError("missing 'nodes <n>' header")
    return Network(
        nodes=frozenset(range(1, count + 1)),
        arcs=tuple(arcs),
        probabilities=tuple(probs),
        source=1,
        sink=count,
    )


def parse_expansion_specs(text: str) -> tuple[ArcSpec, ...]:
    """Parse INC file contents into raw arc specs.

    Simplicity against the network the batch will be appended to is
    checked later, at binding time; this only rejects per-file
    problems (self-loops, duplicate pairs, bad probabilities).
    """
    specs: list[ArcSpec] = []
    pairs: set[frozenset[int]] = set()
    for lineno, fields in _significant_lines(text):
        u, v, p = _parse_arc_line(fields, lineno)
        pair = frozenset((u, v))
        if pair in pairs:
            raise ParseError(f"parallel arc between {u} and {v}", lineno)
        pairs.add(pair)
        specs.append((u, v, p))
    if not specs:
        raise ParseError("expansion file contains no arcs")
    return tuple(specs)


def serialize_network(net: Network) -> str:
    """Render a network back to NET text; parsing the result restores it.

    Only networks expressible in the format qualify: node ids 1..n with
    source 1 and sink n.
    """
    n = max(net.nodes)
    if net.nodes != frozenset(range(1, n + 1)) or net.source != 1 or net.sink != n:
        raise ValueError("network is not representable in the NET format")
    lines = [f"nodes {n}"]
    lines += [
        f"arc {u} {v} {p!r}" for (u, v), p in zip(net.arcs, net.probabilities)
    ]
    return "\n".join(lines) + "\n"
