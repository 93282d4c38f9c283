"""Migration topologies over a fixed number of islands."""

from __future__ import annotations

from dataclasses import dataclass

KINDS = ("ring", "complete", "isolated")


@dataclass(frozen=True)
class Topology:
    """Undirected neighborhood structure; neighbor tuples are ascending."""

    kind: str
    n_islands: int
    neighbors: tuple[tuple[int, ...], ...]

    @property
    def has_edges(self) -> bool:
        return any(self.neighbors)

    def diameter(self) -> int:
        if self.kind == "isolated":
            raise ValueError("diameter undefined for isolated islands")
        if self.kind == "complete":
            return 0 if self.n_islands == 1 else 1
        return self.n_islands // 2


def make_topology(kind: str, n_islands: int) -> Topology:
    if kind not in KINDS:
        raise ValueError(f"unknown topology kind: {kind!r}")
    if n_islands < 1:
        raise ValueError("n_islands must be >= 1")
    if kind == "ring":
        if n_islands < 3:
            raise ValueError("ring needs at least 3 islands")
        nbrs = tuple(
            tuple(sorted({(j - 1) % n_islands, (j + 1) % n_islands}))
            for j in range(n_islands)
        )
    elif kind == "complete":
        nbrs = tuple(
            tuple(i for i in range(n_islands) if i != j) for j in range(n_islands)
        )
    else:
        nbrs = tuple(() for _ in range(n_islands))
    return Topology(kind=kind, n_islands=n_islands, neighbors=nbrs)
