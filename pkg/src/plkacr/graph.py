"""Connectivity on small digraphs given as arc lists over ``range(n)``."""

from __future__ import annotations

from typing import Iterable, Sequence


def _adjacency(n: int, arcs: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in arcs:
        adj[u].append(v)
    for nbrs in adj:
        nbrs.sort()
    return adj


def weak_components(n: int, arcs: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Weakly connected components, each sorted, ordered by least member."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in arcs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values(), key=lambda g: g[0])


def strong_components(n: int, arcs: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Strongly connected components via an iterative Tarjan traversal.

    Components are returned sorted internally and ordered by least member so
    the result does not depend on traversal order.
    """
    adj = _adjacency(n, arcs)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return sorted(comps, key=lambda c: c[0])


def terminal_components(
    components: Sequence[Sequence[int]], arcs: Iterable[tuple[int, int]]
) -> list[list[int]]:
    """Those strong components with no arc leaving them."""
    owner = {v: i for i, comp in enumerate(components) for v in comp}
    leaves = [False] * len(components)
    for u, v in arcs:
        if owner[u] != owner[v]:
            leaves[owner[u]] = True
    return [list(c) for i, c in enumerate(components) if not leaves[i]]
