"""Small graph routines over adjacency lists indexed ``0 .. n-1``."""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

__all__ = ["tarjan_scc", "reachable", "backward_reachable", "nontrivial"]


def tarjan_scc(succ: Sequence[Sequence[int]], roots: Iterable[int] | None = None) -> list[list[int]]:
    """Strongly connected components, emitted in reverse topological order.

    Iterative Tarjan.  With ``roots`` only nodes reachable from them are
    visited.
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in (range(n) if roots is None else roots):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            edges = succ[v]
            if i < len(edges):
                work[-1] = (v, i + 1)
                w = edges[i]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def nontrivial(comp: Sequence[int], succ: Sequence[Sequence[int]]) -> bool:
    """Does the component contain a cycle (self loops count)."""
    return len(comp) > 1 or comp[0] in succ[comp[0]]


def reachable(succ: Sequence[Sequence[int]], roots: Iterable[int]) -> list[bool]:
    seen = [False] * len(succ)
    queue = deque()
    for r in roots:
        if not seen[r]:
            seen[r] = True
            queue.append(r)
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return seen


def backward_reachable(succ: Sequence[Sequence[int]], targets: Iterable[int],
                       through: Sequence[bool]) -> list[bool]:
    """Nodes that reach ``targets`` along paths whose other nodes satisfy ``through``."""
    n = len(succ)
    pred: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        if through[v]:
            for w in succ[v]:
                pred[w].append(v)
    return reachable(pred, targets)
