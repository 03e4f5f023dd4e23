"""Online topological order with cycle detection (Pearce and Kelly)."""

from __future__ import annotations


class IncrementalTopoOrder:
    """Keeps a topological order of a growing DAG.

    ``would_cycle`` answers without modifying anything; ``add`` inserts an
    edge and repairs the order by reshuffling only the affected region.
    """

    def __init__(self, vertices, edges=()):
        self._ord = {v: i for i, v in enumerate(sorted(vertices))}
        self._succ = {v: set() for v in self._ord}
        self._pred = {v: set() for v in self._ord}
        for u, v in edges:
            if not self.add(u, v):
                raise ValueError(f"edge {u}->{v} closes a cycle")

    def copy(self):
        other = IncrementalTopoOrder(())
        other._ord = dict(self._ord)
        other._succ = {v: set(s) for v, s in self._succ.items()}
        other._pred = {v: set(s) for v, s in self._pred.items()}
        return other

    def order(self):
        return sorted(self._ord, key=self._ord.__getitem__)

    def _forward(self, start, upper):
        seen = {start}
        stack = [start]
        while stack:
            for w in self._succ[stack.pop()]:
                if w not in seen and self._ord[w] <= upper:
                    seen.add(w)
                    stack.append(w)
        return seen

    def _backward(self, start, lower):
        seen = {start}
        stack = [start]
        while stack:
            for w in self._pred[stack.pop()]:
                if w not in seen and self._ord[w] >= lower:
                    seen.add(w)
                    stack.append(w)
        return seen

    def would_cycle(self, u, v):
        if u == v:
            return True
        if self._ord[u] < self._ord[v]:
            return False
        return u in self._forward(v, self._ord[u])

    def add(self, u, v):
        """Insert ``u -> v``; returns False (and changes nothing) if it closes a cycle."""
        if v in self._succ[u]:
            return True
        lo, hi = self._ord[v], self._ord[u]
        if lo < hi:
            forward = self._forward(v, hi)
            if u in forward:
                return False
            backward = self._backward(u, lo)
            ordered = sorted(backward, key=self._ord.__getitem__) + sorted(
                forward, key=self._ord.__getitem__
            )
            slots = sorted(self._ord[w] for w in ordered)
            for w, slot in zip(ordered, slots):
                self._ord[w] = slot
        elif u == v:
            return False
        self._succ[u].add(v)
        self._pred[v].add(u)
        return True
