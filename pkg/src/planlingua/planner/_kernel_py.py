"""Pure-Python search kernel; states are Python ints used as bitsets.

Mirrors ``_kernel.pyx`` step for step so both report identical plans and
node counts.
"""

from __future__ import annotations

from collections import deque

NAME = "python"

CONSTRAINED, UNCONSTRAINED = 0, 1


def _mask(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


class _Prepared:
    def __init__(self, ct):
        self.pos = [_mask(x) for x in ct.pre_pos]
        self.neg = [_mask(x) for x in ct.pre_neg]
        self.add = [_mask(x) for x in ct.add]
        self.dele = [_mask(x) for x in ct.delete]
        self.cond = [tuple((c, 1 << e, positive) for c, e, positive in entries) for entries in ct.cond]
        self.trigger = ct.trigger
        self.trigmask = _mask(f for f, acts in enumerate(ct.trigger) if acts)
        self.free = list(ct.free)
        self.init = _mask(ct.init)
        self.goal = [[(_mask(p), _mask(n)) for p, n in group] for group in ct.goal_groups]

    def is_goal(self, s: int) -> bool:
        for group in self.goal:
            for p, n in group:
                if s & p == p and not s & n:
                    break
            else:
                return False
        return True

    def applicable(self, s: int) -> list[int]:
        cands = list(self.free)
        trigger = self.trigger
        x = s & self.trigmask
        while x:
            low = x & -x
            cands.extend(trigger[low.bit_length() - 1])
            x ^= low
        cands.sort()
        pos, neg = self.pos, self.neg
        return [a for a in cands if s & pos[a] == pos[a] and not s & neg[a]]

    def apply(self, s: int, a: int) -> int:
        add, dele = self.add[a], self.dele[a]
        for c, e, positive in self.cond[a]:
            if s >> c & 1:
                if positive:
                    add |= e
                else:
                    dele |= e
        return (s & ~dele) | add


def _prepared(ct) -> _Prepared:
    hit = ct.cache.get(NAME)
    if hit is None:
        hit = ct.cache[NAME] = _Prepared(ct)
    return hit


def _dfs(t: _Prepared, budget: int):
    expanded, generated = 0, 1
    if expanded >= budget:
        return "budget", None, expanded, generated
    expanded += 1
    init = t.init
    states, kids, pos, clean = [init], [t.applicable(init)], [0], [True]
    onpath, closed, path = {init}, set(), []
    while states:
        top = len(states) - 1
        if pos[top] == len(kids[top]):
            state, ok = states.pop(), clean.pop()
            kids.pop()
            pos.pop()
            onpath.discard(state)
            if ok:
                closed.add(state)
            if top > 0:
                if not ok:
                    clean[top - 1] = False
                path.pop()
            continue
        a = kids[top][pos[top]]
        pos[top] += 1
        child = t.apply(states[top], a)
        if child in onpath:
            clean[top] = False
            continue
        if child in closed:
            continue
        generated += 1
        if t.is_goal(child):
            path.append(a)
            return "solved", path, expanded, generated
        if expanded >= budget:
            return "budget", None, expanded, generated
        expanded += 1
        path.append(a)
        onpath.add(child)
        states.append(child)
        kids.append(t.applicable(child))
        pos.append(0)
        clean.append(True)
    return "unsolvable", None, expanded, generated


def _bfs(t: _Prepared, budget: int):
    expanded, generated = 0, 1
    parent = {t.init: (None, -1)}
    queue = deque([t.init])
    while queue:
        if expanded >= budget:
            return "budget", None, expanded, generated
        s = queue.popleft()
        expanded += 1
        for a in t.applicable(s):
            child = t.apply(s, a)
            if child in parent:
                continue
            parent[child] = (s, a)
            generated += 1
            if t.is_goal(child):
                path = []
                node = child
                while True:
                    prev, act = parent[node]
                    if prev is None:
                        break
                    path.append(act)
                    node = prev
                return "solved", path[::-1], expanded, generated
            queue.append(child)
    return "unsolvable", None, expanded, generated


def search(ct, mode: int, budget: int):
    """Run one search; the caller has already ruled out an initial goal state.

    Returns ``(status, action indices or None, expanded, generated)``.
    """
    t = _prepared(ct)
    if mode == CONSTRAINED:
        return _dfs(t, budget)
    return _bfs(t, budget)


def successors(ct, state_ids):
    """Applicable kernel actions in a state given as fact ids (for tests)."""
    return _prepared(ct).applicable(_mask(state_ids))
