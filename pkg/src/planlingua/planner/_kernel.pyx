# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel: fixed-width uint64 bitset states hashed as byte strings.

Same algorithm and tie-breaking as ``_kernel_py``; the two must agree on
plans and node counts.
"""

from libc.stdint cimport uint64_t
from libc.string cimport memcpy
from libcpp.algorithm cimport sort
from libcpp.string cimport string
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

cdef extern from *:
    int ctz64 "__builtin_ctzll"(unsigned long long x) nogil

NAME = "cython"
CONSTRAINED = 0
UNCONSTRAINED = 1


cdef void _csr(list rows, vector[int]& ptr, vector[int]& idx):
    ptr.clear()
    idx.clear()
    ptr.push_back(0)
    for row in rows:
        for v in row:
            idx.push_back(v)
        ptr.push_back(idx.size())


cdef inline bint _test(const uint64_t* s, int f) nogil:
    return (s[f >> 6] >> (f & 63)) & 1


cdef class _Task:
    cdef int W
    cdef vector[int] pp_ptr, pp_idx, pn_ptr, pn_idx, ad_ptr, ad_idx, de_ptr, de_idx
    cdef vector[int] co_ptr, co_c, co_e
    cdef vector[char] co_add
    cdef vector[int] tr_ptr, tr_idx, free
    cdef vector[uint64_t] trigmask, init
    cdef vector[int] g_ptr, al_pp, al_pi, al_np, al_ni

    def __init__(self, ct):
        cdef int f
        self.W = (ct.n_facts + 63) // 64 or 1
        _csr(ct.pre_pos, self.pp_ptr, self.pp_idx)
        _csr(ct.pre_neg, self.pn_ptr, self.pn_idx)
        _csr(ct.add, self.ad_ptr, self.ad_idx)
        _csr(ct.delete, self.de_ptr, self.de_idx)
        self.co_ptr.push_back(0)
        for entries in ct.cond:
            for c, e, positive in entries:
                self.co_c.push_back(c)
                self.co_e.push_back(e)
                self.co_add.push_back(1 if positive else 0)
            self.co_ptr.push_back(self.co_c.size())
        _csr(ct.trigger, self.tr_ptr, self.tr_idx)
        for a in ct.free:
            self.free.push_back(a)
        self.trigmask.assign(self.W, 0)
        self.init.assign(self.W, 0)
        for f, acts in enumerate(ct.trigger):
            if acts:
                self.trigmask[f >> 6] |= (<uint64_t>1) << (f & 63)
        for f in ct.init:
            self.init[f >> 6] |= (<uint64_t>1) << (f & 63)
        self.g_ptr.push_back(0)
        pos_rows, neg_rows = [], []
        for group in ct.goal_groups:
            for p, n in group:
                pos_rows.append(p)
                neg_rows.append(n)
            self.g_ptr.push_back(len(pos_rows))
        _csr(pos_rows, self.al_pp, self.al_pi)
        _csr(neg_rows, self.al_np, self.al_ni)

    cdef bint is_goal(self, const uint64_t* s) nogil:
        cdef size_t g, alt
        cdef int k
        cdef bint ok
        for g in range(self.g_ptr.size() - 1):
            ok = False
            for alt in range(<size_t>self.g_ptr[g], <size_t>self.g_ptr[g + 1]):
                ok = True
                for k in range(self.al_pp[alt], self.al_pp[alt + 1]):
                    if not _test(s, self.al_pi[k]):
                        ok = False
                        break
                if ok:
                    for k in range(self.al_np[alt], self.al_np[alt + 1]):
                        if _test(s, self.al_ni[k]):
                            ok = False
                            break
                if ok:
                    break
            if not ok:
                return False
        return True

    cdef void applicable(self, const uint64_t* s, vector[int]& out) nogil:
        cdef vector[int] cands = self.free
        cdef int w, f, k, a
        cdef uint64_t x
        cdef bint ok
        for w in range(self.W):
            x = s[w] & self.trigmask[w]
            while x:
                f = w * 64 + ctz64(x)
                for k in range(self.tr_ptr[f], self.tr_ptr[f + 1]):
                    cands.push_back(self.tr_idx[k])
                x &= x - 1
        sort(cands.begin(), cands.end())
        out.clear()
        for a in cands:
            ok = True
            for k in range(self.pp_ptr[a], self.pp_ptr[a + 1]):
                if not _test(s, self.pp_idx[k]):
                    ok = False
                    break
            if ok:
                for k in range(self.pn_ptr[a], self.pn_ptr[a + 1]):
                    if _test(s, self.pn_idx[k]):
                        ok = False
                        break
            if ok:
                out.push_back(a)

    cdef void apply(self, const uint64_t* s, int a, uint64_t* out) nogil:
        cdef int k, f
        memcpy(out, s, self.W * 8)
        for k in range(self.de_ptr[a], self.de_ptr[a + 1]):
            f = self.de_idx[k]
            out[f >> 6] &= ~((<uint64_t>1) << (f & 63))
        for k in range(self.co_ptr[a], self.co_ptr[a + 1]):
            if not self.co_add[k] and _test(s, self.co_c[k]):
                f = self.co_e[k]
                out[f >> 6] &= ~((<uint64_t>1) << (f & 63))
        for k in range(self.ad_ptr[a], self.ad_ptr[a + 1]):
            f = self.ad_idx[k]
            out[f >> 6] |= (<uint64_t>1) << (f & 63)
        for k in range(self.co_ptr[a], self.co_ptr[a + 1]):
            if self.co_add[k] and _test(s, self.co_c[k]):
                f = self.co_e[k]
                out[f >> 6] |= (<uint64_t>1) << (f & 63)

    cdef string key(self, const uint64_t* s):
        return string(<const char*>s, self.W * 8)

    cdef object dfs(self, long long budget):
        cdef long long expanded = 0, generated = 1
        cdef vector[string] fstate
        cdef vector[vector[int]] fkids
        cdef vector[size_t] fpos
        cdef vector[char] fclean
        cdef vector[int] path, kids
        cdef unordered_set[string] onpath, closed
        cdef vector[uint64_t] cur = self.init, child = self.init
        cdef string ckey
        cdef size_t top
        cdef int a
        cdef char ok
        if expanded >= budget:
            return "budget", None, expanded, generated
        expanded += 1
        self.applicable(cur.data(), kids)
        fstate.push_back(self.key(cur.data()))
        fkids.push_back(kids)
        fpos.push_back(0)
        fclean.push_back(1)
        onpath.insert(fstate.back())
        while fstate.size() > 0:
            top = fstate.size() - 1
            if fpos[top] == fkids[top].size():
                ok = fclean[top]
                onpath.erase(fstate[top])
                if ok:
                    closed.insert(fstate[top])
                fstate.pop_back()
                fkids.pop_back()
                fpos.pop_back()
                fclean.pop_back()
                if top > 0:
                    if not ok:
                        fclean[top - 1] = 0
                    path.pop_back()
                continue
            a = fkids[top][fpos[top]]
            fpos[top] += 1
            memcpy(cur.data(), fstate[top].data(), self.W * 8)
            self.apply(cur.data(), a, child.data())
            ckey = self.key(child.data())
            if onpath.count(ckey):
                fclean[top] = 0
                continue
            if closed.count(ckey):
                continue
            generated += 1
            if self.is_goal(child.data()):
                path.push_back(a)
                return "solved", [p for p in path], expanded, generated
            if expanded >= budget:
                return "budget", None, expanded, generated
            expanded += 1
            path.push_back(a)
            onpath.insert(ckey)
            self.applicable(child.data(), kids)
            fstate.push_back(ckey)
            fkids.push_back(kids)
            fpos.push_back(0)
            fclean.push_back(1)
        return "unsolvable", None, expanded, generated

    cdef object bfs(self, long long budget):
        cdef long long expanded = 0, generated = 1
        cdef vector[string] states
        cdef vector[int] parent, via, kids, path
        cdef unordered_set[string] seen
        cdef vector[uint64_t] cur = self.init, child = self.init
        cdef string ckey
        cdef size_t head = 0
        cdef int a, node
        states.push_back(self.key(cur.data()))
        parent.push_back(-1)
        via.push_back(-1)
        seen.insert(states.back())
        while head < states.size():
            if expanded >= budget:
                return "budget", None, expanded, generated
            memcpy(cur.data(), states[head].data(), self.W * 8)
            expanded += 1
            self.applicable(cur.data(), kids)
            for a in kids:
                self.apply(cur.data(), a, child.data())
                ckey = self.key(child.data())
                if seen.count(ckey):
                    continue
                seen.insert(ckey)
                states.push_back(ckey)
                parent.push_back(<int>head)
                via.push_back(a)
                generated += 1
                if self.is_goal(child.data()):
                    node = <int>states.size() - 1
                    while parent[node] >= 0:
                        path.push_back(via[node])
                        node = parent[node]
                    return "solved", [path[i] for i in range(<int>path.size() - 1, -1, -1)], expanded, generated
            head += 1
        return "unsolvable", None, expanded, generated

    def successors(self, state_ids):
        cdef vector[uint64_t] s
        cdef vector[int] out
        s.assign(self.W, 0)
        for f in state_ids:
            s[f >> 6] |= (<uint64_t>1) << (f & 63)
        self.applicable(s.data(), out)
        return [a for a in out]


cdef _Task _prepared(ct):
    hit = ct.cache.get(NAME)
    if hit is None:
        hit = ct.cache[NAME] = _Task(ct)
    return hit


def search(ct, int mode, long long budget):
    """Run one search; the caller has already ruled out an initial goal state."""
    cdef _Task t = _prepared(ct)
    if mode == CONSTRAINED:
        return t.dfs(budget)
    return t.bfs(budget)


def successors(ct, state_ids):
    return _prepared(ct).successors(state_ids)
