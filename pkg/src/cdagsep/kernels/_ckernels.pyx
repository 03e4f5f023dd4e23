# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitmask kernels; graphs are limited to 64 vertices."""

from libc.stdint cimport uint64_t

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    MAXV = 64


cdef inline int _low(uint64_t m) nogil:
    return __builtin_ctzll(m)


cdef uint64_t _ancestors(uint64_t* parents, uint64_t seeds) nogil:
    cdef uint64_t result = seeds, frontier = seeds, new
    cdef int v
    while frontier:
        v = _low(frontier)
        frontier &= frontier - 1
        new = parents[v] & ~result
        result |= new
        frontier |= new
    return result


cdef uint64_t _dconnected(int n, uint64_t* parents, uint64_t* bidi,
                          uint64_t xmask, uint64_t zmask) nogil:
    cdef uint64_t children[MAXV]
    cdef uint64_t anc, seen_head = 0, seen_tail = 0
    cdef uint64_t todo_head = 0, todo_tail = 0, new_head, new_tail, m, p
    cdef int v, u
    for v in range(n):
        children[v] = 0
    for v in range(n):
        p = parents[v]
        while p:
            u = _low(p)
            p &= p - 1
            children[u] |= (<uint64_t>1) << v
    anc = _ancestors(parents, zmask)
    m = xmask
    while m:
        v = _low(m)
        m &= m - 1
        todo_head |= children[v] | bidi[v]
        todo_tail |= parents[v]
    while True:
        new_head = todo_head & ~seen_head
        new_tail = todo_tail & ~seen_tail
        if not (new_head or new_tail):
            break
        seen_head |= new_head
        seen_tail |= new_tail
        todo_head = 0
        todo_tail = 0
        m = new_tail & ~zmask
        while m:
            v = _low(m)
            m &= m - 1
            todo_head |= children[v] | bidi[v]
            todo_tail |= parents[v]
        m = new_head & ~zmask
        while m:
            v = _low(m)
            m &= m - 1
            todo_head |= children[v]
        m = new_head & anc
        while m:
            v = _low(m)
            m &= m - 1
            todo_head |= bidi[v]
            todo_tail |= parents[v]
    return seen_head | seen_tail


cdef int _load(list values, uint64_t* out) except -1:
    cdef Py_ssize_t i, n = len(values)
    if n > MAXV:
        raise ValueError("compiled kernels support at most 64 vertices")
    for i in range(n):
        out[i] = values[i]
    return n


def ancestors(list parents, seeds):
    cdef uint64_t buf[MAXV]
    _load(parents, buf)
    return _ancestors(buf, seeds)


def is_acyclic(list parents):
    cdef uint64_t buf[MAXV]
    cdef int n = _load(parents, buf)
    cdef uint64_t remaining, sources, m
    cdef int v
    remaining = ((<uint64_t>1) << n) - 1 if n < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    while remaining:
        sources = 0
        m = remaining
        while m:
            v = _low(m)
            m &= m - 1
            if not (buf[v] & remaining):
                sources |= (<uint64_t>1) << v
        if not sources:
            return False
        remaining &= ~sources
    return True


def dconnected(list parents, list bidi, xmask, zmask):
    cdef uint64_t pbuf[MAXV]
    cdef uint64_t bbuf[MAXV]
    cdef int n = _load(parents, pbuf)
    _load(bidi, bbuf)
    return _dconnected(n, pbuf, bbuf, xmask, zmask)


cdef struct Search:
    int k
    int n
    int sizes[MAXV]
    int offsets[MAXV]
    int counts[MAXV]
    uint64_t dep[MAXV]
    uint64_t required[MAXV]
    uint64_t pred_slots[MAXV]
    uint64_t parents[MAXV]
    uint64_t bidi[MAXV]
    int word[MAXV]
    uint64_t over, under, xmask, ymask, zmask
    uint64_t placed, nonempty
    long long leaves


cdef bint _extend(Search* s, int depth) nogil:
    cdef int c, j, b, v
    cdef bint blocked, found
    cdef uint64_t placed, nonempty
    if depth == s.n:
        s.leaves += 1
        return (_dconnected(s.n, s.parents, s.bidi, s.xmask, s.zmask) & s.ymask) != 0
    for c in range(s.k):
        if s.counts[c] == s.sizes[c]:
            continue
        blocked = False
        j = depth - 1
        while j >= 0:
            b = s.word[j]
            if (s.dep[c] >> b) & 1:
                break
            if b > c:
                blocked = True
                break
            j -= 1
        if blocked:
            continue
        if s.counts[c] + 1 == s.sizes[c] and (s.required[c] & ~s.nonempty):
            continue
        v = s.offsets[c] + s.counts[c]
        placed = s.placed
        nonempty = s.nonempty
        if (s.over >> v) & 1:
            s.parents[v] = 0
        else:
            s.parents[v] = placed & s.pred_slots[c] & ~s.under
        s.placed = placed | ((<uint64_t>1) << v)
        s.nonempty = nonempty | ((<uint64_t>1) << c)
        s.counts[c] += 1
        s.word[depth] = c
        found = _extend(s, depth + 1)
        s.counts[c] -= 1
        s.placed = placed
        s.nonempty = nonempty
        s.parents[v] = 0
        if found:
            return True
    return False


def oracle_search(list sizes, list pred, list dep, list required, list bidi,
                  over, under, xmask, ymask, zmask):
    cdef Search s
    cdef int c, p, start = 0
    cdef uint64_t mask, pm
    cdef bint found
    s.k = len(sizes)
    if s.k > MAXV:
        raise ValueError("compiled kernels support at most 64 clusters")
    for c in range(s.k):
        s.sizes[c] = sizes[c]
        s.offsets[c] = start
        s.counts[c] = 0
        start += s.sizes[c]
        s.dep[c] = dep[c]
        s.required[c] = required[c]
    s.n = start
    if s.n > MAXV:
        raise ValueError("compiled kernels support at most 64 vertices")
    for c in range(s.k):
        mask = 0
        pm = pred[c]
        while pm:
            p = _low(pm)
            pm &= pm - 1
            mask |= (((<uint64_t>1) << s.sizes[p]) - 1) << s.offsets[p]
        s.pred_slots[c] = mask
    for c in range(s.n):
        s.parents[c] = 0
        s.bidi[c] = bidi[c]
    s.over = over
    s.under = under
    s.xmask = xmask
    s.ymask = ymask
    s.zmask = zmask
    s.placed = 0
    s.nonempty = 0
    s.leaves = 0
    with nogil:
        found = _extend(&s, 0)
    return bool(found), s.leaves
