"""Pure-Python bitmask kernels.

Graphs are passed as lists of integer bitmasks indexed by vertex number:
``parents[v]`` has bit ``u`` set for every directed edge ``u -> v`` and
``bidi[v]`` has bit ``u`` set for every bidirected edge ``u <-> v``.
The compiled module ``_ckernels`` exposes the same functions.
"""


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def ancestors(parents, seeds):
    """Return the mask of ``seeds`` and all of their ancestors."""
    result = seeds
    frontier = seeds
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        new = parents[low.bit_length() - 1] & ~result
        result |= new
        frontier |= new
    return result


def is_acyclic(parents):
    remaining = (1 << len(parents)) - 1
    while remaining:
        sources = 0
        for v in _bits(remaining):
            if not parents[v] & remaining:
                sources |= 1 << v
        if not sources:
            return False
        remaining &= ~sources
    return True


def dconnected(parents, bidi, xmask, zmask):
    """Vertices reachable from ``xmask`` by a walk that is active given ``zmask``.

    Collider occurrences are active when the vertex is an ancestor of ``zmask``;
    every other occurrence is active when the vertex is outside ``zmask``.
    The graph may contain directed cycles.
    """
    n = len(parents)
    children = [0] * n
    for v in range(n):
        for u in _bits(parents[v]):
            children[u] |= 1 << v
    anc = ancestors(parents, zmask)
    seen_head = 0
    seen_tail = 0
    todo_head = 0
    todo_tail = 0
    for x in _bits(xmask):
        todo_head |= children[x] | bidi[x]
        todo_tail |= parents[x]
    while True:
        new_head = todo_head & ~seen_head
        new_tail = todo_tail & ~seen_tail
        if not (new_head or new_tail):
            break
        seen_head |= new_head
        seen_tail |= new_tail
        todo_head = 0
        todo_tail = 0
        for v in _bits(new_tail & ~zmask):
            todo_head |= children[v] | bidi[v]
            todo_tail |= parents[v]
        for v in _bits(new_head & ~zmask):
            todo_head |= children[v]
        for v in _bits(new_head & anc):
            todo_head |= bidi[v]
            todo_tail |= parents[v]
    return seen_head | seen_tail


def oracle_search(sizes, pred, dep, required, bidi, over, under, xmask, ymask, zmask):
    """Search cluster-label words for a maximal compatible graph that d-connects.

    ``sizes[c]`` is the size of cluster ``c``; slots are numbered cluster by
    cluster.  ``pred[c]`` is the mask of clusters with a directed edge into
    ``c`` (``c`` itself when it carries a directed self-loop); ``required[c]``
    is the same mask without ``c``; ``dep[c]`` marks clusters whose relative
    order matters for ``c``.  For each word the graph holds every permitted
    directed edge pointing forward in the word, after removing edges into
    ``over`` and out of ``under``.  Only lexicographically least words of each
    commutation class are visited.

    Returns ``(found, leaves)``.
    """
    k = len(sizes)
    n = sum(sizes)
    offsets = []
    slot_masks = []
    start = 0
    for size in sizes:
        offsets.append(start)
        slot_masks.append(((1 << size) - 1) << start)
        start += size
    pred_slots = []
    for c in range(k):
        mask = 0
        for p in _bits(pred[c]):
            mask |= slot_masks[p]
        pred_slots.append(mask)

    parents = [0] * n
    counts = [0] * k
    word = []
    state = {"placed": 0, "nonempty": 0, "leaves": 0}

    def extend(depth):
        if depth == n:
            state["leaves"] += 1
            return bool(dconnected(parents, bidi, xmask, zmask) & ymask)
        for c in range(k):
            if counts[c] == sizes[c]:
                continue
            blocked = False
            for b in reversed(word):
                if (dep[c] >> b) & 1:
                    break
                if b > c:
                    blocked = True
                    break
            if blocked:
                continue
            if counts[c] + 1 == sizes[c] and required[c] & ~state["nonempty"]:
                continue
            v = offsets[c] + counts[c]
            placed = state["placed"]
            nonempty = state["nonempty"]
            if (over >> v) & 1:
                parents[v] = 0
            else:
                parents[v] = placed & pred_slots[c] & ~under
            state["placed"] = placed | (1 << v)
            state["nonempty"] = nonempty | (1 << c)
            counts[c] += 1
            word.append(c)
            found = extend(depth + 1)
            word.pop()
            counts[c] -= 1
            state["placed"] = placed
            state["nonempty"] = nonempty
            parents[v] = 0
            if found:
                return True
        return False

    found = extend(0)
    return found, state["leaves"]
