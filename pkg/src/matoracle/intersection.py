"""Exchange-graph machinery and the two-oracle matroid intersection algorithms.

The dirty augmenting-path algorithm assumes the clean matroids are partition
matroids and that each dirty independence family contains the corresponding
clean one; it finds candidate paths with free dirty queries and pays clean
queries only to verify them and to localize false dirty arcs.
"""

from __future__ import annotations

from collections import deque

from .algorithms import binary_search_smallest_dependent_prefix
from .core import ElementSet, PartitionMatroid, enumeration_guard, iter_bits, mask_of
from .oracles import ROLE_CLEAN, ROLE_DIRTY, QueryLedger


class SupersetViolation(RuntimeError):
    """A clean-independent set behaved dirty-dependent: the superset
    precondition of the dirty augmenting-path algorithm is broken."""


class FalseQueryLists:
    """Ordered, duplicate-free lists of dirty-independent but clean-dependent
    sets, one per matroid; excluded arcs never reappear in the dirty graph."""

    def __init__(self):
        self.f1 = []
        self.f2 = []
        self._seen = (set(), set())

    def lists(self, which):
        return self.f1 if which == 1 else self.f2

    def contains(self, which, mask):
        return mask in self._seen[which - 1]

    def add(self, which, mask):
        if self.contains(which, mask):
            raise SupersetViolation(
                f"false-set candidate for matroid {which} rediscovered; "
                "the dirty oracles cannot be supersets of the clean ones"
            )
        self.lists(which).append(mask)
        self._seen[which - 1].add(mask)

    def __len__(self):
        return len(self.f1) + len(self.f2)


class IntersectionOracles:
    """Two clean (and optionally two dirty) matroids billing into one ledger."""

    def __init__(self, ground, clean1, clean2, dirty1=None, dirty2=None, ledger=None):
        for spec in (clean1, clean2, dirty1, dirty2):
            if spec is not None and spec.n != ground.n:
                raise ValueError("oracles and ground set disagree on n")
        self.ground = ground
        self.clean = (clean1.rebind(ground), clean2.rebind(ground))
        self.dirty = None
        if dirty1 is not None and dirty2 is not None:
            self.dirty = (dirty1.rebind(ground), dirty2.rebind(ground))
        self.ledger = ledger if ledger is not None else QueryLedger(ground.n)

    def query_independent(self, role, which, s):
        mask = mask_of(s)
        spec = self.clean[which - 1] if role == ROLE_CLEAN else self.dirty[which - 1]
        answer = spec.is_independent_mask(mask)
        self.ledger.record(role, f"ind{which}", answer, mask)
        return answer


class ExchangeGraph:
    """Directed bipartite exchange graph for a common independent set X.

    Arc x -> y is present iff X - x + y is independent in matroid 1, arc
    y -> x iff independent in matroid 2; y1/y2 hold the elements whose single
    addition stays independent in matroid 1/2.
    """

    def __init__(self, x_mask, arcs_out, y1, y2):
        self.x_mask = x_mask
        self.arcs_out = arcs_out  # element -> sorted tuple of successors
        self.y1 = tuple(sorted(y1))
        self.y2 = tuple(sorted(y2))

    @property
    def y1_mask(self):
        m = 0
        for e in self.y1:
            m |= 1 << e
        return m


def build_exchange_graph(ox, x_mask, role, exclusions=None):
    """Query-built exchange graph; excluded (false) defining sets produce no
    arc and no source/sink membership.  Issues at most 2|X|(n-|X|) + 2(n-|X|)
    independence queries to the designated oracles."""
    g = ox.ground
    outside = [e for e in range(g.n) if not x_mask >> e & 1]
    inside = list(iter_bits(x_mask))

    def allowed_and_independent(which, mask):
        if exclusions is not None and exclusions.contains(which, mask):
            return False
        return ox.query_independent(role, which, mask)

    arcs_out = {e: [] for e in range(g.n)}
    y1, y2 = [], []
    for y in outside:
        grown = x_mask | 1 << y
        if allowed_and_independent(1, grown):
            y1.append(y)
        if allowed_and_independent(2, grown):
            y2.append(y)
        for x in inside:
            swapped = grown & ~(1 << x)
            if allowed_and_independent(1, swapped):
                arcs_out[x].append(y)
            if allowed_and_independent(2, swapped):
                arcs_out[y].append(x)
    return ExchangeGraph(x_mask, {e: tuple(sorted(v)) for e, v in arcs_out.items()}, y1, y2)


def shortest_augmenting_path(graph):
    """Lexicographically smallest shortest y1 -> y2 vertex path, or None."""
    targets = set(graph.y2)
    sources = sorted(set(graph.y1))
    if not sources:
        return None
    # distance-to-target over reversed arcs
    dist_t = {}
    dq = deque()
    for t in sorted(targets):
        dist_t[t] = 0
        dq.append(t)
    preds = {e: [] for e in graph.arcs_out}
    for u, vs in graph.arcs_out.items():
        for v in vs:
            preds[v].append(u)
    while dq:
        v = dq.popleft()
        for u in preds[v]:
            if u not in dist_t:
                dist_t[u] = dist_t[v] + 1
                dq.append(u)
    reachable = [s for s in sources if s in dist_t]
    if not reachable:
        return None
    best = min(dist_t[s] for s in reachable)
    start = min(s for s in reachable if dist_t[s] == best)
    path = [start]
    cur = start
    while dist_t[cur] > 0:
        cur = min(v for v in graph.arcs_out[cur] if dist_t.get(v, -1) == dist_t[cur] - 1)
        path.append(cur)
    return path


class OptimalityCertificate:
    """Vertex set U with |X| = rank1(U) + rank2(E \\ U) under clean evaluation."""

    def __init__(self, u_mask):
        self.u_mask = u_mask

    def holds_for(self, x_mask, clean1, clean2, full_mask):
        return x_mask.bit_count() == clean1.rank_mask(self.u_mask) + clean2.rank_mask(
            full_mask & ~self.u_mask
        )


def _reaches_y2_mask(graph, n):
    targets = set(graph.y2)
    seen = set(targets)
    dq = deque(sorted(targets))
    preds = {e: [] for e in graph.arcs_out}
    for u, vs in graph.arcs_out.items():
        for v in vs:
            preds[v].append(u)
    while dq:
        v = dq.popleft()
        for u in preds[v]:
            if u not in seen:
                seen.add(u)
                dq.append(u)
    m = 0
    for e in seen:
        m |= 1 << e
    return m


def textbook_intersection(ox, role=ROLE_CLEAN):
    """Shortest-augmenting-path matroid intersection against one oracle side.

    Returns (X, certificate, ledger); the certificate is the set of elements
    with a directed path to y2 (E or the empty set on the degenerate exits).
    """
    g = ox.ground
    x_mask = 0
    while True:
        graph = build_exchange_graph(ox, x_mask, role)
        if not graph.y1:
            return ElementSet(g.n, x_mask), OptimalityCertificate(g.full_mask), ox.ledger
        if not graph.y2:
            return ElementSet(g.n, x_mask), OptimalityCertificate(0), ox.ledger
        path = shortest_augmenting_path(graph)
        if path is None:
            return (
                ElementSet(g.n, x_mask),
                OptimalityCertificate(_reaches_y2_mask(graph, g.n)),
                ox.ledger,
            )
        for v in path:
            x_mask ^= 1 << v
        side = ox.clean if role == ROLE_CLEAN else ox.dirty
        assert side[0].is_independent_mask(x_mask) and side[1].is_independent_mask(x_mask), (
            "augmentation along a shortest exchange path must keep double independence"
        )


def _path_checkpoints(x_mask, path, which):
    """Prefix sets whose step-wise differences are single-arc exchanges.

    For matroid 1 the checkpoints end after each added element (odd prefix
    lengths); for matroid 2 after each removed element plus the full path,
    whose final difference is the exit element.  Each checkpoint's candidate
    false set is returned alongside it.
    """
    sets, candidates = [], []
    pref = x_mask
    for i, v in enumerate(path):
        pref ^= 1 << v
        length = i + 1
        if which == 1 and length % 2 == 1:
            sets.append(pref)
            if length == 1:
                candidates.append(x_mask | 1 << v)
            else:
                candidates.append(x_mask & ~(1 << path[i - 1]) | 1 << v)
        if which == 2 and length % 2 == 0:
            sets.append(pref)
            candidates.append(x_mask & ~(1 << v) | 1 << path[i - 1])
    if which == 2:
        sets.append(pref)
        candidates.append(x_mask | 1 << path[-1])
    return sets, candidates


def _locate_false_set(ox, x_mask, path, which, false_lists):
    """Bisect the failed matroid's checkpoint prefixes to one false dirty set.

    The final checkpoint is the full symmetric difference, already known
    dependent from the failed verification, so the search costs at most
    ceil(log2 n) clean queries."""
    sets, candidates = _path_checkpoints(x_mask, path, which)
    lo, hi = -1, len(sets) - 1  # X itself (lo) is clean-feasible
    while hi - lo > 1:
        mid = (lo + hi + 1) // 2
        if ox.query_independent(ROLE_CLEAN, which, sets[mid]):
            lo = mid
        else:
            hi = mid
    false_lists.add(which, candidates[hi])


def dirty_intersection(ox, precheck=True):
    """Augmenting-path intersection driven by the dirty oracles.

    Candidate paths come from the dirty exchange graph (free queries); each is
    verified with two clean queries, and a failed verification pays at most
    ceil(log2 n) further clean queries to localize a false dirty arc, which is
    then excluded.  Requires partition clean matroids with dirty supersets.
    Returns (X, ledger, false-query lists).
    """
    g = ox.ground
    if ox.dirty is None:
        raise ValueError("dirty oracles are required")
    for spec in ox.clean:
        if not isinstance(spec, PartitionMatroid):
            raise ValueError("dirty augmenting paths require partition clean matroids")
    if precheck and g.n <= enumeration_guard(14):
        for m in range(1 << g.n):
            for i in (0, 1):
                if ox.clean[i].is_independent_mask(m) and not ox.dirty[i].is_independent_mask(m):
                    raise SupersetViolation(
                        f"set {m:#x} is clean-independent but dirty-dependent in matroid {i + 1}"
                    )
    false_lists = FalseQueryLists()
    x_mask = 0
    while True:
        graph = build_exchange_graph(ox, x_mask, ROLE_DIRTY, exclusions=false_lists)
        path = shortest_augmenting_path(graph)
        if path is None:
            return ElementSet(g.n, x_mask), ox.ledger, false_lists
        flipped = x_mask
        for v in path:
            flipped ^= 1 << v
        ok1 = ox.query_independent(ROLE_CLEAN, 1, flipped)
        ok2 = ox.query_independent(ROLE_CLEAN, 2, flipped)
        if ok1 and ok2:
            x_mask = flipped
            continue
        _locate_false_set(ox, x_mask, path, 1 if not ok1 else 2, false_lists)


def warm_start(ox):
    """Clean-feasible subset of a dirty-optimal intersection solution.

    Computes a maximum dirty common independent set with dirty queries only,
    then for each clean matroid repeatedly verifies it and binary-searches out
    the first blocking element.  Clean queries: at most 2 + 2 eta_r (1 +
    ceil(log2 n)); the result keeps at least s_d* - 2 eta_r elements.
    """
    g = ox.ground
    if ox.dirty is None:
        raise ValueError("dirty oracles are required")
    s_d, _, _ = textbook_intersection(ox, role=ROLE_DIRTY)
    cur = s_d.mask
    for which in (1, 2):
        while not ox.query_independent(ROLE_CLEAN, which, cur):
            members = g.positions(cur)
            pos = binary_search_smallest_dependent_prefix(
                members,
                lambda p: not ox.query_independent(ROLE_CLEAN, which, cur & g.prefix_mask(p)),
                -1,
                len(members) - 1,
            )
            cur &= ~(1 << g.element_at(pos))
    return ElementSet(g.n, cur), ox.ledger
