"""Two-oracle basis algorithms, each returning (basis, ledger).

All algorithms receive a dirty basis that was computed with dirty queries only
and then touch nothing but the clean oracle.  Billing is exact: every clean
query the accounting of the corresponding bound charges is issued exactly as
charged, and none besides.
"""

from __future__ import annotations

from .core import ElementSet, ceil_log2, iter_bits, mask_of
from .oracles import ROLE_CLEAN, ROLE_DIRTY, greedy_basis


class RobustParams:
    """Trade-off parameter k plus the precomputed ceil(log2 r_d) the bounds use."""

    def __init__(self, k, lg_rd):
        if k < 1:
            raise ValueError("k must be a positive integer")
        self.k = int(k)
        self.lg_rd = int(lg_rd)

    @classmethod
    def for_run(cls, k, r_d):
        return cls(k, ceil_log2(r_d))


def default_k(n):
    """Exposed default; bound tests always sweep k explicitly instead."""
    return max(1, ceil_log2(n) // 2)


def binary_search_smallest_dependent_prefix(member_positions, probe_dependent, lo_idx, hi_idx):
    """Smallest position (from member_positions) whose prefix is dependent.

    probe_dependent(pos) answers "is the prefix through canonical position pos
    dependent"; it must be monotone over the listed positions.  lo_idx indexes
    a position known independent (-1 for the empty prefix), hi_idx one known
    dependent.  Issues at most ceil(log2(hi_idx - lo_idx)) probes, maintaining
    the independent-lo / dependent-hi sandwich throughout.
    """
    lo, hi = lo_idx, hi_idx
    while hi - lo > 1:
        mid = (lo + hi + 1) // 2
        if probe_dependent(member_positions[mid]):
            hi = mid
        else:
            lo = mid
    return member_positions[hi]


def _prefix_probe(pair, g, current_mask):
    def probe(pos):
        return not pair.query_independent(ROLE_CLEAN, current_mask & g.prefix_mask(pos))

    return probe


def simple_basis(bd, pair):
    """Keep the dirty basis if it is clean-independent, else greedy from scratch.

    Clean queries: at most n + 1 always; exactly n - r + 1 when the dirty basis
    is a clean basis.
    """
    g = pair.ground
    bd_mask = mask_of(bd)
    if pair.query_independent(ROLE_CLEAN, bd_mask):
        cur = bd_mask
        scan = [p for p in range(g.n) if not bd_mask >> g.order[p] & 1]
    else:
        cur = 0
        scan = range(g.n)
    for p in scan:
        e = g.order[p]
        if pair.query_independent(ROLE_CLEAN, cur | 1 << e):
            cur |= 1 << e
    return ElementSet(g.n, cur), pair.ledger


def _augment_outside(pair, g, cur, bd_mask, events=None):
    for p in range(g.n):
        e = g.order[p]
        if bd_mask >> e & 1:
            continue
        if pair.query_independent(ROLE_CLEAN, cur | 1 << e):
            cur |= 1 << e
            if events is not None:
                events.append(("add", e))
    return cur


def error_dependent_basis(bd, pair, events=None):
    """Binary-search removals from the dirty basis, then greedy augmentation.

    Clean queries: at most n - r + 1 + eta_A + eta_R * ceil(log2 r_d).
    Removal positions strictly increase across iterations, which keeps the
    transcript a strict certificate.
    """
    g = pair.ground
    bd_mask = mask_of(bd)
    cur = bd_mask
    while not pair.query_independent(ROLE_CLEAN, cur):
        positions = g.positions(cur)
        pos = binary_search_smallest_dependent_prefix(
            positions, _prefix_probe(pair, g, cur), -1, len(positions) - 1
        )
        e = g.element_at(pos)
        cur &= ~(1 << e)
        if events is not None:
            events.append(("remove", e))
    cur = _augment_outside(pair, g, cur, bd_mask, events)
    return ElementSet(g.n, cur), pair.ledger


def robust_basis(bd, pair, params, events=None):
    """Segmented removal search: short linear probe, an independence gate, a
    longer linear probe, then binary search; finally greedy augmentation.

    Clean queries: at most min{n - r + k + eta_A + eta_R (k+1) ceil(log2 r_d),
    (1 + 1/k) n}.  The gate query on the whole remaining segment is issued only
    when the first linear probe could not already have covered it.
    """
    g = pair.ground
    k, lg = params.k, params.lg_rd
    bd_mask = mask_of(bd)
    b = 0
    seg = g.positions(bd_mask)  # pending dirty-basis positions, canonical order

    while seg:
        m = len(seg)
        whole = b
        for p in seg:
            whole |= 1 << g.element_at(p)

        def upto(i):
            # b ∪ (first i segment elements); b sits below the segment, so the
            # canonical prefix through the i-th segment position captures it
            return whole & g.prefix_mask(seg[i - 1]) if i else b

        found = None
        for i in range(1, min(m, k - 1) + 1):  # first linear part
            if not pair.query_independent(ROLE_CLEAN, upto(i)):
                found = i
                break
        if found is None:
            if m <= k - 1:
                b, seg = whole, []
                continue
            if pair.query_independent(ROLE_CLEAN, whole):  # gate, only when m >= k
                b, seg = whole, []
                continue
            for i in range(k, min(k * lg, m) + 1):  # second linear part
                if not pair.query_independent(ROLE_CLEAN, upto(i)):
                    found = i
                    break
            if found is None:
                # remainder (k*lg, m]: prefix k*lg verified independent, the
                # whole segment known dependent from the gate
                assert m > k * lg
                lo_c, hi_c = k * lg, m
                while hi_c - lo_c > 1:
                    mid = (lo_c + hi_c + 1) // 2
                    if pair.query_independent(ROLE_CLEAN, upto(mid)):
                        lo_c = mid
                    else:
                        hi_c = mid
                found = hi_c
        if events is not None:
            events.append(("remove", g.element_at(seg[found - 1])))
        b = upto(found - 1)
        seg = seg[found:]
    cur = _augment_outside(pair, g, b, bd_mask, events)
    return ElementSet(g.n, cur), pair.ledger


def weighted_basis(bd, pair, events=None):
    """Alternating prefix-guided additions and binary-search removals keeping
    the working solution safe through every weight prefix.

    Clean queries: at most n - r + 1 + 2 eta_A + eta_R * ceil(log2 r_d).
    Removed elements are never reconsidered.
    """
    g = pair.ground
    bd_mask = mask_of(bd)
    a_mask, r_mask = 0, 0

    def remove_smallest_dependent(cur, lo_pos):
        positions = g.positions(cur)
        lo_idx = positions.index(lo_pos) if lo_pos >= 0 else -1
        pos = binary_search_smallest_dependent_prefix(
            positions, _prefix_probe(pair, g, cur), lo_idx, len(positions) - 1
        )
        e = g.element_at(pos)
        assert bd_mask >> e & 1, "removals must stay inside the dirty basis"
        if events is not None:
            events.append(("remove", e))
        return 1 << e

    while True:
        cur = (bd_mask & ~r_mask) | a_mask
        if pair.query_independent(ROLE_CLEAN, cur):
            break
        r_mask |= remove_smallest_dependent(cur, -1)
    for p in range(g.n):
        e = g.order[p]
        if bd_mask >> e & 1:
            continue
        cur = (bd_mask & ~r_mask) | a_mask
        if pair.query_independent(ROLE_CLEAN, (cur | 1 << e) & g.prefix_mask(p)):
            a_mask |= 1 << e
            if events is not None:
                events.append(("add", e))
            cur |= 1 << e
            if not pair.query_independent(ROLE_CLEAN, cur):
                r_mask |= remove_smallest_dependent(cur, p)
    return ElementSet(g.n, (bd_mask & ~r_mask) | a_mask), pair.ledger


def robust_weighted_basis(bd, pair, params, events=None):
    """Weighted variant with counted linear removal probes and delayed binary
    searches, trading error-dependence against robustness via k.

    Clean queries: at most min{n - r + k + eta_A (k+1) + eta_R (k+1)
    ceil(log2 r_d), (1 + 1/k) n}.

    The full-set independence check that pauses the linear search fires after
    k - 1 removal probes; for k = 1 that is zero probes, so the check runs at
    the start of a search segment whenever the current solution is not already
    known dependent (after a prefix-probe removal the in-iteration check below
    covers it).
    """
    g = pair.ground
    k, lg = params.k, params.lg_rd
    bd_mask = mask_of(bd)
    positions = g.positions(bd_mask)
    d_max = positions[-1] if positions else -1
    a_mask, r_mask = 0, 0
    q = 0
    ls = True
    known_dep = False  # whether (bd \ R) ∪ A is currently known dependent

    def current():
        return (bd_mask & ~r_mask) | a_mask

    def binary_remove(cur, lo_pos):
        members = g.positions(cur)
        pos = binary_search_smallest_dependent_prefix(
            members, _prefix_probe(pair, g, cur), members.index(lo_pos), len(members) - 1
        )
        e = g.element_at(pos)
        assert bd_mask >> e & 1, "removals must stay inside the dirty basis"
        if events is not None:
            events.append(("remove", e))
        return 1 << e

    for p in range(g.n):
        e = g.order[p]
        if not bd_mask >> e & 1:
            cur = current()
            if pair.query_independent(ROLE_CLEAN, (cur | 1 << e) & g.prefix_mask(p)):
                a_mask |= 1 << e
                if events is not None:
                    events.append(("add", e))
                ls = True
                # an addition cannot turn a known-dependent solution independent
            continue
        if r_mask >> e & 1 or not ls:
            continue
        if k == 1 and q == 0 and p != d_max and not known_dep:
            # segment-start check (the k-1 = 0 probe point)
            if pair.query_independent(ROLE_CLEAN, current()):
                ls = False
                continue
            known_dep = True
        q += 1
        if not pair.query_independent(ROLE_CLEAN, current() & g.prefix_mask(p)):
            r_mask |= 1 << e
            if events is not None:
                events.append(("remove", e))
            q = 0
            known_dep = False
        if p == d_max:
            # prefix through d_max is the whole current solution, so either the
            # probe above just verified it or the removal restored independence
            q = 0
            ls = False
            known_dep = False
        elif q == k - 1:
            if pair.query_independent(ROLE_CLEAN, current()):
                q = 0
                ls = False
                known_dep = False
            else:
                known_dep = True
        elif q == k * lg:
            assert known_dep, "binary search fired without a dependent upper bound"
            r_mask |= binary_remove(current(), p)
            q = 0
            known_dep = False
    return ElementSet(g.n, (bd_mask & ~r_mask) | a_mask), pair.ledger


def rank_oracle_basis(bd, pair):
    """Unweighted basis through the clean rank oracle.

    Rank calls: at most min{n + 1, 2 + eta_R ceil(log2 r_d) +
    min{eta_A ceil(log2(n - r_d)), n - r_d}} on instances where one error side
    vanishes, and never more than one call over that on any instance.  Exactly
    2 calls when the dirty basis is already a clean basis.

    Both deficiencies are derived from the two upfront rank calls; a huge
    removal deficiency switches to a plain greedy scan before the second call
    (n + 1 worst case), and a mid-sized combined deficiency whose binary plan
    cannot beat the scan switches after it.
    """
    g = pair.ground
    bd_mask = mask_of(bd)
    r_d = bd_mask.bit_count()
    lg_rd = ceil_log2(r_d)

    def greedy_by_rank(cur, cur_rank, stop_rank=None):
        for p in range(g.n):
            e = g.element_at(p)
            got = pair.query_rank(ROLE_CLEAN, cur | 1 << e)
            if got > cur_rank:
                cur |= 1 << e
                cur_rank = got
            if stop_rank is not None and cur_rank == stop_rank:
                break
        return cur

    if bd_mask == 0:
        r = pair.query_rank(ROLE_CLEAN, g.full_mask)
        if r == 0:
            return ElementSet(g.n, 0), pair.ledger
        return ElementSet(g.n, _rank_additions(pair, g, 0, 0, r, list(range(g.n)))), pair.ledger

    q1 = pair.query_rank(ROLE_CLEAN, bd_mask)
    d_r = r_d - q1
    if d_r > 0 and d_r * lg_rd >= g.n - 1:
        # removals alone would cost more than scanning everything
        return ElementSet(g.n, greedy_by_rank(0, 0)), pair.ledger
    if bd_mask == g.full_mask and d_r > 0:
        # no addition candidates and removals preserve the rank: skip the
        # second upfront call, its answer is already determined
        r, d_a = q1, 0
    else:
        r = pair.query_rank(ROLE_CLEAN, g.full_mask)
        d_a = r - q1
    outside = [p for p in range(g.n) if not bd_mask >> g.order[p] & 1]
    if d_r > 0:
        planned = 2 + d_r * lg_rd + min(d_a * ceil_log2(len(outside)), len(outside))
        if planned > g.n + 1:
            # the binary plan cannot beat the scan; finish greedily, stopping
            # once the full rank is reached
            return ElementSet(g.n, greedy_by_rank(0, 0, stop_rank=r)), pair.ledger
    cur = bd_mask
    for _ in range(d_r):
        members = g.positions(cur)

        def probe(pos):
            pref = cur & g.prefix_mask(pos)
            return pair.query_rank(ROLE_CLEAN, pref) < pref.bit_count()

        # the full set stays rank-deficient while removals remain, so the
        # dependent upper bound is known without a probe
        pos = binary_search_smallest_dependent_prefix(members, probe, -1, len(members) - 1)
        cur &= ~(1 << g.element_at(pos))
    if d_a == 0:
        return ElementSet(g.n, cur), pair.ledger
    return ElementSet(g.n, _rank_additions(pair, g, cur, q1, r, outside)), pair.ledger


def _rank_additions(pair, g, cur, cur_rank, target_rank, outside_positions):
    """Add the missing elements from the listed positions, by binary searches
    on the smallest rank-increasing prefix when that is cheaper, else linearly.
    """
    m = len(outside_positions)
    d_a = target_rank - cur_rank
    if d_a * ceil_log2(m) <= m:
        cum = []
        acc = 0
        for p in outside_positions:
            acc |= 1 << g.element_at(p)
            cum.append(acc)
        lo = -1
        while cur_rank < target_rank:
            # rank over all candidates reaches the target, so the upper end is
            # known rank-increasing without a probe
            lo2, hi = lo, m - 1
            while hi - lo2 > 1:
                mid = (lo2 + hi + 1) // 2
                if pair.query_rank(ROLE_CLEAN, cur | cum[mid]) > cur_rank:
                    hi = mid
                else:
                    lo2 = mid
            cur |= 1 << g.element_at(outside_positions[hi])
            cur_rank += 1
            lo = hi  # earlier candidates stay spanned
        return cur
    for p in outside_positions:
        e = g.element_at(p)
        got = pair.query_rank(ROLE_CLEAN, cur | 1 << e)
        if got > cur_rank:
            cur |= 1 << e
            cur_rank = got
        if cur_rank == target_rank:
            break
    return cur


def pair_query_basis(b, pair):
    """Augment a clean-independent set by querying non-members two at a time.

    Designed for instances with no removal error and a very large addition
    error, where it beats the n - r + eta_A floor.  Returns a third flag that
    is False when the output is not a clean basis (misuse outside that family).
    """
    g = pair.ground
    cur = mask_of(b)
    outside = [g.element_at(p) for p in range(g.n) if not cur >> g.order[p] & 1]
    i = 0
    while i < len(outside):
        if len(outside) - i == 1:
            e = outside[i]
            if pair.query_independent(ROLE_CLEAN, cur | 1 << e):
                cur |= 1 << e
            break
        e1, e2 = outside[i], outside[i + 1]
        i += 2
        if pair.query_independent(ROLE_CLEAN, cur | 1 << e1 | 1 << e2):
            cur |= 1 << e1 | 1 << e2
        elif pair.query_independent(ROLE_CLEAN, cur | 1 << e1):
            cur |= 1 << e1
        elif pair.query_independent(ROLE_CLEAN, cur | 1 << e2):
            cur |= 1 << e2
    clean = pair.clean
    family_ok = clean.is_independent_mask(cur) and not any(
        clean.is_independent_mask(cur | 1 << e) for e in iter_bits(g.full_mask & ~cur)
    )
    return ElementSet(g.n, cur), pair.ledger, family_ok


COSTLY_A = "remove-from-E"
COSTLY_B = "dirty-basis-then-verify"


def costly_strategies(pair, strategy="auto"):
    """Costly-oracle strategies: pure clean removal from E versus a dirty
    greedy basis verified cleanly; the selector spends one clean rank call on
    r and runs whichever closed-form cost predicts cheaper.

    Returns (basis, total_cost, strategy tag); the executed run's ledger is the
    pair's.  With the selector and an exact dirty oracle, the executed cost is
    exactly p (n - r) ceil(log2 n) + p or n + p (n - r + 1), plus p for the
    selector's rank call.
    """
    g = pair.ground
    p = pair.ledger.cost_p
    n = g.n
    if strategy == "auto":
        r = pair.query_rank(ROLE_CLEAN, g.full_mask)
        cost_a = p * (n - r) * ceil_log2(n) + p
        cost_b = n + p * (n - r + 1)
        if cost_a <= cost_b:
            basis = _costly_remove_from_e(pair, known_r=r)
            return basis, pair.ledger.total_cost, COSTLY_A
        basis = _costly_dirty_then_verify(pair)
        return basis, pair.ledger.total_cost, COSTLY_B
    if strategy == "A":
        return _costly_remove_from_e(pair, known_r=None), pair.ledger.total_cost, COSTLY_A
    if strategy == "B":
        return _costly_dirty_then_verify(pair), pair.ledger.total_cost, COSTLY_B
    raise ValueError(f"unknown costly strategy {strategy!r}")


def _costly_remove_from_e(pair, known_r):
    """Start from E and remove smallest dependent-prefix elements.

    With r known (selector mode) each removal is one binary search over the
    full canonical index space, exactly ceil(log2 n) probes, and no re-checks
    are needed; without r the full set is re-queried after every removal.
    """
    g = pair.ground
    cur = g.full_mask
    if not pair.query_independent(ROLE_CLEAN, cur):
        if known_r is not None:
            removals = g.n - known_r
            for _ in range(removals):
                pos = binary_search_smallest_dependent_prefix(
                    list(range(g.n)), _prefix_probe(pair, g, cur), -1, g.n - 1
                )
                cur &= ~(1 << g.element_at(pos))
        else:
            while True:
                pos = binary_search_smallest_dependent_prefix(
                    list(range(g.n)), _prefix_probe(pair, g, cur), -1, g.n - 1
                )
                cur &= ~(1 << g.element_at(pos))
                if pair.query_independent(ROLE_CLEAN, cur):
                    break
    return ElementSet(g.n, cur)


def _costly_dirty_then_verify(pair):
    bd = greedy_basis(pair, ROLE_DIRTY)
    basis, _ = simple_basis(bd, pair)
    return basis
