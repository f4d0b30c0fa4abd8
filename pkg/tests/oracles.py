"""Independent reference implementations used to freeze expected values.

Every function here rederives a quantity by a route deliberately
different from the library's: no shared helpers, different algorithmic
shape (naive enumeration instead of staged search), so that agreement
between the two is evidence and disagreement is a bug in one of them.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction


# ---------------------------------------------------------------------------
# tree order


def lex_key(node: str) -> Fraction:
    """Exact numeric embedding of the node order.

    A node maps to the dyadic value of its digits plus half the next
    step; comparing the embedded values reproduces the order in which a
    node sits above its left subtree and below its right subtree.
    """
    total = Fraction(0)
    for i, digit in enumerate(node):
        total += Fraction(int(digit), 2 ** (i + 1))
    return total + Fraction(1, 2 ** (len(node) + 1))


def lex_sorted_by_key(nodes):
    return tuple(sorted(nodes, key=lex_key))


# ---------------------------------------------------------------------------
# binary tree scaffolding (strings only, no library types)


def all_nodes(n: int):
    out = []
    for length in range(n):
        for bits in itertools.product("01", repeat=length):
            out.append("".join(bits))
    out.sort(key=lambda s: (len(s), s))
    return out


def level_nodes(length: int):
    return ["".join(bits) for bits in itertools.product("01", repeat=length)]


# ---------------------------------------------------------------------------
# strong subtrees by subset scan


def _is_strong_subtree(members, level_set) -> bool:
    by_level = {}
    for node in members:
        by_level.setdefault(len(node), []).append(node)
    if sorted(by_level) != list(level_set):
        return False
    if len(by_level[level_set[0]]) != 1:
        return False
    root = by_level[level_set[0]][0]
    if not all(node.startswith(root) for node in members):
        return False
    for lower, upper in zip(level_set, level_set[1:]):
        upper_set = by_level[upper]
        for node in upper_set:
            if node[:lower] not in by_level[lower]:
                return False
        for parent in by_level[lower]:
            for digit in "01":
                hits = [t for t in upper_set if t.startswith(parent + digit)]
                if len(hits) != 1:
                    return False
        if len(upper_set) != 2 * len(by_level[lower]):
            return False
    return True


def strong_subtrees_by_scan(n: int, level_set):
    """Every strong subtree of the height-``n`` binary truncation, by
    scanning all node subsets and checking the clauses literally."""
    level_set = tuple(level_set)
    nodes = all_nodes(n)
    found = []
    for bits in range(1, 1 << len(nodes)):
        members = [nodes[i] for i in range(len(nodes)) if bits >> i & 1]
        if _is_strong_subtree(members, level_set):
            found.append(tuple(members))
    return found


# ---------------------------------------------------------------------------
# dense-witness existence by naive product scan


def sdhl_exists_by_scan(evaluate, arity: int, n: int, colors: int) -> bool:
    """Existence of a successor-level dense witness, checked naively.

    Uses the one-node-per-cone reduction: a dominating monochromatic
    matrix exists at some level exactly when one choice per successor
    cone can be made monochromatic (a dominating matrix contains such a
    choice; such a choice dominates).  The scan is a full cartesian
    product per (base, level, color) with a complete recheck per combo.
    """
    for ht in range(n - 1):
        layer = level_nodes(ht)
        for base in itertools.product(layer, repeat=arity):
            cones = [(j, base[j] + digit) for j in range(arity)
                     for digit in "01"]
            for eta in range(ht + 1, n):
                tails = ["".join(t) for t in
                         itertools.product("01", repeat=eta - ht - 1)]
                pools = [[stem + tail for tail in tails] for (_, stem) in cones]
                for gamma in range(colors):
                    for combo in itertools.product(*pools):
                        chosen = [[] for _ in range(arity)]
                        for (j, _), node in zip(cones, combo):
                            chosen[j].append(node)
                        if all(evaluate(tup) == gamma
                               for tup in itertools.product(*chosen)):
                            return True
    return False


# ---------------------------------------------------------------------------
# degree numerics


def alternating_count(n: int) -> int:
    """Number of up-down permutations of length 2n-1, by brute force."""
    length = 2 * n - 1
    count = 0
    for perm in itertools.permutations(range(length)):
        ok = True
        for i in range(length - 1):
            if i % 2 == 0:
                ok = perm[i] < perm[i + 1]
            else:
                ok = perm[i] > perm[i + 1]
            if not ok:
                break
        if ok:
            count += 1
    return count


# ---------------------------------------------------------------------------
# index-set map closure without the size bound


def wmap_image_unbounded(ground, raw, d: int, u):
    """Image of ``u`` using families of d-subsets of every size.

    Incremental bitmask scan over all nonempty families; the library
    bounds the family size instead, and the two must agree.
    """
    dsubs = [frozenset(c) for c in itertools.combinations(sorted(ground), d)]
    images = [frozenset(raw[tuple(sorted(v))]) for v in dsubs]
    uset = set(u)
    acc: set = set()
    inter_v: dict = {}
    inter_w: dict = {}
    for mask in range(1, 1 << len(dsubs)):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        if rest:
            iv = inter_v[rest] & dsubs[i]
            iw = inter_w[rest] & images[i]
        else:
            iv, iw = dsubs[i], images[i]
        inter_v[mask] = iv
        inter_w[mask] = iw
        if iv <= uset:
            acc |= iw
    return tuple(sorted(acc))


def make_raw_map(seed: int, size: int, d: int):
    """Seeded raw map with nested blocks below and above the ground set.

    The blocks grow with the subset size, which keeps the raw map
    monotone; the closure of such a map satisfies both closure laws,
    giving a family of positive test instances.
    """
    rng = random.Random(seed)
    ground = sorted(rng.sample(range(20, 40), size))
    bots = sorted(rng.sample(range(0, 10), rng.randrange(0, 4)))
    tops = sorted(rng.sample(range(50, 60), rng.randrange(0, 4)))
    bot_cut = sorted(rng.randrange(0, len(bots) + 1) for _ in range(d + 1))
    top_cut = sorted(rng.randrange(0, len(tops) + 1) for _ in range(d + 1))
    raw = {}
    for r in range(d + 1):
        for u in itertools.combinations(ground, r):
            raw[u] = (set(u) | set(bots[:bot_cut[r]])
                      | set(tops[:top_cut[r]]))
    return ground, raw
