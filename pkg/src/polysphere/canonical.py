"""Canonical labeling of facet lists via their vertex-facet incidence graph.

A facet list is canonicalized by canonically labeling the two-colored
bipartite incidence graph (vertex nodes on one side, facet nodes on the
other).  We use the usual individualization-refinement scheme: stable color
refinement, branching on the first smallest non-singleton cell, taking the
minimum form over all leaves of the search tree.  Correctness only needs the
branching cell to be chosen by a label-independent rule; no automorphism
pruning is attempted since all inputs here are tiny (n <= 63, few facets).
"""

from __future__ import annotations


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _refine(adj, colors):
    """Iterate color refinement to a stable partition. Returns new color list."""
    nnodes = len(adj)
    while True:
        sigs = [
            (colors[u], tuple(sorted(colors[w] for w in adj[u]))) for u in range(nnodes)
        ]
        order = sorted(set(sigs))
        remap = {s: i for i, s in enumerate(order)}
        new = [remap[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _cells(colors):
    by_color = {}
    for u, c in enumerate(colors):
        by_color.setdefault(c, []).append(u)
    return [by_color[c] for c in sorted(by_color)]


def canonical_labeling(n: int, facets) -> tuple:
    """Return a vertex permutation ``perm`` (new label of old vertex v is
    ``perm[v]``) realizing the canonical form of the facet list."""
    facets = list(facets)
    k = len(facets)
    nnodes = n + k
    adj = [[] for _ in range(nnodes)]
    for j, f in enumerate(facets):
        for v in _bits(f):
            adj[v].append(n + j)
            adj[n + j].append(v)

    # vertices one initial class, facets classed by size (label-independent)
    sizes = sorted({f.bit_count() for f in facets})
    size_color = {s: 1 + i for i, s in enumerate(sizes)}
    init = [0] * n + [size_color[f.bit_count()] for f in facets]

    best = [None, None]  # (form, perm)

    def leaf(colors):
        order = sorted(range(n), key=lambda u: colors[u])
        perm = [0] * n
        for newlab, old in enumerate(order):
            perm[old] = newlab
        form = _form(n, facets, perm)
        if best[0] is None or form < best[0]:
            best[0] = form
            best[1] = tuple(perm)

    def descend(colors):
        colors = _refine(adj, colors)
        target = None
        for cell in _cells(colors):
            if len(cell) > 1:
                if target is None or len(cell) < len(target):
                    target = cell
        if target is None:
            leaf(colors)
            return
        fresh = max(colors) + 1
        for u in target:
            child = list(colors)
            child[u] = fresh
            descend(child)

    descend(init)
    return best[1]


def _form(n: int, facets, perm) -> bytes:
    relabeled = sorted(
        sum(1 << perm[v] for v in _bits(f)) for f in facets
    )
    out = [n.to_bytes(1, "big")]
    for m in relabeled:
        out.append(m.to_bytes(8, "big"))
    return b"".join(out)


def canonical_bytes(n: int, facets) -> bytes:
    """Relabeling-invariant byte string for a facet list given as bitmasks."""
    perm = canonical_labeling(n, facets)
    return _form(n, facets, perm)
