"""Partial chirotopes and constraint propagation for polytopality analysis.

A partial chirotope of rank r on n elements stores a sign in {-1, 0, +1} or
"unknown" for every sorted r-subset (basis); queries for arbitrary ordered
tuples apply the permutation parity, and tuples with repeats are 0.

Rank-5 mode implements the polytopality constraints for a 3-sphere facet
list: bases inside a facet are zero, same-side sign copying across facet
hyperplanes, and forcing through three-term Grassmann-Pluecker relations.
Every inference is logged so the resulting proof certificates replay without
search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .complexes import FacetList, bits, mask_of


class ChirotopeConflict(Exception):
    """Two sound inferences force opposite signs for one basis."""

    def __init__(self, basis, detail=""):
        super().__init__(f"conflicting signs forced for basis {basis} {detail}")
        self.basis = basis


def sort_with_parity(tup):
    """Return (sorted tuple, parity sign) or (None, 0) if entries repeat."""
    lst = list(tup)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(lst)):
        if lst[i - 1] == lst[i]:
            return None, 0
    return tuple(lst), sign


class PartialChirotope:
    """Mutable sign table over sorted r-subsets with alternating closure."""

    def __init__(self, n: int, rank: int):
        if rank not in (4, 5):
            raise ValueError("only ranks 4 and 5 are supported")
        self.n = n
        self.rank = rank
        self.bases = list(combinations(range(n), rank))
        self.index = {b: i for i, b in enumerate(self.bases)}
        self.signs = [None] * len(self.bases)

    def copy(self) -> "PartialChirotope":
        dup = PartialChirotope.__new__(PartialChirotope)
        dup.n = self.n
        dup.rank = self.rank
        dup.bases = self.bases
        dup.index = self.index
        dup.signs = list(self.signs)
        return dup

    def num_determined(self) -> int:
        return sum(1 for s in self.signs if s is not None)

    def query(self, tup):
        """Sign of an ordered tuple, or None if undetermined."""
        if len(tup) != self.rank:
            raise ValueError("tuple length must equal the rank")
        key, parity = sort_with_parity(tup)
        if key is None:
            return 0
        s = self.signs[self.index[key]]
        return None if s is None else parity * s

    def get(self, basis_id: int):
        return self.signs[basis_id]

    def set_sorted(self, basis, value: int):
        """Set the sign of an already-sorted basis; conflicting re-set raises."""
        i = self.index[basis]
        if self.signs[i] is None:
            self.signs[i] = value
        elif self.signs[i] != value:
            raise ChirotopeConflict(basis)

    def assign(self, tup, value: int):
        key, parity = sort_with_parity(tup)
        if key is None:
            raise ValueError("tuple with repeats cannot be assigned")
        self.set_sorted(key, parity * value)

    def determined_items(self):
        return [
            (b, s) for b, s in zip(self.bases, self.signs) if s is not None
        ]


# --------------------------------------------------------------------------
# inference logging


@dataclass(frozen=True)
class Step:
    """One replayable inference: the conclusion sign of a sorted basis."""

    basis: tuple
    sign: int
    rule: str  # "SEED", "P1", "P2", "GP"
    premises: tuple  # step ids
    detail: tuple  # rule parameters: P2 -> (facet, x, y); GP -> (lam, quad)


@dataclass(frozen=True)
class Conflict:
    """Why propagation stopped: either two steps force opposite signs for one
    basis ("opposite"), or a fully determined GP relation has all nonzero
    terms of one sign ("relation")."""

    kind: str
    basis: tuple
    step_a: int | None = None
    step_b: int | None = None
    lam: tuple | None = None
    quad: tuple | None = None
    premises: tuple = ()


@dataclass
class ProofCertificate:
    n: int
    rank: int
    seed_basis: tuple
    seed_sign: int
    seed_justified: bool
    steps: list
    verdict: str  # "CONTRADICTION", "EXHAUSTED", "COMPLETED"
    conflict: Conflict | None = None
    determined: int = 0
    chirotope: PartialChirotope | None = None
    base: int | None = None  # base facet for rank-4 diagram runs

    @property
    def derived(self) -> int:
        """Signs obtained by inference: the seeded basis is a free
        orientation normalization, so it is not counted."""
        return self.determined - 1

    def signs_by_basis(self):
        out = {}
        for step in self.steps:
            out.setdefault(step.basis, step.sign)
        return out


class InferenceLog:
    def __init__(self):
        self.steps: list[Step] = []
        self.step_of_basis: dict[tuple, int] = {}

    def record(self, basis, sign, rule, premises, detail=()):
        self.steps.append(Step(basis, sign, rule, tuple(premises), tuple(detail)))
        sid = len(self.steps) - 1
        self.step_of_basis.setdefault(basis, sid)
        return sid


# --------------------------------------------------------------------------
# rank-5 polytopality constraints


def from_sphere_rank5(fl: FacetList, log: InferenceLog | None = None) -> PartialChirotope:
    """Rank-5 partial chirotope with every basis inside a facet set to 0."""
    pc = PartialChirotope(fl.n, 5)
    for j, f in enumerate(fl.facets):
        verts = list(bits(f))
        if len(verts) < 5:
            continue
        for basis in combinations(verts, 5):
            i = pc.index[basis]
            if pc.signs[i] is None:
                pc.signs[i] = 0
                if log is not None:
                    log.record(basis, 0, "P1", (), (j,))
    return pc


def apply_p2(pc: PartialChirotope, fl: FacetList, log: InferenceLog | None = None) -> bool:
    """Same-side propagation: a determined basis with four elements inside a
    facet and one outside transfers its sign to every other outside element.
    Runs to its own fixpoint; returns True if anything changed."""
    changed_any = False
    changed = True
    while changed:
        changed = False
        for j, fmask in enumerate(fl.facets):
            outside = [v for v in range(fl.n) if not (fmask >> v) & 1]
            for basis, sign in pc.determined_items():
                bmask = mask_of(basis)
                inside = bmask & fmask
                if inside.bit_count() != 4:
                    continue
                x = (bmask & ~fmask).bit_length() - 1
                quad = tuple(bits(inside))
                base_val = pc.query((x,) + quad)
                premise = () if log is None else (log.step_of_basis[basis],)
                for y in outside:
                    if y == x:
                        continue
                    key, parity = sort_with_parity((y,) + quad)
                    i = pc.index[key]
                    val = parity * base_val
                    if pc.signs[i] is None:
                        pc.signs[i] = val
                        changed = changed_any = True
                        if log is not None:
                            log.record(key, val, "P2", premise, (j, x, y))
                    elif pc.signs[i] != val:
                        if log is not None:
                            sid = log.record(key, val, "P2", premise, (j, x, y))
                            raise _conflict_with_log(key, log, sid)
                        raise ChirotopeConflict(key, f"via facet {j}")
    return changed_any


def _conflict_with_log(basis, log, new_sid):
    exc = ChirotopeConflict(basis)
    exc.step_a = log.step_of_basis[basis]
    exc.step_b = new_sid
    return exc


def gp_relations(n: int, rank: int):
    """All three-term Grassmann-Pluecker relations: for each (rank-2)-subset
    lambda and 4-subset (a,b,c,d) of the rest, the three products
    chi(l,a,b)chi(l,c,d), chi(l,a,c)chi(l,b,d), chi(l,a,d)chi(l,b,c)."""
    rels = []
    for lam in combinations(range(n), rank - 2):
        lamset = set(lam)
        rest = [v for v in range(n) if v not in lamset]
        for quad in combinations(rest, 4):
            rels.append((lam, quad))
    return rels


_REL_CACHE: dict = {}


def _relation_table(n: int, rank: int):
    """Per relation: three term descriptors ((basisA, parityA), (basisB,
    parityB), termsign) with sorted bases; plus a basis -> relation index."""
    key = (n, rank)
    if key in _REL_CACHE:
        return _REL_CACHE[key]
    rels = gp_relations(n, rank)
    table = []
    by_basis: dict[tuple, list] = {}
    for ridx, (lam, quad) in enumerate(rels):
        a, b, c, d = quad
        terms = []
        for (x, y), tsign in (((a, b), 1), ((c, d), 1), ((a, c), -1), ((b, d), 1), ((a, d), 1), ((b, c), 1)):
            key2, par = sort_with_parity(lam + (x, y))
            terms.append((key2, par))
            by_basis.setdefault(key2, []).append(ridx)
        # term k has factors terms[2k], terms[2k+1]; sign -1 on middle term
        table.append((lam, quad, terms))
    for k in by_basis:
        by_basis[k] = sorted(set(by_basis[k]))
    _REL_CACHE[key] = (table, by_basis)
    return table, by_basis


def _term_value(pc, f1, f2):
    """Value of a product chi(B1)*chi(B2) given (basis, parity) factors, or
    None; a zero factor determines the product even if the other is unknown."""
    (b1, p1), (b2, p2) = f1, f2
    s1 = pc.signs[pc.index[b1]]
    s2 = pc.signs[pc.index[b2]]
    if s1 == 0 or s2 == 0:
        return 0
    if s1 is None or s2 is None:
        return None
    return p1 * s1 * p2 * s2


def gp_propagate(pc: PartialChirotope, log: InferenceLog | None = None, seeds=None) -> bool:
    """Force signs through GP relations: the multiset of the three signed
    terms must be {0} or contain both -1 and +1.  Worklist-driven; raises
    ChirotopeConflict when a relation cannot be satisfied.  With seeds (an
    iterable of bases) only relations touching them start on the worklist."""
    table, by_basis = _relation_table(pc.n, pc.rank)
    if seeds is None:
        pending = list(range(len(table)))
    else:
        pending = sorted({r for b in seeds for r in by_basis.get(b, ())})
    queued = set(pending)
    changed_any = False
    while pending:
        ridx = pending.pop()
        queued.discard(ridx)
        new_bases = _gp_force_one(pc, table[ridx], log)
        if new_bases:
            changed_any = True
            for basis in new_bases:
                for r2 in by_basis.get(basis, ()):
                    if r2 not in queued:
                        queued.add(r2)
                        pending.append(r2)
    return changed_any


def _gp_force_one(pc, rel, log):
    lam, quad, terms = rel
    tsigns = (1, -1, 1)
    vals = []
    for k in range(3):
        v = _term_value(pc, terms[2 * k], terms[2 * k + 1])
        vals.append(None if v is None else tsigns[k] * v)
    known = [v for v in vals if v is not None]
    if len(known) == 3:
        if all(v == 0 for v in known):
            return ()
        if +1 in known and -1 in known:
            return ()
        exc = ChirotopeConflict(terms[0][0], "GP relation violated")
        exc.kind = "relation"
        exc.lam = lam
        exc.quad = quad
        if log is not None:
            exc.premises = _gp_premises(log, terms)
        raise exc
    if len(known) != 2:
        return ()
    if +1 in known and -1 in known:
        return ()
    need = 0 if all(v == 0 for v in known) else (-1 if +1 in known else +1)
    k = vals.index(None)
    f1, f2 = terms[2 * k], terms[2 * k + 1]
    s1 = pc.signs[pc.index[f1[0]]]
    s2 = pc.signs[pc.index[f2[0]]]
    term_target = tsigns[k] * need
    if s1 is None and s2 is None:
        return ()
    if s1 is None:
        unknown, unk_par, val, val_par = f1, f1[1], s2, f2[1]
    else:
        unknown, unk_par, val, val_par = f2, f2[1], s1, f1[1]
    if need == 0:
        forced = 0
    else:
        forced = term_target * unk_par * val_par * val
    basis = unknown[0]
    i = pc.index[basis]
    if pc.signs[i] is None:
        pc.signs[i] = forced
        if log is not None:
            log.record(basis, forced, "GP", _gp_premises(log, terms), (lam, quad))
        return (basis,)
    if pc.signs[i] != forced:
        if log is not None:
            sid = log.record(basis, forced, "GP", _gp_premises(log, terms), (lam, quad))
            raise _conflict_with_log(basis, log, sid)
        raise ChirotopeConflict(basis)
    return ()


def _gp_premises(log, terms):
    out = []
    for basis, _ in terms:
        sid = log.step_of_basis.get(basis)
        if sid is not None:
            out.append(sid)
    return tuple(sorted(set(out)))


# --------------------------------------------------------------------------
# rank-4 diagram chirotopes


def _two_faces(fl: FacetList):
    """Sorted triangle 2-faces with the two facet indices containing each.
    Requires a 2-simplicial sphere, where every ridge is a triangle in
    exactly two facets."""
    from .complexes import face_lattice

    lat = face_lattice(fl)
    out = []
    for r in sorted(lat.faces_of_rank(3)):
        tri = tuple(bits(r))
        idxs = tuple(j for j, f in enumerate(fl.facets) if r & f == r)
        if len(tri) != 3 or len(idxs) != 2:
            raise ValueError("diagram rules need a 2-simplicial sphere")
        out.append((tri, idxs))
    return out


def diagram_ridge_groups(fl: FacetList, base: int):
    """Per 2-face T, the side label of every constrained point: across an
    interior ridge the two facets' remaining points get opposite labels,
    while a 2-face of the base facet has all non-incident points on one side
    (they are inside the base cell)."""
    base_mask = fl.facets[base]
    groups = []
    for tri, (g, h) in _two_faces(fl):
        tmask = mask_of(tri)
        sides = {}
        if tmask & base_mask == tmask:
            for p in range(fl.n):
                if not (tmask >> p) & 1:
                    sides[p] = 1
        else:
            for p in bits(fl.facets[g] & ~tmask):
                sides[p] = 1
            for p in bits(fl.facets[h] & ~tmask):
                sides[p] = -1
        groups.append((tri, sides))
    return groups


def apply_ridge_rule(
    pc: PartialChirotope, groups, log: InferenceLog | None = None, changed_out=None
) -> bool:
    """Copy each determined sign chi(T, p) to every point q constrained with
    p over the same 2-face T, negated when they lie on opposite sides.  Runs
    to its own fixpoint; returns True if anything changed.  Newly determined
    basis keys are added to `changed_out` when a set is supplied."""
    changed_any = False
    changed = True
    while changed:
        changed = False
        for tri, sides in groups:
            src = None
            for p, side in sides.items():
                key, par = sort_with_parity(tri + (p,))
                s = pc.signs[pc.index[key]]
                if s is not None:
                    src = (p, side, par * s, key)
                    break
            if src is None:
                continue
            p, side_p, val_p, src_key = src
            premise = () if log is None else (log.step_of_basis[src_key],)
            for q, side_q in sides.items():
                if q == p:
                    continue
                key, par = sort_with_parity(tri + (q,))
                val = par * side_p * side_q * val_p
                i = pc.index[key]
                if pc.signs[i] is None:
                    pc.signs[i] = val
                    changed = changed_any = True
                    if changed_out is not None:
                        changed_out.add(key)
                    if log is not None:
                        log.record(key, val, "RIDGE", premise, (tri, p, q))
                elif pc.signs[i] != val:
                    if log is not None:
                        sid = log.record(key, val, "RIDGE", premise, (tri, p, q))
                        raise _conflict_with_log(key, log, sid)
                    raise ChirotopeConflict(key, f"across ridge {tri}")
    return changed_any


def diagram_seed(fl: FacetList) -> tuple:
    """Deterministic seed basis: the smallest 2-face plus the smallest point
    of a facet containing it, a tetrahedron by convexity of the facet."""
    tri, (g, h) = _two_faces(fl)[0]
    tmask = mask_of(tri)
    extra = min(bits((fl.facets[g] | fl.facets[h]) & ~tmask))
    return tri + (extra,)


def diagram_partial_chirotope(
    fl: FacetList, base: int, seed_sign: int = 1
) -> ProofCertificate:
    """Rank-4 partial chirotope of a diagram with the given base facet: one
    seeded basis propagated through the ridge side rules and GP relations to
    a joint fixpoint.  The certificate's chirotope holds the result."""
    if not 0 <= base < len(fl.facets):
        raise ValueError("base facet index out of range")
    log = InferenceLog()
    pc = PartialChirotope(fl.n, 4)
    seed = diagram_seed(fl)
    key, parity = sort_with_parity(seed)
    pc.signs[pc.index[key]] = parity * seed_sign
    log.record(key, parity * seed_sign, "SEED", ())
    groups = diagram_ridge_groups(fl, base)

    cert = ProofCertificate(
        n=fl.n,
        rank=4,
        seed_basis=seed,
        seed_sign=seed_sign,
        seed_justified=True,
        steps=log.steps,
        verdict="EXHAUSTED",
    )
    try:
        changed = True
        while changed:
            changed = apply_ridge_rule(pc, groups, log)
            changed = gp_propagate(pc, log) or changed
    except ChirotopeConflict as exc:
        key2, _ = sort_with_parity(exc.basis)
        cert.verdict = "CONTRADICTION"
        cert.conflict = Conflict(
            kind=getattr(exc, "kind", "opposite"),
            basis=key2,
            step_a=getattr(exc, "step_a", None),
            step_b=getattr(exc, "step_b", None),
            lam=getattr(exc, "lam", None),
            quad=getattr(exc, "quad", None),
            premises=tuple(getattr(exc, "premises", ())),
        )
    cert.determined = pc.num_determined()
    if cert.verdict != "CONTRADICTION":
        cert.verdict = "COMPLETED" if None not in pc.signs else "EXHAUSTED"
    cert.chirotope = pc
    cert.base = base
    return cert


# --------------------------------------------------------------------------
# backtracking completion search with optional final-polynomial pruning


class SearchBudgetExceeded(Exception):
    """Node budget hit; carries the partial outcome and the unexplored
    assignment trails so a caller can resume."""

    def __init__(self, outcome, pending_trails):
        super().__init__("search node budget exceeded")
        self.outcome = outcome
        self.pending_trails = pending_trails


@dataclass(frozen=True)
class FrontierNode:
    """A search node that reached the determined-count floor: the assignment
    trail from the root plus the propagated partial chirotope."""

    trail: tuple
    chirotope: PartialChirotope


@dataclass
class SearchOutcome:
    completions: list = field(default_factory=list)
    refutations: list = field(default_factory=list)  # (FrontierNode, BfpCertificate)
    frontier: list = field(default_factory=list)  # floor nodes left unrefuted
    nodes: int = 0
    complete: bool = True


def _close(pc, groups, seed_bases):
    """Propagate to the joint GP + ridge fixpoint after new assignments."""
    gp_propagate(pc, seeds=seed_bases)
    while groups:
        ridge_new: set = set()
        if not apply_ridge_rule(pc, groups, changed_out=ridge_new):
            break
        gp_propagate(pc, seeds=tuple(ridge_new))


def _branch_basis(pc, det_count, by_basis, table):
    """Deterministic maximum-constraint choice: the undetermined basis seen
    in the most relations that already have >= 4 of 6 factors determined."""
    scores: dict[int, int] = {}
    for ridx, cnt in enumerate(det_count):
        if cnt >= 4:
            for key2, _ in table[ridx][2]:
                i = pc.index[key2]
                if pc.signs[i] is None:
                    scores[i] = scores.get(i, 0) + 1
    if scores:
        best = min(scores, key=lambda i: (-scores[i], i))
        return pc.bases[best]
    return next(b for b, s in zip(pc.bases, pc.signs) if s is None)


def complete_search(
    pc: PartialChirotope,
    groups=None,
    prune: bool = False,
    floor: int = 435,
    mode: str = "search",
    node_budget: int | None = None,
    max_completions: int | None = None,
    max_frontier: int | None = None,
    rng=None,
    resume_trails=None,
) -> SearchOutcome:
    """Backtracking over the unknown signs of a uniform partial chirotope,
    keeping GP (and, when ridge groups are given, diagram side) consistency.

    Nodes reaching `floor` determined signs form the frontier.  In "search"
    mode a frontier node is refuted and pruned when `prune` is set and a
    final polynomial exists, and searched deeper otherwise; in "frontier"
    mode it is recorded and never descended, which enumerates the frontier
    itself.  Raises SearchBudgetExceeded with resumable trails when
    `node_budget` runs out."""
    from .bfp import bfp_search

    if mode not in ("search", "frontier"):
        raise ValueError("mode must be 'search' or 'frontier'")
    table, by_basis = _relation_table(pc.n, pc.rank)

    def counts_for(p):
        det = [0] * len(table)
        for basis, s in zip(p.bases, p.signs):
            if s is not None:
                for r in by_basis.get(basis, ()):
                    det[r] += 1
        return det

    def node_from_trail(trail):
        p = pc.copy()
        for basis, sign in trail:
            p.set_sorted(basis, sign)
            _close(p, groups, (basis,))
        return p

    outcome = SearchOutcome()
    stack = []
    if resume_trails is not None:
        for trail in resume_trails:
            try:
                p = node_from_trail(trail)
            except ChirotopeConflict:
                continue
            stack.append((p, counts_for(p), tuple(trail)))
    else:
        stack.append((pc.copy(), counts_for(pc), ()))

    while stack:
        if node_budget is not None and outcome.nodes >= node_budget:
            outcome.complete = False
            raise SearchBudgetExceeded(outcome, [t for _, _, t in stack])
        cur, det_count, trail = stack.pop()
        outcome.nodes += 1
        if cur.num_determined() >= floor:
            node = FrontierNode(trail, cur)
            if mode == "frontier":
                outcome.frontier.append(node)
                if max_frontier is not None and len(outcome.frontier) >= max_frontier:
                    outcome.complete = False
                    break
                continue
            if prune:
                cert = bfp_search(cur)
                if cert is not None:
                    outcome.refutations.append((node, cert))
                    continue
                outcome.frontier.append(node)
        if None not in cur.signs:
            outcome.completions.append(cur)
            if max_completions is not None and len(outcome.completions) >= max_completions:
                outcome.complete = False
                break
            continue
        basis = _branch_basis(cur, det_count, by_basis, table)
        order = [-1, 1]  # popped in +1-first order
        if rng is not None:
            rng.shuffle(order)
        for sign in order:
            child = cur.copy()
            child.set_sorted(basis, sign)
            try:
                _close(child, groups, (basis,))
            except ChirotopeConflict:
                continue
            child_det = list(det_count)
            for i, (old, new) in enumerate(zip(cur.signs, child.signs)):
                if old is None and new is not None:
                    for r in by_basis.get(cur.bases[i], ()):
                        child_det[r] += 1
            stack.append((child, child_det, trail + ((basis, sign),)))
    return outcome


def sample_frontier(pc, groups=None, floor: int = 435, count: int = 1, seed: int = 0):
    """Random frontier nodes by repeated randomized descent: each restart
    follows a fresh random branch order down to the first node with `floor`
    determined signs.  Cheap substitute for enumerating the whole frontier."""
    import random

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        res = complete_search(
            pc, groups=groups, floor=floor, mode="frontier",
            max_frontier=1, rng=rng,
        )
        out.extend(res.frontier)
    return out


# --------------------------------------------------------------------------
# the non-polytopality driver


def seed_is_justified(fl: FacetList, basis) -> bool:
    """Combinatorial justification pattern: four of the five elements span
    a tetrahedron because three of them form a triangle 2-face (a 3-element
    intersection of two facets) inside some facet that also contains the
    fourth, while the fifth element is outside that facet."""
    for j, f in enumerate(fl.facets):
        inside = [v for v in basis if (f >> v) & 1]
        if len(inside) != 4:
            continue
        for tri in combinations(inside, 3):
            tmask = mask_of(tri)
            # the triangle is a 2-face iff two facets intersect in exactly it
            if any(k != j and f & g == tmask for k, g in enumerate(fl.facets)):
                return True
    return False


def prove_nonpolytopal(
    fl: FacetList, seed, seed_sign: int = 1
) -> ProofCertificate:
    """Fix chi(seed) = seed_sign, run P1/P2/GP propagation to a joint
    fixpoint, and report CONTRADICTION, COMPLETED or EXHAUSTED."""
    log = InferenceLog()
    pc = from_sphere_rank5(fl, log)
    seed = tuple(seed)
    key, parity = sort_with_parity(seed)
    if key is None:
        raise ValueError("seed basis has repeated elements")
    if pc.signs[pc.index[key]] == 0:
        raise ValueError("seed basis is forced to zero by the facet condition")
    justified = seed_is_justified(fl, seed)
    pc.signs[pc.index[key]] = parity * seed_sign
    log.record(key, parity * seed_sign, "SEED", ())

    cert = ProofCertificate(
        n=fl.n,
        rank=5,
        seed_basis=seed,
        seed_sign=seed_sign,
        seed_justified=justified,
        steps=log.steps,
        verdict="EXHAUSTED",
    )
    try:
        changed = True
        while changed:
            changed = apply_p2(pc, fl, log)
            changed = gp_propagate(pc, log) or changed
    except ChirotopeConflict as exc:
        key2, _ = sort_with_parity(exc.basis)
        cert.verdict = "CONTRADICTION"
        cert.conflict = Conflict(
            kind=getattr(exc, "kind", "opposite"),
            basis=key2,
            step_a=getattr(exc, "step_a", None),
            step_b=getattr(exc, "step_b", None),
            lam=getattr(exc, "lam", None),
            quad=getattr(exc, "quad", None),
            premises=tuple(getattr(exc, "premises", ())),
        )
        cert.determined = pc.num_determined()
        cert.chirotope = pc
        return cert
    cert.determined = pc.num_determined()
    cert.verdict = "COMPLETED" if None not in pc.signs else "EXHAUSTED"
    cert.chirotope = pc
    return cert
