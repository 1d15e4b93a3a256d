"""Symmetry-reduced exhaustive generation of proper facet lists per p-vector.

The search adds facets in weakly decreasing size order, always labeling new
vertices with the smallest unused labels, and rejects completed lists that
repeat an isomorphism class.  Properness ((I1)-(I3): pairwise intersections
in {0,1,3}, triples <= 2, quadruples <= 1) is maintained incrementally.
"""

from __future__ import annotations

import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from itertools import combinations

from .canonical import canonical_bytes
from .complexes import (
    FacetList,
    FacetListError,
    LatticeError,
    PVector,
    face_lattice,
    flag_vector,
    is_2simple,
    is_2simplicial,
    is_eulerian,
)


class BudgetExceededError(RuntimeError):
    """Search ran out of time; ``frontier`` holds the unfinished tasks."""

    def __init__(self, frontier):
        super().__init__("enumeration budget exceeded")
        self.frontier = frontier


def m_range(n: int):
    """Edge-count window 2n <= m <= n(n+3)/4 for a 2s2s sphere on n vertices."""
    if n < 5:
        raise ValueError("need n >= 5")
    return 2 * n, (n * (n + 3)) // 4


@dataclass(frozen=True)
class PVectorCandidate:
    n: int
    m: int
    p: PVector

    def sizes(self):
        """Facet sizes, descending, one entry per facet."""
        out = []
        for i, c in reversed(self.p.nonzero()):
            out.extend([i] * c)
        return out


def _big_facets_feasible(n: int, p: PVector) -> bool:
    """Reject p-vectors whose large facets cannot coexist under (I1)/(I2).

    Facets with a + b >= n + 2 are forced to intersect in exactly 3 vertices;
    triples of such facets can share at most max(0, n + 9 - (a+b+c)) vertices
    (union <= n); truncated inclusion-exclusion (an upper bound after the
    triple term) must still leave room for the largest facet.
    """
    big = []
    for i, c in p.nonzero():
        if 2 * i >= n + 2:
            big.extend([i] * c)
    k = len(big)
    if k < 2:
        return True
    if any(a + b > n + 3 for a, b in combinations(big, 2)):
        return False  # forced intersection of >= 4 vertices violates (I1)
    tri_cap = 0
    for a, b, c in combinations(big, 3):
        t = n + 9 - (a + b + c)
        if t < 0:
            return False  # three facets cannot fit in n vertices
        tri_cap += min(2, t)
    union_upper = sum(big) - 3 * (k * (k - 1) // 2) + tri_cap
    return union_upper >= max(big)


def p_vector_candidates(n: int, m: int):
    """All p-vectors with sum n, weighted sum 2m, p_i = 0 for 2i-4 >= n, and
    passing the large-facet feasibility filter; lexicographic order."""
    lo, hi = m_range(n)
    if not lo <= m <= hi:
        raise ValueError(f"m={m} outside m_range({n}) = ({lo}, {hi})")
    imax = (n + 3) // 2  # 2i-4 >= n forces p_i = 0
    out = []

    def rec(i, left_count, left_weight, acc):
        if i > imax:
            if left_count == 0 and left_weight == 0:
                counts = [0] * (imax + 1)
                for j, c in acc:
                    counts[j] = c
                p = PVector(tuple(counts))
                if _big_facets_feasible(n, p):
                    out.append(PVectorCandidate(n, m, p))
            return
        w = 2 * i - 4
        for c in range(left_count + 1):
            if c * w > left_weight:
                break
            rec(i + 1, left_count - c, left_weight - c * w, acc + [(i, c)])

    rec(4, n, 2 * m, [])
    out.sort(key=lambda cand: cand.p.counts)
    return out


def is_proper(masks):
    """Check (I1)-(I3) on a (partial) facet list.  Returns (ok, witness),
    where the witness is the offending tuple of facet indices."""
    ms = list(masks)
    for i, j in combinations(range(len(ms)), 2):
        if (ms[i] & ms[j]).bit_count() not in (0, 1, 3):
            return False, (i, j)
    for i, j, k in combinations(range(len(ms)), 3):
        if (ms[i] & ms[j] & ms[k]).bit_count() > 2:
            return False, (i, j, k)
    for quad in combinations(range(len(ms)), 4):
        inter = ms[quad[0]]
        for q in quad[1:]:
            inter &= ms[q]
        if inter.bit_count() > 1:
            return False, quad
    return True, None


def _proper_with_new(masks, f):
    """Incremental (I1)-(I3): checks only tuples involving the new facet f."""
    three = []
    for g in masks:
        c = (f & g).bit_count()
        if c not in (0, 1, 3):
            return False
        if c == 3:
            three.append(g)
    for g, h in combinations(three, 2):
        if (f & g & h).bit_count() > 2:
            return False
    for g, h, k in combinations(three, 3):
        if (f & g & h & k).bit_count() > 1:
            return False
    return True


@dataclass
class _Search:
    cand: PVectorCandidate
    deadline: float | None = None
    dedup_depth: int = 4
    results: dict = field(default_factory=dict)
    nodes: int = 0

    def run(self):
        sizes = self.cand.sizes()
        if not sizes:
            return []
        first = (1 << sizes[0]) - 1
        self._seen = [set() for _ in range(self.dedup_depth + 1)]
        vcount = [0] * self.cand.n
        for v in range(sizes[0]):
            vcount[v] = 1
        self._recurse([first], sizes[1:], vcount)
        return [self.results[k] for k in sorted(self.results)]

    # -- candidate generation -------------------------------------------------

    def _candidates(self, facets, used, size):
        """All label-minimal facets of the given size: new labels are exactly
        the next unused ones, and (depth 1 only) the overlap with the fixed
        first facet is a prefix, which is valid up to its stabilizer."""
        n = self.cand.n
        out = []
        max_new = min(size, n - used)
        for new in range(max_new + 1):
            old = size - new
            if old > used:
                continue
            newmask = ((1 << new) - 1) << used
            if len(facets) == 1:
                # overlap with the first facet must be 0, 1 or 3 vertices;
                # any such subset maps to a prefix under the stabilizer
                if old in (0, 1, 3):
                    out.append(((1 << old) - 1) | newmask)
                continue
            for olds in combinations(range(used), old):
                m = newmask
                for v in olds:
                    m |= 1 << v
                out.append(m)
        return out

    # -- pruning (each rule keeps all completions of any surviving node) -----

    def _prune(self, facets, sizes_left, used, vcount):
        n = self.cand.n
        # vertex degree: a vertex of a 2s2s sphere on n vertices lies in at
        # most (n+3)//2 facets (its dual facet has that many vertices at most)
        cap = (n + 3) // 2
        if any(c > cap for c in vcount[:used]):
            return True
        # every vertex ends in >= 4 facets and every remaining facet
        # contributes exactly its size in incidences
        deficit = sum(max(0, 4 - vcount[v]) for v in range(used))
        deficit += 4 * (n - used)
        if sum(sizes_left) < deficit:
            return True
        # 2-face budget: each 3-vertex pairwise intersection is a distinct
        # 2-face ((I2) forbids a triangle in three facets) and f2 = m
        tri = 0
        for a, b in combinations(facets, 2):
            if (a & b).bit_count() == 3:
                tri += 1
        if tri > self.cand.m:
            return True
        # a facet with i vertices has exactly 2i-4 triangle 2-faces
        for i, f in enumerate(facets):
            partners = sum(
                1 for g in facets if g is not f and (f & g).bit_count() == 3
            )
            if partners > 2 * f.bit_count() - 4:
                return True
        return False

    # -- recursion ------------------------------------------------------------

    def _recurse(self, facets, sizes_left, vcount):
        self.nodes += 1
        if self.deadline is not None and self.nodes % 1024 == 0:
            if time.monotonic() > self.deadline:
                raise BudgetExceededError([self.cand])
        used = max(f.bit_length() for f in facets)
        if not sizes_left:
            self._evaluate(facets, used)
            return
        if self._prune(facets, sizes_left, used, vcount):
            return
        depth = len(facets)
        size = sizes_left[0]
        for f in self._candidates(facets, used, size):
            if not _proper_with_new(facets, f):
                continue
            facets.append(f)
            for v in _bit_positions(f):
                vcount[v] += 1
            if depth <= self.dedup_depth:
                u2 = max(used, f.bit_length())
                key = canonical_bytes(u2, facets)
                if key in self._seen[depth]:
                    ok = False
                else:
                    self._seen[depth].add(key)
                    ok = True
            else:
                ok = True
            if ok:
                self._recurse(facets, sizes_left[1:], vcount)
            for v in _bit_positions(f):
                vcount[v] -= 1
            facets.pop()

    def _evaluate(self, facets, used):
        if used != self.cand.n:
            return
        if not is_connected(facets):
            # a disjoint union of spheres passes the Eulerian test; the
            # enumeration targets connected lattices only
            return
        try:
            fl = FacetList(self.cand.n, tuple(facets))
            lattice = face_lattice(fl)
        except (FacetListError, LatticeError):
            return
        if not is_eulerian(lattice)[0]:
            return
        if not (is_2simple(lattice) and is_2simplicial(lattice)):
            return
        fv = flag_vector(lattice)
        if fv.f1 != self.cand.m:
            return
        key = canonical_bytes(fl.n, fl.facets)
        if key not in self.results:
            self.results[key] = _from_canonical(key)


def is_connected(facets) -> bool:
    """Connectivity of the facet graph (facets adjacent iff they share a
    vertex); a sphere's lattice is connected, a disjoint union never is."""
    if not facets:
        return True
    reach = facets[0]
    todo = list(facets[1:])
    grew = True
    while grew:
        grew = False
        rest = []
        for f in todo:
            if f & reach:
                reach |= f
                grew = True
            else:
                rest.append(f)
        todo = rest
    return not todo


def _bit_positions(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _from_canonical(form: bytes) -> FacetList:
    n = form[0]
    masks = [
        int.from_bytes(form[i : i + 8], "big") for i in range(1, len(form), 8)
    ]
    return FacetList(n, tuple(masks))


def find_facet_lists(cand: PVectorCandidate, budget: float | None = None):
    """All 2s2s rank-5 Eulerian facet lists with the given p-vector, one per
    isomorphism class, each emitted in its canonical labeling."""
    deadline = None if budget is None else time.monotonic() + budget
    return _Search(cand, deadline=deadline).run()


@dataclass(frozen=True)
class SphereType:
    facet_list: FacetList
    flag: tuple  # (f0, f1, f2, f3, f02)
    p: PVector
    canonical: bytes


@dataclass(frozen=True)
class ClassificationReport:
    n: int
    status: str  # "COMPLETE" or "PARTIAL"
    types: tuple
    frontier: tuple  # unfinished PVectorCandidates if PARTIAL


def _run_task(cand: PVectorCandidate):
    return cand, [fl.facets for fl in find_facet_lists(cand)]


def classification_tasks(n: int, m: int | None = None):
    lo, hi = m_range(n)
    ms = [m] if m is not None else list(range(lo, hi + 1))
    tasks = []
    for mm in ms:
        tasks.extend(p_vector_candidates(n, mm))
    return tasks


def classify(
    n: int,
    m: int | None = None,
    budget: float = 3600.0,
    jobs: int = 1,
    tasks=None,
) -> ClassificationReport:
    """Run find_facet_lists for every p-vector candidate in range and collect
    the distinct sphere types.  Deterministic output independent of ``jobs``;
    returns a PARTIAL report with the untraversed frontier on budget expiry."""
    if tasks is None:
        tasks = classification_tasks(n, m)
    deadline = None if budget is None else time.monotonic() + budget
    done: dict[bytes, FacetList] = {}
    frontier: list[PVectorCandidate] = []

    if jobs <= 1:
        for i, cand in enumerate(tasks):
            left = None if deadline is None else deadline - time.monotonic()
            if left is not None and left <= 0:
                frontier = list(tasks[i:])
                break
            try:
                for fl in find_facet_lists(cand, budget=left):
                    done[canonical_bytes(fl.n, fl.facets)] = fl
            except BudgetExceededError:
                frontier = list(tasks[i:])
                break
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {pool.submit(_run_task, cand): cand for cand in tasks}
            pending = set(futs)
            while pending:
                left = None if deadline is None else deadline - time.monotonic()
                if left is not None and left <= 0:
                    break
                finished, pending = wait(pending, timeout=left, return_when=FIRST_COMPLETED)
                for fut in finished:
                    cand, facet_tuples = fut.result()
                    for facets in facet_tuples:
                        fl = FacetList(cand.n, facets)
                        done[canonical_bytes(fl.n, fl.facets)] = fl
            for fut in pending:
                fut.cancel()
                frontier.append(futs[fut])
        frontier.sort(key=lambda c: (c.m, c.p.counts))

    types = []
    for key in sorted(done):
        fl = done[key]
        lattice = face_lattice(fl)
        fv = flag_vector(lattice)
        types.append(SphereType(fl, fv.key(), _p_of(fl), key))
    types.sort(key=lambda t: (t.flag, t.canonical))
    status = "PARTIAL" if frontier else "COMPLETE"
    return ClassificationReport(n, status, tuple(types), tuple(frontier))


def _p_of(fl: FacetList) -> PVector:
    from .complexes import p_vector

    return p_vector(fl)


def save_frontier(report: ClassificationReport, path: str):
    with open(path, "w") as fh:
        fh.write("polysphere-frontier v1\n")
        fh.write(f"n {report.n}\n")
        for cand in report.frontier:
            ps = ",".join(str(c) for c in cand.p.counts)
            fh.write(f"task {cand.n} {cand.m} {ps}\n")


def load_frontier(path: str):
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "polysphere-frontier v1":
        raise ValueError("not a frontier file")
    n = None
    tasks = []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split()
        if parts[0] == "n":
            n = int(parts[1])
        elif parts[0] == "task":
            counts = tuple(int(x) for x in parts[3].split(","))
            tasks.append(PVectorCandidate(int(parts[1]), int(parts[2]), PVector(counts)))
    if n is None:
        raise ValueError("frontier file missing vertex count")
    return n, tasks
