"""Facet lists, face lattices, and counting invariants of polyhedral 3-spheres.

Vertex sets are stored as bitmasks in plain ints (n <= 63), so intersection,
subset and cardinality tests are single-word operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .canonical import canonical_bytes


class FacetListError(ValueError):
    """Structurally invalid facet list; carries a line number when parsing."""


class LatticeError(ValueError):
    pass


class NotGradedError(LatticeError):
    """The intersection closure is not a graded rank-5 lattice."""


class RankOverflowError(LatticeError):
    """The intersection closure contains a chain longer than 5."""


def bits(mask: int):
    """Iterate the set bit positions of a mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertex_set(mask: int) -> frozenset:
    return frozenset(bits(mask))


@dataclass(frozen=True)
class FacetList:
    """Vertex-set system of the facets of a candidate 3-sphere.

    ``facets`` holds one bitmask per facet, in input order.  Facet indices
    used elsewhere (certificates, reports) are positions in this tuple.
    """

    n: int
    facets: tuple

    def __post_init__(self):
        if not 1 <= self.n <= 63:
            raise FacetListError(f"vertex count {self.n} not in 1..63")
        top = (1 << self.n) - 1
        if len(self.facets) < 2:
            raise FacetListError("a facet list needs at least two facets")
        seen = set()
        cover = 0
        for i, f in enumerate(self.facets):
            if f & ~top:
                raise FacetListError(f"facet {i}: vertex index out of range")
            if f.bit_count() < 4:
                raise FacetListError(f"facet {i} has fewer than 4 vertices")
            if f == top:
                raise FacetListError(f"facet {i} equals the whole vertex set")
            if f in seen:
                raise FacetListError(f"facet {i} duplicates an earlier facet")
            seen.add(f)
            cover |= f
        if cover != top:
            missing = sorted(bits(top & ~cover))
            raise FacetListError(f"vertices {missing} appear in no facet")
        for i, f in enumerate(self.facets):
            for j, g in enumerate(self.facets):
                if i != j and f & g == f:
                    raise FacetListError(f"facet {i} is a subset of facet {j}")

    @classmethod
    def from_sets(cls, n: int, facet_sets) -> "FacetList":
        return cls(n, tuple(mask_of(s) for s in facet_sets))

    def facet_vertices(self, j: int) -> tuple:
        return tuple(bits(self.facets[j]))

    def to_sets(self):
        return [sorted(bits(f)) for f in self.facets]

    def to_text(self) -> str:
        lines = [f"n {self.n}"]
        for f in self.facets:
            lines.append(" ".join(str(v) for v in bits(f)))
        return "\n".join(lines) + "\n"

    def relabel(self, perm) -> "FacetList":
        """Apply a vertex permutation: new label of old vertex v is perm[v]."""
        return FacetList(
            self.n, tuple(mask_of(perm[v] for v in bits(f)) for f in self.facets)
        )


def parse_facet_list(text: str) -> FacetList:
    """Parse the facet-list file format: '#' comments, a 'n <N>' header, then
    one ascending space-separated vertex list per line."""
    n = None
    facets = []
    facet_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
                raise FacetListError(f"line {lineno}: expected header 'n <N>'")
            n = int(parts[1])
            continue
        try:
            verts = [int(tok) for tok in line.split()]
        except ValueError:
            raise FacetListError(f"line {lineno}: malformed vertex list") from None
        if verts != sorted(verts) or len(set(verts)) != len(verts):
            raise FacetListError(f"line {lineno}: vertices must be ascending and distinct")
        if any(v < 0 or v >= n for v in verts):
            raise FacetListError(f"line {lineno}: vertex index out of range 0..{n - 1}")
        facets.append(mask_of(verts))
        facet_lines.append(lineno)
    if n is None:
        raise FacetListError("missing 'n <N>' header")
    for i, f in enumerate(facets):
        for j in range(i):
            if facets[j] == f:
                raise FacetListError(f"line {facet_lines[i]}: duplicate facet")
            if facets[j] & f == facets[j] or facets[j] & f == f:
                raise FacetListError(
                    f"line {facet_lines[i]}: facet is in subset relation "
                    f"with the facet on line {facet_lines[j]}"
                )
    try:
        return FacetList(n, tuple(facets))
    except FacetListError as exc:
        raise FacetListError(str(exc)) from None


@dataclass(frozen=True)
class FaceLattice:
    """Graded rank-5 lattice of faces, closed under pairwise intersection.

    ``faces`` is sorted by (rank, mask) and includes the bottom (0) and the
    top (all vertices); ``ranks`` is the parallel rank tuple.
    """

    n: int
    faces: tuple
    ranks: tuple

    @cached_property
    def rank_of(self):
        return dict(zip(self.faces, self.ranks))

    def faces_of_rank(self, r: int):
        return [f for f, rr in zip(self.faces, self.ranks) if rr == r]

    @property
    def top(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def facet_masks(self):
        return tuple(self.faces_of_rank(4))


def _closure(facets) -> set:
    faces = set(facets)
    work = list(facets)
    while work:
        f = work.pop()
        for g in list(faces):
            h = f & g
            if h and h not in faces:
                faces.add(h)
                work.append(h)
    return faces


def face_lattice(fl: FacetList) -> FaceLattice:
    """Close the facet sets under pairwise intersection, adjoin bottom and
    top, and assign ranks by longest chain.  Raises if the result is not a
    graded lattice of rank 5 with singleton atoms and the facets as coatoms.
    """
    top = (1 << fl.n) - 1
    proper = sorted(_closure(fl.facets), key=lambda m: (m.bit_count(), m))
    rank = {0: 0}
    for f in proper:
        rank[f] = 1 + max(
            (rank[g] for g in proper if g & f == g and g != f and g in rank),
            default=0,
        )
    rank[top] = 1 + max(rank[f] for f in proper)

    if rank[top] > 5:
        raise RankOverflowError(f"longest chain has length {rank[top]} > 5")
    if rank[top] != 5:
        raise NotGradedError(f"top has rank {rank[top]}, expected 5")

    all_faces = [0] + proper + [top]
    # graded: every cover relation increases rank by exactly one
    for f in all_faces:
        for g in all_faces:
            if g != f and g & f == g:
                covered = any(
                    h != f and h != g and g & h == g and h & f == h for h in proper
                )
                if not covered and rank[f] != rank[g] + 1:
                    raise NotGradedError(
                        f"cover {sorted(bits(g))} < {sorted(bits(f))} has rank "
                        f"gap {rank[f] - rank[g]}"
                    )

    atoms = [f for f in proper if rank[f] == 1]
    if any(f.bit_count() != 1 for f in atoms) or len(atoms) != fl.n:
        raise NotGradedError("atoms are not exactly the vertex singletons")
    coatoms = {f for f in proper if rank[f] == 4}
    if coatoms != set(fl.facets):
        raise NotGradedError("coatoms are not exactly the facets")

    ordered = sorted(all_faces, key=lambda m: (rank[m], m))
    return FaceLattice(fl.n, tuple(ordered), tuple(rank[m] for m in ordered))


def facet_list_of(lattice: FaceLattice) -> FacetList:
    return FacetList(lattice.n, lattice.facet_masks)


def is_eulerian(lattice: FaceLattice):
    """Full all-intervals Euler condition: every interval [x, y] of length
    >= 1 has equally many elements of even and odd rank.  Returns
    ``(True, None)`` or ``(False, (x, y))`` with the violating interval."""
    faces = lattice.faces
    ranks = lattice.ranks
    nf = len(faces)
    for i in range(nf):
        x, rx = faces[i], ranks[i]
        for j in range(nf):
            y, ry = faces[j], ranks[j]
            if ry - rx < 2 or x & y != x:
                continue
            s = 0
            for k in range(nf):
                z = faces[k]
                if x & z == x and z & y == z:
                    s += -1 if ranks[k] & 1 else 1
            if s:
                return False, (x, y)
    return True, None


@dataclass(frozen=True)
class FlagVector:
    f0: int
    f1: int
    f2: int
    f3: int
    f02: int
    f13: int

    def key(self):
        """The (f0,f1,f2,f3;f02) tuple used to name sphere types."""
        return (self.f0, self.f1, self.f2, self.f3, self.f02)

    def __str__(self):
        return f"({self.f0},{self.f1},{self.f2},{self.f3};{self.f02})"


def flag_vector(lattice: FaceLattice) -> FlagVector:
    by_rank = {r: lattice.faces_of_rank(r) for r in range(6)}
    f = [len(by_rank[r]) for r in (1, 2, 3, 4)]
    f02 = sum(1 for v in by_rank[1] for t in by_rank[3] if v & t == v)
    f13 = sum(1 for e in by_rank[2] for c in by_rank[4] if e & c == e)
    return FlagVector(f[0], f[1], f[2], f[3], f02, f13)


@dataclass(frozen=True)
class PVector:
    """counts[i] = number of facets with exactly i vertices."""

    counts: tuple

    def get(self, i: int) -> int:
        return self.counts[i] if 0 <= i < len(self.counts) else 0

    def nonzero(self):
        return [(i, c) for i, c in enumerate(self.counts) if c]

    def total(self) -> int:
        return sum(self.counts)

    def __str__(self):
        return ",".join(f"p{i}={c}" for i, c in self.nonzero())


def p_vector(fl: FacetList) -> PVector:
    sizes = [f.bit_count() for f in fl.facets]
    counts = [0] * (max(sizes) + 1)
    for s in sizes:
        counts[s] += 1
    return PVector(tuple(counts))


def is_2simplicial(lattice: FaceLattice) -> bool:
    """Every 2-face is a triangle; cross-checked against f02 = 3*f2."""
    direct = all(t.bit_count() == 3 for t in lattice.faces_of_rank(3))
    fv = flag_vector(lattice)
    counted = fv.f02 == 3 * fv.f2
    if direct != counted:
        raise LatticeError("2-simpliciality checks disagree; lattice is corrupt")
    return direct


def is_2simple(lattice: FaceLattice) -> bool:
    """Every edge lies in exactly three facets; cross-checked via f13 = 3*f1."""
    facets = lattice.faces_of_rank(4)
    direct = all(
        sum(1 for c in facets if e & c == e) == 3 for e in lattice.faces_of_rank(2)
    )
    fv = flag_vector(lattice)
    counted = fv.f13 == 3 * fv.f1
    if direct != counted:
        raise LatticeError("2-simplicity checks disagree; lattice is corrupt")
    return direct


def dual_facet_list(lattice: FaceLattice) -> FacetList:
    """Order-reversed lattice as a facet list: new vertices are the old
    facets (in mask order), new facets are the old vertices."""
    coatoms = sorted(lattice.faces_of_rank(4))
    new_facets = []
    for v in range(lattice.n):
        vb = 1 << v
        new_facets.append(mask_of(i for i, c in enumerate(coatoms) if c & vb))
    return FacetList(len(coatoms), tuple(new_facets))


def dual(lattice: FaceLattice) -> FaceLattice:
    return face_lattice(dual_facet_list(lattice))


def canonical_form(fl: FacetList) -> bytes:
    return canonical_bytes(fl.n, fl.facets)


def is_isomorphic(a: FacetList, b: FacetList) -> bool:
    return canonical_form(a) == canonical_form(b)


@dataclass(frozen=True)
class SimpleVertexReport:
    vertices: frozenset  # vertices in exactly 4 facets
    facets_without: frozenset  # indices of facets containing no simple vertex


def simple_vertices(fl: FacetList) -> SimpleVertexReport:
    counts = [0] * fl.n
    for f in fl.facets:
        for v in bits(f):
            counts[v] += 1
    simple = frozenset(v for v in range(fl.n) if counts[v] == 4)
    simple_mask = mask_of(simple)
    without = frozenset(
        j for j, f in enumerate(fl.facets) if not f & simple_mask
    )
    return SimpleVertexReport(simple, without)
