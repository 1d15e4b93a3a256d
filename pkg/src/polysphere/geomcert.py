"""Exact-arithmetic checks of explicit coordinates against a facet list.

Everything here is sign-of-determinant or rational linear feasibility over
integers, so verdicts are exact and invariant under positive scaling of the
coordinates.  The two main entry points check a 3D diagram (one facet serves
as the outer base cell containing all the others) and a 4D fan given by ray
generators, both against the combinatorics of a facet list.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .chirotope import PartialChirotope
from .complexes import FaceLattice, FacetList, bits, face_lattice
from .ratlp import in_cone, positive_functional


def parse_points(text: str) -> "PointConfiguration":
    """Parse a coordinate file: a `dim <d>` header, then one `v<i> <c1> ...
    <cd>` line per point, integers only, indices forming 0..n-1."""
    dim = None
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if dim is None:
            if len(tokens) != 2 or tokens[0] != "dim":
                raise ValueError(f"line {lineno}: expected 'dim <d>' header")
            dim = int(tokens[1])
            if dim not in (3, 4):
                raise ValueError(f"line {lineno}: dimension must be 3 or 4")
            continue
        if not tokens[0].startswith("v"):
            raise ValueError(f"line {lineno}: expected 'v<i> <coords>'")
        idx = int(tokens[0][1:])
        if idx in seen:
            raise ValueError(f"line {lineno}: duplicate point v{idx}")
        if len(tokens) != dim + 1:
            raise ValueError(f"line {lineno}: expected {dim} coordinates")
        seen[idx] = tuple(int(t) for t in tokens[1:])
    if dim is None:
        raise ValueError("missing 'dim' header")
    if sorted(seen) != list(range(len(seen))):
        raise ValueError("point indices must form a contiguous range from 0")
    return PointConfiguration(dim, tuple(seen[i] for i in range(len(seen))))


@dataclass(frozen=True)
class PointConfiguration:
    dim: int
    points: tuple

    def __post_init__(self):
        if self.dim not in (3, 4):
            raise ValueError("dimension must be 3 or 4")
        for p in self.points:
            if len(p) != self.dim or not all(isinstance(c, int) for c in p):
                raise ValueError("points must be integer vectors of the stated dimension")

    @property
    def n(self) -> int:
        return len(self.points)

    def scaled(self, factor: int) -> "PointConfiguration":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return PointConfiguration(
            self.dim, tuple(tuple(factor * c for c in p) for p in self.points)
        )


def det(rows) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    k = len(a)
    sign = 1
    prev = 1
    for i in range(k - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if a[r][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
            a[r][i] = 0
        prev = a[i][i]
    return sign * a[-1][-1]


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _homog(p) -> tuple:
    return tuple(p) + (1,)


def chirotope_from_points(pc: PointConfiguration, mode: str = "affine") -> PartialChirotope:
    """Fully determined chirotope of the configuration: sign of the
    determinant of each basis, with a homogenizing 1 appended in affine mode
    and raw coordinates in linear mode."""
    if mode == "affine":
        rank = pc.dim + 1
        vecs = [_homog(p) for p in pc.points]
    elif mode == "linear":
        rank = pc.dim
        vecs = [tuple(p) for p in pc.points]
    else:
        raise ValueError("mode must be 'affine' or 'linear'")
    chi = PartialChirotope(pc.n, rank)
    for i, basis in enumerate(chi.bases):
        chi.signs[i] = _sign(det([vecs[v] for v in basis]))
    return chi


# --------------------------------------------------------------------------
# shared sub-checks


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    witness: str = ""


@dataclass(frozen=True)
class GeometryReport:
    kind: str
    checks: tuple

    @property
    def verdict(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_text(self) -> str:
        lines = [f"{self.kind} report"]
        for c in self.checks:
            line = f"  {c.name}: {'pass' if c.ok else 'FAIL'}"
            if c.witness:
                line += f" ({c.witness})"
            lines.append(line)
        lines.append(f"verdict: {'pass' if self.verdict else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _faces_within(lat: FaceLattice, fmask: int) -> set:
    """Vertex sets (as sorted tuples) of the rank-3 faces inside one facet."""
    return {
        tuple(bits(f)) for f in lat.faces_of_rank(3) if f & fmask == f
    }


def _ridge_facets(fl: FacetList, lat: FaceLattice):
    """Each rank-3 face with the indices of the facets containing it."""
    out = []
    for r in lat.faces_of_rank(3):
        idxs = tuple(j for j, f in enumerate(fl.facets) if r & f == r)
        out.append((tuple(bits(r)), idxs))
    return out


def _hull_triangles(members, side_fn):
    """Triangles of `members` whose spanned hyperplane has every other member
    strictly on one side; side_fn(tri, p) gives the exact orientation sign."""
    out = set()
    for tri in combinations(members, 3):
        signs = {side_fn(tri, p) for p in members if p not in tri}
        if 0 not in signs and len(signs) == 1:
            out.add(tri)
    return out


# --------------------------------------------------------------------------
# 3D diagram verification


def verify_diagram(pc: PointConfiguration, fl: FacetList, base: int) -> GeometryReport:
    """Check that integer 3D coordinates realize the facet list as a diagram
    with the given facet as outer base cell: (a) every facet's vertex set is
    in convex position with hull triangles matching the sphere's 2-faces,
    (b) interior ridges strictly separate their two facets, (c) each base
    2-face has all non-incident points strictly on one side, and (d) every
    point lies in the convex hull of the base facet."""
    if pc.dim != 3:
        raise ValueError("diagram verification needs 3D coordinates")
    if pc.n != fl.n:
        raise ValueError("coordinate count differs from the vertex count")
    if not 0 <= base < len(fl.facets):
        raise ValueError("base facet index out of range")
    lat = face_lattice(fl)
    pts = pc.points

    def side(tri, p):
        a, b, c = tri
        return _sign(det([_homog(pts[a]), _homog(pts[b]), _homog(pts[c]), _homog(pts[p])]))

    checks = []

    ok, witness = True, ""
    for j, fmask in enumerate(fl.facets):
        members = tuple(bits(fmask))
        for v in members:
            others = [_homog(pts[u]) for u in members if u != v]
            if in_cone(others, _homog(pts[v])):
                ok, witness = False, f"facet {j}: v{v} not a hull vertex"
                break
        if not ok:
            break
        hull = _hull_triangles(members, side)
        if hull != _faces_within(lat, fmask):
            ok, witness = False, f"facet {j}: hull triangles differ from 2-faces"
            break
    checks.append(Check("facet convex position and hull faces", ok, witness))

    ok, witness = True, ""
    base_mask = fl.facets[base]
    for tri, (g, h) in _ridge_facets(fl, lat):
        tmask = sum(1 << v for v in tri)
        if tmask & base_mask == tmask:
            continue  # base 2-faces are handled by the containment checks
        gsides = {side(tri, p) for p in bits(fl.facets[g]) if p not in tri}
        hsides = {side(tri, p) for p in bits(fl.facets[h]) if p not in tri}
        if not (gsides == {1} and hsides == {-1} or gsides == {-1} and hsides == {1}):
            ok, witness = False, f"ridge {tri} between facets {g} and {h}"
            break
    checks.append(Check("interior ridge separation", ok, witness))

    ok, witness = True, ""
    for tri in sorted(_faces_within(lat, base_mask)):
        signs = {side(tri, p) for p in range(pc.n) if p not in tri}
        if 0 in signs or len(signs) != 1:
            ok, witness = False, f"base 2-face {tri} does not bound all points"
            break
    checks.append(Check("base 2-faces bound every point", ok, witness))

    ok, witness = True, ""
    base_pts = [_homog(pts[v]) for v in bits(base_mask)]
    for v in range(pc.n):
        if not in_cone(base_pts, _homog(pts[v])):
            ok, witness = False, f"v{v} outside the base facet hull"
            break
    checks.append(Check("all points inside the base facet", ok, witness))

    return GeometryReport("diagram", tuple(checks))


# --------------------------------------------------------------------------
# 4D fan verification


def _normal4(u, v, w):
    """Integer normal of the hyperplane spanned by three 4-vectors (zero if
    they are linearly dependent): cofactor expansion of the 3x4 matrix."""
    rows = [u, v, w]
    out = []
    for j in range(4):
        minor = [[r[c] for c in range(4) if c != j] for r in rows]
        out.append((-1) ** j * det(minor))
    return tuple(out)


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def verify_fan(pc: PointConfiguration, fl: FacetList) -> GeometryReport:
    """Check that integer 4D ray generators realize the facet list as a fan:
    (a) each facet spans a pointed cone whose extreme rays are exactly its
    vertices and whose hyperplane faces match the sphere's 2-faces, (b) each
    ridge's linear span strictly separates its two facets, and (c) each ray
    lies in exactly the cones of its incident facets."""
    if pc.dim != 4:
        raise ValueError("fan verification needs 4D coordinates")
    if pc.n != fl.n:
        raise ValueError("coordinate count differs from the vertex count")
    if any(all(c == 0 for c in p) for p in pc.points):
        raise ValueError("fan generators must be nonzero")
    lat = face_lattice(fl)
    pts = pc.points

    def side(tri, p):
        a, b, c = tri
        nrm = _normal4(pts[a], pts[b], pts[c])
        return _sign(_dot(nrm, pts[p]))

    checks = []

    ok, witness = True, ""
    for j, fmask in enumerate(fl.facets):
        members = tuple(bits(fmask))
        gens = [pts[v] for v in members]
        if positive_functional(gens) is None:
            ok, witness = False, f"facet {j}: cone is not pointed"
            break
        bad = next(
            (v for v in members if in_cone([pts[u] for u in members if u != v], pts[v])),
            None,
        )
        if bad is not None:
            ok, witness = False, f"facet {j}: v{bad} is not an extreme ray"
            break
        hull = _hull_triangles(members, side)
        if hull != _faces_within(lat, fmask):
            ok, witness = False, f"facet {j}: cone faces differ from 2-faces"
            break
    checks.append(Check("facet cones pointed with matching faces", ok, witness))

    ok, witness = True, ""
    for tri, (g, h) in _ridge_facets(fl, lat):
        gsides = {side(tri, p) for p in bits(fl.facets[g]) if p not in tri}
        hsides = {side(tri, p) for p in bits(fl.facets[h]) if p not in tri}
        if not (gsides == {1} and hsides == {-1} or gsides == {-1} and hsides == {1}):
            ok, witness = False, f"ridge {tri} between facets {g} and {h}"
            break
    checks.append(Check("ridge separation", ok, witness))

    ok, witness = True, ""
    for v in range(pc.n):
        for j, fmask in enumerate(fl.facets):
            gens = [pts[u] for u in bits(fmask)]
            inside = in_cone(gens, pts[v])
            if inside != bool((fmask >> v) & 1):
                rel = "inside non-incident" if inside else "outside incident"
                ok, witness = False, f"v{v} {rel} cone of facet {j}"
                break
        if not ok:
            break
    checks.append(Check("ray membership matches incidences", ok, witness))

    return GeometryReport("fan", tuple(checks))


# --------------------------------------------------------------------------
# structural report for the halfspace argument


@dataclass(frozen=True)
class EmbeddabilityReport:
    simple_vertices: tuple  # (vertex, facet indices) pairs
    facets_without_simple: tuple
    tetrahedra: tuple  # (facet index, ((2-face, neighbor facet), ...))
    bipyramids: tuple  # (facet index, triangle, apexes)

    def to_text(self) -> str:
        lines = []
        for v, incident in self.simple_vertices:
            facets = ",".join(f"F{j}" for j in incident)
            lines.append(f"simple vertex v{v}: facets {facets}")
        missing = ",".join(f"F{j}" for j in self.facets_without_simple) or "none"
        lines.append(f"facets without a simple vertex: {missing}")
        for j, nbrs in self.tetrahedra:
            parts = "; ".join(
                f"{tuple(t)} -> F{k}" for t, k in nbrs
            )
            lines.append(f"tetrahedron F{j}: neighbors {parts}")
        for j, tri, apexes in self.bipyramids:
            lines.append(
                f"bipyramid F{j}: triangle {tuple(tri)} apexes {tuple(apexes)}"
            )
        return "\n".join(lines) + "\n"


def embeddability_report(fl: FacetList) -> EmbeddabilityReport:
    """Combinatorial facts feeding the halfspace-containment argument: the
    simple vertices with their four facets, facets containing none of them,
    each tetrahedral facet's neighbor across every 2-face, and which
    5-vertex facets are bipyramids (a triangle 2-face-disjoint from two
    apexes, every 2-face being an apex-plus-triangle-edge)."""
    lat = face_lattice(fl)
    simple = []
    simple_set = set()
    for v in range(fl.n):
        incident = tuple(j for j, f in enumerate(fl.facets) if (f >> v) & 1)
        if len(incident) == 4:
            simple.append((v, incident))
            simple_set.add(v)
    without = tuple(
        j for j, f in enumerate(fl.facets)
        if not any((f >> v) & 1 for v in simple_set)
    )
    ridges = _ridge_facets(fl, lat)
    tetra = []
    for j, fmask in enumerate(fl.facets):
        if fmask.bit_count() != 4:
            continue
        nbrs = []
        for tri, idxs in ridges:
            if j in idxs:
                other = idxs[0] if idxs[1] == j else idxs[1]
                nbrs.append((tri, other))
        tetra.append((j, tuple(sorted(nbrs))))
    bipyramids = []
    for j, fmask in enumerate(fl.facets):
        members = tuple(bits(fmask))
        if len(members) != 5:
            continue
        faces = _faces_within(lat, fmask)
        for apexes in combinations(members, 2):
            tri = tuple(v for v in members if v not in apexes)
            edges = list(combinations(tri, 2))
            want = {
                tuple(sorted(e + (a,))) for e in edges for a in apexes
            }
            if faces == want:
                bipyramids.append((j, tri, apexes))
                break
    return EmbeddabilityReport(
        tuple(simple), without, tuple(tetra), tuple(bipyramids)
    )
