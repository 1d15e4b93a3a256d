"""Biquadratic final polynomials: search and solver-free verification.

For a partial chirotope, every three-term relation whose three products are
determined, nonzero, and leave one product's sign opposed by the other two
forces that product's bracket monomial to strictly dominate each of the
other two in absolute value.  A final polynomial is a positive rational
combination of such strict inequalities whose left and right bracket
multisets cancel exactly (each side of an inequality contributing its two
bracket factors); its existence proves the partial chirotope has no
realization.  The search runs a float LP to locate a candidate multiplier
support and then reproves it with exact rational arithmetic; verification
needs no solver at all.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .chirotope import PartialChirotope, _relation_table, _term_value
from .ratlp import solve_nonneg

FORMAT_HEADER = "bfp certificate v1"

_TSIGNS = (1, -1, 1)


@dataclass(frozen=True)
class BfpInequality:
    """One strict inequality |monomial(lone)| > |monomial(other)| from a
    relation whose lone-signed term must carry the whole magnitude."""

    lam: tuple
    quad: tuple
    lone: int
    other: int


@dataclass(frozen=True)
class BfpCertificate:
    n: int
    rank: int
    entries: tuple  # (BfpInequality, positive Fraction multiplier)


def _terms(n: int, rank: int, lam: tuple, quad: tuple):
    """The three (factor, factor) term descriptors of one relation, from the
    shared cached relation table."""
    table, _ = _relation_table(n, rank)
    # relations are generated in a deterministic order; index by key
    key = (tuple(lam), tuple(quad))
    idx = _terms._index.get((n, rank))
    if idx is None:
        idx = {(l, q): i for i, (l, q, _) in enumerate(table)}
        _terms._index[(n, rank)] = idx
    lam_, quad_, terms = table[idx[key]]
    return [(terms[2 * k], terms[2 * k + 1]) for k in range(3)]


_terms._index = {}


def _factors(term):
    (b1, _), (b2, _) = term
    return (b1, b2)


def _lone_index(signs):
    """Index of the sign opposed by the other two, or None if all equal."""
    s0, s1, s2 = signs
    if s0 == s1 == s2:
        return None
    if s0 == s1:
        return 2
    if s0 == s2:
        return 1
    return 0


def collect_inequalities(pc: PartialChirotope):
    """All strict monomial inequalities implied by relations with three
    determined nonzero products."""
    table, _ = _relation_table(pc.n, pc.rank)
    out = []
    for lam, quad, terms in table:
        signs = []
        for k in range(3):
            v = _term_value(pc, terms[2 * k], terms[2 * k + 1])
            if v is None or v == 0:
                signs = None
                break
            signs.append(_TSIGNS[k] * v)
        if signs is None:
            continue
        lone = _lone_index(signs)
        if lone is None:
            # all three signed terms equal: the relation itself is violated
            continue
        for other in range(3):
            if other != lone:
                out.append(BfpInequality(lam, quad, lone, other))
    return out


def bfp_verify(pc: PartialChirotope, cert: BfpCertificate) -> bool:
    """Solver-free check of a final polynomial: every multiplier positive,
    every inequality re-derived from the partial chirotope, and the weighted
    left and right monomial multisets identical."""
    if not cert.entries:
        return False
    if cert.n != pc.n or cert.rank != pc.rank:
        return False
    balance: dict[tuple, Fraction] = {}  # per bracket (basis)
    for ineq, mult in cert.entries:
        if not isinstance(mult, Fraction) or mult <= 0:
            return False
        if ineq.lone == ineq.other or not 0 <= ineq.lone <= 2 or not 0 <= ineq.other <= 2:
            return False
        try:
            terms = _terms(pc.n, pc.rank, ineq.lam, ineq.quad)
        except KeyError:
            return False
        signs = []
        for k in range(3):
            v = _term_value(pc, terms[k][0], terms[k][1])
            if v is None or v == 0:
                return False
            signs.append(_TSIGNS[k] * v)
        if _lone_index(signs) != ineq.lone:
            return False
        for b in _factors(terms[ineq.lone]):
            balance[b] = balance.get(b, Fraction(0)) + mult
        for b in _factors(terms[ineq.other]):
            balance[b] = balance.get(b, Fraction(0)) - mult
    return all(v == 0 for v in balance.values())


def bfp_search(pc: PartialChirotope) -> BfpCertificate | None:
    """Find a final polynomial for the partial chirotope, or None when the
    multiplier system is infeasible."""
    ineqs = collect_inequalities(pc)
    if not ineqs:
        return None
    bracket_index: dict[tuple, int] = {}
    coords = []  # per inequality: two positive and two negative bracket rows
    for ineq in ineqs:
        terms = _terms(pc.n, pc.rank, ineq.lam, ineq.quad)
        pos = [bracket_index.setdefault(b, len(bracket_index))
               for b in _factors(terms[ineq.lone])]
        neg = [bracket_index.setdefault(b, len(bracket_index))
               for b in _factors(terms[ineq.other])]
        coords.append((tuple(pos), tuple(neg)))

    status, supports = _float_support(coords, len(bracket_index), len(ineqs))
    if status == "infeasible":
        # a false infeasibility verdict here could only suppress a proof,
        # never fabricate one: returned certificates are always re-verified
        return None
    if status == "ok":
        seen = set()
        smallest = None
        for support in supports:
            key = tuple(support)
            if key in seen:
                continue
            seen.add(key)
            cert = _nullspace_candidate(pc, ineqs, coords, support)
            if cert is None and len(support) <= _EXACT_SUPPORT_CAP:
                cert = _exact_on_support(pc, ineqs, coords, support)
            if cert is not None:
                return cert
            if smallest is None or len(support) < len(smallest):
                smallest = support
        # every sampled vertex was too degenerate for reconstruction; one
        # bounded exact attempt on the smallest support, then give up rather
        # than open-endedly eliminating over all inequalities
        if smallest is not None and len(smallest) <= _EXACT_SUPPORT_CAP:
            return _exact_on_support(pc, ineqs, coords, smallest)
        return None
    # no float solver available: decide exactly
    return _exact_on_support(pc, ineqs, coords, list(range(len(ineqs))))


_EXACT_SUPPORT_CAP = 80
_VERTEX_TRIES = 6


def _support_matrix(coords, support):
    """Dense integer balance matrix restricted to the support columns, with
    one row per bracket that appears there."""
    row_ids = sorted({r for c in support for part in coords[c] for r in part})
    row_pos = {r: i for i, r in enumerate(row_ids)}
    mat = [[0] * len(support) for _ in row_ids]
    for j, c in enumerate(support):
        pos, neg = coords[c]
        for r in pos:
            mat[row_pos[r]][j] += 1
        for r in neg:
            mat[row_pos[r]][j] -= 1
    return mat


def _nullspace_candidate(pc, ineqs, coords, support):
    """A vertex support carries a one-dimensional nullspace; compute its
    exact rational generator by Gaussian elimination modulo several primes
    followed by Chinese remaindering and rational reconstruction.  Every
    candidate is gated through bfp_verify, so a reconstruction failure can
    only fall through, never mislead."""
    mat = _support_matrix(coords, support)
    k = len(support)
    residues = None  # per-column CRT residue of the normalized generator
    modulus = 1
    shape = None  # (pivot columns, free column) agreed on by all primes
    for p in _PRIMES:
        sol = _nullspace_mod_p(mat, p)
        if sol is None:
            continue  # unlucky prime: rank dropped or nullity > 1
        cols, vec = sol
        if shape is None:
            shape = cols
        elif shape != cols:
            continue
        if residues is None:
            residues = vec
            modulus = p
        else:
            residues = [_crt(a, modulus, b, p) for a, b in zip(residues, vec)]
            modulus *= p
        y = _reconstruct_vector(residues, modulus)
        if y is None:
            continue
        if any(v <= 0 for v in y):
            continue  # misreconstruction or a genuinely non-positive generator
        entries = tuple((ineqs[c], y[j]) for j, c in enumerate(support))
        cert = BfpCertificate(pc.n, pc.rank, entries)
        if bfp_verify(pc, cert):
            return cert
    return None


_PRIMES = (33554393, 33554383, 33554371, 33554347, 33554341,
           33554317, 33554291, 33554279, 33554269, 33554249)


def _nullspace_mod_p(mat, p):
    """Row-reduce the integer matrix mod p; if the nullspace is exactly
    one-dimensional, return (pivot structure, generator normalized to 1 at
    the free column), else None."""
    try:
        import numpy as np
    except ImportError:
        return None
    M = np.array(mat, dtype=np.int64) % p
    m, k = M.shape
    pivots = []
    pr = 0
    for col in range(k):
        nz = np.nonzero(M[pr:, col])[0]
        if nz.size == 0:
            continue
        r = pr + int(nz[0])
        if r != pr:
            M[[pr, r]] = M[[r, pr]]
        inv = pow(int(M[pr, col]), p - 2, p)
        M[pr] = M[pr] * inv % p
        rows = np.nonzero(M[:, col])[0]
        rows = rows[rows != pr]
        if rows.size:
            M[rows] = (M[rows] - np.outer(M[rows, col], M[pr])) % p
        pivots.append((pr, col))
        pr += 1
        if pr == m:
            break
    pivot_cols = [c for _, c in pivots]
    free = [c for c in range(k) if c not in set(pivot_cols)]
    if len(free) != 1:
        return None
    fc = free[0]
    vec = [0] * k
    vec[fc] = 1
    for r, c in pivots:
        vec[c] = int(-M[r, fc]) % p
    return (tuple(pivot_cols), fc), vec


def _crt(a, m, b, p):
    """Residue modulo m*p agreeing with a mod m and b mod p."""
    return (a + (b - a) * pow(m % p, p - 2, p) % p * m) % (m * p)


def _reconstruct_vector(residues, modulus):
    """Wang rational reconstruction of every coordinate, or None."""
    out = []
    for a in residues:
        q = _rational_reconstruct(a, modulus)
        if q is None:
            return None
        out.append(q)
    return out


def _rational_reconstruct(a, m):
    """The unique fraction n/d with |n|, d <= sqrt(m/2) congruent to a mod m,
    or None if none exists."""
    from math import isqrt

    r0, r1 = m, a % m
    t0, t1 = 0, 1
    bound = isqrt(m // 2)
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    frac = Fraction(r1, t1)
    return frac if (frac.numerator - a * frac.denominator) % m == 0 else None


def _float_support(coords, n_rows, n_cols):
    """Approximate multiplier supports via LPs over floats.  Returns one of
    ("ok", iterator of column supports), ("infeasible", None), or
    ("unavailable", None).  Successive supports come from re-solving the
    normalized system under fresh random objectives, so a degenerate vertex
    on one draw does not doom the reconstruction."""
    try:
        from scipy.optimize import linprog
        from scipy.sparse import csc_matrix
    except ImportError:
        return "unavailable", None
    rows, cols, vals = [], [], []
    for c, (pos, neg) in enumerate(coords):
        for r in pos:
            rows.append(r)
            cols.append(c)
            vals.append(1.0)
        for r in neg:
            rows.append(r)
            cols.append(c)
            vals.append(-1.0)
    a_eq = csc_matrix((vals, (rows, cols)), shape=(n_rows, n_cols))
    b_eq = [0.0] * n_rows
    # maximize the multiplier sum over the box [0, 1]^n: the system has a
    # nonzero solution exactly when the optimum is positive, and the bounded
    # problem is always feasible, which HiGHS handles far more gracefully
    # than an infeasible equality form
    obj = [-1.0] * n_cols
    res = linprog(obj, A_eq=a_eq, b_eq=b_eq, bounds=(0, 1), method="highs-ipm")
    if not res.success:
        res = linprog(obj, A_eq=a_eq, b_eq=b_eq, bounds=(0, 1), method="highs")
        if not res.success:
            return "unavailable", None
    if -res.fun < 1e-7:
        return "infeasible", None
    # re-solve the (now known feasible) normalized form with simplex for
    # vertex solutions, whose supports carry the exact reconstruction
    ones = csc_matrix(([1.0] * n_cols, ([0] * n_cols, range(n_cols))), shape=(1, n_cols))
    from scipy.sparse import vstack

    a_norm = vstack([a_eq, ones], format="csc")

    def vertex_supports():
        rng = random.Random(0x5EED)
        for attempt in range(_VERTEX_TRIES):
            if attempt == 0:
                c = [0.0] * n_cols
            else:
                c = [rng.uniform(0.5, 1.5) for _ in range(n_cols)]
            sol = linprog(c, A_eq=a_norm, b_eq=b_eq + [1.0],
                          bounds=(0, None), method="highs-ds")
            if sol.success:
                yield [j for j in range(n_cols) if sol.x[j] > 1e-9]

    return "ok", vertex_supports()


def _exact_on_support(pc, ineqs, coords, support):
    """Exact rational feasibility restricted to candidate columns; returns a
    verified certificate or None."""
    if not support:
        return None
    row_ids = sorted({r for c in support for part in coords[c] for r in part})
    row_pos = {r: i for i, r in enumerate(row_ids)}
    m = len(row_ids) + 1
    A = [[Fraction(0)] * len(support) for _ in range(m)]
    for j, c in enumerate(support):
        pos, neg = coords[c]
        for r in pos:
            A[row_pos[r]][j] += 1
        for r in neg:
            A[row_pos[r]][j] -= 1
        A[m - 1][j] = Fraction(1)
    b = [Fraction(0)] * (m - 1) + [Fraction(1)]
    sol = solve_nonneg(A, b)
    if sol is None:
        return None
    entries = tuple(
        (ineqs[c], q) for c, q in zip(support, sol) if q > 0
    )
    cert = BfpCertificate(pc.n, pc.rank, entries)
    return cert if bfp_verify(pc, cert) else None


# --------------------------------------------------------------------------
# serialization


def bfp_to_text(cert: BfpCertificate) -> str:
    lines = [FORMAT_HEADER, f"n={cert.n} rank={cert.rank}"]
    for ineq, mult in cert.entries:
        lam = ",".join(map(str, ineq.lam))
        quad = ",".join(map(str, ineq.quad))
        lines.append(
            f"INEQ lambda={lam} quad={quad} lone={ineq.lone}"
            f" other={ineq.other} multiplier={mult}"
        )
    return "\n".join(lines) + "\n"


def parse_bfp(text: str) -> BfpCertificate:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ValueError("missing or unrecognized bfp header")
    hdr = dict(tok.split("=", 1) for tok in lines[1].split())
    n = int(hdr["n"])
    rank = int(hdr["rank"])
    entries = []
    for ln in lines[2:]:
        if not ln.startswith("INEQ "):
            raise ValueError(f"unrecognized line {ln!r}")
        kv = dict(tok.split("=", 1) for tok in ln[5:].split())
        ineq = BfpInequality(
            lam=tuple(int(t) for t in kv["lambda"].split(",")),
            quad=tuple(int(t) for t in kv["quad"].split(",")),
            lone=int(kv["lone"]),
            other=int(kv["other"]),
        )
        entries.append((ineq, Fraction(kv["multiplier"])))
    return BfpCertificate(n, rank, tuple(entries))


# --------------------------------------------------------------------------
# partial chirotope serialization (for bundling search artifacts)


def chirotope_to_text(pc: PartialChirotope) -> str:
    lines = ["partial chirotope v1", f"n={pc.n} rank={pc.rank}"]
    for basis, sign in zip(pc.bases, pc.signs):
        if sign is not None:
            b = ",".join(map(str, basis))
            s = {1: "+1", -1: "-1", 0: "0"}[sign]
            lines.append(f"chi({b}) = {s}")
    return "\n".join(lines) + "\n"


def parse_chirotope(text: str) -> PartialChirotope:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "partial chirotope v1":
        raise ValueError("missing or unrecognized chirotope header")
    hdr = dict(tok.split("=", 1) for tok in lines[1].split())
    pc = PartialChirotope(int(hdr["n"]), int(hdr["rank"]))
    for ln in lines[2:]:
        if not (ln.startswith("chi(") and " = " in ln):
            raise ValueError(f"unrecognized line {ln!r}")
        inner, _, stok = ln.partition(" = ")
        basis = tuple(int(t) for t in inner[4:-1].split(","))
        pc.set_sorted(basis, {"+1": 1, "1": 1, "-1": -1, "0": 0}[stok])
    return pc
