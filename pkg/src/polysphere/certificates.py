"""Serialization and independent replay of sign-propagation proofs.

A certificate is a versioned line-oriented text file.  Each inference is one
line `STEP k: chi(i0,...,i4) = s BY <RULE> FROM <step ids> [VIA ...]`, and
the file ends with a verdict line and a determined-sign count.  The replayer
in this module validates every step from its premises using only the stated
rule; it shares no code with the propagation engine, so a certificate that
replays is sound even if the engine that produced it is not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

FORMAT_HEADER = "chirotope proof certificate v1"


class CertificateError(Exception):
    """Malformed certificate text."""


class ReplayError(Exception):
    """A step or the verdict fails validation against the stated rules."""

    def __init__(self, message, step=None):
        prefix = f"step {step}: " if step is not None else ""
        super().__init__(prefix + message)
        self.step = step


# --------------------------------------------------------------------------
# writing


def _fmt_sign(s: int) -> str:
    return {1: "+1", -1: "-1", 0: "0"}[s]


def _fmt_ids(ids) -> str:
    return ",".join(str(i) for i in ids) if ids else "-"


def _fmt_tuple(tup) -> str:
    return ",".join(str(v) for v in tup)


def certificate_to_text(cert) -> str:
    """Render a ProofCertificate as certificate text."""
    lines = [FORMAT_HEADER]
    hdr = f"n={cert.n} rank={cert.rank}"
    if getattr(cert, "base", None) is not None:
        hdr += f" base={cert.base}"
    lines.append(hdr)
    lines.append(
        f"seed={_fmt_tuple(cert.seed_basis)} sign={_fmt_sign(cert.seed_sign)}"
        f" justified={'yes' if cert.seed_justified else 'no'}"
    )
    for k, step in enumerate(cert.steps):
        line = (
            f"STEP {k}: chi({_fmt_tuple(step.basis)}) = {_fmt_sign(step.sign)}"
            f" BY {step.rule} FROM {_fmt_ids(step.premises)}"
        )
        if step.rule == "P1":
            line += f" VIA facet={step.detail[0]}"
        elif step.rule == "P2":
            j, x, y = step.detail
            line += f" VIA facet={j} x={x} y={y}"
        elif step.rule == "GP":
            lam, quad = step.detail
            line += f" VIA lambda={_fmt_tuple(lam)} quad={_fmt_tuple(quad)}"
        elif step.rule == "RIDGE":
            tri, x, y = step.detail
            line += f" VIA tri={_fmt_tuple(tri)} x={x} y={y}"
        lines.append(line)
    c = cert.conflict
    if cert.verdict == "CONTRADICTION":
        if c.kind == "opposite":
            lines.append(
                f"VERDICT: CONTRADICTION basis={_fmt_tuple(c.basis)}"
                f" kind=opposite steps={c.step_a},{c.step_b}"
            )
        else:
            lines.append(
                f"VERDICT: CONTRADICTION basis={_fmt_tuple(c.basis)}"
                f" kind=relation lambda={_fmt_tuple(c.lam)}"
                f" quad={_fmt_tuple(c.quad)} premises={_fmt_ids(c.premises)}"
            )
    else:
        lines.append(f"VERDICT: {cert.verdict}")
    lines.append(f"DETERMINED: {cert.determined}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# parsing


@dataclass(frozen=True)
class ParsedStep:
    basis: tuple
    sign: int
    rule: str
    premises: tuple
    via: dict


@dataclass
class ParsedCertificate:
    n: int
    rank: int
    base: int
    seed_basis: tuple
    seed_sign: int
    seed_justified: bool
    steps: list
    verdict: str
    conflict: dict | None
    determined: int


def _parse_sign(tok: str) -> int:
    if tok in ("+1", "1"):
        return 1
    if tok == "-1":
        return -1
    if tok == "0":
        return 0
    raise CertificateError(f"bad sign {tok!r}")


def _parse_ids(tok: str) -> tuple:
    if tok == "-":
        return ()
    try:
        return tuple(int(t) for t in tok.split(","))
    except ValueError:
        raise CertificateError(f"bad id list {tok!r}") from None


def _parse_kv(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise CertificateError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def parse_certificate(text: str) -> ParsedCertificate:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise CertificateError("missing or unrecognized format header")
    if len(lines) < 4:
        raise CertificateError("truncated certificate")
    hdr = _parse_kv(lines[1].split())
    try:
        n = int(hdr["n"])
        rank = int(hdr["rank"])
        base = int(hdr["base"]) if "base" in hdr else None
    except (KeyError, ValueError):
        raise CertificateError("bad n/rank line") from None
    seed_kv = _parse_kv(lines[2].split())
    try:
        seed_basis = _parse_ids(seed_kv["seed"])
        seed_sign = _parse_sign(seed_kv["sign"])
        seed_justified = seed_kv["justified"] == "yes"
    except KeyError:
        raise CertificateError("bad seed line") from None

    steps = []
    verdict = None
    conflict = None
    determined = None
    for ln in lines[3:]:
        if ln.startswith("STEP "):
            steps.append(_parse_step(ln, len(steps), rank))
        elif ln.startswith("VERDICT: "):
            verdict, conflict = _parse_verdict(ln)
        elif ln.startswith("DETERMINED: "):
            try:
                determined = int(ln[len("DETERMINED: "):])
            except ValueError:
                raise CertificateError("bad determined count") from None
        else:
            raise CertificateError(f"unrecognized line {ln!r}")
    if verdict is None:
        raise CertificateError("missing verdict line")
    if determined is None:
        raise CertificateError("missing determined count")
    return ParsedCertificate(
        n, rank, base, seed_basis, seed_sign, seed_justified,
        steps, verdict, conflict, determined,
    )


def _parse_step(ln: str, expect_k: int, rank: int) -> ParsedStep:
    head, _, rest = ln.partition(": ")
    try:
        k = int(head[len("STEP "):])
    except ValueError:
        raise CertificateError(f"bad step id in {ln!r}") from None
    if k != expect_k:
        raise CertificateError(f"step ids out of order at {ln!r}")
    tokens = rest.split()
    # chi(...) = s BY RULE FROM ids [VIA k=v ...]
    if (
        len(tokens) < 6
        or not tokens[0].startswith("chi(")
        or not tokens[0].endswith(")")
        or tokens[1] != "="
        or tokens[3] != "BY"
        or tokens[5] != "FROM"
    ):
        raise CertificateError(f"malformed step line {ln!r}")
    basis = _parse_ids(tokens[0][4:-1])
    if len(basis) != rank:
        raise CertificateError(f"basis arity mismatch in {ln!r}")
    sign = _parse_sign(tokens[2])
    rule = tokens[4]
    premises = _parse_ids(tokens[6])
    via = {}
    if len(tokens) > 7:
        if tokens[7] != "VIA":
            raise CertificateError(f"malformed step line {ln!r}")
        via = _parse_kv(tokens[8:])
    return ParsedStep(basis, sign, rule, premises, via)


def _parse_verdict(ln: str):
    tokens = ln[len("VERDICT: "):].split()
    if not tokens:
        raise CertificateError("empty verdict")
    verdict = tokens[0]
    if verdict in ("COMPLETED", "EXHAUSTED"):
        return verdict, None
    if verdict != "CONTRADICTION":
        raise CertificateError(f"unknown verdict {verdict!r}")
    kv = _parse_kv(tokens[1:])
    try:
        conflict = {"basis": _parse_ids(kv["basis"]), "kind": kv["kind"]}
        if conflict["kind"] == "opposite":
            conflict["steps"] = _parse_ids(kv["steps"])
        elif conflict["kind"] == "relation":
            conflict["lam"] = _parse_ids(kv["lambda"])
            conflict["quad"] = _parse_ids(kv["quad"])
            conflict["premises"] = _parse_ids(kv["premises"])
        else:
            raise CertificateError(f"unknown conflict kind {kv['kind']!r}")
    except KeyError as exc:
        raise CertificateError(f"verdict missing field {exc}") from None
    return verdict, conflict


# --------------------------------------------------------------------------
# independent replay
#
# Everything below re-derives each conclusion from first principles: sorting
# parities, facet membership, and the three-term relation arithmetic are all
# recomputed locally rather than imported from the propagation engine.


def _parity(tup):
    """(sorted tuple, parity) via transposition count; (None, 0) on repeats."""
    lst = list(tup)
    sign = 1
    for i in range(len(lst)):
        for j in range(len(lst) - 1 - i):
            if lst[j] > lst[j + 1]:
                lst[j], lst[j + 1] = lst[j + 1], lst[j]
                sign = -sign
    if any(lst[i] == lst[i + 1] for i in range(len(lst) - 1)):
        return None, 0
    return tuple(lst), sign


def _via_int(step, key, k):
    try:
        return int(step.via[key])
    except (KeyError, ValueError):
        raise ReplayError(f"{step.rule} step lacks integer {key}=", k) from None


def _via_ids(step, key, k):
    try:
        return tuple(int(t) for t in step.via[key].split(","))
    except (KeyError, ValueError):
        raise ReplayError(f"{step.rule} step lacks id list {key}=", k) from None


def replay(parsed: ParsedCertificate, facet_sets) -> None:
    """Validate every step of a parsed certificate against the facet list
    (a sequence of vertex sets).  Raises ReplayError on the first failure;
    returns None when the whole certificate is valid."""
    n, rank = parsed.n, parsed.rank
    facets = [frozenset(f) for f in facet_sets]
    for f in facets:
        if not all(0 <= v < n for v in f):
            raise ReplayError("facet list does not fit the stated ground set")
    seed_key, seed_par = _parity(parsed.seed_basis)
    if seed_key is None or len(seed_key) != rank:
        raise ReplayError("seed basis is not a valid tuple")
    if parsed.seed_sign not in (1, -1):
        raise ReplayError("seed sign must be nonzero")

    table: dict[tuple, int] = {}
    first_step: dict[tuple, int] = {}
    seen_seed = False
    conflict_at = None
    for k, step in enumerate(parsed.steps):
        if conflict_at is not None:
            raise ReplayError("steps continue past a sign conflict", k)
        if any(not 0 <= v < n for v in step.basis):
            raise ReplayError("basis outside the ground set", k)
        if list(step.basis) != sorted(set(step.basis)):
            raise ReplayError("basis must be strictly increasing", k)
        if any(p >= k or p < 0 for p in step.premises):
            raise ReplayError("premise ids must point to earlier steps", k)
        checker = _RULES.get(step.rule)
        if checker is None:
            raise ReplayError(f"unknown rule {step.rule!r}", k)
        if step.rule == "SEED":
            if seen_seed:
                raise ReplayError("duplicate seed step", k)
            if step.basis != seed_key or step.sign != seed_par * parsed.seed_sign:
                raise ReplayError("seed step disagrees with the header", k)
            seen_seed = True
        else:
            checker(step, k, facets, table, parsed, first_step)
        prev = table.get(step.basis)
        if prev is None:
            table[step.basis] = step.sign
            first_step[step.basis] = k
        elif prev != step.sign:
            conflict_at = (step.basis, first_step[step.basis], k)
        # re-deriving an already known sign is redundant but sound

    _check_verdict(parsed, table, conflict_at, facets)
    if parsed.determined != len(table):
        raise ReplayError(
            f"determined count {parsed.determined} != {len(table)} replayed"
        )


def _check_p1(step, k, facets, table, parsed, first_step):
    if step.sign != 0:
        raise ReplayError("P1 conclusion must be 0", k)
    if step.premises:
        raise ReplayError("P1 takes no premises", k)
    j = _via_int(step, "facet", k)
    if not 0 <= j < len(facets):
        raise ReplayError(f"facet {j} not in the sphere", k)
    if not set(step.basis) <= facets[j]:
        raise ReplayError(f"basis not contained in facet {j}", k)


def _check_p2(step, k, facets, table, parsed, first_step):
    if len(step.premises) != 1:
        raise ReplayError("P2 takes exactly one premise", k)
    j = _via_int(step, "facet", k)
    x = _via_int(step, "x", k)
    y = _via_int(step, "y", k)
    if not 0 <= j < len(facets):
        raise ReplayError(f"facet {j} not in the sphere", k)
    if y not in step.basis:
        raise ReplayError("conclusion basis must contain the moved point", k)
    quad = tuple(v for v in step.basis if v != y)
    if x == y or x in quad:
        raise ReplayError("source point must differ from the conclusion", k)
    if not set(quad) <= facets[j]:
        raise ReplayError(f"shared quadruple not inside facet {j}", k)
    if x in facets[j] or y in facets[j]:
        raise ReplayError("both endpoints must lie outside the facet", k)
    (p,) = step.premises
    prem = parsed.steps[p]
    src_key, src_par = _parity((x,) + quad)
    if prem.basis != src_key:
        raise ReplayError("premise is not the source basis", k)
    if p != first_step.get(src_key):
        raise ReplayError("premise is not the step that set the source", k)
    src_sign = table[src_key]
    _, dst_par = _parity((y,) + quad)
    if step.sign != dst_par * src_par * src_sign:
        raise ReplayError("sign does not transfer across the facet", k)


def _relation_terms(lam, quad):
    a, b, c, d = quad
    pairs = (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c)))
    out = []
    for (x1, y1), (x2, y2) in pairs:
        k1, p1 = _parity(lam + (x1, y1))
        k2, p2 = _parity(lam + (x2, y2))
        out.append(((k1, p1), (k2, p2)))
    return out


def _term_sign(table, term):
    (b1, p1), (b2, p2) = term
    s1, s2 = table.get(b1), table.get(b2)
    if s1 == 0 or s2 == 0:
        return 0
    if s1 is None or s2 is None:
        return None
    return p1 * s1 * p2 * s2


def _check_gp(step, k, facets, table, parsed, first_step):
    lam = _via_ids(step, "lambda", k)
    quad = _via_ids(step, "quad", k)
    rank = parsed.rank
    if len(lam) != rank - 2 or len(quad) != 4:
        raise ReplayError("relation shape does not match the rank", k)
    if len(set(lam) | set(quad)) != rank + 2:
        raise ReplayError("relation elements must be distinct", k)
    terms = _relation_terms(lam, quad)
    tsigns = (1, -1, 1)
    vals = [
        None if (v := _term_sign(table, t)) is None else tsigns[i] * v
        for i, t in enumerate(terms)
    ]
    open_terms = [i for i, v in enumerate(vals) if v is None]
    if len(open_terms) != 1:
        raise ReplayError("relation must have exactly one open term", k)
    i = open_terms[0]
    known = [vals[j] for j in range(3) if j != i]
    if +1 in known and -1 in known:
        raise ReplayError("relation is already satisfied, nothing forced", k)
    need = 0 if known == [0, 0] else -known[0] if known[0] != 0 else -known[1]
    (b1, p1), (b2, p2) = terms[i]
    s1, s2 = table.get(b1), table.get(b2)
    if s1 is not None and s2 is not None:
        raise ReplayError("open term has no undetermined factor", k)
    if s1 is None and s2 is None:
        raise ReplayError("open term has two undetermined factors", k)
    if s1 is None:
        target, tpar, other, opar = b1, p1, s2, p2
    else:
        target, tpar, other, opar = b2, p2, s1, p1
    if target != step.basis:
        raise ReplayError("conclusion is not the open factor", k)
    if need == 0:
        forced = 0
    else:
        # other is nonzero here: a zero factor would have closed the term
        forced = tsigns[i] * need * tpar * opar * other
    if step.sign != forced:
        raise ReplayError("relation forces a different sign", k)
    bases = sorted({b for t in terms for b, _ in t})
    want = tuple(sorted({first_step[b] for b in bases if b in first_step}))
    if tuple(sorted(set(step.premises))) != want:
        raise ReplayError("premises are not the determining steps", k)


def _check_ridge(step, k, facets, table, parsed, first_step):
    if len(step.premises) != 1:
        raise ReplayError("RIDGE takes exactly one premise", k)
    tri = _via_ids(step, "tri", k)
    x = _via_int(step, "x", k)
    y = _via_int(step, "y", k)
    if len(tri) != 3:
        raise ReplayError("ridge must be a triangle", k)
    tset = set(tri)
    holders = [j for j, f in enumerate(facets) if tset <= f]
    if len(holders) != 2:
        raise ReplayError("cited triangle is not a 2-face of the sphere", k)
    if x in tset or y in tset or x == y:
        raise ReplayError("endpoints must be distinct points off the ridge", k)
    g, h = holders
    if parsed.base is not None and tset <= facets[parsed.base]:
        rel = 1  # base-cell 2-face: every other point is on its inner side
    else:
        x_in = [j for j in holders if x in facets[j]]
        y_in = [j for j in holders if y in facets[j]]
        if not x_in or not y_in:
            raise ReplayError("endpoints are not in the ridge's facets", k)
        rel = 1 if x_in == y_in else -1
    if tuple(step.basis) != _parity(tri + (y,))[0]:
        raise ReplayError("conclusion basis must be the ridge plus y", k)
    src_key, src_par = _parity(tri + (x,))
    (p,) = step.premises
    if parsed.steps[p].basis != src_key or p != first_step.get(src_key):
        raise ReplayError("premise is not the step that set the source", k)
    _, dst_par = _parity(tri + (y,))
    if step.sign != dst_par * rel * src_par * table[src_key]:
        raise ReplayError("sign does not transfer across the ridge", k)


_RULES = {
    "P1": _check_p1,
    "P2": _check_p2,
    "GP": _check_gp,
    "RIDGE": _check_ridge,
    "SEED": lambda *a: None,
}


def _check_verdict(parsed, table, conflict_at, facets):
    verdict = parsed.verdict
    if verdict == "CONTRADICTION":
        c = parsed.conflict
        if c is None:
            raise ReplayError("contradiction verdict without conflict data")
        if c["kind"] == "opposite":
            if conflict_at is None:
                raise ReplayError("no two steps force opposite signs")
            basis, a, b = conflict_at
            if c["basis"] != basis or tuple(c["steps"]) != (a, b):
                raise ReplayError("conflict record does not match the steps")
            return
        # kind == "relation": the named relation must be fully determined
        # with all nonzero terms of a single sign
        if conflict_at is not None:
            raise ReplayError("conflict kind mismatch")
        terms = _relation_terms(tuple(c["lam"]), tuple(c["quad"]))
        tsigns = (1, -1, 1)
        vals = []
        for i, t in enumerate(terms):
            v = _term_sign(table, t)
            if v is None:
                raise ReplayError("cited relation is not fully determined")
            vals.append(tsigns[i] * v)
        if all(v == 0 for v in vals) or (+1 in vals and -1 in vals):
            raise ReplayError("cited relation is satisfiable, no conflict")
        return
    if conflict_at is not None:
        raise ReplayError("steps contain a conflict but verdict does not")
    if verdict == "COMPLETED" and len(table) != comb(parsed.n, parsed.rank):
        raise ReplayError("completed verdict with undetermined bases")
    if verdict == "EXHAUSTED" and len(table) == comb(parsed.n, parsed.rank):
        raise ReplayError("exhausted verdict but every basis is determined")


def replay_text(cert_text: str, facet_sets) -> None:
    """Parse and replay certificate text in one call."""
    replay(parse_certificate(cert_text), facet_sets)
