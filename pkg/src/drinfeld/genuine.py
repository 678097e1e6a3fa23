"""Verdict engine: can an automorphism move a subgroup onto a congruence one?

A handle is judged along a fixed pipeline.  Cheap arithmetic filters run
first (index divisibility, quasi-level codimension), then the congruence
decision, then positive certificates (index criteria, a composition-factor
obstruction), and finally the corner-map refutation search.  Every verdict
records which rules were consulted, and a Genuine outcome always carries a
certificate that can be rechecked from the stored facts alone.

Outcomes read as statements about the handle's subgroup H inside its
ambient matrix group X:

* ``Genuine``     -- every automorphic image of H is a non-congruence
                     subgroup (and in particular H itself is one).
* ``NotGenuine``  -- some automorphic image is congruence: either H is
                     congruence already, a necessary condition for
                     genuineness fails, or an explicit witness map exists.
* ``Unknown``     -- nothing decisive within the configured budgets.
"""

from dataclasses import dataclass
from math import gcd

from .autos import refutation_to_json, refute_genuineness
from .config import DEFAULT_CONFIG
from .errors import CapExceeded, DomainError
from .fields import DIGIT_CHARS, field
from .fingroup import (
    QuotientGroup,
    composition_factors,
    is_normal,
    is_psl2_order_over,
    prime_factors,
)
from .amalgam import ReductionHom
from .mat2 import diag_mat, poly_ring
from .poly import MonicIdeal, Poly, residue_ring
from .subgroups import (
    SubgroupHandle,
    from_quasilevel_abelian,
    is_congruence,
    principal_congruence_handle,
    quasi_level,
)
from .subspace import iter_subspaces, subspace

__all__ = [
    "Verdict",
    "verdict",
    "verdict_to_json",
    "divisibility_filter",
    "quick_criteria",
    "factor_certificate",
    "factor_certificate_from_quotient",
    "recheck_certificate",
    "facts_lookup",
    "low_index_scan",
    "psl2_order",
    "pgl2_order",
]


def psl2_order(q):
    return q * (q * q - 1) // gcd(2, q - 1)


def pgl2_order(q):
    return q * (q * q - 1)


def _is_prime(n):
    return n >= 2 and prime_factors(n) == [n]


def _field_for_order(q):
    ps = prime_factors(q)
    if len(ps) != 1:
        raise DomainError(f"{q} is not a prime power")
    p = ps[0]
    n = 0
    m = q
    while m > 1:
        m //= p
        n += 1
    return field(p, n)


@dataclass(frozen=True)
class Verdict:
    outcome: str  # "Genuine" | "NotGenuine" | "Unknown"
    reason: str  # identifier of the deciding rule
    certificate: dict | None
    provenance: tuple


def verdict_to_json(v):
    return {
        "outcome": v.outcome,
        "reason": v.reason,
        "certificate": v.certificate,
        "provenance": list(v.provenance),
    }


def divisibility_filter(q, kind, index, normal):
    """Necessary index conditions for genuineness; a miss settles NotGenuine.

    For normal subgroups the ambient kind fixes a divisor the index must
    carry.  For arbitrary subgroups over a prime field, an index below 2p
    forces the normal core's index to divide (2p-1)!, which lacks the p^2
    factor the normal condition demands, so the core (and with it the
    subgroup) cannot be genuine either.
    """
    if normal:
        if kind == "SL":
            required = q * psl2_order(q) if q > 3 else q * q
        else:
            required = q * q * (q * q - 1) if q > 3 else q * q
        if index % required:
            return (
                "normal-index-divisibility",
                {"q": q, "kind": kind, "index": index, "required_divisor": required},
            )
    if _is_prime(q) and index < 2 * q:
        return (
            "small-index-core",
            {"q": q, "kind": kind, "index": index, "bound": 2 * q},
        )
    return None


def quick_criteria(q, kind, index, normal, proper=True, torus_inside=None):
    """First index-based criterion that certifies genuineness, if any.

    Premises are taken at face value; the caller owns their truth.  The
    torus flag records whether the subgroup contains every constant
    diagonal matrix (only consulted in the GL kind).
    """
    m_val = facts_lookup("minimal-proper-index", q=q)
    if kind == "GL":
        if normal and proper and gcd(index, q) == 1 and torus_inside:
            return (
                "coprime-index-with-torus",
                {"q": q, "index": index, "kind": kind, "torus_inside": True},
            )
        if q > 3 and normal and (q - 1) % index and index % psl2_order(q):
            return (
                "missing-simple-order",
                {
                    "q": q,
                    "index": index,
                    "kind": kind,
                    "simple_order": psl2_order(q),
                },
            )
        return None
    if normal and proper and gcd(index, q) == 1:
        return ("coprime-index", {"q": q, "index": index, "kind": kind})
    if q > 3 and normal and proper and index % psl2_order(q):
        return (
            "missing-simple-order",
            {"q": q, "index": index, "kind": kind, "simple_order": psl2_order(q)},
        )
    if q > 3 and proper and index < m_val:
        return (
            "index-below-minimal",
            {"q": q, "index": index, "kind": kind, "minimal_proper_index": m_val},
        )
    return None


def factor_certificate_from_quotient(Q, q, cap):
    """Certificate from a composition factor no congruence image can have.

    Quotients of the ambient group by automorphic images of normal
    congruence subgroups only ever produce cyclic factors of prime order
    or fractional linear factors over extensions of F_q.  A non-cyclic
    factor whose order misses that family is therefore decisive.  The
    check is order-based and sound-negative: a colliding order yields no
    certificate rather than a guess.
    """
    factors = composition_factors(Q, cap=cap)
    family = []
    s = 1
    top = max((f.order for f in factors), default=1)
    while True:
        m = q**s
        o = psl2_order(m)
        family.append(o)
        if o >= top:
            break
        s += 1
    for f in factors:
        if f.kind == "cyclic_prime":
            continue
        if not is_psl2_order_over(q, f.order):
            return (
                "composition-factor",
                {
                    "q": q,
                    "factor_order": f.order,
                    "factor_kind": f.kind,
                    "quotient_order": int(Q.order()),
                    "family_orders_checked": [o for o in family if o <= f.order],
                },
            )
    return None


def factor_certificate(handle, config=DEFAULT_CONFIG):
    """Run the composition-factor obstruction on a normal handle."""
    im = handle.image(config.group_cap)
    sub = handle.intersection(config.group_cap)
    Q = QuotientGroup(handle.target, im, sub)
    return factor_certificate_from_quotient(Q, handle.F.q, config.group_cap)


def recheck_certificate(v):
    """Re-derive a Genuine verdict from its stored certificate facts.

    Returns True when the certificate still justifies the outcome.  Index
    criteria are replayed through quick_criteria; factor certificates are
    replayed against the recorded family orders.
    """
    if v.outcome != "Genuine" or not v.certificate:
        return False
    cert = v.certificate
    if v.reason == "composition-factor":
        q = cert["q"]
        order = cert["factor_order"]
        if cert["factor_kind"] == "cyclic_prime":
            return False
        if is_psl2_order_over(q, order):
            return False
        expected = []
        s = 1
        while True:
            o = psl2_order(q**s)
            if o > order:
                break
            expected.append(o)
            s += 1
        return expected == cert["family_orders_checked"]
    hit = quick_criteria(
        cert["q"],
        cert["kind"],
        cert["index"],
        normal=True,
        proper=True,
        torus_inside=cert.get("torus_inside"),
    )
    return hit is not None and hit[0] == v.reason


def handle_is_normal(handle, config=DEFAULT_CONFIG):
    gens = handle.hom.image_generators()
    return is_normal(handle.target, gens, handle.intersection(config.group_cap))


def diagonal_torus_inside(handle):
    """Does the subgroup contain every invertible constant diagonal matrix?"""
    F = handle.F
    R = poly_ring(F)
    return all(
        handle.contains_matrix(diag_mat(R, a, b))
        for a in F.units()
        for b in F.units()
    )


def _not_genuine(reason, detail, provenance):
    return Verdict("NotGenuine", reason, detail, tuple(provenance))


def verdict(handle, config=DEFAULT_CONFIG):
    """Judge one handle along the full pipeline."""
    prov = []
    index = handle.index_in_domain(config.group_cap)
    if index == 1:
        raise DomainError("the verdict pipeline needs a proper subgroup")
    q = handle.F.q
    kind = handle.kind
    normal = handle_is_normal(handle, config)
    prov.append("normal" if normal else "non-normal")

    if not normal:
        hit = divisibility_filter(q, kind, index, normal=False)
        prov.append(f"divisibility:{hit[0] if hit else 'pass'}")
        if hit:
            return _not_genuine(hit[0], hit[1], prov)
        try:
            rep = is_congruence(handle, config)
            prov.append(f"congruence:{rep.congruence}")
        except CapExceeded:
            rep = None
            prov.append("congruence:cap-skipped")
        if rep is not None and rep.congruence:
            return _not_genuine("is-congruence", None, prov)
        core_handle = SubgroupHandle(
            handle.hom,
            handle.core(config.group_cap),
            name=f"core of {handle.name}" if handle.name else "normal core",
            check=False,
        )
        prov.append("core-reduction")
        inner = verdict(core_handle, config)
        return Verdict(
            inner.outcome,
            inner.reason,
            inner.certificate,
            tuple(prov) + inner.provenance,
        )

    try:
        ql = quasi_level(handle, config)
    except CapExceeded:
        ql = None
    try:
        rep = is_congruence(handle, config)
        prov.append(f"congruence:{rep.congruence}")
    except CapExceeded:
        rep = None
        prov.append("congruence:cap-skipped")
    if rep is not None and rep.congruence:
        return _not_genuine("is-congruence", None, prov)

    div_hit = divisibility_filter(q, kind, index, normal=True)
    prov.append(f"divisibility:{div_hit[0] if div_hit else 'pass'}")
    codim_hit = ql is not None and ql.prime_codim < 2 * handle.F.n
    if ql is None:
        prov.append("codimension:cap-skipped")
    else:
        prov.append(f"codimension:{'low' if codim_hit else 'pass'}")
    torus = diagonal_torus_inside(handle) if kind == "GL" else None
    quick_hit = quick_criteria(
        q, kind, index, normal=True, proper=True, torus_inside=torus
    )
    prov.append(f"quick-criteria:{quick_hit[0] if quick_hit else 'none'}")
    assert not (
        quick_hit and (div_hit or codim_hit)
    ), "a genuineness criterion and a filter both fired on one handle"
    if div_hit:
        return _not_genuine(div_hit[0], div_hit[1], prov)
    if codim_hit:
        return _not_genuine(
            "quasi-level-codimension",
            {"prime_codim": ql.prime_codim, "needed": 2 * handle.F.n},
            prov,
        )
    if rep is None or ql is None:
        return Verdict("Unknown", "cap-exceeded", None, tuple(prov))
    if quick_hit:
        return Verdict("Genuine", quick_hit[0], quick_hit[1], tuple(prov))

    try:
        fc = factor_certificate(handle, config)
        prov.append(f"factor-certificate:{fc[0] if fc else 'none'}")
    except CapExceeded:
        fc = None
        prov.append("factor-certificate:cap-skipped")
    if fc:
        return Verdict("Genuine", fc[0], fc[1], tuple(prov))

    outcome = refute_genuineness(handle, config)
    prov.append(f"refutation:{outcome.status}:{outcome.tried}")
    assert outcome.status != "already_congruence"
    if outcome.status == "refuted":
        return _not_genuine("congruence-witness", refutation_to_json(outcome), prov)
    return Verdict("Unknown", "no-decision", None, tuple(prov))


_MINIMAL_PROPER_INDEX = {2: 2, 3: 3, 4: 5, 5: 5, 7: 7, 8: 9, 9: 6, 11: 11, 13: 14, 16: 17}


def facts_lookup(key, **kw):
    """Reference values used across the verdict rules.

    Keys: minimal-proper-index(q), rank-zero(kind,g,delta,q),
    coordinate-fixed-part(g,delta), noncongruence-minimum(q),
    normal-noncongruence-minimum(kind,q), genuine-minimum-lower-bound(q),
    normal-genuine-minimum-lower-bound(kind,q), psl2-order(q),
    pgl2-order(q).
    """
    if key == "minimal-proper-index":
        q = kw["q"]
        if q in _MINIMAL_PROPER_INDEX:
            return _MINIMAL_PROPER_INDEX[q]
        if q > 11:
            return q + 1
        raise DomainError(f"no minimal proper index tabulated for q={q}")
    if key == "psl2-order":
        return psl2_order(kw["q"])
    if key == "pgl2-order":
        return pgl2_order(kw["q"])
    if key == "rank-zero":
        kind = kw.get("kind", "GL")
        g, delta = kw["g"], kw["delta"]
        if kind == "GL":
            return (g, delta) in {(1, 1), (0, 1), (0, 2), (0, 3)}
        q = kw["q"]
        base = {(0, 1), (0, 2)}
        if q % 2 == 0:
            base |= {(0, 3), (1, 1)}
        return (g, delta) in base
    if key == "coordinate-fixed-part":
        g, delta = kw["g"], kw["delta"]
        n0 = 0
        while delta * n0 < 2 * g - 1:
            n0 += 1
        return {"n0": n0, "dim": n0 * delta + 1 - g}
    if key == "noncongruence-minimum":
        q = kw["q"]
        if q == 2:
            return 2
        raise DomainError(f"no noncongruence minimum tabulated for q={q}")
    if key == "normal-noncongruence-minimum":
        q = kw["q"]
        if kw.get("kind", "SL") != "SL":
            raise DomainError("normal noncongruence minimum tabulated for SL only")
        return q if q <= 3 else psl2_order(q)
    if key == "genuine-minimum-lower-bound":
        q = kw["q"]
        if not _is_prime(q):
            raise DomainError("the genuine minimum bound needs a prime field")
        return 2 * q
    if key == "normal-genuine-minimum-lower-bound":
        q = kw["q"]
        if kw.get("kind", "SL") == "SL":
            return q * psl2_order(q) if q > 3 else q * q
        return q * q * (q * q - 1) if q > 3 else q * q
    raise DomainError(f"unknown fact key: {key}")


def _codim_subspaces(F, d, codim):
    if codim == 1:
        yield from iter_subspaces(F, d, d - 1)
        return
    seen = set()
    for h1 in iter_subspaces(F, d, d - 1):
        for h2 in iter_subspaces(F, d, d - 1):
            if h1 == h2:
                continue
            W = h1.intersect(h2)
            key = W.basis
            if key not in seen:
                seen.add(key)
                yield W


def _span_key(F, bound_degree, lifts, modulus):
    """Canonical label of (span of lifts) + (modulus) below the bound degree."""
    rows = []
    for p in lifts:
        rows.append(tuple(p.coeff(i) for i in range(bound_degree)))
    for i in range(bound_degree - modulus.degree):
        shifted = modulus.coeffs
        row = [0] * bound_degree
        for j, c in enumerate(shifted):
            if i + j < bound_degree:
                row[i + j] = c
        rows.append(tuple(row))
    return subspace(F, bound_degree, rows).basis


def low_index_scan(q, kind="SL", max_index=4, bound=None, config=DEFAULT_CONFIG):
    """Classify every representable handle up to the index and modulus bound.

    Two families are scanned: kernels of abelian translation quotients
    (all quasi-level subspaces of codimension one and two below each
    modulus dividing the bound; prime fields only) and principal
    reduction kernels.  Minima are over the scanned class only; they are
    lower-bound evidence, not global minima.
    """
    F = _field_for_order(q)
    if bound is None:
        raise DomainError("the scan needs a monic modulus bound")
    if not isinstance(bound, MonicIdeal):
        bound = MonicIdeal(bound)
    entries = []
    moduli = [m for m in bound.divisors() if m.gen.degree >= 1]

    def judge(handle, family, modulus, extra=None):
        try:
            v = verdict(handle, config)
            if "congruence:True" in v.provenance:
                cong = True
            elif "congruence:False" in v.provenance:
                cong = False
            else:
                cong = None
            entry = {
                "family": family,
                "modulus": modulus.gen.digits_str(),
                "index": handle.index_in_domain(config.group_cap),
                "congruence": cong,
                "outcome": v.outcome,
                "reason": v.reason,
            }
        except CapExceeded:
            entry = {
                "family": family,
                "modulus": modulus.gen.digits_str(),
                "index": None,
                "congruence": None,
                "outcome": "CapSkipped",
                "reason": "cap-exceeded",
            }
        entries.append({**entry, **(extra or {})})

    if q <= 3 and kind == "SL":
        D = bound.gen.degree
        seen_spans = set()
        for m in moduli:
            d = m.gen.degree
            for codim in (1, 2):
                if q**codim > max_index or codim > d:
                    continue
                for W in _codim_subspaces(F, d, codim):
                    handle = from_quasilevel_abelian(W, m.gen, kind)
                    lifts = [Poly(F, row) for row in W.basis]
                    key = _span_key(field(F.p), D, lifts, m.gen)
                    if key in seen_spans:
                        continue
                    seen_spans.add(key)
                    basis = ["".join(DIGIT_CHARS[x] for x in row) for row in W.basis]
                    judge(handle, "abelian-quotient", m, {"basis": basis})

    for m in moduli:
        hom = ReductionHom(residue_ring(m.gen), kind, cap=config.group_cap)
        try:
            handle = principal_congruence_handle(hom, m, config)
            if handle.index_in_domain(config.group_cap) > max_index:
                continue
        except CapExceeded:
            continue
        judge(handle, "principal-kernel", m)

    entries.sort(
        key=lambda e: (
            e["index"] if e["index"] is not None else 10**9,
            e["family"],
            e["modulus"],
            e["reason"],
        )
    )

    def minimum(pred):
        vals = [e["index"] for e in entries if e["index"] is not None and pred(e)]
        return min(vals) if vals else None

    report = {
        "field": F.label,
        "kind": kind,
        "max_index": max_index,
        "modulus_bound": bound.gen.digits_str(),
        "scope": "scanned-class-minima",
        "entries": entries,
        "minima": {
            "noncongruence": minimum(lambda e: e["congruence"] is False),
            "certified_genuine": minimum(lambda e: e["outcome"] == "Genuine"),
            "undecided": minimum(lambda e: e["outcome"] == "Unknown"),
        },
    }
    return report
