"""Finite-index subgroups given as preimages of finite subgroups.

A subgroup handle is a pair (h, U): a homomorphism h from the rank-two
matrix group over F_q[t] to a finite group, together with a subgroup U of
the target, standing for the preimage of U under h.  Everything computed
here reduces questions about the infinite preimage to exact finite
calculations: the translation quasi-level, the largest ideal it contains,
and whether the preimage contains the kernel of reduction modulo that
ideal.
"""

from dataclasses import dataclass
from functools import reduce
from math import lcm

import numpy as np

from .amalgam import (
    ReductionHom,
    TableHom,
    hom_from_json,
    hom_to_json,
    t_power_cycle,
)
from .config import DEFAULT_CONFIG
from .errors import CapExceeded, DomainError
from .fields import DIGIT_CHARS, field, field_from_label
from .fingroup import (
    AdditiveQuotientGroup,
    ProductGroup,
    closure,
    core_in,
    derived_subgroup,
    small_generating_set,
)
from .matgroups import ResidueMatrixGroup, mat_code
from .mat2 import Mat2, diag_mat, poly_ring, translation, weyl
from .poly import (
    MonicIdeal,
    Poly,
    poly_from_string,
    poly_gcd,
    residue_ring,
    t_power,
)
from .subspace import SubspaceDesc, subspace


def prime_coordinates(F, a, modulus):
    """Coordinates of a mod modulus over the prime field.

    The residue ring modulo a degree-d modulus is a vector space of
    dimension n*d over F_p; coefficient i contributes digits at positions
    i*n .. i*n + n - 1.
    """
    r = a % modulus
    out = []
    for i in range(modulus.degree):
        c = r.coeffs[i] if i < len(r.coeffs) else 0
        out.extend(F.to_digits(c))
    return tuple(out)


def prime_basis_polys(F, modulus):
    """Polynomials mapping to the standard prime-field basis."""
    out = []
    for i in range(modulus.degree):
        for k in range(F.n):
            out.append(Poly(F, [0] * i + [F.p**k]))
    return out


def largest_ideal_inside(F, conductor, W):
    """Largest ideal whose image mod the conductor lies in the subspace.

    Every ideal of F_q[t] contained in an additive set that already
    contains the conductor ideal has generator dividing the conductor, so
    scanning monic divisors is exhaustive.  The passing divisors are
    closed under ideal sums, hence their gcd generates the largest one.
    """
    f = conductor.gen
    winners = []
    for ideal in conductor.divisors():
        g = ideal.gen
        ok = True
        for i in range(f.degree):
            for k in range(F.n):
                a = g * Poly(F, [0] * i + [F.p**k])
                if not W.contains(prime_coordinates(F, a, f)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            winners.append(g)
    if not winners:
        raise DomainError("no divisor of the conductor passed; conductor inconsistent")
    return MonicIdeal(reduce(poly_gcd, winners))


@dataclass(frozen=True)
class QuasiLevel:
    """Translation membership set of a preimage subgroup.

    W is the set of residues a mod conductor whose translation matrix maps
    into the normal core of the handle, recorded as a subspace over the
    prime field.  The level is the largest ideal contained in the set.
    """

    F: object
    conductor: MonicIdeal
    W: SubspaceDesc
    level: MonicIdeal
    core_size: int

    def contains(self, a):
        return self.W.contains(prime_coordinates(self.F, a, self.conductor.gen))

    @property
    def prime_dim(self):
        return self.W.dim

    @property
    def prime_codim(self):
        return self.W.codim

    def is_ideal(self):
        """True when the quasi-level equals its own level ideal."""
        expected = self.F.n * (self.conductor.gen.degree - self.level.gen.degree)
        return self.W.dim == expected

    def index_bound(self):
        """Size of the translation quotient: p to the prime codimension."""
        return self.F.p**self.W.codim


def ql_to_json(ql):
    return {
        "field": ql.F.label,
        "conductor": ql.conductor.gen.digits_str(),
        "level": ql.level.gen.digits_str(),
        "core_size": ql.core_size,
        "basis": ["".join(DIGIT_CHARS[x] for x in row) for row in ql.W.basis],
    }


def ql_from_json(data):
    F = field_from_label(data["field"])
    Fp = field(F.p)
    cond = MonicIdeal(poly_from_string(F, data["conductor"]))
    n = F.n * cond.gen.degree
    rows = []
    for row in data["basis"]:
        if len(row) != n:
            raise DomainError("basis row length does not match the conductor")
        rows.append(tuple(DIGIT_CHARS.index(ch) for ch in row))
    W = subspace(Fp, n, rows)
    level = MonicIdeal(poly_from_string(F, data["level"]))
    return QuasiLevel(F, cond, W, level, int(data["core_size"]))


class SubgroupHandle:
    """A homomorphism h plus a subgroup U of its finite target.

    Stands for the preimage of U under h inside the domain matrix group.
    The subgroup array is validated to be closed; the effective subgroup
    is the intersection of U with the image of h.
    """

    def __init__(self, hom, subgroup, name="", check=True):
        self.hom = hom
        arr = np.unique(np.asarray(subgroup, dtype=np.int64))
        if arr.size == 0:
            raise DomainError("a subgroup needs at least the identity")
        if check:
            small_generating_set(self.target, arr)
        self.subgroup = arr
        self.name = name
        self._image = None

    @property
    def target(self):
        return self.hom.target

    @property
    def F(self):
        return self.hom.F

    @property
    def kind(self):
        return self.hom.kind

    def image(self, cap=None):
        if self._image is None:
            self._image = self.hom.image_elements(cap)
        return self._image

    def intersection(self, cap=None):
        return np.intersect1d(self.subgroup, self.image(cap))

    def index_in_domain(self, cap=None):
        im = self.image(cap)
        inter = self.intersection(cap)
        if im.size % inter.size:
            raise DomainError("intersection with the image is not a subgroup")
        return im.size // inter.size

    def core(self, cap=None):
        """Largest subgroup of U meeting the image that the image normalizes."""
        gens = self.hom.image_generators()
        return core_in(self.target, gens, self.intersection(cap))

    def contains_matrix(self, m):
        code = self.hom.eval_matrix(m)
        i = np.searchsorted(self.subgroup, code)
        return i < self.subgroup.size and int(self.subgroup[i]) == code

    def __repr__(self):
        label = self.name or f"{self.subgroup.size} target elements"
        return f"SubgroupHandle({self.kind}2 over {self.F.label}, {label})"


def handle_to_json(handle):
    return {
        "hom": hom_to_json(handle.hom),
        "subgroup": [int(x) for x in handle.subgroup],
        "name": handle.name,
    }


def handle_from_json(data):
    return SubgroupHandle(
        hom_from_json(data["hom"]),
        data["subgroup"],
        name=data.get("name", ""),
    )


def quasi_level(handle, config=DEFAULT_CONFIG):
    """Quasi-level of the handle: residues whose translation lies in the core.

    The translation image map factors through the conductor, and is
    additive, so the quasi-level is a subspace over the prime field of the
    residue ring modulo the conductor.  It is found by enumerating the
    span of the prime-basis translation images and intersecting with the
    normal core of the handle's subgroup.
    """
    hom = handle.hom
    G = handle.target
    F = hom.F
    core = handle.core(cap=config.group_cap)
    f = hom.conductor.gen
    nd = F.n * f.degree
    total = F.p**nd
    if total > config.enum_cap:
        raise CapExceeded(
            f"quasi-level enumeration needs {total} residues, above the cap {config.enum_cap}"
        )
    imgs = [hom.translation_image(b) for b in prime_basis_polys(F, f)]
    arr = np.array([G.identity_code()], dtype=np.int64)
    for img in imgs:
        parts = []
        pw = G.identity_code()
        for _ in range(F.p):
            parts.append(G.op(arr, np.int64(pw)))
            pw = G.mul(pw, img)
        arr = np.concatenate(parts)
    idx = np.nonzero(np.isin(arr, core))[0]
    powers = F.p ** np.arange(nd, dtype=np.int64)
    digits = (idx[:, None] // powers) % F.p if nd else np.zeros((idx.size, 0), dtype=np.int64)
    W = subspace(field(F.p), nd, [tuple(int(x) for x in row) for row in digits])
    if F.p**W.dim != idx.size:
        raise DomainError("membership set is not additively closed")
    level = largest_ideal_inside(F, hom.conductor, W)
    return QuasiLevel(F, hom.conductor, W, level, int(core.size))


def domain_generator_matrices(F, kind, degree_bound):
    """Generators of the domain group with translation degrees below the bound."""
    R = poly_ring(F)
    mats = [weyl(R)]
    for i in range(degree_bound):
        for c in F.units():
            mats.append(translation(R, Poly(F, [0] * i + [c])))
    if kind == "GL" and F.q > 2:
        mats.append(diag_mat(R, F.multiplicative_generator(), 1))
    return mats


def _translation_degree_bound(hom, other):
    pre1, cyc1 = hom.translation_period()
    pre2, cyc2 = other.translation_period()
    return max(pre1, pre2) + lcm(cyc1, cyc2)


def sl_part_image(hom, config=DEFAULT_CONFIG):
    """Image of the determinant-one part of the domain group."""
    pre, cyc = hom.translation_period()
    mats = domain_generator_matrices(hom.F, "SL", pre + cyc)
    codes = [hom.eval_matrix(m) for m in mats]
    return closure(hom.target, codes, cap=config.group_cap)


def congruence_image(hom, ideal, config=DEFAULT_CONFIG):
    """Image under h of the kernel of reduction modulo the ideal.

    Computed by closing the paired images (h(g), g mod ideal) of the
    domain generators inside the direct product and slicing at the
    identity in the second coordinate.  Periodicity of translation images
    makes finitely many generators enough.
    """
    if ideal.is_zero():
        raise DomainError("reduction modulo the zero ideal is not finite")
    if ideal.is_unit_ideal():
        return sl_part_image(hom, config)
    S = residue_ring(ideal.gen)
    pi = ReductionHom(S, hom.kind, cap=config.group_cap)
    P0 = ProductGroup(hom.target, pi.target)
    bound = _translation_degree_bound(hom, pi)
    pairs = []
    for m in domain_generator_matrices(hom.F, hom.kind, bound):
        pairs.append(int(P0.pack(np.int64(hom.eval_matrix(m)), np.int64(pi.eval_matrix(m)))))
    P = closure(P0, pairs, cap=config.group_cap)
    return P0.first_factor_slice(P)


@dataclass
class CongruenceReport:
    congruence: bool
    quasi_level: QuasiLevel
    image_size: int
    witness: int | None

    @property
    def level(self):
        return self.quasi_level.level


def report_to_json(report):
    return {
        "congruence": report.congruence,
        "quasi_level": ql_to_json(report.quasi_level),
        "image_size": report.image_size,
        "witness": report.witness,
    }


def is_congruence(handle, config=DEFAULT_CONFIG):
    """Decide whether the preimage contains a full reduction kernel.

    The preimage contains the kernel of reduction modulo some nonzero
    ideal exactly when it contains the one at its own level, so a single
    image computation settles the question.  A witness code outside U
    certifies the negative answer.
    """
    ql = quasi_level(handle, config)
    E = congruence_image(handle.hom, ql.level, config)
    outside = np.setdiff1d(E, handle.subgroup)
    if outside.size:
        return CongruenceReport(False, ql, int(E.size), int(outside[0]))
    return CongruenceReport(True, ql, int(E.size), None)


def principal_congruence_handle(hom, ideal, config=DEFAULT_CONFIG, name=""):
    """Handle for the preimage of the image of the reduction kernel."""
    U = congruence_image(hom, ideal, config)
    return SubgroupHandle(hom, U, name=name, check=False)


def scalar_congruence_handle(modulus, kind="SL", config=DEFAULT_CONFIG):
    """Matrices reducing to a scalar modulo the given monic polynomial."""
    R = residue_ring(modulus)
    hom = ReductionHom(R, kind, cap=config.group_cap)
    codes = []
    for u in R.units():
        if kind == "SL" and R.mul(u, u) != R.from_field(1):
            continue
        codes.append(int(mat_code(Mat2(R, u, 0, 0, u))))
    return SubgroupHandle(hom, codes, name=f"scalar mod {modulus.digits_str()}")


def abelianized_constant_class(F):
    """Class map of the constant determinant-one group onto F_q, q <= 3.

    Sends the upper translation by c to c; exists only when the constant
    group has an abelian quotient of size q, which fails from q = 4 on.
    """
    if F.q > 3:
        raise DomainError("the constant group is perfect for q above 3")
    G0 = ResidueMatrixGroup(residue_ring(t_power(F, 1)), "SL")
    elems = G0.elements()
    D = derived_subgroup(G0, elems)
    t1 = int(mat_code(translation(G0.R, G0.R.from_field(1))))
    t1_inv = G0.inv(t1)
    classes = {}
    for code in elems:
        x = int(code)
        theta = None
        y = x
        for k in range(F.q):
            if np.isin(np.int64(y), D):
                theta = k
                break
            y = G0.mul(y, t1_inv)
        if theta is None:
            raise DomainError("constant class map failed; quotient is not cyclic of size q")
        a, b, c, d = (int(v) for v in G0.decode(x))
        classes[(a, b, c, d)] = theta
    return classes


def from_quasilevel_abelian(W, modulus, kind="SL"):
    """Handle whose quasi-level is W plus the ideal of the modulus, q <= 3.

    Builds the homomorphism onto the additive quotient of the residue ring
    by W that sends the translation by a to the class of a and constants
    to their abelianized class, then takes the preimage of zero.
    """
    F = W.F
    if kind != "SL":
        raise DomainError("abelian translation quotients need the determinant-one group")
    if F.q > 3:
        raise DomainError("no such abelian quotient exists for q above 3")
    if W.ambient_dim != modulus.degree:
        raise DomainError("ambient dimension must match the modulus degree")
    R = residue_ring(modulus)
    target = AdditiveQuotientGroup(W)

    def class_code(a):
        r = a % modulus
        vec = tuple(
            r.coeffs[i] if i < len(r.coeffs) else 0 for i in range(modulus.degree)
        )
        return int(target.vector_to_code(vec))

    pre, cyc, _ = t_power_cycle(R)
    pre_tables = []
    cyc_tables = []
    for i in range(pre + cyc):
        table = tuple(class_code(Poly(F, [0] * i + [c])) for c in range(F.q))
        (pre_tables if i < pre else cyc_tables).append(table)
    classes = abelianized_constant_class(F)
    const_table = {
        key: class_code(Poly(F, [theta])) for key, theta in classes.items()
    }
    hom = TableHom(F, "SL", target, const_table, pre_tables, cyc_tables)
    return SubgroupHandle(
        hom, [target.identity_code()], name="kernel of abelian translation quotient"
    )
