"""Letter decompositions of GL2 over F_q[t], and homomorphisms to finite groups.

Every matrix with unit determinant factors into an alternating product of
constant matrices and triangular letters whose corner has positive degree.
A homomorphism into a finite group is described by where it sends constant
matrices and the translations T(c t^i); the translation data is a finite
list of per-degree tables together with an eventually repeating cycle, so
reductions modulo any monic polynomial and their twists all fit one format.

Two realizations share the same calling surface: ReductionHom reduces the
entries natively, TableHom folds coefficient tables.  Both expose a
conductor, a monic modulus f with every unit-determinant matrix congruent
to the identity mod f mapping to the identity.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_GROUP_CAP
from .errors import DomainError, MalformedWord, ValidationError
from .fields import DIGIT_CHARS, field_from_label
from .fingroup import (
    AdditiveQuotientGroup,
    SymmetricGroup,
    TableGroup,
    closure,
)
from .mat2 import (
    Mat2,
    PolyRing,
    borel_mat,
    mat_over_polys,
    poly_ring,
    reduce_mat,
    translation,
    weyl,
)
from .matgroups import ResidueMatrixGroup, mat_code
from .poly import (
    MonicIdeal,
    Poly,
    one as poly_one,
    poly_from_string,
    residue_ring,
    t_power,
)
from .subspace import SubspaceDesc

# ---------------------------------------------------------------------------
# letters and words


@dataclass(frozen=True)
class ConstLetter:
    """A constant matrix with unit determinant, as a 4-tuple of field elements."""

    F: object
    entries: tuple

    def matrix(self):
        return mat_over_polys(self.F, self.entries)


@dataclass(frozen=True)
class BorelLetter:
    """Triangular letter: unit diagonal (alpha, beta), corner of degree >= 1."""

    alpha: int
    beta: int
    corner: Poly

    def matrix(self):
        R = poly_ring(self.corner.F)
        return borel_mat(R, self.alpha, self.beta, self.corner)


def _const_from_mat(m):
    F = m.ring.F
    es = []
    for e in m.entries():
        if e.degree > 0:
            raise MalformedWord("constant letter with nonconstant entry")
        es.append(e.constant_term())
    det = F.sub(F.mul(es[0], es[3]), F.mul(es[1], es[2]))
    if det == 0:
        raise MalformedWord("constant letter with zero determinant")
    return ConstLetter(F, tuple(es))


def _merge_const(a, b):
    return _const_from_mat(a.matrix() * b.matrix())


def _merge_borel(a, b):
    F = a.corner.F
    alpha = F.mul(a.alpha, b.alpha)
    beta = F.mul(a.beta, b.beta)
    corner = a.corner.scale(b.beta) + b.corner.scale(a.alpha)
    return alpha, beta, corner


def _identity_const(letter):
    return letter.entries == (1, 0, 0, 1)


def normalize_letters(letters):
    """Fold a letter list into alternating normal form.

    Adjacent letters of one type merge; triangular letters whose corner
    degenerates to a constant become constant letters and merge onward.
    The identity is the empty word.
    """
    out = []

    def push(letter):
        if isinstance(letter, BorelLetter) and letter.corner.degree < 1:
            F = letter.corner.F
            letter = ConstLetter(
                F, (letter.alpha, letter.corner.constant_term(), 0, letter.beta)
            )
        if isinstance(letter, ConstLetter):
            if out and isinstance(out[-1], ConstLetter):
                merged = _merge_const(out.pop(), letter)
                push(merged)
                return
            if _identity_const(letter):
                return
            out.append(letter)
        else:
            if out and isinstance(out[-1], BorelLetter):
                alpha, beta, corner = _merge_borel(out.pop(), letter)
                if corner.degree < 1:
                    push(
                        ConstLetter(
                            corner.F, (alpha, corner.constant_term(), 0, beta)
                        )
                    )
                else:
                    push(BorelLetter(alpha, beta, corner))
                return
            out.append(letter)

    for letter in letters:
        if isinstance(letter, ConstLetter):
            F = letter.F
            det = F.sub(
                F.mul(letter.entries[0], letter.entries[3]),
                F.mul(letter.entries[1], letter.entries[2]),
            )
            if det == 0:
                raise MalformedWord("constant letter with zero determinant")
        elif isinstance(letter, BorelLetter):
            if letter.alpha == 0 or letter.beta == 0:
                raise MalformedWord("triangular letter with zero diagonal entry")
        else:
            raise MalformedWord(f"unknown letter {letter!r}")
        push(letter)
    return tuple(out)


def word_matrix(F, letters):
    m = mat_over_polys(F, (1, 0, 0, 1))
    for letter in letters:
        m = m * letter.matrix()
    return m


def letter_inverse(letter):
    if isinstance(letter, ConstLetter):
        return _const_from_mat(letter.matrix().inv())
    F = letter.corner.F
    ai, bi = F.inv(letter.alpha), F.inv(letter.beta)
    return BorelLetter(ai, bi, letter.corner.scale(F.neg(F.mul(ai, bi))))


def word_inverse(letters):
    return normalize_letters([letter_inverse(l) for l in reversed(letters)])


def word_product(w1, w2):
    return normalize_letters(list(w1) + list(w2))


def matrix_to_word(m):
    """Decompose a unit-determinant polynomial matrix into letters.

    Peels from the left: when the lower-left entry dominates, a rotation
    letter swaps the rows; otherwise one euclidean division step moves the
    top-left entry below the lower-left.  The lower-left degree drops at
    least every second step, so the loop ends with a triangular matrix.
    """
    F = m.ring.F
    det = m.det()
    if det.degree != 0:
        raise DomainError("matrix determinant is not a unit")
    R = poly_ring(F)
    w = weyl(R)
    w_inv_letter = ConstLetter(F, (0, 1, F.neg(1), 0))
    letters = []
    work = m
    while not work.c.is_zero():
        if work.a.degree < work.c.degree:
            letters.append(w_inv_letter)
            work = w * work
        else:
            quot, _ = divmod(work.a, work.c)
            letters.append(BorelLetter(1, 1, quot))
            work = translation(R, -quot) * work
    if work.b.degree < 1:
        letters.append(
            ConstLetter(
                F,
                (
                    work.a.constant_term(),
                    work.b.constant_term(),
                    0,
                    work.d.constant_term(),
                ),
            )
        )
    else:
        letters.append(
            BorelLetter(work.a.constant_term(), work.d.constant_term(), work.b)
        )
    word = normalize_letters(letters)
    return word


# ---------------------------------------------------------------------------
# homomorphisms


def _check_domain(kind, m):
    det = m.det()
    if kind == "SL":
        if det != poly_one(m.ring.F):
            raise DomainError("matrix is outside the determinant-one group")
    else:
        if det.degree != 0:
            raise DomainError("matrix determinant is not a unit")


class ReductionHom:
    """Reduce matrix entries modulo the monic modulus of a residue ring."""

    def __init__(self, R, kind="SL", cap=None):
        if kind not in ("SL", "GL"):
            raise DomainError("kind must be 'SL' or 'GL'")
        self.ring = R
        self.F = R.F
        self.kind = kind
        if cap is None:
            self.target = ResidueMatrixGroup(R, kind)
        else:
            self.target = ResidueMatrixGroup(R, kind, cap=cap)
        self.conductor = MonicIdeal(R.modulus)

    def translation_image(self, a):
        return int(mat_code(translation(self.ring, self.ring.reduce_poly(a))))

    def translation_period(self):
        """Pre-period and cycle of i -> image of T(t^i)."""
        pre, cyc, _ = t_power_cycle(self.ring)
        return pre, cyc

    def eval_matrix(self, m):
        _check_domain(self.kind, m)
        return int(mat_code(reduce_mat(m, self.ring)))

    def eval_word(self, letters):
        return self.eval_matrix(word_matrix(self.F, letters))

    def image_generators(self):
        """Images of the standard generators of the domain group."""
        return [int(g) for g in self.target.generators()] if self.kind == "SL" else self._gl_gens()

    def _gl_gens(self):
        gens = [int(g) for g in ResidueMatrixGroup(self.ring, "SL").generators()]
        for u in self.F.units():
            gens.append(int(mat_code(Mat2(self.ring, u, 0, 0, 1))))
        return sorted(set(gens))

    def image_elements(self, cap=None):
        if cap is None:
            cap = self.target.cap
        return closure(self.target, self.image_generators(), cap=cap)

    def __repr__(self):
        return f"ReductionHom({self.kind}2 mod {self.ring.modulus.digits_str()})"


class TableHom:
    """Homomorphism given by a constant table and periodic translation tables.

    pre_tables[i][c] is the image of T(c t^i) for i below the pre-period;
    cyc_tables[r][c] covers i = pre-period + r and repeats with the cycle
    length.  const_table maps 4-tuples of field elements to target codes.
    """

    def __init__(self, F, kind, target, const_table, pre_tables, cyc_tables=None,
                 validate=True):
        if kind not in ("SL", "GL"):
            raise DomainError("kind must be 'SL' or 'GL'")
        self.F = F
        self.kind = kind
        self.target = target
        self.const_table = dict(const_table)
        self.pre_tables = [tuple(t) for t in pre_tables]
        if cyc_tables is None:
            cyc_tables = [tuple([target.identity_code()] * F.q)]
        self.cyc_tables = [tuple(t) for t in cyc_tables]
        if not self.cyc_tables:
            raise DomainError("at least one cycle table is required")
        self.pre_len = len(self.pre_tables)
        self.cyc_len = len(self.cyc_tables)
        self.conductor = self._conductor()
        if validate:
            self.validate()

    # -- structure

    def _cycle_trivial(self):
        e = self.target.identity_code()
        return all(all(v == e for v in t) for t in self.cyc_tables)

    def _conductor(self):
        F = self.F
        if self._cycle_trivial():
            gen = t_power(F, self.pre_len)
        else:
            cyc = t_power(F, self.cyc_len) - poly_one(F)
            gen = t_power(F, self.pre_len) * cyc
        return MonicIdeal(gen)

    def slot_table(self, i):
        if i < self.pre_len:
            return self.pre_tables[i]
        return self.cyc_tables[(i - self.pre_len) % self.cyc_len]

    # -- evaluation

    def translation_period(self):
        """Pre-period and cycle of i -> image of T(t^i)."""
        return self.pre_len, self.cyc_len

    def translation_image(self, a):
        T = self.target
        code = T.identity_code()
        for i in range(min(len(a.coeffs), self.pre_len)):
            c = a.coeffs[i]
            if c:
                code = T.mul(code, self.pre_tables[i][c])
        if len(a.coeffs) > self.pre_len:
            sums = [0] * self.cyc_len
            for i in range(self.pre_len, len(a.coeffs)):
                r = (i - self.pre_len) % self.cyc_len
                sums[r] = self.F.add(sums[r], a.coeffs[i])
            for r, s in enumerate(sums):
                if s:
                    code = T.mul(code, self.cyc_tables[r][s])
        return code

    def const_image(self, entries):
        try:
            return self.const_table[tuple(entries)]
        except KeyError:
            raise DomainError(f"constant {entries} is outside the domain group")

    def letter_image(self, letter):
        if isinstance(letter, ConstLetter):
            return self.const_image(letter.entries)
        F = self.F
        ai = F.inv(letter.alpha)
        rho = self.const_image((letter.alpha, 0, 0, letter.beta))
        return self.target.mul(rho, self.translation_image(letter.corner.scale(ai)))

    def eval_word(self, letters):
        code = self.target.identity_code()
        for letter in letters:
            code = self.target.mul(code, self.letter_image(letter))
        return code

    def eval_matrix(self, m):
        _check_domain(self.kind, m)
        return self.eval_word(matrix_to_word(m))

    def image_generators(self):
        gens = set(self.const_table.values())
        for t in self.pre_tables + self.cyc_tables:
            gens.update(t)
        return sorted(gens)

    def image_elements(self, cap=None):
        return closure(self.target, self.image_generators(),
                       cap if cap is not None else DEFAULT_GROUP_CAP)

    # -- validation

    def _constants_group(self):
        R1 = residue_ring(t_power(self.F, 1))
        return ResidueMatrixGroup(R1, self.kind)

    def validate(self):
        F = self.F
        T = self.target
        q = F.q
        e = T.identity_code()
        for tables, name in ((self.pre_tables, "pre"), (self.cyc_tables, "cycle")):
            for i, tab in enumerate(tables):
                if len(tab) != q:
                    raise ValidationError(
                        "tables-shape",
                        f"{name} table {i} has {len(tab)} entries, expected {q}",
                    )
        if hasattr(T, "contains_code"):
            for tab in self.pre_tables + self.cyc_tables:
                for v in tab:
                    if not T.contains_code(int(v)):
                        raise ValidationError(
                            "codes-in-target", f"code {v} is not in the target group"
                        )
            for v in self.const_table.values():
                if not T.contains_code(int(v)):
                    raise ValidationError(
                        "codes-in-target", f"code {v} is not in the target group"
                    )
        slots = self.pre_tables + self.cyc_tables
        for i, tab in enumerate(slots):
            if tab[0] != e:
                raise ValidationError(
                    "translation-zero", f"slot {i} sends 0 to a nonidentity code"
                )
            for a in range(q):
                for b in range(q):
                    if T.mul(tab[a], tab[b]) != tab[F.add(a, b)]:
                        raise ValidationError(
                            "translation-additive",
                            f"slot {i} is not additive at ({a}, {b})",
                        )
        flat = [v for tab in slots for v in tab]
        for x in flat:
            for y in flat:
                if T.mul(x, y) != T.mul(y, x):
                    raise ValidationError(
                        "translation-commute",
                        "translation images do not commute",
                    )
        Gc = self._constants_group()
        els = Gc.elements()
        if len(self.const_table) != els.size:
            raise ValidationError(
                "const-complete",
                f"constant table has {len(self.const_table)} entries, "
                f"the constant group has {els.size}",
            )
        tbl = np.empty(els.size, dtype=np.int64)
        for pos, code in enumerate(els):
            a, b, c, d = Gc.decode(int(code))
            key = (int(a), int(b), int(c), int(d))
            if key not in self.const_table:
                raise ValidationError(
                    "const-complete", f"constant {key} is missing from the table"
                )
            tbl[pos] = self.const_table[key]
        prods = Gc.op(els[:, None], els[None, :])
        pos = np.searchsorted(els, prods)
        lhs = np.asarray(
            [T.mul(int(x), int(y)) for x in tbl for y in tbl], dtype=np.int64
        ).reshape(els.size, els.size)
        if not np.array_equal(lhs, tbl[pos]):
            raise ValidationError(
                "const-mult", "constant table is not multiplicative"
            )
        diags = (
            [(a, F.inv(a)) for a in F.units()]
            if self.kind == "SL"
            else [(a, b) for a in F.units() for b in F.units()]
        )
        for alpha, beta in diags:
            rho = self.const_table[(alpha, 0, 0, beta)]
            rho_i = T.inv(rho)
            ratio = F.mul(alpha, F.inv(beta))
            for i, tab in enumerate(slots):
                for c in range(1, q):
                    got = T.mul(T.mul(rho, tab[c]), rho_i)
                    if got != tab[F.mul(ratio, c)]:
                        raise ValidationError(
                            "diag-conjugation",
                            f"slot {i} conflicts with conjugation by "
                            f"diag({alpha}, {beta})",
                        )
        tau0 = self.slot_table(0)
        for alpha, beta in diags:
            rho = self.const_table[(alpha, 0, 0, beta)]
            ai = F.inv(alpha)
            for c in range(q):
                want = T.mul(rho, tau0[F.mul(ai, c)])
                if self.const_table[(alpha, c, 0, beta)] != want:
                    raise ValidationError(
                        "borel-consistency",
                        f"constant table at triangular ({alpha}, {c}, {beta}) "
                        "conflicts with the translation table",
                    )
        return True

    def __repr__(self):
        return (
            f"TableHom({self.kind}2 over {self.F.label}, "
            f"pre {self.pre_len}, cycle {self.cyc_len})"
        )


def t_power_cycle(R):
    """Pre-period and cycle of the sequence t^0, t^1, ... in the ring.

    Returns (pre, cycle, codes) where codes lists the pre + cycle distinct
    reductions in order of first appearance.
    """
    seen = {}
    codes = []
    i = 0
    while True:
        code = R.reduce_poly(t_power(R.F, i))
        if code in seen:
            return seen[code], i - seen[code], codes
        seen[code] = i
        codes.append(code)
        i += 1


def reduction_as_table_hom(R, kind="SL", validate=True):
    """Rebuild entrywise reduction as translation tables, for cross-checking.

    The image of T(c t^i) depends on t^i modulo the modulus, which is
    eventually periodic in i, so the tables close up after the power of t
    dividing the modulus with period the multiplicative order of t on the
    prime-to-t part.
    """
    F = R.F
    pre_len, cyc_len, reductions = t_power_cycle(R)
    target = ResidueMatrixGroup(R, kind)

    def table_for(code):
        out = []
        for c in range(F.q):
            out.append(int(mat_code(translation(R, R.scale(c, code)))))
        return tuple(out)

    pre_tables = [table_for(c) for c in reductions[:pre_len]]
    cyc_tables = [table_for(c) for c in reductions[pre_len:]]
    const_table = {}
    Gc = ResidueMatrixGroup(residue_ring(t_power(F, 1)), kind)
    for code in Gc.elements():
        a, b, c, d = Gc.decode(int(code))
        key = (int(a), int(b), int(c), int(d))
        m = mat_over_polys(F, key)
        const_table[key] = int(mat_code(reduce_mat(m, R)))
    return TableHom(F, kind, target, const_table, pre_tables, cyc_tables,
                    validate=validate)


def t_power_reduction_hom(F, m, kind="SL"):
    """Reduction modulo t^m as a native reduction hom."""
    if m < 1:
        raise DomainError("the exponent must be at least 1")
    return ReductionHom(residue_ring(t_power(F, m)), kind)


# ---------------------------------------------------------------------------
# serialization of targets and homs


def target_to_json(target):
    if isinstance(target, ResidueMatrixGroup):
        return {
            "type": "residue_matrix",
            "field": target.R.F.label,
            "modulus": target.R.modulus.digits_str(),
            "kind": target.kind,
        }
    if isinstance(target, AdditiveQuotientGroup):
        return {
            "type": "additive_quotient",
            "field": target.F.label,
            "ambient_dim": target.W.ambient_dim,
            "basis": ["".join(DIGIT_CHARS[x] for x in row) for row in target.W.basis],
        }
    if isinstance(target, SymmetricGroup):
        return {"type": "symmetric", "degree": target.n}
    if isinstance(target, TableGroup):
        return {"type": "table", "table": [[int(x) for x in row] for row in target.table]}
    raise DomainError(f"cannot serialize target {target!r}")


def target_from_json(data):
    kind = data.get("type")
    if kind == "residue_matrix":
        F = field_from_label(data["field"])
        R = residue_ring(poly_from_string(F, data["modulus"]))
        return ResidueMatrixGroup(R, data["kind"])
    if kind == "additive_quotient":
        F = field_from_label(data["field"])
        n = int(data["ambient_dim"])
        rows = []
        for row in data["basis"]:
            if len(row) != n:
                raise DomainError("basis row length does not match the dimension")
            rows.append(tuple(DIGIT_CHARS.index(ch) for ch in row))
        return AdditiveQuotientGroup(SubspaceDesc(F, n, rows))
    if kind == "symmetric":
        return SymmetricGroup(int(data["degree"]))
    if kind == "table":
        return TableGroup(data["table"])
    raise DomainError(f"unknown target type {kind!r}")


def hom_to_json(hom):
    if isinstance(hom, ReductionHom):
        return {
            "type": "reduction",
            "field": hom.F.label,
            "kind": hom.kind,
            "modulus": hom.ring.modulus.digits_str(),
        }
    if isinstance(hom, TableHom):
        return {
            "type": "tables",
            "field": hom.F.label,
            "kind": hom.kind,
            "target": target_to_json(hom.target),
            "const_table": {
                ",".join(DIGIT_CHARS[x] for x in key): int(v)
                for key, v in sorted(hom.const_table.items())
            },
            "pre_tables": [[int(v) for v in t] for t in hom.pre_tables],
            "cyc_tables": [[int(v) for v in t] for t in hom.cyc_tables],
        }
    raise DomainError(f"cannot serialize hom {hom!r}")


def hom_from_json(data, validate=True):
    kind = data.get("type")
    if kind == "reduction":
        F = field_from_label(data["field"])
        R = residue_ring(poly_from_string(F, data["modulus"]))
        return ReductionHom(R, data["kind"])
    if kind == "tables":
        F = field_from_label(data["field"])
        target = target_from_json(data["target"])
        const_table = {}
        for key, v in data["const_table"].items():
            parts = key.split(",")
            if len(parts) != 4:
                raise DomainError(f"bad constant key {key!r}")
            const_table[tuple(DIGIT_CHARS.index(p) for p in parts)] = int(v)
        return TableHom(
            F,
            data["kind"],
            target,
            const_table,
            data["pre_tables"],
            data.get("cyc_tables"),
            validate=validate,
        )
    raise DomainError(f"unknown hom type {kind!r}")
