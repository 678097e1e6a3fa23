"""Word decomposition and homomorphism tests.

The central consistency check: evaluating through letter decompositions and
translation tables must agree with native entrywise reduction, across
moduli whose t-power sequences are trivial, terminating, and cyclic.
"""

import numpy as np
import pytest

from drinfeld.amalgam import (
    BorelLetter,
    ConstLetter,
    ReductionHom,
    TableHom,
    hom_from_json,
    hom_to_json,
    matrix_to_word,
    normalize_letters,
    reduction_as_table_hom,
    t_power_reduction_hom,
    target_from_json,
    target_to_json,
    word_inverse,
    word_matrix,
    word_product,
)
from drinfeld.errors import DomainError, MalformedWord, ValidationError
from drinfeld.fields import field
from drinfeld.mat2 import (
    diag_mat,
    mat_over_polys,
    poly_ring,
    reduce_mat,
    translation,
    weyl,
)
from drinfeld.matgroups import ResidueMatrixGroup, code_mat, mat_code
from drinfeld.poly import Poly, poly_from_string, residue_ring, t_power

F2 = field(2)
F3 = field(3)
F4 = field(2, 2)


def P(F, s):
    return poly_from_string(F, s)


def random_poly(F, rng, max_deg=3):
    deg = int(rng.integers(0, max_deg + 1))
    return Poly(F, [int(rng.integers(0, F.q)) for _ in range(deg + 1)])


def random_sl2(F, rng, steps=6, max_deg=3):
    R = poly_ring(F)
    m = mat_over_polys(F, (1, 0, 0, 1))
    for _ in range(steps):
        k = int(rng.integers(0, 3))
        if k == 0:
            m = m * translation(R, random_poly(F, rng, max_deg))
        elif k == 1:
            m = m * weyl(R)
        else:
            a = int(rng.integers(1, F.q))
            m = m * diag_mat(R, a, F.inv(a))
    return m


def random_gl2(F, rng, steps=6, max_deg=3):
    R = poly_ring(F)
    m = random_sl2(F, rng, steps, max_deg)
    u = int(rng.integers(1, F.q))
    return m * diag_mat(R, u, 1)


def test_decomposition_worked_example():
    m = mat_over_polys(F2, (P(F2, "1"), P(F2, "0"), P(F2, "01"), P(F2, "1")))
    word = matrix_to_word(m)
    assert word == (
        ConstLetter(F2, (0, 1, 1, 0)),
        BorelLetter(1, 1, P(F2, "01")),
        ConstLetter(F2, (0, 1, 1, 0)),
    )
    assert word_matrix(F2, word) == m


def test_identity_decomposes_to_empty_word():
    m = mat_over_polys(F3, (1, 0, 0, 1))
    assert matrix_to_word(m) == ()


@pytest.mark.parametrize("F", [F2, F3])
def test_roundtrip_many_matrices(F):
    rng = np.random.default_rng(11 + F.q)
    for _ in range(400):
        m = random_sl2(F, rng)
        word = matrix_to_word(m)
        assert word_matrix(F, word) == m
        # alternating normal form
        for a, b in zip(word, word[1:]):
            assert type(a) is not type(b)
        for letter in word:
            if isinstance(letter, BorelLetter):
                assert letter.corner.degree >= 1


def test_roundtrip_gl_matrices():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m = random_gl2(F3, rng)
        assert word_matrix(F3, matrix_to_word(m)) == m


def test_word_length_bound():
    rng = np.random.default_rng(3)
    for _ in range(200):
        m = random_sl2(F2, rng, steps=8, max_deg=3)
        d = max(e.degree for e in m.entries())
        assert len(matrix_to_word(m)) <= 2 * d + 3


def test_nonunit_determinant_rejected():
    m = mat_over_polys(F2, (P(F2, "01"), P(F2, "0"), P(F2, "0"), P(F2, "1")))
    with pytest.raises(DomainError):
        matrix_to_word(m)


def test_word_product_and_inverse():
    rng = np.random.default_rng(17)
    for _ in range(100):
        m1 = random_sl2(F3, rng)
        m2 = random_sl2(F3, rng)
        w1, w2 = matrix_to_word(m1), matrix_to_word(m2)
        assert word_matrix(F3, word_product(w1, w2)) == m1 * m2
        assert word_matrix(F3, word_inverse(w1)) == m1.inv()


def test_normalize_merges_borels():
    raw = [BorelLetter(1, 1, P(F2, "01")), BorelLetter(1, 1, P(F2, "01"))]
    assert normalize_letters(raw) == ()  # corners cancel over F_2
    raw = [BorelLetter(2, 1, P(F3, "01")), BorelLetter(2, 1, P(F3, "001"))]
    merged = normalize_letters(raw)
    assert len(merged) == 1
    assert merged[0].matrix() == raw[0].matrix() * raw[1].matrix()


def test_malformed_letters():
    with pytest.raises(MalformedWord):
        normalize_letters([ConstLetter(F2, (1, 0, 0, 0))])
    with pytest.raises(MalformedWord):
        normalize_letters([BorelLetter(0, 1, P(F2, "01"))])
    with pytest.raises(MalformedWord):
        normalize_letters(["junk"])


MODULI = {
    2: ["01", "001", "011", "111", "0001"],
    3: ["01", "001", "011", "101"],
}


@pytest.mark.parametrize("q,mods", sorted(MODULI.items()))
def test_reduction_hom_word_path_matches_direct(q, mods):
    F = field(2) if q == 2 else field(3)
    rng = np.random.default_rng(29 * q)
    for mod in mods:
        h = ReductionHom(residue_ring(P(F, mod)), "SL")
        for _ in range(60):
            m = random_sl2(F, rng)
            direct = h.eval_matrix(m)
            via_word = h.eval_word(matrix_to_word(m))
            assert direct == via_word
            assert code_mat(h.ring, direct) == reduce_mat(m, h.ring)


@pytest.mark.parametrize("q,mods", sorted(MODULI.items()))
def test_table_hom_matches_reduction(q, mods):
    F = field(2) if q == 2 else field(3)
    rng = np.random.default_rng(31 * q)
    for mod in mods:
        R = residue_ring(P(F, mod))
        red = ReductionHom(R, "SL")
        tab = reduction_as_table_hom(R, "SL")
        for _ in range(40):
            a = random_poly(F, rng, max_deg=7)
            assert tab.translation_image(a) == red.translation_image(a)
        for _ in range(40):
            m = random_sl2(F, rng)
            assert tab.eval_matrix(m) == red.eval_matrix(m)


def test_table_hom_translation_additive_with_folding():
    R = residue_ring(P(F2, "011"))  # cyclic t-power sequence
    tab = reduction_as_table_hom(R, "SL")
    rng = np.random.default_rng(41)
    T = tab.target
    for _ in range(200):
        a = random_poly(F2, rng, max_deg=8)
        b = random_poly(F2, rng, max_deg=8)
        assert tab.translation_image(a + b) == T.mul(
            tab.translation_image(a), tab.translation_image(b)
        )


def test_gl_reduction_and_tables():
    R = residue_ring(P(F3, "001"))
    red = ReductionHom(R, "GL")
    tab = reduction_as_table_hom(R, "GL")
    rng = np.random.default_rng(43)
    for _ in range(40):
        m = random_gl2(F3, rng)
        assert tab.eval_matrix(m) == red.eval_matrix(m)
    # SL-kind homs refuse determinant-two matrices
    sl = ReductionHom(R, "SL")
    m = diag_mat(poly_ring(F3), 2, 1)
    with pytest.raises(DomainError):
        sl.eval_matrix(m)


def test_conductor_values():
    assert t_power_reduction_hom(F2, 2).conductor.gen == P(F2, "001")
    assert (
        reduction_as_table_hom(residue_ring(P(F2, "001")), "SL").conductor.gen
        == P(F2, "001")
    )
    assert (
        reduction_as_table_hom(residue_ring(P(F2, "011")), "SL").conductor.gen
        == P(F2, "011")
    )
    # modulus t^2+t+1: powers of t cycle with length three and no tail
    h = reduction_as_table_hom(residue_ring(P(F2, "111")), "SL")
    assert h.pre_len == 0 and h.cyc_len == 3
    assert h.conductor.gen == P(F2, "1001")
    assert (h.conductor.gen % P(F2, "111")).is_zero()


def test_conductor_kills_multiples():
    for mod in ("001", "011", "111"):
        R = residue_ring(P(F2, mod))
        tab = reduction_as_table_hom(R, "SL")
        rng = np.random.default_rng(47)
        for _ in range(30):
            a = random_poly(F2, rng, max_deg=4)
            killed = tab.conductor.gen * a
            assert tab.translation_image(killed) == tab.target.identity_code()


def test_image_generators_closure_is_full_sl():
    R = residue_ring(P(F2, "001"))
    red = ReductionHom(R, "SL")
    assert red.image_elements().size == 48
    tab = reduction_as_table_hom(R, "SL")
    assert tab.image_elements().size == 48


def test_gl_image_is_proper_for_higher_modulus():
    # determinants of reduced matrices stay in the constants, so the image
    # of the unit-determinant group is smaller than full GL2 of the ring
    R = residue_ring(P(F2, "001"))
    red = ReductionHom(R, "GL")
    im = red.image_elements()
    full = ResidueMatrixGroup(R, "GL").elements()
    assert im.size == 48
    assert full.size == 96
    assert np.isin(im, full).all()


# -- validation rule triggers


def tampered(hom, **kw):
    return TableHom(
        hom.F,
        kw.get("kind", hom.kind),
        hom.target,
        kw.get("const_table", hom.const_table),
        kw.get("pre_tables", hom.pre_tables),
        kw.get("cyc_tables", hom.cyc_tables),
    )


def base_hom():
    return reduction_as_table_hom(residue_ring(P(F2, "001")), "SL")


def test_validation_tables_shape():
    h = base_hom()
    with pytest.raises(ValidationError) as err:
        tampered(h, pre_tables=[h.pre_tables[0], h.pre_tables[1][:1]])
    assert err.value.rule == "tables-shape"


def test_validation_codes_in_target():
    h = base_hom()
    bad = [h.pre_tables[0], (0, -5)]
    with pytest.raises(ValidationError) as err:
        tampered(h, pre_tables=bad)
    assert err.value.rule == "codes-in-target"


def test_validation_translation_zero():
    h = base_hom()
    t0 = h.pre_tables[0]
    with pytest.raises(ValidationError) as err:
        tampered(h, pre_tables=[(t0[1], t0[0]), h.pre_tables[1]])
    assert err.value.rule == "translation-zero"


def test_validation_translation_additive():
    R = residue_ring(P(F3, "001"))
    h = reduction_as_table_hom(R, "SL")
    t0 = list(h.pre_tables[0])
    t0[2] = t0[1]  # now 1+1 does not land on the table entry for 2
    with pytest.raises(ValidationError) as err:
        tampered(h, pre_tables=[tuple(t0), h.pre_tables[1]])
    assert err.value.rule == "translation-additive"


def test_validation_translation_commute():
    h = base_hom()
    R = h.target.R
    G = h.target
    w = mat_code(weyl(R))
    lower = tuple(
        G.conj(v, w) for v in h.pre_tables[1]
    )  # conjugated into lower triangulars
    with pytest.raises(ValidationError) as err:
        tampered(h, pre_tables=[h.pre_tables[0], lower])
    assert err.value.rule == "translation-commute"


def test_validation_const_complete():
    h = base_hom()
    table = dict(h.const_table)
    table.pop((0, 1, 1, 0))
    with pytest.raises(ValidationError) as err:
        tampered(h, const_table=table)
    assert err.value.rule == "const-complete"


def test_validation_const_mult():
    h = base_hom()
    table = dict(h.const_table)
    table[(0, 1, 1, 0)] = h.target.identity_code()
    with pytest.raises(ValidationError) as err:
        tampered(h, const_table=table)
    assert err.value.rule == "const-mult"


def test_validation_diag_conjugation():
    # over F_4 a Frobenius twist of one translation slot stays additive and
    # commuting but conflicts with conjugation by diagonals
    R = residue_ring(P(F4, "001"))
    h = reduction_as_table_hom(R, "SL")
    t1 = h.pre_tables[1]
    twisted = tuple(t1[F4.frob(c)] for c in range(4))
    with pytest.raises(ValidationError) as err:
        tampered(h, pre_tables=[h.pre_tables[0], twisted])
    assert err.value.rule == "diag-conjugation"


def test_validation_borel_consistency():
    h = base_hom()
    e = h.target.identity_code()
    trivial = {k: e for k in h.const_table}
    with pytest.raises(ValidationError) as err:
        tampered(h, const_table=trivial)
    assert err.value.rule == "borel-consistency"


def test_reduction_tables_pass_validation():
    for F, mod, kind in (
        (F2, "001", "SL"),
        (F2, "011", "SL"),
        (F2, "111", "SL"),
        (F3, "001", "SL"),
        (F3, "01", "GL"),
        (F4, "001", "SL"),
    ):
        h = reduction_as_table_hom(residue_ring(P(F, mod)), kind)
        assert h.validate()


# -- serialization


def test_hom_json_roundtrip_reduction():
    h = ReductionHom(residue_ring(P(F3, "001")), "SL")
    data = hom_to_json(h)
    h2 = hom_from_json(data)
    rng = np.random.default_rng(53)
    for _ in range(20):
        m = random_sl2(F3, rng)
        assert h.eval_matrix(m) == h2.eval_matrix(m)


def test_hom_json_roundtrip_tables():
    h = reduction_as_table_hom(residue_ring(P(F2, "011")), "SL")
    data = hom_to_json(h)
    h2 = hom_from_json(data)
    assert h2.pre_tables == h.pre_tables
    assert h2.cyc_tables == h.cyc_tables
    assert h2.const_table == h.const_table
    rng = np.random.default_rng(59)
    for _ in range(20):
        m = random_sl2(F2, rng)
        assert h.eval_matrix(m) == h2.eval_matrix(m)


def test_target_json_roundtrip():
    from drinfeld.fingroup import AdditiveQuotientGroup, SymmetricGroup
    from drinfeld.subspace import subspace

    t = ResidueMatrixGroup(residue_ring(P(F2, "001")), "SL")
    t2 = target_from_json(target_to_json(t))
    assert t2.R is t.R and t2.kind == t.kind
    W = subspace(F3, 3, [(1, 2, 0)])
    a = AdditiveQuotientGroup(W)
    a2 = target_from_json(target_to_json(a))
    assert a2.W == a.W
    s = SymmetricGroup(5)
    s2 = target_from_json(target_to_json(s))
    assert s2.n == 5
