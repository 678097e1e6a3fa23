"""Shared random generators and the transversal-based image oracle."""

from math import lcm

from drinfeld.amalgam import ReductionHom
from drinfeld.fingroup import closure
from drinfeld.mat2 import diag_mat, mat_over_polys, poly_ring, translation, weyl
from drinfeld.matgroups import ResidueMatrixGroup
from drinfeld.poly import Poly, residue_ring
from drinfeld.subgroups import domain_generator_matrices


def schreier_congruence_image(hom, modulus_ideal):
    """Oracle: image of the reduction kernel via transversal lifts.

    Walks the coset graph of the kernel modulo the given ideal, keeping a
    polynomial-matrix representative per coset, then closes the images of
    the standard kernel generators rep * g * rep(coset after g)^-1.
    Completely independent of the product-group slice the library uses.
    """
    R = residue_ring(modulus_ideal.gen)
    Q = ResidueMatrixGroup(R, hom.kind)
    pi = ReductionHom(R, hom.kind)
    pre1, cyc1 = hom.translation_period()
    pre2, cyc2 = pi.translation_period()
    bound = max(pre1, pre2) + lcm(cyc1, cyc2)
    gens = domain_generator_matrices(hom.F, hom.kind, bound)
    gen_codes = [pi.eval_matrix(g) for g in gens]
    reps = {Q.identity_code(): mat_over_polys(hom.F, (1, 0, 0, 1))}
    frontier = [Q.identity_code()]
    while frontier:
        new = []
        for y in frontier:
            for g, gc in zip(gens, gen_codes):
                z = Q.mul(y, gc)
                if z not in reps:
                    reps[z] = reps[y] * g
                    new.append(z)
        frontier = new
    imgs = set()
    for y, rep in reps.items():
        for g, gc in zip(gens, gen_codes):
            z = rep * g
            back = reps[Q.mul(y, gc)]
            imgs.add(hom.eval_matrix(z * back.inv()))
    return closure(hom.target, sorted(imgs))


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
