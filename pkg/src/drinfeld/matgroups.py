"""Finite matrix groups: SL2 and GL2 over residue rings of F_q[t].

A matrix is packed into a single int64 code as ((a*S + b)*S + c)*S + d with
S the ring size, and the group operation works on whole code arrays through
the ring's dense tables.  Enumeration is by generator closure, checked
against the exact order formula computed from the modulus factorization.
"""

import numpy as np

from .config import DEFAULT_GROUP_CAP
from .errors import CapExceeded, DomainError
from .fingroup import FinGroup, closure, contains_sorted
from .mat2 import Mat2, translation, weyl
from .poly import factorize, t_power

_ENUM_CACHE = {}


def mat_code(m):
    """Pack a residue-ring matrix into its integer code."""
    S = m.ring.size
    return ((m.a * S + m.b) * S + m.c) * S + m.d


def code_mat(R, code):
    """Unpack an integer code into a residue-ring matrix."""
    S = R.size
    code = int(code)
    d = code % S
    code //= S
    c = code % S
    code //= S
    b = code % S
    a = code // S
    return Mat2(R, a, b, c, d)


def unit_group_generators(R):
    """Greedy small generating set for the unit group of a residue ring."""
    units = R.units()
    target = len(units)
    gens = []
    have = {1}
    for u in units:
        if u in have:
            continue
        gens.append(u)
        have = {1}
        frontier = [1]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = R.mul(x, g)
                    if y not in have:
                        have.add(y)
                        new.append(y)
            frontier = new
        if len(have) == target:
            break
    if len(have) != target:
        raise AssertionError("unit group closure failed")
    return gens


class ResidueMatrixGroup(FinGroup):
    """SL2 or GL2 over a residue ring, on packed matrix codes."""

    def __init__(self, R, kind="SL", cap=DEFAULT_GROUP_CAP):
        if kind not in ("SL", "GL"):
            raise DomainError("kind must be 'SL' or 'GL'")
        self.R = R
        self.kind = kind
        self.S = R.size
        self.cap = cap
        add, mul, neg, unit, inv = R.tables()
        self._add = add
        self._mul = mul
        self._neg = neg
        self._unit = unit
        self._inv = inv

    def decode(self, codes):
        S = self.S
        d = codes % S
        r = codes // S
        c = r % S
        r = r // S
        b = r % S
        a = r // S
        return a, b, c, d

    def encode(self, a, b, c, d):
        S = self.S
        return ((a * S + b) * S + c) * S + d

    def op(self, x, y):
        add, mul = self._add, self._mul
        xa, xb, xc, xd = self.decode(x)
        ya, yb, yc, yd = self.decode(y)
        return self.encode(
            add[mul[xa, ya], mul[xb, yc]],
            add[mul[xa, yb], mul[xb, yd]],
            add[mul[xc, ya], mul[xd, yc]],
            add[mul[xc, yb], mul[xd, yd]],
        )

    def inv_arr(self, x):
        add, mul, neg, inv = self._add, self._mul, self._neg, self._inv
        a, b, c, d = self.decode(x)
        det = add[mul[a, d], neg[mul[b, c]]]
        di = inv[det]
        return self.encode(
            mul[di, d], mul[di, neg[b]], mul[di, neg[c]], mul[di, a]
        )

    def det_arr(self, x):
        add, mul, neg = self._add, self._mul, self._neg
        a, b, c, d = self.decode(x)
        return add[mul[a, d], neg[mul[b, c]]]

    def member_mask(self, codes):
        det = self.det_arr(codes)
        if self.kind == "SL":
            return det == 1
        return self._unit[det]

    def identity_code(self):
        return int(self.encode(1, 0, 0, 1))

    def generators(self):
        R = self.R
        gens = []
        for i in range(R.d):
            base = t_power(R.F, i)
            for c in R.F.units():
                gens.append(mat_code(translation(R, R.reduce_poly(base.scale(c)))))
        gens.append(mat_code(weyl(R)))
        if self.kind == "GL":
            for u in unit_group_generators(R):
                gens.append(mat_code(Mat2(R, u, 0, 0, 1)))
        return sorted(set(gens))

    def order_formula(self):
        """Exact order from the modulus factorization."""
        n = 1
        for p, e in factorize(self.R.modulus)[1]:
            s = p.norm_size()
            size = s**e
            if self.kind == "SL":
                n *= size**3 * (s * s - 1) // (s * s)
            else:
                n *= size**4 * (s - 1) * (s * s - 1) // (s**3)
        return n

    def elements(self):
        key = (self.R, self.kind)
        arr = _ENUM_CACHE.get(key)
        if arr is None:
            n = self.order_formula()
            if n > self.cap:
                raise CapExceeded(
                    f"{self.kind}2 group of order {n} exceeds the cap of {self.cap}"
                )
            arr = closure(self, self.generators(), cap=n)
            if arr.size != n:
                raise AssertionError(
                    f"closure found {arr.size} elements, formula says {n}"
                )
            _ENUM_CACHE[key] = arr
        return arr

    def order(self):
        return self.order_formula()

    def contains_code(self, code):
        return contains_sorted(self.elements(), code)

    def __repr__(self):
        return f"ResidueMatrixGroup({self.kind}2, {self.R!r})"
