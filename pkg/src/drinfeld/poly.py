"""Univariate polynomials over a small finite field, monic ideals, residue rings.

A polynomial is stored as a tuple of field elements, lowest degree first,
with no trailing zeros.  The serialized text form is the digit string in the
same order, so "1101" over F_2 is 1 + t + t^3 and "0" is the zero
polynomial.  The degree of the zero polynomial is reported as -1.
"""

from functools import lru_cache

import numpy as np

from .errors import CapExceeded, DomainError
from .fields import DIGIT_CHARS

RING_TABLE_CAP = 512


class Poly:
    """Immutable polynomial in one variable t over a FieldSpec."""

    __slots__ = ("F", "coeffs", "_hash")

    def __init__(self, F, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.F = F
        self.coeffs = tuple(cs)
        self._hash = hash((F.label, self.coeffs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return len(self.coeffs) <= 1

    def leading(self):
        if not self.coeffs:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def constant_term(self):
        return self.coeffs[0] if self.coeffs else 0

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def monic(self):
        """Scale by the inverse of the leading coefficient."""
        if self.is_zero():
            raise DomainError("zero polynomial cannot be made monic")
        lead = self.coeffs[-1]
        return self if lead == 1 else self.scale(self.F.inv(lead))

    def norm_size(self):
        """Number of residues modulo this polynomial, q^degree."""
        if self.is_zero():
            raise DomainError("zero polynomial has no finite residue count")
        return self.F.q ** self.degree

    def scale(self, c):
        F = self.F
        if c == 0:
            return Poly(F, ())
        return Poly(F, tuple(F.mul(c, x) for x in self.coeffs))

    def shift(self, k):
        """Multiply by t^k."""
        if self.is_zero():
            return self
        return Poly(self.F, (0,) * k + self.coeffs)

    def __add__(self, other):
        F = self.F
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return Poly(F, out)

    def __neg__(self):
        return Poly(self.F, tuple(self.F.neg(c) for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.F
        if self.is_zero() or other.is_zero():
            return Poly(F, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return Poly(F, out)

    def __pow__(self, e):
        if e < 0:
            raise DomainError("negative polynomial powers are not defined")
        r = Poly(self.F, (1,))
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __divmod__(self, other):
        F = self.F
        if other.is_zero():
            raise DomainError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(F, ()), self
        quot = [0] * (dq + 1)
        lead_inv = F.inv(other.coeffs[-1])
        db = other.degree
        while len(rem) - 1 >= db and rem:
            c = rem[-1]
            if c == 0:
                rem.pop()
                continue
            k = len(rem) - 1 - db
            factor = F.mul(c, lead_inv)
            quot[k] = factor
            for j, b in enumerate(other.coeffs):
                rem[k + j] = F.sub(rem[k + j], F.mul(factor, b))
            rem.pop()
        return Poly(F, quot), Poly(F, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def evaluate(self, c):
        F = self.F
        r = 0
        for a in reversed(self.coeffs):
            r = F.add(F.mul(r, c), a)
        return r

    def substitute(self, g):
        """Compose: the polynomial with g substituted for t."""
        F = self.F
        r = Poly(F, ())
        for a in reversed(self.coeffs):
            r = r * g + Poly(F, (a,))
        return r

    def frobenius_coeffs(self, e=1):
        """Apply the field Frobenius e times to every coefficient."""
        F = self.F
        return Poly(F, tuple(F.frob_iter(c, e) for c in self.coeffs))

    def digits_str(self):
        if not self.coeffs:
            return "0"
        return "".join(DIGIT_CHARS[c] for c in self.coeffs)

    def pretty(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            if i == 0:
                parts.append(DIGIT_CHARS[c])
            else:
                head = "" if c == 1 else DIGIT_CHARS[c] + "*"
                parts.append(f"{head}t" if i == 1 else f"{head}t^{i}")
        return " + ".join(parts)

    def sort_key(self):
        return (self.degree, self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.F is other.F and self.coeffs == other.coeffs

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Poly({self.F.label}, {self.digits_str()!r})"


def poly(F, coeffs):
    return Poly(F, coeffs)


def zero(F):
    return Poly(F, ())


def one(F):
    return Poly(F, (1,))


def constant(F, c):
    return Poly(F, (F.check(c),))


def t_var(F):
    return Poly(F, (0, 1))


def t_power(F, k):
    return Poly(F, (0,) * k + (1,))


def poly_from_string(F, text):
    text = text.strip()
    if not text:
        raise DomainError("empty polynomial string")
    coeffs = []
    for ch in text:
        v = DIGIT_CHARS.find(ch.lower())
        if v < 0 or v >= F.q:
            raise DomainError(f"digit {ch!r} is not an element of F_{F.q}")
        coeffs.append(v)
    return Poly(F, coeffs)


def poly_from_text(F, text):
    """Parse either serialization: digit string or sum of monomials.

    A string without the variable letter is read as a digit string, lowest
    degree first ("011" is t + t^2).  Otherwise it is read as monomials
    "c", "t", "c*t^k" (the "*" optional) joined by "+" or "-", with each
    coefficient a single digit in the field, e.g. "t^3 + 2t + 1".
    """
    s = text.strip().lower().replace(" ", "")
    if not s:
        raise DomainError("empty polynomial string")
    if "t" not in s:
        return poly_from_string(F, s)
    coeffs = {}
    for signed in s.replace("-", "+-").split("+"):
        if not signed:
            if s.startswith("+") or "++" in s or s.endswith("+"):
                raise DomainError(f"polynomial term missing in {text!r}")
            continue
        term = signed.lstrip("-")
        negate = len(signed) - len(term)
        if negate > 1 or not term:
            raise DomainError(f"polynomial term {signed!r} is malformed in {text!r}")
        head, _, tail = term.partition("t")
        c = 1
        if head:
            head = head.rstrip("*")
            v = DIGIT_CHARS.find(head) if len(head) == 1 else -1
            if v < 0 or v >= F.q:
                raise DomainError(
                    f"coefficient {head!r} is not a digit of F_{F.q} in {text!r}"
                )
            c = v
        if "t" in term:
            if tail:
                if not tail.startswith("^") or not tail[1:].isdigit():
                    raise DomainError(f"polynomial term {term!r} is malformed in {text!r}")
                k = int(tail[1:])
            else:
                k = 1
        else:
            k = 0
        if negate:
            c = F.neg(c)
        coeffs[k] = F.add(coeffs.get(k, 0), c)
    top = max(coeffs)
    return Poly(F, tuple(coeffs.get(i, 0) for i in range(top + 1)))


def poly_gcd(a, b):
    """Monic greatest common divisor; gcd(0, 0) is 0."""
    while not b.is_zero():
        a, b = b, a % b
    return a if a.is_zero() else a.monic()


def poly_extgcd(a, b):
    """Return (g, u, v) with u*a + v*b = g and g the monic gcd."""
    F = a.F
    r0, r1 = a, b
    s0, s1 = one(F), zero(F)
    t0, t1 = zero(F), one(F)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    c = F.inv(r0.leading())
    return r0.monic(), s0.scale(c), t0.scale(c)


def poly_lcm(a, b):
    if a.is_zero() or b.is_zero():
        return zero(a.F)
    return ((a * b) // poly_gcd(a, b)).monic()


def monic_polys(F, deg):
    """All monic polynomials of exactly this degree."""
    if deg < 0:
        raise DomainError("degree must be nonnegative")
    q = F.q
    for code in range(q**deg):
        coeffs = []
        c = code
        for _ in range(deg):
            coeffs.append(c % q)
            c //= q
        yield Poly(F, tuple(coeffs) + (1,))


def polys_below(F, deg_bound):
    """All polynomials of degree strictly below the bound (including 0)."""
    q = F.q
    for code in range(q**deg_bound):
        coeffs = []
        c = code
        for _ in range(deg_bound):
            coeffs.append(c % q)
            c //= q
        yield Poly(F, coeffs)


@lru_cache(maxsize=None)
def _irreducibles_cached(F, d):
    out = []
    for f in monic_polys(F, d):
        if is_irreducible(f):
            out.append(f)
    return tuple(out)


def irreducibles(F, d):
    """Monic irreducibles of exactly degree d, in coefficient order."""
    return list(_irreducibles_cached(F, d))


def is_irreducible(f):
    if f.degree < 1:
        return False
    for d in range(1, f.degree // 2 + 1):
        for g in monic_polys(f.F, d):
            if (f % g).is_zero():
                return False
    return True


def factorize(f):
    """Factor a nonzero polynomial into monic irreducibles.

    Returns (unit, [(irreducible, multiplicity), ...]) sorted by the
    irreducibles' coefficient order.
    """
    if f.is_zero():
        raise DomainError("cannot factor the zero polynomial")
    unit = f.leading()
    g = f.monic()
    factors = []
    d = 1
    while 2 * d <= g.degree:
        for p in irreducibles(g.F, d):
            if (g % p).is_zero():
                m = 0
                while (g % p).is_zero():
                    g = g // p
                    m += 1
                factors.append((p, m))
        d += 1
    if g.degree > 0:
        factors.append((g, 1))
    factors.sort(key=lambda pm: pm[0].sort_key())
    return unit, factors


class MonicIdeal:
    """An ideal of F_q[t], generated by a monic polynomial or zero."""

    __slots__ = ("gen",)

    def __init__(self, gen):
        if not gen.is_zero():
            gen = gen.monic()
        self.gen = gen

    @property
    def F(self):
        return self.gen.F

    def is_zero(self):
        return self.gen.is_zero()

    def is_unit_ideal(self):
        return self.gen.degree == 0

    def contains(self, p):
        if self.is_zero():
            return p.is_zero()
        return (p % self.gen).is_zero()

    def contains_ideal(self, other):
        if other.is_zero():
            return True
        return self.contains(other.gen)

    def sum_with(self, other):
        return MonicIdeal(poly_gcd(self.gen, other.gen))

    def product(self, other):
        return MonicIdeal(self.gen * other.gen)

    def intersect(self, other):
        return MonicIdeal(poly_lcm(self.gen, other.gen))

    def index(self):
        """Number of residues, q^degree of the generator."""
        if self.is_zero():
            raise DomainError("the zero ideal has infinite index")
        return self.gen.norm_size()

    def divisors(self):
        """All ideals containing this one, i.e. monic divisors of the generator."""
        if self.is_zero():
            raise DomainError("the zero ideal has infinitely many divisors")
        _, factors = factorize(self.gen) if self.gen.degree > 0 else (1, [])
        divs = [one(self.F)]
        for p, m in factors:
            new = []
            pk = one(self.F)
            for _ in range(m + 1):
                for d in divs:
                    new.append(d * pk)
                pk = pk * p
            divs = new
        divs.sort(key=lambda f: f.sort_key())
        return [MonicIdeal(d) for d in divs]

    def __eq__(self, other):
        return isinstance(other, MonicIdeal) and self.gen == other.gen

    def __hash__(self):
        return hash(("ideal", self.gen))

    def __repr__(self):
        return f"MonicIdeal({self.gen.digits_str()!r})"


def ideal(gen):
    return MonicIdeal(gen)


class ResidueRing:
    """The quotient F_q[t]/(f) for a monic modulus f of degree >= 1.

    Elements are integers 0..q^d - 1; the base-q digits of a code are the
    coefficients of the canonical representative, lowest degree first.
    """

    def __init__(self, modulus):
        if not modulus.is_monic() or modulus.degree < 1:
            raise DomainError("residue ring needs a monic modulus of degree >= 1")
        self.modulus = modulus
        self.F = modulus.F
        self.q = modulus.F.q
        self.d = modulus.degree
        self.size = self.q**self.d
        self._tables = None
        self._crt = None

    def lift(self, code):
        q = self.q
        coeffs = []
        for _ in range(self.d):
            coeffs.append(code % q)
            code //= q
        return Poly(self.F, coeffs)

    def reduce_poly(self, p):
        r = p % self.modulus
        code = 0
        for c in reversed(r.coeffs + (0,) * (self.d - len(r.coeffs))):
            code = code * self.q + c
        return code

    def zero(self):
        return 0

    def one(self):
        return 1

    def t_code(self):
        return self.q if self.d > 1 else self.reduce_poly(t_var(self.F))

    def from_field(self, c):
        return self.F.check(c)

    def add(self, a, b):
        F = self.F
        q = self.q
        out = 0
        mult = 1
        for _ in range(self.d):
            out += F.add(a % q, b % q) * mult
            a //= q
            b //= q
            mult *= q
        return out

    def neg(self, a):
        F = self.F
        q = self.q
        out = 0
        mult = 1
        for _ in range(self.d):
            out += F.neg(a % q) * mult
            a //= q
            mult *= q
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        return self.reduce_poly(self.lift(a) * self.lift(b))

    def scale(self, c, a):
        """Multiply the code a by the field element c."""
        F = self.F
        q = self.q
        out = 0
        mult = 1
        for _ in range(self.d):
            out += F.mul(c, a % q) * mult
            a //= q
            mult *= q
        return out

    def pow_(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def is_unit(self, a):
        return poly_gcd(self.lift(a), self.modulus).degree == 0

    def inv(self, a):
        g, u, _ = poly_extgcd(self.lift(a), self.modulus)
        if g.degree != 0:
            raise DomainError(f"code {a} is not a unit in this residue ring")
        return self.reduce_poly(u)

    def elements(self):
        return range(self.size)

    def units(self):
        return [a for a in self.elements() if self.is_unit(a)]

    def unit_count(self):
        n = 1
        for p, m in factorize(self.modulus)[1]:
            s = p.norm_size()
            n *= s ** (m - 1) * (s - 1)
        return n

    def tables(self):
        """Dense numpy add/mul/neg/unit tables; refused above the size cap."""
        if self._tables is None:
            if self.size > RING_TABLE_CAP:
                raise CapExceeded(
                    f"residue ring of size {self.size} exceeds table cap {RING_TABLE_CAP}"
                )
            n = self.size
            add = np.zeros((n, n), dtype=np.int64)
            mul = np.zeros((n, n), dtype=np.int64)
            neg = np.zeros(n, dtype=np.int64)
            unit = np.zeros(n, dtype=bool)
            inv = np.zeros(n, dtype=np.int64)
            for a in range(n):
                neg[a] = self.neg(a)
                if self.is_unit(a):
                    unit[a] = True
                    inv[a] = self.inv(a)
                for b in range(a, n):
                    s = self.add(a, b)
                    m = self.mul(a, b)
                    add[a, b] = add[b, a] = s
                    mul[a, b] = mul[b, a] = m
            self._tables = (add, mul, neg, unit, inv)
        return self._tables

    def crt_components(self):
        """Prime-power component rings and the idempotent lifts gluing them.

        Returns (rings, idempotents) where the i-th idempotent is 1 in the
        i-th component and 0 elsewhere, as a code of this ring.
        """
        if self._crt is None:
            _, factors = factorize(self.modulus)
            comps = []
            for p, m in factors:
                comps.append(residue_ring(p**m))
            idems = []
            for p, m in factors:
                g = p**m
                rest = self.modulus // g
                _, u, _ = poly_extgcd(rest, g)
                idems.append(self.reduce_poly(u * rest))
            self._crt = (comps, idems)
        return self._crt

    def crt_split(self, code):
        comps, _ = self.crt_components()
        p = self.lift(code)
        return tuple(R.reduce_poly(p) for R in comps)

    def crt_recombine(self, codes):
        comps, idems = self.crt_components()
        acc = 0
        for R, e, c in zip(comps, idems, codes):
            acc = self.add(acc, self.mul(e, self.reduce_poly(R.lift(c))))
        return acc

    def __eq__(self, other):
        return isinstance(other, ResidueRing) and self.modulus == other.modulus

    def __hash__(self):
        return hash(("ring", self.modulus))

    def __repr__(self):
        return f"ResidueRing({self.modulus.digits_str()!r} over {self.F.label})"


@lru_cache(maxsize=None)
def _residue_ring_cached(modulus):
    return ResidueRing(modulus)


def residue_ring(modulus):
    """Cached residue ring for a monic modulus."""
    if not modulus.is_monic():
        if modulus.is_zero():
            raise DomainError("residue ring needs a nonzero modulus")
        modulus = modulus.monic()
    return _residue_ring_cached(modulus)
