"""Vectorized finite-group engine on integer element codes.

Every realization presents its elements as int64 codes and implements the
group operation and inversion as numpy-broadcastable array functions.  All
higher algorithms (closure, normal closure, core, derived subgroup, quotient
construction, composition factors) work on sorted unique code arrays and are
shared across realizations.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .config import DEFAULT_GROUP_CAP
from .errors import CapExceeded, DomainError
from .fields import _is_prime

# ---------------------------------------------------------------------------
# base protocol


class FinGroup:
    """Abstract finite group on int64 element codes."""

    def op(self, a, b):
        raise NotImplementedError

    def inv_arr(self, a):
        raise NotImplementedError

    def identity_code(self):
        raise NotImplementedError

    def elements(self):
        """Sorted unique array of all element codes."""
        raise NotImplementedError

    def order(self):
        return int(self.elements().size)

    def mul(self, x, y):
        return int(self.op(np.int64(x), np.int64(y)))

    def inv(self, x):
        return int(self.inv_arr(np.int64(x)))

    def conj(self, x, g):
        return self.mul(self.mul(self.inv(g), x), g)

    def commutator(self, x, y):
        return self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))


def as_code_array(codes):
    return np.unique(np.asarray(list(codes), dtype=np.int64))


def contains_sorted(arr, x):
    i = int(np.searchsorted(arr, x))
    return i < arr.size and int(arr[i]) == int(x)


def conj_array(G, arr, g):
    """Conjugate every code in arr by g."""
    gi = np.int64(G.inv(g))
    return np.sort(G.op(G.op(gi, arr), np.int64(g)))


# ---------------------------------------------------------------------------
# closure and friends


def _closure_impl(G, seeds, bound, strict):
    gens = as_code_array(list(seeds) + [G.identity_code()])
    known = gens
    frontier = gens
    while frontier.size:
        prods = np.unique(G.op(frontier[:, None], gens[None, :]).ravel())
        new = prods[np.isin(prods, known, assume_unique=True, invert=True)]
        if new.size == 0:
            break
        known = np.union1d(known, new)
        if bound is not None and known.size > bound:
            if strict:
                raise CapExceeded(
                    f"subgroup closure grew past the cap of {bound} elements"
                )
            return None
        frontier = new
    return known


def closure(G, gens, cap=DEFAULT_GROUP_CAP):
    """Sorted element array of the subgroup generated by the given codes."""
    return _closure_impl(G, gens, cap, strict=True)


def closure_bounded(G, gens, bound):
    """Like closure, but quietly returns None once the bound is passed."""
    return _closure_impl(G, gens, bound, strict=False)


def conj_orbit(G, parent_gens, seeds, cap=DEFAULT_GROUP_CAP):
    """Smallest set containing the seeds and stable under conjugation by the
    subgroup the parent generators generate."""
    pg = as_code_array(parent_gens)
    orbit = as_code_array(seeds)
    frontier = orbit
    while frontier.size:
        batches = []
        for g in pg:
            batches.append(conj_array(G, frontier, int(g)))
        prods = np.unique(np.concatenate(batches))
        new = prods[np.isin(prods, orbit, assume_unique=True, invert=True)]
        if new.size == 0:
            break
        orbit = np.union1d(orbit, new)
        if orbit.size > cap:
            raise CapExceeded(f"conjugation orbit grew past the cap of {cap}")
        frontier = new
    return orbit


def normal_closure(G, parent_gens, seeds, cap=DEFAULT_GROUP_CAP):
    """Subgroup generated by all conjugates of the seeds under the parent."""
    return closure(G, conj_orbit(G, parent_gens, seeds, cap), cap)


def is_normal(G, parent_gens, sub):
    for g in parent_gens:
        if not np.array_equal(conj_array(G, sub, int(g)), sub):
            return False
    return True


def core_in(G, parent_gens, sub):
    """Largest subgroup of sub that is normal under the parent generators.

    Repeatedly replaces the candidate by its intersection with each
    conjugate; the fixed point is normal, sits inside sub, and contains
    every normal subgroup that does, so it is the core.
    """
    C = np.unique(np.asarray(sub, dtype=np.int64))
    changed = True
    while changed:
        changed = False
        for g in parent_gens:
            conj = conj_array(G, C, int(g))
            newC = np.intersect1d(C, conj, assume_unique=True)
            if newC.size != C.size:
                C = newC
                changed = True
    return C


def small_generating_set(G, arr, cap=None):
    """Greedy generating set for the subgroup whose elements are arr."""
    target = arr.size
    if cap is None:
        cap = target
    e = G.identity_code()
    gens = []
    cur = as_code_array([e])
    for x in arr:
        if contains_sorted(cur, x):
            continue
        gens.append(int(x))
        cur = closure_bounded(G, gens, cap)
        if cur is None:
            raise DomainError("element array is not closed under the group operation")
        if cur.size == target:
            break
    if cur.size != target:
        raise DomainError("element array is not closed under the group operation")
    return gens


def pow_arr(G, arr, e):
    """Elementwise power by square and multiply."""
    out = np.full(np.shape(arr), G.identity_code(), dtype=np.int64)
    base = np.array(arr, dtype=np.int64, copy=True)
    e = int(e)
    if e < 0:
        base = G.inv_arr(base)
        e = -e
    while e:
        if e & 1:
            out = G.op(out, base)
        base = G.op(base, base)
        e >>= 1
    return out


def orders_arr(G, arr):
    """Multiplicative order of every code in arr."""
    e = G.identity_code()
    out = np.ones(arr.shape, dtype=np.int64)
    cur = np.array(arr, dtype=np.int64, copy=True)
    active = cur != e
    k = 1
    while active.any():
        k += 1
        cur[active] = G.op(cur[active], arr[active])
        done = active & (cur == e)
        out[done] = k
        active &= ~done
        if k > 10**7:
            raise AssertionError("order computation ran away")
    return out


def derived_subgroup(G, arr, cap=DEFAULT_GROUP_CAP):
    """Commutator subgroup of the subgroup with element array arr."""
    gens = small_generating_set(G, arr)
    comms = []
    for a in gens:
        for b in gens:
            comms.append(G.commutator(a, b))
    return normal_closure(G, gens, comms, cap)


def is_abelian_subset(G, arr):
    gens = small_generating_set(G, arr)
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            if G.mul(a, b) != G.mul(b, a):
                return False
    return True


def prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def abelian_invariants(G, H, N):
    """Elementary divisors of the abelian quotient H/N as sorted prime powers.

    Works entirely by counting solutions of x^(p^j) in N, so the quotient
    group is never materialized.  N must be normal in H with H/N abelian.
    """
    H = np.unique(np.asarray(H, dtype=np.int64))
    N = np.unique(np.asarray(N, dtype=np.int64))
    qsize = H.size // N.size
    if H.size % N.size:
        raise DomainError("normal subgroup size does not divide the subgroup size")
    invs = []
    for p in prime_factors(qsize):
        logs = [0]
        j = 1
        while True:
            powed = pow_arr(G, H, p**j)
            cj = int(np.isin(powed, N).sum())
            if cj % N.size:
                raise DomainError("quotient is not a group: is N normal in H?")
            m = cj // N.size
            s = 0
            while m > 1:
                if m % p:
                    raise DomainError("quotient is not abelian: counts are off")
                m //= p
                s += 1
            logs.append(s)
            if logs[-1] == logs[-2]:
                break
            j += 1
        deltas = [logs[i + 1] - logs[i] for i in range(len(logs) - 2)]
        if deltas:
            for i in range(1, deltas[0] + 1):
                lam = sum(1 for d in deltas if d >= i)
                invs.append(p**lam)
    return tuple(sorted(invs))


# ---------------------------------------------------------------------------
# realizations


class SubgroupAsGroup(FinGroup):
    """A subgroup viewed as a group in its own right, sharing parent codes."""

    def __init__(self, parent, arr):
        while isinstance(parent, SubgroupAsGroup):
            parent = parent.parent
        self.parent = parent
        self._els = np.unique(np.asarray(arr, dtype=np.int64))

    def op(self, a, b):
        return self.parent.op(a, b)

    def inv_arr(self, a):
        return self.parent.inv_arr(a)

    def identity_code(self):
        return self.parent.identity_code()

    def elements(self):
        return self._els


class QuotientGroup(FinGroup):
    """H/N presented on canonical coset representatives (minimum code).

    N must be normal in H.  The representative map multiplies by all of N
    and takes the minimum, chunked to bound memory.
    """

    def __init__(self, parent, H, N):
        self.parent = parent
        self.N = np.unique(np.asarray(N, dtype=np.int64))
        H = np.unique(np.asarray(H, dtype=np.int64))
        self._e = int(self._rep(np.asarray([parent.identity_code()]))[0])
        self._els = np.unique(self._rep(H))

    def _rep(self, arr):
        if self.N.size == 1:
            return arr
        flat = np.asarray(arr, dtype=np.int64).ravel()
        out = np.empty_like(flat)
        chunk = max(1, (1 << 22) // self.N.size)
        for i in range(0, flat.size, chunk):
            seg = flat[i : i + chunk]
            prods = self.parent.op(seg[:, None], self.N[None, :])
            out[i : i + chunk] = prods.min(axis=1)
        return out.reshape(np.shape(arr))

    def op(self, a, b):
        return self._rep(self.parent.op(a, b))

    def inv_arr(self, a):
        return self._rep(self.parent.inv_arr(a))

    def identity_code(self):
        return self._e

    def elements(self):
        return self._els


class ProductGroup(FinGroup):
    """Direct product packed as index1 * |G2| + index2.

    Indexes refer to positions in the factors' sorted element arrays, so
    both factors must be fully enumerated.  The product itself is never
    enumerated unless elements() is called explicitly.
    """

    def __init__(self, G1, G2):
        self.G1 = G1
        self.G2 = G2
        self.e1 = G1.elements()
        self.e2 = G2.elements()
        self.n2 = int(self.e2.size)
        self._e = self.pack(
            np.int64(G1.identity_code()), np.int64(G2.identity_code())
        )

    def pack(self, c1, c2):
        i1 = np.searchsorted(self.e1, c1)
        i2 = np.searchsorted(self.e2, c2)
        return i1 * self.n2 + i2

    def unpack(self, codes):
        i1, i2 = np.divmod(codes, self.n2)
        return self.e1[i1], self.e2[i2]

    def op(self, a, b):
        a1, a2 = self.unpack(a)
        b1, b2 = self.unpack(b)
        return self.pack(self.G1.op(a1, b1), self.G2.op(a2, b2))

    def inv_arr(self, a):
        a1, a2 = self.unpack(a)
        return self.pack(self.G1.inv_arr(a1), self.G2.inv_arr(a2))

    def identity_code(self):
        return int(self._e)

    def order(self):
        return int(self.e1.size) * int(self.e2.size)

    def elements(self):
        raise CapExceeded("full direct products are not enumerated")

    def first_factor_slice(self, arr):
        """Codes x of the first factor with (x, identity) in arr."""
        c1, c2 = self.unpack(np.asarray(arr, dtype=np.int64))
        mask = c2 == self.G2.identity_code()
        return np.unique(c1[mask])

    def second_projection(self, arr):
        _, c2 = self.unpack(np.asarray(arr, dtype=np.int64))
        return np.unique(c2)

    def first_projection(self, arr):
        c1, _ = self.unpack(np.asarray(arr, dtype=np.int64))
        return np.unique(c1)


class AdditiveQuotientGroup(FinGroup):
    """The additive group F_q^n / W on base-q packed non-pivot coordinates."""

    def __init__(self, W):
        self.W = W
        self.F = W.F
        self.q = W.F.q
        self.k = W.codim
        self.size = self.q**self.k

    def op(self, a, b):
        F = self.F
        q = self.q
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        mult = 1
        for _ in range(self.k):
            da = (a // mult) % q
            db = (b // mult) % q
            out += F.np_add[da, db] * mult
            mult *= q
        return out if out.shape else np.int64(out)

    def inv_arr(self, a):
        F = self.F
        q = self.q
        out = np.zeros(np.shape(a), dtype=np.int64)
        mult = 1
        for _ in range(self.k):
            da = (a // mult) % q
            out += F.np_neg[da] * mult
            mult *= q
        return out if out.shape else np.int64(out)

    def identity_code(self):
        return 0

    def elements(self):
        return np.arange(self.size, dtype=np.int64)

    def coords_to_code(self, coords):
        code = 0
        for c in reversed(coords):
            code = code * self.q + c
        return code

    def code_to_coords(self, code):
        out = []
        for _ in range(self.k):
            out.append(int(code % self.q))
            code //= self.q
        return tuple(out)

    def vector_to_code(self, vec):
        """Quotient image of an ambient coordinate vector."""
        return self.coords_to_code(self.W.coset_coords(vec))


class SymmetricGroup(FinGroup):
    """Permutations of 0..n-1 packed base n by their image tuples."""

    def __init__(self, n):
        if not 1 <= n <= 7:
            raise DomainError("symmetric groups are supported up to degree 7")
        self.n = n
        self.powtab = np.array([n**i for i in range(n)], dtype=np.int64)
        self._els = None

    def perm_to_code(self, perm):
        code = 0
        for x in reversed(perm):
            code = code * self.n + x
        return code

    def code_to_perm(self, code):
        out = []
        for _ in range(self.n):
            out.append(int(code % self.n))
            code //= self.n
        return tuple(out)

    def op(self, a, b):
        """Compose: the result sends i to a(b(i))."""
        n = self.n
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(n):
            bi = (b // self.powtab[i]) % n
            abi = (a // self.powtab[bi]) % n
            out += abi * self.powtab[i]
        return out if out.shape else np.int64(out)

    def inv_arr(self, a):
        n = self.n
        out = np.zeros(np.shape(a), dtype=np.int64)
        for i in range(n):
            ai = (a // self.powtab[i]) % n
            out += i * self.powtab[ai]
        return out if out.shape else np.int64(out)

    def identity_code(self):
        return int(self.perm_to_code(tuple(range(self.n))))

    def elements(self):
        if self._els is None:
            self._els = np.sort(
                np.array(
                    [self.perm_to_code(p) for p in permutations(range(self.n))],
                    dtype=np.int64,
                )
            )
        return self._els


class TableGroup(FinGroup):
    """Explicit multiplication table on codes 0..n-1, mainly for tests."""

    def __init__(self, table):
        self.table = np.asarray(table, dtype=np.int64)
        n = self.table.shape[0]
        if self.table.shape != (n, n):
            raise DomainError("multiplication table must be square")
        e = None
        for i in range(n):
            if np.array_equal(self.table[i], np.arange(n)):
                e = i
                break
        if e is None:
            raise DomainError("table has no identity row")
        self._e = e
        inv = np.zeros(n, dtype=np.int64)
        for i in range(n):
            js = np.nonzero(self.table[i] == e)[0]
            if js.size != 1:
                raise DomainError("table row lacks a unique inverse")
            inv[i] = js[0]
        self._inv = inv
        self.n = n

    def op(self, a, b):
        return self.table[a, b]

    def inv_arr(self, a):
        return self._inv[a]

    def identity_code(self):
        return self._e

    def elements(self):
        return np.arange(self.n, dtype=np.int64)


# ---------------------------------------------------------------------------
# composition factors


@dataclass(frozen=True)
class FactorDescriptor:
    """A single composition factor, identified by order.

    kind is one of "cyclic_prime", "psl2_family", "other_simple",
    "unidentified".  param holds the prime for cyclic factors and the
    smallest field size whose fractional linear group has this order for
    the psl2 family.
    """

    kind: str
    order: int
    param: int = 0

    def sort_key(self):
        return (self.order, self.kind, self.param)


def _prime_powers_from(start):
    m = start
    while True:
        if len(prime_factors(m)) == 1:
            yield m
        m += 1


def psl2_order_param(n):
    """Smallest prime power m >= 4 whose fractional linear group order is n.

    The order sequence is not monotone across parities (the value at 8
    exceeds the one at 9), so the scan only stops once the smallest order
    still possible exceeds n."""
    for m in _prime_powers_from(4):
        if m * (m * m - 1) // 2 > n:
            return None
        o = m * (m * m - 1) // (1 if m % 2 == 0 else 2)
        if o == n:
            return m


def is_psl2_order_over(q, n):
    """True if n is q^s (q^(2s) - 1) / gcd(2, q^s - 1) for some s >= 1."""
    s = 1
    while True:
        m = q**s
        v = m * (m * m - 1) // (1 if m % 2 == 0 else 2)
        if v == n:
            return True
        if v > n:
            return False
        s += 1


def describe_simple(order):
    if _is_prime(order):
        return FactorDescriptor("cyclic_prime", order, order)
    m = psl2_order_param(order)
    if m is not None:
        return FactorDescriptor("psl2_family", order, m)
    return FactorDescriptor("other_simple", order)


def _find_proper_normal(K, cap):
    """Element array of some proper nontrivial normal subgroup, or None."""
    els = K.elements()
    n = int(els.size)
    if n == 1 or _is_prime(n):
        return None
    gens = small_generating_set(K, els)
    orders = orders_arr(K, els)
    abelian = True
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            if K.mul(a, b) != K.mul(b, a):
                abelian = False
                break
        if not abelian:
            break
    if abelian:
        p = prime_factors(n)[0]
        idx = int(np.nonzero(orders % p == 0)[0][0])
        y = pow_arr(K, els[idx : idx + 1], int(orders[idx]) // p)[0]
        return closure(K, [int(y)], cap)
    # a central element of prime order generates a normal subgroup
    central = np.ones(n, dtype=bool)
    for g in gens:
        central &= K.op(els, np.int64(g)) == K.op(np.int64(g), els)
    central &= els != K.identity_code()
    if central.any():
        idx = int(np.nonzero(central)[0][0])
        p = prime_factors(int(orders[idx]))[0]
        y = pow_arr(K, els[idx : idx + 1], int(orders[idx]) // p)[0]
        return closure(K, [int(y)], cap)
    # general scan: normal closures of single elements, small orders first
    scan = np.lexsort((els, orders))
    skip = as_code_array([K.identity_code()])
    for idx in scan:
        x = int(els[idx])
        if contains_sorted(skip, x):
            continue
        cls = conj_orbit(K, gens, [x], cap)
        N = closure_bounded(K, cls, n // 2)
        if N is None:
            skip = np.union1d(skip, cls)
        else:
            return N
    return None


def composition_factors(G, arr=None, cap=DEFAULT_GROUP_CAP):
    """Jordan-Hoelder factors of the subgroup with element array arr."""
    if arr is None:
        arr = G.elements()
    stack = [SubgroupAsGroup(G, arr)]
    out = []
    while stack:
        K = stack.pop()
        n = K.order()
        if n == 1:
            continue
        N = _find_proper_normal(K, cap)
        if N is None:
            out.append(describe_simple(n))
        else:
            stack.append(SubgroupAsGroup(K, N))
            stack.append(QuotientGroup(K, K.elements(), N))
    return sorted(out, key=lambda f: f.sort_key())


def all_subgroups(G, max_order=200):
    """Every subgroup, by breadth-first closure of one-element extensions."""
    els = G.elements()
    if els.size > max_order:
        raise CapExceeded(
            f"subgroup lattice enumeration capped at order {max_order}"
        )
    triv = as_code_array([G.identity_code()])
    seen = {triv.tobytes(): triv}
    frontier = [triv]
    while frontier:
        H = frontier.pop()
        for x in els:
            if contains_sorted(H, int(x)):
                continue
            K = closure(G, list(H) + [int(x)], cap=int(els.size))
            key = K.tobytes()
            if key not in seen:
                seen[key] = K
                frontier.append(K)
    return sorted(seen.values(), key=lambda a: (a.size, a.tobytes()))


def minimal_proper_index(G):
    """Smallest index of a proper subgroup, by full lattice enumeration."""
    subs = all_subgroups(G)
    n = G.order()
    proper = [s.size for s in subs if s.size < n]
    return n // max(proper)
