"""Exact scalar arithmetic: F_{p^s} and Z/p^k.

Scalars are packed into plain Python ints so that polynomial and matrix
layers stay allocation-free.  An F_{p^s} element with coordinates
(c_0, ..., c_{s-1}) in the fixed polynomial basis is encoded as
c_0 + c_1*p + ... + c_{s-1}*p^(s-1).  For s == 1 this is just a residue.
"""

from __future__ import annotations

from functools import lru_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, int(n ** 0.5) + 1):
        if n % q == 0:
            return False
    return True


def _poly_mul_mod(a, b, modpoly, p):
    # a, b: coefficient lists (low degree first), reduced mod modpoly.
    s = len(modpoly) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # reduce: modpoly is monic
    for i in range(len(out) - 1, s - 1, -1):
        c = out[i]
        if c:
            for j in range(s + 1):
                out[i - s + j] = (out[i - s + j] - c * modpoly[j]) % p
    return [c % p for c in out[:s]] + [0] * max(0, s - len(out))


def _poly_divides(div, poly, p):
    # monic div | poly over F_p?  Synthetic long division, remainder test.
    rem = [c % p for c in poly]
    dd = len(div) - 1
    for i in range(len(rem) - 1, dd - 1, -1):
        lead = rem[i]
        if lead:
            shift = i - dd
            for j in range(dd + 1):
                rem[shift + j] = (rem[shift + j] - lead * div[j]) % p
    return all(c == 0 for c in rem[:dd])


def _monic_polys(p, deg):
    for code in range(p ** deg):
        coeffs = []
        c = code
        for _ in range(deg):
            coeffs.append(c % p)
            c //= p
        yield coeffs + [1]


def _is_irreducible(poly, p):
    # Trial division by all lower-degree monic polynomials: tiny degrees only.
    s = len(poly) - 1
    for deg in range(1, s // 2 + 1):
        for div in _monic_polys(p, deg):
            if _poly_divides(div, poly, p):
                return False
    return True


def smallest_irreducible(p: int, s: int):
    """Lexicographically smallest monic irreducible of degree s over F_p."""
    if s == 1:
        return [0, 1]
    for code in range(p ** s):
        coeffs = []
        c = code
        for _ in range(s):
            coeffs.append(c % p)
            c //= p
        poly = coeffs + [1]
        if poly[0] == 0:
            continue
        if _is_irreducible(poly, p):
            return poly
    raise RuntimeError("no irreducible polynomial found")  # pragma: no cover


class GF:
    """The field F_{p^s} with table-driven arithmetic.

    Elements are ints in [0, p^s).  p must be an odd prime >= 3; the whole
    workbench assumes p >= 3.
    """

    def __init__(self, p: int, s: int = 1):
        if not is_prime(p) or p < 3:
            raise ValueError("p must be an odd prime >= 3, got %r" % (p,))
        if s < 1:
            raise ValueError("field exponent s must be >= 1")
        self.p = p
        self.s = s
        self.order = p ** s
        self.char = p
        self.zero = 0
        self.one = 1
        self.modpoly = smallest_irreducible(p, s)
        self._mul = self._build_mul_table()
        self._inv = self._build_inv_table()
        self._frob = [self.pow(a, p) for a in range(self.order)]

    # -- encoding -----------------------------------------------------
    def coords(self, a: int):
        out = []
        for _ in range(self.s):
            out.append(a % self.p)
            a //= self.p
        return out

    def from_coords(self, cs):
        a = 0
        for c in reversed(list(cs)):
            a = a * self.p + (c % self.p)
        return a

    def from_int(self, n: int) -> int:
        """Image of the rational integer n (prime field element)."""
        return n % self.p

    # -- arithmetic ---------------------------------------------------
    def _build_mul_table(self):
        q = self.order
        tab = [0] * (q * q)
        for a in range(q):
            ca = self.coords(a)
            for b in range(a, q):
                cb = self.coords(b)
                prod = self.from_coords(_poly_mul_mod(ca, cb, self.modpoly, self.p))
                tab[a * q + b] = prod
                tab[b * q + a] = prod
        return tab

    def _build_inv_table(self):
        q = self.order
        inv = [0] * q
        for a in range(1, q):
            if inv[a]:
                continue
            b = self.pow(a, q - 2)
            inv[a] = b
            inv[b] = a
        return inv

    def add(self, a: int, b: int) -> int:
        if self.s == 1:
            return (a + b) % self.p
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.s):
            out += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg(self, a: int) -> int:
        if self.s == 1:
            return (-a) % self.p
        p = self.p
        out = 0
        mult = 1
        for _ in range(self.s):
            out += ((-a) % p) * mult
            a //= p
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return self._mul[a * self.order + b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(%d^%d)" % (self.p, self.s))
        return self._inv[a]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.from_coords(
                    _poly_mul_mod(self.coords(out), self.coords(base), self.modpoly, self.p)
                )
            base = self.from_coords(
                _poly_mul_mod(self.coords(base), self.coords(base), self.modpoly, self.p)
            )
            e >>= 1
        return out

    def frob(self, a: int) -> int:
        """Frobenius x -> x^p; identity on the prime field."""
        return self._frob[a]

    def frob_inv(self, a: int) -> int:
        return self._frob.index(a) if self.s > 1 else a

    def elements(self):
        return range(self.order)

    def pth_power_coset(self):
        """The subgroup of (p-1)-st powers in k^* (allowed a_0 with a root b_0)."""
        return sorted({self.pow(a, self.p - 1) for a in range(1, self.order)})

    def root_p_minus_1(self, a0: int) -> int:
        """Some b_0 with b_0^(p-1) == a_0, or raise ValueError."""
        for b in range(1, self.order):
            if self.pow(b, self.p - 1) == a0:
                return b
        raise ValueError("a_0=%d is not a (p-1)-st power in GF(%d^%d)" % (a0, self.p, self.s))

    def __repr__(self):
        return "GF(%d^%d)" % (self.p, self.s)

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.s) == (other.p, other.s)

    def __hash__(self):
        return hash(("GF", self.p, self.s))


class Zmod:
    """The ring Z/p^k, elements plain ints in [0, p^k).

    Used for the p-adic side (k = 2 normally, k = 3 inside the extended
    pd_log mode).  The Witt Frobenius on Z/p^k (for residue field F_p)
    is the identity.
    """

    def __init__(self, p: int, k: int):
        if not is_prime(p) or p < 3:
            raise ValueError("p must be an odd prime >= 3, got %r" % (p,))
        if k < 1:
            raise ValueError("k must be >= 1")
        self.p = p
        self.k = k
        self.char = p
        self.modulus = p ** k
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("non-unit %d in Z/%d^%d" % (a, self.p, self.k))
        return pow(a, -1, self.modulus)

    def frob(self, a):
        return a % self.modulus

    def __repr__(self):
        return "Zmod(%d^%d)" % (self.p, self.k)

    def __eq__(self, other):
        return isinstance(other, Zmod) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash(("Zmod", self.p, self.k))


@lru_cache(maxsize=None)
def gf(p: int, s: int = 1) -> GF:
    return GF(p, s)


@lru_cache(maxsize=None)
def zmod(p: int, k: int) -> Zmod:
    return Zmod(p, k)
