"""Degree-truncated multivariate polynomial arithmetic.

Everything lives in R[T_1..T_n] / (total degree > N), R one of the exact
scalar rings from fields.py.  Truncation makes every positive-degree
element nilpotent, so principal units invert by geometric series and the
logarithm of 1 + (p-divisible) converges.  No floating point anywhere.
"""

from __future__ import annotations

from .fields import GF, Zmod, zmod


class WindowError(ValueError):
    """A computation stepped outside its declared divisibility/degree policy."""


class DivisibilityError(ArithmeticError):
    """A claimed p-divisibility failed; a verification finding, not a bug."""


def exp_total(e):
    return sum(e)

def exp_add(a, b):
    return tuple(x + y for x, y in zip(a, b))

def exp_scale(a, c):
    return tuple(x * c for x in a)

def exp_ge(a, b):
    return all(x >= y for x, y in zip(a, b))


class TruncatedPoly:
    """Immutable truncated polynomial: terms map exponent-tuple -> scalar."""

    __slots__ = ("ring", "nvars", "window", "terms")

    def __init__(self, ring, nvars, window, terms=None):
        self.ring = ring
        self.nvars = nvars
        self.window = window
        clean = {}
        if terms:
            for e, c in terms.items():
                if c and exp_total(e) <= window:
                    if len(e) != nvars:
                        raise ValueError("exponent arity %d != nvars %d" % (len(e), nvars))
                    clean[e] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, ring, nvars, window):
        return cls(ring, nvars, window)

    @classmethod
    def const(cls, ring, nvars, window, c):
        return cls(ring, nvars, window, {(0,) * nvars: c})

    @classmethod
    def one(cls, ring, nvars, window):
        return cls.const(ring, nvars, window, ring.one)

    @classmethod
    def monomial(cls, ring, nvars, window, exps, c=None):
        c = ring.one if c is None else c
        return cls(ring, nvars, window, {tuple(exps): c})

    @classmethod
    def variable(cls, ring, nvars, window, i):
        e = [0] * nvars
        e[i] = 1
        return cls.monomial(ring, nvars, window, e)

    # -- basics -----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def constant(self):
        return self.terms.get((0,) * self.nvars, 0)

    def _like(self, terms):
        return TruncatedPoly(self.ring, self.nvars, self.window, terms)

    def _check(self, other):
        if self.ring != other.ring:
            raise WindowError("scalar ring mismatch: %r vs %r" % (self.ring, other.ring))
        if self.window != other.window or self.nvars != other.nvars:
            raise WindowError("window/arity mismatch")

    def __add__(self, other):
        self._check(other)
        R = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = R.add(out.get(e, 0), c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self._like(out)

    def __neg__(self):
        R = self.ring
        return self._like({e: R.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        R = self.ring
        if not c:
            return self._like({})
        return self._like({e: R.mul(c, v) for e, v in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        R = self.ring
        N = self.window
        out = {}
        for e1, c1 in self.terms.items():
            t1 = exp_total(e1)
            for e2, c2 in other.terms.items():
                if t1 + exp_total(e2) > N:
                    continue
                e = exp_add(e1, e2)
                v = R.add(out.get(e, 0), R.mul(c1, c2))
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return self._like(out)

    def pow(self, k):
        if k < 0:
            raise ValueError("negative power on a non-unit path")
        out = TruncatedPoly.one(self.ring, self.nvars, self.window)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def min_total_degree(self):
        return min((exp_total(e) for e in self.terms), default=None)

    def divisible_by_monomial(self, exps):
        return all(exp_ge(e, tuple(exps)) for e in self.terms)

    def shift(self, exps):
        """Multiply by the monomial T^exps (window-truncating)."""
        N = self.window
        out = {}
        for e, c in self.terms.items():
            e2 = exp_add(e, tuple(exps))
            if exp_total(e2) <= N:
                out[e2] = c
        return self._like(out)

    def unshift(self, exps):
        """Exact division by the monomial T^exps; all terms must be divisible."""
        ex = tuple(exps)
        out = {}
        for e, c in self.terms.items():
            if not exp_ge(e, ex):
                raise DivisibilityError("term %r not divisible by T^%r" % (e, ex))
            out[tuple(a - b for a, b in zip(e, ex))] = c
        return self._like(out)

    def homogeneous_part(self, var, deg):
        """Terms whose exponent on `var` is exactly deg."""
        return self._like({e: c for e, c in self.terms.items() if e[var] == deg})

    def eval_zero(self, var):
        """Set T_var = 0."""
        return self._like({e: c for e, c in self.terms.items() if e[var] == 0})

    def __eq__(self, other):
        return (isinstance(other, TruncatedPoly) and self.ring == other.ring
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms):
            mono = "*".join("T%d^%d" % (i, k) for i, k in enumerate(e) if k)
            bits.append("%s%s" % (self.terms[e], "*" + mono if mono else ""))
        return " + ".join(bits)


def frobenius_poly(f: TruncatedPoly) -> TruncatedPoly:
    """The chart Frobenius lift: T_i -> T_i^p, scalars by the ring Frobenius.

    Terms whose p-scaled exponent leaves the window are discarded
    (truncated-ring semantics).
    """
    R = f.ring
    p = R.char if isinstance(R, GF) else R.p
    out = {}
    for e, c in f.terms.items():
        e2 = exp_scale(e, p)
        if exp_total(e2) <= f.window:
            out[e2] = R.frob(c)
    return TruncatedPoly(R, f.nvars, f.window, out)


def principal_unit_inverse(u: TruncatedPoly) -> TruncatedPoly:
    """Inverse of u = 1 + f, f of positive degree, by geometric series."""
    R = u.ring
    one = TruncatedPoly.one(R, u.nvars, u.window)
    f = u - one
    if f.constant():
        raise WindowError("not a principal unit: constant term %r != 1" % (u.constant(),))
    out = one
    term = one
    mindeg = f.min_total_degree()
    if mindeg is None:
        return one
    for _ in range(u.window // max(mindeg, 1) + 1):
        term = -(term * f)
        if term.is_zero():
            break
        out = out + term
    return out


def reduce_mod_p(f: TruncatedPoly, target_ring=None) -> TruncatedPoly:
    """Z/p^k coefficients -> Z/p^j (j < k) or GF(p) coefficients."""
    R = f.ring
    if not isinstance(R, Zmod):
        raise TypeError("reduce_mod_p expects Z/p^k coefficients")
    tgt = target_ring if target_ring is not None else zmod(R.p, 1)
    mod = tgt.modulus if isinstance(tgt, Zmod) else tgt.p
    return TruncatedPoly(tgt, f.nvars, f.window,
                         {e: c % mod for e, c in f.terms.items()})


def lift_to(f: TruncatedPoly, ring: Zmod) -> TruncatedPoly:
    """Canonical lift of a Z/p^j poly to Z/p^k, k >= j (termwise int lift)."""
    return TruncatedPoly(ring, f.nvars, f.window, dict(f.terms))


def exact_divide_by_p(f: TruncatedPoly, steps: int = 1) -> TruncatedPoly:
    """Divide a Z/p^k poly by p^steps exactly, landing in Z/p^(k-steps).

    A non-divisible coefficient raises DivisibilityError: that means a
    claimed p-divisibility lemma failed on this input (a finding).
    """
    R = f.ring
    if not isinstance(R, Zmod) or R.k <= steps:
        raise TypeError("need Z/p^k coefficients with k > steps")
    q = R.p ** steps
    out = {}
    for e, c in f.terms.items():
        if c % q:
            raise DivisibilityError(
                "coefficient %d of T^%r is not divisible by p^%d" % (c, e, steps))
        out[e] = c // q
    return TruncatedPoly(zmod(R.p, R.k - steps), f.nvars, f.window, out)


def pd_log(u: TruncatedPoly, extended: bool = False) -> TruncatedPoly:
    """log u for a principal unit u = 1 + f over Z/p^k.

    Series sum_{j>=1} (-1)^(j+1) f^j / j.  In the safe (default) policy any
    surviving term with p | j raises WindowError; the extended policy
    tracks one extra p-adic digit (internally Z/p^(k+1)) and performs the
    division by p exactly, raising DivisibilityError if the coefficient
    budget is genuinely missing.
    """
    R = u.ring
    if not isinstance(R, Zmod):
        raise TypeError("pd_log expects Z/p^k coefficients")
    p = R.p
    one = TruncatedPoly.one(R, u.nvars, u.window)
    f = u - one
    if f.constant():
        raise WindowError("pd_log argument is not a principal unit")
    if f.is_zero():
        return TruncatedPoly.zero(R, u.nvars, u.window)
    mindeg = max(f.min_total_degree(), 1)
    kmax = u.window // mindeg
    if not extended:
        out = TruncatedPoly.zero(R, u.nvars, u.window)
        power = one
        for j in range(1, kmax + 1):
            power = power * f
            if power.is_zero():
                break
            if j % p == 0:
                raise WindowError(
                    "pd_log needs denominator %d (p | %d); window too large "
                    "for the safe policy, use extended mode" % (j, j))
            c = R.inv(j % R.modulus)
            term = power.scale(c)
            out = out + (term if j % 2 == 1 else -term)
        return out
    # extended: one extra digit
    big = zmod(p, R.k + 1)
    fl = lift_to(f, big)
    out = TruncatedPoly.zero(big, u.nvars, u.window)
    power = TruncatedPoly.one(big, u.nvars, u.window)
    for j in range(1, kmax + 1):
        power = power * fl
        if power.is_zero():
            break
        v = 0
        jj = j
        while jj % p == 0:
            v += 1
            jj //= p
        if v > 1:
            raise WindowError("pd_log extended mode supports one extra digit only")
        term = power
        if v:
            # f^j is well-defined mod p^(k+1) because p | j; the quotient is
            # then well-defined mod p^k, which is all the final reduction uses.
            term = lift_to(exact_divide_by_p(term, 1), big)
        term = term.scale(big.inv(jj % big.modulus))
        out = out + (term if j % 2 == 1 else -term)
    return reduce_mod_p(out, R)
