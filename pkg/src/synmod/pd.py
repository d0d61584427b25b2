"""Truncated divided-power envelope model.

The envelope of J = (T_oo, T_1...T_d - T_0) inside Z/p^k[T_0..T_d,T_oo]
is a free module over Z/p^k[T_1..T_d] on the monomials g1^[i] g2^[j]
once the coordinates are canonicalized (T_oo = g1, T_0 = T_1...T_d - g2).
Elements are dicts {(beta, i, j): coeff} with beta the T_1..T_d exponent.
Structure constants are exact integers, so Frobenius and its divided
versions phi_r are computed with honest p-valuations.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

from .chart import Chart
from .fields import Zmod, zmod
from .poly import DivisibilityError, TruncatedPoly


class PDElement:
    """An element of the truncated PD envelope over Z/p^k."""

    __slots__ = ("ring", "d", "window", "terms")

    def __init__(self, ring: Zmod, d: int, window: int, terms=None):
        self.ring = ring
        self.d = d
        self.window = window
        clean = {}
        if terms:
            for (beta, i, j), c in terms.items():
                c %= ring.modulus
                if c and sum(beta) <= window:
                    clean[(tuple(beta), i, j)] = c
        self.terms = clean

    @classmethod
    def zero(cls, ring, d, window):
        return cls(ring, d, window)

    @classmethod
    def one(cls, ring, d, window):
        return cls(ring, d, window, {((0,) * d, 0, 0): 1})

    @classmethod
    def gen(cls, ring, d, window, which):
        """g1 (which=1) or g2 (which=2)."""
        i, j = (1, 0) if which == 1 else (0, 1)
        return cls(ring, d, window, {((0,) * d, i, j): 1})

    @classmethod
    def t_monomial(cls, ring, d, window, beta, c=1):
        return cls(ring, d, window, {(tuple(beta), 0, 0): c})

    def _like(self, terms):
        return PDElement(self.ring, self.d, self.window, terms)

    def __add__(self, other):
        out = dict(self.terms)
        mod = self.ring.modulus
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % mod
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._like(out)

    def __neg__(self):
        mod = self.ring.modulus
        return self._like({k: (-c) % mod for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        mod = self.ring.modulus
        return self._like({k: (v * c) % mod for k, v in self.terms.items()})

    def __mul__(self, other):
        mod = self.ring.modulus
        N = self.window
        out = {}
        for (b1, i1, j1), c1 in self.terms.items():
            for (b2, i2, j2), c2 in other.terms.items():
                beta = tuple(a + b for a, b in zip(b1, b2))
                if sum(beta) > N:
                    continue
                c = c1 * c2 * comb(i1 + i2, i1) * comb(j1 + j2, j1) % mod
                if not c:
                    continue
                key = (beta, i1 + i2, j1 + j2)
                v = (out.get(key, 0) + c) % mod
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return self._like(out)

    def pd_filter(self, min_pd=None, max_pd=None):
        out = {}
        for (beta, i, j), c in self.terms.items():
            if min_pd is not None and i + j < min_pd:
                continue
            if max_pd is not None and i + j > max_pd:
                continue
            out[(beta, i, j)] = c
        return self._like(out)

    def in_pd_ideal(self, r):
        """Membership in the J^[r] span, counting the p-adic budget of the
        coefficient toward the divided-power degree (J is compatible with
        the canonical divided powers on (p))."""
        p = self.ring.p
        for (_, i, j), c in self.terms.items():
            v = 0
            while c % p == 0 and v + i + j < r:
                c //= p
                v += 1
            if i + j + v < r:
                return False
        return True

    def is_zero(self):
        return not self.terms

    def min_valuation(self):
        p = self.ring.p
        best = self.ring.k
        for c in self.terms.values():
            v = 0
            while c % p == 0 and v < self.ring.k:
                c //= p
                v += 1
            best = min(best, v)
            if best == 0:
                break
        return best

    def divide_exact(self, steps):
        """Exact division by p^steps, result over Z/p^(k-steps)."""
        R = self.ring
        if R.k <= steps:
            raise ValueError("not enough p-adic digits to divide")
        q = R.p ** steps
        out = {}
        for k, c in self.terms.items():
            if c % q:
                raise DivisibilityError(
                    "PD coefficient %d at %r not divisible by p^%d" % (c, k, steps))
            out[k] = c // q
        return PDElement(zmod(R.p, R.k - steps), self.d, self.window, out)

    def reduce_ring(self, ring: Zmod):
        return PDElement(ring, self.d, self.window,
                         {k: c % ring.modulus for k, c in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, PDElement) and self.ring == other.ring
                and self.terms == other.terms)

    def __repr__(self):
        if not self.terms:
            return "PD(0)"
        bits = []
        for (beta, i, j) in sorted(self.terms):
            c = self.terms[(beta, i, j)]
            mono = "*".join("T%d^%d" % (k + 1, e) for k, e in enumerate(beta) if e)
            pd = ("g1[%d]" % i if i else "") + ("g2[%d]" % j if j else "")
            bits.append("*".join(x for x in (str(c), mono, pd) if x))
        return "PD(%s)" % " + ".join(bits)


class PDRing:
    """Factory bound to a chart: builds elements, Frobenius, phi_r."""

    def __init__(self, chart: Chart, k: int = 1, window=None):
        if chart.s != 1:
            raise ValueError("the PD side runs over the prime field (s = 1)")
        self.chart = chart
        self.ring = zmod(chart.p, k)
        self.d = chart.d
        self.window = chart.window if window is None else window

    def zero(self):
        return PDElement.zero(self.ring, self.d, self.window)

    def one(self):
        return PDElement.one(self.ring, self.d, self.window)

    def g1(self):
        return PDElement.gen(self.ring, self.d, self.window, 1)

    def g2(self):
        return PDElement.gen(self.ring, self.d, self.window, 2)

    def t(self, lam, e=1):
        beta = [0] * self.d
        beta[lam - 1] = e
        return PDElement.t_monomial(self.ring, self.d, self.window, beta)

    def tbar(self):
        """T_1 * ... * T_d (the image of T_0 + g2)."""
        return PDElement.t_monomial(self.ring, self.d, self.window, (1,) * self.d)

    def divided_power(self, x: PDElement, n: int) -> PDElement:
        """x^[n] for x in the PD ideal (every term with p-adic or PD budget).

        Computed additively: (sum_k x_k)^[n] = sum over compositions of
        products x_k^[n_k], with x_k the monomial terms of x.  Each
        monomial term c * T^beta g1^[i] g2^[j] (i + j >= 1) has
        (term)^[a] = c^a T^(a beta) * (g1^[i] g2^[j])^[a], and the inner
        divided power reduces with exact integer structure constants.
        """
        if n == 0:
            return self.one()
        if not x.in_pd_ideal(1):
            raise ValueError("divided powers need an element of the PD ideal")
        items = sorted(x.terms.items())
        return self._dp_sum(items, n)

    def _dp_sum(self, items, n):
        if n == 0:
            return self.one()
        if not items:
            return self.zero()
        (key, c), rest = items[0], items[1:]
        out = self.zero()
        for a in range(n + 1):
            lead = self._dp_term(key, c, a)
            if lead.is_zero() and a > 0:
                continue
            tail = self._dp_sum(rest, n - a)
            out = out + lead * tail
        return out

    def _dp_term(self, key, c, a):
        beta, i, j = key
        if a == 0:
            return self.one()
        mod = self.ring.modulus
        coeff = pow(c, a, mod)
        nb = tuple(b * a for b in beta)
        if sum(nb) > self.window:
            return self.zero()
        # (g1^[i] g2^[j])^[a] = ((ai)!(aj)! / (a! (i!)^a (j!)^a)) g1^[ai] g2^[aj]
        if i and j:
            num = factorial(a * i) * factorial(a * j)
            den = factorial(a) * factorial(i) ** a * factorial(j) ** a
            if num % den:
                raise ArithmeticError("divided power structure constant broke")
            coeff = coeff * (num // den) % mod
        elif i:
            coeff = coeff * (factorial(a * i) // (factorial(a) * factorial(i) ** a)) % mod
        elif j:
            coeff = coeff * (factorial(a * j) // (factorial(a) * factorial(j) ** a)) % mod
        if not coeff:
            return self.zero()
        return PDElement(self.ring, self.d, self.window,
                         {(nb, a * i, a * j): coeff})

    def from_chart_poly(self, f: TruncatedPoly) -> PDElement:
        """Substitute T_0 = T_1...T_d - g2, T_oo = g1 into a chart poly."""
        chart = self.chart
        out = self.zero()
        for e, c in f.terms.items():
            a0 = e[0]
            ainf = e[chart.inf]
            lam = tuple(e[1: chart.d + 1])
            base = PDElement.t_monomial(self.ring, self.d, self.window, lam, c)
            piece = base
            if ainf:
                g1p = self.g1()
                for _ in range(ainf):
                    piece = piece * g1p
            if a0:
                t0 = self.tbar() - self.g2()
                for _ in range(a0):
                    piece = piece * t0
            out = out + piece
        return out

    def frobenius(self, x: PDElement) -> PDElement:
        """phi with phi(T_i) = T_i^p, phi(g1^[i]) and phi(g2^[j]) expanded
        with exact integer constants (g1^p and T-bar^p - T_0^p images)."""
        p = self.chart.p
        out = self.zero()
        phi_g2 = self._phi_g2()
        for (beta, i, j), c in x.terms.items():
            nb = tuple(b * p for b in beta)
            if sum(nb) > self.window:
                continue
            piece = PDElement.t_monomial(self.ring, self.d, self.window, nb, c)
            if i:
                # phi(g1^[i]) = (g1^p)^[i] = ((pi)!/(i! (p!)^i)) (p!)^i ... =
                # ((pi)!/ i!) g1^[pi]
                coeff = factorial(p * i) // factorial(i)
                piece = piece * PDElement(self.ring, self.d, self.window,
                                          {((0,) * self.d, p * i, 0): coeff})
            if j:
                pg = self.divided_power(phi_g2, j)
                piece = piece * pg
            out = out + piece
        return out

    @lru_cache(maxsize=8)
    def _phi_g2(self) -> PDElement:
        """phi(g2) = Tbar^p - T_0^p with T_0 = Tbar - g2 expanded."""
        p = self.chart.p
        tbar = self.tbar()
        t0 = tbar - self.g2()
        t0p = self.one()
        for _ in range(p):
            t0p = t0p * t0
        tbarp = self.one()
        for _ in range(p):
            tbarp = tbarp * tbar
        return tbarp - t0p

    def phi_r(self, x: PDElement, r: int) -> PDElement:
        """Frobenius divided by p^r on J^[r]; result one digit lower.

        x must be given over Z/p^(r+k'); a failed divisibility raises
        DivisibilityError (that is a verification finding against the
        p-divisibility lemma, not a crash path).
        """
        if r < 0:
            raise ValueError("r >= 0 required")
        if not x.in_pd_ideal(r):
            raise ValueError("phi_%d needs an element supported in J^[%d]" % (r, r))
        y = self.frobenius(x)
        if r == 0:
            return y
        return y.divide_exact(r)
