"""Chart and divisor data for the local polynomial model.

A chart is the affine patch F_q[T_0, ..., T_d, T_oo] truncated at total
degree N, with log structure on T_0..T_d (T_0 is the parameter T) and
one non-log coordinate T_oo.  Divisors are supported on the coordinates
T_1..T_d with non-negative multiplicities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .fields import gf, zmod, is_prime
from .poly import TruncatedPoly


@dataclass(frozen=True)
class EisensteinData:
    """Mod-p trace of the Eisenstein polynomial T^e + p(a_{e-1}T^{e-1}+...+a_0).

    coeffs = (a_0, ..., a_{e-1}) as packed field elements; a_0 != 0.
    """
    e: int
    coeffs: tuple

    def __post_init__(self):
        if self.e < 1:
            raise ValueError("ramification index e must be >= 1")
        if len(self.coeffs) != self.e:
            raise ValueError("need exactly e coefficients a_0..a_{e-1}")
        if self.coeffs[0] == 0:
            raise ValueError("a_0 must be a unit (Eisenstein condition)")

    @property
    def a0(self):
        return self.coeffs[0]


class Chart:
    """Prime, field size, variable layout, degree window, Eisenstein data."""

    def __init__(self, p, d, window, s=1, eisenstein=None, log_infinity=False):
        if not is_prime(p) or p < 3:
            raise ValueError("p must be an odd prime >= 3 (standing assumption)")
        if d < 1:
            raise ValueError("need at least one semistable coordinate (d >= 1)")
        if window < p:
            raise ValueError("window N must be >= p so a Frobenius-safe degree exists")
        self.p = p
        self.d = d
        self.s = s
        self.window = window
        self.field = gf(p, s)
        self.nvars = d + 2          # T_0..T_d plus T_oo
        self.inf = d + 1            # index of T_oo
        self.log_vars = tuple(range(d + 1))  # T_0..T_d carry log structure
        self.log_infinity = log_infinity     # dT_oo slot handling, see forms.py
        if eisenstein is None:
            eisenstein = EisensteinData(1, (self.field.one,))
        self.eisenstein = eisenstein
        self.mod_p = zmod(p, 1)
        self.mod_p2 = zmod(p, 2)

    def zero_exp(self):
        return (0,) * self.nvars

    def poly_one(self, ring=None):
        ring = ring or self.field
        return TruncatedPoly.one(ring, self.nvars, self.window)

    def poly_var(self, i, ring=None):
        ring = ring or self.field
        return TruncatedPoly.variable(ring, self.nvars, self.window, i)

    def poly_monomial(self, exps, c=None, ring=None):
        ring = ring or self.field
        return TruncatedPoly.monomial(ring, self.nvars, self.window, exps, c)

    def var_name(self, i):
        return "Too" if i == self.inf else "T%d" % i

    def __repr__(self):
        return "Chart(p=%d, d=%d, N=%d, s=%d, e=%d)" % (
            self.p, self.d, self.window, self.s, self.eisenstein.e)

    def key(self):
        return (self.p, self.d, self.window, self.s, self.eisenstein.e,
                self.eisenstein.coeffs)


class Divisor:
    """Effective divisor sum m_lambda * {T_lambda = 0}, lambda in 1..d."""

    def __init__(self, chart: Chart, mult=None):
        self.chart = chart
        m = dict(mult or {})
        for lam, v in m.items():
            if not (1 <= lam <= chart.d):
                raise ValueError("divisor component %r is not one of T_1..T_d" % (lam,))
            if v < 0:
                raise ValueError("multiplicities must be non-negative")
        self.mult = {lam: v for lam, v in sorted(m.items()) if v > 0}

    @classmethod
    def from_vector(cls, chart, vec):
        return cls(chart, {i + 1: v for i, v in enumerate(vec)})

    def vector(self):
        return tuple(self.mult.get(lam, 0) for lam in range(1, self.chart.d + 1))

    def get(self, lam):
        return self.mult.get(lam, 0)

    def is_zero(self):
        return not self.mult

    def is_reduced(self):
        return all(v == 1 for v in self.mult.values())

    def prime(self) -> "Divisor":
        """D' with m'_lambda = smallest l such that p*l >= m_lambda."""
        p = self.chart.p
        return Divisor(self.chart, {lam: -(-v // p) for lam, v in self.mult.items()})

    def scale(self, c) -> "Divisor":
        return Divisor(self.chart, {lam: c * v for lam, v in self.mult.items()})

    def dominates(self, other) -> bool:
        return all(self.get(lam) >= other.get(lam)
                   for lam in range(1, self.chart.d + 1))

    def twist_exps(self):
        """Exponent vector of the twisting monomial prod T_lambda^m_lambda."""
        e = [0] * self.chart.nvars
        for lam, v in self.mult.items():
            e[lam] = v
        return tuple(e)

    def total(self):
        return sum(self.mult.values())

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.mult == other.mult

    def __hash__(self):
        return hash(frozenset(self.mult.items()))

    def __repr__(self):
        if not self.mult:
            return "Divisor(0)"
        return "Divisor(%s)" % " + ".join("%d*{T%d}" % (v, l) for l, v in self.mult.items())


def filtration_chain(divisor: Divisor):
    """Canonical chain m_0 = D, m_1, ..., m_t = p*D' raising exactly one
    component per step (largest deficit first, smallest index on ties).

    Returns (levels, steps) with levels[i] the i-th divisor and steps[i]
    the component mu(i) raised between levels[i] and levels[i+1]; the
    graded piece at step i is the mod-T_mu complex twisted by levels[i].
    """
    chart = divisor.chart
    goal = divisor.prime().scale(chart.p)
    assert goal.dominates(divisor), "p*D' must dominate D componentwise"
    cur = dict(divisor.mult)
    levels = [divisor]
    steps = []
    while Divisor(chart, cur) != goal:
        deficit = {lam: goal.get(lam) - cur.get(lam, 0)
                   for lam in range(1, chart.d + 1)
                   if goal.get(lam) > cur.get(lam, 0)}
        lam = max(deficit, key=lambda l: (deficit[l], -l))
        steps.append(lam)
        cur[lam] = cur.get(lam, 0) + 1
        levels.append(Divisor(chart, dict(cur)))
    for a, b in zip(levels, levels[1:]):
        assert b.total() - a.total() == 1
    return levels, steps
