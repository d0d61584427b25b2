"""Logarithmic differential forms in the dlog basis.

A q-form is stored as terms (alpha, I) -> scalar meaning
scalar * T^alpha * dlog T_{i1} ^ ... ^ dlog T_{iq}, I sorted ascending.
The non-log coordinate T_oo participates through the constrained slot:
`inf in I` requires alpha_inf >= 1, which encodes the honest dT_oo form
T^(alpha - e_inf) dT_oo ^ ...; with that constraint the usual formulas
below realize the true (log along T_0..T_d, plain along T_oo) de Rham
complex, and every operation preserves multidegree.

Modes:
  full          -- ambient forms, dlog T_0 allowed, coefficients free
  relative      -- no dlog T_0 (forms relative to the parameter line)
  special_fiber -- dlog T_0 allowed, coefficients reduced mod T_0
  y             -- both: the home of the special-fiber twisted complex
"""

from __future__ import annotations

from .chart import Chart, Divisor
from .poly import TruncatedPoly, WindowError, exp_add, exp_scale, exp_total

MODES = ("full", "relative", "special_fiber", "y")


def _mode_flags(mode):
    if mode not in MODES:
        raise ValueError("unknown mode %r" % (mode,))
    allow_dlog_t0 = mode in ("full", "special_fiber")
    reduce_t0 = mode in ("special_fiber", "y")
    return allow_dlog_t0, reduce_t0


def merge_wedge(I, J):
    """Concatenate-and-sort two index tuples; (sign, sorted) or None if repeat."""
    merged = list(I) + list(J)
    sign = 1
    # insertion sort, counting inversions
    for i in range(1, len(merged)):
        j = i
        while j > 0 and merged[j - 1] > merged[j]:
            merged[j - 1], merged[j] = merged[j], merged[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and merged[j - 1] == merged[j]:
            return None
    return sign, tuple(merged)


class LogForm:
    """A (not necessarily homogeneous) log differential form on a chart."""

    __slots__ = ("chart", "ring", "mode", "terms")

    def __init__(self, chart: Chart, ring, mode="full", terms=None):
        self.chart = chart
        self.ring = ring
        self.mode = mode
        allow_t0, reduce_t0 = _mode_flags(mode)
        clean = {}
        if terms:
            N = chart.window
            inf = chart.inf
            for (alpha, I), c in terms.items():
                if not c:
                    continue
                if exp_total(alpha) > N:
                    continue
                if reduce_t0 and alpha[0] != 0:
                    continue
                for idx in I:
                    if idx == inf:
                        if alpha[inf] < 1:
                            raise ValueError(
                                "dlog T_oo slot needs alpha_oo >= 1 in term %r" % ((alpha, I),))
                    elif idx not in chart.log_vars:
                        raise ValueError("index %d carries no log structure" % idx)
                    elif idx == 0 and not allow_t0:
                        raise ValueError("dlog T_0 is not available in mode %r" % mode)
                key = (alpha, tuple(I))
                clean[key] = c
        self.terms = clean

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, chart, ring=None, mode="full"):
        return cls(chart, ring or chart.field, mode)

    @classmethod
    def from_poly(cls, chart, poly: TruncatedPoly, mode="full"):
        return cls(chart, poly.ring, mode,
                   {(e, ()): c for e, c in poly.terms.items()})

    @classmethod
    def dlog_var(cls, chart, i, ring=None, mode="full"):
        ring = ring or chart.field
        if i == chart.inf:
            raise ValueError("bare dlog T_oo is not a form; multiply by T_oo")
        return cls(chart, ring, mode, {(chart.zero_exp(), (i,)): ring.one})

    @classmethod
    def monomial_form(cls, chart, alpha, I, c=None, ring=None, mode="full"):
        ring = ring or chart.field
        return cls(chart, ring, mode, {(tuple(alpha), tuple(sorted(I))): c or ring.one})

    # -- basics ----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def degrees(self):
        return sorted({len(I) for (_, I) in self.terms})

    def homogeneous_degree(self, q):
        return LogForm(self.chart, self.ring, self.mode,
                       {k: c for k, c in self.terms.items() if len(k[1]) == q})

    def _like(self, terms, mode=None):
        return LogForm(self.chart, self.ring, mode or self.mode, terms)

    def _check(self, other):
        if self.chart is not other.chart and self.chart.key() != other.chart.key():
            raise WindowError("chart mismatch")
        if self.ring != other.ring:
            raise WindowError("scalar ring mismatch")
        if self.mode != other.mode:
            raise WindowError("mode mismatch: %r vs %r" % (self.mode, other.mode))

    def __add__(self, other):
        self._check(other)
        R = self.ring
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = R.add(out.get(k, 0), c)
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._like(out)

    def __neg__(self):
        R = self.ring
        return self._like({k: R.neg(c) for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        R = self.ring
        if not c:
            return self._like({})
        return self._like({k: R.mul(c, v) for k, v in self.terms.items()})

    def poly_mul(self, poly: TruncatedPoly):
        R = self.ring
        N = self.chart.window
        out = {}
        for (alpha, I), c in self.terms.items():
            for e, v in poly.terms.items():
                a2 = exp_add(alpha, e)
                if exp_total(a2) > N:
                    continue
                key = (a2, I)
                w = R.add(out.get(key, 0), R.mul(c, v))
                if w:
                    out[key] = w
                else:
                    out.pop(key, None)
        return self._like(out)

    def coefficient_poly(self, I):
        """The coefficient of dlog T_I as a truncated polynomial."""
        I = tuple(I)
        return TruncatedPoly(self.ring, self.chart.nvars, self.chart.window,
                             {alpha: c for (alpha, J), c in self.terms.items() if J == I})

    def multidegrees(self):
        return sorted({alpha for (alpha, _) in self.terms})

    def component(self, alpha):
        return self._like({k: c for k, c in self.terms.items() if k[0] == tuple(alpha)})

    def __eq__(self, other):
        return (isinstance(other, LogForm) and self.ring == other.ring
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "LogForm(0)"
        names = self.chart.var_name
        bits = []
        for (alpha, I) in sorted(self.terms):
            mono = "*".join("%s^%d" % (names(i), k) for i, k in enumerate(alpha) if k)
            dl = "^".join("dlog %s" % names(i) for i in I)
            piece = "*".join(x for x in (str(self.terms[(alpha, I)]), mono, dl) if x)
            bits.append(piece)
        return "LogForm(%s)" % " + ".join(bits)


def wedge(a: LogForm, b: LogForm) -> LogForm:
    """Exterior product; signs by permutation parity of the merged index sets."""
    a._check(b)
    R = a.ring
    N = a.chart.window
    out = {}
    for (al, I), c in a.terms.items():
        for (be, J), v in b.terms.items():
            m = merge_wedge(I, J)
            if m is None:
                continue
            alpha = exp_add(al, be)
            if exp_total(alpha) > N:
                continue
            sign, K = m
            w = R.mul(c, v)
            if sign < 0:
                w = R.neg(w)
            key = (alpha, K)
            t = R.add(out.get(key, 0), w)
            if t:
                out[key] = t
            else:
                out.pop(key, None)
    return a._like(out)


def form_weights(chart: Chart, divisor: Divisor, alpha, extra_t0=0):
    """Integer weights (alpha_j + m_j) driving the twisted differential."""
    w = list(alpha)
    for lam, m in divisor.mult.items():
        w[lam] += m
    w[0] += extra_t0
    return w


def differential_twisted(omega: LogForm, divisor: Divisor = None, extra_t0=0) -> LogForm:
    """d_D omega = d omega + sum_lambda m_lambda dlog T_lambda ^ omega.

    omega is the coefficient form of a D-twisted element; extra_t0 adds a
    T_0 weight (used for the T^m-graded pieces).  Multidegree of every
    term is preserved.
    """
    chart = omega.chart
    R = omega.ring
    divisor = divisor if divisor is not None else Divisor(chart)
    allow_t0, _ = _mode_flags(omega.mode)
    out = {}
    from_int = (R.from_int if hasattr(R, "from_int") else lambda n: n % R.modulus)
    for (alpha, I), c in omega.terms.items():
        w = form_weights(chart, divisor, alpha, extra_t0)
        for j in range(chart.nvars):
            if j == 0 and not allow_t0:
                continue
            wj = from_int(w[j])
            if not wj:
                continue
            m = merge_wedge((j,), I)
            if m is None:
                continue
            sign, K = m
            v = R.mul(wj, c)
            if sign < 0:
                v = R.neg(v)
            key = (alpha, K)
            t = R.add(out.get(key, 0), v)
            if t:
                out[key] = t
            else:
                out.pop(key, None)
    return omega._like(out)


def residue(omega: LogForm, mu: int) -> LogForm:
    """Interior product against the mu-slot: Res(dlog T_mu ^ eta) = eta,
    Res(term without dlog T_mu) = 0.  mu must carry log structure."""
    chart = omega.chart
    if mu not in chart.log_vars:
        raise ValueError("residue coordinate %d is not a log coordinate" % mu)
    R = omega.ring
    out = {}
    for (alpha, I), c in omega.terms.items():
        if mu not in I:
            continue
        pos = I.index(mu)
        J = I[:pos] + I[pos + 1:]
        v = c if pos % 2 == 0 else R.neg(c)
        key = (alpha, J)
        t = R.add(out.get(key, 0), v)
        if t:
            out[key] = t
        else:
            out.pop(key, None)
    return omega._like(out)


def frobenius_pullback(omega: LogForm, truncate=False) -> LogForm:
    """T^alpha dlog T_I -> T^(p*alpha) dlog T_I with scalars to the p-th power.

    Raises WindowError on terms leaving the window unless truncate=True
    (truncated-ring semantics).
    """
    chart = omega.chart
    R = omega.ring
    p = chart.p
    out = {}
    for (alpha, I), c in omega.terms.items():
        a2 = exp_scale(alpha, p)
        if exp_total(a2) > chart.window:
            if truncate:
                continue
            raise WindowError(
                "frobenius pullback leaves the window at multidegree %r" % (alpha,))
        out[(a2, I)] = R.frob(c)
    return omega._like(out)


def cartier_inverse(omega: LogForm, src_twist=(), dst_twist=(), truncate=False) -> LogForm:
    """Inverse Cartier representative: a dlog T_I -> a^(p) dlog T_I.

    omega is a coefficient form for the twist monomial T^src_twist; the
    output is expressed as a coefficient form for T^dst_twist, so the
    result multidegree is p*alpha + p*src_twist - dst_twist (the absolute
    form is just raised to the p-th power).
    """
    chart = omega.chart
    R = omega.ring
    p = chart.p
    src = tuple(src_twist) if src_twist else chart.zero_exp()
    dst = tuple(dst_twist) if dst_twist else chart.zero_exp()
    shift = tuple(p * s - d for s, d in zip(src, dst))
    if any(x < 0 for x in shift):
        raise ValueError("target twist does not divide p * source twist")
    out = {}
    for (alpha, I), c in omega.terms.items():
        a2 = exp_add(exp_scale(alpha, p), shift)
        if exp_total(a2) > chart.window:
            if truncate:
                continue
            raise WindowError(
                "cartier image leaves the window at multidegree %r" % (alpha,))
        out[(a2, I)] = R.frob(c)
    return omega._like(out)


def relative_projection(omega: LogForm):
    """Split a full-mode form as dlog T_0 ^ res + rel.

    Returns (rel, res): rel collects the dlog T_0-free terms, res the
    front-extracted dlog T_0 component; both drop to relative mode.
    """
    rel = {}
    res = {}
    for (alpha, I), c in omega.terms.items():
        if I and I[0] == 0:
            res[(alpha, I[1:])] = c
        else:
            rel[(alpha, I)] = c
    return (LogForm(omega.chart, omega.ring, "relative", rel),
            LogForm(omega.chart, omega.ring, "relative", res))


def reduce_special_fiber(omega: LogForm) -> LogForm:
    """Kill every term with a positive T_0 exponent (coefficients mod T_0)."""
    mode = "special_fiber" if _mode_flags(omega.mode)[0] else "y"
    return LogForm(omega.chart, omega.ring, mode,
                   {k: c for k, c in omega.terms.items() if k[0][0] == 0})


def t0_graded_component(omega: LogForm, level: int) -> LogForm:
    """The T_0-degree == level slice, re-expressed with T_0^level stripped."""
    mode = "special_fiber" if _mode_flags(omega.mode)[0] else "y"
    out = {}
    for (alpha, I), c in omega.terms.items():
        if alpha[0] == level:
            a2 = (0,) + alpha[1:]
            out[(a2, I)] = c
    return LogForm(omega.chart, omega.ring, mode, out)


def _ring_int(R, n):
    """Image of the rational integer n in the scalar ring R."""
    return R.from_int(n) if hasattr(R, "from_int") else n % R.modulus


def poly_differential(chart: Chart, f: TruncatedPoly, mode="full") -> LogForm:
    """df in the dlog basis: d(T^e) = sum_j e_j T^e dlog T_j."""
    R = f.ring
    out = {}
    for e, c in f.terms.items():
        for j in range(chart.nvars):
            wj = _ring_int(R, e[j])
            if not wj:
                continue
            v = R.mul(wj, c)
            key = (e, (j,))
            t = R.add(out.get(key, 0), v)
            if t:
                out[key] = t
            else:
                out.pop(key, None)
    return LogForm(chart, R, mode, out)


def dlog_of_unit(chart: Chart, unit: TruncatedPoly, mode="full") -> LogForm:
    """dlog u = u^(-1) du for a principal unit u over any coefficient ring."""
    from .poly import principal_unit_inverse
    inv = principal_unit_inverse(unit)
    return poly_differential(chart, unit, mode).poly_mul(inv)


def dlog_of_monomial(chart: Chart, exps, ring=None, mode="full") -> LogForm:
    """dlog T^nu = sum nu_j dlog T_j; nu may be negative on log coordinates."""
    ring = ring or chart.field
    out = LogForm.zero(chart, ring, mode)
    for j, nu in enumerate(exps):
        if not nu:
            continue
        if j == chart.inf:
            raise ValueError("T_oo is not invertible; no dlog T_oo monomial slot")
        c = _ring_int(ring, nu)
        if c:
            out = out + LogForm(chart, ring, mode, {(chart.zero_exp(), (j,)): c})
    return out
