"""Structured verification outcomes.

Every executable check returns a CheckOutcome.  Statuses:
  pass               -- every asserted identity held, exactly
  fail               -- a violation was found; a witness is attached that
                        re-evaluates to the violation
  inconclusive       -- the statement is window-limited and the window was
                        too small to decide it (never counted as evidence)
  hypothesis-not-met -- the lemma's hypothesis fails at this grid point;
                        recorded but not evidence either way
"""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
HYP_NOT_MET = "hypothesis-not-met"


def serialize_form(omega):
    """A form as a lossless list of (exponents, index set, coefficient)."""
    return sorted([list(alpha), list(I), c] for (alpha, I), c in omega.terms.items())


def deserialize_form(chart, ring, mode, data):
    from .forms import LogForm
    return LogForm(chart, ring, mode,
                   {(tuple(a), tuple(i)): c for a, i, c in data})


@dataclass
class CheckOutcome:
    name: str
    params: dict = field(default_factory=dict)
    status: str = PASS
    dims: dict = field(default_factory=dict)
    witness: dict = None
    notes: list = field(default_factory=list)
    cells_checked: int = 0

    def record_dim(self, key, value):
        self.dims[str(key)] = value

    def merge_status(self, status):
        order = {PASS: 0, HYP_NOT_MET: 1, INCONCLUSIVE: 2, FAIL: 3}
        if order[status] > order[self.status]:
            self.status = status

    def fail(self, witness=None, note=None):
        self.status = FAIL
        if witness is not None and self.witness is None:
            self.witness = witness
        if note:
            self.notes.append(note)
        return self

    def note(self, msg):
        self.notes.append(msg)
        return self

    def ok(self):
        return self.status == PASS

    def to_dict(self):
        out = {
            "name": self.name,
            "params": _plain(self.params),
            "status": self.status,
            "dims": {k: _plain(v) for k, v in sorted(self.dims.items())},
            "cells_checked": self.cells_checked,
            "notes": list(self.notes),
        }
        if self.witness is not None:
            out["witness"] = _plain(self.witness)
        return out


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (int, str, bool)) or x is None:
        return x
    return repr(x)


class SignatureScan:
    """Window scan helper: evaluates a per-cell predicate once per weight
    signature and counts cells per signature, so big windows cost one
    dictionary probe per multidegree."""

    def __init__(self):
        self.cache = {}
        self.counts = {}

    def run(self, alphas, sig_fn, eval_fn):
        """eval_fn(alpha) -> (ok, info) evaluated once per signature; returns
        (all_ok, first_bad_alpha, evaluations dict)."""
        first_bad = None
        for alpha in alphas:
            sig = sig_fn(alpha)
            if sig not in self.cache:
                self.cache[sig] = eval_fn(alpha)
            self.counts[sig] = self.counts.get(sig, 0) + 1
            ok, _ = self.cache[sig]
            if not ok and first_bad is None:
                first_bad = alpha
        return first_bad is None, first_bad, self.cache

    @property
    def cells(self):
        return sum(self.counts.values())
