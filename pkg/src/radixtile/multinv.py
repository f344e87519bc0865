"""Discrete multiplicative invariance on Z^n.

A lattice set is described by a deterministic automaton reading digit
expansions least significant digit first.  Dropping the least significant
digit (phi) is a one-symbol left quotient of the language; dropping the
most significant digit (psi) is last-symbol deletion.  Both closures are
decided by automaton constructions, and the scaled clouds
X_k = A^-k (E meet A^k T) are enumerated exactly to drive the Hausdorff
distance convergence and torus invariance diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import CloudTooLarge, EmptySet
from .linalg import IntVec, RatVec
from .numsys import RadixSystem, discrete_expansion, evaluate_expansion


# ---------------------------------------------------------------------------
# digit automata


@dataclass(frozen=True)
class DigitAutomaton:
    """Complete DFA over digit indices, least significant digit first.

    Accepting strings are canonical: the most significant (= last) symbol
    is nonzero, and the empty string stands for 0.  transitions[state] is
    a tuple indexed by digit position in the owning system's digit tuple.
    """

    n_digits: int
    transitions: tuple[tuple[int, ...], ...]
    accepting: frozenset[int]
    initial: int = 0

    def __post_init__(self):
        for row in self.transitions:
            if len(row) != self.n_digits:
                raise ValueError("transition rows must cover every digit")
            if any(not (0 <= t < len(self.transitions)) for t in row):
                raise ValueError("transition target out of range")

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def accepts(self, word) -> bool:
        state = self.initial
        for sym in word:
            state = self.transitions[state][sym]
        return state in self.accepting

    def to_json(self) -> dict:
        return {
            "n_digits": self.n_digits,
            "transitions": [list(row) for row in self.transitions],
            "accepting": sorted(self.accepting),
            "initial": self.initial,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DigitAutomaton":
        return cls(
            n_digits=int(data["n_digits"]),
            transitions=tuple(tuple(int(x) for x in row) for row in data["transitions"]),
            accepting=frozenset(int(x) for x in data["accepting"]),
            initial=int(data.get("initial", 0)),
        )


def digit_restriction_automaton(sys: RadixSystem, allowed) -> DigitAutomaton:
    """Language of canonical strings using only the allowed digits."""
    allowed_idx = {sys.digits.index(linalg.as_vec(d)) for d in allowed}
    zero_idx = sys.digits.index(linalg.zero_vec(sys.n))
    # states: 0 start/accept (empty), 1 ok last nonzero, 2 ok last zero, 3 dead
    rows = []
    for state in range(4):
        row = []
        for idx in range(len(sys.digits)):
            if state == 3 or idx not in allowed_idx:
                row.append(3)
            elif idx == zero_idx:
                row.append(2)
            else:
                row.append(1)
        rows.append(tuple(row))
    return DigitAutomaton(
        n_digits=len(sys.digits),
        transitions=tuple(rows),
        accepting=frozenset({0, 1}),
    )


def all_strings_automaton(sys: RadixSystem) -> DigitAutomaton:
    return digit_restriction_automaton(sys, sys.digits)


def zero_only_automaton(sys: RadixSystem) -> DigitAutomaton:
    """Accepts only the empty string, i.e. the set {0}."""
    k = len(sys.digits)
    return DigitAutomaton(
        n_digits=k,
        transitions=((1,) * k, (1,) * k),
        accepting=frozenset({0}),
    )


def last_digit_automaton(sys: RadixSystem, digit) -> DigitAutomaton:
    """Strings whose most significant digit is the given one."""
    want = sys.digits.index(linalg.as_vec(digit))
    k = len(sys.digits)
    rows = [
        tuple(1 if idx == want else 2 for idx in range(k)),  # 0: start
        tuple(1 if idx == want else 2 for idx in range(k)),  # 1: last == want
        tuple(1 if idx == want else 2 for idx in range(k)),  # 2: last != want
    ]
    return DigitAutomaton(n_digits=k, transitions=tuple(rows), accepting=frozenset({1}))


def follows_rule_automaton(sys: RadixSystem, trigger, follower) -> DigitAutomaton:
    """Canonical strings where the trigger digit forces the follower next."""
    trig = sys.digits.index(linalg.as_vec(trigger))
    fol = sys.digits.index(linalg.as_vec(follower))
    zero_idx = sys.digits.index(linalg.zero_vec(sys.n))
    # states: 0 start, 1 neutral last nonzero, 2 neutral last zero,
    #         3 must-see-follower (last symbol was trigger), 4 dead
    def step(state, idx):
        if state == 4:
            return 4
        if state == 3 and idx != fol:
            return 4
        if idx == trig:
            return 3
        return 2 if idx == zero_idx else 1

    k = len(sys.digits)
    rows = tuple(tuple(step(s, idx) for idx in range(k)) for s in range(5))
    trig_accept = {3} if trig != zero_idx else set()
    return DigitAutomaton(
        n_digits=k,
        transitions=rows,
        accepting=frozenset({0, 1} | trig_accept),
    )


# ---------------------------------------------------------------------------
# language machinery (padding, quotients, containment)


def _pad_nfa(auto: DigitAutomaton, zero_idx: int):
    """NFA accepting L . 0*: start states {initial}, extra zero-sink."""
    sink = auto.n_states  # virtual accepting state with a zero self-loop
    def moves(state, sym):
        out = set()
        if state == sink:
            if sym == zero_idx:
                out.add(sink)
            return out
        out.add(auto.transitions[state][sym])
        if sym == zero_idx and state in auto.accepting:
            out.add(sink)
        return out

    def accepting(states) -> bool:
        return any(s == sink or s in auto.accepting for s in states)

    return moves, accepting


def _pad_dfa(auto: DigitAutomaton, zero_idx: int) -> DigitAutomaton:
    """Determinized automaton of L . 0* (value semantics with zero padding)."""
    moves, accepting = _pad_nfa(auto, zero_idx)
    start = frozenset({auto.initial, auto.n_states}) if auto.initial in auto.accepting else frozenset({auto.initial})
    # the empty word is accepted iff initial accepts; including the sink in
    # the start set keeps acceptance while allowing zero padding of epsilon
    index = {start: 0}
    order = [start]
    rows = []
    acc = set()
    i = 0
    while i < len(order):
        current = order[i]
        if accepting(current):
            acc.add(i)
        row = []
        for sym in range(auto.n_digits):
            nxt = frozenset().union(*[moves(s, sym) for s in current]) if current else frozenset()
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(tuple(row))
        i += 1
    return DigitAutomaton(
        n_digits=auto.n_digits,
        transitions=tuple(rows),
        accepting=frozenset(acc),
        initial=0,
    )


def _contains(outer: DigitAutomaton, inner: DigitAutomaton) -> bool:
    """True iff L(inner) is a subset of L(outer) (product emptiness)."""
    start = (inner.initial, outer.initial)
    seen = {start}
    stack = [start]
    while stack:
        si, so = stack.pop()
        if si in inner.accepting and so not in outer.accepting:
            return False
        for sym in range(inner.n_digits):
            nxt = (inner.transitions[si][sym], outer.transitions[so][sym])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def _delete_first_dfa(auto: DigitAutomaton) -> DigitAutomaton:
    """Determinized {w : d w in L for some digit d}."""
    starts = frozenset(auto.transitions[auto.initial][sym] for sym in range(auto.n_digits))
    index = {starts: 0}
    order = [starts]
    rows = []
    acc = set()
    i = 0
    while i < len(order):
        current = order[i]
        if current & auto.accepting:
            acc.add(i)
        row = []
        for sym in range(auto.n_digits):
            nxt = frozenset(auto.transitions[s][sym] for s in current)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(tuple(row))
        i += 1
    return DigitAutomaton(
        n_digits=auto.n_digits, transitions=tuple(rows), accepting=frozenset(acc)
    )


def _delete_last_dfa(auto: DigitAutomaton) -> DigitAutomaton:
    """{w : w d in L for some digit d} (same states, relaxed acceptance)."""
    acc = frozenset(
        s
        for s in range(auto.n_states)
        if any(auto.transitions[s][sym] in auto.accepting for sym in range(auto.n_digits))
    )
    return DigitAutomaton(
        n_digits=auto.n_digits,
        transitions=auto.transitions,
        accepting=acc,
        initial=auto.initial,
    )


def _require_expansion_domain(sys: RadixSystem) -> None:
    """Digit strings must map bijectively to the values they expand to.

    That needs a complete residue system and an expanding matrix.  The
    described set then lives inside the expandable vectors, which is all
    of Z^n exactly when the pair is a number system.
    """
    if not linalg.is_complete_residue_system(sys.matrix, sys.digits):
        from .errors import NotACrs

        raise NotACrs("invariance needs a complete residue digit system")
    linalg.require_expanding(sys.matrix)


def check_invariance(sys: RadixSystem, auto: DigitAutomaton) -> tuple[bool, bool]:
    """(phi closed, psi closed) for the set described by the automaton.

    Works on the zero-padded language so deletions that expose trailing
    zeros still compare by value.
    """
    _require_expansion_domain(sys)
    zero_idx = sys.digits.index(linalg.zero_vec(sys.n))
    padded = _pad_dfa(auto, zero_idx)
    phi_closed = _contains(padded, _delete_first_dfa(padded))
    psi_closed = _contains(padded, _delete_last_dfa(padded))
    return phi_closed, psi_closed


# ---------------------------------------------------------------------------
# the digit-drop maps


def phi(sys: RadixSystem, v) -> IntVec:
    """Drop the least significant digit of the expansion of v."""
    digits = discrete_expansion(sys, v)
    return evaluate_expansion(sys, digits[1:])


def psi(sys: RadixSystem, v) -> IntVec:
    """Drop the most significant digit of the expansion of v."""
    digits = discrete_expansion(sys, v)
    return evaluate_expansion(sys, digits[:-1])


# ---------------------------------------------------------------------------
# scaled clouds and metrics


def xk_cloud(sys: RadixSystem, auto: DigitAutomaton, k: int, cap: int = 200_000) -> frozenset[RatVec]:
    """A^-k (E meet A^k T) as exact rational points.

    Enumerates padded-accepted digit strings of length k; for a number
    system those are exactly the elements of E with expansions of length
    at most k.
    """
    zero_idx = sys.digits.index(linalg.zero_vec(sys.n))
    padded = _pad_dfa(auto, zero_idx)
    inv_k = linalg.mat_inv_pow(sys.matrix, k)

    # prune states that can never reach acceptance, so dead sinks do not
    # blow the walk up to |digits|^k
    alive = set(padded.accepting)
    changed = True
    while changed:
        changed = False
        for s in range(padded.n_states):
            if s not in alive and any(t in alive for t in padded.transitions[s]):
                alive.add(s)
                changed = True

    points: set[RatVec] = set()
    stack = [(padded.initial, 0, ())]
    while stack:
        state, pos, word = stack.pop()
        if pos == k:
            if state in padded.accepting:
                value = evaluate_expansion(sys, [sys.digits[i] for i in word])
                points.add(linalg.frac_mat_vec(inv_k, value))
                if len(points) > cap:
                    raise CloudTooLarge(f"cloud exceeds cap {cap}")
            continue
        for sym in range(padded.n_digits):
            nxt = padded.transitions[state][sym]
            if nxt in alive:
                stack.append((nxt, pos + 1, word + (sym,)))
    return frozenset(points)


def hausdorff_distance(p, q) -> float:
    """Max of the two directed sup-min Euclidean distances."""
    p = [tuple(float(x) for x in v) for v in p]
    q = [tuple(float(x) for x in v) for v in q]
    if not p or not q:
        raise EmptySet("Hausdorff distance needs nonempty sets")
    pa, qa = np.array(p), np.array(q)
    d = np.sqrt(((pa[:, None, :] - qa[None, :, :]) ** 2).sum(axis=2))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def torus_distance(x, y) -> float:
    """Quotient metric min over integer shifts of the Euclidean distance."""
    x = tuple(Fraction(a) for a in x)
    y = tuple(Fraction(a) for a in y)
    n = len(x)
    best = None
    import itertools as it

    for zeta in it.product((-1, 0, 1), repeat=n):
        d = sum((float(a - b + z)) ** 2 for a, b, z in zip(x, y, zeta))
        best = d if best is None else min(best, d)
    return math.sqrt(best)


def _tail_bound(sys: RadixSystem, k: int) -> float:
    """Certified upper bound on sum_{j>k} ||A^-j||_op."""
    info = linalg.require_expanding(sys.matrix)
    a_inv = np.array(linalg.mat_inv(sys.matrix), dtype=float)
    power = np.linalg.matrix_power(a_inv, k)
    return float(np.linalg.norm(power, 2)) * info.ball_radius_factor


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    measured: float
    bound: float
    ratio_to_prev: float | None


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    phi_closed: bool

    def to_csv(self) -> str:
        lines = ["k,measured,bound,ratio_to_prev"]
        for r in self.rows:
            ratio = "" if r.ratio_to_prev is None else repr(r.ratio_to_prev)
            lines.append(f"{r.k},{r.measured!r},{r.bound!r},{ratio}")
        return "\n".join(lines) + "\n"


def convergence_report(sys: RadixSystem, auto: DigitAutomaton, kmax: int) -> ConvergenceReport:
    """Measured d_H(X_k, X_{k+1}) against the certified decay bound."""
    phi_closed, _ = check_invariance(sys, auto)
    max_digit = sys.max_digit_norm()
    clouds = {k: xk_cloud(sys, auto, k) for k in range(1, kmax + 2)}
    rows = []
    prev = None
    for k in range(1, kmax + 1):
        measured = hausdorff_distance(clouds[k], clouds[k + 1])
        bound = max_digit * _tail_bound(sys, k)
        ratio = (measured / prev) if prev not in (None, 0.0) else None
        rows.append(ConvergenceRow(k=k, measured=measured, bound=bound, ratio_to_prev=ratio))
        prev = measured
    return ConvergenceReport(rows=tuple(rows), phi_closed=phi_closed)


def torus_invariance_check(sys: RadixSystem, auto: DigitAutomaton, k: int) -> bool:
    """Exact check that A maps the k-cloud into the (k-1)-cloud on the torus."""
    if k < 2:
        raise ValueError("needs k >= 2")
    current = xk_cloud(sys, auto, k)
    previous = {_mod1(p) for p in xk_cloud(sys, auto, k - 1)}
    a = linalg.mat_frac(sys.matrix)
    for x in current:
        image = _mod1(linalg.frac_mat_vec(a, x))
        if image not in previous:
            return False
    return True


def _mod1(v: RatVec) -> RatVec:
    return tuple(x - math.floor(x) for x in v)
