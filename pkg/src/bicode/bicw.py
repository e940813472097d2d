"""Two-user wireless blind index coding.

User 1 has the better erasure channel and no side information; user 2
knows each bit of message 1 independently with probability 1 - mu.
Message 1 is encoded by a repetition-plus-random-parity matrix, message
2 by a pure random code, and the two codewords are XORed on air.

The analytic side gives the achievable region (a sum constraint plus one
weighted constraint per repetition count), the per-configuration
feasibility test, the closed-form parameter selection, the genie outer
bound, and the baselines it is plotted against.  The simulation side
runs the staged pairing decoder bit-exactly over GF(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gf2, trials
from .errors import InfeasibleError
from .gf2 import Gf2Matrix, SeededRng
from .geometry import Region2D
from .problems import TOL, BicwProblem, message_length

# Repetition count cap when mu = 0 leaves it unbounded and no block
# length is available to justify a tighter one.
_EPS_CAP = 1e-12


def lmax(eps1: float, eps2: float, mu: float):
    """Largest useful repetition count; None when mu = 0 (unbounded)."""
    if not (0.0 <= eps1 < eps2 < 1.0):
        raise ValueError("need 0 <= eps1 < eps2 < 1")
    if not (0.0 <= mu <= 1.0):
        raise ValueError("mu must be in [0,1]")
    if mu == 0.0:
        return None
    if eps1 == 0.0:
        return 1
    return 1 + int(math.floor(math.log(mu) / math.log(eps1 / eps2)))


def _cap_for(p: BicwProblem, n: int | None) -> int:
    """Repetition cap substituting for an unbounded lmax at mu = 0."""
    if p.eps1 <= 0.0:
        return 1
    if n is not None:
        return max(1, int(math.ceil(math.log(n) / math.log(1.0 / p.eps1))))
    return max(1, int(math.ceil(math.log(_EPS_CAP) / math.log(p.eps1))))


def effective_lmax(p: BicwProblem, n: int | None = None) -> int:
    lm = lmax(p.eps1, p.eps2, p.mu)
    return _cap_for(p, n) if lm is None else lm


def omega(eps1: float, eps2: float, mu: float, L: int):
    """Constraint weights (omega1, omega2) for repetition count L >= 1."""
    if L < 1:
        raise ValueError("L must be >= 1")
    w2 = min((1.0 - eps1 ** L) / (1.0 - mu * eps2 ** L), 1.0)
    w1 = ((1.0 - eps2) / (1.0 - eps1) * eps1 ** L
          + mu * (1.0 - eps2 ** L) * w2
          + L * (1.0 - eps2) * (1.0 - w2))
    return w1, w2


def theorem4_region(p: BicwProblem, l_cap: int | None = None) -> Region2D:
    """Achievable (r1, r2) region of the repetition-parity scheme."""
    cons = [(1.0, 1.0, 1.0 - p.eps1, "sum")]
    top = effective_lmax(p) if l_cap is None else l_cap
    for L in range(1, top + 1):
        w1, w2 = omega(p.eps1, p.eps2, p.mu, L)
        assert w2 > 0.0, "omega2 is positive for every L >= 1"
        cons.append((w1, w2, 1.0 - p.eps2, f"L={L}"))
    return Region2D(cons)


@dataclass
class RrpParams:
    """Generator-matrix parameters: parity fraction rho, repetition count
    L, and the fraction alpha of bits repeated L + 1 times."""

    rho: float
    L: int
    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.rho <= 1.0):
            raise ValueError("rho must be in [0,1]")
        if self.L < 0 or int(self.L) != self.L:
            raise ValueError("L must be a nonnegative integer")
        self.L = int(self.L)
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError("alpha must be in [0,1)")


def lemma2_feasible(p: BicwProblem, params: RrpParams, r1: float, r2: float) -> bool:
    """The four decodability inequalities for a fixed configuration."""
    rho, L, a = params.rho, params.L, params.alpha
    e1, e2, mu = p.eps1, p.eps2, p.mu
    if L + a > 0 and r1 > (1.0 - rho) / (L + a) + TOL:
        return False
    den = e1 ** L - a * (e1 ** L - e1 ** (L + 1))
    if den > 0 and r1 > rho * (1.0 - e1) / den + TOL:
        return False
    if (1.0 - e1 ** L + a * (e1 ** L - e1 ** (L + 1))) * r1 + r2 \
            > (1.0 - e1) * (1.0 - rho) + TOL:
        return False
    if mu * (1.0 - e2 ** L + a * (e2 ** L - e2 ** (L + 1))) * r1 + r2 \
            > (1.0 - e2) * (1.0 - rho) + TOL:
        return False
    return True


def select_params(r1: float, p: BicwProblem, l_cap: int | None = None) -> RrpParams:
    """Closed-form (rho, L, alpha) making r1 achievable on the boundary.

    L maximizes min(L, lmax) subject to the repetition budget
    eps1^L r1/(1-eps1) <= 1 - L r1; alpha tops up the budget when the
    cap is not reached; rho funds exactly the expected parity need.
    """
    e1 = p.eps1
    if r1 < -TOL or r1 > 1.0 - e1 + TOL:
        raise InfeasibleError(f"r1={r1} outside [0, 1-eps1]")
    r1 = min(max(r1, 0.0), 1.0 - e1)
    top = effective_lmax(p) if l_cap is None else l_cap

    def budget_ok(L):
        return e1 ** L * r1 / (1.0 - e1) <= 1.0 - L * r1 + TOL

    if r1 == 0.0 or budget_ok(top):
        Lstar, alpha = top, 0.0
    else:
        Lstar = next(L for L in range(top - 1, 0, -1) if budget_ok(L))
        alpha = (1.0 - r1 * (e1 ** Lstar / (1.0 - e1) + Lstar)) \
            / (r1 * (1.0 - e1 ** Lstar))
        alpha = min(max(alpha, 0.0), 1.0 - 1e-15)
    rho = (e1 ** Lstar - alpha * (e1 ** Lstar - e1 ** (Lstar + 1))) \
        / (1.0 - e1) * r1
    return RrpParams(rho=rho, L=Lstar, alpha=alpha)


def genie_region(p: BicwProblem) -> Region2D:
    """Outer bound for a sender told which bits are in side information."""
    return Region2D([
        (1.0, 1.0, 1.0 - p.eps1, "sum"),
        (p.mu, (1.0 - p.eps1) / (1.0 - p.eps2), 1.0 - p.eps1, "genie"),
    ])


def baseline_regions(p: BicwProblem) -> dict:
    e1, e2, mu = p.eps1, p.eps2, p.mu
    return {
        "time_division": Region2D([
            (1.0 / (1.0 - e1), 1.0 / (1.0 - e2), 1.0, "td")]),
        "conventional_no_si": Region2D([
            (1.0, 1.0, 1.0 - e1, "u1"), (1.0, 1.0, 1.0 - e2, "u2")]),
        "conventional_with_si": Region2D([
            (1.0, 1.0, 1.0 - e1, "u1"), (mu, 1.0, 1.0 - e2, "u2")]),
    }


class RrpMatrix:
    """Concrete n x m repetition-plus-random-parity generator.

    Row layout: rho*n random parity rows, then L full identity blocks,
    then an [I 0] block covering the first alpha*m bits, then zero rows.
    """

    def __init__(self, n: int, m: int, params: RrpParams, rng: SeededRng):
        self.params = params
        self.n = n
        self.m = m
        self.parity_rows = int(round(params.rho * n))
        self.alpha_m = int(round(params.alpha * m)) if m else 0
        used = self.parity_rows + params.L * m + self.alpha_m
        if used > n:
            raise InfeasibleError(
                f"(L+alpha)m + rho*n = {used} exceeds n = {n}")
        self.parity = gf2.random_matrix(self.parity_rows, m, rng)

    def rep_block(self, ell: int):
        """(start, length) of the ell-th repetition block, 1-based."""
        if ell <= self.params.L:
            return self.parity_rows + (ell - 1) * self.m, self.m
        return self.parity_rows + self.params.L * self.m, self.alpha_m

    @property
    def pure_start(self) -> int:
        """First slot carrying no message-1 content."""
        return self.parity_rows + self.params.L * self.m + self.alpha_m

    def encode(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=np.uint8)
        if w.shape != (self.m,):
            raise ValueError("message length mismatch")
        x = np.zeros(self.n, dtype=np.uint8)
        x[: self.parity_rows] = gf2.mat_vec(self.parity, w)
        for ell in range(1, self.params.L + 2):
            start, length = self.rep_block(ell)
            x[start: start + length] ^= w[:length]
        return x

    def to_gf2(self) -> Gf2Matrix:
        out = Gf2Matrix(self.n, self.m)
        out.words[: self.parity_rows] = self.parity.words
        rows, cols = [], []
        for ell in range(1, self.params.L + 2):
            start, length = self.rep_block(ell)
            rows.append(np.arange(start, start + length, dtype=np.int64))
            cols.append(np.arange(length, dtype=np.int64))
        if rows:
            from . import _kernels
            _kernels.set_bits(out.words, np.concatenate(rows), np.concatenate(cols))
        return out


def rrp_matrix(n: int, m: int, params: RrpParams, rng: SeededRng) -> RrpMatrix:
    return RrpMatrix(n, m, params, rng)


def clean_eq_probability(slot: str, p: BicwProblem, ell: int | None = None):
    """Per-slot probability that each user extracts a clean equation of
    message 2: slot is 'repetition' (needs ell), 'parity', or 'pure'."""
    e1, e2, mu = p.eps1, p.eps2, p.mu
    if slot == "repetition":
        if ell is None or ell < 1:
            raise ValueError("repetition slots carry a 1-based ell")
        return ((1.0 - e1) * (1.0 - e1 ** (ell - 1)),
                (1.0 - e2) * (1.0 - mu * e2 ** (ell - 1)))
    if slot == "parity":
        return 0.0, 0.0
    if slot == "pure":
        return 1.0 - e1, 1.0 - e2
    raise ValueError(f"unknown slot kind {slot!r}")


@dataclass
class ChannelRealization:
    gamma1: np.ndarray
    gamma2: np.ndarray


def realize_channel(p: BicwProblem, n: int, rng: SeededRng) -> ChannelRealization:
    return ChannelRealization(
        gamma1=rng.bernoulli(1.0 - p.eps1, n),
        gamma2=rng.bernoulli(1.0 - p.eps2, n),
    )


def _harvest_w2_equations(u1: RrpMatrix, u2: Gf2Matrix, y, received, si_mask, w1_si):
    """Clean message-2 equations at one user.

    Paired repetitions of the same message-1 bit cancel it; a bit in side
    information (si_mask) lets every received repetition be cleaned
    directly; slots past the repetition payload are clean as-is.
    Returns (rows_words, rhs, per-class counts).
    """
    m1, L, am = u1.m, u1.params.L, u1.alpha_m
    rows_a, rows_b, rhs_fix = [], [], []
    counts = {}
    if m1:
        # received-slot table per bit and repetition index
        nrep = L + (1 if am else 0)
        slot = np.empty((m1, nrep), dtype=np.int64)
        hit = np.zeros((m1, nrep), dtype=bool)
        for ell in range(1, nrep + 1):
            start, length = u1.rep_block(ell)
            slot[:length, ell - 1] = np.arange(start, start + length)
            hit[:length, ell - 1] = received[start: start + length]
            if length < m1:
                hit[length:, ell - 1] = False
        for k in range(m1):
            got = [int(slot[k, e]) for e in range(nrep) if hit[k, e]]
            if si_mask is not None and si_mask[k]:
                for s in got:
                    rows_a.append(s)
                    rows_b.append(-1)
                    rhs_fix.append(int(w1_si[k]))
                    ell = 1 + (s - u1.parity_rows) // m1
                    counts[ell] = counts.get(ell, 0) + 1
            else:
                for sa, sb in zip(got, got[1:]):
                    rows_a.append(sb)
                    rows_b.append(sa)
                    rhs_fix.append(0)
                    ell = 1 + (sb - u1.parity_rows) // m1
                    counts[ell] = counts.get(ell, 0) + 1
    pure = np.flatnonzero(received[u1.pure_start:]) + u1.pure_start
    counts["pure"] = int(pure.size)

    na = len(rows_a)
    words = np.empty((na + pure.size, u2.nwords), dtype=np.uint64)
    rhs = np.empty(na + pure.size, dtype=np.uint8)
    if na:
        ra = np.asarray(rows_a, dtype=np.int64)
        rb = np.asarray(rows_b, dtype=np.int64)
        paired = rb >= 0
        words[:na] = u2.words[ra]
        words[:na][paired] ^= u2.words[rb[paired]]
        rhs[:na] = y[ra] ^ np.asarray(rhs_fix, dtype=np.uint8)
        rhs[:na][paired] ^= y[rb[paired]]
    words[na:] = u2.words[pure]
    rhs[na:] = y[pure]
    return Gf2Matrix(na + pure.size, u2.cols, words), rhs, counts


def _decode_user(u1, u2, y, received, si_mask, w1_si, want_w1):
    """Staged decode at one user; returns a UserOutcome-shaped dict."""
    diag = {}
    a, rhs, counts = _harvest_w2_equations(u1, u2, y, received, si_mask, w1_si)
    diag["w2_clean_counts"] = counts
    diag["w2_equations"] = a.rows
    if a.rows < a.cols:
        return None, None, trials.INSUFFICIENT, diag
    res = gf2.solve(a, rhs)
    if not res.is_unique:
        assert res.status == gf2.UNDERDETERMINED, "clean systems are consistent"
        return None, None, trials.RANK_DEFICIENT, diag
    w2_hat = res.x
    if not want_w1:
        return None, w2_hat, None, diag

    # strip message 2, read repeated bits directly, close the rest with parity
    resid = y.copy()
    resid[received] ^= gf2.mat_vec(u2, w2_hat)[received]
    m1 = u1.m
    w1_hat = np.zeros(m1, dtype=np.uint8)
    resolved = np.zeros(m1, dtype=bool)
    for ell in range(1, u1.params.L + 2):
        start, length = u1.rep_block(ell)
        got = received[start: start + length]
        w1_hat[:length][got] = resid[start: start + length][got]
        resolved[:length] |= got
    unresolved = np.flatnonzero(~resolved)
    diag["w1_unresolved"] = int(unresolved.size)
    par = np.flatnonzero(received[: u1.parity_rows])
    diag["w1_parity_received"] = int(par.size)
    if unresolved.size:
        if par.size < unresolved.size:
            return None, w2_hat, trials.INSUFFICIENT, diag
        pmat = Gf2Matrix(par.size, m1, u1.parity.words[par])
        fold = gf2.mat_vec(pmat, w1_hat & resolved.astype(np.uint8))
        sub = pmat.take_columns(unresolved)
        res1 = gf2.solve(sub, resid[par] ^ fold)
        if not res1.is_unique:
            assert res1.status == gf2.UNDERDETERMINED
            return None, w2_hat, trials.RANK_DEFICIENT, diag
        w1_hat[unresolved] = res1.x
    return w1_hat, w2_hat, None, diag


def simulate_bicw(p: BicwProblem, n: int, r1: float, r2: float,
                  params: RrpParams, num_trials: int, base_seed: int,
                  margin: float = 0.02, threads: int | None = None) -> trials.TrialReport:
    """Monte-Carlo decodability of the staged pairing decoder.

    Message sizes are floor(n * r * (1 - margin)); each trial draws fresh
    messages, matrices, side information, and channel states from a seed
    derived as (base_seed, trial).
    """
    m1 = message_length(n, r1, margin)
    m2 = message_length(n, r2, margin)
    base = SeededRng(base_seed)

    def one_trial(t: int):
        rng = base.derive(t)
        w1 = rng.bits(m1)
        w2 = rng.bits(m2)
        g21 = rng.bernoulli(1.0 - p.mu, m1)
        u1 = RrpMatrix(n, m1, params, rng)
        u2 = gf2.random_matrix(n, m2, rng)
        ch = realize_channel(p, n, rng)
        x = u1.encode(w1) ^ gf2.mat_vec(u2, w2)

        outcomes = {}
        for user, gamma in ((1, ch.gamma1), (2, ch.gamma2)):
            received = gamma.astype(bool)
            y = x & gamma
            si = g21 if user == 2 else None
            w1_si = (w1 & g21) if user == 2 else None
            w1_hat, w2_hat, failure, diag = _decode_user(
                u1, u2, y, received, si, w1_si, want_w1=(user == 1))
            if failure is None:
                want = w1 if user == 1 else w2
                got = w1_hat if user == 1 else w2_hat
                assert got is not None and np.array_equal(got, want), \
                    "unique solutions agree with the transmitted message"
                outcomes[user] = trials.UserOutcome(user, True, None, diag)
            else:
                outcomes[user] = trials.UserOutcome(user, False, failure, diag)
        return outcomes

    return trials.run_trials((1, 2), num_trials, one_trial, threads)
