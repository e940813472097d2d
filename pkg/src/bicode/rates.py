"""Closed-form achievable rates for the error-free broadcast setting.

Covers the three baselines compared throughout: conventional random
coding (every user decodes everything), grouped random coding (two users
decode each other's messages, the third is served uncoded in time), and
the five-phase hybrid scheme, whose symmetric rate is optimized over the
user orderings that satisfy the scheme's labeling condition.
"""

from __future__ import annotations

from dataclasses import dataclass

from .problems import TOL, BicProblem, RateTuple, valid_orderings


def conventional_feasible(p: BicProblem, r: RateTuple) -> bool:
    """Feasibility of random coding: r_i + sum_j mu_ij r_j <= 1 for all i."""
    if len(r.r) != p.K:
        raise ValueError("rate tuple length != K")
    for i in range(1, p.K + 1):
        total = r.r[i - 1]
        for j in range(1, p.K + 1):
            if j != i:
                total += p.mu(i, j) * r.r[j - 1]
        if total > 1.0 + TOL:
            return False
    return True


def conventional_sym_rate(p: BicProblem) -> float:
    worst = max(1.0 + sum(p.mu(i, j) for j in range(1, p.K + 1) if j != i)
                for i in range(1, p.K + 1))
    return 1.0 / worst


def grouped_sym_rate3(p: BicProblem) -> float:
    """Best grouped-coding symmetric rate over the choice of solo user.

    Grouping pair {j, k}: a first phase of m*(1+max(mu_jk, mu_kj))
    random equations lets both grouped users decode both grouped
    messages, then the solo message goes out uncoded in m more slots.
    """
    if p.K != 3:
        raise ValueError("grouped coding rate is defined for K = 3")
    best = 0.0
    for solo in (1, 2, 3):
        j, k = [u for u in (1, 2, 3) if u != solo]
        best = max(best, 1.0 / (2.0 + max(p.mu(j, k), p.mu(k, j))))
    return best


def _hybrid_rate_for_ordering(q: BicProblem) -> float:
    # q is already relabeled; user 1 is the least-informed one
    term_a = 1.0 / (1.0 + q.mu(2, 1) + q.mu(2, 3))
    term_b = 1.0 / (1.0 + q.mu(3, 1) + q.mu(3, 2))
    hybrid_den = (1.0 + q.mu(2, 3) + q.mu(1, 2)
                  + q.mu(1, 3) * (1.0 - q.mu(2, 3) + q.mu(3, 2)) * (1.0 - q.mu(1, 2)))
    conv_den = 1.0 + q.mu(1, 2) + q.mu(1, 3)
    return min(term_a, term_b, max(1.0 / hybrid_den, 1.0 / conv_den))


def hybrid_sym_rate3(p: BicProblem):
    """Symmetric rate of the five-phase hybrid scheme and the ordering
    achieving it (first such ordering in lexicographic order on ties)."""
    best, best_ord = -1.0, None
    for ordering in valid_orderings(p):
        rate = _hybrid_rate_for_ordering(p.relabel(ordering))
        if rate > best + TOL:
            best, best_ord = rate, ordering
    return best, best_ord


def two_user_capacity(mu12: float, mu21: float, r1: float, r2: float) -> bool:
    """Membership in the exact 2-user region."""
    for v in (mu12, mu21):
        if not 0.0 <= v <= 1.0:
            raise ValueError("parameters must be in [0,1]")
    return (r1 + mu12 * r2 <= 1.0 + TOL) and (mu21 * r1 + r2 <= 1.0 + TOL)


def k_user_symmetric_capacity(K: int, mu: float) -> float:
    """Symmetric capacity 1/(1+(K-1)mu) when every mu_ij equals mu."""
    if K < 2:
        raise ValueError("need at least 2 users")
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must be in [0,1]")
    return 1.0 / (1.0 + (K - 1) * mu)


@dataclass
class SymRateReport:
    conventional: float
    grouped: float
    hybrid: float
    chosen_ordering: tuple

    def __post_init__(self):
        assert self.hybrid >= self.conventional - TOL
        for v in (self.conventional, self.grouped, self.hybrid):
            assert -TOL <= v <= 1.0 + TOL


def sym_rate_report(p: BicProblem) -> SymRateReport:
    hybrid, ordering = hybrid_sym_rate3(p)
    return SymRateReport(
        conventional=conventional_sym_rate(p),
        grouped=grouped_sym_rate3(p),
        hybrid=hybrid,
        chosen_ordering=ordering,
    )
