"""Outer-bound tree enumeration and evaluation.

Each labeled tree indexes one linear converse inequality sum_j c_j r_j <= 1
on the rate region.  Coefficients come out of a bottom-up recursion over
the tree driven by two tables: eta (how much of each message a node's
virtual user is still missing) and zeta (the split weight between the
two child branches).  For K = 3 the recursion collapses to a closed form
kept here as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import BicProblem

_TOL = 1e-12


class Obt:
    """Labeled tree with K levels; levels 1..K-1 hold 2^(l-1) nodes, the
    leaf level holds 2^(K-2) (each level-(K-1) node has a single child).

    ``labels[l-1][i-1]`` is the user label of node (l, i).  Root-to-leaf
    label sequences are permutations of the users and siblings never
    share a label.
    """

    def __init__(self, K: int, labels):
        self.K = K
        self.labels = tuple(tuple(level) for level in labels)
        self.validate()

    def label(self, l: int, i: int) -> int:
        return self.labels[l - 1][i - 1]

    def level_size(self, l: int) -> int:
        return 2 ** (l - 1) if l < self.K else 2 ** (self.K - 2)

    def parent_index(self, l: int, i: int) -> int:
        return i if l == self.K else (i + 1) // 2

    def path_labels(self, l: int, i: int):
        """Labels from node (l, i) up to the root, inclusive."""
        out = []
        while l >= 1:
            out.append(self.label(l, i))
            i = self.parent_index(l, i)
            l -= 1
        return out

    def validate(self):
        K = self.K
        if K < 3:
            raise ValueError("trees are defined for K >= 3")
        if len(self.labels) != K:
            raise ValueError("wrong number of levels")
        for l in range(1, K + 1):
            if len(self.labels[l - 1]) != self.level_size(l):
                raise ValueError(f"level {l} has wrong arity")
            for lab in self.labels[l - 1]:
                if not 1 <= lab <= K:
                    raise ValueError(f"label {lab} out of range")
        for i in range(1, self.level_size(K) + 1):
            path = self.path_labels(K, i)
            if sorted(path) != list(range(1, K + 1)):
                raise ValueError(f"leaf {i}: path {path} is not a permutation")
        for l in range(2, K):
            for j in range(1, self.level_size(l - 1) + 1):
                if 2 * j <= self.level_size(l):
                    if self.label(l, 2 * j - 1) == self.label(l, 2 * j):
                        raise ValueError(f"siblings under ({l - 1},{j}) share a label")

    def __eq__(self, other):
        return isinstance(other, Obt) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"Obt(K={self.K}, labels={self.labels})"


def iter_obts(K: int):
    """Yield all valid trees in a fixed deterministic order.

    The count grows like K * prod((K-l)(K-l-1))^(2^(l-1)); K = 6 is
    allowed by contract but enumerating its ~5.7e9 trees is impractical,
    which is why this is a generator.
    """
    if not 3 <= K <= 6:
        raise ValueError("supported K range is 3..6")
    sizes = [2 ** (l - 1) for l in range(1, K)] + [2 ** (K - 2)]
    labels = [[0] * s for s in sizes]

    def parent(l, i):  # 1-based node (l, i)
        return i if l == K else (i + 1) // 2

    def fill(l, i):
        """Assign node (l, i); advance left-to-right, then next level."""
        if l > K:
            yield Obt(K, [tuple(x) for x in labels])
            return
        used = set()
        li, ll = i, l
        while ll > 1:
            li = parent(ll, li)
            ll -= 1
            used.add(labels[ll - 1][li - 1])
        if l < K and i % 2 == 0:
            used.add(labels[l - 1][i - 2])  # sibling to the left
        nl, ni = (l, i + 1) if i < sizes[l - 1] else (l + 1, 1)
        for lab in range(1, K + 1):
            if lab in used:
                continue
            labels[l - 1][i - 1] = lab
            yield from fill(nl, ni)
        labels[l - 1][i - 1] = 0

    yield from fill(1, 1)


def enumerate_obts(K: int):
    """Materialized list of all K-user trees (practical for K <= 5)."""
    return list(iter_obts(K))


def obt3_for_ordering(ordering) -> Obt:
    """The 3-user tree whose bound equals the closed form for (i, j, k):
    root i, children j and k, leaves forced."""
    i, j, k = ordering
    return Obt(3, [(i,), (j, k), (k, j)])


def _mu(p: BicProblem, a: int, b: int) -> float:
    return 1.0 if a == b else p.mu(a, b)


def eta_table(t: Obt, p: BicProblem):
    """eta[(l, i)][j] for levels 1..K-1 (levels the recursion reads)."""
    if t.K != p.K:
        raise ValueError("tree and problem disagree on K")
    K = t.K
    eta = {}
    root = t.label(1, 1)
    row = np.empty(K + 1)
    for j in range(1, K + 1):
        row[j] = 1.0 if j == root else p.mu(root, j)
    eta[(1, 1)] = row
    for l in range(2, K):
        for i in range(1, t.level_size(l) + 1):
            par = (l - 1, t.parent_index(l, i))
            v = t.label(l, i)
            row = np.empty(K + 1)
            for j in range(1, K + 1):
                if j == v and i % 2 == 1:
                    row[j] = 1.0
                elif j == t.label(*par):
                    row[j] = 0.0
                else:
                    row[j] = min(_mu(p, v, j), eta[par][j])
            eta[(l, i)] = row
    return eta


def _zeta(t: Obt, p: BicProblem, eta, l: int, i: int) -> float:
    K = t.K
    if l == K - 1:
        # single child (K, i); the paper's 2i-1 index is read as that child
        return float(eta[(l, i)][t.label(K, i)])
    left = t.label(l + 1, 2 * i - 1)
    right = t.label(l + 1, 2 * i)
    den = 1.0 - p.mu(right, left)
    num = max(eta[(l, i)][left] - p.mu(right, left), 0.0)
    if den <= 0.0:
        assert num <= _TOL, "eta <= 1 forces a zero numerator here"
        return 0.0
    return num / den


@dataclass
class ObtEvaluation:
    tree: Obt
    eta: dict
    zeta: dict
    coeffs: np.ndarray  # coeffs[j-1] multiplies r_j; bound is coeffs . r <= 1


def bound_coefficients(t: Obt, p: BicProblem) -> ObtEvaluation:
    """Evaluate the tree recursion; the bound is linear, so only the
    coefficient vector of the rates is returned."""
    K = t.K
    eta = eta_table(t, p)
    zeta = {(l, i): _zeta(t, p, eta, l, i)
            for l in range(1, K) for i in range(1, t.level_size(l) + 1)}

    def unit(user):
        e = np.zeros(K)
        e[user - 1] = 1.0
        return e

    def gamma_a(l, i):
        z = zeta[(l, i)]
        if l == K - 1:
            return unit(t.label(l, i)) + z * unit(t.label(K, i))
        return (unit(t.label(l, i))
                + z * gamma_a(l + 1, 2 * i - 1)
                + (1.0 - z) * gamma_b(l + 1, 2 * i))

    def gamma_b(l, i):
        par = (l - 1, t.parent_index(l, i))
        scale = eta[par][t.label(l, i)]
        z = zeta[(l, i)]
        if l == K - 1:
            return scale * unit(t.label(l, i)) + z * unit(t.label(K, i))
        return (scale * unit(t.label(l, i))
                + z * gamma_a(l + 1, 2 * i - 1)
                + (1.0 - z) * gamma_b(l + 1, 2 * i))

    coeffs = gamma_a(1, 1)
    assert abs(coeffs[t.label(1, 1) - 1] - 1.0) <= _TOL
    assert (coeffs >= -_TOL).all() and (coeffs <= 1.0 + _TOL).all()
    return ObtEvaluation(t, eta, zeta, coeffs)


def three_user_closed_form(p: BicProblem, ordering) -> np.ndarray:
    """Coefficient vector of the 3-user bound for ordering (i, j, k)."""
    if p.K != 3:
        raise ValueError("closed form is for K = 3")
    i, j, k = ordering
    c = np.zeros(3)
    c[i - 1] = 1.0
    c[j - 1] = p.mu(i, j)
    num1 = max(p.mu(i, j) - p.mu(k, j), 0.0)
    num2 = max(p.mu(i, k) - p.mu(j, k), 0.0)
    if num1 > 0.0 and num2 > 0.0:
        c[k - 1] = p.mu(i, k) - num1 * num2 / (1.0 - p.mu(k, j))
    else:
        c[k - 1] = p.mu(i, k)
    return c


def tightest_sym_bound(p: BicProblem) -> float:
    """min over all trees of 1/sum(c): the best symmetric-rate converse."""
    worst = 0.0
    for t in iter_obts(p.K):
        worst = max(worst, float(bound_coefficients(t, p).coeffs.sum()))
    return 1.0 / worst
