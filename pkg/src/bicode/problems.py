"""Problem definitions, validation, and side-information sampling.

The erasure-style side information model: user i misses each bit of
message j independently with probability mu[i][j], and the sender only
ever sees the mu matrix, never the realized masks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .gf2 import SeededRng

TOL = 1e-12


class BicProblem:
    """K users and the K x K matrix of side-information parameters.

    ``mu[i][j]`` (1-based users i != j) is the probability that a given
    bit of message j is absent from user i's side information.  The
    diagonal is fixed to 1: a user has no prior on its own message.
    """

    def __init__(self, K: int, mu):
        if K < 2:
            raise ValueError("need at least 2 users")
        mu = np.array(mu, dtype=object)
        if mu.shape != (K, K):
            raise ValueError(f"mu must be {K}x{K}")
        clean = np.ones((K, K), dtype=np.float64)
        for i in range(K):
            for j in range(K):
                if i == j:
                    continue
                v = mu[i, j]
                if v is None:
                    raise ValueError(f"mu[{i + 1}][{j + 1}] missing")
                v = float(v)
                if not (0.0 <= v <= 1.0):
                    raise ValueError(f"mu[{i + 1}][{j + 1}]={v} outside [0,1]")
                clean[i, j] = v
        self.K = K
        self.mu_matrix = clean

    def mu(self, i: int, j: int) -> float:
        """Side-information parameter for (user i, message j), 1-based."""
        return float(self.mu_matrix[i - 1, j - 1])

    def relabel(self, ordering) -> "BicProblem":
        """Problem with users renamed so new user a is old user ordering[a-1]."""
        perm = [o - 1 for o in ordering]
        if sorted(perm) != list(range(self.K)):
            raise ValueError(f"not a permutation of 1..{self.K}: {ordering}")
        m = self.mu_matrix[np.ix_(perm, perm)]
        return BicProblem(self.K, m)

    def __repr__(self):
        return f"BicProblem(K={self.K})"


@dataclass
class BicwProblem:
    """Two-user wireless setting: erasure channels eps1 < eps2, and side
    information about message 1 at user 2 only (absence probability mu)."""

    eps1: float
    eps2: float
    mu: float

    def __post_init__(self):
        if not (0.0 <= self.eps1 < 1.0 and 0.0 <= self.eps2 < 1.0):
            raise ValueError("erasure probabilities must be in [0,1)")
        if not self.eps1 < self.eps2:
            raise ValueError("model requires eps1 < eps2")
        if not (0.0 <= self.mu <= 1.0):
            raise ValueError("mu must be in [0,1]")


@dataclass
class RateTuple:
    r: np.ndarray

    def __init__(self, r):
        r = np.asarray(r, dtype=np.float64)
        if r.ndim != 1 or (r < 0).any():
            raise ValueError("rates must be a vector of nonnegative numbers")
        self.r = r

    @classmethod
    def symmetric(cls, K: int, rate: float) -> "RateTuple":
        return cls(np.full(K, rate))


@dataclass
class SideInfoRealization:
    """Masks g[(i, j)] (1-based user pair, i != j): bit 1 = user i knows
    that bit of message j."""

    K: int
    g: dict = field(default_factory=dict)

    def mask(self, i: int, j: int) -> np.ndarray:
        return self.g[(i, j)]


def valid_orderings(p: BicProblem):
    """All user relabelings under which the 3-user coding condition holds.

    Ordering (i, j, k) renames i -> 1, j -> 2, k -> 3 and requires
    mu32 <= mu23 <= max(mu_1s, mu_s1) for s = 2 or s = 3 after renaming.
    At least one ordering always qualifies.
    """
    if p.K != 3:
        raise ValueError("orderings are defined for K = 3 only")
    out = []
    for perm in itertools.permutations((1, 2, 3)):
        q = p.relabel(perm)
        bound = max(q.mu(1, 2), q.mu(2, 1), q.mu(1, 3), q.mu(3, 1))
        if q.mu(3, 2) <= q.mu(2, 3) + TOL and q.mu(2, 3) <= bound + TOL:
            out.append(perm)
    if not out:
        raise AssertionError("no valid ordering; parameter matrix violates the model")
    return out


def realize_side_info(p: BicProblem, message_lengths, rng: SeededRng) -> SideInfoRealization:
    """Draw the g masks, bit (i,j,l) present with probability 1 - mu[i][j].

    Draws happen in a fixed (i, j) order so a given rng seed always
    produces the same realization.
    """
    lengths = list(message_lengths)
    if len(lengths) != p.K or any(m < 0 for m in lengths):
        raise ValueError("need one nonnegative length per user")
    si = SideInfoRealization(p.K)
    for i in range(1, p.K + 1):
        for j in range(1, p.K + 1):
            if i == j:
                continue
            si.g[(i, j)] = rng.bernoulli(1.0 - p.mu(i, j), lengths[j - 1])
    return si


def message_length(n: int, rate: float, margin: float) -> int:
    """Finite-n message size floor(n * rate * (1 - margin))."""
    if not (0.0 <= margin < 1.0):
        raise ValueError("margin must be in [0,1)")
    return int(np.floor(n * rate * (1.0 - margin)))


def bic_problem_from_json(text: str) -> BicProblem:
    """Parse {"K":3, "mu":[[null,...],...]} (null diagonal accepted)."""
    doc = json.loads(text)
    try:
        K = int(doc["K"])
        mu = [[1.0 if (i == j) else row[j] for j in range(len(row))]
              for i, row in enumerate(doc["mu"])]
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"problem document needs K and a KxK mu matrix: {e}") from None
    return BicProblem(K, mu)


def bicw_problem_from_json(text: str) -> BicwProblem:
    doc = json.loads(text)
    try:
        return BicwProblem(float(doc["eps1"]), float(doc["eps2"]), float(doc["mu"]))
    except KeyError as e:
        raise ValueError(f"problem document needs eps1, eps2, mu: missing {e}") from None
