"""Independent reference computations used to cross-check the package.

Nothing here calls into choicelab's algorithms; inputs are plain tier lists
or margin dictionaries so a shared bug cannot hide on both sides.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def rank_of(tiers):
    return {a: k for k, tier in enumerate(tiers) for a in tier}


def count_margins(ballots, m):
    """g[a][b] = #voters ranking a strictly above b minus the reverse; ballots are tier lists."""
    g = [[0] * m for _ in range(m)]
    for tiers in ballots:
        r = rank_of(tiers)
        for a in range(m):
            for b in range(m):
                if r[a] < r[b]:
                    g[a][b] += 1
                elif r[a] > r[b]:
                    g[a][b] -= 1
    return g


def tournament_from_bits(m, bits):
    """Pairs (i<j) lexicographic; bit 1 means i beats j."""
    g = [[0] * m for _ in range(m)]
    for (i, j), bit in zip(itertools.combinations(range(m), 2), bits):
        g[i][j], g[j][i] = (1, -1) if bit else (-1, 1)
    return g


def all_tournaments(m):
    k = m * (m - 1) // 2
    for bits in itertools.product((1, 0), repeat=k):
        yield bits, tournament_from_bits(m, bits)


def copeland_oracle(g, A):
    score = {a: sum((g[a][b] > 0) - (g[a][b] < 0) for b in A if b != a) for a in A}
    best = max(score.values())
    return frozenset(a for a in A if score[a] == best)


def borda_oracle(g, A):
    score = {a: sum(g[a][b] for b in A) for a in A}
    best = max(score.values())
    return frozenset(a for a in A if score[a] == best)


def smith_oracle(g, A):
    """Smallest nonempty D with every member strictly beating every outsider."""
    A = sorted(A)
    for r in range(1, len(A) + 1):
        for D in itertools.combinations(A, r):
            if all(g[d][y] > 0 for d in D for y in A if y not in D):
                return frozenset(D)
    raise AssertionError("A itself is always dominant")


def _sgn(v):
    return (v > 0) - (v < 0)


def covers_oracle(g, S, x, y):
    """x beats y, and x does at least as well as y against everyone else in S."""
    if g[x][y] <= 0:
        return False
    return all(_sgn(g[x][z]) >= _sgn(g[y][z]) for z in S if z not in (x, y))


def uncovered_oracle(g, A):
    return frozenset(y for y in A if not any(covers_oracle(g, A, x, y) for x in A if x != y))


def is_covering_oracle(g, B, A):
    """Every outsider is covered once it is added to B."""
    for y in set(A) - set(B):
        if y in uncovered_oracle(g, set(B) | {y}):
            return False
    return True


def mc_oracle(g, A):
    """The inclusion-minimal covering set, found by scanning every subset."""
    A = sorted(A)
    covering = [
        frozenset(B)
        for r in range(1, len(A) + 1)
        for B in itertools.combinations(A, r)
        if is_covering_oracle(g, B, A)
    ]
    minimal = [B for B in covering if not any(C < B for C in covering)]
    assert len(minimal) == 1, minimal
    return minimal[0]


def _solve(M, rhs):
    """Gauss-Jordan over Fractions; None if singular."""
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(r)] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col] / aug[col][col]
                aug[r] = [u - f * v for u, v in zip(aug[r], aug[col])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def tournament_equilibrium(g, A):
    """Unique optimal strategy of an odd tournament game, by support enumeration."""
    A = sorted(A)
    found = []
    for r in range(1, len(A) + 1, 2):
        for S in itertools.combinations(A, r):
            # p^T G_S = 0 on S plus sum p = 1; drop one redundant column equation
            M = [[g[a][b] for a in S] for b in S[:-1]] + [[1] * len(S)]
            p = _solve(M, [0] * (len(S) - 1) + [1])
            if p is None or any(v <= 0 for v in p):
                continue
            if any(sum(pa * g[a][b] for pa, a in zip(p, S)) != 0 for b in S):
                continue
            if all(sum(pa * g[a][y] for pa, a in zip(p, S)) > 0 for y in A if y not in S):
                found.append(dict(zip(S, p)))
    assert len(found) == 1, found
    return found[0]
