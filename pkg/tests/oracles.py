"""Small independent reference implementations used by the tests (plain Fractions, dense loops)."""

import itertools
from collections import Counter
from fractions import Fraction
from math import factorial


def frac(x):
    return Fraction(int(x.numerator), int(x.denominator))


def dense(M):
    return [[frac(v) for v in row] for row in M.dense()]


def matmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def matadd(A, B, c=1):
    return [[a + c * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def eye(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def dense_exp(X):
    n = len(X)
    total, power = eye(n), eye(n)
    for k in range(1, n):
        power = matmul(power, X)
        total = matadd(total, power, Fraction(1, factorial(k)))
    return total


def dense_inv(U):
    # unipotent: (I + N)^-1 = sum (-N)^k
    n = len(U)
    N = matadd(U, eye(n), -1)
    total, power = eye(n), eye(n)
    for k in range(1, n):
        power = matmul(power, N)
        total = matadd(total, power, (-1) ** k)
    return total


def word_values(gens, N, mul, identity, inv, key):
    """All products of words in gens and inverses using each generator (either sign) at most N times."""
    letters = [(i, g) for i, g in enumerate(gens)] + [(i, inv(g)) for i, g in enumerate(gens)]
    out = {key(identity): identity}
    frontier = [(identity, (0,) * len(gens))]
    seen = {(key(identity), (0,) * len(gens))}
    while frontier:
        nxt = []
        for g, use in frontier:
            for i, h in letters:
                if use[i] == N:
                    continue
                u = list(use)
                u[i] += 1
                p = mul(g, h)
                state = (key(p), tuple(u))
                if state not in seen:
                    seen.add(state)
                    out.setdefault(key(p), p)
                    nxt.append((p, tuple(u)))
        frontier = nxt
    return out


def product_counts(A, B, mul, key):
    r = Counter()
    for a in A:
        for b in B:
            r[key(mul(a, b))] += 1
    return r


def quadruple_energy(A, B, mul, key):
    prods = [key(mul(a, b)) for a in A for b in B]
    return sum(1 for p in prods for q in prods if p == q)


def interval_triples(N):
    xs = range(-N, N + 1)
    return sum(1 for a, b in itertools.product(xs, xs) if -N <= a + b <= N)
