"""Exact integer linear systems via column elimination.

``solve_integer_system`` finds one integer solution of ``A x = b`` together
with a basis of the solution lattice of ``A x = 0``, by reducing ``A`` to
column echelon form with unimodular column operations (the transform is the
column-style Hermite reduction).  A deterministic local search then shrinks
the particular solution modulo the kernel, preferring small max-norm and
then lexicographic order on a designated prefix of the coordinates.
"""

from __future__ import annotations

def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _column_echelon(A: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[tuple[int, int]]]:
    """Return (H, U, pivots) with H = A * U, U unimodular, H in column echelon."""
    m = len(A)
    n = len(A[0]) if m else 0
    H = [row[:] for row in A]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    col = 0
    pivots: list[tuple[int, int]] = []

    def combine(c1: int, c2: int, a: int, b: int, c: int, d: int) -> None:
        # (col c1, col c2) <- (a*c1 + b*c2, c*c1 + d*c2), det = ad - bc = +-1
        for M in (H, U):
            for row in M:
                v1, v2 = row[c1], row[c2]
                row[c1] = a * v1 + b * v2
                row[c2] = c * v1 + d * v2

    def swap(c1: int, c2: int) -> None:
        if c1 == c2:
            return
        for M in (H, U):
            for row in M:
                row[c1], row[c2] = row[c2], row[c1]

    for row_i in range(m):
        piv = None
        for c in range(col, n):
            if H[row_i][c] == 0:
                continue
            if piv is None:
                piv = c
                continue
            g, s, t = _ext_gcd(H[row_i][piv], H[row_i][c])
            a1 = H[row_i][piv] // g
            b1 = H[row_i][c] // g
            combine(piv, c, s, t, -b1, a1)
        if piv is not None:
            swap(col, piv)
            if H[row_i][col] < 0:
                for M in (H, U):
                    for row in M:
                        row[col] = -row[col]
            pivots.append((row_i, col))
            col += 1
            if col == n:
                break
    return H, U, pivots


def solve_integer_system(
    A: list[list[int]], b: list[int], minimize_prefix: int | None = None
) -> list[int] | None:
    """One integer solution of A x = b, or None; kernel-reduced on a prefix.

    When ``minimize_prefix = k`` the solution is locally minimized over the
    solution lattice with respect to (max-norm, lex) of its first k
    coordinates.  Minimization is a bounded deterministic search, not a
    shortest-vector computation.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if any(len(row) != n for row in A) or len(b) != m:
        raise ValueError("ragged system")
    if n == 0:
        return [] if all(v == 0 for v in b) else None

    H, U, pivots = _column_echelon(A)
    y = [0] * n
    for row_i, c in pivots:
        acc = b[row_i] - sum(H[row_i][cc] * y[cc] for cc in range(c))
        if acc % H[row_i][c] != 0:
            return None
        y[c] = acc // H[row_i][c]
    x = [sum(U[i][c] * y[c] for c in range(n)) for i in range(n)]
    if any(sum(A[r][i] * x[i] for i in range(n)) != b[r] for r in range(m)):
        return None

    rank = len(pivots)
    kernel = [[U[i][c] for i in range(n)] for c in range(rank, n)]
    if minimize_prefix is None:
        minimize_prefix = n
    return _reduce(x, kernel, minimize_prefix)


def _key(x: list[int], k: int) -> tuple:
    prefix = x[:k]
    return (max((abs(v) for v in prefix), default=0), prefix)


def _reduce(x: list[int], kernel: list[list[int]], k: int) -> list[int]:
    if not kernel or k == 0:
        return x
    best = x[:]
    best_key = _key(best, k)
    improved = True
    rounds = 0
    while improved and rounds < 64:
        improved = False
        rounds += 1
        for vec in kernel:
            # best step along vec by coarse line search on the prefix norm
            for t in _steps(best, vec, k):
                cand = [a + t * v for a, v in zip(best, vec)]
                ck = _key(cand, k)
                if ck < best_key:
                    best, best_key = cand, ck
                    improved = True
    if len(kernel) <= 6:
        for i in range(len(kernel)):
            for j in range(i + 1, len(kernel)):
                for ti in (-2, -1, 1, 2):
                    for tj in (-2, -1, 1, 2):
                        cand = [
                            a + ti * u + tj * v
                            for a, u, v in zip(best, kernel[i], kernel[j])
                        ]
                        ck = _key(cand, k)
                        if ck < best_key:
                            best, best_key = cand, ck
    return best


def _steps(x: list[int], vec: list[int], k: int):
    seen = {0}
    for i in range(k):
        if vec[i]:
            t = -round(x[i] / vec[i])
            for dt in (-1, 0, 1):
                s = t + dt
                if s not in seen:
                    seen.add(s)
                    yield s
    for s in (-1, 1):
        if s not in seen:
            seen.add(s)
            yield s
