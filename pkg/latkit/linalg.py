"""
Exact integer and rational matrix kernel.

Matrices are numpy arrays of ``dtype=object`` holding Python ``int`` (integer
matrices) or ``fractions.Fraction`` (rational matrices), so no entry ever
overflows. Vectors are rows; a matrix ``g`` acts on a row vector ``x`` as
``x @ g``.
"""
import math
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from latkit.exceptions.latkit_exception import LatkitValidationException


class Inertia(NamedTuple):
    n_plus: int
    n_zero: int
    n_minus: int


def int_matrix(rows, cols: int = None) -> np.ndarray:
    """Build an integer matrix from nested sequences.

    Parameters
    ----------
        rows:
            nested sequence (or 2-d array) of integral entries
        cols:
            column count, only needed when ``rows`` is empty

    Returns
    -------
    matrix:
        2-d numpy array of Python ints
    """
    rows = [list(row) for row in rows]
    if not rows:
        return np.zeros((0, cols or 0), dtype=object)
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise LatkitValidationException("Matrix {0} is ragged.".format(rows))
    out = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            if isinstance(entry, bool) or not _is_integral(entry):
                raise LatkitValidationException("Matrix entry {0} is not an integer.".format(entry))
            out[i, j] = int(entry)
    return out


def rational_matrix(rows, cols: int = None) -> np.ndarray:
    rows = [list(row) for row in rows]
    if not rows:
        return np.zeros((0, cols or 0), dtype=object)
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            out[i, j] = Fraction(entry)
    return out


def identity(n: int) -> np.ndarray:
    return int_matrix([[int(i == j) for j in range(n)] for i in range(n)], cols=n)


def as_key(matrix) -> tuple:
    """Hashable form of a matrix or vector."""
    matrix = np.asarray(matrix, dtype=object)
    if matrix.ndim == 1:
        return tuple(int(x) if _is_integral(x) else Fraction(x) for x in matrix)
    return tuple(as_key(row) for row in matrix)


def is_integral(matrix) -> bool:
    return all(_is_integral(x) for x in np.asarray(matrix, dtype=object).flat)


def to_int(matrix) -> np.ndarray:
    """Convert an integral rational matrix to an integer matrix."""
    matrix = np.asarray(matrix, dtype=object)
    if not is_integral(matrix):
        raise LatkitValidationException("Matrix {0} is not integral.".format(matrix.tolist()))
    out = np.empty(matrix.shape, dtype=object)
    for idx, x in np.ndenumerate(matrix):
        out[idx] = int(x)
    return out


def _is_integral(x) -> bool:
    if isinstance(x, (int, np.integer)):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, float):
        return x.is_integer()
    return False


def smith_normal_form(A) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Smith normal form with transformation matrices.

    The pivot is always the entry of smallest nonzero absolute value in the
    remaining block.

    Parameters
    ----------
        A:
            integer matrix of any shape

    Returns
    -------
    (U, D, V):
        unimodular U and V with ``U @ A @ V == D``; D diagonal, nonnegative,
        each diagonal entry dividing the next
    """
    A = int_matrix(A) if not isinstance(A, np.ndarray) else A
    m, n = A.shape
    D = [[int(x) for x in row] for row in A.tolist()]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(target, source, q):
        D[target] = [a + q * b for a, b in zip(D[target], D[source])]
        U[target] = [a + q * b for a, b in zip(U[target], U[source])]

    def add_col(target, source, q):
        for row in D:
            row[target] += q * row[source]
        for row in V:
            row[target] += q * row[source]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < best[0]):
                    best = (abs(D[i][j]), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            pivot = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // pivot))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // pivot))
            leftovers = [(abs(D[i][t]), i, 'row') for i in range(t + 1, m) if D[i][t]]
            leftovers += [(abs(D[t][j]), j, 'col') for j in range(t + 1, n) if D[t][j]]
            if leftovers:
                _, index, kind = min(leftovers)
                if kind == 'row':
                    swap_rows(t, index)
                else:
                    swap_cols(t, index)
                continue
            offender = next((i for i in range(t + 1, m) for j in range(t + 1, n)
                             if D[i][j] % pivot), None)
            if offender is None:
                break
            add_row(t, offender, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return int_matrix(U, cols=m), int_matrix(D, cols=n), int_matrix(V, cols=n)


def elementary_divisors(A) -> list:
    """Nonzero diagonal entries of the Smith normal form."""
    _, D, _ = smith_normal_form(A)
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


def det_exact(A) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss elimination)."""
    A = np.asarray(A, dtype=object)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LatkitValidationException("Matrix {0} is not square.".format(A.tolist()))
    n = A.shape[0]
    if n == 0:
        return 1
    M = [[int(x) for x in row] for row in A.tolist()]
    sign = 1
    previous = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // previous
        previous = M[k][k]
    return sign * M[n - 1][n - 1]


def inertia_ldlt(G) -> Inertia:
    """Sign counts of a symmetric rational matrix.

    Exact symmetric LDL^T elimination over the rationals. A nonzero diagonal
    entry is moved to the front by a symmetric permutation; when the whole
    diagonal vanishes a 2x2 block pivot on a nonzero off-diagonal entry is
    used, contributing one positive and one negative sign.

    Parameters
    ----------
        G:
            symmetric matrix with int or Fraction entries

    Returns
    -------
    inertia:
        (n_plus, n_zero, n_minus)
    """
    G = np.asarray(G, dtype=object)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise LatkitValidationException("Matrix {0} is not square.".format(G.tolist()))
    A = rational_matrix(G.tolist(), cols=G.shape[1])
    if not np.array_equal(A, A.T):
        raise LatkitValidationException("Matrix {0} is not symmetric.".format(A.tolist()))
    plus = zero = minus = 0
    while A.shape[0]:
        n = A.shape[0]
        diagonal = [i for i in range(n) if A[i, i] != 0]
        if diagonal:
            i = max(diagonal, key=lambda k: abs(A[k, k]))
            perm = [i] + [k for k in range(n) if k != i]
            A = A[np.ix_(perm, perm)]
            pivot = A[0, 0]
            if pivot > 0:
                plus += 1
            else:
                minus += 1
            column = A[1:, 0]
            A = A[1:, 1:] - np.outer(column, column) / pivot
            continue
        off = [(i, j) for i in range(n) for j in range(i + 1, n) if A[i, j] != 0]
        if not off:
            zero += n
            break
        i, j = off[0]
        perm = [i, j] + [k for k in range(n) if k not in (i, j)]
        A = A[np.ix_(perm, perm)]
        b = A[0, 1]
        plus += 1
        minus += 1
        C = A[2:, :2]
        A = A[2:, 2:] - (np.outer(C[:, 0], C[:, 1]) + np.outer(C[:, 1], C[:, 0])) / b
    return Inertia(plus, zero, minus)


def _gauss_jordan(A):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    R = [[Fraction(x) for x in row] for row in np.asarray(A, dtype=object).tolist()]
    pivots = []
    row = 0
    cols = len(R[0]) if R else 0
    for col in range(cols):
        sel = next((i for i in range(row, len(R)) if R[i][col] != 0), None)
        if sel is None:
            continue
        R[row], R[sel] = R[sel], R[row]
        p = R[row][col]
        R[row] = [x / p for x in R[row]]
        for i in range(len(R)):
            if i != row and R[i][col] != 0:
                f = R[i][col]
                R[i] = [a - f * b for a, b in zip(R[i], R[row])]
        pivots.append(col)
        row += 1
        if row == len(R):
            break
    return R, pivots


def rational_rank(A) -> int:
    A = np.asarray(A, dtype=object)
    if A.size == 0:
        return 0
    return len(_gauss_jordan(A)[1])


def rational_inverse(A) -> np.ndarray:
    """Inverse over Q by Gauss-Jordan elimination on the augmented matrix."""
    A = np.asarray(A, dtype=object)
    n = A.shape[0]
    if A.shape != (n, n):
        raise LatkitValidationException("Matrix {0} is not square.".format(A.tolist()))
    if n == 0:
        return np.zeros((0, 0), dtype=object)
    augmented = [list(A[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    R, pivots = _gauss_jordan(augmented)
    if pivots[:n] != list(range(n)):
        raise LatkitValidationException("Matrix {0} is singular.".format(A.tolist()))
    return rational_matrix([row[n:] for row in R])


def integer_inverse(U) -> np.ndarray:
    """Inverse of a unimodular integer matrix."""
    return to_int(rational_inverse(U))


def integer_left_kernel(A) -> np.ndarray:
    """Basis (as rows) of {x in Z^m : x @ A == 0}; the basis is always primitive."""
    A = np.asarray(A, dtype=object)
    m = A.shape[0]
    if m == 0:
        return np.zeros((0, 0), dtype=object)
    if A.shape[1] == 0:
        return identity(m)
    U, D, _ = smith_normal_form(A)
    rank = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    return int_matrix(U[rank:].tolist(), cols=m)


def solve_integer(A, f) -> Optional[np.ndarray]:
    """Integer row vector x with x @ A == f, or None when no integer solution exists."""
    A = np.asarray(A, dtype=object)
    m, n = A.shape
    U, D, V = smith_normal_form(A)
    target = np.asarray(list(f), dtype=object).dot(V) if n else np.zeros(0, dtype=object)
    y = [0] * m
    for j in range(n):
        d = D[j, j] if j < m else 0
        if d == 0:
            if Fraction(target[j]) != 0:
                return None
            continue
        value = Fraction(target[j]) / d
        if value.denominator != 1:
            return None
        y[j] = int(value)
    return np.asarray(y, dtype=object).dot(U) if m else np.zeros(0, dtype=object)


def row_lattice_basis(rows) -> np.ndarray:
    """Basis of the Z-span of rational row vectors.

    Parameters
    ----------
        rows:
            generating vectors, int or Fraction entries

    Returns
    -------
    basis:
        Fraction matrix whose rows are a basis of the generated lattice
    """
    rows = np.asarray(rows, dtype=object)
    denominator = 1
    for x in rows.flat:
        denominator = denominator * Fraction(x).denominator // math.gcd(denominator, Fraction(x).denominator)
    scaled = to_int(rows * denominator)
    _, D, V = smith_normal_form(scaled)
    rank = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    basis = D[:rank].dot(integer_inverse(V))
    return rational_matrix((basis * Fraction(1, denominator)).tolist(), cols=rows.shape[1])


def pair_reduce(G) -> Tuple[np.ndarray, np.ndarray]:
    """Pairwise size reduction of a positive definite Gram matrix.

    Repeatedly replaces b_i by b_i - q*b_j, q the nearest integer to
    b(b_i,b_j)/b(b_j,b_j), while this shortens b_i.

    Returns
    -------
    (R, reduced):
        unimodular R and ``reduced == R @ G @ R.T``
    """
    G = [[int(x) for x in row] for row in np.asarray(G, dtype=object).tolist()]
    n = len(G)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                norm_j = G[j][j]
                q = (2 * G[i][j] + norm_j) // (2 * norm_j)
                if q == 0:
                    continue
                shorter = G[i][i] - 2 * q * G[i][j] + q * q * norm_j
                if shorter >= G[i][i]:
                    continue
                R[i] = [a - q * b for a, b in zip(R[i], R[j])]
                row = [G[i][k] - q * G[j][k] for k in range(n)]
                for k in range(n):
                    G[i][k] = G[k][i] = row[k]
                G[i][i] = shorter
                changed = True
    return int_matrix(R, cols=n), int_matrix(G, cols=n)


def random_unimodular(n: int, rng, steps: int = None, spread: int = 1) -> np.ndarray:
    """Random unimodular matrix as a product of elementary operations drawn from ``rng``."""
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return int_matrix([[rng.choice((1, -1))]] if n else [], cols=n)
    for _ in range(steps if steps is not None else 3 * n):
        i, j = rng.sample(range(n), 2)
        q = rng.choice([k for k in range(-spread, spread + 1) if k])
        M[i] = [a + q * b for a, b in zip(M[i], M[j])]
        if rng.random() < 0.3:
            M[i], M[j] = M[j], M[i]
    return int_matrix(M, cols=n)


def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    return g
