"""
Dense complex linear algebra on tensor powers H^{⊗k}.

All functions are pure: they never modify their arguments and always return new
arrays of dtype complex128. Matrices are plain two-dimensional numpy arrays.
The basis of a tensor product is ordered lexicographically with the first
factor as the slow index, so `np.kron`, `partial_trace` and
`permutation_operator` agree with one another.
"""
import math

import numpy as np

from .exceptions import DimensionError, InvalidParameterError, ShapeMismatchError
from .models import MAX_TENSOR_DIM, Permutation, TensorSpace


# Largest side of a dense operator built from a permutation (2**12 x 2**12 complex = 256 MiB).
MAX_OPERATOR_DIM = 2 ** 12

# Σ_s Γ(s) over S_5 already has 120 terms; the projector family stops at k = 4.
MAX_SYMMETRIC_FACTORS = 4


def as_matrix(value, name='matrix'):
    """
    Coerce `value` into a finite two-dimensional complex array.

    Args:
        value (array_like): Anything `np.asarray` accepts.
        name (str): Used in error messages.

    Returns:
        (np.ndarray): complex128 array with `ndim == 2`.

    Raises:
        ShapeMismatchError: If the value is not two-dimensional or is empty.
        InvalidParameterError: If an entry is NaN or infinite.
    """
    matrix = np.asarray(value, dtype=complex)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ShapeMismatchError(f"{name} must be a non-empty 2-D matrix, got shape {matrix.shape}.")
    if not np.all(np.isfinite(matrix)):
        raise InvalidParameterError(f"{name} has NaN or infinite entries.")
    return matrix


def as_vector(value, name='vector'):
    """Coerce `value` into a finite one-dimensional complex array."""
    vector = np.asarray(value, dtype=complex).reshape(-1)
    if vector.size == 0:
        raise ShapeMismatchError(f"{name} must be non-empty.")
    if not np.all(np.isfinite(vector)):
        raise InvalidParameterError(f"{name} has NaN or infinite entries.")
    return vector


def dagger(matrix):
    """Conjugate transpose."""
    return np.conj(matrix).T


def unit_matrix(rows, i, j, cols=None):
    """
    The matrix unit e_i e_j^* with a single 1 at (i, j).

    Args:
        rows (int): Number of rows.
        i (int): Row of the 1.
        j (int): Column of the 1.
        cols (int): Number of columns, defaults to `rows`.
    """
    unit = np.zeros((rows, cols or rows), dtype=complex)
    unit[i, j] = 1.0
    return unit


def matrix_units(n):
    """Yield `(i, j, e_i e_j^*)` for the full n x n matrix-unit basis, row-major."""
    for i in range(n):
        for j in range(n):
            yield i, j, unit_matrix(n, i, j)


def kron(a, b):
    """
    Kronecker product A ⊗ B with the first factor as the slow index.

    Args:
        a (np.ndarray): First factor.
        b (np.ndarray): Second factor.

    Returns:
        (np.ndarray): Matrix of shape (rows_A rows_B, cols_A cols_B).

    Raises:
        DimensionError: If either side of the result exceeds `MAX_TENSOR_DIM`.
    """
    a = as_matrix(a, 'A')
    b = as_matrix(b, 'B')
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_TENSOR_DIM or cols > MAX_TENSOR_DIM:
        raise DimensionError(f"kron result {rows}x{cols} exceeds the dense limit {MAX_TENSOR_DIM}.")
    return np.kron(a, b)


def kron_all(*factors):
    """Left-to-right Kronecker product of one or more matrices."""
    if not factors:
        raise ShapeMismatchError("kron_all needs at least one factor.")
    result = as_matrix(factors[0])
    for factor in factors[1:]:
        result = kron(result, factor)
    return result


def partial_trace(a, dims, keep):
    """
    Trace out every factor of `a` that is not listed in `keep`.

    Factors are numbered from 0. Tracing every factor is allowed and returns
    the scalar trace as a 1 x 1 matrix.

    Args:
        a (np.ndarray): Square operator on the product of `dims`.
        dims (list): Dimension of each tensor factor.
        keep (iterable): Indices of the factors to keep; the result lists them
            in increasing order.

    Returns:
        (np.ndarray): Operator on the kept factors.

    Raises:
        ShapeMismatchError: If `a` is not square of side prod(dims), or a kept
            index is out of range.

    Examples:
        ```
        partial_trace(kron(A, B), [n, n], keep=[1])  # tr(A) B
        ```
    """
    a = as_matrix(a, 'A')
    dims = [int(dim) for dim in dims]
    total = math.prod(dims)
    if a.shape != (total, total):
        raise ShapeMismatchError(f"Operator of shape {a.shape} does not act on factors {dims}.")
    keep = sorted(set(int(i) for i in keep))
    if any(i < 0 or i >= len(dims) for i in keep):
        raise ShapeMismatchError(f"Kept factors {keep} out of range for {len(dims)} factors.")

    factors = len(dims)
    row_labels = list(range(factors))
    col_labels = [factors + i if i in keep else i for i in range(factors)]
    out_labels = keep + [factors + i for i in keep]
    reduced = np.einsum(a.reshape(dims + dims), row_labels + col_labels, out_labels)
    kept_dim = math.prod(dims[i] for i in keep)
    return np.asarray(reduced, dtype=complex).reshape(kept_dim, kept_dim)


def permutation_operator(space, s):
    """
    The unitary Γ(s) on `space` that moves the vector in slot i to slot s(i).

    Equivalently factor j of the output is x_{s^{-1}(j)}, so
    Γ(s)Γ(t) = Γ(s ∘ t) and Γ(transposition) on two factors is the swap.

    Args:
        space (TensorSpace): The tensor power the operator acts on.
        s (Permutation): Permutation on `space.factors` points.

    Returns:
        (np.ndarray): n^k x n^k permutation matrix.

    Raises:
        InvalidParameterError: If `s` has the wrong number of points.
        DimensionError: If n^k exceeds `MAX_OPERATOR_DIM`.
    """
    if len(s) != space.factors:
        raise InvalidParameterError(
            f"Permutation on {len(s)} points cannot act on {space.factors} factors."
        )
    if space.dim > MAX_OPERATOR_DIM:
        raise DimensionError(f"Dense operator on dimension {space.dim} exceeds {MAX_OPERATOR_DIM}.")
    inverse = s.inverse()
    axes = tuple(inverse(j) for j in range(space.factors))
    # row o holds its 1 in the column c with c_m = o_{s(m)}
    columns = np.arange(space.dim).reshape(space.dims).transpose(axes).reshape(-1)
    operator = np.zeros((space.dim, space.dim), dtype=complex)
    operator[np.arange(space.dim), columns] = 1.0
    return operator


def swap_operator(n):
    """The swap S(x ⊗ y) = y ⊗ x on C^n ⊗ C^n."""
    return permutation_operator(TensorSpace(n, 2), Permutation((1, 0)))


def permutation_sum(space):
    """
    The unnormalised sum Σ_{s ∈ S_k} Γ(s).

    Raises:
        DimensionError: If `space.factors` exceeds `MAX_SYMMETRIC_FACTORS`.
    """
    if space.factors > MAX_SYMMETRIC_FACTORS:
        raise DimensionError(
            f"Permutation sums are limited to k <= {MAX_SYMMETRIC_FACTORS}, got k={space.factors}."
        )
    total = np.zeros((space.dim, space.dim), dtype=complex)
    for s in Permutation.all(space.factors):
        total += permutation_operator(space, s)
    return total


def symmetric_projector(space):
    """
    The orthogonal projection P_k = Σ_s Γ(s) / k! onto the symmetric subspace.

    Its trace (the rank) is binomial(n + k - 1, k).

    Raises:
        DimensionError: If `space.factors` exceeds `MAX_SYMMETRIC_FACTORS`.
    """
    return permutation_sum(space) / math.factorial(space.factors)


def hs_inner(a, b):
    """
    Hilbert-Schmidt inner product <A, B> = tr(A B^*).

    Raises:
        ShapeMismatchError: If the shapes differ.
    """
    a = as_matrix(a, 'A')
    b = as_matrix(b, 'B')
    if a.shape != b.shape:
        raise ShapeMismatchError(f"hs_inner needs equal shapes, got {a.shape} and {b.shape}.")
    return complex(np.vdot(b, a))


def hs_norm(a):
    """Hilbert-Schmidt (Frobenius) norm ||A||_2."""
    return float(np.linalg.norm(as_matrix(a, 'A')))


def operator_norm(a):
    """Largest singular value ||A||_∞."""
    return float(np.linalg.norm(as_matrix(a, 'A'), 2))


def max_abs(a):
    """Largest entrywise modulus, the comparison used for exact identities."""
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def tensor_power_vectors(vectors, k):
    """
    Row-wise k-fold tensor power of a batch of vectors.

    Args:
        vectors (np.ndarray): Shape (batch, n).
        k (int): Tensor power.

    Returns:
        (np.ndarray): Shape (batch, n**k); row b is x_b ⊗ ... ⊗ x_b.
    """
    batch, n = vectors.shape
    power = vectors
    for _ in range(k - 1):
        power = np.einsum('bi,bj->bij', power, vectors).reshape(batch, -1)
    return power
