"""
Exact and Monte Carlo evaluation of matrix integrals over the unit sphere.

Every `exact_*` evaluator has an `mc_*` twin that estimates the same integral
from uniformly distributed unit vectors φ. Throughout, `⟨Aφ, φ⟩ = tr(Aφφ*)`,
`S` is the swap on C^n ⊗ C^n and the integrals are normalised, so ∫ dφ = 1.
"""
import numpy as np

from tensor_core.exceptions import DimensionError, InvalidParameterError, ShapeMismatchError
from tensor_core.models import TensorSpace, rising_factorial
from tensor_core.operators import (
    as_matrix,
    kron,
    kron_all,
    partial_trace,
    permutation_sum,
    swap_operator,
    tensor_power_vectors,
    unit_matrix,
)

from .montecarlo import DEFAULT_CHUNK_ELEMENTS, mc_estimate
from .sampling import sample_sphere


# Largest n**k whose moment is estimated densely by mc_moment.
MAX_MC_MOMENT_DIM = 2 ** 10

INTEGRAL_METHODS = ('closed', 'permutation')


def _square(value, name='A', n=None):
    matrix = as_matrix(value, name)
    if matrix.shape[0] != matrix.shape[1]:
        raise ShapeMismatchError(f"{name} must be square, got shape {matrix.shape}.")
    if n is not None and matrix.shape[0] != n:
        raise ShapeMismatchError(f"{name} must be {n}x{n}, got shape {matrix.shape}.")
    return matrix


def _on_pair_space(value, name='A'):
    """Validate an operator on C^n ⊗ C^n and return it with n."""
    matrix = _square(value, name)
    n = int(round(np.sqrt(matrix.shape[0])))
    if n * n != matrix.shape[0]:
        raise ShapeMismatchError(f"{name} of size {matrix.shape[0]} does not act on C^n ⊗ C^n.")
    return matrix, n


def _check_method(method):
    if method not in INTEGRAL_METHODS:
        raise InvalidParameterError(f"Unknown method {method!r}; use one of {', '.join(INTEGRAL_METHODS)}.")


def exact_moment(n, k):
    """
    ∫ (φφ*)^{⊗k} dφ = Σ_s Γ(s) / (n(n+1)...(n+k-1)), for k <= 4.

    Raises:
        DimensionError: If k > 4 or n**k is too large for a dense operator.
    """
    space = TensorSpace(n, k)
    return permutation_sum(space) / rising_factorial(n, k)


def weighted_moment(weights, n, k):
    """
    Contract leading factors of the k-th moment with weight matrices.

    Computes tr_{1..w}[(W_1 ⊗ ... ⊗ W_w ⊗ I ⊗ ... ⊗ I) ∫(φφ*)^{⊗k} dφ]
    = ∫ Π_i ⟨W_i φ, φ⟩ (φφ*)^{⊗(k-w)} dφ through the permutation sum. This is
    the reference path the closed forms are checked against.
    """
    weights = [_square(weight, f'W{i}', n) for i, weight in enumerate(weights)]
    factors = weights + [np.eye(n)] * (k - len(weights))
    weighted = kron_all(*factors) @ exact_moment(n, k)
    return partial_trace(weighted, [n] * k, keep=range(len(weights), k))


def exact_weighted2(A):
    """∫ tr(Aφφ*) φφ* dφ = (A + tr(A)I) / (n(n+1))."""
    A = _square(A)
    n = A.shape[0]
    return (A + np.trace(A) * np.eye(n)) / (n * (n + 1))


def exact_unit_weighted(n, i, j):
    """∫ ⟨e_i e_j* φ, φ⟩ φφ* dφ = (δ_ij I + e_i e_j*) / (n(n+1)) for the matrix unit e_i e_j*."""
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidParameterError(f"Matrix unit ({i}, {j}) is out of range for n={n}.")
    return (float(i == j) * np.eye(n) + unit_matrix(n, i, j)) / (n * (n + 1))


def exact_pair_scalar(A, B):
    """∫ ⟨Aφ, φ⟩⟨Bφ, φ⟩ dφ = (tr(AB) + tr(A)tr(B)) / (n(n+1))."""
    A = _square(A, 'A')
    n = A.shape[0]
    B = _square(B, 'B', n)
    return complex((np.trace(A @ B) + np.trace(A) * np.trace(B)) / (n * (n + 1)))


def exact_cor6a(A):
    """∫ |tr(Aφφ*)|² dφ = (tr(AA*) + |tr(A)|²) / (n(n+1))."""
    A = _square(A)
    n = A.shape[0]
    return float((np.vdot(A, A).real + abs(np.trace(A)) ** 2) / (n * (n + 1)))


def exact_cor6b(A):
    """∫ tr(Aφφ*) dφ = tr(A) / n."""
    A = _square(A)
    return complex(np.trace(A) / A.shape[0])


def exact_sandwich1(A):
    """∫ (φφ* ⊗ I) A (φφ* ⊗ I) dφ = (A + I ⊗ tr_1(A)) / (n(n+1)) for A on C^n ⊗ C^n."""
    A, n = _on_pair_space(A)
    tr_first = partial_trace(A, [n, n], keep=[1])
    return (A + kron(np.eye(n), tr_first)) / (n * (n + 1))


def exact_sandwich2(A):
    """
    ∫∫ (φφ* ⊗ ψψ*) A (φφ* ⊗ ψψ*) dφ dψ for independent φ, ψ.

    Equals (A + I ⊗ tr_1(A) + tr_2(A) ⊗ I + tr(A) I ⊗ I) / (n²(n+1)²).
    """
    A, n = _on_pair_space(A)
    tr_first = partial_trace(A, [n, n], keep=[1])
    tr_second = partial_trace(A, [n, n], keep=[0])
    identity = np.eye(n)
    total = A + kron(identity, tr_first) + kron(tr_second, identity) + np.trace(A) * np.eye(n * n)
    return total / (n * n * (n + 1) ** 2)


def exact_third_scalar_weighted(A, B, method='closed'):
    """
    ∫ ⟨Aφ, φ⟩⟨Bφ, φ⟩ φφ* dφ.

    The closed form is
    ([tr(A)tr(B) + tr(AB)]I + tr(A)B + tr(B)A + AB + BA) / (n(n+1)(n+2));
    `method='permutation'` contracts the S_3 permutation sum instead.
    """
    _check_method(method)
    A = _square(A, 'A')
    n = A.shape[0]
    B = _square(B, 'B', n)
    if method == 'permutation':
        return weighted_moment([A, B], n, 3)
    tr_a, tr_b = np.trace(A), np.trace(B)
    total = (tr_a * tr_b + np.trace(A @ B)) * np.eye(n) + tr_a * B + tr_b * A + A @ B + B @ A
    return total / rising_factorial(n, 3)


def exact_third_matrix_weighted(A, method='closed'):
    """
    ∫ ⟨Aφ, φ⟩ φφ* ⊗ φφ* dφ.

    The closed form is
    (tr(A)(I⊗I + S) + I⊗A + A⊗I + S(A⊗I) + (A⊗I)S) / (n(n+1)(n+2)).
    """
    _check_method(method)
    A = _square(A)
    n = A.shape[0]
    if method == 'permutation':
        return weighted_moment([A], n, 3)
    identity = np.eye(n)
    swap = swap_operator(n)
    a_first = kron(A, identity)
    total = (np.trace(A) * (np.eye(n * n) + swap) + kron(identity, A) + a_first
             + swap @ a_first + a_first @ swap)
    return total / rising_factorial(n, 3)


def exact_fourth_weighted(A, B, method='closed'):
    """
    ∫ ⟨Aφ, φ⟩⟨Bφ, φ⟩ φφ* ⊗ φφ* dφ.

    The closed form is (I⊗I + S)Y / (n(n+1)(n+2)(n+3)) with
    Y = (tr(A)tr(B) + tr(AB)) I⊗I + tr(A)(B⊗I + I⊗B) + tr(B)(A⊗I + I⊗A)
        + AB⊗I + I⊗AB + BA⊗I + I⊗BA + A⊗B + B⊗A.
    `method='permutation'` contracts the 24-term S_4 sum and needs n**4 <= 4096.
    """
    _check_method(method)
    A = _square(A, 'A')
    n = A.shape[0]
    B = _square(B, 'B', n)
    if method == 'permutation':
        return weighted_moment([A, B], n, 4)
    identity = np.eye(n)
    tr_a, tr_b = np.trace(A), np.trace(B)
    ab, ba = A @ B, B @ A
    inner = ((tr_a * tr_b + np.trace(ab)) * np.eye(n * n)
             + tr_a * (kron(B, identity) + kron(identity, B))
             + tr_b * (kron(A, identity) + kron(identity, A))
             + kron(ab, identity) + kron(identity, ab)
             + kron(ba, identity) + kron(identity, ba)
             + kron(A, B) + kron(B, A))
    return (np.eye(n * n) + swap_operator(n)) @ inner / rising_factorial(n, 4)


def _outer(vectors):
    return vectors[:, :, None] * vectors.conj()[:, None, :]


def _expectation(vectors, A):
    """⟨Aφ, φ⟩ = φ* A φ for each row φ."""
    return np.einsum('bi,ij,bj->b', vectors.conj(), A, vectors)


def mc_moment(n, k, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Monte Carlo estimate of ∫ (φφ*)^{⊗k} dφ.

    Raises:
        DimensionError: If n**k exceeds `MAX_MC_MOMENT_DIM`.
    """
    dim = TensorSpace(n, k).dim
    if dim > MAX_MC_MOMENT_DIM:
        raise DimensionError(f"mc_moment stores {dim}x{dim} samples; the limit is {MAX_MC_MOMENT_DIM}.")

    def integrand(rng, count):
        return _outer(tensor_power_vectors(sample_sphere(rng, n, count), k))

    return mc_estimate(integrand, (dim, dim), samples, seed, f'mc_moment:{n}:{k}', workers, chunk_elements)


def mc_weighted2(A, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A = _square(A)
    n = A.shape[0]

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        return _expectation(phi, A)[:, None, None] * _outer(phi)

    return mc_estimate(integrand, (n, n), samples, seed, 'mc_weighted2', workers, chunk_elements)


def mc_pair_scalar(A, B, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A = _square(A, 'A')
    n = A.shape[0]
    B = _square(B, 'B', n)

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        return _expectation(phi, A) * _expectation(phi, B)

    return mc_estimate(integrand, (), samples, seed, 'mc_pair_scalar', workers, chunk_elements)


def mc_cor6a(A, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A = _square(A)
    n = A.shape[0]

    def integrand(rng, count):
        return np.abs(_expectation(sample_sphere(rng, n, count), A)) ** 2

    return mc_estimate(integrand, (), samples, seed, 'mc_cor6a', workers, chunk_elements)


def mc_cor6b(A, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A = _square(A)
    n = A.shape[0]

    def integrand(rng, count):
        return _expectation(sample_sphere(rng, n, count), A)

    return mc_estimate(integrand, (), samples, seed, 'mc_cor6b', workers, chunk_elements)


def mc_sandwich1(A, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A, n = _on_pair_space(A)
    tensor = A.reshape(n, n, n, n)

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        # (φφ* ⊗ I) A (φφ* ⊗ I) = φφ* ⊗ Σ conj(φ_a) A[(a, i), (c, j)] φ_c
        inner = np.einsum('ba,aicj,bc->bij', phi.conj(), tensor, phi)
        result = np.einsum('ba,bc,bij->baicj', phi, phi.conj(), inner)
        return result.reshape(count, n * n, n * n)

    return mc_estimate(integrand, (n * n, n * n), samples, seed, 'mc_sandwich1', workers, chunk_elements)


def mc_sandwich2(A, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A, n = _on_pair_space(A)

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        psi = sample_sphere(rng, n, count)
        product = np.einsum('bi,bj->bij', phi, psi).reshape(count, n * n)
        return _expectation(product, A)[:, None, None] * _outer(product)

    return mc_estimate(integrand, (n * n, n * n), samples, seed, 'mc_sandwich2', workers, chunk_elements)


def mc_third_scalar_weighted(A, B, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A = _square(A, 'A')
    n = A.shape[0]
    B = _square(B, 'B', n)

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        weight = _expectation(phi, A) * _expectation(phi, B)
        return weight[:, None, None] * _outer(phi)

    return mc_estimate(integrand, (n, n), samples, seed, 'mc_third_scalar_weighted', workers, chunk_elements)


def mc_third_matrix_weighted(A, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A = _square(A)
    n = A.shape[0]

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        pair = tensor_power_vectors(phi, 2)
        return _expectation(phi, A)[:, None, None] * _outer(pair)

    return mc_estimate(integrand, (n * n, n * n), samples, seed, 'mc_third_matrix_weighted', workers,
                       chunk_elements)


def mc_fourth_weighted(A, B, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    A = _square(A, 'A')
    n = A.shape[0]
    B = _square(B, 'B', n)

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        pair = tensor_power_vectors(phi, 2)
        weight = _expectation(phi, A) * _expectation(phi, B)
        return weight[:, None, None] * _outer(pair)

    return mc_estimate(integrand, (n * n, n * n), samples, seed, 'mc_fourth_weighted', workers, chunk_elements)
