"""
The canonical broadcasting map as a mixture of two trace-preserving maps.

For X on C^n:

    CB(X) = (S(X⊗I) + (X⊗I)S) / 2
    M(X)  = n ∫ tr(ρ_φ X) ρ_φ⊗ρ_φ dφ,  ρ_φ = ((n+2)φφ* - I) / 2
    M'(X) = tr(X) I/n ⊗ I/n

and CB = p·M + (1-p)·M' with p = 4(n+1)/(n+2)². M has the closed form
(n+2)²/(8(n+1))·[S(X⊗I) + (X⊗I)S] - tr(X) I⊗I / (4(n+1)).
"""
import logging

import numpy as np

from haar_integration.integrals import exact_moment, exact_third_matrix_weighted, exact_weighted2
from haar_integration.montecarlo import DEFAULT_CHUNK_ELEMENTS, mc_estimate
from haar_integration.sampling import complex_gaussian, sample_sphere, stream
from tensor_core.exceptions import InvalidParameterError
from tensor_core.operators import as_matrix, dagger, kron, matrix_units, swap_operator

logger = logging.getLogger(__name__)


def mixing_weight(n):
    """p = 4(n+1)/(n+2)²."""
    if n < 1:
        raise InvalidParameterError(f"Dimension must be positive, got n={n}.")
    return 4 * (n + 1) / (n + 2) ** 2


def _symmetrised(X):
    n = X.shape[0]
    swap = swap_operator(n)
    extended = kron(X, np.eye(n))
    return swap @ extended + extended @ swap


def canonical_broadcast(X):
    """CB(X) = (S(X⊗I) + (X⊗I)S) / 2."""
    return _symmetrised(as_matrix(X, 'X')) / 2


def m_closed(X):
    """M(X) from its closed form."""
    X = as_matrix(X, 'X')
    n = X.shape[0]
    return ((n + 2) ** 2 / (8 * (n + 1)) * _symmetrised(X)
            - np.trace(X) * np.eye(n * n) / (4 * (n + 1)))


def m_depolarizing(X):
    """M'(X) = tr(X) I/n ⊗ I/n."""
    X = as_matrix(X, 'X')
    n = X.shape[0]
    return np.trace(X) * np.eye(n * n) / (n * n)


def m_from_integrals(X):
    """
    M(X) assembled from the weighted sphere integrals instead of the closed form.

    Expanding tr(ρ_φ X) ρ_φ⊗ρ_φ leaves ∫ tr(Xφφ*) φφ*⊗φφ*, ∫ tr(Xφφ*) φφ*,
    ∫ φφ*⊗φφ* and ∫ φφ* = I/n, each of which has a closed form.
    """
    X = as_matrix(X, 'X')
    n = X.shape[0]
    trace = np.trace(X)
    identity = np.eye(n)
    pair_identity = np.eye(n * n)
    weighted = exact_weighted2(X)
    total = ((n + 2) ** 3 * exact_third_matrix_weighted(X)
             - (n + 2) ** 2 * (kron(weighted, identity) + kron(identity, weighted))
             + (n + 2) * trace / n * pair_identity
             - trace * (n + 2) ** 2 * exact_moment(n, 2)
             + 2 * trace * (n + 2) / n * pair_identity
             - trace * pair_identity)
    return n * total / 8


def mc_m(X, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """Monte Carlo estimate of M(X) = n ∫ tr(ρ_φ X) ρ_φ⊗ρ_φ dφ."""
    X = as_matrix(X, 'X')
    n = X.shape[0]
    identity = np.eye(n)

    def integrand(rng, count):
        phi = sample_sphere(rng, n, count)
        rho = ((n + 2) * phi[:, :, None] * phi.conj()[:, None, :] - identity) / 2
        weight = np.einsum('bij,ji->b', rho, X)
        pair = np.einsum('bij,bkl->bikjl', rho, rho).reshape(count, n * n, n * n)
        return n * weight[:, None, None] * pair

    return mc_estimate(integrand, (n * n, n * n), samples, seed, 'broadcast_m', workers, chunk_elements)


def broadcast_defects(X):
    """
    Exact defects of the decomposition at one input X.

    Returns:
        (dict): `identity` = max|CB - pM - (1-p)M'|, `integral_route` =
            max|M_closed - M_from_integrals|, `trace` = |tr M(X) - tr X|.
    """
    X = as_matrix(X, 'X')
    p = mixing_weight(X.shape[0])
    closed = m_closed(X)
    return {
        'identity': float(np.max(np.abs(canonical_broadcast(X) - p * closed - (1 - p) * m_depolarizing(X)))),
        'integral_route': float(np.max(np.abs(closed - m_from_integrals(X)))),
        'trace': float(abs(np.trace(closed) - np.trace(X))),
    }


def random_hermitian(n, rng):
    z = complex_gaussian(rng, (n, n))
    return (z + dagger(z)) / 2


def broadcasting_verify(n, mc_samples=0, seed=0, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Check CB = pM + (1-p)M' on every matrix unit and M against Monte Carlo.

    Args:
        n (int): Dimension, at least 1.
        mc_samples (int): Samples for the estimate of M at a seeded random
            Hermitian input; 0 skips it.
        seed (int): Seed for that input and the estimate.

    Returns:
        (dict): `p`, the largest `identity`, `integral_route` and `trace`
            defects over the matrix units, and with sampling the `input`,
            the closed form `exact` and the `estimate`.
    """
    p = mixing_weight(n)
    worst = {'identity': 0.0, 'integral_route': 0.0, 'trace': 0.0}
    for _, _, unit in matrix_units(n):
        for name, defect in broadcast_defects(unit).items():
            worst[name] = max(worst[name], defect)
    result = {'p': p, **worst}
    if mc_samples:
        X = random_hermitian(n, stream(seed, 'broadcast_input', n))
        result['input'] = X
        result['exact'] = m_closed(X)
        result['estimate'] = mc_m(X, mc_samples, seed, workers, chunk_elements)
    logger.debug("Broadcasting identity at n=%d: %s", n, worst)
    return result
