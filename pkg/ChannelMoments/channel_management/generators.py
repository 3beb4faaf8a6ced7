"""
Constructors for the named channel families.

Every generator returns a trace-preserving `KrausChannel`. Random generators
take an explicit seed and draw from their own named stream, so the same
arguments always produce the same Kraus list.
"""
import logging
import math

import numpy as np

from haar_integration.sampling import sample_isometry, sample_sphere, stream
from tensor_core.exceptions import InvalidParameterError, NotIsometryError
from tensor_core.operators import as_matrix, as_vector, dagger, operator_norm

from .channels import channel_from_stinespring
from .models import Generator, KrausChannel

logger = logging.getLogger(__name__)


# Tolerance for isometries, unit vectors and probability vectors given as input.
GENERATOR_TOLERANCE = 1e-10


def _check_dims(n, d):
    if n < 1 or d < 1:
        raise InvalidParameterError(f"Dimensions must be positive, got n={n}, d={d}.")


def _check_isometry(V, name='V'):
    V = as_matrix(V, name)
    defect = operator_norm(dagger(V) @ V - np.eye(V.shape[1]))
    if defect > GENERATOR_TOLERANCE:
        raise NotIsometryError(
            f"{name} is not an isometry: {name}*{name} deviates from I_{V.shape[1]} by {defect:.3e}."
        )
    return V


def _check_unit(psi):
    psi = as_vector(psi, 'psi')
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > GENERATOR_TOLERANCE:
        raise InvalidParameterError(f"psi must be a unit vector, its norm is {norm:.12g}.")
    return psi


def _check_weight(value, name):
    if not 0.0 <= value <= 1.0:
        raise InvalidParameterError(f"{name} must lie in [0, 1], got {value}.")
    return float(value)


def vij_basis(n, d):
    """
    The nd isometries V_ij = U^j W V^i: C^n -> C^d.

    W embeds C^n into the first n coordinates of C^d, U is the cyclic shift of
    C^d and V = diag(1, ω, ..., ω^{n-1}) with ω = e^{2πi/n}. The list is ordered
    by i (clock power) and then j (shift power), so entry 0 is W itself. The
    operators are mutually orthogonal with ⟨V_ij, V_ij⟩ = n and
    (1/nd) Σ V_ij X V_ij* = tr(X)I/d.

    Raises:
        InvalidParameterError: If n > d.
    """
    _check_dims(n, d)
    if n > d:
        raise InvalidParameterError(f"The V_ij basis needs n <= d, got n={n}, d={d}.")
    embedding = np.eye(d, n, dtype=complex)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    basis = []
    for i in range(n):
        clocked = embedding @ np.linalg.matrix_power(clock, i)
        for j in range(d):
            basis.append(np.linalg.matrix_power(shift, j) @ clocked)
    return basis


def depolarizing(n, d):
    """
    The completely depolarizing channel X ↦ tr(X)I/d with nd Kraus operators.

    For n <= d the Kraus operators are V_ij/sqrt(nd) from `vij_basis(n, d)`; for
    n > d they are the adjoints V*/d of the operators in `vij_basis(d, n)`.
    """
    _check_dims(n, d)
    if n <= d:
        scale = 1.0 / math.sqrt(n * d)
        return KrausChannel(n, d, tuple(scale * v for v in vij_basis(n, d)))
    return KrausChannel(n, d, tuple(dagger(v) / d for v in vij_basis(d, n)))


def isometric(V):
    """
    The channel X ↦ VXV* for a d x n isometry V.

    Raises:
        NotIsometryError: If V*V deviates from I_n by more than 1e-10.
    """
    V = _check_isometry(V)
    return KrausChannel(V.shape[1], V.shape[0], (V,))


def identity(n):
    return isometric(np.eye(n))


def replacement(psi, n):
    """
    The channel X ↦ tr(X)ψψ* with Kraus operators ψe_i*, i = 1..n.

    Raises:
        InvalidParameterError: If ψ is not a unit vector.
    """
    psi = _check_unit(psi)
    if n < 1:
        raise InvalidParameterError(f"Input dimension must be positive, got n={n}.")
    return KrausChannel(n, psi.size, tuple(np.outer(psi, np.eye(n)[i]) for i in range(n)))


def e_lambda(lam, psi, n, d):
    """
    λ·tr(X)ψψ* + (1-λ)·tr(X)I/d, as the union of the scaled Kraus sets.

    A part with weight 0 is left out.
    """
    lam = _check_weight(lam, 'lambda')
    psi = _check_unit(psi)
    if psi.size != d:
        raise InvalidParameterError(f"psi must live in C^{d}, got length {psi.size}.")
    kraus = []
    if lam > 0:
        kraus.extend(math.sqrt(lam) * a for a in replacement(psi, n).kraus)
    if lam < 1:
        kraus.extend(math.sqrt(1.0 - lam) * a for a in depolarizing(n, d).kraus)
    return KrausChannel(n, d, tuple(kraus))


def random_isometric(weights, isometries):
    """
    The random isometric channel X ↦ Σ p_j V_j X V_j* with Kraus set {sqrt(p_j) V_j}.

    Raises:
        InvalidParameterError: If the weights are not a probability vector with
            positive entries, or the counts differ.
        NotIsometryError: If some V_j is not an isometry.
    """
    weights = np.asarray(weights, dtype=float).reshape(-1)
    isometries = [_check_isometry(V, f'V{j}') for j, V in enumerate(isometries)]
    if len(isometries) != weights.size or not isometries:
        raise InvalidParameterError(f"Got {weights.size} weights for {len(isometries)} isometries.")
    if np.any(weights <= 0) or abs(weights.sum() - 1.0) > GENERATOR_TOLERANCE:
        raise InvalidParameterError(f"Weights must be positive and sum to 1, got {weights.tolist()}.")
    shape = isometries[0].shape
    if any(V.shape != shape for V in isometries):
        raise InvalidParameterError("All isometries must have the same shape.")
    return KrausChannel(shape[1], shape[0], tuple(math.sqrt(p) * V for p, V in zip(weights, isometries)))


def cor10_t(t, n, d):
    """
    t·V_11 X V_11* + (1-t)·tr(X)I/d as a random isometric channel over the V_ij basis.

    V_11 carries weight t + (1-t)/(nd) and every other V_ij weight (1-t)/(nd);
    zero weights are left out.

    Raises:
        InvalidParameterError: If n > d or t is outside [0, 1].
    """
    t = _check_weight(t, 't')
    basis = vij_basis(n, d)
    share = (1.0 - t) / (n * d)
    weights = [t + share] + [share] * (len(basis) - 1)
    kept = [(p, V) for p, V in zip(weights, basis) if p > 0]
    return KrausChannel(n, d, tuple(math.sqrt(p) * V for p, V in kept))


def random_unit_vector(d, seed):
    """A seeded uniformly random unit vector in C^d."""
    return sample_sphere(stream(seed, 'unit_vector', d), d)


def haar_isometry(n, d, seed):
    """The isometric channel of a seeded Haar-random d x n isometry."""
    return isometric(sample_isometry(d, n, stream(seed, 'haar_isometry', n, d)))


def random_cptp(n, d, rank, seed):
    """
    A seeded random channel with `rank` Kraus operators.

    A Haar-random isometry V: C^n -> C^d ⊗ C^rank is split into Kraus
    operators A_k = (I ⊗ e_k*)V, the Stinespring form of the channel.

    Raises:
        InvalidParameterError: If rank is outside [ceil(n/d), nd]; fewer than
            ceil(n/d) operators cannot be trace preserving.
    """
    _check_dims(n, d)
    if not math.ceil(n / d) <= rank <= n * d:
        raise InvalidParameterError(
            f"rank must lie in [{math.ceil(n / d)}, {n * d}] for a {n}->{d} channel, got {rank}."
        )
    V = sample_isometry(d * rank, n, stream(seed, 'random_cptp', n, d, rank))
    return channel_from_stinespring(V, d)


def _require(params, *names):
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise InvalidParameterError(f"Missing generator parameter(s): {', '.join(missing)}.")
    return [params[name] for name in names]


def _build_isometric(params):
    (matrix,) = _require(params, 'matrix')
    return isometric(matrix)


def _build_replacement(params):
    n, d = _require(params, 'n', 'd')
    psi = params.get('psi')
    if psi is None:
        psi = random_unit_vector(d, params.get('seed') or 0)
    return replacement(psi, n)


def _build_elambda(params):
    lam, n, d = _require(params, 'lam', 'n', 'd')
    psi = params.get('psi')
    if psi is None:
        psi = random_unit_vector(d, params.get('seed') or 0)
    return e_lambda(lam, psi, n, d)


def _build_random_isometric(params):
    n, d = _require(params, 'n', 'd')
    isometries = params.get('isometries')
    seed = params.get('seed') or 0
    if isometries is None:
        count = params.get('count') or 2
        isometries = [sample_isometry(d, n, stream(seed, 'random_isometric', j)) for j in range(count)]
    weights = params.get('weights')
    if weights is None:
        weights = np.full(len(isometries), 1.0 / len(isometries))
    return random_isometric(weights, isometries)


def _build_random(params):
    n, d = _require(params, 'n', 'd')
    rank = params.get('rank') or n * d
    return random_cptp(n, d, rank, params.get('seed') or 0)


GENERATORS = {
    Generator.DEPOLARIZING: lambda params: depolarizing(*_require(params, 'n', 'd')),
    Generator.ISOMETRIC: _build_isometric,
    Generator.REPLACEMENT: _build_replacement,
    Generator.ELAMBDA: _build_elambda,
    Generator.RANDOM_ISOMETRIC: _build_random_isometric,
    Generator.COR10_T: lambda params: cor10_t(*_require(params, 't', 'n', 'd')),
    Generator.RANDOM: _build_random,
    Generator.HAAR_ISOMETRIC: lambda params: haar_isometry(*_require(params, 'n', 'd'), params.get('seed') or 0),
    Generator.IDENTITY: lambda params: identity(*_require(params, 'n')),
}


def build_channel(name, **params):
    """
    Build a channel of the family `name` from keyword parameters.

    Args:
        name (str): One of `Generator.values`.
        **params: Family parameters: `n`, `d`, `lam`, `t`, `psi`, `matrix`,
            `weights`, `isometries`, `count`, `rank`, `seed`. Unused ones are ignored.

    Returns:
        (KrausChannel): The generated channel.

    Raises:
        InvalidParameterError: For an unknown family or a missing parameter.

    Examples:
        ```
        build_channel('elambda', lam=0.5, n=2, d=2, seed=0)
        ```
    """
    if name not in Generator.values:
        raise InvalidParameterError(f"Unknown generator {name!r}; choose from {', '.join(Generator.values)}.")
    logger.debug("Building %s channel with %s", name, {key: value for key, value in params.items()
                                                        if np.isscalar(value)})
    return GENERATORS[Generator(name)](params)
