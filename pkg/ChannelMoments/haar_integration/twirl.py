import logging

import numpy as np

from tensor_core.exceptions import ShapeMismatchError
from tensor_core.operators import as_matrix

from .models import TwirlFit
from .montecarlo import DEFAULT_CHUNK_ELEMENTS, mc_estimate
from .sampling import sample_unitary

logger = logging.getLogger(__name__)


# A direct fit this close is already covariant and skips sampling.
COVARIANT_RESIDUAL = 1e-10


def covariant_basis(n):
    """
    Superoperators of X ↦ X and X ↦ tr(X)I in the row-major vec basis.

    Returns:
        (tuple): `(identity_superop, trace_superop)`, each n² x n².
    """
    vec_identity = np.eye(n).reshape(-1)
    return np.eye(n * n, dtype=complex), np.outer(vec_identity, vec_identity).astype(complex)


def fit_covariant(superop, n, samples=0):
    """
    Least-squares fit of `superop` to λ·X + μ·tr(X)I over the matrix-unit basis.

    For n = 1 both model terms coincide; λ carries the identifiable sum and μ is 0.
    """
    identity, trace = covariant_basis(n)
    if n == 1:
        value = complex(superop[0, 0])
        return TwirlFit(lam=value, mu=0j, residual=0.0, dim=1, samples=samples, identifiable=False)
    design = np.column_stack([identity.reshape(-1), trace.reshape(-1)])
    (lam, mu), *_ = np.linalg.lstsq(design, superop.reshape(-1), rcond=None)
    residual = float(np.linalg.norm(superop - lam * identity - mu * trace))
    return TwirlFit(lam=complex(lam), mu=complex(mu), residual=residual, dim=n, samples=samples)


def twirl_fit(superop, n, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Twirl a map on n x n matrices over the unitary group and fit the result.

    The twirled map Φ_T(X) = E_U[U* Φ(UXU*) U] has superoperator
    E_U[W† S W] with W = U ⊗ conj(U). Maps that are already covariant are fitted
    directly and `samples` is ignored.

    Args:
        superop (np.ndarray): n² x n² superoperator of Φ in the row-major vec basis.
        n (int): Input (and output) dimension.
        samples (int): Haar unitaries to average.
        seed (int): Seed for the unitary stream.
        workers (int): Monte Carlo threads.

    Returns:
        (TwirlFit): Fitted λ, μ and the residual of the fit.

    Raises:
        ShapeMismatchError: If `superop` is not n² x n².
    """
    superop = as_matrix(superop, 'superoperator')
    if superop.shape != (n * n, n * n):
        raise ShapeMismatchError(
            f"Twirling needs a map on {n}x{n} matrices (superoperator {n * n}x{n * n}), got {superop.shape}."
        )
    direct = fit_covariant(superop, n)
    if direct.residual <= COVARIANT_RESIDUAL:
        logger.debug("Map is already covariant (residual %.3g); skipping the twirl", direct.residual)
        return direct

    def integrand(rng, count):
        unitaries = sample_unitary(n, rng, count)
        conjugation = np.einsum('bij,bkl->bikjl', unitaries, unitaries.conj()).reshape(count, n * n, n * n)
        return conjugation.conj().transpose(0, 2, 1) @ superop @ conjugation

    estimate = mc_estimate(integrand, (n * n, n * n), samples, seed, 'twirl', workers, chunk_elements)
    fit = fit_covariant(estimate.mean, n, samples=estimate.samples)
    logger.info("Twirl fit n=%d: lambda=%s mu=%s residual=%.3g", n, fit.lam, fit.mu, fit.residual)
    return fit
