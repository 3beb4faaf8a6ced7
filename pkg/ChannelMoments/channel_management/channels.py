"""
Operations on channels in Kraus form.

A channel E: M_n -> M_d is held as Kraus operators A_1..A_m (each d x n) and acts
as E(X) = Σ A_i X A_i*. Superoperators use the row-major vec convention, so
vec(AXB) = (A ⊗ B^T) vec(X) and the superoperator of E is Σ A_i ⊗ conj(A_i).
"""
import logging
import math

import numpy as np

from tensor_core.exceptions import (
    InvalidParameterError,
    NotIsometryError,
    NotPositiveError,
    ShapeMismatchError,
    UnsupportedNormError,
)
from tensor_core.operators import as_matrix, dagger, kron, operator_norm, partial_trace

from .models import ChannelNorms, ChoiMatrix, CPTPReport, KrausChannel

logger = logging.getLogger(__name__)


# Choi eigenvalues at or below this are treated as zero.
CHOI_CUTOFF = 1e-10

# Choi eigenvalues in (CHOI_CUTOFF, CHOI_WARNING) are kept but reported.
CHOI_WARNING = 1e-8

# Tolerance on user-supplied data (trace preservation, positivity, unitarity).
INPUT_TOLERANCE = 1e-8

SUPPORTED_NORMS = ('1', '2', 'inf')


def _input(E, X):
    X = as_matrix(X, 'X')
    if X.shape != (E.dim_in, E.dim_in):
        raise ShapeMismatchError(f"Channel input must be {E.dim_in}x{E.dim_in}, got {X.shape}.")
    return X


def validate_cptp(E):
    """
    Trace-preservation defect of a Kraus channel.

    Returns:
        (CPTPReport): `tp_defect = ||Σ A_i* A_i - I||_∞`; `cp` is true since a
            Kraus form is completely positive by construction.
    """
    gram = np.einsum('kai,kaj->ij', E.stacked.conj(), E.stacked)
    return CPTPReport(tp_defect=operator_norm(gram - np.eye(E.dim_in)), cp=True)


def choi_spectrum_warnings(eigenvalues):
    """Messages for eigenvalues that are neither clearly zero nor clearly positive."""
    borderline = [value for value in eigenvalues if CHOI_CUTOFF < value < CHOI_WARNING]
    return tuple(f"Choi eigenvalue {value:.3e} is close to the rank cutoff {CHOI_CUTOFF:g}."
                 for value in borderline)


def validate_choi(C):
    """
    Complete positivity and trace preservation read off a Choi matrix.

    Returns:
        (CPTPReport): `cp` is true when the smallest eigenvalue is >= -1e-8 and
            `tp_defect` is ||tr_out(C) - I_n||_∞.
    """
    hermitian = (C.matrix + dagger(C.matrix)) / 2
    eigenvalues = np.linalg.eigvalsh(hermitian)
    reduced = partial_trace(C.matrix, [C.dim_out, C.dim_in], keep=[1])
    return CPTPReport(
        tp_defect=operator_norm(reduced - np.eye(C.dim_in)),
        cp=bool(eigenvalues[0] >= -INPUT_TOLERANCE),
        min_choi_eigenvalue=float(eigenvalues[0]),
        warnings=choi_spectrum_warnings(eigenvalues),
    )


def apply(E, X):
    """E(X) = Σ A_i X A_i*."""
    X = _input(E, X)
    stack = E.stacked
    return np.einsum('kij,jl,kml->im', stack, X, stack.conj())


def adjoint_apply(E, Y):
    """E*(Y) = Σ A_i* Y A_i, the Hilbert-Schmidt adjoint of `apply`."""
    Y = as_matrix(Y, 'Y')
    if Y.shape != (E.dim_out, E.dim_out):
        raise ShapeMismatchError(f"Adjoint input must be {E.dim_out}x{E.dim_out}, got {Y.shape}.")
    stack = E.stacked
    return np.einsum('kji,jl,klm->im', stack.conj(), Y, stack)


def adjoint_channel(E):
    """The map E* as a Kraus channel M_d -> M_n with operators A_i*."""
    return KrausChannel(E.dim_out, E.dim_in, tuple(dagger(a) for a in E.kraus))


def choi_matrix(E):
    """
    C = Σ_ij E(e_i e_j*) ⊗ e_i e_j*, with C[(a, i), (b, j)] = Σ_k A_k[a, i] conj(A_k[b, j]).
    """
    vectors = E.stacked.reshape(E.rank, -1)
    return ChoiMatrix(E.dim_in, E.dim_out, vectors.T @ vectors.conj())


def kraus_from_choi(C):
    """
    Minimal Kraus form from the eigendecomposition of a Choi matrix.

    Each eigenvalue above 1e-10 gives one Kraus operator sqrt(λ)·v reshaped to
    d x n, in decreasing order of λ. Eigenvalues in (1e-10, 1e-8) are kept and
    logged as warnings.

    Raises:
        NotPositiveError: If C has an eigenvalue below -1e-8, or no eigenvalue
            above the cutoff (the zero map).
    """
    hermitian = (C.matrix + dagger(C.matrix)) / 2
    eigenvalues, eigenvectors = np.linalg.eigh(hermitian)
    if eigenvalues[0] < -INPUT_TOLERANCE:
        raise NotPositiveError(f"Choi matrix has eigenvalue {eigenvalues[0]:.3e}; the map is not completely positive.")
    for message in choi_spectrum_warnings(eigenvalues):
        logger.warning(message)
    order = np.argsort(eigenvalues)[::-1]
    kept = [index for index in order if eigenvalues[index] > CHOI_CUTOFF]
    if not kept:
        raise NotPositiveError("Choi matrix vanishes; the zero map has no Kraus form.")
    kraus = tuple(np.sqrt(eigenvalues[index]) * eigenvectors[:, index].reshape(C.dim_out, C.dim_in)
                  for index in kept)
    return KrausChannel(C.dim_in, C.dim_out, kraus)


def minimize_kraus(E):
    """Equivalent channel with the minimal number of Kraus operators (the Choi rank)."""
    return kraus_from_choi(choi_matrix(E))


def kraus_remix(E, unitary):
    """
    Kraus operators E_i = Σ_j μ_ji A_j for an m x m unitary [μ_ji].

    The result represents the same channel.

    Raises:
        NotIsometryError: If `unitary` is not an m x m unitary.
    """
    unitary = as_matrix(unitary, 'unitary')
    if unitary.shape != (E.rank, E.rank):
        raise ShapeMismatchError(f"Remixing {E.rank} Kraus operators needs a {E.rank}x{E.rank} unitary.")
    defect = operator_norm(dagger(unitary) @ unitary - np.eye(E.rank))
    if defect > INPUT_TOLERANCE:
        raise NotIsometryError(f"Remix matrix is not unitary: U*U deviates from I by {defect:.3e}.")
    return KrausChannel.from_stack(np.einsum('ji,jab->iab', unitary, E.stacked))


def complementary(E):
    """
    The complementary channel Ẽ(X) = Σ_ij tr(A_i X A_j*) e_i e_j* in Kraus form.

    The output space has dimension m = number of Kraus operators as given; the
    Kraus operators of Ẽ are B_a[i, :] = A_i[a, :] for a = 1..d.
    """
    return KrausChannel.from_stack(E.stacked.transpose(1, 0, 2))


def complementary_apply(E, X):
    """The matrix of traces [tr(A_i X A_j*)]_ij evaluated directly."""
    X = _input(E, X)
    stack = E.stacked
    return np.einsum('iab,bc,jac->ij', stack, X, stack.conj())


def stinespring_isometry(E):
    """
    The Stinespring isometry V: C^n -> C^d ⊗ C^m, V x = Σ_k A_k x ⊗ e_k.

    V is an isometry exactly when E is trace preserving.
    """
    return E.stacked.transpose(1, 0, 2).reshape(E.dim_out * E.rank, E.dim_in)


def stinespring_outputs(V, X, d, m):
    """
    Both partial traces of V X V*.

    Returns:
        (tuple): `(E(X), Ẽ(X))` = (tr_{C^m}(VXV*), tr_{C^d}(VXV*)).
    """
    V = as_matrix(V, 'V')
    if V.shape[0] != d * m:
        raise ShapeMismatchError(f"Isometry with {V.shape[0]} rows does not map into C^{d} ⊗ C^{m}.")
    joint = V @ as_matrix(X, 'X') @ dagger(V)
    return partial_trace(joint, [d, m], keep=[0]), partial_trace(joint, [d, m], keep=[1])


def channel_from_stinespring(V, d):
    """Kraus channel A_k = (I ⊗ e_k*) V for an isometry V into C^d ⊗ C^m."""
    V = as_matrix(V, 'V')
    if V.shape[0] % d:
        raise ShapeMismatchError(f"Isometry with {V.shape[0]} rows does not factor through C^{d}.")
    rank = V.shape[0] // d
    return KrausChannel.from_stack(V.reshape(d, rank, V.shape[1]).transpose(1, 0, 2))


def hs_norm_sq(E):
    """||E||_2² = Σ_il |tr(A_i* A_l)|²."""
    vectors = E.stacked.reshape(E.rank, -1)
    gram = vectors.conj() @ vectors.T
    return float(np.sum(np.abs(gram) ** 2))


def comp_hs_norm_sq(E):
    """||Ẽ||_2² = tr(E(I)²)."""
    image = apply(E, np.eye(E.dim_in))
    return float(np.trace(image @ image).real)


def superoperator_matrix(E):
    """The d² x n² matrix Σ A_i ⊗ conj(A_i) acting on row-major vec(X)."""
    return sum(kron(a, a.conj()) for a in E.kraus)


def normalize_norm(p):
    """
    Canonical key '1', '2' or 'inf' for a p→p norm.

    Raises:
        UnsupportedNormError: For any other p.
    """
    if isinstance(p, str):
        key = p.strip().lower()
        key = 'inf' if key in ('inf', 'infinity', '∞') else key
    elif p == math.inf:
        key = 'inf'
    elif p in (1, 2):
        key = str(int(p))
    else:
        key = str(p)
    if key not in SUPPORTED_NORMS:
        raise UnsupportedNormError(f"Only the 1->1, 2->2 and inf->inf norms are supported, got p={p}.")
    return key


def p2p_norm(E, p):
    """
    Induced Schatten norm ||E||_{p→p} for p in {1, 2, ∞}.

    p = 1 is ||Σ A_i* A_i|| (1 for a trace-preserving map), p = ∞ is ||E(I)||
    and p = 2 is the largest singular value of the superoperator.

    Raises:
        UnsupportedNormError: For any other p.
    """
    key = normalize_norm(p)
    if key == '1':
        return operator_norm(adjoint_apply(E, np.eye(E.dim_out)))
    if key == 'inf':
        return operator_norm(apply(E, np.eye(E.dim_in)))
    return operator_norm(superoperator_matrix(E))


def p2p_lower_bound(n, d, p):
    """(n/d)^{1 - 1/p}, the lower bound on ||E||_{p→p} for positive trace-preserving maps."""
    key = normalize_norm(p)
    exponent = {'1': 0.0, '2': 0.5, 'inf': 1.0}[key]
    return (n / d) ** exponent


def hs_norm_bounds(n, d):
    """
    Range of ||E||_2² over channels M_n -> M_d.

    Returns:
        (tuple): `(n/d, n²)` for n <= d and `(n/d, d²n₀ + d'²)` otherwise, with
            n₀ = floor(n/d) and d' = n - n₀d.
    """
    if n < 1 or d < 1:
        raise InvalidParameterError(f"Dimensions must be positive, got n={n}, d={d}.")
    if n <= d:
        return n / d, float(n * n)
    whole = n // d
    rest = n - whole * d
    return n / d, float(d * d * whole + rest * rest)


def comp_hs_norm_bounds(n, d):
    """Range (n²/d, n²) of ||Ẽ||_2² over channels M_n -> M_d."""
    if n < 1 or d < 1:
        raise InvalidParameterError(f"Dimensions must be positive, got n={n}, d={d}.")
    return n * n / d, float(n * n)


def channel_norms(E):
    """All norms of E in one `ChannelNorms` record."""
    return ChannelNorms(
        dim_in=E.dim_in,
        dim_out=E.dim_out,
        hs_sq=hs_norm_sq(E),
        comp_hs_sq=comp_hs_norm_sq(E),
        p2p={key: p2p_norm(E, key) for key in SUPPORTED_NORMS},
    )
