"""
Detection of purity-preserving channels.

In finite dimension a channel maps every pure state to a pure state exactly
when it is isometric (X ↦ VXV*) or a pure-state replacement (X ↦ tr(X)ψψ*).
`purity_classify` decides which from a minimal Kraus set and otherwise
searches for a pure input with an impure image.
"""
import logging

import numpy as np

from channel_management.channels import minimize_kraus
from haar_integration.sampling import sample_sphere, stream
from tensor_core.operators import dagger, operator_norm

from .models import PurityKind, PurityVerdict

logger = logging.getLogger(__name__)


# Tolerance of the structural tests (isometry defect, rank one, common vector).
STRUCTURE_TOLERANCE = 1e-8

# An image counts as impure when its purity is below 1 - PURITY_GAP.
PURITY_GAP = 1e-6

RANDOM_PROBES = 200


def fix_phase(array):
    """Multiply by a global phase so the largest-modulus entry is real and positive."""
    array = np.asarray(array, dtype=complex)
    flat = array.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat))]
    if abs(pivot) == 0:
        return array.copy()
    return array * (abs(pivot) / pivot)


def output_purity(E, vectors):
    """
    tr(E(xx*)²) for each row x of `vectors`.

    With y_k = A_k x the purity is Σ_kl |⟨y_k, y_l⟩|².
    """
    images = np.einsum('kij,bj->bki', E.stacked, vectors)
    gram = np.einsum('bki,bli->bkl', images.conj(), images)
    return np.sum(np.abs(gram) ** 2, axis=(1, 2))


def _common_left_vector(kraus):
    """ψ with A_k = ψ w_k* for every k, or None."""
    left = []
    for operator in kraus:
        u, s, _ = np.linalg.svd(operator)
        if s.size > 1 and s[1] > STRUCTURE_TOLERANCE * max(s[0], 1.0):
            return None
        left.append(u[:, 0])
    psi = left[0]
    if any(abs(abs(np.vdot(psi, u)) - 1.0) > STRUCTURE_TOLERANCE for u in left[1:]):
        return None
    return psi


def purity_classify(E, seed=0):
    """
    Classify a channel as isometric, pure-state replacement or neither.

    The Kraus set is minimised first. A single Kraus operator A with A*A = I
    gives `ISOMETRIC` with V = A; rank-one operators sharing one left vector ψ
    give `REPLACEMENT`. Otherwise the n basis vectors and 200 seeded random unit
    vectors are tried as inputs and the one with the least pure image is the
    witness.

    Args:
        E (KrausChannel): A trace-preserving channel.
        seed (int): Seed of the random probes.

    Returns:
        (PurityVerdict): Verdict with V or ψ up to a global phase, or a witness.
    """
    minimal = minimize_kraus(E)
    if minimal.rank == 1:
        operator = minimal.kraus[0]
        if operator_norm(dagger(operator) @ operator - np.eye(E.dim_in)) <= STRUCTURE_TOLERANCE:
            return PurityVerdict(kind=PurityKind.ISOMETRIC, isometry=fix_phase(operator), kraus_rank=1)

    psi = _common_left_vector(minimal.kraus)
    if psi is not None:
        return PurityVerdict(kind=PurityKind.REPLACEMENT, state=fix_phase(psi), kraus_rank=minimal.rank)

    probes = np.vstack([np.eye(E.dim_in, dtype=complex),
                        sample_sphere(stream(seed, 'purity_probe'), E.dim_in, RANDOM_PROBES)])
    purities = output_purity(minimal, probes)
    best = int(np.argmin(purities))
    defect = float(1.0 - purities[best])
    if defect <= PURITY_GAP:
        logger.warning("No impure image found among %d probes for a channel of Kraus rank %d",
                       len(probes), minimal.rank)
        return PurityVerdict(kind=PurityKind.NOT, defect=max(defect, 0.0), kraus_rank=minimal.rank)
    return PurityVerdict(kind=PurityKind.NOT, witness=probes[best], defect=defect, kraus_rank=minimal.rank)
