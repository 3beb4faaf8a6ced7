"""
Random isometric channels X ↦ Σ p_j V_j X V_j*.

For n <= d their complementary norm lies in [n²/d, n]; the upper end is
reached exactly when all V_j share one range, i.e. E(X) = V Υ(X) V* for an
isometry V and a random unitary channel Υ. The completely depolarizing
channel is itself random isometric, built from the V_ij basis.
"""
import logging

import numpy as np

from channel_management.channels import apply, comp_hs_norm_bounds, comp_hs_norm_sq
from channel_management.generators import depolarizing, vij_basis
from tensor_core.exceptions import InvalidParameterError
from tensor_core.operators import dagger, hs_inner, matrix_units, max_abs, operator_norm

logger = logging.getLogger(__name__)


# Tolerance of the random-isometric form and of the common-range test.
FORM_TOLERANCE = 1e-8


def random_isometric_form(E, tolerance=FORM_TOLERANCE):
    """
    Recover (p_j, V_j) from Kraus operators A_j = sqrt(p_j) V_j.

    Operators with p_j below `tolerance` are dropped.

    Raises:
        InvalidParameterError: If n > d or some A_j*A_j is not a multiple of I.
    """
    n, d = E.dim_in, E.dim_out
    if n > d:
        raise InvalidParameterError(f"Random isometric channels need n <= d, got n={n}, d={d}.")
    weights, isometries = [], []
    for index, operator in enumerate(E.kraus):
        gram = dagger(operator) @ operator
        weight = float(np.trace(gram).real) / n
        if operator_norm(gram - weight * np.eye(n)) > tolerance:
            raise InvalidParameterError(
                f"Kraus operator {index} is not a multiple of an isometry; the channel is not random isometric."
            )
        if weight > tolerance:
            weights.append(weight)
            isometries.append(operator / np.sqrt(weight))
    return np.array(weights), isometries


def cor10a_check(E, tolerance=FORM_TOLERANCE):
    """
    Bounds n²/d <= ||Ẽ||_2² <= n for a random isometric channel, and the equality case.

    When ||Ẽ||_2² >= n - tolerance, all ranges V_jV_j* must coincide; the
    decomposition V = V_1, U_j = V_1*V_j is then returned with the unitarity
    defect of every U_j.

    Returns:
        (dict): `comp_hs_sq`, `lower_bound`, `upper_bound`, `at_upper_bound`
            and, at the upper bound, `range_defect`, `unitary_defect`,
            `isometry` and `unitaries`.
    """
    weights, isometries = random_isometric_form(E, tolerance)
    n = E.dim_in
    value = comp_hs_norm_sq(E)
    lower, _ = comp_hs_norm_bounds(n, E.dim_out)
    result = {
        'comp_hs_sq': value,
        'lower_bound': lower,
        'upper_bound': float(n),
        'weights': weights,
        'at_upper_bound': value >= n - tolerance,
    }
    if result['at_upper_bound']:
        projections = [V @ dagger(V) for V in isometries]
        result['range_defect'] = max(max_abs(p - q) for p in projections for q in projections)
        base = isometries[0]
        unitaries = [dagger(base) @ V for V in isometries]
        result['unitary_defect'] = max(operator_norm(dagger(U) @ U - np.eye(n)) for U in unitaries)
        result['isometry'] = base
        result['unitaries'] = unitaries
        logger.debug("Common-range decomposition with %d unitaries", len(unitaries))
    return result


def cor10b_check(n, d):
    """
    The depolarizing channel as the uniform mixture of the nd isometries V_ij.

    Returns:
        (dict): Largest isometry defect, largest pairwise |⟨V_ij, V_kl⟩|, largest
            deviation of (1/nd) Σ V_ij X V_ij* from tr(X)I/d over the matrix units,
            and the same for the Kraus form returned by `depolarizing`.
    """
    basis = vij_basis(n, d)
    isometry_defect = max(max_abs(dagger(V) @ V - np.eye(n)) for V in basis)
    overlap = max((abs(hs_inner(a, b)) for i, a in enumerate(basis) for b in basis[i + 1:]), default=0.0)
    channel = depolarizing(n, d)
    mixture_defect = channel_defect = 0.0
    for i, j, unit in matrix_units(n):
        target = np.trace(unit) * np.eye(d) / d
        mixture = sum(V @ unit @ dagger(V) for V in basis) / (n * d)
        mixture_defect = max(mixture_defect, max_abs(mixture - target))
        channel_defect = max(channel_defect, max_abs(apply(channel, unit) - target))
    return {
        'operators': len(basis),
        'isometry_defect': isometry_defect,
        'max_overlap': overlap,
        'mixture_defect': mixture_defect,
        'channel_defect': channel_defect,
    }
