"""
The norm sum ||E||_2² + ||Ẽ||_2² of a channel M_n -> M_d and its extremal cases.

The sum always lies in [(n+n²)/d, n²+n]. The lower bound is attained only by
the completely depolarizing channel, the upper bound only by isometric and
pure-state replacement channels. Since ∫ tr(E(φφ*)²) dφ equals the sum
divided by n(n+1), a Monte Carlo estimate of that integral checks the norm
formulas independently.
"""
import logging
import math

import numpy as np

from channel_management.channels import apply, comp_hs_norm_sq, hs_norm_sq
from channel_management.generators import depolarizing, random_cptp
from channel_management.models import KrausChannel
from haar_integration.montecarlo import DEFAULT_CHUNK_ELEMENTS, mc_estimate
from haar_integration.sampling import sample_sphere, stream
from tensor_core.exceptions import InvalidParameterError
from tensor_core.operators import matrix_units, max_abs

from .models import Classification, PurityKind, Theorem1Report
from .purity import output_purity, purity_classify

logger = logging.getLogger(__name__)


BOUND_TOLERANCE = 1e-8

# Conditions of the equivalence chain count as holding within this distance.
EQUIVALENCE_TOLERANCE = 1e-6

PERTURBED_CHANNELS = 50


def sum_bounds(n, d):
    """The interval ((n+n²)/d, n²+n) of possible norm sums."""
    if n < 1 or d < 1:
        raise InvalidParameterError(f"Dimensions must be positive, got n={n}, d={d}.")
    return (n + n * n) / d, float(n * n + n)


def depolarizing_defect(E):
    """max over matrix units of |E(e_i e_j*) - δ_ij I/d|, zero exactly for the depolarizing channel."""
    target = np.eye(E.dim_out) / E.dim_out
    return max(max_abs(apply(E, unit) - (target if i == j else 0)) for i, j, unit in matrix_units(E.dim_in))


def mc_output_purity(E, samples, seed, workers=1, chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """Monte Carlo estimate of ∫ tr(E(φφ*)²) dφ."""

    def integrand(rng, count):
        return output_purity(E, sample_sphere(rng, E.dim_in, count))

    return mc_estimate(integrand, (), samples, seed, 'output_purity', workers, chunk_elements)


def theorem1_report(E, mc_samples=0, seed=0, tolerance=BOUND_TOLERANCE, workers=1,
                    chunk_elements=DEFAULT_CHUNK_ELEMENTS):
    """
    Norm sum, bounds and extremal classification of a trace-preserving channel.

    A sum within `tolerance` of the lower bound is `DEPOLARIZING` when the
    depolarizing defect is within `tolerance` too, otherwise `INTERIOR`; within
    `tolerance` of the upper bound the class comes from `purity_classify`;
    anything else is `INTERIOR`.

    Args:
        E (KrausChannel): The channel.
        mc_samples (int): Samples for the ∫ tr(E(φφ*)²) dφ estimate; 0 skips it.
        seed (int): Seed for the estimate and the purity probes.
        tolerance (float): Distance at which a bound counts as attained.

    Returns:
        (Theorem1Report): The report.
    """
    n, d = E.dim_in, E.dim_out
    lower, upper = sum_bounds(n, d)
    hs_sq, comp_hs_sq = hs_norm_sq(E), comp_hs_norm_sq(E)
    total = hs_sq + comp_hs_sq
    defect = depolarizing_defect(E)

    purity = None
    if total <= lower + tolerance and defect <= tolerance:
        classification = Classification.DEPOLARIZING
    elif total >= upper - tolerance:
        purity = purity_classify(E, seed)
        classification = {
            PurityKind.ISOMETRIC: Classification.ISOMETRIC,
            PurityKind.REPLACEMENT: Classification.REPLACEMENT,
        }.get(purity.kind, Classification.INTERIOR)
    else:
        if total <= lower + tolerance:
            logger.warning("Norm sum within %.1e of the lower bound but depolarizing defect is %.3e",
                           tolerance, defect)
        classification = Classification.INTERIOR

    estimate = None
    if mc_samples:
        estimate = mc_output_purity(E, mc_samples, seed, workers, chunk_elements)
    report = Theorem1Report(
        n=n,
        d=d,
        hs_sq=hs_sq,
        comp_hs_sq=comp_hs_sq,
        lower_bound=lower,
        upper_bound=upper,
        classification=classification,
        purity=purity,
        depolarizing_defect=defect,
        mc_check=estimate,
        mc_predicted=total / (n * (n + 1)),
    )
    logger.debug("Norm sum %.12g in [%.12g, %.12g]: %s", total, lower, upper, classification)
    return report


def equivalence_conditions(E, tolerance=EQUIVALENCE_TOLERANCE):
    """
    The four characterisations of the depolarizing channel, evaluated numerically.

    Returns:
        (dict): Maps `sum_at_lower_bound`, `is_depolarizing`, `norm_sum_minimal`
            and `hs_norm_minimal` to `(holds, defect)`.
    """
    n, d = E.dim_in, E.dim_out
    hs_sq, comp_hs_sq = hs_norm_sq(E), comp_hs_norm_sq(E)
    defects = {
        'sum_at_lower_bound': abs(hs_sq + comp_hs_sq - (n + n * n) / d),
        'is_depolarizing': depolarizing_defect(E),
        'norm_sum_minimal': abs(math.sqrt(hs_sq) + math.sqrt(comp_hs_sq) - (math.sqrt(n) + n) / math.sqrt(d)),
        'hs_norm_minimal': abs(hs_sq - n / d),
    }
    return {name: (defect <= tolerance, defect) for name, defect in defects.items()}


def perturbed_depolarizing(n, d, weight, seed):
    """(1 - weight)·depolarizing + weight·(seeded random channel), as a union of scaled Kraus sets."""
    other = random_cptp(n, d, n * d, seed)
    kraus = [math.sqrt(1.0 - weight) * a for a in depolarizing(n, d).kraus]
    kraus += [math.sqrt(weight) * a for a in other.kraus]
    return KrausChannel(n, d, tuple(kraus))


def theorem1_equiv_check(n, d, seed=0, count=PERTURBED_CHANNELS, tolerance=EQUIVALENCE_TOLERANCE):
    """
    Check that the four characterisations of the depolarizing channel hold or fail together.

    The depolarizing channel must satisfy all four to 1e-10. Each of `count`
    seeded perturbations (1-w)·depolarizing + w·random with w in [0.02, 1] must
    satisfy either all of them or none.

    Returns:
        (dict): `depolarizing` defects, the number of perturbed channels with all
            conditions failing / holding, and a list of `violations`.
    """
    exact = equivalence_conditions(depolarizing(n, d), tolerance=1e-10)
    violations = [f"depolarizing: {name} off by {defect:.3e}"
                  for name, (holds, defect) in exact.items() if not holds]
    weights = 0.02 + 0.98 * stream(seed, 'equivalence_weights', n, d).random(count)
    all_fail = all_hold = 0
    for index, weight in enumerate(weights):
        conditions = equivalence_conditions(perturbed_depolarizing(n, d, weight, seed + index), tolerance)
        outcomes = {holds for holds, _ in conditions.values()}
        if outcomes == {False}:
            all_fail += 1
        elif outcomes == {True}:
            all_hold += 1
        else:
            partial = ', '.join(name for name, (holds, _) in conditions.items() if holds)
            violations.append(f"perturbation {index} (w={weight:.4f}) satisfies only {partial}")
    return {
        'depolarizing': {name: defect for name, (_, defect) in exact.items()},
        'perturbed': int(count),
        'all_fail': all_fail,
        'all_hold': all_hold,
        'violations': violations,
    }
