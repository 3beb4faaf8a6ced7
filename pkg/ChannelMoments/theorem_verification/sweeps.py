import logging

import numpy as np

from channel_management.channels import comp_hs_norm_sq, hs_norm_sq
from channel_management.generators import cor10_t, e_lambda, random_unit_vector
from tensor_core.exceptions import InvalidParameterError

from .models import SweepFamily, SweepRow
from .norm_sum import sum_bounds

logger = logging.getLogger(__name__)


def expected_norms(family, x, n, d):
    """
    Closed forms (||E||_2², ||Ẽ||_2²) of a sweep family at parameter x.

    e_lambda: (n(1-x²)/d + nx², n²(1-x²)/d + n²x²);
    cor10_t: (n²x² + n(1-x²)/d, n²(1-x²)/d + nx²). The two sums coincide.
    """
    rest = 1.0 - x * x
    if family == SweepFamily.E_LAMBDA:
        return n * rest / d + n * x * x, n * n * rest / d + n * n * x * x
    return n * n * x * x + n * rest / d, n * n * rest / d + n * x * x


def range_sweep(n, d, grid_size, family, seed=0):
    """
    Norm sums along a one-parameter family from the depolarizing channel to an extremal one.

    The parameter runs over `grid_size` equally spaced points of [0, 1]. For
    `e_lambda` the replacement state ψ is a seeded random unit vector.

    Args:
        n (int): Input dimension.
        d (int): Output dimension.
        grid_size (int): Number of grid points, at least 2.
        family (str): `e_lambda` or `cor10_t`.
        seed (int): Seed for ψ.

    Returns:
        (list): One `SweepRow` per grid point.

    Raises:
        InvalidParameterError: For grid_size < 2, an unknown family, or
            `cor10_t` with n > d.
    """
    if family not in SweepFamily.values:
        raise InvalidParameterError(f"Unknown sweep family {family!r}; choose from {', '.join(SweepFamily.values)}.")
    if grid_size < 2:
        raise InvalidParameterError(f"A sweep needs at least 2 grid points, got {grid_size}.")
    if family == SweepFamily.COR10_T and n > d:
        raise InvalidParameterError(f"The cor10_t family needs n <= d, got n={n}, d={d}.")
    lower, upper = sum_bounds(n, d)
    psi = random_unit_vector(d, seed) if family == SweepFamily.E_LAMBDA else None

    rows = []
    for x in np.linspace(0.0, 1.0, grid_size):
        x = float(x)
        channel = e_lambda(x, psi, n, d) if family == SweepFamily.E_LAMBDA else cor10_t(x, n, d)
        rows.append(SweepRow(
            parameter=x,
            hs_sq=hs_norm_sq(channel),
            comp_hs_sq=comp_hs_norm_sq(channel),
            expected_sum=sum(expected_norms(family, x, n, d)),
            lower_bound=lower,
            upper_bound=upper,
        ))
    logger.debug("Swept %s over %d points for n=%d, d=%d", family, grid_size, n, d)
    return rows


def sweep_defects(rows):
    """
    Largest closed-form deviation, endpoint deviations and the largest decrease along a sweep.

    Returns:
        (dict): `closed_form`, `lower_endpoint`, `upper_endpoint` and
            `max_decrease` (0 for a non-decreasing sweep).
    """
    sums = np.array([row.sum for row in rows])
    return {
        'closed_form': float(max(abs(row.sum - row.expected_sum) for row in rows)),
        'lower_endpoint': abs(rows[0].sum - rows[0].lower_bound),
        'upper_endpoint': abs(rows[-1].sum - rows[-1].upper_bound),
        'max_decrease': float(max(0.0, -np.min(np.diff(sums)))),
    }
