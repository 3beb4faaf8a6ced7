"""
Registry of executable checks, one per formula id.

Every verifier takes a `CheckOptions` and returns a `VerificationReport`.
Exact evaluators are compared with an independent exact route (a reduction,
a partial trace or the permutation sum) at `options.tol`, and with their
Monte Carlo twin at `options.sigma` standard errors. Random inputs come from
the stream `(seed, "check_input", label)`, independent of the sampling streams.
"""
import logging
import math

import numpy as np

from channel_management.channels import (
    channel_norms,
    comp_hs_norm_bounds,
    hs_norm_bounds,
    p2p_lower_bound,
    superoperator_matrix,
    validate_cptp,
)
from channel_management.generators import depolarizing, identity, random_cptp, random_isometric
from haar_integration.integrals import (
    exact_cor6a,
    exact_cor6b,
    exact_fourth_weighted,
    exact_moment,
    exact_pair_scalar,
    exact_sandwich1,
    exact_sandwich2,
    exact_third_matrix_weighted,
    exact_third_scalar_weighted,
    exact_unit_weighted,
    exact_weighted2,
    mc_cor6a,
    mc_cor6b,
    mc_fourth_weighted,
    mc_moment,
    mc_pair_scalar,
    mc_sandwich1,
    mc_sandwich2,
    mc_third_matrix_weighted,
    mc_third_scalar_weighted,
    mc_weighted2,
    weighted_moment,
)
from haar_integration.sampling import complex_gaussian, sample_isometry, stream
from haar_integration.twirl import twirl_fit
from tensor_core.exceptions import InvalidParameterError
from tensor_core.models import TensorSpace
from tensor_core.operators import (
    dagger,
    kron,
    matrix_units,
    partial_trace,
    permutation_sum,
    swap_operator,
    symmetric_projector,
    unit_matrix,
)

from .broadcasting import broadcasting_verify
from .models import Classification
from .norm_sum import theorem1_equiv_check, theorem1_report
from .purity import purity_classify
from .random_isometric import cor10a_check, cor10b_check
from .recorder import CheckRecorder
from .sweeps import range_sweep, sweep_defects

logger = logging.getLogger(__name__)


# Acceptance for a Monte Carlo twirl of a non-covariant map.
TWIRL_RESIDUAL = 0.05
TWIRL_TRACE = 0.02


def _random_matrix(options, label, size=None):
    size = size or options.n
    return complex_gaussian(stream(options.seed, 'check_input', label), (size, size))


def _blocks(A, n):
    """Yield (e_i e_j*, C_ij) with A = Σ e_i e_j* ⊗ C_ij."""
    tensor = A.reshape(n, n, n, n)
    for i, j, unit in matrix_units(n):
        yield unit, tensor[i, :, j, :]


def verify_prop3a(options):
    n = options.n
    recorder = CheckRecorder('prop3a', options, n=n, samples=options.samples)
    closed = (np.eye(n * n) + swap_operator(n)) / (n * (n + 1))
    exact = exact_moment(n, 2)
    recorder.exact('closed_form', exact, closed)
    recorder.value('exact', exact)
    recorder.monte_carlo('moment', mc_moment(n, 2, **options.mc()), closed)
    return recorder.report()


def verify_prop3b(options):
    n = options.n
    recorder = CheckRecorder('prop3b', options, n=n, samples=options.samples)
    A, B = _random_matrix(options, 'A'), _random_matrix(options, 'B')
    exact = recorder.value('exact', exact_pair_scalar(A, B))
    # ∫⟨Aφ,φ⟩⟨Bφ,φ⟩ = tr((A⊗B) ∫(φφ*)⊗2)
    recorder.exact('moment_bridge', exact, np.trace(kron(A, B) @ exact_moment(n, 2)))
    recorder.exact('symmetry', exact, exact_pair_scalar(B, A))
    recorder.exact('identity', exact_pair_scalar(np.eye(n), np.eye(n)), 1.0)
    recorder.monte_carlo('pair_scalar', mc_pair_scalar(A, B, **options.mc()), exact)
    return recorder.report()


def verify_prop3c(options):
    n = options.n
    recorder = CheckRecorder('prop3c', options, n=n, samples=options.samples)
    worst_weighted = worst_moment = 0.0
    for i, j, unit in matrix_units(n):
        exact = exact_unit_weighted(n, i, j)
        worst_weighted = max(worst_weighted, float(np.max(np.abs(exact - exact_weighted2(unit)))))
        worst_moment = max(worst_moment, float(np.max(np.abs(exact - weighted_moment([unit], n, 2)))))
    recorder.exact('weighted_form', worst_weighted, 0.0)
    recorder.exact('moment_contraction', worst_moment, 0.0)
    i, j = 0, n - 1
    recorder.value('unit', [i, j])
    recorder.monte_carlo('unit_weighted', mc_weighted2(unit_matrix(n, i, j), **options.mc()),
                         exact_unit_weighted(n, i, j))
    return recorder.report()


def verify_prop3d(options):
    n = options.n
    recorder = CheckRecorder('prop3d', options, n=n, samples=options.samples)
    A = _random_matrix(options, 'A')
    exact = recorder.value('exact', exact_weighted2(A))
    recorder.exact('moment_contraction', exact, weighted_moment([A], n, 2))
    recorder.exact('identity', exact_weighted2(np.eye(n)), np.eye(n) / n)
    U = sample_isometry(n, n, stream(options.seed, 'check_input', 'U'))
    recorder.exact('covariance', exact_weighted2(U @ A @ dagger(U)), U @ exact @ dagger(U))
    recorder.monte_carlo('weighted2', mc_weighted2(A, **options.mc()), exact)
    return recorder.report()


def verify_cor6a(options):
    n = options.n
    recorder = CheckRecorder('cor6a', options, n=n, samples=options.samples)
    A = _random_matrix(options, 'A')
    exact = recorder.value('exact', exact_cor6a(A))
    recorder.exact('pair_scalar', exact, exact_pair_scalar(A, dagger(A)))
    recorder.monte_carlo('cor6a', mc_cor6a(A, **options.mc()), exact)
    return recorder.report()


def verify_cor6b(options):
    n = options.n
    recorder = CheckRecorder('cor6b', options, n=n, samples=options.samples)
    A = _random_matrix(options, 'A')
    exact = recorder.value('exact', exact_cor6b(A))
    recorder.exact('first_moment', exact, np.trace(A @ exact_moment(n, 1)))
    recorder.exact('pair_with_identity', exact, exact_pair_scalar(A, np.eye(n)))
    recorder.monte_carlo('cor6b', mc_cor6b(A, **options.mc()), exact)
    return recorder.report()


def verify_cor7a(options):
    n = options.n
    recorder = CheckRecorder('cor7a', options, n=n, samples=options.samples)
    A = _random_matrix(options, 'A', n * n)
    exact = recorder.value('exact', exact_sandwich1(A))
    # (φφ*⊗I)(B⊗C)(φφ*⊗I) integrates to exact_weighted2(B)⊗C
    bridge = sum(kron(exact_weighted2(unit), block) for unit, block in _blocks(A, n))
    recorder.exact('block_bridge', exact, bridge)
    recorder.exact('identity', exact_sandwich1(np.eye(n * n)), np.eye(n * n) / n)
    recorder.monte_carlo('sandwich1', mc_sandwich1(A, **options.mc()), exact)
    return recorder.report()


def verify_cor7b(options):
    n = options.n
    recorder = CheckRecorder('cor7b', options, n=n, samples=options.samples)
    A = _random_matrix(options, 'A', n * n)
    exact = recorder.value('exact', exact_sandwich2(A))
    bridge = sum(kron(exact_weighted2(unit), exact_weighted2(block)) for unit, block in _blocks(A, n))
    recorder.exact('block_bridge', exact, bridge)
    recorder.exact('identity', exact_sandwich2(np.eye(n * n)), np.eye(n * n) / (n * n))
    recorder.monte_carlo('sandwich2', mc_sandwich2(A, **options.mc()), exact)
    return recorder.report()


def verify_prop8(options):
    n, k = options.n, options.k
    recorder = CheckRecorder('prop8', options, n=n, k=k, samples=options.samples)
    space = TensorSpace(n, k)
    projector = symmetric_projector(space)
    numerator = permutation_sum(space)
    recorder.exact('hermitian', projector, dagger(projector))
    recorder.exact('idempotent', projector @ projector, projector)
    rank = math.comb(n + k - 1, k)
    recorder.value('rank', rank)
    recorder.exact('trace', np.trace(projector), rank)
    recorder.exact('numerator_square', numerator @ numerator, math.factorial(k) * numerator, tolerance=1e-9)
    exact = exact_moment(n, k)
    recorder.exact('unit_trace', np.trace(exact), 1.0)
    recorder.monte_carlo('moment', mc_moment(n, k, **options.mc()), exact)
    return recorder.report()


def verify_thm9a(options):
    n = options.n
    recorder = CheckRecorder('thm9a', options, n=n, samples=options.samples)
    A, B = _random_matrix(options, 'A'), _random_matrix(options, 'B')
    exact = recorder.value('exact', exact_third_scalar_weighted(A, B))
    recorder.exact('permutation_sum', exact, exact_third_scalar_weighted(A, B, method='permutation'))
    recorder.exact('symmetry', exact, exact_third_scalar_weighted(B, A))
    recorder.exact('identity_reduction', exact_third_scalar_weighted(np.eye(n), B), exact_weighted2(B))
    recorder.monte_carlo('third_scalar', mc_third_scalar_weighted(A, B, **options.mc()), exact)
    return recorder.report()


def verify_thm9b(options):
    n = options.n
    recorder = CheckRecorder('thm9b', options, n=n, samples=options.samples)
    A = _random_matrix(options, 'A')
    A = (A + dagger(A)) / 2
    exact = recorder.value('exact', exact_third_matrix_weighted(A))
    recorder.exact('permutation_sum', exact, exact_third_matrix_weighted(A, method='permutation'))
    recorder.exact('hermitian', exact, dagger(exact))
    recorder.exact('partial_trace', partial_trace(exact, [n, n], keep=[0]), exact_weighted2(A))
    recorder.exact('identity_reduction', exact_third_matrix_weighted(np.eye(n)), exact_moment(n, 2))
    recorder.monte_carlo('third_matrix', mc_third_matrix_weighted(A, **options.mc()), exact)
    return recorder.report()


def verify_remark3(options):
    n = options.n
    recorder = CheckRecorder('remark3', options, n=n, samples=options.samples)
    A, B = _random_matrix(options, 'A'), _random_matrix(options, 'B')
    exact = recorder.value('exact', exact_fourth_weighted(A, B))
    recorder.exact('permutation_sum', exact, exact_fourth_weighted(A, B, method='permutation'))
    recorder.exact('identity_reduction', exact_fourth_weighted(np.eye(n), B), exact_third_matrix_weighted(B))
    recorder.exact('moment_reduction', exact_fourth_weighted(np.eye(n), np.eye(n)), exact_moment(n, 2))
    recorder.monte_carlo('fourth', mc_fourth_weighted(A, B, **options.mc()), exact)
    return recorder.report()


def _twirl_exact(recorder, name, channel, lam, mu, options):
    fit = twirl_fit(superoperator_matrix(channel), channel.dim_in, options.samples, options.seed,
                    options.workers, options.chunk_elements)
    recorder.value(name, fit)
    recorder.exact(f'{name}_residual', fit.residual, 0.0)
    if fit.identifiable:
        recorder.exact(f'{name}_coefficients', [fit.lam, fit.mu], [lam, mu])
    else:
        recorder.exact(f'{name}_coefficients', fit.combined, lam + mu)


def verify_twirl(options):
    """
    Twirl fits: exact for the identity and depolarizing maps, sampled for a random channel.

    With `options.channel` set (n -> n), that channel is twirled instead of a
    random one.
    """
    n = options.n
    recorder = CheckRecorder('twirl', options, n=n, samples=options.samples)
    _twirl_exact(recorder, 'identity', identity(n), 1.0, 0.0, options)
    _twirl_exact(recorder, 'depolarizing', depolarizing(n, n), 0.0, 1.0 / n, options)

    channel = options.channel or random_cptp(n, n, n * n, options.seed)
    if channel.dim_in != channel.dim_out:
        raise InvalidParameterError(
            f"Twirling needs a channel from M_n to M_n, got {channel.dim_in}->{channel.dim_out}."
        )
    fit = twirl_fit(superoperator_matrix(channel), channel.dim_in, options.samples, options.seed,
                    options.workers, options.chunk_elements)
    recorder.value('channel', fit)
    recorder.condition('channel_residual', fit.residual <= TWIRL_RESIDUAL, f"{fit.residual:.4f} > {TWIRL_RESIDUAL}")
    if validate_cptp(channel).is_trace_preserving(options.bound_tol):
        deviation = abs(fit.trace_constraint - channel.dim_in)
        recorder.condition('channel_trace_constraint', deviation <= TWIRL_TRACE,
                           f"|nλ + n²μ - n| = {deviation:.4f}")
    return recorder.report()


def _require_channel(options, check):
    if options.channel is None:
        raise InvalidParameterError(f"Check {check} needs a channel (--channel FILE or --gen NAME).")
    return options.channel


def verify_thm1(options):
    channel = _require_channel(options, 'thm1')
    n, d = channel.dim_in, channel.dim_out
    recorder = CheckRecorder('thm1', options, n=n, d=d, samples=options.samples)
    report = theorem1_report(channel, options.samples, options.seed, options.bound_tol,
                             options.workers, options.chunk_elements)
    recorder.value('hs_sq', report.hs_sq)
    recorder.value('comp_hs_sq', report.comp_hs_sq)
    recorder.value('sum', report.sum)
    recorder.value('lower_bound', report.lower_bound)
    recorder.value('upper_bound', report.upper_bound)
    recorder.value('classification', str(report.classification))
    recorder.condition('bounds', report.within_bounds(options.bound_tol),
                       f"sum {report.sum:.12g} outside [{report.lower_bound:.12g}, {report.upper_bound:.12g}]")
    if report.classification == Classification.DEPOLARIZING:
        recorder.exact('depolarizing_action', report.depolarizing_defect, 0.0, tolerance=options.bound_tol)
    if report.purity is not None:
        recorder.value('purity', report.purity)
        recorder.condition('upper_bound_structure', report.purity.preserves_purity,
                           "the upper bound is attained by a channel that is not purity preserving")
    if report.mc_check is not None:
        recorder.value('mc_predicted', report.mc_predicted)
        recorder.monte_carlo('output_purity', report.mc_check, report.mc_predicted)
    return recorder.report()


def verify_thm1equiv(options):
    n, d = options.n, options.d
    recorder = CheckRecorder('thm1equiv', options, n=n, d=d)
    result = theorem1_equiv_check(n, d, options.seed)
    for name, value in result.items():
        if name != 'violations':
            recorder.value(name, value)
    for violation in result['violations']:
        recorder.fail(violation)
    return recorder.report()


def verify_cor10a(options):
    n, d = options.n, options.d
    channel = options.channel
    if channel is None:
        isometries = [sample_isometry(d, n, stream(options.seed, 'check_input', 'V', j)) for j in range(3)]
        channel = random_isometric([0.5, 0.3, 0.2], isometries)
    recorder = CheckRecorder('cor10a', options, n=channel.dim_in, d=channel.dim_out)
    result = cor10a_check(channel, options.bound_tol)
    for name, value in result.items():
        recorder.value(name, value)
    value = result['comp_hs_sq']
    recorder.condition('bounds', result['lower_bound'] - options.bound_tol <= value
                       <= result['upper_bound'] + options.bound_tol,
                       f"{value:.12g} outside [{result['lower_bound']:.12g}, {result['upper_bound']:.12g}]")
    if result['at_upper_bound']:
        recorder.exact('common_range', result['range_defect'], 0.0, tolerance=options.bound_tol)
        recorder.exact('unitaries', result['unitary_defect'], 0.0, tolerance=options.bound_tol)
    return recorder.report()


def verify_cor10b(options):
    n, d = options.n, options.d
    recorder = CheckRecorder('cor10b', options, n=n, d=d)
    result = cor10b_check(n, d)
    recorder.value('operators', result['operators'])
    recorder.exact('isometries', result['isometry_defect'], 0.0)
    recorder.exact('orthogonality', result['max_overlap'], 0.0)
    recorder.exact('mixture', result['mixture_defect'], 0.0)
    recorder.exact('depolarizing_kraus', result['channel_defect'], 0.0)
    return recorder.report()


def verify_eq51(options):
    n = options.n
    recorder = CheckRecorder('eq51', options, n=n, samples=options.samples)
    result = broadcasting_verify(n, options.samples, options.seed, options.workers, options.chunk_elements)
    recorder.value('p', result['p'])
    recorder.exact('identity', result['identity'], 0.0)
    recorder.exact('integral_route', result['integral_route'], 0.0)
    recorder.exact('trace', result['trace'], 0.0)
    if 'estimate' in result:
        recorder.value('input', result['input'])
        recorder.monte_carlo('m', result['estimate'], result['exact'])
    return recorder.report()


VERIFIERS = {
    'prop3a': verify_prop3a,
    'prop3b': verify_prop3b,
    'prop3c': verify_prop3c,
    'prop3d': verify_prop3d,
    'cor6a': verify_cor6a,
    'cor6b': verify_cor6b,
    'cor7a': verify_cor7a,
    'cor7b': verify_cor7b,
    'prop8': verify_prop8,
    'thm9a': verify_thm9a,
    'thm9b': verify_thm9b,
    'remark3': verify_remark3,
    'twirl': verify_twirl,
    'thm1': verify_thm1,
    'thm1equiv': verify_thm1equiv,
    'cor10a': verify_cor10a,
    'cor10b': verify_cor10b,
    'eq51': verify_eq51,
}


def run_check(check, options):
    """
    Run the check registered under `check`.

    Raises:
        InvalidParameterError: For an unknown check id.
    """
    try:
        verifier = VERIFIERS[check]
    except KeyError:
        raise InvalidParameterError(f"Unknown check {check!r}; choose from {', '.join(VERIFIERS)}.") from None
    logger.debug("Running check %s with %s", check, options)
    return verifier(options)


def classify_channel(options):
    """
    Purity verdict of `options.channel`, cross-checked against its norm sum.

    A purity-preserving verdict must coincide with the sum attaining n²+n.
    """
    channel = _require_channel(options, 'classify')
    recorder = CheckRecorder('classify', options, n=channel.dim_in, d=channel.dim_out)
    verdict = purity_classify(channel, options.seed)
    recorder.value('purity', verdict)
    report = theorem1_report(channel, 0, options.seed, options.bound_tol)
    recorder.value('sum', report.sum)
    recorder.value('upper_bound', report.upper_bound)
    recorder.value('classification', str(report.classification))
    at_upper = report.sum >= report.upper_bound - options.bound_tol
    recorder.condition('verdict_matches_norms', verdict.preserves_purity == at_upper,
                       f"verdict {verdict.kind} with sum {report.sum:.12g} and bound {report.upper_bound:.12g}")
    return recorder.report()


def sweep_check(options, family, grid_size):
    """
    Sweep a family over [0, 1] and check closed forms, endpoints and monotonicity.

    Returns:
        (tuple): `(rows, report)` with the `SweepRow` list and its `VerificationReport`.
    """
    n, d = options.n, options.d
    rows = range_sweep(n, d, grid_size, family, options.seed)
    recorder = CheckRecorder('sweep', options, n=n, d=d, family=str(family), grid=grid_size)
    defects = sweep_defects(rows)
    recorder.exact('closed_form', defects['closed_form'], 0.0)
    recorder.exact('lower_endpoint', defects['lower_endpoint'], 0.0)
    recorder.exact('upper_endpoint', defects['upper_endpoint'], 0.0)
    recorder.exact('monotone', defects['max_decrease'], 0.0)
    recorder.value('rows', rows)
    return rows, recorder.report()


def norms_check(options):
    """
    Norms of `options.channel` against the ranges every channel must respect.

    ||E||_2² and ||Ẽ||_2² are checked against their ranges; for a
    trace-preserving map also ||E||_{1→1} = 1 and ||E||_{p→p} >= (n/d)^{1-1/p}.
    Maps that are not trace preserving fail the `trace_preserving` condition.
    """
    channel = _require_channel(options, 'norms')
    n, d = channel.dim_in, channel.dim_out
    recorder = CheckRecorder('norms', options, n=n, d=d)
    norms = recorder.value('norms', channel_norms(channel))
    tol = options.bound_tol

    lower, upper = hs_norm_bounds(n, d)
    recorder.condition('hs_bounds', lower - tol <= norms.hs_sq <= upper + tol,
                       f"{norms.hs_sq:.12g} outside [{lower:.12g}, {upper:.12g}]")
    lower, upper = comp_hs_norm_bounds(n, d)
    recorder.condition('comp_hs_bounds', lower - tol <= norms.comp_hs_sq <= upper + tol,
                       f"{norms.comp_hs_sq:.12g} outside [{lower:.12g}, {upper:.12g}]")

    tp_defect = recorder.value('tp_defect', validate_cptp(channel).tp_defect)
    if not recorder.condition('trace_preserving', tp_defect <= tol, f"defect {tp_defect:.3e}"):
        return recorder.report()
    recorder.exact('one_to_one', norms.p2p['1'], 1.0, tolerance=tol)
    for key in ('2', 'inf'):
        bound = p2p_lower_bound(n, d, key)
        recorder.condition(f'p2p_{key}_bound', norms.p2p[key] >= bound - tol,
                           f"||E||_{key}->{key} = {norms.p2p[key]:.12g} below {bound:.12g}")
    return recorder.report()
