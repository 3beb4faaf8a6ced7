import logging
import math

import numpy as np

from tensor_core.operators import max_abs

from .models import VerificationReport

logger = logging.getLogger(__name__)


class CheckRecorder:
    """
    Collects the sub-results of one check and turns them into a `VerificationReport`.

    Exact comparisons pass when the largest entrywise deviation is at most
    `options.tol`; Monte Carlo comparisons pass when every entry lies within
    `options.sigma` standard errors (plus `options.tol`) of the exact value.

    Examples:
        ```
        recorder = CheckRecorder('prop3a', options, n=options.n)
        recorder.exact('closed_form', exact_moment(n, 2), closed)
        recorder.monte_carlo('moment', mc_moment(n, 2, **options.mc()), closed)
        report = recorder.report()
        ```
    """

    def __init__(self, check, options, **params):
        self.check = check
        self.options = options
        self.params = params
        self.values = {}
        self.failures = []

    def value(self, name, value):
        self.values[name] = value
        return value

    def exact(self, name, actual, expected, tolerance=None):
        """Record max |actual - expected| under `<name>_defect`."""
        tolerance = self.options.tol if tolerance is None else tolerance
        defect = max_abs(np.asarray(actual, dtype=complex) - np.asarray(expected, dtype=complex))
        self.values[f'{name}_defect'] = defect
        if not defect <= tolerance:
            self.failures.append(f"{name}: deviation {defect:.3e} exceeds {tolerance:g}")
        return defect

    def condition(self, name, holds, detail=''):
        """Record a boolean sub-check."""
        holds = bool(holds)
        self.values[name] = holds
        if not holds:
            self.failures.append(f"{name} does not hold{': ' + detail if detail else ''}")
        return holds

    def monte_carlo(self, name, estimate, exact):
        """
        Record the deviation of an estimate from its exact value, in absolute terms and in stderr.

        `max_sigma` is None when an entry with zero stderr deviates, so the report stays strict JSON.
        """
        deviation = estimate.deviation(exact)
        sigma = estimate.max_sigma(exact, atol=self.options.tol)
        self.values[f'{name}_mc'] = {
            'samples': estimate.samples,
            'max_deviation': float(np.max(deviation)),
            'max_stderr': float(np.max(estimate.stderr)),
            'max_sigma': sigma if math.isfinite(sigma) else None,
        }
        agrees = estimate.agrees_with(exact, sigma=self.options.sigma, atol=self.options.tol)
        if not agrees:
            self.failures.append(f"{name}: Monte Carlo deviates by {sigma:.2f} standard errors")
        return agrees

    def fail(self, message):
        self.failures.append(message)

    def report(self):
        passed = not self.failures
        logger.info("Check %s %s", self.check, 'passed' if passed else f'failed: {"; ".join(self.failures)}')
        return VerificationReport(
            check=self.check,
            params={**self.params, 'seed': self.options.seed},
            values=self.values,
            tolerance={'exact': self.options.tol, 'sigma': self.options.sigma, 'bound': self.options.bound_tol},
            passed=passed,
            failures=tuple(self.failures),
        )
