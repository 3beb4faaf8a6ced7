from dataclasses import dataclass, field

from django.db import models
from django.utils.translation import gettext_lazy as _

from haar_integration.montecarlo import DEFAULT_CHUNK_ELEMENTS


class Classification(models.TextChoices):
    """
    Position of ||E||_2² + ||Ẽ||_2² inside the interval [(n+n²)/d, n²+n].

    Attributes:
        DEPOLARIZING (str): The lower bound is attained.
        ISOMETRIC (str): The upper bound is attained by X ↦ VXV*.
        REPLACEMENT (str): The upper bound is attained by X ↦ tr(X)ψψ*.
        INTERIOR (str): Strictly between the bounds.
    """
    DEPOLARIZING = "Depolarizing", _("Completely depolarizing")
    ISOMETRIC = "Isometric", _("Isometric")
    REPLACEMENT = "Replacement", _("Pure-state replacement")
    INTERIOR = "Interior", _("Interior")


class PurityKind(models.TextChoices):
    """
    Structural verdict of `purity_classify`.

    Attributes:
        ISOMETRIC (str): X ↦ VXV*, pure inputs stay pure.
        REPLACEMENT (str): X ↦ tr(X)ψψ*, every input becomes ψψ*.
        NOT (str): Some pure input has an impure image.
    """
    ISOMETRIC = "Isometric", _("Isometric")
    REPLACEMENT = "Replacement", _("Pure-state replacement")
    NOT = "Not", _("Not purity preserving")


class SweepFamily(models.TextChoices):
    """
    One-parameter channel families whose norm sum sweeps the whole interval.

    Attributes:
        E_LAMBDA (str): λ·replacement + (1-λ)·depolarizing.
        COR10_T (str): t·V_11 X V_11* + (1-t)·depolarizing, needs n <= d.
    """
    E_LAMBDA = "e_lambda", _("Replacement/depolarizing mixture")
    COR10_T = "cor10_t", _("Isometric/depolarizing mixture")


@dataclass(frozen=True, eq=False)
class PurityVerdict:
    """
    Whether a channel maps pure states to pure states, and why.

    Attributes:
        kind (PurityKind): The verdict.
        isometry (np.ndarray): V for `ISOMETRIC`, phase fixed, else None.
        state (np.ndarray): ψ for `REPLACEMENT`, phase fixed, else None.
        witness (np.ndarray): For `NOT`, a unit input x whose image is impure;
            None when the search found none.
        defect (float): 1 - tr(E(xx*)²) at the witness, 0 otherwise.
        kraus_rank (int): Number of Kraus operators after minimisation.
    """
    kind: str
    isometry: object = None
    state: object = None
    witness: object = None
    defect: float = 0.0
    kraus_rank: int = 0

    @property
    def preserves_purity(self):
        return self.kind != PurityKind.NOT


@dataclass(frozen=True, eq=False)
class Theorem1Report:
    """
    Norm sum of a channel against the interval [(n+n²)/d, n²+n].

    Attributes:
        n (int): Input dimension.
        d (int): Output dimension.
        hs_sq (float): ||E||_2².
        comp_hs_sq (float): ||Ẽ||_2².
        lower_bound (float): (n+n²)/d.
        upper_bound (float): n²+n.
        classification (Classification): Which bound, if any, is attained.
        purity (PurityVerdict): Structural verdict, set when the upper bound is attained.
        depolarizing_defect (float): max |E(e_i e_j*) - δ_ij I/d| over matrix units.
        mc_check (MCEstimate): Estimate of ∫ tr(E(φφ*)²) dφ, None when skipped.
        mc_predicted (float): sum / (n(n+1)), the exact value of that integral.
    """
    n: int
    d: int
    hs_sq: float
    comp_hs_sq: float
    lower_bound: float
    upper_bound: float
    classification: str
    purity: PurityVerdict = None
    depolarizing_defect: float = 0.0
    mc_check: object = None
    mc_predicted: float = 0.0

    @property
    def sum(self):
        return self.hs_sq + self.comp_hs_sq

    def within_bounds(self, tolerance=1e-8):
        return self.lower_bound - tolerance <= self.sum <= self.upper_bound + tolerance


@dataclass(frozen=True)
class SweepRow:
    """
    One grid point of `range_sweep`.

    Attributes:
        parameter (float): λ or t.
        hs_sq (float): ||E||_2² computed from the generated channel.
        comp_hs_sq (float): ||Ẽ||_2² computed from the generated channel.
        expected_sum (float): The closed form of the sum at this parameter.
        lower_bound (float): (n+n²)/d.
        upper_bound (float): n²+n.
    """
    parameter: float
    hs_sq: float
    comp_hs_sq: float
    expected_sum: float
    lower_bound: float
    upper_bound: float

    @property
    def sum(self):
        return self.hs_sq + self.comp_hs_sq


@dataclass(frozen=True)
class CheckOptions:
    """
    Inputs shared by every registered check.

    Checks read only the fields they need; the command layer fills the rest
    from settings.

    Attributes:
        n (int): Dimension of H.
        d (int): Dimension of K, for channel checks.
        k (int): Tensor power, for moment checks.
        samples (int): Monte Carlo sample count N.
        seed (int): Seed for inputs and Monte Carlo streams.
        tol (float): Tolerance of exact identities.
        sigma (float): Monte Carlo acceptance multiplier on stderr.
        bound_tol (float): Slack on norm bounds and "attains the bound" tests.
        workers (int): Monte Carlo threads.
        chunk_elements (int): Monte Carlo memory cap on chunks in flight.
        channel (KrausChannel): Channel under test, for thm1, cor10a and twirl.
    """
    n: int = 2
    d: int = 2
    k: int = 2
    samples: int = 200000
    seed: int = 0
    tol: float = 1e-10
    sigma: float = 5.0
    bound_tol: float = 1e-8
    workers: int = 1
    chunk_elements: int = DEFAULT_CHUNK_ELEMENTS
    channel: object = None

    def mc(self):
        """Keyword arguments for the `mc_*` estimators."""
        return {'samples': self.samples, 'seed': self.seed, 'workers': self.workers,
                'chunk_elements': self.chunk_elements}


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """
    Outcome of one identity check.

    Attributes:
        check (str): Check id, e.g. `prop8` or `eq51`.
        params (dict): Parameters the check ran with (dimensions, N, seed).
        values (dict): Exact values, estimates, deviations and standard errors.
        tolerance (dict): `exact` tolerance and Monte Carlo `sigma`.
        passed (bool): True when every sub-check held.
        failures (tuple): One message per failed sub-check.
    """
    check: str
    params: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    passed: bool = True
    failures: tuple = ()
