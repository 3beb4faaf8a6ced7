from dataclasses import asdict, dataclass

from django.db import models
from django.utils.translation import gettext_lazy as _

from haar_integration.montecarlo import DEFAULT_CHUNK_ELEMENTS
from theorem_verification.models import CheckOptions


class OutputFormat(models.TextChoices):
    """
    How a command writes its result.

    Attributes:
        TEXT (str): Short human-readable summary.
        JSON (str): The report JSON.
        CSV (str): A table, for `sweep`.
    """
    TEXT = "text", _("Text summary")
    JSON = "json", _("JSON")
    CSV = "csv", _("CSV table")


@dataclass(frozen=True)
class RunConfig:
    """
    Everything one command run depends on.

    Two runs with equal configs produce byte-identical JSON output; the seed
    is always copied into the report.

    Attributes:
        command (str): Command name.
        n (int): Input dimension.
        d (int): Output dimension.
        k (int): Tensor power.
        lam (float): λ of `elambda`.
        t (float): t of `cor10_t`.
        rank (int): Kraus rank of `random`.
        count (int): Number of isometries of `random_isometric`.
        samples (int): Monte Carlo sample count.
        seed (int): Seed of every random choice.
        tol (float): Exact tolerance.
        sigma (float): Monte Carlo multiplier on stderr.
        bound_tol (float): Slack on norm bounds.
        output (str): Output path, None for stdout.
        format (OutputFormat): Output format.
        workers (int): Monte Carlo threads.
        chunk_elements (int): Monte Carlo memory cap on chunks in flight.
    """
    command: str
    n: int = 2
    d: int = 2
    k: int = 2
    lam: float = None
    t: float = None
    rank: int = None
    count: int = None
    samples: int = 200000
    seed: int = 0
    tol: float = 1e-10
    sigma: float = 5.0
    bound_tol: float = 1e-8
    output: str = None
    format: str = OutputFormat.TEXT
    workers: int = 1
    chunk_elements: int = DEFAULT_CHUNK_ELEMENTS

    def check_options(self, channel=None):
        return CheckOptions(
            n=self.n,
            d=self.d,
            k=self.k,
            samples=self.samples,
            seed=self.seed,
            tol=self.tol,
            sigma=self.sigma,
            bound_tol=self.bound_tol,
            workers=self.workers,
            chunk_elements=self.chunk_elements,
            channel=channel,
        )

    def generator_params(self):
        """Keyword arguments for `build_channel`; unset ones are left out."""
        params = {key: value for key, value in asdict(self).items()
                  if key in ('n', 'd', 'lam', 't', 'rank', 'count', 'seed')}
        return {key: value for key, value in params.items() if value is not None}
