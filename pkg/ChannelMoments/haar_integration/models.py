from dataclasses import dataclass

import numpy as np

from tensor_core.exceptions import InvalidParameterError, ShapeMismatchError

from .sampling import sample_sphere, stream


@dataclass
class SphereSampler:
    """
    A seeded stream of uniformly distributed unit vectors in C^n.

    Each call to `draw` consumes one named sub-stream `(seed, "sphere", counter)`,
    so a sampler re-created with the same seed replays the same sequence. The
    sampler is single-owner: do not share one instance across threads.

    Attributes:
        dim (int): Dimension n of the sphere's ambient space.
        seed (int): Non-negative 64-bit seed.
        counter (int): Number of draws made so far.

    Examples:
        ```
        sampler = SphereSampler(3, seed=7)
        phi = sampler.draw()         # shape (3,)
        batch = sampler.draw(1000)   # shape (1000, 3)
        ```
    """
    dim: int
    seed: int = 0
    counter: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameterError(f"Sphere dimension must be at least 1, got {self.dim}.")
        if self.seed < 0:
            raise InvalidParameterError(f"Seed must be non-negative, got {self.seed}.")

    def draw(self, count=None):
        """
        Draw one unit vector, or a `(count, dim)` batch of them.

        Returns:
            (np.ndarray): Unit vector(s) in C^dim.
        """
        rng = stream(self.seed, 'sphere', self.counter)
        self.counter += 1
        return sample_sphere(rng, self.dim, count)


@dataclass(frozen=True, eq=False)
class MCEstimate:
    """
    A Monte Carlo estimate of a matrix- or scalar-valued integral.

    Attributes:
        mean (np.ndarray): Sample mean, complex.
        stderr (np.ndarray): Per-entry standard error of the mean, real and
            imaginary sample variances pooled: sqrt((var_re + var_im) / N).
        samples (int): Number of samples N.

    Methods:
        deviation: Entrywise |mean - exact|.
        max_sigma: Largest deviation measured in standard errors.
        agrees_with: Whether every entry lies within `sigma * stderr + atol` of `exact`.
    """
    mean: np.ndarray
    stderr: np.ndarray
    samples: int

    def deviation(self, exact):
        exact = np.asarray(exact, dtype=complex)
        if exact.shape != self.mean.shape:
            raise ShapeMismatchError(
                f"Exact value of shape {exact.shape} cannot be compared with an estimate of shape {self.mean.shape}."
            )
        return np.abs(self.mean - exact)

    def max_sigma(self, exact, atol=1e-10):
        """
        Largest entrywise deviation in units of stderr.

        Entries whose stderr is zero count as 0 when their deviation is within
        `atol` and as infinity otherwise.
        """
        deviation = self.deviation(exact)
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = np.where(
                self.stderr > 0,
                deviation / np.where(self.stderr > 0, self.stderr, 1.0),
                np.where(deviation <= atol, 0.0, np.inf),
            )
        return float(np.max(ratio)) if ratio.size else 0.0

    def agrees_with(self, exact, sigma=5.0, atol=1e-10):
        return bool(np.all(self.deviation(exact) <= sigma * self.stderr + atol))


@dataclass(frozen=True)
class TwirlFit:
    """
    Least-squares fit of a covariant map to Φ(X) = λX + μ tr(X)I.

    Attributes:
        lam (complex): Coefficient λ of X.
        mu (complex): Coefficient μ of tr(X)I.
        residual (float): Frobenius norm of the fit error over the matrix-unit basis.
        dim (int): Dimension n of the input space.
        samples (int): Haar unitaries averaged; 0 when the map was already covariant.
        identifiable (bool): False for n = 1, where only λ + μ is determined.
    """
    lam: complex
    mu: complex
    residual: float
    dim: int
    samples: int = 0
    identifiable: bool = True

    @property
    def combined(self):
        """λ + μ, the only identifiable quantity when n = 1."""
        return self.lam + self.mu

    @property
    def trace_constraint(self):
        """nλ + n²μ, which equals n for a trace-preserving map."""
        return self.dim * self.lam + self.dim ** 2 * self.mu
