import itertools
import math
from dataclasses import dataclass

from .exceptions import DimensionError, InvalidParameterError


# Largest total dimension n**k of a tensor space held densely.
MAX_TENSOR_DIM = 2 ** 20


@dataclass(frozen=True)
class TensorSpace:
    """
    The tensor power H^{⊗k} of an n-dimensional space.

    Basis ordering is lexicographic with the first factor as the slow index.

    Attributes:
        local_dim (int): Dimension n of H.
        factors (int): Tensor power k.

    Raises:
        DimensionError: If n or k is below 1 or n**k exceeds `MAX_TENSOR_DIM`.
    """
    local_dim: int
    factors: int

    def __post_init__(self):
        if self.local_dim < 1 or self.factors < 1:
            raise DimensionError(
                f"Tensor space needs n >= 1 and k >= 1, got n={self.local_dim}, k={self.factors}."
            )
        if self.local_dim ** self.factors > MAX_TENSOR_DIM:
            raise DimensionError(
                f"Tensor space {self.local_dim}^{self.factors} exceeds the dense limit {MAX_TENSOR_DIM}."
            )

    @property
    def dim(self):
        """Total dimension n**k."""
        return self.local_dim ** self.factors

    @property
    def dims(self):
        """Factor dimensions as a list, the form `partial_trace` takes."""
        return [self.local_dim] * self.factors


@dataclass(frozen=True)
class Permutation:
    """
    A permutation s of {0, ..., k-1}, stored by images.

    `images[i]` is s(i): the slot that the vector in slot i is moved to by Γ(s).

    Attributes:
        images (tuple): Image of each position.

    Methods:
        identity: The identity permutation on k points.
        transposition: Swap of two positions.
        cycle: The cycle 0 -> 1 -> ... -> k-1 -> 0.
        all: Every permutation of k points in lexicographic order.
        compose: (s ∘ t)(i) = s(t(i)); also available as `s * t`.
        inverse: The inverse permutation.

    Raises:
        InvalidParameterError: If `images` is not a bijection of {0, ..., k-1}.
    """
    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise InvalidParameterError(f"{self.images} is not a permutation of 0..{len(images) - 1}.")
        object.__setattr__(self, 'images', images)

    def __len__(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i]

    def __mul__(self, other):
        return self.compose(other)

    @classmethod
    def identity(cls, k):
        return cls(tuple(range(k)))

    @classmethod
    def transposition(cls, k, i, j):
        images = list(range(k))
        images[i], images[j] = images[j], images[i]
        return cls(tuple(images))

    @classmethod
    def cycle(cls, k):
        return cls(tuple((i + 1) % k for i in range(k)))

    @classmethod
    def all(cls, k):
        return [cls(images) for images in itertools.permutations(range(k))]

    def compose(self, other):
        if len(other) != len(self):
            raise InvalidParameterError(
                f"Cannot compose permutations on {len(self)} and {len(other)} points."
            )
        return Permutation(tuple(self.images[other.images[i]] for i in range(len(self))))

    def inverse(self):
        inv = [0] * len(self)
        for i, image in enumerate(self.images):
            inv[image] = i
        return Permutation(tuple(inv))

    def is_identity(self):
        return self.images == tuple(range(len(self)))


def rising_factorial(n, k):
    """n (n+1) ... (n+k-1), the normaliser of the k-th sphere moment."""
    return math.prod(n + j for j in range(k))
