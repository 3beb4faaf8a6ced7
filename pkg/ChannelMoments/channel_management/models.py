from dataclasses import dataclass, field

import numpy as np
from django.db import models
from django.utils.translation import gettext_lazy as _

from tensor_core.exceptions import InvalidParameterError, ShapeMismatchError
from tensor_core.operators import as_matrix


def _frozen(matrix):
    array = np.array(matrix, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """
    A completely positive map X ↦ Σ A_i X A_i* given by its Kraus operators.

    The Kraus operators are stored as read-only complex arrays; a channel never
    changes after construction.

    Attributes:
        dim_in (int): Input dimension n.
        dim_out (int): Output dimension d.
        kraus (tuple): The d x n operators (A_1, ..., A_m), m >= 1.

    Methods:
        rank: Number of Kraus operators m (not minimised).
        stacked: The Kraus operators as one (m, d, n) array.

    Raises:
        ShapeMismatchError: If the list is empty or an operator is not d x n.

    Examples:
        ```
        identity = KrausChannel(2, 2, [np.eye(2)])
        ```
    """
    dim_in: int
    dim_out: int
    kraus: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim_in < 1 or self.dim_out < 1:
            raise ShapeMismatchError(
                f"Channel dimensions must be positive, got n={self.dim_in}, d={self.dim_out}."
            )
        operators = tuple(_frozen(as_matrix(a, f'Kraus operator {i}')) for i, a in enumerate(self.kraus))
        if not operators:
            raise ShapeMismatchError("A channel needs at least one Kraus operator.")
        for i, operator in enumerate(operators):
            if operator.shape != (self.dim_out, self.dim_in):
                raise ShapeMismatchError(
                    f"Kraus operator {i} has shape {operator.shape}, expected ({self.dim_out}, {self.dim_in})."
                )
        object.__setattr__(self, 'kraus', operators)

    @property
    def rank(self):
        return len(self.kraus)

    @property
    def stacked(self):
        return np.stack(self.kraus)

    @classmethod
    def from_stack(cls, operators):
        """Build a channel from an (m, d, n) array of Kraus operators."""
        operators = np.asarray(operators, dtype=complex)
        if operators.ndim != 3:
            raise ShapeMismatchError(f"Expected an (m, d, n) Kraus stack, got shape {operators.shape}.")
        return cls(operators.shape[2], operators.shape[1], tuple(operators))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """
    The Choi matrix C = Σ_ij E(e_i e_j*) ⊗ e_i e_j*, output factor first.

    Attributes:
        dim_in (int): Input dimension n.
        dim_out (int): Output dimension d.
        matrix (np.ndarray): The nd x nd matrix, read-only.
    """
    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen(as_matrix(self.matrix, 'Choi matrix'))
        size = self.dim_in * self.dim_out
        if matrix.shape != (size, size):
            raise ShapeMismatchError(
                f"Choi matrix of a {self.dim_in}->{self.dim_out} map must be {size}x{size}, got {matrix.shape}."
            )
        object.__setattr__(self, 'matrix', matrix)


@dataclass(frozen=True)
class CPTPReport:
    """
    Result of `validate_cptp`.

    Attributes:
        tp_defect (float): ||Σ A_i* A_i - I||_∞.
        cp (bool): Complete positivity; always true for Kraus input.
        min_choi_eigenvalue (float): Smallest Choi eigenvalue, None when not computed.
        warnings (tuple): Messages for borderline Choi eigenvalues.
    """
    tp_defect: float
    cp: bool = True
    min_choi_eigenvalue: float = None
    warnings: tuple = ()

    def is_trace_preserving(self, tolerance=1e-8):
        return self.tp_defect <= tolerance


@dataclass(frozen=True)
class ChannelNorms:
    """
    Hilbert-Schmidt and induced norms of a channel and its complement.

    Attributes:
        dim_in (int): Input dimension n.
        dim_out (int): Output dimension d.
        hs_sq (float): ||E||_2².
        comp_hs_sq (float): ||Ẽ||_2².
        p2p (dict): Maps "1", "2" and "inf" to ||E||_{p→p}.
    """
    dim_in: int
    dim_out: int
    hs_sq: float
    comp_hs_sq: float
    p2p: dict = field(default_factory=dict)

    def __post_init__(self):
        values = [self.hs_sq, self.comp_hs_sq, *self.p2p.values()]
        if not all(np.isfinite(value) and value >= 0 for value in values):
            raise InvalidParameterError(f"Channel norms must be finite and non-negative, got {values}.")

    @property
    def sum(self):
        return self.hs_sq + self.comp_hs_sq


class Generator(models.TextChoices):
    """
    Names of the channel families that `build_channel` can construct.

    Attributes:
        DEPOLARIZING (str): `depolarizing`, X ↦ tr(X)I/d.
        ISOMETRIC (str): `isometric`, X ↦ VXV* for a given isometry.
        REPLACEMENT (str): `replacement`, X ↦ tr(X)ψψ*.
        ELAMBDA (str): `elambda`, λ·replacement + (1-λ)·depolarizing.
        RANDOM_ISOMETRIC (str): `random_isometric`, Σ p_j V_j X V_j*.
        COR10_T (str): `cor10_t`, t·V_11 X V_11* + (1-t)·depolarizing.
        RANDOM (str): `random`, seeded Stinespring-random channel.
        HAAR_ISOMETRIC (str): `haar_isometric`, X ↦ VXV* for a seeded Haar isometry.
        IDENTITY (str): `identity`, X ↦ X.
    """
    DEPOLARIZING = "depolarizing", _("Completely depolarizing")
    ISOMETRIC = "isometric", _("Isometric")
    REPLACEMENT = "replacement", _("Pure-state replacement")
    ELAMBDA = "elambda", _("Replacement/depolarizing mixture")
    RANDOM_ISOMETRIC = "random_isometric", _("Random isometric")
    COR10_T = "cor10_t", _("Isometric/depolarizing mixture")
    RANDOM = "random", _("Random CPTP")
    HAAR_ISOMETRIC = "haar_isometric", _("Haar-random isometric")
    IDENTITY = "identity", _("Identity")
