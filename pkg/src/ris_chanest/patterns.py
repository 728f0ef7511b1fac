"""RIS activation patterns used during pilot transmission.

A pattern is the tau_p x (N+1) matrix whose row t holds the constant 1
(direct path) followed by the N reflection coefficients applied during
pilot symbol t. Reflection amplitudes are physically constrained to
[0, 1], and tau_p >= N+1 is required for the composite channel to be
identifiable.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ActivationPattern",
    "PatternReport",
    "onoff_pattern",
    "dft_pattern",
    "validate_pattern",
]

AMPLITUDE_TOL = 1e-12


@dataclass(frozen=True)
class ActivationPattern:
    matrix: np.ndarray  # (tau_p, n+1)
    kind: str  # "onoff" | "dft" | "custom"

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        if self.kind not in ("onoff", "dft", "custom"):
            raise ValueError(f"unknown pattern kind {self.kind!r}")
        if mat.ndim != 2:
            raise ValueError("pattern matrix must be 2-D")
        tau_p, cols = mat.shape
        if cols < 1 or tau_p < cols:
            raise ValueError(
                f"need tau_p >= N+1 for estimability, got tau_p={tau_p}, N+1={cols}"
            )
        if not np.allclose(mat[:, 0], 1.0, rtol=0.0, atol=AMPLITUDE_TOL):
            raise ValueError("first pattern column must be all ones")
        if np.max(np.abs(mat)) > 1.0 + AMPLITUDE_TOL:
            raise ValueError("reflection amplitudes must not exceed 1")

    @property
    def tau_p(self):
        return self.matrix.shape[0]

    @property
    def n(self):
        return self.matrix.shape[1] - 1


@dataclass(frozen=True)
class PatternReport:
    """Diagnostics for a pattern: feasibility and optimality of its Gram matrix."""

    first_column_ones: bool
    max_modulus: float
    amplitude_ok: bool
    gram_trace: float
    trace_bound: float
    attains_trace_bound: bool
    gram_is_diagonal: bool


def onoff_pattern(n):
    """Square pattern that keeps element t-1 on during pilot t and the rest off.

    Unit lower-triangular, hence always invertible, but its Gram matrix is
    not diagonal so the resulting LS estimator does not meet the
    estimation-error lower bound.
    """
    if n < 1:
        raise ValueError(f"need at least one RIS element, got {n}")
    mat = np.zeros((n + 1, n + 1), dtype=complex)
    mat[:, 0] = 1.0
    mat[1:, 1:] = np.eye(n)
    return ActivationPattern(matrix=mat, kind="onoff")


def dft_pattern(tau_p, n):
    """First N+1 columns of the tau_p-point DFT matrix, entries of unit modulus.

    The unnormalized convention keeps every reflection amplitude at 1 and
    makes the Gram matrix exactly tau_p * I, which is what gives the LS
    estimator white errors with variance inversely proportional to tau_p.
    Angles are reduced modulo tau_p before the trig call so column
    orthogonality holds to near machine precision even for large tau_p.
    n=0 degenerates to the all-ones column (no RIS, direct path only).
    """
    if n < 0:
        raise ValueError(f"element count must be nonnegative, got {n}")
    if tau_p < n + 1:
        raise ValueError(f"need tau_p >= N+1, got tau_p={tau_p}, N={n}")
    k = np.arange(tau_p, dtype=np.int64)[:, None]
    col = np.arange(n + 1, dtype=np.int64)[None, :]
    residue = (k * col) % tau_p
    mat = np.exp(-2j * np.pi * residue / tau_p)
    return ActivationPattern(matrix=mat, kind="dft")


def validate_pattern(p):
    """Diagnostic report; never raises.

    Checks the constant first column, the amplitude constraint, the Gram
    trace against its upper bound tau_p*(N+1), and whether the Gram matrix
    is diagonal (the condition for the LS error covariance to be white).
    """
    mat = np.asarray(p.matrix)
    tau_p, cols = mat.shape
    gram = mat.conj().T @ mat
    trace = float(np.real(np.trace(gram)))
    bound = float(tau_p * cols)
    off = gram - np.diag(np.diag(gram))
    max_mod = float(np.max(np.abs(mat)))
    return PatternReport(
        first_column_ones=bool(np.allclose(mat[:, 0], 1.0, rtol=0.0, atol=AMPLITUDE_TOL)),
        max_modulus=max_mod,
        amplitude_ok=max_mod <= 1.0 + AMPLITUDE_TOL,
        gram_trace=trace,
        trace_bound=bound,
        attains_trace_bound=abs(trace - bound) <= 1e-9 * bound,
        gram_is_diagonal=bool(np.max(np.abs(off)) <= 1e-9 * max(trace, 1.0)),
    )
