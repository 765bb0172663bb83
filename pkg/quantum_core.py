"""
quantum_core.py - Coherent states, truncated Fock vectors and entropies

This module holds the state representations every attack analysis builds on:
complex amplitudes, weighted mixtures of coherent states, truncated Fock-space
vectors and density matrices, and the two-mode squeezed vacuum (TMSV) used by
the entangling-cloner attack. All functions are pure and return fresh values.

Amplitudes are in shot-noise units: the coherent state |a> has the overlap
<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

# Eigenvalues below this are treated as numerical zeros
EIGENVALUE_CUTOFF = 1e-14
NEGATIVE_EIGENVALUE_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-8
DEFAULT_TRUNCATION_TOLERANCE = 1e-10
TMSV_TAIL_TOLERANCE = 1e-12


class InvalidStateError(ValueError):
    """Raised when a state violates its physical invariants."""


class EntropyError(RuntimeError):
    """Raised when an eigen-decomposition fails to converge."""


class TruncationError(ValueError):
    """Raised when a Fock truncation loses more norm than allowed."""

    def __init__(self, message, deficit, suggested_dim):
        super().__init__(f"{message} (deficit {deficit:.3e}, try dim >= {suggested_dim})")
        self.deficit = deficit
        self.suggested_dim = suggested_dim


@dataclass(frozen=True)
class ComplexAmplitude:
    """A point of phase space, in shot-noise units."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise InvalidStateError(f"Amplitude must be finite, got ({self.re}, {self.im})")

    @classmethod
    def from_complex(cls, value):
        value = complex(value)
        return cls(value.real, value.imag)

    def __complex__(self):
        return complex(self.re, self.im)

    def __abs__(self):
        return math.hypot(self.re, self.im)


@dataclass(frozen=True)
class WeightedCoherentMixture:
    """
    The mixed state sum_k w_k |a_k><a_k|.

    Attributes:
        amplitudes: Coherent amplitudes a_k (complex, shot-noise units)
        weights: Probabilities w_k summing to one
    """

    amplitudes: tuple
    weights: tuple

    def __post_init__(self):
        amplitudes = tuple(complex(a) for a in self.amplitudes)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "weights", weights)

        if len(amplitudes) == 0:
            raise InvalidStateError("A mixture needs at least one component")
        if len(amplitudes) != len(weights):
            raise InvalidStateError(
                f"Got {len(amplitudes)} amplitudes but {len(weights)} weights"
            )
        if any(not np.isfinite(a) for a in amplitudes):
            raise InvalidStateError("Mixture amplitudes must be finite")
        if any(w < 0 for w in weights):
            raise InvalidStateError("Mixture weights must be nonnegative")
        if abs(sum(weights) - 1.0) > 1e-12:
            raise InvalidStateError(f"Mixture weights sum to {sum(weights)!r}, not 1")

    @classmethod
    def uniform(cls, amplitudes):
        amplitudes = tuple(amplitudes)
        return cls(amplitudes, (1.0 / len(amplitudes),) * len(amplitudes))

    @classmethod
    def from_unnormalized(cls, amplitudes, weights):
        """Build a mixture from nonnegative weights that still need normalizing."""
        weights = np.asarray(weights, dtype=float)
        total = weights.sum()
        if total <= 0:
            raise InvalidStateError("Mixture weights sum to zero")
        normalized = weights / total
        # Absorb the rounding residue into the largest weight
        normalized[np.argmax(normalized)] += 1.0 - normalized.sum()
        return cls(tuple(amplitudes), tuple(normalized))

    def rotated(self, phase):
        """Return the mixture with every amplitude multiplied by exp(i*phase)."""
        factor = complex(math.cos(phase), math.sin(phase))
        return WeightedCoherentMixture(tuple(a * factor for a in self.amplitudes), self.weights)


@dataclass(frozen=True, eq=False)
class FockVector:
    """
    A state vector in the number basis, truncated at `dim` levels per mode.

    For two-mode states `shape` is (dim_1, dim_2) and the coefficients are
    flattened in row-major order (first mode slowest).
    """

    coefficients: np.ndarray
    shape: tuple = None

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=complex).ravel()
        object.__setattr__(self, "coefficients", coefficients)
        if self.shape is None:
            object.__setattr__(self, "shape", (coefficients.size,))
        if int(np.prod(self.shape)) != coefficients.size:
            raise InvalidStateError(f"Shape {self.shape} does not match {coefficients.size} coefficients")

    @property
    def dim(self):
        return self.coefficients.size

    @property
    def squared_norm(self):
        return float(np.vdot(self.coefficients, self.coefficients).real)

    @property
    def truncation_deficit(self):
        """1 - ||v||^2 for a vector that should be normalized."""
        return 1.0 - self.squared_norm

    def normalized(self):
        norm = math.sqrt(self.squared_norm)
        if norm == 0:
            raise InvalidStateError("Cannot normalize the zero vector")
        return FockVector(self.coefficients / norm, self.shape)

    def as_matrix(self):
        """Return the coefficients reshaped to `shape`."""
        return self.coefficients.reshape(self.shape)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    A density operator in a truncated number basis.

    Attributes:
        entries: dim x dim complex matrix
        declared_trace: The trace the matrix is expected to carry (1 once normalized)
    """

    entries: np.ndarray
    declared_trace: float = 1.0

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidStateError(f"Density matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidStateError("Density matrix has non-finite entries")
        asymmetry = np.max(np.abs(entries - entries.conj().T)) if entries.size else 0.0
        if asymmetry > HERMITIAN_TOLERANCE:
            raise InvalidStateError(f"Density matrix is not Hermitian (max deviation {asymmetry:.2e})")
        trace = float(np.trace(entries).real)
        if abs(trace - self.declared_trace) > TRACE_TOLERANCE:
            raise InvalidStateError(
                f"Trace {trace:.10f} differs from declared trace {self.declared_trace}"
            )

    @property
    def dim(self):
        return self.entries.shape[0]

    @property
    def trace(self):
        return float(np.trace(self.entries).real)

    @classmethod
    def from_weighted_vectors(cls, vectors, weights, normalize=True):
        """
        Assemble sum_k w_k |v_k><v_k| from Fock vectors.

        Args:
            vectors: Sequence of FockVector (all the same dimension)
            weights: Nonnegative weights
            normalize: Divide by the trace so the result has trace one

        Returns:
            DensityMatrix
        """
        matrix = np.array([v.coefficients for v in vectors])
        weights = np.asarray(weights, dtype=float)
        entries = (matrix.T * weights) @ matrix.conj()
        entries = 0.5 * (entries + entries.conj().T)
        if normalize:
            entries = entries / np.trace(entries).real
            return cls(entries)
        return cls(entries, declared_trace=float(np.trace(entries).real))

    def normalized(self):
        return DensityMatrix(self.entries / self.trace)


@dataclass(frozen=True)
class TmsvParams:
    """
    Two-mode squeezed vacuum sum_m G_m |m>|m>, with G_m = tanh(r)^m / cosh(r).

    Attributes:
        n_bar: Mean thermal photon number per mode
        r: Squeezing parameter, n_bar = sinh(r)^2
    """

    n_bar: float
    r: float

    def __post_init__(self):
        if self.n_bar < 0 or self.r < 0:
            raise InvalidStateError(f"TMSV needs n_bar >= 0 and r >= 0, got ({self.n_bar}, {self.r})")
        if abs(math.sinh(self.r) ** 2 - self.n_bar) > 1e-10:
            raise InvalidStateError(f"n_bar={self.n_bar} is not sinh(r)^2 for r={self.r}")

    @classmethod
    def from_n_bar(cls, n_bar):
        return cls(float(n_bar), math.asinh(math.sqrt(n_bar)))

    @property
    def ratio(self):
        """tanh(r)^2 = n_bar / (1 + n_bar), the geometric ratio of G_m^2."""
        return self.n_bar / (1.0 + self.n_bar)

    def cutoff(self, tolerance=TMSV_TAIL_TOLERANCE):
        """Smallest m_max with sum_{m >= m_max} G_m^2 < tolerance."""
        if self.n_bar == 0:
            return 1
        # The tail from m is ratio^m
        return max(1, int(math.ceil(math.log(tolerance) / math.log(self.ratio))))

    def coefficients(self, count):
        """G_0, ..., G_{count-1}."""
        m = np.arange(count)
        return np.tanh(self.r) ** m / math.cosh(self.r)


def coherent_overlap(a, b):
    """
    Inner product <a|b> of two coherent states.

    Args:
        a: Bra amplitude (ComplexAmplitude or complex)
        b: Ket amplitude

    Returns:
        complex: exp(-|a|^2/2 - |b|^2/2 + conj(a) b)
    """
    a = complex(a)
    b = complex(b)
    return complex(np.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b))


def gram_matrix(amplitudes, weights):
    """Weighted Gram matrix sqrt(w_j w_k) <a_j|a_k>; it shares its spectrum with the mixture."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    weights = np.asarray(weights, dtype=float)
    norms = np.abs(amplitudes) ** 2
    exponent = -0.5 * norms[:, None] - 0.5 * norms[None, :] + amplitudes.conj()[:, None] * amplitudes[None, :]
    scale = np.sqrt(np.outer(weights, weights))
    gram = scale * np.exp(exponent)
    return 0.5 * (gram + gram.conj().T)


def entropy_from_eigenvalues(eigenvalues):
    """
    Shannon entropy in bits of a spectrum, after cleaning floating-point noise.

    Small negative eigenvalues in [-1e-10, 0) are clamped to zero and values
    below 1e-14 are dropped. More negative values mean the input was not a state.
    """
    eigenvalues = np.real_if_close(np.asarray(eigenvalues)).astype(float)
    if eigenvalues.size and eigenvalues.min() < -NEGATIVE_EIGENVALUE_TOLERANCE:
        raise InvalidStateError(f"Negative eigenvalue {eigenvalues.min():.3e}")
    kept = eigenvalues[eigenvalues > EIGENVALUE_CUTOFF]
    return max(0.0, float(-np.sum(kept * np.log2(kept))))


def _eigvalsh(matrix):
    try:
        return np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as e:
        raise EntropyError(f"Eigensolver did not converge: {e}") from e


def mixture_entropy(mix):
    """
    Von Neumann entropy in bits of a weighted coherent-state mixture.

    Uses the weighted Gram matrix, which is exact and needs no Fock truncation.

    Args:
        mix (WeightedCoherentMixture): The mixture

    Returns:
        float: Entropy in [0, log2(number of components)]
    """
    gram = gram_matrix(mix.amplitudes, mix.weights)
    entropy = entropy_from_eigenvalues(_eigvalsh(gram))
    return min(entropy, math.log2(len(mix.amplitudes)))


def von_neumann_entropy(rho):
    """
    Von Neumann entropy in bits of a trace-one density matrix.

    Args:
        rho (DensityMatrix): The state; its constructor has already checked hermiticity

    Returns:
        float: -sum lambda log2 lambda over the retained eigenvalues
    """
    if abs(rho.trace - 1.0) > TRACE_TOLERANCE:
        raise InvalidStateError(f"Entropy needs a normalized state, trace is {rho.trace:.10f}")
    return entropy_from_eigenvalues(_eigvalsh(rho.entries))


def fock_dimension(mu):
    """Truncation rule ceil(mu^2 + 10 mu + 20) for a displacement of magnitude mu."""
    return int(math.ceil(mu * mu + 10.0 * mu + 20.0))


def coherent_fock_vector(a, dim, tolerance=DEFAULT_TRUNCATION_TOLERANCE):
    """
    Number-basis coefficients of |a> truncated at `dim` levels.

    Args:
        a: Amplitude
        dim (int): Number of retained levels
        tolerance (float): Largest allowed norm deficit; None skips the check

    Returns:
        FockVector: Coefficients exp(-|a|^2/2) a^n / sqrt(n!), n < dim
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    a = complex(a)
    coefficients = np.empty(dim, dtype=complex)
    coefficients[0] = math.exp(-0.5 * abs(a) ** 2)
    for n in range(1, dim):
        coefficients[n] = coefficients[n - 1] * a / math.sqrt(n)

    vector = FockVector(coefficients)
    deficit = vector.truncation_deficit
    if tolerance is not None and deficit > tolerance:
        raise TruncationError(
            f"Coherent state |{a}> does not fit in {dim} levels", deficit, fock_dimension(abs(a))
        )
    return vector


def displacement_matrix(beta, rows, cols=None):
    """
    Matrix elements <m|D(beta)|n> for m < rows, n < cols.

    Built column by column from D|n> = (a^dag - conj(beta)) D|n-1> / sqrt(n),
    starting at the coherent vector D|0> = |beta>. The recurrence only moves
    amplitude upward, so every retained entry is exact.
    """
    cols = rows if cols is None else cols
    beta = complex(beta)
    matrix = np.zeros((rows, cols), dtype=complex)
    matrix[:, 0] = coherent_fock_vector(beta, rows, tolerance=None).coefficients
    raising = np.sqrt(np.arange(1, rows))
    for n in range(1, cols):
        previous = matrix[:, n - 1]
        column = -beta.conjugate() * previous
        column[1:] += raising * previous[:-1]
        matrix[:, n] = column / math.sqrt(n)
    return matrix


def thermal_density_matrix(n_bar, dim):
    """Diagonal thermal state n^k / (1 + n)^(k+1), renormalized after truncation."""
    k = np.arange(dim)
    populations = (n_bar ** k) / (1.0 + n_bar) ** (k + 1) if n_bar > 0 else (k == 0).astype(float)
    return DensityMatrix(np.diag(populations / populations.sum()))


def cloner_levels(T, alpha, tmsv):
    """
    Default (B1', B2) truncation for the cloner output.

    B2 only holds the TMSV photons below the tail cutoff; B1' must also fit the
    displacement sqrt(1-T) alpha on top of those photons.
    """
    m_count = tmsv.cutoff()
    mu = math.sqrt(max(0.0, 1.0 - T)) * abs(alpha)
    return int(math.ceil(mu * mu + 6.0 * mu + 10.0)) + m_count, m_count


def cloner_projection_amplitudes(alpha_k, T, tmsv, outcomes, dim):
    """
    <c|Psi> of the entangling-cloner output for many outcomes c at once.

    After the beamsplitter the three-mode state is
    D_B1'(sqrt(1-T) a) D_C(sqrt(T) a) sum_m G_m/sqrt(m!) (sqrt(T) b1'^dag - sqrt(1-T) c^dag)^m |0>|m>|0>.
    Projecting mode C on the coherent state |c> leaves, up to a global phase,
    exp(-|d|^2/2) D_B1'(beta) sum_{m, j} G_m sqrt(m!) / (j! sqrt((m-j)!)) T^((m-j)/2) x^j |m-j>|m>
    with d = c - sqrt(T) a, x = -sqrt(1-T) conj(d) and beta = sqrt(1-T) a.

    Args:
        alpha_k: Alice's sent amplitude
        T (float): Channel transmission, 0 < T <= 1
        tmsv (TmsvParams): Bob's entangled resource
        outcomes: Array of heterodyne outcomes c
        dim (int): Levels kept per mode; B2 keeps min(dim, tmsv.cutoff())

    Returns:
        numpy.ndarray: Shape (len(outcomes), dim, m_count), indices (outcome, B1', B2)
    """
    alpha_k = complex(alpha_k)
    outcomes = np.atleast_1d(np.asarray(outcomes, dtype=complex))
    m_count = min(dim, tmsv.cutoff())

    delta = outcomes - math.sqrt(T) * alpha_k
    x = -math.sqrt(1.0 - T) * delta.conj()

    n1 = np.arange(dim)[:, None]
    m = np.arange(m_count)[None, :]
    j = m - n1
    valid = j >= 0
    j_safe = np.where(valid, j, 0)

    g = tmsv.coefficients(m_count)[None, :]
    log_magnitude = 0.5 * gammaln(m + 1) - gammaln(j_safe + 1) - 0.5 * gammaln(n1 + 1) + 0.5 * n1 * math.log(T)
    coefficient = np.where(valid, g * np.exp(log_magnitude), 0.0)

    powers = x[:, None] ** np.arange(m_count)[None, :]
    base = coefficient[None, :, :] * powers[:, j_safe]

    displacement = displacement_matrix(math.sqrt(1.0 - T) * alpha_k, dim, dim)
    projected = np.einsum("ab,nbm->nam", displacement, base)
    return projected * np.exp(-0.5 * np.abs(delta) ** 2)[:, None, None]


def cloner_outcome_density(alpha_k, T, n_bar, outcomes):
    """Exact density (1/pi) exp(-|c - sqrt(T) a|^2 / V) / V with V = 1 + (1-T) n_bar."""
    variance = 1.0 + (1.0 - T) * n_bar
    delta = np.asarray(outcomes, dtype=complex) - math.sqrt(T) * complex(alpha_k)
    return np.exp(-np.abs(delta) ** 2 / variance) / (math.pi * variance)


def cloner_conditional_state(alpha_k, T, tmsv, c, dim, tolerance=1e-6):
    """
    Bob's two-mode state <c|Psi> after Charlie's heterodyne outcome c.

    Args:
        alpha_k: Alice's sent amplitude
        T (float): Channel transmission, 0 < T <= 1
        tmsv (TmsvParams): Bob's entangled resource
        c: Heterodyne outcome
        dim (int): Levels kept per mode
        tolerance (float): Largest relative norm deficit against the exact density

    Returns:
        tuple: (FockVector over (B1', B2) left unnormalized, outcome density)
    """
    if not 0 < T <= 1:
        raise ValueError(f"T must be in (0, 1], got {T}")
    amplitudes = cloner_projection_amplitudes(alpha_k, T, tmsv, [complex(c)], dim)[0]
    vector = FockVector(amplitudes, amplitudes.shape)
    weight = vector.squared_norm / math.pi

    exact = float(cloner_outcome_density(alpha_k, T, tmsv.n_bar, [complex(c)])[0])
    if exact > 0:
        deficit = 1.0 - weight / exact
        if deficit > tolerance:
            suggested = max(dim + 1, cloner_levels(T, abs(complex(alpha_k)), tmsv)[0])
            raise TruncationError(f"Cloner state at c={complex(c)} needs more than {dim} levels", deficit, suggested)
    return vector, weight


if __name__ == "__main__":
    # Example usage
    qpsk = WeightedCoherentMixture.uniform([1.0, 1j, -1.0, -1j])
    print(f"S(QPSK, alpha=1) = {mixture_entropy(qpsk):.6f} bits")
    print(f"<0|1> = {coherent_overlap(0, 1):.6f}")
    print(f"S(thermal n=1) = {von_neumann_entropy(thermal_density_matrix(1.0, 60)):.6f} bits")
