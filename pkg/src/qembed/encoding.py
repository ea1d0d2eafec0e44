"""Classical-to-quantum data encodings and their classical readout.

Four schemes: basis (bitstrings to basis states), superposition (uniform
combinations of listed basis states), angle (one rotated qubit per
feature), amplitude (values as normalized amplitudes).  A ReadoutMode
turns the encoded state back into a real feature vector for downstream
classifiers.  Written kets follow the usual convention: the leftmost bit
of |b_{n-1}...b_0> is the highest qubit index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .errors import (
    DuplicateString,
    EmptyInput,
    InvalidScheme,
    MissingQuantizer,
    NonAsciiCharacter,
    NonBinaryInput,
    NonFiniteInput,
    OutOfRangeFeature,
    LengthMismatch,
    QembedError,
    QubitCapExceeded,
    RowEncodeError,
    ZeroVector,
)
from .pipeline import FeatureMatrix
from .qsim import DEFAULT_MAX_QUBITS, StateVector

BASIS = "basis"
SUPERPOSITION = "superposition"
ANGLE = "angle"
AMPLITUDE = "amplitude"
KINDS = (BASIS, SUPERPOSITION, ANGLE, AMPLITUDE)

PROBABILITY_VECTOR = "probability_vector"
Z_EXPECTATIONS = "z_expectations"
AMPLITUDE_PARTS = "amplitude_parts"
READOUTS = (PROBABILITY_VECTOR, Z_EXPECTATIONS, AMPLITUDE_PARTS)

LINEAR_PI = "linear_pi"
RAW = "raw"

_AXIS_GATES = {"X": qsim.rx_gate, "Y": qsim.ry_gate, "Z": qsim.rz_gate}


def default_readout(kind: str) -> str:
    """z_expectations for angle (dimension-preserving), probabilities otherwise."""
    return Z_EXPECTATIONS if kind == ANGLE else PROBABILITY_VECTOR


@dataclass(frozen=True)
class EncodingScheme:
    """One encoding choice plus its readout.

    Angle parameters (axis, angle_map) exist only for kind="angle";
    bits_per_feature only for kind="basis".
    """

    kind: str
    readout: str
    axis: str | None = None
    angle_map: str | None = None
    bits_per_feature: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidScheme(f"unknown encoding kind {self.kind!r}")
        if self.readout not in READOUTS:
            raise InvalidScheme(f"unknown readout {self.readout!r}")
        if self.kind == ANGLE:
            if self.axis not in _AXIS_GATES:
                raise InvalidScheme(f"angle axis must be X, Y or Z, got {self.axis!r}")
            if self.angle_map not in (LINEAR_PI, RAW):
                raise InvalidScheme(f"unknown angle map {self.angle_map!r}")
        elif self.axis is not None or self.angle_map is not None:
            raise InvalidScheme("axis/angle_map are angle-encoding parameters")
        if self.kind == BASIS:
            if not isinstance(self.bits_per_feature, int) or self.bits_per_feature < 1:
                raise InvalidScheme("bits_per_feature must be a count >= 1")
        elif self.bits_per_feature is not None:
            raise InvalidScheme("bits_per_feature is a basis-encoding parameter")


def angle_scheme(axis: str = "X", angle_map: str = LINEAR_PI, readout: str | None = None):
    return EncodingScheme(ANGLE, readout or default_readout(ANGLE), axis, angle_map)


def basis_scheme(bits_per_feature: int = 4, readout: str | None = None):
    return EncodingScheme(
        BASIS, readout or default_readout(BASIS), bits_per_feature=bits_per_feature
    )


def superposition_scheme(readout: str | None = None):
    return EncodingScheme(SUPERPOSITION, readout or default_readout(SUPERPOSITION))


def amplitude_scheme(readout: str | None = None):
    return EncodingScheme(AMPLITUDE, readout or default_readout(AMPLITUDE))


# --- encoders -------------------------------------------------------------------

def basis_encode(bits, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Basis state |b_0 b_1 ... b_{n-1}> from a bit array, leftmost bit highest.

    [1,0,1] gives |101>, the single amplitude at index 5.  Product layout.
    """
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyInput("bit array must be 1-D and nonempty")
    if not np.all(np.isin(arr, (0, 1))):
        raise NonBinaryInput(f"entries must be 0 or 1, got {list(arr)!r}")
    n = arr.size
    if n > max_qubits:
        raise QubitCapExceeded(f"{n} bits exceeds cap {max_qubits}")
    factors = np.zeros((n, 2), dtype=complex)
    for i, bit in enumerate(arr.astype(int)):
        factors[n - 1 - i, bit] = 1.0
    return StateVector(n, factors, qsim.PRODUCT)


def basis_encode_text(text: str, max_qubits: int = DEFAULT_MAX_QUBITS) -> list[StateVector]:
    """One 7-qubit basis state per ASCII character ('h' is |1101000>, code 104)."""
    if not text:
        raise EmptyInput("text must be nonempty")
    states = []
    for ch in text:
        code = ord(ch)
        if code >= 128:
            raise NonAsciiCharacter(f"character {ch!r} is not 7-bit ASCII")
        bits = [(code >> (6 - k)) & 1 for k in range(7)]
        states.append(basis_encode(bits, max_qubits))
    return states


def superposition_encode(strings, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """Uniform superposition with amplitude 1/sqrt(k) on each listed bitstring.

    Strings must be equal-length and distinct; '100' style, leftmost bit
    highest.  A singleton set degenerates to a basis state.
    """
    strings = [str(s) for s in strings]
    if not strings:
        raise EmptyInput("need at least one bitstring")
    n = len(strings[0])
    if n == 0:
        raise EmptyInput("bitstrings must be nonempty")
    if any(len(s) != n for s in strings):
        raise LengthMismatch("all bitstrings must have equal length")
    if len(set(strings)) != len(strings):
        raise DuplicateString("bitstrings must be distinct")
    if any(c not in "01" for s in strings for c in s):
        raise NonBinaryInput("bitstrings may only contain 0 and 1")
    if n > max_qubits:
        raise QubitCapExceeded(f"{n} qubits exceeds cap {max_qubits}")
    if len(strings) == 1:
        return basis_encode([int(c) for c in strings[0]], max_qubits)
    amps = np.zeros(1 << n, dtype=complex)
    amps[[int(s, 2) for s in strings]] = 1.0 / math.sqrt(len(strings))
    return StateVector(n, amps, qsim.DENSE)


def angle_encode(
    x, scheme: EncodingScheme, max_qubits: int = DEFAULT_MAX_QUBITS
) -> StateVector:
    """One qubit per feature, qubit for feature i prepared as R_axis(theta_i)|0>.

    linear_pi maps a normalized feature to theta = pi*x (so 0 stays |0>
    and 1 lands on |1> up to phase); raw treats features as radians.
    """
    if scheme.kind != ANGLE:
        raise InvalidScheme(f"angle_encode needs an angle scheme, got {scheme.kind!r}")
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyInput("feature vector must be 1-D and nonempty")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("features must be finite")
    n = arr.size
    if n > max_qubits:
        raise QubitCapExceeded(f"{n} features exceeds cap {max_qubits}")
    if scheme.angle_map == LINEAR_PI:
        if np.any(arr < 0) or np.any(arr > 1):
            raise OutOfRangeFeature("linear_pi features must lie in [0, 1]")
        thetas = math.pi * arr
    else:
        thetas = arr
    gate = _AXIS_GATES[scheme.axis]
    factors = np.zeros((n, 2), dtype=complex)
    for i, theta in enumerate(thetas):
        factors[n - 1 - i] = gate(theta)[:, 0]
    return StateVector(n, factors, qsim.PRODUCT)


def amplitude_encode(x, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """L2-normalized values as amplitudes, zero-padded to the next power of two."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyInput("value vector must be 1-D and nonempty")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("values must be finite")
    norm = np.linalg.norm(arr)
    if norm == 0:
        raise ZeroVector("cannot normalize an all-zero vector")
    n = max(1, math.ceil(math.log2(arr.size)))
    if n > max_qubits:
        raise QubitCapExceeded(f"{n} qubits exceeds cap {max_qubits}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[: arr.size] = arr / norm
    return StateVector(n, amps, qsim.DENSE)


# --- quantizer for continuous basis encoding ----------------------------------------

class Quantizer:
    """Train-fitted min-max scaler that emits fixed-point bits per feature.

    Each feature is scaled to [0, 1] by the training minimum and range
    (out-of-range test values clip), then rounded to bits_per_feature
    fixed-point bits, concatenated in feature order, most significant bit
    first.  Also serves as the [0, 1] normalizer for angle encoding.
    """

    def __init__(self, bits_per_feature: int = 4):
        if bits_per_feature < 1:
            raise InvalidScheme("bits_per_feature must be a count >= 1")
        self.bits_per_feature = bits_per_feature
        self.lo: np.ndarray | None = None
        self.span: np.ndarray | None = None

    def fit(self, X) -> "Quantizer":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.size == 0:
            raise EmptyInput("fit needs a nonempty 2-D matrix")
        if not np.all(np.isfinite(X)):
            raise NonFiniteInput("fit matrix must be finite")
        self.lo = X.min(axis=0)
        self.span = X.max(axis=0) - self.lo
        return self

    def _require_fitted(self, width: int) -> None:
        if self.lo is None:
            raise MissingQuantizer("quantizer must be fitted before use")
        if width != self.lo.size:
            raise LengthMismatch(
                f"fitted on {self.lo.size} features, got {width}"
            )

    def normalize(self, X) -> np.ndarray:
        """Min-max scale rows to [0, 1] with clipping; constant features map to 0."""
        X = np.asarray(X, dtype=float)
        self._require_fitted(X.shape[-1])
        span = np.where(self.span == 0, 1.0, self.span)
        return np.clip((X - self.lo) / span, 0.0, 1.0)

    def bits_for_row(self, x) -> np.ndarray:
        """Fixed-point bit expansion of one row, feature by feature."""
        x01 = self.normalize(np.asarray(x, dtype=float))
        if x01.ndim != 1:
            raise LengthMismatch("bits_for_row takes a single row")
        levels = np.rint(x01 * ((1 << self.bits_per_feature) - 1)).astype(int)
        shifts = np.arange(self.bits_per_feature - 1, -1, -1)
        return ((levels[:, None] >> shifts) & 1).reshape(-1)


# --- readout and batch embedding -----------------------------------------------------

@dataclass(frozen=True)
class EmbeddedSample:
    """Encoded state plus the classical feature vector read out of it."""

    state: StateVector
    features: np.ndarray
    scheme: EncodingScheme


def readout_features(state: StateVector, mode: str) -> np.ndarray:
    """Classical vector for one state: probabilities, per-qubit Z, or re/im parts."""
    if mode == PROBABILITY_VECTOR:
        return qsim.probabilities(state)
    if mode == Z_EXPECTATIONS:
        n = state.n_qubits
        return np.array([qsim.expectation_z(state, n - 1 - i) for i in range(n)])
    if mode == AMPLITUDE_PARTS:
        amps = state.amps
        return np.concatenate([amps.real, amps.imag])
    raise InvalidScheme(f"unknown readout {mode!r}")


def embed_sample(
    x,
    scheme: EncodingScheme,
    quantizer: Quantizer | None = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> EmbeddedSample:
    """Encode one feature vector under a scheme and read it back out.

    Basis encoding takes raw 0/1 features directly; continuous features
    need a fitted Quantizer.  Superposition encoding has no per-sample
    form (it consumes an explicit bitstring set), so it is rejected here.
    """
    if scheme.kind == ANGLE:
        state = angle_encode(x, scheme, max_qubits)
    elif scheme.kind == AMPLITUDE:
        state = amplitude_encode(x, max_qubits)
    elif scheme.kind == BASIS:
        if quantizer is not None:
            bits = quantizer.bits_for_row(x)
        else:
            arr = np.asarray(x, dtype=float)
            if arr.size and not np.all(np.isin(arr, (0.0, 1.0))):
                raise MissingQuantizer(
                    "continuous features need a fitted quantizer for basis encoding"
                )
            bits = arr.astype(int)
        state = basis_encode(bits, max_qubits)
    else:
        raise InvalidScheme(
            "superposition encoding takes an explicit bitstring set; "
            "use superposition_encode directly"
        )
    return EmbeddedSample(state, readout_features(state, scheme.readout), scheme)


def _feature_names(mode: str, width: int) -> tuple[str, ...]:
    if mode == PROBABILITY_VECTOR:
        return tuple(f"p{i}" for i in range(width))
    if mode == Z_EXPECTATIONS:
        return tuple(f"z{i}" for i in range(width))
    half = width // 2
    return tuple(f"re{i}" for i in range(half)) + tuple(f"im{i}" for i in range(half))


def embed_matrix(
    X: FeatureMatrix,
    scheme: EncodingScheme,
    quantizer: Quantizer | None = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> FeatureMatrix:
    """Row-wise embed_sample over a matrix; labels pass through unchanged.

    The first failing row aborts the batch with its row index attached.
    """
    rows = []
    for i in range(X.n_rows):
        try:
            rows.append(embed_sample(X.data[i], scheme, quantizer, max_qubits).features)
        except QembedError as exc:
            raise RowEncodeError(i, exc) from exc
    data = np.vstack(rows) if rows else np.zeros((0, 0))
    return FeatureMatrix(data, _feature_names(scheme.readout, data.shape[1]), X.labels)
