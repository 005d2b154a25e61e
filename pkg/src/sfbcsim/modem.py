"""Bit generation, square M-QAM mapping/demapping, and bit-error counting.

The modulation alphabet is Gray-coded square QAM with unit average symbol
energy, the convention used by the LTE downlink: even-indexed bits steer the
in-phase axis, odd-indexed bits the quadrature axis, and each axis uses a
reflected-Gray amplitude map so that lattice neighbours differ in exactly
one bit.
"""

from __future__ import annotations

import numpy as np

QAM_ORDERS = (4, 16, 64)

# amplitude scale so that the mean symbol energy of {+-1, +-3, ...}^2 is 1:
# mean energy of an unscaled square M-QAM lattice is 2(M-1)/3
def _energy_scale(order: int) -> float:
    return float(np.sqrt(2.0 * (order - 1) / 3.0))


def _gray_amplitude(bits: tuple[int, ...]) -> int:
    """Amplitude of one axis for the given axis bits (reflected Gray map).

    One bit maps to {+1,-1}; each further bit refines the magnitude, e.g.
    (b0, b2) -> (1-2*b0) * (2 - (1-2*b2)) for 16-QAM.
    """
    if len(bits) == 1:
        return 1 - 2 * bits[0]
    return (1 - 2 * bits[0]) * (2 ** (len(bits) - 1) - _gray_amplitude(bits[1:]))


class QamConstellation:
    """Gray-coded square M-QAM alphabet, M in {4, 16, 64}.

    ``points[label]`` is the complex point for the bit label read as a
    big-endian integer, scaled to unit average energy.
    """

    def __init__(self, order: int):
        if order not in QAM_ORDERS:
            raise ValueError(f"unsupported QAM order {order}, expected one of {QAM_ORDERS}")
        self.order = order
        self.bits_per_symbol = order.bit_length() - 1
        m_axis = self.bits_per_symbol // 2
        scale = _energy_scale(order)
        points = np.empty(order, dtype=np.complex128)
        for label in range(order):
            bits = [(label >> (self.bits_per_symbol - 1 - i)) & 1
                    for i in range(self.bits_per_symbol)]
            i_amp = _gray_amplitude(tuple(bits[0::2]))
            q_amp = _gray_amplitude(tuple(bits[1::2]))
            points[label] = (i_amp + 1j * q_amp) / scale
        self.points = points
        # per-axis levels indexed by the axis bit label, shared by I and Q
        self._axis_levels = np.array(
            [_gray_amplitude(tuple((g >> (m_axis - 1 - i)) & 1 for i in range(m_axis)))
             for g in range(2 ** m_axis)], dtype=np.float64) / scale
        self._axis_bits = m_axis

    def __repr__(self) -> str:
        return f"QamConstellation(order={self.order})"


def generate_bits(count: int, seed: int) -> np.ndarray:
    """Return `count` i.i.d. uniform bits, reproducible from `seed`."""
    if count <= 0:
        raise ValueError(f"bit count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=count, dtype=np.uint8)


def modulate(bits: np.ndarray, constellation: QamConstellation) -> np.ndarray:
    """Map a bit stream to complex symbols, one per bits_per_symbol bits."""
    bits = np.asarray(bits)
    k = constellation.bits_per_symbol
    if bits.size % k != 0:
        raise ValueError(
            f"bit count {bits.size} is not divisible by bits_per_symbol {k}")
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = bits.reshape(-1, k).astype(np.int64) @ weights
    return constellation.points[labels]


def _axis_labels(values: np.ndarray, levels: np.ndarray) -> np.ndarray:
    # nearest level per axis; ties resolve to the lowest axis bit label
    # because argmin returns the first minimum and levels are in label order
    d = np.abs(values[:, None] - levels[None, :])
    return np.argmin(d, axis=1)


def demodulate(symbols: np.ndarray, constellation: QamConstellation) -> np.ndarray:
    """Hard-decision demap: nearest constellation point, ties to lowest label."""
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    m = constellation._axis_bits
    levels = constellation._axis_levels
    i_lab = _axis_labels(symbols.real, levels)
    q_lab = _axis_labels(symbols.imag, levels)
    k = constellation.bits_per_symbol
    bits = np.empty((symbols.size, k), dtype=np.uint8)
    for b in range(m):
        shift = m - 1 - b
        bits[:, 2 * b] = (i_lab >> shift) & 1
        bits[:, 2 * b + 1] = (q_lab >> shift) & 1
    return bits.ravel()


def bit_errors(sent: np.ndarray, received: np.ndarray) -> tuple[int, float]:
    """Hamming distance and bit error ratio of two equal-length bit streams."""
    sent = np.asarray(sent)
    received = np.asarray(received)
    if sent.size != received.size:
        raise ValueError(
            f"length mismatch: sent {sent.size} bits, received {received.size}")
    if sent.size == 0:
        raise ValueError("bit streams are empty")
    errors = int(np.count_nonzero(sent != received))
    return errors, errors / sent.size
