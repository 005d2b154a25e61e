"""Cell-specific reference signals and pilot-based channel estimation.

Pilot layout follows the LTE normal-CP convention for two antenna ports:
pilots sit in OFDM symbols 0 and 4 of each slot (0, 4, 7, 11 within a
subframe) with a frequency stride of 6.  Port 0 alternates subcarrier
offsets 0/3 across those symbols, port 1 uses the swapped offsets, and
every pilot resource element of one port is transmitted as a null on the
other port so the four MIMO links can be separated.

Pilot values are unit-amplitude QPSK (phases 45, 135, -45, -135 degrees)
drawn from a seeded generator that transmitter and receiver share.
Estimation is least-squares at the pilots followed by linear interpolation,
first across frequency then across time, with constant extrapolation
beyond the outermost pilots.
"""

from __future__ import annotations

import numpy as np

from .grid import GridDimensions

PILOT_SYMBOLS = (0, 4, 7, 11)
_PORT_OFFSETS = {0: (0, 3, 0, 3), 1: (3, 0, 3, 0)}
PILOT_STRIDE = 6


class EstimationError(RuntimeError):
    """Channel estimation is impossible (too few pilots in a dimension)."""


class PilotPattern:
    """Pilot/null positions of both antenna ports for one subframe."""

    def __init__(self, n_subcarriers: int, n_symbols: int = 14):
        if n_subcarriers < PILOT_STRIDE + max(max(v) for v in _PORT_OFFSETS.values()):
            raise EstimationError(
                f"{n_subcarriers} subcarriers leave fewer than 2 pilots per symbol")
        self.n_subcarriers = n_subcarriers
        self.n_symbols = n_symbols
        self._subcarriers = {
            port: [np.arange(off, n_subcarriers, PILOT_STRIDE)
                   for off in _PORT_OFFSETS[port]]
            for port in (0, 1)
        }

    def pilot_positions(self, port: int) -> list[tuple[int, np.ndarray]]:
        """(symbol index, pilot subcarrier indices) per pilot-bearing symbol."""
        return list(zip(PILOT_SYMBOLS, self._subcarriers[port]))

    def reserved_subcarriers(self, symbol: int) -> np.ndarray:
        """Subcarriers unavailable for data at `symbol` (pilots of either port)."""
        if symbol not in PILOT_SYMBOLS:
            return np.array([], dtype=np.intp)
        i = PILOT_SYMBOLS.index(symbol)
        both = np.concatenate([self._subcarriers[0][i], self._subcarriers[1][i]])
        return np.sort(both)

    def data_subcarriers(self, symbol: int) -> np.ndarray:
        mask = np.ones(self.n_subcarriers, dtype=bool)
        mask[self.reserved_subcarriers(symbol)] = False
        return np.nonzero(mask)[0]

    def n_pilots(self, port: int) -> int:
        return sum(len(k) for _, k in self.pilot_positions(port))


def pilot_values(pattern: PilotPattern, port: int, seed: int) -> list[np.ndarray]:
    """Deterministic unit-amplitude QPSK pilot values per pilot symbol.

    Phases are 45, 135, -135 or -45 degrees.  The same (pattern, port, seed)
    always yields the same sequence, which is how the receiver regenerates
    the transmitted pilots.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(port,)))
    out = []
    for _, subcarriers in pattern.pilot_positions(port):
        quadrant = rng.integers(0, 4, size=len(subcarriers))
        out.append(np.exp(1j * (np.pi / 4 + quadrant * np.pi / 2)))
    return out


def insert_pilots(grids: np.ndarray, pattern: PilotPattern, seed: int) -> np.ndarray:
    """Write pilot values and the counterpart nulls into the port grids.

    `grids` has shape (2, n_subcarriers, n_symbols); pilot and null resource
    elements must still be zero (the mapper reserves them before data
    placement), otherwise the grid assembly is inconsistent.
    """
    grids = np.asarray(grids)
    for port in (0, 1):
        other = 1 - port
        values = pilot_values(pattern, port, seed)
        for (symbol, subcarriers), vals in zip(pattern.pilot_positions(port), values):
            occupied = (grids[port, subcarriers, symbol] != 0)
            occupied |= (grids[other, subcarriers, symbol] != 0)
            if np.any(occupied):
                raise RuntimeError(
                    f"pilot positions at symbol {symbol} already carry data; "
                    "reserve pilot REs before mapping")
            grids[port, subcarriers, symbol] = vals
            grids[other, subcarriers, symbol] = 0.0
    return grids


def normalize_pilots(received_pilots: np.ndarray, known_pilots: np.ndarray) -> np.ndarray:
    """Least-squares channel samples at the pilots: received / known."""
    known_pilots = np.asarray(known_pilots)
    if np.any(known_pilots == 0):
        raise ValueError("known pilot values must be nonzero")
    return np.asarray(received_pilots) / known_pilots


def _linear_weights(knots: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Weight matrix of linear interpolation with constant edge extrapolation."""
    knots = np.asarray(knots, dtype=np.float64)
    if knots.size < 2:
        raise EstimationError(
            f"need at least 2 pilot positions per dimension, got {knots.size}")
    targets = np.asarray(targets, dtype=np.float64)
    w = np.zeros((targets.size, knots.size))
    seg = np.clip(np.searchsorted(knots, targets, side="right") - 1, 0, knots.size - 2)
    frac = (targets - knots[seg]) / (knots[seg + 1] - knots[seg])
    frac = np.clip(frac, 0.0, 1.0)
    rows = np.arange(targets.size)
    w[rows, seg] = 1.0 - frac
    w[rows, seg + 1] = frac
    return w


def interpolate_channel(pilot_samples: list[np.ndarray], pattern: PilotPattern,
                        port: int, dims: GridDimensions) -> np.ndarray:
    """Spread per-pilot channel samples over every resource element.

    `pilot_samples` holds one array per pilot-bearing symbol, in the order
    of ``pattern.pilot_positions(port)``.  Interpolation runs across
    frequency (vertical) first, then across time (horizontal).
    """
    positions = pattern.pilot_positions(port)
    if len(pilot_samples) != len(positions):
        raise ValueError(
            f"expected samples for {len(positions)} pilot symbols, got {len(pilot_samples)}")
    all_k = np.arange(dims.n_subcarriers)
    per_symbol = np.empty((len(positions), dims.n_subcarriers), dtype=np.complex128)
    for i, ((_, subcarriers), samples) in enumerate(zip(positions, pilot_samples)):
        if len(samples) != len(subcarriers):
            raise ValueError("pilot sample count does not match the pattern")
        per_symbol[i] = _linear_weights(subcarriers, all_k) @ samples
    w_time = _linear_weights(np.array([s for s, _ in positions]),
                             np.arange(dims.n_symbols))
    return (w_time @ per_symbol).T  # (n_subcarriers, n_symbols)


def estimate_channel(received_grids: np.ndarray, pattern: PilotPattern,
                     seed: int, dims: GridDimensions) -> np.ndarray:
    """Estimate all four links from the received port grids.

    Returns an array of shape (2, 2, n_subcarriers, n_symbols) with entry
    [m, n] the estimated gain from transmit port m to receive antenna n.
    The pilot/null duality is what separates the links: each port's pilots
    see silence from the other port.
    """
    received_grids = np.asarray(received_grids)
    estimate = np.empty((2, 2, dims.n_subcarriers, dims.n_symbols), dtype=np.complex128)
    for tx_port in (0, 1):
        known = pilot_values(pattern, tx_port, seed)
        positions = pattern.pilot_positions(tx_port)
        for rx in (0, 1):
            samples = [
                normalize_pilots(received_grids[rx, subcarriers, symbol], vals)
                for (symbol, subcarriers), vals in zip(positions, known)
            ]
            estimate[tx_port, rx] = interpolate_channel(samples, pattern, tx_port, dims)
    return estimate
