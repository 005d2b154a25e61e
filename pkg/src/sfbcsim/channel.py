"""2x2 MIMO multipath fading channel and the AWGN stage.

The six radio environments are tapped-delay-line profiles; the named
multipath ones use the COST 207 reduced tap settings with powers
normalized to unit total.  Fading is Rician per tap zero (line-of-sight
share set by the K factor) over Rayleigh scatter with a Jakes Doppler
spectrum, spatially correlated across the four links via the Kronecker
model.  The realization is generated directly in the frequency domain,
one complex gain per link, subcarrier and OFDM symbol, which matches the
per-subcarrier multiplicative model y = Hx + n that a cyclic prefix
longer than the delay spread licenses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridDimensions

SPEED_OF_LIGHT = 299_792_458.0

# tap tables: (delays in microseconds, relative powers in dB)
_ENVIRONMENTS = {
    "awgn_only": ((0.0,), (0.0,)),
    "user_defined": ((0.0,), (0.0,)),
    "rural_area": ((0.0, 0.2, 0.4, 0.6), (0.0, -2.0, -10.0, -20.0)),
    "typical_urban": ((0.0, 0.2, 0.5, 1.6, 2.3, 5.0),
                      (-3.0, 0.0, -2.0, -6.0, -8.0, -10.0)),
    "bad_urban": ((0.0, 0.3, 1.0, 1.6, 5.0, 6.6),
                  (-2.5, 0.0, -3.0, -5.0, -2.0, -4.0)),
    "hilly_terrain": ((0.0, 0.1, 0.3, 0.5, 15.0, 17.2),
                      (0.0, -1.5, -4.5, -7.5, -8.0, -17.7)),
}

ENVIRONMENT_NAMES = tuple(_ENVIRONMENTS)

_N_SINUSOIDS = 32  # sum-of-sinusoids order for the Jakes spectrum


@dataclass(frozen=True)
class RadioEnvironment:
    """Named tapped-delay-line profile."""

    name: str
    delays_s: tuple[float, ...]
    powers_db: tuple[float, ...]

    def __post_init__(self):
        if len(self.delays_s) != len(self.powers_db) or not self.delays_s:
            raise ValueError("tap delays and powers must be non-empty and equal length")
        if any(d < 0 for d in self.delays_s):
            raise ValueError("tap delays must be non-negative")
        if list(self.delays_s) != sorted(self.delays_s):
            raise ValueError("tap delays must be sorted")

    @property
    def powers_linear(self) -> np.ndarray:
        """Tap powers normalized so their linear sum is 1."""
        p = 10.0 ** (np.asarray(self.powers_db) / 10.0)
        return p / p.sum()

    @property
    def max_delay_s(self) -> float:
        return self.delays_s[-1]

    def rms_delay_spread_s(self) -> float:
        p = self.powers_linear
        d = np.asarray(self.delays_s)
        mean = float(p @ d)
        return float(math.sqrt(max(p @ d**2 - mean**2, 0.0)))


def canonical_name(name: str) -> str:
    out = []
    for i, ch in enumerate(name):
        if ch.isupper() and i > 0 and name[i - 1].islower():
            out.append("_")
        out.append(ch.lower())
    return "".join(out).replace("-", "_").replace(" ", "_")


def build_environment(name: str) -> RadioEnvironment:
    """Look up a named environment (case/camel insensitive)."""
    key = canonical_name(name)
    if key not in _ENVIRONMENTS:
        raise ValueError(
            f"unknown radio environment {name!r}; known: {', '.join(ENVIRONMENT_NAMES)}")
    delays_us, powers_db = _ENVIRONMENTS[key]
    return RadioEnvironment(key, tuple(d * 1e-6 for d in delays_us), powers_db)


def load_environment_file(path) -> RadioEnvironment:
    """Read a user-defined tap table: one `delay_us power_db` pair per line."""
    delays, powers = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'delay_us power_db'")
            delays.append(float(parts[0]) * 1e-6)
            powers.append(float(parts[1]))
    if not delays:
        raise ValueError(f"{path}: no tap entries found")
    order = np.argsort(delays)
    return RadioEnvironment("user_defined",
                            tuple(delays[i] for i in order),
                            tuple(powers[i] for i in order))


@dataclass(frozen=True)
class FadingConfig:
    """Fading knobs: Rician K, mobility, carrier and antenna correlations."""

    k_factor: float = 1000.0
    speed_kmh: float = 3.0
    carrier_freq_ghz: float = 2.7
    tx_corr: float = 0.5
    rx_corr: float = 0.5

    def __post_init__(self):
        if self.k_factor < 0:
            raise ValueError(f"k_factor must be >= 0, got {self.k_factor}")
        for label, value in (("tx_corr", self.tx_corr), ("rx_corr", self.rx_corr)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{label} must lie in [0, 1], got {value}")

    @property
    def max_doppler_hz(self) -> float:
        return (self.speed_kmh / 3.6) * self.carrier_freq_ghz * 1e9 / SPEED_OF_LIGHT


@dataclass(frozen=True)
class ChannelRealization:
    """Per-link complex gains, shape (2 tx, 2 rx, n_subcarriers, n_symbols)."""

    h: np.ndarray
    seed: int

    @property
    def n_subcarriers(self) -> int:
        return self.h.shape[2]

    @property
    def n_symbols(self) -> int:
        return self.h.shape[3]


def _corr_sqrt(rho: float) -> np.ndarray:
    # Hermitian square root of [[1, rho], [rho, 1]] for real rho in [0, 1]
    c = 0.5 * (math.sqrt(1.0 + rho) + math.sqrt(1.0 - rho))
    s = 0.5 * (math.sqrt(1.0 + rho) - math.sqrt(1.0 - rho))
    return np.array([[c, s], [s, c]])


def _jakes_process(rng: np.random.Generator, shape: tuple[int, ...],
                   f_d: float, times: np.ndarray) -> np.ndarray:
    """Unit-power complex scatter with a Jakes spectrum at max Doppler f_d.

    Sum-of-sinusoids construction; `shape` indexes independent processes and
    the returned array has shape `shape + (len(times),)`.
    """
    n = _N_SINUSOIDS
    theta = rng.uniform(-np.pi, np.pi, size=shape + (1,))
    k = np.arange(1, n + 1).reshape((1,) * len(shape) + (n,))
    alpha = (2 * np.pi * k - np.pi + theta) / (4 * n)
    phi = rng.uniform(-np.pi, np.pi, size=shape + (n, 1))
    psi = rng.uniform(-np.pi, np.pi, size=shape + (n, 1))
    omega = 2 * np.pi * f_d * times  # (n_t,)
    arg_i = omega * np.cos(alpha)[..., None] + phi
    arg_q = omega * np.sin(alpha)[..., None] + psi
    scale = 1.0 / math.sqrt(n)
    return scale * (np.cos(arg_i).sum(axis=-2) + 1j * np.cos(arg_q).sum(axis=-2))


def realize_channel(env: RadioEnvironment, fading: FadingConfig,
                    dims: GridDimensions, seed: int) -> ChannelRealization:
    """Draw one deterministic channel realization for a subframe.

    Per tap, the four links carry correlated Rayleigh scatter with a Jakes
    Doppler spectrum; the line-of-sight share of the K factor rides on tap
    zero only, identical on every link.  Taps are then collapsed onto the
    subcarriers through the delay-response sum H(f) = sum_i g_i e^{-j2πfτ_i}.
    The AwgnOnly environment is the identity channel.
    """
    n_sc, n_sym = dims.n_subcarriers, dims.n_symbols
    if env.name == "awgn_only":
        h = np.zeros((2, 2, n_sc, n_sym), dtype=np.complex128)
        h[0, 0] = 1.0
        h[1, 1] = 1.0
        return ChannelRealization(h, seed)

    rng = np.random.default_rng(seed)
    n_taps = len(env.delays_s)
    symbol_duration = (dims.fft_size + dims.cp_len) / dims.sample_rate_hz
    times = np.arange(n_sym) * symbol_duration
    f_d = fading.max_doppler_hz

    scatter = _jakes_process(rng, (2, 2, n_taps), f_d, times)  # (2,2,taps,t)
    r_tx = _corr_sqrt(fading.tx_corr)
    r_rx = _corr_sqrt(fading.rx_corr)
    scatter = np.einsum("ma,abit,nb->mnit", r_tx, scatter, r_rx)

    k = fading.k_factor
    if k > 0:
        los_phase = rng.uniform(-np.pi, np.pi)
        los_aoa = rng.uniform(-np.pi, np.pi)
        los = np.exp(1j * (2 * np.pi * f_d * math.cos(los_aoa) * times + los_phase))
        scatter[:, :, 0, :] = (math.sqrt(k / (k + 1.0)) * los
                               + math.sqrt(1.0 / (k + 1.0)) * scatter[:, :, 0, :])

    amplitudes = np.sqrt(env.powers_linear)  # (taps,)
    taps = scatter * amplitudes[None, None, :, None]
    phase_ramp = np.exp(-2j * np.pi * np.outer(dims.subcarrier_freqs_hz(),
                                               np.asarray(env.delays_s)))  # (k, taps)
    h = np.einsum("mnit,ki->mnkt", taps, phase_ramp)
    return ChannelRealization(h, seed)


def apply_channel(tx_grids: np.ndarray, realization: ChannelRealization) -> np.ndarray:
    """Noiseless received grids: y_n[k, t] = sum_m h[m, n, k, t] x_m[k, t]."""
    tx_grids = np.asarray(tx_grids)
    if tx_grids.shape != (2,) + realization.h.shape[2:]:
        raise ValueError(
            f"tx grids shape {tx_grids.shape} does not match realization "
            f"{(2,) + realization.h.shape[2:]}")
    return np.einsum("mnkt,mkt->nkt", realization.h, tx_grids)


def add_awgn(signal: np.ndarray, snr_db: float | None, reference_power: float,
             seed: int) -> np.ndarray:
    """Add circular complex Gaussian noise at the given per-element SNR.

    The noise variance per element is reference_power / 10^(snr_db/10);
    snr_db of None or +inf bypasses the noise entirely.
    """
    signal = np.asarray(signal)
    if snr_db is None or math.isinf(snr_db):
        return signal.copy()
    if reference_power <= 0:
        raise ValueError(f"reference power must be positive, got {reference_power}")
    variance = reference_power / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = rng.normal(scale=math.sqrt(variance / 2.0), size=signal.shape + (2,))
    return signal + noise[..., 0] + 1j * noise[..., 1]
