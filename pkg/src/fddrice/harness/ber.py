"""Zero-forcing precoded QPSK link driven by estimated channels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..channel import complex_noise
from ..errors import ConfigError, RankDeficiencyError
from .config import ExperimentConfig
from .sweep import _f, _num, format_csv
from .trial import draw_trial, timed_estimate, trial_seed

BER_HEADER = ["k", "sweep_value", "estimator", "ber_mean", "ber_median",
              "failures", "trials", "seconds"]
RANK_TOL = 1e-10


def zf_precoder(h_hat: np.ndarray) -> np.ndarray:
    """Right pseudo-inverse of ``h_hat`` scaled to unit Frobenius norm."""
    h_hat = np.atleast_2d(h_hat)
    s = np.linalg.svd(h_hat, compute_uv=False)
    if s.size < h_hat.shape[0] or s[-1] <= RANK_TOL * s[0]:
        raise RankDeficiencyError("channel estimate has fewer than m_r independent rows")
    w = h_hat.conj().T @ np.linalg.inv(h_hat @ h_hat.conj().T)
    return w / np.linalg.norm(w)


def qpsk_bits(n_streams: int, n_symbols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=(2, n_streams, n_symbols))


def qpsk_modulate(bits: np.ndarray) -> np.ndarray:
    return ((1 - 2 * bits[0]) + 1j * (1 - 2 * bits[1])) / np.sqrt(2)


def qpsk_demodulate(r: np.ndarray) -> np.ndarray:
    return np.stack([(r.real < 0).astype(int), (r.imag < 0).astype(int)])


def stream_gain(h: np.ndarray) -> float:
    """Per-stream amplitude seen through ``h`` with its own unit-power ZF precoder."""
    return float(np.abs(np.trace(h @ zf_precoder(h))) / h.shape[0])


def link_ber(h: np.ndarray, w: np.ndarray, bits: np.ndarray, noise: np.ndarray) -> float:
    """Bit error rate of one frame: ``r = H W x + n`` with hard decisions."""
    r = h @ w @ qpsk_modulate(bits) + noise
    return float(np.mean(qpsk_demodulate(r) != bits))


@dataclass
class BerResult:
    config: ExperimentConfig
    k: int
    # [point][trial] -> {estimator: ber}; failures stored as NaN
    ber: list[list[dict[str, float]]] = field(default_factory=list)
    seconds: list[dict[str, float]] = field(default_factory=list)

    def values(self, point: int, estimator: str) -> np.ndarray:
        v = np.array([t[estimator] for t in self.ber[point]])
        return v[np.isfinite(v)]

    def failures(self, point: int, estimator: str) -> int:
        return int(sum(not np.isfinite(t[estimator]) for t in self.ber[point]))

    def any_point_all_failed(self) -> bool:
        return any(self.failures(i, e) == len(self.ber[i])
                   for i in range(len(self.ber)) for e in self.estimators)

    @property
    def estimators(self) -> list[str]:
        return [e for e in self.config.estimators if e != "benchmark"]

    def rows(self) -> list[list[str]]:
        out = []
        for i, value in enumerate(self.config.sweep_values):
            for e in self.estimators:
                v = self.values(i, e)
                out.append([str(self.k), _num(value), e,
                            _f(np.mean(v)) if v.size else "nan",
                            _f(np.median(v)) if v.size else "nan",
                            str(self.failures(i, e)), str(len(self.ber[i])),
                            _f(self.seconds[i].get(e, 0.0)) if self.config.timing else ""])
        return out

    def to_csv(self) -> str:
        return format_csv(BER_HEADER, self.rows())


def run_ber(cfg: ExperimentConfig) -> BerResult:
    """BER versus SNR for every configured channel estimator.

    Training and payload use the same SNR. The payload noise variance is set
    so that a receiver precoded from the true channel sees the requested SNR
    per stream; every estimator in a trial shares the same bits and noise.
    """
    if cfg.sweep_axis != "snr":
        raise ConfigError("BER runs sweep SNR only")
    geom = cfg.geometry()
    k = cfg.path_count(cfg.m_r)
    res = BerResult(cfg, k)
    for i, snr_db in enumerate(cfg.sweep_values):
        rows, secs = [], {}
        for t in range(cfg.trials):
            td = draw_trial(cfg, geom, k, float(snr_db), trial_seed(cfg.seed, i, t))
            bits = qpsk_bits(geom.m_r, cfg.n_symbols, td.data_rng)
            sigma2 = stream_gain(td.h) ** 2 / 10 ** (snr_db / 10)
            noise = complex_noise((geom.m_r, cfg.n_symbols), sigma2, td.data_rng)
            row = {}
            for e in res.estimators:
                h_hat, _, dt, err = timed_estimate(e, td, k, cfg.omp_bits)
                secs[e] = secs.get(e, 0.0) + dt
                if err is None:
                    try:
                        row[e] = link_ber(td.h, zf_precoder(h_hat), bits, noise)
                    except RankDeficiencyError:
                        row[e] = float("nan")
                else:
                    row[e] = float("nan")
            rows.append(row)
        res.ber.append(rows)
        res.seconds.append(secs)
    return res
