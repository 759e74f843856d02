"""Deterministic Monte Carlo BER engine, diversity fitting and CSV I/O.

Each SNR point is simulated in fixed-size blocks. Block b of point i draws
from its own RNG substream keyed by (master_seed, i, b), and blocks are
consumed strictly in order with the stop rule applied to the cumulative
in-order totals. Extra blocks computed speculatively by worker threads are
discarded, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .alphabet import build_alphabet
from .channel import CorrelationSpec, RngStream, snr_to_sigma2
from .errors import InsufficientPoints, MbmSimError, ParseError
from .schemes import build_kernel
from .signalset import SystemConfig

SCHEMES = ("simo-mbm", "mimo-mbm", "sm-mbm", "gsm-mbm", "mimo", "sm", "gsm",
           "mapsel-mi", "mapsel-ed", "pccr-nr1", "pccr-rx1", "pccr-rx2",
           "tcm-gsm-mbm")

CSV_HEADER = ("snr_db", "bit_errors", "bits_simulated", "ber", "trials")


@dataclass(frozen=True)
class SimConfig:
    scheme: str
    system: SystemConfig
    snr_db: tuple[float, ...]
    correlation: CorrelationSpec = None
    feedback_B: int = None  # None = perfect feedback
    min_bit_errors: int = 200
    max_trials: int = 10**6
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        _validate_scheme(self)

    def to_dict(self) -> dict:
        sys_d = {
            "n_tu": self.system.n_tu, "n_rf": self.system.n_rf,
            "m_rf": self.system.m_rf, "n_r": self.system.n_r,
            "M": self.system.alphabet.M, "alphabet": self.system.alphabet.kind,
            "M_rf": self.system.M_rf,
        }
        d = {"scheme": self.scheme, "system": sys_d, "snr_db": list(self.snr_db),
             "stop": {"min_bit_errors": self.min_bit_errors, "max_trials": self.max_trials},
             "master_seed": self.master_seed}
        if self.correlation is not None:
            d["correlation"] = {"rho_a": self.correlation.rho_a,
                                "rho_m": self.correlation.rho_m}
        if self.feedback_B is not None:
            d["feedback_B"] = self.feedback_B
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        s = d["system"]
        system = SystemConfig(
            n_tu=s["n_tu"], n_rf=s["n_rf"], m_rf=s["m_rf"], n_r=s["n_r"],
            alphabet=build_alphabet(s["M"], s["alphabet"]),
            M_rf=s.get("M_rf"),
        )
        corr = None
        if "correlation" in d and d["correlation"] is not None:
            corr = CorrelationSpec(d["correlation"]["rho_a"], d["correlation"]["rho_m"])
        stop = d.get("stop", {})
        return cls(
            scheme=d["scheme"], system=system, snr_db=tuple(d["snr_db"]),
            correlation=corr, feedback_B=d.get("feedback_B"),
            min_bit_errors=stop.get("min_bit_errors", 200),
            max_trials=stop.get("max_trials", 10**6),
            master_seed=d.get("master_seed", 0),
        )

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _validate_scheme(config: SimConfig):
    sys, scheme = config.system, config.scheme
    if scheme not in SCHEMES:
        raise MbmSimError(f"unknown scheme {scheme!r}")
    if scheme.endswith("-mbm") and not scheme.startswith("tcm") and sys.m_rf < 1:
        raise MbmSimError(f"{scheme} needs at least one mirror per TU")
    if scheme in ("mimo", "sm", "gsm") and sys.m_rf != 0:
        raise MbmSimError(f"{scheme} is a no-mirror scheme, set m_rf = 0")
    if scheme == "simo-mbm" and not (sys.n_tu == sys.n_rf == 1):
        raise MbmSimError("simo-mbm needs n_tu = n_rf = 1")
    if scheme in ("mimo-mbm", "mimo") and sys.n_rf != sys.n_tu:
        raise MbmSimError(f"{scheme} needs n_rf = n_tu")
    if scheme in ("sm-mbm", "sm") and sys.n_rf != 1:
        raise MbmSimError(f"{scheme} needs n_rf = 1")
    if scheme.startswith("mapsel") and sys.M_rf < sys.m_rf:
        raise MbmSimError("MAP selection needs M_rf >= m_rf")
    if scheme.startswith("pccr"):
        if sys.alphabet.kind != "tone":
            raise MbmSimError("phase compensation schemes need a tone alphabet")
        if sys.n_rf != sys.n_tu:
            raise MbmSimError("phase compensation schemes activate every TU")
        if scheme == "pccr-nr1" and sys.n_r != 1:
            raise MbmSimError("pccr-nr1 needs n_r = 1")


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bit_errors: int
    bits_simulated: int
    ber: float
    trials: int


@dataclass(frozen=True)
class BerCurve:
    points: tuple[BerPoint, ...]
    metadata: dict = field(default_factory=dict)

    def bers(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])

    def snrs(self) -> np.ndarray:
        return np.array([p.snr_db for p in self.points])


def _block_size(scheme: str) -> int:
    if scheme == "tcm-gsm-mbm":
        return 128
    if scheme.startswith("mapsel"):
        return 2048
    return 4096


def _run_point(config: SimConfig, snr_index: int, workers: int) -> BerPoint:
    snr = config.snr_db[snr_index]
    sigma2 = snr_to_sigma2(snr)
    kernel = build_kernel(config.scheme, config.system, sigma2,
                          corr=config.correlation, B=config.feedback_B)
    block = _block_size(config.scheme)
    n_blocks = -(-config.max_trials // block)

    def run_block(bi: int):
        gen = RngStream(config.master_seed, (snr_index, bi)).generator()
        n = min(block, config.max_trials - bi * block)
        return kernel.run(gen, n)

    errors = bits = trials = 0

    def done() -> bool:
        return errors >= config.min_bit_errors or trials >= config.max_trials

    if workers <= 1:
        for bi in range(n_blocks):
            e, b, t = run_block(bi)
            errors, bits, trials = errors + e, bits + b, trials + t
            if done():
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {bi: pool.submit(run_block, bi) for bi in range(min(workers, n_blocks))}
            next_submit = len(futures)
            bi = 0
            while bi < n_blocks:
                e, b, t = futures.pop(bi).result()
                errors, bits, trials = errors + e, bits + b, trials + t
                bi += 1
                if done():
                    break
                if next_submit < n_blocks:
                    futures[next_submit] = pool.submit(run_block, next_submit)
                    next_submit += 1
            for f in futures.values():
                f.cancel()
    return BerPoint(snr, errors, bits, errors / bits if bits else 0.0, trials)


def run_ber_sweep(config: SimConfig, workers: int = 1) -> BerCurve:
    """Simulate every SNR point until the stop rule triggers."""
    points = tuple(_run_point(config, i, workers) for i in range(len(config.snr_db)))
    meta = {"config_hash": config.config_hash(),
            "master_seed": str(config.master_seed),
            "version": __version__}
    return BerCurve(points, meta)


@dataclass(frozen=True)
class SlopeEstimate:
    diversity: float
    window: tuple[float, float]
    residual: float
    n_points: int


def default_fit_window(curve: BerCurve) -> tuple[float, float]:
    """Lowest-BER contiguous run of 3 to 5 points with usable error counts."""
    ok = [i for i, p in enumerate(curve.points)
          if p.bits_simulated and 10.0 / p.bits_simulated <= p.ber <= 1e-2]
    if len(ok) < 3:
        raise InsufficientPoints("no fit window with 3 usable points")
    run = [ok[-1]]
    for i in reversed(ok[:-1]):
        if i == run[0] - 1 and len(run) < 5:
            run.insert(0, i)
    if len(run) < 3:
        run = ok[-3:]
    return (curve.points[run[0]].snr_db, curve.points[run[-1]].snr_db)


def estimate_diversity(curve: BerCurve, window: tuple[float, float] = None) -> SlopeEstimate:
    """Fit log10(BER) against SNR in dB; diversity = -10 * slope."""
    if window is None:
        window = default_fit_window(curve)
    lo, hi = window
    pts = [p for p in curve.points if lo <= p.snr_db <= hi and 0.0 < p.ber < 0.1]
    if len(pts) < 3:
        raise InsufficientPoints(f"need 3 points with ber in (0, 0.1) inside {window}")
    x = np.array([p.snr_db for p in pts])
    y = np.log10([p.ber for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((slope * x + intercept - y) ** 2)))
    return SlopeEstimate(-10.0 * slope, (lo, hi), resid, len(pts))


def snr_at_ber(curve: BerCurve, target: float) -> float:
    """SNR in dB where the curve crosses the target BER, log-interpolated."""
    lt = np.log10(target)
    pts = [p for p in curve.points if p.ber > 0]
    for a, b in zip(pts, pts[1:]):
        la, lb = np.log10(a.ber), np.log10(b.ber)
        if (la - lt) * (lb - lt) <= 0 and la != lb:
            frac = (la - lt) / (la - lb)
            return float(a.snr_db + frac * (b.snr_db - a.snr_db))
    raise InsufficientPoints(f"curve never crosses ber = {target}")


def write_curve_csv(curve: BerCurve, path):
    with open(path, "w", newline="") as fh:
        for key, val in curve.metadata.items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for p in curve.points:
            writer.writerow([repr(p.snr_db), p.bit_errors, p.bits_simulated,
                             repr(p.ber), p.trials])


def read_curve_csv(path) -> BerCurve:
    metadata = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                metadata[key.strip()] = val
            elif line.strip():
                rows.append(line)
    reader = csv.DictReader(rows)
    missing = set(CSV_HEADER) - set(reader.fieldnames or ())
    if missing:
        raise ParseError(f"missing columns: {sorted(missing)}")
    points = tuple(
        BerPoint(float(r["snr_db"]), int(r["bit_errors"]), int(r["bits_simulated"]),
                 float(r["ber"]), int(r["trials"]))
        for r in reader
    )
    return BerCurve(points, metadata)
