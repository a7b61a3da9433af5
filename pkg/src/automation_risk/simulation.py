"""Seeded record-level simulation.

Random numbers come from a counter-based Philox stream keyed by the seed.
Record ``i`` always consumes the same fixed-width block of the stream, so a
dataset can be generated in chunks (or in parallel) by jumping the counter,
and the result is bit-identical to one sequential pass.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .core import RiskModel, expected_loss
from .curves import check_unit_interval
from .errors import DomainError

WORDS_PER_BLOCK = 4  # Philox emits four 64-bit words per counter increment
SATURATION_LIMIT = 0.20

CSV_COLUMNS = ("failed", "executed", "harmed", "loss", "a_level", "covariate",
               "instrument", "group", "time", "running_var")
_BOOL_COLUMNS = ("failed", "executed", "harmed")
_INT_COLUMNS = ("group", "time")


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def record_uniforms(seed: int, start: int, stop: int, blocks_per_record: int = 1) -> np.ndarray:
    """Uniforms on the open interval (0, 1) for records ``start..stop-1``.

    Returns an array of shape ``(stop - start, 4 * blocks_per_record)``.
    Row ``i`` depends only on ``(seed, start + i)``.
    """
    seed = check_seed(seed)
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start * blocks_per_record)
    width = WORDS_PER_BLOCK * blocks_per_record
    raw = bitgen.random_raw((stop - start) * width)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return u.reshape(stop - start, width)


def _chunked_uniforms(seed, n, blocks, chunk_size):
    if chunk_size is None or chunk_size >= n:
        return record_uniforms(seed, 0, n, blocks)
    parts = [record_uniforms(seed, s, min(s + chunk_size, n), blocks)
             for s in range(0, n, chunk_size)]
    return np.concatenate(parts)


@dataclass
class IncidentDataset:
    """Column store of incident records.

    Each record carries failure (F), execution (U) and harm (H) flags, the
    realised loss, automation level, a covariate, an instrument, panel
    coordinates and a running variable. Besides the columns it keeps the
    panel treatment assignment and the regression-discontinuity cutoff,
    which the CSV format does not carry.
    """

    failed: np.ndarray
    executed: np.ndarray
    harmed: np.ndarray
    loss: np.ndarray
    a_level: np.ndarray
    covariate: np.ndarray
    instrument: np.ndarray
    group: np.ndarray
    time: np.ndarray
    running_var: np.ndarray
    treated_groups: tuple[int, ...] | None = None
    post_start: int | None = None
    rd_cutoff: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.failed)
        for name in CSV_COLUMNS:
            dtype = bool if name in _BOOL_COLUMNS else (np.int64 if name in _INT_COLUMNS else float)
            arr = np.asarray(getattr(self, name), dtype=dtype)
            if arr.shape != (n,):
                raise DomainError(f"column {name} has shape {arr.shape}, expected ({n},)")
            setattr(self, name, arr)
        if np.any(self.harmed & ~self.executed) or np.any(self.executed & ~self.failed):
            raise DomainError("records must satisfy harmed => executed => failed")
        if np.any((self.loss > 0) & ~self.harmed):
            raise DomainError("positive loss on an unharmed record")

    def __len__(self):
        return len(self.failed)

    @property
    def degenerate(self) -> bool:
        return bool(self.warnings)

    def column(self, name: str) -> np.ndarray:
        if name not in CSV_COLUMNS:
            raise KeyError(f"unknown column {name!r}")
        return getattr(self, name)

    def records(self):
        """Iterate over rows as plain dicts."""
        for i in range(len(self)):
            yield {name: getattr(self, name)[i].item() for name in CSV_COLUMNS}

    def to_csv(self, path: str | os.PathLike) -> None:
        cols = [_format_column(name, getattr(self, name)) for name in CSV_COLUMNS]
        with open(path, "w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for start in range(0, len(self), 100_000):
                chunk = zip(*(c[start:start + 100_000] for c in cols))
                fh.write("".join(",".join(row) + "\n" for row in chunk))

    @classmethod
    def from_csv(cls, path: str | os.PathLike, **metadata) -> "IncidentDataset":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != CSV_COLUMNS:
                raise DomainError(f"unexpected CSV header {header}")
            rows = list(reader)
        cols = list(zip(*rows)) if rows else [()] * len(CSV_COLUMNS)
        data = {}
        for name, values in zip(CSV_COLUMNS, cols):
            if name in _BOOL_COLUMNS:
                data[name] = np.array([v == "1" for v in values], dtype=bool)
            elif name in _INT_COLUMNS:
                data[name] = np.array([int(v) for v in values], dtype=np.int64)
            else:
                data[name] = np.array([float(v) for v in values], dtype=float)
        return cls(**data, **metadata)


def _format_column(name, values: np.ndarray) -> list[str]:
    # repr gives the shortest string that round-trips a float exactly
    if name in _BOOL_COLUMNS:
        return ["1" if v else "0" for v in values.tolist()]
    if name in _INT_COLUMNS:
        return [str(v) for v in values.tolist()]
    # format each distinct bit pattern once; simulated columns repeat heavily
    bits, inverse = np.unique(values.view(np.uint64), return_inverse=True)
    text = np.array([repr(v) for v in bits.view(np.float64).tolist()], dtype=object)
    return text[inverse.ravel()].tolist()


# ------------------------------------------------------------ incident simulator

@dataclass(frozen=True)
class SimConfig:
    risk: RiskModel
    a_level: float
    n: int
    seed: int

    def __post_init__(self):
        check_unit_interval(self.a_level, "a_level")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        check_seed(self.seed)


@dataclass
class SimulationResult:
    dataset: IncidentDataset
    mean_loss: float
    analytic_loss: float
    std_error: float
    n_failed: int
    p_harm_given_failure: float
    p_exec_given_failure: float

    @property
    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean_loss == self.analytic_loss else math.inf
        return (self.mean_loss - self.analytic_loss) / self.std_error


def simulate_incidents(cfg: SimConfig, chunk_size: int | None = None) -> SimulationResult:
    """Monte Carlo draw of ``cfg.n`` decisions at automation level ``cfg.a_level``.

    Per decision: F ~ Bernoulli(P(F)); if F, U ~ Bernoulli(P(H|F,A)); harm is
    set equal to execution; on harm a severity is drawn. ``std_error`` is the
    standard error of the mean loss implied by the model, from the
    Bernoulli harm indicator and the severity second moment.
    """
    risk = cfg.risk
    n = int(cfg.n)
    u = _chunked_uniforms(cfg.seed, n, 1, chunk_size)
    g = float(risk.harm_curve(cfg.a_level))
    failed = u[:, 0] < risk.p_failure
    executed = failed & (u[:, 1] < g)
    harmed = executed.copy()
    loss = np.where(harmed, risk.severity_distribution.from_uniform(u[:, 2]), 0.0)
    zeros = np.zeros(n)
    ds = IncidentDataset(
        failed=failed, executed=executed, harmed=harmed, loss=loss,
        a_level=np.full(n, float(cfg.a_level)), covariate=zeros, instrument=zeros,
        group=np.zeros(n, dtype=np.int64), time=np.zeros(n, dtype=np.int64), running_var=zeros,
    )
    q = risk.p_failure * g
    dist = risk.severity_distribution
    variance = max(q * dist.second_moment - (q * dist.mean) ** 2, 0.0)
    n_failed = int(failed.sum())
    if n_failed:
        p_h = int(harmed.sum()) / n_failed
        p_u = int(executed.sum()) / n_failed
    else:
        p_h = p_u = math.nan
    return SimulationResult(
        dataset=ds,
        mean_loss=float(loss.mean()),
        analytic_loss=expected_loss(risk, cfg.a_level),
        std_error=math.sqrt(variance / n),
        n_failed=n_failed,
        p_harm_given_failure=p_h,
        p_exec_given_failure=p_u,
    )


# ------------------------------------------------------ observational generator

@dataclass(frozen=True)
class ObservationalConfig:
    """Synthetic observational study of harm against automation.

    Automation and harm propensity follow linear equations::

        A = clip(automation_mean + instrument_strength*Z + confounder_strength*X + noise_scale*e)
        p = clip(base_rate + true_gradient*A + confounder_strength*X
                 + group_effect[j] + period_effect[t] + did_effect*Treat_j*Post_t
                 + rd_jump*[r >= rd_cutoff] + rd_slope*(r - rd_cutoff) + noise_scale*v)
        H ~ Bernoulli(p)

    with X, Z, e, v standard normal and r uniform on rd_cutoff +- 1.
    Records cycle through ``n_groups`` groups and ``n_periods`` periods;
    the first half of the groups is treated from period ``n_periods // 2``.
    """

    n: int = 50_000
    true_gradient: float = 0.8
    confounder_strength: float = 0.1
    instrument_strength: float = 0.1
    noise_scale: float = 0.05
    did_effect: float = 0.1
    rd_cutoff: float = 0.0
    rd_jump: float = 0.1
    seed: int = 0
    base_rate: float = 0.05
    automation_mean: float = 0.5
    rd_slope: float = 0.05
    n_groups: int = 10
    n_periods: int = 6

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 10:
            raise DomainError(f"n must be an integer >= 10, got {self.n}")
        if self.n_groups < 2 or self.n_periods < 1:
            raise DomainError("need at least 2 groups and 1 period")
        if self.noise_scale < 0:
            raise DomainError("noise_scale must be nonnegative")
        check_seed(self.seed)

    def group_effects(self) -> np.ndarray:
        j = np.arange(self.n_groups)
        return 0.05 * (j / (self.n_groups - 1) - 0.5)

    def period_effects(self) -> np.ndarray:
        t = np.arange(self.n_periods)
        return 0.03 * t / max(self.n_periods - 1, 1)


def generate_observational(cfg: ObservationalConfig, chunk_size: int | None = None) -> IncidentDataset:
    """Draw an observational dataset from the linear-probability design above.

    Every row is a failure (``failed`` is set); execution equals harm.
    When clipping of A or of the harm propensity touches more than 20% of
    rows a warning is recorded and ``dataset.degenerate`` is true.
    """
    n = int(cfg.n)
    u = _chunked_uniforms(cfg.seed, n, 2, chunk_size)
    x, z, eps, nu = (ndtri(u[:, k]) for k in range(4))
    running = cfg.rd_cutoff + 2.0 * u[:, 5] - 1.0

    idx = np.arange(n)
    group = idx % cfg.n_groups
    time = (idx // cfg.n_groups) % cfg.n_periods
    treated_groups = tuple(range(cfg.n_groups // 2))
    post_start = cfg.n_periods // 2
    treat_post = (group < len(treated_groups)) & (time >= post_start)

    c = cfg.confounder_strength
    a_raw = cfg.automation_mean + cfg.instrument_strength * z + c * x + cfg.noise_scale * eps
    a = np.clip(a_raw, 0.0, 1.0)
    p_raw = (cfg.base_rate + cfg.true_gradient * a + c * x
             + cfg.group_effects()[group] + cfg.period_effects()[time]
             + cfg.did_effect * treat_post
             + cfg.rd_jump * (running >= cfg.rd_cutoff)
             + cfg.rd_slope * (running - cfg.rd_cutoff)
             + cfg.noise_scale * nu)
    p = np.clip(p_raw, 0.0, 1.0)
    harmed = u[:, 4] < p

    saturated = float(np.mean((a != a_raw) | (p != p_raw)))
    warnings = []
    if saturated > SATURATION_LIMIT:
        warnings.append(f"degenerate config: clipping saturates {saturated:.1%} of rows")

    return IncidentDataset(
        failed=np.ones(n, dtype=bool), executed=harmed, harmed=harmed, loss=np.zeros(n),
        a_level=a, covariate=x, instrument=z, group=group, time=time, running_var=running,
        treated_groups=treated_groups, post_start=post_start, rd_cutoff=float(cfg.rd_cutoff),
        warnings=warnings,
    )
