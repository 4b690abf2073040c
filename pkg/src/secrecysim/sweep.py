"""MER sweeps over schemes and relay counts, CSV output, diversity slopes."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .channel import FadingParams, db_to_linear
from .errors import ConfigError, InsufficientResolutionError
from .estimator import SCHEMES, Estimate, SchemeSpec, estimate_curve
from .schemes import EVE_MODES

METRICS = ("ergodic_secrecy_capacity", "intercept_probability")
CSV_COLUMNS = ("scheme", "m", "mer_db", "metric", "mean", "std_err", "ci95_low", "ci95_high", "n_trials")
MIN_STATISTICAL_TRIALS = 1000
DEFAULT_MER_GRID = tuple(float(x) for x in range(0, 31, 3))


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment. Defaults reproduce the relay case study (12 dB, 0.5, 2, 2)."""

    gamma_s_db: float = 12.0
    sigma2_sd: float = 0.5
    sigma2_sr: float = 2.0
    sigma2_rd: float = 2.0
    mer_grid_db: tuple[float, ...] = DEFAULT_MER_GRID
    relay_counts: tuple[int, ...] = (2, 4, 8)
    schemes: tuple[str, ...] = ("direct", "relay_selection")
    n_trials: int = 100_000
    master_seed: int = 0
    prelog_half: bool = True
    eve_mode: str = "phase2_only"
    sigma2_re: Union[str, float] = "equal_to_se"

    def __post_init__(self):
        object.__setattr__(self, "mer_grid_db", tuple(float(x) for x in self.mer_grid_db))
        object.__setattr__(self, "relay_counts", tuple(self.relay_counts))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        self.validate()

    def validate(self, lines: Optional[dict] = None) -> None:
        lines = lines or {}

        def fail(key, msg):
            raise ConfigError(f"{key}: {msg}", lines.get(key))

        if not math.isfinite(self.gamma_s_db):
            fail("gamma_s_db", "must be finite")
        for key in ("sigma2_sd", "sigma2_sr", "sigma2_rd"):
            v = getattr(self, key)
            if not (_is_number(v) and math.isfinite(v) and v > 0):
                fail(key, f"must be a positive number, got {v!r}")
        grid = self.mer_grid_db
        if not grid:
            fail("mer_grid_db", "must not be empty")
        if not all(math.isfinite(x) for x in grid):
            fail("mer_grid_db", "values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            fail("mer_grid_db", "must be strictly increasing")
        if not self.relay_counts or any(not _is_int(m) or m < 1 for m in self.relay_counts):
            fail("relay_counts", f"must be a non-empty list of integers >= 1, got {list(self.relay_counts)}")
        if len(set(self.relay_counts)) != len(self.relay_counts):
            fail("relay_counts", "must not contain duplicates")
        if not self.schemes:
            fail("schemes", "must not be empty")
        for s in self.schemes:
            if s not in SCHEMES:
                fail("schemes", f"unknown scheme {s!r}; expected one of {list(SCHEMES)}")
        if len(set(self.schemes)) != len(self.schemes):
            fail("schemes", "must not contain duplicates")
        if not _is_int(self.n_trials) or self.n_trials < MIN_STATISTICAL_TRIALS:
            fail("n_trials", f"must be an integer >= {MIN_STATISTICAL_TRIALS}, got {self.n_trials!r}")
        if not _is_int(self.master_seed) or not 0 <= self.master_seed < 2**64:
            fail("master_seed", f"must be a 64-bit unsigned integer, got {self.master_seed!r}")
        if not isinstance(self.prelog_half, bool):
            fail("prelog_half", "must be true or false")
        if self.eve_mode not in EVE_MODES:
            fail("eve_mode", f"must be one of {list(EVE_MODES)}, got {self.eve_mode!r}")
        re_ = self.sigma2_re
        if not (re_ == "equal_to_se" or (_is_number(re_) and math.isfinite(re_) and re_ > 0)):
            fail("sigma2_re", f'must be "equal_to_se" or a positive number, got {re_!r}')

    @property
    def gamma_s(self) -> float:
        return db_to_linear(self.gamma_s_db)

    def fading_params(self, mer_db: float) -> FadingParams:
        return FadingParams.from_mer(
            mer_db,
            self.sigma2_sd,
            self.sigma2_sr,
            self.sigma2_rd,
            None if self.sigma2_re == "equal_to_se" else float(self.sigma2_re),
        )

    def to_json(self) -> str:
        d = asdict(self)
        d["mer_grid_db"] = list(self.mer_grid_db)
        d["relay_counts"] = list(self.relay_counts)
        d["schemes"] = list(self.schemes)
        return json.dumps(d, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        """Parse a JSON document; missing keys take the defaults.

        Errors carry the 1-based line of the offending key when it can be found.
        """
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON: {e.msg}", e.lineno) from None
        if not isinstance(doc, dict):
            raise ConfigError("top level must be a JSON object", 1)
        lines = _key_lines(text)
        known = {f.name for f in fields(cls)}
        for key in doc:
            if key not in known:
                raise ConfigError(f"unknown key {key!r}", lines.get(key))
        cfg = object.__new__(cls)
        for f in fields(cls):
            object.__setattr__(cfg, f.name, doc.get(f.name, f.default))
        for key in ("mer_grid_db", "relay_counts", "schemes"):
            v = getattr(cfg, key)
            if not isinstance(v, (list, tuple)):
                raise ConfigError(f"{key}: must be a list", lines.get(key))
            if key == "mer_grid_db" and not all(_is_number(x) for x in v):
                raise ConfigError(f"{key}: values must be numbers", lines.get(key))
            object.__setattr__(cfg, key, tuple(v))
        if not _is_number(cfg.gamma_s_db):
            raise ConfigError("gamma_s_db: must be a number", lines.get("gamma_s_db"))
        cfg.validate(lines)
        return cfg

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
        try:
            return cls.from_json(text)
        except ConfigError as e:
            raise ConfigError(f"{path}: {e}") from None


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _key_lines(text):
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        for m in re.finditer(r'"([A-Za-z0-9_]+)"\s*:', line):
            out.setdefault(m.group(1), lineno)
    return out


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    m: int
    mer_db: float
    metric: str
    estimate: Estimate

    @property
    def key(self):
        return (self.metric, self.scheme, self.m, self.mer_db)


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)

    def __post_init__(self):
        rows = tuple(sorted(self.rows, key=lambda r: r.key))
        keys = [r.key for r in rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (scheme, m, mer_db, metric) rows")
        object.__setattr__(self, "rows", rows)

    def __len__(self):
        return len(self.rows)

    def curve(self, scheme: str, m: int, metric: str) -> list[tuple[float, Estimate]]:
        return [(r.mer_db, r.estimate) for r in self.rows if (r.scheme, r.m, r.metric) == (scheme, m, metric)]

    def curves(self, metric: str) -> list[tuple[str, int]]:
        return sorted({(r.scheme, r.m) for r in self.rows if r.metric == metric})


def scheme_specs(config: ScenarioConfig) -> list[SchemeSpec]:
    specs = []
    for s in config.schemes:
        for m in [0] if s == "direct" else config.relay_counts:
            specs.append(SchemeSpec(s, m, config.prelog_half, config.eve_mode))
    return specs


def run_sweep(config: ScenarioConfig, threads: Optional[int] = None) -> SweepResult:
    """Both metrics for every scheme x M x MER point, ``n_trials`` trials per point."""
    params = [config.fading_params(mer) for mer in config.mer_grid_db]
    rows = []
    for spec in scheme_specs(config):
        ests = estimate_curve(spec, params, config.gamma_s, config.n_trials, config.master_seed, threads)
        for mer, (ergodic, intercept) in zip(config.mer_grid_db, ests):
            rows.append(SweepRow(spec.scheme, spec.m, mer, METRICS[0], ergodic))
            rows.append(SweepRow(spec.scheme, spec.m, mer, METRICS[1], intercept))
    return SweepResult(tuple(rows))


def estimate_diversity_slope(points: Sequence[tuple[float, float]], window: int = 3) -> float:
    """Least-squares slope of log10(P) against log10(MER) over the ``window`` highest-MER points.

    A curve decaying as MER**-d gives a slope near ``-d``.
    """
    pts = sorted((float(mer), float(p)) for mer, p in points)[-window:]
    if len(pts) < 2:
        raise InsufficientResolutionError(f"need at least 2 points for a slope, got {len(pts)}")
    if any(not p > 0 for _, p in pts):
        raise InsufficientResolutionError(
            "zero intercept probability in the slope window; increase n_trials"
        )
    x = np.array([mer / 10.0 for mer, _ in pts])
    y = np.log10([p for _, p in pts])
    return float(np.polyfit(x, y, 1)[0])


def diversity_slopes(result: SweepResult, window: int = 3) -> dict[tuple[str, int], float]:
    metric = "intercept_probability"
    return {
        c: estimate_diversity_slope([(mer, e.mean) for mer, e in result.curve(*c, metric)], window)
        for c in result.curves(metric)
    }


# -- CSV ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def to_csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.rows:
        e = r.estimate
        w.writerow(
            [r.scheme, r.m, _fmt(r.mer_db), r.metric, _fmt(e.mean), _fmt(e.std_err),
             _fmt(e.ci95_low), _fmt(e.ci95_high), e.n_trials]
        )
    return buf.getvalue()


def emit_csv(result: SweepResult, path) -> Path:
    path = Path(path)
    text = to_csv_text(result)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(e.errno, f"cannot write CSV: {e.strerror}", str(path)) from None
    return path


def parse_csv_text(text: str) -> SweepResult:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for rec in reader:
        scheme, m, mer, metric, mean, se, lo, hi, n = rec
        est = Estimate(float(mean), float(se), float(lo), float(hi), int(n))
        rows.append(SweepRow(scheme, int(m), float(mer), metric, est))
    return SweepResult(tuple(rows))


def read_csv(path) -> SweepResult:
    return parse_csv_text(Path(path).read_text())
