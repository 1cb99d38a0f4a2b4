"""Monte Carlo experiment runner, config parsing and CSV output.

Config files are flat UTF-8 ``key = value`` text; ``#`` starts a comment and
blank lines are ignored. Keys (all optional, defaults reproduce the 5-user
reference cell):

    distances            comma list, km, strictly increasing   0.5,1.5,2.5,3.5,4.5
    cell_radius          km                                    5.0
    path_loss_exponent                                         3.0
    group_count                                                2
    total_power          watts                                 40.0
    frames               frames (BER) / realizations (rate)    500
    bits_per_frame       per user, even, divisible by 2*T      6144
    snr_grid             "start:step:stop" (inclusive) or
                         comma list, dB                        0:2:30
    seed                 non-negative 64-bit integer           42
    decoding_order_mode  distance | instantaneous              distance
    fading_mode          block | frame                         block
    tdma_baseline_mode   full_power_time_share                 full_power_time_share
    experiment           ber | ber_single_user | rate |
                         rate_single_user | ratio              ber

SNR is the transmit SNR total_power/sigma^2 in dB; the sweep varies the
noise variance at fixed transmit power. Every (seed, SNR index, frame)
triple seeds an independent substream, so results are byte-identical for
any worker count. The ``TIMNOMA_WORKERS`` environment variable caps the
process pool; unset means one worker per SNR point up to the CPU count.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytics import RateRecord, hybrid_rate_table, single_user_rate_table
from .channel import NoiseModel, add_noise, draw_fading
from .errors import ConfigError, ValidationError
from .modem import qpsk_demodulate, qpsk_modulate
from .precoding import make_basis, mixing_matrix
from .receiver import (
    ProjectedSignal,
    build_sic_plan,
    decoding_order,
    ml_detect,
    project,
    sic_decode,
    sic_decode_per_block,
)
from .topology import allocate_power, assign_groups, build_topology, path_loss

WORKERS_ENV = "TIMNOMA_WORKERS"

EXPERIMENTS = ("ber", "ber_single_user", "rate", "rate_single_user", "ratio")
ORDER_MODES = ("distance", "instantaneous")
FADING_MODES = ("block", "frame")
TDMA_BASELINES = ("full_power_time_share",)

DEFAULT_DISTANCES = (0.5, 1.5, 2.5, 3.5, 4.5)
DEFAULT_SNR_GRID = tuple(float(s) for s in range(0, 31, 2))


@dataclass(frozen=True)
class SimConfig:
    """Complete, immutable description of one experiment."""

    distances: tuple[float, ...] = DEFAULT_DISTANCES
    cell_radius: float = 5.0
    path_loss_exponent: float = 3.0
    group_count: int = 2
    total_power: float = 40.0
    frames: int = 500
    bits_per_frame: int = 6144
    snr_grid_db: tuple[float, ...] = DEFAULT_SNR_GRID
    seed: int = 42
    decoding_order_mode: str = "distance"
    fading_mode: str = "block"
    tdma_baseline_mode: str = "full_power_time_share"
    experiment: str = "ber"

    def __post_init__(self) -> None:
        # normalize to plain tuples of builtin floats so equality, pickling
        # and CSV rendering never depend on the caller's array types
        object.__setattr__(self, "distances", tuple(float(d) for d in self.distances))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))

    def validated(self) -> "SimConfig":
        """Return self after checking every invariant; raise ConfigError
        listing all violations at once."""
        problems = []
        try:
            build_topology(
                self.distances, self.cell_radius, self.path_loss_exponent, self.group_count
            )
        except ValidationError as exc:
            problems.append(str(exc))
        if not (isinstance(self.total_power, (int, float)) and self.total_power > 0):
            problems.append("total_power must be positive")
        if not (isinstance(self.frames, int) and self.frames >= 1):
            problems.append("frames must be a positive integer")
        if not (isinstance(self.bits_per_frame, int) and self.bits_per_frame >= 2):
            problems.append("bits_per_frame must be a positive even integer")
        elif self.bits_per_frame % (2 * max(1, int(self.group_count))) != 0:
            problems.append("bits_per_frame must be divisible by 2*group_count")
        if not self.snr_grid_db:
            problems.append("snr_grid must not be empty")
        elif any(not math.isfinite(s) for s in self.snr_grid_db):
            problems.append("snr_grid values must be finite")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            problems.append("seed must be a non-negative 64-bit integer")
        if self.decoding_order_mode not in ORDER_MODES:
            problems.append(f"decoding_order_mode must be one of {ORDER_MODES}")
        if self.fading_mode not in FADING_MODES:
            problems.append(f"fading_mode must be one of {FADING_MODES}")
        if self.tdma_baseline_mode not in TDMA_BASELINES:
            problems.append(f"tdma_baseline_mode must be one of {TDMA_BASELINES}")
        if self.experiment not in EXPERIMENTS:
            problems.append(f"experiment must be one of {EXPERIMENTS}")
        if problems:
            raise ConfigError("invalid config: " + "; ".join(problems))
        return self

    def noise_variance(self, snr_db: float) -> float:
        """sigma^2 realizing the given transmit SNR at this power budget."""
        return self.total_power * 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class ResultRow:
    snr_db: float
    entity: str  # "1".."K" or "sum"
    metric: str
    value: float
    samples: int
    stderr: float

    def __post_init__(self) -> None:
        if self.value < 0 or (self.metric.startswith("ber") and self.value > 1):
            raise ValidationError(f"{self.metric} value {self.value} out of range")
        if self.stderr < 0:
            raise ValidationError("stderr must be non-negative")
        if self.samples < 1:
            raise ValidationError("samples must be positive")


@dataclass(frozen=True)
class ExperimentResult:
    """Flat result table, ordered by SNR, then user entity, then "sum"."""

    rows: tuple[ResultRow, ...]

    def row(self, snr_db: float, entity: str, metric: str) -> ResultRow:
        for row in self.rows:
            if row.snr_db == snr_db and row.entity == entity and row.metric == metric:
                return row
        raise KeyError((snr_db, entity, metric))

    def series(self, entity: str, metric: str) -> list[tuple[float, float]]:
        """(snr_db, value) pairs for one entity/metric, in SNR order."""
        return [(r.snr_db, r.value) for r in self.rows if r.entity == entity and r.metric == metric]


# ---------------------------------------------------------------------------
# config parsing

_INT_KEYS = ("group_count", "frames", "bits_per_frame", "seed")
_FLOAT_KEYS = ("cell_radius", "path_loss_exponent", "total_power")
_STR_KEYS = ("decoding_order_mode", "fading_mode", "tdma_baseline_mode", "experiment")


def parse_snr_grid(spec: str) -> tuple[float, ...]:
    """Parse an SNR grid: "start:step:stop" (inclusive) or a comma list."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"snr range must be start:step:stop, got {spec!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"bad snr range {spec!r}: {exc}") from exc
        if step <= 0:
            raise ConfigError("snr range step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ConfigError(f"empty snr range {spec!r}")
        return tuple(start + step * i for i in range(count))
    try:
        return tuple(float(p) for p in spec.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad snr list {spec!r}: {exc}") from exc


def parse_config_text(text: str) -> SimConfig:
    """Parse config text into a validated SimConfig.

    Unknown keys, malformed lines and bad values are reported with their
    line number; all invariant violations are then reported together.
    """
    values: dict = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected key = value, got {raw.strip()!r}")
            continue
        key, _, value = (part.strip() for part in line.partition("="))
        try:
            if key == "distances":
                values[key] = tuple(float(p) for p in value.split(","))
            elif key == "snr_grid":
                values["snr_grid_db"] = parse_snr_grid(value)
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _STR_KEYS:
                values[key] = value
            else:
                errors.append(f"line {lineno}: unknown key {key!r}")
        except (ValueError, ConfigError) as exc:
            errors.append(f"line {lineno}: bad value for {key!r}: {exc}")
    if errors:
        raise ConfigError("config parse failed: " + "; ".join(errors))
    return SimConfig(**values).validated()


def parse_config(path) -> SimConfig:
    """Read and parse a config file."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config_text(handle.read())


# ---------------------------------------------------------------------------
# experiment runners

def _worker_count(points: int) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
        if cap < 1:
            raise ConfigError(f"{WORKERS_ENV} must be at least 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, points))


def _map_points(point_fn, config: SimConfig) -> list:
    """Evaluate one function per SNR point, optionally in parallel.

    Results come back in grid order regardless of scheduling, and each
    point derives its randomness only from (seed, point index), so the
    worker count never changes the output.
    """
    points = list(enumerate(config.snr_grid_db))
    workers = _worker_count(len(points))
    if workers == 1:
        return [point_fn(config, index, snr) for index, snr in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(point_fn, config, index, snr) for index, snr in points]
        return [future.result() for future in futures]


def _scene(config: SimConfig):
    topo = build_topology(
        config.distances, config.cell_radius, config.path_loss_exponent, config.group_count
    )
    groups = assign_groups(topo)
    power = allocate_power(topo, config.total_power)
    basis = make_basis(topo.group_count)
    return topo, groups, power, basis


def _ber_counts(config: SimConfig, snr_index: int, snr_db: float, single_user: bool) -> np.ndarray:
    """Per-user bit error counts accumulated over all frames of one point."""
    topo, groups, power, basis = _scene(config)
    count = topo.user_count
    symbols_per_frame = config.bits_per_frame // 2
    gamma = np.array([path_loss(topo, k) for k in range(count)])
    amp = np.sqrt(np.asarray(power.per_user))
    mix = mixing_matrix(power, groups, basis)
    if single_user:
        # zero out every other user's column; with one user this is the
        # hybrid mixing matrix itself, so the two pipelines coincide
        solo_mix = [mix * (np.arange(count) == k) for k in range(count)]
    noise = NoiseModel(config.noise_variance(snr_db))
    per_block_plan = config.fading_mode == "block" and config.decoding_order_mode == "instantaneous"
    static_plan = None
    if config.decoding_order_mode == "distance":
        static_plan = build_sic_plan(range(count), groups)
    errors = np.zeros(count, dtype=np.int64)
    for frame in range(config.frames):
        rng = np.random.default_rng(np.random.SeedSequence((config.seed, snr_index, frame)))
        if config.fading_mode == "block":
            fading = draw_fading(rng, count, blocks=symbols_per_frame)  # (K, S)
        else:
            fading = draw_fading(rng, count)[:, np.newaxis]  # (K, 1), frame-constant
        bits = rng.integers(0, 2, size=(count, config.bits_per_frame))
        symbols = qpsk_modulate(bits)  # (K, S)
        channels = np.sqrt(gamma)[:, np.newaxis] * fading
        gains = gamma[:, np.newaxis] * np.abs(fading) ** 2 / noise.variance
        if not single_user:
            transmit = mix @ symbols  # (T, S)
        plan = static_plan
        if plan is None and not per_block_plan:
            plan = build_sic_plan(decoding_order(gains[:, 0]), groups)
        for k in range(count):
            group = groups.group_of[k]
            if single_user:
                received = add_noise(rng, channels[k] * (solo_mix[k] @ symbols), noise)
                detected = ml_detect(project(received, basis, group), channels[k], amp[k])
            else:
                received = add_noise(rng, channels[k] * transmit, noise)
                projected = ProjectedSignal(project(received, basis, group), channels[k])
                if per_block_plan:
                    detected = sic_decode_per_block(k, projected, gains, groups, power)
                else:
                    detected = sic_decode(k, projected, plan, power).estimate
            errors[k] += int(np.count_nonzero(qpsk_demodulate(detected) != bits[k]))
    return errors


def _hybrid_ber_point(config, snr_index, snr_db):
    return _ber_counts(config, snr_index, snr_db, single_user=False)


def _single_ber_point(config, snr_index, snr_db):
    return _ber_counts(config, snr_index, snr_db, single_user=True)


def _binomial_stderr(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _ber_rows(config: SimConfig, counts: list, metric: str, include_sum: bool) -> tuple:
    user_count = len(config.distances)
    bits_per_user = config.frames * config.bits_per_frame
    rows = []
    for index, snr in enumerate(config.snr_grid_db):
        errors = counts[index]
        for k in range(user_count):
            p = int(errors[k]) / bits_per_user
            rows.append(
                ResultRow(snr, str(k + 1), metric, p, bits_per_user, _binomial_stderr(p, bits_per_user))
            )
        if include_sum:
            total_bits = user_count * bits_per_user
            p = int(errors.sum()) / total_bits
            rows.append(ResultRow(snr, "sum", metric, p, total_bits, _binomial_stderr(p, total_bits)))
    return tuple(rows)


def run_ber_experiment(config: SimConfig) -> ExperimentResult:
    """Framed link-level BER of the hybrid scheme, per user and pooled."""
    config = config.validated()
    if config.experiment != "ber":
        raise ConfigError(f"experiment must be 'ber', got {config.experiment!r}")
    counts = _map_points(_hybrid_ber_point, config)
    return ExperimentResult(_ber_rows(config, counts, "ber", include_sum=True))


def run_single_user_experiment(config: SimConfig) -> ExperimentResult:
    """One-active-user runs: BER at the user's own power share, or the
    full-power single-user rate."""
    config = config.validated()
    if config.experiment == "ber_single_user":
        counts = _map_points(_single_ber_point, config)
        return ExperimentResult(_ber_rows(config, counts, "ber_single", include_sum=False))
    if config.experiment == "rate_single_user":
        stats = _map_points(_rate_point, config)
        return ExperimentResult(_rate_rows(config, stats))
    raise ConfigError(
        f"experiment must be 'ber_single_user' or 'rate_single_user', got {config.experiment!r}"
    )


def _rate_point(config: SimConfig, snr_index: int, snr_db: float) -> dict:
    """Fading-averaged rate statistics at one SNR point."""
    topo, groups, power, _basis = _scene(config)
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, snr_index)))
    fading = draw_fading(rng, topo.user_count, blocks=config.frames).T  # (N, K)
    noise = NoiseModel(config.noise_variance(snr_db))
    out: dict = {}
    if config.experiment in ("rate", "ratio"):
        table = hybrid_rate_table(
            topo, power, groups, fading, noise, config.decoding_order_mode
        )
        out["hybrid_mean"] = table.mean(axis=0)
        out["hybrid_std"] = table.std(axis=0, ddof=1)
        hybrid_sums = table.sum(axis=1)
        out["hybrid_sum_std"] = float(hybrid_sums.std(ddof=1))
    if config.experiment == "rate_single_user":
        table = single_user_rate_table(topo, fading, noise, config.total_power)
        out["single_mean"] = table.mean(axis=0)
        out["single_std"] = table.std(axis=0, ddof=1)
    if config.experiment == "ratio":
        baseline = single_user_rate_table(topo, fading, noise, config.total_power).mean(axis=1)
        out["tdma_mean"] = float(baseline.mean())
        out["tdma_std"] = float(baseline.std(ddof=1))
        out["hybrid_tdma_cov"] = float(np.cov(hybrid_sums, baseline)[0, 1])
    return out


def _rate_rows(config: SimConfig, stats: list) -> tuple:
    user_count = len(config.distances)
    n = config.frames
    rows = []
    for index, snr in enumerate(config.snr_grid_db):
        point = stats[index]
        if config.experiment == "rate":
            record = RateRecord(
                tuple(float(v) for v in point["hybrid_mean"]),
                float(np.sum(point["hybrid_mean"])),
                snr,
                "hybrid",
            )
            for k in range(user_count):
                rows.append(
                    ResultRow(snr, str(k + 1), "rate", record.per_user[k], n,
                              float(point["hybrid_std"][k]) / math.sqrt(n))
                )
            rows.append(
                ResultRow(snr, "sum", "rate", record.sum_rate, n,
                          float(point["hybrid_sum_std"]) / math.sqrt(n))
            )
        elif config.experiment == "rate_single_user":
            for k in range(user_count):
                rows.append(
                    ResultRow(snr, str(k + 1), "rate_single", float(point["single_mean"][k]), n,
                              float(point["single_std"][k]) / math.sqrt(n))
                )
        else:  # ratio
            hybrid_sum = float(np.sum(point["hybrid_mean"]))
            tdma_sum = point["tdma_mean"]
            ratio = hybrid_sum / tdma_sum
            hybrid_var = point["hybrid_sum_std"] ** 2
            tdma_var = point["tdma_std"] ** 2
            cov = point["hybrid_tdma_cov"]
            # delta method for a ratio of two correlated sample means
            ratio_var = (
                hybrid_var / tdma_sum**2
                + hybrid_sum**2 * tdma_var / tdma_sum**4
                - 2.0 * hybrid_sum * cov / tdma_sum**3
            ) / n
            rows.append(ResultRow(snr, "sum", "rate_hybrid", hybrid_sum, n,
                                  float(point["hybrid_sum_std"]) / math.sqrt(n)))
            rows.append(ResultRow(snr, "sum", "rate_tdma", tdma_sum, n,
                                  float(point["tdma_std"]) / math.sqrt(n)))
            rows.append(ResultRow(snr, "sum", "rate_ratio", ratio, n,
                                  math.sqrt(max(ratio_var, 0.0))))
    return tuple(rows)


def run_rate_experiment(config: SimConfig) -> ExperimentResult:
    """Fading-averaged achievable rates, or the hybrid/TDMA sum-rate ratio."""
    config = config.validated()
    if config.experiment not in ("rate", "ratio"):
        raise ConfigError(f"experiment must be 'rate' or 'ratio', got {config.experiment!r}")
    stats = _map_points(_rate_point, config)
    return ExperimentResult(_rate_rows(config, stats))


def run_experiment(config: SimConfig) -> ExperimentResult:
    """Dispatch on config.experiment."""
    config = config.validated()
    if config.experiment == "ber":
        return run_ber_experiment(config)
    if config.experiment in ("ber_single_user", "rate_single_user"):
        return run_single_user_experiment(config)
    return run_rate_experiment(config)


def emit_csv(result: ExperimentResult, destination) -> None:
    """Write the result table as CSV.

    ``destination`` is a path or a writable text file object. Floats are
    rendered with repr (shortest round-trip), so identical results yield
    byte-identical files.
    """
    def _write(handle) -> None:
        handle.write("snr_db,entity,metric,value,samples,stderr\n")
        for row in result.rows:
            handle.write(
                f"{row.snr_db!r},{row.entity},{row.metric},{row.value!r},{row.samples},{row.stderr!r}\n"
            )

    if hasattr(destination, "write"):
        _write(destination)
    else:
        with open(destination, "w", encoding="utf-8", newline="\n") as handle:
            _write(handle)


def replace(config: SimConfig, **changes) -> SimConfig:
    """dataclasses.replace with validation."""
    return dataclasses.replace(config, **changes).validated()
