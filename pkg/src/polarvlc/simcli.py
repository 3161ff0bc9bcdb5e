"""
Experiment runner for the polar-coded VLC link.

Four experiments share one plain ``key = value`` config format:

* ``weight_dist``       codeword weight histogram per code rate
* ``run_length``        average run-length histogram per codeword
* ``ber_sweep``         coded BER/FER over an SNR or Eb/N0 grid
* ``efficiency_table``  overall coding efficiency vs dimming

Example::

    polarvlc --config sweep.cfg --trials 2000 --out sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .channel import ChannelParams, demodulate_llr, ebn0_to_snr
from .codec import decode_batch, encode_batch
from .construct import DEFAULT_Z0, CodeSpec, construct
from .errors import ConfigError, ParameterError
from .frame import (InterleaverMap, assemble_frame, deinterleave, disassemble_frame,
                    interleave, plan_dimming, run_length_counts)
from .metrics import TrialLedger, WeightHistogram, efficiency_table, summarize_ber

log = logging.getLogger(__name__)

EXPERIMENTS = ("weight_dist", "run_length", "ber_sweep", "efficiency_table")

CSV_HEADERS = {
    "ber_sweep": ["rate", "dimming", "axis", "axis_db", "ber", "fer", "half_width", "bits_sent"],
    "weight_dist": ["rate", "weight", "count"],
    "run_length": ["rate", "run_length", "avg_count"],
    "efficiency_table": ["dimming", "scheme", "code_rate", "efficiency"],
}

BATCH = 1000
EARLY_STOP_BLOCK_ERRORS = 200


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "ber_sweep"
    n: int = 1024
    rates: tuple = (0.25, 0.5, 0.75)
    dimmings: tuple = (0.5,)
    axis: str = "snr"
    grid_db: tuple = (0.0, 9.0, 0.5)
    trials: int = 10000
    interleaver: str = "rowcol:32x32"
    seed: int = 2017
    out: str = "results.csv"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
        if self.n < 2 or self.n & (self.n - 1):
            raise ConfigError("n", f"must be a power of two >= 2, got {self.n}")
        if not self.rates:
            raise ConfigError("rates", "must be non-empty")
        for r in self.rates:
            if not 0.0 < r <= 1.0 or round(r * self.n) < 1:
                raise ConfigError("rates", f"rate {r} gives no message bits or K > N")
        if not self.dimmings:
            raise ConfigError("dimmings", "must be non-empty")
        for d in self.dimmings:
            if not 0.0 < d < 1.0:
                raise ConfigError("dimmings", f"dimming {d} outside (0, 1)")
        if self.axis not in ("snr", "ebn0"):
            raise ConfigError("axis", f"must be snr or ebn0, got {self.axis!r}")
        start, stop, step = self.grid_db
        if not all(map(math.isfinite, self.grid_db)) or step <= 0 or stop < start:
            raise ConfigError("grid_db", "need finite start <= stop and step > 0")
        if self.trials < 1:
            raise ConfigError("trials", f"must be >= 1, got {self.trials}")
        try:
            InterleaverMap.from_spec(self.interleaver, self.n)
        except ParameterError as exc:
            raise ConfigError("interleaver", str(exc)) from None

    @property
    def grid(self) -> list:
        start, stop, step = self.grid_db
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]

    def message_length(self, rate: float) -> int:
        return int(round(rate * self.n))


_PARSERS = {
    "experiment": str,
    "n": int,
    "rates": lambda s: tuple(float(v) for v in s.split(",") if v.strip()),
    "dimmings": lambda s: tuple(float(v) for v in s.split(",") if v.strip()),
    "axis": str,
    "grid_db": lambda s: tuple(float(v) for v in s.split(":")),
    "trials": int,
    "interleaver": str,
    "seed": int,
    "out": str,
}


def parse_value(key: str, text: str):
    if key not in _PARSERS:
        raise ConfigError(key, "unknown config key")
    try:
        value = _PARSERS[key](text.strip())
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {text.strip()!r}: {exc}") from None
    if key == "grid_db" and len(value) != 3:
        raise ConfigError(key, "expected start:stop:step")
    return value


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into raw overrides; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {raw!r}")
        key = key.strip()
        values[key] = parse_value(key, val)
    return values


def load_config(path: str | None = None, **overrides) -> ExperimentConfig:
    values = {}
    if path is not None:
        with open(path) as fh:
            values.update(parse_config_text(fh.read()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def format_config(cfg: ExperimentConfig) -> str:
    parts = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name in ("rates", "dimmings"):
            v = ",".join(_fmt(x) for x in v)
        elif f.name == "grid_db":
            v = ":".join(_fmt(x) for x in v)
        parts.append(f"{f.name} = {v}")
    return "\n".join(parts) + "\n"


def _fmt(x) -> str:
    return f"{x:g}" if isinstance(x, float) else str(x)


def _seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    # keyed child streams: independent of scheduling order
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))


def _shard_sizes(trials: int, workers: int) -> list:
    base, extra = divmod(trials, workers)
    return [base + (w < extra) for w in range(workers)]


def simulate_shard(spec: CodeSpec, dimming: float, interleaver: str, snr_db: float,
                   trials: int, seq: np.random.SeedSequence,
                   stop_after: int | None = None) -> tuple:
    """
    Push ``trials`` random messages through the full link.

    Returns ``(bit_errors, bits_sent, block_errors, blocks_sent)``.
    """
    msg_rng, noise_rng = (np.random.default_rng(s) for s in seq.spawn(2))
    plan = plan_dimming(spec.n_bits, dimming)
    imap = InterleaverMap.from_spec(interleaver, plan.frame_len)
    params = ChannelParams(snr_db, spec.rate)
    sigma = params.noise_sigma
    bit_err = bits = blk_err = blocks = 0
    done = 0
    while done < trials:
        b = min(BATCH, trials - done)
        msgs = msg_rng.integers(0, 2, size=(b, spec.k_bits), dtype=np.uint8)
        frames = interleave(assemble_frame(encode_batch(spec, msgs), plan), imap)
        samples = params.amplitude * frames + noise_rng.normal(0.0, sigma, frames.shape)
        llrs = disassemble_frame(deinterleave(demodulate_llr(samples, params), imap), plan)
        errors = decode_batch(spec, llrs) != msgs
        per_block = errors.sum(axis=1)
        bit_err += int(per_block.sum())
        blk_err += int(np.count_nonzero(per_block))
        bits += errors.size
        blocks += b
        done += b
        if stop_after is not None and blk_err >= stop_after:
            break
    return bit_err, bits, blk_err, blocks


def _run_shard(args):
    return simulate_shard(*args)


def run_ber_sweep(cfg: ExperimentConfig, workers: int = 1, early_stop: bool = False,
                  z0: float = DEFAULT_Z0) -> list:
    """
    One row per (rate, dimming, grid point), in config order.

    Totals depend only on the config, seed and worker count.
    """
    if workers < 1:
        raise ConfigError("workers", f"must be >= 1, got {workers}")
    stop_after = -(-EARLY_STOP_BLOCK_ERRORS // workers) if early_stop else None
    points, jobs = [], []
    for rate in cfg.rates:
        spec = construct(cfg.n, cfg.message_length(rate), z0)
        for d in cfg.dimmings:
            for x_db in cfg.grid:
                snr_db = x_db if cfg.axis == "snr" else ebn0_to_snr(x_db, spec.rate)
                p = len(points)
                points.append(TrialLedger(rate, d, cfg.axis, x_db))
                for w, t in enumerate(_shard_sizes(cfg.trials, workers)):
                    if t:
                        jobs.append((p, (spec, d, cfg.interleaver, snr_db, t,
                                         _seed_sequence(cfg.seed, p, w), stop_after)))
    if workers == 1:
        results = map(_run_shard, (a for _, a in jobs))
    else:
        pool = ProcessPoolExecutor(workers)
        results = pool.map(_run_shard, [a for _, a in jobs])
    ledgers = list(points)
    try:
        for (p, _), (be, bs, ke, ks) in zip(jobs, results):
            ledgers[p] = ledgers[p].record(be, bs, ke, ks)
    finally:
        if workers > 1:
            pool.shutdown()
    rows = []
    for led in ledgers:
        ber, fer, half = summarize_ber(led)
        log.info("rate=%g d=%g %s=%g dB  BER=%.3e FER=%.3e", led.rate, led.dimming,
                 led.axis, led.axis_db, ber, fer)
        rows.append([_fmt(led.rate), _fmt(led.dimming), led.axis, _fmt(led.axis_db),
                     f"{ber:.6e}", f"{fer:.6e}", f"{half:.6e}", str(led.bits_sent)])
    return rows


def _random_codewords(cfg: ExperimentConfig, rate_index: int, spec: CodeSpec):
    rng = np.random.default_rng(_seed_sequence(cfg.seed, rate_index))
    done = 0
    while done < cfg.trials:
        b = min(BATCH, cfg.trials - done)
        yield encode_batch(spec, rng.integers(0, 2, size=(b, spec.k_bits), dtype=np.uint8))
        done += b


def weight_histograms(cfg: ExperimentConfig, z0: float = DEFAULT_Z0) -> dict:
    """Rate -> :class:`WeightHistogram` over ``cfg.trials`` random codewords."""
    out = {}
    for i, rate in enumerate(cfg.rates):
        spec = construct(cfg.n, cfg.message_length(rate), z0)
        hist = WeightHistogram(cfg.n)
        for cws in _random_codewords(cfg, i, spec):
            hist.record(cws)
        out[rate] = hist
    return out


def run_weight_dist(cfg: ExperimentConfig, z0: float = DEFAULT_Z0) -> list:
    rows = []
    for rate, hist in weight_histograms(cfg, z0).items():
        log.info("rate=%g mean weight %.2f std %.2f", rate, hist.mean, hist.std)
        for w in np.flatnonzero(hist.counts):
            rows.append([_fmt(rate), str(w), str(hist.counts[w])])
    return rows


@dataclass
class RunLengthStats:
    """Run-length counts summed over raw codewords and over transmit frames."""

    rate: float
    codewords: int
    n_code: int
    counts: np.ndarray
    frame_max_run: dict

    @property
    def avg_counts(self) -> np.ndarray:
        return self.counts / self.codewords

    @property
    def max_run(self) -> int:
        return int(np.flatnonzero(self.counts).max())

    def bits_in_runs(self, below: int) -> float:
        """Average bits per codeword that sit in runs shorter than ``below``."""
        lengths = np.arange(min(below, self.counts.size))
        return float(lengths @ self.avg_counts[:lengths.size])


def run_length_stats(cfg: ExperimentConfig, z0: float = DEFAULT_Z0) -> dict:
    """
    Rate -> :class:`RunLengthStats`.

    Codeword statistics use the raw codewords; ``frame_max_run`` records the
    longest run after CS insertion and interleaving at each configured
    dimming level.
    """
    out = {}
    for i, rate in enumerate(cfg.rates):
        spec = construct(cfg.n, cfg.message_length(rate), z0)
        plans = {d: plan_dimming(cfg.n, d) for d in cfg.dimmings}
        maps = {d: InterleaverMap.from_spec(cfg.interleaver, p.frame_len) for d, p in plans.items()}
        counts = np.zeros(cfg.n + 1, dtype=np.int64)
        frame_max = {d: 0 for d in cfg.dimmings}
        for cws in _random_codewords(cfg, i, spec):
            counts += run_length_counts(cws)
            for d, plan in plans.items():
                fr = interleave(assemble_frame(cws, plan), maps[d])
                c = run_length_counts(fr)
                frame_max[d] = max(frame_max[d], int(np.flatnonzero(c).max()))
        out[rate] = RunLengthStats(rate, cfg.trials, cfg.n, counts, frame_max)
    return out


def run_run_length(cfg: ExperimentConfig, z0: float = DEFAULT_Z0) -> list:
    rows = []
    for rate, st in run_length_stats(cfg, z0).items():
        log.info("rate=%g bits in runs <5: %.1f, max run %d, frame max runs %s",
                 rate, st.bits_in_runs(5), st.max_run, st.frame_max_run)
        avg = st.avg_counts
        for length in range(1, st.max_run + 1):
            rows.append([_fmt(rate), str(length), f"{avg[length]:.6f}"])
    return rows


def run_efficiency_table(cfg: ExperimentConfig) -> list:
    return [[_fmt(d), scheme, _fmt(rc), f"{eff:.6g}"]
            for d, scheme, rc, eff in efficiency_table(cfg.rates, cfg.dimmings, cfg.n)]


def run_experiment(cfg: ExperimentConfig, workers: int = 1, early_stop: bool = False) -> list:
    if cfg.experiment == "ber_sweep":
        return run_ber_sweep(cfg, workers, early_stop)
    if cfg.experiment == "weight_dist":
        return run_weight_dist(cfg)
    if cfg.experiment == "run_length":
        return run_run_length(cfg)
    return run_efficiency_table(cfg)


def render_csv(experiment: str, rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADERS[experiment])
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(path: str, experiment: str, rows: list) -> None:
    text = render_csv(experiment, rows)
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polarvlc", description=__doc__.split("\n\n")[0])
    p.add_argument("-c", "--config", help="key = value config file")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--n", type=str, help="codeword length N")
    p.add_argument("--rates", help="comma list of code rates")
    p.add_argument("--dimmings", help="comma list of dimming ratios")
    p.add_argument("--axis", choices=("snr", "ebn0"))
    p.add_argument("--grid-db", dest="grid_db", help="start:stop:step in dB")
    p.add_argument("--trials", type=str, help="codewords per operating point")
    p.add_argument("--interleaver", help="rowcol:RxC | seeded:S | none")
    p.add_argument("--seed", type=str)
    p.add_argument("--out", help="output CSV path, '-' for stdout")
    p.add_argument("--workers", type=int, default=1, help="worker processes (ber_sweep)")
    p.add_argument("--early-stop", action="store_true",
                   help=f"stop a point after {EARLY_STOP_BLOCK_ERRORS} block errors")
    p.add_argument("--show-config", action="store_true", help="print the resolved config")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        overrides = {}
        for key in _PARSERS:
            val = getattr(args, key, None)
            if val is not None:
                overrides[key] = val if key in ("experiment", "axis") else parse_value(key, val)
        cfg = load_config(args.config, **overrides)
        if args.show_config:
            sys.stderr.write(format_config(cfg))
        rows = run_experiment(cfg, args.workers, args.early_stop)
        write_csv(cfg.out, cfg.experiment, rows)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
