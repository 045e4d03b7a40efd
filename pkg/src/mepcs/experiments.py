"""Seeded experiment harness: recovery sweeps over sampling rate, robustness
sweeps over weight error, empirical-convergence studies and CSV/SVG reports.

Seeding: trial ``t`` under master seed ``s`` owns the stream
``SeedSequence(s, spawn_key=(t,))``; its first four 32-bit words seed the
source, the sensing matrix, the annealer and the weight perturbation. None
of them depends on the rate or on ``eps_w``, so the matrices for different
rates are row-prefixes of one another and the ``eps_w = 0`` column of a
robustness sweep reproduces the plain recovery sweep.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .empirical import conditional_empirical_entropy, empirical_distribution, read_distribution, total_variation
from .errors import ConfigError
from .quantization import QuantSpec, build_alphabet, quantize_sequence
from .sensing import SensingSystem, generate_matrix
from .solvers import (
    LMEP,
    AnnealSchedule,
    CostSpec,
    check_input_weight_chain,
    check_minimizer_equivalence,
    check_sandwich_lemma,
    normalized_error,
    solve_anneal,
    solve_exhaustive,
)
from .sources import FINITE_MARKOV, SPARSE_IID, SourceModel, sample_source, true_block_distribution
from .weights import (
    WeightVector,
    conditional_kl_weight_gap,
    default_cap,
    linear_structure,
    perturb_weights,
    weight_linf_distance,
    weights_from_distribution,
    weights_from_empirical,
)

OUTPUT_ENV = "MEPCS_OUTPUT_DIR"
SCHEMES = ("lmep", "empirical-input", "true-distribution", "perturbed", "mismatched")
SOLVERS = ("anneal", "exhaustive")
HEADER = (
    "rate", "eps_w", "trial", "seed", "m", "n", "b", "k", "lam", "mode",
    "normalized_error", "success", "cost", "residual", "runtime",
)
SUMMARY_HEADER = ("rate", "eps_w", "trials", "success_fraction", "mean_error")


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "results"))


def schedule_b(n: int, r: float) -> int:
    """``floor(r log2 log2 n)``, at least 1."""
    return max(1, math.floor(r * math.log2(math.log2(n))))


def schedule_lambda(n: int, r: float) -> float:
    """``(log2 n)^(2r)``."""
    return math.log2(n) ** (2 * r)


def _floats(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).replace(" ", "").split(",") if v)


def _matrix(text) -> np.ndarray:
    if not isinstance(text, str):
        return np.asarray(text, dtype=float)
    return np.array([_floats(row) for row in text.split(";") if row.strip()])


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _opt(conv):
    def parse(text):
        if text is None or str(text).strip().lower() in ("", "none", "auto"):
            return None
        return conv(text)
    return parse


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment. ``b``, ``lam`` and ``threshold`` default to the
    ``r`` schedule and the quantization floor when left as ``None``."""

    source: str = SPARSE_IID
    p: float = 0.2
    states: tuple = (0.0, 0.5)
    transition: tuple = ((0.9, 0.1), (0.1, 0.9))
    b: int | None = None
    lo: float | None = None
    hi: float | None = None
    closed: bool | None = None
    k: int = 0
    n: int = 96
    rates: tuple = (0.1, 0.4, 0.7)
    trials: int = 50
    solver: str = "anneal"
    sweeps: int = 200
    restarts: int = 8
    t0: float = 1.0
    t_end: float = 1e-3
    weights: str = "true-distribution"
    perturb_base: str = "true-distribution"
    eps_w: tuple = (0.0,)
    q_file: str | None = None
    lam: float | None = None
    r: float = 1.5
    delta: float = 0.1
    threshold: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.source not in (SPARSE_IID, FINITE_MARKOV):
            raise ConfigError(f"unknown source {self.source!r}")
        if not self.rates or any(not 0 < r <= 1 for r in self.rates):
            raise ConfigError("rates must lie in (0, 1]")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n < self.k + 2:
            raise ConfigError("need n >= k + 2")
        if self.k < 0:
            raise ConfigError("k must be >= 0")
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {SOLVERS}")
        if self.weights not in SCHEMES:
            raise ConfigError(f"weights must be one of {SCHEMES}")
        if self.perturb_base not in ("true-distribution", "empirical-input"):
            raise ConfigError("perturb_base must be true-distribution or empirical-input")
        if self.weights == "mismatched" and not self.q_file:
            raise ConfigError("mismatched weights need q_file")
        if any(e < 0 for e in self.eps_w):
            raise ConfigError("eps_w must be >= 0")
        if self.b is not None and self.b < 1:
            raise ConfigError("b must be >= 1")
        self.model()  # validates source parameters

    # derived pieces

    def model(self) -> SourceModel:
        try:
            if self.source == SPARSE_IID:
                return SourceModel.sparse_iid(self.p)
            return SourceModel.markov(np.asarray(self.states, float), np.asarray(self.transition, float))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def bits(self) -> int:
        return self.b if self.b is not None else schedule_b(self.n, self.r)

    @property
    def lam_value(self) -> float:
        return self.lam if self.lam is not None else schedule_lambda(self.n, self.r)

    @property
    def success_threshold(self) -> float:
        return self.threshold if self.threshold is not None else 2.0 ** -self.bits + 0.01

    def quant(self) -> QuantSpec:
        model = self.model()
        lo, hi = model.support()
        lo = self.lo if self.lo is not None else lo
        hi = self.hi if self.hi is not None else hi
        closed = self.closed
        if closed is None:
            # the continuous part of a sparse source never reaches hi
            closed = not (model.is_iid and hi == model.hi)
        return QuantSpec(self.bits, lo, hi, closed=closed)

    def schedule(self) -> AnnealSchedule:
        return AnnealSchedule(t0=self.t0, t_end=self.t_end, sweeps=self.sweeps, restarts=self.restarts)

    # key-value I/O

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        unknown = set(values) - set(_PARSERS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, raw in values.items():
            try:
                kwargs[key] = _PARSERS[key](raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        return cls(**kwargs)

    def with_overrides(self, values: dict) -> "ExperimentConfig":
        unknown = set(values) - set(_PARSERS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            parsed = {key: _PARSERS[key](raw) for key, raw in values.items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad override: {exc}") from exc
        return replace(self, **parsed)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "transition":
                v = ";".join(",".join(repr(float(x)) for x in row) for row in v)
            elif isinstance(v, tuple):
                v = ",".join(repr(float(x)) for x in v)
            lines.append(f"{f.name} = {'none' if v is None else v}")
        return "\n".join(lines) + "\n"


_PARSERS = {
    "source": str,
    "p": float,
    "states": _floats,
    "transition": lambda t: tuple(tuple(row) for row in _matrix(t).tolist()),
    "b": _opt(int),
    "lo": _opt(float),
    "hi": _opt(float),
    "closed": _opt(_bool),
    "k": int,
    "n": int,
    "rates": _floats,
    "trials": int,
    "solver": str,
    "sweeps": int,
    "restarts": int,
    "t0": float,
    "t_end": float,
    "weights": str,
    "perturb_base": str,
    "eps_w": _floats,
    "q_file": _opt(str),
    "lam": _opt(float),
    "r": float,
    "delta": float,
    "threshold": _opt(float),
    "seed": int,
}
CONFIG_KEYS = tuple(_PARSERS)


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    values = parse_config_text(Path(path).read_text(encoding="utf-8"))
    values.update(overrides or {})
    return ExperimentConfig.from_mapping(values)


# seeding


def trial_seeds(master_seed: int, trial: int) -> dict[str, int]:
    words = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial),)).generate_state(4)
    return dict(zip(("source", "matrix", "anneal", "weights"), (int(w) for w in words)))


# reports


@dataclass(frozen=True)
class SweepRow:
    rate: float
    eps_w: float
    trial: int
    seed: int
    m: int
    n: int
    b: int
    k: int
    lam: float
    mode: str
    normalized_error: float
    success: bool
    cost: float
    residual: float
    runtime: float

    def key(self):
        return (self.rate, self.eps_w, self.seed)

    def data(self):
        """Every column but runtime."""
        return tuple(getattr(self, h) for h in HEADER if h != "runtime")


@dataclass(frozen=True)
class CellSummary:
    rate: float
    eps_w: float
    trials: int
    success_fraction: float
    mean_error: float


@dataclass
class SweepReport:
    rows: list = field(default_factory=list)
    threshold: float | None = None

    def sorted(self) -> "SweepReport":
        return SweepReport(sorted(self.rows, key=SweepRow.key), self.threshold)

    def summary(self) -> list[CellSummary]:
        cells: dict = {}
        for row in self.rows:
            cells.setdefault((row.rate, row.eps_w), []).append(row)
        out = []
        for (rate, eps), rows in sorted(cells.items()):
            out.append(CellSummary(
                rate, eps, len(rows),
                sum(r.success for r in rows) / len(rows),
                float(np.mean([r.normalized_error for r in rows])),
            ))
        return out

    def success_fraction(self, rate: float, eps_w: float = 0.0) -> float:
        for cell in self.summary():
            if math.isclose(cell.rate, rate) and math.isclose(cell.eps_w, eps_w):
                return cell.success_fraction
        raise KeyError((rate, eps_w))

    def threshold_rates(self, level: float = 0.9) -> dict[float, float | None]:
        """Per ``eps_w``: the smallest swept rate whose success fraction
        reaches ``level`` (``None`` if no rate does)."""
        out: dict = {}
        for cell in self.summary():
            out.setdefault(cell.eps_w, None)
            if out[cell.eps_w] is None and cell.success_fraction >= level:
                out[cell.eps_w] = cell.rate
        return out

    def threshold_shifts(self, level: float = 0.9) -> dict[float, float | None]:
        """Threshold rate at each ``eps_w`` minus the one at ``eps_w = 0``."""
        thr = self.threshold_rates(level)
        base = thr.get(0.0)
        return {e: (None if t is None or base is None else t - base) for e, t in thr.items()}


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(report: SweepReport, path, plot=None, timing: bool = True) -> Path:
    """Write the rows as CSV under a fixed header, then a ``#``-prefixed
    summary block. ``timing=False`` blanks the runtime column so that
    identical runs produce identical files. ``plot`` names an optional
    SVG of success fraction against rate."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report = report.sorted()
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for row in report.rows:
            vals = [_fmt(getattr(row, h)) for h in HEADER]
            if not timing:
                vals[-1] = ""
            w.writerow(vals)
        if report.rows:
            fh.write("# summary\n")
            fh.write("# " + ",".join(SUMMARY_HEADER) + "\n")
            for c in report.summary():
                fh.write("# " + ",".join(_fmt(getattr(c, h)) for h in SUMMARY_HEADER) + "\n")
            for eps, rate in report.threshold_rates().items():
                fh.write(f"# threshold_rate(eps_w={eps!r}) = {rate!r}\n")
    if plot is not None:
        write_svg_plot(report, plot)
    return path


def parse_report(path) -> SweepReport:
    rows = []
    with Path(path).open(encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = tuple(next(reader, ()))
    if header != HEADER:
        raise ConfigError(f"unexpected report header {header}")
    for vals in reader:
        if not vals:
            continue
        rec = dict(zip(HEADER, vals))
        rows.append(SweepRow(
            rate=float(rec["rate"]), eps_w=float(rec["eps_w"]), trial=int(rec["trial"]), seed=int(rec["seed"]),
            m=int(rec["m"]), n=int(rec["n"]), b=int(rec["b"]), k=int(rec["k"]), lam=float(rec["lam"]),
            mode=rec["mode"], normalized_error=float(rec["normalized_error"]), success=rec["success"] == "1",
            cost=float(rec["cost"]), residual=float(rec["residual"]),
            runtime=float(rec["runtime"]) if rec["runtime"] else 0.0,
        ))
    return SweepReport(rows)


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def write_svg_plot(report: SweepReport, path, width: int = 480, height: int = 320) -> Path:
    """Success fraction against rate, one polyline per ``eps_w``."""
    pad = 48
    sx = lambda r: pad + r * (width - 2 * pad)  # noqa: E731
    sy = lambda f: height - pad - f * (height - 2 * pad)  # noqa: E731
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{sy(0)}" x2="{sx(1)}" y2="{sy(0)}" stroke="black"/>',
        f'<line x1="{pad}" y1="{sy(0)}" x2="{pad}" y2="{sy(1)}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">m/n</text>',
        f'<text x="12" y="{height / 2}" transform="rotate(-90 12 {height / 2})" text-anchor="middle">success</text>',
    ]
    for t in (0.0, 0.5, 1.0):
        parts.append(f'<text x="{sx(t)}" y="{sy(0) + 16}" text-anchor="middle" font-size="10">{t:g}</text>')
        parts.append(f'<text x="{pad - 6}" y="{sy(t) + 4}" text-anchor="end" font-size="10">{t:g}</text>')
    curves: dict = {}
    for c in report.summary():
        curves.setdefault(c.eps_w, []).append((c.rate, c.success_fraction))
    for i, (eps, pts) in enumerate(sorted(curves.items())):
        color = _COLORS[i % len(_COLORS)]
        coords = " ".join(f"{sx(r):.2f},{sy(f):.2f}" for r, f in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        parts.append(f'<text x="{width - pad + 4}" y="{pad + 14 * i}" fill="{color}" font-size="10">eps_w={eps:g}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path


# sweeps


def build_weights(cfg: ExperimentConfig, model, quant, xq):
    """Weights for ``cfg.weights`` (None for LMEP); ``xq`` is the quantized
    input, used only by the empirical-input scheme."""
    order = cfg.k + 1
    scheme = cfg.perturb_base if cfg.weights == "perturbed" else cfg.weights
    if scheme == "lmep":
        return None
    if scheme == "empirical-input":
        return weights_from_empirical(empirical_distribution(xq, order))
    if scheme == "mismatched":
        q = read_distribution(cfg.q_file, build_alphabet(quant))
        if q.order != order:
            raise ConfigError(f"q_file holds order-{q.order} blocks, need order {order}")
        return weights_from_distribution(q, b=cfg.bits)
    return weights_from_distribution(true_block_distribution(model, quant, order), b=cfg.bits)


def run_trial(cfg: ExperimentConfig, trial: int, rate: float, eps_w: float = 0.0) -> SweepRow:
    """One independent unit of work; depends only on its arguments."""
    t_start = time.perf_counter()
    seeds = trial_seeds(cfg.seed, trial)
    model = cfg.model()
    quant = cfg.quant()
    n = cfg.n
    x = sample_source(model, n, seeds["source"])
    xq = quantize_sequence(x, quant)
    m = max(1, int(round(rate * n)))
    A = generate_matrix(m, n, seeds["matrix"])
    y = A @ x
    spec = CostSpec(LMEP, cfg.k, quant, SensingSystem(A, cfg.lam_value), y)
    w = build_weights(cfg, model, quant, xq)
    if w is not None:
        if eps_w > 0 and cfg.weights != "mismatched":
            w = perturb_weights(w, eps_w, cfg.bits, seeds["weights"])
        spec = spec.with_weights(w)
    if cfg.solver == "exhaustive":
        res = solve_exhaustive(spec)
    else:
        res = solve_anneal(spec, cfg.schedule(), seed=seeds["anneal"])
    err = normalized_error(x, res.xhat)
    return SweepRow(
        rate=float(rate), eps_w=float(eps_w), trial=trial, seed=seeds["source"], m=m, n=n, b=cfg.bits,
        k=cfg.k, lam=float(cfg.lam_value), mode=spec.mode, normalized_error=err,
        success=bool(err < cfg.success_threshold), cost=float(res.cost), residual=float(res.residual_term),
        runtime=time.perf_counter() - t_start,
    )


def run_recovery_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Every (rate, trial) with unperturbed weights."""
    rows = [run_trial(cfg, t, rate) for rate in cfg.rates for t in range(cfg.trials)]
    return SweepReport(rows, cfg.success_threshold).sorted()


def run_robustness_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Grid over (rate, eps_w).

    ``perturbed`` adds bounded noise of sup-norm ``eps_w * b`` to the
    ``perturb_base`` weights. With ``mismatched`` weights the ``eps_w``
    column holds the measured sup-distance to the true weights, divided
    by b.
    """
    if cfg.weights not in ("perturbed", "mismatched"):
        raise ConfigError("robustness sweeps need weights = perturbed or mismatched")
    if cfg.weights == "mismatched":
        model, quant = cfg.model(), cfg.quant()
        truth = weights_from_distribution(true_block_distribution(model, quant, cfg.k + 1), b=cfg.bits)
        measured = weight_linf_distance(build_weights(cfg, model, quant, None), truth, cfg.bits)
        rows = [replace(run_trial(cfg, t, rate), eps_w=measured) for rate in cfg.rates for t in range(cfg.trials)]
    else:
        rows = [run_trial(cfg, t, rate, eps) for eps in cfg.eps_w for rate in cfg.rates for t in range(cfg.trials)]
    return SweepReport(rows, cfg.success_threshold).sorted()


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    seed: int
    l1: float
    kl_block: float
    kl_conditional: float


CONVERGENCE_HEADER = ("n", "seed", "l1", "kl_block", "kl_conditional")


def run_convergence_study(model: SourceModel, quant: QuantSpec, k: int, n_values, seeds=range(10)) -> list[ConvergenceRow]:
    """L1 distance between the empirical and true order-(k+1) block laws,
    plus the KL gap, for each ``n`` and seed. The same seed is reused
    across ``n`` so rows pair up."""
    order = k + 1
    truth = true_block_distribution(model, quant, order)
    rows = []
    for n in n_values:
        for s in seeds:
            xq = quantize_sequence(sample_source(model, int(n), int(s)), quant)
            p_hat = empirical_distribution(xq, order)
            l1, _ = total_variation(p_hat, truth)
            gap = conditional_kl_weight_gap(p_hat, truth, quant.b)
            rows.append(ConvergenceRow(int(n), int(s), l1, gap.block, gap.conditional))
    return rows


def emit_convergence(rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONVERGENCE_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, h)) for h in CONVERGENCE_HEADER])
    return path


# verification suites


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.passed}/{self.total}"


BINARY = QuantSpec(1, 0.0, 1.0, closed=False)


def random_lmep_instance(seed: int, n: int = 6, m: int = 4, quant: QuantSpec = BINARY, k: int = 1) -> tuple[CostSpec, np.ndarray]:
    """Grid-valued x, Gaussian A, noisy y = A x + 0.1 z, lam uniform in [0.5, 50]."""
    rng = np.random.default_rng([seed, n, m])
    alphabet = build_alphabet(quant)
    x = alphabet[rng.integers(0, alphabet.size, size=n)]
    A = generate_matrix(m, n, int(rng.integers(2 ** 31)))
    y = A @ x + 0.1 * rng.normal(size=m)
    lam = float(rng.uniform(0.5, 50))
    return CostSpec(LMEP, k, quant, SensingSystem(A, lam), y), x


def verify_equivalence(instances: int = 100, seed: int = 0) -> SuiteResult:
    """LMEP optimum vs the LMEP cost of the AMEP minimizer built from it."""
    res = SuiteResult("minimizer-equivalence", 0, instances)
    for i in range(instances):
        spec, _ = random_lmep_instance(seed * 100_003 + i, m=(2, 4)[i % 2])
        rep = check_minimizer_equivalence(spec)
        if rep.passed and rep.structure_exact_equal and abs(rep.residual_difference) <= 1e-10:
            res.passed += 1
        else:
            res.failures.append(rep)
    return res


def verify_input_weights(instances: int = 100, seed: int = 0) -> SuiteResult:
    res = SuiteResult("input-weight-chain", 0, instances)
    for i in range(instances):
        spec, x = random_lmep_instance(seed * 100_003 + i, m=(2, 4)[i % 2])
        rep = check_input_weight_chain(spec, x)
        res.passed += rep.passed
        if not rep.passed:
            res.failures.append(rep)
    return res


def verify_sandwich(instances: int = 100, eps: float = 0.25, seed: int = 0) -> SuiteResult:
    res = SuiteResult(f"sandwich(eps={eps:g})", 0, instances)
    for i in range(instances):
        spec, _ = random_lmep_instance(seed * 100_003 + i, m=(2, 4)[i % 2])
        rng = np.random.default_rng([seed, i, 7])
        cap = default_cap(1, spec.k)
        w = WeightVector(spec.k + 1, spec.alphabet, rng.uniform(0, 4, (2,) * (spec.k + 1)), cap)
        rep = check_sandwich_lemma(spec.with_weights(w), eps, seed=int(rng.integers(2 ** 31)))
        res.passed += rep.passed
        if not rep.passed:
            res.failures.append(rep)
    return res


def verify_entropy_identity(count: int = 1000, seed: int = 0) -> SuiteResult:
    """``sum p_hat * w(p_hat) == H_k(p_hat)`` bit for bit."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("entropy-weights-identity", 0, count)
    for _ in range(count):
        size = int(rng.integers(2, 5))
        order = int(rng.integers(1, 4))
        u = rng.integers(0, size, size=int(rng.integers(order + 1, 200)))
        d = empirical_distribution(u, order, alphabet=np.arange(size))
        lhs = linear_structure(weights_from_empirical(d), d)
        rhs = conditional_empirical_entropy(d)
        if lhs == rhs:
            res.passed += 1
        else:
            res.failures.append((u, order, lhs, rhs))
    return res


SUITES = {
    "equivalence": verify_equivalence,
    "input-weights": verify_input_weights,
    "sandwich": verify_sandwich,
    "identity": verify_entropy_identity,
}
