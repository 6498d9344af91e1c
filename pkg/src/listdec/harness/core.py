"""Experiment engine: configs, seed discipline, trial runners and records."""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from .. import bounds, chaining, codes, oracle, rip, simplex
from .._helpers import derive_seed, worker_count
from ..errors import InputError, ListDecError
from ..gf import field_for_order, vectors_to_labels

logger = logging.getLogger(__name__)

EXPERIMENTS = (
    "rip_scan",
    "reduction_chain",
    "johnson_audit",
    "covering_curve",
    "moment_audit",
)

# Parameter columns per experiment; every CSV row carries all of them.
PARAM_COLUMNS: dict[str, tuple[str, ...]] = {
    "rip_scan": ("q", "ktilde", "k", "rows", "delta_target"),
    "reduction_chain": ("q", "ktilde", "n", "L"),
    "johnson_audit": ("q", "ktilde", "n", "L"),
    "covering_curve": ("q", "ktilde", "rows", "k", "s", "m"),
    "moment_audit": ("m", "s", "K"),
}

DEFAULT_PARAMS: dict[str, dict] = {
    "rip_scan": {
        "q": 2,
        "ktilde_values": [4, 5, 6],
        "k_values": [2],
        "delta_target": 0.5,
        "confidence_trials": 20,
        "rip_mode": "sampled",
        "rip_trials": 8,
        "threshold": rip.SUCCESS_THRESHOLD,
    },
    "reduction_chain": {
        "q": 2,
        "ktilde": 3,
        "n": 12,
        "L": 3,
        "trials": 100,
    },
    "johnson_audit": {
        "q_values": [2, 3],
        "ktilde": 3,
        "n": 8,
        "L_values": [2, 3, 4],
        "trials": 1000,
    },
    "covering_curve": {
        "q": 2,
        "ktilde": 8,
        "rows": 64,
        "k": 8,
        "s": 2,
        "m_values": [8, 16, 32, 64, 128, 256, 512],
        "trials": 200,
    },
    "moment_audit": {
        "m_max": 10,
        "s_max": 3,
        "K": 1,
        "trials": 1000,
        "grid_points": 10000,
    },
}

# Quantities that are implication verdicts: 1 holds (or vacuous), 0 violated.
VERDICTS = frozenset(
    {
        "rip_implies_distance",
        "distance_implies_johnson",
        "johnson_implies_oracle",
        "rip_implies_list_decoding",
        "johnson_holds",
        "deletion_holds",
        "moment_bound_holds",
        "delta_sqr_holds",
    }
)

# Radii are weakened by this much before the exact oracle comparison.
RADIUS_MARGIN = 1e-9

ProgressCallback = Optional[Callable[[], None]]


@dataclass
class ExperimentConfig:
    """One experiment invocation: what to run, with which parameters and seed."""

    experiment: str
    seed: int
    params: dict = field(default_factory=dict)
    output: Optional[str] = None
    json_output: bool = False
    include_timing: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InputError(
                f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}"
            )
        if not isinstance(self.seed, int):
            raise InputError("an integer seed is mandatory")
        merged = dict(DEFAULT_PARAMS[self.experiment])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise InputError(
                f"unknown parameters for {self.experiment}: {', '.join(sorted(unknown))}"
            )
        merged.update(self.params)
        self.params = merged


@dataclass
class ExperimentRecord:
    """One measured quantity of one trial."""

    experiment: str
    trial: int
    derived_seed: int
    params: dict
    quantity: str
    value: float
    method: str = "exact"
    wall_ms: float = 0.0

    def is_error(self) -> bool:
        return self.method == "error"


def load_config(path: str | Path) -> ExperimentConfig:
    """Read `{experiment, params, seed, output}` from a JSON file."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict) or "experiment" not in data:
        raise InputError("config must be an object with an `experiment` key")
    if "seed" not in data:
        raise InputError("config must carry a `seed`")
    return ExperimentConfig(
        experiment=data["experiment"],
        seed=data["seed"],
        params=data.get("params", {}),
        output=data.get("output"),
    )


def violations(records: Iterable[ExperimentRecord]) -> int:
    """Number of verdict records that came out false."""
    return sum(1 for r in records if r.quantity in VERDICTS and r.value == 0)


def _map_trials(
    fn: Callable[[int], list[ExperimentRecord]],
    count: int,
    progress: ProgressCallback = None,
) -> list[ExperimentRecord]:
    """Run fn over trial indices; results come back in trial order."""

    def run(index: int) -> list[ExperimentRecord]:
        start = time.perf_counter()
        out = fn(index)
        elapsed = (time.perf_counter() - start) * 1000
        for record in out:
            record.wall_ms = elapsed
        if progress is not None:
            progress()
        return out

    workers = min(worker_count(), max(1, count))
    if workers == 1:
        groups = [run(i) for i in range(count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            groups = list(pool.map(run, range(count)))
    return [record for group in groups for record in group]


def _error_record(experiment: str, trial: int, seed: int, params: dict, e: Exception):
    logger.warning("%s trial %d failed: %s", experiment, trial, e)
    return ExperimentRecord(experiment, trial, seed, params, "error", math.nan, "error")


class ExperimentRunner:
    """Runs the configured experiment and returns its records in trial order."""

    def __init__(self, config: ExperimentConfig, progress: ProgressCallback = None):
        self.config = config
        self.params = config.params
        self.progress = progress

    def total_steps(self) -> int:
        """Number of progress ticks the run will emit."""
        p = self.params
        if self.config.experiment == "rip_scan":
            return len(p["ktilde_values"]) * len(p["k_values"])
        if self.config.experiment == "covering_curve":
            return 1
        return int(p["trials"])

    def run(self) -> list[ExperimentRecord]:
        handler = getattr(self, f"run_{self.config.experiment}")
        logger.info("running %s with seed %d", self.config.experiment, self.config.seed)
        return handler()

    def _record(self, trial, seed, params, quantity, value, method="exact"):
        return ExperimentRecord(
            self.config.experiment, trial, seed, params, quantity, float(value), method
        )

    def run_rip_scan(self) -> list[ExperimentRecord]:
        """Least |T| for RIP per (ktilde, k) grid point, with every probe's probability.

        Budget failures are recorded for the grid point and the scan continues.
        """
        p = self.params
        spec = field_for_order(int(p["q"]))
        grid = [(kt, k) for kt in p["ktilde_values"] for k in p["k_values"]]

        def point(index: int) -> list[ExperimentRecord]:
            ktilde, k = grid[index]
            seed = derive_seed(self.config.seed, index)
            base = {"q": spec.q, "ktilde": ktilde, "k": k, "delta_target": p["delta_target"]}
            try:
                search = rip.min_rows_for_rip(
                    spec,
                    ktilde,
                    k,
                    float(p["delta_target"]),
                    int(p["confidence_trials"]),
                    seed,
                    rip_mode=p["rip_mode"],
                    rip_trials=int(p["rip_trials"]),
                    threshold=float(p["threshold"]),
                )
            except ListDecError as e:
                return [_error_record("rip_scan", index, seed, {**base, "rows": ""}, e)]
            out = [
                self._record(
                    index, seed, {**base, "rows": rows}, "success_probability", prob,
                    p["rip_mode"],
                )
                for rows, prob in search.probes
            ]
            out.append(
                self._record(
                    index, seed, {**base, "rows": search.rows}, "min_rows", search.rows,
                    p["rip_mode"],
                )
            )
            return out

        return _map_trials(point, len(grid), self.progress)

    def run_reduction_chain(self) -> list[ExperimentRecord]:
        """Random codes through RIP, average distance, Johnson radius and the oracle."""
        p = self.params
        spec = field_for_order(int(p["q"]))
        ktilde, n, L = int(p["ktilde"]), int(p["n"]), int(p["L"])
        if not 3 <= L <= 6:
            raise InputError(f"reduction chain needs 3 <= L <= 6, got {L}")
        if spec.q**ktilde > 2**10:
            raise InputError("reduction chain needs q^ktilde <= 1024 for the oracle leg")

        def trial(index: int) -> list[ExperimentRecord]:
            seed = derive_seed(self.config.seed, index)
            try:
                gen = codes.random_generator(spec, ktilde, n, seed)
                return run_chain_trial(gen, L, index, seed)
            except ListDecError as e:
                params = {"q": spec.q, "ktilde": ktilde, "n": n, "L": L}
                return [_error_record("reduction_chain", index, seed, params, e)]

        return _map_trials(trial, int(p["trials"]), self.progress)

    def run_johnson_audit(self) -> list[ExperimentRecord]:
        """Average-distance Johnson and deletion bounds against the exhaustive oracle.

        Trial t draws its code over the (t mod len(q_values))-th alphabet.
        """
        p = self.params
        if not p["q_values"]:
            raise InputError("johnson audit needs at least one alphabet size in q_values")
        fields = [field_for_order(int(q)) for q in p["q_values"]]

        def trial(index: int) -> list[ExperimentRecord]:
            seed = derive_seed(self.config.seed, index)
            spec = fields[index % len(fields)]
            rng = np.random.default_rng(seed)
            ktilde = int(rng.integers(1, int(p["ktilde"]) + 1))
            n = int(rng.integers(1, int(p["n"]) + 1))
            params = {"q": spec.q, "ktilde": ktilde, "n": n, "L": ""}
            try:
                code = codes.enumerate_codewords(
                    codes.random_generator(spec, ktilde, n, derive_seed(seed, 1))
                )
                return self._johnson_trial(code, index, seed)
            except ListDecError as e:
                return [_error_record("johnson_audit", index, seed, params, e)]

        return _map_trials(trial, int(p["trials"]), self.progress)

    def _johnson_trial(self, code, index: int, seed: int) -> list[ExperimentRecord]:
        q, n = code.q, code.n
        out = []
        d_min = codes.min_distance(code)
        eta = min(Fraction(q - 1, q), d_min + Fraction(1, n))
        A = codes.neighbor_count(code, eta)
        for L in self.params["L_values"]:
            if L > code.size:
                continue
            params = {"q": q, "ktilde": code.gen.ktilde, "n": n, "L": L}
            delta, _ = codes.min_avg_distance_over_subsets(code, L)
            bound = bounds.avg_johnson_bound(q, float(delta), L)
            cutoff = oracle.radius_to_rational(bound.radius - RADIUS_MARGIN)
            found = oracle.list_size_at_radius(code, cutoff)
            out += [
                self._record(index, seed, params, "min_avg_distance", delta),
                self._record(index, seed, params, "johnson_radius", bound.radius),
                self._record(index, seed, params, "oracle_list_size", found.max_count),
                self._record(
                    index, seed, params, "johnson_holds", found.max_count <= bound.list_size
                ),
            ]
            deletion = bounds.deletion_bound(q, float(eta), A, L)
            cutoff = oracle.radius_to_rational(deletion.radius - RADIUS_MARGIN)
            found = oracle.list_size_at_radius(code, cutoff)
            out += [
                self._record(index, seed, params, "neighbor_count", A),
                self._record(index, seed, params, "deletion_radius", deletion.radius),
                self._record(
                    index, seed, params, "deletion_holds",
                    found.max_count <= deletion.list_size,
                ),
            ]
        return out

    def run_covering_curve(self) -> list[ExperimentRecord]:
        """Maurey approximation error in the X' seminorm as m grows."""
        p = self.params
        spec = field_for_order(int(p["q"]))
        ktilde, rows, k, s = (int(p[name]) for name in ("ktilde", "rows", "k", "s"))
        m_values = [int(m) for m in p["m_values"]]
        seed = self.config.seed

        def trial(_: int) -> list[ExperimentRecord]:
            T = rip.sample_T(spec, ktilde, rows, derive_seed(seed, 0))
            M = rip.phi_lin_sub(spec, ktilde, T)
            x = chaining.random_sparse_unit(M.cols, k, derive_seed(seed, 1))
            curve = chaining.covering_error_curve(
                x, M, s, m_values, int(p["trials"]), derive_seed(seed, 2)
            )
            base = {"q": spec.q, "ktilde": ktilde, "rows": rows, "k": k, "s": s}
            out = []
            for i, point in enumerate(curve):
                params = {**base, "m": point.m}
                out.append(
                    self._record(i, derive_seed(seed, 2), params, "mean_xprime_error",
                                 point.mean_error, "sampled")
                )
                out.append(
                    self._record(i, derive_seed(seed, 2), params, "envelope",
                                 point.envelope, "fitted")
                )
            out.append(
                self._record(len(curve), derive_seed(seed, 2), {**base, "m": ""},
                             "loglog_slope", chaining.loglog_slope(curve), "fitted")
            )
            return out

        return _map_trials(trial, 1, self.progress)

    def run_moment_audit(self) -> list[ExperimentRecord]:
        """Exact chaos moments against (4Kms)^s, then the delta-squared grid."""
        p = self.params
        try:
            K = Fraction(str(p["K"]))
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise InputError(f"entry bound K must be a number, got {p['K']!r}") from e
        if K <= 0:
            raise InputError(f"entry bound K must be positive, got {K}")
        K_cell = int(K) if K.denominator == 1 else float(K)
        limit = math.floor(K * 256)
        trials = int(p["trials"])

        def trial(index: int) -> list[ExperimentRecord]:
            seed = derive_seed(self.config.seed, index)
            rng = np.random.default_rng(seed)
            m = int(rng.integers(1, int(p["m_max"]) + 1))
            s = int(rng.integers(1, int(p["s_max"]) + 1))
            # dyadic entries with 8 fractional bits, |a_ij| <= K
            grid = rng.integers(-limit, limit + 1, size=(m, m)) / 256
            params = {"m": m, "s": s, "K": K_cell}
            try:
                moment = chaining.chaos_moment_exact(grid, s)
            except ListDecError as e:
                return [_error_record("moment_audit", index, seed, params, e)]
            bound = chaining.chaos_moment_bound(K, m, s)
            return [
                self._record(index, seed, params, "chaos_moment", moment),
                self._record(index, seed, params, "moment_bound", bound),
                self._record(index, seed, params, "moment_bound_holds", abs(moment) <= bound),
            ]

        out = _map_trials(trial, trials, self.progress)
        hypothesis, exceptions = delta_sqr_grid_audit(int(p["grid_points"]))
        params = {"m": "", "s": "", "K": ""}
        seed = derive_seed(self.config.seed, trials)
        out += [
            self._record(trials, seed, params, "delta_sqr_hypothesis_count", hypothesis),
            self._record(trials, seed, params, "delta_sqr_exceptions", exceptions),
            self._record(trials, seed, params, "delta_sqr_holds", exceptions == 0),
        ]
        return out


def run_chain_trial(
    gen: codes.GeneratorMatrix, L: int, trial: int = 0, seed: int = 0
) -> list[ExperimentRecord]:
    """One pass of the reduction chain on a given generator.

    Emits both encodings' agreement, the duplicate count, the order-L RIP
    constant of phi(C)/sqrt((q-1)n), the minimum L-subset average distance,
    both radii with their oracle list sizes, and the four implication verdicts.
    """
    spec, q, n = gen.spec, gen.spec.q, gen.n
    params = {"q": q, "ktilde": gen.ktilde, "n": n, "L": L}

    def record(quantity, value, method="exact"):
        return ExperimentRecord("reduction_chain", trial, seed, params, quantity,
                                float(value), method)

    code = codes.enumerate_codewords(gen)
    via_code = simplex.phi_code(code)
    columns = vectors_to_labels(spec, gen.entries.T)
    via_lin = rip.phi_lin_sub(spec, gen.ktilde, columns)
    agreement = float(np.abs(via_code.entries - via_lin.entries).max())

    report = rip.rip_constant_exact(via_code, L, math.sqrt((q - 1) * n))
    delta, _ = codes.min_avg_distance_over_subsets(code, L)
    threshold = bounds.rip_distance_threshold(q, L)
    johnson = bounds.avg_johnson_bound(q, float(delta), L)
    rip_ld = bounds.rip_to_ld_radius(q, L)
    johnson_count = oracle.list_size_at_radius(
        code, oracle.radius_to_rational(johnson.radius - RADIUS_MARGIN)
    ).max_count
    rip_count = oracle.list_size_at_radius(
        code, oracle.radius_to_rational(rip_ld.radius - RADIUS_MARGIN)
    ).max_count

    rip_ok = report.delta <= 0.5
    distance_ok = float(delta) >= threshold - RADIUS_MARGIN
    logger.debug("chain trial %d: rip=%.4g delta*=%s", trial, report.delta, delta)
    return [
        record("dft_equivalence_error", agreement),
        record("duplicate_codewords", codes.duplicate_count(code)),
        record("rip_constant", report.delta),
        record("min_avg_distance", delta),
        record("rip_distance_threshold", threshold),
        record("johnson_radius", johnson.radius),
        record("oracle_list_size_johnson", johnson_count),
        record("rip_to_ld_radius", rip_ld.radius),
        record("oracle_list_size_rip", rip_count),
        record("rip_implies_distance", (not rip_ok) or distance_ok),
        record(
            "distance_implies_johnson",
            (not distance_ok) or johnson.radius >= rip_ld.radius - bounds.SLACK,
        ),
        record("johnson_implies_oracle", johnson_count <= johnson.list_size),
        record("rip_implies_list_decoding", (not rip_ok) or rip_count <= rip_ld.list_size),
    ]


def delta_sqr_grid_audit(points: int = 10000) -> tuple[int, int]:
    """Count grid points where the hypothesis holds, and those among them with a > delta."""
    side = max(2, round(points ** (1 / 3)))
    a_values = np.logspace(-4, 1, side)
    mu_values = np.linspace(0, 1, side)
    delta_values = np.linspace(1 / side, 1, side)
    hypothesis = exceptions = 0
    for a in a_values:
        for mu in mu_values:
            for delta in delta_values:
                if chaining.delta_sqr_check(float(a), float(mu), float(delta)):
                    hypothesis += 1
                    exceptions += a > delta
    return hypothesis, int(exceptions)
