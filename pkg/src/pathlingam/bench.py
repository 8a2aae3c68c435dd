"""Reproducible benchmark grid over the simulated data generating process.

Cells are the cross product of feature counts, sample sizes, methods,
confounding regimes and prior-knowledge fractions. Every trial's seed is a
stable hash of the cell coordinates plus the trial index, so any cell can be
reproduced in isolation and results are independent of execution order.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .errors import DegeneratePairs, LengthMismatch
from .measures import MeasureConfig, MeasureKind
from .metrics import ordering_error
from .model import expand_prior
from .search import direct_lingam_order, shortest_path_order
from .simgen import generate, sample_benchmark_params
from .util import stable_seed

log = logging.getLogger(__name__)


class Method(Enum):
    PLR_SPP = "spp-plr"
    PLR_DIRECT = "direct-plr"
    KNN_SPP = "spp-knn"


@dataclass(frozen=True)
class BenchConfig:
    """The experimental grid; ``with_confounders`` is both/true/false."""

    p_values: tuple
    n_values: tuple
    trials: int
    methods: tuple = (Method.PLR_SPP, Method.PLR_DIRECT)
    with_confounders: str = "false"
    prior_fracs: tuple = (0.0,)
    seed: int = 0
    parallelism: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p_values", tuple(int(p) for p in self.p_values))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(
            self, "methods", tuple(Method(m) for m in self.methods)
        )
        object.__setattr__(
            self, "prior_fracs", tuple(float(f) for f in self.prior_fracs)
        )
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.with_confounders not in ("both", "true", "false"):
            raise ValueError("with_confounders must be both, true or false")
        if any(not 0.0 <= f <= 1.0 for f in self.prior_fracs):
            raise ValueError("prior fractions must lie in [0, 1]")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")

    def confounded_values(self):
        if self.with_confounders == "both":
            return (False, True)
        return (self.with_confounders == "true",)


@dataclass(frozen=True)
class BenchCell:
    """Aggregates over the successful trials of one grid cell.

    ``trials`` counts the successes that were aggregated; a cell is valid
    when at most 10% of its configured trials failed.
    """

    mean_eo: float
    mean_runtime: float
    mean_edges: float
    trials: int
    method: Method
    p: int
    n: int
    confounded: bool
    prior_frac: float
    failed_trials: int = 0

    @property
    def valid(self):
        configured = self.trials + self.failed_trials
        return configured > 0 and self.failed_trials <= 0.1 * configured


def trial_prior(truth, prior_frac, seed):
    """Prior knowledge for one trial: the true relative order of a random
    subset of round(prior_frac * p) variables, supplied as one sequence.

    Rounding is half-up. Fractions pinning fewer than 2 variables carry no
    information and yield an empty prior.
    """
    p = len(truth.true_order)
    pinned = int(math.floor(prior_frac * p + 0.5))
    if pinned < 2:
        return None
    rng = np.random.default_rng(stable_seed(int(seed), "prior"))
    chosen = set(int(v) for v in rng.choice(p, pinned, replace=False))
    sequence = [v for v in truth.true_order if v in chosen]
    return expand_prior([sequence])


def run_trial(method, p, n, confounded, prior_frac, seed):
    """One benchmark trial; returns (ordering error, runtime, edge count)."""
    method = Method(method)
    params = sample_benchmark_params(p, n, confounded, seed)
    data, truth = generate(params)
    prior = trial_prior(truth, prior_frac, seed)
    if method is Method.PLR_SPP:
        result = shortest_path_order(data, MeasureConfig(MeasureKind.PLR), prior)
    elif method is Method.PLR_DIRECT:
        result = direct_lingam_order(data, MeasureConfig(MeasureKind.PLR), prior)
    else:
        result = shortest_path_order(
            data, MeasureConfig(MeasureKind.KNN_MI), prior
        )
    e_o = ordering_error(result.order, truth.true_order).e_o
    return e_o, result.wall_time, result.edges_evaluated


def _run_trial_task(task):
    method, p, n, confounded, prior_frac, seed = task
    try:
        return run_trial(method, p, n, confounded, prior_frac, seed)
    except Exception as error:  # noqa: BLE001 - per-trial isolation
        log.warning(
            "trial failed (method=%s p=%s n=%s confounded=%s frac=%s): %s",
            method.value, p, n, confounded, prior_frac, error,
        )
        return None


def trial_seed(config_seed, p, n, method, confounded, prior_frac, index):
    """The documented stable per-trial seed derivation."""
    return stable_seed(
        int(config_seed), int(p), int(n), Method(method).value,
        bool(confounded), float(prior_frac), int(index),
    )


def run_benchmark(config):
    """Run every cell of the grid; identical config gives identical cells.

    Per-trial failures are logged and excluded from the aggregates; cells
    where more than 10% of trials failed report ``valid`` False.
    """
    cells = []
    with _pool(config.parallelism) as run_tasks:
        for p in config.p_values:
            for n in config.n_values:
                for method in config.methods:
                    for confounded in config.confounded_values():
                        for frac in config.prior_fracs:
                            tasks = [
                                (
                                    method, p, n, confounded, frac,
                                    trial_seed(
                                        config.seed, p, n, method,
                                        confounded, frac, index,
                                    ),
                                )
                                for index in range(config.trials)
                            ]
                            outcomes = [r for r in run_tasks(tasks)]
                            good = [r for r in outcomes if r is not None]
                            cells.append(_aggregate(
                                good, len(outcomes) - len(good),
                                method, p, n, confounded, frac,
                            ))
    return cells


class _pool:
    # Sequential fallback keeps single-worker runs free of process overhead.
    def __init__(self, workers):
        self.workers = int(workers)
        self.executor = None

    def __enter__(self):
        if self.workers > 1:
            self.executor = ProcessPoolExecutor(max_workers=self.workers)
            self.executor.__enter__()
        return self._run

    def _run(self, tasks):
        if self.executor is None:
            return [_run_trial_task(t) for t in tasks]
        return list(self.executor.map(_run_trial_task, tasks))

    def __exit__(self, *exc):
        if self.executor is not None:
            return self.executor.__exit__(*exc)
        return False


def _aggregate(good, failed, method, p, n, confounded, frac):
    if good:
        eo = float(np.mean([g[0] for g in good]))
        runtime = float(np.mean([g[1] for g in good]))
        edges = float(np.mean([g[2] for g in good]))
    else:
        eo = runtime = edges = float("nan")
    cell = BenchCell(
        mean_eo=eo,
        mean_runtime=runtime,
        mean_edges=edges,
        trials=len(good),
        method=method,
        p=p,
        n=n,
        confounded=confounded,
        prior_frac=frac,
        failed_trials=failed,
    )
    if not cell.valid:
        log.warning(
            "cell invalid (method=%s p=%s n=%s confounded=%s frac=%s): "
            "%d of %d trials failed",
            method.value, p, n, confounded, frac, failed, failed + len(good),
        )
    return cell


def paired_t_test(a, b):
    """Two-sided paired t-test; returns (t statistic, p-value).

    Identical samples give (0, 1) by convention. Constant nonzero
    differences have no within-pair variance to test against and raise
    DegeneratePairs.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch("paired test needs two equal-length vectors")
    if a.size < 2:
        raise ValueError("need at least 2 pairs")
    diff = a - b
    sd = diff.std(ddof=1)
    if sd == 0.0:
        if diff[0] == 0.0:
            return 0.0, 1.0
        raise DegeneratePairs("differences are a nonzero constant")
    t = float(diff.mean() / (sd / math.sqrt(diff.size)))
    p = float(2.0 * stats.t.sf(abs(t), diff.size - 1))
    return t, p
