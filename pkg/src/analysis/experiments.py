# src/analysis/experiments.py
"""Experiment pipelines: phase transitions, noise-free recovery sweeps and the
bounded / Gaussian noise sweeps, with CSV, SVG and database emission."""
import multiprocessing as mp
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from loguru import logger

from src.analysis.coherence import analyzer_for
from src.analysis.dictionary_builder import build_npd
from src.analysis.guarantees import (
    bounded_noise_threshold_restricted,
    gaussian_radius,
    gaussian_threshold_restricted,
    refined_condition,
    theorem1_condition,
    theorem2_condition,
)
from src.analysis.recovery import (
    basis_pursuit,
    least_squares_on_support,
    omp,
    support_from_coefficients,
)
from src.analysis.signals import add_bounded_noise, add_gaussian_noise, gen_mixture, make_rng
from src.analysis.support import enumerate_Qkm, period_set
from src.config import BP_TOLERANCE, SUPPORT_REL_THRESHOLD
from src.exceptions import ConditionNotMet, ConfigError, EmptyQkm, NpdError
from src.models.dictionary import DictionaryFamily, NpdDictionary
from src.models.experiment import ExperimentConfig, ExperimentTable
from src.models.recovery import StopRule
from src.models.verdict import BoundVerdict
from src.utils.logging import log_experiment_summary, log_trial_failure

METHODS = ("bp", "omp")


@dataclass(frozen=True)
class TrialTask:
    """One randomized recovery trial; everything needed to replay it exactly."""

    seed: int
    stream: int
    candidates: tuple[tuple[int, ...], ...]
    gamma: float
    methods: tuple[str, ...]
    sparsity: Optional[int] = None
    noise_kind: str = "none"
    noise_level: float = 0.0
    stop_eps: Optional[float] = None
    bp_tol: float = BP_TOLERANCE


def _rmse(estimate: np.ndarray, reference: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.abs(estimate - reference) ** 2)))


def run_trial(K: NpdDictionary, task: TrialTask) -> dict[str, tuple[bool, float]]:
    """Generates one mixture, recovers it with every requested method and scores it.

    The reference vector is the least-squares fit on the true support, so noisy
    runs are scored against the best possible estimate on that support.
    Solver errors count as a failed trial with the zero vector as estimate.
    """
    rng = make_rng(task.seed, task.stream)
    T = period_set(task.candidates[int(rng.integers(len(task.candidates)))])
    x, y = gen_mixture(K, T, task.gamma, rng, sparsity=task.sparsity)
    true_support = tuple(int(i) + 1 for i in np.flatnonzero(x))

    if task.noise_kind == "bounded":
        y = add_bounded_noise(y, task.noise_level, rng)
    elif task.noise_kind == "gaussian":
        y = add_gaussian_noise(y, task.noise_level, rng)

    reference = x.copy()
    if task.noise_kind != "none":
        try:
            reference[np.asarray(true_support) - 1] = least_squares_on_support(K, true_support, y)
        except NpdError as e:
            logger.warning(f"Trial {task.stream}: scoring against the generated x ({e})")

    outcome = {}
    for method in task.methods:
        try:
            if method == "omp":
                if task.stop_eps is None:
                    stop = StopRule(sparsity=len(true_support))
                else:
                    stop = StopRule(residual_norm=task.stop_eps, max_iterations=K.L)
                result = omp(K, y, stop)
                estimate, support = result.to_dense(K.N), result.support
            else:
                estimate = basis_pursuit(K, y, tol=task.bp_tol)
                support = support_from_coefficients(estimate, SUPPORT_REL_THRESHOLD)
            outcome[method] = (support == true_support, _rmse(estimate, reference))
        except NpdError as e:
            log_trial_failure(method, task.stream, e)
            outcome[method] = (False, _rmse(np.zeros_like(reference), reference))
    return outcome


_WORKER_DICTIONARY: Optional[NpdDictionary] = None


def _init_worker(K: NpdDictionary) -> None:
    global _WORKER_DICTIONARY
    _WORKER_DICTIONARY = K


def _run_in_worker(task: TrialTask) -> dict[str, tuple[bool, float]]:
    return run_trial(_WORKER_DICTIONARY, task)


def resolve_jobs(jobs: Optional[int]) -> int:
    return jobs if jobs is not None else (os.cpu_count() or 1)


def execute_trials(K: NpdDictionary, tasks: list[TrialTask], jobs: Optional[int]) -> list[dict]:
    """Runs tasks in order; with jobs > 1 they are spread over a process pool.

    Outcomes come back in task order regardless of completion order.
    """
    jobs = resolve_jobs(jobs)
    if jobs <= 1 or len(tasks) < 2:
        return [run_trial(K, task) for task in tasks]

    chunksize = max(1, len(tasks) // (jobs * 8))
    with mp.Pool(processes=jobs, initializer=_init_worker, initargs=(K,)) as pool:
        return list(pool.imap(_run_in_worker, tasks, chunksize=chunksize))


@lru_cache(maxsize=8)
def _dictionary(family: str, p_max: int, length: int) -> NpdDictionary:
    return build_npd(DictionaryFamily.parse(family), p_max, length, normalize=True)


def dictionary_for(cfg: ExperimentConfig) -> NpdDictionary:
    """The normalized dictionary an experiment config describes (built once per process)."""
    return _dictionary(cfg.family, cfg.p_max, cfg.length)


def _aggregate(outcomes: list[dict], method: str) -> tuple[float, float, int]:
    """(success rate, mean RMSE, trial count) for one method over a list of outcomes."""
    successes = sum(1 for outcome in outcomes if outcome[method][0])
    rmse = float(np.mean([outcome[method][1] for outcome in outcomes]))
    return successes / len(outcomes), rmse, len(outcomes)


def _row(k, point, method, verdict: BoundVerdict, stats=None) -> dict:
    success_rate, rmse, trials = stats if stats is not None else (np.nan, np.nan, None)
    return {
        "point_k": k,
        "point_s_or_gamma_or_alpha": point,
        "method": method,
        "success_rate": success_rate,
        "rmse": rmse,
        "lhs": verdict.lhs,
        "holds": verdict.holds,
        "valid": verdict.valid,
        "trials": trials,
    }


def run_phase_transition(cfg: ExperimentConfig) -> ExperimentTable:
    """Refined-condition verdicts over the (k, s) grid, optionally with empirical recovery.

    Empirical points draw T uniformly from the members of Q_k(m) whose support
    has at least s atoms and place exactly s nonzeros on S_T.
    """
    K = dictionary_for(cfg)
    analyzer = analyzer_for(K)
    gamma = cfg.gamma_range[0] if cfg.gamma_range else 0.0

    rows, tasks, pending = [], [], []
    for k in cfg.k_range:
        try:
            members = analyzer.family(k, cfg.m)
        except EmptyQkm:
            logger.warning(f"Q_{k}({cfg.m}) is empty; skipping k={k}")
            continue

        s_values = [s for s in (cfg.s_range or range(1, k + 1)) if 1 <= s <= k]
        for s in s_values:
            verdict = refined_condition(K, k, cfg.m, s)
            rows.append(_row(k, s, "refined", verdict))

            eligible = tuple(T.periods for T in members if T.sparsity >= s)
            if not cfg.empirical or not eligible:
                continue
            start = len(tasks)
            tasks += [
                TrialTask(
                    seed=cfg.seed,
                    stream=start + trial,
                    candidates=eligible,
                    gamma=gamma,
                    methods=METHODS,
                    sparsity=s,
                    bp_tol=cfg.bp_tol,
                )
                for trial in range(cfg.trials)
            ]
            pending.append((k, s, verdict, start, len(tasks)))

    outcomes = execute_trials(K, tasks, cfg.jobs) if tasks else []
    for k, s, verdict, start, stop in pending:
        for method in METHODS:
            rows.append(_row(k, s, method, verdict, _aggregate(outcomes[start:stop], method)))

    table = ExperimentTable("phase", cfg, rows)
    log_experiment_summary(table)
    return table


def run_recovery_sweep(cfg: ExperimentConfig) -> ExperimentTable:
    """Average RMSE and exact-support success rate versus k for BP and OMP.

    Every T in Q_k(m) gets `trials` noise-free mixtures on its full support.
    A T's trials are drawn once and reused for every k >= |S_T|.
    """
    if cfg.noise.kind != "none":
        raise ConfigError("The recovery sweep is noise-free; set noise to 'none'")

    K = dictionary_for(cfg)
    gamma = cfg.gamma_range[0] if cfg.gamma_range else 0.0
    members = enumerate_Qkm(cfg.p_max, cfg.m, max(cfg.k_range))
    if not members:
        raise EmptyQkm(f"Q_k({cfg.m}) is empty for every k in the sweep")

    tasks = [
        TrialTask(
            seed=cfg.seed,
            stream=index * cfg.trials + trial,
            candidates=(T.periods,),
            gamma=gamma,
            methods=METHODS,
            bp_tol=cfg.bp_tol,
        )
        for index, T in enumerate(members)
        for trial in range(cfg.trials)
    ]
    outcomes = execute_trials(K, tasks, cfg.jobs)

    rows = []
    for k in cfg.k_range:
        chosen = [
            outcome
            for index, T in enumerate(members)
            if T.sparsity <= k
            for outcome in outcomes[index * cfg.trials : (index + 1) * cfg.trials]
        ]
        if not chosen:
            logger.warning(f"Q_{k}({cfg.m}) is empty; skipping k={k}")
            continue
        verdict = theorem1_condition(K, k, cfg.m)
        for method in METHODS:
            rows.append(_row(k, None, method, verdict, _aggregate(chosen, method)))

    table = ExperimentTable("sweep-recovery", cfg, rows)
    log_experiment_summary(table)
    return table


def _noise_sweep(
    cfg: ExperimentConfig,
    name: str,
    points: tuple[float, ...],
    gammas: list[float],
    stop_eps: float,
) -> ExperimentTable:
    K = dictionary_for(cfg)
    T = period_set(cfg.periods)
    verdict = theorem2_condition(K, T)

    tasks = [
        TrialTask(
            seed=cfg.seed,
            stream=index * cfg.trials + trial,
            candidates=(T.periods,),
            gamma=gamma,
            methods=("omp",),
            noise_kind=cfg.noise.kind,
            noise_level=cfg.noise.level,
            stop_eps=stop_eps,
        )
        for index, gamma in enumerate(gammas)
        for trial in range(cfg.trials)
    ]
    outcomes = execute_trials(K, tasks, cfg.jobs)

    rows = [
        _row(
            T.sparsity,
            point,
            "omp",
            verdict,
            _aggregate(outcomes[index * cfg.trials : (index + 1) * cfg.trials], "omp"),
        )
        for index, point in enumerate(points)
    ]
    table = ExperimentTable(name, cfg, rows)
    log_experiment_summary(table)
    return table


def run_bounded_noise_sweep(cfg: ExperimentConfig) -> ExperimentTable:
    """Success rate and RMSE of OMP (stopping at ||r|| <= eps) versus the coefficient floor gamma."""
    if cfg.noise.kind != "bounded":
        raise ConfigError("The bounded-noise sweep needs noise kind 'bounded'")
    if not cfg.gamma_range:
        raise ConfigError("The bounded-noise sweep needs a gamma_range")

    K = dictionary_for(cfg)
    eps = cfg.noise.level
    try:
        threshold = bounded_noise_threshold_restricted(K, cfg.periods, eps)
        logger.info(f"Coefficient floor guaranteeing support recovery: gamma >= {threshold:.6g}")
    except ConditionNotMet as e:
        logger.warning(f"No recovery guarantee for this sweep: {e}")

    return _noise_sweep(cfg, "sweep-bounded", cfg.gamma_range, list(cfg.gamma_range), eps)


def run_gaussian_sweep(cfg: ExperimentConfig) -> ExperimentTable:
    """Success rate and RMSE of OMP under Gaussian noise versus the threshold scale alpha.

    Coefficients obey |x_i| >= alpha * (Gaussian restricted threshold) and OMP
    stops once the residual falls inside the Gaussian radius.
    """
    if cfg.noise.kind != "gaussian":
        raise ConfigError("The Gaussian sweep needs noise kind 'gaussian'")
    if not cfg.alpha_range:
        raise ConfigError("The Gaussian sweep needs an alpha_range")

    K = dictionary_for(cfg)
    sigma = cfg.noise.level
    threshold = gaussian_threshold_restricted(K, cfg.periods, sigma)
    radius = gaussian_radius(sigma, K.L)
    logger.info(f"Gaussian radius {radius:.6g}, full coefficient threshold {threshold:.6g}")

    gammas = [alpha * threshold for alpha in cfg.alpha_range]
    return _noise_sweep(cfg, "sweep-gaussian", cfg.alpha_range, gammas, radius)


PIPELINES = {
    "phase": run_phase_transition,
    "sweep-recovery": run_recovery_sweep,
    "sweep-bounded": run_bounded_noise_sweep,
    "sweep-gaussian": run_gaussian_sweep,
}


def write_outputs(table: ExperimentTable, cfg: ExperimentConfig) -> Optional[str]:
    """Writes <out>.csv and <out>.svg and, when configured, stores the rows in the results database.

    Returns the CSV path, or None when no output path was configured.
    """
    from src.analysis.plotting import save_table_svg
    from src.db.db_manager import DatabaseManager

    if cfg.db:
        DatabaseManager(cfg.db).save_experiment_table(table)

    if not cfg.out:
        return None
    directory = os.path.dirname(cfg.out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    csv_path = f"{cfg.out}.csv"
    table.write_csv(csv_path)
    save_table_svg(table, f"{cfg.out}.svg")
    logger.info(f"Wrote {csv_path} and {cfg.out}.svg")
    return csv_path
