# src/utils/logging.py
import sys

from loguru import logger

from src.models.verdict import BoundVerdict

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {message}"


def configure_logging(level: str = "INFO") -> None:
    """Sends all log output to stderr so stdout only carries results."""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)


def log_run_header(command: str, seed, digest) -> None:
    """Logs the seed and config digest every run starts with"""
    logger.info(f"{command}: seed={seed} config_digest={digest}")


def log_verdict(verdict: BoundVerdict) -> None:
    """Logs a bound verdict, warning when the bound does not even apply"""
    if not verdict.valid:
        logger.warning(f"{verdict.name}: bound not valid here (lhs={verdict.lhs:.6g})")
    elif verdict.holds:
        logger.success(f"{verdict.name}: holds (lhs={verdict.lhs:.6g} < 1)")
    else:
        logger.info(f"{verdict.name}: fails (lhs={verdict.lhs:.6g} >= 1)")


def log_trial_failure(method: str, stream: int, error: Exception) -> None:
    """Logs a trial whose solver raised; the trial is scored as a miss"""
    logger.warning(f"Trial {stream}: {method} failed with {type(error).__name__}: {error}")


def log_experiment_summary(table) -> None:
    """Logs the number of rows and, for empirical rows, the worst success rate"""
    rows = table.rows
    row_word = "row" if len(rows) == 1 else "rows"
    logger.info(f"{table.name}: {len(rows)} {row_word} (seed={table.seed}, digest={table.digest})")

    measured = rows.dropna(subset=["success_rate"])
    if not measured.empty:
        worst = measured.loc[measured["success_rate"].idxmin()]
        logger.info(
            f"Lowest success rate {worst['success_rate']:.3f} "
            f"({worst['method']} at k={worst['point_k']}, point={worst['point_s_or_gamma_or_alpha']})"
        )
