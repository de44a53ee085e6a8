"""Retry a seeded solver with fresh derived seeds when it reports failure."""

import logging
from collections.abc import Callable
from functools import wraps
from typing import Any

from seqham.shared.rng import derive_seed

logger = logging.getLogger(__name__)


def _succeeded(outcome: Any) -> bool:
    return bool(getattr(outcome, "ok", outcome))


def retry_over_seeds(
    attempts: int = 1,
    *,
    succeeded: Callable[[Any], bool] = _succeeded,
    on_retry: Callable[[Any, int], None] | None = None,
):
    """Decorator re-running a seeded call until its outcome succeeds.

    The wrapped function must take ``seed`` as a keyword argument. Attempt ``a``
    (counting from 1 for the first retry) runs with ``derive_seed(seed, "retry", a)``,
    so the sequence of seeds tried is itself reproducible.

    Args:
        attempts: Total number of calls, including the first
        succeeded: Predicate on the outcome; defaults to its ``ok`` attribute
        on_retry: Optional callback called with (failed outcome, attempt number)

    Returns:
        The first successful outcome, or the last failed one

    Example:
        @retry_over_seeds(attempts=3)
        def run(graph, *, seed):
            return posa_solve(graph, seed=seed)
    """
    if attempts < 1:
        raise ValueError(f"attempts must be at least 1, got: {attempts}")

    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, seed: int, **kwargs) -> Any:
            outcome = func(*args, seed=seed, **kwargs)

            for attempt in range(1, attempts):
                if succeeded(outcome):
                    return outcome

                next_seed = derive_seed(seed, "retry", attempt)
                logger.warning(
                    "%s failed (attempt %d/%d); retrying with derived seed %d",
                    func.__name__,
                    attempt,
                    attempts,
                    next_seed,
                )

                if on_retry:
                    try:
                        on_retry(outcome, attempt)
                    except Exception as callback_error:
                        logger.error("Retry callback failed: %s", callback_error)

                outcome = func(*args, seed=next_seed, **kwargs)

            if attempts > 1 and not succeeded(outcome):
                logger.error("%s failed after %d attempts", func.__name__, attempts)
            return outcome

        return wrapper

    return decorator
