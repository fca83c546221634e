"""Execution backends used to fan out per-sweep and per-Doppler-bin work."""
import abc
import logging
from typing import Any
from typing import Callable
from typing import Iterable
from typing import List
from typing import Optional

from joblib import Parallel
from joblib import delayed

logger = logging.getLogger(__name__)


class Backend(abc.ABC):
    """Runs independent tasks; results always come back in input order."""

    def fft_workers(self) -> int:
        """Number of workers handed to `scipy.fft` for vectorized transforms."""
        return 1

    @abc.abstractmethod
    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        pass  # pragma: no cover


class SerialBackend(Backend):
    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        return [fn(item) for item in items]


class JoblibBackend(Backend):
    """Thread-based fan-out (numpy and scipy.fft release the GIL)."""

    def __init__(self, n_jobs: int) -> None:
        if n_jobs < 1:
            raise ValueError(f"n_jobs must be >= 1, got {n_jobs}")
        self.n_jobs = n_jobs

    def fft_workers(self) -> int:
        return self.n_jobs

    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        logger.debug(f"dispatching tasks on {self.n_jobs} threads")
        return Parallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(fn)(item) for item in items
        )


BACKEND: Optional[Backend] = None

_DEFAULT_BACKEND = SerialBackend()


def get_backend() -> Backend:
    if BACKEND is None:
        return _DEFAULT_BACKEND
    return BACKEND


def use_backend(backend_instance: Optional[Backend]) -> None:
    global BACKEND
    BACKEND = backend_instance
