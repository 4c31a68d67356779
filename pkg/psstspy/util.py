import math
from typing import List

import numpy as np

SQRT2 = math.sqrt(2.0)


def alpha_from_qp(q, p):
    return (np.asarray(q) + 1j * np.asarray(p)) / SQRT2


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """
    Half the trace norm of rho - sigma; both Hermitian and of equal shape.
    """
    diff = rho - sigma
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def parse_floats(text: str) -> List[float]:
    return [float(item) for item in text.split(",") if item.strip()]


def parse_ints(text: str) -> List[int]:
    return [int(item) for item in text.split(",") if item.strip()]
