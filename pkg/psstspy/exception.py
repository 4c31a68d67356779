from enum import Enum
from typing import List, Optional


class PsstsError(Exception):
    """
    base class for all psstspy errors
    """

    pass


class PsstsParameterError(PsstsError):
    def __init__(self, field: str = "", value: object = None, msg: str = ""):
        self.field = field
        self.value = value
        self.msg = msg
        if field:
            super().__init__(f"invalid parameter, field: {field}, value: {value}, msg: {msg}")
        else:
            super().__init__(f"invalid parameter, msg: {msg}")


class NonRegularPError(PsstsError):
    def __init__(self, nbar: float, r: float):
        self.nbar = nbar
        self.r = r
        super().__init__(
            f"P-function is not an ordinary function, nbar: {nbar}, r: {r}, "
            f"msg: requires D > 0 and (2nbar+1)exp(-2r) > 1"
        )


class PsstsOracleError(PsstsError):
    """
    truncation and convergence failures of the Fock-space oracle
    """

    def __init__(self, msg: str = "", dim_trace: Optional[List[int]] = None):
        self.msg = msg
        self.dim_trace = list(dim_trace or [])
        if self.dim_trace:
            super().__init__(f"{msg}, dim_trace: {self.dim_trace}")
        else:
            super().__init__(msg)


class UnitarityLossError(PsstsOracleError):
    def __init__(self, defect: float, dim: int):
        self.defect = defect
        self.dim = dim
        super().__init__(f"squeeze operator lost unitarity, defect: {defect:.3e}, dim: {dim}", [dim])


class MaxDimExceededError(PsstsOracleError):
    def __init__(self, max_dim: int, dim_trace: Optional[List[int]] = None):
        self.max_dim = max_dim
        super().__init__(f"truncation did not converge below max_dim: {max_dim}", dim_trace)


class StepSizeTooCoarseError(PsstsOracleError):
    def __init__(self, dt: float, distance: float):
        self.dt = dt
        self.distance = distance
        super().__init__(f"master equation step did not converge, dt: {dt:.3e}, trace distance: {distance:.3e}")


class DisplacementOutOfRangeError(PsstsOracleError):
    def __init__(self, alpha: complex, dim: int):
        self.alpha = alpha
        self.dim = dim
        super().__init__(f"displacement outside trusted truncation region, alpha: {alpha}, dim: {dim}", [dim])


class GridTooSmallError(PsstsOracleError):
    def __init__(self, tail_mass: float):
        self.tail_mass = tail_mass
        super().__init__(f"convolution grid too small, kernel mass outside grid: {tail_mass:.3e}")


class ExitCode(int, Enum):
    OK = 0
    INPUT = 2
    TOLERANCE = 3
    TRUNCATION = 4
