from enum import Enum
from typing import Generic, Iterator, List, Tuple, TypeVar, Union, overload

import numpy
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import SupportsIndex

from psstspy.config import GRID_MAX_POINTS

T = TypeVar("T")


class PsstsModel(BaseModel):
    model_config = ConfigDict(
        protected_namespaces=(),
        arbitrary_types_allowed=True,
        frozen=True,
    )


class QuasiProbKind(str, Enum):
    # Wigner function, half-normalised
    WIGNER = "wigner"

    # Husimi Q-function, <alpha|rho|alpha>/pi
    HUSIMI = "husimi"

    # Glauber-Sudarshan P-function, density with respect to d²alpha/pi
    GLAUBER_P = "glauber_p"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    XLSX = "xlsx"


class Ledger(Generic[T]):
    """
    ordered collection of per-item results, e.g. the checks of an oracle comparison
    """

    def __init__(self, data: List[T]):
        self.data = data

    def __len__(self) -> int:
        return len(self.data)

    def __iter__(self) -> Iterator[T]:
        return iter(self.data)

    @overload
    def __getitem__(self, key: SupportsIndex) -> T: ...

    @overload
    def __getitem__(self, key: slice) -> List[T]: ...

    def __getitem__(self, key: Union[SupportsIndex, slice]) -> Union[T, List[T]]:
        return self.data[key]

    def append(self, item: T) -> None:
        self.data.append(item)


class GridSpec(PsstsModel):
    q_min: float
    q_max: float
    p_min: float
    p_max: float
    nq: int = Field(ge=2)
    np: int = Field(ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "GridSpec":
        if not self.q_max > self.q_min:
            raise ValueError("q_max must exceed q_min")
        if not self.p_max > self.p_min:
            raise ValueError("p_max must exceed p_min")
        if self.nq * self.np > GRID_MAX_POINTS:
            raise ValueError(f"grid has more than {GRID_MAX_POINTS} points")
        return self

    @staticmethod
    def from_tuple(values: Tuple[float, float, float, float, int, int]) -> "GridSpec":
        q_min, q_max, p_min, p_max, nq, np_ = values
        return GridSpec(q_min=q_min, q_max=q_max, p_min=p_min, p_max=p_max, nq=int(nq), np=int(np_))

    @staticmethod
    def parse(text: str) -> "GridSpec":
        """
        "qmin,qmax,pmin,pmax,nq,np" as given on the command line.
        """
        items = [item.strip() for item in text.split(",")]
        if len(items) != 6:
            raise ValueError(f"grid needs 6 comma-separated values, got {len(items)}")
        return GridSpec.from_tuple((float(items[0]), float(items[1]), float(items[2]), float(items[3]), int(items[4]), int(items[5])))

    def axes(self) -> Tuple[numpy.ndarray, numpy.ndarray]:
        return numpy.linspace(self.q_min, self.q_max, self.nq), numpy.linspace(self.p_min, self.p_max, self.np)

    def to_text(self) -> str:
        return f"{self.q_min!r},{self.q_max!r},{self.p_min!r},{self.p_max!r},{self.nq},{self.np}"
