from typing import TYPE_CHECKING, Optional

from psstspy.states import StateParams

if TYPE_CHECKING:
    from .closedform import ClosedFormClient
    from .fockoracle import FockOracleClient, TruncationPolicy


class Pssts(object):
    def __init__(
        self,
        params: StateParams,
        policy: Optional["TruncationPolicy"] = None,
    ):
        self._params = params
        self._policy = policy

        # evaluators
        self._closedform: Optional[ClosedFormClient] = None
        self._oracle: Optional[FockOracleClient] = None

    @property
    def params(self) -> StateParams:
        return self._params

    @property
    def closedform(self) -> "ClosedFormClient":
        if not self._closedform:
            from .closedform import ClosedFormClient

            self._closedform = ClosedFormClient(self._params)
        return self._closedform

    @property
    def oracle(self) -> "FockOracleClient":
        if not self._oracle:
            from psstspy.fockoracle import FockOracleClient

            self._oracle = FockOracleClient(self._params, self._policy)
        return self._oracle
