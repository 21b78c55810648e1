"""Split-selection tables."""
from typing import Literal, Tuple

from pydantic import BaseModel, ConfigDict

SelectionVariant = Literal["erm", "sym"]


class SplitRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int
    p: float
    r_hat_out: float
    exact: bool
    delta_nk: float
    log_delta_nk: float
    f_value: float
    f_branch: str
    objective: float


class SplitTable(BaseModel):
    """R_CV^Out(k/n) + f(n, k/n, delta_nk) for every test size k, and its argmin."""
    model_config = ConfigDict(frozen=True)

    rows: Tuple[SplitRow, ...]
    k_star: int
    p_star: float
    eta: float
    vc: int
    variant: SelectionVariant = "erm"
