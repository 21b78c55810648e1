"""Loss function models."""
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict

LossKind = Literal["zero-one", "clipped-absolute", "clipped-squared"]
SurrogateKind = Literal["hinge", "exponential", "logit"]


class LossFunction(BaseModel):
    """A loss bounded in [0, 1]."""
    model_config = ConfigDict(frozen=True)

    kind: LossKind = "zero-one"
    labels: Optional[Tuple[int, ...]] = None

    @property
    def is_classification(self) -> bool:
        return self.kind == "zero-one"


class ConvexSurrogate(BaseModel):
    """Convex upper bound C(h(y, score)) with the margin h(y, s) = -y s.

    Binary labels 1 and 2 map to -1 and +1.
    """
    model_config = ConfigDict(frozen=True)

    c_kind: SurrogateKind = "hinge"
    clamp: bool = True
