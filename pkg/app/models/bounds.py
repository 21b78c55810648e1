"""Bound specifications and values."""
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.exceptions import ConfigurationError

BoundVariant = Literal[
    "vsym",
    "bsym-out",
    "bsym-in",
    "sym",
    "sym-in",
    "erm",
    "kfold",
    "stab-strong",
    "stab-weak",
    "kutin-strong",
    "kutin-weak",
    "half-out",
    "maj",
    "binary-half",
    "binary-maj",
    "erm-half",
    "binary-abs",
]

# Parameters each variant cannot be evaluated without
REQUIRED_FIELDS = {
    "vsym": ("p",),
    "bsym-out": ("p", "vc"),
    "bsym-in": ("p", "vc"),
    "sym": ("p", "vc"),
    "sym-in": ("p", "vc"),
    "erm": ("p", "vc"),
    "kfold": ("k", "vc"),
    "stab-strong": ("p", "lam", "delta_stab"),
    "stab-weak": ("p", "lam", "delta_stab"),
    "kutin-strong": ("b", "c", "delta_stab", "alpha"),
    "kutin-weak": ("b", "c", "delta_stab"),
    "half-out": ("p",),
    "maj": ("p", "l"),
    "binary-half": ("p",),
    "binary-maj": ("p", "l"),
    "erm-half": ("p", "vc"),
    "binary-abs": ("p",),
}


class BoundSpec(BaseModel):
    """Parameters of one bound evaluation.

    ``p`` is the test fraction and ``eps`` the deviation (tau for the
    Kutin tails).
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    variant: BoundVariant
    n: int = Field(..., ge=1)
    p: Optional[float] = Field(None, gt=0.0, lt=1.0)
    eps: float = Field(0.0, ge=0.0)
    vc: Optional[int] = Field(None, ge=1)
    k: Optional[int] = Field(None, ge=2)
    lam: Optional[float] = Field(None, ge=0.0, alias="lambda")
    delta_stab: Optional[float] = Field(None, ge=0.0, le=1.0, alias="delta")
    alpha: Optional[float] = Field(None, gt=0.0)
    l: Optional[int] = Field(None, ge=1)  # noqa: E741
    b: Optional[float] = Field(None, ge=0.0)
    c: Optional[float] = Field(None, ge=0.0)

    @model_validator(mode="after")
    def check_required(self):
        missing = [name for name in REQUIRED_FIELDS[self.variant] if getattr(self, name) is None]
        if missing:
            raise ConfigurationError(f"bound variant {self.variant!r} needs {', '.join(missing)}")
        return self

    def with_eps(self, eps: float) -> "BoundSpec":
        return self.model_copy(update={"eps": eps})


class BoundValue(BaseModel):
    """A probability bound: ``value`` = min(1, exp(``log_value``))."""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0.0, le=1.0)
    log_value: float
    branch: str
    notes: Tuple[str, ...] = ()
