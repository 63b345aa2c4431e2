"""Names of the replication-success methods and their success levels."""
from __future__ import annotations

import enum


class Method(str, enum.Enum):
    SCEPTICAL_CONTROLLED = "SCEPTICAL_CONTROLLED"
    SCEPTICAL_NOMINAL = "SCEPTICAL_NOMINAL"
    SCEPTICAL_GOLDEN = "SCEPTICAL_GOLDEN"
    TWO_TRIALS = "TWO_TRIALS"
    FISHER = "FISHER"
    STOUFFER = "STOUFFER"
    PEARSON = "PEARSON"

    @classmethod
    def parse(cls, value):
        """Accept enum members, exact names or short lower-case aliases."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper().replace("-", "_")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown method {value!r}") from None

    @property
    def is_sceptical(self):
        return self.name.startswith("SCEPTICAL")


_ALIASES = {
    "CONTROLLED": "SCEPTICAL_CONTROLLED",
    "SCEPTICAL": "SCEPTICAL_CONTROLLED",
    "NOMINAL": "SCEPTICAL_NOMINAL",
    "GOLDEN": "SCEPTICAL_GOLDEN",
    "2TR": "TWO_TRIALS",
    "TWO_TRIALS_RULE": "TWO_TRIALS",
}


def success_level(method, alpha, c):
    """Level ``gamma`` of the success criterion used by a sceptical method
    (and by the two-trials rule, which is the ``c = 0`` case)."""
    from .calibration import gamma_c, golden_level

    method = Method.parse(method)
    if method is Method.SCEPTICAL_CONTROLLED:
        return gamma_c(alpha, c)
    if method is Method.SCEPTICAL_GOLDEN:
        return golden_level(alpha)
    if method in (Method.SCEPTICAL_NOMINAL, Method.TWO_TRIALS):
        return alpha
    raise ValueError(f"{method.value} has no sceptical success level")
