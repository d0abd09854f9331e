# src/models/period_set.py
from dataclasses import dataclass


def _braces(values) -> str:
    return "{" + ",".join(str(v) for v in values) + "}"


@dataclass(frozen=True)
class PeriodSet:
    """A set T of hidden periods with its divisor closure D_T and support S_T.

    `support` holds 1-based column indices of the dictionary.
    """

    periods: tuple[int, ...]
    divisor_closure: tuple[int, ...]
    support: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.periods)

    @property
    def sparsity(self) -> int:
        """|S_T|, the number of atoms a mixture with these periods occupies."""
        return len(self.support)

    def __str__(self):
        return (
            f"{_braces(self.periods)}|D={_braces(self.divisor_closure)}"
            f"|S={_braces(self.support)}"
        )

    def label(self) -> str:
        """Compact form used in CSV cells, e.g. '3,5'."""
        return ",".join(str(p) for p in self.periods)
