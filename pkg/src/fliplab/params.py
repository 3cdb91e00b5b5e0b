"""Flip-parameter sequences with exact rational entries."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class ParamsError(ValueError):
    """Invalid flip-parameter vector or parameter file."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParamsError(f"cannot parse rational {x!r}") from exc
    raise ParamsError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class FlipParams:
    """Acceptance weights p_1, p_2, ... for flipping Kempe components.

    ``self(ell)`` is the weight for a component of size ``ell``; indices
    outside the stored support, including p_0, are zero.  A valid vector
    has p_1 = 1, is non-increasing, and stays inside [0, 1].
    """

    values: tuple[Fraction, ...]

    def __post_init__(self):
        vals = tuple(_as_fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals or vals[0] != 1:
            raise ParamsError("p_1 must equal 1")
        for ell in range(1, len(vals)):
            if vals[ell] > vals[ell - 1]:
                raise ParamsError(f"p_{ell + 1} > p_{ell} breaks monotonicity")
        if any(v < 0 or v > 1 for v in vals):
            raise ParamsError("entries must lie in [0, 1]")

    def __call__(self, ell: int) -> Fraction:
        if 1 <= ell <= len(self.values):
            return self.values[ell - 1]
        return Fraction(0)

    @property
    def cutoff(self) -> int:
        """Smallest L such that p_ell = 0 for every ell >= L."""
        ell = len(self.values)
        while ell >= 1 and self.values[ell - 1] == 0:
            ell -= 1
        return ell + 1

    def support(self) -> range:
        return range(1, self.cutoff)

    def accept_threshold(self, ell: int) -> int:
        """64-bit integer threshold for the accept draw of a size-ell move.

        A uniform u64 draw u accepts iff u < floor(p_ell/ell * 2**64); the
        bias against the exact rational is below 2**-64.
        """
        if ell <= 0:
            return 0
        prob = self(ell) / ell
        return (prob.numerator << 64) // prob.denominator

    def to_file_text(self) -> str:
        lines = []
        for v in self.values:
            lines.append(str(v) if v.denominator > 1 else str(v.numerator))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_file_text(cls, text: str) -> "FlipParams":
        vals = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                vals.append(_as_fraction(line))
            except ParamsError as exc:
                raise ParamsError(f"line {lineno}: {exc}") from exc
        if not vals:
            raise ParamsError("parameter file holds no entries")
        return cls(tuple(vals))


_F = Fraction

#: Optimal parameters of the reduced flip program at kappa = 11/6.
P_BASELINE = FlipParams(
    (_F(1), _F(13, 42), _F(1, 6), _F(2, 21), _F(1, 21), _F(1, 84))
)

#: Optimal parameters of the starred reduced program at kappa = 161/88.
P_IMPROVED = FlipParams(
    (_F(1), _F(185, 616), _F(1, 6), _F(47, 462), _F(9, 154), _F(2, 77))
)

KAPPA_BASELINE = _F(11, 6)
KAPPA_IMPROVED = _F(161, 88)

#: Gap between the two optima; the coefficient in the contraction bound.
EPS_IMPROVEMENT = KAPPA_BASELINE - KAPPA_IMPROVED
assert EPS_IMPROVEMENT == _F(1, 264)

NAMED_PARAMS = {"baseline": P_BASELINE, "improved": P_IMPROVED}


def default_gamma(k: int, max_degree: int) -> Fraction:
    """Metric deformation weight used when none is given explicitly."""
    if k <= 0:
        raise ParamsError("k must be positive")
    return EPS_IMPROVEMENT * max_degree / (53 * k)
