"""Golden ground-state tables for Coulomb-plus-linear potentials.

The data file holds, for each row, the literature bounds and the three printed
SLET columns exactly as typeset (strings), so that the number of printed digits
is preserved.  Literature entries like ``1.027622(19)`` denote an upper bound
whose last digits are replaced by the parenthesised ones to give the lower bound.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from functools import lru_cache
from importlib import resources

from .potential import PotentialPair, RadialPotential

FAMILIES = ("vector-linear", "scalar-linear")


def make_pair(family: str, A1: float, k: float, mass: float = 1.0) -> PotentialPair:
    """``vector-linear``: V = -A1/r + k r, S = 0.  ``scalar-linear``: V = -A1/r, S = k r."""
    coulomb = RadialPotential.from_pairs([(-A1, -1.0)])
    linear = RadialPotential.from_pairs([(k, 1.0)])
    if family == "vector-linear":
        return PotentialPair(mass, vector=coulomb + linear)
    if family == "scalar-linear":
        return PotentialPair(mass, vector=coulomb, scalar=linear)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def last_digit_unit(text: str) -> float:
    """Value of one unit in the last printed decimal place of ``text``."""
    return float(Decimal(1).scaleb(Decimal(text).as_tuple().exponent))


def parse_bounds(text: str) -> tuple[float, float]:
    """``"1.027622(19)" -> (1.027619, 1.027622)``; a plain number gives a zero-width pair."""
    text = text.strip()
    if "(" not in text:
        v = float(text)
        return v, v
    upper, tail = text.split("(", 1)
    digits = tail.rstrip(")")
    lower = upper[: len(upper) - len(digits)] + digits
    lo, hi = float(lower), float(upper)
    return min(lo, hi), max(lo, hi)


@dataclass(frozen=True)
class GoldenRow:
    table: int
    family: str
    A1: float
    k: float
    ref_text: str
    printed: tuple  # (E0, E0 + E2/lbar^2, full) as typeset

    @property
    def ref_bounds(self):
        return parse_bounds(self.ref_text)

    @property
    def ref_unit(self):
        return last_digit_unit(self.ref_text.split("(")[0])

    def rounded_bounds(self):
        """Reference interval widened by half a unit of the last printed digit."""
        lo, hi = self.ref_bounds
        half = 0.5 * self.ref_unit
        return lo - half, hi + half

    @property
    def values(self):
        return tuple(float(t) for t in self.printed)

    @property
    def units(self):
        return tuple(last_digit_unit(t) for t in self.printed)

    def pair(self, mass: float = 1.0) -> PotentialPair:
        return make_pair(self.family, self.A1, self.k, mass)


@lru_cache(maxsize=None)
def _load():
    raw = resources.files("kgslet").joinpath("data/tables.json").read_text()
    return json.loads(raw)


def golden_rows(table: int) -> list[GoldenRow]:
    data = _load()["tables"]
    key = str(int(table))
    if key not in data:
        raise KeyError(f"unknown table {table!r}; available: {sorted(data)}")
    block = data[key]
    return [GoldenRow(int(table), block["family"], float(A1), float(k), ref, (e0, e2, full))
            for A1, k, ref, e0, e2, full in block["rows"]]


def table_ids():
    return sorted(int(k) for k in _load()["tables"])
