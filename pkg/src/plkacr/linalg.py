"""Exact rational linear algebra used for structural indices."""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence

Matrix = list[list[Fraction]]


def to_fraction(value) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings are read as decimal literals (``"0.58"``, ``"-68"``, ``"1e-3"``)
    or ratios (``"1/3"``).  Floats are converted through their shortest
    decimal repr, so ``0.58`` becomes ``29/50`` and not the binary value.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite number {value}")
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite number {value}")
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty number")
        if "/" in text:
            return Fraction(text)
        dec = Decimal(text)
        if not dec.is_finite():
            raise ValueError(f"non-finite number {value!r}")
        return Fraction(dec)
    raise TypeError(f"cannot read {value!r} as a rational number")


def format_fraction(value: Fraction) -> str:
    """Render a fraction as a terminating decimal when possible, else ``p/q``."""
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    scaled = value * 10**places
    assert scaled.denominator == 1
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    sign = "-" if value < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def rank(rows: Iterable[Sequence]) -> int:
    """Exact rank of a matrix given as a sequence of rows."""
    work: Matrix = [[to_fraction(x) for x in row] for row in rows]
    if not work:
        return 0
    ncols = len(work[0])
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        p = work[r][col]
        for i in range(r + 1, len(work)):
            factor = work[i][col]
            if factor:
                factor /= p
                row_i, row_r = work[i], work[r]
                for j in range(col, ncols):
                    row_i[j] -= factor * row_r[j]
        r += 1
        if r == len(work):
            break
    return r


def transpose(mat: Sequence[Sequence]) -> Matrix:
    if not mat:
        return []
    return [list(col) for col in zip(*mat)]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def same_column_span(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    """True iff the column spaces of ``a`` and ``b`` (equal row count) coincide."""
    if len(a) != len(b):
        raise ValueError("row counts differ")
    ra = rank(transpose(a)) if a and a[0] else 0
    rb = rank(transpose(b)) if b and b[0] else 0
    if ra != rb:
        return False
    joined = [list(x) + list(y) for x, y in zip(a, b)]
    return rank(transpose(joined)) == ra
