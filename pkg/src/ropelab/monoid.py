"""The free commutative monoid of knot classes and its group completion.

Monoid elements are multisets of prime labels; completion sends them to
finitely supported integer vectors, on which invariants extend linearly.
Unidentified knots participate through opaque generators keyed by their
invariant fingerprint, so arithmetic stays total.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field


@dataclass(frozen=True)
class MonoidElement:
    """Multiset of prime labels; the empty multiset is the unit (unknot)."""

    primes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(sorted(self.primes)))

    @classmethod
    def unit(cls) -> "MonoidElement":
        return cls(())

    @classmethod
    def of(cls, *labels: str) -> "MonoidElement":
        return cls(tuple(labels))

    @property
    def is_unit(self) -> bool:
        return not self.primes

    def counts(self) -> Counter:
        return Counter(self.primes)

    def __str__(self) -> str:
        if self.is_unit:
            return "0_1"
        parts = []
        for label, k in sorted(self.counts().items()):
            parts.append(label if k == 1 else f"{k}*{label}")
        return " + ".join(parts)


def msum(a: MonoidElement, b: MonoidElement) -> MonoidElement:
    """Multiset union: the connected-sum operation on classes."""
    return MonoidElement(a.primes + b.primes)


@dataclass(frozen=True)
class GrothendieckElement:
    """Finitely supported integer vector over prime labels."""

    coeffs: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        clean = tuple(sorted((k, v) for k, v in dict(self.coeffs).items() if v != 0))
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def zero(cls) -> "GrothendieckElement":
        return cls(())

    def as_dict(self) -> dict[str, int]:
        return dict(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "GrothendieckElement") -> "GrothendieckElement":
        d = Counter(dict(self.coeffs))
        d.update(dict(other.coeffs))
        return GrothendieckElement(tuple(d.items()))

    def __neg__(self) -> "GrothendieckElement":
        return GrothendieckElement(tuple((k, -v) for k, v in self.coeffs))

    def __sub__(self, other: "GrothendieckElement") -> "GrothendieckElement":
        return self + (-other)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for label, v in self.coeffs:
            mag = label if abs(v) == 1 else f"{abs(v)}*{label}"
            if not parts:
                parts.append(mag if v > 0 else f"-{mag}")
            else:
                parts.append(f"+ {mag}" if v > 0 else f"- {mag}")
        return " ".join(parts)


def complete(a: MonoidElement) -> GrothendieckElement:
    """The canonical map into the Grothendieck group (injective: K is free)."""
    return GrothendieckElement(tuple(a.counts().items()))


def gdiff(a: MonoidElement, b: MonoidElement) -> GrothendieckElement:
    """Image of the formal difference a - b."""
    return complete(a) - complete(b)


def extend_linearly(values: dict[str, int], g: GrothendieckElement) -> int:
    """Linear extension of a prime-wise invariant to the group."""
    total = 0
    for label, coeff in g.coeffs:
        if label not in values:
            raise KeyError(f"invariant undefined on label {label!r}")
        total += coeff * values[label]
    return total


_TERM = re.compile(r"^(?:(\d+)\*)?([A-Za-z0-9_#!\[\]:,.-]+)$")


def parse_element(text: str) -> GrothendieckElement:
    """Parse the textual form, e.g. ``"3_1 + 2*4_1 - 5_2"``."""
    text = text.strip()
    if text in ("", "0"):
        return GrothendieckElement.zero()
    tokens = text.replace("+", " + ").replace("- ", " - ").split()
    coeffs: Counter = Counter()
    sign = 1
    expect_term = True
    for tok in tokens:
        if tok == "+":
            sign, expect_term = 1, True
            continue
        if tok == "-":
            sign, expect_term = -1, True
            continue
        if tok.startswith("-") and expect_term is True and len(tok) > 1:
            sign, tok = -sign, tok[1:]
        m = _TERM.match(tok)
        if not m:
            raise ValueError(f"cannot parse term {tok!r}")
        mult = int(m.group(1)) if m.group(1) else 1
        label = m.group(2)
        if label != "0_1":
            coeffs[label] += sign * mult
        sign, expect_term = 1, False
    return GrothendieckElement(tuple(coeffs.items()))
