"""Exact scalar fields: the rationals and prime fields F_p.

Field elements are kept as "raw" values so the linear algebra kernels can run
on them without wrapper overhead: ``gmpy2.mpq`` for Q and reduced ``int``
residues for F_p.  :class:`Scalar` is the checked, user-facing wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import gmpy2
from gmpy2 import mpq


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    """Either Q (``p is None``) or the prime field F_p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not isinstance(self.p, int) or self.p < 2 or not gmpy2.is_prime(self.p):
                raise FieldError(f"F_p needs a prime p, got {self.p!r}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def zero(self):
        return 0 if self.p else mpq(0)

    @property
    def one(self):
        return 1 if self.p else mpq(1)

    def __str__(self):
        return "Q" if self.p is None else f"F_{self.p}"

    def to_json(self):
        return "Q" if self.p is None else {"Fp": self.p}

    @classmethod
    def from_json(cls, obj) -> "FieldSpec":
        if obj == "Q":
            return cls(None)
        if isinstance(obj, dict) and set(obj) == {"Fp"} and isinstance(obj["Fp"], int):
            return cls(obj["Fp"])
        raise FieldError(f'field must be "Q" or {{"Fp": p}}, got {obj!r}')

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse the command-line form ``q`` or ``fp:P``."""
        t = text.strip().lower()
        if t == "q":
            return cls(None)
        if t.startswith("fp:"):
            try:
                return cls(int(t[3:]))
            except ValueError:
                pass
        raise FieldError(f"field must be 'q' or 'fp:P', got {text!r}")

    # raw-value helpers

    def coerce(self, x: Any):
        """Map an int, Fraction, mpq, or "a/b" string into a raw field value."""
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldError(f"scalar over {x.field} used in {self}")
            return x.value
        if isinstance(x, bool):
            raise FieldError("booleans are not field elements")
        if isinstance(x, str):
            try:
                q = mpq(x.strip())
            except ValueError as exc:
                raise FieldError(f"cannot parse scalar {x!r}") from exc
        elif isinstance(x, int):
            q = mpq(x)
        elif isinstance(x, (Fraction, type(mpq(0)))):
            q = mpq(x)
        else:
            raise FieldError(f"unsupported scalar {x!r}")
        if self.p is None:
            return q
        den = int(q.denominator) % self.p
        if den == 0:
            raise FieldError(f"{x!r} has denominator divisible by {self.p}")
        return int(q.numerator) * pow(den, -1, self.p) % self.p

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("division by zero in " + str(self))
        if self.p:
            return pow(a, -1, self.p)
        return 1 / a

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def reduce(self, a):
        return a % self.p if self.p else a

    def sign(self, e: int):
        """(-1)**e as a raw value."""
        if e % 2:
            return self.p - 1 if self.p else mpq(-1)
        return 1 if self.p else mpq(1)

    def is_zero(self, a) -> bool:
        return not a

    def to_str(self, a) -> str:
        return str(a)

    def scalar(self, x) -> "Scalar":
        return Scalar(self, self.coerce(x))


Q = FieldSpec(None)


@dataclass(frozen=True)
class Scalar:
    field: FieldSpec
    value: Any

    def _check(self, other):
        if not isinstance(other, Scalar):
            return Scalar(self.field, self.field.coerce(other))
        if other.field != self.field:
            raise FieldError(f"mixed fields: {self.field} and {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.reduce(self.value + other.value))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.reduce(self.value - other.value))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.reduce(self.value * other.value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.reduce(self.value * self.field.inv(other.value)))

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field.coerce(other)
        except FieldError:
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"Scalar({self.value} in {self.field})"

    def __str__(self):
        return str(self.value)


_OPS = {
    "add": Scalar.__add__,
    "sub": Scalar.__sub__,
    "mul": Scalar.__mul__,
    "div": Scalar.__truediv__,
}


def arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Exact ``a op b`` for op in {add, sub, mul, div}."""
    if not isinstance(a, Scalar) or not isinstance(b, Scalar):
        raise TypeError("arith expects Scalar operands")
    if a.field != b.field:
        raise FieldError(f"mixed fields: {a.field} and {b.field}")
    try:
        return _OPS[op](a, b)
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
