"""Manifold input: generator degrees and intersection form of H^*(M).

A closed (n-1)-connected d-manifold with d <= 3n-2 has cohomology
``k ⊕ span(x_1..x_r) ⊕ k·M`` where ``x_i x_j = c_ij M``.  Everything the
engine computes depends only on (n, d, degrees, c, field).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path

from .linalg import Matrix, rank, solve
from .scalars import FieldError, FieldSpec, Q


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(errors))


@dataclass(frozen=True)
class GeneratorTable:
    u_degrees: tuple[int, ...]
    equal_degree_flag: bool


@dataclass(frozen=True)
class ManifoldData:
    n: int
    d: int
    degrees: tuple[int, ...]
    intersection: tuple[tuple, ...]
    field: FieldSpec = Q
    name: str = ""
    generators: GeneratorTable | None = dc_field(default=None, compare=False)
    source: tuple | None = dc_field(default=None, compare=False, repr=False)

    @property
    def r(self) -> int:
        return len(self.degrees)

    @property
    def u_degrees(self) -> tuple[int, ...]:
        return tuple(x - 1 for x in self.degrees)

    @property
    def equal_degree(self) -> bool:
        return self.d == 2 * self.n and all(x == self.n for x in self.degrees)

    def c(self, i: int, j: int):
        return self.intersection[i][j]

    def with_field(self, field: FieldSpec) -> "ManifoldData":
        """Same integer/rational data reduced into another field (revalidated)."""
        raw = self.source if self.source is not None else self.intersection
        return validate(replace(self, field=field, intersection=raw, generators=None))

    def key(self) -> tuple:
        return (self.n, self.d, self.degrees, self.intersection, self.field)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "d": self.d,
            "degrees": list(self.degrees),
            "intersection": [[str(v) for v in row] for row in self.intersection],
            "field": self.field.to_json(),
        }


def check_invariants(m: ManifoldData) -> list[str]:
    """Every violated hypothesis, one message each."""
    errors = []
    n, d, degs = m.n, m.d, m.degrees
    r = len(degs)
    if not isinstance(n, int) or n < 2:
        errors.append(f"connectivity parameter n must be an integer >= 2, got {n!r}")
        return errors
    if r < 3:
        errors.append(f"r = {r} < 3: need dim H^*(M) = r + 2 > 4")
    if d > 3 * n - 2:
        errors.append(f"d = {d} > 3n - 2 = {3 * n - 2}")
    for i, x in enumerate(degs):
        if not n <= x <= d - n:
            errors.append(f"degree |x_{i + 1}| = {x} outside [n, d - n] = [{n}, {d - n}]")
    c = m.intersection
    if len(c) != r or any(len(row) != r for row in c):
        errors.append(f"intersection matrix must be {r}x{r}")
        return errors
    f = m.field
    for i in range(r):
        for j in range(r):
            if c[i][j] and degs[i] + degs[j] != d:
                errors.append(
                    f"degree mismatch: c_{i + 1}{j + 1} != 0 but |x_{i + 1}| + |x_{j + 1}| = "
                    f"{degs[i] + degs[j]} != d = {d}")
            if c[i][j] != f.reduce(f.sign(degs[i] * degs[j]) * c[j][i]):
                if i < j:
                    errors.append(
                        f"graded symmetry fails: c_{i + 1}{j + 1} != (-1)^(|x_{i + 1}||x_{j + 1}|) "
                        f"c_{j + 1}{i + 1}")
                elif i == j:
                    errors.append(f"graded symmetry fails on the diagonal entry c_{i + 1}{i + 1}")
    if rank(Matrix.from_dense(f, [list(row) for row in c])) < r:
        errors.append(f"intersection matrix is singular over {f}")
    return errors


def validate(m: ManifoldData) -> ManifoldData:
    """Coerce the intersection form into the field and check all hypotheses."""
    try:
        coerced = tuple(tuple(m.field.coerce(v) for v in row) for row in m.intersection)
    except (FieldError, TypeError) as exc:
        raise ValidationError([f"bad intersection entry: {exc}"]) from exc
    src = m.source if m.source is not None else tuple(tuple(row) for row in m.intersection)
    out = replace(m, degrees=tuple(m.degrees), intersection=coerced, source=src)
    errors = check_invariants(out)
    if errors:
        raise ValidationError(errors)
    table = GeneratorTable(out.u_degrees, out.equal_degree)
    return replace(out, generators=table)


def inverse_intersection(m: ManifoldData) -> list[list]:
    """Exact inverse of c as a dense list of raw field values."""
    f = m.field
    r = m.r
    M = Matrix.from_dense(f, [list(row) for row in m.intersection])
    cols = []
    for j in range(r):
        x = solve(M, {j: f.one})
        if x is None:
            raise ValidationError([f"intersection matrix is singular over {f}"])
        cols.append(x)
    return [[cols[j].get(i, f.zero) for j in range(r)] for i in range(r)]


def form_parity_check(m: ManifoldData) -> bool | None:
    """Equal-degree forms are symmetric for even n and skew for odd n."""
    if not m.equal_degree:
        return None
    f = m.field
    s = f.sign(m.n)
    return all(m.intersection[i][j] == f.reduce(s * m.intersection[j][i])
               for i in range(m.r) for j in range(m.r))


_KEYS = {"name", "n", "d", "degrees", "intersection", "field"}


def parse_manifold(obj, field: FieldSpec | None = None) -> ManifoldData:
    """Build (unvalidated) data from the JSON object form; strict on keys and types."""
    if not isinstance(obj, dict):
        raise ParseError("manifold file must hold a JSON object")
    extra = set(obj) - _KEYS
    if extra:
        raise ParseError(f"unknown keys: {sorted(extra)}")
    missing = {"n", "d", "degrees", "intersection"} - set(obj)
    if missing:
        raise ParseError(f"missing keys: {sorted(missing)}")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise ParseError("name must be a string")
    for k in ("n", "d"):
        if not isinstance(obj[k], int) or isinstance(obj[k], bool):
            raise ParseError(f"{k} must be an integer")
    degs = obj["degrees"]
    if not isinstance(degs, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in degs):
        raise ParseError("degrees must be a list of integers")
    c = obj["intersection"]
    if not isinstance(c, list) or not all(isinstance(row, list) for row in c):
        raise ParseError("intersection must be a list of lists")
    for row in c:
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, str)):
                raise ParseError(f"intersection entries must be integers or 'a/b' strings, got {v!r}")
    if field is None:
        try:
            field = FieldSpec.from_json(obj.get("field", "Q"))
        except FieldError as exc:
            raise ParseError(str(exc)) from exc
    return ManifoldData(n=obj["n"], d=obj["d"], degrees=tuple(degs),
                        intersection=tuple(tuple(row) for row in c), field=field, name=name)


def load_manifold(path: str | Path, field: FieldSpec | None = None) -> ManifoldData:
    """Read, parse, and validate a manifold JSON file."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return validate(parse_manifold(obj, field))


def make_manifold(n: int, d: int, degrees, intersection, field: FieldSpec = Q, name: str = "") -> ManifoldData:
    return validate(ManifoldData(n=n, d=d, degrees=tuple(degrees),
                                 intersection=tuple(tuple(row) for row in intersection),
                                 field=field, name=name))


def connected_sum_cp2(r: int = 3, field: FieldSpec = Q) -> ManifoldData:
    """r copies of CP^2: n = 2, d = 4, c = identity."""
    c = [[int(i == j) for j in range(r)] for i in range(r)]
    return make_manifold(2, 4, [2] * r, c, field, name=f"#{r} CP2")


def hyperbolic(n: int, blocks: int = 2, field: FieldSpec = Q) -> ManifoldData:
    """Connected sum of products S^n x S^n: hyperbolic blocks, skew when n is odd."""
    s = -1 if n % 2 else 1
    r = 2 * blocks
    c = [[0] * r for _ in range(r)]
    for b in range(blocks):
        c[2 * b][2 * b + 1] = 1
        c[2 * b + 1][2 * b] = s
    return make_manifold(n, 2 * n, [n] * r, c, field, name=f"#{blocks} S{n}xS{n}")


def reference_manifolds(field: FieldSpec = Q) -> list[ManifoldData]:
    return [connected_sum_cp2(3, field), hyperbolic(2, 2, field), hyperbolic(3, 2, field)]
