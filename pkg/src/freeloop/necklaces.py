"""Closed-form Betti numbers of the cyclic part via necklace counts.

Alphabet {1..m}.  A word contains "12" cyclically if it contains the factor
12 or begins with 2 and ends with 1.  In the equal-degree case the words
avoiding the factor 12 have the same count as a basis of U(d), which gives

    W_not12(d) = dim U(d),   W_12(d) = m^d - dim U(d),
    R_c(d) = W_12(d) + W_not12(d - 2),   S_c(d) = m^d - R_c(d)
           = dim U(d) - dim U(d - 2)

with dim U(0) = 1, dim U(1) = m, dim U(d) = m dim U(d-1) - dim U(d-2) and
dim U(negative) = 0.  The brute-force enumerators below count words and
rotation orbits literally and serve as independent oracles.
"""

from __future__ import annotations

from itertools import product

from sympy import divisors
from sympy.functions.combinatorial.numbers import mobius, totient

ORACLE_LIMIT = 10 ** 7


class ResourceGuardError(RuntimeError):
    pass


class NecklaceError(ValueError):
    pass


def _check(m: int, w: int):
    if m < 1 or w < 1:
        raise NecklaceError(f"need m >= 1 and w >= 1, got m={m}, w={w}")


def _exact(num: int, den: int, what: str) -> int:
    q, rem = divmod(num, den)
    if rem:
        raise NecklaceError(f"{what}: {num} is not divisible by {den}")
    return q


def count_necklaces(m: int, w: int) -> int:
    """(1/w) sum_{f|w} phi(f) m^{w/f}."""
    _check(m, w)
    return _exact(sum(int(totient(f)) * m ** (w // f) for f in divisors(w)), w, "necklace count")


def primitive_necklaces(m: int, e: int, values=None) -> int:
    """(1/e) sum_{d|e} mu(d) S(e/d) with S(k) = m^k unless ``values`` is given."""
    s = values if values is not None else (lambda k: m ** k)
    return _exact(sum(int(mobius(d)) * s(e // d) for d in divisors(e)), e, "primitive count")


def count_necklaces_by_period(m: int, w: int) -> int:
    """sum_{e|w} (1/e) sum_{d|e} mu(d) m^{e/d}; equals count_necklaces."""
    _check(m, w)
    return sum(primitive_necklaces(m, e) for e in divisors(w))


def count_even_period(m: int, w: int) -> int:
    """Necklaces of length w whose period is even."""
    _check(m, w)
    return sum(primitive_necklaces(m, e) for e in divisors(w) if e % 2 == 0)


def hilbert_dims(m: int, top: int) -> list[int]:
    """dim U(0..top) from 1/(1 - m t + t^2)."""
    dims = [1, m]
    while len(dims) <= top:
        dims.append(m * dims[-1] - dims[-2])
    return dims[: top + 1]


def dim_u(m: int, d: int) -> int:
    return hilbert_dims(m, d)[d] if d >= 0 else 0


def w_not12(m: int, d: int) -> int:
    return dim_u(m, d)


def w_12(m: int, d: int) -> int:
    return m ** d - dim_u(m, d) if d >= 0 else 0


def r_c(m: int, d: int) -> int:
    return w_12(m, d) + w_not12(m, d - 2)


def s_c(m: int, d: int) -> int:
    """Words of length d avoiding cyclic 12: dim U(d) - dim U(d-2)."""
    if d < 0:
        raise NecklaceError("negative length")
    return dim_u(m, d) - dim_u(m, d - 2)


def parity_case(n: int, w: int) -> str:
    return "n_and_w_even" if n % 2 == 0 and w % 2 == 0 else "n_or_w_odd"


def betti_formula(m: int, w: int, n: int) -> int:
    """dim of the cyclic-word homology in weight w, equal degrees |x_i| = n."""
    if m < 3:
        raise NecklaceError(f"m = {m} < 3: need dim H^*(M) > 4")
    if w < 3:
        raise NecklaceError(f"formula holds for w >= 3, got {w}")
    s = lambda k: s_c(m, k)
    if parity_case(n, w) == "n_or_w_odd":
        return _exact(sum(int(totient(f)) * s(w // f) for f in divisors(w)), w, "totient sum")
    return sum(primitive_necklaces(m, e, s) for e in divisors(w) if e % 2 == 0)


# brute-force oracles

def has_cyclic_12(word) -> bool:
    if any(a == 1 and b == 2 for a, b in zip(word, word[1:])):
        return True
    return len(word) >= 2 and word[0] == 2 and word[-1] == 1


def has_12(word) -> bool:
    return any(a == 1 and b == 2 for a, b in zip(word, word[1:]))


_PATTERNS = {
    "none": lambda wd: True,
    "avoid12": lambda wd: not has_cyclic_12(wd),
    "contains12": has_cyclic_12,
    "factor12": has_12,
    "avoid_factor12": lambda wd: not has_12(wd),
}


def _words(m: int, w: int):
    if m ** w > ORACLE_LIMIT:
        raise ResourceGuardError(f"{m}^{w} words exceed the enumeration limit {ORACLE_LIMIT}")
    return product(range(1, m + 1), repeat=w)


def period(word) -> int:
    w = len(word)
    for p in range(1, w + 1):
        if w % p == 0 and word[p:] + word[:p] == word:
            return p
    return w


def word_oracle(m: int, w: int, pattern_mode: str = "none") -> int:
    """Count words of length w over {1..m} matching a pattern mode."""
    keep = _PATTERNS[pattern_mode]
    if w == 0:
        return 1 if keep(()) else 0
    return sum(1 for wd in _words(m, w) if keep(wd))


def orbit_oracle(m: int, w: int, pattern_mode: str = "none", even_period: bool = False) -> int:
    """Count rotation orbits of matching words, optionally only those of even period."""
    _check(m, w)
    keep = _PATTERNS[pattern_mode]
    count = 0
    for wd in _words(m, w):
        if min(wd[k:] + wd[:k] for k in range(w)) != wd:
            continue
        if not keep(wd):
            continue
        if even_period and period(wd) % 2:
            continue
        count += 1
    return count


def betti_oracle(m: int, w: int, n: int) -> int:
    """betti_formula by enumeration: orbits of cyclic-12-avoiding words."""
    return orbit_oracle(m, w, "avoid12", even_period=parity_case(n, w) == "n_and_w_even")
