"""Finite-field scalars and dense matrices over GF(p) and GF(2^m).

Prime fields use plain modular arithmetic.  Binary extension fields use
log/antilog tables built from a fixed reduction polynomial, so every
operation is a table lookup.  Matrices hold a read-only ``int64`` numpy
array; all arithmetic is vectorised over it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DivisionByZero,
    FieldMismatch,
    FieldTooLarge,
    InconsistentSystem,
    NonPrimeCharacteristic,
    RankDeficient,
    ReducibleModulus,
    UnsupportedExtension,
)

MAX_ORDER = 1 << 16

# x^8+x^4+x^3+x+1 (AES) for m=8; the rest are low-weight irreducibles.
DEFAULT_POLYS = {
    2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x89, 8: 0x11B,
    9: 0x211, 10: 0x409, 11: 0x805, 12: 0x1053, 13: 0x201B, 14: 0x4443,
    15: 0x8003, 16: 0x1100B,
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _deg(a: int) -> int:
    return a.bit_length() - 1


def poly_mod(a: int, b: int) -> int:
    """Remainder of GF(2)[x] polynomials encoded as bit masks."""
    db = _deg(b)
    while a and _deg(a) >= db:
        a ^= b << (_deg(a) - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    m = _deg(poly)
    if m < 1:
        return False
    return all(poly_mod(poly, g) != 0 for g in range(2, 1 << (m // 2 + 1)))


def _clmul_mod(a: int, b: int, poly: int, m: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return r


class FieldSpec:
    """The field F_q with q = p**m.

    Instances are cached and immutable; compare with ``==``.  Use
    :func:`field_new` rather than calling the constructor directly.
    """

    __slots__ = ("p", "m", "poly", "q", "_exp", "_log", "_inv")

    def __init__(self, p: int, m: int = 1, poly: int | None = None):
        if not is_prime(p):
            raise NonPrimeCharacteristic(f"characteristic {p} is not prime")
        if m < 1:
            raise UnsupportedExtension(f"extension degree must be >= 1, got {m}")
        if m > 1 and p != 2:
            raise UnsupportedExtension(f"extension fields need p = 2, got p = {p}")
        if p**m > MAX_ORDER:
            raise FieldTooLarge(f"q = {p}^{m} exceeds 2^16")
        self.p, self.m, self.q = p, m, p**m
        self._inv = None
        if m == 1:
            self.poly = None
            self._exp = self._log = None
            return
        if poly is None:
            poly = DEFAULT_POLYS[m]
        if _deg(poly) != m or not is_irreducible(poly):
            raise ReducibleModulus(f"{poly:#x} is not an irreducible polynomial of degree {m}")
        self.poly = poly
        self._build_tables()

    def _build_tables(self):
        q, m, poly = self.q, self.m, self.poly
        # x itself need not be primitive (it is not for the AES modulus)
        for g in range(2, q):
            powers = [1]
            x = g
            while x != 1:
                powers.append(x)
                x = _clmul_mod(x, g, poly, m)
            if len(powers) == q - 1:
                break
        exp = np.array(powers + powers, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)
        exp.flags.writeable = False
        log.flags.writeable = False
        self._exp, self._log = exp, log

    # -- identity ----------------------------------------------------------

    def _key(self):
        return (self.p, self.m, self.poly)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.q})"
        return f"GF(2^{self.m}, poly={self.poly:#x})"

    def to_json(self) -> dict:
        d = {"p": self.p, "m": self.m}
        if self.poly is not None:
            d["poly"] = self.poly
        return d

    # -- scalar ops on raw ints -------------------------------------------

    @property
    def binary(self) -> bool:
        return self.p == 2

    def add(self, a: int, b: int) -> int:
        return a ^ b if self.binary else (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return a ^ b if self.binary else (a - b) % self.p

    def neg(self, a: int) -> int:
        return a if self.binary else (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return int(self._exp[self._log[a] + self._log[b]])

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise DivisionByZero("zero has no multiplicative inverse")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def inverse_table(self) -> np.ndarray:
        """``t[a]`` is the inverse of ``a`` (``t[0]`` is 0)."""
        if self._inv is None:
            t = np.zeros(self.q, dtype=np.int64)
            if self.m == 1:
                p = self.p
                if p > 2:
                    t[1] = 1
                    for i in range(2, p):
                        t[i] = (-(p // i) * t[p % i]) % p
                else:
                    t[1] = 1
            else:
                nz = np.arange(1, self.q)
                t[nz] = self._exp[(self.q - 1 - self._log[nz]) % (self.q - 1)]
            t.flags.writeable = False
            self._inv = t
        return self._inv

    # -- vectorised ops on int arrays ----------------------------------------

    def vadd(self, a, b):
        return np.bitwise_xor(a, b) if self.binary else (a + b) % self.p

    def vsub(self, a, b):
        return np.bitwise_xor(a, b) if self.binary else (a - b) % self.p

    def vmul(self, a, b):
        if self.m == 1:
            return (a * b) % self.p
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        out = self._exp[self._log[a] + self._log[b]]
        out[(a == 0) | (b == 0)] = 0
        return out

    def element(self, value: int) -> "FieldElement":
        return FieldElement(int(value), self)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(v, self) for v in range(self.q))


@lru_cache(maxsize=None)
def field_new(p: int, m: int = 1, poly: int | None = None) -> FieldSpec:
    """Build (or fetch the cached) field of order ``p**m``.

    >>> field_new(7)
    GF(7)
    >>> field_new(2, 8).poly == 0x11B
    True
    """
    return FieldSpec(p, m, poly)


def field_from_json(d: dict) -> FieldSpec:
    from .errors import SchemaError

    if not isinstance(d, dict) or set(d) - {"p", "m", "poly"} or "p" not in d:
        raise SchemaError(f"bad field designation: {d!r}")
    return field_new(int(d["p"]), int(d.get("m", 1)), d.get("poly"))


def parse_field(text: str) -> FieldSpec:
    """Parse the CLI form ``p`` or ``p,m``."""
    parts = [int(x) for x in text.split(",")]
    return field_new(*parts)


# -- scalars -----------------------------------------------------------------

@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not an element of {self.field}")

    def _other(self, b) -> int:
        if isinstance(b, FieldElement):
            if b.field != self.field:
                raise FieldMismatch(f"{self.field} vs {b.field}")
            return b.value
        return int(b) % self.field.q

    def __add__(self, b):
        return FieldElement(self.field.add(self.value, self._other(b)), self.field)

    def __sub__(self, b):
        return FieldElement(self.field.sub(self.value, self._other(b)), self.field)

    def __mul__(self, b):
        return FieldElement(self.field.mul(self.value, self._other(b)), self.field)

    def __truediv__(self, b):
        return FieldElement(self.field.div(self.value, self._other(b)), self.field)

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    __radd__ = __add__
    __rmul__ = __mul__

    def inv(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}@{self.field!r}"


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def div(a: FieldElement, b: FieldElement) -> FieldElement:
    return a / b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


# -- matrices ----------------------------------------------------------------

class FieldMatrix:
    """Dense immutable matrix over a :class:`FieldSpec`."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        arr = np.array(data, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise DimensionMismatch(f"expected a 2-d array, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError(f"entries outside {field}")
        arr.flags.writeable = False
        self.field = field
        self.data = arr

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "FieldMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "FieldMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]], cols: int | None = None) -> "FieldMatrix":
        if len(rows) == 0:
            return cls.zeros(field, 0, cols or 0)
        return cls(field, [[int(v) for v in r] for r in rows])

    @classmethod
    def column(cls, field: FieldSpec, values: Sequence[int]) -> "FieldMatrix":
        return cls(field, np.asarray(values, dtype=np.int64).reshape(-1, 1))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def entries(self) -> list[FieldElement]:
        """Row-major entries as field elements."""
        return [FieldElement(int(v), self.field) for v in self.data.ravel()]

    def __getitem__(self, idx):
        return self.data[idx]

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def take_rows(self, rows: Sequence[int]) -> "FieldMatrix":
        return FieldMatrix(self.field, self.data[list(rows), :].reshape(len(rows), self.cols))

    def take_cols(self, cols: Sequence[int]) -> "FieldMatrix":
        return FieldMatrix(self.field, self.data[:, list(cols)].reshape(self.rows, len(cols)))

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, self.data.tobytes()))

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __add__(self, other):
        _same_field(self, other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return FieldMatrix(self.field, self.field.vadd(self.data, other.data))

    def scale(self, c: int) -> "FieldMatrix":
        return FieldMatrix(self.field, self.field.vmul(self.data, int(c) % self.field.q))

    @property
    def T(self) -> "FieldMatrix":
        return mat_transpose(self)

    def __repr__(self):
        return f"FieldMatrix({self.field!r}, {self.tolist()})"

    def pretty(self) -> str:
        """Aligned plain-text rendering, one row per line."""
        if self.rows == 0 or self.cols == 0:
            return f"[] ({self.rows}x{self.cols})"
        w = max(len(str(v)) for v in self.data.ravel())
        lines = ["[" + " ".join(str(v).rjust(w) for v in row) + "]" for row in self.data.tolist()]
        return "\n".join(lines)


def _same_field(a: FieldMatrix, b: FieldMatrix):
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")


def mat_mul(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix:
    _same_field(a, b)
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    f = a.field
    if f.m == 1:
        # k * (p-1)^2 stays far below 2^63 for p < 2^16
        return FieldMatrix(f, (a.data @ b.data) % f.p)
    acc = np.zeros((a.rows, b.cols), dtype=np.int64)
    for t in range(a.cols):
        acc ^= f.vmul(a.data[:, t : t + 1], b.data[t : t + 1, :])
    return FieldMatrix(f, acc)


def mat_transpose(a: FieldMatrix) -> FieldMatrix:
    return FieldMatrix(a.field, a.data.T)


def row_reduce(a: FieldMatrix, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivoting takes the first row (in current order) with a nonzero entry,
    so the result is deterministic.  Only the first ``ncols`` columns are
    used as pivot candidates (all of them by default).
    """
    f = a.field
    m = np.array(a.data, dtype=np.int64)
    rows, cols = m.shape
    ncols = cols if ncols is None else ncols
    invt = f.inverse_table()
    pivots = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        piv = m[r, c]
        if piv != 1:
            m[r] = f.vmul(m[r], invt[piv])
        others = np.flatnonzero(m[:, c])
        others = others[others != r]
        if others.size:
            m[others] = f.vsub(m[others], f.vmul(m[others, c][:, None], m[r][None, :]))
        pivots.append(c)
        r += 1
    return m, pivots


def mat_rank(a: FieldMatrix) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    return len(row_reduce(a)[1])


def independent_rows(a: FieldMatrix) -> list[int]:
    """Indices of the lexicographically first maximal set of independent rows.

    Scans rows in order and keeps a row iff it raises the rank.
    """
    return row_reduce(mat_transpose(a))[1] if a.rows and a.cols else []


def mat_solve(a: FieldMatrix, y: FieldMatrix) -> FieldMatrix:
    """Unique ``x`` with ``a @ x == y`` for ``a`` of full column rank."""
    _same_field(a, y)
    if y.rows != a.rows:
        raise DimensionMismatch(f"rhs has {y.rows} rows, matrix has {a.rows}")
    n = a.cols
    aug = FieldMatrix(a.field, np.hstack([a.data, y.data]))
    red, pivots = row_reduce(aug, ncols=n)
    if len(pivots) < n:
        raise RankDeficient(f"rank {len(pivots)} < {n} columns")
    if np.any(red[n:, n:]):
        raise InconsistentSystem("right-hand side is not in the column space")
    return FieldMatrix(a.field, red[:n, n:])


def random_matrix(field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> FieldMatrix:
    return FieldMatrix(field, rng.integers(0, field.q, size=(rows, cols), dtype=np.int64))
