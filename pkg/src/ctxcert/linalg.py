"""Projector arithmetic over two scalar backends.

The "exact" backend stores matrices as integer numerator grids over a single
positive denominator, so equality, hashing and rank are unconditional.  The
"float" backend stores complex doubles together with a tolerance ``tol`` and
treats two matrices as equal when every entry differs by less than ``tol``.
Everything is immutable; operations return fresh objects.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    BackendMismatch,
    DimensionMismatch,
    Incompatible,
    NotADensityMatrix,
    NotAProjector,
    OutOfRange,
    ZeroVector,
)

EXACT = "exact"
FLOAT = "float"

DEFAULT_TOL = 1e-9

# Accepted element types for exact entries: a real rational or an (re, im) pair.
ExactEntry = Union[int, Fraction, tuple]


def _as_pair(entry: ExactEntry) -> tuple[Fraction, Fraction]:
    if isinstance(entry, tuple):
        re, im = entry
        return Fraction(re), Fraction(im)
    return Fraction(entry), Fraction(0)


def _gcd_all(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            return 1
    return g


class ExactMatrix:
    """Square matrix of Gaussian rationals in normalized integer form."""

    __slots__ = ("dim", "den", "re", "im", "_hash")

    def __init__(self, dim: int, den: int, re: tuple[int, ...], im: tuple[int, ...] | None):
        # Callers pass unnormalized data; reduce to gcd-1 form so that equal
        # matrices have equal representations.
        if den < 0:
            den = -den
            re = tuple(-x for x in re)
            if im is not None:
                im = tuple(-x for x in im)
        if im is not None and not any(im):
            im = None
        g = _gcd_all((den, *map(abs, re), *(map(abs, im) if im else ())))
        if g == 0:
            den, g = 1, 1
        if g > 1:
            den //= g
            re = tuple(x // g for x in re)
            if im is not None:
                im = tuple(x // g for x in im)
        self.dim = dim
        self.den = den
        self.re = re
        self.im = im
        self._hash = hash((dim, den, re, im))

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence[ExactEntry]]) -> "ExactMatrix":
        dim = len(rows)
        pairs = [_as_pair(e) for row in rows for e in row]
        if len(pairs) != dim * dim:
            raise DimensionMismatch("entry grid is not square")
        den = 1
        for re, im in pairs:
            den = den * re.denominator // math.gcd(den, re.denominator)
            den = den * im.denominator // math.gcd(den, im.denominator)
        re = tuple(int(p[0] * den) for p in pairs)
        im = tuple(int(p[1] * den) for p in pairs)
        return cls(dim, den, re, im)

    @classmethod
    def identity(cls, dim: int) -> "ExactMatrix":
        re = tuple(1 if i == j else 0 for i in range(dim) for j in range(dim))
        return cls(dim, 1, re, None)

    @classmethod
    def zeros(cls, dim: int) -> "ExactMatrix":
        return cls(dim, 1, (0,) * (dim * dim), None)

    def entry(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        k = i * self.dim + j
        im = self.im[k] if self.im is not None else 0
        return Fraction(self.re[k], self.den), Fraction(im, self.den)

    def mul(self, other: "ExactMatrix") -> "ExactMatrix":
        d = self.dim
        a_re, a_im, b_re, b_im = self.re, self.im, other.re, other.im
        out_re = [0] * (d * d)
        if a_im is None and b_im is None:
            for i in range(d):
                base = i * d
                row = a_re[base : base + d]
                for j in range(d):
                    out_re[base + j] = sum(row[k] * b_re[k * d + j] for k in range(d))
            return ExactMatrix(d, self.den * other.den, tuple(out_re), None)
        ai = a_im or (0,) * (d * d)
        bi = b_im or (0,) * (d * d)
        out_im = [0] * (d * d)
        for i in range(d):
            base = i * d
            for j in range(d):
                sre = sim = 0
                for k in range(d):
                    p, q = a_re[base + k], ai[base + k]
                    r, s = b_re[k * d + j], bi[k * d + j]
                    sre += p * r - q * s
                    sim += p * s + q * r
                out_re[base + j] = sre
                out_im[base + j] = sim
        return ExactMatrix(d, self.den * other.den, tuple(out_re), tuple(out_im))

    def _combine(self, other: "ExactMatrix", sign: int) -> "ExactMatrix":
        g = math.gcd(self.den, other.den)
        la, lb = other.den // g, self.den // g
        den = self.den * la
        re = tuple(x * la + sign * y * lb for x, y in zip(self.re, other.re))
        if self.im is None and other.im is None:
            return ExactMatrix(self.dim, den, re, None)
        ai = self.im or (0,) * len(self.re)
        bi = other.im or (0,) * len(self.re)
        im = tuple(x * la + sign * y * lb for x, y in zip(ai, bi))
        return ExactMatrix(self.dim, den, re, im)

    def add(self, other: "ExactMatrix") -> "ExactMatrix":
        return self._combine(other, 1)

    def sub(self, other: "ExactMatrix") -> "ExactMatrix":
        return self._combine(other, -1)

    def conj_transpose(self) -> "ExactMatrix":
        d = self.dim
        re = tuple(self.re[j * d + i] for i in range(d) for j in range(d))
        im = None
        if self.im is not None:
            im = tuple(-self.im[j * d + i] for i in range(d) for j in range(d))
        return ExactMatrix(d, self.den, re, im)

    def trace(self) -> tuple[Fraction, Fraction]:
        d = self.dim
        tre = sum(self.re[i * d + i] for i in range(d))
        tim = sum(self.im[i * d + i] for i in range(d)) if self.im is not None else 0
        return Fraction(tre, self.den), Fraction(tim, self.den)

    def is_zero(self) -> bool:
        return not any(self.re) and self.im is None

    def key(self):
        return (self.dim, self.den, self.re, self.im or ())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self._hash == other._hash
            and self.dim == other.dim
            and self.den == other.den
            and self.re == other.re
            and self.im == other.im
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"ExactMatrix(dim={self.dim}, den={self.den})"


class FloatMatrix:
    """Square complex matrix compared entrywise within a tolerance."""

    __slots__ = ("dim", "entries", "tol")

    def __init__(self, dim: int, entries: tuple[complex, ...], tol: float = DEFAULT_TOL):
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        self.dim = dim
        self.entries = entries
        self.tol = tol

    @classmethod
    def from_entries(cls, rows: Sequence[Sequence[complex]], tol: float = DEFAULT_TOL) -> "FloatMatrix":
        dim = len(rows)
        entries = tuple(complex(e) for row in rows for e in row)
        if len(entries) != dim * dim:
            raise DimensionMismatch("entry grid is not square")
        return cls(dim, entries, tol)

    @classmethod
    def identity(cls, dim: int, tol: float = DEFAULT_TOL) -> "FloatMatrix":
        return cls(dim, tuple(1.0 + 0j if i == j else 0j for i in range(dim) for j in range(dim)), tol)

    @classmethod
    def zeros(cls, dim: int, tol: float = DEFAULT_TOL) -> "FloatMatrix":
        return cls(dim, (0j,) * (dim * dim), tol)

    def entry(self, i: int, j: int) -> complex:
        return self.entries[i * self.dim + j]

    def mul(self, other: "FloatMatrix") -> "FloatMatrix":
        d = self.dim
        a, b = self.entries, other.entries
        out = [0j] * (d * d)
        for i in range(d):
            base = i * d
            for j in range(d):
                out[base + j] = sum(a[base + k] * b[k * d + j] for k in range(d))
        return FloatMatrix(d, tuple(out), max(self.tol, other.tol))

    def add(self, other: "FloatMatrix") -> "FloatMatrix":
        return FloatMatrix(
            self.dim,
            tuple(x + y for x, y in zip(self.entries, other.entries)),
            max(self.tol, other.tol),
        )

    def sub(self, other: "FloatMatrix") -> "FloatMatrix":
        return FloatMatrix(
            self.dim,
            tuple(x - y for x, y in zip(self.entries, other.entries)),
            max(self.tol, other.tol),
        )

    def conj_transpose(self) -> "FloatMatrix":
        d = self.dim
        return FloatMatrix(
            d,
            tuple(self.entries[j * d + i].conjugate() for i in range(d) for j in range(d)),
            self.tol,
        )

    def trace(self) -> complex:
        return sum(self.entries[i * self.dim + i] for i in range(self.dim))

    def max_diff(self, other: "FloatMatrix") -> float:
        return max(abs(x - y) for x, y in zip(self.entries, other.entries))

    def approx_equal(self, other: "FloatMatrix") -> bool:
        if self.dim != other.dim:
            return False
        return self.max_diff(other) < max(self.tol, other.tol)

    def is_zero(self) -> bool:
        return all(abs(e) < self.tol for e in self.entries)

    def grid_key(self) -> tuple:
        # Spacing of 64*tol keeps matrices produced by one computation path in
        # one cell; near-equal values can still straddle a boundary, so any
        # structure relying on this key must confirm with approx_equal.
        step = 64.0 * self.tol
        return (self.dim,) + tuple(
            (round(e.real / step), round(e.imag / step)) for e in self.entries
        )

    def key(self):
        return self.grid_key()

    def __eq__(self, other) -> bool:
        return isinstance(other, FloatMatrix) and self.dim == other.dim and self.approx_equal(other)

    def __hash__(self) -> int:
        return hash(self.grid_key())

    def __repr__(self) -> str:
        return f"FloatMatrix(dim={self.dim}, tol={self.tol})"


Matrix = Union[ExactMatrix, FloatMatrix]


def _matrices_equal(a: Matrix, b: Matrix) -> bool:
    if isinstance(a, ExactMatrix):
        return a == b
    return a.approx_equal(b)


class Projector:
    """Hermitian idempotent matrix; the event primitive.

    Rank is read off the trace, which is exact for projectors and avoids any
    eigensolver.
    """

    __slots__ = ("mat", "rank", "backend")

    def __init__(self, mat: Matrix, _validated: bool = False):
        self.mat = mat
        self.backend = EXACT if isinstance(mat, ExactMatrix) else FLOAT
        if not _validated:
            self._validate()
        self.rank = self._rank_from_trace()

    def _validate(self) -> None:
        mat = self.mat
        if isinstance(mat, ExactMatrix):
            if mat.conj_transpose() != mat:
                raise NotAProjector("matrix is not Hermitian")
            if mat.mul(mat) != mat:
                raise NotAProjector("matrix is not idempotent")
        else:
            if not mat.approx_equal(mat.conj_transpose()):
                raise NotAProjector("matrix is not Hermitian within tolerance")
            if not mat.mul(mat).approx_equal(mat):
                raise NotAProjector("matrix is not idempotent within tolerance")

    def _rank_from_trace(self) -> int:
        if isinstance(self.mat, ExactMatrix):
            tre, tim = self.mat.trace()
            if tim != 0 or tre.denominator != 1:
                raise NotAProjector(f"projector trace {tre} is not an integer")
            return int(tre)
        tr = self.mat.trace()
        rank = round(tr.real)
        if abs(tr - rank) >= self.mat.tol:
            raise NotAProjector(f"projector trace {tr} is not near an integer")
        return int(rank)

    @property
    def dim(self) -> int:
        return self.mat.dim

    @property
    def tol(self) -> float:
        return self.mat.tol if isinstance(self.mat, FloatMatrix) else 0.0

    def is_zero(self) -> bool:
        return self.rank == 0

    def is_identity(self) -> bool:
        return self.rank == self.dim

    def sort_key(self):
        return (self.dim, self.rank, self.mat.key())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Projector) or self.backend != other.backend:
            return False
        return _matrices_equal(self.mat, other.mat)

    def __hash__(self) -> int:
        return hash(self.mat)

    def __repr__(self) -> str:
        return f"Projector(dim={self.dim}, rank={self.rank}, backend={self.backend})"


def _check_pair(p: Projector, q: Projector) -> None:
    if p.backend != q.backend:
        raise BackendMismatch(f"{p.backend} vs {q.backend}")
    if p.dim != q.dim:
        raise DimensionMismatch(f"dim {p.dim} vs {q.dim}")


def identity_projector(dim: int, backend: str = EXACT, tol: float = DEFAULT_TOL) -> Projector:
    mat = ExactMatrix.identity(dim) if backend == EXACT else FloatMatrix.identity(dim, tol)
    return Projector(mat, _validated=True)


def zero_projector(dim: int, backend: str = EXACT, tol: float = DEFAULT_TOL) -> Projector:
    mat = ExactMatrix.zeros(dim) if backend == EXACT else FloatMatrix.zeros(dim, tol)
    return Projector(mat, _validated=True)


def projector_from_vector(
    entries: Sequence, backend: str = EXACT, tol: float = DEFAULT_TOL
) -> Projector:
    """Rank-1 projector v v† / <v, v> from an unnormalized vector."""
    d = len(entries)
    if d == 0:
        raise DimensionMismatch("empty vector")
    if backend == EXACT:
        pairs = [_as_pair(e) for e in entries]
        norm = sum(re * re + im * im for re, im in pairs)
        if norm == 0:
            raise ZeroVector("cannot project onto the zero vector")
        rows = []
        for i in range(d):
            a, b = pairs[i]
            row = []
            for j in range(d):
                c, e = pairs[j]
                # v_i * conj(v_j)
                row.append(((a * c + b * e) / norm, (b * c - a * e) / norm))
            rows.append(row)
        return Projector(ExactMatrix.from_entries(rows))
    vec = [complex(e) for e in entries]
    norm = sum(abs(x) ** 2 for x in vec)
    if norm < tol:
        raise ZeroVector("vector norm below tolerance")
    ents = tuple(vec[i] * vec[j].conjugate() / norm for i in range(d) for j in range(d))
    return Projector(FloatMatrix(d, ents, tol))


def commutes(p: Projector, q: Projector) -> bool:
    """True iff PQ = QP under the backend's equality."""
    _check_pair(p, q)
    return _matrices_equal(p.mat.mul(q.mat), q.mat.mul(p.mat))


def complement(p: Projector) -> Projector:
    mat = (
        ExactMatrix.identity(p.dim).sub(p.mat)
        if p.backend == EXACT
        else FloatMatrix.identity(p.dim, p.mat.tol).sub(p.mat)
    )
    return Projector(mat, _validated=True)


def meet(p: Projector, q: Projector) -> Projector:
    """P AND Q for commuting projectors; the product PQ."""
    _check_pair(p, q)
    pq = p.mat.mul(q.mat)
    if not _matrices_equal(pq, q.mat.mul(p.mat)):
        raise Incompatible("meet is undefined for non-commuting projectors")
    return Projector(pq)


def join(p: Projector, q: Projector) -> Projector:
    """P OR Q for commuting projectors; equals P + Q - PQ."""
    _check_pair(p, q)
    pq = p.mat.mul(q.mat)
    if not _matrices_equal(pq, q.mat.mul(p.mat)):
        raise Incompatible("join is undefined for non-commuting projectors")
    return Projector(p.mat.add(q.mat).sub(pq))


def orthogonal(p: Projector, q: Projector) -> bool:
    """True iff PQ = 0; for projectors this forces QP = 0 as well."""
    _check_pair(p, q)
    return p.mat.mul(q.mat).is_zero()


def leq(p: Projector, q: Projector) -> bool:
    """Order of events: PQ = P (which already implies commutation)."""
    _check_pair(p, q)
    return _matrices_equal(p.mat.mul(q.mat), p.mat)


# --- determinants and positive semidefiniteness ---------------------------


def _det_exact(pairs: list[list[tuple[Fraction, Fraction]]]) -> tuple[Fraction, Fraction]:
    """Determinant of a small complex-rational matrix by Gaussian elimination."""
    n = len(pairs)
    m = [row[:] for row in pairs]
    det_re, det_im = Fraction(1), Fraction(0)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if m[r][col][0] != 0 or m[r][col][1] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0), Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det_re, det_im = -det_re, -det_im
        pa, pb = m[col][col]
        det_re, det_im = det_re * pa - det_im * pb, det_re * pb + det_im * pa
        denom = pa * pa + pb * pb
        for r in range(col + 1, n):
            qa, qb = m[r][col]
            if qa == 0 and qb == 0:
                continue
            # factor = m[r][col] / pivot
            fa = (qa * pa + qb * pb) / denom
            fb = (qb * pa - qa * pb) / denom
            for c in range(col, n):
                xa, xb = m[col][c]
                ya, yb = m[r][c]
                m[r][c] = (ya - (fa * xa - fb * xb), yb - (fa * xb + fb * xa))
    return det_re, det_im


def _det_float(entries: list[list[complex]]) -> complex:
    n = len(entries)
    m = [row[:] for row in entries]
    det = 1.0 + 0j
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[pivot][col]) == 0.0:
            return 0j
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            for c in range(col, n):
                m[r][c] -= f * m[col][c]
    return det


def _principal_minors_nonneg(mat: Matrix, tol: float) -> bool:
    """PSD test for a Hermitian matrix: every principal minor is >= 0.

    Exponential in the dimension, which stays tiny here, and avoids pulling in
    a numerical eigensolver.
    """
    d = mat.dim
    indices = range(d)
    from itertools import combinations

    for size in range(1, d + 1):
        for subset in combinations(indices, size):
            if isinstance(mat, ExactMatrix):
                sub = [[mat.entry(i, j) for j in subset] for i in subset]
                det_re, det_im = _det_exact(sub)
                if det_re < 0:
                    return False
            else:
                sub = [[mat.entry(i, j) for j in subset] for i in subset]
                det = _det_float(sub)
                if det.real < -tol:
                    return False
    return True


class DensityMatrix:
    """Hermitian positive semidefinite matrix of unit trace."""

    __slots__ = ("mat", "backend")

    def __init__(self, mat: Matrix, _validated: bool = False):
        self.mat = mat
        self.backend = EXACT if isinstance(mat, ExactMatrix) else FLOAT
        if not _validated:
            self._validate()

    def _validate(self) -> None:
        mat = self.mat
        if isinstance(mat, ExactMatrix):
            if mat.conj_transpose() != mat:
                raise NotADensityMatrix("matrix is not Hermitian")
            tre, tim = mat.trace()
            if tre != 1 or tim != 0:
                raise NotADensityMatrix(f"trace is {tre}, expected 1")
            if not _principal_minors_nonneg(mat, 0.0):
                raise NotADensityMatrix("matrix is not positive semidefinite")
        else:
            if not mat.approx_equal(mat.conj_transpose()):
                raise NotADensityMatrix("matrix is not Hermitian within tolerance")
            if abs(mat.trace() - 1.0) >= mat.tol:
                raise NotADensityMatrix(f"trace is {mat.trace()}, expected 1")
            if not _principal_minors_nonneg(mat, mat.tol):
                raise NotADensityMatrix("matrix has an eigenvalue below -tol")

    @property
    def dim(self) -> int:
        return self.mat.dim

    @classmethod
    def from_pure_vector(cls, entries: Sequence, backend: str = EXACT, tol: float = DEFAULT_TOL) -> "DensityMatrix":
        return cls(projector_from_vector(entries, backend, tol).mat, _validated=True)

    @classmethod
    def maximally_mixed(cls, dim: int, backend: str = EXACT, tol: float = DEFAULT_TOL) -> "DensityMatrix":
        if backend == EXACT:
            rows = [
                [Fraction(1, dim) if i == j else 0 for j in range(dim)]
                for i in range(dim)
            ]
            return cls(ExactMatrix.from_entries(rows), _validated=True)
        ents = tuple(
            (1.0 / dim if i == j else 0.0) + 0j for i in range(dim) for j in range(dim)
        )
        return cls(FloatMatrix(dim, ents, tol), _validated=True)

    @classmethod
    def mixture(cls, weights: Sequence, states: Sequence["DensityMatrix"]) -> "DensityMatrix":
        """Convex combination of density matrices; weights must sum to one."""
        if len(weights) != len(states) or not states:
            raise NotADensityMatrix("mixture needs matching weights and states")
        first = states[0].mat
        if isinstance(first, ExactMatrix):
            acc = ExactMatrix.zeros(first.dim)
            for w, s in zip(weights, states):
                w = Fraction(w)
                scaled = ExactMatrix(
                    s.mat.dim,
                    s.mat.den * w.denominator,
                    tuple(x * w.numerator for x in s.mat.re),
                    tuple(x * w.numerator for x in s.mat.im) if s.mat.im else None,
                )
                acc = acc.add(scaled)
            return cls(acc)
        acc = FloatMatrix.zeros(first.dim, first.tol)
        for w, s in zip(weights, states):
            scaled = FloatMatrix(s.mat.dim, tuple(float(w) * e for e in s.mat.entries), s.mat.tol)
            acc = acc.add(scaled)
        return cls(acc)


def quantum_state_eval(rho: DensityMatrix, p: Projector):
    """Born-rule probability tr(rho P), clamped to [0, 1] only within tolerance."""
    if rho.dim != p.dim:
        raise DimensionMismatch(f"dim {rho.dim} vs {p.dim}")
    if rho.backend != p.backend:
        raise BackendMismatch(f"{rho.backend} vs {p.backend}")
    d = p.dim
    if isinstance(rho.mat, ExactMatrix):
        a, b = rho.mat, p.mat
        num = 0
        if a.im is None and b.im is None:
            for i in range(d):
                for j in range(d):
                    num += a.re[i * d + j] * b.re[j * d + i]
        else:
            ai = a.im or (0,) * (d * d)
            bi = b.im or (0,) * (d * d)
            num_im = 0
            for i in range(d):
                for j in range(d):
                    num += a.re[i * d + j] * b.re[j * d + i] - ai[i * d + j] * bi[j * d + i]
                    num_im += a.re[i * d + j] * bi[j * d + i] + ai[i * d + j] * b.re[j * d + i]
            if num_im != 0:
                raise OutOfRange("trace of rho P has a nonzero imaginary part")
        value = Fraction(num, a.den * b.den)
        if value < 0 or value > 1:
            raise OutOfRange(f"tr(rho P) = {value} outside [0, 1]")
        return value
    tol = max(rho.mat.tol, p.mat.tol)
    total = 0j
    for i in range(d):
        for j in range(d):
            total += rho.mat.entries[i * d + j] * p.mat.entries[j * d + i]
    value = total.real
    if abs(total.imag) >= tol:
        raise OutOfRange(f"tr(rho P) has imaginary part {total.imag}")
    if value < -tol or value > 1.0 + tol:
        raise OutOfRange(f"tr(rho P) = {value} outside [-tol, 1 + tol]")
    return min(1.0, max(0.0, value))
