"""Exact linear algebra over Q and Q(i), plus integer lattice normal forms.

Vectors are plain tuples; matrices are tuples of row tuples.  Rational
scalars are ``fractions.Fraction``; Gaussian rationals are :class:`GaussRat`.
Everything here is immutable and deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import TorifolError

Rat = Fraction
RatVec = tuple  # tuple[Fraction, ...]
IntVec = tuple  # tuple[int, ...]


class GaussRat:
    """A Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRat(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def conjugate(self):
        return GaussRat(self.re, -self.im)

    # -- comparison / hashing --------------------------------------------
    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __hash__(self):
        return hash((self.re, self.im))

    def is_rational(self):
        return self.im == 0

    # -- text form "a/b+c/d i" --------------------------------------------
    @staticmethod
    def parse(text: str) -> "GaussRat":
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty Gaussian rational")
        if not s.endswith("i"):
            return GaussRat(Fraction(s))
        body = s[:-1]
        # split off a trailing imaginary term at the last top-level sign
        cut = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                cut = k
                break
        if cut is None:
            re_part, im_part = "0", body
        else:
            re_part, im_part = body[:cut], body[cut:]
        if im_part in ("", "+"):
            im = Fraction(1)
        elif im_part == "-":
            im = Fraction(-1)
        else:
            im = Fraction(im_part)
        return GaussRat(Fraction(re_part) if re_part else Fraction(0), im)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    __repr__ = __str__


I = GaussRat(0, 1)


def _coerce(x):
    if isinstance(x, GaussRat):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRat(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")


def gauss_vec(entries) -> tuple:
    return tuple(e if isinstance(e, GaussRat) else GaussRat(e) for e in entries)


# ---------------------------------------------------------------------------
# Generic exact row reduction (works for Fraction and GaussRat entries).
# ---------------------------------------------------------------------------

def rref(matrix):
    """Reduced row echelon form.

    Returns (rows, pivot_cols) where rows are the nonzero rows of the RREF
    and pivot_cols[k] is the pivot column of rows[k].
    """
    rows = [list(r) for r in matrix]
    if not rows:
        return (), ()
    ncols = len(rows[0])
    if any(len(r) != ncols for r in rows):
        raise TorifolError("matrix is not rectangular")
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for k in range(r, len(rows)):
            if rows[k][c]:
                pivot_row = k
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c]:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def matrix_rank(matrix) -> int:
    return len(rref(matrix)[0])


def kernel_basis(matrix):
    """Canonical right-kernel basis of a matrix.

    One basis vector per free column, carrying 1 there and 0 in the other
    free columns; ordered by free column.  This is the standard null-space
    basis read off the RREF, and is unique.
    """
    rows, pivots = rref(matrix)
    if matrix and len(matrix) > 0:
        ncols = len(matrix[0])
    else:
        return ()
    zero, one = _zero_one_like(matrix)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [zero] * ncols
        vec[f] = one
        for k, p in enumerate(pivots):
            vec[p] = -rows[k][f]
        basis.append(tuple(vec))
    return tuple(basis)


def solve_linear(matrix, rhs):
    """One exact solution of matrix @ x = rhs with free variables set to 0.

    Returns None when the system is inconsistent.
    """
    if not matrix:
        return None
    ncols = len(matrix[0])
    if len(rhs) != len(matrix):
        raise TorifolError("rhs length does not match matrix")
    aug = [tuple(row) + (b,) for row, b in zip(matrix, rhs)]
    rows, pivots = rref(aug)
    zero, one = _zero_one_like(matrix)
    if ncols in pivots:  # pivot in the rhs column
        return None
    x = [zero] * ncols
    for k, p in enumerate(pivots):
        x[p] = rows[k][ncols]
    return tuple(x)


def _zero_one_like(matrix):
    for row in matrix:
        for e in row:
            if isinstance(e, GaussRat):
                return GaussRat(0), GaussRat(1)
            return Fraction(0), Fraction(1)
    return Fraction(0), Fraction(1)


def in_row_space(rref_rows, pivots, vec):
    """Membership of vec in the span of canonical RREF rows."""
    v = list(vec)
    for row, p in zip(rref_rows, pivots):
        if v[p]:
            f = v[p]
            v = [a - f * b for a, b in zip(v, row)]
    return not any(v)


# ---------------------------------------------------------------------------
# Rational subspaces of Q^n
# ---------------------------------------------------------------------------

class RatSubspace:
    """A linear subspace of Q^n stored by its canonical RREF basis."""

    __slots__ = ("rank", "rows", "pivots")

    def __init__(self, rank: int, vectors=()):
        self.rank = rank
        vecs = [tuple(Fraction(x) for x in v) for v in vectors]
        for v in vecs:
            if len(v) != rank:
                raise TorifolError("subspace vector has wrong length")
        rows, pivots = rref(vecs) if vecs else ((), ())
        self.rows = rows
        self.pivots = pivots

    @property
    def dim(self) -> int:
        return len(self.rows)

    def contains(self, vec) -> bool:
        v = tuple(Fraction(x) for x in vec)
        if len(v) != self.rank:
            raise TorifolError("vector has wrong length")
        return in_row_space(self.rows, self.pivots, v)

    def annihilator_rows(self):
        """Canonical basis of {f : f . v = 0 for all v in the subspace}."""
        if not self.rows:
            eye = []
            for k in range(self.rank):
                row = [Fraction(0)] * self.rank
                row[k] = Fraction(1)
                eye.append(tuple(row))
            return tuple(eye)
        return kernel_basis(self.rows)

    def __eq__(self, other):
        return (
            isinstance(other, RatSubspace)
            and self.rank == other.rank
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.rank, self.rows))

    def __repr__(self):
        return f"RatSubspace(rank={self.rank}, dim={self.dim})"


def real_trace_subspace(rank: int, gauss_basis) -> RatSubspace:
    """Rational points of a Gaussian subspace W, as a subspace of Q^n.

    A rational vector lies in W over C exactly when it is killed by the
    real and imaginary parts of every annihilator of W.
    """
    basis = [gauss_vec(v) for v in gauss_basis]
    for v in basis:
        if len(v) != rank:
            raise TorifolError("basis vector has wrong length")
    if not basis:
        return RatSubspace(rank, [])
    ann = kernel_basis(basis)
    real_rows = []
    for f in ann:
        real_rows.append(tuple(e.re for e in f))
        real_rows.append(tuple(e.im for e in f))
    if not real_rows:
        return RatSubspace(rank, _identity_rows(rank))
    vecs = kernel_basis(real_rows)
    return RatSubspace(rank, vecs)


def _identity_rows(n):
    rows = []
    for k in range(n):
        row = [Fraction(0)] * n
        row[k] = Fraction(1)
        rows.append(tuple(row))
    return rows


# ---------------------------------------------------------------------------
# Lattice utilities
# ---------------------------------------------------------------------------

def primitive_vector(vec) -> IntVec:
    """The primitive integer vector on the ray through vec (vec != 0)."""
    fracs = [Fraction(x) for x in vec]
    if not any(fracs):
        raise TorifolError("zero vector has no primitive representative")
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // gcd(denom, f.denominator)
    ints = [int(f * denom) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def vec_gcd(ints) -> int:
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return g


def hermite_row_form(rows):
    """Canonical row Hermite normal form of an integer row lattice.

    Pivots are positive, entries above each pivot are reduced into
    [0, pivot).  Zero rows are dropped.  Unique for a given row lattice.
    """
    mat = [list(map(int, r)) for r in rows]
    if not mat:
        return ()
    ncols = len(mat[0])
    r = 0
    for c in range(ncols):
        # euclid all entries of column c below r into a single pivot
        while True:
            nz = [k for k in range(r, len(mat)) if mat[k][c]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda k: abs(mat[k][c]))
            k0 = nz[0]
            for k in nz[1:]:
                q = mat[k][c] // mat[k0][c]
                mat[k] = [a - q * b for a, b in zip(mat[k], mat[k0])]
        nz = [k for k in range(r, len(mat)) if mat[k][c]]
        if not nz:
            continue
        k0 = nz[0]
        mat[r], mat[k0] = mat[k0], mat[r]
        if mat[r][c] < 0:
            mat[r] = [-a for a in mat[r]]
        for k in range(r):
            q = mat[k][c] // mat[r][c]
            if q:
                mat[k] = [a - q * b for a, b in zip(mat[k], mat[r])]
        r += 1
    return tuple(tuple(row) for row in mat[:r])


def _column_reduce(rows):
    """Unimodular column reduction A @ U = [H | 0].

    Returns (cols, u, frozen): the reduced columns, the tracked unimodular
    transform (as a list of its columns), and the count of nonzero columns.
    """
    mat = [list(map(int, r)) for r in rows]
    if not mat:
        raise TorifolError("column reduction needs at least one row")
    n = len(mat[0])
    cols = [[mat[r][c] for r in range(len(mat))] for c in range(n)]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    frozen = 0
    for r in range(len(mat)):
        while True:
            nz = [c for c in range(frozen, n) if cols[c][r]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda c: abs(cols[c][r]))
            c0 = nz[0]
            for c in nz[1:]:
                q = cols[c][r] // cols[c0][r]
                cols[c] = [a - q * b for a, b in zip(cols[c], cols[c0])]
                u[c] = [a - q * b for a, b in zip(u[c], u[c0])]
        nz = [c for c in range(frozen, n) if cols[c][r]]
        if nz:
            c0 = nz[0]
            cols[frozen], cols[c0] = cols[c0], cols[frozen]
            u[frozen], u[c0] = u[c0], u[frozen]
            frozen += 1
    return cols, u, frozen


def kernel_lattice(rows):
    """Basis of the saturated lattice {x in Z^n : rows @ x = 0}, in HNF."""
    _, u, frozen = _column_reduce(rows)
    basis = [tuple(u[c]) for c in range(frozen, len(u))]
    return hermite_row_form(basis)


def integer_section(rows):
    """Columns s_j in Z^n with rows @ s_j = e_j, for a surjective map.

    Raises when the integer matrix ``rows`` does not map Z^n onto Z^m.
    """
    m = len(rows)
    cols, u, frozen = _column_reduce(rows)
    if frozen != m:
        raise TorifolError("matrix rows are not of full rank")
    h = [[Fraction(cols[c][r]) for c in range(m)] for r in range(m)]
    sections = []
    for j in range(m):
        rhs = [Fraction(1) if r == j else Fraction(0) for r in range(m)]
        z = solve_linear([tuple(row) for row in h], tuple(rhs))
        if z is None or any(x.denominator != 1 for x in z):
            raise TorifolError("matrix has no integer section (not surjective)")
        sec = [0] * len(u[0])
        for c in range(m):
            for k in range(len(u[0])):
                sec[k] += int(z[c]) * u[c][k]
        sections.append(tuple(sec))
    return tuple(sections)


def quotient_projection(rank: int, sub_rows):
    """Integer projection matrix with kernel the rational span of sub_rows.

    The rows returned form the canonical HNF basis of the annihilator
    lattice, so the induced map Z^rank -> Z^(rank-k) is surjective with
    kernel exactly (span of sub_rows) intersected with the lattice.
    """
    int_rows = []
    for v in sub_rows:
        fr = [Fraction(x) for x in v]
        denom = 1
        for f in fr:
            denom = denom * f.denominator // gcd(denom, f.denominator)
        int_rows.append(tuple(int(f * denom) for f in fr))
    if not int_rows:
        int_rows = [tuple([0] * rank)]
    return kernel_lattice(int_rows)


def apply_rows(rows, vec):
    """Matrix-vector product rows @ vec as a tuple."""
    return tuple(sum(a * b for a, b in zip(r, vec)) for r in rows)
