"""Exact linear algebra over Q(q) and Q(q)^pi.

Scalar matrices are split into their two specializations, solved over the
field Q(q) independently, and recombined.  Lattice helpers work over the
discrete valuation ring A = Q[q] localized at q.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import DivisionByZeroDivisor
from .scalar import RAT_ONE, RAT_ZERO, ONE, ZERO, RatFunc, Scalar


class Mat:
    """Dense matrix that remembers its shape, even when empty."""

    __slots__ = ("data", "nrows", "ncols", "zero")

    def __init__(self, data, nrows: int | None = None, ncols: int | None = None, zero=ZERO):
        self.data = [list(r) for r in data]
        self.nrows = len(self.data) if nrows is None else nrows
        self.ncols = (len(self.data[0]) if self.data else 0) if ncols is None else ncols
        self.zero = zero
        if len(self.data) != self.nrows:
            raise ValueError("row count mismatch")

    @classmethod
    def zeros(cls, n: int, m: int, zero=ZERO) -> "Mat":
        return cls([[zero] * m for _ in range(n)], n, m, zero)

    @classmethod
    def identity(cls, n: int, one=ONE, zero=ZERO) -> "Mat":
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], n, n, zero)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int, zero=ZERO) -> "Mat":
        return cls([[c[i] for c in cols] for i in range(nrows)], nrows, len(cols), zero)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> list:
        return list(self.data[i])

    def col(self, j: int) -> list:
        return [r[j] for r in self.data]

    def columns(self) -> list[list]:
        return [self.col(j) for j in range(self.ncols)]

    def select_cols(self, idx: Sequence[int]) -> "Mat":
        return Mat([[r[j] for j in idx] for r in self.data], self.nrows, len(idx), self.zero)

    def select_rows(self, idx: Sequence[int]) -> "Mat":
        return Mat([list(self.data[i]) for i in idx], len(idx), self.ncols, self.zero)

    @property
    def T(self) -> "Mat":
        return Mat([[self.data[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
                   self.ncols, self.nrows, self.zero)

    def map(self, f: Callable) -> "Mat":
        return Mat([[f(x) for x in r] for r in self.data], self.nrows, self.ncols, self.zero)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = self.zero
        out = []
        ocols = other.ncols
        odata = other.data
        for r in self.data:
            nz = [(t, a) for t, a in enumerate(r) if not a.is_zero()]
            new = []
            for j in range(ocols):
                acc = zero
                for t, a in nz:
                    b = odata[t][j]
                    if not b.is_zero():
                        acc = acc + a * b
                new.append(acc)
            out.append(new)
        return Mat(out, self.nrows, ocols, zero)

    def apply(self, v: Sequence) -> list:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for matrix {self.shape}")
        zero = self.zero
        out = []
        nzv = [(t, x) for t, x in enumerate(v) if not x.is_zero()]
        for r in self.data:
            acc = zero
            for t, x in nzv:
                a = r[t]
                if not a.is_zero():
                    acc = acc + a * x
            out.append(acc)
        return out

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return Mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
                   self.nrows, self.ncols, self.zero)

    def __sub__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in subtraction")
        return Mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
                   self.nrows, self.ncols, self.zero)

    def scale(self, c) -> "Mat":
        return Mat([[c * x for x in r] for r in self.data], self.nrows, self.ncols, self.zero)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.data for x in r)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.data, other.data) for a, b in zip(ra, rb))

    def __repr__(self):
        return f"Mat({self.nrows}x{self.ncols})"

    # Q(q)^pi components
    def split(self) -> tuple["Mat", "Mat"]:
        return (Mat([[x.plus for x in r] for r in self.data], self.nrows, self.ncols, RAT_ZERO),
                Mat([[x.minus for x in r] for r in self.data], self.nrows, self.ncols, RAT_ZERO))

    def component(self, sigma: int) -> "Mat":
        return self.split()[sigma]

    def bar(self) -> "Mat":
        return self.map(lambda x: x.bar())


def join(P: Mat, N: Mat) -> Mat:
    return Mat([[Scalar(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(P.data, N.data)],
               P.nrows, P.ncols, ZERO)


def hstack(blocks: Sequence[Mat], nrows: int, zero=ZERO) -> Mat:
    data = [[] for _ in range(nrows)]
    ncols = 0
    for B in blocks:
        if B.nrows != nrows:
            raise ValueError("row mismatch in hstack")
        for i in range(nrows):
            data[i].extend(B.data[i])
        ncols += B.ncols
    return Mat(data, nrows, ncols, zero)


def vstack(blocks: Sequence[Mat], ncols: int, zero=ZERO) -> Mat:
    data = []
    for B in blocks:
        if B.ncols != ncols:
            raise ValueError("column mismatch in vstack")
        data.extend(list(r) for r in B.data)
    return Mat(data, len(data), ncols, zero)


def block_diag(blocks: Sequence[Mat], zero=ZERO) -> Mat:
    n = sum(b.nrows for b in blocks)
    m = sum(b.ncols for b in blocks)
    out = Mat.zeros(n, m, zero)
    r = c = 0
    for b in blocks:
        for i in range(b.nrows):
            out.data[r + i][c:c + b.ncols] = b.data[i]
        r += b.nrows
        c += b.ncols
    return out


def kron(A: Mat, B: Mat) -> Mat:
    data = []
    for ra in A.data:
        for rb in B.data:
            data.append([a * b for a in ra for b in rb])
    return Mat(data, A.nrows * B.nrows, A.ncols * B.ncols, A.zero)


def split_vec(v: Sequence[Scalar]) -> tuple[list, list]:
    return [x.plus for x in v], [x.minus for x in v]


def join_vec(p: Sequence[RatFunc], n: Sequence[RatFunc]) -> list[Scalar]:
    return [Scalar(a, b) for a, b in zip(p, n)]


def dot(u: Sequence, v: Sequence, zero=ZERO):
    acc = zero
    for a, b in zip(u, v):
        if not a.is_zero() and not b.is_zero():
            acc = acc + a * b
    return acc


def bilinear(u: Sequence, G: Mat, v: Sequence):
    return dot(u, G.apply(v), G.zero)


# field algorithms over Q(q)

def _cost(x: RatFunc) -> int:
    return x.num.degree() + x.den.degree()


def _rref_rows(R: list[list[RatFunc]], ncols: int, limit: int | None = None) -> list[int]:
    """In-place reduced row echelon form on the first ``limit`` columns."""
    pivots = []
    r = 0
    nrows = len(R)
    last = ncols if limit is None else limit
    for c in range(last):
        best = None
        for i in range(r, nrows):
            x = R[i][c]
            if not x.is_zero():
                k = _cost(x)
                if best is None or k < best[0]:
                    best = (k, i)
                    if k == 0:
                        break
        if best is None:
            continue
        i = best[1]
        R[r], R[i] = R[i], R[r]
        inv = R[r][c].inverse()
        R[r] = [x * inv if not x.is_zero() else x for x in R[r]]
        piv = R[r]
        for i2 in range(nrows):
            if i2 != r:
                f = R[i2][c]
                if not f.is_zero():
                    R[i2] = [a - f * b if not b.is_zero() else a for a, b in zip(R[i2], piv)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def rf_rank(M: Mat) -> int:
    if M.nrows == 0 or M.ncols == 0:
        return 0
    R = [list(r) for r in M.data]
    return len(_rref_rows(R, M.ncols))


def rf_solve(A: Mat, B: Mat) -> Mat:
    """Solve A X = B for square invertible A over Q(q)."""
    n = A.nrows
    if A.ncols != n or B.nrows != n:
        raise ValueError("rf_solve needs square A with matching B")
    if n == 0:
        return Mat.zeros(0, B.ncols, RAT_ZERO)
    R = [list(A.data[i]) + list(B.data[i]) for i in range(n)]
    piv = _rref_rows(R, n + B.ncols, n)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return Mat([row[n:] for row in R], n, B.ncols, RAT_ZERO)


def rf_nullspace(M: Mat) -> list[list[RatFunc]]:
    n = M.ncols
    if M.nrows == 0:
        return [[RAT_ONE if i == j else RAT_ZERO for i in range(n)] for j in range(n)]
    R = [list(r) for r in M.data]
    piv = _rref_rows(R, n)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [RAT_ZERO] * n
        v[f] = RAT_ONE
        for r, c in enumerate(piv):
            v[c] = -R[r][f]
        basis.append(v)
    return basis


def rf_independent_rows(M: Mat) -> list[int]:
    """Rows, greedily in order, independent of the earlier chosen ones."""
    chosen: list[int] = []
    echelon: list[tuple[int, list]] = []
    n = M.ncols
    for idx, row in enumerate(M.data):
        v = list(row)
        for c, e in echelon:
            f = v[c]
            if not f.is_zero():
                v = [a - f * b if not b.is_zero() else a for a, b in zip(v, e)]
        piv = next((c for c in range(n) if not v[c].is_zero()), None)
        if piv is None:
            continue
        inv = v[piv].inverse()
        echelon.append((piv, [x * inv for x in v]))
        chosen.append(idx)
    return chosen


# Q(q)^pi wrappers

def solve(A: Mat, B: Mat) -> Mat:
    Ap, An = A.split()
    Bp, Bn = B.split()
    try:
        return join(rf_solve(Ap, Bp), rf_solve(An, Bn))
    except ZeroDivisionError as exc:
        raise DivisionByZeroDivisor("matrix is not invertible over Q(q)^pi") from exc


def inverse(A: Mat) -> Mat:
    return solve(A, Mat.identity(A.nrows))


def rank_pair(M: Mat) -> tuple[int, int]:
    P, N = M.split()
    return rf_rank(P), rf_rank(N)


def nullspace(M: Mat) -> list[list[Scalar]]:
    """Kernel basis over Q(q)^pi; the kernel must be free (equal dimensions)."""
    P, N = M.split()
    kp, kn = rf_nullspace(P), rf_nullspace(N)
    if len(kp) != len(kn):
        raise DivisionByZeroDivisor(
            f"kernel is not free over Q(q)^pi: dimensions {len(kp)} and {len(kn)}")
    return [join_vec(a, b) for a, b in zip(kp, kn)]


def independent_rows(M: Mat) -> list[int]:
    """Greedy earliest row subset that is independent in both components."""
    P, N = M.split()
    ip = rf_independent_rows(P)
    if ip == rf_independent_rows(N):
        return ip
    chosen: list[int] = []
    for idx in range(M.nrows):
        trial = chosen + [idx]
        if rf_rank(P.select_rows(trial)) == len(trial) and rf_rank(N.select_rows(trial)) == len(trial):
            chosen = trial
    return chosen


def independent_columns(M: Mat) -> list[int]:
    return independent_rows(M.T)


# lattices over the valuation ring A at q = 0

def rf_lattice_basis(gens: Sequence[Sequence[RatFunc]], dim: int) -> list[list[RatFunc]]:
    """A-basis of the A-span of ``gens`` in Q(q)^dim, by column moves over A."""
    cols = [list(g) for g in gens if any(not x.is_zero() for x in g)]
    basis = []
    for r in range(dim):
        best = None
        for k, c in enumerate(cols):
            x = c[r]
            if not x.is_zero():
                v = x.valuation()
                if best is None or v < best[0] or (v == best[0] and _cost(x) < best[2]):
                    best = (v, k, _cost(x))
        if best is None:
            continue
        piv = cols.pop(best[1])
        inv = piv[r].inverse()
        new_cols = []
        for c in cols:
            f = c[r]
            if not f.is_zero():
                t = f * inv  # valuation >= 0: an A-unimodular move
                c = [a - t * b if not b.is_zero() else a for a, b in zip(c, piv)]
            if any(not x.is_zero() for x in c):
                new_cols.append(c)
        cols = new_cols
        basis.append(piv)
    return basis
