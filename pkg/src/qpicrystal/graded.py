"""Q^- graded spaces with raising/lowering operators, and Kashiwara operators.

A graded space is indexed by depths nu in N^rank (weight lambda - nu).  It
supplies lowering maps f_i : W_nu -> W_{nu+e_i}, raising maps
e_i : W_nu -> W_{nu-e_i} and a Gram matrix per depth.  For U^- these are F_i
and E_i'; for modules they are the actions of F_i and E_i.

Every v in W_nu decomposes uniquely as sum_t f_i^(t) v_t with e_i v_t = 0.
The modified operators f~_i, e~_i shift t by +1 and -1.  They are Q(q)-linear,
so they are materialized as matrices per (i, nu).
"""

from __future__ import annotations

import threading
from typing import Protocol, Sequence

from .cartan import CartanDatum, add, sub, unit
from .linalg import Mat, hstack, inverse, nullspace
from .scalar import ONE, Scalar, qpi_factorial


class GradedSpace(Protocol):
    datum: CartanDatum

    def dim(self, nu: tuple) -> int: ...

    def contains(self, nu: tuple) -> bool: ...

    def lower(self, i: int, nu: tuple) -> Mat: ...

    def raise_(self, i: int, nu: tuple) -> Mat: ...

    def gram(self, nu: tuple) -> Mat: ...

    def parity(self, nu: tuple) -> int: ...

    def seed(self) -> list[Scalar]: ...


class HalfGraded:
    """U^- as a graded space: f_i = F_i, e_i = E_i'."""

    def __init__(self, algebra):
        self.alg = algebra
        self.datum = algebra.datum
        self.rank = algebra.rank
        self.cutoff = algebra.cutoff

    def contains(self, nu) -> bool:
        return all(x >= 0 for x in nu) and sum(nu) <= self.cutoff

    def dim(self, nu) -> int:
        return self.alg.dim(nu) if self.contains(nu) else 0

    def lower(self, i, nu) -> Mat:
        up = add(nu, unit(self.rank, i))
        return self.alg.space(up).F[i]

    def raise_(self, i, nu) -> Mat:
        if nu[i] == 0:
            return Mat.zeros(0, self.dim(nu))
        return self.alg.space(nu).E1[i]

    def gram(self, nu) -> Mat:
        return self.alg.space(nu).gram

    def parity(self, nu) -> int:
        return self.datum.root_parity(nu)

    def seed(self) -> list[Scalar]:
        return [ONE]

    def highest_pairing(self, i: int, nu) -> int:
        # weight of U^-_{-nu} is -nu
        return -sum(self.datum.A[i][j] * nu[j] for j in range(self.rank))

    def qdata(self, i):
        return self.datum.d[i], self.datum.odd(i)


class Kashiwara:
    """String decompositions and the modified operators on a graded space."""

    def __init__(self, space):
        self.W = space
        self.rank = space.datum.rank
        self._kernel: dict = {}
        self._decomp: dict = {}
        self._ft: dict = {}
        self._et: dict = {}
        self._div: dict = {}
        self._lock = threading.RLock()

    def _qd(self, i):
        D = self.W.datum
        return D.d[i], D.odd(i)

    def divided(self, i: int, nu: tuple, t: int) -> Mat:
        """Matrix of f_i^(t) : W_nu -> W_{nu + t e_i}."""
        key = (i, nu, t)
        M = self._div.get(key)
        if M is not None:
            return M
        n = self.W.dim(nu)
        if t == 0:
            M = Mat.identity(n)
        else:
            cur = Mat.identity(n)
            step = nu
            for _ in range(t):
                cur = self.W.lower(i, step) @ cur
                step = add(step, unit(self.rank, i))
            d, odd = self._qd(i)
            M = cur.scale(qpi_factorial(t, d, odd).inverse())
        self._div[key] = M
        return M

    def kernel(self, i: int, nu: tuple) -> Mat:
        """Columns spanning ker e_i in W_nu."""
        key = (i, nu)
        K = self._kernel.get(key)
        if K is None:
            n = self.W.dim(nu)
            if nu[i] == 0:
                K = Mat.identity(n)
            else:
                E = self.W.raise_(i, nu)
                K = Mat.from_columns(nullspace(E), n)
            self._kernel[key] = K
        return K

    def decomposition(self, i: int, nu: tuple):
        """Blocks [(t, K_t)] and the inverse of [f^(t) K_t]_t."""
        key = (i, nu)
        D = self._decomp.get(key)
        if D is not None:
            return D
        with self._lock:
            n = self.W.dim(nu)
            blocks = []
            cols = []
            for t in range(nu[i] + 1):
                low = sub(nu, tuple(t if j == i else 0 for j in range(self.rank)))
                K = self.kernel(i, low)
                if K.ncols == 0:
                    continue
                img = self.divided(i, low, t) @ K
                if img.is_zero():
                    continue  # string shorter than t (integrable modules)
                blocks.append((t, low, K))
                cols.append(img)
            M = hstack(cols, n)
            if M.ncols != n:
                raise ArithmeticError(f"string decomposition at {nu} for i={i}: {M.ncols} != {n}")
            Minv = inverse(M)
            D = (blocks, Minv)
            self._decomp[key] = D
        return D

    def string_components(self, i: int, nu: tuple, v: Sequence[Scalar]) -> dict[int, list[Scalar]]:
        """{t: v_t} with v = sum_t f_i^(t) v_t and v_t in ker e_i."""
        blocks, Minv = self.decomposition(i, nu)
        c = Minv.apply(list(v))
        out = {}
        pos = 0
        for t, low, K in blocks:
            part = c[pos:pos + K.ncols]
            pos += K.ncols
            out[t] = K.apply(part)
        return out

    def f_tilde(self, i: int, nu: tuple) -> Mat:
        """Matrix of f~_i : W_nu -> W_{nu + e_i}."""
        key = (i, nu)
        M = self._ft.get(key)
        if M is None:
            up = add(nu, unit(self.rank, i))
            blocks, Minv = self.decomposition(i, nu)
            n_up = self.W.dim(up)
            cols = [self.divided(i, low, t + 1) @ K for t, low, K in blocks]
            M = hstack(cols, n_up) @ Minv
            self._ft[key] = M
        return M

    def e_tilde(self, i: int, nu: tuple) -> Mat:
        """Matrix of e~_i : W_nu -> W_{nu - e_i} (zero map when nu_i = 0)."""
        key = (i, nu)
        M = self._et.get(key)
        if M is None:
            n = self.W.dim(nu)
            if nu[i] == 0:
                M = Mat.zeros(0, n)
            else:
                down = sub(nu, unit(self.rank, i))
                blocks, Minv = self.decomposition(i, nu)
                n_down = self.W.dim(down)
                cols = []
                for t, low, K in blocks:
                    if t == 0:
                        cols.append(Mat.zeros(n_down, K.ncols))
                    else:
                        cols.append(self.divided(i, low, t - 1) @ K)
                M = hstack(cols, n_down) @ Minv
            self._et[key] = M
        return M

    def apply_f(self, i: int, nu: tuple, v) -> list[Scalar]:
        return self.f_tilde(i, nu).apply(list(v))

    def apply_e(self, i: int, nu: tuple, v) -> list[Scalar]:
        return self.e_tilde(i, nu).apply(list(v))

    def apply_path(self, path: Sequence[int], v=None, nu=None):
        """f~_{path[0]} ... f~_{path[-1]} v; returns (depth, vector)."""
        if v is None:
            v = self.W.seed()
            nu = (0,) * self.rank
        for i in reversed(path):
            v = self.apply_f(i, nu, v)
            nu = add(nu, unit(self.rank, i))
        return nu, v
