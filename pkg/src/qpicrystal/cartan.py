"""Super generalized Cartan data of anisotropic type and weight bookkeeping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .errors import InvalidDatum, NonDominantWeight


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"condition": self.condition, "ok": self.ok, "detail": self.detail}


@dataclass(frozen=True)
class CartanDatum:
    A: tuple[tuple[int, ...], ...]
    parity: tuple[int, ...]
    d: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(tuple(int(x) for x in row) for row in self.A))
        object.__setattr__(self, "parity", tuple(int(x) for x in self.parity))
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))

    @property
    def rank(self) -> int:
        return len(self.A)

    def q_exp(self, i: int) -> int:
        """d_i, so that q_i = q^{d_i}."""
        return self.d[i]

    def odd(self, i: int) -> bool:
        return self.parity[i] == 1

    def symmetric_form(self, i: int, j: int) -> int:
        """(alpha_i, alpha_j) = d_i a_ij."""
        return self.d[i] * self.A[i][j]

    def root_parity(self, nu: Sequence[int]) -> int:
        return sum(n * p for n, p in zip(nu, self.parity)) % 2

    def validate(self) -> list[ConditionResult]:
        return validate(self)

    def is_valid(self) -> bool:
        return all(r.ok for r in validate(self))

    def require_valid(self) -> "CartanDatum":
        bad = [r for r in validate(self) if not r.ok]
        if bad:
            raise InvalidDatum("; ".join(f"({r.condition}) {r.detail}" for r in bad))
        return self

    def to_json(self) -> dict:
        return {"A": [list(r) for r in self.A], "parity": list(self.parity), "d": list(self.d)}

    @classmethod
    def from_json(cls, data: dict | str, name: str = "") -> "CartanDatum":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(tuple(tuple(r) for r in data["A"]), tuple(data["parity"]), tuple(data["d"]),
                       name=name or data.get("name", ""))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDatum(f"malformed datum: {exc}") from exc


def validate(datum: CartanDatum) -> list[ConditionResult]:
    """Check conditions (a)-(f) and I_1 nonempty; one entry per condition."""
    A, p, d = datum.A, datum.parity, datum.d
    n = len(A)
    report = []
    shape_ok = n > 0 and all(len(r) == n for r in A) and len(p) == n and len(d) == n
    report.append(ConditionResult("shape", shape_ok,
                                  "" if shape_ok else "A must be square with parity/d of matching length"))
    if not shape_ok:
        return report
    rng = range(n)
    bad = [i for i in rng if A[i][i] != 2]
    report.append(ConditionResult("a", not bad, f"a_ii != 2 at i={bad}" if bad else ""))
    bad = [(i, j) for i in rng for j in rng if i != j and A[i][j] > 0]
    report.append(ConditionResult("b", not bad, f"positive off-diagonal at {bad}" if bad else ""))
    bad = [(i, j) for i in rng for j in rng if (A[i][j] == 0) != (A[j][i] == 0)]
    report.append(ConditionResult("c", not bad, f"a_ij = 0 but a_ji != 0 at {bad}" if bad else ""))
    bad = [(i, j) for i in rng for j in rng if p[i] == 1 and A[i][j] % 2]
    report.append(ConditionResult("d", not bad, f"odd entry in odd row at {bad}" if bad else ""))
    bad = [(i, j) for i in rng for j in rng if d[i] * A[i][j] != d[j] * A[j][i]]
    g = 0
    for x in d:
        g = gcd(g, x)
    detail = []
    if bad:
        detail.append(f"DA not symmetric at {bad}")
    if any(x <= 0 for x in d):
        detail.append("d must be positive")
    if g != 1:
        detail.append(f"gcd(d) = {g}")
    report.append(ConditionResult("e", not detail, "; ".join(detail)))
    bad = [i for i in rng if p[i] not in (0, 1) or (p[i] - d[i]) % 2]
    report.append(ConditionResult("f", not bad, f"p(i) != d_i mod 2 at i={bad}" if bad else ""))
    odd = [i for i in rng if p[i] == 1]
    report.append(ConditionResult("odd-nonempty", bool(odd), "" if odd else "no odd simple root"))
    return report


@dataclass(frozen=True)
class Weight:
    """lambda + zeta with lambda given by its pairings n_i and zeta = -nu."""

    base: tuple[int, ...]
    depth: tuple[int, ...]

    def shift(self) -> tuple[int, ...]:
        return tuple(-x for x in self.depth)


def pairing(datum: CartanDatum, base: Sequence[int], depth: Sequence[int], i: int) -> int:
    """<alpha_i^vee, lambda - nu> = n_i - sum_j a_ij nu_j."""
    if not 0 <= i < datum.rank:
        raise IndexError(f"index {i} out of range for rank {datum.rank}")
    row = datum.A[i]
    return base[i] - sum(row[j] * depth[j] for j in range(len(depth)))


def pairing_vector(datum: CartanDatum, base: Sequence[int], depth: Sequence[int]) -> tuple[int, ...]:
    return tuple(pairing(datum, base, depth, i) for i in range(datum.rank))


def check_dominant(datum: CartanDatum, base: Sequence[int]) -> tuple[int, ...]:
    base = tuple(int(x) for x in base)
    if len(base) != datum.rank:
        raise NonDominantWeight(f"weight {base} has wrong length for rank {datum.rank}")
    if any(x < 0 for x in base):
        raise NonDominantWeight(f"weight {base} is not dominant")
    return base


def height(depth: Iterable[int]) -> int:
    return sum(depth)


def unit(rank: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(rank))


def add(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x - y for x, y in zip(a, b))


def depths_of_height(rank: int, h: int) -> list[tuple[int, ...]]:
    """All nu in N^rank with |nu| = h, in lexicographic order."""
    if rank == 1:
        return [(h,)]
    out = []
    for first in range(h, -1, -1):
        for rest in depths_of_height(rank - 1, h - first):
            out.append((first,) + rest)
    return sorted(out)


def osp(n: int) -> CartanDatum:
    """osp(1|2n) with the short simple root alpha_1 odd."""
    if n < 1:
        raise ValueError("n >= 1")
    if n == 1:
        return CartanDatum(((2,),), (1,), (1,), name="osp(1|2)")
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = 2
        if i + 1 < n:
            A[i][i + 1] = -1
            A[i + 1][i] = -1
    A[0][1] = -2
    return CartanDatum(tuple(map(tuple, A)), (1,) + (0,) * (n - 1), (1,) + (2,) * (n - 1),
                       name=f"osp(1|{2 * n})")


CATALOG: dict[str, CartanDatum] = {
    "osp12": osp(1),
    "osp14": osp(2),
    "osp16": osp(3),
    "affine2": CartanDatum(((2, -2), (-2, 2)), (1, 1), (1, 1), name="rank-2 affine odd"),
    "oddpair": CartanDatum(((2, 0), (0, 2)), (1, 1), (1, 1), name="osp(1|2) x osp(1|2)"),
}


def get_datum(spec: str) -> CartanDatum:
    """Catalog name, JSON text, or path to a JSON file."""
    if spec in CATALOG:
        return CATALOG[spec]
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            with open(spec) as fh:
                text = fh.read()
        except OSError as exc:
            raise InvalidDatum(f"unknown datum {spec!r}") from exc
    try:
        return CartanDatum.from_json(text)
    except json.JSONDecodeError as exc:
        raise InvalidDatum(f"invalid datum JSON: {exc}") from exc
