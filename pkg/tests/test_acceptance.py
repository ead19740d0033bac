"""Acceptance criteria, one function each.

Each criterion returns (ok, detail) and is timed against its runtime budget.
Under pytest the PASS/FAIL lines are printed in the terminal summary; run
``python tests/test_acceptance.py`` to print them directly.

Criterion 1 asks for the stated osp(1|4) values at depth (4, 1).  Two of the
stated values are misprints, so the literal criterion fails and is kept as a
strict xfail; the corrected values are asserted normally.
"""

from __future__ import annotations

import sys
import time

import pytest

from qpicrystal.axioms import (build_Bla, grand_loop, negative_control, orthonormality_suite)
from qpicrystal.canonical import G3_membership_check, HalfCanonical, ModuleCanonical
from qpicrystal.cartan import get_datum
from qpicrystal.crystal import build_Binf
from qpicrystal.half import HalfAlgebra
from qpicrystal.modules import IntegrableModule, tensor_rule_check
from qpicrystal.reproductions import (KNOWN_MISPRINTS, Example63, rank_one_strings,
                                      specialization, tensor_rank_one)

OMEGAS = [(1, 0), (0, 1)]
LAMBDAS = [(1, 0), (0, 1), (1, 1)]
BUDGETS = {1: 10, 2: 5, 3: 10, 4: 60, 5: 300, 6: 300, 7: 300, 8: 300}
TITLES = {
    1: "osp(1|4) depth (4,1): canonical elements, form values, residues",
    2: "odd rank 1: V(n), B(n) strings, defining relations (n <= 8)",
    3: "V(n) (x) V(1): singular vectors, congruences, decomposition (n <= 6)",
    4: "tensor-product rule vs Kashiwara operators on the tensor module",
    5: "crystal-basis statements C1-C14 (osp(1|4) h6, rank-2 affine h5)",
    6: "canonical basis: bar, integrality, congruence, G3, G(b)v+ = G_lambda",
    7: "pi-orthonormality and the negative control",
    8: "specialization pi = +1 / -1 and classical sl2 strings",
}


def _failed(rep, skip=()):
    return [f"{it.example} {it.name}" for it in rep.items if not it.ok and it.name not in skip]


def criterion_1_literal():
    rep = Example63().run()
    bad = _failed(rep)
    return not bad, "stated values that fail: " + "; ".join(bad) if bad else "all stated values hold"


def criterion_1_corrected():
    rep = Example63().run()
    bad = _failed(rep, KNOWN_MISPRINTS)
    n = len(rep.items) - len([it for it in rep.items if it.name in KNOWN_MISPRINTS])
    return not bad, f"{n} corrected items" + (f"; failing: {bad}" if bad else "")


def criterion_2():
    rep = rank_one_strings(8)
    bad = _failed(rep)
    return not bad, f"{len(rep.items)} items" + (f"; failing: {bad}" if bad else "")


def criterion_3():
    rep = tensor_rank_one(6)
    bad = _failed(rep)
    return not bad, f"{len(rep.items)} items" + (f"; failing: {bad}" if bad else "")


def criterion_4():
    cases = []
    alg12 = HalfAlgebra(get_datum("osp12"), cutoff=12)
    mods = {n: IntegrableModule(alg12, (n,)) for n in range(6)}
    crys = {n: build_Bla(V) for n, V in mods.items()}
    for n in range(6):
        for m in range(6):
            cases.append(((n,), (m,), tensor_rule_check(mods[n], crys[n], mods[m], crys[m])))
    alg14 = HalfAlgebra(get_datum("osp14"), cutoff=6)
    mods14 = {lam: IntegrableModule(alg14, lam) for lam in OMEGAS}
    crys14 = {lam: build_Bla(V) for lam, V in mods14.items()}
    for a in OMEGAS:
        for b in OMEGAS:
            cases.append((a, b, tensor_rule_check(mods14[a], crys14[a], mods14[b], crys14[b])))
    comps = sum(r.comparisons for *_, r in cases)
    bad = [(a, b) for a, b, r in cases if not r.ok]
    return not bad, f"{len(cases)} module pairs, {comps} comparisons" + (f"; failing: {bad}" if bad else "")


def criterion_5():
    pairs = [((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (1, 0)), ((0, 1), (0, 1))]
    out = []
    ok = True
    for name, h in (("osp14", 6), ("affine2", 5)):
        rep = grand_loop(get_datum(name), h, LAMBDAS, pairs)
        ok &= rep.ok
        bad = [k for k, c in rep.checks.items() if not c.ok]
        checks = sum(c.count for c in rep.checks.values())
        out.append(f"{name}: {len(rep.checks)} statements, {checks} checks" + (f", failing {bad}" if bad else ""))
    return ok, "; ".join(out)


def criterion_6():
    out = []
    ok = True
    for name, h in (("osp14", 6), ("affine2", 5)):
        alg = HalfAlgebra(get_datum(name), cutoff=h)
        binf = build_Binf(alg, h)
        H = HalfCanonical(alg, binf)
        n = 0
        for nu in binf.depths():
            for el in H.compute_G(nu):
                ok &= all(H.solver.verify(el).values())
                n += 1
            for i in range(binf.rank):
                for k in range(1, nu[i] + 1):
                    ok &= G3_membership_check(H, nu, i, k)["ok"]
        compared = 0
        for lam in LAMBDAS:
            V = IntegrableModule(alg, lam, budget=2000, height_limit=None if name == "osp14" else h)
            M = ModuleCanonical(H, V, build_Bla(V))
            for nu in binf.depths():
                r = M.compare(nu)
                ok &= not r["failures"]
                compared += r["checked"]
        out.append(f"{name}: {n} G(b), {compared} module comparisons")
    return ok, "; ".join(out)


def criterion_7():
    ok = True
    parts = []
    for name, h in (("osp14", 6), ("affine2", 5)):
        alg = HalfAlgebra(get_datum(name), cutoff=h)
        crystals = [build_Binf(alg, h)]
        for lam in LAMBDAS:
            V = IntegrableModule(alg, lam, budget=2000, height_limit=None if name == "osp14" else h)
            crystals.append(build_Bla(V))
        for C in crystals:
            for ch in orthonormality_suite(C).values():
                ok &= ch.ok
        parts.append(f"{name}: {len(crystals)} crystals")
        if name == "osp14":
            nc = negative_control(crystals[0])
            ok &= nc["self_pairing_in_A"] and not nc["in_lattice"]
            parts.append(f"negative control (x, x) = {nc['self_pairing']}, x outside L(infinity)")
    return ok, "; ".join(parts)


def criterion_8():
    rep = specialization()
    bad = _failed(rep)
    return not bad, f"{len(rep.items)} items" + (f"; failing: {bad}" if bad else "")


def _run(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


def _line(k: int, ok: bool, detail: str, elapsed: float, label: str = "") -> str:
    within = elapsed < BUDGETS[k]
    tag = "PASS" if ok and within else "FAIL"
    timing = f"{elapsed:.1f}s / {BUDGETS[k]}s" + ("" if within else " over budget")
    return f"{tag}  criterion {k}{label}: {TITLES[k]} [{timing}] {detail}"


@pytest.fixture
def record(request):
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def rec(k, fn, label=""):
        ok, detail, elapsed = _run(fn)
        lines.append((k, label, _line(k, ok, detail, elapsed, label)))
        return ok, elapsed

    return rec


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.mark.xfail(strict=True, reason="two stated values are misprints (see the corrected test)")
def test_criterion_1_literal(record):
    ok, _ = record(1, criterion_1_literal, " (literal)")
    assert ok


def test_criterion_1_corrected(record):
    ok, elapsed = record(1, criterion_1_corrected, " (corrected)")
    assert ok and elapsed < BUDGETS[1]


@pytest.mark.parametrize("k", range(2, 9))
def test_criterion(record, k):
    ok, elapsed = record(k, globals()[f"criterion_{k}"])
    assert ok and elapsed < BUDGETS[k]


def main() -> int:
    fns = [(1, criterion_1_literal, " (literal)"), (1, criterion_1_corrected, " (corrected)")]
    fns += [(k, globals()[f"criterion_{k}"], "") for k in range(2, 9)]
    all_ok = True
    for k, fn, label in fns:
        ok, detail, elapsed = _run(fn)
        line = _line(k, ok, detail, elapsed, label)
        all_ok &= line.startswith("PASS")
        print(line, flush=True)
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
