"""Command-line front end.

Exit status: 0 when every requested check passes, 1 when a verification
fails, 2 on invalid input.  Simple-root indices are 1-based on the command
line and in all output.  Output is deterministic and does not depend on
``--jobs``.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import export
from .cartan import get_datum, validate
from .errors import (CutoffExceeded, DimensionBudgetExceeded, InvalidDatum, NonDominantWeight,
                     NonTerminating, QpiError)

OK, FAILED, INVALID = 0, 1, 2


class UsageError(Exception):
    pass


def parse_vector(text: str, rank: int | None = None, what: str = "lambda") -> tuple[int, ...]:
    try:
        vec = tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise UsageError(f"--{what} expects comma-separated integers, got {text!r}") from None
    if rank is not None and len(vec) != rank:
        raise UsageError(f"--{what} {text!r} has {len(vec)} entries, the datum has rank {rank}")
    return vec


def _datum(args):
    D = get_datum(args.datum)
    bad = [r for r in validate(D) if not r.ok]
    if bad:
        raise InvalidDatum("; ".join(f"condition ({r.condition}) fails: {r.detail}" for r in bad))
    return D


def _lambdas(args, D, need: int | None = None) -> list[tuple[int, ...]]:
    lams = [parse_vector(x, D.rank) for x in (args.lam or [])]
    if need is not None and len(lams) < need:
        raise UsageError(f"{args.command} needs at least {need} --lambda value(s)")
    for lam in lams:
        if any(x < 0 for x in lam):
            raise UsageError(f"lambda {list(lam)} is not dominant")
    return lams


def finite_type(D) -> bool:
    """DA positive definite (leading principal minors), i.e. V(lambda) is finite-dimensional."""
    from fractions import Fraction
    n = D.rank
    S = [[Fraction(D.d[i] * D.A[i][j]) for j in range(n)] for i in range(n)]
    for k in range(n):
        if S[k][k] <= 0:
            return False
        for r in range(k + 1, n):
            f = S[r][k] / S[k][k]
            for c in range(k, n):
                S[r][c] -= f * S[k][c]
    return True


def _module(D, lam, args):
    from .half import HalfAlgebra
    from .modules import IntegrableModule
    if args.cutoff is None and not finite_type(D):
        raise UsageError("V(lambda) is infinite-dimensional for this datum; pass --cutoff")
    alg = HalfAlgebra(D, cutoff=args.cutoff)
    return IntegrableModule(alg, lam, budget=args.budget, height_limit=args.cutoff)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require_format(args, allowed) -> str:
    fmt = args.format or allowed[0]
    if fmt not in allowed:
        raise UsageError(f"{args.command} supports --format {', '.join(allowed)}")
    return fmt


# commands

def cmd_validate(args) -> int:
    D = get_datum(args.datum)
    report = validate(D)
    fmt = _require_format(args, ("text", "json"))
    if fmt == "json":
        _emit(args, export.dumps({"datum": D.to_json(), "name": D.name,
                                  "conditions": [r.to_json() for r in report]}))
    else:
        lines = [f"{'ok  ' if r.ok else 'FAIL'}  ({r.condition}) {r.detail}".rstrip() for r in report]
        _emit(args, "\n".join(lines) + "\n")
    return OK if all(r.ok for r in report) else FAILED


def _render_crystal(args, C, name: str) -> str:
    fmt = _require_format(args, ("json", "dot", "text"))
    if fmt == "json":
        return export.dumps(export.crystal_json(C, args.pi))
    if fmt == "dot":
        return export.crystal_dot(C, args.pi, name)
    return export.crystal_text(C, args.pi)


def cmd_crystal_binf(args) -> int:
    from .crystal import build_Binf
    from .half import HalfAlgebra
    D = _datum(args)
    h = args.cutoff if args.cutoff is not None else 4
    C = build_Binf(HalfAlgebra(D, cutoff=h), h)
    _emit(args, _render_crystal(args, C, "Binf"))
    return OK


def cmd_crystal_bla(args) -> int:
    from .axioms import build_Bla
    D = _datum(args)
    lam = _lambdas(args, D, 1)[0]
    V = _module(D, lam, args)
    C = build_Bla(V)
    _emit(args, _render_crystal(args, C, "B_" + "_".join(map(str, lam))))
    return OK


def _select_depths(args, D, C):
    if args.depth:
        nu = parse_vector(args.depth, D.rank, "depth")
        if sum(nu) > C.max_height:
            raise UsageError(f"--depth {args.depth} lies above --cutoff {C.max_height}")
        return [nu]
    return C.depths()


def cmd_canonical(args) -> int:
    from .axioms import build_Bla
    from .canonical import HalfCanonical, ModuleCanonical
    from .crystal import build_Binf
    from .half import HalfAlgebra
    D = _datum(args)
    lams = _lambdas(args, D)
    fmt = _require_format(args, ("text", "json", "tex"))
    V = _module(D, lams[0], args) if lams else None
    if args.cutoff is not None:
        h = args.cutoff
    else:
        h = V.max_height if V is not None else 4
    alg = HalfAlgebra(D, cutoff=h)
    binf = build_Binf(alg, h)
    half = HalfCanonical(alg, binf)
    if V is not None:
        C = build_Bla(V)
        solver = ModuleCanonical(half, V, C).solver
        elements = [solver.solve(n) for nu in _select_depths(args, D, C) for n in C.reps_at(nu)]
    else:
        C = binf
        solver = half.solver
        elements = [el for nu in _select_depths(args, D, C)
                    for el in half.compute_G(nu, maximal=args.maximal)]
    ok = True
    for el in elements:
        if not el.checks.get("pi_variant"):
            ok &= all(solver.verify(el).values())
    if fmt == "json":
        text = export.dumps(export.canonical_json(elements, C, args.pi))
    elif fmt == "tex":
        text = export.canonical_tex(elements, C, args.pi)
    else:
        text = export.canonical_text(elements, C, args.pi)
    _emit(args, text)
    return OK if ok else FAILED


def cmd_gram(args) -> int:
    from .half import HalfAlgebra
    D = _datum(args)
    if not args.depth:
        raise UsageError("gram needs --depth")
    nu = parse_vector(args.depth, D.rank, "depth")
    if any(x < 0 for x in nu):
        raise UsageError("--depth entries must be nonnegative")
    lams = _lambdas(args, D)
    if lams:
        M = _module(D, lams[0], args)
        if not M.contains(nu) and M.truncated:
            raise UsageError(f"--depth {args.depth} lies above --cutoff {M.max_height}")
    else:
        from .graded import HalfGraded
        M = HalfGraded(HalfAlgebra(D, cutoff=max(sum(nu), args.cutoff or 0)))
    fmt = _require_format(args, ("text", "json"))
    if fmt == "json":
        _emit(args, export.dumps(export.gram_json(M, nu, args.pi)))
    else:
        _emit(args, export.gram_text(M, nu, args.pi))
    return OK


def _tensor_pair(datum_json: dict, a, b, budget: int, cutoff):
    from .axioms import build_Bla
    from .cartan import CartanDatum
    from .half import HalfAlgebra
    from .modules import IntegrableModule, tensor_rule_check
    D = CartanDatum.from_json(datum_json)
    alg = HalfAlgebra(D, cutoff=cutoff)
    A = IntegrableModule(alg, a, budget=budget, height_limit=cutoff)
    B = IntegrableModule(alg, b, budget=budget, height_limit=cutoff)
    r = tensor_rule_check(A, build_Bla(A), B, build_Bla(B))
    return {"lambda": list(a), "mu": list(b), "node_pairs": r.pairs, "comparisons": r.comparisons,
            "mismatches": len(r.mismatches), "lattice_stable": r.lattice_stable, "ok": r.ok}


def _map(fn, jobs: int, calls: list[tuple]):
    """Run ``fn(*call)`` for each call; results come back in call order."""
    if jobs <= 1 or len(calls) <= 1:
        return [fn(*c) for c in calls]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        futs = [ex.submit(fn, *c) for c in calls]
        return [f.result() for f in futs]


def cmd_tensor_rule(args) -> int:
    D = _datum(args)
    lams = _lambdas(args, D, 2)
    if len(lams) == 2:
        pairs = [(lams[0], lams[1])]
    else:
        pairs = [(a, b) for a in lams for b in lams]
    calls = [(D.to_json(), a, b, args.budget, args.cutoff) for a, b in pairs]
    results = _map(_tensor_pair, args.jobs, calls)
    fmt = _require_format(args, ("text", "json"))
    if fmt == "json":
        _emit(args, export.dumps({"pairs": results}))
    else:
        lines = [f"{'PASS' if r['ok'] else 'FAIL'}  V{r['lambda']} (x) V{r['mu']}: "
                 f"{r['comparisons']} comparisons, {r['mismatches']} mismatches" for r in results]
        _emit(args, "\n".join(lines) + "\n")
    return OK if all(r["ok"] for r in results) else FAILED


def _section(name: str):
    from . import reproductions as R
    fn = {"rank_one": lambda: R.rank_one_strings(8),
          "tensor_rank_one": lambda: R.tensor_rank_one(6),
          "osp14": lambda: R.Example63().run(),
          "odd_pair": lambda: R.odd_pair(),
          "specialization": lambda: R.specialization()}[name]
    return fn().items


SECTIONS = ("rank_one", "tensor_rank_one", "osp14", "odd_pair", "specialization")


def cmd_paper_examples(args) -> int:
    from .reproductions import KNOWN_MISPRINTS, Reproduction
    rep = Reproduction()
    for items in _map(_section, args.jobs, [(s,) for s in SECTIONS]):
        rep.items.extend(items)
    fmt = _require_format(args, ("text", "json"))
    if fmt == "json":
        _emit(args, export.dumps({"ok": rep.ok, "items": [
            {"example": it.example, "name": it.name, "ok": it.ok, "expected": it.expected,
             "got": it.got, "note": it.note, "known_misprint": it.name in KNOWN_MISPRINTS}
            for it in rep.items]}))
    else:
        table = rep.table()
        fails = sum(not it.ok for it in rep.items)
        misprints = sum(not it.ok and it.name in KNOWN_MISPRINTS for it in rep.items)
        summary = f"\n{len(rep.items) - fails}/{len(rep.items)} items pass"
        if fails:
            summary += f"; {misprints} of the {fails} failures reproduce stated values that are misprints"
        _emit(args, table + summary + "\n")
    return OK if rep.ok else FAILED


def cmd_grand_loop(args) -> int:
    from .axioms import grand_loop
    D = _datum(args)
    lams = _lambdas(args, D)
    if not lams:
        lams = [tuple(int(i == j) for j in range(D.rank)) for i in range(D.rank)]
    h = args.cutoff if args.cutoff is not None else 4
    t0 = time.perf_counter()
    rep = grand_loop(D, h, lams, budget=args.budget)
    elapsed = time.perf_counter() - t0
    fmt = _require_format(args, ("text", "json"))
    info = {k: v for k, v in rep.info.items() if k != "binf"}
    if fmt == "json":
        _emit(args, export.dumps({"ok": rep.ok, "height": h, "info": info, "checks": {
            k: {"ok": c.ok, "count": c.count} for k, c in sorted(rep.checks.items())}}))
    else:
        lines = rep.lines() + [f"{k}: {v}" for k, v in sorted(info.items())]
        _emit(args, "\n".join(lines) + "\n")
    if args.timing:
        print(f"elapsed {elapsed:.2f} s", file=sys.stderr)
    return OK if rep.ok else FAILED


COMMANDS = {
    "validate": (cmd_validate, "check the Cartan datum conditions"),
    "crystal-binf": (cmd_crystal_binf, "crystal graph of B(infinity) up to --cutoff"),
    "crystal-bla": (cmd_crystal_bla, "crystal graph of B(lambda)"),
    "canonical": (cmd_canonical, "canonical basis of U^- or of V(lambda)"),
    "gram": (cmd_gram, "Gram matrix of the form at --depth"),
    "tensor-rule": (cmd_tensor_rule, "tensor-product rule against Kashiwara operators on V(lambda) (x) V(mu)"),
    "paper-examples": (cmd_paper_examples, "reproduce the worked examples as a pass/fail table"),
    "grand-loop": (cmd_grand_loop, "crystal-basis statements C1-C14 up to --cutoff"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--datum", default="osp14", help="catalog name, JSON text or JSON file")
    common.add_argument("--lambda", dest="lam", action="append", metavar="L",
                        help="dominant weight as comma-separated pairings (repeatable)")
    common.add_argument("--depth", help="depth nu, comma-separated (weight -nu)")
    common.add_argument("--cutoff", type=int, help="height cutoff")
    common.add_argument("--budget", type=int, default=2000, help="module dimension budget")
    common.add_argument("--pi", choices=export.PI_MODES, default="formal",
                        help="specialize pi when printing")
    common.add_argument("--format", choices=("json", "dot", "tex", "text"))
    common.add_argument("--out", help="write output to this file")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--maximal", action="store_true", help="also list pi G(b)")
    common.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    p = argparse.ArgumentParser(prog="qpicrystal", description="Crystal and canonical bases "
                                "for quantum covering groups of anisotropic type.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INVALID if exc.code else OK
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return INVALID
    if args.cutoff is not None and args.cutoff < 0:
        print("error: --cutoff must be nonnegative", file=sys.stderr)
        return INVALID
    try:
        return COMMANDS[args.command][0](args)
    except (UsageError, InvalidDatum, NonDominantWeight, CutoffExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID
    except DimensionBudgetExceeded as exc:
        print(f"error: {exc}; raise --budget or set --cutoff", file=sys.stderr)
        return INVALID
    except (NonTerminating, QpiError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
