"""Rendering of crystals, modules, Gram matrices and canonical bases.

Everything is computed with pi formal.  The ``pi`` argument (``"formal"``,
``"+1"`` or ``"-1"``) only changes how scalars and edge signs are printed.
"""

from __future__ import annotations

import json
import re

from .canonical import CanonicalElement, format_dp, tex_dp
from .crystal import CrystalGraph, residue_str
from .linalg import Mat
from .scalar import Scalar, format_ratfunc, format_scalar

PI_MODES = ("formal", "+1", "-1")


def check_pi(pi: str) -> str:
    if pi not in PI_MODES:
        raise ValueError(f"pi specialization must be one of {PI_MODES}, got {pi!r}")
    return pi


def render_scalar(x: Scalar, pi: str = "formal") -> str:
    if pi == "formal":
        return format_scalar(x)
    return format_ratfunc(x.plus if pi == "+1" else x.minus)


def render_sign(sign: int, pi: str = "formal") -> str:
    """Edge label for pi^sign."""
    if not sign:
        return "1"
    return {"formal": "pi", "+1": "1", "-1": "-1"}[pi]


def render_residue(r, pi: str = "formal") -> str:
    if pi == "formal":
        return residue_str(r)
    comp = r[0] if pi == "+1" else r[1]
    return "[" + ", ".join(str(x) for x in comp) + "]"


def render_matrix(M: Mat, pi: str = "formal") -> list[list[str]]:
    return [[render_scalar(x, pi) for x in row] for row in M.data]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# crystal graphs

def crystal_json(C: CrystalGraph, pi: str = "formal") -> dict:
    out = C.to_json()
    raw = C.edges()
    for e, r in zip(out["edges"], raw):
        e["sign"] = render_sign(r.sign, pi)
    for n in out["nodes"]:
        n["residue"] = render_residue(C.nodes[n["id"]].residue, pi)
    out["pi"] = pi
    return out


def crystal_dot(C: CrystalGraph, pi: str = "formal", name: str = "crystal") -> str:
    ident = re.sub(r"\W", "_", name) or "crystal"
    lines = [f"digraph {ident} {{", "  node [shape=box];"]
    for n in C.representatives():
        eps = ",".join(str(n.eps[i]) for i in range(C.rank))
        phi = ",".join(str(n.phi[i]) for i in range(C.rank))
        label = f"{n.path_str()}\\neps=({eps}) phi=({phi})"
        lines.append(f'  n{n.id} [label="{label}", weight="{",".join(str(-x) for x in n.depth)}", '
                     f'parity={C.parity(n)}];')
    for e in C.edges():
        lines.append(f'  n{e.src} -> n{e.dst} [label="{e.i + 1}", sign="{render_sign(e.sign, pi)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def crystal_text(C: CrystalGraph, pi: str = "formal") -> str:
    lines = []
    for n in C.representatives():
        eps = " ".join(str(n.eps[i]) for i in range(C.rank))
        phi = " ".join(str(n.phi[i]) for i in range(C.rank))
        lines.append(f"{n.id:4d}  {n.path_str():24s} depth={list(n.depth)} eps=[{eps}] phi=[{phi}] "
                     f"parity={C.parity(n)}")
    lines.append("edges:")
    for e in C.edges():
        sign = render_sign(e.sign, pi)
        lines.append(f"  f~_{e.i + 1}: {e.src} -> " + ("" if sign == "1" else sign + " ") + str(e.dst))
    return "\n".join(lines) + "\n"


# modules

def module_json(M, pi: str = "formal", matrices: bool = True) -> dict:
    rank = M.datum.rank
    spaces = []
    for nu in M.depths():
        d = M.dim(nu)
        if d == 0:
            continue
        ent = {"depth": list(nu), "dim": d}
        if matrices:
            ent["gram"] = render_matrix(M.gram(nu), pi)
            ent["F"] = {}
            ent["E"] = {}
            for i in range(rank):
                up = tuple(x + (k == i) for k, x in enumerate(nu))
                if M.dim(up):
                    ent["F"][str(i + 1)] = render_matrix(M.lower(i, nu), pi)
                if nu[i] and M.dim(tuple(x - (k == i) for k, x in enumerate(nu))):
                    ent["E"][str(i + 1)] = render_matrix(M.raise_(i, nu), pi)
        spaces.append(ent)
    return {"lambda": list(getattr(M, "lam", [])), "truncated": M.truncated,
            "total_dim": sum(s["dim"] for s in spaces), "spaces": spaces, "pi": pi}


def gram_json(M, nu, pi: str = "formal") -> dict:
    return {"depth": list(nu), "dim": M.dim(nu), "gram": render_matrix(M.gram(nu), pi), "pi": pi}


def gram_text(M, nu, pi: str = "formal") -> str:
    rows = render_matrix(M.gram(nu), pi)
    return "\n".join("  ".join(r) for r in rows) + "\n"


# canonical bases

def _terms(el: CanonicalElement, pi: str) -> list[dict]:
    return [{"monomial": format_dp(s), "coeff": render_scalar(c, pi)} for s, c in el.dp_terms()]


def canonical_json(elements: list[CanonicalElement], C: CrystalGraph, pi: str = "formal") -> dict:
    out = []
    for el in elements:
        node = C.nodes[el.node]
        out.append({"node": el.node, "path": node.path_str(), "depth": list(el.depth),
                    "terms": _terms(el, pi), "pi_variant": bool(el.checks.get("pi_variant")),
                    "checks": {k: v for k, v in sorted(el.checks.items())
                               if isinstance(v, bool) and k != "pi_variant"}})
    return {"elements": out, "pi": pi}


def _tex_coeff(c: Scalar, pi: str) -> str:
    s = render_scalar(c, pi).replace("pi", "\\pi").replace("*", " ")
    s = re.sub(r"q\^\((-?\d+)\)", r"q^{\1}", s)
    return re.sub(r"q\^(-?\d+)", r"q^{\1}", s)


def canonical_tex(elements: list[CanonicalElement], C: CrystalGraph, pi: str = "formal") -> str:
    lines = []
    for el in elements:
        parts = []
        for s, c in el.dp_terms():
            txt = render_scalar(c, pi)
            if txt == "0":
                continue
            coef = "" if txt == "1" else f"\\left({_tex_coeff(c, pi)}\\right)"
            parts.append(coef + tex_dp(s))
        lhs = f"G({C.nodes[el.node].path_str()})"
        lines.append(f"{lhs} &= {' + '.join(parts) or '0'} \\\\")
    return "\n".join(lines) + "\n"


def canonical_text(elements: list[CanonicalElement], C: CrystalGraph, pi: str = "formal") -> str:
    lines = []
    for el in elements:
        parts = []
        for s, c in el.dp_terms():
            txt = render_scalar(c, pi)
            if txt == "0":
                continue
            parts.append(format_dp(s) if txt == "1" else f"({txt})*{format_dp(s)}")
        lines.append(f"G({C.nodes[el.node].path_str()}) = {' + '.join(parts) or '0'}")
    return "\n".join(lines) + "\n"
