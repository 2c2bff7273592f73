"""JSON scenarios: loading, validation, analysis dispatch and report serialization.

Complex matrices are nested lists of ``[re, im]`` pairs; an element is a list
of such matrices, one per block.  The accepted layout is fixed by
``schemas/scenario.schema.json``; reports follow ``schemas/report.schema.json``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import jsonschema
import numpy as np

from . import __version__
from .algebra import AbelianSubalgebra, Algebra, Element, generated_abelian_algebra
from .errors import BuresAlgError, ParseError, UnknownAnalysis, ValidationError
from .estimators import (DescentConfig, arithmetic_mean_value, geometric_mean_value,
                         minimize_arithmetic)
from .fidelity import check_bounds, check_uhlmann_formula, gamma_sup, transition_probability
from .forms import PositiveForm, radon_nikodym, radon_nikodym_residual
from .minimizers import inverse_perturbation_identity, min_set
from .sampling import random_invertible_positive
from .seminorms import tau as tau_report
from .subalgebras import (Automorphism, Probes, hereditary_compression, is_minimizing_subalgebra,
                          is_projective, least_minimizing_algebra, r0_case_analysis,
                          restricted_transition_probability)
from .verdict import Verdict

DEFAULT_EXPECT_TOL = 1e-6


def load_schema(name: str) -> dict:
    text = resources.files("buresalg").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


# -- (de)serialization -------------------------------------------------------------


def decode_matrix(rows, n: int, where: str) -> np.ndarray:
    m = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    if m.shape != (n, n):
        raise ValidationError(f"{where}: expected a {n}x{n} matrix, got shape {m.shape}",
                              "block shapes")
    return m


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def encode_element(x: Element) -> dict:
    return {"blocks": [encode_matrix(b) for b in x.blocks]}


def decode_element(spec: dict, alg: Algebra, where: str) -> Element:
    if "blocks" in spec:
        blocks = spec["blocks"]
        if len(blocks) != len(alg.block_dims):
            raise ValidationError(f"{where}: {len(blocks)} blocks for {len(alg.block_dims)} "
                                  "algebra blocks", "block shapes")
        return alg.element([decode_matrix(b, n, f"{where}, block {i}")
                            for i, (b, n) in enumerate(zip(blocks, alg.block_dims))])
    if "diagonal" in spec:
        values = spec["diagonal"]
        if len(values) != alg.dim:
            raise ValidationError(f"{where}: diagonal needs {alg.dim} entries", "block shapes")
        return alg.diag([float(v) for v in values])
    if "identity" in spec:
        return float(spec.get("scale", 1.0)) * alg.identity()
    raise ValidationError(f"{where}: unsupported element encoding", "element encoding")


def encode_value(v: Any) -> Any:
    """JSON-ready version of an analysis value."""
    if isinstance(v, Element):
        return encode_element(v)
    if isinstance(v, AbelianSubalgebra):
        return {"atoms": [encode_element(p) for p in v.atoms]}
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        # JSON has no inf/nan; such values are reported as null
        return float(v) if np.isfinite(v) else None
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, dict):
        return {str(k): encode_value(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(w) for w in v]
    return v


# -- scenario model ------------------------------------------------------------------


@dataclass
class Scenario:
    name: str
    algebra: Algebra
    forms: dict[str, PositiveForm]
    elements: dict[str, Element]
    analyses: list[dict]
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)


def parse_text(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _schema_error(exc: jsonschema.ValidationError) -> ValidationError:
    path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
    return ValidationError(f"{path}: {exc.message}", f"schema:{path}")


def build_scenario(data: dict, default_name: str = "scenario") -> Scenario:
    validator = jsonschema.Draft202012Validator(load_schema("scenario"))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        raise _schema_error(errors[0])
    alg = Algebra(tuple(data["algebra"]["blocks"]))
    forms = {}
    for name, spec in data.get("forms", {}).items():
        where = f"form {name!r}"
        if "vector" in spec:
            if len(alg.block_dims) != 1:
                raise ValidationError(f"{where}: vector forms need a single block",
                                      "block shapes")
            psi = np.array([complex(re, im) for re, im in spec["vector"]])
            if psi.shape != (alg.block_dims[0],):
                raise ValidationError(f"{where}: vector length mismatch", "block shapes")
            forms[name] = PositiveForm.vector_form(alg, psi)
            continue
        d = decode_element(spec, alg, where)
        if not d.is_positive():
            lo = d.herm().min_eigenvalue() if d.is_hermitian() else float("nan")
            raise ValidationError(f"{where}: density is not positive (min eigenvalue {lo:.3e})",
                                  "positive density")
        forms[name] = PositiveForm(d)
    elements = {name: decode_element(spec, alg, f"element {name!r}")
                for name, spec in data.get("elements", {}).items()}
    clash = sorted(set(forms) & set(elements))
    if clash:
        raise ValidationError(f"names used for both a form and an element: {clash}",
                              "unique names")
    analyses = list(data["analyses"])
    for i, a in enumerate(analyses):
        op = a["op"]
        if op not in ANALYSES:
            raise UnknownAnalysis(f"analysis {i}: unknown op {op!r}")
        if op == "subalgebra" and ("generator" in a) == ("atoms" in a):
            raise ValidationError(f"analysis {i} (subalgebra): give exactly one of "
                                  "'generator' or 'atoms'", "names resolve")
        kinds = ANALYSES[op].arguments
        for arg, kind in kinds.items():
            if arg not in a:
                if kind.endswith("?"):
                    continue
                raise ValidationError(f"analysis {i} ({op}): missing argument {arg!r}",
                                      "names resolve")
            table = forms if kind.rstrip("?") == "form" else elements
            names = a[arg] if isinstance(a[arg], list) else [a[arg]]
            for n in names:
                if n not in table:
                    raise ValidationError(f"analysis {i} ({op}): unknown {kind.rstrip('?')} {n!r}",
                                          "names resolve")
    return Scenario(data.get("name", default_name), alg, forms, elements, analyses,
                    int(data.get("seed", 0)), dict(data.get("tolerances", {})))


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return build_scenario(parse_text(text), path.stem)


# -- analyses ------------------------------------------------------------------------------


@dataclass(frozen=True)
class Analysis:
    fn: Callable
    arguments: dict[str, str]  # name -> "form" | "element"; trailing "?" marks optional


class Context:
    def __init__(self, scenario: Scenario, index: int):
        self.scenario = scenario
        self.rng = np.random.default_rng(np.random.SeedSequence([scenario.seed, index]))

    def form(self, spec, key):
        return self.scenario.forms[spec[key]]

    def element(self, spec, key, default=None):
        return self.scenario.elements[spec[key]] if key in spec else default


def _verdict(v: Verdict, invariant: str | None = None) -> dict:
    return {"name": invariant or v.name, "passed": bool(v.passed),
            "residual": float(v.residual), "tolerance": float(v.tolerance)}


def _flag(name: str, ok: bool) -> dict:
    return {"name": name, "passed": bool(ok), "residual": 0.0 if ok else 1.0, "tolerance": 0.0}


def _limit(name: str, residual: float, tol: float) -> dict:
    return {"name": name, "passed": bool(residual <= tol), "residual": float(residual),
            "tolerance": float(tol)}


def an_fidelity(ctx, spec):
    nu, rho = ctx.form(spec, "nu"), ctx.form(spec, "rho")
    res = transition_probability(nu, rho)
    g = gamma_sup(nu, rho, nu.algebra.identity())
    rel = abs(res.sqrt_p - g) / max(res.sqrt_p, g, 1e-300) if max(res.sqrt_p, g) > 0 else 0.0
    return ({"sqrt_p": res.sqrt_p, "p": res.p, "bures_distance": res.bures_distance,
             "gamma_sup_at_one": g, "norms": list(res.norms)},
            [_limit("oracle_coherence", rel, 1e-9)])


def an_gamma_sup(ctx, spec):
    nu, rho = ctx.form(spec, "nu"), ctx.form(spec, "rho")
    return {"gamma_sup": gamma_sup(nu, rho, ctx.element(spec, "z"))}, []


def an_uhlmann(ctx, spec):
    v = check_uhlmann_formula(ctx.form(spec, "mu"), ctx.element(spec, "a"), ctx.element(spec, "b"))
    return {"lhs": v.details["lhs"], "rhs": v.details["rhs"]}, [_verdict(v)]


def an_bounds(ctx, spec):
    nu, rho = ctx.form(spec, "nu"), ctx.form(spec, "rho")
    a = ctx.element(spec, "a")
    if a is None:
        a = random_invertible_positive(ctx.rng, nu.algebra)
    f = float(spec.get("f_value", 0.0))
    v, slacks = check_bounds(nu, rho, f, a)
    return {"slacks": slacks.as_dict(), "a": a}, [_verdict(v)]


def an_radon_nikodym(ctx, spec):
    nu, rho = ctx.form(spec, "nu"), ctx.form(spec, "rho")
    x = radon_nikodym(nu, rho)
    r = radon_nikodym_residual(nu, rho, x)
    return {"x": x, "residual": r}, [_limit("radon_nikodym_residual", r, 1e-9)]


def an_min_set(ctx, spec):
    d = min_set(ctx.form(spec, "nu"), ctx.form(spec, "rho"))
    out = {"status": d.status, "reason": d.reason, "unique": d.unique,
           "kernel_dimension": d.kernel_dimension}
    if d.representative is not None:
        out["representative"] = d.representative
    return out, []


def an_estimators(ctx, spec):
    nu, rho, x = ctx.form(spec, "nu"), ctx.form(spec, "rho"), ctx.element(spec, "x")
    oracle = transition_probability(nu, rho).sqrt_p
    gm, am = geometric_mean_value(nu, rho, x), arithmetic_mean_value(nu, rho, x)
    scale = 1e-9 * (1.0 + oracle)
    return ({"sqrt_p": oracle, "geometric_mean": gm, "arithmetic_mean": am},
            [_limit("geometric_mean_above_oracle", max(0.0, oracle - gm), scale),
             _limit("arithmetic_above_geometric", max(0.0, gm - am), scale)])


def an_descent(ctx, spec):
    nu, rho = ctx.form(spec, "nu"), ctx.form(spec, "rho")
    cfg = DescentConfig(max_iters=int(spec.get("max_iters", 2000)), tol=float(spec.get("tol", 1e-8)))
    trace = minimize_arithmetic(nu, rho, cfg)
    return {"final_value": trace.final_value, "converged": trace.converged, "reason": trace.reason,
            "iterations": len(trace.iterates),
            "sqrt_p": transition_probability(nu, rho).sqrt_p}, []


def an_tau(ctx, spec):
    rep = tau_report(ctx.form(spec, "nu"), ctx.form(spec, "rho"), ctx.element(spec, "z"))
    return ({"tau": rep.tau, "gamma_sup": rep.gamma_witness_value,
             "witness_value": rep.witness_value},
            [_limit("tau_equals_gamma_sup", abs(rep.tau - rep.gamma_witness_value),
                    1e-9 * (1.0 + rep.tau))])


def _probes(ctx, spec) -> Probes:
    p = spec.get("probes", {})
    ks = tuple(ctx.scenario.elements[k] for k in p.get("ks", []))
    alg = ctx.scenario.algebra
    autos = []
    for i, a in enumerate(p.get("automorphisms", [])):
        try:
            u = ctx.scenario.elements[a["unitary"]] if "unitary" in a else None
            autos.append(Automorphism(alg, u, tuple(a["permutation"]) if "permutation" in a else None))
        except KeyError as exc:
            raise ValidationError(f"automorphism probe {i}: unknown element {exc}", "names resolve")
        except ValueError as exc:
            raise ValidationError(f"automorphism probe {i}: {exc}", "automorphism probe")
    return Probes(tuple(autos), ks)


def an_least_algebra(ctx, spec):
    nu, rho = ctx.form(spec, "nu"), ctx.form(spec, "rho")
    v = least_minimizing_algebra(nu, rho, _probes(ctx, spec))
    out = {"decision": v.decision, "reason": v.reason, "lambda0": v.lambda0,
           "radokondi_ok": v.radokondi_ok, "r_infinity": v.r_infinity, "candidate": v.candidate,
           "probe_lambdas": list(v.probe_lambdas), "evidence": v.evidence}
    if v.algebra is not None:
        out["algebra"] = v.algebra
    checks = []
    if v.decision == "Exists":
        checks.append(_flag("exists_algebra_minimizing",
                            is_minimizing_subalgebra(nu, rho, v.algebra)))
    return out, checks


def an_subalgebra(ctx, spec):
    nu, rho = ctx.form(spec, "nu"), ctx.form(spec, "rho")
    if "generator" in spec:
        r = generated_abelian_algebra(ctx.element(spec, "generator"))
    else:
        r = AbelianSubalgebra(nu.algebra, tuple(ctx.scenario.elements[n] for n in spec["atoms"]))
    p_r = restricted_transition_probability(nu, rho, r)
    return ({"p_r": p_r, "p": transition_probability(nu, rho).p, "atoms": len(r.atoms),
             "minimizing": is_minimizing_subalgebra(nu, rho, r),
             "projective": is_projective(nu, rho, r)}, [])


def an_compression(ctx, spec):
    c = hereditary_compression(ctx.form(spec, "nu"), ctx.form(spec, "rho"))
    return ({"block_dims": list(c.algebra.block_dims), "dimension": c.algebra.dim,
             "spectrum": list(c.spectrum), "spectrum_compressed": list(c.spectrum_q)},
            [_flag("compressed_spectrum_relation", c.spectra_match)])


def an_r0(ctx, spec):
    r = r0_case_analysis(ctx.element(spec, "x"))
    return ({"label": r.label, "r0": r.r0, "probes": list(r.probes),
             "nonzero_eigenvalues": list(r.nonzero_eigenvalues)},
            [_flag("r0_strictly_smaller", r.distinct_from_probes)]
            if r.label == "two or more nonzero eigenvalues" else [])


def an_perturbation(ctx, spec):
    res = inverse_perturbation_identity(ctx.element(spec, "z"), ctx.element(spec, "x"))
    return ({"inverse": res.inverse, "alternative": res.alternative, "value": res.value},
            [_limit("inverse_perturbation_identity", res.worst(), 1e-9)])


ANALYSES: dict[str, Analysis] = {
    "fidelity": Analysis(an_fidelity, {"nu": "form", "rho": "form"}),
    "gamma_sup": Analysis(an_gamma_sup, {"nu": "form", "rho": "form", "z": "element"}),
    "uhlmann": Analysis(an_uhlmann, {"mu": "form", "a": "element", "b": "element"}),
    "bounds": Analysis(an_bounds, {"nu": "form", "rho": "form", "a": "element?"}),
    "radon_nikodym": Analysis(an_radon_nikodym, {"nu": "form", "rho": "form"}),
    "min_set": Analysis(an_min_set, {"nu": "form", "rho": "form"}),
    "estimators": Analysis(an_estimators, {"nu": "form", "rho": "form", "x": "element"}),
    "descent": Analysis(an_descent, {"nu": "form", "rho": "form"}),
    "tau": Analysis(an_tau, {"nu": "form", "rho": "form", "z": "element"}),
    "least_algebra": Analysis(an_least_algebra, {"nu": "form", "rho": "form"}),
    "subalgebra": Analysis(an_subalgebra, {"nu": "form", "rho": "form", "generator": "element?",
                                           "atoms": "element?"}),
    "compression": Analysis(an_compression, {"nu": "form", "rho": "form"}),
    "r0": Analysis(an_r0, {"x": "element"}),
    "perturbation": Analysis(an_perturbation, {"z": "element", "x": "element"}),
}


def _expectations(values: dict, expect: dict, tol: float) -> list[dict]:
    checks = []
    for key, want in sorted(expect.items()):
        name = f"expect:{key}"
        if key not in values:
            checks.append({"name": name, "passed": False, "residual": 1.0, "tolerance": tol})
            continue
        got = values[key]
        if isinstance(want, (int, float)) and not isinstance(want, bool) \
                and isinstance(got, (int, float)) and not isinstance(got, bool):
            checks.append(_limit(name, abs(float(got) - float(want)), tol))
        else:
            checks.append(_flag(name, got == want))
    return checks


def run_analysis(ctx: Context, spec: dict, expect_tol: float) -> dict:
    op = spec["op"]
    try:
        values, checks = ANALYSES[op].fn(ctx, spec)
        values = encode_value(values)
    except ValidationError:
        raise
    except BuresAlgError as exc:
        # a domain error inside an analysis is a failed analysis, not bad input
        values = {"error": type(exc).__name__, "message": str(exc)}
        checks = [{"name": f"raised:{type(exc).__name__}", "passed": False, "residual": 1.0,
                   "tolerance": 0.0}]
    checks = checks + _expectations(values, spec.get("expect", {}), expect_tol)
    status = "PASS" if all(c["passed"] for c in checks) else "FAIL"
    return {"op": op, "label": spec.get("label", op), "status": status, "values": values,
            "checks": checks}


def run(scenario: Scenario, tol: float | None = None) -> dict:
    expect_tol = tol if tol is not None else float(scenario.tolerances.get("expect", DEFAULT_EXPECT_TOL))
    results = []
    for i, spec in enumerate(scenario.analyses):
        r = run_analysis(Context(scenario, i), spec, expect_tol)
        r["index"] = i
        results.append(r)
    failed = sum(r["status"] == "FAIL" for r in results)
    return {"kind": "scenario",
            "provenance": {"version": __version__, "scenario": scenario.name,
                           "seed": scenario.seed, "tolerances": {"expect": expect_tol}},
            "results": results,
            "summary": {"analyses": len(results), "failed": failed, "passed": failed == 0}}


def run_scenario(path: str | Path, tol: float | None = None, seed: int | None = None) -> dict:
    scenario = load_scenario(path)
    if seed is not None:
        scenario.seed = int(seed)
    return run(scenario, tol)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
