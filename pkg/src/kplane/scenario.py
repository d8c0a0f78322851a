"""Scenario files: strict loading, running every check, and report emission.

A scenario is a JSON document.  Unknown keys are rejected at every level so
that a misspelt tolerance cannot silently fall back to its default; every
error carries the path of the offending field.  After loading, all defaults
are filled in, so ``scenario_to_dict`` gives the complete canonical form.
"""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .applications import (
    BLInstance,
    KPlaneWeight,
    bl_feasibility,
    convolution_identity_check,
    gt_violation_scan,
    multilinear_l2_ratio,
    product_wedge_factor,
    schrodinger_energy_scan,
    two_caps_profile,
    weighted_identity_check,
)
from .density import build_density, param_norm_sq
from .errors import KPlaneError, ParseError, SchemaError, ValidationError
from .geometry import Subspace, coordinate_subspace, orthonormalize, wedge_abs, wedge_gaussian_oracle
from .manifold import (
    FAMILIES,
    build_manifold,
    check_transversality_GT,
    check_transversality_T,
    graph_reparametrize,
    unit_normal,
)
from .quadrature import QuadratureRule
from .transform import (
    affine_plane,
    composed_adjoint_transform,
    plane_integral_squared,
    pushforward_measure,
    rhs_tangent_integral,
    verify_identity,
)

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "T": 1e-6,
    "GT": 1e-6,
    "identity": 1e-3,
    "adjoint": 1e-3,
    "y_invariance": 1e-3,
    "plancherel": 1e-3,
    "schrodinger": 1e-3,
    "convolution": 0.02,
    "product_wedge": 1e-10,
    "bl_feasibility": 1e-9,
    "multilinear_ratio": 0.01,
    "multilinear_value": 1e-3,
    "weighted_identity": 1e-3,
    "gt_violation": 0.1,
    "gt_profile": 0.05,
    "jacobian_lemma": 1e-8,
    "jacobian_fd": 1e-6,
    "wedge_reconciliation": 1e-4,
}
CHECKS = tuple(DEFAULT_TOLERANCES)

SCHRODINGER_DEFAULTS = {"dim": 1, "lower": -1.0, "upper": 1.0}
WEDGE_PAIR_DEFAULTS = {"count": 200, "dims": [2, 3], "seed": 0, "min_wedge": 0.05, "quad_order": 32}

PLANE_PRESETS = ("x_axis", "y_axis", "z_axis", "diagonal", "horizontal")

_TOP_KEYS = {
    "schema_version", "name", "manifold", "density", "plane", "quadrature", "grid_res",
    "checks", "tolerances", "expect", "y_samples", "t_samples", "x_samples", "y_range",
    "curves", "bl", "multilinear", "weight_atoms", "schrodinger", "wedge_pairs",
    "chart_points", "variation_floor",
}


@dataclass
class Scenario:
    name: str
    manifold: dict | None = None
    density: dict = field(default_factory=lambda: {"family": "smooth_bump", "params": {}})
    plane: dict | None = None
    quadrature: dict = field(default_factory=lambda: QuadratureRule().as_dict())
    grid_res: int | None = None
    checks: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)
    y_samples: list = field(default_factory=list)
    t_samples: list = field(default_factory=list)
    x_samples: list = field(default_factory=list)
    y_range: list = field(default_factory=list)
    curves: list = field(default_factory=list)
    bl: list = field(default_factory=list)
    multilinear: dict = field(default_factory=dict)
    weight_atoms: list = field(default_factory=list)
    schrodinger: dict = field(default_factory=lambda: dict(SCHRODINGER_DEFAULTS))
    wedge_pairs: dict = field(default_factory=lambda: dict(WEDGE_PAIR_DEFAULTS, dims=[2, 3]))
    chart_points: int = 100
    variation_floor: float = 0.1
    schema_version: int = SCHEMA_VERSION

    @property
    def rule(self) -> QuadratureRule:
        return QuadratureRule(**self.quadrature)

    def tolerance(self, check: str) -> float:
        return self.tolerances.get(check, DEFAULT_TOLERANCES[check])


# --------------------------------------------------------------------------
# validation helpers


def _type(value, types, path, what):
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise SchemaError(f"expected {what}, got a boolean", path)
    if not isinstance(value, types):
        raise SchemaError(f"expected {what}, got {type(value).__name__}", path)
    return value


def _num(value, path):
    _type(value, (int, float), path, "a number")
    if not math.isfinite(value):
        raise SchemaError("number must be finite", path)
    return float(value)


def _int(value, path, lo=None):
    _type(value, int, path, "an integer")
    if lo is not None and value < lo:
        raise ValidationError(f"must be at least {lo}", path)
    return value


def _vec(value, path, length=None):
    _type(value, list, path, "a list of numbers")
    out = [_num(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ValidationError(f"expected {length} components, got {len(out)}", path)
    return out


def _keys(obj, allowed, path, required=()):
    _type(obj, dict, path, "an object")
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"unknown key {key!r}", f"{path}.{key}" if path else key)
    for key in required:
        if key not in obj:
            raise SchemaError(f"missing required key {key!r}", f"{path}.{key}" if path else key)


def _family_spec(obj, path, known, kind):
    _keys(obj, {"family", "params"}, path, required=("family",))
    fam = _type(obj["family"], str, f"{path}.family", "a string")
    if fam not in known:
        raise ValidationError(f"unknown {kind} family {fam!r}", f"{path}.family")
    params = obj.get("params", {})
    _type(params, dict, f"{path}.params", "an object")
    return {"family": fam, "params": json.loads(json.dumps(params))}


def _build_manifold(spec, path):
    try:
        return build_manifold(spec["family"], spec["params"])
    except (TypeError, ValueError, KPlaneError) as exc:
        raise ValidationError(f"cannot build manifold: {exc}", path) from None


def _plane_spec(obj, path):
    _type(obj, dict, path, "an object")
    if len(obj) != 1 or next(iter(obj)) not in ("preset", "angle", "basis"):
        raise SchemaError("plane takes exactly one of 'preset', 'angle', 'basis'", path)
    (key, val), = obj.items()
    if key == "preset":
        if val not in PLANE_PRESETS:
            raise ValidationError(f"unknown plane preset {val!r}", f"{path}.preset")
        return {"preset": val}
    if key == "angle":
        return {"angle": _num(val, f"{path}.angle")}
    _type(val, list, f"{path}.basis", "a list of vectors")
    return {"basis": [_vec(v, f"{path}.basis[{i}]") for i, v in enumerate(val)]}


def build_plane(spec: dict, n: int, path: str = "plane") -> Subspace:
    if "preset" in spec:
        p = spec["preset"]
        if p == "diagonal":
            if n != 2:
                raise ValidationError("the diagonal preset is a line in R^2", path)
            return orthonormalize([[1.0, 1.0]])
        if p == "horizontal":
            return coordinate_subspace(n, range(n - 1))
        axis = {"x_axis": 0, "y_axis": 1, "z_axis": 2}[p]
        if axis >= n:
            raise ValidationError(f"{p} does not exist in R^{n}", path)
        return coordinate_subspace(n, [axis])
    if "angle" in spec:
        if n != 2:
            raise ValidationError("an angle describes a line in R^2 only", path)
        a = spec["angle"]
        return orthonormalize([[math.cos(a), math.sin(a)]])
    basis = spec["basis"]
    if any(len(v) != n for v in basis):
        raise ValidationError(f"basis vectors must lie in R^{n}", path)
    try:
        return orthonormalize(basis)
    except KPlaneError as exc:
        raise ValidationError(f"basis does not span a {len(basis)}-plane: {exc}", path) from None


def validate_scenario(doc) -> Scenario:
    """Turn a parsed JSON document into a fully defaulted :class:`Scenario`."""
    _keys(doc, _TOP_KEYS, "", required=("schema_version", "name"))
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {doc['schema_version']!r}", "schema_version")
    s = Scenario(name=_type(doc["name"], str, "name", "a string"))

    if "manifold" in doc:
        s.manifold = _family_spec(doc["manifold"], "manifold", FAMILIES, "manifold")
    if "density" in doc:
        s.density = _family_spec(doc["density"], "density", ("smooth_bump", "indicator", "gaussian_truncated"), "density")
    if "plane" in doc:
        s.plane = _plane_spec(doc["plane"], "plane")
    if "quadrature" in doc:
        qd = doc["quadrature"]
        _keys(qd, set(QuadratureRule().as_dict()), "quadrature")
        merged = dict(s.quadrature)
        for key, val in qd.items():
            p = f"quadrature.{key}"
            merged[key] = val if key == "window" else (_int(val, p) if key != "plane_trunc_radius" else _num(val, p))
        try:
            s.quadrature = QuadratureRule(**merged).as_dict()
        except ValueError as exc:
            raise ValidationError(str(exc), "quadrature") from None
    if doc.get("grid_res") is not None:
        s.grid_res = _int(doc["grid_res"], "grid_res", 3)
    if "checks" in doc:
        _type(doc["checks"], list, "checks", "a list of check names")
        for i, c in enumerate(doc["checks"]):
            if c not in CHECKS:
                raise ValidationError(f"unknown check {c!r}", f"checks[{i}]")
        s.checks = list(doc["checks"])
    if "tolerances" in doc:
        _keys(doc["tolerances"], set(CHECKS), "tolerances")
        s.tolerances = {k: _num(v, f"tolerances.{k}") for k, v in doc["tolerances"].items()}
    if "expect" in doc:
        _keys(doc["expect"], {"T", "GT"}, "expect")
        s.expect = {k: _type(v, bool, f"expect.{k}", "a boolean") for k, v in doc["expect"].items()}
    for key in ("y_samples", "x_samples"):
        if key in doc:
            _type(doc[key], list, key, "a list of vectors")
            setattr(s, key, [_vec(v, f"{key}[{i}]") for i, v in enumerate(doc[key])])
    for key in ("t_samples", "y_range"):
        if key in doc:
            setattr(s, key, _vec(doc[key], key))
    if "curves" in doc:
        _type(doc["curves"], list, "curves", "a list")
        curves = []
        for i, c in enumerate(doc["curves"]):
            p = f"curves[{i}]"
            _keys(c, {"family", "params", "density"}, p, required=("family",))
            spec = _family_spec({k: c[k] for k in ("family", "params") if k in c}, p, FAMILIES, "manifold")
            dens = c.get("density", {"family": "smooth_bump"})
            spec["density"] = _family_spec(dens, f"{p}.density",
                                           ("smooth_bump", "indicator", "gaussian_truncated"), "density")
            curves.append(spec)
        s.curves = curves
    if "bl" in doc:
        _type(doc["bl"], list, "bl", "a list of instances")
        insts = []
        for i, inst in enumerate(doc["bl"]):
            p = f"bl[{i}]"
            _keys(inst, {"vectors", "p", "expect_feasible"}, p, required=("vectors", "p"))
            _type(inst["vectors"], list, f"{p}.vectors", "a list of vectors")
            vecs = [_vec(v, f"{p}.vectors[{j}]") for j, v in enumerate(inst["vectors"])]
            entry = {"vectors": vecs, "p": _vec(inst["p"], f"{p}.p", len(vecs))}
            if "expect_feasible" in inst:
                entry["expect_feasible"] = _type(inst["expect_feasible"], bool, f"{p}.expect_feasible", "a boolean")
            insts.append(entry)
        s.bl = insts
    if "multilinear" in doc:
        _keys(doc["multilinear"], {"expected_ratio"}, "multilinear")
        s.multilinear = {k: _num(v, f"multilinear.{k}") for k, v in doc["multilinear"].items()}
    if "weight_atoms" in doc:
        _type(doc["weight_atoms"], list, "weight_atoms", "a list")
        atoms = []
        for i, a in enumerate(doc["weight_atoms"]):
            p = f"weight_atoms[{i}]"
            _keys(a, {"plane", "offset", "weight"}, p, required=("plane", "weight"))
            atom = {"plane": _plane_spec(a["plane"], f"{p}.plane"), "weight": _num(a["weight"], f"{p}.weight")}
            if atom["weight"] < 0:
                raise ValidationError("weights must be nonnegative", f"{p}.weight")
            atom["offset"] = _vec(a.get("offset", []), f"{p}.offset")
            atoms.append(atom)
        s.weight_atoms = atoms
    if "schrodinger" in doc:
        _keys(doc["schrodinger"], {"dim", "lower", "upper"}, "schrodinger")
        sd = dict(SCHRODINGER_DEFAULTS)
        for k, v in doc["schrodinger"].items():
            sd[k] = _int(v, f"schrodinger.{k}", 1) if k == "dim" else _num(v, f"schrodinger.{k}")
        s.schrodinger = sd
    if "wedge_pairs" in doc:
        _keys(doc["wedge_pairs"], {"count", "dims", "seed", "min_wedge", "quad_order"}, "wedge_pairs")
        wp = dict(WEDGE_PAIR_DEFAULTS, dims=list(WEDGE_PAIR_DEFAULTS["dims"]))
        for k, v in doc["wedge_pairs"].items():
            p = f"wedge_pairs.{k}"
            if k == "dims":
                wp[k] = [_int(d, f"{p}[{i}]", 2) for i, d in enumerate(_type(v, list, p, "a list"))]
            elif k == "min_wedge":
                wp[k] = _num(v, p)
            else:
                wp[k] = _int(v, p, 0)
        s.wedge_pairs = wp
    if "chart_points" in doc:
        s.chart_points = _int(doc["chart_points"], "chart_points", 2)
    if "variation_floor" in doc:
        s.variation_floor = _num(doc["variation_floor"], "variation_floor")

    _cross_validate(s)
    return s


_NEEDS_MANIFOLD = {"T", "GT", "identity", "adjoint", "y_invariance", "plancherel",
                   "weighted_identity", "gt_violation", "gt_profile", "jacobian_lemma", "jacobian_fd"}
_NEEDS_PLANE = {"T", "GT", "identity", "adjoint", "y_invariance", "plancherel",
                "gt_violation", "gt_profile", "jacobian_lemma", "jacobian_fd"}


def _cross_validate(s: Scenario):
    needed = set(s.checks)
    M = None
    if needed & _NEEDS_MANIFOLD:
        if s.manifold is None:
            raise ValidationError("these checks need a manifold", "manifold")
        M = _build_manifold(s.manifold, "manifold")
    if needed & _NEEDS_PLANE:
        if s.plane is None:
            raise ValidationError("these checks need a plane", "plane")
        plane = build_plane(s.plane, M.n)
        if plane.dim != M.k:
            raise ValidationError(f"plane has dimension {plane.dim}, manifold has k={M.k}", "plane")
        for i, y in enumerate(s.y_samples):
            if len(y) != M.n:
                raise ValidationError(f"offset must lie in R^{M.n}", f"y_samples[{i}]")
    for i, atom in enumerate(s.weight_atoms):
        if M is None:
            break
        p = f"weight_atoms[{i}]"
        plane = build_plane(atom["plane"], M.n, f"{p}.plane")
        if plane.dim != M.k:
            raise ValidationError(f"atom plane must have dimension {M.k}", f"{p}.plane")
        if atom["offset"] and len(atom["offset"]) != M.n:
            raise ValidationError(f"offset must lie in R^{M.n}", f"{p}.offset")
    for i, c in enumerate(s.curves):
        _build_manifold(c, f"curves[{i}]")
    for i, inst in enumerate(s.bl):
        try:
            BLInstance(inst["vectors"], inst["p"])
        except (ValueError, KPlaneError) as exc:
            raise ValidationError(str(exc), f"bl[{i}]") from None
    if {"convolution", "multilinear_ratio", "product_wedge"} & needed and len(s.curves) < 2:
        raise ValidationError("needs at least two curves", "curves")
    if "bl_feasibility" in needed and not s.bl:
        raise ValidationError("needs at least one instance", "bl")
    if "weighted_identity" in needed and not s.weight_atoms:
        raise ValidationError("needs weight atoms", "weight_atoms")


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file (strict: unknown keys are errors)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read scenario: {exc}", str(path)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from None
    return validate_scenario(doc)


def scenario_to_dict(s: Scenario) -> dict:
    """Canonical, fully defaulted document for ``s``."""
    d = asdict(s)
    order = ["schema_version", "name"] + [k for k in d if k not in ("schema_version", "name")]
    return {k: d[k] for k in order if d[k] is not None}


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


# --------------------------------------------------------------------------
# running


def _record(check, **kw):
    rec = {"check": check, "lhs": None, "rhs": None, "rel_error": None, "margin": None,
           "tail_bound": None, "pass": False, "runtime_ms": 0.0, "detail": {}, "error": None}
    rec.update(kw)
    return rec


class _Context:
    """Lazily built objects shared by the checks of one scenario."""

    def __init__(self, s: Scenario):
        self.s = s
        self.q = s.rule
        self._cache = {}

    def get(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    @property
    def manifold(self):
        return self.get("M", lambda: build_manifold(self.s.manifold["family"], self.s.manifold["params"]))

    @property
    def density(self):
        return self.get("f", lambda: build_density(self.s.density["family"], self.s.density["params"]))

    @property
    def plane(self):
        return self.get("plane", lambda: build_plane(self.s.plane, self.manifold.n))

    @property
    def y_samples(self):
        if self.s.y_samples:
            return [np.asarray(y) for y in self.s.y_samples]
        return [np.zeros(self.manifold.n)]

    def identity(self):
        return self.get("identity", lambda: verify_identity(
            self.manifold, self.density, self.plane, self.y_samples, self.q, self.s.grid_res))

    def curves(self):
        def make():
            ms = [build_manifold(c["family"], c["params"]) for c in self.s.curves]
            fs = [build_density(c["density"]["family"], c["density"]["params"]) for c in self.s.curves]
            return ms, fs
        return self.get("curves", make)


def _rel(a, b):
    return abs(a - b) / abs(b) if b else abs(a - b)


def _check_transversality(ctx: _Context, which: str):
    fn = check_transversality_T if which == "T" else check_transversality_GT
    res = fn(ctx.manifold, ctx.plane, ctx.s.grid_res, tol=ctx.s.tolerance(which))
    expected = ctx.s.expect.get(which, True)
    witness = res.witness
    return dict(margin=res.margin, **{"pass": res.passed == expected},
                detail={"holds": res.passed, "expected": expected, "witness": _plain(witness)})


def _check_identity(ctx: _Context):
    r = ctx.identity()
    worst = max(r.lhs, key=lambda v: abs(v - r.rhs))
    tol = ctx.s.tolerance("identity")
    return dict(lhs=worst, rhs=r.rhs, rel_error=r.identity_error, tail_bound=r.tail_bound,
                margin=min(r.margin_T, r.margin_GT), **{"pass": r.identity_error <= tol},
                detail={"plane_integrals": r.lhs, "y_samples": r.y_samples, "budget_ok": r.budget_ok})


def _check_adjoint(ctx: _Context):
    r = ctx.identity()
    err = max([_rel(r.adjoint, r.rhs)] + [_rel(v, r.adjoint) for v in r.lhs])
    return dict(lhs=r.adjoint, rhs=r.rhs, rel_error=err, **{"pass": err <= ctx.s.tolerance("adjoint")},
                detail={"pairwise": "adjoint vs tangent form and vs every plane integral"})


def _check_y_invariance(ctx: _Context):
    r = ctx.identity()
    return dict(lhs=max(r.lhs), rhs=min(r.lhs), rel_error=r.y_spread, tail_bound=r.tail_bound,
                **{"pass": r.y_spread <= ctx.s.tolerance("y_invariance")})


def _check_plancherel(ctx: _Context):
    M, f = ctx.manifold, ctx.density
    res = [plane_integral_squared(M, f, affine_plane(ctx.plane, y), ctx.q) for y in ctx.y_samples]
    norm = param_norm_sq(M, f, ctx.q.order)
    err = max(_rel(r.value, norm) for r in res)
    return dict(lhs=res[0].value, rhs=norm, rel_error=err, tail_bound=max(r.tail_bound for r in res),
                **{"pass": err <= ctx.s.tolerance("plancherel")})


def _check_schrodinger(ctx: _Context):
    sd = ctx.s.schrodinger
    f = ctx.density
    ts = ctx.s.t_samples or [0.0]
    scan = schrodinger_energy_scan(f, ts, ctx.q, sd["dim"], sd["lower"], sd["upper"])
    from .manifold import paraboloid
    norm = param_norm_sq(paraboloid(sd["dim"], sd["lower"], sd["upper"]), f, ctx.q.order)
    energies = [e for _, e in scan]
    spread = (max(energies) - min(energies)) / norm if norm else max(energies)
    err = max([spread] + [_rel(e, norm) for e in energies])
    return dict(lhs=energies[0], rhs=norm, rel_error=err, **{"pass": err <= ctx.s.tolerance("schrodinger")},
                detail={"t": ts, "energy": energies, "spread": spread})


def _check_convolution(ctx: _Context):
    ms, fs = ctx.curves()
    xs = ctx.s.x_samples or [[0.0, 0.0]]
    r = convolution_identity_check(ms[:2], fs[:2], xs, ctx.q)
    err = max(r.max_rel_error, r.spread)
    return dict(lhs=r.lhs[0], rhs=r.rhs, rel_error=err, margin=r.min_normal_wedge, tail_bound=r.tail_bound,
                **{"pass": err <= ctx.s.tolerance("convolution")},
                detail={"x_samples": r.x_samples, "convolution": r.lhs, "spread": r.spread})


def _check_product_wedge(ctx: _Context):
    ms, _ = ctx.curves()
    normals = [unit_normal(M, M.lower + 0.5 * M.width)[0] for M in ms]
    direct, formula = product_wedge_factor(normals)
    err = abs(direct - formula)
    return dict(lhs=direct, rhs=formula, rel_error=err, **{"pass": err <= ctx.s.tolerance("product_wedge")})


def _check_bl(ctx: _Context):
    tol = ctx.s.tolerance("bl_feasibility")
    ok, worst, details = True, 0.0, []
    for inst_spec in ctx.s.bl:
        inst = BLInstance(inst_spec["vectors"], inst_spec["p"])
        res = bl_feasibility(inst)
        if res.feasible:
            resid = res.residual(inst)
            valid = resid <= tol and all(v >= -1e-12 for v in res.lambdas.values())
        else:
            resid = 0.0
            valid = _farkas_valid(inst, res)
        expected = inst_spec.get("expect_feasible")
        matches = expected is None or expected == res.feasible
        ok &= valid and matches
        worst = max(worst, resid)
        details.append({"feasible": res.feasible,
                        "lambdas": {",".join(map(str, J)): v for J, v in res.lambdas.items()},
                        "farkas": None if res.farkas is None else res.farkas.tolist(),
                        "certificate_valid": valid, "matches_expectation": matches})
    return dict(rel_error=worst, **{"pass": ok}, detail={"instances": details})


def _farkas_valid(inst: BLInstance, res) -> bool:
    y = res.farkas
    if y is None:
        return not res.bases  # no basis at all: trivially infeasible
    A = np.zeros((inst.m + 1, len(res.bases)))
    for col, J in enumerate(res.bases):
        A[list(J), col] = 1.0
    A[-1] = 1.0
    b = np.concatenate([inst.p, [1.0]])
    return bool(np.all(y @ A <= 1e-9) and y @ b > 1e-9)


def _check_multilinear(ctx: _Context):
    ms, fs = ctx.curves()
    n = ms[0].n
    base = multilinear_l2_ratio(ms[:n], fs[:n], ctx.q)
    q2 = QuadratureRule(ctx.q.order * 2, ctx.q.plane_trunc_radius * 2, ctx.q.plane_points_per_axis * 2, ctx.q.window)
    wide = multilinear_l2_ratio(ms[:n], fs[:n], q2)
    stab = _rel(wide.ratio, base.ratio)
    ok = stab <= ctx.s.tolerance("multilinear_ratio")
    detail = {"ratio_doubled_radius": wide.ratio, "predicted": base.predicted, "stability": stab}
    if "expected_ratio" in ctx.s.multilinear:
        dev = abs(base.ratio - ctx.s.multilinear["expected_ratio"])
        detail["deviation_from_expected"] = dev
        ok &= dev <= ctx.s.tolerance("multilinear_value")
    return dict(lhs=base.ratio, rhs=wide.ratio, rel_error=stab, tail_bound=base.tail_bound,
                **{"pass": ok}, detail=detail)


def _check_weighted(ctx: _Context):
    M = ctx.manifold
    atoms = []
    for a in ctx.s.weight_atoms:
        plane = build_plane(a["plane"], M.n)
        atoms.append((affine_plane(plane, a["offset"] or np.zeros(M.n)), a["weight"]))
    r = weighted_identity_check(M, ctx.density, KPlaneWeight(atoms), ctx.q, ctx.s.grid_res)
    return dict(lhs=r.lhs, rhs=r.rhs, rel_error=r.rel_error, tail_bound=r.tail_bound,
                **{"pass": r.rel_error <= ctx.s.tolerance("weighted_identity")},
                detail={"atom_plane_integrals": r.atom_lhs})


def _gt_scan(ctx: _Context):
    ys = ctx.s.y_range or [0.0, 0.25, 0.5]
    floor = ctx.s.tolerances.get("gt_violation", ctx.s.variation_floor)
    return ctx.get("gt_scan", lambda: gt_violation_scan(
        ctx.manifold, ctx.density, ctx.plane, ys, ctx.q, floor, ctx.s.grid_res))


def _check_gt_violation(ctx: _Context):
    r = _gt_scan(ctx)
    return dict(lhs=max(r.values), rhs=min(r.values), margin=r.variation, tail_bound=r.tail_bound,
                **{"pass": r.passed},
                detail={"y": r.y, "values": r.values, "direction": r.direction,
                        "variation_floor": r.variation_floor, "witness": _plain(r.witness)})


def _check_gt_profile(ctx: _Context):
    r = _gt_scan(ctx)
    sep = float(ctx.s.manifold["params"].get("separation", 1.0))
    model = two_caps_profile(r.y, sep)
    observed = np.asarray(r.values) / max(r.values)
    err = float(np.max(np.abs(observed - model / model.max())))
    # lhs / rhs summarize each normalized profile by its mean; rel_error is the pointwise max gap
    return dict(lhs=float(observed.mean()), rhs=float((model / model.max()).mean()), rel_error=err,
                **{"pass": err <= ctx.s.tolerance("gt_profile")},
                detail={"normalized_values": observed.tolist(), "normalized_model": (model / model.max()).tolist()})


def _chart(ctx: _Context):
    return ctx.get("chart", lambda: graph_reparametrize(ctx.manifold, ctx.plane, ctx.s.chart_points))


def _check_jacobian_lemma(ctx: _Context):
    ch = _chart(ctx)
    perp = ctx.plane.complement()
    from .manifold import tangent_space
    direct = np.array([1.0 / wedge_abs(tangent_space(ctx.manifold, xi), perp) for xi in ch.xi])
    err = float(np.max(np.abs(direct - ch.jacobian)))
    return dict(lhs=float(ch.jacobian.max()), rhs=float(direct.max()), rel_error=err,
                **{"pass": err <= ctx.s.tolerance("jacobian_lemma")}, detail={"points": len(ch.u)})


def _check_jacobian_fd(ctx: _Context):
    ch = _chart(ctx)
    fd = np.array([ch.induced_jacobian_fd(u) for u in ch.u])
    err = float(np.max(np.abs(fd - ch.jacobian)))
    return dict(lhs=float(ch.jacobian.max()), rhs=float(fd.max()), rel_error=err,
                **{"pass": err <= ctx.s.tolerance("jacobian_fd")}, detail={"points": len(ch.u)})


def random_complementary_pairs(count: int, dims, seed: int, min_wedge: float):
    """``count`` random (V, W) pairs per ambient dimension with wedge above ``min_wedge``."""
    rng = np.random.default_rng(seed)
    pairs = []
    for n in dims:
        made = 0
        while made < count:
            d = int(rng.integers(1, n))
            V = orthonormalize(rng.normal(size=(d, n)))
            W = orthonormalize(rng.normal(size=(n - d, n)))
            if wedge_abs(V, W) > min_wedge:
                pairs.append((V, W))
                made += 1
    return pairs


def _check_wedge_reconciliation(ctx: _Context):
    wp = ctx.s.wedge_pairs
    pairs = random_complementary_pairs(wp["count"], wp["dims"], wp["seed"], wp["min_wedge"])
    prods = [wedge_abs(V, W) * wedge_gaussian_oracle(V, W, wp["quad_order"]) for V, W in pairs]
    err = float(max(abs(p - 1.0) for p in prods))
    return dict(lhs=float(min(prods)), rhs=1.0, rel_error=err, margin=min(wedge_abs(V, W) for V, W in pairs),
                **{"pass": err <= ctx.s.tolerance("wedge_reconciliation")}, detail={"pairs": len(pairs)})


_RUNNERS = {
    "T": lambda ctx: _check_transversality(ctx, "T"),
    "GT": lambda ctx: _check_transversality(ctx, "GT"),
    "identity": _check_identity,
    "adjoint": _check_adjoint,
    "y_invariance": _check_y_invariance,
    "plancherel": _check_plancherel,
    "schrodinger": _check_schrodinger,
    "convolution": _check_convolution,
    "product_wedge": _check_product_wedge,
    "bl_feasibility": _check_bl,
    "multilinear_ratio": _check_multilinear,
    "weighted_identity": _check_weighted,
    "gt_violation": _check_gt_violation,
    "gt_profile": _check_gt_profile,
    "jacobian_lemma": _check_jacobian_lemma,
    "jacobian_fd": _check_jacobian_fd,
    "wedge_reconciliation": _check_wedge_reconciliation,
}


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (list, tuple)):
        return [_plain(o) for o in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def run_scenario(s: Scenario) -> dict:
    """Run every check in order; failures and errors are recorded, never raised."""
    ctx = _Context(s)
    records = []
    for check in s.checks:
        t0 = time.perf_counter()
        try:
            rec = _record(check, **_RUNNERS[check](ctx))
        except KPlaneError as exc:
            rec = _record(check, error=f"{type(exc).__name__}: {exc}")
        rec["runtime_ms"] = 1000.0 * (time.perf_counter() - t0)
        rec["detail"] = _plain(rec["detail"])
        for key in ("lhs", "rhs", "rel_error", "margin", "tail_bound"):
            v = rec[key]
            rec[key] = None if v is None or not math.isfinite(float(v)) else float(v)
        records.append(rec)
    return {
        "scenario": s.name,
        "tool_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "quadrature": s.rule.as_dict(),
        "grid_res": s.grid_res,
        "tolerances": {c: s.tolerance(c) for c in s.checks},
        "records": records,
        "overall_pass": all(r["pass"] for r in records),
    }


# --------------------------------------------------------------------------
# report emission


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round(v) for v in obj]
    return obj


def report_to_json(report: dict) -> str:
    return json.dumps(_round(report), indent=2, sort_keys=False) + "\n"


def report_to_table(report: dict) -> str:
    def fmt(v):
        return "-" if v is None else f"{v:.3e}"

    head = f"{'check':<22}{'pass':<6}{'rel_error':>12}{'lhs':>14}{'rhs':>14}{'margin':>12}{'ms':>10}"
    lines = [f"scenario: {report['scenario']}  (kplane {report['tool_version']})", head, "-" * len(head)]
    for r in report["records"]:
        lines.append(f"{r['check']:<22}{('yes' if r['pass'] else 'NO'):<6}{fmt(r['rel_error']):>12}"
                     f"{fmt(r['lhs']):>14}{fmt(r['rhs']):>14}{fmt(r['margin']):>12}{r['runtime_ms']:>10.1f}")
        if r["error"]:
            lines.append(f"    error: {r['error']}")
    lines.append(f"overall: {'PASS' if report['overall_pass'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def emit_report(report: dict, fmt: str = "json", out=None):
    text = report_to_json(report) if fmt == "json" else report_to_table(report)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return text


# --------------------------------------------------------------------------
# canonical examples per family


_EXAMPLES = {
    "segment": dict(plane={"preset": "x_axis"}, checks=["T", "GT", "plancherel", "identity", "adjoint", "y_invariance"],
                    y_samples=[[0.0, 0.0], [0.0, 1.0]]),
    "parabola": dict(plane={"preset": "x_axis"}, checks=["T", "GT", "identity", "adjoint", "y_invariance"],
                     y_samples=[[0.0, y] for y in (0.0, 0.5, -0.5, 1.0, -1.0)]),
    "circle_arc": dict(plane={"preset": "x_axis"}, checks=["T", "GT", "identity", "adjoint", "jacobian_lemma", "jacobian_fd"],
                       y_samples=[[0.0, 0.0], [0.0, 0.5]]),
    "graph": dict(plane={"preset": "x_axis"}, checks=["T", "GT", "identity", "adjoint", "y_invariance"],
                  y_samples=[[0.0, 0.0], [0.0, 0.5]]),
    "helix": dict(plane={"preset": "z_axis"}, checks=["T", "GT"]),
    "helicoid": dict(plane={"preset": "horizontal"}, checks=["T", "GT"], expect={"GT": False}, grid_res=41),
    "paraboloid": dict(plane={"preset": "horizontal"}, checks=["T", "GT", "identity", "y_invariance"],
                       y_samples=[[0.0, t] for t in (0.0, 0.25, 0.5, 1.0)]),
    "product": dict(manifold_params={"factors": [{"family": "segment", "params": {}},
                                                 {"family": "segment", "params": {"angle": 1.5707963267948966}}]},
                    checks=[]),
    "two_caps": dict(plane={"preset": "x_axis"}, checks=["T", "GT", "gt_violation", "gt_profile"],
                     density={"family": "indicator", "params": {}}, expect={"GT": False},
                     y_range=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5]),
}


def example_scenario(family: str) -> Scenario:
    if family not in _EXAMPLES:
        raise KeyError(f"unknown family {family!r}")
    ex = dict(_EXAMPLES[family])
    doc = {"schema_version": SCHEMA_VERSION, "name": f"{family}_example",
           "manifold": {"family": family, "params": ex.pop("manifold_params", {})},
           "quadrature": {"order": 256, "plane_trunc_radius": 30.0, "plane_points_per_axis": 512}}
    doc.update(ex)
    return validate_scenario(doc)
