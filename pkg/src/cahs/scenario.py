"""Scenario configs: schema, validation, construction and the verification checks."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from dataclasses import field as dc_field

import numpy as np
from jsonschema import Draft202012Validator

from .base_manifold import (AnalyticDistance, EuclideanFlat, Grid, Hyperplane, RoundSphere2,
                            SphereShell, SphericalCurve)
from .errors import DomainError, OutOfRegionError, SingularPointError
from .fmm import GridLevelSet, distance_fmm
from .hypersurface import (CylinderSurface, GraphSurface, SliceSurface, export_mesh,
                           integral_curve_T, measured_angle, shape_operator_fd)
from .transnormal import TransnormalBuilder, TransnormalField, transnormal_residual
from .verify import classify_minimal_ca
from .warp import Interval, WarpedProduct, WarpingProfile

log = logging.getLogger("cahs")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_VEC = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 3}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


def _check(extra=None):
    props = {"enabled": {"type": "boolean"}, "tol": _POS}
    props.update(extra or {})
    return _obj(props)


CONFIG_SCHEMA = _obj({
    "profile": _obj({
        "kind": {"enum": ["constant", "reciprocal", "linear_over_sin", "samples"]},
        "value": _POS,
        "theta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 3.141592653589793},
        "csv": {"type": "string"},
        "interval": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    }, ["kind"]),
    "base": _obj({
        "kind": {"enum": ["euclidean", "sphere"]},
        "dimension": {"type": "integer", "minimum": 1, "maximum": 3},
        "radius": _POS,
    }, ["kind"]),
    "seed": _obj({
        "kind": {"enum": ["hyperplane", "sphere", "great_circle", "point", "mask_file"]},
        "normal": _VEC,
        "offset": _NUM,
        "center": _VEC,
        "radius": _POS,
        "pole": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
        "point": _VEC,
        "path": {"type": "string"},
        "orientation": {"enum": [-1, 1]},
    }, ["kind"]),
    "theta": _NUM,
    "C": _NUM,
    "s0": _NUM,
    "side": {"enum": ["positive", "both"]},
    "surface": {"enum": ["graph", "cylinder", "slice"]},
    "distance": _obj({
        "method": {"enum": ["analytic", "fmm"]},
        "grid_n": {"type": "integer", "minimum": 3},
        "init_radius": _POS,
    }),
    "sampling": _obj({
        "lo": _VEC,
        "hi": _VEC,
        "n_samples": {"type": "integer", "minimum": 1},
        "shape_samples": {"type": "integer", "minimum": 0},
        "curves": {"type": "integer", "minimum": 0},
        "curve_length": _NUM,
        "curve_step": _POS,
        "mesh_resolution": {"type": "array", "items": {"type": "integer", "minimum": 2},
                            "minItems": 2, "maxItems": 2},
        "height_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
    }),
    "checks": _obj({
        "angle": _check(),
        "transnormal": _check(),
        "principal_direction": _check({"lambda_tol": _NUM}),
        "geodesic": _check(),
        "minimality": _check({"expect": {"type": "string"}, "angle_tol": _NUM}),
    }),
    "random_seed": {"type": "integer", "minimum": 0},
    "example": {"type": "string"},
}, ["profile", "base", "seed"])


class ConfigError(ValueError):
    """Invalid scenario configuration; ``errors`` lists ``(path, message)`` pairs."""

    def __init__(self, errors):
        self.errors = errors
        super().__init__("; ".join(f"{p}: {m}" for p, m in errors))


def _path(err):
    return "/".join(str(x) for x in err.absolute_path) or "<root>"


def validate_config(cfg):
    """Schema check plus cross-field rules; raises :class:`ConfigError`."""
    errors = [(_path(e), e.message) for e in
              sorted(Draft202012Validator(CONFIG_SCHEMA).iter_errors(cfg), key=lambda e: list(e.path))]
    if errors:
        raise ConfigError(errors)
    surface = cfg.get("surface", "graph")
    if surface == "graph" and ("theta" in cfg) == ("C" in cfg):
        if "theta" in cfg:
            if abs(cfg["C"] - math.tan(cfg["theta"])) > 1e-12 * max(1.0, abs(cfg["C"])):
                errors.append(("C", "C must equal tan(theta) when both are given"))
        else:
            errors.append(("theta", "give exactly one of theta and C"))
    prof = cfg["profile"]
    need = {"constant": "value", "linear_over_sin": "theta", "samples": "csv"}.get(prof["kind"])
    if need and need not in prof:
        errors.append((f"profile/{need}", f"required for kind {prof['kind']!r}"))
    base = cfg["base"]
    if base["kind"] == "euclidean" and "dimension" not in base:
        errors.append(("base/dimension", "required for a euclidean base"))
    seed = cfg["seed"]
    req = {"hyperplane": ["normal"], "sphere": ["center", "radius"], "great_circle": ["pole"],
           "point": ["point"], "mask_file": ["path"]}[seed["kind"]]
    for key in req:
        if key not in seed:
            errors.append((f"seed/{key}", f"required for seed kind {seed['kind']!r}"))
    dim = base.get("dimension", 2) if base["kind"] == "euclidean" else 3
    for key in ("normal", "center", "point"):
        if key in seed and len(seed[key]) != dim:
            errors.append((f"seed/{key}", f"needs {dim} components"))
    if seed["kind"] == "great_circle" and base["kind"] != "sphere":
        errors.append(("seed/kind", "great_circle seeds need a sphere base"))
    method = cfg.get("distance", {}).get("method", "analytic")
    if method == "fmm" and base["kind"] != "euclidean":
        errors.append(("distance/method", "fast marching runs on euclidean bases only"))
    if seed["kind"] in ("point", "mask_file") and method != "fmm":
        errors.append(("distance/method", f"seed kind {seed['kind']!r} needs method 'fmm'"))
    samp = cfg.get("sampling", {})
    if base["kind"] == "euclidean":
        for key in ("lo", "hi"):
            if key in samp and len(samp[key]) != dim:
                errors.append((f"sampling/{key}", f"needs {dim} components"))
    if errors:
        raise ConfigError(errors)
    return cfg


# ---------------------------------------------------------------------------
# construction

@dataclass
class Scenario:
    cfg: dict
    profile: WarpingProfile
    ambient: WarpedProduct
    seed: object
    distance: object = None
    builder: TransnormalBuilder | None = None
    field: TransnormalField | None = None
    surface: object = None
    grid: Grid | None = None
    rng: np.random.Generator = None
    notes: list = dc_field(default_factory=list)

    @property
    def grid_based(self):
        return self.grid is not None


def _profile(section):
    iv = section.get("interval")
    kind = section["kind"]
    if kind == "constant":
        return WarpingProfile.constant(section["value"], Interval(*iv) if iv else None)
    if kind == "reciprocal":
        return WarpingProfile.reciprocal()
    if kind == "linear_over_sin":
        return WarpingProfile.linear_over_sin(section["theta"])
    return WarpingProfile.from_csv(section["csv"])


def _base(section):
    if section["kind"] == "sphere":
        return RoundSphere2(section.get("radius", 1.0))
    return EuclideanFlat(section["dimension"])


def _seed(section, base):
    kind = section["kind"]
    orient = section.get("orientation", 1)
    if kind == "hyperplane":
        return Hyperplane(np.asarray(section["normal"], float), section.get("offset", 0.0), orient)
    if kind == "sphere":
        return SphereShell(np.asarray(section["center"], float), section["radius"], orient)
    if kind == "great_circle":
        return SphericalCurve.great_circle(section["pole"], base.radius, orientation=orient)
    return None


def _box(cfg, dim):
    samp = cfg.get("sampling", {})
    lo = np.asarray(samp.get("lo", [-1.0] * dim), float)
    hi = np.asarray(samp.get("hi", [1.0] * dim), float)
    return lo, hi


def build_scenario(cfg, seed=None) -> Scenario:
    validate_config(cfg)
    rs = cfg.get("random_seed", 0) if seed is None else seed
    profile = _profile(cfg["profile"])
    base = _base(cfg["base"])
    ambient = WarpedProduct(profile, base)
    sc = Scenario(cfg, profile, ambient, _seed(cfg["seed"], base), rng=np.random.default_rng(rs))
    method = cfg.get("distance", {}).get("method", "analytic")
    if method == "analytic":
        sc.distance = AnalyticDistance(sc.seed, base)
    else:
        lo, hi = _box(cfg, base.dimension)
        n = cfg["distance"].get("grid_n", 257)
        if cfg["seed"]["kind"] == "mask_file":
            from .io import read_mask
            level = read_mask(cfg["seed"]["path"])
            sc.grid = level.grid
        else:
            sc.grid = Grid.box(lo, hi, n)
            if cfg["seed"]["kind"] == "point":
                level = GridLevelSet.from_point(sc.grid, cfg["seed"]["point"],
                                                cfg["distance"].get("init_radius"))
            else:
                level = GridLevelSet.from_analytic(sc.grid, sc.seed)
        sc.distance = distance_fmm(level)
        log.info("fast marching on %s nodes", sc.grid.shape)
    surface = cfg.get("surface", "graph")
    if surface == "graph":
        sc.builder = TransnormalBuilder(profile, C=cfg.get("C"), s0=cfg.get("s0", 1.0),
                                        theta=cfg.get("theta"))
        sc.field = TransnormalField(sc.builder, sc.distance, cfg.get("side", "positive"))
        sc.surface = GraphSurface(sc.field, ambient)
    elif surface == "cylinder":
        if sc.seed is None:
            raise ConfigError([("surface", "cylinders need an analytic seed")])
        sc.surface = CylinderSurface(sc.seed, ambient)
    else:
        sc.surface = SliceSurface(cfg.get("s0", 1.0), ambient)
    return sc


# ---------------------------------------------------------------------------
# sampling

def _random_base_points(sc, n, margin=0.0):
    base = sc.ambient.base
    if isinstance(base, RoundSphere2):
        p = sc.rng.normal(size=(n, 3))
        return base.radius * p / np.linalg.norm(p, axis=1, keepdims=True)
    lo, hi = _box(sc.cfg, base.dimension)
    pad = margin * (hi - lo)
    return sc.rng.uniform(lo + pad, hi - pad, size=(n, base.dimension))


def _usable(sc, p):
    """Point inside the field's validity region and on the evaluated side."""
    try:
        if sc.field is not None:
            sc.field.value(p)
            sc.field.gradient(p)
        if sc.distance is not None and hasattr(sc.distance, "grid"):
            if not sc.distance.is_valid(p):
                return False
        elif sc.distance is not None:
            d = sc.distance.value(p)
            if not np.isfinite(d):
                return False
    except (DomainError, OutOfRegionError, SingularPointError, ValueError):
        return False
    return True


def _height(sc, i, n):
    rng = sc.cfg.get("sampling", {}).get("height_range")
    dom = sc.profile.domain
    if rng is None:
        lo = dom.lo if math.isfinite(dom.lo) else -1.0
        hi = dom.hi if math.isfinite(dom.hi) else lo + 2.0
        s0 = sc.cfg.get("s0", 1.0)
        rng = (max(lo, s0 - 0.5), min(hi, s0 + 0.5))
        if not rng[0] < rng[1] or not dom.contains(rng[0]):
            rng = (s0, s0 + 0.5)
    return rng[0] + (rng[1] - rng[0]) * (i + 0.5) / n


def sample_params(sc, n, margin=0.05):
    """``n`` surface parameters drawn with the scenario's generator."""
    out = []
    tries = 0
    surf = sc.cfg.get("surface", "graph")
    while len(out) < n and tries < 50 * n + 100:
        tries += 1
        p = _random_base_points(sc, 1, margin)[0]
        if surf == "graph":
            if _usable(sc, p):
                out.append(p)
        elif surf == "cylinder":
            q = sc.surface._project_base(p)
            out.append(np.r_[_height(sc, len(out), n), q])
        else:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# checks

def _result(name, value, tol, passed=None, **extra):
    ok = bool(value <= tol) if passed is None else bool(passed)
    out = {"check": name, "value": value, "tol": tol, "passed": ok, "skipped": False}
    out.update(extra)
    return out


def _skip(name, reason):
    return {"check": name, "passed": True, "skipped": True, "reason": reason}


def _enabled(cfg, name):
    return cfg.get("checks", {}).get(name, {}).get("enabled", True)


def _tol(cfg, name, default, key="tol"):
    return cfg.get("checks", {}).get(name, {}).get(key, default)


def expected_theta(sc):
    surf = sc.cfg.get("surface", "graph")
    if surf == "cylinder":
        return math.pi / 2
    if surf == "slice":
        return 0.0
    return sc.builder.theta


def run_checks(sc) -> dict:
    """Run every enabled check; returns the report sections."""
    cfg = sc.cfg
    samp = cfg.get("sampling", {})
    n = samp.get("n_samples", 1000)
    params = sample_params(sc, n)
    grid_tol = 5 * sc.grid.h if sc.grid_based else None
    report = {}
    surf = cfg.get("surface", "graph")
    th0 = expected_theta(sc)

    # angle statistics
    if _enabled(cfg, "angle"):
        thetas = []
        for p in params:
            x = sc.surface.position(p)
            thetas.append(measured_angle(sc.ambient, x, sc.surface.normal(p)))
        thetas = np.array(thetas)
        tol = _tol(cfg, "angle", grid_tol if grid_tol else 1e-8)
        spread = float(np.ptp(thetas)) if thetas.size else math.nan
        dev = float(np.max(np.abs(thetas - th0))) if thetas.size else math.nan
        report["angle"] = _result("angle", max(spread, abs(float(np.mean(thetas)) - th0)), tol,
                                  samples=int(thetas.size), mean=float(np.mean(thetas)),
                                  spread=spread, max_deviation=dev, expected=th0)
    else:
        report["angle"] = _skip("angle", "disabled in config")

    # transnormal residual
    if not _enabled(cfg, "transnormal"):
        report["transnormal"] = _skip("transnormal", "disabled in config")
    elif sc.field is None:
        report["transnormal"] = _skip("transnormal", f"{surf} surfaces carry no transnormal field")
    else:
        stats = transnormal_residual(sc.field, sc.profile, sc.builder.C, np.array(params))
        tol = _tol(cfg, "transnormal", grid_tol if grid_tol else 1e-8)
        report["transnormal"] = _result("transnormal", stats.max, tol, mean=stats.mean,
                                        samples=len(params))

    k = samp.get("shape_samples", 20)
    sub = params[:k]
    # principal direction / shape operator
    if not _enabled(cfg, "principal_direction"):
        report["principal_direction"] = _skip("principal_direction", "disabled in config")
    elif sc.grid_based:
        report["principal_direction"] = _skip(
            "principal_direction", "grid fields are first-order; second derivatives are not resolved")
    elif not sub:
        report["principal_direction"] = _skip("principal_direction", "no samples")
    else:
        tol = _tol(cfg, "principal_direction", 1e-4)
        ltol = _tol(cfg, "principal_direction", 1e-4, "lambda_tol")
        ang, lam, asym = [], [], []
        for p in sub:
            e = shape_operator_fd(sc.surface, p)
            asym.append(e.asymmetry)
            if e.T_angle is not None:
                ang.append(e.T_angle)
                scale = max(abs(e.expected_lambda_T), 1.0)
                lam.append(abs(e.lambda_T - e.expected_lambda_T) / scale)
            else:
                # theta = 0: A = -(rho'/rho) I
                kx = -float(sc.profile.log_derivative(e.sample.t))
                lam.append(float(np.max(np.abs(e.principal_curvatures - kx))) / max(abs(kx), 1.0))
        a = max(ang, default=0.0)
        l_ = max(lam, default=0.0)
        report["principal_direction"] = _result(
            "principal_direction", a, tol, passed=a <= tol and l_ <= ltol,
            lambda_error=l_, lambda_tol=ltol, max_asymmetry=max(asym), samples=len(sub))

    # geodesic T-curves
    nc = samp.get("curves", 2)
    if not _enabled(cfg, "geodesic"):
        report["geodesic"] = _skip("geodesic", "disabled in config")
    elif sc.grid_based:
        report["geodesic"] = _skip("geodesic", "grid fields are first-order; accelerations are not resolved")
    elif surf == "slice":
        report["geodesic"] = _skip("geodesic", "T is undefined on slices")
    elif nc == 0:
        report["geodesic"] = _skip("geodesic", "no curves requested")
    else:
        tol = _tol(cfg, "geodesic", 1e-4)
        tang, normal, truncated = [], [], 0
        for p in sub[:nc]:
            cr = integral_curve_T(sc.surface, p, samp.get("curve_length", 1.0),
                                  samp.get("curve_step", 1e-3))
            truncated += cr.truncated
            tang.append(cr.max_tangential)
            normal.append(cr.max_normal_error)
        v = max(tang)
        report["geodesic"] = _result("geodesic", v, tol, normal_error=max(normal),
                                     curves=len(tang), truncated=truncated)

    # minimality
    if not _enabled(cfg, "minimality"):
        report["minimality"] = _skip("minimality", "disabled in config")
    elif sc.profile.kind != "constant":
        report["minimality"] = _skip("minimality", "classification needs a Euclidean ambient")
    elif sc.grid_based:
        report["minimality"] = _skip("minimality", "grid fields are first-order")
    else:
        tol = _tol(cfg, "minimality", 1e-6)
        res = classify_minimal_ca(sc.surface, sub or params[:5], tol,
                                  _tol(cfg, "minimality", 1e-8, "angle_tol"))
        expect = cfg.get("checks", {}).get("minimality", {}).get("expect")
        out = res.to_dict()
        report["minimality"] = {"check": "minimality", "skipped": False, "verdict": res.verdict,
                                "expected": expect, "tol": tol,
                                "passed": expect is None or expect == res.verdict,
                                "details": out}
    return report


def mesh_for(sc, resolution=None):
    """Mesh over the sampling box (2-dimensional surfaces only), or ``None``."""
    if sc.surface.dim != 2:
        return None
    samp = sc.cfg.get("sampling", {})
    res = tuple(samp.get("mesh_resolution", resolution or (32, 32)))
    surf = sc.cfg.get("surface", "graph")
    base = sc.ambient.base
    if isinstance(base, RoundSphere2):
        ur, vr = (1e-3, math.pi - 1e-3), (0.0, 2 * math.pi)
    else:
        lo, hi = _box(sc.cfg, 2)
        ur, vr = (lo[0], hi[0]), (lo[1], hi[1])
    if surf == "cylinder":
        ur = (_height(sc, 0, 1) - 0.5, _height(sc, 0, 1) + 0.5)
        ur = (max(ur[0], sc.profile.domain.lo + 1e-6), ur[1])
        if isinstance(sc.seed, SphereShell):
            vr = (0.0, 2 * math.pi)
        elif isinstance(sc.seed, Hyperplane):
            vr = (-1.0, 1.0)
        else:
            vr = (0.0, 2 * math.pi)
    attrs = None
    if sc.field is not None:
        prof, C = sc.profile, sc.builder.C
        field_ = sc.field

        def residual(param, x):
            g = np.linalg.norm(field_.gradient(param))
            return abs(g - C * float(prof(x[0]))) / (C * float(prof(x[0])))

        attrs = {"transnormal_residual": residual}
    return export_mesh(sc.surface, ur, vr, res, attrs)
