"""Problem-instance data model, validation, and file loading.

An instance bundles the zone geometry (distances, travel speed), the demand
side (spatial weights, a total-demand curve over the strategic horizon, and
the request origin-destination pattern), the two crowdsourced-driver
profiles, per-option costs, the turnover model, and the strategic-level
configuration. Matrices in instance files may carry rounded values; row
sums are checked against a coarse tolerance and then renormalized exactly,
so every loaded instance satisfies the strict row-stochastic invariants.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .errors import OutOfHorizon, ParseError, ValidationError

# printed instance data is trusted to this tolerance before renormalizing
RAW_SUM_TOL = 0.05


@dataclass(frozen=True)
class CostModel:
    fd_per_km: float
    gw_per_km: float
    od_per_request: float
    penalty_per_request: float


@dataclass(frozen=True)
class CdProfile:
    intensity: np.ndarray        # share of this type's arrivals per zone, sums to 1
    active_share: float          # fraction of the pool arriving within one ops horizon
    route_pattern: np.ndarray    # row-stochastic destination pattern


@dataclass(frozen=True)
class TurnoverModel:
    p_fd: float
    p_gw: float
    p_od: float
    q_gw: float
    q_od: float
    matching_sensitive: bool = False
    p_high: float = 1.0
    p_low: float = 0.01


@dataclass(frozen=True)
class StrategicConfig:
    horizon: int                 # decisions at t = 0..horizon
    gamma: float
    fd_wage_per_hour: float
    hours_per_ops_horizon: float
    ops_horizons_per_step: int   # the K multiplier
    severance: float | None      # None: firing prohibited
    max_fd: int
    max_gw: int
    max_od: int

    @property
    def firing_allowed(self) -> bool:
        return self.severance is not None

    @property
    def fd_wage_per_horizon(self) -> float:
        return self.fd_wage_per_hour * self.hours_per_ops_horizon


@dataclass(frozen=True)
class DemandCurve:
    """Total requests per hour as a function of the strategic step."""

    kind: str                    # constant | geometric | peak
    total: float                 # constant/peak base, or the value at t = horizon
    growth_per_step: float = 1.0
    peak_amplitude: float = 0.5
    peak_decay: float = 0.1
    peak_center: float = 13.0

    def total_at(self, t: int, horizon: int) -> float:
        if self.kind == "constant":
            return self.total
        if self.kind == "geometric":
            return self.total / self.growth_per_step ** (horizon - t)
        if self.kind == "peak":
            bump = self.peak_amplitude * np.exp(-self.peak_decay * (t - self.peak_center) ** 2)
            return self.total * (1.0 + bump)
        raise ValidationError(f"demand_curve.kind: unknown kind {self.kind!r}")


@dataclass(eq=False)
class Instance:
    name: str
    zones: int
    distance_km: np.ndarray
    speed_kmh: float
    request_pattern: np.ndarray
    demand_weights: np.ndarray
    demand_curve: DemandCurve
    cost_model: CostModel
    gw_profile: CdProfile
    od_profile: CdProfile
    turnover: TurnoverModel
    strategic: StrategicConfig
    # per-instance solver caches (identity-keyed, see fluid.py)
    _caches: dict = field(default_factory=dict, repr=False)

    @property
    def service_rate(self) -> np.ndarray:
        """mu_ij = speed / distance, per-route service rates in 1/h."""
        return self.speed_kmh / self.distance_km

    @property
    def horizon(self) -> int:
        return self.strategic.horizon

    def replace_params(self, **kw) -> "Instance":
        """New validated instance with selected sub-config fields replaced.

        Keys may address nested fields as e.g. ``turnover.q_gw`` or
        ``cost_model.gw_per_km``; top-level array/scalar fields by name.
        """
        parts = {
            "cost_model": self.cost_model,
            "turnover": self.turnover,
            "strategic": self.strategic,
            "demand_curve": self.demand_curve,
            "gw_profile": self.gw_profile,
            "od_profile": self.od_profile,
        }
        top = {}
        for key, value in kw.items():
            if "." in key:
                group, name = key.split(".", 1)
                if group not in parts:
                    raise ValidationError(f"unknown parameter group {group!r}")
                parts[group] = replace(parts[group], **{name: value})
            else:
                top[key] = value
        return make_instance(
            name=top.get("name", self.name),
            distance_km=top.get("distance_km", self.distance_km),
            speed_kmh=top.get("speed_kmh", self.speed_kmh),
            request_pattern=top.get("request_pattern", self.request_pattern),
            demand_weights=top.get("demand_weights", self.demand_weights),
            demand_curve=parts["demand_curve"],
            cost_model=parts["cost_model"],
            gw_profile=parts["gw_profile"],
            od_profile=parts["od_profile"],
            turnover=parts["turnover"],
            strategic=parts["strategic"],
        )


def _as_matrix(value, zones, where):
    try:
        mat = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: not a numeric matrix") from exc
    if mat.shape != (zones, zones):
        raise ValidationError(f"{where}: expected {zones}x{zones}, got {mat.shape}")
    return mat


def _normalized_rows(mat, where):
    if np.any(mat < 0) or np.any(mat > 1 + RAW_SUM_TOL):
        raise ValidationError(f"{where}: entries must lie in [0, 1]")
    sums = mat.sum(axis=1)
    bad = np.abs(sums - 1.0) > RAW_SUM_TOL
    if np.any(bad):
        row = int(np.argmax(bad))
        raise ValidationError(f"{where}: row {row} sums to {sums[row]:.4f}, expected 1")
    return mat / sums[:, None]


def _normalized_vector(vec, where):
    v = np.asarray(vec, dtype=float)
    if v.ndim != 1:
        raise ValidationError(f"{where}: expected a vector")
    if np.any(v < 0):
        raise ValidationError(f"{where}: entries must be nonnegative")
    s = v.sum()
    if abs(s - 1.0) > RAW_SUM_TOL:
        raise ValidationError(f"{where}: sums to {s:.4f}, expected 1")
    return v / s


def make_instance(name, distance_km, speed_kmh, request_pattern, demand_weights,
                  demand_curve, cost_model, gw_profile, od_profile, turnover,
                  strategic) -> Instance:
    """Validate raw pieces and assemble an immutable Instance."""
    r = np.asarray(distance_km, dtype=float)
    zones = r.shape[0]
    if r.shape != (zones, zones):
        raise ValidationError(f"distance_km: must be square, got {r.shape}")
    if np.any(r <= 0):
        i, j = np.unravel_index(int(np.argmax(r <= 0)), r.shape)
        raise ValidationError(f"distance_km: r[{i}][{j}] must be > 0")
    if speed_kmh <= 0:
        raise ValidationError("speed_kmh: must be > 0")

    p_r = _normalized_rows(_as_matrix(request_pattern, zones, "request_pattern"),
                           "request_pattern")
    weights = _normalized_vector(demand_weights, "demand_weights")
    if weights.shape != (zones,):
        raise ValidationError("demand_weights: length must equal zone count")

    def check_profile(p: CdProfile, label):
        intensity = _normalized_vector(p.intensity, f"{label}.intensity")
        if intensity.shape != (zones,):
            raise ValidationError(f"{label}.intensity: length must equal zone count")
        route = _normalized_rows(_as_matrix(p.route_pattern, zones, f"{label}.route_pattern"),
                                 f"{label}.route_pattern")
        if not 0 < p.active_share <= 1:
            raise ValidationError(f"{label}.active_share: must be in (0, 1]")
        return CdProfile(intensity=intensity, active_share=float(p.active_share),
                         route_pattern=route)

    gw = check_profile(gw_profile, "gw_profile")
    od = check_profile(od_profile, "od_profile")

    cm = cost_model
    if cm.fd_per_km >= cm.gw_per_km:
        raise ValidationError(
            "cost_model: fd_per_km must be strictly below gw_per_km "
            f"({cm.fd_per_km} >= {cm.gw_per_km})")
    max_r = float(r.max())
    if cm.fd_per_km * max_r >= cm.od_per_request:
        raise ValidationError(
            "cost_model: fd cost on the longest route must stay below od_per_request")
    if cm.fd_per_km * max_r >= cm.penalty_per_request:
        raise ValidationError(
            "cost_model: fd cost on the longest route must stay below the penalty")

    tm = turnover
    for label, p in (("p_fd", tm.p_fd), ("p_gw", tm.p_gw), ("p_od", tm.p_od),
                     ("q_gw", tm.q_gw), ("q_od", tm.q_od),
                     ("p_high", tm.p_high), ("p_low", tm.p_low)):
        if not 0 <= p <= 1:
            raise ValidationError(f"turnover.{label}: must be in [0, 1]")
    if tm.p_low > tm.p_high:
        raise ValidationError("turnover: p_low must not exceed p_high")

    sc = strategic
    if sc.horizon < 1:
        raise ValidationError("strategic.horizon: must be >= 1")
    if not 0 < sc.gamma <= 1:
        raise ValidationError("strategic.gamma: must be in (0, 1]")
    if sc.ops_horizons_per_step < 1:
        raise ValidationError("strategic.ops_horizons_per_step: must be >= 1")
    if sc.hours_per_ops_horizon <= 0:
        raise ValidationError("strategic.hours_per_ops_horizon: must be > 0")
    if min(sc.max_fd, sc.max_gw, sc.max_od) < 0:
        raise ValidationError("strategic caps must be >= 0")
    if sc.severance is not None and sc.severance < 0:
        raise ValidationError("strategic.severance: must be >= 0 or null")

    return Instance(
        name=str(name), zones=zones, distance_km=r, speed_kmh=float(speed_kmh),
        request_pattern=p_r, demand_weights=weights, demand_curve=demand_curve,
        cost_model=cm, gw_profile=gw, od_profile=od, turnover=tm, strategic=sc)


def _require(doc, key, where="document"):
    if key not in doc:
        raise ParseError(f"{where}: missing required key {key!r}")
    return doc[key]


def load_instance(source) -> Instance:
    """Load and validate an instance from a YAML document.

    ``source`` is a path, an open file, or a YAML string. Intensity and
    route-pattern fields accept the aliases ``demand`` (copy the demand
    weights) and ``request`` (copy the request pattern).
    """
    import os
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, os.PathLike) or ("\n" not in str(source)
                                             and os.path.exists(str(source))):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = str(source)
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a mapping")

    zones = int(_require(doc, "zones"))
    weights = _require(doc, "demand_weights")
    p_r = _require(doc, "request_pattern")

    def resolve(value, kind, where):
        if isinstance(value, str):
            if kind == "intensity" and value == "demand":
                return weights
            if kind == "route" and value == "request":
                return p_r
            raise ParseError(f"{where}: unknown alias {value!r}")
        return value

    def profile(key):
        p = _require(doc, key)
        return CdProfile(
            intensity=np.asarray(resolve(_require(p, "intensity", key), "intensity",
                                         f"{key}.intensity"), dtype=float),
            active_share=float(_require(p, "active_share", key)),
            route_pattern=np.asarray(resolve(_require(p, "route_pattern", key), "route",
                                             f"{key}.route_pattern"), dtype=float))

    dc = _require(doc, "demand_curve")
    kind = _require(dc, "kind", "demand_curve")
    if kind == "constant":
        curve = DemandCurve(kind="constant", total=float(_require(dc, "total", "demand_curve")))
    elif kind == "geometric":
        curve = DemandCurve(kind="geometric",
                            total=float(_require(dc, "total_at_horizon", "demand_curve")),
                            growth_per_step=float(_require(dc, "growth_per_step", "demand_curve")))
    elif kind == "peak":
        curve = DemandCurve(kind="peak", total=float(_require(dc, "total", "demand_curve")),
                            peak_amplitude=float(dc.get("amplitude", 0.5)),
                            peak_decay=float(dc.get("decay", 0.1)),
                            peak_center=float(dc.get("center", 13.0)))
    else:
        raise ValidationError(f"demand_curve.kind: unknown kind {kind!r}")

    cm_doc = _require(doc, "cost_model")
    cost = CostModel(
        fd_per_km=float(_require(cm_doc, "fd_per_km", "cost_model")),
        gw_per_km=float(_require(cm_doc, "gw_per_km", "cost_model")),
        od_per_request=float(_require(cm_doc, "od_per_request", "cost_model")),
        penalty_per_request=float(_require(cm_doc, "penalty_per_request", "cost_model")))

    tm_doc = _require(doc, "turnover")
    turnover = TurnoverModel(
        p_fd=float(_require(tm_doc, "p_fd", "turnover")),
        p_gw=float(_require(tm_doc, "p_gw", "turnover")),
        p_od=float(_require(tm_doc, "p_od", "turnover")),
        q_gw=float(_require(tm_doc, "q_gw", "turnover")),
        q_od=float(_require(tm_doc, "q_od", "turnover")),
        matching_sensitive=bool(tm_doc.get("matching_sensitive", False)),
        p_high=float(tm_doc.get("p_high", 1.0)),
        p_low=float(tm_doc.get("p_low", 0.01)))

    sc_doc = _require(doc, "strategic")
    sev = sc_doc.get("severance", None)
    strategic = StrategicConfig(
        horizon=int(_require(sc_doc, "horizon", "strategic")),
        gamma=float(sc_doc.get("gamma", 1.0)),
        fd_wage_per_hour=float(_require(sc_doc, "fd_wage_per_hour", "strategic")),
        hours_per_ops_horizon=float(_require(sc_doc, "hours_per_ops_horizon", "strategic")),
        ops_horizons_per_step=int(sc_doc.get("ops_horizons_per_step", 1)),
        severance=None if sev is None else float(sev),
        max_fd=int(_require(sc_doc, "max_fd", "strategic")),
        max_gw=int(_require(sc_doc, "max_gw", "strategic")),
        max_od=int(_require(sc_doc, "max_od", "strategic")))

    inst = make_instance(
        name=doc.get("name", "instance"),
        distance_km=_as_matrix(_require(doc, "distance_km"), zones, "distance_km"),
        speed_kmh=float(_require(doc, "speed_kmh")),
        request_pattern=p_r, demand_weights=weights, demand_curve=curve,
        cost_model=cost, gw_profile=profile("gw_profile"),
        od_profile=profile("od_profile"), turnover=turnover, strategic=strategic)
    if inst.zones != zones:
        raise ValidationError("zones: does not match matrix dimensions")
    return inst


_BUILTIN = {}


def builtin_grubhub_instance() -> Instance:
    """The bundled 18-zone metropolitan food-delivery instance."""
    if "grubhub18" not in _BUILTIN:
        ref = importlib.resources.files("fleetplan.data").joinpath("grubhub18.inst")
        _BUILTIN["grubhub18"] = load_instance(ref.read_text(encoding="utf-8"))
    return _BUILTIN["grubhub18"]


def demand_rates(inst: Instance, t: int) -> np.ndarray:
    """Per-zone request arrival rates (requests/hour) at strategic step t."""
    if not 0 <= t <= inst.horizon:
        raise OutOfHorizon(f"t={t} outside [0, {inst.horizon}]")
    return inst.demand_curve.total_at(t, inst.horizon) * inst.demand_weights


def cd_arrival_rates(inst: Instance, n_gw: int, n_od: int):
    """Hourly arrival-rate vectors of active gig workers and occasional drivers."""
    lam_gw = n_gw * inst.gw_profile.active_share * inst.gw_profile.intensity
    lam_od = n_od * inst.od_profile.active_share * inst.od_profile.intensity
    return lam_gw, lam_od


def cost_matrices(inst: Instance):
    """Per-request cost matrices ($) for FD, GW, OD and penalty options."""
    r = inst.distance_km
    cm = inst.cost_model
    c_fd = cm.fd_per_km * r
    c_gw = cm.gw_per_km * r
    c_od = np.full_like(r, cm.od_per_request)
    c_pen = np.full_like(r, cm.penalty_per_request)
    return c_fd, c_gw, c_od, c_pen
