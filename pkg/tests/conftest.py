"""Shared instance factories for the test suite."""

import numpy as np
import pytest

from fleetplan.instance import (CdProfile, CostModel, DemandCurve, StrategicConfig,
                                TurnoverModel, make_instance)


def single_zone_instance(lam=10.0, r=1.0, speed=19.0, curve=None, zeta_gw=1.0,
                         zeta_od=0.125, max_fd=50, max_gw=200, max_od=200,
                         q_gw=0.09, q_od=0.09, p=0.01, severance=None,
                         wage=20.0, hours=50 / 60, horizon=3, gamma=1.0,
                         matching_sensitive=False):
    one = np.array([[1.0]])
    return make_instance(
        name="single",
        distance_km=np.array([[r]]),
        speed_kmh=speed,
        request_pattern=one,
        demand_weights=np.array([1.0]),
        demand_curve=curve or DemandCurve(kind="constant", total=lam),
        cost_model=CostModel(fd_per_km=0.34, gw_per_km=0.7, od_per_request=5.0,
                             penalty_per_request=10.0),
        gw_profile=CdProfile(intensity=np.array([1.0]), active_share=zeta_gw,
                             route_pattern=one),
        od_profile=CdProfile(intensity=np.array([1.0]), active_share=zeta_od,
                             route_pattern=one),
        turnover=TurnoverModel(p_fd=p, p_gw=p, p_od=p, q_gw=q_gw, q_od=q_od,
                               matching_sensitive=matching_sensitive),
        strategic=StrategicConfig(horizon=horizon, gamma=gamma, fd_wage_per_hour=wage,
                                  hours_per_ops_horizon=hours, ops_horizons_per_step=1,
                                  severance=severance, max_fd=max_fd, max_gw=max_gw,
                                  max_od=max_od))


def two_zone_instance(lam=20.0, horizon=3, max_fd=30, max_gw=30, max_od=30,
                      q_gw=0.09, q_od=0.09, p=0.01, severance=None, gamma=1.0,
                      curve=None, zeta_od=0.5):
    p_r = np.array([[0.5, 0.5], [0.25, 0.75]])
    dist = np.array([[1.0, 3.0], [3.0, 1.0]])
    uniform = np.full((2, 2), 0.5)
    return make_instance(
        name="two-zone",
        distance_km=dist,
        speed_kmh=19.0,
        request_pattern=p_r,
        demand_weights=np.array([0.5, 0.5]),
        demand_curve=curve or DemandCurve(kind="constant", total=lam),
        cost_model=CostModel(fd_per_km=0.34, gw_per_km=0.7, od_per_request=5.0,
                             penalty_per_request=10.0),
        gw_profile=CdProfile(intensity=np.array([0.5, 0.5]), active_share=1.0,
                             route_pattern=p_r),
        od_profile=CdProfile(intensity=np.array([0.4, 0.6]), active_share=zeta_od,
                             route_pattern=uniform),
        turnover=TurnoverModel(p_fd=p, p_gw=p, p_od=p, q_gw=q_gw, q_od=q_od),
        strategic=StrategicConfig(horizon=horizon, gamma=gamma, fd_wage_per_hour=20.0,
                                  hours_per_ops_horizon=50 / 60, ops_horizons_per_step=1,
                                  severance=severance, max_fd=max_fd, max_gw=max_gw,
                                  max_od=max_od))


def tiny_instance(**kw):
    """Two zones, caps 4 per driver type, short horizon: enumerable exactly."""
    kw.setdefault("lam", 8.0)
    kw.setdefault("horizon", 3)
    kw.setdefault("max_fd", 4)
    kw.setdefault("max_gw", 4)
    kw.setdefault("max_od", 4)
    kw.setdefault("q_gw", 0.3)
    kw.setdefault("q_od", 0.2)
    kw.setdefault("p", 0.1)
    return two_zone_instance(**kw)


def desk_instance(total_at_horizon=150.0, growth=1.003, q_gw=0.3, max_fd=28,
                  max_gw=30, horizon=26, curve_kind="geometric"):
    """Six-zone gig-worker-only instance sized for exact enumeration."""
    centers = [(1, 1), (3, 1), (5, 1), (1, 3), (3, 3), (5, 3)]
    dist = np.empty((6, 6))
    for i, (xi, yi) in enumerate(centers):
        for j, (xj, yj) in enumerate(centers):
            d = np.hypot(xi - xj, yi - yj)
            dist[i, j] = d if d > 0 else 1.0
    p_r = np.array([
        [0.50, 0.30, 0.00, 0.20, 0.00, 0.00],
        [0.10, 0.40, 0.30, 0.00, 0.20, 0.00],
        [0.00, 0.30, 0.50, 0.00, 0.00, 0.20],
        [0.25, 0.00, 0.00, 0.50, 0.25, 0.00],
        [0.00, 0.20, 0.00, 0.20, 0.40, 0.20],
        [0.00, 0.00, 0.30, 0.00, 0.30, 0.40],
    ])
    weights = np.array([0.10, 0.25, 0.05, 0.15, 0.30, 0.15])
    if curve_kind == "geometric":
        curve = DemandCurve(kind="geometric", total=total_at_horizon,
                            growth_per_step=growth)
    elif curve_kind == "constant":
        curve = DemandCurve(kind="constant", total=total_at_horizon)
    else:
        curve = DemandCurve(kind="peak", total=total_at_horizon,
                            peak_center=horizon / 2)
    uniform = np.full((6, 6), 1 / 6)
    return make_instance(
        name="desk6",
        distance_km=dist,
        speed_kmh=19.0,
        request_pattern=p_r,
        demand_weights=weights,
        demand_curve=curve,
        cost_model=CostModel(fd_per_km=0.34, gw_per_km=0.7, od_per_request=5.0,
                             penalty_per_request=10.0),
        gw_profile=CdProfile(intensity=weights, active_share=1.0, route_pattern=p_r),
        od_profile=CdProfile(intensity=np.full(6, 1 / 6), active_share=0.125,
                             route_pattern=uniform),
        turnover=TurnoverModel(p_fd=0.01, p_gw=0.01, p_od=0.01, q_gw=q_gw, q_od=0.0),
        strategic=StrategicConfig(horizon=horizon, gamma=1.0, fd_wage_per_hour=20.0,
                                  hours_per_ops_horizon=50 / 60, ops_horizons_per_step=1,
                                  severance=None, max_fd=max_fd, max_gw=max_gw,
                                  max_od=0))


@pytest.fixture(scope="session")
def grubhub():
    from fleetplan.instance import builtin_grubhub_instance
    return builtin_grubhub_instance()
