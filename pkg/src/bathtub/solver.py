"""Forward solvers for the reservoir model of network trip flows.

The master state is K(t, x), the number of active trips at time t whose
remaining distance is at least x.  Two equivalent first-order schemes are
provided:

* a characteristic scheme marching the K profile on a fixed x-grid with the
  adaptive time step dt_j = dx / v_j, so the cumulative travel distance z
  advances exactly one cell per step; and
* a difference-integration scheme marching (z, lambda) on a fixed time step,
  with lambda rebuilt each step from the initial profile and the logged
  entering masses.

Both schemes truncate trip distances at the grid limit X: a trip longer
than X behaves as if its distance were X, and the affected mass is reported
in ``Trajectory.truncated_mass``.  Survival functions and the initial
profile are evaluated, at off-grid arguments, by linear interpolation
between exact evaluations at the bracketing grid nodes, which keeps the two
schemes and :func:`reconstruct_K` mutually consistent at first order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np

from .demand import DistanceDistribution, EmptyNetwork, InfluxProfile, InitialCondition
from .diagrams import FundamentalDiagram
from .errors import ContractError, DataError, DomainError, UndefinedStatisticsError
from .piecewise import PiecewiseLinear


class Termination(Enum):
    HORIZON = "HorizonReached"
    GRIDLOCK = "Gridlock"


@dataclass(frozen=True)
class MaxTime:
    """Stop when the simulated clock reaches T hours."""
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("horizon time must be positive")


@dataclass(frozen=True)
class MaxCumulativeDistance:
    """Stop when the cumulative travel distance z reaches Z miles."""
    Z: float

    def __post_init__(self):
        if not self.Z > 0:
            raise DomainError("horizon distance must be positive")


Horizon = object  # MaxTime | MaxCumulativeDistance


@dataclass(frozen=True)
class GridSpec:
    """Remaining-distance grid and stopping rule.

    ``X`` must be an integer multiple of ``dx``; ``dt`` is only consumed by
    the fixed-step (integral) scheme.  When ``strict_truncation`` is set, a
    run aborts if the mass of trips capped at X exceeds
    ``truncation_tolerance`` times the total entering trips.
    """

    dx: float
    X: float
    horizon: Horizon
    dt: Optional[float] = None
    v_min: float = 1e-9
    strict_truncation: bool = False
    truncation_tolerance: float = 1e-6

    def __post_init__(self):
        if not self.dx > 0:
            raise DomainError("dx must be positive")
        if not self.X > 0:
            raise DomainError("X must be positive")
        n = self.X / self.dx
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise DomainError("X must be an integer multiple of dx")
        if self.dt is not None and not self.dt > 0:
            raise DomainError("dt must be positive")
        if not isinstance(self.horizon, (MaxTime, MaxCumulativeDistance)):
            raise DomainError("horizon must be MaxTime or MaxCumulativeDistance")

    @property
    def cells(self) -> int:
        return int(round(self.X / self.dx))

    def x_nodes(self) -> np.ndarray:
        return np.arange(self.cells + 1) * self.dx


@dataclass(frozen=True)
class Scenario:
    """A complete solvable problem: supply, demand, initial state, grid."""

    L: float
    fd: FundamentalDiagram
    influx: InfluxProfile
    distances: DistanceDistribution
    grid: GridSpec
    ic: InitialCondition = field(default_factory=EmptyNetwork)

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError("lane-miles L must be positive")


@dataclass
class BathtubState:
    """One snapshot of the reservoir: counts over the remaining-distance grid."""

    t: float
    z: float
    lam: float
    v: float
    x_grid: np.ndarray
    K: np.ndarray


@dataclass
class RemainingStats:
    mean: float
    survival: np.ndarray
    density_at_zero: float


@dataclass
class Trajectory:
    """A solved run: aligned series, the entering-mass log, and metadata.

    ``entry_z`` holds, per logged entry, the cumulative-distance coordinate
    from which that mass ages in the discrete dynamics, so that
    :func:`reconstruct_K` reproduces the scheme's own K values exactly.
    """

    scheme: str
    L: float
    t: np.ndarray
    z: np.ndarray
    lam: np.ndarray
    v: np.ndarray
    f: np.ndarray
    F: np.ndarray
    g: np.ndarray
    G: np.ndarray
    entry_t: np.ndarray
    entry_z: np.ndarray
    entry_mass: np.ndarray
    termination: Termination
    truncated_mass: float
    x_grid: Optional[np.ndarray] = None
    K_history: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)
    survival_fn: Optional[Callable] = None
    k0_fn: Optional[Callable] = None

    @property
    def n_steps(self) -> int:
        return self.t.size

    @property
    def series(self) -> dict:
        return {"t": self.t, "z": self.z, "lambda": self.lam, "v": self.v,
                "f": self.f, "F": self.F, "g": self.g, "G": self.G}

    def state(self, j: int) -> BathtubState:
        if self.x_grid is None:
            raise ContractError("this trajectory does not carry a distance grid")
        if self.K_history is not None:
            K = self.K_history[j]
        else:
            K = reconstruct_profile(self, float(self.t[j]))
        return BathtubState(t=float(self.t[j]), z=float(self.z[j]),
                            lam=float(self.lam[j]), v=float(self.v[j]),
                            x_grid=self.x_grid, K=np.asarray(K, dtype=float))

    def states(self):
        for j in range(self.n_steps):
            yield self.state(j)

    def time_to_distance(self, Z: float) -> float:
        """Time at which z first reaches Z, by linear interpolation."""
        if Z > self.z[-1] + 1e-12:
            raise DomainError(f"z never reaches {Z} within the horizon")
        zz, idx = np.unique(self.z, return_index=True)
        return float(np.interp(Z, zz, self.t[idx]))

    def z_at(self, t: float) -> float:
        return float(np.interp(t, self.t, self.z))


# ---------------------------------------------------------------------------
# capped grid-node evaluation
# ---------------------------------------------------------------------------

def _survival_capped_lin(dist: DistanceDistribution, t_arr, y_arr, dx: float,
                         cells: int) -> np.ndarray:
    """Survival at distance offsets ``y``, interpolated between grid nodes.

    Node values are exact evaluations of the distribution's survival; the
    node at x = X (= cells*dx) is forced to zero, which caps every trip's
    distance at X exactly as the characteristic update does.
    """
    t = np.asarray(t_arr, dtype=float)
    y = np.asarray(y_arr, dtype=float)
    k = np.floor(y / dx + 1e-9).astype(np.int64)
    th = np.clip(y / dx - k, 0.0, None)
    lo_ok = (k >= 0) & (k <= cells - 1)
    hi_ok = (k + 1 <= cells - 1)
    xlo = np.where(lo_ok, k, 0) * dx
    xhi = np.where(hi_ok, k + 1, 0) * dx
    slo = np.where(lo_ok, dist.survival_array(t, xlo), 0.0)
    shi = np.where(hi_ok, dist.survival_array(t, xhi), 0.0)
    return np.where(lo_ok, (1.0 - th) * slo + th * shi, 0.0)


def _profile_capped_lin(nodes: np.ndarray, y_arr, dx: float) -> np.ndarray:
    """Initial-profile node values interpolated at offsets ``y``, 0 beyond X."""
    y = np.asarray(y_arr, dtype=float)
    I = nodes.size - 1
    k = np.floor(y / dx + 1e-9).astype(np.int64)
    th = np.clip(y / dx - k, 0.0, None)
    inside = (k >= 0) & (y <= I * dx + 1e-9 * dx)
    klo = np.clip(k, 0, I)
    khi = np.clip(k + 1, 0, I)
    vlo = nodes[klo]
    vhi = np.where(k + 1 <= I, nodes[khi], 0.0)
    return np.where(inside, (1.0 - th) * vlo + th * vhi, 0.0)


# ---------------------------------------------------------------------------
# characteristic scheme
# ---------------------------------------------------------------------------

def solve_characteristic(s: Scenario) -> Trajectory:
    """March K on the x-grid along characteristics (z advances dx per step).

    Update: K_i^{j+1} = K_{i+1}^j + f(t_j) * S(t_j, i dx) * dt_j with
    dt_j = dx / v_j.  Terminates at the horizon, or with
    ``Termination.GRIDLOCK`` once v drops below ``grid.v_min``.
    """
    grid = s.grid
    dx, I = grid.dx, grid.cells
    x_nodes = grid.x_nodes()
    K = s.ic.profile_array(x_nodes).astype(float)
    _check_profile(K)

    t_list = [0.0]
    lam_list = [float(K[0])]
    v_list: List[float] = []
    K_rows = [K.copy()]
    ent_t: List[float] = []
    ent_z: List[float] = []
    ent_m: List[float] = []
    F_list = [0.0]
    truncated = float(s.ic.tail_beyond(grid.X))

    t = 0.0
    j = 0
    termination = Termination.HORIZON
    while True:
        lam = float(K[0])
        v = float(s.fd.speed(lam / s.L))
        v_list.append(v)
        if v < grid.v_min:
            termination = Termination.GRIDLOCK
            break
        if isinstance(grid.horizon, MaxCumulativeDistance):
            if j * dx >= grid.horizon.Z - 1e-12:
                break
        dt = dx / v
        if isinstance(grid.horizon, MaxTime):
            if t + dt > grid.horizon.T + 1e-12:
                break
        f_t = s.influx.rate(t)
        mass = f_t * dt
        inflow = mass * s.distances.survival_array(t, x_nodes[:-1])
        K[:-1] = K[1:] + inflow
        K[-1] = 0.0
        _check_profile(K)
        truncated += mass * float(s.distances.tail_beyond(t, grid.X))
        ent_t.append(t)
        ent_z.append((j + 1) * dx)
        ent_m.append(mass)
        F_list.append(F_list[-1] + mass)
        t += dt
        j += 1
        t_list.append(t)
        lam_list.append(float(K[0]))
        K_rows.append(K.copy())

    t_arr = np.asarray(t_list)
    lam_arr = np.asarray(lam_list)
    z_arr = np.arange(t_arr.size) * dx
    F_arr = np.asarray(F_list)
    traj = _assemble(s, "characteristic", t_arr, z_arr, lam_arr,
                     np.asarray(v_list), F_arr,
                     np.asarray(ent_t), np.asarray(ent_z), np.asarray(ent_m),
                     termination, truncated, x_nodes,
                     K_history=np.asarray(K_rows))
    return traj


def _check_profile(K: np.ndarray):
    neg = K < 0
    if np.any(neg):
        if np.min(K) < -1e-12:
            raise DataError("count profile went negative beyond tolerance")
        K[neg] = 0.0


# ---------------------------------------------------------------------------
# difference-integration scheme (shared marcher)
# ---------------------------------------------------------------------------

class _Commodity:
    def __init__(self, influx, distances, ic, grid: GridSpec):
        self.influx = influx
        self.distances = distances
        self.ic = ic
        self.grid = grid
        self.k0_nodes = ic.profile_array(grid.x_nodes()).astype(float)


class _Buf:
    """Append-only float buffer backed by a doubling numpy array."""

    def __init__(self, cap: int = 1024):
        self.a = np.empty(cap)
        self.n = 0

    def push(self, v: float):
        if self.n == self.a.size:
            self.a = np.concatenate([self.a, np.empty(self.a.size)])
        self.a[self.n] = v
        self.n += 1

    def view(self) -> np.ndarray:
        return self.a[:self.n]


def _march_integral(L: float, dt: float, horizon, coms: Sequence[_Commodity],
                    speed_of: Callable, v_min: float):
    """Fixed-step marcher shared by the single-commodity, mobility-service
    and multi-commodity solvers.  ``speed_of(t, lam, f, g)`` returns the
    per-commodity speed vector from the joint state.
    """
    M = len(coms)
    lam = np.array([c.ic.lambda0 for c in coms], dtype=float)
    lam0 = lam.copy()
    z = np.zeros(M)
    Fc = np.zeros(M)
    g_prev = np.zeros(M)

    t_buf = _Buf()
    t_buf.push(0.0)
    z_bufs = [_Buf() for _ in range(M)]
    lam_bufs = [_Buf() for _ in range(M)]
    v_bufs = [_Buf() for _ in range(M)]
    F_bufs = [_Buf() for _ in range(M)]
    ent_t = _Buf()
    ent_z = [_Buf() for _ in range(M)]
    ent_m = [_Buf() for _ in range(M)]
    truncated = [float(c.ic.tail_beyond(c.grid.X)) for c in coms]
    for m in range(M):
        z_bufs[m].push(0.0)
        lam_bufs[m].push(lam[m])
        F_bufs[m].push(0.0)

    t = 0.0
    j = 0
    termination = Termination.HORIZON
    while True:
        f_vec = np.array([c.influx.rate(t) for c in coms])
        v_vec = np.asarray(speed_of(t, lam, f_vec, g_prev), dtype=float)
        for m in range(M):
            v_bufs[m].push(v_vec[m])
        if np.any(v_vec < v_min):
            termination = Termination.GRIDLOCK
            break
        if isinstance(horizon, MaxTime) and t >= horizon.T - 1e-12:
            break
        if isinstance(horizon, MaxCumulativeDistance) and z[0] >= horizon.Z - 1e-12:
            break

        z_new = z + v_vec * dt
        ent_t.push(t)
        lam_new = np.empty(M)
        for m in range(M):
            c = coms[m]
            ent_z[m].push(z[m])
            ent_m[m].push(f_vec[m] * dt)
            truncated[m] += f_vec[m] * dt * float(c.distances.tail_beyond(t, c.grid.X))
            ages = z_new[m] - ent_z[m].view()
            surv = _survival_capped_lin(c.distances, ent_t.view(), ages,
                                        c.grid.dx, c.grid.cells)
            boundary = float(np.dot(ent_m[m].view(), surv))
            initial = float(_profile_capped_lin(c.k0_nodes, z_new[m], c.grid.dx))
            lam_new[m] = initial + boundary
        Fc = Fc + f_vec * dt
        g_prev = ((lam0 + Fc - lam_new) - (lam0 + (Fc - f_vec * dt) - lam)) / dt
        lam = lam_new
        z = z_new
        j += 1
        t = j * dt
        t_buf.push(t)
        for m in range(M):
            z_bufs[m].push(z[m])
            lam_bufs[m].push(lam[m])
            F_bufs[m].push(Fc[m])

    t_arr = t_buf.view().copy()
    runs = []
    for m in range(M):
        runs.append((t_arr, z_bufs[m].view().copy(), lam_bufs[m].view().copy(),
                     v_bufs[m].view().copy(), F_bufs[m].view().copy(),
                     ent_t.view().copy(), ent_z[m].view().copy(),
                     ent_m[m].view().copy(), truncated[m]))
    return runs, termination


def _assemble(s: Optional[Scenario], scheme: str, t, z, lam, v, F,
              ent_t, ent_z, ent_m, termination, truncated, x_grid,
              K_history=None, L=None, survival_fn=None, k0_fn=None,
              metadata=None) -> Trajectory:
    L = s.L if s is not None else L
    lam0 = lam[0]
    G = lam0 + F - lam
    if t.size > 1:
        dT = np.diff(t)
        g = np.empty_like(t)
        g[:-1] = np.diff(G) / dT
        g[-1] = g[-2] if t.size > 2 else g[0]
    else:
        g = np.zeros_like(t)
    if s is not None:
        f_arr = s.influx.rate_array(t)
        dx, cells = s.grid.dx, s.grid.cells
        if survival_fn is None:
            survival_fn = lambda ta, ya: _survival_capped_lin(s.distances, ta, ya, dx, cells)
        if k0_fn is None:
            nodes = s.ic.profile_array(s.grid.x_nodes()).astype(float)
            k0_fn = lambda ya: _profile_capped_lin(nodes, ya, dx)
        meta = {"dx": s.grid.dx, "X": s.grid.X, "horizon": s.grid.horizon,
                "termination": termination.value, "demand": s.distances,
                "ic": s.ic}
        if s.grid.strict_truncation:
            total_in = lam0 + F[-1]
            if truncated > s.grid.truncation_tolerance * max(total_in, 1.0):
                raise DataError(
                    f"{truncated:.6g} trips were capped at the grid limit X, "
                    f"more than the allowed fraction of the {total_in:.6g} total")
    else:
        f_arr = metadata.pop("_f_arr")
        meta = {"termination": termination.value}
    if metadata:
        meta.update(metadata)
    return Trajectory(scheme=scheme, L=L, t=t, z=z, lam=lam, v=v, f=f_arr,
                      F=F, g=g, G=G, entry_t=ent_t, entry_z=ent_z,
                      entry_mass=ent_m, termination=termination,
                      truncated_mass=truncated, x_grid=x_grid,
                      K_history=K_history, survival_fn=survival_fn,
                      k0_fn=k0_fn, metadata=meta)


def solve_integral(s: Scenario) -> Trajectory:
    """March (z, lambda) on a fixed time step via the integral form.

    Each step evaluates lambda as the surviving initial trips plus the sum of
    the logged entering masses weighted by their survival at the distance
    already traveled since entry.  Requires ``grid.dt``.
    """
    if s.grid.dt is None:
        raise DomainError("solve_integral requires grid.dt")
    com = _Commodity(s.influx, s.distances, s.ic, s.grid)
    speed_of = lambda t, lam, f, g: np.array([s.fd.speed(lam[0] / s.L)])
    runs, termination = _march_integral(s.L, s.grid.dt, s.grid.horizon,
                                        [com], speed_of, s.grid.v_min)
    (t, z, lam, v, F, et, ez, em, trunc) = runs[0]
    return _assemble(s, "integral", t, z, lam, v, F, et, ez, em,
                     termination, trunc, s.grid.x_nodes())


def solve_mobility_service(s: Scenario, speed_relation,
                           vehicle_density=None) -> Trajectory:
    """Fixed-step march with speed from an extended relation.

    ``speed_relation`` exposes ``speed(rho, lam, f, g)``; ``vehicle_density``
    is an exogenous profile of per-lane vehicle density (callable or
    :class:`PiecewiseLinear`); when omitted the trip density lam/L is fed
    back, which reduces to :func:`solve_integral` when the relation ignores
    (f, g).  The out-flux enters the speed evaluation lagged one step.
    """
    if s.grid.dt is None:
        raise DomainError("solve_mobility_service requires grid.dt")
    if vehicle_density is None:
        rho_of = None
    elif isinstance(vehicle_density, PiecewiseLinear):
        rho_of = vehicle_density
    elif callable(vehicle_density):
        rho_of = vehicle_density
    else:
        raise ContractError("vehicle_density must be callable or PiecewiseLinear")

    def speed_of(t, lam, f, g):
        rho = lam[0] / s.L if rho_of is None else float(rho_of(t))
        if rho < 0:
            raise DomainError("vehicle density must be non-negative")
        return np.array([speed_relation.speed(rho, lam[0], f[0], max(g[0], 0.0))])

    com = _Commodity(s.influx, s.distances, s.ic, s.grid)
    runs, termination = _march_integral(s.L, s.grid.dt, s.grid.horizon,
                                        [com], speed_of, s.grid.v_min)
    (t, z, lam, v, F, et, ez, em, trunc) = runs[0]
    return _assemble(s, "mobility_service", t, z, lam, v, F, et, ez, em,
                     termination, trunc, s.grid.x_nodes())


@dataclass(frozen=True)
class CommodityDemand:
    influx: InfluxProfile
    distances: DistanceDistribution
    ic: InitialCondition = field(default_factory=EmptyNetwork)


def solve_multi_commodity(L: float, commodities: Sequence[CommodityDemand],
                          speed_relations: Sequence[Callable],
                          grid: GridSpec) -> List[Trajectory]:
    """Advance several trip commodities on a shared fixed time grid.

    ``speed_relations[m]`` is a callable ``rel(lam_vec, f_vec, g_vec)``
    giving commodity m's speed from the joint state (out-fluxes lagged one
    step).  With a single commodity whose relation depends only on its own
    density this reproduces :func:`solve_integral` exactly.
    """
    if grid.dt is None:
        raise DomainError("solve_multi_commodity requires grid.dt")
    M = len(commodities)
    if M < 1:
        raise DomainError("at least one commodity is required")
    if len(speed_relations) != M:
        raise DomainError("one speed relation per commodity is required")
    if M > 1 and not isinstance(grid.horizon, MaxTime):
        raise ContractError("multi-commodity runs require a MaxTime horizon")
    coms = [_Commodity(c.influx, c.distances, c.ic, grid) for c in commodities]

    def speed_of(t, lam, f, g):
        return np.array([rel(lam, f, np.maximum(g, 0.0)) for rel in speed_relations])

    runs, termination = _march_integral(L, grid.dt, grid.horizon, coms,
                                        speed_of, grid.v_min)
    out = []
    for m, c in enumerate(commodities):
        (t, z, lam, v, F, et, ez, em, trunc) = runs[m]
        s = Scenario(L=L, fd=_RelationDiagram(speed_relations[m], m),
                     influx=c.influx, distances=c.distances, grid=grid, ic=c.ic)
        out.append(_assemble(s, "multi_commodity", t, z, lam, v, F, et, ez, em,
                             termination, trunc, grid.x_nodes()))
    return out


class _RelationDiagram(FundamentalDiagram):
    """Placeholder diagram for multi-commodity trajectories; speed queries on
    it are meaningless because the commodity's speed depends on the joint
    state, so it raises if evaluated."""

    def __init__(self, rel, m):
        self._rel = rel
        self._m = m

    def _speed(self, rho):
        raise ContractError("multi-commodity speed depends on the joint state")


# ---------------------------------------------------------------------------
# reconstruction and derived views
# ---------------------------------------------------------------------------

def reconstruct_K(traj: Trajectory, t: float, x) -> float:
    """K(t, x) rebuilt from the initial profile and the entering-mass log.

    Exact with respect to the discrete dynamics of the scheme that produced
    the trajectory; ``t`` between stored steps interpolates z linearly.
    """
    if traj.survival_fn is None or traj.k0_fn is None:
        raise ContractError("trajectory does not support K reconstruction")
    if t < traj.t[0] - 1e-12 or t > traj.t[-1] + 1e-12:
        raise DomainError("t outside the solved range")
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xx = np.asarray(x, dtype=float)
    if np.any(xx < 0):
        raise DomainError("x must be non-negative")
    z_t = float(np.interp(t, traj.t, traj.z))
    # an entry logged at time s materializes in the state strictly after s,
    # so the state at t carries exactly the entries with s < t
    sel = traj.entry_t < t - 1e-12
    out = traj.k0_fn(xx + z_t)
    if np.any(sel):
        et = traj.entry_t[sel]
        ez = traj.entry_z[sel]
        em = traj.entry_mass[sel]
        ages = xx[..., None] + (z_t - ez)
        surv = traj.survival_fn(et, ages)
        out = out + surv @ em
    return float(out) if scalar else out


def reconstruct_profile(traj: Trajectory, t: float) -> np.ndarray:
    """K(t, x) over the trajectory's x-grid."""
    if traj.x_grid is None:
        raise ContractError("trajectory does not carry a distance grid")
    return np.asarray(reconstruct_K(traj, t, traj.x_grid), dtype=float)


def outflux_series(traj: Trajectory) -> np.ndarray:
    """Completion rate g(t) from differences of the conserved cumulative G."""
    return traj.g.copy()


def outflux_from_profile(traj: Trajectory, max_points: int = 2048) -> np.ndarray:
    """Diagnostic out-flux estimator k(t,0+) * v from the K profile.

    For trajectories without a stored profile history the profile is
    reconstructed on at most ``max_points`` evenly spaced steps (NaN
    elsewhere).
    """
    if traj.x_grid is None:
        raise ContractError("trajectory does not carry a distance grid")
    dx = float(traj.x_grid[1] - traj.x_grid[0])
    if traj.K_history is not None:
        k0 = (traj.K_history[:, 0] - traj.K_history[:, 1]) / dx
        return k0 * traj.v
    out = np.full(traj.n_steps, np.nan)
    idx = np.unique(np.linspace(0, traj.n_steps - 1, min(max_points, traj.n_steps)).astype(int))
    for j in idx:
        K0, K1 = reconstruct_K(traj, float(traj.t[j]), np.array([0.0, dx]))
        out[j] = (K0 - K1) / dx * traj.v[j]
    return out


def remaining_distance_stats(state: BathtubState) -> RemainingStats:
    """Mean remaining distance, survival profile and density at zero.

    Undefined on an empty network (lam = 0).
    """
    if state.lam <= 0:
        raise UndefinedStatisticsError("no active trips: remaining-distance "
                                       "statistics are undefined")
    Phi = state.K / state.lam
    dx = float(state.x_grid[1] - state.x_grid[0])
    mean = float(np.trapezoid(Phi, state.x_grid))
    phi0 = float((state.K[0] - state.K[1]) / (state.lam * dx))
    return RemainingStats(mean=mean, survival=Phi, density_at_zero=phi0)
