"""Exact and semi-analytic solvers for special trip-distance laws.

Three families admit reduced dynamics:

* time-independent negative-exponential distances, where the trip count
  obeys the scalar ODE  dlam/dt = f - lam V(lam/L) / B;
* deterministic (single-valued, time-varying) distances, where trips exit
  in an order set by the sign of dBtilde/dz + 1 and the count has closed
  forms on the cumulative-distance axis; and
* constant distances, solved on a z-grid by the recursion
  dtau_j = dz / V(lam_j / L), with the cumulative-flow frames N, T and X.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .demand import EmptyNetwork, InfluxProfile, InitialCondition
from .diagrams import FundamentalDiagram
from .errors import ContractError, DataError, DomainError
from .piecewise import PiecewiseLinear, as_profile
from .solver import (MaxCumulativeDistance, MaxTime, Termination, Trajectory,
                     _assemble, _Buf, reconstruct_profile)


# ---------------------------------------------------------------------------
# Vickrey's exponential model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VickreyConfig:
    """Scalar-ODE model inputs: exponential distances with constant mean B."""

    L: float
    fd: FundamentalDiagram
    B: float
    lambda0: float
    influx: InfluxProfile
    dt: float
    horizon: object
    v_min: float = 1e-9

    def __post_init__(self):
        if not (self.L > 0 and self.B > 0 and self.dt > 0):
            raise DomainError("L, B and dt must be positive")
        if self.lambda0 < 0:
            raise DomainError("lambda0 must be non-negative")
        if not isinstance(self.horizon, (MaxTime, MaxCumulativeDistance)):
            raise DomainError("horizon must be MaxTime or MaxCumulativeDistance")


def solve_vickrey(c: VickreyConfig) -> Trajectory:
    """Forward-Euler march of dlam/dt = f - lam V(lam/L) / B.

    The out-flux column holds lam*v/B; the cumulative out-flow follows from
    conservation of total trips.  Terminates at the horizon or at gridlock
    (v below ``v_min``).
    """
    lam = float(c.lambda0)
    t = 0.0
    z = 0.0
    F = 0.0
    t_l, z_l, lam_l, v_l, F_l, g_l = [0.0], [0.0], [lam], [], [0.0], []
    ent_t, ent_z, ent_m = [], [], []
    termination = Termination.HORIZON
    j = 0
    while True:
        v = float(c.fd.speed(lam / c.L))
        v_l.append(v)
        g_l.append(lam * v / c.B)
        if v < c.v_min:
            termination = Termination.GRIDLOCK
            break
        if isinstance(c.horizon, MaxTime) and t >= c.horizon.T - 1e-12:
            break
        if isinstance(c.horizon, MaxCumulativeDistance) and z >= c.horizon.Z - 1e-12:
            break
        f_t = c.influx.rate(t)
        ent_t.append(t)
        ent_z.append(z)
        ent_m.append(f_t * c.dt)
        lam = lam + c.dt * (f_t - lam * v / c.B)
        lam = max(lam, 0.0)
        z = z + v * c.dt
        F = F + f_t * c.dt
        j += 1
        t = j * c.dt
        t_l.append(t)
        z_l.append(z)
        lam_l.append(lam)
        F_l.append(F)

    t_arr = np.asarray(t_l)
    B = c.B
    survival_fn = lambda ta, ya: np.exp(-np.maximum(ya, 0.0) / B)
    lam0 = float(c.lambda0)
    k0_fn = lambda ya: lam0 * np.exp(-np.maximum(np.asarray(ya, float), 0.0) / B)
    f_arr = c.influx.rate_array(t_arr)
    traj = _assemble(None, "vickrey", t_arr, np.asarray(z_l), np.asarray(lam_l),
                     np.asarray(v_l), np.asarray(F_l),
                     np.asarray(ent_t), np.asarray(ent_z), np.asarray(ent_m),
                     termination, 0.0, None, L=c.L,
                     survival_fn=survival_fn, k0_fn=k0_fn,
                     metadata={"_f_arr": f_arr, "B": B, "dt": c.dt})
    # the Vickrey out-flux lam*v/B replaces the conservation-difference column
    traj.g = np.asarray(g_l)
    return traj


@dataclass
class EquivalenceResult:
    """Deviation of a generalized run from the exponential reduced model."""

    max_profile_deviation: float
    max_lambda_deviation: float


def vickrey_equivalence_check(traj: Trajectory, B: float,
                              influx: Optional[InfluxProfile] = None,
                              fd: Optional[FundamentalDiagram] = None,
                              dt: Optional[float] = None,
                              profile_samples: int = 65) -> EquivalenceResult:
    """Measure how far a generalized run stays from exponential form.

    Returns the maximum over steps of |K(t,x)/lam(t) - exp(-x/B)| on the
    x-grid (steps with no active trips are skipped) and, when ``influx`` and
    ``fd`` are supplied, the maximum |lam - lam_vickrey| against a matched
    scalar-ODE run interpolated onto the trajectory's times.
    """
    if traj.x_grid is None:
        raise ContractError("profile comparison needs a trajectory with a grid")
    ref = np.exp(-traj.x_grid / B)
    if traj.K_history is not None:
        steps = range(traj.n_steps)
        get_row = lambda j: traj.K_history[j]
    else:
        steps = np.unique(np.linspace(0, traj.n_steps - 1,
                                      min(profile_samples, traj.n_steps)).astype(int))
        get_row = lambda j: reconstruct_profile(traj, float(traj.t[j]))
    dev = 0.0
    for j in steps:
        lam = traj.lam[j]
        if lam <= 1e-9 * max(1.0, traj.lam.max()):
            continue
        row = get_row(j) / lam
        dev = max(dev, float(np.max(np.abs(row - ref))))

    lam_dev = float("nan")
    if influx is not None and fd is not None:
        if dt is not None:
            step = dt
        elif traj.t.size > 1:
            step = max(float(np.min(np.diff(traj.t))), 1e-6)
        else:
            step = 1e-3
        vc = VickreyConfig(L=traj.L, fd=fd, B=B, lambda0=float(traj.lam[0]),
                           influx=influx, dt=step,
                           horizon=MaxTime(float(traj.t[-1]) + step))
        ref_run = solve_vickrey(vc)
        lam_ref = np.interp(traj.t, ref_run.t, ref_run.lam)
        lam_dev = float(np.max(np.abs(traj.lam - lam_ref)))
    return EquivalenceResult(max_profile_deviation=dev,
                             max_lambda_deviation=lam_dev)


# ---------------------------------------------------------------------------
# deterministic (single-valued) trip distances
# ---------------------------------------------------------------------------

class SortingRegime(Enum):
    """Exit-order regime from the sign of dBtilde/dz + 1."""

    EQUAL_MINUS_ONE = "all_enterers_exit_together"
    LIFO = "last_in_first_out"
    FIFO = "first_in_first_out"


@dataclass(frozen=True)
class DeterministicConfig:
    """Inputs for the deterministic-distance solvers on a z-grid.

    ``btilde`` is piecewise-linear in time by default; pass
    ``btilde_coordinate="z"`` to specify it directly against the cumulative
    travel distance (useful to realize exact sorting regimes).
    """

    L: float
    fd: FundamentalDiagram
    btilde: object
    influx: InfluxProfile
    dz: float
    horizon: object
    ic: InitialCondition = field(default_factory=EmptyNetwork)
    btilde_coordinate: str = "t"
    v_min: float = 1e-9

    def __post_init__(self):
        if not (self.L > 0 and self.dz > 0):
            raise DomainError("L and dz must be positive")
        if self.btilde_coordinate not in ("t", "z"):
            raise DomainError("btilde_coordinate must be 't' or 'z'")
        pl = as_profile(self.btilde, extend="clamp")
        if np.any(pl.y < 0):
            raise DomainError("btilde must be non-negative")
        object.__setattr__(self, "btilde", pl)
        if not isinstance(self.horizon, (MaxTime, MaxCumulativeDistance)):
            raise DomainError("horizon must be MaxTime or MaxCumulativeDistance")

    def btilde_at(self, t: float, z: float) -> float:
        return float(self.btilde(z if self.btilde_coordinate == "z" else t))


def solve_deterministic(c: DeterministicConfig) -> Trajectory:
    """March the deterministic-distance model on the z-grid.

    Entering mass during each z-cell is logged with its effective distance
    theta = z_entry + Btilde(entry); a trip is active at z exactly while its
    theta exceeds z, which realizes the FIFO / LIFO / simultaneous-exit
    solutions uniformly across regime changes.
    """
    dz = c.dz
    tau = 0.0
    z = 0.0
    k = 0
    lam = float(c.ic.lambda0)
    F_prev = 0.0
    t_l, z_l, lam_l, v_l, F_l = [0.0], [0.0], [lam], [], [0.0]
    ent_t, ent_z = [], []
    theta_buf, mass_buf = _Buf(), _Buf()
    termination = Termination.HORIZON
    while True:
        v = float(c.fd.speed(lam / c.L))
        v_l.append(v)
        if v < c.v_min:
            termination = Termination.GRIDLOCK
            break
        if isinstance(c.horizon, MaxCumulativeDistance) and z >= c.horizon.Z - 1e-12:
            break
        dtau = dz / v
        if isinstance(c.horizon, MaxTime) and tau + dtau > c.horizon.T + 1e-12:
            break
        F_next = c.influx.cumulative(tau + dtau)
        theta = z + c.btilde_at(tau, z)
        ent_t.append(tau)
        ent_z.append(z)
        mass_buf.push(max(F_next - F_prev, 0.0))
        theta_buf.push(theta)
        k += 1
        z = k * dz
        tau = tau + dtau
        F_prev = F_next
        masses = mass_buf.view()
        active = float(np.sum(masses[theta_buf.view() > z + 1e-12]))
        lam = float(c.ic.profile(z)) + active
        t_l.append(tau)
        z_l.append(z)
        lam_l.append(lam)
        F_l.append(F_next)

    t_arr = np.asarray(t_l)
    theta_by_entry = theta_buf.view().copy()
    ez = np.asarray(ent_z)

    def survival_fn(ta, ya):
        # active strictly while age < Btilde(entry); entries are logged in
        # time order, so a reconstruction over the first n entries sees a
        # prefix of the per-entry distances
        ya = np.asarray(ya, dtype=float)
        n = ya.shape[-1] if ya.ndim else theta_by_entry.size
        bt = (theta_by_entry - ez)[:n]
        return np.where(ya < bt, 1.0, 0.0)

    k0_fn = lambda ya: c.ic.profile_array(np.asarray(ya, dtype=float))
    f_arr = c.influx.rate_array(t_arr)
    traj = _assemble(None, "deterministic", t_arr, np.asarray(z_l),
                     np.asarray(lam_l), np.asarray(v_l), np.asarray(F_l),
                     np.asarray(ent_t), ez, mass_buf.view().copy(),
                     termination, 0.0, None, L=c.L,
                     survival_fn=survival_fn, k0_fn=k0_fn,
                     metadata={"_f_arr": f_arr, "dz": dz,
                               "entry_theta": theta_by_entry})
    return traj


def classify_regime(c: DeterministicConfig, traj: Trajectory,
                    tie_tol: float = 1e-9) -> List[Tuple[float, float, SortingRegime]]:
    """Sorting regime per z-interval of a solved run.

    Computed from the sign of dBtilde/dz + 1 on each marching interval,
    with dBtilde/dz = (dBtilde/dt)/v when the profile is given in time.
    Adjacent intervals with the same regime are merged.
    """
    z = traj.z
    out: List[Tuple[float, float, SortingRegime]] = []
    for i in range(z.size - 1):
        if c.btilde_coordinate == "z":
            dbdz = (c.btilde(z[i + 1]) - c.btilde(z[i])) / (z[i + 1] - z[i])
        else:
            dbdt = (c.btilde(traj.t[i + 1]) - c.btilde(traj.t[i])) / (traj.t[i + 1] - traj.t[i])
            dbdz = dbdt / traj.v[i]
        s = dbdz + 1.0
        if abs(s) < tie_tol:
            reg = SortingRegime.EQUAL_MINUS_ONE
        elif s < 0:
            reg = SortingRegime.LIFO
        else:
            reg = SortingRegime.FIFO
        if out and out[-1][2] is reg:
            out[-1] = (out[-1][0], float(z[i + 1]), reg)
        else:
            out.append((float(z[i]), float(z[i + 1]), reg))
    return out


def theta_inverse(traj: Trajectory, z_exit: float, tol: float = 1e-12) -> float:
    """Entry z-coordinate whose effective distance equals ``z_exit``.

    Inverts theta over the logged entries by bisection within the maximal
    monotone segment containing the crossing; raises if theta is not
    monotone there (an internal consistency failure of a declared regime).
    """
    theta = traj.metadata.get("entry_theta")
    if theta is None:
        raise ContractError("trajectory carries no effective-distance log")
    ez = traj.entry_z
    if theta.size < 2:
        raise DomainError("not enough entries to invert")
    crossings = np.where((theta[:-1] - z_exit) * (theta[1:] - z_exit) <= 0)[0]
    if crossings.size == 0:
        raise DomainError("no entry has this effective distance")
    i = int(crossings[0])
    a, b = float(ez[i]), float(ez[i + 1])
    fa, fb = float(theta[i] - z_exit), float(theta[i + 1] - z_exit)
    if fa == 0.0:
        return a
    if fa * fb > 0:
        raise DataError("effective distance is not monotone across the segment")
    pl = PiecewiseLinear([a, b], [theta[i], theta[i + 1]])
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = float(pl(mid)) - z_exit
        if fa * fm <= 0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# constant trip distances on a z-grid
# ---------------------------------------------------------------------------

@dataclass
class TripFrame:
    """Trip-level views of a constant-distance run.

    Wraps the (z, tau, F, G) series of a solved run with the shared distance
    ``Btilde`` and exposes the cumulative count passing a location, per-trip
    positions and passing times, and the travel time of the trip exiting at
    a given instant.
    """

    Btilde: float
    z: np.ndarray
    tau: np.ndarray
    F: np.ndarray
    G: np.ndarray

    def _tau_of_z(self, zq):
        return np.interp(zq, self.z, self.tau)

    def _z_of_t(self, tq):
        return np.interp(tq, self.tau, self.z)

    def _F_of_t(self, tq):
        return np.interp(tq, self.tau, self.F)

    def exit_travel_time(self, t: float) -> float:
        """Travel time of the trip completing at ``t``: t - tau(z(t) - Btilde)."""
        zt = float(self._z_of_t(t))
        if zt < self.Btilde - 1e-12:
            raise DomainError("no trip has completed yet at this time")
        return t - float(self._tau_of_z(zt - self.Btilde))

    def entry_travel_time(self, t: float) -> float:
        """Travel time of the trip entering at ``t``: tau(z(t) + Btilde) - t."""
        zt = float(self._z_of_t(t)) + self.Btilde
        if zt > self.z[-1] + 1e-12:
            raise DomainError("the trip entering at this time does not "
                              "complete within the horizon")
        return float(self._tau_of_z(zt)) - t

    def cumulative_passing(self, t: float, x: float) -> float:
        """Trips that have passed remaining-distance x by time t."""
        if not 0.0 <= x <= self.Btilde + 1e-12:
            raise DomainError("x must lie in [0, Btilde]")
        arg = x + float(self._z_of_t(t)) - self.Btilde
        if arg <= 0.0:
            return 0.0
        return float(self._F_of_t(float(self._tau_of_z(arg))))

    def entry_time(self, rank: float) -> float:
        """Entry time of trip ``rank`` (cumulative count), by inverting F."""
        if rank < 0 or rank > self.F[-1]:
            raise DomainError("rank outside the entered range")
        ff, ii = np.unique(self.F, return_index=True)
        return float(np.interp(rank, ff, self.tau[ii]))

    def position(self, t: float, rank: float) -> float:
        """Remaining distance of trip ``rank`` at time ``t`` (may be <0 or >B)."""
        z_entry = float(self._z_of_t(self.entry_time(rank)))
        return self.Btilde - (float(self._z_of_t(t)) - z_entry)

    def passing_time(self, rank: float, x: float) -> float:
        """Time at which trip ``rank`` reaches remaining distance ``x``."""
        if not 0.0 <= x <= self.Btilde + 1e-12:
            raise DomainError("x must lie in [0, Btilde]")
        z_entry = float(self._z_of_t(self.entry_time(rank)))
        target = z_entry + self.Btilde - x
        if target > self.z[-1] + 1e-12:
            raise DomainError("trip does not reach x within the horizon")
        return float(self._tau_of_z(target))

    def sample_ranks(self, n: int = 200) -> np.ndarray:
        top = float(self.F[-1])
        return np.linspace(0.0, top, n, endpoint=False) + top / (2.0 * n)


def solve_constant_distance(c: DeterministicConfig) -> Tuple[Trajectory, TripFrame]:
    """z-grid recursion for constant trip distance on an initially empty net.

    dtau_j = dz / V(lam_j / L);  F_{j+1} = F_j + dtau_j f_j;
    lam_{j+1} = F_{j+1} - F_{j+1-I}  (I = Btilde/dz cells, 0 before index I).
    Requires an empty initial network and a constant ``btilde`` that is an
    integer multiple of dz.
    """
    if c.ic.lambda0 != 0.0:
        raise ContractError("the constant-distance recursion starts from an "
                            "empty network; use the generalized solver for "
                            "non-empty initial conditions")
    B = float(c.btilde(0.0))
    if c.btilde.x.size > 1 and (np.max(c.btilde.y) != np.min(c.btilde.y)):
        raise ContractError("btilde must be constant for the constant-distance "
                            "solver")
    if not B > 0:
        raise DomainError("btilde must be positive")
    I = B / c.dz
    if abs(I - round(I)) > 1e-9 * max(1.0, I):
        raise DomainError("btilde must be an integer multiple of dz")
    I = int(round(I))

    dz = c.dz
    tau = 0.0
    lam = 0.0
    F_l = [0.0]
    t_l, z_l, lam_l, v_l = [0.0], [0.0], [0.0], []
    ent_t, ent_z, ent_m = [], [], []
    termination = Termination.HORIZON
    j = 0
    while True:
        v = float(c.fd.speed(lam / c.L))
        v_l.append(v)
        if v < c.v_min:
            termination = Termination.GRIDLOCK
            break
        if isinstance(c.horizon, MaxCumulativeDistance) and j * dz >= c.horizon.Z - 1e-12:
            break
        dtau = dz / v
        if isinstance(c.horizon, MaxTime) and tau + dtau > c.horizon.T + 1e-12:
            break
        f_j = c.influx.rate(tau)
        ent_t.append(tau)
        ent_z.append(j * dz)
        ent_m.append(f_j * dtau)
        F_l.append(F_l[-1] + f_j * dtau)
        j += 1
        tau += dtau
        lam = F_l[j] - (F_l[j - I] if j >= I else 0.0)
        t_l.append(tau)
        z_l.append(j * dz)
        lam_l.append(lam)

    t_arr = np.asarray(t_l)
    survival_fn = lambda ta, ya: np.where(np.asarray(ya, float) <= B, 1.0, 0.0)
    k0_fn = lambda ya: np.zeros_like(np.asarray(ya, dtype=float))
    f_arr = c.influx.rate_array(t_arr)
    traj = _assemble(None, "constant_distance", t_arr, np.asarray(z_l),
                     np.asarray(lam_l), np.asarray(v_l), np.asarray(F_l),
                     np.asarray(ent_t), np.asarray(ent_z), np.asarray(ent_m),
                     termination, 0.0, None, L=c.L,
                     survival_fn=survival_fn, k0_fn=k0_fn,
                     metadata={"_f_arr": f_arr, "dz": dz, "Btilde": B})
    frame = TripFrame(Btilde=B, z=traj.z, tau=traj.t, F=traj.F, G=traj.G)
    return traj, frame


@dataclass
class DelayCheckResult:
    max_flow_residual: float
    max_distance_residual: float


def delay_formulation_check(traj: Trajectory, frame: TripFrame,
                            samples: int = 50) -> DelayCheckResult:
    """Residuals of the delay (cumulative-flow) formulation on a solved run.

    At sampled entry times t it checks F(t) = G(t + Y(t)) and that the
    distance covered over the trip duration Y(t) equals Btilde; only times
    whose trips complete within the horizon are sampled.
    """
    B = frame.Btilde
    t_hi = float(frame.tau[-1])
    ok = frame.z + B <= frame.z[-1] + 1e-12
    if not np.any(ok):
        return DelayCheckResult(0.0, 0.0)
    t_max = float(frame.tau[np.where(ok)[0][-1]])
    ts = np.linspace(0.0, t_max, samples)
    r_flow = 0.0
    r_dist = 0.0
    for t in ts:
        try:
            Y = frame.entry_travel_time(float(t))
        except DomainError:
            continue
        zt = float(np.interp(t, frame.tau, frame.z))
        z_exit = float(np.interp(t + Y, frame.tau, frame.z))
        Ft = float(np.interp(t, frame.tau, frame.F))
        Gt = float(np.interp(t + Y, frame.tau, frame.G))
        r_flow = max(r_flow, abs(Ft - Gt))
        r_dist = max(r_dist, abs((z_exit - zt) - B))
    return DelayCheckResult(max_flow_residual=r_flow,
                            max_distance_residual=r_dist)
