"""Blade-element-momentum rotor model.

Maps blade geometry plus an operating point (inflow speed v, rotor speed
omega) to fluid-induced torque, power coefficient, and rotor inertia. The
per-section root solve lives in :mod:`hktccd.kernels`; this module owns the
domain types, the default airfoil polar, file ingestion, and the
tip-speed-ratio torque table used by the simulator.
"""

import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import BemSolverError, ConfigError, InputDomainError

# Config-overridable physical defaults. The fluid is riverine water; the
# blades are treated as solid aluminum 6061 with a fixed thickness ratio and
# an area factor for the foil cross-section.
WATER_DENSITY = 1000.0      # kg/m^3
MATERIAL_DENSITY = 2700.0   # kg/m^3
THICKNESS_RATIO = 0.15
AREA_FACTOR = 0.6
BETZ_LIMIT = 16.0 / 27.0

OMEGA_FLOOR = 1e-3  # rad/s, avoids the TSR singularity at standstill


@dataclass(frozen=True)
class FluidEnvironment:
    """Working-fluid properties."""

    density: float = WATER_DENSITY

    def __post_init__(self):
        if not self.density > 0:
            raise ConfigError("fluid density must be positive")


@dataclass(frozen=True)
class AirfoilPolar:
    """Lift/drag tables on an ascending angle-of-attack grid in degrees.

    The grid must span [-180, 180] so the section solver never extrapolates.
    """

    alpha_deg: np.ndarray
    cl: np.ndarray
    cd: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha_deg, dtype=float)
        cl = np.asarray(self.cl, dtype=float)
        cd = np.asarray(self.cd, dtype=float)
        if not (a.shape == cl.shape == cd.shape) or a.ndim != 1 or a.size < 2:
            raise ConfigError("polar grids must be equal-length 1-D, size >= 2")
        if np.any(np.diff(a) <= 0):
            raise ConfigError("polar alpha grid must be strictly ascending")
        if a[0] > -180.0 or a[-1] < 180.0:
            raise ConfigError("polar alpha grid must cover [-180, 180] deg")
        if np.any(cd < 0):
            raise ConfigError("polar cd must be non-negative")
        object.__setattr__(self, "alpha_deg", a)
        object.__setattr__(self, "cl", cl)
        object.__setattr__(self, "cd", cd)


@dataclass(frozen=True)
class BladeGeometry:
    """Per-segment blade description plus rotor-level constants.

    Twist is stored in degrees (file convention); radians only inside the
    kernels. This is the plant design vector of the co-design problem.
    """

    hub_radius: float
    tip_radius: float
    num_blades: int
    r_mid: np.ndarray
    dr: np.ndarray
    chord: np.ndarray
    twist_deg: np.ndarray

    CHORD_MIN = 0.01
    CHORD_MAX = 1.0
    TWIST_MAX_DEG = 30.0

    def __post_init__(self):
        r = np.asarray(self.r_mid, dtype=float)
        dr = np.asarray(self.dr, dtype=float)
        c = np.asarray(self.chord, dtype=float)
        tw = np.asarray(self.twist_deg, dtype=float)
        n = r.size
        if n < 1 or not (dr.shape == c.shape == tw.shape == r.shape):
            raise ConfigError("segment arrays must be equal-length, size >= 1")
        if not (self.tip_radius > self.hub_radius > 0):
            raise ConfigError("need tip_radius > hub_radius > 0")
        if self.num_blades < 1:
            raise ConfigError("need at least one blade")
        if np.any(np.diff(r) <= 0):
            raise ConfigError("r_mid must be strictly increasing")
        if not self.hub_radius < r[0]:
            raise ConfigError("hub_radius must lie inboard of the first segment")
        if r[-1] + dr[-1] / 2 > self.tip_radius + 1e-9:
            raise ConfigError("outermost segment extends past the tip radius")
        if np.any(c <= self.CHORD_MIN) or np.any(c > self.CHORD_MAX):
            raise ConfigError(
                f"chords must satisfy {self.CHORD_MIN} < c <= {self.CHORD_MAX} m")
        if np.any(np.abs(tw) > self.TWIST_MAX_DEG):
            raise ConfigError(f"twist must lie within +/-{self.TWIST_MAX_DEG} deg")
        object.__setattr__(self, "r_mid", r)
        object.__setattr__(self, "dr", dr)
        object.__setattr__(self, "chord", c)
        object.__setattr__(self, "twist_deg", tw)

    @property
    def n_segments(self):
        return self.r_mid.size

    @property
    def twist_rad(self):
        return np.deg2rad(self.twist_deg)

    def with_design(self, chord, twist_deg):
        """Copy with replaced chord/twist (the optimizer's update path)."""
        return BladeGeometry(self.hub_radius, self.tip_radius, self.num_blades,
                             self.r_mid.copy(), self.dr.copy(),
                             np.asarray(chord, dtype=float),
                             np.asarray(twist_deg, dtype=float))


@dataclass(frozen=True)
class SectionLoads:
    """Converged BEM solution for one blade section."""

    a: float
    a_tan: float
    phi: float
    dq: float
    dthrust: float


# ----------------------------------------------------------------------
# default polar
# ----------------------------------------------------------------------

def default_polar(alpha0_deg=-4.0, cl_max=1.6, stall_offset_deg=18.0,
                  cd_max=1.3, cd0=0.008, cd2=0.012, step_deg=0.5):
    """Representative cambered-foil polar used when no file is supplied.

    Attached region: thin-airfoil slope 2*pi/rad from the zero-lift angle,
    clipped at +/-cl_max, with cd = cd0 + cd2*cl^2. Past the stall offset a
    flat-plate (Viterna-style) extrapolation carries the tables to +/-180
    deg. Real measured polars can be ingested via ``load_polar_csv``.
    """
    slope = 2.0 * np.pi  # 1/rad
    s_st = np.deg2rad(stall_offset_deg)
    cl_s = min(cl_max, slope * s_st)
    cd_s = cd0 + cd2 * cl_s ** 2
    a1 = cd_max / 2.0
    a2 = (cl_s - cd_max * np.sin(s_st) * np.cos(s_st)) * np.sin(s_st) / np.cos(s_st) ** 2
    b1 = cd_max
    b2 = (cd_s - cd_max * np.sin(s_st) ** 2) / np.cos(s_st)

    def post_cl(s):
        return a1 * np.sin(2.0 * s) + a2 * np.cos(s) ** 2 / np.sin(s)

    def post_cd(s):
        return b1 * np.sin(s) ** 2 + b2 * np.cos(s)

    alpha = np.arange(-180.0, 180.0 + step_deg / 2, step_deg)
    s = np.deg2rad(alpha - alpha0_deg)
    s = np.where(s > np.pi, s - 2.0 * np.pi, s)
    s = np.where(s <= -np.pi, s + 2.0 * np.pi, s)
    sa = np.abs(s)
    sgn = np.where(s >= 0, 1.0, -1.0)

    cl = np.zeros_like(s)
    cd = np.zeros_like(s)

    att = sa <= s_st
    cl[att] = np.clip(slope * s[att], -cl_max, cl_max)
    cd[att] = cd0 + cd2 * cl[att] ** 2

    mid = (~att) & (sa <= np.pi / 2)
    cl[mid] = sgn[mid] * post_cl(sa[mid])
    cd[mid] = post_cd(sa[mid])

    # backside: mirror of the flat plate, tapered to zero lift at 180 deg
    back = sa > np.pi / 2
    sb = np.pi - sa[back]
    taper = np.deg2rad(2.0)
    sb_eff = np.maximum(sb, taper)
    cl_b = 0.7 * post_cl(sb_eff) * np.where(sb < taper, sb / taper, 1.0)
    cl[back] = -sgn[back] * cl_b
    cd[back] = post_cd(sb)

    cd = np.maximum(cd, cd0)
    return AirfoilPolar(alpha, cl, cd)


def interpolate_polar(polar, alpha_deg):
    """Piecewise-linear (cl, cd) lookup; exact at grid points."""
    alpha = np.asarray(alpha_deg, dtype=float)
    if np.any(alpha < -180.0) or np.any(alpha > 180.0):
        raise InputDomainError("angle of attack outside [-180, 180] deg")
    cl = np.interp(alpha, polar.alpha_deg, polar.cl)
    cd = np.interp(alpha, polar.alpha_deg, polar.cd)
    if np.ndim(alpha_deg) == 0:
        return float(cl), float(cd)
    return cl, cd


# ----------------------------------------------------------------------
# BEM operations
# ----------------------------------------------------------------------

def _defaults(polar, fluid):
    if polar is None:
        polar = default_polar()
    if fluid is None:
        fluid = FluidEnvironment()
    return polar, fluid


def _solve_batch(geometry, v, omega, polar, fluid):
    return kernels.solve_sections(
        geometry.r_mid, geometry.dr, geometry.chord, geometry.twist_rad,
        geometry.num_blades, geometry.tip_radius, geometry.hub_radius,
        v, omega, polar.alpha_deg, polar.cl, polar.cd, fluid.density,
        omega_floor=OMEGA_FLOOR)


def solve_bem_section(geometry, index, v, omega, polar=None, fluid=None):
    """Solve the momentum/blade-element balance for one section.

    Returns a :class:`SectionLoads`; raises :class:`BemSolverError` with
    bracket diagnostics when no sign change exists on any search bracket.
    """
    if not v > 0:
        raise InputDomainError("inflow speed must be positive")
    if omega < 0:
        raise InputDomainError("rotor speed must be non-negative")
    polar, fluid = _defaults(polar, fluid)
    phi, a, ap, dq, dthr, status = _solve_batch(
        geometry, np.array([v]), np.array([omega]), polar, fluid)
    if status[0, index] == 2:
        raise BemSolverError(
            f"no sign change for section {index} at v={v}, omega={omega}",
            diagnostics={"v": v, "omega": omega, "index": index,
                         "brackets": "(1e-6, pi/2], [-pi/4, -1e-6], (pi/2, pi)"})
    return SectionLoads(a=float(a[0, index]), a_tan=float(ap[0, index]),
                        phi=float(phi[0, index]), dq=float(dq[0, index]),
                        dthrust=float(dthr[0, index]))


def rotor_torque(geometry, v, omega, polar=None, fluid=None):
    """Total fluid-induced torque: exact sum of section dq values."""
    return float(rotor_torque_multi(geometry, [v], [omega], polar, fluid)[0])


def rotor_torque_multi(geometry, v, omega, polar=None, fluid=None):
    """Torque at many paired operating points; shape (M,)."""
    v = np.asarray(v, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if np.any(v <= 0):
        raise InputDomainError("inflow speed must be positive")
    if np.any(omega < 0):
        raise InputDomainError("rotor speed must be non-negative")
    polar, fluid = _defaults(polar, fluid)
    _, _, _, dq, _, status = _solve_batch(geometry, v, omega, polar, fluid)
    if np.any(status == 2):
        m, s = np.argwhere(status == 2)[0]
        raise BemSolverError(
            f"section solve failed at point {m} (v={v[m]}, omega={omega[m]}), "
            f"section {s}",
            diagnostics={"v": float(v[m]), "omega": float(omega[m]),
                         "index": int(s)})
    return dq.sum(axis=1)


@dataclass(frozen=True)
class CpCurve:
    """Power-coefficient sweep and its refined argmax."""

    tsr: np.ndarray
    cp: np.ndarray
    lambda_star: float
    cp_star: float
    gaps: tuple = ()

    def as_rows(self):
        return np.column_stack([self.tsr, self.cp])


def cp_curve(geometry, polar=None, fluid=None, tsr_grid=None, v_ref=1.5):
    """Cp(lambda) sweep at v_ref (result is v-independent by v^2 scaling).

    Section-solver failures at extreme TSR are recorded as gaps, not fatal.
    The argmax is refined with a cubic spline through the valid points.
    """
    polar, fluid = _defaults(polar, fluid)
    if tsr_grid is None:
        tsr_grid = np.arange(1.0, 12.0 + 1e-9, 0.25)
    tsr_grid = np.asarray(tsr_grid, dtype=float)
    if np.any(tsr_grid <= 0) or np.any(np.diff(tsr_grid) <= 0):
        raise InputDomainError("tsr grid must be positive ascending")

    omega = tsr_grid * v_ref / geometry.tip_radius
    _, _, _, dq, _, status = _solve_batch(geometry, np.full_like(omega, v_ref),
                                          omega, polar, fluid)
    q = dq.sum(axis=1)
    bad = np.any(status == 2, axis=1)
    q[bad] = np.nan
    denom = 0.5 * fluid.density * np.pi * geometry.tip_radius ** 2 * v_ref ** 3
    cp = q * omega / denom
    gaps = tuple(float(t) for t in tsr_grid[bad])

    good = ~bad
    if good.sum() < 4:
        raise BemSolverError("too few valid points for a Cp curve",
                             diagnostics={"gaps": gaps})
    spl = CubicSpline(tsr_grid[good], cp[good])
    fine = np.arange(tsr_grid[good][0], tsr_grid[good][-1] + 1e-12, 1e-3)
    vals = spl(fine)
    i = int(np.argmax(vals))
    return CpCurve(tsr=tsr_grid, cp=cp, lambda_star=float(fine[i]),
                   cp_star=float(vals[i]), gaps=gaps)


def rotor_inertia(geometry, material_density=MATERIAL_DENSITY,
                  thickness_ratio=THICKNESS_RATIO, area_factor=AREA_FACTOR):
    """Rotor inertia for solid blades; hub excluded.

    Section cross-area is area_factor * chord * (thickness_ratio * chord),
    lumped at the segment mid radius.
    """
    if not material_density > 0:
        raise ConfigError("material density must be positive")
    if not 0 < thickness_ratio < 1 or not 0 < area_factor < 1:
        raise ConfigError("thickness_ratio and area_factor must lie in (0, 1)")
    area = area_factor * thickness_ratio * geometry.chord ** 2
    return float(geometry.num_blades * material_density
                 * np.sum(area * geometry.dr * geometry.r_mid ** 2))


# ----------------------------------------------------------------------
# torque table (1-D in TSR thanks to Reynolds-invariant v^2 scaling)
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TorqueTable:
    """Cubic-spline Cq(lambda) with Q(v, omega) = qfac * v^2 * Cq."""

    lam0: float
    dlam: float
    n_knots: int
    c3: np.ndarray
    c2: np.ndarray
    c1: np.ndarray
    c0: np.ndarray
    qfac: float
    rtip: float

    def cq(self, lam):
        lam = np.clip(lam, self.lam0, self.lam0 + (self.n_knots - 1) * self.dlam)
        idx = np.minimum((np.asarray(lam) - self.lam0) / self.dlam,
                         self.n_knots - 2).astype(int)
        tt = lam - (self.lam0 + idx * self.dlam)
        return (((self.c3[idx] * tt + self.c2[idx]) * tt + self.c1[idx]) * tt
                + self.c0[idx])

    def torque(self, v, omega):
        lam = np.asarray(omega) * self.rtip / np.asarray(v)
        return self.qfac * np.asarray(v) ** 2 * self.cq(lam)


def build_torque_table(geometry, polar=None, fluid=None,
                       lam_min=5e-4, lam_max=16.0, n_knots=600, v_ref=1.5):
    """Tabulate Cq(lambda) densely enough for ODE-grade interpolation."""
    polar, fluid = _defaults(polar, fluid)
    lam = np.linspace(lam_min, lam_max, n_knots)
    omega = lam * v_ref / geometry.tip_radius
    _, _, _, dq, _, status = _solve_batch(
        geometry, np.full_like(omega, v_ref), omega, polar, fluid)
    q = dq.sum(axis=1)
    bad = np.any(status == 2, axis=1)
    if bad.any():
        if bad.mean() > 0.1:
            raise BemSolverError("torque table build failed on >10% of grid",
                                 diagnostics={"lam_failed": lam[bad].tolist()})
        warnings.warn(f"torque table: {int(bad.sum())} grid gaps interpolated")
        q[bad] = np.interp(lam[bad], lam[~bad], q[~bad])
    qfac = 0.5 * fluid.density * np.pi * geometry.tip_radius ** 3
    cqv = q / (qfac * v_ref ** 2)
    spl = CubicSpline(lam, cqv)
    return TorqueTable(lam0=float(lam[0]), dlam=float(lam[1] - lam[0]),
                       n_knots=n_knots,
                       c3=np.ascontiguousarray(spl.c[0]),
                       c2=np.ascontiguousarray(spl.c[1]),
                       c1=np.ascontiguousarray(spl.c[2]),
                       c0=np.ascontiguousarray(spl.c[3]),
                       qfac=float(qfac), rtip=float(geometry.tip_radius))


# ----------------------------------------------------------------------
# file ingestion
# ----------------------------------------------------------------------

def load_polar_csv(path):
    """Read a polar file: header ``alpha_deg,cl,cd``, ascending alpha."""
    rows, header = _read_csv_with_preamble(path)
    if header != ["alpha_deg", "cl", "cd"]:
        raise ConfigError(f"polar file {path}: expected header alpha_deg,cl,cd")
    data = np.asarray(rows, dtype=float)
    return AirfoilPolar(data[:, 0], data[:, 1], data[:, 2])


def save_polar_csv(path, polar):
    with open(path, "w") as fh:
        fh.write("alpha_deg,cl,cd\n")
        for a, cl, cd in zip(polar.alpha_deg, polar.cl, polar.cd):
            fh.write(f"{a:.17g},{cl:.17g},{cd:.17g}\n")


def load_geometry_csv(path):
    """Read a geometry file: key-value preamble + segment table."""
    rows, header, pre = _read_csv_with_preamble(path, want_preamble=True)
    if header != ["r_mid_m", "dr_m", "chord_m", "twist_deg"]:
        raise ConfigError(
            f"geometry file {path}: expected header r_mid_m,dr_m,chord_m,twist_deg")
    for key in ("tip_radius_m", "hub_radius_m", "num_blades"):
        if key not in pre:
            raise ConfigError(f"geometry file {path}: missing preamble key {key}")
    data = np.asarray(rows, dtype=float)
    return BladeGeometry(hub_radius=float(pre["hub_radius_m"]),
                         tip_radius=float(pre["tip_radius_m"]),
                         num_blades=int(float(pre["num_blades"])),
                         r_mid=data[:, 0], dr=data[:, 1],
                         chord=data[:, 2], twist_deg=data[:, 3])


def save_geometry_csv(path, geometry):
    with open(path, "w") as fh:
        fh.write(f"# tip_radius_m={geometry.tip_radius:.17g}\n")
        fh.write(f"# hub_radius_m={geometry.hub_radius:.17g}\n")
        fh.write(f"# num_blades={geometry.num_blades}\n")
        fh.write("r_mid_m,dr_m,chord_m,twist_deg\n")
        for r, dr, c, tw in zip(geometry.r_mid, geometry.dr,
                                geometry.chord, geometry.twist_deg):
            fh.write(f"{r:.17g},{dr:.17g},{c:.17g},{tw:.17g}\n")


def geometry_csv_text(geometry):
    """Geometry serialized to the CSV format as an in-memory string."""
    lines = [f"# tip_radius_m={geometry.tip_radius:.17g}",
             f"# hub_radius_m={geometry.hub_radius:.17g}",
             f"# num_blades={geometry.num_blades}",
             "r_mid_m,dr_m,chord_m,twist_deg"]
    for r, dr, c, tw in zip(geometry.r_mid, geometry.dr,
                            geometry.chord, geometry.twist_deg):
        lines.append(f"{r:.17g},{dr:.17g},{c:.17g},{tw:.17g}")
    return "\n".join(lines) + "\n"


def _read_csv_with_preamble(path, want_preamble=False):
    pre = {}
    header = None
    rows = []
    try:
        fh = open(path)
    except OSError as exc:
        raise ConfigError(f"cannot open {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, val = body.split("=", 1)
                    pre[key.strip()] = val.strip()
                continue
            if header is None:
                header = [h.strip() for h in line.split(",")]
                continue
            rows.append([x.strip() for x in line.split(",")])
    if header is None:
        raise ConfigError(f"{path}: no header row found")
    if want_preamble:
        return rows, header, pre
    return rows, header


def baseline_geometry():
    """Bundled scaled-Bahaj baseline (R = 1.4 m, 3 blades, 9 segments).

    The chord/twist distributions are a documented approximation from the
    published Bahaj rotor tables, scaled 3.5:1; treat them as a plausible
    starting design, not a normative reference.
    """
    with resources.as_file(resources.files("hktccd.data")
                           / "baseline_geometry.csv") as p:
        return load_geometry_csv(p)
