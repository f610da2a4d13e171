"""Far-field reflection patterns: normalized radar cross section over angular grids.

Conventions used throughout:

* ``Direction(phi_deg, theta_deg)``: phi is azimuth, theta is elevation, both in
  degrees. Direction cosines u = cos(theta)sin(phi), v = sin(theta),
  w = cos(theta)cos(phi); the front hemisphere w >= 0 is the visible region.
* Mirror-reflection sign convention: incident and outgoing direction cosines
  add, so the element phase seen from (incident, out) is
  psi + k*(x*(u_out + u_in) + y*(v_out + v_in)).
* NRCS = |sum a*exp(j*...)|^2 / (n_rows*n_cols)^2, so a lossless coherent
  specular reflection peaks at exactly 1.

Two evaluation paths are provided: a direct sum over elements (reference) and a
zero-padded 2-D FFT over the (u, v) raster. On an FFT-commensurate raster at
lambda/2 spacing the two agree to floating-point accuracy; for phi-theta grids
the FFT raster is resampled bilinearly (periodic in u and v, since the array
factor of a regular lattice is periodic with period 1/spacing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT

DB_FLOOR = -60.0


@dataclass(frozen=True)
class ArrayGeometry:
    """Centered N x M lattice of reflecting elements."""

    n_rows: int
    n_cols: int
    wavelength: float                 # m
    spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"need at least a 1x1 array, got {self.n_rows}x{self.n_cols}")
        if self.wavelength <= 0.0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if self.spacing_wavelengths <= 0.0:
            raise ValueError(f"spacing must be positive, got {self.spacing_wavelengths}")

    @classmethod
    def from_frequency(cls, n_rows: int, n_cols: int, frequency_ghz: float,
                       spacing_wavelengths: float = 0.5) -> "ArrayGeometry":
        return cls(n_rows, n_cols, SPEED_OF_LIGHT / (frequency_ghz * 1e9), spacing_wavelengths)

    @property
    def spacing(self) -> float:
        return self.spacing_wavelengths * self.wavelength

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def x_positions(self) -> np.ndarray:
        return (np.arange(self.n_rows) - (self.n_rows - 1) / 2.0) * self.spacing

    def y_positions(self) -> np.ndarray:
        return (np.arange(self.n_cols) - (self.n_cols - 1) / 2.0) * self.spacing


@dataclass(frozen=True)
class Direction:
    """Azimuth/elevation direction in the front hemisphere."""

    phi_deg: float
    theta_deg: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.phi_deg <= 90.0 and -90.0 <= self.theta_deg <= 90.0):
            raise ValueError(
                f"direction ({self.phi_deg}, {self.theta_deg}) deg outside the front hemisphere"
            )

    @property
    def u(self) -> float:
        return math.cos(math.radians(self.theta_deg)) * math.sin(math.radians(self.phi_deg))

    @property
    def v(self) -> float:
        return math.sin(math.radians(self.theta_deg))

    @property
    def w(self) -> float:
        return math.cos(math.radians(self.theta_deg)) * math.cos(math.radians(self.phi_deg))

    def unit_vector(self) -> tuple[float, float, float]:
        return (self.u, self.v, self.w)


def direction_cosines(phi_deg, theta_deg):
    """(u, v) for arrays of azimuth/elevation in degrees."""
    phi = np.radians(np.asarray(phi_deg, dtype=float))
    theta = np.radians(np.asarray(theta_deg, dtype=float))
    return np.cos(theta) * np.sin(phi), np.sin(theta)


def angular_separation_deg(a: Direction, b: Direction) -> float:
    """Great-circle angle between two directions, degrees."""
    dot = sum(p * q for p, q in zip(a.unit_vector(), b.unit_vector()))
    return math.degrees(math.acos(min(1.0, max(-1.0, dot))))


@dataclass(frozen=True)
class AngularGrid:
    """Regular raster in (phi, theta); values are stored theta-major."""

    phi_deg: np.ndarray
    theta_deg: np.ndarray

    def __post_init__(self) -> None:
        phi = np.asarray(self.phi_deg, dtype=float)
        theta = np.asarray(self.theta_deg, dtype=float)
        object.__setattr__(self, "phi_deg", phi)
        object.__setattr__(self, "theta_deg", theta)
        for name, axis in (("phi", phi), ("theta", theta)):
            if axis.ndim != 1 or axis.size < 1:
                raise ValueError(f"{name} axis must be a non-empty 1-D array")
            if np.any(np.diff(axis) <= 0.0):
                raise ValueError(f"{name} axis must be strictly ascending")
            if axis[0] < -90.0 or axis[-1] > 90.0:
                raise ValueError(f"{name} axis must stay within [-90, 90] deg")

    @classmethod
    def default(cls, step_deg: float = 1.0) -> "AngularGrid":
        axis = np.arange(-90.0, 90.0 + 0.5 * step_deg, step_deg)
        return cls(axis, axis.copy())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.theta_deg.size, self.phi_deg.size)

    def mesh_uv(self) -> tuple[np.ndarray, np.ndarray]:
        """(u, v) matrices, theta-major."""
        phi = np.radians(self.phi_deg)
        theta = np.radians(self.theta_deg)
        u = np.cos(theta)[:, None] * np.sin(phi)[None, :]
        v = np.broadcast_to(np.sin(theta)[:, None], (theta.size, phi.size))
        return u, np.array(v)


@dataclass(frozen=True)
class UvGrid:
    """Raster in direction cosines; values are stored v-major (rows of constant v)."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        for name, axis in (("u", u), ("v", v)):
            if axis.ndim != 1 or axis.size < 1:
                raise ValueError(f"{name} axis must be a non-empty 1-D array")
            if np.any(np.diff(axis) <= 0.0):
                raise ValueError(f"{name} axis must be strictly ascending")

    @classmethod
    def fft_raster(cls, geom: ArrayGeometry, size: int = 1024) -> "UvGrid":
        """The exact raster produced by the zero-padded FFT path of the same size."""
        axis = np.fft.fftshift(np.fft.fftfreq(size)) / geom.spacing_wavelengths
        return cls(axis, axis.copy())

    @property
    def shape(self) -> tuple[int, int]:
        return (self.v.size, self.u.size)

    def mesh_uv(self) -> tuple[np.ndarray, np.ndarray]:
        u = np.broadcast_to(self.u[None, :], (self.v.size, self.u.size))
        v = np.broadcast_to(self.v[:, None], (self.v.size, self.u.size))
        return np.array(u), np.array(v)


@dataclass(frozen=True)
class Pattern:
    """NRCS values over a grid (linear scale), with validity mask and provenance."""

    grid: AngularGrid | UvGrid
    values: np.ndarray
    valid: np.ndarray
    incident: Direction
    time_s: float | None = None

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape or self.valid.shape != self.grid.shape:
            raise ValueError("pattern values/mask do not match the grid shape")

    def point_angles_deg(self) -> tuple[np.ndarray, np.ndarray]:
        """(phi, theta) matrices in degrees for every grid point (NaN where invalid)."""
        if isinstance(self.grid, AngularGrid):
            phi = np.broadcast_to(self.grid.phi_deg[None, :], self.grid.shape)
            theta = np.broadcast_to(self.grid.theta_deg[:, None], self.grid.shape)
            return np.array(phi), np.array(theta)
        u, v = self.grid.mesh_uv()
        with np.errstate(invalid="ignore"):
            theta = np.degrees(np.arcsin(np.clip(v, -1.0, 1.0)))
            cos_t = np.cos(np.radians(theta))
            ratio = np.where(cos_t > 0.0, u / np.where(cos_t > 0.0, cos_t, 1.0), 0.0)
            phi = np.degrees(np.arcsin(np.clip(ratio, -1.0, 1.0)))
        phi = np.where(self.valid, phi, np.nan)
        theta = np.where(self.valid, theta, np.nan)
        return phi, theta


def _element_excitation(geom: ArrayGeometry, phases, amplitudes, incident: Direction) -> np.ndarray:
    phases = np.asarray(phases, dtype=float)
    amplitudes = np.asarray(amplitudes, dtype=float)
    if phases.shape != geom.shape:
        raise ValueError(f"phase matrix {phases.shape} does not match array {geom.shape}")
    if amplitudes.shape != geom.shape:
        raise ValueError(f"amplitude matrix {amplitudes.shape} does not match array {geom.shape}")
    if np.any(amplitudes < 0.0) or np.any(amplitudes > 1.0):
        raise ValueError("amplitudes must lie in [0, 1]")
    k = geom.wavenumber
    taper_x = np.exp(1j * k * geom.x_positions() * incident.u)
    taper_y = np.exp(1j * k * geom.y_positions() * incident.v)
    return amplitudes * np.exp(1j * phases) * np.outer(taper_x, taper_y)


def _nrcs_from_af(af, n_elements: int):
    return np.clip(np.abs(af) ** 2 / float(n_elements) ** 2, 0.0, 1.0)


def nrcs_points(geom: ArrayGeometry, phases, amplitudes, incident: Direction,
                u_out, v_out) -> np.ndarray:
    """Direct-sum NRCS at arbitrary outgoing direction cosines (vectorized)."""
    exc = _element_excitation(geom, phases, amplitudes, incident)
    u_flat = np.asarray(u_out, dtype=float).ravel()
    v_flat = np.asarray(v_out, dtype=float).ravel()
    k = geom.wavenumber
    ex = np.exp(1j * k * np.outer(geom.x_positions(), u_flat))
    ey = np.exp(1j * k * np.outer(geom.y_positions(), v_flat))
    af = np.einsum("nk,nk->k", ex, exc @ ey)
    vals = _nrcs_from_af(af, geom.n_rows * geom.n_cols)
    return vals.reshape(np.shape(u_out))


def nrcs(geom: ArrayGeometry, phases, amplitudes, incident: Direction,
         out: Direction) -> float:
    """NRCS towards one outgoing direction."""
    return float(nrcs_points(geom, phases, amplitudes, incident,
                             np.asarray(out.u), np.asarray(out.v)))


def fft_nrcs_raster(geom: ArrayGeometry, phases, amplitudes, incident: Direction,
                    size_u: int = 1024, size_v: int | None = None):
    """Full zero-padded FFT raster: (u_axis, v_axis, values), u ascending along axis 0.

    The raster spans one full period 1/spacing in each direction cosine and is
    returned unmasked (it is the natural domain for Parseval-type checks).
    """
    if size_v is None:
        size_v = size_u
    if size_u < geom.n_rows or size_v < geom.n_cols:
        raise ValueError("FFT size must be at least the array dimensions")
    exc = _element_excitation(geom, phases, amplitudes, incident)
    af = np.fft.ifft2(exc, s=(size_u, size_v)) * (size_u * size_v)
    vals = _nrcs_from_af(af, geom.n_rows * geom.n_cols)
    u_axis = np.fft.fftshift(np.fft.fftfreq(size_u)) / geom.spacing_wavelengths
    v_axis = np.fft.fftshift(np.fft.fftfreq(size_v)) / geom.spacing_wavelengths
    vals = np.fft.fftshift(vals)
    return u_axis, v_axis, vals


def _sample_raster_periodic(u_axis, v_axis, vals, qu, qv, spacing_wavelengths: float):
    """Bilinear sample of an FFT raster, periodic in both direction cosines."""
    period = 1.0 / spacing_wavelengths
    nu, nv = u_axis.size, v_axis.size
    du = period / nu
    dv = period / nv
    iu = np.mod((np.asarray(qu, dtype=float) - u_axis[0]) / du, nu)
    iv = np.mod((np.asarray(qv, dtype=float) - v_axis[0]) / dv, nv)
    iu0 = np.floor(iu).astype(int) % nu
    iv0 = np.floor(iv).astype(int) % nv
    fu = iu - np.floor(iu)
    fv = iv - np.floor(iv)
    iu1 = (iu0 + 1) % nu
    iv1 = (iv0 + 1) % nv
    return ((1 - fu) * (1 - fv) * vals[iu0, iv0]
            + fu * (1 - fv) * vals[iu1, iv0]
            + (1 - fu) * fv * vals[iu0, iv1]
            + fu * fv * vals[iu1, iv1])


def _axes_match_fft(axis: np.ndarray, fft_axis: np.ndarray) -> bool:
    return axis.size == fft_axis.size and bool(np.all(np.abs(axis - fft_axis) <= 1e-12))


def nrcs_map(geom: ArrayGeometry, phases, amplitudes, incident: Direction,
             grid: AngularGrid | UvGrid | None = None, method: str = "fft",
             fft_size: int = 1024, time_s: float | None = None) -> Pattern:
    """Pattern of NRCS values over `grid` via the direct sum or the FFT path."""
    if grid is None:
        grid = AngularGrid.default()
    if method not in ("direct", "fft"):
        raise ValueError(f"method must be 'direct' or 'fft', got {method!r}")

    if isinstance(grid, AngularGrid):
        valid = np.ones(grid.shape, dtype=bool)
    else:
        u, v = grid.mesh_uv()
        valid = u * u + v * v <= 1.0 + 1e-12

    if method == "direct":
        values = _direct_map(geom, phases, amplitudes, incident, grid)
    else:
        u_axis, v_axis, raster = fft_nrcs_raster(geom, phases, amplitudes, incident,
                                                 fft_size, fft_size)
        if isinstance(grid, UvGrid) and _axes_match_fft(grid.u, u_axis) \
                and _axes_match_fft(grid.v, v_axis):
            values = raster.T.copy()  # (v-major, u-minor), exact FFT bins
        else:
            qu, qv = grid.mesh_uv()
            values = _sample_raster_periodic(u_axis, v_axis, raster, qu, qv,
                                             geom.spacing_wavelengths)
    values = np.where(valid, values, 0.0)
    return Pattern(grid=grid, values=values, valid=valid, incident=incident, time_s=time_s)


def _direct_map(geom: ArrayGeometry, phases, amplitudes, incident: Direction,
                grid: AngularGrid | UvGrid) -> np.ndarray:
    exc = _element_excitation(geom, phases, amplitudes, incident)
    k = geom.wavenumber
    x = geom.x_positions()
    y = geom.y_positions()
    n_elements = geom.n_rows * geom.n_cols
    if isinstance(grid, UvGrid):
        ex = np.exp(1j * k * np.outer(x, grid.u))           # (N, nu)
        ey = np.exp(1j * k * np.outer(y, grid.v))           # (M, nv)
        af = ex.T @ exc @ ey                                # (nu, nv)
        return _nrcs_from_af(af.T, n_elements)              # (nv, nu)
    sin_phi = np.sin(np.radians(grid.phi_deg))
    out = np.empty(grid.shape)
    for i, theta in enumerate(np.radians(grid.theta_deg)):
        u_row = math.cos(theta) * sin_phi
        ey = np.exp(1j * k * y * math.sin(theta))           # (M,)
        w = exc @ ey                                        # (N,)
        af_row = w @ np.exp(1j * k * np.outer(x, u_row))    # (n_phi,)
        out[i] = _nrcs_from_af(af_row, n_elements)
    return out


def peak(pattern: Pattern) -> tuple[Direction, float]:
    """Grid point of maximal NRCS; ties broken by smallest (|theta|, |phi|, theta, phi)."""
    if not np.any(pattern.valid):
        raise ValueError("pattern has no valid grid points")
    masked = np.where(pattern.valid, pattern.values, -np.inf)
    vmax = float(np.max(masked))
    phi, theta = pattern.point_angles_deg()
    ties = np.argwhere(masked == vmax)
    best = min(
        (abs(theta[i, j]), abs(phi[i, j]), theta[i, j], phi[i, j])
        for i, j in ties
    )
    return Direction(phi_deg=float(best[3]), theta_deg=float(best[2])), vmax


def value_at(pattern: Pattern, direction: Direction) -> float:
    """Bilinear interpolation of the pattern at an exact direction."""
    if isinstance(pattern.grid, AngularGrid):
        ax_col = pattern.grid.phi_deg
        ax_row = pattern.grid.theta_deg
        q_col, q_row = direction.phi_deg, direction.theta_deg
    else:
        ax_col = pattern.grid.u
        ax_row = pattern.grid.v
        q_col, q_row = direction.u, direction.v
    return float(_bilinear(ax_row, ax_col, pattern.values, q_row, q_col))


def _bilinear(ax_row, ax_col, vals, q_row, q_col) -> float:
    i = int(np.clip(np.searchsorted(ax_row, q_row) - 1, 0, ax_row.size - 2)) \
        if ax_row.size > 1 else 0
    j = int(np.clip(np.searchsorted(ax_col, q_col) - 1, 0, ax_col.size - 2)) \
        if ax_col.size > 1 else 0
    if ax_row.size > 1:
        fr = (q_row - ax_row[i]) / (ax_row[i + 1] - ax_row[i])
        fr = min(1.0, max(0.0, fr))
    else:
        fr = 0.0
    if ax_col.size > 1:
        fc = (q_col - ax_col[j]) / (ax_col[j + 1] - ax_col[j])
        fc = min(1.0, max(0.0, fc))
    else:
        fc = 0.0
    i1 = min(i + 1, ax_row.size - 1)
    j1 = min(j + 1, ax_col.size - 1)
    return ((1 - fr) * (1 - fc) * vals[i, j] + fr * (1 - fc) * vals[i1, j]
            + (1 - fr) * fc * vals[i, j1] + fr * fc * vals[i1, j1])


@dataclass(frozen=True)
class Beamwidth:
    """Half-power width along the two principal cuts and their mean."""

    width_deg: float
    phi_cut_deg: float
    theta_cut_deg: float
    truncated: bool


def half_power_width_from_cut(angles_deg, values, peak_index: int | None = None,
                              bridge_fraction: float = 0.25):
    """(width, truncated) of the half-power region around the cut peak.

    Walking outward from the peak, ripple dips that stay above
    ``bridge_fraction`` of the peak are bridged (defocused wide beams carry
    Fresnel ripple grazing the half-power line); the region ends at the last
    half-power crossing before the cut decays below the bridge level. Clean
    beams decay through a null between main lobe and sidelobes, so for them
    this is the ordinary half-power width. Crossings are interpolated linearly;
    a region reaching the cut boundary is flagged truncated.
    """
    angles_deg = np.asarray(angles_deg, dtype=float)
    values = np.asarray(values, dtype=float)
    if peak_index is None:
        peak_index = int(np.argmax(values))
    half = values[peak_index] / 2.0
    if half <= 0.0:
        raise ValueError("cut peak must be positive to measure a half-power width")
    bridge = bridge_fraction * values[peak_index]

    def edge(step: int) -> tuple[float, bool]:
        boundary = values.size - 1 if step > 0 else 0
        last_above = peak_index
        i = peak_index
        while i != boundary:
            i += step
            if values[i] >= half:
                last_above = i
            elif values[i] < bridge:
                break
        if last_above == boundary:
            return float(angles_deg[boundary]), True  # half-power region hits the cut edge
        nxt = last_above + step
        frac = (values[last_above] - half) / (values[last_above] - values[nxt])
        crossing = float(angles_deg[last_above]
                         + frac * (angles_deg[nxt] - angles_deg[last_above]))
        # a bridge still open at the boundary might extend past the cut: flag it
        unresolved = i == boundary and values[boundary] >= bridge
        return crossing, unresolved

    right, trunc_right = edge(+1)
    left, trunc_left = edge(-1)
    return float(right - left), trunc_left or trunc_right


def half_power_beamwidth(pattern: Pattern, peak_dir: Direction) -> Beamwidth:
    """Mean of the half-power widths along the phi and theta cuts through the peak."""
    if not isinstance(pattern.grid, AngularGrid):
        raise ValueError("half_power_beamwidth needs an AngularGrid pattern; "
                         "use half_power_width_from_cut for custom cuts")
    i = int(np.argmin(np.abs(pattern.grid.theta_deg - peak_dir.theta_deg)))
    j = int(np.argmin(np.abs(pattern.grid.phi_deg - peak_dir.phi_deg)))
    if pattern.values[i, j] <= 0.0:
        raise ValueError("pattern peak must be positive to measure a beamwidth")
    phi_width, phi_trunc = half_power_width_from_cut(pattern.grid.phi_deg,
                                                     pattern.values[i, :], j)
    theta_width, theta_trunc = half_power_width_from_cut(pattern.grid.theta_deg,
                                                         pattern.values[:, j], i)
    return Beamwidth(width_deg=0.5 * (phi_width + theta_width),
                     phi_cut_deg=phi_width, theta_cut_deg=theta_width,
                     truncated=phi_trunc or theta_trunc)


def nrcs_db(values, floor_db: float = DB_FLOOR):
    """10*log10 of linear NRCS, floored for plotting/export."""
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(np.where(values > 0.0, values, np.nan))
    return np.where(np.isnan(db) | (db < floor_db), floor_db, db)


def write_pattern_csv(pattern: Pattern, path, floor_db: float = DB_FLOOR) -> None:
    """CSV export: header phi_deg,theta_deg,nrcs_linear,nrcs_db; valid points, theta-major."""
    phi, theta = pattern.point_angles_deg()
    db = nrcs_db(pattern.values, floor_db)
    lines = ["phi_deg,theta_deg,nrcs_linear,nrcs_db"]
    n_rows, n_cols = pattern.grid.shape
    for i in range(n_rows):
        for j in range(n_cols):
            if not pattern.valid[i, j]:
                continue
            lines.append(f"{phi[i, j]:.6f},{theta[i, j]:.6f},"
                         f"{pattern.values[i, j]:.12e},{db[i, j]:.6f}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
