"""Local characteristic functions, finite-product grids, and Fourier
inversion to the value-distribution density.

Conventions follow the measure |dw| = dx dy / (2 pi): the transform of a
density M is F M(z) = integral M(w) exp(i Re(z conj(w))) |dw|, and the
density is recovered as M(w) = F Mtilde(-w).  Grids are square, row-major
with w = x + iy and x fastest, sampled at -L + j (2L/size).
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .accum import compensated_array_total
from .arith import primes_up_to
from .coeffs import CoeffCase
from .errors import FormatError, GuardError, PrecisionWarning
from .forms import ModularForm, eta_prime_power, satake

QUAD_NODES_DEFAULT = 256
ALIAS_GUARD = 1e-8
AUTO_EXTENT_TARGET = 1e-10
LOCAL_DECAY_THRESHOLD = 1 / (204 * math.sqrt(2))  # local half-power decay regime


class GridMeaning(Enum):
    CHARACTERISTIC = "characteristic"
    DENSITY = "density"


@dataclass
class ComplexGrid:
    """Square complex-sample grid over [-extent, extent)^2."""

    extent: float
    size: int
    samples: np.ndarray
    meaning: GridMeaning
    sigma: float
    case: CoeffCase
    form_label: str

    def __post_init__(self):
        if self.extent <= 0:
            raise ValueError("extent must be positive")
        if self.size < 64 or self.size & (self.size - 1):
            raise ValueError("size must be a power of two >= 64")
        if self.samples.shape != (self.size, self.size):
            raise ValueError("samples shape mismatch")

    def axis(self) -> np.ndarray:
        return -self.extent + np.arange(self.size) * (2 * self.extent / self.size)

    def points(self) -> np.ndarray:
        ax = self.axis()
        return ax[None, :] + 1j * ax[:, None]

    @property
    def step(self) -> float:
        return 2 * self.extent / self.size


def frak_f(case: CoeffCase, form: ModularForm, p: int, z):
    """The local function: -(log p)(az/(1-az) + bz/(1-bz)) or
    -log(1-az) - log(1-bz), a, b the Satake parameters."""
    pair = satake(form, p)
    z = np.asarray(z, dtype=np.complex128)
    if case is CoeffCase.LOG:
        out = -np.log(1 - pair.alpha * z)
        if pair.beta:
            out = out - np.log(1 - pair.beta * z)
        return out
    out = pair.alpha * z / (1 - pair.alpha * z)
    if pair.beta:
        out = out + pair.beta * z / (1 - pair.beta * z)
    return -math.log(p) * out


def g_circle(case: CoeffCase, form: ModularForm, sigma: float, p: int,
             nodes: int) -> np.ndarray:
    """Values of the local function on the circle p^{-sigma} |t| = 1."""
    t = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return frak_f(case, form, p, p ** (-sigma) * t)


def mtilde_local_quad(case: CoeffCase, form: ModularForm, sigma: float, p: int,
                      z: complex, nodes: int = QUAD_NODES_DEFAULT,
                      self_check: bool = True) -> complex:
    """Local characteristic value by the unit-circle average
    (1/K) sum_k exp(i Re(g(t_k) conj(z))).

    The integrand is periodic and analytic, so the trapezoid rule
    converges spectrally; a doubled-node self-check guards the node
    count.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if nodes < 32:
        raise ValueError("use at least 32 nodes")
    if p ** (-sigma) >= 1:
        raise ValueError("p^-sigma must be < 1")
    val = _quad_value(case, form, sigma, p, complex(z), nodes)
    if self_check:
        again = _quad_value(case, form, sigma, p, complex(z), 2 * nodes)
        if abs(val - again) > 1e-12:
            warnings.warn(
                f"quadrature self-check moved by {abs(val - again):.2e} at "
                f"p={p}, sigma={sigma}, z={z}", PrecisionWarning, stacklevel=2)
            val = again
    return val


def _quad_value(case, form, sigma, p, z, nodes):
    g = g_circle(case, form, sigma, p, nodes)
    # unit-modulus integrand: no cancellation growth even for large |z|
    vals = np.exp(1j * (g * np.conj(z)).real)
    return complex(np.mean(vals))


def _h_arrays(case: CoeffCase, z_arg: np.ndarray, p: int, r_top: int) -> list[np.ndarray]:
    """frak_h(p^r) for r = 0..r_top on an array of z, by stable recurrences."""
    if case is CoeffCase.LOG:
        x = 0.5j * z_arg
        out = [np.ones_like(x)]
        for r in range(1, r_top + 1):
            out.append(out[-1] * (x + (r - 1)) / r)
        return out
    x = -0.5j * z_arg * math.log(p)
    out = [np.ones_like(x), x.copy()]
    for r in range(2, r_top + 1):
        out.append(((x + 2 * (r - 1)) * out[-1] - (r - 2) * out[-2]) / r)
    return out[: r_top + 1]


def _local_r_top(case: CoeffCase, sigma: float, p: int, z_abs: float,
                 r_max: int, floor: float = 1e-18) -> int:
    """Last power index whose term can matter at |z| <= z_abs."""
    xa = max(z_abs / 2 * (math.log(p) if case is CoeffCase.LOG_DERIV else 1.0),
             1e-9)
    log_term = 0.0
    for r in range(1, r_max + 1):
        log_term += 2 * (math.log(xa) - math.log(r)) - 2 * sigma * math.log(p)
        if log_term + 2 * math.log(r + 1) < math.log(floor) and r >= 2:
            return r
    return r_max


def local_factor_array(case: CoeffCase, form: ModularForm, sigma: float, p: int,
                       z: np.ndarray, r_max: int = 64,
                       h_pair: tuple[list, list] | None = None) -> np.ndarray:
    """Diagonal local factor sum_r l_z(p^r) l_zbar(p^r) p^{-2 sigma r} on an
    array of z, through the series path (vectorized).

    In the log case the generating coefficients do not depend on p, so a
    precomputed (h_pos, h_neg) pair may be shared across primes.
    """
    z = np.asarray(z, dtype=np.complex128)
    r_top = _local_r_top(case, sigma, p, float(np.abs(z).max()), r_max)
    if h_pair is not None and len(h_pair[0]) > r_top:
        h_pos, h_neg = h_pair
    else:
        h_pos = _h_arrays(case, z, p, r_top + 1)
        h_neg = _h_arrays(case, -z, p, r_top + 1)
    out = np.ones_like(z)
    u = p ** (-2.0 * sigma)
    upow = 1.0
    if form.level % p == 0:
        ep = form.eta_prime(p)
        for r in range(1, r_top + 1):
            upow *= u
            lr = h_pos[r] * ep**r
            lr_bar = np.conj(h_neg[r]) * ep**r
            out += lr * lr_bar * upow
        return out
    etas = {a: eta_prime_power(form, p, a) for a in range(r_top + 1)}
    for r in range(1, r_top + 1):
        upow *= u
        lr = _l_from_h(h_pos, etas, r)
        lr_bar = np.conj(_l_from_h(h_neg, etas, r))
        out += lr * lr_bar * upow
    return out


def _l_from_h(h: list[np.ndarray], etas: dict[int, float], r: int) -> np.ndarray:
    # h[0] is identically 1 and eta(p^0) = 1; skip those multiplies
    acc = None
    for a in range(r % 2, r + 1, 2):
        lo = (r - a) // 2
        hi = (r + a) // 2
        term = h[hi].copy() if lo == 0 else h[lo] * h[hi]
        if lo == 1:
            term -= h[hi + 1]
        elif lo > 1:
            term -= h[lo - 1] * h[hi + 1]
        if a and etas[a] != 1.0:
            term *= etas[a]
        if acc is None:
            acc = term
        else:
            acc += term
    return acc


@dataclass(frozen=True)
class GridParams:
    """Grid controls: extent None means auto-doubling until the boundary
    characteristic values decay below the aliasing target."""

    extent: float | None = None
    size: int = 512
    r_max: int = 64
    nodes: int = QUAD_NODES_DEFAULT
    check_fraction: float = 0.01
    avoid_prime: int | None = None


def _boundary_ring(extent: float, count: int = 64) -> np.ndarray:
    side = np.linspace(-extent, extent, count // 4, endpoint=False)
    return np.concatenate([
        side + 1j * -extent, side + 1j * extent,
        -extent + 1j * side, extent + 1j * side,
    ])


def _nodes_for(case, form, sigma, p, z_abs, base):
    """Trapezoid node count covering the integrand's Fourier bandwidth.

    The phase amplitude is |z| max|g|; Bessel-type mode content dies just
    beyond that, so 1.4x plus a pad is comfortably spectral."""
    probe = np.abs(g_circle(case, form, sigma, p, 64)).max()
    need = int(1.4 * z_abs * probe) + 64
    return max(base, ((need + 63) // 64) * 64)


def _ring_mtilde_quad(case, form, sigma, p_max, ring, nodes, avoid_prime):
    out = np.ones_like(ring)
    z_abs = float(np.abs(ring).max())
    for p in primes_up_to(min(p_max, form.p_max)):
        if p == avoid_prime:
            continue
        g = g_circle(case, form, sigma, p, _nodes_for(case, form, sigma, p, z_abs, nodes))
        out *= np.mean(np.exp(1j * np.real(np.outer(ring.conj(), g))), axis=1)
    return out


def auto_extent(case: CoeffCase, form: ModularForm, sigma: float, p_max: int,
                start: float = 16.0, target: float = AUTO_EXTENT_TARGET,
                nodes: int = QUAD_NODES_DEFAULT,
                avoid_prime: int | None = None) -> float:
    """Double the half-width until the characteristic function is below
    `target` everywhere on the square boundary."""
    extent = start
    while extent <= 1024:
        ring = _boundary_ring(extent)
        vals = _ring_mtilde_quad(case, form, sigma, p_max, ring, nodes, avoid_prime)
        if float(np.abs(vals).max()) < target:
            return extent
        extent *= 2
    raise GuardError(
        f"no extent <= 1024 reaches boundary decay {target} "
        f"(sigma={sigma}, p_max={p_max})")


def mtilde_grid(case: CoeffCase, form: ModularForm, sigma: float, p_max: int,
                grid_params: GridParams | None = None) -> ComplexGrid:
    """Samples of the finite Euler product prod_{p <= p_max} of local
    characteristic factors over a square grid.

    Per-factor evaluation uses the series path; a deterministic sample of
    roughly check_fraction of the grid is re-evaluated by quadrature over
    the small primes (where series cancellation is worst) and a
    PrecisionWarning is raised on disagreement.
    """
    gp = grid_params or GridParams()
    if sigma <= 0.5:
        raise ValueError("sigma must exceed 1/2")
    extent = gp.extent
    if extent is None:
        extent = auto_extent(case, form, sigma, p_max, avoid_prime=gp.avoid_prime)
    n = gp.size
    ax = -extent + np.arange(n) * (2 * extent / n)
    z = ax[None, :] + 1j * ax[:, None]
    primes = [p for p in primes_up_to(min(p_max, form.p_max))
              if p != gp.avoid_prime]
    h_pair = None
    if case is CoeffCase.LOG and primes:
        # log-case generating coefficients are p-free: share them grid-wide
        deepest = max(_local_r_top(case, sigma, p, extent * math.sqrt(2), gp.r_max)
                      for p in primes[:1])
        h_pair = (_h_arrays(case, z, 2, deepest + 1),
                  _h_arrays(case, -z, 2, deepest + 1))
    small = [p for p in primes if p <= 50]
    total_small = np.ones_like(z)
    for p in small:
        total_small *= _factor_with_fallback(case, form, sigma, p, z, extent, gp,
                                             h_pair)
    total = total_small.copy()
    for p in primes:
        if p > 50:
            total *= _factor_with_fallback(case, form, sigma, p, z, extent, gp,
                                           h_pair)
    _spot_check_quad(case, form, sigma, small, z, total_small, gp)
    out = ComplexGrid(extent, n, total, GridMeaning.CHARACTERISTIC, sigma, case,
                      form.label)
    boundary = _boundary_max(total)
    if boundary > ALIAS_GUARD:
        raise GuardError(
            f"extent {extent} too small: boundary characteristic magnitude "
            f"{boundary:.2e} above aliasing threshold {ALIAS_GUARD}")
    return out


def _series_cancellation(case: CoeffCase, sigma: float, p: int, z_abs: float) -> float:
    """log of the peak-to-value ratio of the local series terms."""
    w = math.log(p) if case is CoeffCase.LOG_DERIV else 1.0
    return z_abs * w * p ** (-sigma)


def _factor_with_fallback(case, form, sigma, p, z, extent, gp, h_pair=None):
    # the series path loses about exp(cancellation) digits; switch to the
    # unit-modulus quadrature once that would erode the 1e-12 scale
    if _series_cancellation(case, sigma, p, extent * math.sqrt(2)) > 7.0:
        return _factor_quad_full(case, form, sigma, p, z, gp.nodes)
    return local_factor_array(case, form, sigma, p, z, gp.r_max, h_pair)


def _factor_quad_full(case, form, sigma, p, z, nodes):
    nodes = _nodes_for(case, form, sigma, p, float(np.abs(z).max()), nodes)
    g = g_circle(case, form, sigma, p, nodes)
    x = z.real[0, :]
    y = z.imag[:, 0]
    out = np.zeros(z.shape, dtype=np.complex128)
    for gk in g:
        row = np.exp(1j * gk.real * x)
        col = np.exp(1j * gk.imag * y)
        out += col[:, None] * row[None, :]
    return out / nodes


def _spot_check_quad(case, form, sigma, small_primes, z, total_small, gp):
    if not small_primes or gp.check_fraction <= 0:
        return
    n2 = z.size
    stride = max(1, int(round(1 / gp.check_fraction)))
    idx = np.arange(0, n2, stride)
    pts = z.ravel()[idx]
    z_abs = float(np.abs(pts).max())
    ref = np.ones_like(pts)
    for p in small_primes:
        g = g_circle(case, form, sigma, p,
                     _nodes_for(case, form, sigma, p, z_abs, gp.nodes))
        ref *= np.mean(np.exp(1j * np.real(np.outer(pts.conj(), g))), axis=1)
    got = total_small.ravel()[idx]
    err = float(np.abs(got - ref).max())
    if err > 1e-8:
        warnings.warn(
            f"series/quadrature grid spot-check disagreement {err:.2e} "
            f"(sigma={sigma})", PrecisionWarning, stacklevel=3)


def _boundary_max(samples: np.ndarray) -> float:
    return float(max(np.abs(samples[0, :]).max(), np.abs(samples[-1, :]).max(),
                     np.abs(samples[:, 0]).max(), np.abs(samples[:, -1]).max()))


def invert_to_density(grid: ComplexGrid) -> ComplexGrid:
    """Discrete Fourier inversion of a characteristic grid to the density.

    M(w) = (h^2 / 2 pi) sum_z Mtilde(z) exp(-i Re(z conj(w))) over the
    conjugate grid; cell sizes satisfy h H n = 2 pi, which makes the
    Riemann-sum mass exactly the center characteristic value.
    """
    if grid.meaning is not GridMeaning.CHARACTERISTIC:
        raise ValueError("invert_to_density expects a characteristic grid")
    b = _boundary_max(grid.samples)
    if b > ALIAS_GUARD:
        raise GuardError(
            f"boundary magnitude {b:.2e} violates aliasing guard {ALIAS_GUARD}")
    n = grid.size
    h = grid.step
    phase = np.where(np.arange(n) % 2, -1.0, 1.0)
    f = np.fft.fft2(grid.samples)
    f *= phase[None, :]
    f *= phase[:, None]
    dens = np.fft.fftshift(f) * (h * h / (2 * np.pi))
    out_extent = np.pi / h
    return ComplexGrid(float(out_extent), n, dens, GridMeaning.DENSITY,
                       grid.sigma, grid.case, grid.form_label)


# ---------------------------------------------------------------------------
# test functions for integration against the density

@dataclass(frozen=True)
class Constant:
    value: complex = 1.0

    def evaluate(self, w: np.ndarray) -> np.ndarray:
        return np.full_like(w, self.value)

    def support_radius(self) -> float:
        return math.inf


@dataclass(frozen=True)
class DiskIndicator:
    center: complex = 0.0
    radius: float = 1.0

    def evaluate(self, w: np.ndarray) -> np.ndarray:
        return (np.abs(w - self.center) <= self.radius).astype(np.complex128)

    def support_radius(self) -> float:
        return abs(self.center) + self.radius


@dataclass(frozen=True)
class Gaussian:
    center: complex = 0.0
    width: float = 1.0

    def evaluate(self, w: np.ndarray) -> np.ndarray:
        return np.exp(-np.abs(w - self.center) ** 2 / (2 * self.width**2)).astype(
            np.complex128)

    def support_radius(self) -> float:
        return abs(self.center) + 6 * self.width


@dataclass(frozen=True)
class QuasiCharacter:
    z1: complex = 0.0
    z2: complex = 0.0

    def evaluate(self, w: np.ndarray) -> np.ndarray:
        return np.exp(0.5j * (self.z1 * np.conj(w) + self.z2 * w))

    def support_radius(self) -> float:
        return math.inf


def integrate_against(density: ComplexGrid, phi) -> complex:
    """Riemann sum of M * phi with the |dw| = dx dy / 2 pi convention.

    Indicator-type phi whose support leaves the grid raise GuardError
    when the boundary still carries visible mass.
    """
    if density.meaning is not GridMeaning.DENSITY:
        raise ValueError("integrate_against expects a density grid")
    rad = phi.support_radius()
    if not math.isinf(rad) and rad > density.extent * math.sqrt(2):
        if isinstance(phi, (DiskIndicator, Gaussian)) and _boundary_max(
                density.samples) > 1e-9:
            raise GuardError(
                "test-function support escapes the grid and boundary mass "
                "is not negligible")
    vals = density.samples * phi.evaluate(density.points())
    cell = density.step**2 / (2 * np.pi)
    return compensated_array_total(vals) * cell


# ---------------------------------------------------------------------------
# decay diagnostics

@dataclass(frozen=True)
class LocalDecayReport:
    prime: int
    sigma: float
    eligible: bool
    eta_abs: float
    p_pow: float
    threshold: float
    radii: tuple
    sups: tuple
    weighted: tuple  # sup * (1+r)^{1/2}
    fitted_constant: float
    trivial_bound_ok: bool


def local_decay_report(case: CoeffCase, form: ModularForm, sigma: float, p: int,
                       radii, angles: int = 64,
                       nodes: int = QUAD_NODES_DEFAULT) -> LocalDecayReport:
    """Half-power decay diagnostic of one local characteristic factor.

    Eligibility needs |eta(p)| > 1 and p^{-sigma} below 1/(204 sqrt 2);
    ineligible primes still get the trivial-bound check, with no decay
    assertion attached.
    """
    radii = tuple(float(r) for r in radii)
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be increasing")
    eta_abs = abs(form.eta_prime(p))
    p_pow = p ** (-sigma)
    eligible = eta_abs > 1 and p_pow < LOCAL_DECAY_THRESHOLD
    g = g_circle(case, form, sigma, p, nodes)
    theta = np.exp(2j * np.pi * np.arange(angles) / angles)
    sups = []
    for r in radii:
        zs = r * theta
        vals = np.abs(np.exp(1j * np.real(np.outer(zs.conj(), g))).mean(axis=1))
        sups.append(float(vals.max()))
    weighted = tuple(s * (1 + r) ** 0.5 for s, r in zip(sups, radii))
    return LocalDecayReport(
        prime=p, sigma=sigma, eligible=eligible, eta_abs=eta_abs, p_pow=p_pow,
        threshold=LOCAL_DECAY_THRESHOLD, radii=radii, sups=tuple(sups),
        weighted=weighted, fitted_constant=max(weighted),
        trivial_bound_ok=all(s <= 1 + 1e-12 for s in sups))


@dataclass(frozen=True)
class DensityDecayReport:
    lam: float
    radii: tuple
    values: tuple
    weighted: tuple  # M(r) * exp(lam r^2)
    mode_radius: float
    monotone_beyond_mode: bool


def density_decay_report(density: ComplexGrid, lam: float) -> DensityDecayReport:
    """Gaussian-weighted profile of the density along the positive real axis."""
    if density.meaning is not GridMeaning.DENSITY:
        raise ValueError("density grid required")
    n = density.size
    row = density.samples[n // 2, n // 2 :].real
    radii = density.axis()[n // 2 :] * 1.0
    radii = radii - radii[0]  # starts at 0 on the axis
    weighted = row * np.exp(lam * radii**2)
    mode = int(np.argmax(row))
    tail = row[mode:]
    monotone = bool(np.all(np.diff(tail) <= 1e-9 * max(1.0, float(row.max()))))
    return DensityDecayReport(
        lam=lam, radii=tuple(map(float, radii)), values=tuple(map(float, row)),
        weighted=tuple(map(float, weighted)), mode_radius=float(radii[mode]),
        monotone_beyond_mode=monotone)


# ---------------------------------------------------------------------------
# grid files

_MAGIC = b"MGRD"
_VERSION = 1
_MEANING_CODE = {GridMeaning.CHARACTERISTIC: 0, GridMeaning.DENSITY: 1}
_CASE_CODE = {CoeffCase.LOG_DERIV: 0, CoeffCase.LOG: 1}


def save_grid(grid: ComplexGrid, path) -> None:
    label = grid.form_label.encode("utf-8")
    header = _MAGIC + struct.pack(
        "<IBBddIH", _VERSION, _MEANING_CODE[grid.meaning],
        _CASE_CODE[grid.case], grid.sigma, grid.extent, grid.size, len(label))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(label)
        fh.write(np.ascontiguousarray(grid.samples, dtype="<c16").tobytes())


def load_grid(path) -> ComplexGrid:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        version, meaning_c, case_c, sigma, extent, size, label_len = struct.unpack(
            "<IBBddIH", fh.read(struct.calcsize("<IBBddIH")))
        if version != _VERSION:
            raise FormatError(f"unsupported version {version}")
        label = fh.read(label_len).decode("utf-8")
        data = np.frombuffer(fh.read(16 * size * size), dtype="<c16")
    meaning = {v: k for k, v in _MEANING_CODE.items()}[meaning_c]
    case = {v: k for k, v in _CASE_CODE.items()}[case_c]
    return ComplexGrid(extent, size, data.reshape(size, size).copy(), meaning,
                       sigma, case, label)


def export_grid_csv(grid: ComplexGrid, path) -> None:
    pts = grid.points()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("w_re,w_im,value_re,value_im\n")
        flat_w = pts.ravel()
        flat_v = grid.samples.ravel()
        for w, v in zip(flat_w, flat_v):
            fh.write(f"{w.real!r},{w.imag!r},{v.real!r},{v.imag!r}\n")
