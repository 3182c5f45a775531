"""Pseudo-spectral 2-D Navier-Stokes forward model on the periodic box.

Vorticity-streamfunction form with 2/3-rule dealiasing, exact integrating
factor for the diffusion term, and a 4-stage integrating-factor Runge-Kutta
for the advection and forcing terms.  The initial vorticity is parameterized
by a truncated spectral expansion of a mean-zero Gaussian random field with
eigenvalues |l|^-4, and the observation operator takes antisymmetric
point differences across x1 = pi at two snapshot times, so any initial field
and the negated mirror of it produce identical data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, SolverBlowUpError
from .problems import ForwardModel, InverseProblem

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SpectralGrid:
    n: int
    x: np.ndarray = field(init=False)
    k1: np.ndarray = field(init=False)
    k2: np.ndarray = field(init=False)
    k_sq: np.ndarray = field(init=False)
    dealias: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.n
        if n < 32 or n & (n - 1):
            raise ConfigError("grid size must be a power of two >= 32")
        x = TWO_PI * np.arange(n) / n
        k = np.fft.fftfreq(n, d=1.0 / n)  # integer wavenumbers
        k1 = k[:, None] * np.ones((1, n))
        k2 = np.ones((n, 1)) * k[None, :]
        k_sq = k1**2 + k2**2
        mask = (np.abs(k1) <= n / 3.0) & (np.abs(k2) <= n / 3.0)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k1", k1)
        object.__setattr__(self, "k2", k2)
        object.__setattr__(self, "k_sq", k_sq)
        object.__setattr__(self, "dealias", mask)

    @property
    def dx(self) -> float:
        return TWO_PI / self.n


@dataclass(frozen=True)
class NsConfig:
    viscosity: float = 0.01
    background_velocity: tuple = (0.0, TWO_PI)
    forcing_wavenumber: int = 4
    forcing_amplitude: float = 1.0  # f = (0, amplitude * cos(k x1))
    final_times: tuple = (0.25, 0.5)
    dt_pde: float = 2.5e-3


def curl_forcing(cfg: NsConfig, grid: SpectralGrid) -> np.ndarray:
    """curl of f = (0, A cos(q x1)) is -A q sin(q x1)."""
    q = cfg.forcing_wavenumber
    return -cfg.forcing_amplitude * q * np.sin(q * grid.x)[:, None] * np.ones((1, grid.n))


def _velocity(omega_hat: np.ndarray, cfg: NsConfig, grid: SpectralGrid):
    k_sq = np.where(grid.k_sq == 0.0, 1.0, grid.k_sq)
    psi_hat = omega_hat / k_sq
    psi_hat = psi_hat * (grid.k_sq != 0.0)  # zero-mean gauge
    v1 = np.fft.ifft2(1j * grid.k2 * psi_hat).real + cfg.background_velocity[0]
    v2 = np.fft.ifft2(-1j * grid.k1 * psi_hat).real + cfg.background_velocity[1]
    return v1, v2


def _rhs(omega_hat: np.ndarray, cfg: NsConfig, grid: SpectralGrid,
         curl_f_hat: np.ndarray):
    """Advection + forcing in spectral space (diffusion handled exactly)."""
    v1, v2 = _velocity(omega_hat, cfg, grid)
    w_x = np.fft.ifft2(1j * grid.k1 * omega_hat).real
    w_y = np.fft.ifft2(1j * grid.k2 * omega_hat).real
    adv_hat = np.fft.fft2(v1 * w_x + v2 * w_y) * grid.dealias
    max_speed = float(np.max(np.hypot(v1, v2)))
    return -adv_hat + curl_f_hat, max_speed


def ns_solve(omega0: np.ndarray, cfg: NsConfig, grid: SpectralGrid,
             times: Optional[Sequence[float]] = None) -> dict:
    """Integrate to the requested checkpoint times; batched over leading axes.

    Returns a dict time -> real vorticity field of the same shape as the
    input.  The advective CFL bound max|v| dt / dx <= 0.5 is checked every
    step, and NaN fields abort with the time reached.
    """
    if times is None:
        times = cfg.final_times
    times = sorted(times)
    omega0 = np.asarray(omega0, dtype=float)
    omega_hat = np.fft.fft2(omega0)
    curl_f_hat = np.fft.fft2(curl_forcing(cfg, grid))
    nu = cfg.viscosity
    out = {}
    t = 0.0
    for t_target in times:
        span = t_target - t
        if span < 0:
            raise ValueError("checkpoint times must be increasing")
        n_steps = max(1, int(round(span / cfg.dt_pde)))
        dt = span / n_steps
        e_half = np.exp(-nu * grid.k_sq * dt / 2.0)
        e_full = e_half**2
        for _ in range(n_steps):
            n_a, max_speed = _rhs(omega_hat, cfg, grid, curl_f_hat)
            if max_speed * dt / grid.dx > 0.5:
                raise ConfigError(
                    f"dt_pde violates the CFL bound: max|v|={max_speed:.3g}, dt={dt:.3g}")
            u_a = e_half * (omega_hat + 0.5 * dt * n_a)
            n_b, _ = _rhs(u_a, cfg, grid, curl_f_hat)
            u_b = e_half * omega_hat + 0.5 * dt * n_b
            n_c, _ = _rhs(u_b, cfg, grid, curl_f_hat)
            u_c = e_full * omega_hat + dt * e_half * n_c
            n_d, _ = _rhs(u_c, cfg, grid, curl_f_hat)
            omega_hat = (e_full * omega_hat
                         + dt / 6.0 * (e_full * n_a + 2.0 * e_half * (n_b + n_c) + n_d))
            t += dt
            if not np.all(np.isfinite(omega_hat)):
                raise SolverBlowUpError(t)
        out[t_target] = np.fft.ifft2(omega_hat).real
    return out


@dataclass(frozen=True)
class KlBasis:
    """Spectral expansion basis of the mean-zero random initial vorticity.

    Lattice modes from the half-plane {l1 + l2 > 0 or (l1 + l2 = 0, l1 > 0)}
    sorted by ascending |l| (eigenvalues |l|^-4 descending); each mode
    contributes a cosine then a sine coefficient.  Coefficients carry prior
    variance 2 pi^2.
    """

    truncation: int = 128
    modes: tuple = field(init=False)          # (n_coeff, 3): l1, l2, 0=cos/1=sin
    eigenvalues: np.ndarray = field(init=False)

    def __post_init__(self):
        lattice = []
        lmax = 16
        for l1 in range(-lmax, lmax + 1):
            for l2 in range(-lmax, lmax + 1):
                if l1 + l2 > 0 or (l1 + l2 == 0 and l1 > 0):
                    lattice.append((l1 * l1 + l2 * l2, l1, l2))
        lattice.sort()
        entries = []
        for _, l1, l2 in lattice:
            entries.append((l1, l2, 0))
            entries.append((l1, l2, 1))
            if len(entries) >= self.truncation:
                break
        entries = entries[: self.truncation]
        eig = np.array([1.0 / float(l1 * l1 + l2 * l2) ** 2 for l1, l2, _ in entries])
        object.__setattr__(self, "modes", tuple(entries))
        object.__setattr__(self, "eigenvalues", eig)

    def eigenfunctions(self, grid: SpectralGrid) -> np.ndarray:
        """(n_coeff, n, n) array of the orthonormal basis functions on the grid."""
        x1 = grid.x[:, None]
        x2 = grid.x[None, :]
        fields = np.empty((len(self.modes), grid.n, grid.n))
        for i, (l1, l2, kind) in enumerate(self.modes):
            phase = l1 * x1 + l2 * x2
            wave = np.cos(phase) if kind == 0 else np.sin(phase)
            fields[i] = wave / (np.sqrt(2.0) * np.pi)
        return fields


COEFF_PRIOR_VARIANCE = 2.0 * np.pi**2


def kl_expand(theta: np.ndarray, basis: KlBasis, grid: SpectralGrid,
              eigenfunctions: Optional[np.ndarray] = None) -> np.ndarray:
    """Initial vorticity from coefficients; batched over leading axes."""
    theta = np.asarray(theta, dtype=float)
    d = theta.shape[-1]
    if d > basis.truncation:
        raise ValueError("more coefficients than basis functions")
    if eigenfunctions is None:
        eigenfunctions = basis.eigenfunctions(grid)
    scaled = np.sqrt(basis.eigenvalues[:d])[:, None, None] * eigenfunctions[:d]
    return np.einsum("...i,ixy->...xy", theta, scaled)


@dataclass(frozen=True)
class ObservationOperator:
    """Antisymmetric point differences across x1 = pi at two snapshot times.

    56 points on the 7 x 8 sub-lattice x1 in {2 pi i/16 : i=1..7},
    x2 in {2 pi j/8 : j=0..7}, paired with their mirrors (2 pi - x1, x2);
    output is the T-ordered stack of the 56 differences per time.
    """

    times: tuple = (0.25, 0.5)
    noise_std: float = 0.1

    @property
    def n_obs(self) -> int:
        return 56 * len(self.times)

    def locations(self) -> np.ndarray:
        pts = [(TWO_PI * i / 16.0, TWO_PI * j / 8.0) for i in range(1, 8) for j in range(8)]
        return np.array(pts)

    def grid_indices(self, grid: SpectralGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if grid.n % 16:
            raise ConfigError("grid size must be divisible by 16 for the observation lattice")
        ix = np.repeat(np.arange(1, 8) * grid.n // 16, 8)
        iy = np.tile(np.arange(8) * grid.n // 8, 7)
        ix_mirror = (grid.n - ix) % grid.n
        return ix, ix_mirror, iy


def observe(fields: dict, op: ObservationOperator, grid: SpectralGrid) -> np.ndarray:
    """Stacked differences, earliest-time block first, row-major point order."""
    ix, ix_m, iy = op.grid_indices(grid)
    blocks = []
    for t in op.times:
        f = np.asarray(fields[t])
        blocks.append(f[..., ix, iy] - f[..., ix_m, iy])
    return np.concatenate(blocks, axis=-1)


class NsForwardModel(ForwardModel):
    """Composition: coefficients -> initial vorticity -> flow -> observations."""

    parallel_safe = True

    def __init__(self, basis: KlBasis, cfg: NsConfig, op: ObservationOperator,
                 grid: SpectralGrid, n_modes: Optional[int] = None):
        self.basis = basis
        self.cfg = cfg
        self.op = op
        self.grid = grid
        self.n_modes = n_modes if n_modes is not None else basis.truncation
        self._eigenfunctions = basis.eigenfunctions(grid)

    def __call__(self, theta):
        return self.evaluate_batch(np.asarray(theta, dtype=float)[None, :])[0]

    def evaluate_batch(self, thetas):
        thetas = np.asarray(thetas, dtype=float)
        omega0 = kl_expand(thetas, self.basis, self.grid, self._eigenfunctions)
        fields = ns_solve(omega0, self.cfg, self.grid, times=self.op.times)
        return observe(fields, self.op, self.grid)


@dataclass
class NsTruth:
    theta_ref: np.ndarray
    omega0: np.ndarray
    clean_observations: np.ndarray
    noisy_observations: np.ndarray


def ns_synthetic_truth(model: NsForwardModel, seed: int) -> NsTruth:
    """Seeded ground truth: prior draw, its field, and noisy observations."""
    rng = np.random.default_rng([seed, 2])
    theta_ref = rng.standard_normal(model.n_modes) * np.sqrt(COEFF_PRIOR_VARIANCE)
    omega0 = kl_expand(theta_ref, model.basis, model.grid, model._eigenfunctions)
    clean = model(theta_ref)
    noisy = clean + model.op.noise_std * rng.standard_normal(clean.shape)
    return NsTruth(theta_ref=theta_ref, omega0=omega0,
                   clean_observations=clean, noisy_observations=noisy)


def ns_inverse_problem(model: NsForwardModel, y: np.ndarray) -> InverseProblem:
    d = model.n_modes
    return InverseProblem(
        forward=model,
        y=y,
        sigma_eta=model.op.noise_std**2 * np.eye(model.op.n_obs),
        r0=np.zeros(d),
        sigma_0=COEFF_PRIOR_VARIANCE * np.eye(d),
    )


def ns_desk_benchmark(n_grid: int = 32, n_modes: int = 32, data_seed: int = 7,
                      dt_pde: float = 2.5e-3):
    """Desk-scale inversion setup with a seeded synthetic truth."""
    from .benchmarks import BenchmarkSpec
    from .driver import GmkiConfig

    grid = SpectralGrid(n_grid)
    cfg = NsConfig(dt_pde=dt_pde)
    basis = KlBasis(truncation=n_modes)
    op = ObservationOperator()
    model = NsForwardModel(basis, cfg, op, grid, n_modes=n_modes)
    truth = ns_synthetic_truth(model, data_seed)
    problem = ns_inverse_problem(model, truth.noisy_observations)
    run_cfg = GmkiConfig(k_components=3, dt=0.5, n_iterations=50, j_samples=1000)
    spec = BenchmarkSpec(name="ns-desk", problem=problem, recommended_cfg=run_cfg)
    return spec


def mirror_field(field: np.ndarray) -> np.ndarray:
    """The measurement-equivalent partner: omega(x1, x2) -> -omega(2pi - x1, x2)."""
    field = np.asarray(field)
    n = field.shape[-2]
    idx = (n - np.arange(n)) % n
    return -field[..., idx, :]
