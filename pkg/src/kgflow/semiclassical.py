"""Semiclassical frame and quantization diagnostics.

Implements the rescaled frame v(t, x) = sqrt(t) w(t, t x) with h = 1/t,
Weyl and standard quantization as dense operators on the frame grid,
the composition expansion of symbols to a chosen order with measured
remainder scaling, the cutoff concentrating near the Lagrangian
{x + p'(xi) = 0}, and empirical operator-norm probes.

Quantization here is diagnostics-grade: the double quadrature

    Op_h^w(a) v(x) = (1/2 pi h) iint e^{i(x-y)xi/h} a((x+y)/2, xi) v(y) dy dxi

is evaluated exactly on the frame grids.  Because the grid spacings
satisfy dx * dxi / h = 2 pi / M, the xi-sum for every kernel entry is a
length-M DFT in the lag i - j, so the dense M x M kernel is assembled
from one batch FFT and a gather; the result is identical to the literal
O(M^2) Riemann sum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .spectral import Grid1D, chi_plateau, interp_eval


class DomainError(ValueError):
    """Frame points fall outside the solver cell."""


class ConvergenceWarning(UserWarning):
    """Power iteration did not settle to the requested residual."""


@dataclass
class SymbolDescriptor:
    """Symbol a(x, xi, h) with advisory class metadata.

    evaluator must accept numpy arrays for x and xi (broadcasting) and a
    scalar h.  delta, beta and order describe the intended symbol class
    and are only consulted by the scaling probes.
    """

    evaluator: Callable
    delta: float = 0.0
    beta: float = 0.0
    order: float = 0.0
    name: str = ""

    def __call__(self, x, xi, h):
        return self.evaluator(x, xi, h)


def symbol(fn, **kw) -> SymbolDescriptor:
    return SymbolDescriptor(evaluator=fn, **kw)


@dataclass
class FrameConfig:
    """Periodic frame grid on [-X, X) with M points and parameter h."""

    h: float
    M: int = 1024
    X: float = 1.2

    def __post_init__(self):
        if not (0 < self.h <= 1):
            raise ValueError("h must lie in (0, 1]")
        self.grid = Grid1D(self.M, self.X)

    @property
    def x(self):
        return self.grid.x

    @property
    def xi(self):
        """Semiclassical frequencies h * k in FFT storage order."""
        return self.h * self.grid.k


# ---------------------------------------------------------------------------
# frame change


def to_frame(w: np.ndarray, t: float, frame: FrameConfig, grid: Grid1D) -> np.ndarray:
    """v(x) = sqrt(t) * w(t x) sampled on the frame grid."""
    if t < 1:
        raise DomainError("frame change requires t >= 1")
    if t * frame.X > grid.L:
        raise DomainError(
            f"frame extent t*X = {t * frame.X} exceeds the solver half-length {grid.L}"
        )
    return np.sqrt(t) * interp_eval(w, t * frame.x, grid)


def from_frame(v: np.ndarray, t: float, frame: FrameConfig, points) -> np.ndarray:
    """Inverse frame change w(x) = v(x/t)/sqrt(t) at the given solver points."""
    points = np.asarray(points, dtype=float)
    if np.any(np.abs(points / t) > frame.X):
        raise DomainError("points outside the frame cell")
    return interp_eval(v, points / t, frame.grid) / np.sqrt(t)


# ---------------------------------------------------------------------------
# quantization


def _midpoints(frame: FrameConfig) -> np.ndarray:
    # half-step grid carrying all values (x_i + x_j)/2
    M = frame.M
    return -frame.X + (frame.X / M) * np.arange(2 * M - 1)


def weyl_matrix(a: SymbolDescriptor, frame: FrameConfig) -> np.ndarray:
    """Dense kernel K with (Op_h^w(a) v)_i = sum_j K[i, j] v_j."""
    M = frame.M
    mids = _midpoints(frame)
    table = np.asarray(a(mids[:, None], frame.xi[None, :], frame.h), dtype=complex)
    table = np.broadcast_to(table, (2 * M - 1, M))
    rows = np.fft.ifft(table, axis=1)
    i = np.arange(M)
    p = i[:, None] + i[None, :]
    q = (i[:, None] - i[None, :]) % M
    return rows[p, q]


def standard_matrix(a: SymbolDescriptor, frame: FrameConfig) -> np.ndarray:
    """Dense kernel of the standard quantization a(x, hD)."""
    M = frame.M
    table = np.asarray(a(frame.x[:, None], frame.xi[None, :], frame.h), dtype=complex)
    table = np.broadcast_to(table, (M, M))
    rows = np.fft.ifft(table, axis=1)
    i = np.arange(M)
    q = (i[:, None] - i[None, :]) % M
    return rows[i[:, None], q]


def weyl_apply(a: SymbolDescriptor, v: np.ndarray, frame: FrameConfig) -> np.ndarray:
    return weyl_matrix(a, frame) @ np.asarray(v, dtype=complex)


def standard_apply(a: SymbolDescriptor, v: np.ndarray, frame: FrameConfig) -> np.ndarray:
    return standard_matrix(a, frame) @ np.asarray(v, dtype=complex)


def multiplier_apply(m: Callable, v: np.ndarray, frame: FrameConfig) -> np.ndarray:
    """x-independent symbol m(xi): diagonal in the frame Fourier basis."""
    return np.fft.ifft(np.asarray(m(frame.xi), dtype=complex) * np.fft.fft(v))


# ---------------------------------------------------------------------------
# composition expansion


_D1 = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))
_D2 = ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12))


def _stencil(order: int):
    """Offset/weight pairs of a 4th-order central difference, unit step."""
    if order == 0:
        return ((0, 1.0),)
    base = _D1 if order % 2 else _D2
    out = base
    for _ in range((order - 1) // 2 if order % 2 else order // 2 - 1):
        out = tuple(
            (o1 + o2, w1 * w2) for o1, w1 in out for o2, w2 in _D2
        )
    return out


def symbol_derivative(a: SymbolDescriptor, nx: int, nxi: int, step: float):
    """d_x^nx d_xi^nxi a by central finite differences with the given step."""

    sx, sxi = _stencil(nx), _stencil(nxi)

    def d(x, xi, h):
        total = 0.0
        for ox, wx in sx:
            for oxi, wxi in sxi:
                total = total + (wx * wxi) * a(x + ox * step, xi + oxi * step, h)
        return total / step ** (nx + nxi)

    return d


def moyal_truncated(a: SymbolDescriptor, b: SymbolDescriptor, k: int,
                    h: float) -> SymbolDescriptor:
    """Composition expansion a#b through order k (k <= 4).

    a#b = ab + (h/2i){a,b}
        + sum_{2 <= |alpha| <= k} (h/2i)^{|alpha|} ((-1)^{alpha_1}/alpha!)
          d_x^{alpha_1} d_xi^{alpha_2} a * d_x^{alpha_2} d_xi^{alpha_1} b.

    Symbol derivatives use central finite differences with step
    h^{1/2}/8.
    """
    if not 0 <= k <= 4:
        raise ValueError("implemented orders are k <= 4")
    step = np.sqrt(h) / 8.0
    fact = [1, 1, 2, 6, 24]
    terms = []
    for n in range(1, k + 1):
        for a1 in range(n + 1):
            a2 = n - a1
            coeff = ((h / 2j) ** n) * ((-1) ** a1) / (fact[a1] * fact[a2])
            da = symbol_derivative(a, a1, a2, step)
            db = symbol_derivative(b, a2, a1, step)
            terms.append((coeff, da, db))

    def ev(x, xi, hh):
        out = np.asarray(a(x, xi, hh) * b(x, xi, hh), dtype=complex)
        for coeff, da, db in terms:
            out = out + coeff * da(x, xi, hh) * db(x, xi, hh)
        return out

    return SymbolDescriptor(
        evaluator=ev,
        delta=max(a.delta, b.delta),
        beta=min(a.beta, b.beta),
        order=a.order + b.order,
        name=f"({a.name}#{b.name})_{k}",
    )


# ---------------------------------------------------------------------------
# operator norms


def op_norm_l2(K: np.ndarray, iterations: int = 50, seed: int = 0,
               tol: float = 1e-3) -> float:
    """Spectral norm by power iteration on K^H K; fixed seed, 50 rounds."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(K.shape[1]) + 1j * rng.standard_normal(K.shape[1])
    v /= np.linalg.norm(v)
    KH = K.conj().T
    sigma = 0.0
    for _ in range(iterations):
        w = KH @ (K @ v)
        prev, sigma = sigma, np.sqrt(np.linalg.norm(w))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    if sigma > 0 and abs(sigma - prev) / sigma > tol:
        warnings.warn(
            f"power iteration residual {abs(sigma - prev) / sigma:.2e} > {tol}",
            ConvergenceWarning,
        )
    return float(sigma)


def op_norm_l2_to_linf(K: np.ndarray, frame: FrameConfig) -> float:
    """Exact discrete L2 -> Linf norm: the largest row in the L2 dual."""
    dy = frame.grid.dx
    return float(np.sqrt(np.max(np.sum(np.abs(K) ** 2, axis=1)) / dy))


def fit_loglog_slope(h_list, values) -> float:
    lh = np.log(np.asarray(h_list, dtype=float))
    lv = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(lh, lv, 1)[0])


def seam_window(frame: FrameConfig) -> np.ndarray:
    """Plateau equal to 1 on |x| <= X/2, vanishing at the cell edge.

    The discrete kernels are periodized in x - y with period 2X, so
    entries coupling the two ends of the cell do not obey the real-line
    symbol calculus.  Operator-norm probes of calculus identities are
    therefore restricted to fields supported away from the seam.
    """
    return chi_plateau(frame.x / (frame.X / 2.0))


def moyal_error(a: SymbolDescriptor, b: SymbolDescriptor, k: int,
                h_list: Sequence[float], M=512, X: float = 1.2,
                seed: int = 0):
    """Operator-norm error of the order-k composition per h, plus slope.

    Returns (errors, fitted_slope): errors[i] is the L2 operator norm of
    Op(a)Op(b) - Op(a#b truncated at k) at h_list[i], measured between
    seam windows (see seam_window).  M may be a single grid size or a
    per-h sequence, so the frequency window pi*h*M/(2X) can be held
    above the symbol support as h shrinks.
    """
    m_list = [int(M)] * len(h_list) if np.isscalar(M) else [int(m) for m in M]
    if len(m_list) != len(h_list):
        raise ValueError("M must be scalar or match h_list in length")
    errors = []
    for h, m in zip(h_list, m_list):
        frame = FrameConfig(h=h, M=m, X=X)
        env = seam_window(frame)
        Ka = weyl_matrix(a, frame)
        Kb = weyl_matrix(b, frame)
        Kc = weyl_matrix(moyal_truncated(a, b, k, h), frame)
        diff = env[:, None] * (Ka @ Kb - Kc) * env[None, :]
        errors.append(op_norm_l2(diff, seed=seed))
    return errors, fit_loglog_slope(h_list, errors)


# ---------------------------------------------------------------------------
# Lagrangian cutoff and friends


def p_prime(xi):
    return xi / np.sqrt(1.0 + np.asarray(xi, dtype=float) ** 2)


def lambda_cutoff(gamma_support_width: float, h: float) -> SymbolDescriptor:
    """Gamma(x, xi) = gamma((x + p'(xi))/sqrt(h)); gamma a plateau bump
    identically 1 on [-w/2, w/2] and supported in [-w, w]."""
    if gamma_support_width <= 0:
        raise ValueError("width must be positive")
    w = gamma_support_width

    def ev(x, xi, hh):
        z = (x + p_prime(xi)) / np.sqrt(hh)
        return chi_plateau(2.0 * z / w)

    return SymbolDescriptor(evaluator=ev, delta=0.5, beta=0.0, order=0.0,
                            name=f"Gamma(w={w})")


def calL(v: np.ndarray, frame: FrameConfig) -> np.ndarray:
    """(1/h) Op_h^w(x + p'(xi)) v: microlocal distance to the Lagrangian."""
    a = symbol(lambda x, xi, h: x + p_prime(xi), name="x+p'")
    return weyl_apply(a, v, frame) / frame.h


def vsigma(v: np.ndarray, rho: float, frame: FrameConfig) -> np.ndarray:
    """Op_h(<xi>^rho) v (x-independent, standard = Weyl)."""
    return multiplier_apply(lambda xi: (1.0 + xi**2) ** (rho / 2.0), v, frame)


def vsigma_lambda(v: np.ndarray, rho: float, frame: FrameConfig,
                  gamma_width: float = 1.0) -> np.ndarray:
    """Op_h^w(Gamma) Op_h(<xi>^rho) v."""
    gamma = lambda_cutoff(gamma_width, frame.h)
    return weyl_apply(gamma, vsigma(v, rho, frame), frame)


def opnorm_probe(a: SymbolDescriptor, h_list: Sequence[float],
                 target: str = "L2_to_L2", M=512, X: float = 1.2,
                 seed: int = 0):
    """Estimated operator norms per h and the fitted h-exponent.

    M may be a single grid size or a per-h sequence (see moyal_error).
    """
    m_list = [int(M)] * len(h_list) if np.isscalar(M) else [int(m) for m in M]
    if len(m_list) != len(h_list):
        raise ValueError("M must be scalar or match h_list in length")
    norms = []
    for h, m in zip(h_list, m_list):
        frame = FrameConfig(h=h, M=m, X=X)
        K = weyl_matrix(a, frame)
        if target == "L2_to_L2":
            norms.append(op_norm_l2(K, seed=seed))
        elif target == "L2_to_Linf":
            norms.append(op_norm_l2_to_linf(K, frame))
        else:
            raise ValueError(f"unknown target {target!r}")
    return norms, fit_loglog_slope(h_list, norms)
