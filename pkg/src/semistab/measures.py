"""Finite positive Borel measures on the closed left half-line (-inf, 0].

These measures act as spectral measures of negative self-adjoint
operators: the squared orbit norm of the generated contraction
semigroup is the Laplace transform

    ||exp(tA) x||^2 = integral exp(2 t lambda) dmu(lambda),

and the small-ball behaviour of mu near 0 controls the polynomial
decay of that transform.  Everything numerically delicate (atoms with
|position| far below the smallest positive double, weights as small as
exp(-20000)) is carried in natural-log coordinates throughout.

Two concrete representations are provided:

* :class:`AtomicMeasure` -- finitely many atoms, stored as
  ``(ln |position|, ln weight)`` pairs.
* :class:`DensityMeasure` -- an absolutely continuous part with a
  pointwise-evaluable density in the distance coordinate ``s = |lambda|``.

Free functions (:func:`ball_mass`, :func:`scaling_exponents`,
:func:`laplace_norm_sq`, :func:`laplace_moment`) accept either kind.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

from .errors import DomainError, InvariantViolation

__all__ = [
    "AtomicMeasure",
    "DensityMeasure",
    "ScalingExponentEstimate",
    "ball_mass",
    "log_ball_mass",
    "scaling_exponents",
    "laplace_norm_sq",
    "laplace_moment",
    "lacunary_measure",
    "power_law_measure",
    "monomial_profile_measure",
    "uniform_measure",
    "sampled_density_measure",
    "measure_to_text",
    "measure_from_text",
    "save_measure",
    "load_measure",
]

# exp() overflows above ~709.78; atom moduli beyond that are not representable
_LOG_S_CAP = 709.0
# exp(-x) underflows to 0.0 for x > ~745; quadrature tail cut uses this
_TAIL_EXPONENT = 745.0
_QUAD_RELTOL = 1e-12
_QUAD_LIMIT = 200


def _as_scalar_or_array(values: np.ndarray, scalar_input: bool):
    return float(values[0]) if scalar_input else values


# ---------------------------------------------------------------------------
# atomic measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AtomicMeasure:
    """Purely atomic finite measure on (-inf, 0] in log coordinates.

    Atoms are stored as ``(log_s, log_w)`` with ``s = |position|``, so
    positions far below the double-precision range (|position| around
    1e-2000 and smaller) stay exactly representable.  ``log_s = -inf``
    encodes an atom at 0.  Atoms are ordered by increasing ``log_s``,
    i.e. closest to 0 first; construction merges exact duplicates by
    adding their weights.
    """

    log_s: np.ndarray
    log_w: np.ndarray

    def __post_init__(self) -> None:
        log_s = np.array(self.log_s, dtype=float).ravel()
        log_w = np.array(self.log_w, dtype=float).ravel()
        if log_s.size == 0:
            raise DomainError("an atomic measure needs at least one atom")
        if log_s.shape != log_w.shape:
            raise DomainError("log_s and log_w must have the same length")
        if np.any(np.isnan(log_s)) or np.any(log_s > _LOG_S_CAP):
            raise DomainError(
                "atom positions must satisfy |position| <= exp(709) and not be NaN"
            )
        if not np.all(np.isfinite(log_w)):
            raise DomainError("atom log-weights must be finite (weights > 0)")
        order = np.argsort(log_s, kind="stable")
        log_s = log_s[order]
        log_w = log_w[order]
        keep = np.ones(log_s.size, dtype=bool)
        keep[1:] = log_s[1:] != log_s[:-1]
        if not np.all(keep):
            starts = np.flatnonzero(keep)
            log_w = np.logaddexp.reduceat(log_w, starts)
            log_s = log_s[starts]
        prefix = np.logaddexp.accumulate(log_w)
        for arr in (log_s, log_w, prefix):
            arr.setflags(write=False)
        object.__setattr__(self, "log_s", log_s)
        object.__setattr__(self, "log_w", log_w)
        object.__setattr__(self, "_prefix", prefix)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_points(cls, positions: Sequence[float], weights: Sequence[float]) -> "AtomicMeasure":
        """Build from linear-scale atom positions (<= 0) and weights (> 0)."""
        pos = np.asarray(positions, dtype=float).ravel()
        wts = np.asarray(weights, dtype=float).ravel()
        if pos.size != wts.size:
            raise DomainError("positions and weights must have the same length")
        if pos.size == 0:
            raise DomainError("an atomic measure needs at least one atom")
        if np.any(~np.isfinite(pos)) or np.any(pos > 0.0):
            raise DomainError("positions must be finite and <= 0")
        if np.any(~np.isfinite(wts)) or np.any(wts <= 0.0):
            raise DomainError("weights must be finite and > 0")
        with np.errstate(divide="ignore"):
            log_s = np.log(-pos)
        return cls(log_s=log_s, log_w=np.log(wts))

    # -- basic quantities ----------------------------------------------

    @property
    def n_atoms(self) -> int:
        return int(self.log_s.size)

    @property
    def log_mass(self) -> float:
        return float(self._prefix[-1])

    @property
    def mass(self) -> float:
        return float(math.exp(self.log_mass))

    @property
    def positions(self) -> np.ndarray:
        """Atom positions on linear scale (underflow to -0.0 is possible)."""
        return -np.exp(self.log_s)

    @property
    def weights(self) -> np.ndarray:
        """Atom weights on linear scale (may underflow for extreme atoms)."""
        return np.exp(self.log_w)

    # -- measure operations ---------------------------------------------

    def log_ball_mass(self, log_eps):
        """ln mu({|lambda| < eps}) for ln(eps) given; -inf for empty balls.

        Vectorized over ``log_eps``.  The ball is open, so an atom with
        ``log_s == log_eps`` is excluded.
        """
        arr = np.asarray(log_eps, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        idx = np.searchsorted(self.log_s, arr, side="left")
        out = np.where(idx > 0, self._prefix[np.maximum(idx - 1, 0)], -np.inf)
        return _as_scalar_or_array(out, scalar)

    def ball_mass(self, eps: float) -> float:
        if eps <= 0.0:
            raise DomainError("ball radius must be positive")
        return float(math.exp(self.log_ball_mass(math.log(eps))))

    def log_laplace(self, t):
        """ln of integral exp(2 t lambda) dmu(lambda); vectorized over t."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        s = np.exp(self.log_s)  # sub-double moduli round to 0.0, which is exact here
        vals = logsumexp(self.log_w[None, :] - 2.0 * t_arr[:, None] * s[None, :], axis=1)
        return _as_scalar_or_array(np.atleast_1d(vals), scalar)

    def log_laplace_moment(self, t: float, shift: float = 0.0) -> float:
        """ln of integral (lambda + shift)^2 exp(2 t lambda) dmu(lambda)."""
        s = np.exp(self.log_s)
        if shift == 0.0:
            log_amp = 2.0 * self.log_s
        else:
            with np.errstate(divide="ignore"):
                log_amp = 2.0 * np.log(np.abs(shift - s))
        return float(logsumexp(self.log_w + log_amp - 2.0 * t * s))

    def describe(self) -> str:
        return f"atomic n={self.n_atoms} mass={self.mass!r}"

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        lines = [f"atomic n={self.n_atoms} coords=log mass={self.mass!r}"]
        for ls, lw in zip(self.log_s, self.log_w):
            lines.append(f"{float(ls)!r} {float(lw)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text_lines(cls, header: dict, body: Sequence[str]) -> "AtomicMeasure":
        n = int(header["n"])
        if header.get("coords", "log") != "log":
            raise DomainError("unsupported atomic coordinate encoding")
        if len(body) != n:
            raise DomainError(f"expected {n} atom lines, found {len(body)}")
        log_s = np.empty(n)
        log_w = np.empty(n)
        for i, line in enumerate(body):
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"malformed atom line: {line!r}")
            log_s[i] = float(parts[0])
            log_w[i] = float(parts[1])
        return cls(log_s=log_s, log_w=log_w)


# ---------------------------------------------------------------------------
# density measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityMeasure:
    """Absolutely continuous measure in the distance coordinate s = |lambda|.

    The support is an interval ``[s_lo, s_hi]`` with ``0 <= s_lo < s_hi``;
    ``density(s)`` is the Radon-Nikodym derivative with respect to ds.

    Near the inner edge the density may carry an algebraic factor:
    ``density(s_lo + sig) = sig**alg_power * smooth_factor(sig)``.
    Supplying ``alg_power`` and ``smooth_factor`` routes all quadrature
    through an endpoint-weighted rule, which keeps relative accuracy
    even when the algebraic factor is singular or vanishes to high
    order.  ``ball_mass_fn`` / ``log_ball_mass_fn`` are optional closed
    forms, cross-checked against quadrature on construction.
    """

    s_lo: float
    s_hi: float
    density: Callable[[np.ndarray], np.ndarray]
    kind: str = "density"
    params: dict = field(default_factory=dict)
    ball_mass_fn: Optional[Callable[[float], float]] = None
    log_ball_mass_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    alg_power: float = 0.0
    smooth_factor: Optional[Callable[[float], float]] = None
    quad_breaks: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.s_lo < self.s_hi < math.inf):
            raise DomainError("support must satisfy 0 <= s_lo < s_hi < inf")
        if not self.alg_power > -1.0:
            raise DomainError("alg_power must be > -1 for an integrable edge")
        if self.alg_power != 0.0 and self.smooth_factor is None:
            raise DomainError("a nonzero alg_power requires an explicit smooth_factor")
        sig = (self.s_hi - self.s_lo) * np.linspace(0.07, 0.93, 32)
        vals = np.asarray(self.density(self.s_lo + sig), dtype=float)
        if np.any(vals < -1e-12):
            raise InvariantViolation("density must be nonnegative on the support")
        if self.smooth_factor is not None:
            recon = sig ** self.alg_power * np.asarray(
                [float(self.smooth_factor(x)) for x in sig]
            )
            err = np.abs(recon - vals)
            if np.any(err > 1e-9 * (np.abs(vals) + 1e-300)):
                raise InvariantViolation(
                    "smooth_factor * sig**alg_power does not reproduce the density"
                )
        mass = self._quad_sigma(self.s_hi - self.s_lo)
        if not (mass > 0.0 and math.isfinite(mass)):
            raise InvariantViolation("total mass must be finite and positive")
        object.__setattr__(self, "_mass", mass)
        self._check_closed_forms()

    def _check_closed_forms(self) -> None:
        # closed forms must agree with quadrature at 10 fixed pseudo-random radii
        if self.ball_mass_fn is None and self.log_ball_mass_fn is None:
            return
        rng = np.random.default_rng(774411)
        radii = self.s_lo + (self.s_hi - self.s_lo) * rng.uniform(0.02, 0.98, size=10)
        for eps in radii:
            by_quad = self._quad_sigma(eps - self.s_lo)
            if self.ball_mass_fn is not None:
                closed = float(self.ball_mass_fn(float(eps)))
                if abs(closed - by_quad) > 1e-8 * abs(by_quad) + 1e-10 * self._mass:
                    raise InvariantViolation(
                        f"closed-form ball mass disagrees with quadrature at eps={eps!r}: "
                        f"{closed!r} vs {by_quad!r}"
                    )
            if self.log_ball_mass_fn is not None and by_quad > 0.0:
                closed_log = float(np.atleast_1d(self.log_ball_mass_fn(math.log(eps)))[0])
                if abs(closed_log - math.log(by_quad)) > 1e-7:
                    raise InvariantViolation(
                        f"closed-form log ball mass disagrees with quadrature at eps={eps!r}"
                    )

    # -- quadrature core ---------------------------------------------------

    def _quad_sigma(self, upper: float, t: float = 0.0, moment_shift: Optional[float] = None) -> float:
        """integral_0^upper sig^alg h(sig) [(shift-s_lo-sig)^2] exp(-2 t sig) dsig."""
        if upper <= 0.0:
            return 0.0
        upper = min(upper, self.s_hi - self.s_lo)
        if t > 0.0:
            upper = min(upper, _TAIL_EXPONENT / (2.0 * t))
        if self.smooth_factor is not None:
            smooth = self.smooth_factor
        else:
            smooth = lambda sig: self.density(self.s_lo + sig)
        if moment_shift is None:
            f = lambda sig: float(smooth(sig)) * math.exp(-2.0 * t * sig)
        else:
            c = moment_shift - self.s_lo
            f = lambda sig: float(smooth(sig)) * (c - sig) ** 2 * math.exp(-2.0 * t * sig)
        # roundoff warnings on extreme-decay integrands are expected; accuracy
        # is policed through the returned error estimate instead
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            if self.alg_power != 0.0:
                val, err = integrate.quad(
                    f, 0.0, upper, weight="alg", wvar=(self.alg_power, 0.0),
                    epsabs=0.0, epsrel=_QUAD_RELTOL, limit=_QUAD_LIMIT,
                )
            else:
                pts = None
                if self.quad_breaks is not None:
                    inner = self.quad_breaks - self.s_lo
                    inner = inner[(inner > 0.0) & (inner < upper)]
                    pts = inner if inner.size else None
                val, err = integrate.quad(
                    f, 0.0, upper, points=pts,
                    epsabs=0.0, epsrel=_QUAD_RELTOL, limit=_QUAD_LIMIT,
                )
        if not math.isfinite(val) or (val != 0.0 and err > 1e-6 * abs(val)):
            raise InvariantViolation(
                f"quadrature did not converge (value {val!r}, error estimate {err!r})"
            )
        return float(val)

    # -- basic quantities ----------------------------------------------

    @property
    def mass(self) -> float:
        return float(self._mass)

    @property
    def log_mass(self) -> float:
        return math.log(self._mass)

    # -- measure operations ---------------------------------------------

    def ball_mass(self, eps: float) -> float:
        if eps <= 0.0:
            raise DomainError("ball radius must be positive")
        if eps <= self.s_lo:
            return 0.0
        if self.ball_mass_fn is not None:
            return float(self.ball_mass_fn(float(eps)))
        return self._quad_sigma(eps - self.s_lo)

    def log_ball_mass(self, log_eps):
        arr = np.asarray(log_eps, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if self.log_ball_mass_fn is not None:
            out = np.asarray(self.log_ball_mass_fn(arr), dtype=float)
        else:
            with np.errstate(divide="ignore"):
                out = np.array([
                    np.log(self.ball_mass(float(np.exp(le)))) if np.exp(le) > 0.0 else -np.inf
                    for le in arr
                ])
        return _as_scalar_or_array(out, scalar)

    def log_laplace(self, t):
        """ln integral exp(2 t lambda) dmu; the e^{-2 t s_lo} prefactor is
        carried analytically so supports far from 0 stay representable."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        out = np.empty(t_arr.shape)
        for i, ti in enumerate(t_arr):
            val = self._quad_sigma(self.s_hi - self.s_lo, t=float(ti))
            with np.errstate(divide="ignore"):
                out[i] = -2.0 * float(ti) * self.s_lo + np.log(val)
        return _as_scalar_or_array(out, scalar)

    def log_laplace_moment(self, t: float, shift: float = 0.0) -> float:
        val = self._quad_sigma(self.s_hi - self.s_lo, t=t, moment_shift=shift)
        with np.errstate(divide="ignore"):
            return float(-2.0 * t * self.s_lo + np.log(val))

    def describe(self) -> str:
        return f"density kind={self.kind} support=[{self.s_lo!r},{self.s_hi!r}] mass={self.mass!r}"

    # -- serialization ----------------------------------------------------

    def to_text(self) -> str:
        head = (
            f"density kind={self.kind} support={self.s_lo!r},{self.s_hi!r} "
            f"mass={self.mass!r}"
        )
        lines = [head]
        if self.kind == "sampled-density":
            grid = self.params["grid"]
            vals = self.params["values"]
            lines.append(f"n={len(grid)}")
            for s, v in zip(grid, vals):
                lines.append(f"{float(s)!r} {float(v)!r}")
        else:
            for key, val in sorted(self.params.items()):
                lines.append(f"{key}={float(val)!r}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# constructors for the standard density families
# ---------------------------------------------------------------------------


def power_law_measure(gamma: float) -> DensityMeasure:
    """Measure on [0, 1] with the exact ball-mass law mu(B(0,eps)) = eps**gamma.

    The density is gamma * s**(gamma-1); the closed-form log ball mass
    gamma * min(ln eps, 0) is exact at every scale.
    """
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise DomainError("gamma must be positive and finite")
    g = float(gamma)
    return DensityMeasure(
        s_lo=0.0,
        s_hi=1.0,
        density=lambda s: g * np.asarray(s, dtype=float) ** (g - 1.0),
        kind="power-law",
        params={"gamma": g},
        ball_mass_fn=lambda eps: min(eps, 1.0) ** g,
        log_ball_mass_fn=lambda le: g * np.minimum(np.asarray(le, dtype=float), 0.0),
        alg_power=g - 1.0,
        smooth_factor=(lambda sig: g) if g != 1.0 else None,
    )


def monomial_profile_measure(delta: float) -> DensityMeasure:
    """Measure with density s**(2 delta) on [0, 1].

    This is the spectral measure of the vector with profile y**delta
    (restricted to [0, 1]) under the multiplication generator; the ball
    mass is eps**(2 delta + 1) / (2 delta + 1) for eps <= 1.
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise DomainError("delta must be positive and finite")
    d = float(delta)
    p = 2.0 * d + 1.0

    def _ball(eps: float) -> float:
        return min(eps, 1.0) ** p / p

    def _log_ball(le):
        return p * np.minimum(np.asarray(le, dtype=float), 0.0) - math.log(p)

    return DensityMeasure(
        s_lo=0.0,
        s_hi=1.0,
        density=lambda s: np.asarray(s, dtype=float) ** (2.0 * d),
        kind="monomial-profile",
        params={"delta": d},
        ball_mass_fn=_ball,
        log_ball_mass_fn=_log_ball,
        alg_power=2.0 * d,
        smooth_factor=lambda sig: 1.0,
    )


def uniform_measure(s_lo: float, s_hi: float, height: float = 1.0) -> DensityMeasure:
    """Constant density ``height`` on [s_lo, s_hi] in the distance coordinate."""
    if height <= 0.0 or not math.isfinite(height):
        raise DomainError("height must be positive and finite")
    lo, hi, h = float(s_lo), float(s_hi), float(height)

    def _ball(eps: float) -> float:
        return h * max(0.0, min(eps, hi) - lo)

    def _log_ball(le):
        le = np.asarray(le, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(
                np.exp(le) > lo,
                np.log(h * np.maximum(np.minimum(np.exp(le), hi) - lo, 0.0)),
                -np.inf,
            )

    return DensityMeasure(
        s_lo=lo,
        s_hi=hi,
        density=lambda s: np.full_like(np.asarray(s, dtype=float), h),
        kind="uniform",
        params={"height": h},
        ball_mass_fn=_ball,
        log_ball_mass_fn=_log_ball,
    )


def sampled_density_measure(s_grid: Sequence[float], values: Sequence[float]) -> DensityMeasure:
    """Piecewise-linear density through the given (s, value) samples."""
    grid = np.asarray(s_grid, dtype=float).ravel()
    vals = np.asarray(values, dtype=float).ravel()
    if grid.size != vals.size or grid.size < 2:
        raise DomainError("need matching sample arrays with at least 2 points")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("sample grid must be strictly increasing")
    if grid[0] < 0.0:
        raise DomainError("sample grid must lie in s >= 0")
    if np.any(vals < 0.0) or np.any(~np.isfinite(vals)):
        raise InvariantViolation("density samples must be finite and nonnegative")
    # cumulative trapezoid at the nodes = exact integral of the interpolant
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(grid))])

    def _ball(eps: float) -> float:
        if eps <= grid[0]:
            return 0.0
        if eps >= grid[-1]:
            return float(cum[-1])
        j = int(np.searchsorted(grid, eps, side="right") - 1)
        ds = eps - grid[j]
        v_eps = vals[j] + (vals[j + 1] - vals[j]) * ds / (grid[j + 1] - grid[j])
        return float(cum[j] + 0.5 * (vals[j] + v_eps) * ds)

    return DensityMeasure(
        s_lo=float(grid[0]),
        s_hi=float(grid[-1]),
        density=lambda s: np.interp(np.asarray(s, dtype=float), grid, vals),
        kind="sampled-density",
        params={"grid": grid, "values": vals},
        ball_mass_fn=_ball,
        quad_breaks=grid,
    )


def lacunary_measure(scale_base: float, exponents: Sequence[float], n_atoms: int) -> AtomicMeasure:
    """Atomic measure with super-geometrically spaced atoms accumulating at 0.

    Atoms sit at positions ``-(b ** 2**k)`` for ``k = 1..n_atoms`` with
    ``b = scale_base``; atom ``k`` gets raw weight ``|position_k| ** e_k``
    and the weights are normalized to total mass 1.  An ``exponents``
    list shorter than ``n_atoms`` is repeated cyclically.  All
    arithmetic happens in the log domain, so the construction is exact
    far beyond double-precision range (the acceptance-scale instance
    has |position| down to 2**-4096).
    """
    if not (0.0 < scale_base < 1.0):
        raise DomainError("scale_base must lie in (0, 1)")
    if n_atoms < 1:
        raise DomainError("n_atoms must be >= 1")
    if n_atoms > 900:
        raise DomainError("n_atoms above 900 exceeds the exponent range of 2.0**k")
    exps = np.asarray(exponents, dtype=float).ravel()
    if exps.size == 0:
        raise DomainError("exponents must be a nonempty list")
    if np.any(exps <= 0.0) or np.any(~np.isfinite(exps)):
        raise DomainError("exponents must be positive and finite")
    exps = np.resize(exps, n_atoms)
    ks = np.arange(1, n_atoms + 1, dtype=float)
    log_s = (2.0 ** ks) * math.log(scale_base)
    log_w = exps * log_s
    log_w = log_w - logsumexp(log_w)
    return AtomicMeasure(log_s=log_s, log_w=log_w)


# ---------------------------------------------------------------------------
# scaling exponents at 0
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingExponentEstimate:
    """Finite-window estimate of the scaling exponents of mu at 0.

    ``d_minus``/``d_plus`` are the min/max of the two-point log-log
    increments of the ball mass between consecutive scales of the
    geometric grid; increments cancel constant prefactors in the
    ball-mass law exactly, which per-scale ratios do not.  The raw
    per-scale ratios ``ln mu(B(0,eps_j)) / ln eps_j`` are kept in
    ``ratios`` (and as ``per_scale_ratios`` pairs) so callers can
    inspect convergence.  Scales with an empty ball contribute +inf to
    both estimates and to their ratio; ``convention_branch`` records
    whether that convention fired anywhere in the window.
    """

    d_minus: float
    d_plus: float
    scale_range: tuple
    log_scale_range: tuple
    n_scales: int
    log_eps: np.ndarray
    log_ball: np.ndarray
    slopes: np.ndarray
    ratios: np.ndarray
    convention_branch: bool

    def __post_init__(self) -> None:
        if not self.d_minus <= self.d_plus:
            raise InvariantViolation("d_minus must not exceed d_plus")
        for arr in (self.log_eps, self.log_ball, self.slopes, self.ratios):
            np.asarray(arr).setflags(write=False)

    @property
    def per_scale_ratios(self):
        """List of (eps_j, ratio_j); eps_j underflows to 0.0 below 1e-308."""
        return [(float(np.exp(le)), float(r)) for le, r in zip(self.log_eps, self.ratios)]


def scaling_exponents(
    mu,
    eps_min: Optional[float] = None,
    eps_max: Optional[float] = None,
    n_scales: int = 20,
    *,
    log_window: Optional[tuple] = None,
) -> ScalingExponentEstimate:
    """Estimate the lower/upper scaling exponents of ``mu`` at 0.

    The window may be given on linear scale (``0 < eps_min < eps_max < 1``)
    or, for scales below double-precision range, directly as natural
    logs via ``log_window=(ln eps_min, ln eps_max)``.
    """
    if int(n_scales) != n_scales or n_scales < 2:
        raise DomainError("n_scales must be an integer >= 2")
    n_scales = int(n_scales)
    if log_window is not None:
        lmin, lmax = float(log_window[0]), float(log_window[1])
        if not (lmin < lmax < 0.0) or not math.isfinite(lmin):
            raise DomainError("log window must satisfy -inf < lmin < lmax < 0")
    else:
        if eps_min is None or eps_max is None:
            raise DomainError("either a linear window or log_window is required")
        if not (0.0 < eps_min < eps_max < 1.0):
            raise DomainError("window must satisfy 0 < eps_min < eps_max < 1")
        lmin, lmax = math.log(eps_min), math.log(eps_max)
    log_eps = np.linspace(lmin, lmax, n_scales)
    log_ball = np.atleast_1d(np.asarray(mu.log_ball_mass(log_eps), dtype=float))
    ratios = log_ball / log_eps  # log_eps < 0; -inf/neg = +inf, no NaN
    with np.errstate(invalid="ignore"):
        slopes = np.diff(log_ball) / np.diff(log_eps)
    slopes = np.where(np.isnan(slopes), np.inf, slopes)  # empty-to-empty scales
    return ScalingExponentEstimate(
        d_minus=float(np.min(slopes)),
        d_plus=float(np.max(slopes)),
        scale_range=(float(np.exp(lmin)), float(np.exp(lmax))),
        log_scale_range=(lmin, lmax),
        n_scales=n_scales,
        log_eps=log_eps,
        log_ball=log_ball,
        slopes=slopes,
        ratios=ratios,
        convention_branch=bool(np.any(np.isneginf(log_ball))),
    )


# ---------------------------------------------------------------------------
# free-function API over both representations
# ---------------------------------------------------------------------------


def ball_mass(mu, eps: float) -> float:
    """mu({lambda : |lambda| < eps}) for eps > 0."""
    if not eps > 0.0:
        raise DomainError("ball radius must be positive")
    return mu.ball_mass(float(eps))


def log_ball_mass(mu, log_eps):
    """ln of the open-ball mass, vectorized over ln(eps)."""
    return mu.log_ball_mass(log_eps)


def laplace_norm_sq(mu, t: float, log_domain: bool = False) -> float:
    """integral exp(2 t lambda) dmu(lambda) = ||exp(tA) x||^2 for mu = mu_x."""
    if t < 0.0 or not math.isfinite(t):
        raise DomainError("t must be finite and >= 0")
    log_val = float(mu.log_laplace(float(t)))
    return log_val if log_domain else float(math.exp(log_val)) if log_val > -745.0 else 0.0


def laplace_moment(mu, t: float, shift: float = 0.0, log_domain: bool = False) -> float:
    """integral (lambda + shift)^2 exp(2 t lambda) dmu(lambda).

    With shift = 0 this is the squared orbit norm of u = Ax; with
    shift = a it is the squared orbit norm of u = (A + a)x.
    """
    if t < 0.0 or not math.isfinite(t):
        raise DomainError("t must be finite and >= 0")
    log_val = float(mu.log_laplace_moment(float(t), shift=float(shift)))
    return log_val if log_domain else float(math.exp(log_val)) if log_val > -745.0 else 0.0


# ---------------------------------------------------------------------------
# plain-text serialization
# ---------------------------------------------------------------------------


def _parse_header(line: str) -> tuple:
    parts = line.split()
    if not parts:
        raise DomainError("empty measure header")
    kind = parts[0]
    fields = {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise DomainError(f"malformed header token: {tok!r}")
        key, val = tok.split("=", 1)
        fields[key] = val
    return kind, fields


def measure_to_text(mu) -> str:
    return mu.to_text()


def measure_from_text(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DomainError("empty measure file")
    kind, head = _parse_header(lines[0])
    body = lines[1:]
    if kind == "atomic":
        return AtomicMeasure.from_text_lines(head, body)
    if kind != "density":
        raise DomainError(f"unknown measure kind: {kind!r}")
    dkind = head.get("kind")
    params = {}
    kv_lines = []
    for ln in body:
        kv_lines.append(ln)
    if dkind == "sampled-density":
        n = int(kv_lines[0].split("=", 1)[1])
        samples = kv_lines[1:]
        if len(samples) != n:
            raise DomainError(f"expected {n} sample lines, found {len(samples)}")
        grid = np.empty(n)
        vals = np.empty(n)
        for i, ln in enumerate(samples):
            a, b = ln.split()
            grid[i] = float(a)
            vals[i] = float(b)
        return sampled_density_measure(grid, vals)
    for ln in kv_lines:
        if "=" not in ln:
            raise DomainError(f"malformed parameter line: {ln!r}")
        key, val = ln.split("=", 1)
        params[key.strip()] = float(val)
    if dkind == "power-law":
        return power_law_measure(params["gamma"])
    if dkind == "monomial-profile":
        return monomial_profile_measure(params["delta"])
    if dkind == "uniform":
        lo, hi = head["support"].split(",")
        return uniform_measure(float(lo), float(hi), params.get("height", 1.0))
    raise DomainError(f"unknown density kind: {dkind!r}")


def save_measure(mu, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(measure_to_text(mu))


def load_measure(path):
    with open(path, "r", encoding="ascii") as fh:
        return measure_from_text(fh.read())
