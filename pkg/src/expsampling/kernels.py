"""Kernels for exponential sampling and their max-product moment diagnostics.

A kernel is a bounded function chi on the positive reals, evaluated on the
exponentially shifted lattice chi(e^{-k} u).  All built-in kernels are defined
through their log-domain profile chi(e^t), which keeps compact supports exact
and avoids exp/log round trips inside the operators.

The moment scanners exploit periodicity: the supremum over u > 0 of any
lattice join collapses to one period of the fractional part of log u, so a
uniform grid on [0, 1) resolves it up to grid spacing.

Kernels are immutable after construction and safe to share across threads;
every scan is a pure function of its arguments with deterministic reductions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DivergentMomentError

__all__ = [
    "Kernel",
    "ScanPolicy",
    "Tolerances",
    "MomentEstimate",
    "MomentReport",
    "mellin_bspline",
    "mellin_gaussian",
    "lin_kernel",
    "discrete_absolute_moment",
    "discrete_absolute_moment_estimate",
    "algebraic_moment",
    "algebraic_moment_profile",
    "algebraic_moment_variation",
    "eta_lower_bound",
    "check_kernel_conditions",
    "KERNELS",
    "get_kernel",
    "register_kernel",
]

_CHUNK = 256  # max lattice rows materialised per scan block


def sinc(t):
    """sin(pi t)/(pi t) with exact zeros at nonzero integers.

    Evaluates through the reduced argument r = t - round(t) so that lattice
    points come out as exact IEEE zeros, which the interpolation identities
    of the classical series rely on.
    """
    t = np.asarray(t, dtype=float)
    n = np.round(t)
    r = t - n
    sign = np.where(np.mod(n, 2.0) == 0.0, 1.0, -1.0)
    num = np.sin(np.pi * r) * sign
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(t == 0.0, 1.0, num / (np.pi * t))
    return out


@dataclass(frozen=True)
class Kernel:
    """An evaluable kernel with its lattice metadata.

    `log_profile` is chi(e^t) as a function of t; `evaluate` exposes the
    x-domain view chi(x).  `log_support_radius` is R with chi(e^t) = 0 for
    |t| > R (None for kernels without compact log-support), and `claimed_mu`
    is the largest absolute-moment order the kernel is claimed to possess
    (math.inf when every order is finite).
    """

    name: str
    log_profile: Callable[[np.ndarray], np.ndarray]
    log_support_radius: Optional[float]
    claimed_mu: float
    description: str = ""

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0.0):
            raise ValueError("kernel argument must be positive")
        out = self.log_profile(np.log(x))
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ScanPolicy:
    """Controls the lattice scans behind the moment estimators.

    `u_points` is the resolution of the fractional-part grid for log u.
    `window_half_width` pins the k-window; when None, compact kernels get
    ceil(R) + 1 and non-compact kernels double from `initial_half_width`
    until the estimate settles below `convergence_tol` or the divergence
    heuristic fires (growth by `divergence_factor` on `divergence_streak`
    consecutive doublings).
    """

    u_points: int = 4096
    window_half_width: Optional[int] = None
    initial_half_width: int = 8
    max_half_width: int = 2048
    convergence_tol: float = 1e-12
    divergence_factor: float = 1.5
    divergence_streak: int = 3


@dataclass(frozen=True)
class Tolerances:
    """Verdict thresholds for the kernel condition checker."""

    eta_min: float = 0.0
    chi3_rel: float = 1e-9
    eta_grid_points: int = 4097


@dataclass(frozen=True)
class MomentEstimate:
    """A scanned absolute moment with its witness and truncation diagnostics."""

    order: float
    value: float
    witness_u: float
    witness_k: int
    half_width: int
    tail_bound: float
    converged: bool = True


@dataclass
class MomentReport:
    """Outcome of the kernel condition checks with diagnostics.

    `absolute_moments` maps the scanned orders to their estimates (divergent
    orders are absent and explained in `diagnostics`).  `eta` is the infimum
    of chi over [1, e].  `algebraic_moment_variation` maps each polynomial
    order j to the (min, max) of the signed lattice join over the u-scan.
    """

    kernel_name: str
    absolute_moments: dict = field(default_factory=dict)
    eta: float = 0.0
    algebraic_moment_variation: dict = field(default_factory=dict)
    chi1_holds: bool = False
    chi2_holds: bool = False
    chi3_holds: bool = False
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kernel_name": self.kernel_name,
            "absolute_moments": {f"{k:g}": v for k, v in sorted(self.absolute_moments.items())},
            "eta": self.eta,
            "algebraic_moment_variation": {
                str(j): [lo, hi] for j, (lo, hi) in sorted(self.algebraic_moment_variation.items())
            },
            "chi1_holds": self.chi1_holds,
            "chi2_holds": self.chi2_holds,
            "chi3_holds": self.chi3_holds,
            "diagnostics": dict(sorted(self.diagnostics.items())),
        }


# --------------------------------------------------------------------------
# built-in kernels
# --------------------------------------------------------------------------


def _cardinal_bspline(s, order: int):
    """Cardinal B-spline N_order on [0, order), by the Cox-de Boor recurrence."""
    s = np.asarray(s, dtype=float)
    if order == 1:
        return ((s >= 0.0) & (s < 1.0)).astype(float)
    m = order - 1
    return (s * _cardinal_bspline(s, m) + (order - s) * _cardinal_bspline(s - 1.0, m)) / m


def mellin_bspline(order: int) -> Kernel:
    """Kernel x -> B_n(log x) for the centered cardinal B-spline of order n.

    Support in the log domain is [-n/2, n/2]; all absolute moments are finite.
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= 6:
        raise ValueError(f"B-spline order must be an integer in 1..6, got {order!r}")
    order = int(order)
    half = order / 2.0

    def profile(t, _n=order, _h=half):
        return _cardinal_bspline(np.asarray(t, dtype=float) + _h, _n)

    return Kernel(
        name=f"bspline{order}",
        log_profile=profile,
        log_support_radius=half,
        claimed_mu=math.inf,
        description=f"centered cardinal B-spline of order {order} in log x",
    )


def _fmt_param(v: float) -> str:
    return f"{v:g}".replace("-", "m").replace(".", "")


def mellin_gaussian(shape: float) -> Kernel:
    """Kernel x -> exp(-shape * log(x)^2); non-compact, all moments finite."""
    if not shape > 0.0:
        raise ValueError(f"gaussian shape must be positive, got {shape!r}")
    shape = float(shape)

    def profile(t, _a=shape):
        return np.exp(-_a * np.square(np.asarray(t, dtype=float)))

    return Kernel(
        name=f"gauss{_fmt_param(shape)}",
        log_profile=profile,
        log_support_radius=None,
        claimed_mu=math.inf,
        description=f"log-domain Gaussian exp(-{shape:g} log^2 x)",
    )


def lin_kernel(c: float) -> Kernel:
    """Kernel x -> x^{-c} sinc(log x) with the continuous extension to 1 at x=1.

    Only the order-zero absolute moment is claimed: on the shifted lattice the
    products |chi| * |k - log u|^nu grow without bound for nu > 1.
    """
    c = float(c)

    def profile(t, _c=c):
        t = np.asarray(t, dtype=float)
        sc = sinc(t)
        # skip the exponential where sinc vanished exactly; elsewhere the
        # product may legitimately overflow (the kernel is unbounded for c != 0)
        with np.errstate(over="ignore"):
            damp = np.exp(-_c * np.where(sc == 0.0, 0.0, t))
        return damp * sc

    return Kernel(
        name=f"linc{_fmt_param(c)}",
        log_profile=profile,
        log_support_radius=None,
        claimed_mu=0.0,
        description=f"damped sinc kernel x^(-c) sinc(log x) with c={c:g}",
    )


# --------------------------------------------------------------------------
# moments
# --------------------------------------------------------------------------


def _frac_grid(n: int) -> np.ndarray:
    return np.arange(n, dtype=float) / n


def _block_max(kernel: Kernel, nu: float, vs: np.ndarray, ks: np.ndarray):
    """Max of |chi(e^{v-k})| |k - v|^nu over ks x vs, with the arg-maximising pair."""
    best = -np.inf
    best_v = vs[0]
    best_k = int(ks[0]) if len(ks) else 0
    for lo in range(0, len(ks), _CHUNK):
        kb = ks[lo : lo + _CHUNK]
        t = vs[None, :] - kb[:, None]
        vals = np.abs(kernel.log_profile(t)) * np.abs(t) ** nu
        i = int(np.argmax(vals))
        m = float(vals.flat[i])
        if m > best:
            best = m
            r, cidx = divmod(i, vals.shape[1])
            best_v = float(vs[cidx])
            best_k = int(kb[r])
    return best, best_v, best_k


def _tail_probe(kernel: Kernel, nu: float, start: float, span: float = 16.0, points: int = 4096) -> float:
    """Estimate sup over |t| >= start of |chi(e^t)| |t|^nu by a dense boundary scan."""
    ts = np.linspace(start, start + span, points)
    vals = np.abs(kernel.log_profile(ts)) * ts**nu
    vals_neg = np.abs(kernel.log_profile(-ts)) * ts**nu
    return float(max(vals.max(), vals_neg.max()))


def discrete_absolute_moment_estimate(
    kernel: Kernel, nu: float, scan: ScanPolicy = ScanPolicy()
) -> MomentEstimate:
    """Scan the discrete absolute moment of order nu in the max-product sense.

    The scanned quantity is sup over u > 0 of the lattice join over k of
    |chi(e^{-k} u)| |k - log u|^nu.  For compact kernels a window of
    ceil(R) + 1 makes the estimate exact up to the u-grid spacing; otherwise
    the window doubles until convergence, and the returned `tail_bound`
    reports the scanned decay of the integrand beyond the final window.

    Raises DivergentMomentError (with the witnessing u and k) when the
    running estimate keeps growing under window doublings.
    """
    if nu < 0.0:
        raise ValueError("moment order must be nonnegative")
    vs = _frac_grid(scan.u_points)

    if scan.window_half_width is not None:
        w = int(scan.window_half_width)
    elif kernel.log_support_radius is not None:
        w = int(math.ceil(kernel.log_support_radius)) + 1
    else:
        w = None

    if w is not None:
        ks = np.arange(-w, w + 1)
        value, v_star, k_star = _block_max(kernel, nu, vs, ks)
        compact = (
            kernel.log_support_radius is not None and w >= kernel.log_support_radius
        )
        tail = 0.0 if compact else _tail_probe(kernel, nu, float(w))
        return MomentEstimate(nu, value, math.exp(v_star), k_star, w, tail)

    # non-compact kernel: double the window until the estimate settles
    w = scan.initial_half_width
    ks = np.arange(-w, w + 1)
    value, v_star, k_star = _block_max(kernel, nu, vs, ks)
    streak = 0
    while w < scan.max_half_width:
        new_w = 2 * w
        ring = np.concatenate([np.arange(-new_w, -w), np.arange(w + 1, new_w + 1)])
        ring_max, rv, rk = _block_max(kernel, nu, vs, ring)
        new_value = max(value, ring_max)
        if ring_max > value:
            v_star, k_star = rv, rk
        growth = new_value / value if value > 0.0 else 1.0
        streak = streak + 1 if growth >= scan.divergence_factor else 0
        if streak >= scan.divergence_streak:
            raise DivergentMomentError(
                f"absolute moment of order {nu:g} for kernel '{kernel.name}' grows "
                f"without bound (estimate {new_value:.6g} at half-width {new_w})",
                witness_u=math.exp(v_star),
                witness_k=k_star,
                order=nu,
            )
        settled = abs(new_value - value) < scan.convergence_tol * max(1.0, new_value)
        value, w = new_value, new_w
        if settled:
            return MomentEstimate(nu, value, math.exp(v_star), k_star, w, _tail_probe(kernel, nu, float(w)))
    tail = _tail_probe(kernel, nu, float(w))
    return MomentEstimate(nu, value, math.exp(v_star), k_star, w, tail, converged=False)


def discrete_absolute_moment(kernel: Kernel, nu: float, scan: ScanPolicy = ScanPolicy()) -> float:
    """The moment estimate alone; see `discrete_absolute_moment_estimate`."""
    return discrete_absolute_moment_estimate(kernel, nu, scan).value


def _algebraic_join(kernel: Kernel, j: int, vs: np.ndarray, ks: np.ndarray, absolute: bool) -> np.ndarray:
    """Join over ks of chi(e^{v-k}) (k - v)^j for each v (signed by default)."""
    out = np.full(vs.shape, -np.inf)
    for lo in range(0, len(ks), _CHUNK):
        kb = ks[lo : lo + _CHUNK]
        t = vs[None, :] - kb[:, None]
        chi = kernel.log_profile(t)
        poly = (-t) ** j  # (k - v)^j
        vals = np.abs(chi) * np.abs(poly) if absolute else chi * poly
        out = np.maximum(out, vals.max(axis=0))
    return out


def _algebraic_window(kernel: Kernel, j: int, scan: ScanPolicy, v_lo: float, v_hi: float):
    if scan.window_half_width is not None:
        return int(scan.window_half_width)
    if kernel.log_support_radius is not None:
        return int(math.ceil(kernel.log_support_radius)) + 1
    return None


def algebraic_moment(
    kernel: Kernel,
    j: int,
    u: float,
    scan: ScanPolicy = ScanPolicy(),
    absolute: bool = False,
) -> float:
    """Signed lattice join over k of chi(e^{-k} u) (k - log u)^j.

    The join is taken of the signed products exactly as the operator
    expansion uses them; `absolute=True` switches to |chi| |k - log u|^j for
    the companion variant.
    """
    if j < 0 or int(j) != j:
        raise ValueError("polynomial order j must be a nonnegative integer")
    if not u > 0.0:
        raise ValueError("u must be positive")
    j = int(j)
    v = math.log(u)
    vs = np.array([v])
    w = _algebraic_window(kernel, j, scan, v, v)
    if w is not None:
        ks = np.arange(math.floor(v) - w, math.floor(v) + w + 2)
        return float(_algebraic_join(kernel, j, vs, ks, absolute)[0])

    # non-compact: widen until settled or growth detected
    w = scan.initial_half_width
    ks = np.arange(math.floor(v) - w, math.floor(v) + w + 2)
    value = float(_algebraic_join(kernel, j, vs, ks, absolute)[0])
    streak = 0
    while w < scan.max_half_width:
        new_w = 2 * w
        ring = np.concatenate(
            [
                np.arange(math.floor(v) - new_w, math.floor(v) - w),
                np.arange(math.floor(v) + w + 2, math.floor(v) + new_w + 2),
            ]
        )
        ring_val = float(_algebraic_join(kernel, j, vs, ring, absolute)[0])
        new_value = max(value, ring_val)
        scale = max(abs(value), 1e-300)
        growth = abs(new_value) / scale if abs(new_value) > scale else 1.0
        streak = streak + 1 if growth >= scan.divergence_factor else 0
        if streak >= scan.divergence_streak:
            raise DivergentMomentError(
                f"algebraic moment of order {j} for kernel '{kernel.name}' grows without bound",
                witness_u=u,
                witness_k=int(ring[0]),
                order=float(j),
            )
        settled = abs(new_value - value) < scan.convergence_tol * max(1.0, abs(new_value))
        value, w = new_value, new_w
        if settled:
            break
    return value


def algebraic_moment_profile(
    kernel: Kernel,
    j: int,
    scan: ScanPolicy = ScanPolicy(),
    absolute: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Values of the order-j algebraic moment over one period of log u.

    Returns (log_u_grid, values); the spread of `values` quantifies how far
    the kernel is from having lattice-invariant algebraic moments.
    """
    vs = _frac_grid(scan.u_points)
    w = _algebraic_window(kernel, j, scan, 0.0, 1.0)
    if w is None:
        w = scan.initial_half_width
        prev = None
        streak = 0
        while True:
            ks = np.arange(-w, w + 2)
            vals = _algebraic_join(kernel, j, vs, ks, absolute)
            peak = float(np.max(np.abs(vals)))
            if not np.all(np.isfinite(vals)):
                raise DivergentMomentError(
                    f"algebraic moment of order {j} for kernel '{kernel.name}' "
                    "overflows under window widening",
                    witness_u=math.exp(float(vs[int(np.argmax(np.abs(vals)))])),
                    witness_k=-w,
                    order=float(j),
                )
            if prev is not None:
                if np.max(np.abs(vals - prev)) < scan.convergence_tol * max(1.0, peak):
                    break
                prev_peak = float(np.max(np.abs(prev)))
                growth = peak / prev_peak if prev_peak > 0.0 else 1.0
                streak = streak + 1 if growth >= scan.divergence_factor else 0
                if streak >= scan.divergence_streak:
                    raise DivergentMomentError(
                        f"algebraic moment of order {j} for kernel '{kernel.name}' "
                        "grows without bound over the u-scan",
                        witness_u=math.exp(float(vs[int(np.argmax(np.abs(vals)))])),
                        witness_k=-w,
                        order=float(j),
                    )
            if w >= scan.max_half_width:
                break
            prev, w = vals, 2 * w
        return vs, vals
    ks = np.arange(-w, w + 2)
    return vs, _algebraic_join(kernel, j, vs, ks, absolute)


def algebraic_moment_variation(
    kernel: Kernel, j: int, scan: ScanPolicy = ScanPolicy(), absolute: bool = False
) -> tuple[float, float]:
    """(min, max) of the order-j algebraic moment over the u-scan."""
    _, vals = algebraic_moment_profile(kernel, j, scan, absolute)
    return float(vals.min()), float(vals.max())


def eta_lower_bound(kernel: Kernel, grid_points: int = 4097) -> float:
    """Minimum of chi over a uniform log-grid on [1, e], endpoints included."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    ts = np.linspace(0.0, 1.0, grid_points)
    return float(np.min(kernel.log_profile(ts)))


def check_kernel_conditions(
    kernel: Kernel,
    mu: float,
    r: int,
    tol: Tolerances = Tolerances(),
    scan: ScanPolicy = ScanPolicy(),
) -> MomentReport:
    """Run the three kernel condition checks and assemble a MomentReport.

    chi1: the absolute moment of order mu is finite under the divergence test.
    chi2: the infimum of chi over [1, e] exceeds `tol.eta_min`.
    chi3: for every j <= r the signed algebraic moment varies over the u-scan
          by at most chi3_rel * (1 + |max|).

    Failed conditions are verdicts with diagnostics, never exceptions.
    """
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    if r < 0:
        raise ValueError("r must be nonnegative")
    report = MomentReport(kernel_name=kernel.name)

    orders = sorted({0.0, 1.0, 2.0, float(mu)})
    chi1 = True
    for nu in orders:
        try:
            est = discrete_absolute_moment_estimate(kernel, nu, scan)
        except DivergentMomentError as exc:
            if nu == float(mu):
                chi1 = False
                report.diagnostics["chi1"] = (
                    f"m_{mu:g} divergent: witness u={exc.witness_u:.6g}, k={exc.witness_k}"
                )
            report.diagnostics[f"m_{nu:g}"] = (
                f"divergent (witness u={exc.witness_u:.6g}, k={exc.witness_k})"
            )
            continue
        if nu == float(mu) and not est.converged:
            chi1 = False
            report.diagnostics["chi1"] = (
                f"m_{mu:g} did not settle within half-width {est.half_width}"
            )
        report.absolute_moments[nu] = est.value
    if chi1 and "chi1" not in report.diagnostics:
        report.diagnostics["chi1"] = f"m_{mu:g} finite: {report.absolute_moments[float(mu)]:.12g}"
    report.chi1_holds = chi1

    report.eta = eta_lower_bound(kernel, tol.eta_grid_points)
    report.chi2_holds = report.eta > tol.eta_min
    report.diagnostics["chi2"] = (
        f"inf over [1,e] = {report.eta:.12g} "
        f"({'positive' if report.chi2_holds else 'not above ' + format(tol.eta_min, 'g')})"
    )

    chi3 = True
    worst = ""
    for j in range(r + 1):
        try:
            lo, hi = algebraic_moment_variation(kernel, j, scan)
        except DivergentMomentError as exc:
            chi3 = False
            worst = f"order {j} divergent at u={exc.witness_u:.6g}"
            break
        report.algebraic_moment_variation[j] = (lo, hi)
        if hi - lo > tol.chi3_rel * (1.0 + abs(hi)):
            chi3 = False
            if not worst:
                worst = f"order {j} varies by {hi - lo:.6g} over the u-scan"
    report.chi3_holds = chi3
    report.diagnostics["chi3"] = worst if worst else f"orders 0..{r} lattice-invariant"
    return report


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

KERNELS: dict[str, Kernel] = {}


def register_kernel(kernel: Kernel) -> Kernel:
    KERNELS[kernel.name] = kernel
    return kernel


for _n in (1, 2, 3, 4, 5):
    register_kernel(mellin_bspline(_n))
register_kernel(mellin_gaussian(1.0))
register_kernel(mellin_gaussian(0.5))
register_kernel(lin_kernel(0.0))
register_kernel(lin_kernel(1.0))


def get_kernel(name: str) -> Kernel:
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel '{name}'; registered: {', '.join(sorted(KERNELS))}"
        ) from None
