"""Connect solver output to the anomaly expansions.

Total transmission and total reflection occur, for the discrete model exactly
as for the continuum one, at extrema of |T|^2(omega); discretization only
shifts where the curves lie, not whether the extremes are attained.  Extrema
are therefore refined on |T|^2 rather than by root-finding on complex T.  The
two extremal frequencies per kappa are fitted jointly by the quadratics

    omega_T1(kappa) = omega0 - ell1*kt - r2*kt^2      (total transmission)
    omega_T0(kappa) = omega0 - ell1*kt - t2*kt^2      (total reflection)

sharing the linear coefficient: the curves are tangent at kappa0, so the
common slope is exact structure rather than a fitting choice.
Background magnitudes come from the transmittance plateau at kappa0, where
|T|^2 is flat through the mode frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import ConvergenceError
from .harmonics import in_diamond
from .modes import trace_dispersion
from .scatter import TransmittanceMap
from .structure import Medium, SlabStructure

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ExtremalPoint:
    """Polished |T|^2 extrema of one anomaly at a fixed kappa."""

    kappa: float
    omega_T1: float   # |T|^2 maximum (total-transmission branch)
    omega_T0: float   # |T|^2 minimum (total-reflection branch)
    Tmax: float
    Tmin: float
    polish_iterations: int


@dataclass(frozen=True)
class AnomalyFit:
    kappa0: float
    omega0: float
    ell1_hat: float
    r2_hat: float
    t2_hat: float
    r0_hat: float
    t0_hat: float
    residual: float


@dataclass(frozen=True)
class ExtremalCurve:
    """Continuation of one extremal branch; points are (kappa, omega, |T|^2)."""

    which: str
    points: tuple[tuple[float, float, float], ...]
    termination: str


class ExtremaResult(NamedTuple):
    omega_T1: float
    omega_T0: float
    Tmax: float
    Tmin: float
    polish_iterations: int


def _golden_extremum(f, a: float, b: float, xtol: float, maximize: bool):
    """Golden-section search on [a, b]; returns (x, f(x), evaluations)."""
    sgn = 1.0 if maximize else -1.0
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = sgn * f(c)
    fd = sgn * f(d)
    evals = 2
    while (b - a) > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = sgn * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = sgn * f(d)
        evals += 1
    if fc > fd:
        return c, sgn * fc, evals
    return d, sgn * fd, evals


def locate_extrema(transmittance: Callable[[float], float],
                   bracket: tuple[float, float], *, coarse: int = 121,
                   xtol_factor: float = 1e-12) -> ExtremaResult:
    """Refine the interior maximum and minimum of |T|^2 inside a bracket.

    The bracket must contain exactly one peak-dip pair (caller-supplied from a
    coarse sweep).  Each extremum is polished by golden section to a frequency
    tolerance xtol_factor * |bracket|.

    Raises ConvergenceError when no interior extremum exists (e.g. constant or
    monotone transmittance).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not hi > lo:
        raise ValueError(f"empty bracket ({lo}, {hi})")
    omegas = np.linspace(lo, hi, coarse)
    values = np.array([transmittance(w) for w in omegas])
    imax = int(np.argmax(values))
    imin = int(np.argmin(values))
    if imax in (0, coarse - 1) or values[imax] <= max(values[0], values[-1]):
        raise ConvergenceError("no interior extremum: maximum sits on the bracket edge")
    if imin in (0, coarse - 1) or values[imin] >= min(values[0], values[-1]):
        raise ConvergenceError("no interior extremum: minimum sits on the bracket edge")
    xtol = xtol_factor * (hi - lo)
    w1, t1, n1 = _golden_extremum(transmittance, omegas[imax - 1], omegas[imax + 1],
                                  xtol, maximize=True)
    w0, t0, n0 = _golden_extremum(transmittance, omegas[imin - 1], omegas[imin + 1],
                                  xtol, maximize=False)
    return ExtremaResult(omega_T1=w1, omega_T0=w0, Tmax=t1, Tmin=t0,
                         polish_iterations=n1 + n0)


def fit_anomaly(extremal_points: Sequence[ExtremalPoint], kappa0: float, omega0: float,
                transmittance: Optional[Callable[[float, float], float]] = None
                ) -> AnomalyFit:
    """Joint least-squares fit of the two zero-curve quadratics.

    ell1 is shared between the branches.  When a transmittance callback
    (kappa, omega) -> |T|^2 is supplied, the background magnitudes r0, t0 are
    extracted from the plateau at kappa0, sampling both sides of the mode at
    distance 10 * |t2 - r2| * kt_max^2 and averaging; otherwise they are NaN.

    Raises ValueError on underdetermined input.
    """
    pts = list(extremal_points)
    if len(pts) < 2:
        raise ValueError("underdetermined input: need at least two extremal points")
    rows = []
    rhs = []
    for pt in pts:
        kt = pt.kappa - kappa0
        rows.append([kt, kt * kt, 0.0])
        rhs.append(omega0 - pt.omega_T1)
        rows.append([kt, 0.0, kt * kt])
        rhs.append(omega0 - pt.omega_T0)
    A = np.asarray(rows)
    y = np.asarray(rhs)
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < 3:
        raise ValueError("underdetermined input: extremal points do not fix the quadratics")
    ell1, r2, t2 = (float(c) for c in coef)
    residual = float(np.sqrt(np.mean((A @ coef - y) ** 2)))

    r0_hat = t0_hat = float("nan")
    if transmittance is not None:
        kt_max = max(abs(pt.kappa - kappa0) for pt in pts)
        delta = 10.0 * abs(t2 - r2) * kt_max * kt_max
        if delta == 0.0:
            delta = 1e-3 * max(abs(omega0), 1.0)
        samples = [transmittance(kappa0, omega0 + delta),
                   transmittance(kappa0, omega0 - delta)]
        t0_sq = min(max(float(np.mean(samples)), 0.0), 1.0)
        t0_hat = math.sqrt(t0_sq)
        r0_hat = math.sqrt(1.0 - t0_sq)
    return AnomalyFit(kappa0=kappa0, omega0=omega0, ell1_hat=ell1, r2_hat=r2,
                      t2_hat=t2, r0_hat=r0_hat, t0_hat=t0_hat, residual=residual)


#: slope threshold for declaring a vertical tangent of the extremal curve
_VERTICAL_SLOPE = 1e3


def trace_extremal_curve(target: Union[SlabStructure, Callable[[float, float], float]],
                         which: str, start: ExtremalPoint, step: float, *,
                         kappa0: float = 0.0, nx: int = 64, nz: int = 64,
                         ambient: Optional[Medium] = None,
                         xtol_factor: float = 1e-9, max_steps: int = 2000,
                         kappa_range: Optional[tuple[float, float]] = None
                         ) -> ExtremalCurve:
    """Continue one extremal branch of the anomaly in kappa.

    Steps in kappa (adaptive, halving on failure, at most 5 halvings per
    step), locating the tracked extremum of |T|^2(kappa, .) in a window
    predicted from the previous points.  The window is scaled with
    (kappa - kappa0)^2 because the peak-dip separation grows quadratically.

    Args:
        target: a SlabStructure (solved at nx x nz) or a transmittance
            callback (kappa, omega) -> |T|^2.
        which: 'total_T' follows the |T|^2 maximum, 'total_R' the minimum.
        start: extremal point to start from; step sign sets the direction.
        kappa_range: optional caller-imposed bounds; exceeding them stops the
            trace with the non-natural reason 'range_exhausted'.

    Returns:
        ExtremalCurve with termination reason in {'hit_diamond_boundary',
        'vertical_tangent_detected', 'step_failure'} (or 'range_exhausted'
        when a kappa_range is given).
    """
    if which not in ("total_T", "total_R"):
        raise ValueError(f"which must be 'total_T' or 'total_R', got {which!r}")
    if step == 0.0:
        raise ValueError("step must be nonzero")
    if isinstance(target, SlabStructure):
        tmap = TransmittanceMap(target, nx, nz)
        amb = target.ambient
        f2 = tmap
    else:
        f2 = target
        amb = ambient if ambient is not None else Medium(1.0, 1.0)

    maximize = which == "total_T"
    kappa = start.kappa
    omega = start.omega_T1 if maximize else start.omega_T0
    value = start.Tmax if maximize else start.Tmin
    width0 = abs(start.omega_T1 - start.omega_T0)
    kt_start = abs(kappa - kappa0)
    if width0 == 0.0 or kt_start == 0.0:
        raise ValueError("start point must carry a resolved peak-dip pair away from kappa0")

    points = [(kappa, omega, value)]
    # a point only belongs to the curve while the extreme value is attained;
    # when the refined extremum stops reaching it (e.g. the zero curve folds
    # back), the attempt is rejected rather than silently continued on a
    # background feature
    if maximize:
        value_ok = lambda v: 1.0 - v <= max(1e-4, 20.0 * max(1.0 - start.Tmax, 0.0))
    else:
        value_ok = lambda v: v <= max(1e-4, 20.0 * max(start.Tmin, 0.0))
    slope = 0.0
    h = float(step)
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise ConvergenceError("extremal curve: step limit exceeded")
        advanced = False
        for attempt in range(6):  # initial try plus 5 halvings
            kappa_new = kappa + h
            omega_pred = omega + slope * h
            if kappa_range is not None and not (kappa_range[0] <= kappa_new <= kappa_range[1]):
                return ExtremalCurve(which=which, points=tuple(points),
                                     termination="range_exhausted")
            if abs(kappa_new) >= 0.5 or not in_diamond(kappa_new, omega_pred, amb):
                return ExtremalCurve(which=which, points=tuple(points),
                                     termination="hit_diamond_boundary")
            # window: peak-dip separation scaling + quadratic curve motion
            # (margin factor 3 for curvature coefficients above the
            # separation coefficient), widened on retries; too-wide windows
            # are safe because the tracked extremum is the global one
            ratio = (kappa_new - kappa0) / kt_start
            motion = width0 * abs((kappa_new - kappa0) ** 2
                                  - (kappa - kappa0) ** 2) / (kt_start * kt_start)
            half = 0.6 * width0 * ratio * ratio + 3.0 * motion
            half = max(half, 3.0 * abs(slope * h), 10.0 * xtol_factor * abs(omega_pred))
            half *= 2.0 ** attempt
            lo, hi = omega_pred - half, omega_pred + half
            n = 61
            ws = np.linspace(lo, hi, n)
            try:
                vals = np.array([f2(kappa_new, w) for w in ws])
            except Exception:
                h *= 0.5
                continue
            idx = int(np.argmax(vals) if maximize else np.argmin(vals))
            if idx in (0, n - 1):
                h *= 0.5
                continue
            xtol = xtol_factor * (hi - lo)
            w_new, v_new, _ = _golden_extremum(lambda w: f2(kappa_new, w),
                                               ws[idx - 1], ws[idx + 1], xtol,
                                               maximize=maximize)
            if not in_diamond(kappa_new, w_new, amb):
                return ExtremalCurve(which=which, points=tuple(points),
                                     termination="hit_diamond_boundary")
            if not value_ok(v_new):
                h *= 0.5
                continue
            advanced = True
            break
        if not advanced:
            return ExtremalCurve(which=which, points=tuple(points),
                                 termination="step_failure")
        d_omega = w_new - omega
        if abs(d_omega / h) > _VERTICAL_SLOPE:
            points.append((kappa_new, w_new, v_new))
            return ExtremalCurve(which=which, points=tuple(points),
                                 termination="vertical_tangent_detected")
        slope = d_omega / h
        kappa, omega, value = kappa_new, w_new, v_new
        points.append((kappa, omega, value))
        h = float(step)  # reset after a successful (possibly halved) step


def width_exponent(kappa_offsets: Sequence[float], widths: Sequence[float]) -> float:
    """Log-log slope of the peak-dip separation versus |kappa - kappa0|."""
    kt = np.abs(np.asarray(kappa_offsets, dtype=float))
    w = np.asarray(widths, dtype=float)
    if kt.size < 2 or np.any(w <= 0.0) or np.any(kt <= 0.0):
        raise ValueError("need >= 2 positive offsets with positive widths")
    slope, _ = np.polyfit(np.log(kt), np.log(w), 1)
    return float(slope)


def anomaly_report(s: SlabStructure, kappa0: float, omega0: float,
                   kappa_offsets: Sequence[float], nx: int = 128, nz: int = 128, *,
                   curve_nx: Optional[int] = None, curve_nz: Optional[int] = None,
                   trace_curves: bool = True,
                   dispersion: Optional[tuple[float, complex]] = None) -> dict:
    """End-to-end anomaly characterization around a located guided mode.

    Traces the complex dispersion to size the resonance (or reuses a
    precomputed (ell1, ell2) pair), polishes the |T|^2 extrema at each kappa
    offset, fits the shared-ell1 quadratics, extracts the background
    magnitudes from the plateau, and (optionally) continues both extremal
    curves outward to their termination.

    Returns the fit-report dictionary written by the CLI.
    """
    offsets = sorted(set(abs(float(k)) for k in kappa_offsets))
    if not offsets or offsets[0] == 0.0:
        raise ValueError("kappa offsets must be nonzero")
    if dispersion is None:
        trace = trace_dispersion(s, kappa0, omega0,
                                 [k for kt in offsets for k in (kt, -kt)], nx, nz)
        if trace.ell2 is None or trace.ell2.imag <= 0:
            raise ConvergenceError(
                f"dispersion trace did not yield Im(ell2) > 0 (got {trace.ell2}); "
                "cannot size the anomaly")
        ell1, ell2 = trace.ell1, trace.ell2
    else:
        ell1, ell2 = float(dispersion[0]), complex(dispersion[1])
        if ell2.imag <= 0:
            raise ConvergenceError(f"need Im(ell2) > 0 to size the anomaly, got {ell2}")

    tmap = TransmittanceMap(s, nx, nz)
    kt_max = offsets[-1]
    probe = 50.0 * ell2.imag * kt_max * kt_max
    t0_sq = 0.5 * (tmap(kappa0, omega0 + probe) + tmap(kappa0, omega0 - probe))
    t0_sq = min(max(t0_sq, 1e-6), 1.0 - 1e-6)
    r0t0 = math.sqrt(t0_sq * (1.0 - t0_sq))
    sep = ell2.imag / r0t0  # |t2 - r2|

    points = []
    widths = []
    for kt in offsets:
        center = omega0 - ell1 * kt - ell2.real * kt * kt
        half = 1.6 * sep * kt * kt
        res = locate_extrema(lambda w, _k=kappa0 + kt: tmap(_k, w),
                             (center - half, center + half))
        points.append(ExtremalPoint(kappa=kappa0 + kt, omega_T1=res.omega_T1,
                                    omega_T0=res.omega_T0, Tmax=res.Tmax,
                                    Tmin=res.Tmin,
                                    polish_iterations=res.polish_iterations))
        widths.append(abs(res.omega_T1 - res.omega_T0))

    fit = fit_anomaly(points, kappa0, omega0, transmittance=tmap)
    exponent = width_exponent(offsets, widths) if len(offsets) >= 2 else float("nan")

    termination = {}
    if trace_curves:
        # the discrete anomaly shifts between meshes by more than its width,
        # so the curves are traced at the same resolution as the extrema
        # unless explicitly overridden
        start = points[-1]
        for which in ("total_T", "total_R"):
            curve = trace_extremal_curve(s, which, start, step=offsets[0],
                                         kappa0=kappa0,
                                         nx=curve_nx if curve_nx else nx,
                                         nz=curve_nz if curve_nz else nz)
            termination[which] = curve.termination

    return {
        "kappa0": kappa0,
        "omega0": omega0,
        "ell1": fit.ell1_hat,
        "r2": fit.r2_hat,
        "t2": fit.t2_hat,
        "r0": fit.r0_hat,
        "t0": fit.t0_hat,
        "residual": fit.residual,
        "width_exponent": exponent,
        "curve_termination": termination,
        "widths": {("%g" % kt): w for kt, w in zip(offsets, widths)},
        "extrema": [
            {"kappa": p.kappa, "omega_T1": p.omega_T1, "omega_T0": p.omega_T0,
             "Tmax": p.Tmax, "Tmin": p.Tmin} for p in points
        ],
        "dispersion": {
            "ell1": ell1,
            "ell2": [ell2.real, ell2.imag],
        },
    }
