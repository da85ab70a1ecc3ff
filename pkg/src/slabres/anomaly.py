"""Truncated expansion models of the scattering coefficients near a guided mode.

Near an isolated guided-mode pair the analytic functions ell, a, b (eigenvalue,
reflection and transmission numerators; a = ell*R, b = ell*T) factor into a
vanishing polynomial part times a nonvanishing factor.  Retaining terms up to
quadratic order in kt = kappa - kappa0 in the vanishing factors and only the
constant in the nonvanishing ones gives three families:

  generic          ell, a, b all vanish to first order in wt = omega - omega0;
                   peak-dip anomaly, transmittance reaches 0 and 1 on the two
                   quadratic zero curves when r2 != t2 (both then real).
  full_background  a (or, mirrored, b) vanishes to second order; single dip
                   from a background of total transmission (or single peak
                   from total reflection), with the double root splitting into
                   two curves of |T|^2 = 1 (resp. 0).
  degenerate       all three vanish to second order; two peak-dip anomalies
                   emanate from the guided-mode frequency.

The model constructors enforce the coefficient relations that unitarity and
z-symmetry of the structure force on the families; validate_model reports
every constraint individually.  All evaluators accept scalars or arrays.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DiscontinuityError, ModelConstraintError

_UNITARITY_TOL = 1e-12


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _is_real(v: complex) -> bool:
    return v.imag == 0.0


def _alternative(r2: complex, t2: complex) -> str:
    """Classify (r2, t2) per the two admissible alternatives.

    Returns 'distinct_real' or 'equal_complex'; anything else is excluded
    (identical reals contradict Im(ell2) > 0; distinct non-reals violate the
    unitarity relations r2 + conj(t2), r2*conj(t2) real).
    """
    if _is_real(r2) and _is_real(t2):
        if r2 == t2:
            raise ModelConstraintError(
                "quadratic alternative: r2 and t2 cannot be identical real numbers")
        return "distinct_real"
    if r2 == t2:
        return "equal_complex"
    raise ModelConstraintError(
        "quadratic alternative: require r2, t2 distinct reals or equal non-real values")


def _derive_ell2(r2: complex, t2: complex, r0: float, t0: float) -> complex:
    """ell2 from the unitarity identities.

    Re part from Re(ell2) = r0^2 Re(r2) + t0^2 Re(t2); the added imaginary
    part r0 |t0| |t2 - r2| realizes |ell2|^2 = r0^2 |r2|^2 + t0^2 |t2|^2 for
    the distinct-real alternative and vanishes for the equal-complex one.
    """
    return r0 * r0 * r2 + t0 * t0 * t2 + 1j * (r0 * abs(t0) * abs(t2 - r2))


def _check_background_pair(r0: float, t0: float, clause: str):
    if not (0.0 < r0 < 1.0):
        raise ModelConstraintError(f"{clause}: r0 must lie in (0, 1), got {r0}")
    if not (0.0 < abs(t0) < 1.0):
        raise ModelConstraintError(f"{clause}: need 0 < |t0| < 1, got {t0}")
    if abs(r0 * r0 + t0 * t0 - 1.0) > _UNITARITY_TOL:
        raise ModelConstraintError(
            f"{clause}: unitarity r0^2 + t0^2 = 1 violated by "
            f"{r0 * r0 + t0 * t0 - 1.0:.3e}")


@dataclass(frozen=True)
class GenericAnomalyModel:
    """Expansion family with simple zeros of ell, a and b at the mode."""

    ell1: float
    r2: complex
    t2: complex
    r0: float
    t0: float
    gamma: float = 0.0
    ell2: complex = 0.0j
    r_higher: tuple[float, ...] = ()
    t_higher: tuple[float, ...] = ()
    ell_higher: tuple[float, ...] = ()

    family = "generic"


def make_generic_model(ell1: float, r2, t2, r0: float, t0: float, gamma: float = 0.0,
                       r_higher: Sequence[float] = (), t_higher: Sequence[float] = (),
                       ell_higher: Sequence[float] = ()) -> GenericAnomalyModel:
    """Validated generic model; ell2 is derived, never supplied."""
    r2 = _as_complex(r2)
    t2 = _as_complex(t2)
    _check_background_pair(r0, t0, "generic background")
    _alternative(r2, t2)
    ell2 = _derive_ell2(r2, t2, r0, t0)
    if ell2.imag < 0:
        raise ModelConstraintError(
            f"nonnegative damping: Im(ell2) = {ell2.imag:.3e} < 0 "
            "(equal non-real r2 = t2 must have positive imaginary part)")
    return GenericAnomalyModel(ell1=float(ell1), r2=r2, t2=t2, r0=float(r0),
                               t0=float(t0), gamma=float(gamma), ell2=ell2,
                               r_higher=tuple(float(c) for c in r_higher),
                               t_higher=tuple(float(c) for c in t_higher),
                               ell_higher=tuple(float(c) for c in ell_higher))


@dataclass(frozen=True)
class FullBackgroundModel:
    """Family with a double zero of a (or b): total background transmission
    (or reflection).

    direction 'full_transmission' puts the two linear-root factors in a, the
    single factor in b (whose leading constant is +-i with t0 = 1); the
    mirrored 'full_reflection' swaps the roles of a and b.
    """

    ell1: float
    r1_1: complex
    r1_2: complex
    r2_1: complex
    r2_2: complex
    t2: complex
    r0: float
    gamma: float = 0.0
    sign: int = 1
    direction: str = "full_transmission"
    t0: float = 1.0
    ell2: complex = 0.0j

    family = "full_background"


def make_full_background_model(ell1: float, r1_pair, r2_pair, t2, r0: float,
                               gamma: float = 0.0, sign: int = 1,
                               direction: str = "full_transmission") -> FullBackgroundModel:
    """Validated total-background model.

    r1_pair are the linear coefficients of the two roots of the double
    factor; unitarity forces their sum and product real, so they are both
    real or complex conjugates.  ell2 is derived from the modulus identity:
    ell2 = t2 + i r0 |r1_1 - ell1| |r1_2 - ell1|.
    """
    r1_1, r1_2 = (_as_complex(v) for v in r1_pair)
    r2_1, r2_2 = (_as_complex(v) for v in r2_pair)
    t2 = _as_complex(t2)
    ell1 = float(ell1)
    if not (0.0 < r0 < 1.0):
        raise ModelConstraintError(f"full background: r0 must lie in (0, 1), got {r0}")
    if sign not in (1, -1):
        raise ModelConstraintError(f"leading-constant sign must be +1 or -1, got {sign}")
    if direction not in ("full_transmission", "full_reflection"):
        raise ModelConstraintError(f"unknown direction {direction!r}")
    s = r1_1 + r1_2
    p = r1_1 * r1_2
    if abs(s.imag) > _UNITARITY_TOL or abs(p.imag) > _UNITARITY_TOL:
        raise ModelConstraintError(
            "r1 roots must be both real or conjugate complex")
    if not _is_real(t2):
        raise ModelConstraintError("full background: t2 must be real")
    ell2 = t2 + 1j * (r0 * abs(r1_1 - ell1) * abs(r1_2 - ell1))
    return FullBackgroundModel(ell1=ell1, r1_1=r1_1, r1_2=r1_2, r2_1=r2_1, r2_2=r2_2,
                               t2=t2, r0=float(r0), gamma=float(gamma), sign=int(sign),
                               direction=direction, ell2=ell2)


@dataclass(frozen=True)
class DegenerateModel:
    """Family with double zeros of ell, a and b: two peak-dip anomalies."""

    ell1_1: float
    ell1_2: float
    r2_1: complex
    t2_1: complex
    r2_2: complex
    t2_2: complex
    r0: float
    t0: float
    gamma: float = 0.0
    ell2_1: complex = 0.0j
    ell2_2: complex = 0.0j

    family = "degenerate"


def make_degenerate_model(ell1_pair, r2_pair, t2_pair, r0: float, t0: float,
                          gamma: float = 0.0) -> DegenerateModel:
    """Validated degenerate model; per-branch ell2 derived by the generic identities."""
    ell1_1, ell1_2 = float(ell1_pair[0]), float(ell1_pair[1])
    r2_1, r2_2 = (_as_complex(v) for v in r2_pair)
    t2_1, t2_2 = (_as_complex(v) for v in t2_pair)
    if ell1_1 == ell1_2:
        raise ModelConstraintError(
            "degenerate family requires distinct real linear coefficients")
    _check_background_pair(r0, t0, "degenerate background")
    for i, (r2, t2) in enumerate(((r2_1, t2_1), (r2_2, t2_2)), start=1):
        try:
            _alternative(r2, t2)
        except ModelConstraintError as exc:
            raise ModelConstraintError(f"branch {i}: {exc}") from exc
    ell2_1 = _derive_ell2(r2_1, t2_1, r0, t0)
    ell2_2 = _derive_ell2(r2_2, t2_2, r0, t0)
    for i, e2 in enumerate((ell2_1, ell2_2), start=1):
        if e2.imag < 0:
            raise ModelConstraintError(f"nonnegative damping: Im(ell2^({i})) = {e2.imag:.3e} < 0")
    return DegenerateModel(ell1_1=ell1_1, ell1_2=ell1_2, r2_1=r2_1, t2_1=t2_1,
                           r2_2=r2_2, t2_2=t2_2, r0=float(r0), t0=float(t0),
                           gamma=float(gamma), ell2_1=ell2_1, ell2_2=ell2_2)


AnomalyModel = Union[GenericAnomalyModel, FullBackgroundModel, DegenerateModel]


def _poly(wt, kt, lin, quad, higher=()):
    """wt + lin*kt + quad*kt^2 + sum_n higher[n-3]*kt^n."""
    out = wt + lin * kt + quad * kt * kt
    if higher:
        ktn = kt * kt
        for c in higher:
            ktn = ktn * kt
            out = out + c * ktn
    return out


def model_eval(model: AnomalyModel, ktilde, wtilde):
    """Evaluate (ell, a, b) of the truncated model at real offsets (kt, wt)."""
    kt = np.asarray(ktilde, dtype=float)
    wt = np.asarray(wtilde, dtype=float)
    phase = cmath.exp(1j * model.gamma)
    if isinstance(model, GenericAnomalyModel):
        ell = _poly(wt, kt, model.ell1, model.ell2, model.ell_higher)
        a = (model.r0 * phase) * _poly(wt, kt, model.ell1, model.r2, model.r_higher)
        b = (1j * model.t0 * phase) * _poly(wt, kt, model.ell1, model.t2, model.t_higher)
    elif isinstance(model, FullBackgroundModel):
        ell = _poly(wt, kt, model.ell1, model.ell2)
        f_double = (_poly(wt, kt, model.r1_1, model.r2_1)
                    * _poly(wt, kt, model.r1_2, model.r2_2))
        f_single = _poly(wt, kt, model.ell1, model.t2)
        if model.direction == "full_transmission":
            a = (model.r0 * phase) * f_double
            b = (model.sign * 1j * model.t0 * phase) * f_single
        else:
            a = (model.t0 * phase) * f_single
            b = (model.sign * 1j * model.r0 * phase) * f_double
    elif isinstance(model, DegenerateModel):
        ell = (_poly(wt, kt, model.ell1_1, model.ell2_1)
               * _poly(wt, kt, model.ell1_2, model.ell2_2))
        a = (model.r0 * phase) * (_poly(wt, kt, model.ell1_1, model.r2_1)
                                  * _poly(wt, kt, model.ell1_2, model.r2_2))
        b = (1j * model.t0 * phase) * (_poly(wt, kt, model.ell1_1, model.t2_1)
                                       * _poly(wt, kt, model.ell1_2, model.t2_2))
    else:
        raise TypeError(f"not an anomaly model: {model!r}")
    if np.ndim(ktilde) == 0 and np.ndim(wtilde) == 0:
        return complex(ell), complex(a), complex(b)
    ell, a, b = np.broadcast_arrays(ell, a, b)
    return np.asarray(ell, complex), np.asarray(a, complex), np.asarray(b, complex)


def model_transmittance(model: AnomalyModel, ktilde, wtilde):
    """|T|^2 = |b|^2 / (|a|^2 + |b|^2); undefined exactly at the mode pair."""
    _, a, b = model_eval(model, ktilde, wtilde)
    pa = np.abs(a) ** 2
    pb = np.abs(b) ** 2
    denom = pa + pb
    if np.any(denom == 0.0):
        raise DiscontinuityError(
            "transmittance evaluated at the discontinuity point (ktilde, wtilde) = (0, 0)")
    out = pb / denom
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ZeroCurves:
    """Frequencies of total transmission (a = 0) and total reflection (b = 0)."""

    omega_a: tuple[float, ...]
    omega_b: tuple[float, ...]


def _real_roots(pairs: Iterable[tuple[complex, complex, tuple]], ktilde: float,
                what: str) -> tuple[float, ...]:
    out = []
    for lin, quad, higher in pairs:
        if not (_is_real(lin) and _is_real(quad)):
            raise ModelConstraintError(
                f"no real zero curve for {what}: branch coefficients are not real "
                "(transmittance is continuous at the mode pair)")
        value = -(lin.real * ktilde) - quad.real * ktilde * ktilde
        ktn = ktilde * ktilde
        for c in higher:
            ktn *= ktilde
            value -= c * ktn
        out.append(value)
    return tuple(out)


def zero_curves(model: AnomalyModel, ktilde: float) -> ZeroCurves:
    """Zero-curve frequencies (as wtilde offsets) of a and b at the given ktilde."""
    kt = float(ktilde)
    if isinstance(model, GenericAnomalyModel):
        oa = _real_roots([(complex(model.ell1), model.r2, model.r_higher)], kt, "a")
        ob = _real_roots([(complex(model.ell1), model.t2, model.t_higher)], kt, "b")
    elif isinstance(model, FullBackgroundModel):
        double = _real_roots([(model.r1_1, model.r2_1, ()), (model.r1_2, model.r2_2, ())],
                             kt, "the double factor")
        single = _real_roots([(complex(model.ell1), model.t2, ())], kt,
                             "the single factor")
        if model.direction == "full_transmission":
            oa, ob = double, single
        else:
            oa, ob = single, double
    elif isinstance(model, DegenerateModel):
        oa = _real_roots([(complex(model.ell1_1), model.r2_1, ()),
                          (complex(model.ell1_2), model.r2_2, ())], kt, "a")
        ob = _real_roots([(complex(model.ell1_1), model.t2_1, ()),
                          (complex(model.ell1_2), model.t2_2, ())], kt, "b")
    else:
        raise TypeError(f"not an anomaly model: {model!r}")
    return ZeroCurves(omega_a=oa, omega_b=ob)


@dataclass(frozen=True)
class ConstraintCheck:
    constraint: str
    passed: bool
    residual: float
    advisory: bool = False


def validate_model(model: AnomalyModel) -> list[ConstraintCheck]:
    """Re-check every coefficient relation of the model's family.

    Works on directly constructed (possibly invalid) instances too, so it can
    be used to diagnose why a parameter set is rejected.  Advisory entries
    record conjectured-but-unproved relations; they never fail a model.
    """
    checks: list[ConstraintCheck] = []

    def add(name, residual, tol=_UNITARITY_TOL, advisory=False):
        r = float(abs(residual))
        checks.append(ConstraintCheck(name, r <= tol, r, advisory))

    def add_alternative(name, r2, t2):
        try:
            _alternative(_as_complex(r2), _as_complex(t2))
            checks.append(ConstraintCheck(name, True, 0.0))
        except ModelConstraintError:
            checks.append(ConstraintCheck(name, False, math.inf))

    if isinstance(model, GenericAnomalyModel):
        add("background unitarity: r0^2 + t0^2 = 1", model.r0**2 + model.t0**2 - 1.0)
        add("shared linear coefficient ell1 real", complex(model.ell1).imag)
        add("nonnegative damping: Im(ell2) >= 0", min(model.ell2.imag, 0.0))
        add_alternative("quadratic alternative (distinct reals or equal non-real)",
                        model.r2, model.t2)
        add("Re(ell2) identity", model.ell2.real
            - model.r0**2 * model.r2.real - model.t0**2 * model.t2.real)
        add("|ell2|^2 identity", abs(model.ell2) ** 2
            - model.r0**2 * abs(model.r2) ** 2 - model.t0**2 * abs(model.t2) ** 2,
            tol=1e-10)
        add("background magnitudes in (0,1)",
            0.0 if (0 < model.r0 < 1 and 0 < abs(model.t0) < 1) else 1.0)
    elif isinstance(model, FullBackgroundModel):
        add("full background: t0 = 1", model.t0 - 1.0)
        add("nonnegative damping: Im(ell2) >= 0", min(model.ell2.imag, 0.0))
        add("leading constant of b is +-i e^(i gamma)",
            0.0 if model.sign in (1, -1) else 1.0)
        add("r1 sum real", (model.r1_1 + model.r1_2).imag)
        add("r1 product real", (model.r1_1 * model.r1_2).imag)
        add("t2 = Re(ell2)", model.t2.real - model.ell2.real)
        add("Im(ell2)^2 modulus identity", abs(model.ell2.imag) ** 2
            - model.r0**2 * abs(model.r1_1 - model.ell1) ** 2
            * abs(model.r1_2 - model.ell1) ** 2, tol=1e-10)
        between = (min(model.r1_1.real, model.r1_2.real) <= model.ell1
                   <= max(model.r1_1.real, model.r1_2.real))
        checks.append(ConstraintCheck(
            "conjecture: t1 = ell1 between r1 roots (reported, not enforced)",
            bool(between), 0.0 if between else 1.0, advisory=True))
    elif isinstance(model, DegenerateModel):
        add("branch linear coefficients real",
            abs(complex(model.ell1_1).imag) + abs(complex(model.ell1_2).imag))
        add("branch linear coefficients distinct",
            0.0 if model.ell1_1 != model.ell1_2 else 1.0)
        add("nonnegative damping: Im(ell2^(1)) >= 0", min(model.ell2_1.imag, 0.0))
        add("nonnegative damping: Im(ell2^(2)) >= 0", min(model.ell2_2.imag, 0.0))
        add_alternative("quadratic alternative, branch 1", model.r2_1, model.t2_1)
        add_alternative("quadratic alternative, branch 2", model.r2_2, model.t2_2)
        add("background: r0^2 + t0^2 = 1", model.r0**2 + model.t0**2 - 1.0)
    else:
        raise TypeError(f"not an anomaly model: {model!r}")
    return checks


@dataclass(frozen=True)
class FigureData:
    """Transmittance curves |T|^2(wtilde) for a list of ktilde values."""

    ktilde: tuple[float, ...]
    wtilde: np.ndarray
    transmittance: np.ndarray  # shape (len(ktilde), len(wtilde)); NaN at (0, 0)


def figure_data(model: AnomalyModel, ktilde_list: Sequence[float],
                wtilde_grid: Sequence[float]) -> FigureData:
    """Tabulate |T|^2 over a (ktilde, wtilde) grid; the mode pair itself is NaN."""
    kts = tuple(float(k) for k in ktilde_list)
    wts = np.asarray(list(wtilde_grid), dtype=float)
    vals = np.empty((len(kts), wts.size))
    for i, kt in enumerate(kts):
        _, a, b = model_eval(model, np.full(wts.shape, kt), wts)
        pa = np.abs(a) ** 2
        pb = np.abs(b) ** 2
        denom = pa + pb
        safe = np.where(denom > 0.0, denom, 1.0)
        vals[i] = np.where(denom > 0.0, pb / safe, np.nan)
    return FigureData(ktilde=kts, wtilde=wts, transmittance=vals)


# ---------------------------------------------------------------------------
# serialization

def _num(v):
    v = complex(v)
    if v.imag == 0.0:
        return v.real
    return [v.real, v.imag]


def model_to_dict(model: AnomalyModel) -> dict:
    if isinstance(model, GenericAnomalyModel):
        d = {"family": "generic", "ell1": model.ell1, "r2": _num(model.r2),
             "t2": _num(model.t2), "r0": model.r0, "t0": model.t0,
             "gamma": model.gamma, "ell2": _num(model.ell2)}
        if model.r_higher:
            d["r_higher"] = list(model.r_higher)
        if model.t_higher:
            d["t_higher"] = list(model.t_higher)
        if model.ell_higher:
            d["ell_higher"] = list(model.ell_higher)
        return d
    if isinstance(model, FullBackgroundModel):
        return {"family": "full_background", "ell1": model.ell1,
                "r1": [_num(model.r1_1), _num(model.r1_2)],
                "r2": [_num(model.r2_1), _num(model.r2_2)],
                "t2": _num(model.t2), "r0": model.r0, "t0": model.t0,
                "gamma": model.gamma, "sign": model.sign,
                "direction": model.direction, "ell2": _num(model.ell2)}
    if isinstance(model, DegenerateModel):
        return {"family": "degenerate",
                "ell1": [model.ell1_1, model.ell1_2],
                "r2": [_num(model.r2_1), _num(model.r2_2)],
                "t2": [_num(model.t2_1), _num(model.t2_2)],
                "r0": model.r0, "t0": model.t0, "gamma": model.gamma,
                "ell2": [_num(model.ell2_1), _num(model.ell2_2)]}
    raise TypeError(f"not an anomaly model: {model!r}")


def model_to_json(model: AnomalyModel) -> str:
    return json.dumps(model_to_dict(model), indent=2)


def model_from_dict(doc: dict, strict: bool = True) -> AnomalyModel:
    """Rebuild a model from its JSON document.

    With strict=True (default) the validated constructors run and derived
    fields are recomputed.  strict=False builds the dataclass as-is so that
    validate_model can report on invalid parameter sets.
    """
    family = doc.get("family")
    if strict:
        if family == "generic":
            return make_generic_model(doc["ell1"], doc["r2"], doc["t2"], doc["r0"],
                                      doc["t0"], doc.get("gamma", 0.0),
                                      doc.get("r_higher", ()), doc.get("t_higher", ()),
                                      doc.get("ell_higher", ()))
        if family == "full_background":
            return make_full_background_model(doc["ell1"], doc["r1"], doc["r2"],
                                              doc["t2"], doc["r0"],
                                              doc.get("gamma", 0.0),
                                              doc.get("sign", 1),
                                              doc.get("direction", "full_transmission"))
        if family == "degenerate":
            return make_degenerate_model(doc["ell1"], doc["r2"], doc["t2"], doc["r0"],
                                         doc["t0"], doc.get("gamma", 0.0))
        raise ModelConstraintError(f"unknown model family: {family!r}")

    if family == "generic":
        r2 = _as_complex(doc["r2"])
        t2 = _as_complex(doc["t2"])
        r0 = float(doc["r0"])
        t0 = float(doc["t0"])
        ell2 = _as_complex(doc["ell2"]) if "ell2" in doc else _derive_ell2(r2, t2, r0, t0)
        return GenericAnomalyModel(
            ell1=float(doc["ell1"]), r2=r2, t2=t2, r0=r0, t0=t0,
            gamma=float(doc.get("gamma", 0.0)), ell2=ell2,
            r_higher=tuple(doc.get("r_higher", ())),
            t_higher=tuple(doc.get("t_higher", ())),
            ell_higher=tuple(doc.get("ell_higher", ())))
    if family == "full_background":
        r1_1, r1_2 = (_as_complex(v) for v in doc["r1"])
        r2_1, r2_2 = (_as_complex(v) for v in doc["r2"])
        t2 = _as_complex(doc["t2"])
        ell1 = float(doc["ell1"])
        r0 = float(doc["r0"])
        ell2 = (_as_complex(doc["ell2"]) if "ell2" in doc
                else t2 + 1j * (r0 * abs(r1_1 - ell1) * abs(r1_2 - ell1)))
        return FullBackgroundModel(
            ell1=ell1, r1_1=r1_1, r1_2=r1_2, r2_1=r2_1, r2_2=r2_2, t2=t2, r0=r0,
            gamma=float(doc.get("gamma", 0.0)), sign=int(doc.get("sign", 1)),
            direction=doc.get("direction", "full_transmission"),
            t0=float(doc.get("t0", 1.0)), ell2=ell2)
    if family == "degenerate":
        ell1_1, ell1_2 = (float(v) for v in doc["ell1"])
        r2_1, r2_2 = (_as_complex(v) for v in doc["r2"])
        t2_1, t2_2 = (_as_complex(v) for v in doc["t2"])
        r0 = float(doc["r0"])
        t0 = float(doc["t0"])
        if "ell2" in doc:
            ell2_1, ell2_2 = (_as_complex(v) for v in doc["ell2"])
        else:
            ell2_1 = _derive_ell2(r2_1, t2_1, r0, t0)
            ell2_2 = _derive_ell2(r2_2, t2_2, r0, t0)
        return DegenerateModel(ell1_1=ell1_1, ell1_2=ell1_2, r2_1=r2_1, t2_1=t2_1,
                               r2_2=r2_2, t2_2=t2_2, r0=r0, t0=t0,
                               gamma=float(doc.get("gamma", 0.0)),
                               ell2_1=ell2_1, ell2_2=ell2_2)
    raise ModelConstraintError(f"unknown model family: {family!r}")


def model_from_json(text: str, strict: bool = True) -> AnomalyModel:
    return model_from_dict(json.loads(text), strict=strict)
