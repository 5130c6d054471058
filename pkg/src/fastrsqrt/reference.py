"""Published constants and measurements, and comparison of derived values against them.

Real values are stored as the printed decimal strings; the tolerance of each
is one unit in its last printed digit.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from decimal import Decimal

import numpy as np

from . import solver


@dataclass(frozen=True)
class Published:
    key: str
    text: str
    label: str

    @property
    def is_hex(self) -> bool:
        return self.text.lower().startswith("0x")

    @property
    def value(self) -> float:
        return int(self.text, 16) if self.is_hex else float(self.text)

    @property
    def unit(self) -> float:
        """One unit in the last printed digit (0 for exact integers)."""
        if self.is_hex or self.text.isdigit():
            return 0.0
        return float(Decimal(1).scaleb(Decimal(self.text).as_tuple().exponent))


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    derived: float | str
    expected: float | str
    delta: float
    tol: float

    def to_dict(self) -> dict:
        return asdict(self)


def compare(pub: Published, derived) -> Verdict:
    if pub.is_hex:
        ok = int(derived) == pub.value
        return Verdict(pub.key, ok, f"0x{int(derived):08X}", pub.text.upper().replace("X", "x"),
                       float(int(derived) - pub.value), 0.0)
    delta = float(derived) - pub.value
    # printed values carry at most 12 significant digits; absorb double rounding
    tol = pub.unit * (1.0 + 1e-9)
    return Verdict(pub.key, abs(delta) <= tol, float(derived), pub.value, delta, pub.unit)


P = Published

CONSTANTS: dict[str, list[Published]] = {
    "seed": [
        P("seed.t", "3.7309796", "slope t of the seed-optimal constant"),
        P("seed.R", "0x5F37642F", "seed-optimal magic constant"),
        P("seed.max_err_iter0", "0.03421281", "max relative error of the seed"),
    ],
    "classic": [
        P("classic.t", "3.7298003", "slope t minimising classic corrections"),
        P("classic.R", "0x5F375A86", "classic optimal magic constant"),
        P("classic.max_err_iter1", "1.75118e-3", "classic max error, 1 iteration"),
        P("classic.max_err_iter2", "4.60e-6", "classic max error, 2 iterations"),
    ],
    "modified": [
        P("modified.max_err_iter1", "8.7559e-4", "biased NR max error, 1 iteration"),
        P("modified.max_err_iter2", "5.75164e-7", "biased NR max error, 2 iterations"),
        P("modified.improvement", "7.99", "classic / biased error ratio, 2 iterations"),
    ],
    "joint": [
        P("joint.max_err_iter1", "8.75464e-4", "d1'/2"),
        P("joint.min_abs_iter1", "8.75720e-4", "|min| of first correction with d1'"),
        P("joint.max_err_iter2", "5.74996e-7", "d2'/2"),
        P("joint.gap", "1.68e-10", "biased max error minus d2'/2"),
    ],
    "interval": [
        P("interval.t_lo", "3.72978085", "lower end of the equal-error t interval"),
        P("interval.t_hi", "3.72981263", "upper end of the equal-error t interval"),
        P("interval.R_lo", "0x5F375A5D", "smallest equal-error magic constant"),
        P("interval.R_hi", "0x5F375AA0", "largest equal-error magic constant"),
        P("interval.count", "68", "number of equal-error magic constants"),
    ],
    "scheme1": [
        P("scheme1.R", "0x5F375A86", "scheme-1 magic constant"),
        P("scheme1.max_err_iter1", "8.7636e-4", "scheme-1 max error, 1 iteration"),
        P("scheme1.d2", "1.15234e-6", "scheme-1 second bias"),
        P("scheme1.max_err_iter2", "5.76173e-7", "scheme-1 max error, 2 iterations"),
        P("scheme1.ratio_iter1", "2.00", "classic / scheme-1 error ratio, 1 iteration"),
        P("scheme1.ratio_iter2", "7.98", "classic / scheme-1 error ratio, 2 iterations"),
    ],
    "scheme2": [
        P("scheme2.t", "3.73157124016", "scheme-2 slope t"),
        P("scheme2.R", "0x5F376908", "scheme-2 magic constant"),
        P("scheme2.d1", "1.75791023259e-3", "scheme-2 first bias"),
        P("scheme2.max_err_iter1", "8.7908386407e-4", "scheme-2 max error, 1 iteration"),
        P("scheme2.d2", "1.159352515e-6", "scheme-2 second bias"),
        P("scheme2.max_err_iter2", "5.796763137e-7", "scheme-2 max error, 2 iterations"),
        P("scheme2.ratio_iter1", "1.99", "classic / scheme-2 error ratio, 1 iteration"),
        P("scheme2.ratio_iter2", "7.93", "classic / scheme-2 error ratio, 2 iterations"),
    ],
}

# Coefficients printed in the kernel listings, compared as binary32 bit patterns.
CODE_CONSTANTS: dict[str, dict[str, str]] = {
    "scheme1": {"half_factor": "0.50043818", "c_add1": "1.5013145",
                "c_add2": "1.5000008", "c_mul2": "0.99912498"},
    "scheme2": {"c_add1": "1.5008789", "c_add2": "1.5000006"},
}

# Measured envelopes of sqrt(x) * kernel(x) - 1 (scheme, iterations) -> (min, max).
ENVELOPES = {
    ("scheme1", 2): (-6.62e-7, 6.35e-7),
    ("scheme2", 2): (-6.21e-7, 6.53e-7),
    ("scheme1", 1): (-8.76e-4, 8.76e-4),
    ("scheme2", 1): (-8.79e-4, 8.79e-4),
}
EDGE_ENVELOPES = {  # exponent -126
    ("scheme1", 2): (-6.72e-7, 6.49e-7),
    ("scheme2", 2): (-6.46e-7, 6.84e-7),
}
ENVELOPE_TOL = {1: 2e-6, 2: 1.5e-7}

# Kernel-vs-model deviation over [1, 4): (mean, min, max).
BLUR = {
    "scheme1": (-1.398e-8, -9.676e-8, 6.805e-8),
    "scheme2": (1.653e-8, -4.316e-8, 7.612e-8),
}
BLUR_MEAN_TOL = 0.3e-8
BLUR_RANGE_TOL = 1e-8

GROUPS = tuple(CONSTANTS)


def derived_values(group: str) -> dict[str, float]:
    if group in ("seed", "classic", "modified", "scheme1", "scheme2"):
        q = solver.SOLVERS[group]().quantities()
        return {f"{group}.{k}": v for k, v in q.items()}
    if group == "joint":
        j = solver.solve_joint_minimizer()
        return {"joint.max_err_iter1": j.max_err_iter1,
                "joint.min_abs_iter1": -j.min_err_iter1,
                "joint.max_err_iter2": j.max_err_iter2,
                "joint.gap": j.gap,
                "joint.d1": j.d1, "joint.d2": j.d2, "joint.residual": j.residual}
    if group == "interval":
        iv = solver.equal_error_interval()
        return {"interval.t_lo": iv.t_lo, "interval.t_hi": iv.t_hi,
                "interval.R_lo": iv.R_lo, "interval.R_hi": iv.R_hi,
                "interval.count": len(iv)}
    raise KeyError(group)


def check_group(group: str) -> list[Verdict]:
    values = derived_values(group)
    return [compare(p, values[p.key]) for p in CONSTANTS[group]]


def check_code_constants(scheme: str) -> list[Verdict]:
    spec = solver.emit_code_constants(solver.SOLVERS[scheme]())
    got = spec.constants()
    out = []
    for name, text in CODE_CONSTANTS[scheme].items():
        want = np.float32(text)
        have = got[name]
        out.append(Verdict(
            f"{scheme}.code.{name}",
            bool(have.view(np.uint32) == want.view(np.uint32)),
            f"{float(have)!r} (0x{int(have.view(np.uint32)):08X})",
            f"{text} (0x{int(want.view(np.uint32)):08X})",
            float(have) - float(want), 0.0,
        ))
    return out


def range_verdict(name: str, got: tuple[float, float], want: tuple[float, float],
                  tol: float) -> Verdict:
    dlo, dhi = got[0] - want[0], got[1] - want[1]
    return Verdict(name, abs(dlo) <= tol and abs(dhi) <= tol,
                   f"[{got[0]:.6g}, {got[1]:.6g}]", f"[{want[0]:.6g}, {want[1]:.6g}]",
                   max(abs(dlo), abs(dhi)), tol)


def value_verdict(name: str, got: float, want: float, tol: float) -> Verdict:
    return Verdict(name, abs(got - want) <= tol, got, want, got - want, tol)


def bound_verdict(name: str, got: float, bound: float, upper: bool) -> Verdict:
    ok = got <= bound if upper else got >= bound
    return Verdict(name, ok, got, ("<= " if upper else ">= ") + repr(bound),
                   got - bound, 0.0)


def is_finite(v) -> bool:
    return not isinstance(v, float) or math.isfinite(v)
