"""Half-line difference and convolution equations solved through symbol
factorization.

Functions on (0, infinity) are held on a uniform grid t_k = k/s up to a
horizon T, with the convention that values at t <= 0 are zero.  Difference
operators act by exact integer shifts; convolution operators by trapezoid
quadrature.  Solvers factor the scalar symbol, materialize the one-sided
factor inverses, and follow the index: a positive index imposes a
vanishing condition (a segment for differences, moments for convolutions),
a negative index contributes a finite-dimensional kernel.
"""

import csv
import dataclasses
import math

import numpy as np

from .errors import (
    DimensionMismatch,
    InternalInvariantViolation,
    NotInvertible,
    NotInvertibleOnCircle,
    DegreeCapExceeded,
    PoleOnBoundary,
    QWienerError,
    SymbolNotInvertible,
    SymbolNotRational,
    TailTooHeavy,
    TruncationBudgetExceeded,
)
from .factorize import factor_continuous, factor_discrete
from .quaternions import DEFAULT_FRAME, Quaternion, SliceFrame, adjoint_array, habs, hprod
from .series import LaurentQSeries, star_inverse, winding_index

DEFAULT_SAMPLES_PER_UNIT = 64
DEFAULT_HORIZON = 32
INVERSE_TAIL_TOL = 1e-10
ARGUMENT_GRID = 4096
ARGUMENT_GRID_CAP = 1 << 16


def _hconv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full convolution of two quaternion sample arrays, a from the left."""
    aw, ax, ay, az = (a[:, k] for k in range(4))
    bw, bx, by, bz = (b[:, k] for k in range(4))
    conv = np.convolve
    return np.stack(
        [
            conv(aw, bw) - conv(ax, bx) - conv(ay, by) - conv(az, bz),
            conv(aw, bx) + conv(ax, bw) + conv(ay, bz) - conv(az, by),
            conv(aw, by) - conv(ax, bz) + conv(ay, bw) + conv(az, bx),
            conv(aw, bz) + conv(ax, by) - conv(ay, bx) + conv(az, bw),
        ],
        axis=-1,
    )


@dataclasses.dataclass(eq=False)
class GridFunction:
    """Samples of a quaternion-valued function at t_k = k/s, k = 1..T*s.

    Values for t <= 0 are implicitly zero; nothing is stored beyond the
    horizon T, and operations that would read past it see zeros.
    """

    T: int
    s: int
    samples: np.ndarray

    def __post_init__(self):
        if self.s <= 0 or int(self.s) != self.s:
            raise DimensionMismatch("samples per unit must be a positive integer")
        if self.T <= 0:
            raise DimensionMismatch("horizon must be positive")
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.shape != (self.T * self.s, 4):
            raise DimensionMismatch(
                f"expected {self.T * self.s} samples of 4 components, "
                f"got shape {self.samples.shape}"
            )

    @classmethod
    def zeros(cls, T: int = DEFAULT_HORIZON, s: int = DEFAULT_SAMPLES_PER_UNIT):
        return cls(T, s, np.zeros((T * s, 4)))

    @classmethod
    def from_real(cls, values, T: int = DEFAULT_HORIZON, s: int = DEFAULT_SAMPLES_PER_UNIT):
        """Real-valued samples into the first component."""
        out = np.zeros((T * s, 4))
        out[:, 0] = np.asarray(values, dtype=float)
        return cls(T, s, out)

    @classmethod
    def from_callable(cls, fn, T: int = DEFAULT_HORIZON, s: int = DEFAULT_SAMPLES_PER_UNIT):
        """Sample fn(t) (returning float or Quaternion) on the grid."""
        grid = np.arange(1, T * s + 1) / s
        out = np.zeros((T * s, 4))
        for k, t in enumerate(grid):
            v = fn(float(t))
            if isinstance(v, Quaternion):
                out[k] = v.as_array()
            else:
                out[k, 0] = float(v)
        return cls(T, s, out)

    @property
    def h(self) -> float:
        return 1.0 / self.s

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.T * self.s + 1) / self.s

    def copy(self) -> "GridFunction":
        return GridFunction(self.T, self.s, self.samples.copy())

    def _check_compatible(self, other: "GridFunction"):
        if self.T != other.T or self.s != other.s:
            raise DimensionMismatch("grid functions live on different grids")

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return GridFunction(self.T, self.s, self.samples + other.samples)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check_compatible(other)
        return GridFunction(self.T, self.s, self.samples - other.samples)

    def __mul__(self, scalar: float) -> "GridFunction":
        return GridFunction(self.T, self.s, self.samples * float(scalar))

    def left_mul(self, q: Quaternion) -> "GridFunction":
        return GridFunction(self.T, self.s, hprod(q.as_array(), self.samples))

    def right_mul(self, q: Quaternion) -> "GridFunction":
        return GridFunction(self.T, self.s, hprod(self.samples, q.as_array()))

    def max_abs(self) -> float:
        if self.samples.size == 0:
            return 0.0
        return float(np.max(habs(self.samples)))

    def l2(self) -> float:
        return float(math.sqrt(self.h * np.sum(self.samples**2)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "w", "x", "y", "z"])
            for t, row in zip(self.t, self.samples):
                writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 5:
            raise DimensionMismatch("expected columns t,w,x,y,z")
        t = data[:, 0]
        if t.size < 2:
            raise DimensionMismatch("need at least two samples to infer the grid")
        h = t[0]
        if np.max(np.abs(np.diff(t) - h)) > 1e-9 * max(h, 1.0):
            raise DimensionMismatch("grid is not uniform starting at t = 1/s")
        s = int(round(1.0 / h))
        if abs(s * h - 1.0) > 1e-9:
            raise DimensionMismatch("1/spacing is not an integer")
        n = t.size
        if n % s:
            raise DimensionMismatch("sample count is not a whole number of units")
        return cls(n // s, s, data[:, 1:5])


# ---------------------------------------------------------------------------
# difference operators

@dataclasses.dataclass(eq=False)
class DifferenceOperator:
    """phi(t) -> sum_n a_n phi(t - n) with finitely many quaternion taps."""

    terms: dict

    def __post_init__(self):
        clean = {}
        for n, a in self.terms.items():
            q = a if isinstance(a, Quaternion) else Quaternion(*a)
            if abs(q) > 0.0:
                clean[int(n)] = q
        self.terms = clean

    def symbol(self) -> LaurentQSeries:
        return LaurentQSeries(
            1, {n: a.as_array().reshape(1, 1, 4) for n, a in self.terms.items()}
        )

    @property
    def anti_causal_reach(self) -> int:
        return max((-n for n in self.terms if n < 0), default=0)

    def as_json(self) -> dict:
        return {
            "terms": [
                {"n": n, "a": self.terms[n].as_json()} for n in sorted(self.terms)
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DifferenceOperator":
        return cls({int(t["n"]): Quaternion.from_json(t["a"]) for t in obj["terms"]})


def _shift_fixed(phi: GridFunction, k: int) -> GridFunction:
    """k-unit shift on a fixed horizon: zeros fill below 0 and beyond T."""
    n = phi.samples.shape[0]
    lag = k * phi.s
    out = np.zeros_like(phi.samples)
    if lag >= 0:
        if lag < n:
            out[lag:] = phi.samples[: n - lag]
    else:
        out[: n + lag] = phi.samples[-lag:]
    return GridFunction(phi.T, phi.s, out)


def shift_U(k: int, phi: GridFunction) -> GridFunction:
    """Exact k-unit shift.

    A right shift grows the horizon by k so nothing falls off the end; a
    left shift shrinks it, discarding exactly the values that move to
    t <= 0.  This keeps U^{(-k)} U^k equal to the identity on the nose.
    """
    if k == 0:
        return phi.copy()
    if k > 0:
        return GridFunction(
            phi.T + k, phi.s,
            np.vstack([np.zeros((k * phi.s, 4)), phi.samples]),
        )
    m = -k
    if phi.T - m <= 0:
        return GridFunction.zeros(1, phi.s)
    return GridFunction(phi.T - m, phi.s, phi.samples[m * phi.s :])


def apply_difference(op: DifferenceOperator, phi: GridFunction) -> GridFunction:
    out = np.zeros_like(phi.samples)
    for n, a in op.terms.items():
        out += hprod(a.as_array(), _shift_fixed(phi, n).samples)
    return GridFunction(phi.T, phi.s, out)


def _difference_from_series(f: LaurentQSeries) -> DifferenceOperator:
    if f.n != 1:
        raise DimensionMismatch("only scalar symbols correspond to operators here")
    return DifferenceOperator(
        {u: Quaternion(*np.asarray(c, dtype=float)[0, 0]) for u, c in f.coeffs.items()}
    )


def _one_sided(f: LaurentQSeries, keep_nonneg: bool, what: str) -> LaurentQSeries:
    """Drop wrong-side dust; loud failure if it is more than dust."""
    scale = max(f.max_abs(), 1e-300)
    kept = {}
    for u, c in f.coeffs.items():
        wrong = u < 0 if keep_nonneg else u > 0
        if wrong:
            if float(np.max(np.abs(c))) > 1e-8 * scale:
                raise InternalInvariantViolation(
                    f"{what} has a wrong-side coefficient at power {u}"
                )
            continue
        kept[u] = c
    return LaurentQSeries(f.n, kept)


@dataclasses.dataclass(eq=False)
class SolveReport:
    """Outcome of a half-line solve.

    index is the factorization index of the symbol; the verdict string is
    stable for machine consumption.  solution is None exactly when the
    verdict is unsolvable.  Samples at t > T - guard_band are computed with
    zero-extension beyond the horizon and should not be trusted.
    """

    kind: str
    index: int
    solvable: bool
    verdict: str
    solution: GridFunction | None
    homogeneous_basis: list
    residual: float | None
    guard_band: float
    moments: list | None
    certificates: dict


def _interior_l2(diff: GridFunction, guard: float) -> float:
    cut = diff.samples[diff.t <= diff.T - guard]
    return float(math.sqrt(diff.h * np.sum(cut**2)))


def solve_difference(
    op: DifferenceOperator,
    g: GridFunction,
    frame: SliceFrame = DEFAULT_FRAME,
    tol: float = 1e-8,
) -> SolveReport:
    """Solvability analysis and solution of sum_n a_n psi(t-n) = g(t).

    The scalar symbol is factored as A_- p^k A_+; the sign of k decides
    between a unique solution, a vanishing condition on (0, k], and a
    (-k)-unit family of homogeneous solutions.
    """
    sym = op.symbol()
    try:
        fac = factor_discrete(sym, frame)
        minus_inv = star_inverse(fac.f_minus, frame, tol=INVERSE_TAIL_TOL)
        plus_inv = star_inverse(fac.f_plus, frame, tol=INVERSE_TAIL_TOL)
    except (NotInvertible, NotInvertibleOnCircle) as exc:
        raise SymbolNotInvertible(str(exc), certificate=exc.certificate) from exc
    except DegreeCapExceeded as exc:
        raise TruncationBudgetExceeded(str(exc), certificate=exc.certificate) from exc
    except TailTooHeavy as exc:
        raise TruncationBudgetExceeded(str(exc), certificate=exc.certificate) from exc

    k = fac.indices[0]
    a_minus_inv = _difference_from_series(_one_sided(minus_inv, False, "minus-factor inverse"))
    a_plus_inv = _difference_from_series(_one_sided(plus_inv, True, "plus-factor inverse"))

    guard = float(
        a_minus_inv.anti_causal_reach + max(k, 0) + op.anti_causal_reach
    )
    if guard >= g.T:
        raise TruncationBudgetExceeded(
            f"guard band {guard:.0f} swallows the horizon T={g.T}; "
            "extend the grid",
            certificate={"horizon": g.T, "guard_band": guard},
        )
    certificates = {
        "factor_residual": fac.residual,
        "minus_inv_support": sorted(a_minus_inv.terms),
        "plus_inv_support": sorted(a_plus_inv.terms),
        "guard_band": guard,
    }

    w = apply_difference(a_minus_inv, g)
    if k > 0:
        band = w.samples[: k * g.s]
        band_max = float(np.max(habs(band))) if band.size else 0.0
        certificates["band_max"] = band_max
        if band_max > tol:
            return SolveReport(
                "difference", k, False,
                f"unsolvable: nonzero on (0,{k}]",
                None, [], None, guard, None, certificates,
            )

    psi = apply_difference(a_plus_inv, _shift_fixed(w, -k))
    basis = []
    if k < 0:
        for j in range(-k * g.s):
            delta = GridFunction.zeros(g.T, g.s)
            delta.samples[j, 0] = 1.0
            elem = apply_difference(a_plus_inv, delta)
            norm = elem.l2()
            if norm > 0.0:
                elem = elem * (1.0 / norm)
            basis.append(elem)

    residual = _interior_l2(apply_difference(op, psi) - g, guard)
    verdict = "unique" if k == 0 else ("solvable" if k > 0 else "right-invertible")
    return SolveReport(
        "difference", k, True, verdict, psi, basis, residual, guard, None, certificates
    )


# ---------------------------------------------------------------------------
# convolution operators

@dataclasses.dataclass(eq=False)
class ConvolutionOperator:
    """phi(t) -> c phi(t) + integral of k(t-s) phi(s) ds over s > 0.

    The kernel is sampled on [-L, L] with spacing h (grid-compatible h is
    required when applying).  Samples are point values; at a jump of k the
    stored sample must be the two-sided mean, or the trapezoid rule through
    the jump degrades to first order.  rational, when present, is the exact
    symbol c + FT(k) as a rational function of p = it; the solver needs it
    because factorization runs on rational symbols, not on raw samples.
    """

    c: Quaternion
    L: int
    h: float
    kernel: np.ndarray
    rational: object = None

    def __post_init__(self):
        self.kernel = np.asarray(self.kernel, dtype=float)
        count = int(round(2 * self.L / self.h)) + 1
        if self.kernel.shape != (count, 4):
            raise DimensionMismatch(
                f"kernel on [-{self.L},{self.L}] at spacing {self.h} needs "
                f"{count} samples, got {self.kernel.shape}"
            )

    @classmethod
    def from_callable(cls, c, fn, L: int, s: int = DEFAULT_SAMPLES_PER_UNIT,
                      rational=None) -> "ConvolutionOperator":
        h = 1.0 / s
        grid = np.arange(-L * s, L * s + 1) * h
        samples = np.zeros((grid.size, 4))
        for idx, u in enumerate(grid):
            v = fn(float(u))
            if isinstance(v, Quaternion):
                samples[idx] = v.as_array()
            else:
                samples[idx, 0] = float(v)
        cq = c if isinstance(c, Quaternion) else Quaternion(float(c))
        return cls(cq, L, h, samples, rational)

    def as_json(self) -> dict:
        out = {
            "c": self.c.as_json(),
            "kernel": {
                "L": self.L,
                "h": self.h,
                "samples": [[float(v) for v in row] for row in self.kernel],
            },
        }
        if self.rational is not None:
            out["rational"] = self.rational.as_json()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ConvolutionOperator":
        rational = None
        if "rational" in obj:
            from .realize import RationalQMatrix

            rational = RationalQMatrix.from_json(obj["rational"])
        kern = obj["kernel"]
        return cls(
            Quaternion.from_json(obj["c"]),
            int(kern["L"]),
            float(kern["h"]),
            np.asarray(kern["samples"], dtype=float),
            rational,
        )


def apply_convolution(op: ConvolutionOperator, phi: GridFunction) -> GridFunction:
    if abs(op.h - phi.h) > 1e-12:
        raise DimensionMismatch(
            f"kernel spacing {op.h} does not match grid spacing {phi.h}"
        )
    weighted = phi.samples.copy()
    weighted[-1] *= 0.5  # trapezoid endpoint at the horizon
    full = _hconv(op.kernel, weighted)
    offset = op.L * phi.s
    n = phi.samples.shape[0]
    conv = full[offset : offset + n] * phi.h
    # s = 0 trapezoid endpoint: phi(0+) is not stored, extrapolate it; the
    # kernel factor there is k(t), available while t stays within [-L, L]
    phi0 = 2.0 * phi.samples[0] - phi.samples[1]
    reach = min(n, op.L * phi.s)
    kern_at_t = op.kernel[offset + 1 : offset + 1 + reach]
    conv[:reach] += (phi.h / 2.0) * hprod(kern_at_t, phi0[None, :])
    return GridFunction(phi.T, phi.s, hprod(op.c.as_array(), phi.samples) + conv)


def op_V(m: int, phi: GridFunction) -> GridFunction:
    """Moebius-shift operator power.

    V subtracts twice the causal exponential average, its left inverse the
    anti-causal one; both integrals run on cumulative trapezoid panels so
    the pair composes to the identity within discretization order.
    """
    out = phi
    for _ in range(abs(m)):
        out = _v_once(out) if m > 0 else _v_inverse_once(out)
    return out


def _v_once(phi: GridFunction) -> GridFunction:
    h = phi.h
    decay = math.exp(-h)
    prev = np.vstack([np.zeros((1, 4)), phi.samples[:-1]])
    # t = 0 is not a stored node; extrapolate the one-sided limit so the
    # first panel stays second order instead of assuming phi(0) = 0
    prev[0] = 2.0 * phi.samples[0] - phi.samples[1]
    panels = (h / 2.0) * (decay * prev + phi.samples)
    n = phi.samples.shape[0]
    growth = np.exp(np.arange(1, n + 1) * h)
    integral = np.cumsum(growth[:, None] * panels, axis=0) / growth[:, None]
    return GridFunction(phi.T, phi.s, phi.samples - 2.0 * integral)


def _v_inverse_once(phi: GridFunction) -> GridFunction:
    h = phi.h
    decay = math.exp(-h)
    nxt = np.vstack([phi.samples[1:], np.zeros((1, 4))])
    panels = (h / 2.0) * (phi.samples + decay * nxt)
    panels[-1] = 0.0  # nothing known past the horizon
    n = phi.samples.shape[0]
    damp = np.exp(-np.arange(1, n + 1) * h)
    integral = np.cumsum((damp[:, None] * panels)[::-1], axis=0)[::-1] / damp[:, None]
    return GridFunction(phi.T, phi.s, phi.samples - 2.0 * integral)


def _atom_apply(series: LaurentQSeries, phi: GridFunction) -> GridFunction:
    """Apply the operator whose symbol is sum_u atom^u c_u, atom = (p+1)/(p-1).

    atom powers are real elements, so the coefficient may act from the left
    of V^{(u)} phi without ambiguity.
    """
    if series.n != 1:
        raise DimensionMismatch("only scalar symbols correspond to operators here")
    out = GridFunction.zeros(phi.T, phi.s)
    if not series.coeffs:
        return out
    lo = min(series.coeffs)
    hi = max(series.coeffs)
    cur = phi
    for u in range(0, hi + 1):
        if u > 0:
            cur = _v_once(cur)
        if u in series.coeffs:
            q = Quaternion(*np.asarray(series.coeffs[u], dtype=float)[0, 0])
            out = out + cur.left_mul(q)
    cur = phi
    for u in range(-1, lo - 1, -1):
        cur = _v_inverse_once(cur)
        if u in series.coeffs:
            q = Quaternion(*np.asarray(series.coeffs[u], dtype=float)[0, 0])
            out = out + cur.left_mul(q)
    return out


def _moment_integral(g: GridFunction, k: int) -> tuple[Quaternion, float]:
    """Trapezoid value of the k-th exponential moment, with a tail bound.

    Endpoint corrections (cubic extrapolation to t = 0 and the h^2/12
    derivative term) push the quadrature error to O(h^4); the horizon tail
    is bounded by the incomplete-gamma envelope and returned separately.
    """
    t = g.t
    f = g.samples * (t**k * np.exp(-t))[:, None]
    if k == 0:
        f0 = 4.0 * f[0] - 6.0 * f[1] + 4.0 * f[2] - f[3]
    else:
        f0 = np.zeros(4)
    full = np.vstack([f0, f])
    h = g.h
    value = h * (full[0] / 2.0 + full[1:-1].sum(axis=0) + full[-1] / 2.0)
    d_start = (-3.0 * full[0] + 4.0 * full[1] - full[2]) / (2.0 * h)
    d_end = (3.0 * full[-1] - 4.0 * full[-2] + full[-3]) / (2.0 * h)
    value += (h * h / 12.0) * (d_start - d_end)
    late = float(np.max(habs(g.samples[-g.s :]))) if g.samples.size else 0.0
    tail = 2.0 * max(late, 1e-6) * (g.T**k) * math.exp(-g.T)
    return Quaternion(*value), tail


def moment_test(g: GridFunction, m: int, tol: float = 1e-6) -> list:
    """Per-moment verdicts for membership in the image of V^m (m > 0)."""
    if m <= 0:
        raise DimensionMismatch("moment test only makes sense for positive index")
    verdicts = []
    for k in range(m):
        value, tail = _moment_integral(g, k)
        verdicts.append(abs(value) <= tol + tail)
    return verdicts


_TAG_PROBES = (0.37, 1.23, 2.6)


def _check_rational_tag(op: ConvolutionOperator, rel_tol: float = 0.05) -> None:
    """Cross-check the declared rational symbol against the sampled kernel.

    A numeric transform of the samples at a few line frequencies has to
    land near the rational's values there; a gross mismatch means the tag
    describes a different operator, and factoring it would produce a
    solution for the wrong equation.
    """
    r = op.rational
    if r.n != 1:
        raise DimensionMismatch(
            "convolution operators are scalar; the rational tag must be 1x1"
        )
    count = op.kernel.shape[0]
    u = (np.arange(count) - (count - 1) // 2) * op.h
    weights = np.full(count, op.h)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    for t in _TAG_PROBES:
        try:
            want = r.evaluate(Quaternion(0.0, t, 0.0, 0.0)).data[0, 0]
        except QWienerError:
            continue
        phase = np.zeros((count, 4))
        phase[:, 0] = np.cos(t * u)
        phase[:, 1] = np.sin(t * u)
        got = op.c.as_array() + np.sum(weights[:, None] * hprod(phase, op.kernel), axis=0)
        gap = float(np.linalg.norm(got - want))
        if gap > rel_tol * (1.0 + float(np.linalg.norm(want))):
            raise SymbolNotRational(
                "rational tag disagrees with the sampled kernel "
                f"(gap {gap:.3f} at frequency {t})",
                certificate={
                    "frequency": t,
                    "numeric": got.tolist(),
                    "declared": np.asarray(want).tolist(),
                },
            )


def solve_convolution(
    op: ConvolutionOperator,
    g: GridFunction,
    frame: SliceFrame = DEFAULT_FRAME,
    tol: float = 1e-6,
) -> SolveReport:
    """Solvability analysis and solution of c psi + k * psi = g.

    Needs the exact rational symbol on the operator; the factorization
    index m routes between a unique solve, exponential-moment conditions,
    and a polynomial-times-exponential kernel.
    """
    if op.rational is None:
        raise SymbolNotRational(
            "solver needs the operator's rational symbol; kernel samples alone "
            "do not determine a factorable function"
        )
    _check_rational_tag(op)
    try:
        fac = factor_continuous(op.rational, frame)
    except (NotInvertible, NotInvertibleOnCircle) as exc:
        raise SymbolNotInvertible(str(exc), certificate=exc.certificate) from exc

    m = fac.indices[0]
    minus_inv = _one_sided(fac.f_minus_inv, False, "minus-factor inverse")
    plus_inv = _one_sided(fac.f_plus_inv, True, "plus-factor inverse")
    guard = float(op.L + 12)
    if guard >= g.T:
        raise TruncationBudgetExceeded(
            f"guard band {guard:.0f} swallows the horizon T={g.T}; "
            "extend the grid or shorten the kernel window",
            certificate={"horizon": g.T, "guard_band": guard},
        )
    certificates = {
        "factor_residual": fac.residual,
        "minus_inv_support": minus_inv.support,
        "plus_inv_support": plus_inv.support,
        "guard_band": guard,
    }

    w = _atom_apply(minus_inv, g)
    moments = None
    if m > 0:
        moments = []
        for k in range(m):
            value, tail = _moment_integral(w, k)
            moments.append(abs(value))
            certificates.setdefault("moment_tails", []).append(tail)
            if abs(value) > tol + tail:
                return SolveReport(
                    "convolution", m, False,
                    f"unsolvable: moment {k} nonzero",
                    None, [], None, guard, moments, certificates,
                )

    psi = _atom_apply(plus_inv, op_V(-m, w))
    basis = []
    if m < 0:
        for j in range(-m):
            seed = GridFunction.from_callable(
                lambda t, jj=j: t**jj * math.exp(-t), g.T, g.s
            )
            elem = _atom_apply(plus_inv, seed)
            norm = elem.l2()
            if norm > 0.0:
                elem = elem * (1.0 / norm)
            basis.append(elem)

    residual = _interior_l2(apply_convolution(op, psi) - g, guard)
    verdict = "unique" if m == 0 else ("solvable" if m > 0 else "right-invertible")
    return SolveReport(
        "convolution", m, True, verdict, psi, basis, residual, guard, moments,
        certificates,
    )


# ---------------------------------------------------------------------------
# index extraction

def index_of_symbol(symbol, frame: SliceFrame = DEFAULT_FRAME) -> int:
    """Factorization index of a scalar symbol.

    Discrete symbols go through the winding of the embedded determinant on
    the circle; rational line symbols are transported to the circle by the
    Cayley map first (sample points interleave the roots of unity so the
    image of infinity is never hit).
    """
    if isinstance(symbol, LaurentQSeries):
        return winding_index(symbol, frame)
    if not all(hasattr(symbol, a) for a in ("n", "numerator", "denominator")):
        raise SymbolNotRational("expected a Laurent series or a rational symbol")

    den = np.trim_zeros(np.asarray(symbol.denominator, dtype=float), "b")
    if den.size > 1:
        roots = np.roots(den[::-1])
        if np.any(np.abs(roots.real) <= 1e-9 * (1.0 + np.abs(roots))):
            raise PoleOnBoundary(
                "denominator vanishes on the imaginary line",
                certificate={"roots": [[r.real, r.imag] for r in roots]},
            )
    num_embed = {
        k: adjoint_array(c.data, frame) for k, c in symbol.numerator.items()
    }
    top = max(num_embed) if num_embed else 0

    grid = ARGUMENT_GRID
    while True:
        z = np.exp(2j * np.pi * (np.arange(grid) + 0.5) / grid)
        p = (z + 1.0) / (z - 1.0)
        two_n = 2 * symbol.n
        values = np.zeros((grid, two_n, two_n), dtype=complex)
        power = np.ones(grid, dtype=complex)
        for k in range(top + 1):
            if k in num_embed:
                values += power[:, None, None] * num_embed[k]
            power = power * p
        r_vals = np.polyval(den[::-1], p)
        dets = np.linalg.det(values) / r_vals**two_n
        mods = np.abs(dets)
        if np.min(mods) <= 1e-9 * max(np.max(mods), 1e-300):
            raise NotInvertible(
                "embedded determinant vanishes on the line",
                certificate={"min_modulus": float(np.min(mods)), "grid": grid},
            )
        steps = np.angle(np.roll(dets, -1) / dets)
        if np.max(np.abs(steps)) < np.pi / 2:
            total = float(np.sum(steps))
            winding = total / (2.0 * np.pi)
            if abs(winding - round(winding)) > 1e-6:
                raise InternalInvariantViolation(
                    f"argument increment {winding} is not an integer multiple"
                )
            if round(winding) % 2:
                raise InternalInvariantViolation(
                    f"embedded determinant winding {round(winding)} is not even"
                )
            return int(round(winding)) // 2
        if grid >= ARGUMENT_GRID_CAP:
            raise NotInvertible(
                "argument tracking failed at the grid cap",
                certificate={"grid": grid, "min_modulus": float(np.min(mods))},
            )
        grid *= 2
