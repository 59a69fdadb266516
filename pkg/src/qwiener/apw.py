"""Almost-periodic Wiener algebra with an integrable part.

Elements are sums of a finite exponential part (exact real frequencies with
quaternionic matrix coefficients) and a compactly supported kernel part
sampled on a uniform symmetric grid with trapezoid quadrature,

    F(it) = sum_mu e^{i t mu} f_mu + integral e^{i t u} Phi(u) du.

The product has four terms: frequency sums, two shifted-kernel cross terms,
and kernel convolution.  Kernel grids always hold an odd number of samples so
0 sits on the grid and convolutions stay aligned; frequency shifts that are
not multiples of the step fall back to linear interpolation.

Inversion is implemented exactly where the algebra allows it to be
constructive: commensurable pure-exponential elements reduce to the discrete
Wiener algebra, and elements close to their frequency-zero coefficient get a
Neumann series.  Everything else is out of scope by design.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import (
    DimensionMismatch,
    NotInvertible,
    NotScalar,
    OutOfScope,
)
from .quaternions import (
    DEFAULT_FRAME,
    QMatrix,
    Quaternion,
    SliceFrame,
    adjoint_array,
    adjoint_pullback,
    hconj,
    hprod,
    operator_norm,
)
from .series import LaurentQSeries, star_inverse

__all__ = [
    "APPart",
    "L1Part",
    "BElement",
    "ComplexBElement",
    "BInvertibilityCertificate",
    "b_star_mul",
    "b_conj",
    "b_evaluate",
    "b_embed",
    "b_is_invertible",
    "b_star_inverse",
]

FREQ_MERGE_TOL = 1e-12
AP_TERM_BUDGET = 20_000


def _merge_frequencies(freqs: np.ndarray, coeffs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort terms and combine coefficients of equal frequencies."""
    if freqs.size == 0:
        return freqs, coeffs
    order = np.argsort(freqs, kind="stable")
    freqs, coeffs = freqs[order], coeffs[order]
    out_f: list[float] = []
    out_c: list[np.ndarray] = []
    for f, c in zip(freqs, coeffs):
        if out_f and abs(f - out_f[-1]) <= FREQ_MERGE_TOL:
            out_c[-1] = out_c[-1] + c
        else:
            out_f.append(float(f))
            out_c.append(np.array(c))
    keep = [k for k, c in enumerate(out_c) if np.any(c)]
    if not keep:
        n = coeffs.shape[1]
        return np.zeros(0), np.zeros((0, n, n, 4))
    return np.array([out_f[k] for k in keep]), np.stack([out_c[k] for k in keep])


@dataclasses.dataclass
class APPart:
    """Finite exponential sum: frequencies and matching matrix coefficients."""

    freqs: np.ndarray
    coeffs: np.ndarray

    def __init__(self, freqs, coeffs):
        freqs = np.asarray(freqs, dtype=float).reshape(-1)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 4 or coeffs.shape[0] != freqs.size or coeffs.shape[3] != 4:
            raise DimensionMismatch(
                f"coefficients shaped {coeffs.shape} do not match {freqs.size} frequencies"
            )
        if coeffs.shape[1] != coeffs.shape[2]:
            raise DimensionMismatch("coefficients must be square")
        self.freqs, self.coeffs = _merge_frequencies(freqs, coeffs)
        if self.coeffs.size == 0:
            self.coeffs = np.zeros((0, coeffs.shape[1], coeffs.shape[2], 4))

    @classmethod
    def empty(cls, n: int) -> "APPart":
        return cls(np.zeros(0), np.zeros((0, n, n, 4)))

    @property
    def terms(self) -> int:
        return self.freqs.size

    def coeff_at(self, mu: float, n: int) -> np.ndarray:
        hits = np.nonzero(np.abs(self.freqs - mu) <= FREQ_MERGE_TOL)[0]
        if hits.size:
            return self.coeffs[hits[0]]
        return np.zeros((n, n, 4))

    def norm(self) -> float:
        return float(
            sum(operator_norm(QMatrix(c)) for c in self.coeffs)
        )


@dataclasses.dataclass
class L1Part:
    """Kernel sampled on the symmetric grid -L, -L+h, ..., L (odd count)."""

    h: float
    samples: np.ndarray

    def __init__(self, h: float, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 4 or samples.shape[3] != 4:
            raise DimensionMismatch(f"samples shaped {samples.shape}, expected (N, n, n, 4)")
        if samples.shape[1] != samples.shape[2]:
            raise DimensionMismatch("kernel samples must be square matrices")
        if samples.shape[0] % 2 == 0:
            raise DimensionMismatch("kernel grids need an odd sample count (0 on grid)")
        if h <= 0:
            raise ValueError("step must be positive")
        self.h = float(h)
        self.samples = samples

    @property
    def count(self) -> int:
        return self.samples.shape[0]

    @property
    def L(self) -> float:
        return self.h * (self.count - 1) / 2.0

    def grid(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.count)

    def weights(self) -> np.ndarray:
        w = np.ones(self.count)
        w[0] = w[-1] = 0.5
        return w

    def norm(self) -> float:
        mags = np.array([operator_norm(QMatrix(s)) for s in self.samples])
        return float(self.h * np.sum(self.weights() * mags))

    @classmethod
    def zeros(cls, n: int, L: float, h: float) -> "L1Part":
        count = 2 * int(round(L / h)) + 1
        return cls(h, np.zeros((count, n, n, 4)))


class BElement:
    """Almost-periodic plus integrable symbol on the imaginary sphere-line."""

    __slots__ = ("n", "ap", "l1")

    def __init__(self, n: int, ap: APPart | None = None, l1: L1Part | None = None):
        self.n = int(n)
        self.ap = ap if ap is not None else APPart.empty(self.n)
        if self.ap.coeffs.shape[1] != self.n:
            raise DimensionMismatch("exponential part size does not match n")
        if l1 is not None and l1.samples.shape[1] != self.n:
            raise DimensionMismatch("kernel part size does not match n")
        if l1 is not None and not np.any(l1.samples):
            l1 = None
        self.l1 = l1

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: QMatrix | Quaternion) -> "BElement":
        if isinstance(value, Quaternion):
            value = QMatrix.from_scalar(value)
        return cls(value.rows, APPart(np.zeros(1), value.data[None]))

    @classmethod
    def identity(cls, n: int) -> "BElement":
        return cls.constant(QMatrix.identity(n))

    @classmethod
    def from_ap_terms(cls, terms) -> "BElement":
        terms = list(terms)
        n = terms[0][1].rows
        freqs = np.array([float(mu) for mu, _ in terms])
        coeffs = np.stack([c.data for _, c in terms])
        return cls(n, APPart(freqs, coeffs))

    @classmethod
    def from_kernel(cls, h: float, samples) -> "BElement":
        part = L1Part(h, samples)
        return cls(part.samples.shape[1], APPart.empty(part.samples.shape[1]), part)

    # -- structure ----------------------------------------------------------

    def norm(self) -> float:
        total = self.ap.norm()
        if self.l1 is not None:
            total += self.l1.norm()
        return total

    def is_pure_ap(self) -> bool:
        return self.l1 is None

    def kernel_step(self) -> float | None:
        return None if self.l1 is None else self.l1.h

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "BElement") -> "BElement":
        if self.n != other.n:
            raise DimensionMismatch(f"size mismatch: {self.n} vs {other.n}")
        freqs = np.concatenate([self.ap.freqs, other.ap.freqs])
        if self.ap.terms and other.ap.terms:
            coeffs = np.concatenate([self.ap.coeffs, other.ap.coeffs])
        elif self.ap.terms:
            coeffs = self.ap.coeffs
        else:
            coeffs = other.ap.coeffs
        ap = APPart(freqs, coeffs) if freqs.size else APPart.empty(self.n)
        l1 = _add_kernels(self.l1, other.l1, self.n)
        return BElement(self.n, ap, l1)

    def __neg__(self) -> "BElement":
        ap = APPart(self.ap.freqs, -self.ap.coeffs) if self.ap.terms else APPart.empty(self.n)
        l1 = None if self.l1 is None else L1Part(self.l1.h, -self.l1.samples)
        return BElement(self.n, ap, l1)

    def __sub__(self, other: "BElement") -> "BElement":
        return self + (-other)

    def scale(self, factor: float) -> "BElement":
        ap = (
            APPart(self.ap.freqs, self.ap.coeffs * factor)
            if self.ap.terms
            else APPart.empty(self.n)
        )
        l1 = None if self.l1 is None else L1Part(self.l1.h, self.l1.samples * factor)
        return BElement(self.n, ap, l1)

    def left_mul_matrix(self, m: QMatrix) -> "BElement":
        ap = (
            APPart(self.ap.freqs, _stack_matmul(m.data[None], self.ap.coeffs))
            if self.ap.terms
            else APPart.empty(self.n)
        )
        l1 = (
            None
            if self.l1 is None
            else L1Part(self.l1.h, _stack_matmul(m.data[None], self.l1.samples))
        )
        return BElement(self.n, ap, l1)

    def right_mul_matrix(self, m: QMatrix) -> "BElement":
        ap = (
            APPart(self.ap.freqs, _stack_matmul(self.ap.coeffs, m.data[None]))
            if self.ap.terms
            else APPart.empty(self.n)
        )
        l1 = (
            None
            if self.l1 is None
            else L1Part(self.l1.h, _stack_matmul(self.l1.samples, m.data[None]))
        )
        return BElement(self.n, ap, l1)

    def __repr__(self):
        kern = "none" if self.l1 is None else f"[-{self.l1.L:g}, {self.l1.L:g}] step {self.l1.h:g}"
        return f"BElement(n={self.n}, {self.ap.terms} frequencies, kernel {kern})"

    # -- serialization ------------------------------------------------------

    def as_json(self) -> dict:
        out = {
            "n": self.n,
            "ap": [
                {"freq": float(mu), "coeff": QMatrix(c).as_json()}
                for mu, c in zip(self.ap.freqs, self.ap.coeffs)
            ],
        }
        if self.l1 is not None:
            out["l1"] = {
                "L": self.l1.L,
                "h": self.l1.h,
                "samples": [QMatrix(s).as_json() for s in self.l1.samples],
            }
        return out

    @classmethod
    def from_json(cls, obj) -> "BElement":
        n = int(obj["n"])
        terms = obj.get("ap", [])
        if terms:
            freqs = np.array([float(t["freq"]) for t in terms])
            coeffs = np.stack([QMatrix.from_json(t["coeff"]).data for t in terms])
            if coeffs.shape[1:3] != (n, n):
                raise DimensionMismatch("exponential coefficient size does not match n")
            ap = APPart(freqs, coeffs)
        else:
            ap = APPart.empty(n)
        l1 = None
        if "l1" in obj and obj["l1"] is not None:
            spec = obj["l1"]
            samples = np.stack([QMatrix.from_json(s).data for s in spec["samples"]])
            l1 = L1Part(float(spec["h"]), samples)
            if abs(l1.L - float(spec["L"])) > 1e-9 * max(1.0, float(spec["L"])):
                raise DimensionMismatch(
                    f"declared half-width {spec['L']} inconsistent with "
                    f"{samples.shape[0]} samples at step {spec['h']}"
                )
            if samples.shape[1:3] != (n, n):
                raise DimensionMismatch("kernel sample size does not match n")
        return cls(n, ap, l1)


def _stack_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton matmul broadcast over a leading stack axis."""
    from .quaternions import hmatmul

    return hmatmul(a, b)


def _add_kernels(a: L1Part | None, b: L1Part | None, n: int) -> L1Part | None:
    if a is None:
        return None if b is None else L1Part(b.h, np.array(b.samples))
    if b is None:
        return L1Part(a.h, np.array(a.samples))
    if abs(a.h - b.h) > 1e-12:
        raise DimensionMismatch(f"kernel steps differ: {a.h} vs {b.h}")
    big, small = (a, b) if a.count >= b.count else (b, a)
    pad = (big.count - small.count) // 2
    merged = np.array(big.samples)
    merged[pad : pad + small.count] += small.samples
    return L1Part(big.h, merged)


# ---------------------------------------------------------------------------
# product

def _shift_kernel(kern: L1Part, shift: float, out_count: int, out_L: float) -> np.ndarray:
    """Resample kern(u - shift) on the output grid, zero outside, linear interp."""
    pos = (np.arange(out_count) * kern.h - out_L - shift + kern.L) / kern.h
    i0 = np.floor(pos).astype(int)
    frac = pos - i0
    # align exactly when the shift is a grid multiple; kills interpolation error
    on_grid = np.abs(frac) < 1e-9
    frac = np.where(on_grid, 0.0, frac)
    out = np.zeros((out_count,) + kern.samples.shape[1:])
    valid0 = (i0 >= 0) & (i0 < kern.count)
    valid1 = (i0 + 1 >= 0) & (i0 + 1 < kern.count) & (frac > 0)
    out[valid0] += (1.0 - frac[valid0])[:, None, None, None] * kern.samples[i0[valid0]]
    out[valid1] += frac[valid1][:, None, None, None] * kern.samples[i0[valid1] + 1]
    return out


def _kernel_convolve(a: L1Part, b: L1Part, frame: SliceFrame) -> L1Part:
    """Grid convolution with quadrature weight h, through the adjoint embedding."""
    na, nb = a.count, b.count
    out_count = na + nb - 1
    fa = adjoint_array(a.samples, frame)
    fb = adjoint_array(b.samples, frame)
    size = fa.shape[-1]
    nfft = 1
    while nfft < out_count:
        nfft *= 2
    fa_hat = np.fft.fft(np.concatenate([fa, np.zeros((nfft - na, size, size))]), axis=0)
    fb_hat = np.fft.fft(np.concatenate([fb, np.zeros((nfft - nb, size, size))]), axis=0)
    conv = np.fft.ifft(fa_hat @ fb_hat, axis=0)[:out_count] * a.h
    comp, _ = adjoint_pullback(conv, frame)
    return L1Part(a.h, comp)


def b_star_mul(f: BElement, g: BElement) -> BElement:
    """Four-term product: frequency sums, two cross terms, kernel convolution."""
    if f.n != g.n:
        raise DimensionMismatch(f"size mismatch: {f.n} vs {g.n}")
    n = f.n
    # exponential x exponential
    ap_out: APPart
    if f.ap.terms and g.ap.terms:
        if f.ap.terms * g.ap.terms > AP_TERM_BUDGET:
            raise OutOfScope(
                f"product would carry {f.ap.terms * g.ap.terms} frequencies; "
                f"budget is {AP_TERM_BUDGET}"
            )
        sums = (f.ap.freqs[:, None] + g.ap.freqs[None, :]).reshape(-1)
        prods = _stack_matmul(
            np.repeat(f.ap.coeffs, g.ap.terms, axis=0),
            np.tile(g.ap.coeffs, (f.ap.terms, 1, 1, 1)),
        )
        ap_out = APPart(sums, prods)
    else:
        ap_out = APPart.empty(n)

    step = None
    for part in (f.l1, g.l1):
        if part is not None:
            if step is not None and abs(part.h - step) > 1e-12:
                raise DimensionMismatch("kernel steps differ between factors")
            step = part.h

    kernels: list[L1Part] = []
    if g.l1 is not None and f.ap.terms:
        shift_max = float(np.max(np.abs(f.ap.freqs)))
        out_L = step * math.ceil((g.l1.L + shift_max) / step - 1e-9)
        out_count = 2 * int(round(out_L / step)) + 1
        acc = np.zeros((out_count, n, n, 4))
        for mu, c in zip(f.ap.freqs, f.ap.coeffs):
            shifted = _shift_kernel(g.l1, float(mu), out_count, out_L)
            acc += _stack_matmul(c[None], shifted)
        kernels.append(L1Part(step, acc))
    if f.l1 is not None and g.ap.terms:
        shift_max = float(np.max(np.abs(g.ap.freqs)))
        out_L = step * math.ceil((f.l1.L + shift_max) / step - 1e-9)
        out_count = 2 * int(round(out_L / step)) + 1
        acc = np.zeros((out_count, n, n, 4))
        for mu, c in zip(g.ap.freqs, g.ap.coeffs):
            shifted = _shift_kernel(f.l1, float(mu), out_count, out_L)
            acc += _stack_matmul(shifted, c[None])
        kernels.append(L1Part(step, acc))
    if f.l1 is not None and g.l1 is not None:
        kernels.append(_kernel_convolve(f.l1, g.l1, DEFAULT_FRAME))

    l1_out: L1Part | None = None
    for k in kernels:
        l1_out = _add_kernels(l1_out, k, n)
    return BElement(n, ap_out, l1_out)


def b_conj(f: BElement) -> BElement:
    """Conjugate partner of a scalar element."""
    if f.n != 1:
        raise NotScalar("conjugate partner is defined for scalar elements")
    ap = (
        APPart(f.ap.freqs, hconj(f.ap.coeffs))
        if f.ap.terms
        else APPart.empty(1)
    )
    l1 = None if f.l1 is None else L1Part(f.l1.h, hconj(f.l1.samples))
    return BElement(1, ap, l1)


def _phase_array(i: Quaternion, phases: np.ndarray) -> np.ndarray:
    """Quaternion array of e^{i phase} for a unit imaginary i, shape (m, 4)."""
    out = np.zeros(phases.shape + (4,))
    out[..., 0] = np.cos(phases)
    s = np.sin(phases)
    out[..., 1] = s * i.x
    out[..., 2] = s * i.y
    out[..., 3] = s * i.z
    return out


def _check_unit_imaginary(i: Quaternion):
    if abs(i.w) > 1e-9 or abs(abs(i) - 1.0) > 1e-9:
        raise ValueError("evaluation direction must be a unit imaginary quaternion")


def b_evaluate(f: BElement, i: Quaternion, t: float) -> QMatrix:
    """Exact exponential sum plus trapezoid quadrature of the kernel integral."""
    _check_unit_imaginary(i)
    total = np.zeros((f.n, f.n, 4))
    if f.ap.terms:
        phases = _phase_array(i, t * f.ap.freqs)
        total += np.sum(hprod(phases[:, None, None, :], f.ap.coeffs), axis=0)
    if f.l1 is not None:
        phases = _phase_array(i, t * f.l1.grid())
        w = (f.l1.h * f.l1.weights())[:, None, None, None]
        total += np.sum(w * hprod(phases[:, None, None, :], f.l1.samples), axis=0)
    return QMatrix(total)


# ---------------------------------------------------------------------------
# embedded symbols

class ComplexBElement:
    """Embedded symbol: complex exponential sum plus complex kernel samples."""

    __slots__ = ("size", "freqs", "coeffs", "h", "samples")

    def __init__(self, size, freqs, coeffs, h=None, samples=None):
        self.size = int(size)
        self.freqs = np.asarray(freqs, dtype=float).reshape(-1)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.h = None if h is None else float(h)
        self.samples = None if samples is None else np.asarray(samples, dtype=complex)

    def kernel_grid(self) -> np.ndarray | None:
        if self.samples is None:
            return None
        count = self.samples.shape[0]
        L = self.h * (count - 1) / 2.0
        return -L + self.h * np.arange(count)

    def evaluate(self, t: float) -> np.ndarray:
        out = np.zeros((self.size, self.size), dtype=complex)
        if self.freqs.size:
            out += np.tensordot(
                np.exp(1j * t * self.freqs), self.coeffs, axes=(0, 0)
            )
        if self.samples is not None:
            grid = self.kernel_grid()
            w = np.ones(grid.size)
            w[0] = w[-1] = 0.5
            out += self.h * np.tensordot(
                w * np.exp(1j * t * grid), self.samples, axes=(0, 0)
            )
        return out

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        out = np.zeros(ts.shape + (self.size, self.size), dtype=complex)
        if self.freqs.size:
            out += np.tensordot(
                np.exp(1j * np.outer(ts, self.freqs)), self.coeffs, axes=(1, 0)
            )
        if self.samples is not None:
            grid = self.kernel_grid()
            w = np.ones(grid.size)
            w[0] = w[-1] = 0.5
            out += self.h * np.tensordot(
                np.exp(1j * np.outer(ts, grid)) * w, self.samples, axes=(1, 0)
            )
        return out

    def ap_only(self) -> "ComplexBElement":
        return ComplexBElement(self.size, self.freqs, self.coeffs)


def b_embed(f: BElement, frame: SliceFrame = DEFAULT_FRAME) -> ComplexBElement:
    """Coefficientwise and samplewise adjoint; multiplicative for products."""
    coeffs = (
        adjoint_array(f.ap.coeffs, frame)
        if f.ap.terms
        else np.zeros((0, 2 * f.n, 2 * f.n), dtype=complex)
    )
    if f.l1 is not None:
        return ComplexBElement(
            2 * f.n, f.ap.freqs, coeffs, f.l1.h, adjoint_array(f.l1.samples, frame)
        )
    return ComplexBElement(2 * f.n, f.ap.freqs, coeffs)


# ---------------------------------------------------------------------------
# invertibility certificate

@dataclasses.dataclass
class BInvertibilityCertificate:
    """Sampled (sufficient, not decisive) invertibility verdict on the line."""

    invertible: bool
    min_value: float
    argmin_t: float
    far_min: float
    far_argmin_t: float
    window: float
    step: float
    tol: float

    def __bool__(self) -> bool:
        return self.invertible

    def as_json(self) -> dict:
        return dataclasses.asdict(self)


def b_is_invertible(
    f: BElement,
    frame: SliceFrame = DEFAULT_FRAME,
    window: float | None = None,
    step: float | None = None,
    tol: float | None = None,
) -> BInvertibilityCertificate:
    """Sample |det| of the embedded symbol over [-window, window].

    After the coarse pass the neighborhood of the minimizer is re-sampled at
    a 32x finer step, so analytic zeros drop far below the relative default
    tolerance instead of hiding between samples.  The far field is covered by
    the exponential-only symbol (the kernel part decays at infinity), sampled
    over the same window.  A heuristic certificate, not a proof.
    """
    sym = b_embed(f, frame)
    nonzero = np.abs(f.ap.freqs) > FREQ_MERGE_TOL
    mu_min = float(np.min(np.abs(f.ap.freqs[nonzero]))) if np.any(nonzero) else None
    mu_max = float(np.max(np.abs(f.ap.freqs))) if f.ap.terms else 0.0
    scale_max = max(mu_max, 1.0)
    if f.l1 is not None:
        scale_max = max(scale_max, f.l1.L)
    if window is None:
        window = 64.0
        if mu_min is not None:
            window = max(window, 8.0 * math.pi / mu_min)
        if f.l1 is not None:
            window = max(window, 4.0 * f.l1.L)
        window = min(window, 4096.0)
    if step is None:
        step = min(0.125, math.pi / (8.0 * scale_max))

    ts = np.arange(-window, window + step / 2, step)

    def refined_minimum(element: ComplexBElement) -> tuple[float, float]:
        dets = np.abs(np.linalg.det(element.evaluate_many(ts)))
        grid, vals = ts, dets
        best_v, best_t = float(np.min(dets)), float(ts[int(np.argmin(dets))])
        for _ in range(2):
            k = int(np.argmin(vals))
            lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
            grid = np.linspace(lo, hi, 129)
            vals = np.abs(np.linalg.det(element.evaluate_many(grid)))
            k = int(np.argmin(vals))
            if vals[k] < best_v:
                best_v, best_t = float(vals[k]), float(grid[k])
        return best_v, best_t

    dets = np.abs(np.linalg.det(sym.evaluate_many(ts)))
    min_value, argmin_t = refined_minimum(sym)
    far_min, far_argmin = refined_minimum(sym.ap_only())

    eff_tol = tol if tol is not None else 1e-6 * max(1.0, float(np.max(dets)))
    verdict = bool(min(min_value, far_min) > eff_tol)
    return BInvertibilityCertificate(
        verdict, min_value, argmin_t, far_min, far_argmin, float(window), float(step), eff_tol
    )


# ---------------------------------------------------------------------------
# inversion

def _float_gcd(values: np.ndarray, eps: float = 1e-9) -> float | None:
    """Approximate positive gcd of real magnitudes; None when incommensurable."""
    g = 0.0
    for v in np.abs(values):
        if v <= FREQ_MERGE_TOL:
            continue
        a, b = (g, v) if g >= v else (v, g)
        while b > eps:
            a, b = b, math.fmod(a, b)
        g = a
    if g <= eps:
        return None
    for v in np.abs(values):
        if v <= FREQ_MERGE_TOL:
            continue
        ratio = v / g
        if abs(ratio - round(ratio)) > 1e-6:
            return None
    return g


def _constant_inverse(c: np.ndarray, frame: SliceFrame) -> QMatrix:
    adj = adjoint_array(c, frame)
    try:
        inv = np.linalg.inv(adj)
    except np.linalg.LinAlgError:
        raise NotInvertible("constant coefficient is singular") from None
    comp, _ = adjoint_pullback(inv, frame)
    return QMatrix(comp)


def b_star_inverse(f: BElement, mode: str = "auto", tol: float = 1e-9) -> BElement:
    """Inverse in the almost-periodic algebra, on the constructive subclasses.

    mode "ap": pure exponential part with commensurable frequencies; the
    element is transported to the discrete Wiener algebra through the base
    frequency and inverted there (rigorous circle certificate included).
    mode "neumann": the frequency-zero coefficient c dominates,
    ||I - F c^{-1}|| < 1, and the series sum_k (I - c^{-1} F)^{*k} c^{-1}
    is accumulated until the term norm clears the tolerance.  mode "auto"
    tries "ap" then "neumann".  Anything else raises OutOfScope.
    """
    if mode not in ("auto", "ap", "neumann"):
        raise ValueError(f"unknown mode {mode!r}")

    if mode in ("auto", "ap") and f.is_pure_ap():
        base = _float_gcd(f.ap.freqs)
        if f.ap.terms and np.all(np.abs(f.ap.freqs) <= FREQ_MERGE_TOL):
            inv = _constant_inverse(f.ap.coeffs[0], DEFAULT_FRAME)
            return BElement.constant(inv)
        if base is not None:
            series = LaurentQSeries(
                f.n,
                {
                    int(round(mu / base)): c
                    for mu, c in zip(f.ap.freqs, f.ap.coeffs)
                },
            )
            inv_series = star_inverse(series, tol=tol)
            return BElement(
                f.n,
                APPart(
                    np.array([u * base for u in inv_series.support]),
                    np.stack([inv_series.coeffs[u] for u in inv_series.support]),
                ),
            )
        if mode == "ap":
            raise OutOfScope("frequencies are not commensurable")

    if mode in ("auto", "neumann"):
        c = f.ap.coeff_at(0.0, f.n)
        if not np.any(c):
            raise OutOfScope("no frequency-zero coefficient to anchor a Neumann series")
        cert = b_is_invertible(f)
        if not cert:
            raise NotInvertible(
                "sampled determinant vanishes", certificate=cert.as_json()
            )
        try:
            c_inv = _constant_inverse(c, DEFAULT_FRAME)
        except NotInvertible:
            raise OutOfScope("frequency-zero coefficient is singular") from None
        # the spec-facing contraction measure uses F c^{-1}; the series itself
        # needs the left-anchored form, whose norm controls convergence
        right_e = BElement.identity(f.n) - f.right_mul_matrix(c_inv)
        left_e = BElement.identity(f.n) - f.left_mul_matrix(c_inv)
        r_right, r_left = right_e.norm(), left_e.norm()
        if r_right >= 1.0 or r_left >= 1.0:
            raise OutOfScope(
                f"Neumann precondition fails: ||I - F c^-1|| = {r_right:.3f}, "
                f"||I - c^-1 F|| = {r_left:.3f}"
            )
        term = BElement.identity(f.n)
        total = BElement.identity(f.n)
        bound = tol * (1.0 - r_left)
        for _ in range(10_000):
            term = b_star_mul(term, left_e)
            total = total + term
            if term.norm() < bound:
                break
        else:
            raise OutOfScope("Neumann series did not clear the tolerance budget")
        return total.right_mul_matrix(c_inv)

    raise OutOfScope(
        "element is outside the constructive inversion classes (commensurable "
        "exponential or Neumann-dominated)"
    )
