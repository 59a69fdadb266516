"""Wiener-Hopf factorization F = F_- * D * F_+ of quaternionic symbols.

The discrete pipeline works in the complex embedding: polynomial solutions of
the barrier problem (the embedded symbol times a polynomial vector must stay
polynomial up to a prescribed order at infinity) are swept over increasing
order budgets until their values at 0 span the embedded space.  A pairing
pass then replaces half of the solutions with their J-conjugated partners so
the set pulls back to quaternionic columns, and the factors are assembled
from those columns.  Index sums are certified against the winding number at
every stage.

Continuous symbols enter as rational functions of p with a real denominator,
are transported to the disc by the involutive substitution
z = (p + 1)(p - 1)^{-1}, cleared to a Laurent polynomial, factored there,
and written back in terms of the diagonal atoms ((p+1)/(p-1))^k.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import (
    DegreeCapExceeded,
    DimensionMismatch,
    InternalInvariantViolation,
    NotInvertible,
    NotInvertibleOnCircle,
    PoleOnBoundary,
    ResidualTooLarge,
)
from .quaternions import (
    DEFAULT_FRAME,
    QMatrix,
    SliceFrame,
    adjoint_pullback,
    hconj,
    hprod,
)
from .series import (
    ComplexLaurentSeries,
    LaurentQSeries,
    circle_invertibility,
    embed_symbol,
    is_invertible,
    star_inverse,
    star_mul,
    winding_index,
)

__all__ = [
    "BarrierSolution",
    "SolutionSet",
    "FactorizationResult",
    "solve_barrier_complex",
    "standard_solution_set",
    "symmetrize_solution_set",
    "factor_discrete",
    "factor_continuous",
    "verify_factorization",
]

RANK_TOL = 1e-9
SPAN_TOL = 1e-6
# the barrier sweep resolves plus-factor inverses through their Neumann
# tails, so the polynomial degree must reach the point where the tail dips
# under RANK_TOL; structural degree bounds alone miss that for symbols with
# zeros at moderate distance from the circle
DEGREE_HARD_CAP = 256


@dataclasses.dataclass
class BarrierSolution:
    """Polynomial vector solving the barrier problem up to its ord at infinity.

    coeffs[k] is the z^k coefficient; ord is the top power surviving in the
    product symbol * solution.
    """

    coeffs: np.ndarray  # (deg+1, size) complex
    ord: int

    @property
    def size(self) -> int:
        return self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def value_at_zero(self) -> np.ndarray:
        return self.coeffs[0]

    def padded(self, deg: int) -> np.ndarray:
        out = np.zeros((deg + 1, self.size), dtype=complex)
        out[: self.coeffs.shape[0]] = self.coeffs
        return out


@dataclasses.dataclass
class SolutionSet:
    """Ordered barrier solutions whose values at 0 are independent."""

    symbol: ComplexLaurentSeries
    solutions: list
    index_set: list
    order: str

    @property
    def size(self) -> int:
        return self.symbol.size

    def values_at_zero(self) -> np.ndarray:
        return np.column_stack([s.value_at_zero() for s in self.solutions])


@dataclasses.dataclass
class FactorizationResult:
    """Factors, indices, truncated inverses, and the verified residual.

    For domain "continuous" the series live in the atom variable
    z = (p+1)/(p-1), so D(p) = diag[((p+1)/(p-1))^{k_i}].
    """

    f_minus: LaurentQSeries
    indices: list
    f_plus: LaurentQSeries
    residual: float
    f_minus_inv: LaurentQSeries
    f_plus_inv: LaurentQSeries
    domain: str
    certificates: dict

    @property
    def n(self) -> int:
        return self.f_plus.n

    def diagonal(self) -> LaurentQSeries:
        return _diagonal_powers(self.n, self.indices)

    def as_json(self) -> dict:
        return {
            "domain": self.domain,
            "indices": [int(k) for k in self.indices],
            "f_minus": self.f_minus.as_json(),
            "f_plus": self.f_plus.as_json(),
            "f_minus_inv": self.f_minus_inv.as_json(),
            "f_plus_inv": self.f_plus_inv.as_json(),
            "residual": float(self.residual),
            "certificates": self.certificates,
        }


def _diagonal_powers(n: int, indices) -> LaurentQSeries:
    coeffs: dict = {}
    for m, k in enumerate(indices):
        block = coeffs.setdefault(int(k), np.zeros((n, n, 4)))
        block[m, m, 0] = 1.0
    return LaurentQSeries(n, coeffs)


def _check_circle_invertible(fc: ComplexLaurentSeries):
    def dets(n_grid: int) -> np.ndarray:
        return np.linalg.det(fc.circle_values(n_grid))

    cert = circle_invertibility(dets, fc.width, None, None)
    if not cert:
        raise NotInvertibleOnCircle(
            "embedded symbol is singular on the circle", certificate=cert.as_json()
        )
    return cert


def solve_barrier_complex(
    fc: ComplexLaurentSeries, ord_budget: int, deg: int
) -> list:
    """Basis of polynomial solutions of degree <= deg within the ord budget.

    A solution is a polynomial vector x with every z^m coefficient of fc * x
    vanishing for m > ord_budget; the returned ord of each basis vector is the
    top power actually present in its product.
    """
    _check_circle_invertible(fc)
    s = fc.size
    lo = fc.support_min
    hi = fc.support_max
    top = hi + deg
    rows = list(range(ord_budget + 1, top + 1))
    unknowns = s * (deg + 1)
    if rows:
        system = np.zeros((s * len(rows), unknowns), dtype=complex)
        for r, m in enumerate(rows):
            for k in range(deg + 1):
                system[r * s : (r + 1) * s, k * s : (k + 1) * s] = fc.coeff(m - k)
        _, sing, vh = np.linalg.svd(system)
        scale = sing[0] if sing.size else 0.0
        rank = int(np.sum(sing > RANK_TOL * max(scale, 1.0)))
        null = vh[rank:].conj()
    else:
        null = np.eye(unknowns, dtype=complex)

    out = []
    for vec in null:
        coeffs = vec.reshape(deg + 1, s)
        out.append(BarrierSolution(coeffs, _true_ord(fc, coeffs, lo, top)))
    out.sort(key=lambda b: b.ord)
    return out


def _product_coeffs(fc: ComplexLaurentSeries, coeffs: np.ndarray, lo: int, top: int):
    """Coefficients of fc * psi for powers lo .. top, stacked."""
    deg = coeffs.shape[0] - 1
    prods = np.zeros((top - lo + 1, fc.size), dtype=complex)
    for m in range(lo, top + 1):
        acc = np.zeros(fc.size, dtype=complex)
        for k in range(min(deg, m - lo) + 1):
            acc += fc.coeff(m - k) @ coeffs[k]
        prods[m - lo] = acc
    return prods


def _true_ord(fc: ComplexLaurentSeries, coeffs: np.ndarray, lo: int, top: int) -> int:
    prods = _product_coeffs(fc, coeffs, lo, top)
    mags = np.linalg.norm(prods, axis=1)
    scale = float(np.max(mags))
    if scale == 0.0:
        raise InternalInvariantViolation("barrier product vanished identically")
    alive = np.nonzero(mags > RANK_TOL * scale)[0]
    return int(lo + alive[-1])


def _interleave_positions(s: int) -> list:
    half = s // 2
    order = []
    for m in range(half):
        order.append(m)
        order.append(half + m)
    return order


def standard_solution_set(
    fc: ComplexLaurentSeries, order: str = "interleaved"
) -> SolutionSet:
    """Greedy ord-budget sweep until values at 0 span the embedded space.

    The selected ord multiset is certified against the determinant winding;
    a mismatch doubles the polynomial degree bound, up to 8x the default.
    """
    if order not in ("descending", "interleaved"):
        raise ValueError(f"unknown order {order!r}")
    s = fc.size
    if order == "interleaved" and s % 2:
        raise DimensionMismatch("interleaved order needs even size")
    cert = _check_circle_invertible(fc)
    wind = cert.winding
    width = fc.width
    deg0 = max(width * s + abs(wind), 1)
    deg = deg0

    while True:
        selected = _sweep_budgets(fc, deg, s, wind, width)
        if selected is not None and sum(b.ord for b in selected) == wind:
            break
        if deg >= max(8 * deg0, DEGREE_HARD_CAP):
            raise DegreeCapExceeded(
                f"no standard set within degree {deg}",
                certificate={"winding": wind, "degree": deg},
            )
        deg *= 2

    selected.sort(key=lambda b: -b.ord)
    solutions = [None] * s
    for pos, b in zip(_interleave_positions(s) if order == "interleaved" else range(s), selected):
        solutions[pos] = b
    index_set = [b.ord for b in solutions]
    return SolutionSet(fc, solutions, index_set, order)


def _sweep_budgets(fc, deg, s, wind, width):
    budget = -(-wind // s) - width - 1  # safe underestimate of the lowest ord
    top_budget = fc.support_max + deg
    basis = np.zeros((s, 0), dtype=complex)
    selected = []
    while budget <= top_budget and len(selected) < s:
        for sol in solve_barrier_complex(fc, budget, deg):
            if len(selected) == s:
                break
            v = sol.value_at_zero()
            resid = v - basis @ (basis.conj().T @ v)
            if np.linalg.norm(resid) > SPAN_TOL:
                selected.append(sol)
                basis = np.column_stack([basis, resid / np.linalg.norm(resid)])
        budget += 1
    return selected if len(selected) == s else None


def _tilde(sol: BarrierSolution) -> BarrierSolution:
    """Antilinear partner: J applied to the conjugated coefficients."""
    s = sol.size
    half = s // 2
    coeffs = np.conj(sol.coeffs)
    out = np.empty_like(coeffs)
    out[:, :half] = coeffs[:, half:]
    out[:, half:] = -coeffs[:, :half]
    return BarrierSolution(out, sol.ord)


def _rank_min_singular(columns: np.ndarray) -> float:
    sing = np.linalg.svd(columns, compute_uv=False)
    return float(sing[-1]) if sing.size else 0.0


def symmetrize_solution_set(S: SolutionSet, f: SliceFrame = DEFAULT_FRAME) -> SolutionSet:
    """Replace half the solutions with conjugated partners, preserving ords.

    Walks the ords from the smallest up: the partner of the first unpaired
    solution is swapped in for whichever same-ord member keeps the values at
    0 best conditioned.  The output lists the n partners first, then their n
    originals, pairs sorted by descending ord.
    """
    s = S.size
    if s % 2:
        raise DimensionMismatch("symmetrization needs even size")
    lo, hi = S.symbol.support_min, S.symbol.support_max

    pool = sorted(S.solutions, key=lambda b: b.ord)
    scale = max(np.linalg.norm(S.values_at_zero()), 1.0)
    pairs = []
    while pool:
        w = pool.pop(0)
        tw = _tilde(w)
        top = hi + tw.degree
        realized = _true_ord(S.symbol, tw.coeffs, lo, top)
        if realized != w.ord:
            raise InternalInvariantViolation(
                f"partner ord {realized} differs from {w.ord}"
            )
        candidates = [r for r in pool if r.ord == w.ord]
        if not candidates:
            raise InternalInvariantViolation(
                "ord multiset is not even; cannot pair solutions"
            )
        best, best_sig = None, -1.0
        flat_pairs = [b for pair in pairs for b in pair]
        for r in candidates:
            rest = [b for b in pool if b is not r]
            cols = np.column_stack(
                [b.value_at_zero() for b in flat_pairs + [tw, w] + rest]
            )
            sig = _rank_min_singular(cols)
            if sig > best_sig:
                best, best_sig = r, sig
        if best_sig <= RANK_TOL * scale:
            raise InternalInvariantViolation(
                "no same-ord replacement keeps the values independent",
                certificate={"min_singular_value": best_sig},
            )
        pool = [b for b in pool if b is not best]
        pairs.append((tw, w))

    pairs.sort(key=lambda pr: -pr[0].ord)
    solutions = [pr[0] for pr in pairs] + [pr[1] for pr in pairs]
    index_set = [b.ord for b in solutions]
    return SolutionSet(S.symbol, solutions, index_set, "paired")


# ---------------------------------------------------------------------------
# discrete factorization

def _pair_to_column(tw: BarrierSolution, w: BarrierSolution, frame: SliceFrame):
    """Pull one (partner, original) pair back to a quaternionic column.

    Returns (coeff dict power -> (n, 4), max symmetry defect).
    """
    deg = max(tw.degree, w.degree)
    a, b = tw.padded(deg), w.padded(deg)
    col = {}
    worst = 0.0
    for k in range(deg + 1):
        block = np.column_stack([a[k], b[k]])
        comps, defect = adjoint_pullback(block, frame)
        worst = max(worst, defect)
        if np.any(np.abs(comps) > 0):
            col[k] = comps[:, 0, :]
    return col, worst


def _quaternion_qr(m: np.ndarray):
    """Gram-Schmidt with right-quaternion coefficients; R has positive diagonal."""
    size = m.shape[0]
    q = np.array(m, dtype=float)
    for k in range(size):
        for j in range(k):
            inner = np.sum(hprod(hconj(q[:, j]), q[:, k]), axis=0)
            q[:, k] = q[:, k] - hprod(q[:, j], inner[None, :])
        nrm = np.sqrt(np.sum(q[:, k] ** 2))
        if nrm < 1e-12:
            raise np.linalg.LinAlgError("rank deficient block")
        q[:, k] = q[:, k] / nrm
    return q


def _group_qr_normalizer(m0: QMatrix, indices) -> QMatrix | None:
    """Blockwise unitary E with E m0 upper-triangular, positive real diagonal.

    Blocks follow runs of equal indices; only block-diagonal constants commute
    with D, so the QR form is canonical per index group.  Singular diagonal
    blocks are left untouched.
    """
    n = m0.rows
    e = np.zeros((n, n, 4))
    pos = 0
    changed = False
    while pos < n:
        end = pos
        while end < n and indices[end] == indices[pos]:
            end += 1
        block = m0.data[pos:end, pos:end]
        try:
            q = _quaternion_qr(block)
            e[pos:end, pos:end] = hconj(np.swapaxes(q, 0, 1))
            changed = True
        except np.linalg.LinAlgError:
            for i in range(pos, end):
                e[i, i, 0] = 1.0
        pos = end
    return QMatrix(e) if changed else None


def _chop(series: LaurentQSeries, lo, hi, tol, what: str) -> LaurentQSeries:
    """Truncate to [lo, hi], insisting the discarded mass is roundoff."""
    lo = series.support_min if lo is None else lo
    hi = series.support_max if hi is None else hi
    kept = series.truncated(lo, hi)
    dropped = (series - kept).norm()
    if dropped > tol * max(1.0, series.norm()):
        raise InternalInvariantViolation(
            f"{what}: out-of-range mass {dropped:.2e} exceeds tolerance"
        )
    return kept


def _sup_norm_on_circle(f: LaurentQSeries, frame: SliceFrame, grid: int) -> float:
    vals = embed_symbol(f, frame).circle_values(grid)
    return float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2))))


def factor_discrete(
    f: LaurentQSeries, frame: SliceFrame = DEFAULT_FRAME, tol: float = 1e-8
) -> FactorizationResult:
    """Wiener-Hopf factorization of a Laurent-polynomial quaternionic symbol."""
    cert = is_invertible(f, frame)
    if not cert:
        raise NotInvertible("symbol is singular on the circle", certificate=cert.as_json())
    n = f.n
    fc = embed_symbol(f, frame)
    paired = symmetrize_solution_set(standard_solution_set(fc, "interleaved"), frame)

    indices = []
    plus_cols = {}
    worst_defect = 0.0
    for m in range(n):
        tw, w = paired.solutions[m], paired.solutions[n + m]
        col, defect = _pair_to_column(tw, w, frame)
        worst_defect = max(worst_defect, defect)
        indices.append(w.ord)
        for k, vec in col.items():
            block = plus_cols.setdefault(k, np.zeros((n, n, 4)))
            block[:, m, :] = vec
    if worst_defect > RANK_TOL:
        raise InternalInvariantViolation(
            f"paired columns fail the symmetry predicate: defect {worst_defect:.2e}"
        )

    p_plus = LaurentQSeries(n, plus_cols)
    f_plus_full = star_inverse(p_plus, frame, tol=min(tol, 1e-9))
    f_plus = _chop(f_plus_full, 0, None, 1e-7, "plus factor")

    g = star_mul(f, p_plus)
    minus_cols = {}
    for m, k_m in enumerate(indices):
        for u in g.support:
            c = g.coeffs[u][:, m, :]
            if u > k_m:
                if np.max(np.abs(c)) > RANK_TOL * max(g.max_abs(), 1.0):
                    raise InternalInvariantViolation(
                        f"column {m} exceeds its ord {k_m} at power {u}"
                    )
                continue
            block = minus_cols.setdefault(u - k_m, np.zeros((n, n, 4)))
            block[:, m, :] = c
    f_minus = LaurentQSeries(n, minus_cols)
    f_plus_inv = p_plus

    normalizer = _group_qr_normalizer(f_plus.coeff(0), indices)
    if normalizer is not None:
        inv = normalizer.conj_transpose()
        f_plus = f_plus.left_mul_matrix(normalizer)
        f_plus_inv = f_plus_inv.right_mul_matrix(inv)
        f_minus = f_minus.right_mul_matrix(inv)

    f_minus_inv = _chop(
        star_inverse(f_minus, frame, tol=min(tol, 1e-9)), None, 0, 1e-7, "minus inverse"
    )

    d = _diagonal_powers(n, indices)
    recon = star_mul(star_mul(f_minus, d), f_plus)
    grid = 512
    while grid < 8 * (f.width + 1):
        grid *= 2
    residual = _sup_norm_on_circle(recon - f, frame, grid)
    if residual > tol:
        raise ResidualTooLarge(
            f"reconstruction residual {residual:.2e} exceeds {tol:.2e}",
            certificate={"residual": residual},
        )

    certificates = {
        "symbol": cert.as_json(),
        "winding": winding_index(f, frame),
        "index_sum": int(sum(indices)),
        "pairing_defect": worst_defect,
        "factor_windings": {
            "f_minus": winding_index(f_minus, frame),
            "f_plus": winding_index(f_plus, frame),
        },
    }
    return FactorizationResult(
        f_minus, indices, f_plus, residual, f_minus_inv, f_plus_inv, "discrete", certificates
    )


# ---------------------------------------------------------------------------
# continuous (rational) symbols via the disc substitution

def _binomial_shift_basis(mu: int) -> np.ndarray:
    """basis[k] = coefficients of (z+1)^k (z-1)^(mu-k), ascending in z."""
    out = np.zeros((mu + 1, mu + 1))
    for k in range(mu + 1):
        poly = np.array([1.0])
        for _ in range(k):
            poly = np.convolve(poly, [1.0, 1.0])
        for _ in range(mu - k):
            poly = np.convolve(poly, [-1.0, 1.0])
        out[k, : poly.size] = poly
    return out


def _clear_to_disc(f) -> tuple[LaurentQSeries, np.ndarray]:
    """Substitute p = (z+1)/(z-1) and clear (z-1)^mu.

    Returns the polynomial numerator as a series and the real denominator
    coefficients in z (ascending).
    """
    den = np.asarray(f.denominator, dtype=float)
    den = np.trim_zeros(den, "b")
    if den.size == 0:
        raise ZeroDivisionError("denominator is identically zero")
    mu = den.size - 1
    num_deg = max(f.numerator.keys(), default=0) if f.numerator else 0
    if num_deg > mu:
        raise PoleOnBoundary(
            f"numerator degree {num_deg} exceeds denominator degree {mu}: pole at infinity"
        )
    roots = np.roots(den[::-1]) if mu else np.zeros(0)
    if np.any(np.abs(roots.real) <= 1e-9 * (1.0 + np.abs(roots))):
        raise PoleOnBoundary("denominator vanishes on the imaginary line")

    basis = _binomial_shift_basis(mu)
    n = f.n
    num_z = np.zeros((mu + 1, n, n, 4))
    for k, coeff in f.numerator.items():
        num_z += basis[k][:, None, None, None] * coeff.data[None]
    den_z = np.zeros(mu + 1)
    for j, dj in enumerate(den):
        den_z += dj * basis[j]
    series = LaurentQSeries(n, {k: num_z[k] for k in range(mu + 1) if np.any(num_z[k])})
    return series, np.trim_zeros(den_z, "b")


def _real_scalar_series(coeffs: dict) -> LaurentQSeries:
    return LaurentQSeries(
        1, {k: np.array([[[float(c), 0.0, 0.0, 0.0]]]) for k, c in coeffs.items() if c}
    )


def _scalar_times(series: LaurentQSeries, scalar: LaurentQSeries) -> LaurentQSeries:
    """Multiply by a real scalar series (commutes with everything)."""
    out: dict = {}
    for u in series.support:
        for v in scalar.support:
            c = float(scalar.coeffs[v][0, 0, 0])
            block = out.setdefault(u + v, np.zeros((series.n, series.n, 4)))
            block += c * series.coeffs[u]
    return LaurentQSeries(series.n, out)


def _realify(values: np.ndarray, what: str) -> np.ndarray:
    if np.max(np.abs(values.imag)) > 1e-10 * max(1.0, np.max(np.abs(values))):
        raise InternalInvariantViolation(f"{what} is not real")
    return values.real


def factor_continuous(f, frame: SliceFrame = DEFAULT_FRAME, tol: float = 1e-7) -> FactorizationResult:
    """Factor a rational symbol on the imaginary line into half-plane factors.

    The result's series live in the atom variable z = (p+1)/(p-1), and
    D(p) = diag[((p+1)/(p-1))^{k_i}].
    """
    num_series, den_z = _clear_to_disc(f)
    n = f.n

    disc = factor_discrete(num_series, frame, tol=tol)

    deg_dz = den_z.size - 1
    lead = float(den_z[-1])
    roots = np.roots(den_z[::-1]) if deg_dz else np.zeros(0)
    mods = np.abs(roots)
    if np.any(np.abs(mods - 1.0) <= 1e-9):
        raise PoleOnBoundary("cleared denominator has a root on the unit circle")
    inside = roots[mods < 1.0]
    outside = roots[mods > 1.0]
    nu = inside.size

    # 1/d(z) = (1/gamma) z^{-nu} r_-(z)^{-1} r_+(z)^{-1} with real r_-, r_+
    r_minus_poly = _realify(np.poly(inside), "inside root product") if nu else np.array([1.0])
    r_minus = _real_scalar_series({-j: r_minus_poly[j] for j in range(r_minus_poly.size)})
    c_b = float(_realify(np.prod(-outside) if outside.size else np.array(1.0), "outside constant"))
    out_poly = _realify(np.poly(outside), "outside root product") if outside.size else np.array([1.0])
    r_plus = _real_scalar_series(
        {out_poly.size - 1 - j: out_poly[j] / c_b for j in range(out_poly.size)}
    )
    gamma = lead * c_b

    rm_inv = _chop(star_inverse(r_minus, frame, tol=1e-12), None, 0, 1e-9, "inside expansion")
    rp_inv = _chop(star_inverse(r_plus, frame, tol=1e-12), 0, None, 1e-9, "outside expansion")

    f_minus = _scalar_times(disc.f_minus, rm_inv)
    f_plus = _scalar_times(disc.f_plus, rp_inv) * (1.0 / gamma)
    f_minus_inv = _scalar_times(disc.f_minus_inv, r_minus)
    f_plus_inv = _scalar_times(disc.f_plus_inv, r_plus) * gamma
    indices = [k - nu for k in disc.indices]

    grid = 512
    while grid < 8 * (num_series.width + rm_inv.width + rp_inv.width + 2):
        grid *= 2
    d = _diagonal_powers(n, indices)
    recon = embed_symbol(star_mul(star_mul(f_minus, d), f_plus), frame).circle_values(grid)
    z = np.exp(2j * np.pi * np.arange(grid) / grid)
    dvals = np.polyval(den_z[::-1], z)
    target = embed_symbol(num_series, frame).circle_values(grid) / dvals[:, None, None]
    residual = float(np.max(np.linalg.norm(recon - target, ord=2, axis=(1, 2))))
    if residual > tol:
        raise ResidualTooLarge(
            f"line reconstruction residual {residual:.2e} exceeds {tol:.2e}",
            certificate={"residual": residual},
        )

    certificates = dict(disc.certificates)
    certificates.update(
        {
            "inside_root_count": int(nu),
            "denominator_roots": [[float(r.real), float(r.imag)] for r in roots],
            "index_sum": int(sum(indices)),
        }
    )
    return FactorizationResult(
        f_minus, indices, f_plus, residual, f_minus_inv, f_plus_inv, "continuous", certificates
    )


# ---------------------------------------------------------------------------
# verification report

def verify_factorization(
    f: LaurentQSeries,
    result: FactorizationResult,
    grid: int = 512,
    other: FactorizationResult | None = None,
    frame: SliceFrame = DEFAULT_FRAME,
) -> dict:
    """Recheck the factorization contracts; violations are listed, not raised."""
    violations = []
    report: dict = {"domain": result.domain, "indices": list(result.indices)}

    if result.f_minus.support and max(result.f_minus.support) > 0:
        violations.append("f_minus has positive-power coefficients")
    if result.f_plus.support and min(result.f_plus.support) < 0:
        violations.append("f_plus has negative-power coefficients")
    if list(result.indices) != sorted(result.indices, reverse=True):
        violations.append("indices are not sorted descending")

    for name, factor in (("f_minus", result.f_minus), ("f_plus", result.f_plus)):
        try:
            w = winding_index(factor, frame)
            report[f"{name}_winding"] = w
            if w != 0:
                violations.append(f"{name} is not invertible in its subalgebra")
        except NotInvertible:
            violations.append(f"{name} is singular on the circle")

    if result.domain == "discrete":
        d = result.diagonal()
        recon = star_mul(star_mul(result.f_minus, d), result.f_plus)
        residual = _sup_norm_on_circle(recon - f, frame, grid)
        report["residual"] = residual
        if residual > max(10 * result.residual, 1e-8):
            violations.append(f"reconstruction residual {residual:.2e}")
        wind = winding_index(f, frame)
        report["winding"] = wind
        if sum(result.indices) != wind:
            violations.append("index sum does not match the winding number")
    else:
        report["residual"] = result.residual

    if other is not None and result.n == 1:
        ratio = star_mul(other.f_minus_inv, result.f_minus)
        c0 = ratio.coeff(0)
        mass = sum(
            float(np.max(np.abs(ratio.coeffs[u]))) for u in ratio.support if u != 0
        )
        scale = c0.max_abs()
        report["minus_ratio_constant"] = c0.as_json()
        report["minus_ratio_offconstant_mass"] = mass
        if scale < 1e-12 or mass > 1e-8 * max(1.0, scale):
            violations.append("scalar minus factors are not constant multiples")

    report["violations"] = violations
    report["passed"] = not violations
    return report
