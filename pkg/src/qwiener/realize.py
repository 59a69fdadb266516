"""Rational quaternionic matrix functions, state-space realizations, and
canonical factorization through Riesz projections of the pencil.

A rational function is kept in the normal form num(p) / r(p) with a real
denominator r, so Euclid division and root bookkeeping stay commutative.
Realizations take the pencil form F(p) = D + C * (pG - A)^{-*} B with
quaternionic constant matrices.  All spectral computation happens in the
complex adjoint embedding of a slice frame and is pulled back through the
image symmetry; the quaternionic outputs are frame independent.
"""

import dataclasses
import math

import numpy as np

from .errors import (
    DimensionMismatch,
    ImproperInput,
    InternalInvariantViolation,
    ObstructionConditionI,
    ObstructionConditionII,
    PoleOnCircle,
    SingularPencil,
    SingularPoint,
    SymmetryResidualTooLarge,
)
from .factorize import FactorizationResult
from .quaternions import (
    DEFAULT_FRAME,
    QMatrix,
    Quaternion,
    SliceFrame,
    adjoint_array,
    adjoint_pullback,
)
from .series import LaurentQSeries, circle_exponents, coefficients_from_circle

RANK_REL = 1e-9
DEFAULT_QUAD_POINTS = 256
QUAD_CAP = 1 << 16
CIRCLE_GRID = 512


def _trim_real(coeffs) -> np.ndarray:
    arr = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if arr.size == 0:
        raise ZeroDivisionError("denominator is identically zero")
    return arr


def _stack_numerator(n: int, numerator: dict) -> np.ndarray:
    """Dense (deg+1, n, n, 4) array of the coefficient map."""
    if not numerator:
        return np.zeros((0, n, n, 4))
    top = max(numerator)
    out = np.zeros((top + 1, n, n, 4))
    for k, coeff in numerator.items():
        out[k] = coeff.data
    return out


def _polydiv_real(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Long division of a stacked quaternionic polynomial by a real one.

    Returns (quotient, remainder) stacks; exact because the divisor is real
    and scalar, so it commutes with the coefficients.
    """
    d = den.size - 1
    work = num.copy()
    top = work.shape[0] - 1
    if top < d:
        return np.zeros((0,) + num.shape[1:]), work
    quot = np.zeros((top - d + 1,) + num.shape[1:])
    for k in range(top, d - 1, -1):
        c = work[k] / den[d]
        quot[k - d] = c
        for j in range(d + 1):
            work[k - d + j] -= den[j] * c
    return quot, work[:d] if d > 0 else np.zeros((0,) + num.shape[1:])


def _unstack(stack: np.ndarray, floor: float = 0.0) -> dict:
    out = {}
    for k in range(stack.shape[0]):
        if np.max(np.abs(stack[k])) > floor:
            out[k] = QMatrix(stack[k].copy())
    return out


@dataclasses.dataclass(eq=False)
class RationalQMatrix:
    """num(p) / r(p) with quaternionic numerator and real denominator.

    numerator maps degree -> QMatrix; denominator lists real coefficients
    ascending.  Real denominators commute with everything, which is what
    makes entrywise Euclid division and the Cayley transport exact.
    """

    n: int
    numerator: dict
    denominator: list

    def __post_init__(self):
        self.numerator = {int(k): v for k, v in self.numerator.items()}
        for k, coeff in self.numerator.items():
            if k < 0:
                raise DimensionMismatch("numerator degrees must be nonnegative")
            if coeff.rows != self.n or coeff.cols != self.n:
                raise DimensionMismatch(
                    f"coefficient of degree {k} is {coeff.rows}x{coeff.cols}, "
                    f"expected {self.n}x{self.n}"
                )
        self.denominator = [float(v) for v in self.denominator]
        _trim_real(self.denominator)

    @classmethod
    def constant(cls, m: QMatrix) -> "RationalQMatrix":
        return cls(m.rows, {0: m}, [1.0])

    @classmethod
    def identity(cls, n: int) -> "RationalQMatrix":
        return cls.constant(QMatrix.identity(n))

    @property
    def num_degree(self) -> int:
        return max(self.numerator) if self.numerator else -1

    @property
    def den_degree(self) -> int:
        return _trim_real(self.denominator).size - 1

    def evaluate(self, p: Quaternion) -> QMatrix:
        """Direct rational evaluation r(p)^{-1} * sum p^k N_k."""
        den = _trim_real(self.denominator)
        r_val = Quaternion()
        power = Quaternion(1.0)
        for k in range(den.size):
            r_val = r_val + power * float(den[k])
            power = power * p
        scale = float(np.max(np.abs(den)))
        if abs(r_val) <= 1e-14 * max(1.0, scale):
            raise SingularPoint(
                f"denominator vanishes at the evaluation point (|r(p)|={abs(r_val):.2e})"
            )
        acc = QMatrix.zeros(self.n, self.n)
        power = Quaternion(1.0)
        for k in range(self.num_degree + 1):
            if k in self.numerator:
                acc = acc + self.numerator[k].left_mul(power)
            power = power * p
        return acc.left_mul(r_val.inverse())

    def as_json(self) -> dict:
        return {
            "n": self.n,
            "num": [
                {"deg": k, "coeff": self.numerator[k].as_json()}
                for k in sorted(self.numerator)
            ],
            "den": list(self.denominator),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RationalQMatrix":
        num = {int(t["deg"]): QMatrix.from_json(t["coeff"]) for t in obj["num"]}
        return cls(int(obj["n"]), num, [float(v) for v in obj["den"]])


def pole_free_on_sphere(f: RationalQMatrix, tol: float = 1e-9) -> bool:
    """True when every unit-modulus denominator root cancels or is absent.

    Shared real linear/quadratic factors are divided out of the numerator
    first (divisibility decided by remainder norm), so removable spherical
    poles do not count.
    """
    den = _trim_real(f.denominator)
    if den.size == 1:
        return True
    num = _stack_numerator(f.n, f.numerator)
    if num.size == 0 or np.max(np.abs(num)) == 0.0:
        return True
    num_scale = max(1.0, float(np.max(np.abs(num))))

    roots = np.roots(den[::-1])
    used = np.zeros(roots.size, dtype=bool)
    leftover_unit = False
    for idx in range(roots.size):
        if used[idx]:
            continue
        used[idx] = True
        if num.size == 0 or np.max(np.abs(num)) <= tol * num_scale:
            return True
        r = roots[idx]
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r)):
            factor = np.array([-r.real, 1.0])
        else:
            partners = [
                j
                for j in range(roots.size)
                if not used[j] and abs(roots[j] - np.conj(r)) <= 1e-6 * (1.0 + abs(r))
            ]
            if partners:
                used[partners[0]] = True
            factor = np.array([abs(r) ** 2, -2.0 * r.real, 1.0])
        if num.shape[0] >= factor.size:
            quot, rem = _polydiv_real(num, factor)
            if rem.size == 0 or np.max(np.abs(rem)) <= tol * num_scale:
                num = quot
                num_scale = max(1.0, float(np.max(np.abs(num))) if num.size else 1.0)
                continue
        if abs(abs(r) - 1.0) <= 1e-9:
            leftover_unit = True
    return not leftover_unit


def split_proper_polynomial(f: RationalQMatrix) -> tuple[RationalQMatrix, dict]:
    """F = K + L with K strictly proper and L a polynomial coefficient map."""
    den = _trim_real(f.denominator)
    num = _stack_numerator(f.n, f.numerator)
    if num.size == 0:
        return RationalQMatrix(f.n, {}, den.tolist()), {}
    quot, rem = _polydiv_real(num, den)
    return (
        RationalQMatrix(f.n, _unstack(rem), den.tolist()),
        _unstack(quot),
    )


@dataclasses.dataclass(eq=False)
class Realization:
    """Pencil realization F(p) = D + C * (pG - A)^{-*} B.

    d: n x n constant term; c: n x m; a, g: m x m; b: m x n.  The state
    size m is read off the pencil.
    """

    d: QMatrix
    c: QMatrix
    a: QMatrix
    g: QMatrix
    b: QMatrix
    m: int = dataclasses.field(init=False)

    def __post_init__(self):
        n = self.d.rows
        m = self.a.rows
        checks = [
            (self.d.cols, n, "D"),
            (self.c.rows, n, "C rows"),
            (self.c.cols, m, "C cols"),
            (self.a.cols, m, "A"),
            (self.g.rows, m, "G rows"),
            (self.g.cols, m, "G cols"),
            (self.b.rows, m, "B rows"),
            (self.b.cols, n, "B cols"),
        ]
        for got, want, what in checks:
            if got != want:
                raise DimensionMismatch(f"{what}: got {got}, expected {want}")
        self.m = m

    @property
    def n(self) -> int:
        return self.d.rows

    def a_cross(self) -> QMatrix:
        """State matrix of the inverse symbol: A - BC."""
        return self.a - self.b @ self.c

    def as_json(self) -> dict:
        return {
            "D": self.d.as_json(),
            "C": self.c.as_json(),
            "A": self.a.as_json(),
            "G": self.g.as_json(),
            "B": self.b.as_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Realization":
        return cls(*(QMatrix.from_json(obj[k]) for k in ("D", "C", "A", "G", "B")))


def _empty_state(n: int) -> tuple[QMatrix, QMatrix, QMatrix, QMatrix]:
    c = QMatrix(np.zeros((n, 0, 4)))
    a = QMatrix(np.zeros((0, 0, 4)))
    b = QMatrix(np.zeros((0, n, 4)))
    return c, a, a, b


def realize_polynomial(coeffs: dict, n: int) -> Realization:
    """Shift-block realization of a polynomial coefficient map.

    The pencil part satisfies C * (pG - A)^{-*} B = sum p^k L_k with a
    nilpotent G of order q+1, so the fragment is exact at every p.
    """
    if not coeffs:
        c, a, g, b = _empty_state(n)
        return Realization(QMatrix.zeros(n, n), c, a, g, b)
    q = max(coeffs)
    size = n * (q + 1)
    g = np.zeros((size, size, 4))
    for i in range(q):
        for r in range(n):
            g[i * n + r, (i + 1) * n + r, 0] = 1.0
    b = np.zeros((size, n, 4))
    for k, coeff in coeffs.items():
        b[k * n : (k + 1) * n] = coeff.data
    c = np.zeros((n, size, 4))
    for r in range(n):
        c[r, r, 0] = -1.0
    return Realization(
        QMatrix.zeros(n, n),
        QMatrix(c),
        QMatrix.identity(size),
        QMatrix(g),
        QMatrix(b),
    )


def realize_proper(k: RationalQMatrix, d_target: QMatrix) -> Realization:
    """Companion realization of a strictly proper rational part plus D.

    The companion blocks are real (they only see the real denominator), so
    the classical transfer-function identity survives the * product; the
    quaternionic numerator coefficients enter through C.
    """
    n = k.n
    den = _trim_real(k.denominator)
    den = den / den[-1]
    d = den.size - 1
    if k.num_degree >= d:
        raise ImproperInput(
            f"numerator degree {k.num_degree} not below denominator degree {d}"
        )
    num = _stack_numerator(n, k.numerator) / float(_trim_real(k.denominator)[-1])
    if num.size == 0 or np.max(np.abs(num)) == 0.0:
        c, a, g, b = _empty_state(n)
        return Realization(d_target, c, a, g, b)

    m = n * d
    a = np.zeros((m, m, 4))
    for i in range(d - 1):
        for r in range(n):
            a[i * n + r, (i + 1) * n + r, 0] = 1.0
    for j in range(d):
        for r in range(n):
            a[(d - 1) * n + r, j * n + r, 0] = -den[j]
    b = np.zeros((m, n, 4))
    for r in range(n):
        b[(d - 1) * n + r, r, 0] = 1.0
    c = np.zeros((n, m, 4))
    for j in range(min(num.shape[0], d)):
        c[:, j * n : (j + 1) * n] = num[j]
    return Realization(d_target, QMatrix(c), QMatrix(a), QMatrix.identity(m), QMatrix(b))


def _block_diag(x: QMatrix, y: QMatrix) -> QMatrix:
    out = np.zeros((x.rows + y.rows, x.cols + y.cols, 4))
    out[: x.rows, : x.cols] = x.data
    out[x.rows :, x.cols :] = y.data
    return QMatrix(out)


def assemble_realization(f: RationalQMatrix, d_target: QMatrix) -> Realization:
    """Merge the proper and polynomial fragments into one realization."""
    k, poly = split_proper_polynomial(f)
    shift = poly.get(0, QMatrix.zeros(f.n, f.n)) - d_target
    if shift.max_abs() > 0.0:
        poly = dict(poly)
        poly[0] = shift
    elif 0 in poly:
        poly = {u: c for u, c in poly.items() if u != 0}
    frag_k = realize_proper(k, d_target)
    frag_l = realize_polynomial(poly, f.n)
    return Realization(
        d_target,
        QMatrix(np.concatenate([frag_k.c.data, frag_l.c.data], axis=1)),
        _block_diag(frag_k.a, frag_l.a),
        _block_diag(frag_k.g, frag_l.g),
        QMatrix(np.concatenate([frag_k.b.data, frag_l.b.data], axis=0)),
    )


def _embedded(r: Realization, frame: SliceFrame):
    return (
        adjoint_array(r.d.data, frame),
        adjoint_array(r.c.data, frame),
        adjoint_array(r.a.data, frame),
        adjoint_array(r.g.data, frame),
        adjoint_array(r.b.data, frame),
    )


def _pencil_values(dc, cc, ac, gc, bc, nodes: np.ndarray) -> np.ndarray:
    """Embedded values D' + C'(zG'-A')^{-1}B' at each node, shape (M, 2n, 2n)."""
    if ac.shape[0] == 0:
        return np.broadcast_to(dc, (nodes.size,) + dc.shape).copy()
    pencils = nodes[:, None, None] * gc - ac
    try:
        x = np.linalg.solve(pencils, np.broadcast_to(bc, (nodes.size,) + bc.shape))
    except np.linalg.LinAlgError as exc:
        raise SingularPencil(f"pencil singular on the evaluation grid: {exc}") from exc
    return dc + cc @ x


def eval_realization(
    r: Realization, p: Quaternion, frame: SliceFrame = DEFAULT_FRAME
) -> QMatrix:
    """Evaluate the realization at a quaternion point.

    The two slice points z, conj(z) are solved in the embedding; their
    symmetric halves assemble the exact adjoint image of the slice value,
    and the representation formula rebuilds the value off the slice.
    """
    if isinstance(p, (int, float)):
        p = Quaternion(float(p))
    n = r.n
    x = p.w
    yvec = np.array([p.x, p.y, p.z])
    y = float(np.linalg.norm(yvec))
    dc, cc, ac, gc, bc = _embedded(r, frame)
    z = complex(x, y)

    def solve_at(zc):
        if r.m == 0:
            return dc.copy()
        pencil = zc * gc - ac
        try:
            return dc + cc @ np.linalg.solve(pencil, bc)
        except np.linalg.LinAlgError as exc:
            raise SingularPencil(
                f"pencil singular at the evaluation point {zc}"
            ) from exc

    m1 = solve_at(z)
    if y == 0.0:
        comps, _ = adjoint_pullback(m1, frame)
        return QMatrix(comps)
    m2 = solve_at(np.conj(z))
    value_plus = np.concatenate([m1[:n], m2[n:]], axis=0)
    value_minus = np.concatenate([m2[:n], m1[n:]], axis=0)
    w_plus = QMatrix(adjoint_pullback(value_plus, frame)[0])
    w_minus = QMatrix(adjoint_pullback(value_minus, frame)[0])
    even = (w_plus + w_minus) * 0.5
    odd = (w_plus - w_minus).left_mul(frame.i * -0.5)
    direction = Quaternion(0.0, *(yvec / y))
    return even + odd.left_mul(direction)


@dataclasses.dataclass(eq=False)
class ProjectionData:
    """Riesz projections of the pencil and the derived oblique splittings.

    q and p are the spectral projections of the pencil (G, A) for the
    inside-the-disc spectrum (resolvent multiplied by G on the right and
    on the left respectively); qx and px are the same objects for the
    inverse symbol's pencil (G, A - BC).  tau projects along Ima(q) onto
    Ker(qx); sigma along Ima(p) onto Ker(px).  Both stay None until the
    direct-sum conditions have been verified.
    """

    q: QMatrix
    p: QMatrix
    qx: QMatrix
    px: QMatrix
    tau: QMatrix | None
    sigma: QMatrix | None
    quadrature_points: int
    symmetry_residual: float


def _quadrature_pair(ac, gc, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid values of z(zG-A)^{-1}G and zG(zG-A)^{-1} on the circle."""
    pencils = nodes[:, None, None] * gc - ac
    size = ac.shape[0]
    g_b = np.broadcast_to(gc, (nodes.size, size, size))
    try:
        right = np.linalg.solve(pencils, g_b)
        left = np.linalg.solve(
            pencils.transpose(0, 2, 1), np.broadcast_to(gc.T, g_b.shape)
        ).transpose(0, 2, 1)
    except np.linalg.LinAlgError as exc:
        raise PoleOnCircle(f"pencil singular at a quadrature node: {exc}") from exc
    w = nodes[:, None, None]
    return (w * right).mean(axis=0), (w * left).mean(axis=0)


def _scan_pencil(ac, gc, nodes: np.ndarray) -> tuple[float, float]:
    """Smallest singular value of zG - A over the nodes, relative to the
    global pencil scale (per-node normalization would hide a uniformly
    vanishing pencil like (z+1)I), with the worst angle."""
    pencils = nodes[:, None, None] * gc - ac
    sv = np.linalg.svd(pencils, compute_uv=False)
    scale = max(float(sv[:, 0].max()), 1e-300)
    k = int(np.argmin(sv[:, -1]))
    return float(sv[k, -1] / scale), float(2.0 * math.pi * k / nodes.size)


def riesz_projections(
    r: Realization,
    frame: SliceFrame = DEFAULT_FRAME,
    m_points: int = DEFAULT_QUAD_POINTS,
    tol: float = 1e-10,
) -> ProjectionData:
    """Circle quadrature of the four pencil projections, pulled back.

    The integrands are analytic on the circle, so the trapezoid rule
    converges geometrically; the point count doubles until two successive
    refinements agree to tol.
    """
    if r.m == 0:
        empty = QMatrix(np.zeros((0, 0, 4)))
        return ProjectionData(empty, empty, empty, empty, None, None, m_points, 0.0)
    _, cc, ac, gc, bc = _embedded(r, frame)
    ax = ac - bc @ cc

    for which, mat in (("evaluation", ac), ("inverse-symbol", ax)):
        rel, theta = _scan_pencil(mat, gc, _circle_nodes(m_points))
        if rel < 1e-12:
            raise PoleOnCircle(
                f"{which} pencil is singular on the circle",
                certificate={"min_singular": rel, "theta": theta},
            )

    previous = None
    diff = None
    m = m_points
    while True:
        nodes = _circle_nodes(m)
        q_c, p_c = _quadrature_pair(ac, gc, nodes)
        qx_c, px_c = _quadrature_pair(ax, gc, nodes)
        current = (q_c, p_c, qx_c, px_c)
        if previous is not None:
            scale = max(1.0, max(float(np.max(np.abs(x))) for x in current))
            diff = max(
                float(np.max(np.abs(a - b))) for a, b in zip(current, previous)
            )
            if diff <= tol * scale:
                break
        if 2 * m > QUAD_CAP:
            raise PoleOnCircle(
                "quadrature did not converge; pencil spectrum hugs the circle",
                certificate={"points": m, "last_delta": diff},
            )
        previous = current
        m *= 2

    pulled = []
    worst = 0.0
    for mat in current:
        comps, defect = adjoint_pullback(mat, frame)
        scale = max(1.0, float(np.max(np.abs(mat))))
        worst = max(worst, defect / scale)
        pulled.append(QMatrix(comps))
    if worst > 1e-8:
        raise SymmetryResidualTooLarge(
            f"projection quadrature broke the image symmetry (defect {worst:.2e})",
            certificate={"defect": worst},
        )
    return ProjectionData(*pulled, None, None, m, worst)


def _circle_nodes(m: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(m) / m)


def _range_basis(mat: np.ndarray) -> np.ndarray:
    if mat.shape[0] == 0:
        return mat.copy()
    u, sv, _ = np.linalg.svd(mat)
    rank = int(np.sum(sv > RANK_REL * max(sv[0] if sv.size else 0.0, 1.0)))
    return u[:, :rank]

def _null_basis(mat: np.ndarray) -> np.ndarray:
    if mat.shape[0] == 0:
        return mat.copy()
    _, sv, vh = np.linalg.svd(mat)
    rank = int(np.sum(sv > RANK_REL * max(sv[0] if sv.size else 0.0, 1.0)))
    return vh[rank:].conj().T


@dataclasses.dataclass(eq=False)
class CanonicalFactorization:
    """Canonical factors as realizations, with projections and certificates.

    All four factors share the original state space; f_minus and f_plus
    multiply back to the symbol, and each factor carries its exact inverse
    realization.  as_series extracts Wiener coefficients on a circle grid.
    """

    f_minus: Realization
    f_plus: Realization
    f_minus_inv: Realization
    f_plus_inv: Realization
    projections: ProjectionData
    residual: float
    certificates: dict

    @property
    def n(self) -> int:
        return self.f_minus.n

    def as_series(
        self,
        grid: int = 256,
        tol: float = 1e-8,
        frame: SliceFrame = DEFAULT_FRAME,
    ) -> FactorizationResult:
        """Extract Laurent coefficients of the factors on a circle grid.

        Wrong-side Fourier mass above tol (relative) means the factor does
        not live in its half algebra, which the construction guarantees;
        such a failure is reported as an internal invariant violation.
        """
        nodes = _circle_nodes(grid)
        exps = circle_exponents(grid)
        series = {}
        masses = {}
        for name, real, keep_nonneg in (
            ("f_minus", self.f_minus, False),
            ("f_plus", self.f_plus, True),
            ("f_minus_inv", self.f_minus_inv, False),
            ("f_plus_inv", self.f_plus_inv, True),
        ):
            vals = _pencil_values(*_embedded(real, frame), nodes)
            coeffs = coefficients_from_circle(vals)
            scale = max(1.0, float(np.max(np.abs(coeffs))))
            keep = (exps >= 0) if keep_nonneg else (exps <= 0)
            wrong = float(np.abs(coeffs[~keep]).max(initial=0.0))
            if wrong > tol * scale:
                raise InternalInvariantViolation(
                    f"{name} has Fourier mass {wrong:.2e} on the wrong side",
                    certificate={"factor": name, "mass": wrong, "grid": grid},
                )
            masses[name] = wrong
            out = {}
            for k in np.nonzero(keep)[0]:
                if np.max(np.abs(coeffs[k])) <= 1e-12 * scale:
                    continue
                comps, _ = adjoint_pullback(coeffs[k], frame)
                out[int(exps[k])] = comps
            series[name] = LaurentQSeries(self.n, out)
        certs = dict(self.certificates)
        certs["series_grid"] = grid
        certs["wrong_side_mass"] = masses
        return FactorizationResult(
            series["f_minus"],
            [0] * self.n,
            series["f_plus"],
            self.residual,
            series["f_minus_inv"],
            series["f_plus_inv"],
            "canonical",
            certs,
        )


def canonical_factorize(
    r: Realization,
    frame: SliceFrame = DEFAULT_FRAME,
    tol: float = 1e-9,
) -> CanonicalFactorization:
    """Canonical factorization of I + C * (pG - A)^{-*} B.

    Condition (i): the inverse-symbol pencil is invertible on the circle.
    Condition (ii): the state space splits along the images and kernels of
    the Riesz projections.  On success the factors and their inverses come
    out as realizations over the same state space.
    """
    n = r.n
    if (r.d - QMatrix.identity(n)).max_abs() > 1e-12:
        raise ImproperInput("canonical factorization requires constant term I")
    if r.m == 0:
        empty = QMatrix(np.zeros((0, 0, 4)))
        ident = Realization(QMatrix.identity(n), *_empty_state(n))
        proj = ProjectionData(empty, empty, empty, empty, empty, empty, 0, 0.0)
        return CanonicalFactorization(ident, ident, ident, ident, proj, 0.0, {})

    dc, cc, ac, gc, bc = _embedded(r, frame)
    ax = ac - bc @ cc
    nodes = _circle_nodes(CIRCLE_GRID)

    rel, theta = _scan_pencil(ac, gc, nodes)
    if rel < tol:
        raise PoleOnCircle(
            "evaluation pencil is singular on the circle",
            certificate={"min_singular": rel, "theta": theta},
        )
    rel_x, theta_x = _scan_pencil(ax, gc, nodes)
    if rel_x < tol:
        raise ObstructionConditionI(
            "inverse-symbol pencil is singular on the circle",
            certificate={"min_singular": rel_x, "theta": theta_x},
        )

    proj = riesz_projections(r, frame)
    two_m = 2 * r.m
    ima_q = _range_basis(adjoint_array(proj.q.data, frame))
    ker_qx = _null_basis(adjoint_array(proj.qx.data, frame))
    ima_p = _range_basis(adjoint_array(proj.p.data, frame))
    ker_px = _null_basis(adjoint_array(proj.px.data, frame))

    def split_defect(ima, ker):
        if ima.shape[1] + ker.shape[1] != two_m:
            return 0.0, None
        stack = np.hstack([ima, ker])
        sv = np.linalg.svd(stack, compute_uv=False)
        return float(sv[-1]), stack

    q_defect, q_stack = split_defect(ima_q, ker_qx)
    p_defect, p_stack = split_defect(ima_p, ker_px)
    cert = {
        "q_dims": [int(ima_q.shape[1]), int(ker_qx.shape[1])],
        "p_dims": [int(ima_p.shape[1]), int(ker_px.shape[1])],
        "q_defect": q_defect,
        "p_defect": p_defect,
        "state_size": r.m,
    }
    if q_stack is None or p_stack is None or q_defect <= tol or p_defect <= tol:
        raise ObstructionConditionII(
            "state space does not split along the projections",
            certificate=cert,
        )

    eye = np.eye(two_m)
    tau_c = ker_qx @ np.linalg.solve(q_stack, eye)[ima_q.shape[1] :]
    sigma_c = ker_px @ np.linalg.solve(p_stack, eye)[ima_p.shape[1] :]
    worst = 0.0
    pulled = []
    for mat in (tau_c, sigma_c):
        comps, defect = adjoint_pullback(mat, frame)
        worst = max(worst, defect / max(1.0, float(np.max(np.abs(mat)))))
        pulled.append(QMatrix(comps))
    if worst > 1e-8:
        raise SymmetryResidualTooLarge(
            f"oblique projections broke the image symmetry (defect {worst:.2e})",
            certificate={"defect": worst},
        )
    proj.tau, proj.sigma = pulled

    ident = QMatrix.identity(n)
    eye_m = QMatrix.identity(r.m)
    a_cross = r.a_cross()
    f_minus = Realization(ident, r.c, r.a, r.g, (eye_m - proj.sigma) @ r.b)
    f_plus = Realization(ident, r.c @ proj.tau, r.a, r.g, r.b)
    f_minus_inv = Realization(
        ident, -(r.c @ (eye_m - proj.tau)), a_cross, r.g, r.b
    )
    f_plus_inv = Realization(ident, -r.c, a_cross, r.g, proj.sigma @ r.b)

    val_f = _pencil_values(dc, cc, ac, gc, bc, nodes)
    val_minus = _pencil_values(*_embedded(f_minus, frame), nodes)
    val_plus = _pencil_values(*_embedded(f_plus, frame), nodes)
    val_minus_inv = _pencil_values(*_embedded(f_minus_inv, frame), nodes)
    val_plus_inv = _pencil_values(*_embedded(f_plus_inv, frame), nodes)

    def supnorm(arr):
        return float(np.max(np.linalg.svd(arr, compute_uv=False)[:, 0]))

    eye_n = np.eye(2 * n)
    residual = max(
        supnorm(val_f - val_minus @ val_plus),
        supnorm(val_minus @ val_minus_inv - eye_n),
        supnorm(val_plus @ val_plus_inv - eye_n),
    )
    cert.update(
        {
            "condition_i_min_singular": rel_x,
            "projection_symmetry": proj.symmetry_residual,
            "oblique_symmetry": worst,
            "grid": CIRCLE_GRID,
            "quadrature_points": proj.quadrature_points,
        }
    )
    return CanonicalFactorization(
        f_minus, f_plus, f_minus_inv, f_plus_inv, proj, residual, cert
    )
