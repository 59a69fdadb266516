"""Shared random generators and independent oracles for the test suite."""

import numpy as np

from qwiener import LaurentQSeries, QMatrix, Quaternion, SliceFrame
from qwiener.series import star_mul


def planted_symbol(n, indices, rng, strength=0.25, depth=2):
    """F = F_- * D * F_+ with Neumann-dominated one-sided factors.

    The off-identity mass of each factor is scaled to `strength` in the
    Wiener norm.  That keeps the tails of the factor inverses decaying at
    rate ~ sqrt(strength), so polynomial truncations of the barrier
    solutions drop below the rank tolerance within the default degree
    budget.  Plants with mass near 1 need degrees beyond the cap and fail
    with the documented degree error instead.
    """
    from qwiener.factorize import _diagonal_powers

    def one_sided(sign):
        raw = LaurentQSeries(
            n,
            {sign * u: rng.standard_normal((n, n, 4)) for u in range(1, depth + 1)},
        )
        raw = raw * (strength / raw.norm())
        return LaurentQSeries.identity(n) + raw

    d = _diagonal_powers(n, indices)
    return star_mul(star_mul(one_sided(-1), d), one_sided(+1))


def rand_quat(rng: np.random.Generator, scale: float = 1.0) -> Quaternion:
    return Quaternion.from_array(rng.uniform(-scale, scale, 4))


def rand_qmatrix(rng: np.random.Generator, rows: int, cols: int | None = None,
                 scale: float = 1.0) -> QMatrix:
    if cols is None:
        cols = rows
    return QMatrix(rng.uniform(-scale, scale, (rows, cols, 4)))


def rand_unit_imaginary(rng: np.random.Generator) -> Quaternion:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return Quaternion(0.0, *map(float, v))


def rand_frame(rng: np.random.Generator) -> SliceFrame:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    w = rng.normal(size=3)
    w -= (w @ v) * v
    w /= np.linalg.norm(w)
    mk = lambda a: Quaternion(0.0, *map(float, a))
    return SliceFrame(mk(v), mk(w))


def left_rep_block(q: Quaternion) -> np.ndarray:
    """Real 4x4 matrix of left multiplication by q on (w, x, y, z)."""
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )


def real_left_rep(p: QMatrix) -> np.ndarray:
    """Real 4r x 4c matrix of v -> Pv on stacked real components."""
    blocks = [[left_rep_block(p.entry(i, j)) for j in range(p.cols)]
              for i in range(p.rows)]
    return np.block(blocks)


def mc_operator_norm(p: QMatrix, rng: np.random.Generator,
                     samples: int = 10_000, polish: int = 400) -> float:
    """Monte-Carlo maximization of |Pv| over unit v, with ascent polish.

    Independent route: works entirely in the real representation, never
    touching the complex adjoint.  Random restarts seed a power-iteration
    ascent on the Gram matrix, so the best sample climbs to the true maximum.
    """
    m = real_left_rep(p)
    vs = rng.normal(size=(4 * p.cols, samples))
    vs /= np.linalg.norm(vs, axis=0)
    lengths = np.linalg.norm(m @ vs, axis=0)
    best = vs[:, int(np.argmax(lengths))]
    gram = m.T @ m
    for _ in range(polish):
        best = gram @ best
        best /= np.linalg.norm(best)
    return float(np.linalg.norm(m @ best))
