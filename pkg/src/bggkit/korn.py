"""Planar conformal rigidity experiment.

On vector fields of bounded degree over the unit square, the first derived
operator of the planar three-row diagram stacks a first-order component
(the Cauchy-Riemann type trace-free symmetric gradient) with a third-order
component.  The joint kernel stays six-dimensional for every degree >= 3,
while the first-order kernel alone grows linearly: exact dimensions are
computed rationally, and the smallest stacked singular value on the
orthogonal complement of the kernel is the experiment's only
floating-point quantity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from . import catalog
from .bgg import DerivedOps, derive
from .cube import mono_cube_gram
from .diagram import build
from .forms import SumSpace
from .linalg import SparseMat, block_matrix, nullspace, rank


@dataclass
class KornRow:
    degree: int
    kernel_dim: int
    first_order_kernel_dim: int
    sigma_min: float

    def line(self) -> str:
        return (f"r={self.degree}: joint kernel {self.kernel_dim}, "
                f"first-order-only kernel {self.first_order_kernel_dim}, "
                f"sigma_min {self.sigma_min:.6e}")


def _stacked_ups_space(ops: DerivedOps, i: int, weights) -> SumSpace:
    return SumSpace(tuple((w, ops.bc.ups_space(i, w)) for w in weights))


def _stacked_D(ops: DerivedOps, i: int, weights):
    dom = _stacked_ups_space(ops, i, weights)
    cod = _stacked_ups_space(ops, i + 1, weights)
    blocks = {w: ops.bc.D(i, w).mat for w in weights}
    grid = [[blocks[w] if wi == wo else None for wi, w in enumerate(dom.keys())]
            for wo, _ in enumerate(dom.keys())]
    return dom, cod, block_matrix(grid, cod.dims(), dom.dims())


def _stacked_ups_gram(ops: DerivedOps, space: SumSpace, i: int) -> SparseMat:
    """Unit-square L2 Gram on stacked harmonic coordinates."""
    bd = ops.bd
    ent = {}
    for w, ups_w in space.parts:
        for wp, ups_wp in space.parts:
            for j in range(bd.N + 1):
                basis = ops.hs.ups.get((i, j))
                if basis is None or basis.cols == 0:
                    continue
                p, pp = w - i - j, wp - i - j
                if p < 0 or pp < 0:
                    continue
                pairing = mono_cube_gram(bd.n, p, pp).kron(
                    basis.transpose() @ basis)
                r0 = space.offset(w) + ups_w.offset(j)
                c0 = space.offset(wp) + ups_wp.offset(j)
                for (r, c), v in pairing.data.items():
                    ent[(r0 + r, c0 + c)] = v
    return SparseMat(space.dim, space.dim, ent)


def _component_rows(space: SumSpace, row_j: int) -> list[int]:
    rows = []
    for w, sub in space.parts:
        off = space.offset(w) + sub.offset(row_j)
        rows.extend(range(off, off + sub.space(row_j).dim))
    return rows


def _restrict_rows(mat: SparseMat, rows: list[int]) -> SparseMat:
    index = {r: k for k, r in enumerate(rows)}
    ent = {(index[r], c): v for (r, c), v in mat.data.items() if r in index}
    return SparseMat(len(rows), mat.cols, ent)


def korn2d_experiment(r_max: int = 8) -> list[KornRow]:
    """Exact kernels and the floating-point smallest stacked singular value.

    For each degree r = 3..r_max: the joint kernel dimension of both
    components, the kernel dimension of the first-order component alone
    (2(r+1), the planar failure witness), and the smallest generalized
    singular value on the L2-orthogonal complement of the joint kernel.
    """
    if r_max < 3:
        raise ValueError("r_max must be >= 3")
    bd = build(catalog.get("mobius-2d").spec, r_max)
    ops = derive(bd)
    out = []
    for r in range(3, r_max + 1):
        weights = range(r + 1)
        dom, cod, dmat = _stacked_D(ops, 0, weights)
        ker = nullspace(dmat)
        kernel_dim = len(ker)
        first_rows = _component_rows(cod, 0)
        first = _restrict_rows(dmat, first_rows)
        first_kernel = dmat.cols - rank(first)
        g_in = _stacked_ups_gram(ops, dom, 0)
        g_out = _stacked_ups_gram(ops, cod, 1)
        a = dmat.transpose() @ g_out @ dmat
        kmat = SparseMat.from_columns(ker, dmat.cols)
        comp = SparseMat.from_columns(
            nullspace(kmat.transpose() @ g_in), dmat.cols)
        a_r = comp.transpose() @ a @ comp
        m_r = comp.transpose() @ g_in @ comp
        a_np = np.array([[float(x) for x in row] for row in a_r.to_dense()])
        m_np = np.array([[float(x) for x in row] for row in m_r.to_dense()])
        eigvals = eigh(a_np, m_np, eigvals_only=True)
        sigma_min = float(np.sqrt(max(eigvals.min(), 0.0)))
        out.append(KornRow(r, kernel_dim, first_kernel, sigma_min))
    return out
