import numpy as np
import scipy.linalg

from sbp_induction.fields import GridSpec
from sbp_induction.sbp_ops import apply_d


def dense_1d(op, operator=apply_d):
    """Dense matrix of a 1D operator, column k holding its action on e_k."""
    return operator(op, np.eye(op.n))


def axis_matrix(grid, axis, operator=apply_d):
    """Dense 3D operator acting along ``axis`` on C-order flattened grid functions."""
    factors = [np.eye(n) for n in grid.shape]
    factors[axis] = dense_1d(grid.ops[axis], operator)
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def random_vector(grid, seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((3,) + grid.shape)


def random_scalar(grid, seed=0):
    return np.random.default_rng(seed).standard_normal(grid.shape)


def _pairs(values):
    return values[:, np.newaxis], values[np.newaxis, :]


def _uiBj_flux(form, ui, bj):
    um, uk = _pairs(ui)
    bm, bk = _pairs(bj)
    if form == "central":
        return 0.5 * (um * bm + uk * bk)
    if form == "split":
        return 0.25 * (um + uk) * (bm + bk)
    return 0.5 * (um * bk + uk * bm)


def _source_flux(form, ui, bj):
    um, uk = _pairs(ui)
    bm, bk = _pairs(bj)
    if form == "zero":
        return np.zeros((ui.size, ui.size))
    if form == "central":
        return -0.5 * um * (bk - bm)
    return -0.25 * (um + uk) * (bk - bm)


def _ujBi_flux(form, uj, bi):
    um, uk = _pairs(uj)
    bm, bk = _pairs(bi)
    if form == "central":
        return -0.5 * (um * bm + uk * bk)
    if form == "split":
        return -0.25 * (um + uk) * (bm + bk)
    return -0.5 * (um * bk + uk * bm)


def flux_volume(grid, forms, u, B):
    """
    Volume terms written as ``Σⱼ Σₖ 2 (Dⱼ)ₘₖ fₘₖ`` with two-point numerical
    fluxes, evaluated with dense matrices.
    """
    d = [axis_matrix(grid, j) for j in range(3)]
    uf = u.reshape(3, -1)
    bf = B.reshape(3, -1)
    out = np.zeros_like(bf)
    for i in range(3):
        for j in range(3):
            flux = (
                _uiBj_flux(forms.uiBj.value, uf[i], bf[j])
                + _source_flux(forms.source.value, uf[i], bf[j])
                + _ujBi_flux(forms.ujBi.value, uf[j], bf[i])
            )
            out[i] += 2.0 * np.sum(d[j] * flux, axis=1)
    return out.reshape(B.shape)


LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


def hall_volume(grid, B, rho=1.0):
    """``Σⱼ Dⱼ(JⱼBᵢ - JᵢBⱼ)`` with ``Jᵢ = εᵢⱼₖ DⱼBₖ / ρ`` from dense matrices."""
    d = [axis_matrix(grid, j) for j in range(3)]
    bf = B.reshape(3, -1)
    current = np.zeros_like(bf)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                if LEVI_CIVITA[i, j, k]:
                    current[i] += LEVI_CIVITA[i, j, k] * (d[j] @ bf[k])
    current /= rho
    out = np.zeros_like(bf)
    for i in range(3):
        for j in range(3):
            out[i] += d[j] @ (current[j] * bf[i] - current[i] * bf[j])
    return out.reshape(B.shape)


def least_norm_correction(grid, B):
    """
    The correction β of smallest M-norm with ``div(B + β) = 0``, from the
    pseudo-inverse of the weighted divergence matrix.
    """
    div = np.hstack([axis_matrix(grid, j) for j in range(3)])
    w = np.tile(grid.mass_weights.ravel(), 3)
    scaled = div / np.sqrt(w)[np.newaxis, :]
    target = -div @ B.ravel()
    beta = scipy.linalg.pinv(scaled) @ target / np.sqrt(w)
    return beta.reshape(B.shape)


def small_grid(order=2, n=(5, 4, 3), periodic=False, hi=1.0):
    return GridSpec.build(order, n, lo=0.0, hi=hi, periodic=periodic)
