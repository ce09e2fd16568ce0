"""Pure-numpy implementation of the interaction-functional kernel.

Inputs, for a chunk of S field samples and n w-nodes:

* ``pi_w``, ``pi_wb``: (S, 3, N, n) pairings with pi_{i,alpha} at w and at conj(w)
* ``xi_w``, ``xi_wb``: (S, 3, N, n) pairings with xi_{ij,gamma}, ij in (12, 13, 23)
* ``c``: (N, N, N) structure constants ``c[gamma, alpha, beta]``
* ``weights``: (n,) quadrature weights over w

Returns per-sample ``y1``, ``y2``, ``y3`` (complex) and the combined-square
form ``sum w [|kappa xi + S|^2 - |kappa xi|^2]`` (real).
"""
import numpy as np

PAIRS = ((0, 1), (0, 2), (1, 2))


def y_accumulate(pi_w, pi_wb, xi_w, xi_wb, c, weights, kappa):
    n_s = pi_w.shape[0]
    y1 = np.zeros(n_s, dtype=complex)
    y2 = np.zeros(n_s, dtype=complex)
    y3 = np.zeros(n_s, dtype=complex)
    comb = np.zeros(n_s)
    for p, (i, j) in enumerate(PAIRS):
        s_w = np.einsum("gab,san,sbn->sgn", c, pi_w[:, i], pi_w[:, j], optimize=True)
        s_wb = np.einsum("gab,san,sbn->sgn", c, pi_wb[:, i], pi_wb[:, j], optimize=True)
        kx = kappa * xi_w[:, p]
        kxb = kappa * xi_wb[:, p]
        y1 += np.einsum("sgn,n->s", kx * s_wb, weights)
        y2 += np.einsum("sgn,n->s", s_w * kxb, weights)
        y3 += np.einsum("sgn,n->s", s_w * s_wb, weights)
        comb += np.einsum("sgn,n->s", np.abs(kx + s_w) ** 2 - np.abs(kx) ** 2, weights)
    return y1, y2, y3, comb
