"""Pure-Python cyclic Jacobi kernel for complex Hermitian matrices.

Fallback implementation used when the compiled extension is unavailable.
Both kernels run the identical deterministic row-major sweep order and
rotation formulas, so results agree to rounding.
"""

import numpy as np

_TINY = 1e-300


def jacobi_sweeps(H, V, tol, max_sweeps):
    """Diagonalize Hermitian ``H`` in place, accumulating vectors into ``V``.

    ``H`` and ``V`` are overwritten; ``V`` must start as the identity.
    Sweeps stop once the off-diagonal Frobenius mass drops below
    ``tol * ||H||_F``.  Returns the number of completed sweeps.
    """
    n = H.shape[0]
    fro = np.sqrt(np.sum(np.abs(H) ** 2))
    thresh2 = (tol * fro) ** 2
    diag = np.arange(n)
    for sweep in range(max_sweeps + 1):
        sq = np.abs(H) ** 2
        sq[diag, diag] = 0.0
        off2 = float(np.sum(sq))
        if off2 <= thresh2:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = H[p, q]
                r = abs(hpq)
                if r < _TINY:
                    continue
                a = H[p, p].real
                b = H[q, q].real
                g = hpq / r
                zeta = (b - a) / (2.0 * r)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.hypot(1.0, zeta))
                else:
                    t = -1.0 / (-zeta + np.hypot(1.0, zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                sg = s * g
                sgc = s * np.conj(g)
                rp = H[p, :].copy()
                rq = H[q, :].copy()
                H[p, :] = c * rp - sg * rq
                H[q, :] = sgc * rp + c * rq
                cp = H[:, p].copy()
                cq = H[:, q].copy()
                H[:, p] = c * cp - sgc * cq
                H[:, q] = sg * cp + c * cq
                H[p, q] = 0.0
                H[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - sgc * vq
                V[:, q] = sg * vp + c * vq
    raise ArithmeticError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps (n={n})"
    )
