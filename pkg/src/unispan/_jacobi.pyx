# Compiled cyclic Jacobi kernel for complex Hermitian matrices.
# Mirrors _jacobi_py exactly: same sweep order, same rotation formulas.

from libc.math cimport hypot, sqrt

cdef double _TINY = 1e-300


def jacobi_sweeps(double complex[:, ::1] H, double complex[:, ::1] V,
                  double tol, int max_sweeps):
    """Diagonalize Hermitian ``H`` in place, accumulating vectors into ``V``.

    ``H`` and ``V`` are overwritten; ``V`` must start as the identity.
    Returns the number of completed sweeps.
    """
    cdef Py_ssize_t n = H.shape[0]
    cdef Py_ssize_t p, q, j, sweep
    cdef double fro2 = 0.0, off2, thresh2, a, b, zeta, t, c, s, r, d
    cdef double complex hpq, g, sg, sgc, tp, tq

    for p in range(n):
        for q in range(n):
            d = abs(H[p, q])
            fro2 += d * d
    thresh2 = tol * tol * fro2

    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    d = abs(H[p, q])
                    off2 += d * d
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
                    t = 1.0 / (zeta + hypot(1.0, zeta))
                else:
                    t = -1.0 / (-zeta + hypot(1.0, zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sg = s * g
                sgc = s * g.conjugate()
                for j in range(n):
                    tp = H[p, j]
                    tq = H[q, j]
                    H[p, j] = c * tp - sg * tq
                    H[q, j] = sgc * tp + c * tq
                for j in range(n):
                    tp = H[j, p]
                    tq = H[j, q]
                    H[j, p] = c * tp - sgc * tq
                    H[j, q] = sg * tp + c * tq
                H[p, q] = 0.0
                H[q, p] = 0.0
                for j in range(n):
                    tp = V[j, p]
                    tq = V[j, q]
                    V[j, p] = c * tp - sgc * tq
                    V[j, q] = sg * tp + c * tq
    raise ArithmeticError(
        "Jacobi iteration did not converge in %d sweeps (n=%d)" % (max_sweeps, n)
    )
