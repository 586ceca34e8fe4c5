# cython: language_level=3
"""Compiled twin of ``dspkit._ffref_py``: fraction-free row echelon form
over the Gaussian integers.  Entries are arbitrary-precision Python ints;
the win over the pure version comes from compiled loop and index handling.
"""

BACKEND = "cython"


def ffref(list re, list im, Py_ssize_t nrows, Py_ssize_t ncols):
    """Same contract as ``dspkit._ffref_py.ffref``."""
    cdef list pivots = []
    cdef Py_ssize_t r = 0, c, i, j, prow, p, q, a, b, k
    cdef object dr = 1, di = 0, dn = 1
    cdef object pr, pi, fr, fi, ar, ai, br, bi, tr, ti, ur, ui, tmp
    cdef bint unit_div
    for c in range(ncols):
        if r >= nrows:
            break
        prow = -1
        for i in range(r, nrows):
            k = i * ncols + c
            if re[k] != 0 or im[k] != 0:
                prow = i
                break
        if prow < 0:
            continue
        if prow != r:
            a = prow * ncols
            b = r * ncols
            for j in range(ncols):
                tmp = re[a + j]; re[a + j] = re[b + j]; re[b + j] = tmp
                tmp = im[a + j]; im[a + j] = im[b + j]; im[b + j] = tmp
        p = r * ncols
        pr = re[p + c]
        pi = im[p + c]
        dn = dr * dr + di * di
        unit_div = dn == 1 and di == 0
        for i in range(r + 1, nrows):
            q = i * ncols
            fr = re[q + c]
            fi = im[q + c]
            for j in range(c + 1, ncols):
                ar = re[q + j]
                ai = im[q + j]
                br = re[p + j]
                bi = im[p + j]
                tr = pr * ar - pi * ai - (fr * br - fi * bi)
                ti = pr * ai + pi * ar - (fr * bi + fi * br)
                if unit_div:
                    if dr == 1:
                        re[q + j] = tr; im[q + j] = ti
                    else:
                        re[q + j] = -tr; im[q + j] = -ti
                else:
                    ur = tr * dr + ti * di
                    ui = ti * dr - tr * di
                    re[q + j] = ur // dn
                    im[q + j] = ui // dn
            re[q + c] = 0
            im[q + c] = 0
        pivots.append(c)
        dr = pr
        di = pi
        r += 1
    for i in range(r, nrows):
        q = i * ncols
        for j in range(ncols):
            re[q + j] = 0
            im[q + j] = 0
    return r, pivots
