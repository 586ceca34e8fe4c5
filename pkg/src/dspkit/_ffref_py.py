"""Pure-Python fraction-free row echelon kernel over the Gaussian integers.

Hot path for every exact rank / kernel / solve in the package.  A matrix
of Gaussian rationals is row-scaled to Gaussian integers before entering;
Bareiss-style elimination keeps every intermediate entry a minor of the
scaled matrix, so divisions are exact and no rational arithmetic happens
inside the loop.  The compiled twin in ``_ffref.pyx`` implements the same
contract; ``dspkit.linalg`` picks one at import.
"""

BACKEND = "python"


def ffref(re, im, nrows, ncols):
    """Fraction-free row echelon form, in place.

    ``re`` and ``im`` are flat row-major lists of Python ints holding the
    real and imaginary parts.  Returns ``(rank, pivot_cols)``; on return
    rows ``0..rank-1`` of the buffers hold an upper echelon matrix with the
    same row space as the input (each row an integer multiple of the
    reduced row), and all later rows are zero.
    """
    pivots = []
    r = 0
    # previous pivot (Bareiss divisor), starts at 1
    dr, di = 1, 0
    for c in range(ncols):
        if r >= nrows:
            break
        prow = -1
        for i in range(r, nrows):
            k = i * ncols + c
            if re[k] or im[k]:
                prow = i
                break
        if prow < 0:
            continue
        if prow != r:
            a, b = prow * ncols, r * ncols
            for j in range(ncols):
                re[a + j], re[b + j] = re[b + j], re[a + j]
                im[a + j], im[b + j] = im[b + j], im[a + j]
        p = r * ncols
        pr, pi = re[p + c], im[p + c]
        dn = dr * dr + di * di
        for i in range(r + 1, nrows):
            q = i * ncols
            fr, fi = re[q + c], im[q + c]
            for j in range(c + 1, ncols):
                # t = (piv * a_ij - f * a_rj) / dprev, exact in Z[i]
                ar, ai = re[q + j], im[q + j]
                br, bi = re[p + j], im[p + j]
                tr = pr * ar - pi * ai - (fr * br - fi * bi)
                ti = pr * ai + pi * ar - (fr * bi + fi * br)
                if dn == 1 and di == 0:
                    if dr == 1:
                        re[q + j], im[q + j] = tr, ti
                    else:  # dr == -1
                        re[q + j], im[q + j] = -tr, -ti
                else:
                    # divide by d = dr + di*i: multiply by conjugate / norm
                    ur = tr * dr + ti * di
                    ui = ti * dr - tr * di
                    re[q + j] = ur // dn
                    im[q + j] = ui // dn
            re[q + c], im[q + c] = 0, 0
        pivots.append(c)
        dr, di = pr, pi
        r += 1
    # zero out any numerically-dead rows below the rank for a clean result
    for i in range(r, nrows):
        q = i * ncols
        for j in range(ncols):
            re[q + j], im[q + j] = 0, 0
    return r, pivots
