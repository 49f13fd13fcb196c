"""Independent dense oracles used to cross-check the production routines.

Deliberately naive: dense Bareiss elimination for ranks, dense RREF for
kernels, and a tiny monomial-dict calculus for assembling differential
operators by direct differentiation.  Nothing here shares code with the
package internals it is used to check.
"""

from fractions import Fraction


def bareiss_rank(dense) -> int:
    """Rank by dense fraction-free Bareiss elimination on integerized rows."""
    m = [[Fraction(x) for x in row] for row in dense]
    if not m or not m[0]:
        return 0
    rows, cols = len(m), len(m[0])
    # clear denominators globally
    den = 1
    for row in m:
        for x in row:
            if x.denominator != 1:
                den = den * x.denominator
    a = [[int(x * den) for x in row] for row in m]
    prev = 1
    r = 0
    for c in range(cols):
        piv = -1
        for i in range(r, rows):
            if a[i][c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(rows):
            if i == r:
                continue
            for j in range(cols):
                if j == c:
                    continue
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == rows:
            break
    return r


def dense_nullspace(dense) -> list[list[Fraction]]:
    """Kernel basis by dense RREF over Fractions."""
    m = [[Fraction(x) for x in row] for row in dense]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = -1
        for i in range(r, rows):
            if m[i][c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    pivot_set = set(pivots)
    basis = []
    for fc in range(cols):
        if fc in pivot_set:
            continue
        vec = [Fraction(0)] * cols
        vec[fc] = Fraction(1)
        for ri, pc in enumerate(pivots):
            vec[pc] = -m[ri][fc]
        basis.append(vec)
    return basis


# -- monomial-dict polynomial calculus (for operator oracles) --------------

# A scalar polynomial is {exponent_tuple: Fraction}; a tensor field is a
# nested list of scalar polynomials.


def poly_zero():
    return {}


def poly_monomial(alpha, coeff=Fraction(1)):
    return {tuple(alpha): Fraction(coeff)} if coeff != 0 else {}


def poly_add(p, q):
    out = dict(p)
    for a, c in q.items():
        s = out.get(a, Fraction(0)) + c
        if s == 0:
            out.pop(a, None)
        else:
            out[a] = s
    return out


def poly_scale(p, c):
    c = Fraction(c)
    return {a: c * v for a, v in p.items()} if c != 0 else {}


def poly_diff(p, k):
    """d/dx_k (0-based axis)."""
    out = {}
    for a, c in p.items():
        if a[k] == 0:
            continue
        b = list(a)
        b[k] -= 1
        out[tuple(b)] = c * a[k]
    return out


def poly_mul_coord(p, k):
    out = {}
    for a, c in p.items():
        b = list(a)
        b[k] += 1
        out[tuple(b)] = c
    return out


def poly_eq(p, q):
    return poly_add(p, poly_scale(q, -1)) == {}


def cube_integral(p, n) -> Fraction:
    """Exact integral over the unit cube [0,1]^n."""
    total = Fraction(0)
    for a, c in p.items():
        f = Fraction(1)
        for ak in a:
            f /= (ak + 1)
        total += c * f
    return total
