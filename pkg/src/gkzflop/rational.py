"""Exact linear algebra over Q and Z on small dense matrices.

Everything here works on lists of lists of fractions.Fraction (or ints for
the lattice routines).  Sizes are tiny (rank <= 4, a handful of columns),
so clarity wins over asymptotics.
"""

from fractions import Fraction


def rref(rows):
    """Reduced row echelon form over Q.

    Returns (reduced_rows, pivot_columns).  Input rows are not modified.
    """
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows):
    return len(rref(rows)[0])


def solve(rows, rhs):
    """One rational solution of rows * x = rhs, or None if inconsistent.

    Free variables are set to 0.
    """
    if not rows:
        return None
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    sol = [Fraction(0)] * ncols
    for row, c in zip(red, pivots):
        if c == ncols:
            return None
        sol[c] = row[ncols]
    # pivots beyond the listed rows cannot happen: rref pairs them 1:1
    return sol


def nullspace(rows):
    """Basis of the rational kernel of the row matrix, as a list of vectors."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(red, pivots):
            v[c] = -row[f]
        basis.append(v)
    return basis


def hnf(rows):
    """Row-style Hermite normal form of an integer matrix.

    Returns (h, transform) with transform * rows == h, transform unimodular.
    Zero rows of h are trimmed.  Pivots are positive and entries above a
    pivot are reduced into [0, pivot).
    """
    m = [list(map(int, row)) for row in rows]
    n = len(m)
    ncols = len(m[0]) if m else 0
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    r = 0
    for c in range(ncols):
        # gcd sweep on column c below row r
        while True:
            nz = [i for i in range(r, n) if m[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            t[r], t[i0] = t[i0], t[r]
            done = True
            for i in range(r + 1, n):
                if m[i][c] != 0:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    t[i] = [a - q * b for a, b in zip(t[i], t[r])]
                    if m[i][c] != 0:
                        done = False
            if done:
                break
        if r < n and m[r][c] != 0:
            if m[r][c] < 0:
                m[r] = [-a for a in m[r]]
                t[r] = [-a for a in t[r]]
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    t[i] = [a - q * b for a, b in zip(t[i], t[r])]
            r += 1
            if r == n:
                break
    return m[:r], t[:r]


def integer_kernel(rows):
    """Basis of the integer kernel {z : z * rows == 0} (z as row vectors)."""
    m = [list(map(int, row)) for row in rows]
    h, t = _hnf_full(m)
    return [t[i] for i in range(len(h), len(t))]


def _hnf_full(m):
    """Like hnf() but returns the full transform including kernel rows."""
    n = len(m)
    ncols = len(m[0]) if m else 0
    work = [list(row) for row in m]
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, n) if work[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(work[i][c]))
            work[r], work[i0] = work[i0], work[r]
            t[r], t[i0] = t[i0], t[r]
            done = True
            for i in range(r + 1, n):
                if work[i][c] != 0:
                    q = work[i][c] // work[r][c]
                    work[i] = [a - q * b for a, b in zip(work[i], work[r])]
                    t[i] = [a - q * b for a, b in zip(t[i], t[r])]
                    if work[i][c] != 0:
                        done = False
            if done:
                break
        if r < n and work[r][c] != 0:
            if work[r][c] < 0:
                work[r] = [-a for a in work[r]]
                t[r] = [-a for a in t[r]]
            for i in range(r):
                q = work[i][c] // work[r][c]
                if q:
                    work[i] = [a - q * b for a, b in zip(work[i], work[r])]
                    t[i] = [a - q * b for a, b in zip(t[i], t[r])]
            r += 1
            if r == n:
                break
    return work[:r], t


def solve_integer(rows, rhs):
    """One integer solution x of x * rows == rhs (row-vector convention).

    Returns None when no integer solution exists.
    """
    h, t = _hnf_full([list(map(int, r)) for r in rows])
    # express rhs in terms of the HNF rows by forward substitution
    target = list(map(int, rhs))
    coeffs = [0] * len(h)
    ncols = len(target)
    for i, row in enumerate(h):
        lead = next((c for c in range(ncols) if row[c] != 0), None)
        if lead is None:
            continue
        if target[lead] % row[lead] != 0:
            return None
        q = target[lead] // row[lead]
        coeffs[i] = q
        target = [a - q * b for a, b in zip(target, row)]
    if any(target):
        return None
    n = len(rows)
    x = [0] * n
    for q, trow in zip(coeffs, t[: len(h)]):
        x = [a + q * b for a, b in zip(x, trow)]
    return x


def reduce_mod_lattice(vec, basis):
    """Canonical representative of vec modulo the integer row lattice `basis`.

    The basis is brought to HNF; pivot coordinates of the result are reduced
    into [0, pivot).  Deterministic, so usable as a tie-break.
    """
    if not basis:
        return list(vec)
    h, _ = hnf(basis)
    v = list(map(int, vec))
    ncols = len(v)
    for row in h:
        lead = next((c for c in range(ncols) if row[c] != 0), None)
        if lead is None:
            continue
        q = v[lead] // row[lead]
        if q:
            v = [a - q * b for a, b in zip(v, row)]
    return v
