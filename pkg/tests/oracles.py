"""Independent brute-force oracles used only by the test suite.

Everything here is deliberately written against the naive textbook
definitions, sharing no code path with the package: gcd-pivot diagonal
reduction without transform tracking, elementary divisors via minor gcds,
boundary matrices rebuilt from scratch, a dense commutant solver with its
own elimination, and finite enumeration over Z/p.
"""

from fractions import Fraction
from itertools import combinations, product
from math import gcd


# -- Smith normal form oracles ---------------------------------------------

def naive_diagonal(mat):
    """Diagonal of a Smith form by blind row/column gcd reduction.

    `mat` is a list of lists of ints.  No transforms, no pivot strategy
    beyond scanning order; returns the invariant factors (nonzero diagonal,
    divisibility enforced)."""
    a = [list(r) for r in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    k = 0
    while k < min(m, n):
        # find any nonzero entry
        found = None
        for i in range(k, m):
            for j in range(k, n):
                if a[i][j] != 0:
                    found = (i, j)
                    break
            if found:
                break
        if not found:
            break
        i, j = found
        a[k], a[i] = a[i], a[k]
        for r in range(m):
            a[r][k], a[r][j] = a[r][j], a[r][k]
        while True:
            for i in range(k + 1, m):
                while a[i][k] != 0:
                    if abs(a[i][k]) < abs(a[k][k]):
                        a[k], a[i] = a[i], a[k]
                    q = a[i][k] // a[k][k]
                    for j in range(n):
                        a[i][j] -= q * a[k][j]
            for j in range(k + 1, n):
                while a[k][j] != 0:
                    if abs(a[k][j]) < abs(a[k][k]):
                        for r in range(m):
                            a[r][k], a[r][j] = a[r][j], a[r][k]
                    q = a[k][j] // a[k][k]
                    for r in range(m):
                        a[r][j] -= q * a[r][k]
            if all(a[i][k] == 0 for i in range(k + 1, m)) and \
               all(a[k][j] == 0 for j in range(k + 1, n)):
                break
        k += 1
    diag = [abs(a[i][i]) for i in range(min(m, n)) if a[i][i] != 0]
    # enforce divisibility by gcd/lcm swaps
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            if diag[i + 1] % diag[i] != 0:
                g = gcd(diag[i], diag[i + 1])
                l = diag[i] * diag[i + 1] // g
                diag[i], diag[i + 1] = g, l
                changed = True
    return diag


def minor_gcd_divisors(mat):
    """Elementary divisors via gcds of k x k minors (small matrices only)."""
    m = len(mat)
    n = len(mat[0]) if m else 0

    def minor_det(rows, cols):
        k = len(rows)
        if k == 0:
            return 1
        if k == 1:
            return mat[rows[0]][cols[0]]
        det = 0
        for idx, c in enumerate(cols):
            sub = minor_det(rows[1:], cols[:idx] + cols[idx + 1:])
            term = mat[rows[0]][c] * sub
            det += term if idx % 2 == 0 else -term
        return det

    dks = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, minor_det(rows, cols))
        dks.append(g)
        if g == 0:
            break
    divisors = []
    for k in range(1, len(dks)):
        if dks[k] == 0:
            break
        divisors.append(dks[k] // dks[k - 1])
    return divisors


# -- homology oracle ---------------------------------------------------------

def boundary_matrices(maximal):
    """Chain data of the closure of `maximal`: per-dim simplex lists plus
    boundary matrices written directly from the alternating-face formula."""
    simplices = set()
    for s in maximal:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            for face in combinations(s, k):
                simplices.add(face)
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(s)
    for d in by_dim:
        by_dim[d].sort()
    top = max(by_dim) if by_dim else -1
    mats = {}
    for d in range(1, top + 1):
        rows = {s: i for i, s in enumerate(by_dim.get(d - 1, []))}
        cols = by_dim.get(d, [])
        mat = [[0] * len(cols) for _ in rows]
        for j, s in enumerate(cols):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                mat[rows[face]][j] += (-1) ** i
        mats[d] = mat
    return by_dim, mats


def homology_groups(maximal, relative_to=()):
    """Integral homology of closure(maximal) rel closure(relative_to).

    Returns {degree: (betti, [torsion coefficients])}, computed with the
    naive diagonal reduction above; independent of the package code."""
    sub = set()
    for s in relative_to:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            sub.update(combinations(s, k))
    by_dim, mats = boundary_matrices(maximal)
    keep = {d: [i for i, s in enumerate(by_dim.get(d, [])) if s not in sub]
            for d in by_dim}
    out = {}
    top = max(by_dim) if by_dim else -1
    for d in range(0, top + 1):
        cols_d = keep.get(d, [])
        nd = len(cols_d)
        # boundary from degree d to d-1, restricted to non-sub simplices
        if d in mats and d - 1 in keep:
            rows = keep[d - 1]
            mat_out = [[mats[d][i][j] for j in cols_d] for i in rows]
        else:
            mat_out = [[0] * nd for _ in range(0)]
        if d + 1 in mats:
            rows = cols_d
            cols_up = keep.get(d + 1, [])
            mat_in = [[mats[d + 1][i][j] for j in cols_up] for i in rows]
        else:
            mat_in = [[0] * 0 for _ in range(nd)]
        rank_out = _rank(mat_out)
        diag_in = naive_diagonal(mat_in) if nd else []
        rank_in = len(diag_in)
        betti = nd - rank_out - rank_in
        torsion = [t for t in diag_in if t > 1]
        out[d] = (betti, sorted(torsion))
    return out


def _rank(mat):
    a = [[Fraction(x) for x in row] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


# -- commutant oracle --------------------------------------------------------

def brute_commutant(ranks, edges):
    """Nullspace basis of the edge-compatibility system, own elimination.

    ranks: {vertex: rank}; edges: list of (src, dst, matrix rows-list).
    Unknowns are the entries of one square matrix per vertex, row-major,
    vertices in sorted order.  Returns a list of solution vectors (tuples of
    Fractions), in reduced row echelon form.
    """
    order = sorted(ranks)
    offset = {}
    pos = 0
    for v in order:
        offset[v] = pos
        pos += ranks[v] * ranks[v]
    nvars = pos
    rows = []
    for src, dst, mat in edges:
        rs, rd = ranks[src], ranks[dst]
        # mat is rd x rs;  constraint: mat*phi_src - phi_dst*mat = 0
        for i in range(rd):
            for j in range(rs):
                row = [Fraction(0)] * nvars
                # (mat*phi_src)[i][j] = sum_k mat[i][k] phi_src[k][j]
                for k in range(rs):
                    row[offset[src] + k * rs + j] += Fraction(mat[i][k])
                # (phi_dst*mat)[i][j] = sum_k phi_dst[i][k] mat[k][j]
                for k in range(rd):
                    row[offset[dst] + i * rd + k] -= Fraction(mat[k][j])
                rows.append(row)
    # eliminate
    a = rows
    pivots = []
    r = 0
    for c in range(nvars):
        piv = None
        for i in range(r, len(a)):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        f = a[r][c]
        a[r] = [x / f for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                g = a[i][c]
                a[i] = [x - g * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(nvars) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * nvars
        v[fc] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -a[i][fc]
        basis.append(tuple(v))
    return basis


# -- Z/p subquotient oracle --------------------------------------------------

def modp_subquotient_size(p, gens_b, rel_b, m_in, m_out, rel_c):
    """|ker(d_out)/im(d_in)| over Z/p by full enumeration.

    All matrices given as lists of lists of ints; gens_b is the number of
    generators of the middle module, rel_b its relation columns, rel_c the
    relation columns of the target.
    """
    def matvec(mat, vec, rows):
        return tuple(sum(mat[i][j] * vec[j] for j in range(len(vec))) % p
                     for i in range(rows))

    def span(vectors, dim):
        seen = {tuple([0] * dim)}
        frontier = [tuple([0] * dim)]
        while frontier:
            base = frontier.pop()
            for v in vectors:
                nxt = tuple((a + b) % p for a, b in zip(base, v))
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    nb = gens_b
    nc = len(m_out) if m_out else 0
    rel_c_span = span([tuple(col) for col in zip(*rel_c)] if rel_c and rel_c[0] else [],
                      nc) if nc else {()}
    kernel = []
    for vec in product(range(p), repeat=nb):
        img = matvec(m_out, vec, nc) if nc else ()
        if img in rel_c_span:
            kernel.append(vec)
    boundaries = []
    if m_in and m_in[0]:
        for col in zip(*m_in):
            boundaries.append(tuple(x % p for x in col))
    if rel_b and rel_b[0]:
        for col in zip(*rel_b):
            boundaries.append(tuple(x % p for x in col))
    bspan = span(boundaries, nb)
    return len(kernel) // len(bspan)
