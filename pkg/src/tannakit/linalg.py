"""Exact dense linear algebra over Z and Q.

Matrices carry arbitrary-precision entries (python ints over Z,
fractions.Fraction over Q); nothing here ever rounds or overflows.
Provides Smith normal form with unimodular transforms, Hermite/echelon
canonical bases, kernels, exact solving, finitely generated modules
presented by invariant factors, module maps and subquotients.
"""

from fractions import Fraction

from .errors import CompositionNonzero, TorsionPresent

ZZ = "z"
QQ = "q"

RINGS = (ZZ, QQ)


def _coerce(ring, x):
    if ring == ZZ:
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError("non-integer entry %r in an integer matrix" % (x,))
            return int(x)
        return int(x)
    return Fraction(x)


def xgcd(a, b):
    """Return (g, x, y) with g = gcd(a,b) >= 0 and x*a + y*b = g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class Matrix:
    """Immutable dense matrix over Z or Q."""

    __slots__ = ("ring", "rows", "cols", "data", "_hash")

    def __init__(self, ring, data, rows=None, cols=None):
        if ring not in RINGS:
            raise ValueError("unknown ring %r" % (ring,))
        data = tuple(tuple(_coerce(ring, x) for x in row) for row in data)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("ragged or mis-sized matrix data")
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.data = data
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, ring, rows, cols):
        zero = 0 if ring == ZZ else Fraction(0)
        return cls(ring, tuple((zero,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, ring, n):
        one = 1 if ring == ZZ else Fraction(1)
        zero = 0 if ring == ZZ else Fraction(0)
        return cls(ring, tuple(tuple(one if i == j else zero for j in range(n))
                               for i in range(n)), n, n)

    @classmethod
    def diagonal(cls, ring, entries, rows=None, cols=None):
        k = len(entries)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, e in enumerate(entries):
            data[i][i] = e
        return cls(ring, data, rows, cols)

    @classmethod
    def column(cls, ring, vec):
        return cls(ring, tuple((x,) for x in vec), len(vec), 1)

    @classmethod
    def from_columns(cls, ring, columns, rows=None):
        if not columns:
            return cls.zeros(ring, rows or 0, 0)
        nrows = len(columns[0]) if rows is None else rows
        return cls(ring, tuple(tuple(col[i] for col in columns) for i in range(nrows)),
                   nrows, len(columns))

    # -- basic ops ----------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.ring == other.ring
                and self.rows == other.rows and self.cols == other.cols
                and self.data == other.data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self):
        return "Matrix(%s, %d x %d)" % (self.ring, self.rows, self.cols)

    def __getitem__(self, key):
        i, j = key
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def col(self, j):
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def is_zero(self):
        return all(all(x == 0 for x in row) for row in self.data)

    def transpose(self):
        return Matrix(self.ring,
                      tuple(tuple(self.data[i][j] for i in range(self.rows))
                            for j in range(self.cols)),
                      self.cols, self.rows)

    def to_ring(self, ring):
        if ring == self.ring:
            return self
        return Matrix(ring, self.data, self.rows, self.cols)

    def __neg__(self):
        return Matrix(self.ring, tuple(tuple(-x for x in row) for row in self.data),
                      self.rows, self.cols)

    def __add__(self, other):
        self._compat(other)
        return Matrix(self.ring,
                      tuple(tuple(a + b for a, b in zip(r1, r2))
                            for r1, r2 in zip(self.data, other.data)),
                      self.rows, self.cols)

    def __sub__(self, other):
        return self + (-other)

    def _compat(self, other):
        if self.ring != other.ring or self.rows != other.rows or self.cols != other.cols:
            raise ValueError("matrix shape/ring mismatch")

    def scale(self, c):
        c = _coerce(self.ring, c)
        return Matrix(self.ring, tuple(tuple(c * x for x in row) for row in self.data),
                      self.rows, self.cols)

    def __mul__(self, other):
        if not isinstance(other, Matrix):
            return self.scale(other)
        if self.ring != other.ring:
            raise ValueError("ring mismatch in product")
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product: %dx%d by %dx%d"
                             % (self.rows, self.cols, other.rows, other.cols))
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return Matrix.zeros(self.ring, self.rows, other.cols)
        # skip zero entries: the coalgebra-axiom checks multiply large,
        # mostly sparse kron products
        ncols = other.cols
        bd = other.data
        out = []
        for arow in self.data:
            acc = [0] * ncols
            for k, a in enumerate(arow):
                if a:
                    brow = bd[k]
                    for j, b in enumerate(brow):
                        if b:
                            acc[j] += a * b
            out.append(acc)
        return Matrix(self.ring, out, self.rows, other.cols)

    def apply(self, vec):
        """Matrix times column vector (a tuple)."""
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * _coerce(self.ring, b) for a, b in zip(row, vec))
                     for row in self.data)

    def kron(self, other):
        """Kronecker product, row-major flattening of tensor indices."""
        if self.ring != other.ring:
            raise ValueError("ring mismatch in kron")
        ocols = other.cols
        width = self.cols * ocols
        zero_row = (0,) * width
        out = []
        for i in range(self.rows):
            arow = self.data[i]
            if not any(arow):
                out.extend([zero_row] * other.rows)
                continue
            for r in range(other.rows):
                brow = other.data[r]
                acc = [0] * width
                for j, a in enumerate(arow):
                    if a:
                        base = j * ocols
                        for s, b in enumerate(brow):
                            if b:
                                acc[base + s] = a * b
                out.append(acc)
        return Matrix(self.ring, out, self.rows * other.rows, width)

    def hstack(self, other):
        if self.rows != other.rows or self.ring != other.ring:
            raise ValueError("hstack mismatch")
        return Matrix(self.ring,
                      tuple(r1 + r2 for r1, r2 in zip(self.data, other.data)),
                      self.rows, self.cols + other.cols)

    def vstack(self, other):
        if self.cols != other.cols or self.ring != other.ring:
            raise ValueError("vstack mismatch")
        return Matrix(self.ring, self.data + other.data,
                      self.rows + other.rows, self.cols)

    def take_rows(self, indices):
        return Matrix(self.ring, tuple(self.data[i] for i in indices),
                      len(indices), self.cols)

    def take_cols(self, indices):
        return Matrix(self.ring,
                      tuple(tuple(row[j] for j in indices) for row in self.data),
                      self.rows, len(indices))


def swap_matrix(ring, dim_left, dim_right):
    """Matrix of v (x) w  |->  w (x) v on row-major flattened tensors."""
    m = Matrix.zeros(ring, dim_left * dim_right, dim_left * dim_right)
    data = [list(r) for r in m.data]
    for i in range(dim_left):
        for j in range(dim_right):
            data[j * dim_left + i][i * dim_right + j] = 1
    return Matrix(ring, data)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

class SmithForm:
    """U*A*V = D with U, V unimodular and the diagonal a divisibility chain."""

    __slots__ = ("U", "D", "V", "Uinv", "Vinv")

    def __init__(self, U, D, V, Uinv, Vinv):
        self.U = U
        self.D = D
        self.V = V
        self.Uinv = Uinv
        self.Vinv = Vinv

    @property
    def invariant_factors(self):
        n = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(n) if self.D[i, i] != 0)

    @property
    def rank(self):
        return len(self.invariant_factors)


def _find_pivot(a, k, m, n):
    best = None
    bv = None
    for i in range(k, m):
        ai = a[i]
        for j in range(k, n):
            x = ai[j]
            if x != 0:
                ax = -x if x < 0 else x
                if bv is None or ax < bv:
                    best, bv = (i, j), ax
                    if ax == 1:
                        return best
    return best


def smith_normal_form(A):
    """Smith normal form of an integer matrix, with transforms.

    Pivot selection prefers the entry of smallest absolute value, which keeps
    intermediate entries from exploding on the matrix sizes used here.
    """
    if A.ring != ZZ:
        raise ValueError("smith_normal_form requires an integer matrix")
    m, n = A.rows, A.cols
    a = [list(r) for r in A.data]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Ui = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    Vi = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for r in range(m):
            Ui[r][i], Ui[r][j] = Ui[r][j], Ui[r][i]

    def swap_cols(i, j):
        for r in range(m):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(n):
            V[r][i], V[r][j] = V[r][j], V[r][i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def addmul_row(dst, src, q):
        # row_dst -= q * row_src
        ad, asr = a[dst], a[src]
        for j in range(n):
            ad[j] -= q * asr[j]
        ud, us = U[dst], U[src]
        for j in range(m):
            ud[j] -= q * us[j]
        for r in range(m):
            Ui[r][src] += q * Ui[r][dst]

    def addmul_col(dst, src, q):
        # col_dst -= q * col_src
        for r in range(m):
            a[r][dst] -= q * a[r][src]
        for r in range(n):
            V[r][dst] -= q * V[r][src]
        vs, vd = Vi[src], Vi[dst]
        for j in range(n):
            vs[j] += q * vd[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in range(m):
            Ui[r][i] = -Ui[r][i]

    def clear_position(k):
        while True:
            # bring the smallest entry of row/col k (from index k on) to (k,k)
            piv = None
            bv = None
            for i in range(k, m):
                x = a[i][k]
                if x != 0:
                    ax = abs(x)
                    if bv is None or ax < bv:
                        piv, bv = (i, k), ax
            for j in range(k, n):
                x = a[k][j]
                if x != 0:
                    ax = abs(x)
                    if bv is None or ax < bv:
                        piv, bv = (k, j), ax
            if piv is None:
                return False
            pi, pj = piv
            if pi != k:
                swap_rows(pi, k)
            elif pj != k:
                swap_cols(pj, k)
            p = a[k][k]
            done = True
            for i in range(k + 1, m):
                if a[i][k] != 0:
                    q = a[i][k] // p
                    if q:
                        addmul_row(i, k, q)
                    if a[i][k] != 0:
                        done = False
            for j in range(k + 1, n):
                if a[k][j] != 0:
                    q = a[k][j] // p
                    if q:
                        addmul_col(j, k, q)
                    if a[k][j] != 0:
                        done = False
            if done:
                return True

    r = min(m, n)
    k = 0
    while k < r:
        if _find_pivot(a, k, m, n) is None:
            break
        # move some nonzero entry into the working square first
        piv = _find_pivot(a, k, m, n)
        if a[k][k] == 0 or abs(a[piv[0]][piv[1]]) < abs(a[k][k]):
            if piv[0] != k:
                swap_rows(piv[0], k)
            if piv[1] != k:
                swap_cols(piv[1], k)
        clear_position(k)
        k += 1
    rank = k

    # enforce the divisibility chain
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if dj % di != 0:
                addmul_col(i, i + 1, -1)  # col_i += col_{i+1}
                clear_position(i)
                changed = True
    for i in range(rank):
        if a[i][i] < 0:
            negate_row(i)

    Um = Matrix(ZZ, U)
    Vm = Matrix(ZZ, V)
    Dm = Matrix(ZZ, a, m, n)
    form = SmithForm(Um, Dm, Vm, Matrix(ZZ, Ui), Matrix(ZZ, Vi))
    if (Um * A) * Vm != Dm:
        raise AssertionError("SNF internal inconsistency")
    return form


def determinant(A):
    """Exact determinant (Bareiss over Z, fraction-free; Gauss over Q)."""
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1 if A.ring == ZZ else Fraction(1)
    a = [list(r) for r in A.data]
    if A.ring == ZZ:
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]
    det = Fraction(1)
    for k in range(n):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    det = -det
                    break
            else:
                return Fraction(0)
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


# ---------------------------------------------------------------------------
# Canonical bases, kernels, solving
# ---------------------------------------------------------------------------

def rref(A):
    """Reduced row echelon form over Q: returns (R, pivot_columns)."""
    a = [[Fraction(x) for x in row] for row in A.data]
    rows, cols = A.rows, A.cols
    pivots = []
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if a[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return Matrix(QQ, a, rows, cols), tuple(pivots)


def hnf_columns(A):
    """Canonical (column-style Hermite) basis of the column lattice over Z.

    Columns are ordered by pivot row; pivots positive; entries of earlier
    columns in a pivot row reduced into [0, pivot).  Zero columns dropped.
    """
    if A.ring != ZZ:
        raise ValueError("hnf_columns requires an integer matrix")
    cols = [list(A.col(j)) for j in range(A.cols)]
    m = A.rows
    result = []
    active = cols
    for r in range(m):
        work = [c for c in active if c[r] != 0]
        rest = [c for c in active if c[r] == 0]
        if not work:
            active = rest
            continue
        while len(work) > 1:
            work.sort(key=lambda c: abs(c[r]))
            c0 = work[0]
            newwork = [c0]
            for c in work[1:]:
                q = c[r] // c0[r]
                nc = [x - q * y for x, y in zip(c, c0)]
                if nc[r] != 0:
                    newwork.append(nc)
                else:
                    rest.append(nc)
            if len(newwork) == 1:
                work = newwork
                break
            work = newwork
        piv = work[0]
        if piv[r] < 0:
            piv = [-x for x in piv]
        for prev in result:
            if prev[r] != 0:
                q = prev[r] // piv[r]
                if q:
                    for i in range(m):
                        prev[i] -= q * piv[i]
        result.append(piv)
        active = rest
    result = [c for c in result if any(x != 0 for x in c)]
    return Matrix.from_columns(ZZ, result, rows=m)


def echelon_columns(A):
    """Canonical column basis of the column span over Q (echelon columns)."""
    R, pivots = rref(A.to_ring(QQ).transpose())
    basis = [R.row(i) for i in range(len(pivots))]
    return Matrix.from_columns(QQ, basis, rows=A.rows)


def kernel(A):
    """Canonical basis (as columns) of ker(A); saturated over Z."""
    if A.ring == ZZ:
        if A.cols == 0:
            return Matrix.zeros(ZZ, 0, 0)
        form = smith_normal_form(A)
        r = form.rank
        cols = [form.V.col(j) for j in range(r, A.cols)]
        if not cols:
            return Matrix.zeros(ZZ, A.cols, 0)
        return hnf_columns(Matrix.from_columns(ZZ, cols, rows=A.cols))
    R, pivots = rref(A)
    free = [j for j in range(A.cols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * A.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i, f]
        basis.append(v)
    return Matrix.from_columns(QQ, basis, rows=A.cols)


class _Solver:
    """Reusable exact solver for A x = b with fixed A."""

    def __init__(self, A):
        self.A = A
        self.ring = A.ring
        if A.ring == ZZ:
            self.form = smith_normal_form(A)
        else:
            aug, pivots = rref(A.hstack(Matrix.identity(QQ, A.rows)))
            self.pivots = tuple(p for p in pivots if p < A.cols)
            self.T = aug.take_cols(range(A.cols, A.cols + A.rows))

    def solve(self, b):
        A = self.A
        if len(b) != A.rows:
            raise ValueError("rhs length mismatch")
        if A.ring == ZZ:
            f = self.form
            y = f.U.apply(b)
            n = A.cols
            c = [0] * n
            for i in range(A.rows):
                d = f.D[i, i] if i < min(A.rows, n) else 0
                if d != 0:
                    if y[i] % d != 0:
                        return None
                    c[i] = y[i] // d
                elif y[i] != 0:
                    return None
            return f.V.apply(c)
        y = self.T.apply([Fraction(x) for x in b])
        r = len(self.pivots)
        if any(y[i] != 0 for i in range(r, A.rows)):
            return None
        x = [Fraction(0)] * A.cols
        for i, p in enumerate(self.pivots):
            x[p] = y[i]
        return tuple(x)


def solve(A, b):
    """One exact solution of A x = b over A's ring, or None."""
    return _Solver(A).solve(b)


def solve_in_submodule(gens, v):
    """Coordinates c with gens*c = v over the ring of gens, or None.

    Over Z this is membership of v in the subgroup generated by the columns;
    over Q it is membership in the linear span.
    """
    return solve(gens, v)


# ---------------------------------------------------------------------------
# Finitely generated modules
# ---------------------------------------------------------------------------

class FgModule:
    """F.g. module over Z or Q: free rank plus invariant-factor torsion.

    The normalized presentation has len(torsion) + free_rank generators:
    torsion generators first (orders forming a divisibility chain), then the
    free ones.  Equality of modules is equality of (ring, free_rank, torsion).
    """

    __slots__ = ("ring", "free_rank", "torsion")

    def __init__(self, ring, free_rank, torsion=()):
        if ring not in RINGS:
            raise ValueError("unknown ring %r" % (ring,))
        torsion = tuple(int(t) for t in torsion)
        if ring == QQ and torsion:
            raise ValueError("modules over Q cannot have torsion")
        if any(t <= 1 for t in torsion):
            raise ValueError("torsion coefficients must exceed 1")
        for a, b in zip(torsion, torsion[1:]):
            if b % a != 0:
                raise ValueError("torsion list must be a divisibility chain")
        self.ring = ring
        self.free_rank = int(free_rank)
        self.torsion = torsion

    @classmethod
    def free(cls, ring, n):
        return cls(ring, n)

    @classmethod
    def zero(cls, ring):
        return cls(ring, 0)

    @property
    def ngens(self):
        return len(self.torsion) + self.free_rank

    def is_free(self):
        return not self.torsion

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def relations(self):
        """Relations matrix of the normalized presentation (ngens x #torsion)."""
        k = self.ngens
        t = len(self.torsion)
        data = [[0] * t for _ in range(k)]
        for i, ti in enumerate(self.torsion):
            data[i][i] = ti
        return Matrix(self.ring, data, k, t)

    def normalize_vector(self, vec):
        """Reduce generator coordinates to the canonical representative."""
        vec = tuple(vec)
        if len(vec) != self.ngens:
            raise ValueError("coordinate length mismatch")
        out = list(vec)
        for i, t in enumerate(self.torsion):
            out[i] = out[i] % t
        return tuple(out)

    def tensor(self, other):
        if self.ring != other.ring:
            raise ValueError("ring mismatch in tensor")
        if self.is_free() and other.is_free():
            return FgModule(self.ring, self.free_rank * other.free_rank)
        ra, rb = self.relations(), other.relations()
        ia, ib = Matrix.identity(self.ring, self.ngens), Matrix.identity(self.ring, other.ngens)
        rels = ra.kron(ib).hstack(ia.kron(rb))
        mod, _, _ = module_from_relations(self.ring, self.ngens * other.ngens, rels)
        return mod

    def direct_sum(self, other):
        if self.ring != other.ring:
            raise ValueError("ring mismatch in direct sum")
        torsion = sorted(self.torsion + other.torsion)
        # re-normalize the combined chain
        if torsion:
            rels = Matrix.diagonal(self.ring, torsion, rows=len(torsion) + self.free_rank + other.free_rank)
            mod, _, _ = module_from_relations(self.ring, rels.rows, rels)
            return mod
        return FgModule(self.ring, self.free_rank + other.free_rank)

    def __eq__(self, other):
        return (isinstance(other, FgModule) and self.ring == other.ring
                and self.free_rank == other.free_rank and self.torsion == other.torsion)

    def __hash__(self):
        return hash((self.ring, self.free_rank, self.torsion))

    def __repr__(self):
        ring = "Z" if self.ring == ZZ else "Q"
        parts = ["%s/%d" % (ring, t) for t in self.torsion]
        if self.free_rank:
            parts.append("%s^%d" % (ring, self.free_rank))
        return " + ".join(parts) if parts else "0"

    def describe(self):
        return repr(self)


def module_from_relations(ring, ngens, relations):
    """Normalize Z^ngens / im(relations) (or Q^ngens likewise).

    Returns (module, to_normal, from_normal): to_normal maps old generator
    coordinates to normalized ones (reduce with module.normalize_vector);
    from_normal lifts normalized generators to old coordinates.
    """
    if relations.rows != ngens:
        raise ValueError("relations row count != generator count")
    if ring == ZZ:
        if relations.cols == 0:
            mod = FgModule(ZZ, ngens)
            eye = Matrix.identity(ZZ, ngens)
            return mod, eye, eye
        form = smith_normal_form(relations)
        diag = [form.D[i, i] for i in range(min(ngens, relations.cols))]
        keep = []
        torsion = []
        for i in range(ngens):
            d = diag[i] if i < len(diag) else 0
            if d == 1:
                continue
            keep.append(i)
            if d > 1:
                torsion.append(d)
        mod = FgModule(ZZ, len(keep) - len(torsion), torsion)
        to_normal = form.U.take_rows(keep)
        from_normal = form.Uinv.take_cols(keep)
        return mod, to_normal, from_normal
    # over Q: quotient by the span
    rel = relations.to_ring(QQ)
    R, pivots = rref(rel.transpose())
    # rows of R: echelon basis of the relation span inside Q^ngens
    span_rows = [R.row(i) for i in range(len(pivots))]
    # complete to a basis: standard vectors at non-pivot coordinates
    free_coords = [j for j in range(ngens) if j not in pivots]
    mod = FgModule(QQ, len(free_coords))
    # reduction: x - sum_i x[p_i] * span_i  has zeros at pivots; its free
    # coordinates are x[f] - sum_i x[p_i]*span_i[f]
    to_normal = []
    for f in free_coords:
        row = [Fraction(0)] * ngens
        row[f] = Fraction(1)
        for i, p in enumerate(pivots):
            row[p] = -span_rows[i][f]
        to_normal.append(row)
    from_normal = Matrix.from_columns(
        QQ, [[Fraction(1) if i == f else Fraction(0) for i in range(ngens)]
             for f in free_coords], rows=ngens)
    return mod, Matrix(QQ, to_normal, len(free_coords), ngens), from_normal


class ModuleMap:
    """Map between f.g. modules, as a matrix on normalized generators.

    Well-definedness on torsion (relations map into relations) is checked at
    construction; entries over torsion rows are stored reduced.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix):
        if source.ring != target.ring or matrix.ring != source.ring:
            raise ValueError("ring mismatch in module map")
        if matrix.rows != target.ngens or matrix.cols != source.ngens:
            raise ValueError("matrix shape does not fit the presentations")
        tt = len(target.torsion)
        for i, t in enumerate(source.torsion):
            for j in range(target.ngens):
                w = t * matrix[j, i]
                if j < tt:
                    if w % target.torsion[j] != 0:
                        raise ValueError("map not well defined on torsion generator %d" % i)
                elif w != 0:
                    raise ValueError("map not well defined on torsion generator %d" % i)
        if tt:
            data = [list(r) for r in matrix.data]
            for j in range(tt):
                tj = target.torsion[j]
                data[j] = [x % tj for x in data[j]]
            matrix = Matrix(matrix.ring, data, matrix.rows, matrix.cols)
        self.source = source
        self.target = target
        self.matrix = matrix

    @classmethod
    def identity(cls, mod):
        return cls(mod, mod, Matrix.identity(mod.ring, mod.ngens))

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, Matrix.zeros(source.ring, target.ngens, source.ngens))

    def compose(self, other):
        """self after other."""
        if other.target != self.source:
            raise ValueError("composition mismatch")
        return ModuleMap(other.source, self.target, self.matrix * other.matrix)

    def is_zero_map(self):
        return self.matrix.is_zero()

    def tensor(self, other):
        return ModuleMap(self.source.tensor(other.source),
                         self.target.tensor(other.target),
                         self.matrix.kron(other.matrix))

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.source == other.source
                and self.target == other.target and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.source, self.target, self.matrix))

    def __repr__(self):
        return "ModuleMap(%r -> %r)" % (self.source, self.target)


def dual_map(f):
    """Transpose of a map between free modules, in the dual bases."""
    if not (f.source.is_free() and f.target.is_free()):
        raise TorsionPresent("dual_map requires free source and target")
    return ModuleMap(f.target, f.source, f.matrix.transpose())


class Subquotient:
    """ker(d_out)/im(d_in) with change-of-basis data retained.

    class_of maps a cycle (coordinates in the middle module's generators) to
    coordinates on the normalized generators of the subquotient; lift does
    the reverse for a generator index.
    """

    __slots__ = ("module", "_cycles", "_to_normal", "_from_normal", "_solver", "_mid")

    def __init__(self, module, cycles, to_normal, from_normal, mid):
        self.module = module
        self._cycles = cycles
        self._to_normal = to_normal
        self._from_normal = from_normal
        self._solver = None
        self._mid = mid

    def class_of(self, vec):
        if self._solver is None:
            self._solver = _Solver(self._cycles)
        c = self._solver.solve(vec)
        if c is None:
            raise ValueError("vector is not a cycle (or not in the cycle submodule)")
        return self.module.normalize_vector(self._to_normal.apply(c))

    def lift(self, j):
        return self._cycles.apply(self._from_normal.col(j))

    def lifts(self):
        return [self.lift(j) for j in range(self.module.ngens)]


def subquotient(d_in, d_out):
    """Homology at the middle of  A --d_in--> B --d_out--> C.

    Raises CompositionNonzero unless d_out o d_in = 0.
    """
    if d_in.target != d_out.source:
        raise ValueError("d_in target differs from d_out source")
    if not d_out.compose(d_in).is_zero_map():
        raise CompositionNonzero("d_out o d_in != 0")
    B = d_in.target
    ring = B.ring
    mout = d_out.matrix
    rel_c = d_out.target.relations()
    big = mout.hstack(rel_c) if rel_c.cols else mout
    K = kernel(big)
    cycles = K.take_rows(range(B.ngens)) if K.cols else Matrix.zeros(ring, B.ngens, 0)
    rel_b = B.relations()
    bd = d_in.matrix.hstack(rel_b) if rel_b.cols else d_in.matrix
    solver = _Solver(cycles)
    coeff_cols = []
    for j in range(bd.cols):
        c = solver.solve(bd.col(j))
        if c is None:
            raise CompositionNonzero("boundary does not lie in the cycle submodule")
        coeff_cols.append(c)
    coeff = Matrix.from_columns(ring, coeff_cols, rows=cycles.cols)
    mod, to_n, from_n = module_from_relations(ring, cycles.cols, coeff)
    return Subquotient(mod, cycles, to_n, from_n, B)


def subquotient_free(ring, m_in, m_out):
    """Subquotient for a free middle module given raw boundary matrices."""
    b = FgModule.free(ring, m_in.rows)
    a = FgModule.free(ring, m_in.cols)
    c = FgModule.free(ring, m_out.rows)
    return subquotient(ModuleMap(a, b, m_in), ModuleMap(b, c, m_out))
