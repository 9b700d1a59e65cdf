"""Finite simplicial pairs and their exact (co)homology.

Orientation convention: each simplex is written with its vertices in the
global order of the ambient complex, and the boundary alternates signs over
omitted vertices.  Products use the staircase (ordered-product)
triangulation, which makes the Eilenberg-Zilber shuffle formula land on
honest simplices.  Cech covers are by closed subcomplexes: for subcomplexes
A, B we have C(A) + C(B) = C(A u B) on the nose, so the comparison maps of
the total-complex models are exact at chain level.
"""

from itertools import combinations

from .errors import InvalidPair, NotACover, NotNested, NotPairMap, NotSimplicial
from .linalg import (
    QQ, ZZ, FgModule, Matrix, ModuleMap, Subquotient, subquotient_free,
)


class SimplicialComplex:
    """Immutable finite abstract simplicial complex with ordered vertices."""

    __slots__ = ("vertices", "_by_dim", "_set", "_indexes", "_hash")

    def __init__(self, vertices=(), simplices=()):
        simps = set()
        verts = set(vertices)
        for s in simplices:
            t = tuple(sorted(set(s)))
            if not t:
                continue
            simps.add(t)
            verts.update(t)
        for v in verts:
            simps.add((v,))
        by_dim = {}
        for s in simps:
            by_dim.setdefault(len(s) - 1, []).append(s)
        for d, lst in by_dim.items():
            lst.sort()
            by_dim[d] = tuple(lst)
        sset = frozenset(simps)
        for s in simps:
            if len(s) > 1:
                for face in combinations(s, len(s) - 1):
                    if face not in sset:
                        raise NotSimplicial(
                            "simplices not closed under faces: %r misses %r" % (s, face))
        self.vertices = tuple(sorted(verts))
        self._by_dim = by_dim
        self._set = sset
        self._indexes = {}
        self._hash = None

    @classmethod
    def from_maximal(cls, maximal, vertices=()):
        """Close the given maximal simplices under faces."""
        simps = set()
        for s in maximal:
            t = tuple(sorted(set(s)))
            for k in range(1, len(t) + 1):
                simps.update(combinations(t, k))
        return cls(vertices, simps)

    @classmethod
    def empty(cls):
        return cls()

    @property
    def dim(self):
        return max(self._by_dim) if self._by_dim else -1

    def simplices(self, d):
        return self._by_dim.get(d, ())

    def all_simplices(self):
        return self._set

    def n_simplices(self):
        return len(self._set)

    def has_simplex(self, s):
        return tuple(sorted(s)) in self._set

    def index(self, d, s):
        idx = self._indexes.get(d)
        if idx is None:
            idx = {s: i for i, s in enumerate(self._by_dim.get(d, ()))}
            self._indexes[d] = idx
        return idx.get(s)

    def is_subcomplex_of(self, other):
        return self._set <= other._set

    def union(self, other):
        return SimplicialComplex((), self._set | other._set)

    def intersection(self, other):
        return SimplicialComplex((), self._set & other._set)

    def skeleton(self, k):
        return SimplicialComplex((), {s for s in self._set if len(s) - 1 <= k})

    def is_empty(self):
        return not self._set

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self._set == other._set

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._set)
        return self._hash

    def __repr__(self):
        counts = ",".join("%d:%d" % (d, len(self._by_dim[d]))
                          for d in sorted(self._by_dim))
        return "SimplicialComplex(dim %d; %s)" % (self.dim, counts)

    def boundary_matrix(self, ring, d):
        """Boundary from degree d to d-1 on the full complex."""
        rows = self.simplices(d - 1)
        cols = self.simplices(d)
        data = [[0] * len(cols) for _ in rows]
        for j, s in enumerate(cols):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                r = self.index(d - 1, face)
                data[r][j] += (-1) ** i
        return Matrix(ring, data, len(rows), len(cols))


class SimplicialPair:
    """A complex with a distinguished subcomplex."""

    __slots__ = ("X", "Z", "_hash")

    def __init__(self, X, Z=None):
        if Z is None:
            Z = SimplicialComplex.empty()
        if not Z.is_subcomplex_of(X):
            raise InvalidPair("Z is not a subcomplex of X")
        self.X = X
        self.Z = Z
        self._hash = None

    def __eq__(self, other):
        return (isinstance(other, SimplicialPair)
                and self.X == other.X and self.Z == other.Z)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.X, self.Z))
        return self._hash

    def __repr__(self):
        return "SimplicialPair(%r, %r)" % (self.X, self.Z)


class SimplicialMap:
    """Vertex assignment whose simplex images are simplices."""

    __slots__ = ("source", "target", "assignment")

    def __init__(self, source, target, assignment):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        for v in source.vertices:
            if v not in self.assignment:
                raise NotSimplicial("vertex %r has no image" % (v,))
            if (self.assignment[v],) not in target.all_simplices():
                raise NotSimplicial("image %r is not a vertex of the target"
                                    % (self.assignment[v],))
        for s in source.all_simplices():
            img = tuple(sorted({self.assignment[v] for v in s}))
            if not target.has_simplex(img):
                raise NotSimplicial("image of %r is not a simplex" % (s,))

    @classmethod
    def identity(cls, X):
        return cls(X, X, {v: v for v in X.vertices})

    def __call__(self, v):
        return self.assignment[v]

    def compose(self, other):
        """self after other."""
        if not other.target.is_subcomplex_of(self.source):
            raise ValueError("composition mismatch")
        return SimplicialMap(other.source, self.target,
                             {v: self.assignment[w] for v, w in other.assignment.items()})

    def restrict(self, sub, target=None):
        return SimplicialMap(sub, target if target is not None else self.target,
                             {v: self.assignment[v] for v in sub.vertices})

    def image(self, sub=None):
        src = self.source if sub is None else sub
        return SimplicialComplex(
            (), {tuple(sorted({self.assignment[v] for v in s}))
                 for s in src.all_simplices()})

    def oriented_image(self, s):
        """(sign, image simplex) or (0, None) when the image degenerates."""
        img = [self.assignment[v] for v in s]
        if len(set(img)) != len(img):
            return 0, None
        inv = 0
        for i in range(len(img)):
            for j in range(i + 1, len(img)):
                if img[i] > img[j]:
                    inv += 1
        return (-1) ** inv, tuple(sorted(img))

    def is_pair_map(self, pair_src, pair_tgt):
        return self.image(pair_src.Z).is_subcomplex_of(pair_tgt.Z)


# ---------------------------------------------------------------------------
# Chain complexes
# ---------------------------------------------------------------------------

class ChainComplex:
    """Free labeled chain complex with decreasing differentials."""

    __slots__ = ("ring", "_labels", "_bnd", "_index", "_homology")

    def __init__(self, ring, labels, boundaries, check=True):
        self.ring = ring
        self._labels = {d: tuple(ls) for d, ls in labels.items() if ls}
        self._bnd = {}
        for d, m in boundaries.items():
            expected_rows = len(self._labels.get(d - 1, ()))
            expected_cols = len(self._labels.get(d, ()))
            if m.rows != expected_rows or m.cols != expected_cols:
                raise ValueError("boundary %d has wrong shape" % d)
            self._bnd[d] = m
        self._index = {}
        self._homology = {}
        if check:
            for d in list(self._bnd):
                if d - 1 in self._bnd:
                    if not (self._bnd[d - 1] * self._bnd[d]).is_zero():
                        raise AssertionError("d o d != 0 at degree %d" % d)

    @property
    def degrees(self):
        return sorted(self._labels)

    @property
    def top_degree(self):
        return max(self._labels) if self._labels else -1

    def rank(self, d):
        return len(self._labels.get(d, ()))

    def labels(self, d):
        return self._labels.get(d, ())

    def index(self, d, label):
        idx = self._index.get(d)
        if idx is None:
            idx = {l: i for i, l in enumerate(self._labels.get(d, ()))}
            self._index[d] = idx
        return idx.get(label)

    def boundary(self, d):
        m = self._bnd.get(d)
        if m is None:
            m = Matrix.zeros(self.ring, self.rank(d - 1), self.rank(d))
        return m

    def homology(self, d) -> Subquotient:
        if d not in self._homology:
            self._homology[d] = subquotient_free(
                self.ring, self.boundary(d + 1), self.boundary(d))
        return self._homology[d]

    def homology_module(self, d) -> FgModule:
        if self.rank(d) == 0:
            return FgModule.zero(self.ring)
        return self.homology(d).module

    def homology_table(self, up_to=None):
        top = self.top_degree if up_to is None else up_to
        return {d: self.homology_module(d) for d in range(0, top + 1)}


class ChainMap:
    """Degreewise matrices commuting with the boundaries."""

    __slots__ = ("source", "target", "_comps")

    def __init__(self, source, target, comps, check=True):
        self.source = source
        self.target = target
        self._comps = dict(comps)
        if check:
            degs = set(source.degrees) | set(target.degrees)
            for d in degs:
                left = self.target.boundary(d) * self.component(d)
                right = self.component(d - 1) * self.source.boundary(d)
                if left != right:
                    raise AssertionError("chain map fails to commute at degree %d" % d)

    def component(self, d):
        m = self._comps.get(d)
        if m is None:
            m = Matrix.zeros(self.source.ring, self.target.rank(d), self.source.rank(d))
        return m

    def compose(self, other):
        degs = set(self.source.degrees) | set(other.source.degrees)
        return ChainMap(other.source, self.target,
                        {d: self.component(d) * other.component(d) for d in degs},
                        check=False)


def tensor_complex(cx, cy):
    """Tensor product complex; basis labels (p, sigma, tau), p ascending."""
    if cx.ring != cy.ring:
        raise ValueError("ring mismatch")
    ring = cx.ring
    labels = {}
    top = cx.top_degree + cy.top_degree
    for n in range(0, top + 1):
        ls = []
        for p in range(0, n + 1):
            q = n - p
            for s in cx.labels(p):
                for t in cy.labels(q):
                    ls.append((p, s, t))
        if ls:
            labels[n] = tuple(ls)
    index = {n: {l: i for i, l in enumerate(labels.get(n, ()))} for n in labels}
    boundaries = {}
    for n in range(1, top + 1):
        rows = len(labels.get(n - 1, ()))
        cols = len(labels.get(n, ()))
        if cols == 0:
            continue
        data = [[0] * cols for _ in range(rows)]
        for j, (p, s, t) in enumerate(labels[n]):
            q = n - p
            if p > 0:
                bx = cx.boundary(p)
                jx = cx.index(p, s)
                for i, s2 in enumerate(cx.labels(p - 1)):
                    c = bx[i, jx]
                    if c:
                        r = index[n - 1][(p - 1, s2, t)]
                        data[r][j] += c
            if q > 0:
                by = cy.boundary(q)
                jy = cy.index(q, t)
                sign = (-1) ** p
                for i, t2 in enumerate(cy.labels(q - 1)):
                    c = by[i, jy]
                    if c:
                        r = index[n - 1][(p, s, t2)]
                        data[r][j] += sign * c
        boundaries[n] = Matrix(ring, data, rows, cols)
    return ChainComplex(ring, labels, boundaries)


# ---------------------------------------------------------------------------
# Relative chains and homology
# ---------------------------------------------------------------------------

def relative_chain_complex(pair, ring=ZZ):
    """Chains of X modulo chains of Z; basis the simplices of X not in Z."""
    X, Z = pair.X, pair.Z
    zset = Z.all_simplices()
    labels = {}
    for d in range(0, X.dim + 1):
        ls = tuple(s for s in X.simplices(d) if s not in zset)
        if ls:
            labels[d] = ls
    boundaries = {}
    for d in range(1, X.dim + 1):
        rows = labels.get(d - 1, ())
        cols = labels.get(d, ())
        if not cols:
            continue
        ridx = {s: i for i, s in enumerate(rows)}
        data = [[0] * len(cols) for _ in rows]
        for j, s in enumerate(cols):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                r = ridx.get(face)
                if r is not None:
                    data[r][j] += (-1) ** i
        boundaries[d] = Matrix(ring, data, len(rows), len(cols))
    return ChainComplex(ring, labels, boundaries)


class PairHomology:
    """All-degree homology of a pair with cycle bookkeeping."""

    __slots__ = ("pair", "ring", "complex")

    def __init__(self, pair, ring):
        self.pair = pair
        self.ring = ring
        self.complex = relative_chain_complex(pair, ring)

    def module(self, n) -> FgModule:
        if n < 0 or self.complex.rank(n) == 0:
            return FgModule.zero(self.ring)
        return self.complex.homology(n).module

    def class_of(self, n, vec):
        return self.complex.homology(n).class_of(vec)

    def lift(self, n, j):
        return self.complex.homology(n).lift(j)


_PAIR_CACHE = {}


def pair_homology(pair, ring=ZZ) -> PairHomology:
    key = (pair, ring)
    ph = _PAIR_CACHE.get(key)
    if ph is None:
        ph = PairHomology(pair, ring)
        _PAIR_CACHE[key] = ph
    return ph


def relative_homology(pair, n, ring=ZZ) -> FgModule:
    return pair_homology(pair, ring).module(n)


def homology_of_complex(X, n, ring=ZZ) -> FgModule:
    return relative_homology(SimplicialPair(X), n, ring)


def _relative_chain_matrix(f, pair_src, pair_tgt, n, ring):
    """Matrix of the chain map induced by f on relative n-chains."""
    cs = pair_homology(pair_src, ring).complex
    ct = pair_homology(pair_tgt, ring).complex
    data = [[0] * cs.rank(n) for _ in range(ct.rank(n))]
    for j, s in enumerate(cs.labels(n)):
        sign, img = f.oriented_image(s)
        if sign == 0:
            continue
        r = ct.index(n, img)
        if r is not None:
            data[r][j] += sign
    return Matrix(ring, data, ct.rank(n), cs.rank(n))


def induced_map_on_homology(f, pair_src, pair_tgt, n, ring=ZZ) -> ModuleMap:
    """h_n(f): h_n(X,Z) -> h_n(X',Z') for a map of pairs."""
    if not f.image(pair_src.X).is_subcomplex_of(pair_tgt.X):
        raise NotPairMap("f does not map X into X'")
    if not f.is_pair_map(pair_src, pair_tgt):
        raise NotPairMap("f does not map Z into Z'")
    hs = pair_homology(pair_src, ring)
    ht = pair_homology(pair_tgt, ring)
    src, tgt = hs.module(n), ht.module(n)
    if src.is_zero() or tgt.is_zero():
        return ModuleMap.zero(src, tgt)
    m = _relative_chain_matrix(f, pair_src, pair_tgt, n, ring)
    cols = []
    for j in range(src.ngens):
        vec = hs.lift(n, j)
        cols.append(ht.class_of(n, m.apply(vec)))
    return ModuleMap(src, tgt, Matrix.from_columns(ring, cols, rows=tgt.ngens))


def triple_boundary(X, Z, W, n, ring=ZZ) -> ModuleMap:
    """Boundary h_n(X,Z) -> h_{n-1}(Z,W) of the homology sequence of a triple."""
    if not (W.is_subcomplex_of(Z) and Z.is_subcomplex_of(X)):
        raise NotNested("need W <= Z <= X")
    top = pair_homology(SimplicialPair(X, Z), ring)
    bot = pair_homology(SimplicialPair(Z, W), ring)
    src, tgt = top.module(n), bot.module(n - 1)
    if src.is_zero() or tgt.is_zero():
        return ModuleMap.zero(src, tgt)
    rel = top.complex
    botc = bot.complex
    full_rows = X.simplices(n - 1)
    bnd_rows = {s: i for i, s in enumerate(full_rows)}
    zset = Z.all_simplices()
    cols = []
    for j in range(src.ngens):
        vec = top.lift(n, j)
        out = [0] * len(full_rows)
        for idx, s in enumerate(rel.labels(n)):
            c = vec[idx]
            if c == 0:
                continue
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                out[bnd_rows[face]] += c * ((-1) ** i)
        for s, i in bnd_rows.items():
            if out[i] != 0 and s not in zset:
                raise AssertionError("lifted boundary not supported on Z")
        tvec = [0] * botc.rank(n - 1)
        for i, s in enumerate(botc.labels(n - 1)):
            r = bnd_rows.get(s)
            if r is not None:
                tvec[i] = out[r]
        cols.append(bot.class_of(n - 1, tuple(tvec)))
    return ModuleMap(src, tgt, Matrix.from_columns(ring, cols, rows=tgt.ngens))


# ---------------------------------------------------------------------------
# Long exact sequence certificate
# ---------------------------------------------------------------------------

class LesNode:
    __slots__ = ("degree", "position", "ok", "rank_in", "rank_ker", "defect")

    def __init__(self, degree, position, ok, rank_in, rank_ker, defect):
        self.degree = degree
        self.position = position
        self.ok = ok
        self.rank_in = rank_in
        self.rank_ker = rank_ker
        self.defect = defect

    def as_dict(self):
        return {"degree": self.degree, "position": self.position,
                "ok": self.ok, "rank_image_in": self.rank_in,
                "rank_kernel_out": self.rank_ker, "defect": self.defect}


class LesCertificate:
    __slots__ = ("ring", "nodes", "ok")

    def __init__(self, ring, nodes):
        self.ring = ring
        self.nodes = nodes
        self.ok = all(n.ok for n in nodes)

    def as_dict(self):
        return {"ring": self.ring, "ok": self.ok,
                "nodes": [n.as_dict() for n in self.nodes]}


def pair_les_maps(pair, n, ring=ZZ):
    """(i_*, j_*, boundary) at degree n for the pair's long exact sequence."""
    X, Z = pair.X, pair.Z
    absZ = SimplicialPair(Z)
    absX = SimplicialPair(X)
    inc = SimplicialMap(Z, X, {v: v for v in Z.vertices})
    i_n = induced_map_on_homology(inc, absZ, absX, n, ring)
    ident = SimplicialMap.identity(X)
    j_n = induced_map_on_homology(ident, absX, pair, n, ring)
    bnd = triple_boundary(X, Z, SimplicialComplex.empty(), n, ring)
    return i_n, j_n, bnd


def _exact_at(d_in, d_out):
    from .linalg import subquotient
    from .errors import CompositionNonzero
    try:
        sq = subquotient(d_in, d_out)
    except CompositionNonzero:
        return False, "composition nonzero"
    if sq.module.is_zero():
        return True, "0"
    return False, sq.module.describe()


def _rank_of(mm):
    from .linalg import rref
    return len(rref(mm.matrix.to_ring(QQ))[1])


def _kernel_rank(mm):
    """Rank of the kernel of the map, over the fraction field."""
    return mm.source.free_rank - _rank_of(mm)


def les_exactness(pair, ring=ZZ) -> LesCertificate:
    """Exactness report for ... -> h_n(Z) -> h_n(X) -> h_n(X,Z) -> h_{n-1}(Z) -> ...

    Each node reports rank(im of the incoming map) and rank(ker of the
    outgoing map) over the fraction field, plus the exact (torsion-aware)
    defect module ker/im; exactness over Z means the defect vanishes.
    """
    X = pair.X
    N = X.dim
    maps = {n: pair_les_maps(pair, n, ring) for n in range(0, N + 2)}
    nodes = []
    for n in range(N + 1, -1, -1):
        i_n, j_n, b_n = maps[n]
        # at h_n(Z): incoming boundary from h_{n+1}(X,Z), outgoing i_n
        if n <= N:
            b_up = maps[n + 1][2] if n + 1 <= N + 1 else None
            if b_up is None or b_up.target != i_n.source:
                b_up = ModuleMap.zero(FgModule.zero(ring), i_n.source)
            ok, defect = _exact_at(b_up, i_n)
            nodes.append(LesNode(n, "h(Z)", ok, _rank_of(b_up),
                                 _kernel_rank(i_n), defect))
        # at h_n(X): incoming i_n, outgoing j_n
        ok, defect = _exact_at(i_n, j_n)
        nodes.append(LesNode(n, "h(X)", ok, _rank_of(i_n),
                             _kernel_rank(j_n), defect))
        # at h_n(X,Z): incoming j_n, outgoing boundary
        ok, defect = _exact_at(j_n, b_n)
        nodes.append(LesNode(n, "h(X,Z)", ok, _rank_of(j_n),
                             _kernel_rank(b_n), defect))
    return LesCertificate(ring, nodes)


# ---------------------------------------------------------------------------
# Products, Eilenberg-Zilber, Alexander-Whitney
# ---------------------------------------------------------------------------

def _staircases(sigma, tau):
    """All maximal monotone paths through the grid sigma x tau."""
    p = len(sigma) - 1
    q = len(tau) - 1
    out = []
    for positions in combinations(range(p + q), p):
        path = [(sigma[0], tau[0])]
        a = b = 0
        for step in range(p + q):
            if step in positions:
                a += 1
            else:
                b += 1
            path.append((sigma[a], tau[b]))
        out.append(tuple(path))
    return out


def product_complex(X, Y):
    """Staircase triangulation of the product of two complexes."""
    maximal = []
    star_x = [s for s in X.all_simplices()
              if not any(set(s) < set(t) for t in X.all_simplices())]
    star_y = [t for t in Y.all_simplices()
              if not any(set(t) < set(u) for u in Y.all_simplices())]
    for s in star_x:
        for t in star_y:
            maximal.extend(_staircases(s, t))
    return SimplicialComplex.from_maximal(maximal)


def product_pair(p1, p2):
    """(X1 x X2, Z1 x X2  u  X1 x Z2) with the staircase triangulation."""
    X = product_complex(p1.X, p2.X)
    z_parts = []
    if not p1.Z.is_empty():
        z_parts.append(product_complex(p1.Z, p2.X))
    if not p2.Z.is_empty():
        z_parts.append(product_complex(p1.X, p2.Z))
    Z = SimplicialComplex.empty()
    for part in z_parts:
        Z = Z.union(part)
    return SimplicialPair(X, Z)


def _shuffle_sign(positions, total):
    inv = 0
    others = [t for t in range(total) if t not in positions]
    for s in positions:
        for t in others:
            if t < s:
                inv += 1
    return (-1) ** inv


def ez_matrixes(cx, cy, cxy, tensor=None):
    """(EZ, AW) as ChainMaps between tensor(cx,cy) and cxy.

    Works for absolute and relative labeled complexes alike: path or face
    labels missing from a target basis are dropped (the quotient map).
    """
    if tensor is None:
        tensor = tensor_complex(cx, cy)
    ring = cx.ring
    top = tensor.top_degree
    ez = {}
    aw = {}
    for n in range(0, max(top, cxy.top_degree) + 1):
        tn = tensor.rank(n)
        pn = cxy.rank(n)
        ezdata = [[0] * tn for _ in range(pn)]
        for j, (p, s, t) in enumerate(tensor.labels(n)):
            q = n - p
            for positions in combinations(range(n), p):
                sign = _shuffle_sign(positions, n)
                path = [(s[0], t[0])]
                a = b = 0
                for step in range(n):
                    if step in positions:
                        a += 1
                    else:
                        b += 1
                    path.append((s[a], t[b]))
                r = cxy.index(n, tuple(path))
                if r is not None:
                    ezdata[r][j] += sign
        ez[n] = Matrix(ring, ezdata, pn, tn)
        awdata = [[0] * pn for _ in range(tn)]
        for j, simplex in enumerate(cxy.labels(n)):
            xs = [v[0] for v in simplex]
            ys = [v[1] for v in simplex]
            for i in range(n + 1):
                front = tuple(xs[:i + 1])
                back = tuple(ys[i:])
                if len(set(front)) != len(front) or len(set(back)) != len(back):
                    continue
                r = tensor.index(n, (i, front, back))
                if r is not None:
                    awdata[r][j] += 1
        aw[n] = Matrix(ring, awdata, tn, pn)
    ez_map = ChainMap(tensor, cxy, ez)
    aw_map = ChainMap(cxy, tensor, aw)
    return ez_map, aw_map


def ez_aw_maps(X, Y, ring=ZZ):
    """Absolute Eilenberg-Zilber and Alexander-Whitney maps for X, Y.

    Asserts AW o EZ = id on the tensor complex.
    """
    cx = relative_chain_complex(SimplicialPair(X), ring)
    cy = relative_chain_complex(SimplicialPair(Y), ring)
    XY = product_complex(X, Y)
    cxy = relative_chain_complex(SimplicialPair(XY), ring)
    tensor = tensor_complex(cx, cy)
    ez, aw = ez_matrixes(cx, cy, cxy, tensor)
    for n in range(0, tensor.top_degree + 1):
        prod = aw.component(n) * ez.component(n)
        if prod != Matrix.identity(ring, tensor.rank(n)):
            raise AssertionError("AW o EZ != id in degree %d" % n)
    return ez, aw, tensor, cxy


def ez_aw_relative(p1, p2, ring=ZZ):
    """Relative EZ/AW between tensor of relative chains and chains of the
    product pair; AW o EZ = id is asserted."""
    c1 = pair_homology(p1, ring).complex
    c2 = pair_homology(p2, ring).complex
    pp = product_pair(p1, p2)
    cp = pair_homology(pp, ring).complex
    tensor = tensor_complex(c1, c2)
    ez, aw = ez_matrixes(c1, c2, cp, tensor)
    for n in range(0, tensor.top_degree + 1):
        prod = aw.component(n) * ez.component(n)
        if prod != Matrix.identity(ring, tensor.rank(n)):
            raise AssertionError("relative AW o EZ != id in degree %d" % n)
    return pp, ez, aw, tensor


# ---------------------------------------------------------------------------
# Cup products on relative cochains
# ---------------------------------------------------------------------------

class CupProduct:
    """Front/back cup product on relative cochains and cohomology.

    C^p(X,Z1) (x) C^q(X,Z2) -> C^{p+q}(X, Z1+Z2), where the target cochains
    live on simplices neither in Z1 nor in Z2; with subcomplexes this basis
    coincides with that of C(X, Z1 u Z2), and the comparison map is reported.
    """

    __slots__ = ("X", "Z1", "Z2", "p", "q", "ring", "_c1", "_c2", "_c12",
                 "_h1", "_h2", "_h12", "pairing", "comparison_iso")

    def __init__(self, X, Z1, Z2, p, q, ring=ZZ):
        if not Z1.is_subcomplex_of(X) or not Z2.is_subcomplex_of(X):
            raise InvalidPair("Z1, Z2 must be subcomplexes of X")
        self.X, self.Z1, self.Z2, self.p, self.q, self.ring = X, Z1, Z2, p, q, ring
        self._c1 = pair_homology(SimplicialPair(X, Z1), ring).complex
        self._c2 = pair_homology(SimplicialPair(X, Z2), ring).complex
        # the "simplices neither in Z1 nor in Z2" complex, built literally
        z1set = Z1.all_simplices()
        z2set = Z2.all_simplices()
        labels = {}
        for d in range(0, X.dim + 1):
            ls = tuple(s for s in X.simplices(d)
                       if s not in z1set and s not in z2set)
            if ls:
                labels[d] = ls
        union = Z1.union(Z2)
        self._c12 = pair_homology(SimplicialPair(X, union), ring).complex
        # comparison with C(X, Z1 u Z2): for subcomplexes, the projection is
        # the identity on bases; verify degreewise and on cohomology
        self.comparison_iso = all(
            labels.get(d, ()) == self._c12.labels(d)
            for d in range(0, X.dim + 1))
        self._h1 = self._cohomology(self._c1)
        self._h2 = self._cohomology(self._c2)
        self._h12 = self._cohomology(self._c12)
        self.pairing = self._compute_pairing()

    def _cohomology(self, cc):
        out = {}
        for n in range(0, cc.top_degree + 1):
            out[n] = subquotient_free(self.ring,
                                      cc.boundary(n).transpose(),
                                      cc.boundary(n + 1).transpose())
        return out

    def cohomology_module(self, which, n):
        table = {1: self._h1, 2: self._h2, 12: self._h12}[which]
        if n not in table:
            return FgModule.zero(self.ring)
        return table[n].module

    def cup_cochain(self, fvec, p, gvec, q):
        """Cup of cochains: f on non-Z1 p-simplices, g on non-Z2 q-simplices."""
        c1, c2, c12 = self._c1, self._c2, self._c12
        out = [0] * c12.rank(p + q)
        for j, s in enumerate(c12.labels(p + q)):
            front = s[:p + 1]
            back = s[p:]
            fi = c1.index(p, front)
            gi = c2.index(q, back)
            if fi is None or gi is None:
                continue
            v = fvec[fi] * gvec[gi]
            if v:
                out[j] += v
        return tuple(out)

    def _compute_pairing(self):
        p, q = self.p, self.q
        hp = self._h1.get(p)
        hq = self._h2.get(q)
        hpq = self._h12.get(p + q)
        if hp is None or hq is None or hpq is None:
            return []
        rows = []
        for a in range(hp.module.ngens):
            f = hp.lift(a)
            row = []
            for b in range(hq.module.ngens):
                g = hq.lift(b)
                cup = self.cup_cochain(f, p, g, q)
                row.append(hpq.class_of(cup))
            rows.append(row)
        return rows

    def pairing_matrix(self):
        """For rank-1 targets: the pairing as a plain matrix."""
        tgt = self.cohomology_module(12, self.p + self.q)
        if tgt.ngens != 1:
            raise ValueError("pairing matrix needs a rank-1 target")
        return Matrix(self.ring, [[c[0] for c in row] for row in self.pairing],
                      len(self.pairing), len(self.pairing[0]) if self.pairing else 0)

    def class_of_cup(self, a, b):
        return self.pairing[a][b]

    def graded_commutativity_defects(self):
        """Pairs (a,b) where [f_a u g_b] != (-1)^{pq} [g_b u f_a].

        Only meaningful when Z1 == Z2, so both factors draw from the same
        cohomology."""
        if self.Z1 != self.Z2 or self.p != self.q:
            other = CupProduct(self.X, self.Z2, self.Z1, self.q, self.p, self.ring)
        else:
            other = self
        sign = (-1) ** (self.p * self.q)
        bad = []
        hp = self._h1.get(self.p)
        hq = self._h2.get(self.q)
        hpq = self._h12.get(self.p + self.q)
        if hp is None or hq is None or hpq is None:
            return bad
        for a in range(hp.module.ngens):
            for b in range(hq.module.ngens):
                left = self.pairing[a][b]
                right = other.pairing[b][a]
                scaled = hpq.module.normalize_vector(tuple(sign * x for x in right))
                if tuple(left) != tuple(scaled):
                    bad.append((a, b))
        return bad


def relative_cup_product(X, Z1, Z2, p, q, ring=ZZ) -> CupProduct:
    return CupProduct(X, Z1, Z2, p, q, ring)


# ---------------------------------------------------------------------------
# Cech total complex of a closed cover with divisor components
# ---------------------------------------------------------------------------

class CechModel:
    """Total complex of the cover/divisor tricomplex, with its comparison."""

    __slots__ = ("X", "cover", "components", "ring", "complex", "pair")

    def __init__(self, X, cover, components, ring=ZZ):
        if not cover:
            raise NotACover("empty cover")
        for Y in cover:
            if not Y.is_subcomplex_of(X):
                raise NotACover("cover member is not a subcomplex")
        u = SimplicialComplex.empty()
        for Y in cover:
            u = u.union(Y)
        if u != X:
            raise NotACover("cover does not exhaust X")
        for Zb in components:
            if not Zb.is_subcomplex_of(X):
                raise InvalidPair("divisor component is not a subcomplex")
        self.X, self.cover, self.components, self.ring = X, tuple(cover), tuple(components), ring
        z = SimplicialComplex.empty()
        for Zb in components:
            z = z.union(Zb)
        self.pair = SimplicialPair(X, z)
        self.complex = self._build()

    def _intersection(self, A, B):
        cur = self.cover[A[0]]
        for a in A[1:]:
            cur = cur.intersection(self.cover[a])
        for b in B:
            cur = cur.intersection(self.components[b])
        return cur

    def _build(self):
        ring = self.ring
        qn = len(self.cover)
        pn = len(self.components)
        pieces = {}
        for isz in range(1, qn + 1):
            for A in combinations(range(qn), isz):
                for jsz in range(0, pn + 1):
                    for B in combinations(range(pn), jsz):
                        w = self._intersection(A, B)
                        if not w.is_empty():
                            pieces[(A, B)] = w
        labels = {}
        for (A, B), w in sorted(pieces.items()):
            i = len(A) - 1
            j = len(B)
            for k in range(0, w.dim + 1):
                for s in w.simplices(k):
                    labels.setdefault(i + j + k, []).append((A, B, s))
        for n in labels:
            labels[n].sort(key=lambda l: (len(l[0]), l[0], len(l[1]), l[1], len(l[2]), l[2]))
            labels[n] = tuple(labels[n])
        index = {n: {l: i for i, l in enumerate(labels[n])} for n in labels}
        boundaries = {}
        top = max(labels) if labels else -1
        for n in range(1, top + 1):
            rows = len(labels.get(n - 1, ()))
            cols = len(labels.get(n, ()))
            if cols == 0:
                continue
            data = [[0] * cols for _ in range(rows)]
            ridx = index.get(n - 1, {})
            for col, (A, B, s) in enumerate(labels[n]):
                i = len(A) - 1
                k = len(s) - 1
                # simplicial boundary
                for t in range(len(s)):
                    face = s[:t] + s[t + 1:]
                    if face:
                        r = ridx.get((A, B, face))
                        if r is not None:
                            data[r][col] += (-1) ** t
                # Cech differential (drop a cover index), sign (-1)^k
                if i > 0:
                    for t in range(len(A)):
                        A2 = A[:t] + A[t + 1:]
                        r = ridx.get((A2, B, s))
                        if r is not None:
                            data[r][col] += ((-1) ** k) * ((-1) ** t)
                # divisor differential (drop a component index), sign (-1)^{k+i}
                if B:
                    for t in range(len(B)):
                        B2 = B[:t] + B[t + 1:]
                        r = ridx.get((A, B2, s))
                        if r is not None:
                            data[r][col] += ((-1) ** (k + i)) * ((-1) ** t)
            boundaries[n] = Matrix(ring, data, rows, cols)
        return ChainComplex(ring, labels, boundaries)

    def homology(self, n) -> FgModule:
        return self.complex.homology_module(n)

    def certificate(self):
        """Degreewise comparison with the relative homology of (X, union Z)."""
        ph = pair_homology(self.pair, self.ring)
        top = max(self.complex.top_degree, self.pair.X.dim)
        rows = []
        ok = True
        for n in range(0, top + 1):
            a = self.homology(n)
            b = ph.module(n)
            match = a == b
            ok = ok and match
            rows.append({"degree": n, "total_complex": a.describe(),
                         "relative": b.describe(), "match": match})
        return {"ok": ok, "degrees": rows}


def cech_total_complex(X, cover, components=(), ring=ZZ) -> CechModel:
    return CechModel(X, cover, components, ring)
