"""Diagram representations and their Tannakian truncation data.

A diagram is a finite directed graph; a representation assigns a f.g. module
to each vertex and a module map to each edge.  For a finite subdiagram F with
free vertices, end_algebra computes the algebra of edge-compatible
endomorphism families inside the product of the vertex endomorphism rings;
its dual carries the coalgebra structure, every vertex module the canonical
coaction rho(x) = sum_i e_i* (x) (e_i . x), and inclusions of subdiagrams
dualize to transition maps.  Bases are canonical: Hermite over Z, reduced
echelon over Q.
"""

from .errors import (
    AxiomViolation, InputError, NonFreeVertex, NotNested, WrongRank,
)
from .linalg import (
    QQ, ZZ, FgModule, Matrix, ModuleMap, _Solver, echelon_columns,
    hnf_columns, kernel, smith_normal_form, solve, swap_matrix,
)
from .simplicial import (
    SimplicialPair, induced_map_on_homology, pair_homology, relative_homology,
    triple_boundary,
)

MAP_EDGE = "map"
TRIPLE_EDGE = "triple"


class Diagram:
    """Directed graph with named vertices and edges.

    Vertex payloads are the caller's business: the pairs diagram stores
    (SimplicialPair, degree), synthetic diagrams store nothing.
    """

    __slots__ = ("vertices", "payloads", "edges")

    def __init__(self, vertices, edges, payloads=None):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex names")
        self.payloads = dict(payloads or {})
        seen = set()
        es = []
        for (name, src, dst, kind) in edges:
            if name in seen:
                raise InputError("duplicate edge name %r" % name)
            seen.add(name)
            if src not in self.vertices or dst not in self.vertices:
                raise InputError("edge %r references unknown vertices" % name)
            es.append((name, src, dst, kind))
        self.edges = tuple(es)

    def edges_within(self, vertex_set):
        vs = set(vertex_set)
        return tuple(e for e in self.edges if e[1] in vs and e[2] in vs)


class DiagramRep:
    """Modules on vertices, maps on edges."""

    __slots__ = ("diagram", "ring", "modules", "maps", "nonfree")

    def __init__(self, diagram, ring, modules, maps):
        self.diagram = diagram
        self.ring = ring
        self.modules = dict(modules)
        self.maps = dict(maps)
        for v in diagram.vertices:
            if v not in self.modules:
                raise InputError("vertex %r carries no module" % v)
        for (name, src, dst, _kind) in diagram.edges:
            mm = self.maps.get(name)
            if mm is None:
                raise InputError("edge %r carries no map" % name)
            if mm.source != self.modules[src] or mm.target != self.modules[dst]:
                raise InputError("edge %r map does not match its endpoints" % name)
        self.nonfree = tuple(sorted(v for v, m in self.modules.items()
                                    if not m.is_free()))

    def module(self, v) -> FgModule:
        return self.modules[v]

    def rank(self, v):
        return self.modules[v].free_rank

    def edge_map(self, name) -> ModuleMap:
        return self.maps[name]


class Subdiagram:
    """A vertex subset of a diagram; edges default to the full ones."""

    __slots__ = ("diagram", "vertices", "edges", "name")

    def __init__(self, diagram, vertices, edges=None, name=""):
        vs = tuple(sorted(set(vertices)))
        for v in vs:
            if v not in diagram.vertices:
                raise InputError("unknown vertex %r" % (v,))
        self.diagram = diagram
        self.vertices = vs
        if edges is None:
            self.edges = diagram.edges_within(vs)
        else:
            all_edges = {e[0]: e for e in diagram.edges_within(vs)}
            self.edges = tuple(all_edges[n] for n in edges)
        self.name = name

    def is_subset_of(self, other):
        return (self.diagram is other.diagram
                and set(self.vertices) <= set(other.vertices)
                and set(e[0] for e in self.edges) <= set(e[0] for e in other.edges))

    def __repr__(self):
        return "Subdiagram(%s)" % (",".join(map(str, self.vertices)),)


def build_pairs_diagram(ring, vertex_pairs, map_edges=(), triple_edges=()):
    """Assemble the pairs diagram and its homology representation.

    vertex_pairs: {name: (SimplicialPair, degree)}.
    map_edges: (name, src, dst, SimplicialMap); the map must send the source
    vertex pair into the target vertex pair, degrees must agree.
    triple_edges: (name, src, dst); vertices (X,Z,n) -> (Z,W,n-1).
    Vertices with non-free homology are admitted but flagged.
    """
    names = sorted(vertex_pairs)
    payloads = dict(vertex_pairs)
    edges = []
    maps = {}
    modules = {}
    for v in names:
        p, n = vertex_pairs[v]
        modules[v] = relative_homology(p, n, ring)
    for (name, src, dst, f) in map_edges:
        ps, ns = vertex_pairs[src]
        pt, nt = vertex_pairs[dst]
        if ns != nt:
            raise InputError("map edge %r changes the degree" % name)
        edges.append((name, src, dst, MAP_EDGE))
        maps[name] = induced_map_on_homology(f, ps, pt, ns, ring)
    for (name, src, dst) in triple_edges:
        ps, ns = vertex_pairs[src]
        pt, nt = vertex_pairs[dst]
        if nt != ns - 1:
            raise InputError("triple edge %r must drop the degree by one" % name)
        if pt.X != ps.Z:
            raise NotNested("triple edge %r needs source Z = target X" % name)
        if not pt.Z.is_subcomplex_of(ps.Z):
            raise NotNested("triple edge %r fails W <= Z" % name)
        edges.append((name, src, dst, TRIPLE_EDGE))
        maps[name] = triple_boundary(ps.X, ps.Z, pt.Z, ns, ring)
    dia = Diagram(names, edges, payloads)
    return dia, DiagramRep(dia, ring, modules, maps)


class EndAlgebra:
    """Families of edge-compatible endomorphisms over a finite subdiagram.

    The basis spans the solution module of T(e) phi_v = phi_w T(e) inside
    the direct sum of End(T(v)); over Z it is saturated (kernel of an
    integer matrix) and reduced to Hermite form, over Q to reduced echelon.
    Structure constants are computed on demand.
    """

    __slots__ = ("rep", "sub", "ring", "order", "offsets", "total", "basis",
                 "unit", "_solver", "_structure")

    def __init__(self, rep, sub):
        for v in sub.vertices:
            if not rep.module(v).is_free():
                raise NonFreeVertex("vertex %r carries %r"
                                    % (v, rep.module(v)))
        self.rep = rep
        self.sub = sub
        self.ring = rep.ring
        self.order = tuple(sub.vertices)
        offsets = {}
        pos = 0
        for v in self.order:
            offsets[v] = pos
            pos += rep.rank(v) ** 2
        self.offsets = offsets
        self.total = pos
        rows = []
        for (name, src, dst, _kind) in sub.edges:
            m = rep.edge_map(name).matrix
            rs, rd = rep.rank(src), rep.rank(dst)
            for i in range(rd):
                for j in range(rs):
                    row = [0] * self.total
                    for k in range(rs):
                        row[offsets[src] + k * rs + j] += m[i, k]
                    for k in range(rd):
                        row[offsets[dst] + i * rd + k] -= m[k, j]
                    rows.append(row)
        if rows:
            constraint = Matrix(self.ring, rows, len(rows), self.total)
            basis = kernel(constraint)
        else:
            basis = Matrix.identity(self.ring, self.total)
        if self.ring == ZZ:
            basis = hnf_columns(basis) if basis.cols else basis
        else:
            basis = echelon_columns(basis) if basis.cols else basis
        self.basis = basis
        self._solver = _Solver(self.basis)
        unit = [0] * self.total
        for v in self.order:
            r = rep.rank(v)
            for i in range(r):
                unit[offsets[v] + i * r + i] = 1
        coords = self._solver.solve(tuple(unit))
        if coords is None:
            raise AxiomViolation("identity family does not satisfy the constraints")
        self.unit = tuple(coords)
        self._structure = None

    @property
    def dim(self):
        return self.basis.cols

    def family(self, i):
        """Basis family i as {vertex: Matrix}."""
        col = self.basis.col(i)
        out = {}
        for v in self.order:
            r = self.rep.rank(v)
            off = self.offsets[v]
            out[v] = Matrix(self.ring,
                            [[col[off + a * r + b] for b in range(r)]
                             for a in range(r)], r, r)
        return out

    def component(self, i, v) -> Matrix:
        r = self.rep.rank(v)
        off = self.offsets[v]
        col = self.basis.col(i)
        return Matrix(self.ring,
                      [[col[off + a * r + b] for b in range(r)] for a in range(r)],
                      r, r)

    def multiply_families(self, ci, cj):
        """Componentwise product of two coordinate vectors, as a flat vector."""
        fi = {}
        fj = {}
        for v in self.order:
            r = self.rep.rank(v)
            fi[v] = sum((self.component(k, v).scale(c) for k, c in enumerate(ci) if c),
                        Matrix.zeros(self.ring, r, r))
            fj[v] = sum((self.component(k, v).scale(c) for k, c in enumerate(cj) if c),
                        Matrix.zeros(self.ring, r, r))
        flat = []
        for v in self.order:
            prod = fi[v] * fj[v]
            for a in range(self.rep.rank(v)):
                flat.extend(prod.row(a))
        return tuple(flat)

    def coordinates(self, flat):
        """Coordinates of a flat family vector in the basis, or None."""
        return self._solver.solve(tuple(flat))

    def structure_constants(self):
        """c[i][j] = coordinate vector of e_i * e_j."""
        if self._structure is None:
            n = self.dim
            table = []
            ei = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
            for i in range(n):
                row = []
                for j in range(n):
                    prod = self.multiply_families(ei[i], ei[j])
                    coords = self.coordinates(prod)
                    if coords is None:
                        raise AxiomViolation(
                            "product of basis families %d,%d escapes the span" % (i, j))
                    row.append(coords)
                table.append(row)
            self._structure = table
        return self._structure

    def is_saturated(self):
        if self.ring != ZZ or self.dim == 0:
            return True
        return all(f == 1 for f in smith_normal_form(self.basis).invariant_factors)


def end_algebra(rep, sub) -> EndAlgebra:
    return EndAlgebra(rep, sub)


class CoalgebraTrunc:
    """Free coalgebra truncation: rank, comultiplication and counit matrices.

    delta: rank^2 x rank (row-major tensor indices); counit: 1 x rank.
    Coassociativity and the counit identities are asserted at construction.
    """

    __slots__ = ("ring", "rank", "delta", "counit")

    def __init__(self, ring, rank, delta, counit):
        if delta.rows != rank * rank or delta.cols != rank:
            raise AxiomViolation("comultiplication matrix has wrong shape")
        if counit.rows != 1 or counit.cols != rank:
            raise AxiomViolation("counit matrix has wrong shape")
        self.ring = ring
        self.rank = rank
        self.delta = delta
        self.counit = counit
        eye = Matrix.identity(ring, rank)
        left = delta.kron(eye) * delta
        right = eye.kron(delta) * delta
        if left != right:
            raise AxiomViolation("comultiplication is not coassociative")
        if counit.kron(eye) * delta != eye or eye.kron(counit) * delta != eye:
            raise AxiomViolation("counit identities fail")

    def grouplike_defect(self, coords):
        """Delta(x) - x (x) x for an element given by coordinates."""
        x = Matrix.column(self.ring, coords)
        return self.delta * x - x.kron(x)

    def counit_of(self, coords):
        return (self.counit * Matrix.column(self.ring, coords))[0, 0]

    def __eq__(self, other):
        return (isinstance(other, CoalgebraTrunc) and self.ring == other.ring
                and self.rank == other.rank and self.delta == other.delta
                and self.counit == other.counit)

    def __hash__(self):
        return hash((self.ring, self.rank, self.delta, self.counit))


def dual_coalgebra(E: EndAlgebra) -> CoalgebraTrunc:
    """Dual of the endomorphism algebra in the chosen basis.

    The comultiplication pairs against the opposite multiplication,
    Delta(e_k*) = sum_{i,j} c_{ij}^k e_j* (x) e_i*: this is the unique order
    for which the canonical coactions rho(x) = sum_i e_i* (x) e_i.x satisfy
    the comodule axioms when the algebra is noncommutative.
    """
    n = E.dim
    c = E.structure_constants()
    delta = [[0] * n for _ in range(n * n)]
    for i in range(n):
        for j in range(n):
            cij = c[i][j]
            for k in range(n):
                if cij[k]:
                    delta[j * n + i][k] += cij[k]
    counit = Matrix(E.ring, [list(E.unit)], 1, n)
    return CoalgebraTrunc(E.ring, n, Matrix(E.ring, delta, n * n, n), counit)


class Coaction:
    """rho: V -> A (x) V for the canonical coaction at a vertex."""

    __slots__ = ("coalgebra", "vertex", "module", "rho")

    def __init__(self, coalgebra, vertex, module, rho):
        self.coalgebra = coalgebra
        self.vertex = vertex
        self.module = module
        self.rho = rho


def coaction(rep, sub, v, E=None, A=None) -> Coaction:
    """Canonical coaction rho(x) = sum_i e_i* (x) (e_i . x) at vertex v."""
    if E is None:
        E = end_algebra(rep, sub)
    if A is None:
        A = dual_coalgebra(E)
    if v not in sub.vertices:
        raise InputError("vertex %r is not in the subdiagram" % (v,))
    r = rep.rank(v)
    n = E.dim
    rho = [[0] * r for _ in range(n * r)]
    for i in range(n):
        comp = E.component(i, v)
        for a in range(r):
            for b in range(r):
                if comp[a, b]:
                    rho[i * r + a][b] += comp[a, b]
    return Coaction(A, v, rep.module(v), Matrix(rep.ring, rho, n * r, r))


def check_coaction_axioms(co: Coaction):
    """(coassociativity, counit) as exact matrix identities."""
    A = co.coalgebra
    r = co.rho.cols
    eye_v = Matrix.identity(A.ring, r)
    left = A.delta.kron(eye_v) * co.rho
    right = Matrix.identity(A.ring, A.rank).kron(co.rho) * co.rho
    coassoc = left == right
    counit = (A.counit.kron(eye_v) * co.rho) == eye_v
    return coassoc, counit


class TransitionMap:
    """Coalgebra morphism A_F -> A_F' dual to restriction of families."""

    __slots__ = ("source", "target", "matrix", "restriction")

    def __init__(self, source, target, matrix, restriction):
        self.source = source
        self.target = target
        self.matrix = matrix
        self.restriction = restriction

    def apply(self, coords):
        return self.matrix.apply(coords)


def transition_map(rep, EF: EndAlgebra, EG: EndAlgebra,
                   AF=None, AG=None, check=True) -> TransitionMap:
    """Transition A_F -> A_G for subdiagrams F <= G.

    Computed as the transpose of the restriction End(T|_G) -> End(T|_F);
    verified to be a coalgebra morphism and to intertwine the canonical
    coactions at every vertex of F.
    """
    if not EF.sub.is_subset_of(EG.sub):
        raise InputError("transition requires nested subdiagrams")
    if AF is None:
        AF = dual_coalgebra(EF)
    if AG is None:
        AG = dual_coalgebra(EG)
    cols = []
    for i in range(EG.dim):
        flat = []
        col = EG.basis.col(i)
        for v in EF.order:
            r = rep.rank(v)
            off = EG.offsets[v]
            flat.extend(col[off:off + r * r])
        coords = EF.coordinates(tuple(flat))
        if coords is None:
            raise AxiomViolation("restricted family escapes the smaller algebra")
        cols.append(coords)
    restriction = Matrix.from_columns(rep.ring, cols, rows=EF.dim)
    t = restriction.transpose()
    tm = TransitionMap(AF, AG, t, restriction)
    if check:
        # coalgebra morphism: Delta' t = (t (x) t) Delta ; eps' t = eps
        if AG.delta * t != t.kron(t) * AF.delta:
            raise AxiomViolation("transition fails comultiplication compatibility")
        if AG.counit * t != AF.counit:
            raise AxiomViolation("transition fails counit compatibility")
        for v in EF.order:
            r = rep.rank(v)
            rho_f = coaction(rep, EF.sub, v, EF, AF).rho
            rho_g = coaction(rep, EG.sub, v, EG, AG).rho
            if t.kron(Matrix.identity(rep.ring, r)) * rho_f != rho_g:
                raise AxiomViolation("transition fails coaction compatibility at %r" % (v,))
    return tm


class FactorizationCert:
    __slots__ = ("violations", "checked")

    def __init__(self, violations, checked):
        self.violations = tuple(violations)
        self.checked = checked

    @property
    def ok(self):
        return not self.violations

    def as_dict(self):
        return {"ok": self.ok, "checked": self.checked,
                "violations": list(self.violations)}


def factorization_check(rep, sub, E=None) -> FactorizationCert:
    """Certificate that the representation factors through comodules.

    (i) comodule axioms for every canonical coaction, (ii) every edge map is
    a comodule morphism, (iii) forgetting coactions returns the original
    modules.
    """
    if E is None:
        E = end_algebra(rep, sub)
    A = dual_coalgebra(E)
    violations = []
    checked = 0
    coactions = {}
    for v in sub.vertices:
        co = coaction(rep, sub, v, E, A)
        coactions[v] = co
        coassoc, counit = check_coaction_axioms(co)
        checked += 2
        if not coassoc:
            violations.append("coassociativity fails at vertex %r" % (v,))
        if not counit:
            violations.append("counit fails at vertex %r" % (v,))
        if co.module != rep.module(v):
            violations.append("underlying module changed at %r" % (v,))
        checked += 1
    for (name, src, dst, _kind) in sub.edges:
        m = rep.edge_map(name).matrix
        lhs = coactions[dst].rho * m
        rhs = Matrix.identity(rep.ring, A.rank).kron(m) * coactions[src].rho
        checked += 1
        if lhs != rhs:
            violations.append("edge %r is not a comodule morphism" % (name,))
    return FactorizationCert(violations, checked)
