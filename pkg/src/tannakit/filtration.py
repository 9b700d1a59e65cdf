"""Very good pairs and filtrations, filtration complexes, their comparison
with homology, pushforward/product constructions and the refinement search.

"Dimension" of a subcomplex means its maximal simplex dimension, and the
smoothness clause of the geometric definition of (very) good pairs is not
modeled; the predicate tests only the dimension bounds and the homological
condition.  A pair (X, Z, n) with X != Z is very good when dim X = n,
dim Z <= n-1 and h_*(X, Z; Z) is free and supported precisely in degree n
(in particular nonzero there); with X = Z it is very good when dim X < n.
"""

from itertools import combinations

from .errors import (
    BudgetExceeded, InvalidFiltration, InvalidPair, TorsionTerm,
)
from .linalg import FgModule, Matrix, ModuleMap, ZZ, subquotient
from .simplicial import (
    SimplicialComplex, SimplicialMap, SimplicialPair, _shuffle_sign,
    induced_map_on_homology, pair_homology, product_complex,
    relative_homology, triple_boundary,
)


class Filtration:
    """Increasing chain of subcomplexes F_0 <= ... <= F_n = X with
    dim F_i <= i; F_{-1} is the empty complex."""

    __slots__ = ("X", "levels")

    def __init__(self, X, levels):
        levels = tuple(levels)
        if not levels:
            raise InvalidFiltration("a filtration needs at least one level")
        if levels[-1] != X:
            raise InvalidFiltration("top level must equal the whole complex")
        prev = SimplicialComplex.empty()
        for i, F in enumerate(levels):
            if not prev.is_subcomplex_of(F):
                raise InvalidFiltration("levels are not nested at index %d" % i)
            if F.dim > i:
                raise InvalidFiltration("dim F_%d = %d exceeds %d" % (i, F.dim, i))
            if not F.is_subcomplex_of(X):
                raise InvalidFiltration("level %d is not a subcomplex of X" % i)
            prev = F
        self.X = X
        self.levels = levels

    @property
    def length(self):
        return len(self.levels) - 1

    def level(self, i):
        if i < 0:
            return SimplicialComplex.empty()
        if i >= len(self.levels):
            return self.levels[-1]
        return self.levels[i]

    def __eq__(self, other):
        return (isinstance(other, Filtration) and self.X == other.X
                and self.levels == other.levels)

    def __hash__(self):
        return hash((self.X, self.levels))

    def __repr__(self):
        return "Filtration(length %d on %r)" % (self.length, self.X)


class PairGoodness:
    __slots__ = ("ok", "reasons", "homology")

    def __init__(self, ok, reasons, homology):
        self.ok = ok
        self.reasons = tuple(reasons)
        self.homology = homology

    def as_dict(self):
        return {"ok": self.ok, "reasons": list(self.reasons),
                "homology": {str(n): m.describe() for n, m in sorted(self.homology.items())}}


class VeryGoodReport:
    __slots__ = ("levels", "ok")

    def __init__(self, levels):
        self.levels = tuple(levels)
        self.ok = all(l.ok for l in levels)

    def as_dict(self):
        return {"ok": self.ok, "levels": [l.as_dict() for l in self.levels]}


def is_very_good_pair(X, Z, n):
    """(flag, PairGoodness) for the simplicial surrogate of a very good pair."""
    if not Z.is_subcomplex_of(X):
        raise InvalidPair("Z is not a subcomplex of X")
    reasons = []
    table = {}
    if X == Z:
        if X.dim < n:
            return True, PairGoodness(True, [], {})
        reasons.append("X = Z but dim X = %d is not < %d" % (X.dim, n))
        return False, PairGoodness(False, reasons, {})
    if X.dim != n:
        reasons.append("dim X = %d differs from %d" % (X.dim, n))
    if Z.dim > n - 1:
        reasons.append("dim Z = %d exceeds %d" % (Z.dim, n - 1))
    ph = pair_homology(SimplicialPair(X, Z), ZZ)
    for d in range(0, X.dim + 1):
        m = ph.module(d)
        table[d] = m
        if d != n and not m.is_zero():
            reasons.append("h_%d nonzero: %s" % (d, m.describe()))
        if d == n:
            if m.torsion:
                reasons.append("h_%d has torsion: %s" % (d, m.describe()))
            if m.is_zero():
                reasons.append("h_%d vanishes" % d)
    return not reasons, PairGoodness(not reasons, reasons, table)


def very_good_report(F: Filtration) -> VeryGoodReport:
    out = []
    for i in range(0, F.length + 1):
        _, detail = is_very_good_pair(F.level(i), F.level(i - 1), i)
        out.append(detail)
    return VeryGoodReport(out)


class ModuleComplex:
    """Complex of f.g. modules with decreasing ModuleMap differentials."""

    __slots__ = ("ring", "terms", "maps")

    def __init__(self, ring, terms, maps, check=True):
        self.ring = ring
        self.terms = dict(terms)
        self.maps = dict(maps)
        if check:
            for d, m in self.maps.items():
                if m.source != self.term(d) or m.target != self.term(d - 1):
                    raise ValueError("differential %d does not match terms" % d)
            for d in list(self.maps):
                if d - 1 in self.maps:
                    if not self.maps[d - 1].compose(self.maps[d]).is_zero_map():
                        raise AssertionError("module complex: d o d != 0 at %d" % d)

    def term(self, d) -> FgModule:
        return self.terms.get(d, FgModule.zero(self.ring))

    def differential(self, d) -> ModuleMap:
        m = self.maps.get(d)
        if m is None:
            m = ModuleMap.zero(self.term(d), self.term(d - 1))
        return m

    @property
    def top_degree(self):
        return max(self.terms) if self.terms else -1

    def homology(self, d) -> FgModule:
        return subquotient(self.differential(d + 1), self.differential(d)).module


def filtration_complex(F: Filtration, ring=ZZ, require_free=False) -> ModuleComplex:
    """Terms h_i(F_i, F_{i-1}); differentials the triple boundaries."""
    terms = {}
    for i in range(0, F.length + 1):
        m = relative_homology(SimplicialPair(F.level(i), F.level(i - 1)), i, ring)
        if require_free and m.torsion:
            raise TorsionTerm("h_%d(F_%d, F_%d) = %s has torsion" % (i, i, i - 1, m.describe()))
        terms[i] = m
    maps = {}
    for i in range(1, F.length + 1):
        maps[i] = triple_boundary(F.level(i), F.level(i - 1), F.level(i - 2), i, ring)
    return ModuleComplex(ring, terms, maps)


class FiltrationComparison:
    __slots__ = ("ring", "advisory", "rows", "ok")

    def __init__(self, ring, advisory, rows):
        self.ring = ring
        self.advisory = advisory
        self.rows = rows
        self.ok = all(r["match"] for r in rows)

    def as_dict(self):
        return {"ring": self.ring, "ok": self.ok, "advisory": self.advisory,
                "degrees": self.rows}


def compare_filtration_homology(F: Filtration, ring=ZZ) -> FiltrationComparison:
    """Degreewise comparison of h(filtration complex) with h(X)."""
    mc = filtration_complex(F, ring)
    advisory = None
    if not very_good_report(F).ok:
        advisory = "filtration is not very good; comparison is advisory"
    rows = []
    top = max(F.length, F.X.dim)
    px = SimplicialPair(F.X)
    for d in range(0, top + 1):
        a = mc.homology(d)
        b = relative_homology(px, d, ring)
        rows.append({"degree": d, "filtration": a.describe(),
                     "homology": b.describe(), "match": a == b})
    return FiltrationComparison(ring, advisory, rows)


class ModuleComplexMap:
    """Degreewise ModuleMaps commuting with the differentials."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components, check=True):
        self.source = source
        self.target = target
        self.components = dict(components)
        if check:
            degs = set(source.terms) | set(target.terms)
            for d in degs:
                left = self.target.differential(d).compose(self.component(d))
                right = self.component(d - 1).compose(self.source.differential(d))
                if left != right:
                    raise AssertionError("module complex map fails at degree %d" % d)

    def component(self, d) -> ModuleMap:
        m = self.components.get(d)
        if m is None:
            m = ModuleMap.zero(self.source.term(d), self.target.term(d))
        return m


def pushforward_filtration(f: SimplicialMap, F: Filtration, ring=ZZ):
    """Image filtration on the target, with the induced map of complexes.

    Levels are the literal image subcomplexes below dim Y and the whole of Y
    from dim Y on (simplicial images are closed, replacing Zariski closure).
    """
    Y = f.target
    m = max(Y.dim, 0)
    levels = []
    for i in range(0, m + 1):
        if i < m:
            levels.append(f.image(F.level(i)))
        else:
            levels.append(Y)
    G = Filtration(Y, levels)
    src = filtration_complex(F, ring)
    tgt = filtration_complex(G, ring)
    comps = {}
    top = max(F.length, G.length)
    for i in range(0, top + 1):
        s = src.term(i)
        t = tgt.term(i)
        if s.is_zero() or t.is_zero():
            comps[i] = ModuleMap.zero(s, t)
            continue
        fi = f.restrict(F.level(i))
        comps[i] = induced_map_on_homology(
            fi, SimplicialPair(F.level(i), F.level(i - 1)),
            SimplicialPair(G.level(i), G.level(i - 1)), i, ring)
    return G, ModuleComplexMap(src, tgt, comps)


def _tensor_module_complex(a: ModuleComplex, b: ModuleComplex):
    """Tensor of complexes of free modules; kron ordering of generators."""
    ring = a.ring
    for mc in (a, b):
        for d, t in mc.terms.items():
            if t.torsion:
                raise TorsionTerm(
                    "Kunneth construction needs free terms; degree %d is %s"
                    % (d, t.describe()))
    terms = {}
    top = a.top_degree + b.top_degree
    pieces = {}
    for n in range(0, top + 1):
        parts = []
        for p in range(0, n + 1):
            q = n - p
            tp, tq = a.term(p), b.term(q)
            if tp.is_zero() or tq.is_zero():
                continue
            parts.append((p, q, tp.tensor(tq)))
        pieces[n] = parts
        if parts:
            total = parts[0][2]
            for _, _, m in parts[1:]:
                total = total.direct_sum(m)
            terms[n] = total
    maps = {}
    for n in range(1, top + 1):
        src = terms.get(n, FgModule.zero(ring))
        tgt = terms.get(n - 1, FgModule.zero(ring))
        if src.is_zero() or tgt.is_zero():
            continue
        # build block matrix over the direct-sum decompositions
        src_parts = pieces[n]
        tgt_parts = pieces[n - 1]
        tgt_offsets = {}
        off = 0
        for p, q, m in tgt_parts:
            tgt_offsets[(p, q)] = off
            off += m.ngens
        data = [[0] * src.ngens for _ in range(tgt.ngens)]
        col_off = 0
        for p, q, m in src_parts:
            da = a.differential(p)
            db = b.differential(q)
            if p > 0 and not da.target.is_zero():
                block = da.matrix.kron(Matrix.identity(ring, b.term(q).ngens))
                row_off = tgt_offsets.get((p - 1, q))
                if row_off is not None:
                    for i in range(block.rows):
                        for j in range(block.cols):
                            if block[i, j]:
                                data[row_off + i][col_off + j] += block[i, j]
            if q > 0 and not db.target.is_zero():
                sign = (-1) ** p
                block = Matrix.identity(ring, a.term(p).ngens).kron(db.matrix)
                row_off = tgt_offsets.get((p, q - 1))
                if row_off is not None:
                    for i in range(block.rows):
                        for j in range(block.cols):
                            if block[i, j]:
                                data[row_off + i][col_off + j] += sign * block[i, j]
            col_off += m.ngens
        maps[n] = ModuleMap(src, tgt, Matrix(ring, data, tgt.ngens, src.ngens))
    return ModuleComplex(ring, terms, maps), pieces


def product_filtration(F: Filtration, G: Filtration, ring=ZZ):
    """(F x G)_i = union of F_p x G_q over p+q = i, with the Kunneth map.

    Returns (filtration, source tensor complex, kunneth ModuleComplexMap).
    """
    n, m = F.length, G.length
    levels = []
    for i in range(0, n + m + 1):
        lvl = SimplicialComplex.empty()
        for p in range(0, i + 1):
            q = i - p
            piece = product_complex(F.level(p), G.level(q))
            lvl = lvl.union(piece)
        levels.append(lvl)
    XY = product_complex(F.X, G.X)
    if levels[-1] != XY:
        raise InvalidFiltration("product filtration fails to exhaust the product")
    FG = Filtration(XY, levels)

    ca = filtration_complex(F, ring)
    cb = filtration_complex(G, ring)
    (tensor, pieces) = _tensor_module_complex(ca, cb)
    target = filtration_complex(FG, ring)

    pa = {i: pair_homology(SimplicialPair(F.level(i), F.level(i - 1)), ring)
          for i in range(0, n + 1)}
    pb = {i: pair_homology(SimplicialPair(G.level(i), G.level(i - 1)), ring)
          for i in range(0, m + 1)}
    pfg = {i: pair_homology(SimplicialPair(FG.level(i), FG.level(i - 1)), ring)
           for i in range(0, n + m + 1)}

    comps = {}
    for i in range(0, n + m + 1):
        src = tensor.term(i)
        tgt = target.term(i)
        if src.is_zero() or tgt.is_zero():
            comps[i] = ModuleMap.zero(src, tgt)
            continue
        cols = []
        for p, q, mod in pieces[i]:
            ha, hb = pa[p], pb[q]
            hc = pfg[i]
            ca_n = ha.complex
            cb_n = hb.complex
            cc_n = hc.complex
            na, nb = ha.module(p).ngens, hb.module(q).ngens
            for ja in range(na):
                za = ha.lift(p, ja)
                for jb in range(nb):
                    zb = hb.lift(q, jb)
                    # EZ of the pair of cycles, read inside the product level
                    vec = [0] * cc_n.rank(i)
                    for ia, sa in enumerate(ca_n.labels(p)):
                        if za[ia] == 0:
                            continue
                        for ib, sb in enumerate(cb_n.labels(q)):
                            if zb[ib] == 0:
                                continue
                            coeff = za[ia] * zb[ib]
                            for positions in combinations(range(i), p):
                                sign = _shuffle_sign(positions, i)
                                path = [(sa[0], sb[0])]
                                x = y = 0
                                for step in range(i):
                                    if step in positions:
                                        x += 1
                                    else:
                                        y += 1
                                    path.append((sa[x], sb[y]))
                                r = cc_n.index(i, tuple(path))
                                if r is not None:
                                    vec[r] += sign * coeff
                    cols.append(hc.class_of(i, tuple(vec)))
        comps[i] = ModuleMap(src, tgt,
                             Matrix.from_columns(ring, cols, rows=tgt.ngens))
    kmap = ModuleComplexMap(tensor, target, comps)
    return FG, tensor, kmap


# ---------------------------------------------------------------------------
# Refinement search
# ---------------------------------------------------------------------------

class SearchReport:
    __slots__ = ("found", "tested", "budget", "reason")

    def __init__(self, found, tested, budget, reason):
        self.found = found
        self.tested = tested
        self.budget = budget
        self.reason = reason

    def as_dict(self):
        return {"found": self.found is not None, "tested": self.tested,
                "budget": self.budget, "reason": self.reason}


def _candidate_subcomplexes(X, base, max_dim):
    """Face-closed candidates base <= Z <= X with dim Z <= max_dim, in
    (added simplex count, lexicographic) order."""
    baseset = base.all_simplices()
    pool = sorted((s for s in X.all_simplices()
                   if len(s) - 1 <= max_dim and s not in baseset),
                  key=lambda s: (len(s), s))
    for size in range(0, len(pool) + 1):
        for extra in combinations(pool, size):
            chosen = baseset | set(extra)
            closed = True
            for s in extra:
                if len(s) > 1:
                    for t in range(len(s)):
                        if s[:t] + s[t + 1:] not in chosen:
                            closed = False
                            break
                if not closed:
                    break
            if closed:
                yield SimplicialComplex((), chosen)


def find_very_good_refinement(X, F: Filtration, budget=10000):
    """First very good filtration containing F levelwise, in canonical order.

    Mirrors the inductive construction: refine the top level by searching a
    very good (X, Z, n), then recurse on Z with the lower levels.  Candidates
    are enumerated by increasing simplex count with lexicographic tie-break;
    `budget` caps the number of very-good-pair tests.  Returns
    (filtration_or_None, SearchReport); raises BudgetExceeded when the cap is
    hit before the candidates are exhausted.
    """
    if F.X != X:
        raise InvalidFiltration("filtration does not live on X")
    state = {"tested": 0}

    ok = very_good_report(F)
    if ok.ok:
        return F, SearchReport(F, 0, budget, "already very good")

    def recurse(current_x, required, n):
        # build levels G_0..G_n with G_n = current_x, G_i >= required[i]
        if n == 0:
            flag, _ = check(current_x, SimplicialComplex.empty(), 0)
            return [current_x] if flag else None
        if current_x.dim < n:
            lower = recurse(current_x, required[:n - 1], n - 1)
            if lower is None:
                return None
            return lower + [current_x]
        base = required[n - 1] if n - 1 < len(required) else SimplicialComplex.empty()
        for Z in _candidate_subcomplexes(current_x, base, n - 1):
            flag, _ = check(current_x, Z, n)
            if not flag:
                continue
            lower = recurse(Z, required[:n - 1], n - 1)
            if lower is not None:
                return lower + [current_x]
        return None

    def check(x, z, n):
        if state["tested"] >= budget:
            raise BudgetExceeded(
                "refinement budget of %d candidate tests exhausted" % budget,
                report=SearchReport(None, state["tested"], budget, "budget"))
        state["tested"] += 1
        return is_very_good_pair(x, z, n)

    n = F.length
    levels = recurse(X, list(F.levels[:-1]), n)
    if levels is None:
        return None, SearchReport(None, state["tested"], budget, "exhausted")
    G = Filtration(X, levels)
    if not very_good_report(G).ok:
        raise AssertionError("search returned a non very good filtration")
    return G, SearchReport(G, state["tested"], budget, "found")
