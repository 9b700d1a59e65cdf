"""Shared pairs-diagram context for the bialgebra/comodule tests.

Mirrors the bundled corpus: the unit point vertex u, the circle-with-point
vertex g, their pairwise products, a triple-edge pair, a double-cover edge
and a rank-2 marked-circle vertex p2 with its self-product.
"""

from tannakit.bialgebra import PairsContext
from tannakit.simplicial import SimplicialMap, SimplicialPair, product_pair
from tannakit.tannaka import Subdiagram, build_pairs_diagram

from spaces import CIRCLE3, CIRCLE6, CIRCLE_POINT, EDGE, EDGE_ENDS, POINT, pair, sub


def build_context(ring):
    pu = pair(POINT)
    pg = CIRCLE_POINT
    p_uu = product_pair(pu, pu)
    p_ug = product_pair(pu, pg)
    p_gu = product_pair(pg, pu)
    p_gg = product_pair(pg, pg)
    p_uuu_l = product_pair(p_uu, pu)
    p_uuu_r = product_pair(pu, p_uu)
    p2 = SimplicialPair(CIRCLE3, sub(CIRCLE3, ("a",), ("b",)))
    p22 = product_pair(p2, p2)
    pt_pair = SimplicialPair(EDGE, EDGE_ENDS)
    pw_pair = SimplicialPair(EDGE_ENDS, sub(EDGE_ENDS, ("a",)))
    hexp = pair(CIRCLE6)
    circp = pair(CIRCLE3)

    vertices = {
        "u": (pu, 0),
        "g": (pg, 1),
        "uu": (p_uu, 0),
        "ug": (p_ug, 1),
        "gu": (p_gu, 1),
        "gg": (p_gg, 2),
        "uuul": (p_uuu_l, 0),
        "uuur": (p_uuu_r, 0),
        "p2": (p2, 1),
        "p22": (p22, 2),
        "t": (pt_pair, 1),
        "w": (pw_pair, 0),
        "hex": (hexp, 1),
        "circ": (circp, 1),
    }

    proj_ug = SimplicialMap(p_ug.X, pg.X, {v: v[1] for v in p_ug.X.vertices})
    proj_gu = SimplicialMap(p_gu.X, pg.X, {v: v[0] for v in p_gu.X.vertices})
    proj_uu = SimplicialMap(p_uu.X, pu.X, {v: v[0] for v in p_uu.X.vertices})
    swap_gg = SimplicialMap(p_gg.X, p_gg.X, {v: (v[1], v[0]) for v in p_gg.X.vertices})
    incl_g_p2 = SimplicialMap(CIRCLE3, CIRCLE3, {v: v for v in CIRCLE3.vertices})
    wrap = SimplicialMap(CIRCLE6, CIRCLE3,
                         {"p": "a", "q": "b", "r": "c",
                          "s": "a", "t": "b", "u": "c"})
    assoc_uuu = SimplicialMap(p_uuu_l.X, p_uuu_r.X,
                              {v: (v[0][0], (v[0][1], v[1]))
                               for v in p_uuu_l.X.vertices})

    map_edges = [
        ("proj_ug", "ug", "g", proj_ug),
        ("proj_gu", "gu", "g", proj_gu),
        ("proj_uu", "uu", "u", proj_uu),
        ("swap_gg", "gg", "gg", swap_gg),
        ("incl_g_p2", "g", "p2", incl_g_p2),
        ("wrap", "hex", "circ", wrap),
        ("assoc_uuu", "uuul", "uuur", assoc_uuu),
    ]
    triple_edges = [("bnd_t", "t", "w")]

    dia, rep = build_pairs_diagram(ring, vertices, map_edges, triple_edges)
    products = {
        ("u", "u"): "uu",
        ("u", "g"): "ug",
        ("g", "u"): "gu",
        ("g", "g"): "gg",
        ("uu", "u"): "uuul",
        ("u", "uu"): "uuur",
        ("p2", "p2"): "p22",
    }
    ctx = PairsContext(dia, rep, products, circle="g")
    tower = [
        Subdiagram(dia, ["u"], name="F0"),
        Subdiagram(dia, ["u", "g"], name="F1"),
        Subdiagram(dia, ["u", "g", "uu", "ug", "gu", "gg"], name="F2"),
    ]
    return ctx, tower
