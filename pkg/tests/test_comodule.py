import pytest

from tannakit.comodule import (
    Comodule, canonical_embedding, check_comodule_axioms, extended_comodule,
    is_comodule_morphism, tensor_comodules, torsionfree_cover,
)
from tannakit.errors import DimensionMismatch
from tannakit.linalg import QQ, ZZ, FgModule, Matrix
from tannakit.tannaka import CoalgebraTrunc, Subdiagram, coaction, dual_coalgebra

from tannaka_fixtures import build_context


def trivial_coalgebra(ring=ZZ):
    return CoalgebraTrunc(ring, 1, Matrix(ring, [[1]]), Matrix(ring, [[1]]))


def matrix_coalgebra(ring=QQ):
    # rank-4 dual of the 2x2 matrix algebra, built through the machinery
    from tannakit.tannaka import Diagram, DiagramRep, end_algebra
    dia = Diagram(["v"], [])
    rep = DiagramRep(dia, ring, {"v": FgModule.free(ring, 2)}, {})
    E = end_algebra(rep, Subdiagram(dia, ["v"]))
    return E, dual_coalgebra(E), rep, dia


class TestAxioms:
    def test_trivial(self):
        C = trivial_coalgebra()
        m = Comodule(C, (0,), Matrix(ZZ, [[1]]))
        assert check_comodule_axioms(m).ok

    def test_matrix_coalgebra_coaction(self):
        E, A, rep, dia = matrix_coalgebra()
        co = coaction(rep, Subdiagram(dia, ["v"]), "v", E, A)
        m = Comodule(A, (0, 0), co.rho)
        assert check_comodule_axioms(m).ok

    def test_scaled_rho_fails_counit(self):
        C = trivial_coalgebra()
        m = Comodule(C, (0,), Matrix(ZZ, [[2]]))
        cert = check_comodule_axioms(m)
        assert not cert.ok
        assert any("counit" in f for f in cert.failures)

    def test_dimension_guard(self):
        C = trivial_coalgebra()
        with pytest.raises(DimensionMismatch):
            Comodule(C, (0, 0), Matrix(ZZ, [[1]]))

    def test_torsion_comodule(self):
        # Z/2 with the trivial coaction over the trivial coalgebra
        C = trivial_coalgebra()
        m = Comodule(C, (2,), Matrix(ZZ, [[1]]))
        assert check_comodule_axioms(m).ok
        assert m.module == FgModule(ZZ, 0, (2,))


class TestExtended:
    def test_unit_module(self):
        C = trivial_coalgebra()
        ext = extended_comodule(C, FgModule.free(ZZ, 1))
        assert ext.rho == Matrix(ZZ, [[1]])

    def test_rank_two_over_matrix_coalgebra(self):
        E, A, rep, dia = matrix_coalgebra()
        ext = extended_comodule(A, FgModule.free(QQ, 2))
        assert ext.ngens == 8
        assert check_comodule_axioms(ext).ok

    def test_canonical_embedding_injective(self):
        E, A, rep, dia = matrix_coalgebra()
        co = coaction(rep, Subdiagram(dia, ["v"]), "v", E, A)
        m = Comodule(A, (0, 0), co.rho)
        ext, rho = canonical_embedding(m)
        assert is_comodule_morphism(m, ext, rho)
        from tannakit.comodule import presented_kernel_is_zero
        assert presented_kernel_is_zero(
            rho.to_ring(ZZ) if rho.ring == ZZ else rho,
            [0] * m.ngens, [0] * ext.ngens, ring=rho.ring)


class TestTorsionfreeCover:
    def test_z2_trivial_coaction(self):
        C = trivial_coalgebra()
        m = Comodule(C, (2,), Matrix(ZZ, [[1]]))
        cover = torsionfree_cover(C, m)
        assert cover.cover.module == FgModule(ZZ, 1)
        # surjection is reduction mod 2: a 1x1 odd matrix
        assert abs(cover.surjection[0, 0]) % 2 == 1

    def test_torsionfree_input_keeps_rank(self):
        C = trivial_coalgebra()
        m = Comodule(C, (0,), Matrix(ZZ, [[1]]))
        cover = torsionfree_cover(C, m)
        assert cover.cover.module == FgModule(ZZ, 1)

    def test_zero_module(self):
        C = trivial_coalgebra()
        m = Comodule(C, (), Matrix.zeros(ZZ, 0, 0))
        cover = torsionfree_cover(C, m)
        assert cover.cover.module.is_zero()

    def test_mixed_module(self):
        # Z (+) Z/2 with trivial coaction
        C = trivial_coalgebra()
        m = Comodule(C, (2, 0), Matrix.identity(ZZ, 2))
        cover = torsionfree_cover(C, m)
        assert cover.cover.module == FgModule(ZZ, 2)
        assert check_comodule_axioms(cover.cover).ok


@pytest.fixture(scope="module")
def ctxq():
    return build_context(QQ)


class TestTensor:
    def test_circle_square_coefficient(self, ctxq):
        ctx, tower = ctxq
        from tannakit.bialgebra import product_on_truncations, sigma_element
        F1, F2 = tower[1], tower[2]
        mu = product_on_truncations(ctx, F1, F1, F2)
        E1 = ctx.end(F1)
        A1 = ctx.coalgebra(F1)
        co_g = coaction(ctx.rep, F1, "g", E1, A1)
        m = Comodule(A1, (0,), co_g.rho)
        t = tensor_comodules(m, m, mu)
        assert t.ngens == 1
        assert check_comodule_axioms(t).ok
        sig = sigma_element(ctx, F1)
        expected = mu.apply(sig.coords, sig.coords)
        got = tuple(t.rho[i, 0] for i in range(t.rho.rows))
        assert got == tuple(expected)

    def test_unit_tensor_identity(self, ctxq):
        ctx, tower = ctxq
        from tannakit.bialgebra import product_on_truncations
        from tannakit.tannaka import transition_map
        dia = ctx.diagram
        U = Subdiagram(dia, ["u"])
        F1, F2 = tower[1], tower[2]
        mu = product_on_truncations(ctx, U, F1, F2)
        EU, AU = ctx.end(U), ctx.coalgebra(U)
        unit_com = Comodule(AU, (0,), coaction(ctx.rep, U, "u", EU, AU).rho)
        E1, A1 = ctx.end(F1), ctx.coalgebra(F1)
        m = Comodule(A1, (0,), coaction(ctx.rep, F1, "g", E1, A1).rho)
        t = tensor_comodules(unit_com, m, mu)
        # unit (x) M = M pushed along the transition A_F1 -> A_F2
        tr = transition_map(ctx.rep, E1, ctx.end(F2), A1, ctx.coalgebra(F2))
        pushed = tr.matrix.kron(Matrix.identity(QQ, 1)) * m.rho
        assert t.rho == pushed

    def test_rank_one_composition(self):
        # two trivial rank-1 comodules over the trivial bialgebra fragment
        from tannakit.bialgebra import MuFragment
        from tannakit.tannaka import Diagram, DiagramRep, end_algebra
        dia = Diagram(["v"], [])
        rep = DiagramRep(dia, ZZ, {"v": FgModule.free(ZZ, 1)}, {})
        E = end_algebra(rep, Subdiagram(dia, ["v"]))
        mu = MuFragment(E, E, E, Matrix(ZZ, [[1]]))
        C = dual_coalgebra(E)
        m = Comodule(C, (0,), Matrix(ZZ, [[1]]))
        t = tensor_comodules(m, m, mu)
        assert t.rho == Matrix(ZZ, [[1]])

    def test_associativity_where_products_exist(self):
        # with the self-product fragment (rank-1 host) the two bracketings
        # of a triple tensor agree on the nose
        from tannakit.bialgebra import MuFragment
        from tannakit.tannaka import Diagram, DiagramRep, end_algebra
        dia = Diagram(["v"], [])
        rep = DiagramRep(dia, ZZ, {"v": FgModule.free(ZZ, 2)}, {})
        E = end_algebra(rep, Subdiagram(dia, ["v"]))
        C = dual_coalgebra(E)
        # mu: the dual of the diagonal algebra map End -> End (x) End given
        # by phi -> phi (x) 1 does not exist canonically here, so use the
        # rank-1 sub-fragment scenario instead: a trivial coalgebra
        triv = trivial_coalgebra()
        from tannakit.tannaka import Diagram as D2, DiagramRep as R2
        d2 = D2(["w"], [])
        r2 = R2(d2, ZZ, {"w": FgModule.free(ZZ, 1)}, {})
        E2 = end_algebra(r2, Subdiagram(d2, ["w"]))
        mu = MuFragment(E2, E2, E2, Matrix(ZZ, [[1]]))
        C2 = dual_coalgebra(E2)
        a = Comodule(C2, (0, 0), Matrix(ZZ, [[1, 0], [0, 1]]))
        b = Comodule(C2, (0,), Matrix(ZZ, [[1]]))
        left = tensor_comodules(tensor_comodules(a, b, mu), b, mu)
        right = tensor_comodules(a, tensor_comodules(b, b, mu), mu)
        assert left.rho == right.rho
        assert left.gen_orders == right.gen_orders
