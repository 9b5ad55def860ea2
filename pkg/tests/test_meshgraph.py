import math
import random
from fractions import Fraction

import pytest

from cone_surgeon.codes import CssCode, four_two_two, steane
from cone_surgeon.f2core import F2Matrix, F2Vector
from cone_surgeon.meshgraph import (
    CertificationError,
    Graph,
    MeasurementGraph,
    augment_expander,
    build_measurement_graph,
    certify_expansion,
    cheeger_exact,
    cheeger_spectral_lb,
    to_dot,
    to_edgelist_text,
    verify_measurement_graph,
)


def G(n, es):
    return Graph(tuple(range(n)), tuple(es))


def path(n):
    return G(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return G(n, [(i, (i + 1) % n) for i in range(n)])


def random_graph(rng, n):
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    return G(n, rng.sample(pairs, min(len(pairs), rng.randrange(n, 2 * n))))


def empty_mg(n):
    g = G(n, [])
    return MeasurementGraph(g, {i: i for i in range(n)}, (), ("exact", Fraction(0)))


# -------------------------------------------------------------------- graphs


def test_graph_validation():
    with pytest.raises(ValueError, match="self-loop"):
        G(2, [(0, 0)])
    with pytest.raises(ValueError, match="unknown endpoint"):
        G(2, [(0, 2)])
    with pytest.raises(ValueError, match="duplicate"):
        Graph((0, 0), ())
    with pytest.raises(ValueError, match="pair"):
        Graph((0, 1, 2), ((0, 1, 2),))


def test_graph_multi_edges_and_degrees():
    g = G(3, [(0, 1), (0, 1), (1, 2)])
    assert g.degrees() == {0: 2, 1: 3, 2: 1}
    assert g.degree(1) == 3
    assert g.max_degree() == 3


def test_graph_connectivity():
    assert path(4).is_connected()
    assert not G(4, [(0, 1), (2, 3)]).is_connected()
    assert not G(2, []).is_connected()
    assert G(1, []).is_connected()


def test_measurement_graph_validation():
    g = G(2, [(0, 1)])
    with pytest.raises(ValueError, match="keys"):
        MeasurementGraph(g, {0: 0}, (0,), ("exact", 1))
    with pytest.raises(ValueError, match="injective"):
        MeasurementGraph(g, {0: 5, 1: 5}, (0,), ("exact", 1))
    with pytest.raises(ValueError, match="length"):
        MeasurementGraph(g, {0: 0, 1: 1}, (), ("exact", 1))


# ------------------------------------------------------------------- cheeger


def test_cheeger_exact_oracles():
    assert cheeger_exact(G(2, [(0, 1)])) == 1
    assert cheeger_exact(path(4)) == Fraction(1, 2)
    assert cheeger_exact(cycle(4)) == 1
    assert cheeger_exact(G(1, [])) == math.inf
    assert cheeger_exact(G(4, [(0, 1), (2, 3)])) == 0  # disconnected


def test_cheeger_exact_counts_multi_edges():
    assert cheeger_exact(G(2, [(0, 1), (0, 1)])) == 2


def test_cheeger_exact_size_limit():
    with pytest.raises(ValueError, match="spectral"):
        cheeger_exact(G(23, []))
    with pytest.raises(ValueError):
        cheeger_exact(G(0, []))


def test_cheeger_spectral_oracles():
    k4 = G(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    lb = cheeger_spectral_lb(k4)
    assert lb > 0.5
    assert abs(lb - 2 / 3) < 1e-9  # lambda_2 of K4's normalized Laplacian is 4/3
    assert cheeger_spectral_lb(G(4, [(0, 1), (2, 3)])) == 0.0
    assert cheeger_spectral_lb(G(1, [])) == math.inf


def test_spectral_bound_below_exact():
    rng = random.Random(3)
    for _ in range(20):
        g = random_graph(rng, rng.randrange(4, 11))
        assert cheeger_spectral_lb(g) <= float(cheeger_exact(g)) + 1e-9


def test_certify_expansion_dispatch():
    method, value = certify_expansion(path(4))
    assert (method, value) == ("exact", Fraction(1, 2))
    big = G(30, [(i, (i + 1) % 30) for i in range(30)])
    method, value = certify_expansion(big)
    assert method == "spectral"
    assert 0 < value <= float(2 / 15) + 1e-9  # cycle cut beats any spectral bound
    assert certify_expansion(G(30, []))[1] == 0.0


# -------------------------------------------------------------- construction


def test_build_four_two_two():
    code = four_two_two()
    mg = build_measurement_graph(code, F2Vector(4, (0, 1)))
    assert mg.graph.vertices == (0, 1)
    assert mg.graph.edges == ((0, 1),)
    assert mg.f1 == (0,)
    assert mg.f0 == {0: 0, 1: 1}
    assert mg.cheeger_certificate == ("exact", 1)
    assert verify_measurement_graph(mg, code, F2Vector(4, (0, 1)))


def test_build_steane_weight_three():
    code = steane()
    ell = F2Vector(7, (0, 1, 2))
    mg = build_measurement_graph(code, ell)
    assert mg.graph.vertices == (0, 1, 2)
    assert mg.graph.edges == ((1, 2), (0, 2))
    assert mg.f1 == (1, 2)
    assert mg.graph.max_degree() <= code.hz.max_row_weight() * code.hz.max_col_weight()
    assert verify_measurement_graph(mg, code, ell)


def test_build_from_stabilizer_code():
    code = four_two_two().as_stabilizer()
    ell = F2Vector(4, (0, 1))
    mg = build_measurement_graph(code, ell)
    assert mg.graph.edges == ((0, 1),)
    assert mg.f1 == (1,)  # generator order puts the Z check second
    assert verify_measurement_graph(mg, code, ell)


def test_build_disjoint_support_is_edgeless():
    code = CssCode(4, F2Matrix.from_dense([[0, 0, 1, 1]]), F2Matrix.from_dense([[1, 1, 0, 0]]))
    mg = build_measurement_graph(code, F2Vector(4, (0, 1)))
    assert mg.graph.edges == ()
    assert mg.cheeger_certificate == ("exact", 0)


def test_build_rejects_odd_overlap():
    with pytest.raises(ValueError, match="oddly"):
        build_measurement_graph(four_two_two(), F2Vector(4, (0,)))
    with pytest.raises(ValueError):
        build_measurement_graph(four_two_two(), F2Vector(5, (0, 1)))


def test_verify_detects_corruption():
    code = steane()
    ell = F2Vector(7, (0, 1, 2))
    mg = build_measurement_graph(code, ell)
    wrong_check = MeasurementGraph(mg.graph, mg.f0, (1, 0), mg.cheeger_certificate)
    assert not verify_measurement_graph(wrong_check, code, ell)
    dropped = MeasurementGraph(mg.graph, mg.f0, (1, None), mg.cheeger_certificate)
    assert not verify_measurement_graph(dropped, code, ell)
    off_support = MeasurementGraph(
        mg.graph, {0: 0, 1: 1, 2: 3}, mg.f1, mg.cheeger_certificate
    )
    assert not verify_measurement_graph(off_support, code, ell)


# -------------------------------------------------------------- augmentation


def test_augment_already_expanding_unchanged():
    code = four_two_two()
    mg = build_measurement_graph(code, F2Vector(4, (0, 1)))
    out = augment_expander(mg, degree_cap=4, target_h=1, seed=9)
    assert out.graph.edges == mg.graph.edges
    assert out.f1 == mg.f1
    assert out.cheeger_certificate == ("exact", 1)


def test_augment_connects_disconnected():
    out = augment_expander(empty_mg(4), degree_cap=3, target_h=Fraction(1, 2), seed=1)
    assert out.graph.is_connected()
    assert out.cheeger_certificate[1] >= Fraction(1, 2)
    assert all(c is None for c in out.f1)
    assert out.f0 == {i: i for i in range(4)}


def test_augment_sixty_four_vertices_spectral():
    out = augment_expander(empty_mg(64), degree_cap=8, target_h=1, seed=0)
    method, value = out.cheeger_certificate
    assert method == "spectral"
    assert value >= 1
    assert out.graph.max_degree() <= 8
    assert out.graph.is_connected()


def test_augment_deterministic_under_seed():
    a = augment_expander(empty_mg(12), degree_cap=5, target_h=1, seed=42)
    b = augment_expander(empty_mg(12), degree_cap=5, target_h=1, seed=42)
    assert a.graph.edges == b.graph.edges
    assert a.cheeger_certificate == b.cheeger_certificate
    c = augment_expander(empty_mg(12), degree_cap=5, target_h=1, seed=43)
    assert c.graph.edges != a.graph.edges


def test_augment_respects_degree_cap():
    out = augment_expander(empty_mg(9), degree_cap=4, target_h=Fraction(1, 2), seed=2)
    assert out.graph.max_degree() <= 4


def test_augment_requires_head_room():
    code = four_two_two()
    mg = build_measurement_graph(code, F2Vector(4, (0, 1)))
    with pytest.raises(ValueError, match="head room"):
        augment_expander(mg, degree_cap=1, target_h=1, seed=0)


def test_augment_budget_exhaustion_carries_best():
    with pytest.raises(CertificationError) as exc:
        augment_expander(empty_mg(2), degree_cap=2, target_h=100, seed=0)
    assert exc.value.method == "exact"
    assert exc.value.value == 2  # doubled edge on two vertices
    assert exc.value.target == 100


# -------------------------------------------------------------------- export


def test_edgelist_export():
    code = four_two_two()
    mg = build_measurement_graph(code, F2Vector(4, (0, 1)))
    assert to_edgelist_text(mg) == "0 1 0\n"
    aug = augment_expander(mg, degree_cap=4, target_h=2, seed=3)
    text = to_edgelist_text(aug)
    assert "*" in text
    assert text.splitlines()[0] == "0 1 0"
    assert to_edgelist_text(empty_mg(3)) == ""


def test_dot_export():
    mg = build_measurement_graph(four_two_two(), F2Vector(4, (0, 1)))
    dot = to_dot(mg)
    assert dot.startswith("graph measurement {")
    assert '"0" -- "1" [label="0"];' in dot
    assert dot.endswith("}\n")
