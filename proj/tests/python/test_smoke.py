"""Smoke tests for the python bindings."""

import cmath
import math

import pytest

hs = pytest.importorskip("heun_spectra")

FIG_ROOTS = [0j, 1 + 0j, 1 - 1j]


def test_version():
    assert isinstance(hs.__version__, str)


def test_lame_degree_one():
    res = hs.solve_spectrum([-1 + 0j, 0j, 1 + 0j], "lame", 1)
    ts = sorted(t.real for t in res.t_roots)
    s3 = 1.0 / math.sqrt(3.0)
    assert abs(ts[0] + s3) < 1e-10
    assert abs(ts[1] - s3) < 1e-10
    for pair in res.pairs:
        assert pair.residual < 1e-10
        (root,) = pair.stieltjes_roots()
        assert abs(root + pair.t) < 1e-9  # S = z + t


def test_spectrum_count():
    res = hs.solve_spectrum(FIG_ROOTS, "zero", 10)
    assert len(res.t_roots) == 11


def test_equilateral_b0():
    w = cmath.exp(2j * math.pi / 3)
    assert abs(hs.find_b0([1 + 0j, w, w * w])) < 1e-10


def test_side_integral_anchor():
    val = hs.f_side(FIG_ROOTS, FIG_ROOTS[2], 0, 1)
    assert abs(val - math.pi) < 1e-10


def test_locus_shape():
    locus = hs.gamma_locus(FIG_ROOTS)
    assert len(locus["arcs"]) == 3
    for arc in locus["arcs"]:
        assert abs(arc[-1] - locus["b0"]) < 1e-9


def test_singular_graph_tripod():
    b0 = hs.find_b0(FIG_ROOTS)
    graph = hs.singular_graph(FIG_ROOTS, b0, points_per_edge=300)
    assert graph["is_strebel"]
    assert len(graph["edges"]) == 3
    assert graph["admits_positive"]
    assert len(graph["measures"]) == 1
    assert abs(graph["measures"][0]["mass"] - 1.0) < 1e-3


def test_arcsine_average_mass():
    points, weights = hs.build_Mi(FIG_ROOTS, 0, tau_nodes=50, slice_nodes=40)
    assert len(points) == len(weights) == 50 * 40
    assert abs(sum(weights) - 1.0) < 1e-12


def test_cauchy_transform():
    val = hs.cauchy_transform([0j], [1.0], 2 + 0j)
    assert abs(val - 0.5) < 1e-15
