import math

import numpy as np
import pytest

import polyhho


def test_generators_cover_the_unit_square():
    for family in ("cartesian", "hexagonal", "kershaw"):
        mesh = polyhho.generate(family, 4)
        assert mesh.num_cells > 0
        assert mesh.total_area == pytest.approx(1.0, abs=1e-13)
        assert mesh.vertices.shape == (mesh.num_vertices, 2)


def test_mesh_round_trip_and_errors():
    mesh = polyhho.generate("hexagonal", 3)
    again = polyhho.read_mesh_string(mesh.to_string())
    assert again.num_cells == mesh.num_cells
    np.testing.assert_array_equal(again.vertices, mesh.vertices)
    with pytest.raises(ValueError):
        polyhho.PolyMesh([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [[0, 2, 1]])


def test_interpolated_solenoidal_field_has_zero_discrete_divergence():
    disc = polyhho.Discretization(polyhho.generate("kershaw", 3), 1)
    u = disc.interpolate(lambda x, y: (-y, x))
    assert np.linalg.norm(disc.divergence(u)) < 1e-12


def test_stokes_solve_converges_in_one_step():
    disc = polyhho.Discretization(polyhho.generate("cartesian", 4), 1)
    state = polyhho.solve(disc, f=lambda x, y: (1.0, 0.0), nu=1.0, convection=False)
    assert state["converged"]
    assert state["iterations"] == 1


def test_robust_scheme_ignores_gradient_forcing():
    rows, csv = polyhho.robustness(k=1, levels=1, base_n=4, lambda_=1e3)
    assert csv.splitlines()[0] == "level,N_dof,h,err_energy,eoc_energy,err_u_l2,eoc_u,err_p_l2,eoc_p,iters,seconds"
    assert rows[0]["err_energy"] < 1e-9


def test_classic_scheme_is_polluted_by_gradient_forcing():
    cfg = polyhho.SolverConfig()
    cfg.mode = polyhho.Mode.classic
    rows, _ = polyhho.robustness(k=1, levels=1, base_n=4, lambda_=1e3, config=cfg)
    assert rows[0]["err_energy"] > 1e-3


def test_cavity_profiles():
    result = polyhho.cavity(re=100.0, k=0, n=8, samples=11)
    assert result["converged"]
    assert len(result["u1"]) == 11
    # the lid drags the top of the vertical centerline forward
    assert result["u1"][-1] == max(result["u1"]) > 0.0
    assert all(math.isfinite(v) for v in result["u2"])


def test_property_suite_passes():
    checks = polyhho.proptest(n=3, samples=5)
    assert len(checks) == 6
    assert all(passed for *_, passed in checks)
