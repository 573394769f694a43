import numpy as np
import pytest

import wgeit


def test_version():
    assert wgeit.__version__ == "0.1.0"


def test_mesh_counts():
    mesh = wgeit.uniform_mesh(8)
    assert mesh.num_triangles == 128
    assert mesh.num_vertices == 81
    assert np.isclose(sum(mesh.areas), 1.0)
    assert mesh.triangles.shape == (128, 3)


def test_currents_zero_sum_unit_norm():
    I = wgeit.synth_currents(16, 10)
    assert I.shape == (10, 16)
    assert np.allclose(I.sum(axis=1), 0.0, atol=1e-14)
    assert np.allclose(np.linalg.norm(I, axis=1), 1.0)


def test_forward_zero_sum_and_linearity():
    mesh = wgeit.uniform_mesh(8)
    I = wgeit.synth_currents(16, 4)
    sigma = np.linspace(0.5, 2.0, mesh.num_triangles)
    U = wgeit.forward_map(mesh, sigma, I)
    assert U.shape == (4, 16)
    assert np.allclose(U.sum(axis=1), 0.0, atol=1e-10)
    U2 = wgeit.forward_map(mesh, sigma, 2.0 * I)
    assert np.allclose(U2, 2.0 * U, rtol=1e-9, atol=1e-12)


def test_convergence_orders():
    rows = wgeit.convergence_study([8, 16, 32])
    assert len(rows) == 3
    assert 1.7 <= rows[-1]["order_u"] <= 2.3
    assert 1.7 <= rows[-1]["order_U"] <= 2.3


def test_denoise_stays_in_box_and_lowers_tv():
    rng = np.random.default_rng(0)
    d = rng.uniform(0.0, 5.0, size=(6, 12))
    x = wgeit.fgp_denoise(d, beta=0.2, lambda_=0.25, max_iter=200)
    assert x.min() >= 0.25 and x.max() <= 4.0
    assert wgeit.tv_grid(x) < wgeit.tv_grid(np.clip(d, 0.25, 4.0))


def test_bad_arguments_raise_value_error():
    with pytest.raises(ValueError):
        wgeit.uniform_mesh(3)
    with pytest.raises(ValueError):
        wgeit.reconstruct("no-such-example", 1e-2, [8], [2])


def test_small_reconstruction():
    r = wgeit.reconstruct("example2", 1e-2, [8], [5], n_data=16)
    (level,) = r["levels"]
    assert level["sigma"].shape == (128,)
    assert len(level["error_history"]) == 6
    assert level["rel_l2_error"] <= level["error_history"][0]
    assert np.allclose(r["data"].sum(axis=1), 0.0, atol=1e-10)
