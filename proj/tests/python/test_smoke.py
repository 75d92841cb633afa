import math

import numpy as np
import pytest

import sic


def test_complexity_ratios():
    mnm = sic.cost_mnm(59, 60)
    assert mnm == 417779
    assert round(sic.relative_cost(sic.cost_cg(59, 60, 20), 59, 60), 2) == 0.68
    assert sic.relative_cost(sic.cost_grad(59, 60), 59, 60) == pytest.approx(8.47e-3, abs=5e-6)


def test_cg_matches_direct_solve():
    rng = np.random.default_rng(0)
    g = rng.standard_normal((40, 20)) + 1j * rng.standard_normal((40, 20))
    m = g.conj().T @ g / 40 + 1e-4 * np.eye(20)
    b = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    x, iters = sic.cg_solve(m, b, 20)
    assert iters <= 20
    np.testing.assert_allclose(x, -np.linalg.solve(m, b), rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(sic.hermitian_solve(m, b), np.linalg.solve(m, b), rtol=1e-10, atol=1e-12)


def test_waveforms_and_pa():
    x = sic.gen_ofdm(n_samples=4096, seed=3)
    assert x.dtype == np.complex128 and x.shape == (4096,)
    assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0, abs=1e-3)
    np.testing.assert_array_equal(x, sic.gen_ofdm(n_samples=4096, seed=3))
    np.testing.assert_array_equal(sic.pa_apply(x, [1, 0, 0, 0]), x)
    p = sic.gen_amplitude_probe(1000, seed=2)
    assert np.max(np.abs(p)) <= math.sqrt(3) + 1e-12


def test_model_round_trip_and_jacobian():
    rng = np.random.default_rng(1)
    mdl = sic.HammersteinModel(basis_size=4, a_max=3.0, fir_taps=5)
    assert mdl.num_params == 9
    z = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    mdl.params = z
    np.testing.assert_array_equal(mdl.params, z)
    x = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    y = mdl.forward(x)
    jac = mdl.jacobian(x)
    assert jac.shape == (50, 9)
    # Bilinear model: y = J_w w, which the Jacobian's w columns reproduce.
    np.testing.assert_allclose(jac[:, 4:] @ mdl.w, y, rtol=1e-12, atol=1e-12)
    back = sic.HammersteinModel.load(mdl.save())
    np.testing.assert_array_equal(back.params, z)


def test_lr_schedule_endpoints():
    total = sic.planned_updates("epochs = 5000\nn_samples = 78960\n", 78960)
    assert total == 6_580_000
    assert sic.lr_schedule(0, total) == 1e-4
    assert sic.lr_schedule(total - 1, total) == 1e-8


def test_run_experiment_and_errors():
    res = sic.run_experiment("source = hammerstein\ninput = probe\nn_samples = 3000\nepochs = 4\nnoise = false\n")
    assert res["label"] == "MNM"
    assert res["updates"] == 200
    assert len(res["curve"]["nmse_db"]) == 200
    assert res["final_nmse_db"] < -40
    assert isinstance(res["model"], sic.HammersteinModel)
    with pytest.raises(sic.ConfigError):
        sic.format_config("metod = cg\n")
    with pytest.raises(sic.NumericalAbort):
        sic.run_experiment("source = hammerstein\ninput = probe\nn_samples = 600\nepochs = 1\nmethod = adam\n"
                           "adam_mu0 = 1e308\n")
