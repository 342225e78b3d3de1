import math

import numpy as np
import pytest

import cvqelm


def test_vacuum_and_gates():
    vac = cvqelm.vacuum_state(2)
    assert vac.modes == 2
    assert np.allclose(vac.mean, 0.0)
    assert np.allclose(vac.cov, 0.5 * np.eye(4))

    displaced = cvqelm.apply(vac, cvqelm.displacement_gate(2, 0, 1.0))
    assert displaced.mean[0] == pytest.approx(math.sqrt(2.0))

    with pytest.raises(ValueError):
        cvqelm.vacuum_state(0)


def test_cx_decomposition_identity():
    direct = cvqelm.cx_gate(2, 0, 1, 1.3)
    decomposed = cvqelm.cx_gate_decomposed(2, 0, 1, 1.3)
    assert np.max(np.abs(direct.symplectic - decomposed.symplectic)) < 1e-10

    r, theta = cvqelm.cx_decomposition_params(2.0)
    assert r == pytest.approx(-math.asinh(1.0))
    assert abs(theta) == pytest.approx(math.pi / 8.0)


def test_substrate_features():
    cfg = cvqelm.draw_substrate(4, 1.0, 7, cvqelm.Scheme.HOMODYNE)
    assert len(cfg.thetas) == 4
    assert cvqelm.feature_dim(cfg) == 20

    state = cvqelm.forward(np.zeros(4), cfg)
    feats = cvqelm.homodyne_features(state)
    assert feats.values.shape == (20,)

    x = np.random.default_rng(0).normal(size=(10, 4))
    phi = cvqelm.feature_matrix(x, cfg)
    assert phi.shape == (10, 20)

    # Round trip through JSON preserves the draw bit-for-bit.
    back = cvqelm.substrate_from_json(cvqelm.substrate_to_json(cfg))
    assert back.thetas == cfg.thetas


def test_fock_oracle_agreement():
    cfg = cvqelm.draw_substrate(2, 1.0, 3, cvqelm.Scheme.PNR)
    x = np.array([0.4, -0.6])
    state = cvqelm.forward(x, cfg)
    pnr = cvqelm.pnr_features(state)
    fock = cvqelm.fock_simulate(x, cfg, 40)
    assert fock.tail_mass() < 1e-10
    moments = cvqelm.oracle_moments(fock)
    for m in range(2):
        assert pnr.values[m] == pytest.approx(moments[m].nbar, abs=1e-6)
        assert pnr.values[2 + m] == pytest.approx(moments[m].var_n, abs=1e-6)


def test_readout_pipeline():
    data = cvqelm.synthetic_gaussians(2, 2.0, 2000, 11)
    spec = cvqelm.SplitSpec()
    spec.seed = 1
    splits = cvqelm.split(data, spec)

    std = cvqelm.standardize_fit(splits.x_train)
    x_train = cvqelm.standardize_apply(std, splits.x_train)
    x_test = cvqelm.standardize_apply(std, splits.x_test)

    cfg = cvqelm.draw_substrate(2, 1.0, 5, cvqelm.Scheme.HOMODYNE)
    z = cvqelm.assemble_design(cvqelm.feature_matrix(x_train, cfg), x_train)
    eta = cvqelm.ridge_fit(z, splits.y_train, 1e-3)
    assert eta.shape == (2 + 10 + 1,)

    model = cvqelm.ReadoutModel()
    model.kind = cvqelm.ReadoutKind.RIDGE
    model.scheme = cvqelm.Scheme.HOMODYNE
    model.weights = eta
    model.standardizer = std
    model.input_dim = 2
    model.feature_dim = 10
    labels = cvqelm.predict_labels(model, cvqelm.feature_matrix(x_test, cfg), x_test)
    acc = cvqelm.accuracy(labels, splits.y_test)
    assert acc > 0.75  # Bayes accuracy is ~0.84 at delta=2


def test_mlp_params_and_run_single():
    assert cvqelm.mlp_param_count(16, 10) == 181
    assert cvqelm.mlp_param_count(10, 10) == 121

    data = cvqelm.synthetic_gaussians(2, 2.0, 1200, 4)
    config = cvqelm.RunConfig()
    config.mlp.max_epochs = 20
    rec = cvqelm.run_single(data, cvqelm.ModelId.QELM_HOM_RIDGE, 300, 1, 2, config)
    assert rec.ok
    assert 0.5 < rec.test_accuracy <= 1.0
    rerun = cvqelm.run_single(data, cvqelm.ModelId.QELM_HOM_RIDGE, 300, 1, 2, config)
    assert rerun.test_accuracy == rec.test_accuracy
