import json
import math

import numpy as np
import pytest

import qsclab as q


def scalar_points():
    return q.NoisePoints([np.array([0j]), np.array([1 + 0j]), np.array([1j])])


def small_spec():
    spec = q.SampleSpec()
    spec.n_max = 2
    spec.t_grid = [0.5, 1.0]
    spec.trials = 25
    spec.seed = 9
    return spec


def test_gram_matrix_is_psd_with_unit_diagonal():
    xs = [np.array([0j]), np.array([1 + 0j]), np.array([0.5j])]
    g = q.gram_matrix(xs, 0.7)
    assert np.allclose(np.diag(g), 1.0)
    assert q.min_herm_eig(g) > -1e-12


def test_counterexample_closed_form():
    cex = q.counterexample_family(0.5)
    p = q.evolve(cex.generator, 1.0).apply(np.ones((2, 2), dtype=complex))
    assert abs(p[0, 1] - math.exp(-0.5)) < 1e-10
    assert abs(p[0, 0] - 1.0) < 1e-10


def test_kernel_matches_scalar_closed_form():
    fam = q.trivial_family(q.OperatorSpace.full_algebra(1), scalar_points())
    kernel = q.CocycleKernel(fam)
    f = q.StepFunction.constant(np.array([1 + 0j]))
    g = q.StepFunction.zero(1)
    value = kernel.eval(f, g, 1.0, np.ones((1, 1), dtype=complex))
    assert abs(value[0, 0] - math.exp(-0.5)) < 1e-12


def test_verifier_reports_parse_and_pass():
    fam = q.trivial_family(q.OperatorSpace.full_algebra(2), scalar_points())
    rep = q.report(q.verify_prop_PP(fam, small_spec()))
    assert rep["verifier"] == "prop_PP"
    assert rep["conclusion"] == "pass"
    labels = [c["label"] for c in rep["checks"]]
    assert "grammian domination" in labels


def test_expansion_families_fail():
    fam = q.contraction_scaled(
        q.trivial_family(q.OperatorSpace.full_algebra(2), scalar_points()), -1.0
    )
    rep = q.report(q.verify_theorem_S(fam, small_spec()))
    assert rep["conclusion"] == "fail"


def test_block_psd_factor_contract():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    big = g @ g.conj().T
    res = q.block_psd_factor(big[:2, :2], big[:2, 2:], big[2:, 2:])
    assert res.psd
    assert q.op_norm(res.contraction) <= 1 + 1e-8

    herm = np.diag([1.0, -0.5, 0.25]).astype(complex)
    bad = q.block_psd_factor(herm[:1, :1], herm[:1, 1:], herm[1:, 1:])
    assert not bad.psd
    assert bad.min_eigenvalue < 0


def test_run_config_is_deterministic():
    cfg = {
        "version": "1",
        "space": {"kind": "full", "m": 2},
        "noise": {"d": 1, "T": [[[0, 0]], [[1, 0]], [[0, 1]]]},
        "family": {"kind": "trivial"},
        "suites": ["prop_PP"],
        "sample": {"n_max": 2, "t_grid": [0.5, 1.0], "trials": 25, "seed": 4},
    }
    text = json.dumps(cfg)
    code1, rep1 = q._core.run_config_json(text, None)
    code2, rep2 = q._core.run_config_json(text, None)
    assert code1 == 0
    assert rep1 == rep2

    code3, rep3 = q.run_config(cfg, seed=77)
    assert code3 == 0
    assert rep3["seed"] == 77


def test_errors_surface_as_python_exceptions():
    with pytest.raises(q.QscError):
        q.NoisePoints([np.array([1 + 0j])])
    with pytest.raises(q.QscError):
        q.run_config({"version": "1"})
