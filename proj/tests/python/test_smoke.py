"""Smoke tests for the python bindings."""

import json
import os

import pytest

screening = pytest.importorskip("screening")

CONFIGS = os.environ.get("SCREENING_CONFIGS", "configs")


def config_path(name):
    return os.path.join(CONFIGS, name)


def inline_config(**overrides):
    base = {
        "price": 0.75,
        "tax_credit": 0.2,
        "trait_share": 0.3,
        "trait_dist": {"family": "polynomial", "exponent": 0.7},
        "nontrait_dist": {"family": "polynomial", "exponent": 0.3},
        "cost": "quadratic",
    }
    base.update(overrides)
    return json.dumps(base)


def test_check_assumptions_regimes():
    mlrp = screening.check_assumptions(config_path("mlrp_tau02.json"))
    assert mlrp["regime"] == "MLRP"
    assert mlrp["required_ok"]

    rev = screening.check_assumptions(config_path("reverse_mlrp_tau02.json"))
    assert rev["regime"] == "ReverseMLRP"
    assert rev["rent_single_crossing"]


def test_solve_matches_the_cutoff_algebra():
    menu = screening.solve(inline_config(), grid=401)
    assert menu["regime"] == "FullSeparation"
    assert abs(menu["cutoff_trait"] - 0.9375 * 0.7 / 1.7) < 1e-6
    assert abs(menu["cutoff_nontrait"] - 0.75 * 0.3 / 1.3) < 1e-6
    assert menu["transfer"] == 0.0
    assert len(menu["grid"]) == len(menu["qT"]) == len(menu["wN"])
    # No distortion at the top: C_q(qT(0), 0) = qT(0) = P/(1-tau).
    assert abs(menu["qT"][0] - 0.9375) < 1e-8


def test_solve_semi_pooling_cutoff():
    menu = screening.solve(
        inline_config(
            trait_dist={"family": "polynomial", "exponent": 0.3},
            nontrait_dist={"family": "polynomial", "exponent": 0.7},
        ),
        grid=401,
    )
    assert menu["regime"] == "SemiPooling"
    assert abs(menu["theta_star"] - 0.0984375) < 1e-6


def test_verify_solved_menu_passes():
    report = screening.verify(config_path("reverse_mlrp_tau02.json"), perturbations=50)
    assert report["overall_pass"]
    names = {c["name"] for c in report["checks"]}
    assert "within_group_ic" in names
    assert "across_group_ic" in names


def test_sweep_shows_the_hiring_crossing():
    rows = screening.sweep(config_path("mlrp_tau02.json"), 0.0, 0.6, steps=31)
    assert len(rows) == 31
    assert all(r["ok"] for r in rows)
    gaps = [r["hire_prob_T"] - r["hire_prob_N"] for r in rows]
    assert gaps[0] < 0 < gaps[-1]


def test_transfer_gradient_is_negative():
    rep = screening.transfer_gradient(
        config_path("reverse_mlrp_tau00.json"), [0.0, 0.02, 0.05]
    )
    assert rep["pass"]
    assert all(fd < 0 for fd in rep["slope_fd"])
    assert rep["xi_trait_at_1"] < rep["bound"]


def test_bad_config_raises():
    with pytest.raises(ValueError):
        screening.solve(inline_config(trait_share=1.5))
