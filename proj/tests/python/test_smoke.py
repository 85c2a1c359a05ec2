"""Smoke tests for the python bindings; run directly (no pytest needed)."""
import math

import numpy as np

import superad as sa


def test_derived_params():
    p = sa.derived_params(-math.pi / 3, math.pi / 2, 0.5)
    assert abs(p.q_c - 1.0) < 1e-14
    assert abs(p.gamma - 1.0 / 3.0) < 1e-14
    assert abs(p.tau_c - 1.0) < 1e-14


def test_fourier_roundtrip():
    eps = 0.1
    g = sa.Grid1D.make(-20.0, 20.0, 1024, eps)
    x = g.x()
    f = np.exp(-((x - 1.0) ** 2)).astype(complex)
    hat = sa.scaled_fourier(g, f)
    back = sa.inverse_scaled_fourier(g, hat)
    assert np.max(np.abs(back - f)) < 1e-12
    # Plancherel with the dx/dk weights
    dx = (g.x_max - g.x_min) / g.n
    dk = 2 * math.pi * eps / (g.x_max - g.x_min)
    assert abs(np.sum(np.abs(f) ** 2) * dx - np.sum(np.abs(hat) ** 2) * dk) < 1e-12


def test_scalar_operations():
    assert sa.v_of_k(0.5, 0.5) is None
    assert abs(sa.v_of_k(2.5, 3.0 / 32) - math.sqrt(5.875)) < 1e-14

    model = sa.DiabaticModel.sech_theta(-math.pi / 3, math.pi / 2, 0.5)
    lz = sa.lz_probability(5.0, model, 1.0 / 50)
    assert abs(lz.large_p0 - math.exp(-10.0)) < 1e-18

    m64 = sa.DiabaticModel.sech_theta(-math.pi / 3, 2 * math.pi / 5, 3.0 / 32)
    opt = sa.optimal_representation(2.5, 2.0, m64, 0.02923)
    assert abs(opt.eta_star - 2.57) < 0.01
    assert abs(opt.k_star - 2.64) < 0.01
    assert abs(opt.n_star - 3.04) < 0.01


def test_formula_norm():
    eps = 0.1
    model = sa.DiabaticModel.sech_theta(-math.pi / 3, math.pi / 2, 0.5)
    g = sa.Grid1D.make(-40.0, 40.0, 4096, eps)
    spec = sa.PacketSpec("gaussian", 5.0, 2.0, eps)
    packet = sa.packet_momentum(spec, g)
    par = sa.TransitionParams.from_model(model, eps)
    res = sa.formula_transmitted(g, packet, par)
    # frozen scipy quadrature value for this parameter set
    assert abs(res["l2_norm"] - 0.141664) < 2e-4
    assert res["peak_k"] > math.sqrt(25.0 + 2.0) - 0.05


def test_small_comparison():
    eps = 0.2
    model = sa.DiabaticModel.sech_theta(-math.pi / 3, math.pi / 2, 0.5)
    g = sa.Grid1D.make(-40.0, 40.0, 4096, eps)
    spec = sa.PacketSpec("gaussian", 2.0, 2.0, eps)
    rec = sa.compare_point(model, g, spec, grid_refinement=False)
    assert rec["gate_passed"]
    assert rec["rel_l2_error"] < 0.05
    assert abs(rec["norm_numeric"] - 0.11) < 0.011


def main():
    tests = [v for k, v in globals().items() if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
