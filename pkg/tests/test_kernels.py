"""Compiled and pure-Python kernel backends must agree to rounding error."""

import math

import numpy as np
import pytest

from scallop_pair._kernels import available_backends, get_backend

from helpers import random_state

needs_compiled = pytest.mark.skipif(
    "compiled" not in available_backends(),
    reason="compiled kernel extension not built",
)

PY = get_backend("python")
ARGS = (0.6241963505817848, 1.0, 1.0, 2.0)  # lam, L, c_par, c_perp


@needs_compiled
class TestBackendEquivalence:
    def setup_method(self):
        self.compiled = get_backend("compiled")

    def test_assembly_matches(self):
        rng = np.random.default_rng(40)
        for _ in range(200):
            angles = (rng.uniform(-7, 7), math.pi + rng.uniform(-0.5, 0.5),
                      rng.uniform(-7, 7), math.pi + rng.uniform(-0.5, 0.5))
            lam = rng.uniform(0.0, 0.97)
            R_c, Phi_c = self.compiled.assemble_matrices(*angles, lam, 1.0, 1.0, 2.0)
            R_p, Phi_p = PY.assemble_matrices(*angles, lam, 1.0, 1.0, 2.0)
            assert R_c == pytest.approx(R_p, rel=1e-14, abs=1e-14)
            assert Phi_c == pytest.approx(Phi_p, rel=1e-14, abs=1e-14)

    def test_rates_and_det_match(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            q = random_state(rng).as_array()
            u1, u2 = rng.uniform(-2, 2, 2)
            r_c, d_c, f_c = self.compiled.rates_and_det(q, u1, u2, *ARGS)
            r_p, d_p, f_p = PY.rates_and_det(q, u1, u2, *ARGS)
            scale = max(np.max(np.abs(r_p)), 1e-300)
            assert np.max(np.abs(r_c - r_p)) <= 1e-12 * scale
            assert d_c == pytest.approx(d_p, rel=1e-12)
            assert f_c == pytest.approx(f_p, rel=1e-12)

    @pytest.mark.parametrize("kind,p", [
        ("sinusoidal", (0.1, 20.0, math.pi / 2)),
        ("square", (1.0, 0.7, 0.0125)),
    ])
    def test_trajectories_match(self, kind, p):
        q0 = np.array([0, 0, 0.1, 0, 0.1, 0.1, math.pi + 0.1, math.pi - 0.05])
        code = PY.SINUSOIDAL if kind == "sinusoidal" else PY.SQUARE
        n, dt = 512, (2 * math.pi / 20.0 if kind == "sinusoidal" else 4 * 0.0125) / 512
        s_c, d_c, st_c, n_c = self.compiled.integrate_stroke(q0, *ARGS, code, *p, n, dt)
        s_p, d_p, st_p, n_p = PY.integrate_stroke(q0, *ARGS, code, *p, n, dt)
        assert (st_c, n_c) == (st_p, n_p) == (0, n)
        assert np.max(np.abs(s_c - s_p)) <= 1e-12
        assert np.max(np.abs(d_c - d_p)) <= 1e-10 * np.max(np.abs(d_p))

    def test_singular_abort_matches(self):
        q0 = np.array([0, 0, 0.0, 0, 0.1, 0.0, math.pi, math.pi])
        lam = 0.99999
        n, dt = 400, (2 * math.pi / 20.0) / 400
        out_c = self.compiled.integrate_stroke(q0, lam, 1.0, 1.0, 2.0,
                                               PY.SINUSOIDAL, 0.1, 20.0, 0.5, n, dt)
        out_p = PY.integrate_stroke(q0, lam, 1.0, 1.0, 2.0,
                                    PY.SINUSOIDAL, 0.1, 20.0, 0.5, n, dt)
        assert out_c[2] == out_p[2] == 1
        assert out_c[3] == out_p[3]

    def test_floor_definition_matches(self):
        rng = np.random.default_rng(42)
        state = random_state(rng)
        R_p, _ = PY.assemble_matrices(state.theta1, state.sigma1, state.theta2,
                                      state.sigma2, 0.5, 1.0, 1.0, 2.0)
        assert self.compiled.det_floor(R_p) == pytest.approx(PY.det_floor(R_p), rel=1e-15)


class TestBackendSelection:
    def test_python_backend_always_available(self):
        assert "python" in available_backends()
        assert PY.BACKEND_NAME == "python"

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            get_backend("fortran")

    def test_kind_codes_agree(self):
        for name in available_backends():
            backend = get_backend(name)
            assert (backend.SQUARE, backend.SINUSOIDAL) == (0, 1)
            assert backend.DET_FLOOR_COEFF == 1e-12
