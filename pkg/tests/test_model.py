import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dressmag import linalg
from dressmag.model import (KET_B, KET_D, KET_DOWN, KET_U, SignalParams, SystemParams, build_bare_hamiltonian,
                            build_rwa_hamiltonian, contamination_closed_form, dressed_transform,
                            gap_closed_form, protection_analysis, rotating_frame_hamiltonians)

TWO_PI = 2 * math.pi
kHz = TWO_PI * 1e3

omegas = st.floats(TWO_PI * 1e3, TWO_PI * 100e3)


def params(Omega, **kw):
    base = dict(omega0=TWO_PI * 12.6e9, lambda_plus=TWO_PI * 14.076e6, lambda_minus=TWO_PI * 14.1e6)
    base.update(kw)
    return SystemParams(Omega=Omega, **base)


def test_bare_diagonal_without_drives():
    p = params(0.0)
    H = build_bare_hamiltonian(p, SignalParams(), 0.37)
    np.testing.assert_array_equal(H, np.diag([p.omega0, -p.lambda_minus, 0.0, p.lambda_plus]))


def test_bare_microwave_entries_at_zero():
    p = params(18 * kHz)
    H = build_bare_hamiltonian(p, SignalParams(), 0.0)
    assert abs(H[1, 0]) == pytest.approx(p.Omega)
    assert abs(H[3, 0]) == pytest.approx(p.Omega)
    assert linalg.is_hermitian(H)


def test_bare_zeeman_fluctuation():
    p = params(18 * kHz)
    d = TWO_PI * 1e3
    H0 = build_bare_hamiltonian(p, SignalParams(), 0.1)
    H1 = build_bare_hamiltonian(p, SignalParams(), 0.1, delta=d)
    np.testing.assert_allclose(np.diag(H1 - H0).real, [0, -d, 0, d])


def test_negative_rates_rejected():
    with pytest.raises(ValueError):
        params(-1.0)
    with pytest.raises(ValueError):
        SignalParams(omega_g=-1.0)
    with pytest.raises(ValueError):
        SignalParams(target="left")


def test_rwa_dressed_spectrum():
    p = params(18 * kHz)
    w = np.linalg.eigvalsh(build_rwa_hamiltonian(p, SignalParams()))
    g = p.Omega / math.sqrt(2)
    np.testing.assert_allclose(w, [-g, 0, 0, g], atol=1e-12 * p.Omega)


def test_rwa_signal_only_block():
    # |B> <-> |0'> couples at omega_g / 2, so the population oscillates at omega_g
    p = params(0.0)
    og = TWO_PI * 7.54
    for target in ("plus", "minus", "dual"):
        H = build_rwa_hamiltonian(p, SignalParams(omega_g=og, target=target))
        assert abs(linalg.inner(linalg.KET_0P, H @ KET_B)) == pytest.approx(og / 2)
    # a single rf field couples |0'> to one Zeeman level only
    w = np.linalg.eigvalsh(build_rwa_hamiltonian(p, SignalParams(omega_g=og)))
    np.testing.assert_allclose(np.sort(np.abs(w)), [0, 0, og / math.sqrt(2), og / math.sqrt(2)], atol=1e-12)
    # the dual drive leaves |D> uncoupled and gives a pure |B>,|0'> block
    H = build_rwa_hamiltonian(p, SignalParams(omega_g=og, target="dual"))
    w = np.linalg.eigvalsh(H)
    np.testing.assert_allclose(np.sort(np.abs(w)), [0, 0, og / 2, og / 2], atol=1e-12)
    T = 0.123
    psi = linalg.expm_step(H, T) @ KET_B
    assert abs(linalg.inner(KET_B, psi)) ** 2 == pytest.approx(0.5 * (1 + math.cos(og * T)), abs=1e-12)


def test_rwa_noise_gap():
    p = params(18 * kHz)
    w = np.linalg.eigvalsh(build_rwa_hamiltonian(p, SignalParams(), delta=1 * kHz))
    assert np.sort(np.abs(w))[:2] == pytest.approx([0, 0], abs=1e-9)
    assert w[-1] == pytest.approx(TWO_PI * 12.767e3, rel=1e-4)
    assert w[0] == pytest.approx(-TWO_PI * 12.767e3, rel=1e-4)


def test_rwa_noise_couples_bright_and_dark():
    p = params(18 * kHz)
    d = 0.7 * kHz
    H = build_rwa_hamiltonian(p, SignalParams(), delta=d, eps=0.3 * kHz)
    assert linalg.inner(KET_D, H @ KET_B) == pytest.approx(d)
    assert linalg.inner(linalg.KET_0P, H @ linalg.KET_0P) == pytest.approx(0.3 * kHz)


def test_rwa_convention_checks():
    with pytest.raises(ValueError):
        build_rwa_hamiltonian(params(1.0, theta=0.0), SignalParams())
    with pytest.raises(ValueError):
        build_rwa_hamiltonian(params(1.0), SignalParams(phi=0.1))
    with pytest.raises(ValueError):
        build_rwa_hamiltonian(params(1.0, omega_p=1.0), SignalParams())


def test_dressed_transform():
    U = dressed_transform()
    np.testing.assert_allclose(U.U @ U.U.conj().T, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(U.to_dressed(linalg.KET_P1), [1 / math.sqrt(2), 0, 0.5, 0.5], atol=1e-15)
    np.testing.assert_allclose(U.to_bare(U.to_dressed(KET_U)), KET_U, atol=1e-15)
    H = build_rwa_hamiltonian(params(18 * kHz), SignalParams())
    assert linalg.inner(KET_U, H @ KET_U).real == pytest.approx(18 * kHz / math.sqrt(2))
    assert linalg.inner(KET_DOWN, H @ KET_DOWN).real == pytest.approx(-18 * kHz / math.sqrt(2))


def test_protection_examples():
    p = params(18 * kHz)
    r = protection_analysis(p, 0.0)
    assert abs(r.b_branch_shift) < 1e-30 and abs(r.contamination_u) < 1e-15
    assert r.gap == pytest.approx(p.Omega / math.sqrt(2))
    r = protection_analysis(p, 0.5 * kHz)
    assert abs(r.b_branch_shift) < 1e-10 * p.Omega
    assert abs(r.contamination_u) == pytest.approx(0.0278, abs=5e-5)
    assert abs(r.contamination_u) == pytest.approx(abs(r.contamination_d), rel=1e-12)
    assert abs(r.contamination_u) == pytest.approx(contamination_closed_form(p.Omega, 0.5 * kHz), rel=1e-10)
    assert abs(r.sensitivity_ratio) < 1e-12
    with pytest.raises(ValueError):
        protection_analysis(params(0.0), 1.0)


@given(st.lists(omegas, min_size=100, max_size=100))
def test_dressed_spectrum_property(Os):
    for O in Os:
        w = np.linalg.eigvalsh(build_rwa_hamiltonian(params(O), SignalParams()))
        g = O / math.sqrt(2)
        assert np.all(np.abs(w - [-g, 0, 0, g]) <= 1e-12 * g)


@given(omegas, st.floats(-1, 1))
def test_protection_property(O, x):
    d = x * O
    r = protection_analysis(params(O), d)
    assert abs(r.b_branch_shift) <= 1e-10 * O
    assert r.gap == pytest.approx(gap_closed_form(O, d), rel=1e-10)
    assert r.bare_shift_rate == 2 * d
    assert abs(r.contamination_u) == pytest.approx(contamination_closed_form(O, d), rel=1e-8, abs=1e-14)


def test_signal_validity_flag(system):
    assert SignalParams(omega_g=TWO_PI * 7.54).is_valid_for(system)
    assert not SignalParams(omega_g=TWO_PI * 3336.37).is_valid_for(system)
    assert SignalParams(omega_g=0.0).is_valid_for(system)


def test_rotating_frame_average_is_rwa():
    # compressed carriers are all multiples of 100 kHz: one 10 us window averages
    # every oscillating term exactly with enough midpoint samples
    p = SystemParams(omega0=TWO_PI * 1e6, lambda_plus=TWO_PI * 2e5, lambda_minus=TWO_PI * 2e5,
                     Omega=TWO_PI * 2e3)
    for target in ("plus", "minus", "dual"):
        s = SignalParams(omega_g=TWO_PI * 100, target=target)
        n = 4096
        t = (np.arange(n) + 0.5) * 1e-5 / n
        H_avg = rotating_frame_hamiltonians(p, s, t).mean(axis=0)
        H_rwa = build_rwa_hamiltonian(p, s)
        assert np.abs(H_avg - H_rwa).max() < 1e-9 * p.Omega


def test_rotating_frame_hermitian():
    p = params(18 * kHz)
    H = rotating_frame_hamiltonians(p, SignalParams(omega_g=TWO_PI * 7.54), np.linspace(0, 1e-3, 7), delta=5.0)
    assert all(linalg.is_hermitian(h) for h in H)
