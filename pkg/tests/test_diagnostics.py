import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wignerlab.diagnostics import (coherence_band_divergence, default_bands, dense_purity,
                                   diagonal_divergence, energy, min_eigenvalue, purity,
                                   random_probe_min, rank_one_defect, report)
from wignerlab.grid import build_phase_space_grid
from wignerlab.potential import harmonic
from wignerlab.state import WignerState, ZMatrix, gaussian_wavepacket, pure_to_wigner, wigner_to_z

G = build_phase_space_grid(128, 128, -8.0, 8.0, -8.0, 8.0)


WIDE = build_phase_space_grid(256, 128, -12.0, 12.0, -8.0, 8.0)


def wig(x0, p0, s=2 ** -0.5, grid=G):
    return pure_to_wigner(gaussian_wavepacket(grid, x0, p0, s))


def test_pure_state_measures():
    w = wig(0.5, -0.3)
    assert purity(w) == pytest.approx(1.0, abs=1e-10)
    assert dense_purity(w) == pytest.approx(1.0, abs=1e-8)
    ev = min_eigenvalue(w)
    assert abs(ev.value) < 1e-8 and not ev.low_confidence
    assert rank_one_defect(w) < 1e-10


def test_even_mixture_has_half_purity():
    a, b = wig(-3.0, 0.0, grid=WIDE), wig(3.0, 0.0, grid=WIDE)  # overlap ~ exp(-9)
    mix = WignerState(0.5 * (a.f + b.f), WIDE)
    assert purity(mix) == pytest.approx(0.5, abs=1e-7)
    assert dense_purity(mix) == pytest.approx(0.5, abs=1e-8)
    assert min_eigenvalue(mix).value > -1e-8
    # eigenvalues (1 +- overlap)/2 with overlap exp(-9)
    assert rank_one_defect(mix) == pytest.approx((1 - np.exp(-9)) / 2, abs=1e-8)


def test_negative_eigenvalue_is_found():
    # rho = |a><a| - 0.1 |b><b| with orthogonal a, b has smallest eigenvalue -0.1
    a, b = wig(-3.0, 0.0, grid=WIDE), wig(3.0, 0.0, grid=WIDE)
    w = WignerState(a.f - 0.1 * b.f, WIDE)
    assert min_eigenvalue(w).value == pytest.approx(-0.1, abs=1e-8)


def test_energy_of_harmonic_states():
    pot = harmonic()
    assert energy(wig(0.0, 0.0), G, pot, 1.0) == pytest.approx(0.5, abs=1e-10)
    # coherent state: ground energy plus the classical energy of the centre
    assert energy(wig(1.0, 0.5), G, pot, 1.0) == pytest.approx(0.5 + 0.625, abs=1e-10)


def test_bands_partition_offsets():
    L = G.dxoff_range
    bands = default_bands(G)
    assert bands["inner"] == (0.0, L / 8) and bands["mid"] == (L / 8, L / 4)
    ad = np.abs(G.dxoff_values)
    inner = (ad >= 0) & (ad < L / 8)
    mid = (ad >= L / 8) & (ad < L / 4)
    outer = (ad >= L / 4) & (ad <= L / 2)
    assert np.all(inner.astype(int) + mid + outer == 1)


def test_band_divergence_localizes():
    z = wigner_to_z(wig(0.0, 0.0))
    other = z.z.copy()
    j_mid = int(np.argmin(np.abs(np.abs(G.dxoff_values) - 0.2 * G.dxoff_range)))
    other[3, j_mid] += 0.25
    other[5, G.np // 2] += 0.5  # Nyquist offset belongs to the outer band
    out = coherence_band_divergence(z, ZMatrix(other, G))
    assert out == pytest.approx({"inner": 0.0, "mid": 0.25, "outer": 0.5})
    assert diagonal_divergence(z, ZMatrix(other, G)) == 0.0


def test_identical_states_have_zero_divergence():
    w = wig(0.4, 0.1)
    rep = report(w, harmonic(), 1.0, other=w)
    assert rep.band_dist == {"inner": 0.0, "mid": 0.0, "outer": 0.0}
    assert rep.diag_dist == 0.0
    row = rep.row()
    assert len(row) == 9 and row[0] == 0.0 and row[1] == pytest.approx(1.0)


def test_single_report_has_nan_divergence():
    row = report(wig(0, 0), harmonic(), 1.0, eig=False).row()
    assert np.isnan(row[4]) and all(np.isnan(v) for v in row[5:])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 24), st.integers(0, 2 ** 32 - 1))
def test_probe_bound_never_beats_exact(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = a + a.conj().T
    lo = np.linalg.eigvalsh(h)[0]
    assert random_probe_min(h, 16, rng) >= lo - 1e-10
