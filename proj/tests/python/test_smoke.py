import math

import numpy as np
import pytest

import mimobc as mb


def test_channel_sampling_is_deterministic():
    a = mb.sample_channel(2, 3, mb.channel_stream(5, 1, 2))
    b = mb.sample_channel(2, 3, mb.channel_stream(5, 1, 2))
    np.testing.assert_array_equal(a.entries, b.entries)
    c = mb.sample_channel(2, 3, mb.channel_stream(5, 1, 3))
    assert not np.array_equal(a.entries, c.entries)


def test_svd_modes_reconstruct_the_channel():
    h = mb.sample_channel(2, 4, mb.channel_stream(1, 0, 0))
    modes = mb.svd_modes(h)
    assert len(modes) == 2
    rec = sum(
        math.sqrt(m.lambda_) * np.outer(m.left_vector, m.right_vector.conj())
        for m in modes
    )
    assert np.linalg.norm(rec - h.entries) < 1e-9
    assert modes[0].lambda_ >= modes[1].lambda_


def test_orthogonality_values():
    e1 = np.array([1.0 + 0j, 0.0])
    e2 = np.array([0.0 + 0j, 1.0])
    diag = np.array([1.0 + 0j, 1.0]) / math.sqrt(2.0)
    assert mb.orthogonality(e1, e1) == pytest.approx(1.0)
    assert mb.orthogonality(e1, e2) == pytest.approx(0.0)
    assert mb.orthogonality(e1, diag) == pytest.approx(0.5)
    assert mb.orthogonality_defect(np.eye(3, dtype=complex)) == pytest.approx(1.0)


def test_distribution_spot_values():
    assert mb.wishart_unordered_eig_pdf(1.0, 2, 1) == pytest.approx(math.exp(-1.0))
    assert mb.frobenius_tail(0.0, 3, 2) == 1.0
    assert mb.overlap_pdf(0.0, 4) == pytest.approx(3.0)
    assert mb.lambda_max_tail(2.0, 1, 1) == pytest.approx(math.exp(-2.0))
    assert mb.incomplete_beta(1, 2, 0.5) == pytest.approx(0.75)


def test_selection_pipeline_and_rates():
    users = 12
    M, K, P = 2, 1, 10.0
    modes = []
    channels = []
    for u in range(users):
        h = mb.sample_channel(K, M, mb.channel_stream(42, 0, u), u)
        channels.append(h)
        modes.extend(mb.svd_modes(h))

    sel = mb.greedy_select(modes, 1.0, M)
    assert len(sel.coordinates) == M
    assert sel.gamma_scores[0] == 0.0

    inter = mb.interactive_select(modes, 1.0, 1.0, M)
    assert [(c.user_id, c.mode_index) for c in inter.coordinates] == [
        (c.user_id, c.mode_index) for c in sel.coordinates
    ]

    wf = mb.sum_rate_of_selection(sel, P, waterfilled=True)
    uni = mb.sum_rate_of_selection(sel, P, waterfilled=False)
    dpc = mb.dpc_sum_capacity(channels, P)
    tdma = mb.tdma_rate(channels, P)
    assert uni <= wf + 1e-12
    assert wf <= dpc + 1e-6
    assert tdma <= dpc + 1e-6

    ex = mb.exhaustive_select(modes, 1.0, M, "waterfilled_rate", P)
    assert mb.sum_rate_of_selection(ex, P) >= wf - 1e-9


def test_zero_forcing_inverts_the_selected_rows():
    modes = []
    for u in range(8):
        modes.extend(mb.svd_modes(mb.sample_channel(1, 3, mb.channel_stream(9, 0, u), u)))
    sel = mb.greedy_select(modes, -1.0, 3)
    u_vec = np.array([1.0 + 0.5j, -0.25 + 0j, 0.1 - 1.0j])
    x = mb.zero_forcing_precode_of(sel, u_vec)
    rows = np.vstack(
        [math.sqrt(c.lambda_) * c.right_vector.conj() for c in sel.coordinates]
    )
    assert np.max(np.abs(rows @ x - u_vec)) < 1e-9


def test_waterfilling_binds_the_budget():
    gammas = np.array([1.0, 2.0, 4.0])
    p = mb.waterfill_powers(gammas, 10.0)
    assert np.all(p >= 0.0)
    assert float(gammas @ p) == pytest.approx(10.0, rel=1e-9)


def test_threshold_presets():
    preset = mb.ThresholdPreset()
    preset.mode = mb.ThresholdMode.theorem2_sufficient
    preset.rho_offset = 2.0
    n = 1000
    l1 = math.log(n)
    l2, l3 = math.log(l1), math.log(math.log(l1))
    l4 = math.log(l3)
    assert preset.value_at(n, 2, 1) == pytest.approx(l1 + l2 - l4 - 2.0)
    with pytest.raises(Exception):
        preset.value_at(8, 2, 1)
