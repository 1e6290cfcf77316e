"""Line scanner tests: fast-path accuracy, certification soundness,
window detection against the frozen first-window data, checkpointing."""
import json
import math

import numpy as np
import pytest

from rezeta.errors import DomainError
from rezeta.kernel import PrecisionContext
from rezeta.linescan import (CertifiedRange, CertifyFailure, NegativeWindow,
                             certify_positive, empirical_d,
                             find_negative_windows, re_zeta_line, sample_line,
                             scan, slope_bound, _FastZeta, _scan_windows)
from rezeta.table_data import (FIRST_WINDOW, FIRST_WINDOW_ARGMIN,
                               FIRST_WINDOW_MIN, ROWS)

GAMMA = 0.57721566490153286  # Euler's constant: lim Re zeta(1+it) as t->0


def test_slope_bound():
    assert abs(slope_bound(10) - 10.4833) < 5e-4
    assert abs(slope_bound(682113) - 27.1495) < 5e-4
    ts = [10, 100, 1e4, 1e6, 2e7]
    bs = [slope_bound(t) for t in ts]
    assert bs == sorted(bs)
    with pytest.raises(DomainError):
        slope_bound(9.99)


@pytest.mark.parametrize("t", [10.0, 523.25, 5000.0])
def test_fast_path_against_kernel(t):
    ctx = PrecisionContext(bits=96)
    fast = re_zeta_line(t)
    slow = re_zeta_line(t, prec=ctx)
    assert abs(fast - float(slow)) < 1e-11, t


@pytest.mark.slow
def test_fast_path_against_kernel_high_t():
    ctx = PrecisionContext(bits=96)
    t = 682112.9169
    fast = re_zeta_line(t)
    slow = float(re_zeta_line(t, prec=ctx))
    assert abs(fast - slow) < 1e-9
    assert abs(fast - (-0.0028)) < 5e-5  # tabulated minimum, 4 dp


def test_re_zeta_line_examples():
    assert abs(re_zeta_line(682112.9169) - (-0.0028)) < 5e-5
    assert abs(re_zeta_line(1267065.1710) - (-0.0040)) < 5e-5
    # t -> 0: Re zeta(1+it) = gamma + O(t^2)
    assert abs(re_zeta_line(1e-4) - GAMMA) < 1e-6
    with pytest.raises(DomainError):
        re_zeta_line(0)


def test_sample_line_matches_pointwise():
    t, vals = sample_line(5000.0, 5040.96, 0.01)
    assert len(t) == len(vals) == 4097  # spans two evaluation blocks
    for i in (0, 777, 4095, 4096):
        assert abs(vals[i] - re_zeta_line(t[i])) < 1e-10, i
    with pytest.raises(DomainError):
        sample_line(0.0, 10.0, 0.01)
    with pytest.raises(DomainError):
        sample_line(10.0, 10.0, 0.01)


def test_certify_success_and_step_log_soundness():
    res = certify_positive(10.0, 50.0)
    assert isinstance(res, CertifiedRange)
    assert res.t_lo == 10.0 and res.t_hi == 50.0
    log = res.step_log
    assert len(log) > 100
    assert log[0][0] == 10.0
    t_prev = None
    for t, a, h in log:
        # the step it took is exactly the one the bound justifies
        assert h * slope_bound(t + h) <= math.pi / 2 - a - 0.05 + 1e-9
        assert a < math.pi / 2 - 0.05
        if t_prev is not None:
            assert t == t_prev[0] + t_prev[2]  # contiguous walk
        t_prev = (t, a, h)
    assert log[-1][0] + log[-1][2] >= 50.0  # last step clears the target


def test_certify_failure_near_first_window():
    res = certify_positive(682112.5, 682113.5)
    assert isinstance(res, CertifyFailure)
    assert 682112.5 < res.t_fail < FIRST_WINDOW[0]
    assert res.reason in ("headroom", "step-underflow")
    assert res.steps == len(res.step_log) > 0
    # the log still certifies everything strictly before t_fail
    assert res.step_log[-1][0] + res.step_log[-1][2] <= res.t_fail + 1e-9


def test_certify_validation():
    assert certify_positive(20.0, 20.0).step_log == []
    with pytest.raises(DomainError):
        certify_positive(9.0, 50.0)
    with pytest.raises(DomainError):
        certify_positive(50.0, 20.0)
    with pytest.raises(DomainError):
        certify_positive(10.0, 50.0, margin=0.0)


def test_find_windows_empty_range():
    assert find_negative_windows(10.0, 100.0) == []


def test_scan_preconditions():
    ev = _FastZeta()
    with pytest.raises(DomainError):
        _scan_windows(10.0, 20.0, 0.05, 1e-8, ev)  # step too coarse
    with pytest.raises(DomainError):
        _scan_windows(10.0, 20.0, 0.01, 0.0, ev)
    with pytest.raises(DomainError):
        _scan_windows(0.5, 20.0, 0.01, 1e-8, ev)
    with pytest.raises(DomainError):
        _scan_windows(20.0, 10.0, 0.01, 1e-8, ev)


@pytest.mark.slow
def test_first_window_reproduced():
    ws = find_negative_windows(682112.5, 682113.5, 0.01, 1e-8)
    assert len(ws) == 1
    w = ws[0]
    assert abs(w.t_start - FIRST_WINDOW[0]) < 2e-8
    assert abs(w.t_end - FIRST_WINDOW[1]) < 2e-8
    assert abs(w.t_min - FIRST_WINDOW_ARGMIN) < 1e-4
    assert abs(w.min_value - FIRST_WINDOW_MIN) < 1e-6
    assert w.length == w.t_end - w.t_start
    assert w.t_start < w.t_min < w.t_end and w.min_value < 0
    # positive flanks
    assert re_zeta_line(w.t_start - 1e-4) > 0
    assert re_zeta_line(w.t_end + 1e-4) > 0
    # the reported minimum really is the floor of the window
    rng = np.random.default_rng(7)
    for t in rng.uniform(w.t_start, w.t_end, 20):
        assert re_zeta_line(t) >= w.min_value - 1e-9


@pytest.mark.slow
def test_deep_window_example():
    # the deepest dip in the reference table's first ten rows
    ws = find_negative_windows(2195056.3, 2195057.3, 0.01, 1e-6)
    assert len(ws) == 1
    w = ws[0]
    assert abs(w.t_min - 2195056.7909) < 1e-3
    assert abs(w.min_value - (-0.0755)) < 5e-5
    assert abs(w.length - 0.2718) < 5e-4
    rng = np.random.default_rng(11)
    for t in rng.uniform(w.t_start, w.t_end, 20):
        assert re_zeta_line(t) >= w.min_value - 1e-9


@pytest.mark.slow
def test_checkpoint_resume_threads_deterministic(tmp_path):
    # one serial checkpointed run, one 4-thread run, one resumed run:
    # all three must agree bit for bit
    args = (682110.0, 682120.0, 0.0005, 1e-8)
    cp = tmp_path / "scan.ckpt"
    ev1 = _FastZeta()
    ws1 = _scan_windows(*args, ev1, checkpoint=str(cp), confirm=False)
    assert len(ws1) == 1

    ev2 = _FastZeta()
    ws2 = _scan_windows(*args, ev2, threads=4, confirm=False)
    assert ws1 == ws2

    recs = [json.loads(line) for line in cp.read_text().splitlines()]
    assert all(r["schema"] == 1 for r in recs)
    assert recs[-1]["blocks_done"] * 4096 >= 20001
    assert recs[-1]["t_done"] == 682120.0
    assert [NegativeWindow.from_dict(d) for d in recs[-1]["windows"]] == ws1
    assert recs[0]["blocks_done"] < recs[-1]["blocks_done"]

    # resume from the first (partial) record only
    part = tmp_path / "partial.ckpt"
    part.write_text(json.dumps(recs[0]) + "\n")
    ev3 = _FastZeta()
    ws3 = _scan_windows(*args, ev3, checkpoint=str(part), confirm=False)
    assert ws3 == ws1

    # a torn final line is skipped, the last good record wins
    torn = tmp_path / "torn.ckpt"
    torn.write_text(cp.read_text() + '{"schema": 1, "blocks_do')
    ev4 = _FastZeta()
    ws4 = _scan_windows(*args, ev4, checkpoint=str(torn), confirm=False)
    assert ws4 == ws1

    # a checkpoint from different parameters is refused
    with pytest.raises(DomainError):
        _scan_windows(682110.0, 682120.0, 0.0005, 1e-7, _FastZeta(),
                      checkpoint=str(cp), confirm=False)


def test_empirical_d():
    assert empirical_d([], 100.0) == 0.0
    w = NegativeWindow(10.0, 12.0, 11.0, -0.5, 2.0)
    assert empirical_d([w], 200.0) == pytest.approx(0.01)
    with pytest.raises(DomainError):
        empirical_d([w], 0.0)
    with pytest.raises(DomainError):
        empirical_d([w], 11.0)  # window sticks out past T


def test_empirical_d_reference_table():
    ws = [NegativeWindow(t - l / 2, t + l / 2, t, v, l) for t, v, l in ROWS]
    d = empirical_d(ws, 16_656_259.0)
    assert 3.8e-7 < d < 4.0e-7


def test_window_dict_round_trip():
    w = NegativeWindow(1.0, 2.0, 1.5, -0.25, 1.0)
    assert NegativeWindow.from_dict(w.as_dict()) == w


def test_scan_clean_range():
    rep = scan(10.0, 60.0)
    assert rep.windows == []
    assert rep.empirical_d == 0.0
    assert len(rep.certified) == 1
    c = rep.certified[0]
    assert c.t_lo == 10.0 and c.t_hi == 60.0
    assert rep.evaluations > 0


@pytest.mark.slow
def test_scan_across_first_window():
    rep = scan(682112.5, 682113.5, 0.01, 1e-8)
    assert len(rep.windows) == 1
    w = rep.windows[0]
    assert abs(w.t_start - FIRST_WINDOW[0]) < 2e-8
    assert rep.empirical_d == pytest.approx(w.length / 1.0)
    # certified pieces never intrude into the window
    for c in rep.certified:
        assert c.t_hi <= w.t_start or c.t_lo >= w.t_end
        assert 682112.5 <= c.t_lo < c.t_hi <= 682113.5
    # leading piece: starts at the range edge, stalls short of the window
    lead = rep.certified[0]
    assert lead.t_lo == 682112.5
    assert 682112.7 < lead.t_hi < FIRST_WINDOW[0]
    # trailing piece reaches the far edge
    assert rep.certified[-1].t_hi == 682113.5