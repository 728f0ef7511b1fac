"""Tests for pilot synthesis, trials, and the Monte Carlo sweep."""

import math

import numpy as np
import pytest

from ris_chanest import (
    ChannelRealization,
    NoiseModel,
    RngStream,
    composite_vector,
    dft_pattern,
    make_config,
    monte_carlo_sweep,
    mvu_dft,
    predict_nmse,
    prepare_sweep,
    run_trial,
    snr_db_to_n0,
    synthesize_pilots,
)
from ris_chanest.sim import _noise_stream_id
from helpers import random_unit_modulus


def _direct_only_channel(h_direct):
    m = h_direct.shape[0]
    cascade = np.zeros((m, 0), dtype=complex)
    return ChannelRealization(
        h_direct=h_direct,
        h_ris=np.zeros(0, dtype=complex),
        los_bs_ris=np.zeros((m, 0), dtype=complex),
        cascade=cascade,
        composite=composite_vector(h_direct, cascade),
    )


class TestSynthesizePilots:
    def test_noise_free_direct_only_repeats_direct_channel(self):
        h = np.array([1 + 1j, -2.0, 0.5j])
        ch = _direct_only_channel(h)
        pat = dft_pattern(4, 0)
        y = synthesize_pilots(ch, pat, np.ones(4), 0.0, RngStream(0, 0))
        assert np.allclose(y.reshape(4, 3), np.tile(h, (4, 1)), atol=1e-14)

    def test_noise_free_loop_closure(self):
        cfg = make_config(m=3, n=5, trials=1, snr_grid_db=(0.0,), estimators=("mvu-dft",))
        setup = prepare_sweep(cfg)
        from ris_chanest import sample_realization

        ch = sample_realization(cfg.losses, setup.los_bs_ris, RngStream(0, 99))
        y = synthesize_pilots(ch, setup.patterns["dft"], setup.pilots, 0.0, RngStream(0, 1))
        est = mvu_dft(y, setup.patterns["dft"])
        assert np.linalg.norm(est.h_hat - ch.composite) <= 1e-12 * np.linalg.norm(ch.composite)

    def test_despreading_cancels_pilot_phases(self):
        rng = np.random.default_rng(8)
        cfg = make_config(m=2, n=3, trials=1, snr_grid_db=(0.0,), estimators=("mvu-dft",))
        setup = prepare_sweep(cfg)
        from ris_chanest import sample_realization

        ch = sample_realization(cfg.losses, setup.los_bs_ris, RngStream(3, 4))
        pat = setup.patterns["dft"]
        ones = synthesize_pilots(ch, pat, np.ones(pat.tau_p), 0.0, RngStream(0, 1))
        phased = synthesize_pilots(
            ch, pat, random_unit_modulus(rng, pat.tau_p), 0.0, RngStream(0, 1)
        )
        assert np.allclose(ones, phased, atol=1e-12)

    def test_rejects_dimension_mismatch(self):
        ch = _direct_only_channel(np.ones(3, dtype=complex))
        with pytest.raises(ValueError):
            synthesize_pilots(ch, dft_pattern(4, 2), np.ones(4), 0.0, RngStream(0, 0))
        with pytest.raises(ValueError):
            synthesize_pilots(ch, dft_pattern(4, 0), np.ones(3), 0.0, RngStream(0, 0))

    def test_patterns_share_the_trial_noise_draw(self):
        # Reconstructing the additive noise from observations built with the
        # same noise stream key must give the same values for both patterns.
        cfg = make_config(
            m=2, n=4, trials=1, snr_grid_db=(0.0,),
            estimators=("mvu-onoff", "mvu-dft"),
        )
        setup = prepare_sweep(cfg)
        from ris_chanest import sample_realization

        ch = sample_realization(cfg.losses, setup.los_bs_ris, RngStream(1, 5))
        h_comp = np.concatenate([ch.h_direct[:, None], ch.cascade], axis=1)
        noises = {}
        for kind, pat in setup.patterns.items():
            y = synthesize_pilots(ch, pat, setup.pilots, 1.0, RngStream(1, _noise_stream_id(0)))
            signal = (h_comp @ pat.matrix.T).ravel(order="F")
            noises[kind] = y - signal
        assert np.allclose(noises["onoff"], noises["dft"], atol=1e-12)


class TestRunTrial:
    def test_deterministic_per_trial_key(self):
        cfg = make_config(m=2, n=3, trials=10, snr_grid_db=(0.0,),
                          estimators=("mvu-onoff", "mvu-dft", "mmse"))
        setup = prepare_sweep(cfg)
        a = run_trial(cfg, 1.0, 4, setup)
        b = run_trial(cfg, 1.0, 4, setup)
        for name in cfg.estimators:
            assert np.array_equal(a.sq_errors[name], b.sq_errors[name])

    def test_noise_free_errors_vanish(self):
        cfg = make_config(m=3, n=4, trials=1, snr_grid_db=(0.0,), estimators=("mvu-dft",))
        setup = prepare_sweep(cfg)
        result = run_trial(cfg, 0.0, 0, setup)
        norm2 = np.linalg.norm(
            np.concatenate([setup.los_bs_ris.ravel(), np.ones(1)])
        )
        assert np.all(result.sq_errors["mvu-dft"] <= 1e-18 * max(norm2, 1.0))

    def test_onoff_errors_dominate_dft_errors_on_average(self):
        cfg = make_config(
            m=2, n=7, trials=1000, snr_grid_db=(0.0,),
            estimators=("mvu-onoff", "mvu-dft"),
        )
        setup = prepare_sweep(cfg)
        onoff = dft = 0.0
        for t in range(cfg.trials):
            result = run_trial(cfg, 1.0, t, setup)
            onoff += float(np.sum(result.sq_errors["mvu-onoff"]))
            dft += float(np.sum(result.sq_errors["mvu-dft"]))
        assert onoff > dft

    def test_out_of_range_trial_rejected(self):
        cfg = make_config(m=2, n=3, trials=5, snr_grid_db=(0.0,), estimators=("mvu-dft",))
        setup = prepare_sweep(cfg)
        with pytest.raises(ValueError):
            run_trial(cfg, 1.0, 5, setup)


class TestMonteCarloSweep:
    def test_single_noiseless_trial_gives_zero_nmse(self):
        cfg = make_config(
            m=2, n=3, trials=1, snr_grid_db=(math.inf,),
            estimators=("mvu-onoff", "mvu-dft", "mmse"),
        )
        curves = monte_carlo_sweep(cfg)
        assert snr_db_to_n0(math.inf) == 0.0
        for point in curves[0].per_estimator.values():
            assert point.direct_emp <= 1e-16
            assert point.cascade_emp <= 1e-16
            assert point.direct_cf == 0.0
            assert point.cascade_cf == 0.0

    def test_empirical_tracks_closed_form(self):
        cfg = make_config(
            m=4, n=9, tau_p=10, trials=3000, snr_grid_db=(0.0,), master_seed=7,
            estimators=("mvu-onoff", "mvu-dft", "mmse"),
        )
        (curve,) = monte_carlo_sweep(cfg)
        for name, point in curve.per_estimator.items():
            assert point.direct_emp == pytest.approx(point.direct_cf, rel=0.10)
            assert point.cascade_emp == pytest.approx(point.cascade_cf, rel=0.10)

    def test_nmse_monotone_in_snr(self):
        cfg = make_config(
            m=2, n=5, trials=400, snr_grid_db=(-10.0, 0.0, 10.0), master_seed=3,
            estimators=("mvu-dft", "mmse"),
        )
        curves = monte_carlo_sweep(cfg)
        for name in cfg.estimators:
            for attr in ("direct_emp", "cascade_emp", "direct_cf", "cascade_cf"):
                series = [getattr(c.per_estimator[name], attr) for c in curves]
                assert all(a >= b for a, b in zip(series, series[1:]))

    def test_bit_identical_across_thread_counts(self):
        cfg = make_config(m=2, n=3, trials=60, snr_grid_db=(0.0, 10.0), master_seed=5,
                          estimators=("mvu-dft", "mmse"))
        serial = monte_carlo_sweep(cfg, threads=1)
        parallel = monte_carlo_sweep(cfg, threads=2)
        for a, b in zip(serial, parallel):
            for name in cfg.estimators:
                assert a.per_estimator[name] == b.per_estimator[name]

    def test_adding_estimators_does_not_perturb_existing_curves(self):
        base = make_config(m=2, n=3, trials=50, snr_grid_db=(0.0,), estimators=("mvu-dft",))
        wide = make_config(
            m=2, n=3, trials=50, snr_grid_db=(0.0,),
            estimators=("mvu-onoff", "mvu-dft", "mmse"),
        )
        a = monte_carlo_sweep(base)[0].per_estimator["mvu-dft"]
        b = monte_carlo_sweep(wide)[0].per_estimator["mvu-dft"]
        assert a == b

    def test_resample_los_changes_results_but_stays_deterministic(self):
        fixed = make_config(m=2, n=3, trials=30, snr_grid_db=(0.0,), estimators=("mmse",))
        moving = make_config(
            m=2, n=3, trials=30, snr_grid_db=(0.0,), estimators=("mmse",), resample_los=True
        )
        a = monte_carlo_sweep(moving)[0].per_estimator["mmse"]
        b = monte_carlo_sweep(moving)[0].per_estimator["mmse"]
        c = monte_carlo_sweep(fixed)[0].per_estimator["mmse"]
        assert a == b
        assert a != c


class TestSystemConfigValidation:
    def test_rejects_short_training(self):
        with pytest.raises(ValueError):
            make_config(n=50, tau_p=40)

    def test_rejects_onoff_estimator_with_extra_pilots(self):
        with pytest.raises(ValueError):
            make_config(n=5, tau_p=8, estimators=("mvu-onoff",))

    def test_rejects_non_unit_pilot(self):
        with pytest.raises(ValueError, match="non-unit pilot"):
            make_config(n=2, tau_p=3, pilots=(1.0, 0.5, 1.0))

    def test_rejects_bad_trials_and_seed(self):
        with pytest.raises(ValueError):
            make_config(trials=0)
        with pytest.raises(ValueError):
            make_config(master_seed=-1)

    def test_rejects_unknown_estimator(self):
        with pytest.raises(ValueError):
            make_config(estimators=("kalman",))

    def test_rejects_degenerate_power_split(self):
        with pytest.raises(ValueError):
            make_config(beta_bs=1.0)

    def test_default_estimators_follow_pattern(self):
        assert make_config().estimators == ("mvu-dft", "mmse")
        assert make_config(pattern="onoff").estimators == ("mvu-onoff",)

    def test_snr_grid_default(self):
        cfg = make_config()
        assert cfg.snr_grid_db == tuple(float(s) for s in range(-20, 25, 5))
        assert len(cfg.snr_grid_db) == 9


class TestEmpiricalErrorStatistics:
    def test_ls_dft_error_covariance_is_white(self):
        # error covariance of the DFT-pattern LS estimator is (n0/tau_p) I
        cfg = make_config(m=3, n=4, trials=4000, snr_grid_db=(0.0,), master_seed=21,
                          estimators=("mvu-dft",))
        setup = prepare_sweep(cfg)
        from ris_chanest import sample_realization

        n0 = 1.3
        dim = cfg.m * (cfg.n + 1)
        errs = np.empty((cfg.trials, dim), dtype=complex)
        for t in range(cfg.trials):
            ch = sample_realization(cfg.losses, setup.los_bs_ris, RngStream(cfg.master_seed, 2 * t))
            y = synthesize_pilots(
                ch, setup.patterns["dft"], setup.pilots, n0, RngStream(cfg.master_seed, 2 * t + 1)
            )
            errs[t] = mvu_dft(y, setup.patterns["dft"]).h_hat - ch.composite
        cov = errs.conj().T @ errs / cfg.trials
        target = n0 / cfg.tau_p
        diag = np.real(np.diag(cov))
        assert np.all(np.abs(diag - target) < 0.15 * target)
        off = cov - np.diag(np.diag(cov))
        assert np.max(np.abs(off)) < 0.15 * target
        # unbiasedness: mean error norm within 4 sigma of its null value
        mean_err = errs.mean(axis=0)
        bound = 4.0 * math.sqrt(target * dim / cfg.trials)
        assert np.linalg.norm(mean_err) <= bound
