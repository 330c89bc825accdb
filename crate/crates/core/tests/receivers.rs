mod common;

use common::*;
use fama_core::receivers::lemma_weights;
use fama_core::{
    build_pair, correlation_matrix, design_dc, design_geport, design_geport_traced, design_mrc, design_slow_fama,
    design_strategy, per_port_sinr, power_method_gen, sample_channels, sinr_drop_bound, sinr_drop_exact,
    sinr_of_design, solve_combiner, CMatrix, ChannelRealization, GeportOptions, HermitianMatrix, PortTopology,
    PowerOptions, ReceiverDesign, SignalMatrixPair, Strategy, VectorConvention, C64,
};
use proptest::prelude::*;
use rand::Rng;

const SNR_15DB: f64 = 31.622776601683793;

fn channels(n: usize, k: usize, seed: u64, trial: u64) -> ChannelRealization {
    let c = correlation_matrix(&PortTopology::line(n, 4.0).unwrap()).unwrap();
    sample_channels(&c, k, k, seed, trial).unwrap()
}

/// Independent SINR: signal over interference-plus-noise from the raw channel, unit `w`.
fn direct_sinr(h: &CMatrix, k: usize, ports: &[usize], w: &[C64], snr: f64) -> f64 {
    let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let gains: Vec<f64> = (0..h.cols())
        .map(|j| {
            ports
                .iter()
                .zip(w)
                .map(|(&p, wi)| wi.conj() * h[(p, j)] / norm)
                .sum::<C64>()
                .norm_sqr()
        })
        .collect();
    let interference: f64 = gains.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g).sum();
    gains[k] / (interference + 1.0 / snr)
}

/// Closed-form optimum on `ports` by an explicit inverse.
fn oracle_combiner_sinr(pair: &SignalMatrixPair, ports: &[usize]) -> f64 {
    let a: Vec<C64> = ports.iter().map(|&p| pair.desired().unwrap()[p]).collect();
    let b = pair.b().principal(ports);
    quad(&gauss_jordan_inverse(b.as_matrix()), &a).re
}

fn all_designs(h: &ChannelRealization, k: usize, snr: f64, l: usize) -> Vec<(Strategy, ReceiverDesign)> {
    let pair = build_pair(h, k, snr).unwrap();
    Strategy::ALL
        .iter()
        .map(|&s| (s, design_strategy(s, &pair, h, k, snr, l, &GeportOptions::default()).unwrap()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn achieved_sinr_matches_direct_evaluation(seed in any::<u64>(), l in 1usize..=5, k in 0usize..4) {
        let h = channels(16, 4, seed, 0);
        for (s, d) in all_designs(&h, k, SNR_15DB, l) {
            let via_lib = sinr_of_design(&h, k, &d, SNR_15DB);
            let direct = direct_sinr(h.user(k), k, &d.ports, &d.w, SNR_15DB);
            let rq = build_pair(&h, k, SNR_15DB).unwrap().restrict(&d.ports).rayleigh_quotient(&d.w);
            prop_assert!(rel_close(via_lib, d.achieved_sinr, 1e-12), "{s}: {via_lib} vs {}", d.achieved_sinr);
            prop_assert!(rel_close(via_lib, direct, 1e-12));
            prop_assert!(rel_close(via_lib, rq, 1e-12));
            let norm: f64 = d.w.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            prop_assert!(d.w[0].im.abs() <= 1e-12 * d.w[0].norm() || d.w[0].norm() < 1e-8);
        }
    }

    #[test]
    fn sinr_is_scale_invariant(seed in any::<u64>(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let h = channels(12, 4, seed, 1);
        let pair = build_pair(&h, 2, SNR_15DB).unwrap();
        let mut d = design_dc(&pair, &h, 2, SNR_15DB, 3).unwrap();
        let before = sinr_of_design(&h, 2, &d, SNR_15DB);
        let s = C64::new(re, im);
        d.w.iter_mut().for_each(|z| *z *= s);
        prop_assert!(rel_close(sinr_of_design(&h, 2, &d, SNR_15DB), before, 1e-12));
    }

    #[test]
    fn superset_never_hurts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pair = fama_pair(&mut r, 10, 3, 10.0);
        let mut ports: Vec<usize> = vec![r.random_range(0..10)];
        let mut last = solve_combiner(&pair, &ports).unwrap().sinr;
        for p in 0..10 {
            if ports.contains(&p) { continue; }
            ports.push(p);
            ports.sort_unstable();
            let next = solve_combiner(&pair, &ports).unwrap().sinr;
            prop_assert!(next >= last - 1e-10 * last.abs());
            last = next;
        }
    }

    #[test]
    fn rank_one_combiner_matches_inverse_oracle(seed in any::<u64>(), l in 1usize..=8) {
        let mut r = rng(seed);
        let pair = fama_pair(&mut r, 8, 3, 5.0);
        let ports: Vec<usize> = (0..l).collect();
        let c = solve_combiner(&pair, &ports).unwrap();
        prop_assert!(rel_close(c.sinr, oracle_combiner_sinr(&pair, &ports), 1e-10));
    }

    #[test]
    fn drop_bound_is_below_exact_and_tight_for_rank_one(seed in any::<u64>(), n in 2usize..=12) {
        let mut r = rng(seed);
        let pair = fama_pair(&mut r, n, 3, 10.0);
        for l in 0..n {
            let exact = sinr_drop_exact(&pair, l).unwrap();
            let bound = sinr_drop_bound(&pair, l).unwrap();
            // independent exact drop from explicit inverses
            let keep: Vec<usize> = (0..n).filter(|&i| i != l).collect();
            let all: Vec<usize> = (0..n).collect();
            let oracle = oracle_combiner_sinr(&pair, &all) - oracle_combiner_sinr(&pair, &keep);
            prop_assert!((exact - oracle).abs() <= 1e-8 * oracle_combiner_sinr(&pair, &all));
            prop_assert!(bound <= exact + 1e-9);
            prop_assert!(rel_close(bound, exact, 1e-8) || (bound - exact).abs() < 1e-12, "l={} {} vs {}", l, bound, exact);
        }
        let w = lemma_weights(&pair).unwrap();
        prop_assert_eq!(w.len(), n);
    }

    #[test]
    fn full_rank_bound_is_below_exact(seed in any::<u64>(), n in 2usize..=10) {
        let mut r = rng(seed);
        let pair = SignalMatrixPair::new(random_psd(&mut r, n), random_pd(&mut r, n, 0.3)).unwrap();
        for l in 0..n {
            let exact = sinr_drop_exact(&pair, l).unwrap();
            let bound = sinr_drop_bound(&pair, l).unwrap();
            prop_assert!(bound <= exact + 1e-9 * exact.abs().max(1.0), "l={} bound {} exact {}", l, bound, exact);
            prop_assert!(exact >= -1e-9);
        }
    }

    #[test]
    fn mrc_is_dominated_on_its_own_ports(seed in any::<u64>(), l in 1usize..=6) {
        let h = channels(20, 4, seed, 2);
        let pair = build_pair(&h, 0, SNR_15DB).unwrap();
        let mrc = design_mrc(&pair, l).unwrap();
        let best = solve_combiner(&pair, &mrc.ports).unwrap();
        prop_assert!(mrc.achieved_sinr <= best.sinr * (1.0 + 1e-12));
    }

    #[test]
    fn dc_picks_top_per_port_sinr(seed in any::<u64>(), l in 1usize..=8) {
        let h = channels(24, 4, seed, 3);
        let k = (seed % 4) as usize;
        let pair = build_pair(&h, k, SNR_15DB).unwrap();
        let d = design_dc(&pair, &h, k, SNR_15DB, l).unwrap();
        let mut ranked: Vec<(f64, usize)> = (0..24).map(|r| (per_port_sinr(&h, k, r, SNR_15DB), r)).collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut expected: Vec<usize> = ranked[..l].iter().map(|x| x.1).collect();
        expected.sort_unstable();
        prop_assert_eq!(&d.ports, &expected);
        if l == 1 {
            prop_assert!(rel_close(d.achieved_sinr, ranked[0].0, 1e-12));
            let slow = design_slow_fama(&h, k, SNR_15DB).unwrap();
            prop_assert_eq!(&slow.ports, &d.ports);
            prop_assert!((slow.spectral_efficiency() - d.spectral_efficiency()).abs() < 1e-12);
        }
    }

    #[test]
    fn full_rank_combiner_matches_power_method(seed in any::<u64>(), n in 2usize..=9) {
        let mut r = rng(seed);
        let pair = SignalMatrixPair::new(random_psd(&mut r, n), random_pd(&mut r, n, 0.3)).unwrap();
        let ports: Vec<usize> = (0..n).collect();
        let c = solve_combiner(&pair, &ports).unwrap();
        let p = power_method_gen(pair.a(), pair.b(), &PowerOptions::default()).unwrap();
        prop_assert!(rel_close(c.sinr, p.eigenvalue, 1e-8));
        prop_assert!(rel_close(pair.rayleigh_quotient(&c.w), c.sinr, 1e-10));
    }
}

#[test]
fn per_port_sinr_by_hand() {
    // One port, two users: h = [1+i, 2]; user 0 sees |1+i|^2 = 2 over 4 + 1/snr.
    let h = ChannelRealization::new(vec![CMatrix::from_row_major(1, 2, vec![C64::new(1.0, 1.0), C64::new(2.0, 0.0)])])
        .unwrap();
    assert!((per_port_sinr(&h, 0, 0, 2.0) - 2.0 / 4.5).abs() < 1e-15);
}

#[test]
fn single_user_two_ports_is_best_port_power() {
    let h = channels(2, 1, 5, 0);
    let snr = 10.0;
    let d = design_geport(&build_pair(&h, 0, snr).unwrap(), 1, &GeportOptions::default()).unwrap();
    let best = (0..2).map(|r| h.user(0)[(r, 0)].norm_sqr()).fold(0.0, f64::max);
    assert!(rel_close(d.achieved_sinr, snr * best, 1e-12));
}

#[test]
fn geport_beats_dc_on_most_trials() {
    let corr = correlation_matrix(&PortTopology::line(10, 4.0).unwrap()).unwrap();
    let mut wins = 0;
    let trials = 1000;
    for t in 0..trials {
        let h = sample_channels(&corr, 4, 4, 2024, t).unwrap();
        let pair = build_pair(&h, 0, SNR_15DB).unwrap();
        let g = design_geport(&pair, 2, &GeportOptions::default()).unwrap();
        let d = design_dc(&pair, &h, 0, SNR_15DB, 2).unwrap();
        if g.achieved_sinr >= d.achieved_sinr {
            wins += 1;
        }
    }
    eprintln!("geport >= dc on {wins}/{trials} trials");
    assert!(wins as f64 >= 0.6 * trials as f64);
}

#[test]
fn geport_trace_and_options() {
    let mut r = rng(3);
    let pair = fama_pair(&mut r, 12, 3, 20.0);
    let (d, trace) = design_geport_traced(&pair, 3, &GeportOptions::default()).unwrap();
    assert_eq!(d.ports.len(), 3);
    assert_eq!(trace.removed.len(), 9);
    assert!(trace.accumulated_loss.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert_eq!(trace.accumulated_loss[0], 0.0);
    let full = solve_combiner(&pair, &(0..12).collect::<Vec<_>>()).unwrap().sinr;
    assert!(rel_close(trace.eigenvalues[0], full, 1e-10));
    assert!(rel_close(trace.final_loss, full - d.achieved_sinr, 1e-9));
    let mut all: Vec<usize> = d.ports.iter().chain(&trace.removed).copied().collect();
    all.sort_unstable();
    assert_eq!(all, (0..12).collect::<Vec<_>>());

    // L = N: nothing to remove.
    let (keep, t) = design_geport_traced(&pair, 12, &GeportOptions::default()).unwrap();
    assert!(t.removed.is_empty());
    assert!(rel_close(keep.achieved_sinr, full, 1e-10));

    // stop_loss = 0 halts once any loss accrues.
    let opts = GeportOptions { stop_loss: Some(0.0), ..GeportOptions::default() };
    let (early, t) = design_geport_traced(&pair, 3, &opts).unwrap();
    assert_eq!(t.removed.len(), 1);
    assert_eq!(early.ports.len(), 11);

    for convention in VectorConvention::ALL {
        let opts = GeportOptions { convention, ..GeportOptions::default() };
        let g = design_geport(&pair, 3, &opts).unwrap();
        assert_eq!(g.ports.len(), 3);
        assert!(g.achieved_sinr > 0.0 && g.achieved_sinr <= full);
    }
}

#[test]
fn geport_structured_and_dense_paths_agree() {
    let mut r = rng(8);
    for _ in 0..20 {
        let pair = fama_pair(&mut r, 9, 3, 10.0);
        let dense = SignalMatrixPair::new(pair.a().clone(), pair.b().clone()).unwrap();
        let a = design_geport(&pair, 2, &GeportOptions::default()).unwrap();
        let b = design_geport(&dense, 2, &GeportOptions::default()).unwrap();
        assert_eq!(a.ports, b.ports);
        assert!(rel_close(a.achieved_sinr, b.achieved_sinr, 1e-8));
    }
}

#[test]
fn zero_desired_signal_is_degenerate_not_an_error() {
    let g = vec![cvec(&mut rng(1), 4)];
    let pair = SignalMatrixPair::from_columns(vec![C64::new(0.0, 0.0); 4], &g, 10.0).unwrap();
    let d = design_geport(&pair, 2, &GeportOptions::default()).unwrap();
    assert!(d.degenerate);
    assert_eq!(d.achieved_sinr, 0.0);
    let c = solve_combiner(&pair, &[0, 1]).unwrap();
    assert!(c.degenerate && c.sinr == 0.0);
    assert!(design_mrc(&pair, 2).unwrap().degenerate);
}

#[test]
fn invalid_inputs_are_rejected() {
    let h = channels(6, 2, 1, 0);
    let pair = build_pair(&h, 0, 1.0).unwrap();
    assert!(design_dc(&pair, &h, 0, 1.0, 0).is_err());
    assert!(design_dc(&pair, &h, 0, 1.0, 7).is_err());
    assert!(design_geport(&pair, 7, &GeportOptions::default()).is_err());
    assert!(build_pair(&h, 2, 1.0).is_err());
    assert!(solve_combiner(&pair, &[0, 0]).is_err());
    assert!(solve_combiner(&pair, &[6]).is_err());
    assert!(SignalMatrixPair::new(HermitianMatrix::identity(2), HermitianMatrix::identity(3)).is_err());
}
