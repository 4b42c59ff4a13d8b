mod common;

use std::f64::consts::TAU;

use common::loglog_slope;
use faer::Mat;
use floquet_core::fgr::*;
use floquet_core::linalg::SplitComplex;
use floquet_core::pauli::bch::magnus_truncation;
use floquet_core::pauli::model::{build_drive_k, build_h0, tilted_magnetization};
use floquet_core::spectral::*;
use floquet_core::{Error, Exec, ModelParams, PauliOperator, SectorBasis};
use proptest::prelude::*;

fn params(n: usize, tau: f64) -> ModelParams {
    ModelParams::new(n, tau).unwrap()
}

fn off_diagonal_max(m: &Mat<f64>) -> f64 {
    let mut out = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                out = out.max(m[(i, j)].abs());
            }
        }
    }
    out
}

#[test]
fn zero_amplitude_has_no_transitions() {
    let basis = SectorBasis::new(8).unwrap();
    let model = fgr_rates(&params(8, 0.9), 0.0, &basis).unwrap();
    assert!(off_diagonal_max(&model.rates) < 1e-20);
    assert_eq!(model.delta, 0.28);
    assert_eq!(model.period, 1.8);
    assert!((model.omega - std::f64::consts::PI / 0.9).abs() < 1e-15);
}

#[test]
fn rates_are_nonnegative_symmetric_with_zero_diagonal() {
    let basis = SectorBasis::new(8).unwrap();
    let model = fgr_rates(&params(8, 1.1), 0.3, &basis).unwrap();
    let d = model.dim();
    let scale = off_diagonal_max(&model.rates);
    assert!(scale > 0.0);
    for j in 0..d {
        assert_eq!(model.rates[(j, j)], 0.0);
        for k in 0..d {
            assert!(model.rates[(j, k)] >= 0.0);
            assert!((model.rates[(j, k)] - model.rates[(k, j)]).abs() < 1e-12 * scale);
        }
    }
    let span = model.energies[d - 1] - model.energies[0];
    let (lo, hi) = model.photon_window;
    assert_eq!(lo, -hi);
    assert_eq!(hi, ((span + 6.0 * model.delta) / model.omega).floor() as i64);
}

#[test]
fn rates_scale_quadratically_in_amplitude() {
    let basis = SectorBasis::new(8).unwrap();
    let p = params(8, 0.9);
    let (small, large) = (
        fgr_rates(&p, 0.01, &basis).unwrap(),
        fgr_rates(&p, 0.1, &basis).unwrap(),
    );
    let d = small.dim();
    let mut slopes = Vec::new();
    for j in 0..d {
        for k in 0..d {
            if j != k && small.rates[(j, k)] > 0.0 {
                slopes.push((large.rates[(j, k)] / small.rates[(j, k)]).log10());
            }
        }
    }
    slopes.sort_by(f64::total_cmp);
    let median = slopes[slopes.len() / 2];
    assert!((median - 2.0).abs() < 0.1, "median element slope {median}");
}

#[test]
fn weights_match_first_order_perturbation_theory() {
    // <E_j'|U|E_j> = -i eps K_j'j e^{..} F(dE) + O(eps^2), F(w) = int_0^{2 tau} g(t) e^{i w t} dt.
    let (n, tau, eps) = (8, 0.9, 1e-3);
    let p = params(n, tau);
    let basis = SectorBasis::new(n).unwrap();
    let sys = DeformedSystem::new(&p, eps, &basis).unwrap();
    let k = SectorOperator::new(&build_drive_k(&p).unwrap(), &basis)
        .unwrap()
        .to_dense()
        .unwrap();
    let kh = floquet_core::linalg::congruence(&sys.h0.vectors, &k);
    let f = |w: f64| {
        if w.abs() < 1e-12 {
            0.0
        } else {
            (2.0 * (w * tau).sin() / w - 4.0 * (w * tau / 2.0).sin() / w).abs()
        }
    };
    let weights = sys.weights();
    let d = sys.h0.len();
    let mut predicted = Mat::<f64>::zeros(d, d);
    let mut top = 0.0f64;
    for j in 0..d {
        for jp in 0..d {
            if j != jp {
                let de = sys.h0.energies[jp] - sys.h0.energies[j];
                predicted[(jp, j)] = (eps * kh[(jp, j)] * f(de)).powi(2);
                top = top.max(predicted[(jp, j)]);
            }
        }
    }
    let mut checked = 0;
    for j in 0..d {
        for jp in 0..d {
            if j != jp && predicted[(jp, j)] > 1e-3 * top {
                let r = weights[(jp, j)] / predicted[(jp, j)];
                assert!((r - 1.0).abs() < 0.05, "({jp},{j}) ratio {r}");
                checked += 1;
            }
        }
    }
    assert!(checked > d);
}

#[test]
fn size_guard() {
    let basis = SectorBasis::new(15).unwrap();
    assert!(matches!(
        fgr_rates(&params(15, 0.9), 0.3, &basis),
        Err(Error::SizeGuard { .. })
    ));
}

#[test]
fn master_equation_conserves_probability() {
    let basis = SectorBasis::new(8).unwrap();
    let model = fgr_rates(&params(8, 1.1), 0.5, &basis).unwrap();
    let times: Vec<f64> = (0..50).map(|i| i as f64 * 20.0).collect();
    let traj = evolve_master(&model, 0, &times).unwrap();
    for p in &traj.probabilities {
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p.iter().all(|x| (-1e-12..=1.0 + 1e-12).contains(x)));
    }
}

#[test]
fn master_rejects_bad_input() {
    let basis = SectorBasis::new(6).unwrap();
    let model = fgr_rates(&params(6, 1.1), 0.5, &basis).unwrap();
    assert!(evolve_master(&model, model.dim(), &[1.0]).is_err());
    assert!(evolve_master(&model, 0, &[2.0, 1.0]).is_err());
}

#[test]
fn fgr_fidelity_starts_at_one_and_decays() {
    let basis = SectorBasis::new(8).unwrap();
    let model = fgr_rates(&params(8, 1.1), 0.3, &basis).unwrap();
    let j = mid_spectrum_index(&model.energies);
    let f = fgr_fidelity(&model, j, 200).unwrap();
    assert_eq!(f[0], 1.0);
    assert!(f.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(f[200] < f[1]);
}

#[test]
fn spectral_function_of_identity_is_one_gaussian() {
    let basis = SectorBasis::new(6).unwrap();
    let spec = EffectiveSpectrum::new(&build_h0(&params(6, 0.9)).unwrap(), &basis).unwrap();
    let sf = spectral_function(
        &spec,
        &PauliOperator::identity(6).scaled_real(0.7),
        &basis,
        &[0, 3],
        0.2,
    )
    .unwrap();
    for (i, phi) in sf.phi.iter().enumerate() {
        for (w, f) in sf.omega.iter().zip(phi) {
            assert!((f - 0.49 * gaussian_delta(*w, 0.2)).abs() < 1e-12);
        }
        assert!((sf.integral(i) - 0.49).abs() < 1e-9);
    }
}

#[test]
fn spectral_sum_rule() {
    let n = 10;
    let p = params(n, 0.9);
    let basis = SectorBasis::new(n).unwrap();
    let spec = EffectiveSpectrum::new(&build_h0(&p).unwrap(), &basis).unwrap();
    let k = build_drive_k(&p).unwrap();
    let selected = [0, spec.mid_index(), spec.len() - 1];
    let sf = spectral_function(&spec, &k, &basis, &selected, DELTA_PER_SITE * n as f64).unwrap();
    let k2 = SectorOperator::new(&k.product(&k).unwrap(), &basis).unwrap();
    for (i, &j) in selected.iter().enumerate() {
        let want = k2.expectation(&spec.vector(j), Exec::default()).unwrap();
        assert!(
            (sf.integral(i) - want).abs() < 1e-3,
            "j={j}: {} vs {want}",
            sf.integral(i)
        );
        assert!(sf.phi[i].iter().all(|x| *x >= 0.0));
    }
    assert!((sf.spacing() - DELTA_PER_SITE * n as f64 / 10.0).abs() < 1e-12);
}

#[test]
fn ground_state_spectral_function_dips_below_the_gap() {
    let n = 12;
    let p = params(n, 0.9);
    let basis = SectorBasis::new(n).unwrap();
    let spec = EffectiveSpectrum::new(&build_h0(&p).unwrap(), &basis).unwrap();
    let sf = spectral_function(
        &spec,
        &build_drive_k(&p).unwrap(),
        &basis,
        &[0],
        DELTA_PER_SITE * n as f64,
    )
    .unwrap();
    let gap = spec.energies[1] - spec.energies[0];
    let window: Vec<usize> = (0..sf.omega.len())
        .filter(|&i| sf.omega[i] >= 0.0 && sf.omega[i] <= gap)
        .collect();
    let (first, last) = (window[0], *window.last().unwrap());
    let dip = |f: &[f64]| {
        let lowest = window.iter().map(|&i| f[i]).fold(f64::INFINITY, f64::min);
        lowest / f[first].min(f[last])
    };
    let ground = dip(&sf.phi[0]);
    let average = dip(&sf.phi_average);
    assert!(ground < 0.9, "ground-state dip ratio {ground}");
    assert!(average > 0.95, "state-averaged dip ratio {average}");
}

fn identity_delta_u(energies: Vec<f64>, tau: f64) -> DeltaUMatrix {
    let d = energies.len();
    DeltaUMatrix {
        tau,
        order: 1,
        energies,
        eigenvectors: Mat::identity(d, d),
        elements: SplitComplex::identity(d),
    }
}

#[test]
fn identity_delta_u_gives_unit_fidelity() {
    let du = identity_delta_u(vec![-1.0, -0.3, 0.4, 1.7], 0.5);
    let pf = perturbative_fidelity(&du, 1, &[0, 1, 10, 1000]).unwrap();
    assert!(pf.log_fidelity.iter().all(|x| *x == 0.0));
    assert_eq!(pf.long_time, 0.0);
}

#[test]
fn resonances_are_flagged() {
    let du = identity_delta_u(vec![0.0, 1.0, TAU], 1.0);
    match perturbative_fidelity(&du, 0, &[1]) {
        Err(Error::Resonant(pairs)) => assert_eq!(pairs, vec![(0, 2)]),
        other => panic!("expected resonance flag, got {other:?}"),
    }
}

#[test]
fn long_window_mean_equals_long_time_formula() {
    let basis = SectorBasis::new(10).unwrap();
    let du = delta_u_matrix(&params(10, 0.5), 1, &basis).unwrap();
    for j in [0, 5, du.dim() / 2] {
        let long = perturbative_fidelity(&du, j, &[]).unwrap().long_time;
        let mean = perturbative_window_mean(&du, j, 1e12).unwrap();
        assert!((mean - long).abs() < 1e-9 * long.max(1e-300) + 1e-18, "j={j}");
        // Finite window: closed form against the direct average.
        let grid: Vec<usize> = (0..500).collect();
        let direct = perturbative_fidelity(&du, j, &grid)
            .unwrap()
            .log_fidelity
            .iter()
            .sum::<f64>()
            / 500.0;
        let closed = perturbative_window_mean(&du, j, 500.0).unwrap();
        assert!((direct - closed).abs() < 1e-9 * direct);
    }
}

fn exact_log_fidelity(p: &ModelParams, basis: &SectorBasis, v: &[f64], n_max: usize) -> Vec<f64> {
    let sys = SectorFloquetBuilder::new(p, basis)
        .unwrap()
        .eigensystem(p.tau, v)
        .unwrap();
    sys.fidelity_series(n_max).iter().map(|f| -f.ln()).collect()
}

fn window_mean(x: &[f64], lo: usize, hi: usize) -> f64 {
    x[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
}

#[test]
fn perturbative_fidelity_tracks_exact_for_ground_state() {
    let mut plateaus = Vec::new();
    for n in [8, 10, 12] {
        let p = params(n, 0.5);
        let basis = SectorBasis::new(n).unwrap();
        let du = delta_u_matrix(&p, 1, &basis).unwrap();
        let exact = exact_log_fidelity(
            &p,
            &basis,
            &du.eigenvectors.col(0).iter().cloned().collect::<Vec<_>>(),
            2000,
        );
        let grid: Vec<usize> = (0..=2000).collect();
        let pf = perturbative_fidelity(&du, 0, &grid).unwrap();
        for (lo, hi) in [(1, 10), (11, 100), (101, 1000), (1001, 2000)] {
            let r = window_mean(&pf.log_fidelity, lo, hi) / window_mean(&exact, lo, hi);
            assert!((r - 1.0).abs() < 0.1, "L={n} window [{lo},{hi}] ratio {r}");
        }
        plateaus.push(pf.long_time / n as f64);
    }
    let spread = plateaus.iter().cloned().fold(0.0, f64::max) / plateaus.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1.05, "plateau per site varies: {plateaus:?}");
}

#[test]
fn mid_state_log_fidelity_grows_linearly() {
    let n = 10;
    let p = params(n, 0.5);
    let basis = SectorBasis::new(n).unwrap();
    let du = delta_u_matrix(&p, 1, &basis).unwrap();
    let j = mid_spectrum_index(&du.energies);
    let grid: Vec<usize> = (1..=20).collect();
    let y = perturbative_fidelity(&du, j, &grid).unwrap().log_fidelity;
    let x: Vec<f64> = grid.iter().map(|&v| v as f64).collect();
    let (mx, my) = (x.iter().sum::<f64>() / 20.0, y.iter().sum::<f64>() / 20.0);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    assert!(slope > 0.0 && r2 > 0.95, "slope {slope} R^2 {r2}");
}

#[test]
fn tilted_magnetization_drops_by_two_per_excitation() {
    let n = 12;
    let p = params(n, 0.5);
    let basis = SectorBasis::new(n).unwrap();
    let spec = EffectiveSpectrum::new(&magnus_truncation(&p, 1).unwrap(), &basis).unwrap();
    let m = SectorOperator::new(&tilted_magnetization(n), &basis).unwrap();
    let mut values: Vec<f64> = (0..12)
        .map(|j| m.expectation(&spec.vector(j), Exec::default()).unwrap())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let mut clusters: Vec<Vec<f64>> = vec![vec![values[0]]];
    for w in values.windows(2) {
        if w[0] - w[1] > 1.0 {
            clusters.push(Vec::new());
        }
        clusters.last_mut().unwrap().push(w[1]);
    }
    let means: Vec<f64> = clusters
        .iter()
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect();
    assert!(means.len() >= 3, "clusters {means:?}");
    for w in means.windows(2) {
        assert!((w[0] - w[1] - 2.0).abs() < 0.5, "cluster means {means:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn master_equation_stays_on_the_simplex(
        entries in prop::collection::vec(0.0f64..2.0, 15),
        j0 in 0usize..6,
    ) {
        let d = 6;
        let mut w = Mat::<f64>::zeros(d, d);
        let mut it = entries.iter();
        for j in 0..d {
            for k in j + 1..d {
                let v = *it.next().unwrap();
                w[(j, k)] = v;
                w[(k, j)] = v * 0.5;
            }
        }
        let model = FgrModel {
            n_sites: 2,
            tau: 1.0,
            epsilon: 0.1,
            delta: 0.1,
            period: 2.0,
            omega: std::f64::consts::PI,
            energies: (0..d).map(|i| i as f64).collect(),
            rates: w,
            photon_window: (0, 0),
        };
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let traj = evolve_master(&model, j0, &times).unwrap();
        for p in &traj.probabilities {
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|x| *x >= -1e-12 && *x <= 1.0 + 1e-12));
        }
    }
}
