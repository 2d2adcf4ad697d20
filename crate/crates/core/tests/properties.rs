use num_complex::Complex64;
use proptest::prelude::*;

use resetcorr::analysis::{
    detect_revival_peaks, fit_peak_scaling, PeakOptions, RunConfig, SweepGrid,
};
use resetcorr::correlations::{
    concurrence, decoherence_factor, mode_overlap_mixed, mode_overlap_pure, quantum_discord,
    reduced_two_qubit_state, DecoherenceFactor, ModeOverlap,
};
use resetcorr::io::{ResultTable, TableFormat};
use resetcorr::modes::{
    instantaneous_eigenbasis, project_to_instantaneous, BranchField, SpinorAmplitudes,
};
use resetcorr::reset::{reset_average_stream, ResetConfig};

fn spinor() -> impl Strategy<Value = SpinorAmplitudes> {
    (0.0..std::f64::consts::PI, -3.2..3.2f64, -3.2..3.2f64).prop_map(|(theta, p1, p2)| {
        SpinorAmplitudes::new(
            Complex64::from_polar((theta / 2.0).cos(), p1),
            Complex64::from_polar((theta / 2.0).sin(), p2),
        )
    })
}

proptest! {
    #[test]
    fn concurrence_is_bounded_and_monotone(a in 0.0..=1.0f64, d1 in 0.0..=1.0f64, d2 in 0.0..=1.0f64) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (c_lo, c_hi) = (concurrence(a, lo), concurrence(a, hi));
        prop_assert!((0.0..=1.0).contains(&c_lo) && (0.0..=1.0).contains(&c_hi));
        prop_assert!(c_lo <= c_hi);
        if a <= 1.0 / 3.0 {
            prop_assert_eq!(c_hi, 0.0);
        }
    }

    #[test]
    fn discord_is_bounded(a in 0.0..=1.0f64, d in 0.0..=1.0f64) {
        let qd = quantum_discord(a, d);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&qd), "QD({a}, {d}) = {qd}");
    }

    #[test]
    fn two_qubit_state_is_a_density_matrix(a in 0.0..=1.0f64, ln_d in -30.0..=0.0f64) {
        let state = reduced_two_qubit_state(a, &DecoherenceFactor::from_log(ln_d)).unwrap();
        let eig = state.eigenvalues();
        prop_assert!((eig.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(eig.iter().all(|&l| l >= -1e-12));
    }

    #[test]
    fn pure_and_density_overlaps_agree(p in spinor(), m in spinor(), k in 0.01..3.13f64, h in -5.0..5.0f64) {
        let pure = mode_overlap_pure(&p, &m).value();
        prop_assert!((0.0..=1.0).contains(&pure));
        prop_assert!((pure - mode_overlap_pure(&m, &p).value()).abs() < 1e-14);
        let basis = instantaneous_eigenbasis(k, h, &BranchField::bare()).unwrap();
        prop_assert!(basis.orthonormality_defect() < 1e-12);
        let pp = project_to_instantaneous(&p.projector(), &basis).unwrap();
        let mp = project_to_instantaneous(&m.projector(), &basis).unwrap();
        let mixed = mode_overlap_mixed(&pp, &mp).unwrap().value();
        prop_assert!((pure - mixed).abs() < 1e-10, "{pure} vs {mixed}");
    }

    #[test]
    fn decoherence_factor_is_the_product(values in prop::collection::vec(1e-6..=1.0f64, 1..40)) {
        let overlaps: Vec<ModeOverlap> =
            values.iter().map(|&v| ModeOverlap::from_raw(v).unwrap()).collect();
        let expected: f64 = values.iter().product();
        let got = decoherence_factor(&overlaps).modulus();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1e-300) + 1e-300);
    }

    #[test]
    fn reset_average_of_any_pure_path_is_a_state(
        rate in 0.0..5.0f64,
        w1 in -4.0..4.0f64,
        w2 in -4.0..4.0f64,
        n in 2usize..200,
    ) {
        let path = (0..=n).map(|j| {
            let s = 3.0 * j as f64 / n as f64;
            let psi = SpinorAmplitudes::new(
                Complex64::new((w1 * s).cos(), 0.0),
                Complex64::from_polar((w1 * s).sin(), w2 * s),
            );
            (s, psi.projector())
        });
        let samples = reset_average_stream(path.clone(), ResetConfig::new(rate).unwrap()).unwrap();
        for (sample, (_, original)) in samples.iter().zip(path) {
            prop_assert!(sample.rho.hermiticity_defect() < 1e-12);
            prop_assert!((sample.rho.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(sample.rho.eigenvalues().iter().all(|&l| l >= -1e-10));
            prop_assert!(!sample.renormalized);
            if rate == 0.0 {
                prop_assert_eq!(sample.rho.rho, original.rho);
            }
        }
    }

    #[test]
    fn tables_round_trip_exactly(
        rows in prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 3), 0..20),
        note in "[a-z ,\"]{0,12}",
    ) {
        let mut table = ResultTable::new(["x", "y", "z"]).with_metadata("note", note);
        for row in rows {
            table.push_row(row.into_iter().map(Into::into).collect());
        }
        for format in [TableFormat::Csv, TableFormat::Json] {
            let back = ResultTable::parse(&table.render(format), format).unwrap();
            prop_assert_eq!(&back, &table);
        }
    }

    #[test]
    fn revival_spacing_is_recovered(tau in 50.0..400.0f64, delta in 0.005..0.02f64) {
        let period = std::f64::consts::PI / (4.0 * tau * delta);
        prop_assume!(period < 0.6);
        let fields: Vec<f64> = (0..=8000).map(|j| -5.0 + 10.0 * j as f64 / 8000.0).collect();
        let values: Vec<f64> = fields.iter().map(|h| (4.0 * tau * delta * h).cos().abs()).collect();
        let spacing = detect_revival_peaks(&fields, &values, &PeakOptions::default())
            .mean_spacing()
            .unwrap();
        prop_assert!(((spacing - period) / period).abs() < 1e-2, "{spacing} vs {period}");
    }

    #[test]
    fn exact_exponentials_fit_perfectly(c0 in 0.05..1.0f64, k in 0.5..50.0f64) {
        let points: Vec<(f64, f64)> =
            [0.0, 0.01, 0.02, 0.04, 0.08].iter().map(|&r| (r, c0 * (-k * r).exp())).collect();
        let fit = fit_peak_scaling(&points).unwrap();
        prop_assert!((fit.slope + k).abs() < 1e-9 * k);
        prop_assert!((fit.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sweep_grids_are_canonical(
        rates in prop::collection::vec(prop::sample::select(vec![0.0, 0.001, 0.002, 0.004, 0.008]), 1..8),
        taus in prop::collection::vec(prop::sample::select(vec![0.1, 1.0, 250.0]), 1..4),
    ) {
        let grid = SweepGrid::new(rates.clone(), taus.clone(), vec![0.9]).unwrap();
        let points = grid.points();
        let key = |p: &resetcorr::analysis::SweepPoint| (p.r, p.tau, p.a);
        prop_assert!(points.windows(2).all(|w| key(&w[0]) < key(&w[1])));
        let mut unique_r = rates.clone();
        unique_r.sort_by(f64::total_cmp);
        unique_r.dedup();
        prop_assert_eq!(grid.rates(), &unique_r[..]);
        for p in &points {
            let config = p.apply(&RunConfig::figure_defaults(1.0).unwrap()).unwrap();
            prop_assert_eq!(config.reset.rate(), p.r);
            prop_assert_eq!(config.ramp.tau(), p.tau);
        }
    }
}
