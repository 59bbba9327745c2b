use ssa_core::empirics::{
    apply_filter, generate, heavy_tail_experiment, sample_acf1, sample_sign_accuracy, SeriesDiagnostics,
    SeriesKind,
};
use ssa_core::spectral::acf1;
use ssa_core::ssa::{ht_from_rho, sign_accuracy};

#[test]
fn heavy_tail_table_is_reproducible() {
    let filters = vec![("ma3".to_string(), vec![1.0, 1.0, 1.0]), ("diff".to_string(), vec![1.0, -1.0])];
    let a = heavy_tail_experiment(&filters, &[3.0, 30.0], 50_000, 4).unwrap();
    let b = heavy_tail_experiment(&filters, &[3.0, 30.0], 50_000, 4).unwrap();
    assert_eq!(a, b);
    let labels: Vec<&str> = a.rows.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["t(3)", "t(30)", "gaussian", "theoretical"]);
    let mut csv = Vec::new();
    a.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("distribution,ma3,diff\n"));
    // MA(3): ρ = 2/3
    let theory = a.row("theoretical").unwrap().values[0];
    assert!((theory - ht_from_rho(2.0 / 3.0).unwrap()).abs() < 1e-12);
    assert!((a.row("gaussian").unwrap().values[0] / theory - 1.0).abs() < 0.03);
}

#[test]
fn filtered_noise_matches_theory() {
    let b = [0.5, 0.3, 0.2, -0.1];
    let x = generate(&SeriesKind::Gaussian, 400_000, 8).unwrap();
    let y = apply_filter(&b, &x).unwrap();
    assert!((sample_acf1(&y) - acf1(&b)).abs() < 0.01);
    // sign agreement between a filter output and its own target
    let z = apply_filter(&[0.5, 0.3, 0.2, 0.1], &x).unwrap();
    let corr = {
        let num: f64 = [0.5 * 0.5, 0.3 * 0.3, 0.2 * 0.2, -0.1 * 0.1].iter().sum();
        num / (0.39f64.sqrt() * 0.39f64.sqrt())
    };
    let agree = sample_sign_accuracy(&y, &z).unwrap();
    assert!((agree.accuracy - sign_accuracy(corr).unwrap()).abs() < 0.005);
    let d = SeriesDiagnostics::compute(&y, Some(&z)).unwrap();
    assert!(d.sample_ht.unwrap() > 1.0);
}

#[test]
fn student_t_draws_have_unit_variance() {
    let x = generate(&SeriesKind::StudentT { df: 8.0 }, 400_000, 2).unwrap();
    let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
    assert!((var - 1.0).abs() < 0.02, "{var}");
    assert!(generate(&SeriesKind::StudentT { df: 2.0 }, 10, 2).is_err());
}
