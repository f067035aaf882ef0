use ifm_core::protocols::{ev_single_shot, ObjectKind};
use ifm_harness::{sample_tasks, standard_error};

#[test]
fn two_se_band_over_a_hundred_seeds() {
    let dist = ev_single_shot(0.5, ObjectKind::Bomb).unwrap();
    let shots = 10_000;
    let runs = sample_tasks(&dist, shots, 20_240_601, 100).unwrap();
    for (event, p) in dist.iter() {
        let se = standard_error(p, shots);
        let outside = runs
            .iter()
            .filter(|c| ((c[event] as f64 / shots as f64) - p).abs() > 2.0 * se)
            .count();
        let frac = outside as f64 / runs.len() as f64;
        assert!((0.01..=0.10).contains(&frac), "{event}: {frac}");
    }
}

#[test]
fn multinomial_is_sound_on_uneven_weights() {
    let dist = ev_single_shot(0.9, ObjectKind::Bomb).unwrap();
    let shots = 200_000;
    let runs = sample_tasks(&dist, shots, 11, 4).unwrap();
    for c in &runs {
        assert_eq!(c.values().sum::<u64>(), shots);
        for (event, p) in dist.iter() {
            let f = c[event] as f64 / shots as f64;
            assert!((f - p).abs() < 5.0 * standard_error(p, shots), "{event}");
        }
    }
}
