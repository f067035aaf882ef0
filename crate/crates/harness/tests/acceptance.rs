//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines show up in `cargo test` output.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::time::{Duration, Instant};

use ifm_core::circuit::TerminalEvent;
use ifm_core::optics::{bs_matrix, unitarity_defect};
use ifm_core::protocols::*;
use ifm_core::random::{random_circuit, random_postselection};
use ifm_core::tsvf::Projector;
use ifm_core::{outcome_distribution, trajectory, two_state_vector, Convention, EventSelector, OutcomeDistribution};
use ifm_harness::{sample, sample_with};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

/// Fastest of `reps` runs.
fn fastest<T>(reps: usize, mut f: impl FnMut() -> T) -> Duration {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(f());
            t.elapsed()
        })
        .min()
        .expect("reps > 0")
}

fn ev_outcome_split() -> Outcome {
    let d = ev_single_shot(0.5, ObjectKind::Bomb).map_err(|e| e.to_string())?;
    let boom = d.get(&TerminalEvent::explosion("bomb"));
    let d1 = d.get(&TerminalEvent::click("D1"));
    let d2 = d.get(&TerminalEvent::click("D2"));
    let values_ok = (boom - 0.5).abs() < EXACT && (d1 - 0.25).abs() < EXACT && (d2 - 0.25).abs() < EXACT;
    let t = fastest(50, || ev_single_shot(0.5, ObjectKind::Bomb));
    let detail = format!("explosion {boom:.12}, D1 {d1:.12}, D2 {d2:.12}, runtime {t:?}");
    check(values_ok && t < Duration::from_millis(1), detail.clone(), detail)
}

fn dark_port() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 1..=9 {
        let t = i as f64 / 10.0;
        let d = ev_single_shot(t, ObjectKind::Absent).map_err(|e| e.to_string())?;
        worst = worst.max(d.probability(&EventSelector::clicks(["D2"])));
    }
    check(
        worst < EXACT,
        format!("max P(D2) over T=0.1..0.9: {worst:.1e}"),
        format!("P(D2) reached {worst}"),
    )
}

fn repeated_yield() -> Outcome {
    let a = ev_repeated(0.5, Rounds::Unbounded, RepeatMode::Analytic).map_err(|e| e.to_string())?;
    let s = ev_repeated(0.5, Rounds::Finite(20), RepeatMode::Simulated).map_err(|e| e.to_string())?;
    let ok = (a.found_fraction - 1.0 / 3.0).abs() < EXACT && (s.found_fraction - a.found_fraction).abs() < 1e-6;
    let detail = format!(
        "analytic found {:.12}, simulated (20 rounds) {:.12}",
        a.found_fraction, s.found_fraction
    );
    check(ok, detail.clone(), detail)
}

fn efficiency_supremum() -> Outcome {
    let grid: Vec<f64> = (1..=999).map(|i| i as f64 / 1000.0).collect();
    let frontier = efficiency_frontier(&grid).map_err(|e| e.to_string())?;
    let increasing = frontier.windows(2).all(|w| w[1].1 > w[0].1);
    let below = frontier.iter().all(|(_, eta)| *eta < 0.5);
    let top = frontier.last().expect("non-empty").1;
    let ok = increasing && below && top > 0.4995 && top < 0.5;
    let detail = format!("increasing {increasing}, all below 1/2 {below}, η(0.999) = {top:.6}");
    check(ok, detail.clone(), detail)
}

/// Dense 2×2 iteration, independent of the engine.
fn zeno_oracle(n: usize) -> f64 {
    let th = FRAC_PI_2 / n as f64;
    let mut v = [1.0f64, 0.0];
    for _ in 0..n {
        v = [th.cos() * v[0] - th.sin() * v[1], th.sin() * v[0] + th.cos() * v[1]];
        v[1] = 0.0;
    }
    v[0] * v[0]
}

fn zeno_efficiency() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = (zeno_oracle(10) - 0.7805).abs() < 5e-5 && (zeno_oracle(100) - 0.9756).abs() < 5e-5;
    for n in [1, 10, 100] {
        let empty = zeno_run(n, ZenoObject::Absent).map_err(|e| e.to_string())?;
        let bomb = zeno_run(n, ZenoObject::Bomb).map_err(|e| e.to_string())?;
        let right = empty.get(&TerminalEvent::photon_in("right"));
        let left = bomb.get(&TerminalEvent::photon_in("left"));
        let closed = (FRAC_PI_2 / n as f64).cos().powi(2 * n as i32);
        ok &= (right - 1.0).abs() < EXACT && (left - closed).abs() < EXACT && (left - zeno_oracle(n)).abs() < EXACT;
        parts.push(format!("N={n}: right|absent {right:.9}, left|bomb {left:.6}"));
    }
    let detail = parts.join("; ");
    check(ok, detail.clone(), detail)
}

/// Brute-force amplitude of both dark ports clicking, from plain arrays.
fn hardy_oracle() -> f64 {
    let h = FRAC_1_SQRT_2;
    let bs = [[h, h], [h, -h]];
    let mut amp = 0.0;
    for p in 0..2 {
        for o in 0..2 {
            if p == 1 && o == 1 {
                continue;
            }
            amp += bs[1][p] * bs[1][o] * bs[p][0] * bs[o][0];
        }
    }
    amp * amp
}

fn hardy_suite() -> Outcome {
    let run = || -> ifm_core::Result<(f64, [f64; 3])> {
        let joint = hardy_run()?;
        Ok((
            joint.probability(&EventSelector::clicks(["D2", "oD2"])),
            [
                hardy_conditional(HardyQuery::ObjectAtW)?,
                hardy_conditional(HardyQuery::PhotonAtW)?,
                hardy_conditional(HardyQuery::BothAtW)?,
            ],
        ))
    };
    let (both, cond) = run().map_err(|e| e.to_string())?;
    let oracle = hardy_oracle();
    let t = fastest(10, run);
    let ok = (oracle - 1.0 / 16.0).abs() < 1e-12
        && (both - oracle).abs() < EXACT
        && (cond[0] - 1.0).abs() < EXACT
        && (cond[1] - 1.0).abs() < EXACT
        && cond[2].abs() < EXACT
        && t < Duration::from_millis(10);
    let detail = format!(
        "P(D2,oD2) {both:.12} (oracle {oracle:.12}), conditionals {:.9}/{:.9}/{:.9}, runtime {t:?}",
        cond[0], cond[1], cond[2]
    );
    check(ok, detail.clone(), detail)
}

fn tsvf_no_trace() -> Outcome {
    let circuit = ev_circuit(0.5, ObjectKind::Bomb).map_err(|e| e.to_string())?;
    let input = circuit.initial_state().map_err(|e| e.to_string())?;
    let tsv = two_state_vector(&circuit, &input, &EventSelector::clicks(["D2"])).map_err(|e| e.to_string())?;
    let lower = Projector::photon_in(["int"]);
    let upper = Projector::photon_in(["free"]);
    let mut ok = true;
    // the arms exist between the two splitters: cuts 1 and 2
    for cut in [1, 2] {
        ok &= tsv.trace_free(cut, &lower).map_err(|e| e.to_string())?;
        ok &= !tsv.trace_free(cut, &upper).map_err(|e| e.to_string())?;
    }
    let w = tsv.weak_value(2, &lower).map_err(|e| e.to_string())?;
    ok &= w.norm() < EXACT;
    let detail = format!("lower arm trace-free at cuts 1-2, upper arm not; weak value beyond object {w}");
    check(ok, detail.clone(), detail)
}

fn abl_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut tested, mut worst): (usize, f64) = (0, 0.0);
    while tested < 200 {
        let c = random_circuit(&mut rng);
        let post = random_postselection(&mut rng, &c);
        let input = c.initial_state().map_err(|e| e.to_string())?;
        let p = outcome_distribution(&c, &input)
            .map_err(|e| e.to_string())?
            .probability(&post);
        let Ok(tsv) = two_state_vector(&c, &input, &post) else {
            if p > 1e-18 {
                return Err(format!("post-selection {post} rejected with probability {p}"));
            }
            continue;
        };
        for cut in 0..tsv.num_cuts() {
            let o = tsv.overlap_at(cut).map_err(|e| e.to_string())?;
            worst = worst.max((o.norm_sqr() - p).abs());
        }
        tested += 1;
    }
    check(
        worst < EXACT,
        format!("{tested} circuits, worst |overlap|² − P: {worst:.1e}"),
        format!("deviation {worst}"),
    )
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cases = 0;
    let mut failures = Vec::new();
    for _ in 0..300 {
        let c = random_circuit(&mut rng);
        let input = c.initial_state().map_err(|e| e.to_string())?;
        let states = trajectory(&c, &input).map_err(|e| e.to_string())?;
        if states.iter().any(|s| (s.norm_sqr() - 1.0).abs() > EXACT) {
            failures.push("norm");
        }
        let d = OutcomeDistribution::from_state(states.last().expect("cuts"));
        if (d.total() - 1.0).abs() > EXACT {
            failures.push("completeness");
        }
        cases += 2;
    }
    for _ in 0..300 {
        let t = rng.random_range(0.0..=1.0);
        let conv = [Convention::Real, Convention::RealSwapped, Convention::Symmetric][rng.random_range(0..3)];
        if unitarity_defect(&bs_matrix(t, conv).map_err(|e| e.to_string())?) > 1e-12 {
            failures.push("unitarity");
        }
        cases += 1;
    }
    for _ in 0..200 {
        let c = random_circuit(&mut rng);
        let input = c.initial_state().map_err(|e| e.to_string())?;
        let d = outcome_distribution(&c, &input).map_err(|e| e.to_string())?;
        let shots = rng.random_range(1..5000);
        let seed = rng.random();
        let a = sample(&d, shots, seed).map_err(|e| e.to_string())?;
        let mut gen = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        let b = sample_with(&d, shots, &mut gen).map_err(|e| e.to_string())?;
        if a != b || a.values().sum::<u64>() != shots {
            failures.push("sampling");
        }
        cases += 1;
    }
    check(
        failures.is_empty() && cases >= 1000,
        format!("{cases} randomized cases"),
        format!("{} failures: {failures:?}", failures.len()),
    )
}

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 9] = [
        ("EV outcome split", ev_outcome_split),
        ("dark port", dark_port),
        ("repeated yield", repeated_yield),
        ("efficiency supremum", efficiency_supremum),
        ("Zeno efficiency", zeno_efficiency),
        ("Hardy suite", hardy_suite),
        ("TSVF no-trace", tsvf_no_trace),
        ("ABL consistency", abl_consistency),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", i + 1);
            }
        }
    }
    let elapsed = start.elapsed();
    let total_ok = elapsed < Duration::from_secs(60);
    println!(
        "{} suite runtime: {elapsed:?} (limit 60 s)",
        if total_ok { "PASS" } else { "FAIL" }
    );
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 || !total_ok {
        std::process::exit(1);
    }
}
