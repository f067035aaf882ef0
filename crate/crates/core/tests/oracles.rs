//! Reference values computed without the engine: plain 2×2 matrix algebra on
//! dense arrays, then compared against the circuit simulation.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use ifm_core::circuit::TerminalEvent;
use ifm_core::protocols::{
    ev_single_shot, hardy_circuit, hardy_input, hardy_run, zeno_run, HardyConfig, ObjectKind, ZenoObject,
};
use ifm_core::{evolve, EventSelector, OutcomeDistribution};

/// Dense Zeno iteration: rotate (left, right) by θ, then zero the right
/// amplitude when the bomb is present.
fn zeno_oracle(n: usize, bomb: bool) -> (f64, f64) {
    let theta = FRAC_PI_2 / n as f64;
    let (c, s) = (theta.cos(), theta.sin());
    let mut v = [1.0f64, 0.0];
    let mut lost = 0.0;
    for _ in 0..n {
        v = [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        if bomb {
            lost += v[1] * v[1];
            v[1] = 0.0;
        }
    }
    (v[0] * v[0], if bomb { lost } else { v[1] * v[1] })
}

#[test]
fn zeno_oracle_values() {
    let (left10, _) = zeno_oracle(10, true);
    let (left100, _) = zeno_oracle(100, true);
    assert!((left10 - 0.7805).abs() < 5e-5, "{left10}");
    assert!((left100 - 0.9756).abs() < 5e-5, "{left100}");
    for n in [1, 2, 10, 100] {
        assert!((zeno_oracle(n, false).1 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zeno_engine_matches_oracle() {
    for n in [1, 2, 3, 7, 10, 50, 100] {
        let (left, boom) = zeno_oracle(n, true);
        let d = zeno_run(n, ZenoObject::Bomb).unwrap();
        assert!((d.get(&TerminalEvent::photon_in("left")) - left).abs() < 1e-9);
        assert!((d.get(&TerminalEvent::explosion("bomb")) - boom).abs() < 1e-9);
        let closed = (FRAC_PI_2 / n as f64).cos().powi(2 * n as i32);
        assert!((left - closed).abs() < 1e-12);

        let (_, right) = zeno_oracle(n, false);
        let d = zeno_run(n, ZenoObject::Absent).unwrap();
        assert!((d.get(&TerminalEvent::photon_in("right")) - right).abs() < 1e-9);
    }
}

/// Photon (p) and object (o) each pass a real 50/50 splitter
/// [[h, h], [h, −h]]; index 0 is the free arm, 1 the arm through W. The
/// (1, 1) branch is removed before the second splitters.
fn hardy_oracle() -> ([[f64; 2]; 2], f64) {
    let h = FRAC_1_SQRT_2;
    let bs = [[h, h], [h, -h]];
    // after the first splitters, input on port 0 for both
    let mut joint = [[0.0f64; 2]; 2];
    for (p, row) in joint.iter_mut().enumerate() {
        for (o, amp) in row.iter_mut().enumerate() {
            *amp = bs[p][0] * bs[o][0];
        }
    }
    let annihilated = joint[1][1] * joint[1][1];
    joint[1][1] = 0.0;
    let mut out = [[0.0f64; 2]; 2];
    for (d_p, row) in out.iter_mut().enumerate() {
        for (d_o, amp) in row.iter_mut().enumerate() {
            for p in 0..2 {
                for o in 0..2 {
                    *amp += bs[d_p][p] * bs[d_o][o] * joint[p][o];
                }
            }
        }
    }
    (out, annihilated)
}

#[test]
fn hardy_oracle_values() {
    let (out, annihilated) = hardy_oracle();
    assert!((out[1][1] + 0.25).abs() < 1e-12);
    assert!((out[1][1] * out[1][1] - 1.0 / 16.0).abs() < 1e-12);
    assert!((annihilated - 0.25).abs() < 1e-12);
    let total: f64 = out.iter().flatten().map(|a| a * a).sum::<f64>() + annihilated;
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn hardy_engine_matches_oracle() {
    let (out, annihilated) = hardy_oracle();
    let d = hardy_run().unwrap();
    let names = [["D1", "D2"], ["oD1", "oD2"]];
    for (p, row) in out.iter().enumerate() {
        for (o, amp) in row.iter().enumerate() {
            let p_engine = d.probability(&EventSelector::clicks([names[0][p], names[1][o]]));
            assert!((p_engine - amp * amp).abs() < 1e-9, "{p} {o}");
        }
    }
    assert!((d.probability(&EventSelector::explosion("object")) - annihilated).abs() < 1e-9);
}

#[test]
fn hardy_marginals_are_dark() {
    let circuit = hardy_circuit(HardyConfig::default()).unwrap();
    let photon_only = OutcomeDistribution::from_state(&evolve(&circuit, &hardy_input(true, false).unwrap()).unwrap());
    assert!(photon_only.probability(&EventSelector::clicks(["D2"])) < 1e-9);
    assert!((photon_only.probability(&EventSelector::clicks(["D1"])) - 1.0).abs() < 1e-9);
    let object_only = OutcomeDistribution::from_state(&evolve(&circuit, &hardy_input(false, true).unwrap()).unwrap());
    assert!(object_only.probability(&EventSelector::clicks(["oD2"])) < 1e-9);
    assert!((object_only.probability(&EventSelector::clicks(["oD1"])) - 1.0).abs() < 1e-9);
}

/// EV with a real splitter of transmittance t used twice; the bomb blocks
/// arm 1.
fn ev_oracle(t: f64, bomb: bool) -> (f64, f64, f64) {
    let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
    let bs = [[a, b], [b, -a]];
    let mut arms = [bs[0][0], bs[1][0]];
    let boom = if bomb { arms[1] * arms[1] } else { 0.0 };
    if bomb {
        arms[1] = 0.0;
    }
    let d1 = bs[0][0] * arms[0] + bs[0][1] * arms[1];
    let d2 = bs[1][0] * arms[0] + bs[1][1] * arms[1];
    (d1 * d1, d2 * d2, boom)
}

#[test]
fn ev_engine_matches_oracle() {
    for i in 1..20 {
        let t = i as f64 / 20.0;
        let (d1, d2, boom) = ev_oracle(t, true);
        let d = ev_single_shot(t, ObjectKind::Bomb).unwrap();
        assert!((d.get(&TerminalEvent::click("D1")) - d1).abs() < 1e-9);
        assert!((d.get(&TerminalEvent::click("D2")) - d2).abs() < 1e-9);
        assert!((d.get(&TerminalEvent::explosion("bomb")) - boom).abs() < 1e-9);
        assert!((d2 / (d2 + boom) - t / (1.0 + t)).abs() < 1e-12);

        let (d1, d2, _) = ev_oracle(t, false);
        assert!(d2 < 1e-15);
        let d = ev_single_shot(t, ObjectKind::Absent).unwrap();
        assert!((d.get(&TerminalEvent::click("D1")) - d1).abs() < 1e-9);
    }
    let (d1, d2, boom) = ev_oracle(0.9, true);
    assert!((d1 - 0.81).abs() < 1e-12 && (d2 - 0.09).abs() < 1e-12 && (boom - 0.1).abs() < 1e-12);
}
