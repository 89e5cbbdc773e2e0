//! Acceptance criteria, one report line each.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trispin_core::gates::{apply, build_generic_circuit};
use trispin_core::io::read_state;
use trispin_core::pulsesim::{compile_generic, compile_ghz, compile_w, evolve, SpinSystem};
use trispin_core::qcore::{eig_hermitian, fidelity, partial_trace, psd_project, random};
use trispin_core::reconstruct::reconstruct_pure;
use trispin_core::states::{
    generic_amplitudes, generic_ket, ghz_ket, phased_w_ket, pseudopure, symmetric_w_beta, w_ket, PseudopureSpec,
};
use trispin_core::tomo::{full_ops, invert_raw, measurement_rank, rank_report, simulate_set, PairLabel, Target};
use trispin_core::{CMatrix, DensityMatrix, Error, GenericParams, Ket};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn random_params(rng: &mut impl Rng) -> GenericParams {
    GenericParams::new(
        rng.random_range(0.0..=FRAC_PI_2),
        rng.random_range(0.0..=FRAC_PI_2),
        rng.random_range(0.0..=FRAC_PI_2),
        rng.random_range(0.0..=FRAC_PI_2),
        rng.random_range(0.0..TAU),
    )
    .unwrap()
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn c1_canonical_amplitudes() -> Outcome {
    let p = GenericParams::from_degrees(45.0, 55.0, 60.0, 58.0, 125.0).unwrap();
    let reps = 1000u32;
    let start = Instant::now();
    let mut amps = generic_amplitudes(&p).unwrap();
    for _ in 1..reps {
        amps = generic_amplitudes(std::hint::black_box(&p)).unwrap();
    }
    let per_call = start.elapsed() / reps;
    let expect = [0.707, 0.351, 0.579, 0.107, 0.172];
    let err = amps.a.iter().zip(expect).map(|(a, e)| (a - e).abs()).fold(0.0, f64::max);
    let phase_err = (amps.phi - 125f64.to_radians()).abs();
    check(
        err < 1e-3 && phase_err == 0.0 && per_call < Duration::from_millis(1),
        format!("max amplitude error {err:.2e}, phase exact, {per_call:?} per call"),
        format!("amplitude error {err:.2e}, phase error {phase_err:.2e}, {per_call:?} per call"),
    )
}

fn c2_circuit_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ground = Ket::basis(8, 0).unwrap();
    let start = Instant::now();
    let mut worst: f64 = 1.0;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        for fuse in [false, true] {
            let out = apply(&build_generic_circuit(&p, fuse).unwrap(), &ground).unwrap();
            worst = worst.min(out.inner(&generic_ket(&p).unwrap()).norm());
        }
    }
    let took = start.elapsed();
    check(
        worst >= 1.0 - 1e-10 && took < Duration::from_secs(5),
        format!("min |overlap| = 1 - {:.1e} over 1000 sets, {took:?}", 1.0 - worst),
        format!("min |overlap| = {worst}, {took:?}"),
    )
}

fn c3_specialization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ground = Ket::basis(8, 0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.random_range(0.0..=FRAC_PI_2);
        let out = apply(&build_generic_circuit(&GenericParams::ghz(a).unwrap(), true).unwrap(), &ground).unwrap();
        worst = worst.max(out.phase_distance(&ghz_ket(a).unwrap()));
        let (b, g) = (rng.random_range(0.0..=FRAC_PI_2), rng.random_range(0.0..=FRAC_PI_2));
        let out = apply(&build_generic_circuit(&GenericParams::w(b, g).unwrap(), true).unwrap(), &ground).unwrap();
        worst = worst.max(out.phase_distance(&w_ket(b, g).unwrap()));
    }
    check(worst < 1e-10, format!("max distance {worst:.1e}"), format!("max distance {worst:.3e}"))
}

fn state_fidelity(out: &DensityMatrix, target: &Ket) -> f64 {
    fidelity(out.matrix(), target.to_density().matrix()).unwrap()
}

fn c4_pulse_level() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ground = pseudopure(&PseudopureSpec::new(0b000, 1.0).unwrap()).unwrap();
    let excited = pseudopure(&PseudopureSpec::new(0b100, 1.0).unwrap()).unwrap();
    let mut worst = [1.0f64; 2];
    for (slot, sys) in [SpinSystem::default(), SpinSystem { nu: [412.0, -287.5, 133.0], ..SpinSystem::default() }]
        .iter()
        .enumerate()
    {
        let mut params = vec![GenericParams::from_degrees(45.0, 55.0, 60.0, 58.0, 125.0).unwrap()];
        params.extend((0..30).map(|_| random_params(&mut rng)));
        for p in &params {
            let out = evolve(&compile_generic(p, sys).unwrap().finalize(), &ground, sys, false).unwrap();
            worst[slot] = worst[slot].min(state_fidelity(&out, &generic_ket(p).unwrap()));
        }
        for a in [FRAC_PI_4, 0.3, 1.2] {
            let out = evolve(&compile_ghz(a, sys).unwrap().finalize(), &ground, sys, false).unwrap();
            worst[slot] = worst[slot].min(state_fidelity(&out, &ghz_ket(a).unwrap()));
        }
        let sym = compile_w(symmetric_w_beta(), FRAC_PI_4, sys).unwrap();
        let out = evolve(&sym.finalize_with_residual([0.0, 0.0, FRAC_PI_2]), &excited, sys, false).unwrap();
        worst[slot] = worst[slot].min(state_fidelity(&out, &phased_w_ket()));
        for _ in 0..10 {
            let (b, g) = (rng.random_range(0.0..=FRAC_PI_2), rng.random_range(0.0..=FRAC_PI_2));
            let out = evolve(&compile_w(b, g, sys).unwrap().finalize(), &excited, sys, false).unwrap();
            worst[slot] = worst[slot].min(state_fidelity(&out, &w_ket(b, g).unwrap()));
        }
    }
    check(
        worst.iter().all(|&f| f >= 0.999),
        format!("min fidelity {:.12} (zero offsets), {:.12} (offsets on)", worst[0], worst[1]),
        format!("min fidelity {:.6} (zero offsets), {:.6} (offsets on)", worst[0], worst[1]),
    )
}

fn c5_tomography() -> Outcome {
    let rank = measurement_rank(&full_ops());
    let pair_ranks: Vec<usize> =
        [PairLabel::AB, PairLabel::BC, PairLabel::AC].iter().map(|l| rank_report(&l.ops(), Target::Pair(*l)).0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let rho = random::haar_ket(8, &mut rng).to_density();
        let (est, _) = invert_raw(&simulate_set(&rho, &full_ops()).unwrap(), Target::Full).unwrap();
        worst = worst.max((&est - rho.matrix()).frobenius_norm());
    }
    check(
        rank == 63 && pair_ranks.iter().all(|&r| r == 15) && worst < 1e-10,
        format!("rank {rank}, pair ranks {pair_ranks:?}, max round-trip error {worst:.1e}"),
        format!("rank {rank}, pair ranks {pair_ranks:?}, max round-trip error {worst:.3e}"),
    )
}

fn c6_w_regression() -> Outcome {
    let ab = read_state(fixture("w_rho_ab.json")).unwrap().matrix().unwrap();
    let bc = read_state(fixture("w_rho_bc.json")).unwrap().matrix().unwrap();
    let printed = read_state(fixture("w_rho_abc.json")).unwrap().matrix().unwrap();
    let start = Instant::now();
    let (ab, bc) = (psd_project(&ab).unwrap(), psd_project(&bc).unwrap());
    let ket = match reconstruct_pure(&ab, &bc) {
        Ok(k) => k,
        Err(e) => return Err(format!("reconstruction failed: {e}")),
    };
    let took = start.elapsed();
    let rho = ket.to_density();
    let entry = rho.matrix().max_abs_diff(&printed);
    let f = state_fidelity(&rho, &phased_w_ket());
    check(
        entry <= 0.05 && (0.95..=0.99).contains(&f) && took < Duration::from_secs(1),
        format!("max entry deviation {entry:.3}, fidelity to W {f:.3}, {took:?}"),
        format!("max entry deviation {entry:.3} (limit 0.05), fidelity to W {f:.3} (band [0.95, 0.99]), {took:?}"),
    )
}

fn marginals(k: &Ket) -> (DensityMatrix, DensityMatrix) {
    let rho = k.to_density();
    (partial_trace(&rho, &[0, 1]).unwrap(), partial_trace(&rho, &[1, 2]).unwrap())
}

fn c7_parts_determine_whole() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 1.0;
    let mut count = 0;
    while count < 1000 {
        let k = random::haar_ket(8, &mut rng);
        let (ab, bc) = marginals(&k);
        let e = eig_hermitian(partial_trace(&ab, &[0]).unwrap().matrix()).unwrap();
        if e.values[0] - e.values[1] < 1e-2 {
            continue;
        }
        count += 1;
        let out = match reconstruct_pure(&ab, &bc) {
            Ok(o) => o,
            Err(e) => return Err(format!("reconstruction failed on a nondegenerate state: {e}")),
        };
        worst = worst.min(state_fidelity(&out.to_density(), &k));
    }
    let mut alphas: Vec<f64> = (1..10).map(|k| k as f64 * PI / 20.0).collect();
    alphas.push(0.05);
    let mut accepted = Vec::new();
    for a in &alphas {
        let (ab, bc) = marginals(&ghz_ket(*a).unwrap());
        match reconstruct_pure(&ab, &bc) {
            Err(Error::Degenerate { .. }) | Err(Error::PhaseIndeterminate { .. }) => {}
            _ => accepted.push(*a),
        }
    }
    check(
        worst >= 1.0 - 1e-8 && accepted.is_empty(),
        format!("min fidelity 1 - {:.1e} over 1000 states; all {} GHZ-family states rejected", 1.0 - worst, alphas.len()),
        format!("min fidelity {worst}; GHZ angles not rejected: {accepted:?}"),
    )
}

fn c8_relaxation_band() -> Outcome {
    let sys = SpinSystem::default();
    let p = GenericParams::from_degrees(45.0, 55.0, 60.0, 58.0, 125.0).unwrap();
    let prog = compile_generic(&p, &sys).unwrap().finalize();
    let ground = pseudopure(&PseudopureSpec::new(0, 1.0).unwrap()).unwrap();
    let out = evolve(&prog, &ground, &sys, true).unwrap();
    let f = state_fidelity(&out, &generic_ket(&p).unwrap());
    check(
        f > 0.85 && f < 1.0,
        format!("relaxed generic-state fidelity {f:.4} over {:.1} ms", prog.duration() * 1e3),
        format!("relaxed generic-state fidelity {f}"),
    )
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("C1 canonical amplitudes", c1_canonical_amplitudes),
        ("C2 circuit matches closed form", c2_circuit_equivalence),
        ("C3 GHZ and W specializations", c3_specialization),
        ("C4 pulse-level sequences", c4_pulse_level),
        ("C5 tomography completeness", c5_tomography),
        ("C6 W reconstruction from printed marginals", c6_w_regression),
        ("C7 parts determine the whole", c7_parts_determine_whole),
        ("C8 relaxation sanity band", c8_relaxation_band),
    ];
    let mut failed = Vec::new();
    println!();
    for (name, run) in criteria {
        match run() {
            Ok(msg) => println!("[PASS] {name}: {msg}"),
            Err(msg) => {
                println!("[FAIL] {name}: {msg}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn printed_marginals_are_near_states() {
    for name in ["w_rho_ab.json", "w_rho_bc.json"] {
        let m: CMatrix = read_state(fixture(name)).unwrap().matrix().unwrap();
        assert!((m.trace().re - 1.0).abs() < 0.02, "{name}");
        assert!(psd_project(&m).is_ok());
    }
}
