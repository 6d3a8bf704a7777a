//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use purity_core::expsim::{run_protocol, NoiseModel};
use purity_core::linalg::{hermitian_eigenvalues, DensityMatrix};
use purity_core::mub::construct_mubs;
use purity_core::relations::{
    build_bipartite_basis, check_pt_identities, gamma_direct, gamma_via_projector, relation_report,
};
use purity_core::states::{random_density_with, rho_family, rng_for, WernerFamilyParams};

const ALPHA_GRID: [f64; 5] = [0.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0, FRAC_PI_2];
const X_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Seeded random bipartite state; even trials full rank, odd trials pure.
fn random_state(d: usize, big_d: usize, seed: u64, trial: usize) -> DensityMatrix {
    let dim = d * big_d;
    let rank = if trial.is_multiple_of(2) { dim } else { 1 };
    random_density_with(dim, rank, &mut rng_for(seed, trial as u64))
        .unwrap()
        .with_dims(vec![d, big_d])
        .unwrap()
}

fn ac1_orthonormal_bipartite_states() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut configs = 0;
    for d in [2, 3, 5] {
        for m in 2..=d + 1 {
            let basis = build_bipartite_basis(&construct_mubs(d, m).unwrap()).unwrap();
            assert_eq!(basis.constructed_states().len(), m * (d - 1) + 1);
            worst = worst.max(basis.constructed_gram_deviation());
            configs += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && within(t, 5.0),
        format!("{configs} (d, M) configs, max |G - I| = {worst:.2e} (<= 1e-12), {:.2} s (< 5 s)", t.as_secs_f64()),
    )
}

fn ac2_gamma_psd_or_zero() -> Outcome {
    let start = Instant::now();
    let mut worst_eig = f64::INFINITY;
    let mut worst_frob: f64 = 0.0;
    let mut configs = 0;
    for d in [2, 3] {
        for big_d in [d, d + 1] {
            for m in 2..=d + 1 {
                let mubs = construct_mubs(d, m).unwrap();
                for trial in 0..200 {
                    let rho = random_state(d, big_d, 2000 + configs, trial);
                    let g = gamma_direct(&rho, &mubs).unwrap();
                    if m == d + 1 {
                        worst_frob = worst_frob.max(g.frobenius_norm());
                    } else {
                        worst_eig = worst_eig.min(hermitian_eigenvalues(&g.hermitian_part()).unwrap()[0]);
                    }
                }
                configs += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst_eig >= -1e-10 && worst_frob <= 1e-9 && within(t, 60.0),
        format!(
            "{configs} configs x 200 states: min eig(Gamma) = {worst_eig:.2e} (>= -1e-10, M <= d), \
             max |Gamma|_F = {worst_frob:.2e} (<= 1e-9, M = d+1), {:.2} s (< 60 s)",
            t.as_secs_f64()
        ),
    )
}

fn ac3_conservation_relation() -> Outcome {
    let mut worst_eq: f64 = 0.0;
    let mut worst_ineq = f64::INFINITY;
    for d in [2, 3] {
        for m in 2..=d + 1 {
            let mubs = construct_mubs(d, m).unwrap();
            for trial in 0..200 {
                let rho = random_state(d, d, 3000 + (10 * d + m) as u64, trial);
                let r = relation_report(&rho, &mubs).unwrap();
                if m == d + 1 {
                    worst_eq = worst_eq.max(r.gap.abs());
                } else {
                    worst_ineq = worst_ineq.min(r.gap);
                }
            }
        }
    }
    // The ρ(α, x) family under both the complete and the two-basis set.
    for alpha in ALPHA_GRID {
        for x in X_GRID {
            let rho = rho_family(WernerFamilyParams::new(alpha, x).unwrap());
            worst_eq = worst_eq.max(relation_report(&rho, &construct_mubs(2, 3).unwrap()).unwrap().gap.abs());
            worst_ineq = worst_ineq.min(relation_report(&rho, &construct_mubs(2, 2).unwrap()).unwrap().gap);
        }
    }
    outcome(
        worst_eq <= 1e-9 && worst_ineq >= -1e-9,
        format!("max |lhs - rhs| at M = d+1: {worst_eq:.2e} (<= 1e-9); min (lhs - rhs) at M <= d: {worst_ineq:.2e} (>= -1e-9)"),
    )
}

fn ac4_family_closed_forms() -> Outcome {
    let start = Instant::now();
    let mubs = construct_mubs(2, 3).unwrap();
    let mut worst: f64 = 0.0;
    for alpha in ALPHA_GRID {
        let c2 = alpha.cos().powi(2);
        for x in X_GRID {
            let r = relation_report(&rho_family(WernerFamilyParams::new(alpha, x).unwrap()), &mubs).unwrap();
            let ab = (1.0 + 3.0 * x * x) / 4.0;
            let b = (1.0 + x * x * c2) / 2.0;
            let xy = (1.0 + x * x) / 4.0;
            let z = x * x * (1.0 + c2) / 2.0 + x * (1.0 - x) / 2.0 + (1.0 - x).powi(2) / 4.0;
            // Basis order of the qubit set is z, x, y.
            let checks = [
                (r.purity_AB, ab),
                (r.purity_B, b),
                (r.purity_thetaB[0], z),
                (r.purity_thetaB[1], xy),
                (r.purity_thetaB[2], xy),
                (r.purity_B_given_theta[0], b),
                (r.purity_B_given_theta[1], b),
                (r.purity_B_given_theta[2], b),
            ];
            for (got, want) in checks {
                worst = worst.max((got - want).abs());
            }
            if alpha == FRAC_PI_2 {
                worst = worst.max((r.purity_B - 0.5).abs());
                for p in &r.purity_thetaB {
                    worst = worst.max((p - (1.0 + x * x) / 4.0).abs());
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && within(t, 1.0),
        format!("25 grid points, max |matrix - closed form| = {worst:.2e} (<= 1e-12), {:.3} s (< 1 s)", t.as_secs_f64()),
    )
}

fn ac5_projector_route() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut states = 0;
    for (d, big_d, m) in [(2, 2, 2), (2, 2, 3), (3, 3, 2), (3, 3, 4), (2, 3, 2)] {
        let mubs = construct_mubs(d, m).unwrap();
        let basis = build_bipartite_basis(&mubs).unwrap();
        for trial in 0..50 {
            let rho = random_state(d, big_d, 5000 + (d * 100 + big_d * 10 + m) as u64, trial);
            let direct = gamma_direct(&rho, &mubs).unwrap();
            let via = gamma_via_projector(&rho, &basis).unwrap();
            worst = worst.max(direct.frobenius_distance(&via));
            states += 1;
        }
    }
    outcome(
        worst <= 1e-10,
        format!("{states} states over 5 configs (one with D != d): max Frobenius = {worst:.2e} (<= 1e-10)"),
    )
}

fn ac6_pt_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        let basis = build_bipartite_basis(&construct_mubs(d, d + 1).unwrap()).unwrap();
        let r = check_pt_identities(&basis);
        assert_eq!(r.theta_deviations.len(), d + 1);
        worst = worst.max(r.max_deviation);
    }
    outcome(worst <= 1e-12, format!("d in {{2, 3}}, all bases: max Frobenius = {worst:.2e} (<= 1e-12)"))
}

fn ac7_simulator_oracle() -> Outcome {
    let start = Instant::now();
    let mubs = construct_mubs(2, 3).unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for alpha in ALPHA_GRID {
        for x in X_GRID {
            let panel = run_protocol(alpha, x, NoiseModel::none()).unwrap();
            let r = relation_report(&rho_family(WernerFamilyParams::new(alpha, x).unwrap()), &mubs).unwrap();
            let analytic = [
                r.purity_AB,
                r.purity_thetaB[1],
                r.purity_thetaB[2],
                r.purity_thetaB[0],
                r.purity_B,
                r.purity_B_given_theta[1],
                r.purity_B_given_theta[2],
                r.purity_B_given_theta[0],
            ];
            for (sim, want) in panel.raw.to_array().iter().zip(analytic) {
                worst = worst.max((sim - want).abs());
            }
            worst_gap = worst_gap.max(panel.raw.gap().abs());
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-10 && worst_gap <= 1e-9 && within(t, 120.0),
        format!(
            "25 points x 8 settings: max |sim - analytic| = {worst:.2e} (<= 1e-10), max |gap| = {worst_gap:.2e} (<= 1e-9), {:.2} s (< 120 s)",
            t.as_secs_f64()
        ),
    )
}

fn ac8_noise_and_rescaling() -> Outcome {
    let noise = NoiseModel::depolarizing(0.01).unwrap();
    let clean = run_protocol(FRAC_PI_2, 1.0, NoiseModel::none()).unwrap().raw.to_array();
    let noisy = run_protocol(FRAC_PI_2, 1.0, noise).unwrap();
    let worst_rel = noisy
        .rescaled
        .to_array()
        .iter()
        .zip(clean)
        .map(|(r, c)| ((r - c) / c).abs())
        .fold(0.0, f64::max);
    let mut attenuated = true;
    for alpha in ALPHA_GRID {
        let clean = run_protocol(alpha, 1.0, NoiseModel::none()).unwrap().raw.to_array();
        let noisy = run_protocol(alpha, 1.0, noise).unwrap().raw.to_array();
        attenuated &= noisy.iter().zip(clean).all(|(n, c)| *n < c);
    }
    outcome(
        worst_rel <= 0.02 && attenuated,
        format!(
            "p = 0.01: max relative error of rescaled at (pi/2, 1) = {worst_rel:.2e} (<= 0.02); raw strictly attenuated on all x = 1 panels: {attenuated}"
        ),
    )
}

fn run_cli(args: &[&str], dir: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_purity"))
        .args(args)
        .current_dir(dir)
        .env_remove("PURITY_SEED")
        .output()
        .expect("run purity")
        .status
        .code()
        .unwrap_or(-1)
}

fn ac9_cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let commands: [(&str, Vec<&str>); 6] = [
        ("mub.json", vec!["mub", "--d", "5", "--m", "6", "--out"]),
        ("verify.txt", vec!["verify", "--d", "3", "--m", "2", "--trials", "20", "--seed", "7", "--out"]),
        ("relation.json", vec!["relation", "--alpha", "pi/4", "--x", "0.5", "--out"]),
        ("sweep.csv", vec!["sweep", "--param", "x", "--simulate", "--noise", "0.01", "--out"]),
        ("sweep.json", vec!["sweep", "--param", "alpha", "--format", "json", "--out"]),
        ("expsim.json", vec!["expsim", "--alpha", "3pi/8", "--x", "0.75", "--noise", "0.01", "--out"]),
    ];
    let mut identical = 0;
    let mut failures = Vec::new();
    for (file, args) in &commands {
        let mut contents = Vec::new();
        for run in 0..2 {
            let name = format!("{run}-{file}");
            let mut full = args.clone();
            full.push(&name);
            let code = run_cli(&full, dir.path());
            if code != 0 {
                failures.push(format!("{} exited {code}", args[0]));
            }
            contents.push(std::fs::read(dir.path().join(&name)).unwrap_or_default());
        }
        if !contents[0].is_empty() && contents[0] == contents[1] {
            identical += 1;
        } else {
            failures.push(format!("{} output differs", args[0]));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{identical}/{} commands byte-identical across repeated runs{}", commands.len(),
            if failures.is_empty() { String::new() } else { format!(" ({})", failures.join("; ")) }),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("AC1 bipartite states orthonormal", ac1_orthonormal_bipartite_states),
        ("AC2 Gamma PSD (M <= d) / zero (M = d+1)", ac2_gamma_psd_or_zero),
        ("AC3 conservation equality / inequality", ac3_conservation_relation),
        ("AC4 rho(alpha, x) closed-form purities", ac4_family_closed_forms),
        ("AC5 projector route == definition", ac5_projector_route),
        ("AC6 partial-transpose identities", ac6_pt_identities),
        ("AC7 noiseless simulator == analytic", ac7_simulator_oracle),
        ("AC8 depolarizing noise + rescaling", ac8_noise_and_rescaling),
        ("AC9 CLI determinism", ac9_cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
