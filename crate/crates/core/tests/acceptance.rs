//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.
//!
//! Run with `cargo test -p spinorbit-core --test acceptance -- --nocapture`
//! (output is printed either way).

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use spinorbit_core::circuitfile::{parse_circuit, serialize_circuit};
use spinorbit_core::correlations::{
    classical_correlation, concurrence, correlation_report, xstate_concurrence, OptimizerConfig,
};
use spinorbit_core::figures::{envelope_max, scatter, sweep, Family, Rank3Region, Series, SweepSpec, SweepVariable};
use spinorbit_core::optics::{
    ensemble_density, mdms_circuit, mz_circuit, run_circuit, Circuit, Element, ElementKind, Polarization, Source,
    SourceProbabilities, SpinOrbitKet, TransverseMode,
};
use spinorbit_core::profile::{intensity_map, polarization_resolved_map, GridConfig};
use spinorbit_core::qmath::{ComplexMatrix, DensityMatrix4};
use spinorbit_core::states::{bell, mdms, rank2, rank3, StateParams};
use spinorbit_core::tomography::{
    monte_carlo_correlations, projection_probabilities, reconstruct, NoiseConfig, ProjectorSet,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- oracles

fn h2(p: f64) -> f64 {
    let t = |x: f64| if x > 1e-15 { -x * x.log2() } else { 0.0 };
    t(p) + t(1.0 - p)
}

/// Entropy of a 2x2 Hermitian unit-trace matrix from its Bloch length.
fn qubit_entropy(a: f64, d: f64, b: C64) -> f64 {
    let tr = a + d;
    let r = (((a - d) / tr).powi(2) + 4.0 * b.norm_sqr() / (tr * tr))
        .sqrt()
        .min(1.0);
    h2((1.0 + r) / 2.0)
}

/// Measured conditional entropy by explicit projection onto B outcome
/// kets, independent of the library implementation.
fn oracle_conditional_entropy(rho: &DensityMatrix4, theta: f64, phi: f64) -> f64 {
    let e = C64::from_polar(1.0, phi);
    let kets = [
        [C64::new((theta / 2.0).cos(), 0.0), e * (theta / 2.0).sin()],
        [C64::new((theta / 2.0).sin(), 0.0), -e * (theta / 2.0).cos()],
    ];
    let mut s = 0.0;
    for b in kets {
        // σ[a][a'] = Σ_{j,j'} b̄_j ρ[2a+j][2a'+j'] b_j'
        let mut sig = [[C64::new(0.0, 0.0); 2]; 2];
        for (a, row) in sig.iter_mut().enumerate() {
            for (ap, v) in row.iter_mut().enumerate() {
                for j in 0..2 {
                    for jp in 0..2 {
                        *v += b[j].conj() * rho.get(2 * a + j, 2 * ap + jp) * b[jp];
                    }
                }
            }
        }
        let p = sig[0][0].re + sig[1][1].re;
        if p > 1e-14 {
            s += p * qubit_entropy(sig[0][0].re, sig[1][1].re, sig[0][1]);
        }
    }
    s
}

/// C from a dense θ×φ grid (endpoints of θ included).
fn oracle_classical_correlation(rho: &DensityMatrix4, n: usize) -> f64 {
    let sa = qubit_entropy(
        rho.get(0, 0).re + rho.get(1, 1).re,
        rho.get(2, 2).re + rho.get(3, 3).re,
        rho.get(0, 2) + rho.get(1, 3),
    );
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let theta = PI * i as f64 / (n - 1) as f64;
            (0..n)
                .map(|j| oracle_conditional_entropy(rho, theta, 2.0 * PI * j as f64 / n as f64))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    sa - best
}

/// Closed-form X-state concurrence computed straight from matrix entries.
fn oracle_x_concurrence(rho: &DensityMatrix4) -> f64 {
    let r = |i, j| rho.get(i, j);
    let a = r(0, 3).norm() - (r(1, 1).re * r(2, 2).re).sqrt();
    let b = r(1, 2).norm() - (r(0, 0).re * r(3, 3).re).sqrt();
    2.0 * a.max(b).max(0.0)
}

fn random_density(rng: &mut ChaCha8Rng, rank: usize) -> DensityMatrix4 {
    let mut m = ComplexMatrix::zeros(4);
    for _ in 0..rank {
        let v: Vec<C64> = (0..4)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        m = &m + &ComplexMatrix::outer(&v, &v);
    }
    let tr = m.trace().re;
    DensityMatrix4::new(m.scale_real(1.0 / tr)).expect("Gram matrix is a state")
}

/// X-state with at least one rank-1 block, so rank ≤ 3.
fn random_x_state(rng: &mut ChaCha8Rng) -> DensityMatrix4 {
    let mut d: Vec<f64> = (0..4).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = d.iter().sum();
    d.iter_mut().for_each(|x| *x /= s);
    let z = (d[0] * d[3]).sqrt() * rng.gen_range(0.0..=1.0);
    let w = (d[1] * d[2]).sqrt();
    let (z, w) = if rng.gen_bool(0.5) {
        (z, w)
    } else {
        ((d[0] * d[3]).sqrt(), w * rng.gen_range(0.0..=1.0))
    };
    let mut m = ComplexMatrix::from_real_diagonal(&d);
    let zc = C64::from_polar(z, rng.gen_range(0.0..2.0 * PI));
    let wc = C64::from_polar(w, rng.gen_range(0.0..2.0 * PI));
    m[(0, 3)] = zc;
    m[(3, 0)] = zc.conj();
    m[(1, 2)] = wc;
    m[(2, 1)] = wc.conj();
    DensityMatrix4::new(m).expect("positive X-state")
}

// ---------------------------------------------------------------- criteria

fn c01_bell_limits() -> Outcome {
    let t = Instant::now();
    let r = correlation_report(&rank2(0.5, 1.0).unwrap(), &OptimizerConfig::default());
    let el = t.elapsed();
    let ok = (r.classical_correlation - 1.0).abs() < 1e-4
        && (r.concurrence - 1.0).abs() < 1e-4
        && (r.discord - 1.0).abs() < 1e-4
        && (r.mutual_information - 2.0).abs() < 1e-9
        && el < Duration::from_secs(1);
    outcome(
        ok,
        format!(
            "C={:.8} C'={:.8} Q={:.8} Im={:.12} in {:.3}s",
            r.classical_correlation,
            r.concurrence,
            r.discord,
            r.mutual_information,
            el.as_secs_f64()
        ),
    )
}

fn c02_product_limit() -> Outcome {
    let r = correlation_report(&rank2(0.5, 0.0).unwrap(), &OptimizerConfig::default());
    let worst = r
        .classical_correlation
        .abs()
        .max(r.concurrence.abs())
        .max(r.discord.abs());
    outcome(worst < 1e-9, format!("max |C|,|C'|,|Q| = {worst:.2e}"))
}

fn c03_rank2_concurrence() -> Outcome {
    let mut worst_value: f64 = 0.0;
    let mut worst_agree: f64 = 0.0;
    for i in 0..=10 {
        let eps = i as f64 / 10.0;
        let rho = rank2(0.5, eps).unwrap();
        let eig = concurrence(&rho);
        let closed = xstate_concurrence(&rho).unwrap();
        worst_value = worst_value.max((eig - eps).abs());
        worst_agree = worst_agree
            .max((eig - closed).abs())
            .max((closed - oracle_x_concurrence(&rho)).abs());
    }
    outcome(
        worst_value < 1e-9 && worst_agree < 1e-9,
        format!("max |C'-eps| = {worst_value:.2e}, eigen vs closed form {worst_agree:.2e}"),
    )
}

fn c04_discord_without_entanglement() -> Outcome {
    let cfg = OptimizerConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for eps in [0.1, 0.2, 0.3, 0.4, 0.5] {
        let r = correlation_report(&rank3(0.5, eps).unwrap(), &cfg);
        ok &= r.concurrence.abs() < 1e-9 && r.discord > 0.01;
        parts.push(format!("eps={eps}: C'={:.1e} Q={:.4}", r.concurrence, r.discord));
    }
    outcome(ok, parts.join("; "))
}

fn c05_mdms_signature() -> Outcome {
    let spec = SweepSpec {
        family: Family::Rank3,
        fixed: StateParams::new(0.5, 0.5, 0.0).unwrap(),
        variable: SweepVariable::Eps,
        start: 0.0,
        stop: 1.0,
        step: 0.005,
        noise: None,
    };
    let rows = sweep(&spec, &OptimizerConfig::default()).unwrap();
    let (lo, hi) = (1.0 / 3.0 - 0.01, 0.385 + 0.01);
    let argmin = rows
        .iter()
        .min_by(|a, b| a.classical.total_cmp(&b.classical))
        .unwrap()
        .param;
    let local_max: Vec<f64> = rows
        .windows(3)
        .filter(|w| w[1].discord > w[0].discord && w[1].discord >= w[2].discord)
        .map(|w| w[1].param)
        .collect();
    let in_window = local_max.iter().any(|&e| (lo..=hi).contains(&e));
    outcome(
        (lo..=hi).contains(&argmin) && in_window,
        format!("argmin C at eps={argmin:.3}; local maxima of Q at {local_max:?}; window [{lo:.4}, {hi:.3}]"),
    )
}

fn c06_envelope_crossing() -> Outcome {
    let pts = scatter(0.01, Rank3Region::Mdms, &OptimizerConfig::default()).unwrap();
    let low2 = envelope_max(&pts, Series::Rank2, |c| c < 0.1).unwrap_or(f64::NAN);
    let low3 = envelope_max(&pts, Series::Rank3, |c| c < 0.1).unwrap_or(f64::NAN);
    let high2 = envelope_max(&pts, Series::Rank2, |c| c > 0.8).unwrap_or(f64::NAN);
    let high3 = envelope_max(&pts, Series::Rank3, |c| c > 0.8).unwrap_or(f64::NAN);
    outcome(
        low3 > low2 && high2 > high3,
        format!("C<0.1: maxQ rank3={low3:.6} rank2={low2:.6}; C>0.8: maxQ rank2={high2:.12} rank3={high3:.12}"),
    )
}

fn c07_circuit_fidelity() -> Outcome {
    let t = Instant::now();
    let axis: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
    let mut worst: f64 = 0.0;
    for &a in &axis {
        let theta = a * FRAC_PI_4;
        for &m in &axis {
            for &eps in &axis {
                let c = mdms_circuit(theta, 0.0, m, eps, SourceProbabilities::default()).unwrap();
                let rho = ensemble_density(&run_circuit(&c).unwrap()).unwrap();
                let p = (2.0 * theta).cos().powi(2).clamp(0.0, 1.0);
                let want = mdms(StateParams::new(p, m, eps).unwrap()).unwrap();
                worst = worst.max(rho.matrix().max_abs_diff(want.matrix()));
            }
        }
    }
    let el = t.elapsed();
    outcome(
        worst < 1e-10 && el < Duration::from_secs(10),
        format!(
            "max entry error {worst:.2e} over 1000 points in {:.3}s",
            el.as_secs_f64()
        ),
    )
}

fn c08_interferometer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(-PI..PI);
        let e = run_circuit(&mz_circuit(theta, phi)).unwrap();
        let (s, c) = (2.0 * theta).sin_cos();
        let want = SpinOrbitKet::new([
            C64::new(c, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(s, phi),
        ]);
        let got = e.branches.iter().fold(SpinOrbitKet::ZERO, |acc, b| acc + b.ket);
        worst = worst.max(got.max_abs_diff(&want));
    }
    let theta = 22.5f64.to_radians();
    let k0 = run_circuit(&mz_circuit(theta, 0.0)).unwrap().branches[0].ket;
    let kpi = run_circuit(&mz_circuit(theta, PI)).unwrap().branches[0].ket;
    let flip = (k0.0[0] - kpi.0[0]).norm().max((k0.0[3] + kpi.0[3]).norm());
    outcome(
        worst < 1e-12 && flip < 1e-12,
        format!("max amplitude error {worst:.2e}; phi=pi sign-flip residual {flip:.2e}"),
    )
}

fn c09_tomography_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let set = ProjectorSet::default();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let rho = random_density(&mut rng, 1 + i % 4);
        let back = reconstruct(&projection_probabilities(&rho, &set), &set).unwrap();
        worst = worst.max(back.matrix().max_abs_diff(rho.matrix()));
    }
    outcome(
        worst < 1e-10,
        format!("max entry error {worst:.2e} on 100 random states of rank 1-4"),
    )
}

fn c10_noise_monte_carlo() -> Outcome {
    let t = Instant::now();
    let noise = NoiseConfig::typical(100, 2024);
    let cfg = OptimizerConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, rho) in [
        ("rank2(1/2,0.5)", rank2(0.5, 0.5).unwrap()),
        ("rank3(1/2,0.4)", rank3(0.5, 0.4).unwrap()),
    ] {
        let a = monte_carlo_correlations(&rho, &noise, &cfg).unwrap();
        let b = monte_carlo_correlations(&rho, &noise, &cfg).unwrap();
        let same = a == b;
        ok &= a.discord.std < 0.05 && a.concurrence.std < 0.05 && same;
        parts.push(format!(
            "{name}: std(Q)={:.4} std(C')={:.4} reproducible={same}",
            a.discord.std, a.concurrence.std
        ));
    }
    let el = t.elapsed();
    ok &= el < Duration::from_secs(60);
    parts.push(format!("{:.2}s", el.as_secs_f64()));
    outcome(ok, parts.join("; "))
}

fn c11_optimizer_vs_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = OptimizerConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rho = random_x_state(&mut rng);
        let got = classical_correlation(&rho, &cfg).value;
        let want = oracle_classical_correlation(&rho, 1000);
        worst = worst.max((got - want).abs());
    }
    outcome(
        worst < 1e-3,
        format!("max |C - C_grid| = {worst:.2e} on 20 random X-states"),
    )
}

fn c12_profile_conservation() -> Outcome {
    let g = GridConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut states = vec![
        rank3(0.25, 0.0).unwrap(),
        rank2(0.5, 0.0).unwrap(),
        rank2(0.5, 1.0).unwrap(),
        bell(),
    ];
    states.extend((0..4).map(|i| random_density(&mut rng, 1 + i)));
    let integrals: Vec<f64> = states
        .iter()
        .map(|r| intensity_map(r, &g).unwrap().integral())
        .collect();
    let conserved = integrals.iter().all(|v| (v - 1.0).abs() <= 0.02);
    let r3 = &states[0];
    let share = polarization_resolved_map(r3, &g, Polarization::V).unwrap().integral() / integrals[0];
    let h_share = polarization_resolved_map(r3, &g, Polarization::H).unwrap().integral() / integrals[0];
    outcome(
        conserved && (share - 0.75).abs() <= 0.01,
        format!(
            "integrals in [{:.5}, {:.5}]; rank3(1/4,0) |Vh> share {share:.5}, |Hv> share {h_share:.5}",
            integrals.iter().cloned().fold(f64::INFINITY, f64::min),
            integrals.iter().cloned().fold(0.0, f64::max)
        ),
    )
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n_paths = rng.gen_range(2..7);
    let names: Vec<String> = (0..n_paths).map(|i| format!("p{i}")).collect();
    let mut c = Circuit::new();
    for n in &names {
        c.declare_path(n);
    }
    let pol = |r: &mut ChaCha8Rng| {
        if r.gen_bool(0.5) {
            Polarization::H
        } else {
            Polarization::V
        }
    };
    let mode = |r: &mut ChaCha8Rng| {
        if r.gen_bool(0.5) {
            TransverseMode::H
        } else {
            TransverseMode::V
        }
    };
    for _ in 0..rng.gen_range(0..4) {
        let p = &names[rng.gen_range(0..n_paths)];
        let w = rng.gen_range(0..=1000) as f64 / 1000.0;
        let (pl, md) = (pol(rng), mode(rng));
        c.add_source(Source::new(p, w, pl, md).unwrap());
    }
    // angles on the 1e-6 degree grid survive the six-decimal format exactly
    let angle = |r: &mut ChaCha8Rng| (r.gen_range(-360_000_000i64..=360_000_000) as f64 / 1e6).to_radians();
    for _ in 0..rng.gen_range(0..12) {
        let i = rng.gen_range(0..n_paths);
        let on = names[i].as_str();
        let kind = match rng.gen_range(0..9) {
            0 => ElementKind::Hwp { angle: angle(rng) },
            1 => ElementKind::DovePrism { angle: angle(rng) },
            2 => ElementKind::Phase { phi: angle(rng) },
            3 => ElementKind::NeutralFilter {
                t: rng.gen_range(0.0..=1.0),
            },
            4 => ElementKind::Mask { mode: mode(rng) },
            5 => ElementKind::PolPrep { pol: pol(rng) },
            6 => ElementKind::Block,
            k if i + 1 < n_paths => {
                // route strictly forward to keep the graph acyclic
                let t = names[rng.gen_range(i + 1..n_paths)].clone();
                let r = names[rng.gen_range(i + 1..n_paths)].clone();
                if k == 7 {
                    ElementKind::Pbs {
                        transmit: t,
                        reflect: r,
                    }
                } else {
                    let th: f64 = rng.gen_range(0.0..=std::f64::consts::FRAC_PI_2);
                    let loss: f64 = rng.gen_range(0.5..=1.0);
                    ElementKind::BeamSplitter {
                        r: loss * th.sin(),
                        t: loss * th.cos(),
                        transmit: t,
                        reflect: r,
                    }
                }
            }
            _ => ElementKind::Block,
        };
        c.add_element(Element::new(kind, on).unwrap());
    }
    for n in &names {
        if rng.gen_bool(0.4) {
            c.add_sink(n);
        }
    }
    c
}

fn c13_circuit_file_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut mismatches = 0;
    let mut ensemble_err: f64 = 0.0;
    for _ in 0..100 {
        let c = random_circuit(&mut rng);
        let back = parse_circuit(&serialize_circuit(&c)).unwrap();
        if back != c {
            mismatches += 1;
        }
        let (e1, e2) = (run_circuit(&c).unwrap(), run_circuit(&back).unwrap());
        if e1.branches.len() != e2.branches.len() {
            mismatches += 1;
            continue;
        }
        for (a, b) in e1.branches.iter().zip(&e2.branches) {
            ensemble_err = ensemble_err
                .max(a.ket.max_abs_diff(&b.ket))
                .max((a.weight - b.weight).abs());
        }
    }
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../circuits/fig1.circuit")).unwrap();
    let rho = ensemble_density(&run_circuit(&parse_circuit(&text).unwrap()).unwrap()).unwrap();
    let fig1_err = rho.matrix().max_abs_diff(rank3(0.5, 0.4).unwrap().matrix());
    outcome(
        mismatches == 0 && ensemble_err == 0.0 && fig1_err < 1e-10,
        format!(
            "{mismatches} mismatches in 100 random circuits; shipped fig1.circuit vs rank3(1/2,0.4): {fig1_err:.2e}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    // libtest flags (e.g. --nocapture) are accepted and ignored
    let criteria: [Criterion; 13] = [
        ("Bell limits", c01_bell_limits),
        ("product limit", c02_product_limit),
        ("rank-2 analytic concurrence", c03_rank2_concurrence),
        ("discord without entanglement", c04_discord_without_entanglement),
        ("MDMS signature on rank-3 sweep", c05_mdms_signature),
        ("envelope crossing in (C, Q) scatter", c06_envelope_crossing),
        ("circuit reproduces closed-form family", c07_circuit_fidelity),
        ("Mach-Zehnder output ket", c08_interferometer),
        ("tomography round trip", c09_tomography_round_trip),
        ("noise Monte Carlo spread and reproducibility", c10_noise_monte_carlo),
        ("optimizer vs brute-force grid", c11_optimizer_vs_brute_force),
        ("profile conservation", c12_profile_conservation),
        ("circuit-file round trip", c13_circuit_file_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:02} {status}  {name}: {} [{:.2}s]",
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
