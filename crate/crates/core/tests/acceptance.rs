//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line under a plain `cargo test`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use qec_core::constructions::{four_param_family, tilde_v4, v_state, w_state, FamilyParams};
use qec_core::cone::{corollary_conditions, membership, tip_bounds, DEFAULT_MEMBERSHIP_TOL};
use qec_core::entropy::n3_quantities;
use qec_core::lemma_lab::{eigen_entropy_bound, lemma1_margin, lemma3_margin, theorem1_check, to_eigenbasis, DEFAULT_PRODUCT_TOL};
use qec_core::qstate::{purify, random_density, random_pure};
use qec_core::tip_probe::{minimize, scale_feasibility, ProbeConfig};
use qec_core::{entropy_vector, mutual_information, EntropyVector, PartyDims, PureState, SubsystemMask};

const MARGIN_TOL: f64 = 1e-8;

fn max_entry_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Binary entropy written out directly, independent of the library's version.
fn h2(x: f64) -> f64 {
    let t = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    t(x) + t(1.0 - x)
}

fn abc_paper_order(psi: &PureState) -> Vec<f64> {
    let v = entropy_vector(psi).unwrap().restrict(SubsystemMask::full(3)).unwrap();
    v.to_paper_order().unwrap()
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_pair_mi(psi: &PureState) -> f64 {
    let n = psi.party_count();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max(mutual_information(psi, i, j).unwrap().abs());
        }
    }
    worst
}

fn criterion_v4() -> Outcome {
    let t0 = Instant::now();
    let v4 = v_state(4).unwrap();
    let psi = &v4.state;
    let singles: Vec<f64> = (0..4).map(|i| psi.subsystem_entropy(SubsystemMask::single(i)).unwrap()).collect();
    let single_dev = singles.iter().map(|h| (h - 2.0).abs()).fold(0.0, f64::max);
    let mi = max_pair_mi(psi);
    let dev = max_dev(&abc_paper_order(psi), &[2.0, 2.0, 2.0, 4.0, 4.0, 4.0, 2.0]);
    let elapsed = t0.elapsed();
    let pass = single_dev <= MARGIN_TOL && mi < 1e-9 && dev <= MARGIN_TOL && elapsed < Duration::from_secs(5);
    outcome(pass, format!("single dev {single_dev:.1e}, max pair MI {mi:.1e}, ABC dev {dev:.1e}, {elapsed:.2?}"))
}

fn criterion_w4() -> Outcome {
    let t0 = Instant::now();
    let w = abc_paper_order(&w_state(4).unwrap().state);
    let v = abc_paper_order(&v_state(4).unwrap().state);
    let k = 3f64.log2() / 2.0;
    let scaled: Vec<f64> = v.iter().map(|x| k * x).collect();
    let dev = max_dev(&w, &scaled);
    let elapsed = t0.elapsed();
    outcome(dev <= MARGIN_TOL && elapsed < Duration::from_secs(5), format!("dev from (log2 3 / 2) V4 vector {dev:.1e}, {elapsed:.2?}"))
}

fn criterion_tilde_grid() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut alphas = Vec::new();
    for k in 0..10 {
        // a = (sqrt(1 - 3q), sqrt(q), sqrt(q), sqrt(q)) with q from 0 to 1/4.
        let q = 0.25 * k as f64 / 9.0;
        let r = |p: f64| C64::new(p.sqrt(), 0.0);
        let a = [r(1.0 - 3.0 * q), r(q), r(q), r(q)];
        let alpha = [1.0 - 3.0 * q, q, q, q].iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum::<f64>() + 0.0;
        let got = abc_paper_order(&tilde_v4(&a).unwrap().state);
        let want = [2.0, 2.0, 2.0, 2.0 + alpha, 2.0 + alpha, 2.0 + alpha, alpha];
        worst = worst.max(max_dev(&got, &want));
        alphas.push(alpha);
    }
    let endpoints = alphas[0].abs() < 1e-12 && (alphas[9] - 2.0).abs() < 1e-12;
    outcome(
        worst <= MARGIN_TOL && endpoints,
        format!("10 points, alpha in [{:.3}, {:.3}], max dev {worst:.1e}", alphas[0], alphas[9]),
    )
}

fn criterion_family_grid() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut corollary_ok = true;
    let mut count = 0;
    let alphas = [0.0, 1.0, 2.0];
    let aux = [0.0, 0.5, 1.0];
    for &al in &alphas {
        for &be in &aux {
            for &ga in &aux {
                for &de in &aux {
                    let p = FamilyParams::from_entropies(al, be, ga, de, 2).unwrap();
                    let r = four_param_family(&p).unwrap();
                    let got = abc_paper_order(&r.state);
                    let want = [
                        2.0 + ga + de,
                        2.0 + be + de,
                        2.0 + be + ga,
                        2.0 + al + ga + de,
                        2.0 + al + be + de,
                        2.0 + al + be + ga,
                        al,
                    ];
                    worst = worst.max(max_dev(&got, &want));
                    if al > 0.0 {
                        let v = EntropyVector::from_paper_order(&got).unwrap();
                        corollary_ok &= corollary_conditions(&v, 1e-7).holds;
                    }
                    count += 1;
                }
            }
        }
    }
    outcome(
        worst <= MARGIN_TOL && corollary_ok,
        format!("{count} grid points, max dev {worst:.1e}, corollary conditions hold for alpha > 0: {corollary_ok}"),
    )
}

fn random_states_cone() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut m_fail = 0;
    let mut count = 0;
    for k in 0..2000u64 {
        let n = 2 + (k % 3) as usize;
        let d = if k % 2 == 0 { 2 } else { 3 };
        let dims = if n == 4 { PartyDims::new(vec![2; 4]).unwrap() } else { PartyDims::new(vec![d; n]).unwrap() };
        let v = if k % 5 == 0 {
            entropy_vector(&random_pure(&dims, k)).unwrap()
        } else {
            let rank = 1 + (k as usize / 3) % dims.total();
            entropy_vector(&random_density(&dims, rank, k).unwrap()).unwrap()
        };
        let report = membership(&v, DEFAULT_MEMBERSHIP_TOL).unwrap();
        let least = report.margins.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
        worst = worst.min(least);
        if n == 3 && n3_quantities(&v).is_err() {
            m_fail += 1;
        }
        count += 1;
    }
    outcome(
        worst >= -MARGIN_TOL && m_fail == 0,
        format!("{count} states, least margin {worst:.2e}, M disagreements {m_fail}"),
    )
}

fn lemma_sample() -> Vec<PureState> {
    let shapes = [vec![2, 2, 2, 2], vec![3, 3, 3, 3], vec![2, 3, 4, 2]];
    (0..2000u64)
        .map(|k| random_pure(&PartyDims::new(shapes[k as usize % 3].clone()).unwrap(), 10_000 + k))
        .collect()
}

fn criterion_lemmas(sample: &[PureState]) -> Outcome {
    let t0 = Instant::now();
    let mut l1 = f64::INFINITY;
    let mut l3 = f64::INFINITY;
    for psi in sample {
        let es = to_eigenbasis(psi).unwrap();
        l1 = l1.min(lemma1_margin(&es));
        l3 = l3.min(lemma3_margin(&es));
    }
    let mut constructed: Vec<(String, PureState, usize)> = vec![
        ("V4".into(), v_state(4).unwrap().state, 0),
        ("W4".into(), w_state(4).unwrap().state, 0),
        ("W5".into(), w_state(5).unwrap().state, 0),
        ("W6".into(), w_state(6).unwrap().state, 0),
    ];
    for k in 1..=4 {
        let q = 0.25 * k as f64 / 4.0;
        let r = |p: f64| C64::new(p.sqrt(), 0.0);
        let a = [r(1.0 - 3.0 * q), r(q), r(q), r(q)];
        constructed.push((format!("tilde-V4 q={q}"), tilde_v4(&a).unwrap().state, 3));
    }
    let mut theorem_fail = Vec::new();
    let mut least_eps = f64::INFINITY;
    let mut least_l2 = f64::INFINITY;
    for (name, psi, c) in &constructed {
        match theorem1_check(psi, *c, DEFAULT_PRODUCT_TOL) {
            Ok(t) => {
                least_eps = least_eps.min(t.eps_margin);
                least_l2 = least_l2.min(t.lemma2);
                if !(t.eps_margin > 0.0 && t.sum_margin > 0.0 && t.lemma2 >= -MARGIN_TOL) {
                    theorem_fail.push(name.clone());
                }
            }
            Err(e) => theorem_fail.push(format!("{name}: {e}")),
        }
    }
    let elapsed = t0.elapsed();
    let pass = l1 >= -MARGIN_TOL && l3 >= -MARGIN_TOL && theorem_fail.is_empty() && elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "{} random states: least lemma1 {l1:.2e}, least lemma3 {l3:.2e}; {} constructed: least lemma2 {least_l2:.2e}, least eps - 1/2 {least_eps:.3}, failures {theorem_fail:?}; {elapsed:.2?}",
            sample.len(),
            constructed.len()
        ),
    )
}

fn criterion_entropy_bound(sample: &[PureState]) -> Outcome {
    let mut upper = f64::INFINITY;
    let mut lower = f64::INFINITY;
    for psi in sample {
        let es = to_eigenbasis(psi).unwrap();
        for b in eigen_entropy_bound(&es) {
            upper = upper.min(b.upper);
            if let Some(l) = b.lower {
                lower = lower.min(l);
            }
        }
    }
    outcome(
        upper >= -MARGIN_TOL && lower >= -MARGIN_TOL,
        format!("least H - max(h, -log2(1 - eps)) {upper:.2e}, least max(...) - 2 eps {lower:.2e}"),
    )
}

fn criterion_probe() -> Outcome {
    let t0 = Instant::now();
    let mut cfg = ProbeConfig::new(vec![3, 3, 3, 3]);
    cfg.restarts = 20;
    cfg.constraint_tol = 1e-6;
    cfg.parallel = false;
    let result = minimize(&cfg, 0, 0.1).unwrap();
    let sums = result.feasible_objectives();
    let least = sums.iter().cloned().fold(f64::INFINITY, f64::min);
    let elapsed = t0.elapsed();
    let pass = sums.iter().all(|&s| s > 1.0) && elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "{} of {} restarts feasible, least feasible sum {least:.4}, eps at best {:?}, {elapsed:.1?}",
            sums.len(),
            cfg.restarts,
            result.best_eps_total
        ),
    )
}

fn criterion_scale() -> Outcome {
    let ell = EntropyVector::new(3, vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 1.0]).unwrap();
    let mut cfg = ProbeConfig::new(vec![4, 4, 4, 4]).with_warm_start(&v_state(4).unwrap().state);
    cfg.restarts = 1;
    cfg.max_iterations = 5;
    cfg.parallel = false;
    let two = scale_feasibility(&ell.scaled(2.0), &PartyDims::new(vec![4, 4, 4, 4]).unwrap(), &cfg).unwrap();

    let mut small = ProbeConfig::new(vec![2, 2, 2, 2]);
    small.restarts = 4;
    small.max_iterations = 200;
    small.parallel = false;
    let tip = scale_feasibility(&ell.scaled(0.3), &PartyDims::new(vec![2, 2, 2, 2]).unwrap(), &small).unwrap();
    let refined_raised = tip.target_bounds.exclusion_advisories.iter().any(|a| a == "refined");
    let h8 = tip_bounds(&ell.scaled(0.3), DEFAULT_MEMBERSHIP_TOL).refined_threshold.unwrap_or(f64::NAN);
    let h8_ok = (h8 - h2(1.0 / 8.0)).abs() < 1e-12 && (h8 - 0.54).abs() < 0.005;
    outcome(
        two.best_distance <= 1e-6 && refined_raised && h8_ok,
        format!(
            "2*ell distance {:.1e}; 0.3*ell distance {:.3} (reported), refined advisory {refined_raised}, h(1/8) = {h8:.6}",
            two.best_distance, tip.best_distance
        ),
    )
}

fn criterion_purification() -> Outcome {
    let shapes = [vec![2, 2], vec![2, 3], vec![2, 2, 2], vec![3, 3]];
    let mut marg = 0.0f64;
    let mut ent = 0.0f64;
    for k in 0..200u64 {
        let dims = PartyDims::new(shapes[k as usize % 4].clone()).unwrap();
        let rank = 1 + (k as usize) % dims.total();
        let rho = random_density(&dims, rank, 50_000 + k).unwrap();
        let psi = purify(&rho).unwrap();
        let n = dims.len();
        let back = psi.marginal(SubsystemMask::full(n)).unwrap();
        marg = marg.max(max_entry_diff(back.matrix(), rho.matrix()));
        let purifier = psi.subsystem_entropy(SubsystemMask::single(n)).unwrap();
        ent = ent.max((purifier - rho.entropy().unwrap()).abs());
    }
    outcome(marg < 1e-10 && ent <= 1e-9, format!("200 states, max marginal error {marg:.1e}, max entropy diff {ent:.1e}"))
}

fn main() -> ExitCode {
    let sample = lemma_sample();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 V4 construction", Box::new(criterion_v4)),
        ("2 W4 scaling", Box::new(criterion_w4)),
        ("3 tilde-V4 grid", Box::new(criterion_tilde_grid)),
        ("4 four-parameter family grid", Box::new(criterion_family_grid)),
        ("5 random states inside the cone", Box::new(random_states_cone)),
        ("6 lemmas and theorem", Box::new(|| criterion_lemmas(&sample))),
        ("7 eigenvalue entropy bound", Box::new(|| criterion_entropy_bound(&sample))),
        ("8 constrained minimization", Box::new(criterion_probe)),
        ("9 scale feasibility", Box::new(criterion_scale)),
        ("10 purification round trip", Box::new(criterion_purification)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
