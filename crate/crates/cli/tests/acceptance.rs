//! End-to-end acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line to
//! stderr (uncaptured) and then asserts.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use dyadic_core::ode::{integrate_with, Boundary, IntegrateOptions};
use dyadic_core::selfsimilar::{
    build_selfsimilar, c_growth_check, divergence_fit, envelope_check, find_l_star, hs_profile, selfsimilar_forward,
    shoot_selfsimilar, strong_from_weak, DivergenceProfile, ALPHA_MIN,
};
use dyadic_core::shell::{energy, normalized, ShellField};
use dyadic_core::shooting::{classify_growth, GrowthClass};
use dyadic_core::stationary::{
    backward_ratio_iterates, backward_ratio_step, build_constant_solution, constant_forward, find_unique_constant,
    forward_ratio_iterates, forward_ratio_step, RatioStepParams,
};
use dyadic_core::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, passed: bool, detail: &str) {
    let mark = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2}: {mark}  {detail}");
}

macro_rules! require {
    ($fails:ident, $cond:expr, $($msg:tt)*) => {
        if !$cond {
            $fails.push(format!($($msg)*));
        }
    };
}

fn finish(n: u32, summary: String, fails: Vec<String>) {
    let ok = fails.is_empty();
    let detail = if ok { summary } else { format!("{summary}; {}", fails.join("; ")) };
    report(n, ok, &detail);
    assert!(ok, "criterion {n}: {detail}");
}

fn params(beta: f64, d1: f64, d2: f64, f: f64, n: usize) -> Params {
    Params::new(beta, d1, d2, f, n).unwrap()
}

fn kn(beta: f64, n: i64) -> f64 {
    (beta * n as f64).exp2()
}

/// Terms of the right-hand side at shell `n` for a time-independent profile `a`,
/// written out directly from the model: returns `(sum, largest |term|)`.
fn rhs_terms(a: &[f64], beta: f64, d1: f64, d2: f64, n: usize) -> (f64, f64) {
    let at = |m: i64| if m < 0 || m as usize >= a.len() { 0.0 } else { a[m as usize] };
    let m = n as i64;
    let terms = [
        d1 * kn(beta, m) * at(m - 1) * at(m - 1),
        -d1 * kn(beta, m + 1) * at(m) * at(m + 1),
        -d2 * kn(beta, m) * at(m + 1) * at(m + 1),
        d2 * kn(beta, m - 1) * at(m) * at(m - 1),
    ];
    (terms.iter().sum(), terms.iter().fold(0.0f64, |s, t| s.max(t.abs())))
}

/// Largest relative residual of the stationary relations over shells `1..len−1`
/// plus the forcing relation at shell 0.
fn stationary_oracle(a: &[f64], beta: f64, d1: f64, d2: f64, f: f64) -> f64 {
    let mut worst = {
        let (s, m) = rhs_terms(a, beta, d1, d2, 0);
        (s + f).abs() / m.max(f)
    };
    for n in 1..a.len() - 1 {
        let (s, m) = rhs_terms(a, beta, d1, d2, n);
        worst = worst.max(s.abs() / m);
    }
    worst
}

/// Largest relative residual of `−a_n = rhs_n(a)` over shells `1..len−1`.
fn selfsimilar_oracle(a: &[f64], beta: f64, d1: f64, d2: f64) -> f64 {
    (1..a.len() - 1)
        .map(|n| {
            let (s, m) = rhs_terms(a, beta, d1, d2, n);
            (s + a[n]).abs() / m.max(a[n].abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let beta = rng.gen_range(0.1..3.0);
        let d1 = 10f64.powf(rng.gen_range(-3.0..2.0));
        let d2 = 10f64.powf(rng.gen_range(-3.0..2.0));
        let p = RatioStepParams::from_params(&params(beta, d1, d2, 0.0, 4));
        worst = worst.max((forward_ratio_step(1.0, &p).unwrap() - 1.0).abs());
        worst = worst.max((backward_ratio_step(1.0, &p).unwrap() - 1.0).abs());
    }
    let mut fails = Vec::new();
    require!(fails, worst <= 1e-14, "max |step(1) - 1| = {worst:e}");
    finish(1, format!("1000 draws, max |step(1) - 1| = {worst:.1e}"), fails);
}

#[test]
fn criterion_02_forward_oscillation_and_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut fails = Vec::new();
    let mut worst_tail = 0.0f64;
    for draw in 0..50 {
        let beta: f64 = rng.gen_range(0.5..2.0);
        let d2 = 10f64.powf(rng.gen_range(-1.0..1.0));
        let k43 = (4.0 * beta / 3.0_f64).exp2();
        // ratios up to 0.6 of the threshold keep |slope at 1| well below 1
        let r = rng.gen_range(0.01..0.6) / k43;
        let c = loop {
            let c = 10f64.powf(rng.gen_range(-1.0..1.0));
            if (c - 1.0).abs() > 1e-3 {
                break c;
            }
        };
        let p = RatioStepParams::from_params(&params(beta, r * d2, d2, 0.0, 4));
        let b = forward_ratio_iterates(c, &p, 200).unwrap();
        // b[i] is the iterate after i steps, b[0] = C; even steps sit on C's side of 1
        let low_side = |i: usize| (i % 2 == 0) == (c < 1.0);
        for i in 0..200 {
            let dev = b[i] - 1.0;
            let on_side = if low_side(i) { dev < 0.0 } else { dev > 0.0 };
            // once converged to machine precision the sign is noise
            if dev.abs() > 1e-14 {
                require!(fails, on_side, "draw {draw}: iterate {i} = {} on the wrong side of 1", b[i]);
            }
            if i >= 2 && (b[i - 2] - 1.0).abs() > 1e-14 {
                require!(
                    fails,
                    (b[i] - 1.0).abs() <= (b[i - 2] - 1.0).abs(),
                    "draw {draw}: envelope not monotone at {i}"
                );
            }
        }
        worst_tail = worst_tail.max((b[199] - 1.0).abs());
    }
    fails.truncate(5);
    require!(fails, worst_tail < 1e-10, "max |b_200 - 1| = {worst_tail:e}");
    finish(2, format!("50 draws, max |b_200 - 1| = {worst_tail:.1e}"), fails);
}

#[test]
fn criterion_03_backward_confinement() {
    let p = RatioStepParams::from_params(&params(1.0, 1.0, 1.0, 0.0, 4));
    let n = 300;
    let mut fails = Vec::new();
    let mut tails = Vec::new();
    for c in [0.5, 2.0] {
        let b = backward_ratio_iterates(c, &p, n).unwrap();
        // b[i] is shell i+1: b[n-1] = C*, b[n-2] = b*_(N−1)
        let top = b[n - 1];
        let next = b[n - 2];
        require!(fails, top == c, "seed not at shell N");
        for (i, &x) in b[..n - 1].iter().enumerate() {
            let ok = if c < 1.0 {
                c < x && x <= next && next < 1.0 / c
            } else {
                next <= x && x < c
            };
            require!(fails, ok, "C* = {c}: shell {} = {x} escapes the bounds", i + 1);
        }
        tails.push((b[0] - 1.0).abs());
        require!(fails, (b[0] - 1.0).abs() < 1e-10, "C* = {c}: |b_1 - 1| = {:e}", (b[0] - 1.0).abs());
    }
    fails.truncate(5);
    finish(3, format!("|b_1 - 1| = {:.1e}, {:.1e}", tails[0], tails[1]), fails);
}

#[test]
fn criterion_04_obukhov_dominant_family() {
    let p = params(1.0, 0.1, 1.0, 1.0, 60);
    let mut fails = Vec::new();
    let mut worst_res = 0.0f64;
    let mut worst_drift = 0.0f64;
    let mut constants = Vec::new();
    for i in 0..10 {
        let a0 = 0.05 * 2f64.powi(i);
        let seq = build_constant_solution(a0, &p).unwrap();
        let a = seq.values();
        let res = stationary_oracle(a, 1.0, 0.1, 1.0, 1.0);
        let tilde: Vec<f64> = (0..a.len()).map(|n| a[n] * kn(1.0, n as i64).cbrt()).collect();
        let drift = (40..=60).map(|n| (tilde[n] - tilde[60]).abs() / tilde[60]).fold(0.0, f64::max);
        worst_res = worst_res.max(res);
        worst_drift = worst_drift.max(drift);
        require!(fails, res < 1e-10, "a0 = {a0}: residual {res:e}");
        require!(fails, drift < 1e-6, "a0 = {a0}: drift {drift:e}");
        constants.push(a[1]);
    }
    constants.sort_by(f64::total_cmp);
    require!(fails, constants.windows(2).all(|w| w[0] < w[1]), "sequences are not distinct");
    finish(4, format!("10 seeds, residual {worst_res:.1e}, drift {worst_drift:.1e}"), fails);
}

#[test]
fn criterion_05_kp_dominant_unique_constant() {
    let p = params(1.0, 1.0, 1.0, 1.0, 40);
    let mut fails = Vec::new();
    let u = find_unique_constant(&p, 60, None).unwrap();
    let rel_width = u.bracket_width / u.root;
    require!(fails, rel_width < 1e-12, "bracket width {rel_width:e} of the root");
    let res = stationary_oracle(u.sequence.values(), 1.0, 1.0, 1.0, 1.0);
    require!(fails, res < 1e-8, "residual {res:e}");
    let mut shells = Vec::new();
    for sign in [1.0, -1.0] {
        let a0 = u.root * (1.0 + sign * 1e-6);
        let a = constant_forward(a0, &p, 60).unwrap();
        match classify_growth(&normalized(&a, &p)) {
            GrowthClass::Bounded => fails.push(format!("a0 = root(1 {sign:+}e-6) stays bounded")),
            GrowthClass::DivergingUp { shell } | GrowthClass::Collapsing { shell } => {
                require!(fails, shell < 60, "divergence detected only at shell {shell}");
                shells.push(shell);
            }
        }
    }
    let kp = params(1.0, 1.0, 0.0, 1.0, 40);
    let v = find_unique_constant(&kp, 60, None).unwrap();
    let c = 2f64.powf(-1.0 / 3.0);
    let kp_err = v
        .sequence
        .values()
        .iter()
        .enumerate()
        .map(|(n, &a)| (a - c * kn(1.0, n as i64).powf(-1.0 / 3.0)).abs())
        .fold(0.0, f64::max);
    require!(fails, kp_err < 1e-12, "pure KP profile off by {kp_err:e}");
    finish(
        5,
        format!(
            "a0 = {:.13}, width {rel_width:.1e}, perturbations diverge at shells {shells:?}, pure KP error {kp_err:.1e}",
            u.root
        ),
        fails,
    );
}

#[test]
fn criterion_06_pull_back() {
    let m = 2f64.powf(-4.0 / 3.0) / (1.0 - 2f64.powf(-2.0 / 3.0));
    let (l_star, weak) = find_l_star::<f64>(40, 1e-12).unwrap();
    let mut fails = Vec::new();
    require!(fails, l_star <= m, "L* = {l_star} > M = {m}");
    require!(fails, weak.well_defined, "pull-back at L* is not well defined");
    let v = &weak.values;
    require!(fails, v.windows(2).all(|w| w[0] <= w[1]), "weak sequence decreases somewhere");
    require!(fails, v.iter().all(|&x| x >= l_star - m && x <= l_star), "weak sequence leaves [L* - M, L*]");
    require!(fails, v[0] < 1e-6, "weak a_0 = {:e}", v[0]);
    let strong = strong_from_weak(v);
    let h3 = hs_profile(&strong, 0.3, 20, 40).unwrap();
    let h4 = hs_profile(&strong, 0.4, 20, 40).unwrap();
    require!(fails, h3.is_cauchy(1e-3), "s = 0.3 term ratio {} (K41 {})", h3.term_ratio, h3.k41_ratio);
    require!(fails, h4.term_ratio >= 1.0, "s = 0.4 terms decay with ratio {}", h4.term_ratio);
    finish(
        6,
        format!(
            "L* = {l_star:.12}, M = {m:.12}, weak a_0 = {:.1e}, H^0.3 ratio {:.4}, H^0.4 ratio {:.4}",
            v[0], h3.term_ratio, h4.term_ratio
        ),
        fails,
    );
}

/// Strong KP self-similar sequence (δ1 = 1, δ2 = 0) from the pull-back at depth `n_top`.
fn kp_strong(n_top: usize) -> Vec<f64> {
    let (_, weak) = find_l_star::<f64>(n_top, 1e-13).unwrap();
    let mut a = strong_from_weak(&weak.values);
    a[0] = 0.0;
    a
}

#[test]
fn criterion_07_kp_uniqueness() {
    let p = params(1.0, 1.0, 0.0, 0.0, 40);
    let reference = kp_strong(120);
    let root = reference[1];
    let mut fails = Vec::new();
    let res = selfsimilar_oracle(&reference[..=60], 1.0, 1.0, 0.0);
    require!(fails, res < 1e-12, "reference residual {res:e}");
    let mut profiles = Vec::new();
    let mut slopes = Vec::new();
    for sign in [1.0, -1.0] {
        let a = selfsimilar_forward(root * (1.0 + sign * 1e-8), &p, 40, 0).unwrap();
        match divergence_fit(&a[1..=40], &reference[1..=40]) {
            Ok(fit) => {
                let slope = fit.odd_slope.abs().min(fit.even_slope.abs());
                require!(
                    fails,
                    fit.profile != DivergenceProfile::Converged && slope >= ALPHA_MIN,
                    "sign {sign:+}: {:?} with slopes {:.3}, {:.3}",
                    fit.profile,
                    fit.odd_slope,
                    fit.even_slope
                );
                profiles.push(fit.profile);
                slopes.push((fit.odd_slope, fit.even_slope));
            }
            Err(e) => fails.push(format!("sign {sign:+}: {e}")),
        }
    }
    if profiles.len() == 2 {
        require!(fails, profiles[0] != profiles[1], "both signs give {:?}", profiles[0]);
    }
    finish(7, format!("a_1 = {root:.12}, profiles {profiles:?}, slopes {slopes:.3?}"), fails);
}

#[test]
fn criterion_08_multi_solution_band() {
    let p = params(1.0, 0.08, 1.0, 0.0, 300);
    let k1 = 2.0f64;
    let mut fails = Vec::new();
    let mut notes = Vec::new();
    for a1 in [0.1, 1.0, 10.0] {
        let seq = build_selfsimilar(a1, &p, 300).unwrap();
        let a = seq.values();
        let res = selfsimilar_oracle(a, 1.0, 0.08, 1.0);
        require!(fails, res < 1e-12, "a1 = {a1}: residual {res:e}");
        let b300 = a[300] / a[299] * k1.cbrt();
        require!(fails, (b300 - 1.0).abs() < 1e-8, "a1 = {a1}: |b_300 - 1| = {:e}", (b300 - 1.0).abs());
        let env = envelope_check(a, &p).unwrap();
        let eps1 = 1.0 / (a[1] * k1);
        let bound = 1.0 + (eps1 * k1.powf(2.0 / 3.0) / 1.0).sqrt();
        if env.first_ge_third {
            require!(fails, (env.bound - bound).abs() <= 1e-14 * bound, "a1 = {a1}: bound {} vs {bound}", env.bound);
        }
        require!(fails, env.holds(), "a1 = {a1}: ratio {} above envelope {}", env.max_ratio, env.bound);
        let g = c_growth_check(a, &p);
        require!(
            fails,
            g.monotone && g.m_fit > 1.0 && g.m_fit <= k1 * k1,
            "a1 = {a1}: growth monotone {} M_fit {}",
            g.monotone,
            g.m_fit
        );
        notes.push(format!("a1={a1}: res {res:.0e}, |b-1| {:.0e}, M_fit {:.3}", (b300 - 1.0).abs(), g.m_fit));
    }
    finish(8, notes.join(", "), fails);
}

/// Shells used to classify seeds `root·(1 ± 1e-6)` in the unique band.
const OFF_ROOT_DEPTH: usize = 300;

#[test]
fn criterion_09_unique_band_shooting() {
    let mut fails = Vec::new();
    let mut notes = Vec::new();
    for (d1, d2) in [(1.0, 1.0), (0.5, 1.0)] {
        let p = params(1.0, d1, d2, 0.0, 60);
        let shot = match shoot_selfsimilar(&p, 60) {
            Ok(s) => s,
            Err(e) => {
                fails.push(format!("({d1}, {d2}): {e}"));
                continue;
            }
        };
        let rel = shot.bracket_width / shot.root;
        require!(fails, rel < 1e-12, "({d1}, {d2}): bracket {rel:e}");
        let res = selfsimilar_oracle(shot.sequence.values(), 1.0, d1, d2);
        require!(fails, res < 1e-8, "({d1}, {d2}): residual {res:e}");
        require!(fails, shot.k41.drift < 1e-4, "({d1}, {d2}): K41 drift {:e}", shot.k41.drift);
        // off-root seeds against the root's K41 profile; at (0.5, 1) the runaway gains only
        // about 0.1 bits per shell, so the comparison runs well past the shooting depth
        let depth = OFF_ROOT_DEPTH;
        let deep = p.with_shells(depth).unwrap();
        let reference: Vec<f64> =
            (0..=depth).map(|n| shot.k41.constant * kn(1.0, n as i64).powf(-1.0 / 3.0)).collect();
        let mut profiles = Vec::new();
        for sign in [1.0, -1.0] {
            let mut a = selfsimilar_forward(shot.root * (1.0 + sign * 1e-6), &deep, depth, 0).unwrap();
            a.resize(depth + 1, f64::NAN);
            match divergence_fit(&a[1..], &reference[1..]) {
                Ok(fit) if fit.profile != DivergenceProfile::Converged => profiles.push(fit.profile),
                Ok(fit) => fails.push(format!("({d1}, {d2}) sign {sign:+}: seed classified {:?}", fit.profile)),
                Err(e) => fails.push(format!("({d1}, {d2}) sign {sign:+}: {e}")),
            }
        }
        if profiles.len() == 2 {
            require!(fails, profiles[0] != profiles[1], "({d1}, {d2}): both seeds give {:?}", profiles[0]);
        }
        notes.push(format!(
            "({d1},{d2}): a_1 = {:.10}, width {rel:.0e}, res {res:.0e}, drift {:.0e}, off-root {profiles:?}",
            shot.root, shot.k41.drift
        ));
    }
    finish(9, notes.join("; "), fails);
}

#[test]
fn criterion_10_ode_consistency() {
    let mut fails = Vec::new();
    let mut notes = Vec::new();

    // (a) unforced truncated energy conservation
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let p = params(1.0, 1.0, 1.0, 0.0, 20);
    let y0: Vec<f64> = (0..=20).map(|n| rng.gen_range(0.5..1.5) * 0.5f64.powi(n)).collect();
    let init = ShellField::new(0.0, y0).unwrap();
    let traj = integrate_with(&init, &p, &IntegrateOptions::new(1.0, 1e-10, 1e-13)).unwrap();
    let e0 = energy(&init);
    let drift = traj.samples.iter().map(|s| (energy(s) - e0).abs() / e0).fold(0.0, f64::max);
    require!(fails, traj.end() == 1.0, "(a) stopped at t = {}", traj.end());
    require!(fails, drift < 1e-8, "(a) energy drift {drift:e}");
    notes.push(format!("(a) drift {drift:.1e}"));

    // (b), (d) self-similar data, t0 = −1
    let n = 20;
    let kp = params(1.0, 1.0, 0.0, 0.0, n);
    let a = kp_strong(120);
    let t0 = -1.0;
    let init = ShellField::new(0.0, a[..=n].iter().map(|x| x / (0.0 - t0)).collect()).unwrap();
    let opts = IntegrateOptions::new(1.0, 1e-10, 1e-13)
        .samples_every(0.05)
        .boundary(Boundary::SelfSimilar { a: a[n + 1], t0 });
    let traj = integrate_with(&init, &kp, &opts).unwrap();
    let mut track = 0.0f64;
    let mut e_dev = 0.0f64;
    let e_ref: f64 = a[..=n].iter().map(|x| x * x).sum();
    for s in &traj.samples {
        for (m, &y) in s.values.iter().enumerate().skip(1) {
            let exact = a[m] / (s.time - t0);
            track = track.max((y - exact).abs() / exact);
        }
        e_dev = e_dev.max((energy(s) * (s.time - t0).powi(2) - e_ref).abs() / e_ref);
    }
    require!(fails, traj.end() == 1.0, "(b) stopped at t = {}", traj.end());
    require!(fails, track < 1e-6, "(b) relative tracking error {track:e}");
    require!(fails, e_dev < 1e-6, "(d) E(t)(t - t0)^2 varies by {e_dev:e}");
    notes.push(format!("(b) tracking {track:.1e}, (d) energy scaling {e_dev:.1e}"));

    // (c) forced constant solution; the KP-dominant state is used because the
    // Obukhov-dominant ones are linearly unstable at high shells
    let n = 20;
    let pc = params(1.0, 1.0, 1.0, 1.0, n);
    let u = find_unique_constant(&pc.with_shells(n + 1).unwrap(), 60, None).unwrap();
    let c = u.sequence.values();
    let init = ShellField::new(0.0, c[..=n].to_vec()).unwrap();
    let opts = IntegrateOptions::new(1.0, 1e-10, 1e-13).boundary(Boundary::Constant(c[n + 1]));
    let traj = integrate_with(&init, &pc, &opts).unwrap();
    let sup = traj
        .samples
        .iter()
        .flat_map(|s| s.values.iter().zip(c).map(|(y, x)| (y - x).abs()))
        .fold(0.0, f64::max);
    require!(fails, traj.end() == 1.0, "(c) stopped at t = {}", traj.end());
    require!(fails, sup < 1e-7, "(c) sup-norm deviation {sup:e}");
    notes.push(format!("(c) sup deviation {sup:.1e}"));

    finish(10, notes.join(", "), fails);
}

#[test]
fn criterion_11_cross_construction() {
    let pull_back = kp_strong(120)[1];
    let p = params(1.0, 1.0, 1e-12, 0.0, 60);
    let mut fails = Vec::new();
    let detail = match shoot_selfsimilar(&p, 60) {
        Ok(shot) => {
            let rel = (shot.root - pull_back).abs() / pull_back;
            require!(fails, rel < 1e-4, "pull-back {pull_back} vs shooting {} (relative {rel:e})", shot.root);
            format!("pull-back a_1 = {pull_back:.10}, shooting a_1 = {:.10}, relative gap {rel:.1e}", shot.root)
        }
        Err(e) => {
            fails.push(e.to_string());
            format!("pull-back a_1 = {pull_back:.10}")
        }
    };
    finish(11, detail, fails);
}

fn run_sweep(dir: &Path, name: &str, workers: &str) -> (bool, String) {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_dyadic"))
        .args(["sweep", "--grid", "0.01:2:20,0.01:2:20", "--beta", "1", "--workers", workers, "--out"])
        .arg(&out)
        .status()
        .expect("binary runs");
    (status.success(), std::fs::read_to_string(&out).unwrap_or_default())
}

#[test]
fn criterion_12_cli_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let mut fails = Vec::new();
    let (ok1, first) = run_sweep(dir.path(), "a.csv", "4");
    let (ok2, second) = run_sweep(dir.path(), "b.csv", "1");
    require!(fails, ok1 && ok2, "sweep exited with failure");
    require!(fails, first == second, "reruns differ");

    let mut lines = first.lines();
    let header = lines.next().unwrap_or_default();
    require!(
        fails,
        header == "delta1,delta2,ratio,regime,band,constant_found,selfsimilar_found,k41_constant,shoot_root,blowup_time",
        "header `{header}`"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    require!(fails, rows.len() == 400, "{} rows", rows.len());
    let (low, crit) = (2f64.powi(-4), 2f64.powf(-4.0 / 3.0));
    let mut mismatches = 0;
    let mut seen = std::collections::BTreeSet::new();
    for r in &rows {
        if r.len() != 10 {
            mismatches += 1;
            continue;
        }
        let d1: f64 = r[0].parse().unwrap();
        let d2: f64 = r[1].parse().unwrap();
        let ratio = d1 / d2;
        let regime = if ratio < crit {
            "obukhov_dominant"
        } else if ratio == crit {
            "critical_ratio"
        } else if ratio <= 1.0 {
            "kp_dominant"
        } else {
            "outside_selfsimilar_band"
        };
        let band = if ratio < low {
            "below_band"
        } else if ratio < crit {
            "multi_solution"
        } else if ratio == crit {
            "critical"
        } else if ratio <= 1.0 {
            "unique"
        } else {
            "above_band"
        };
        let parsed_ratio: f64 = r[2].parse().unwrap_or(f64::NAN);
        let well_formed = (parsed_ratio - ratio).abs() <= 1e-15 * ratio
            && matches!(r[5], "true" | "false")
            && matches!(r[6], "true" | "false")
            && r[7..].iter().all(|c| c.is_empty() || c.parse::<f64>().is_ok());
        if !(well_formed && r[3] == regime && r[4] == band) {
            mismatches += 1;
        }
        seen.insert(r[4]);
    }
    require!(fails, mismatches == 0, "{mismatches} rows disagree with the thresholds or are malformed");
    require!(fails, seen.len() >= 4, "bands seen: {seen:?}");
    finish(12, format!("{} rows, bands {seen:?}, reruns identical: {}", rows.len(), first == second), fails);
}
