//! The invariant suite behind `dyadic verify`.
//!
//! Reference checks run at fixed parameters; the `config_*` checks use the configured model.

use dyadic_core::ode::{integrate_with, Boundary, IntegrateOptions};
use dyadic_core::selfsimilar::{
    build_selfsimilar, c_growth_check, divergence_fit, envelope_check, find_l_star, hs_profile, selfsimilar_forward,
    shoot_selfsimilar, strong_from_weak, weak_defect, weak_from_strong, DivergenceProfile,
};
use dyadic_core::shell::{
    energy, normalized, regime_classify, rhs, selfsimilar_band, selfsimilar_residual_relative, thresholds, RegimeTag,
    SelfSimilarBand, ShellField,
};
use dyadic_core::shooting::classify_growth;
use dyadic_core::stationary::{
    backward_ratio_iterates, backward_ratio_step, build_constant_solution, constant_forward, find_unique_constant,
    forward_ratio_iterates, forward_ratio_step, k41_profile, max_relative_residual, RatioStepParams,
};
use dyadic_core::{DyadicError, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<String, String>;

fn fail(e: DyadicError) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(beta: f64, d1: f64, d2: f64, f: f64, n: usize) -> Result<Params, String> {
    Params::new(beta, d1, d2, f, n).map_err(fail)
}

pub fn run_suite(params: &Params) -> Vec<Check> {
    let checks: Vec<(&'static str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("fixed_points", Box::new(fixed_points)),
        ("forward_oscillation", Box::new(forward_oscillation)),
        ("backward_confinement", Box::new(backward_confinement)),
        ("obukhov_constant_family", Box::new(obukhov_family)),
        ("unique_constant", Box::new(unique_constant)),
        ("kp_pull_back", Box::new(kp_pull_back)),
        ("kp_uniqueness", Box::new(kp_uniqueness)),
        ("multi_solution_band", Box::new(multi_solution_band)),
        ("unique_band_shooting", Box::new(unique_band_shooting)),
        ("ode_energy", Box::new(ode_energy)),
        ("ode_selfsimilar", Box::new(ode_selfsimilar)),
        ("ode_constant", Box::new(ode_constant)),
        ("cross_construction", Box::new(cross_construction)),
        ("config_energy_identity", Box::new(move || config_energy_identity(params))),
        ("config_regime", Box::new(move || config_regime(params))),
        ("config_constant", Box::new(move || config_constant(params))),
        ("config_selfsimilar", Box::new(move || config_selfsimilar(params))),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Check { name, passed, detail }
        })
        .collect()
}

pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  result  detail\n", "check");
    for c in checks {
        let mark = if c.passed { "pass" } else { "FAIL" };
        out.push_str(&format!("{:<width$}  {mark:<6}  {}\n", c.name, c.detail));
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out
}

fn fixed_points() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let beta = rng.gen_range(0.1..3.0);
        let d1 = 10f64.powf(rng.gen_range(-3.0..2.0));
        let d2 = 10f64.powf(rng.gen_range(-3.0..2.0));
        let rp = RatioStepParams::from_params(&p(beta, d1, d2, 0.0, 2)?);
        worst = worst.max((forward_ratio_step(1.0, &rp).map_err(fail)? - 1.0).abs());
        worst = worst.max((backward_ratio_step(1.0, &rp).map_err(fail)? - 1.0).abs());
    }
    ensure(worst <= 1e-14, || format!("max |step(1) - 1| = {worst:e}"))?;
    Ok(format!("1000 draws, max |step(1) - 1| = {worst:.1e}"))
}

fn forward_oscillation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let beta: f64 = rng.gen_range(0.5..2.0);
        let d2 = 10f64.powf(rng.gen_range(-1.0..1.0));
        let r = rng.gen_range(0.01..0.6) / (4.0 * beta / 3.0).exp2();
        let c = if rng.gen_bool(0.5) { rng.gen_range(0.1..0.99) } else { rng.gen_range(1.01..10.0) };
        let b = forward_ratio_iterates(c, &RatioStepParams::from_params(&p(beta, r * d2, d2, 0.0, 2)?), 200)
            .map_err(fail)?;
        for i in 0..200 {
            let dev = b[i] - 1.0;
            let low = (i % 2 == 0) == (c < 1.0);
            if dev.abs() > 1e-14 {
                ensure(if low { dev < 0.0 } else { dev > 0.0 }, || format!("iterate {i} on the wrong side"))?;
            }
            if i >= 2 && (b[i - 2] - 1.0).abs() > 1e-14 {
                ensure(dev.abs() <= (b[i - 2] - 1.0).abs(), || format!("envelope grows at {i}"))?;
            }
        }
        worst = worst.max((b[199] - 1.0).abs());
    }
    ensure(worst < 1e-10, || format!("max |b_200 - 1| = {worst:e}"))?;
    Ok(format!("50 draws, max |b_200 - 1| = {worst:.1e}"))
}

fn backward_confinement() -> Outcome {
    let rp = RatioStepParams::from_params(&p(1.0, 1.0, 1.0, 0.0, 2)?);
    let n = 300;
    let mut tails = Vec::new();
    for c in [0.5, 2.0] {
        let b = backward_ratio_iterates(c, &rp, n).map_err(fail)?;
        let next = b[n - 2];
        let inside = b[..n - 1].iter().all(|&x| if c < 1.0 { c < x && x <= next && next < 1.0 / c } else { next <= x && x < c });
        ensure(inside, || format!("C* = {c}: iterates leave the bounds"))?;
        ensure((b[0] - 1.0).abs() < 1e-10, || format!("C* = {c}: |b_1 - 1| = {:e}", (b[0] - 1.0).abs()))?;
        tails.push((b[0] - 1.0).abs());
    }
    Ok(format!("|b_1 - 1| = {:.1e}, {:.1e}", tails[0], tails[1]))
}

fn obukhov_family() -> Outcome {
    let params = p(1.0, 0.1, 1.0, 1.0, 60)?;
    let (mut res, mut drift) = (0.0f64, 0.0f64);
    for i in 0..10 {
        let seq = build_constant_solution(0.05 * 2f64.powi(i), &params).map_err(fail)?;
        let t = normalized(seq.values(), &params);
        res = res.max(max_relative_residual(seq.values(), &params));
        drift = drift.max((40..=60).map(|n| (t[n] - t[60]).abs() / t[60]).fold(0.0, f64::max));
    }
    ensure(res < 1e-10 && drift < 1e-6, || format!("residual {res:e}, drift {drift:e}"))?;
    Ok(format!("10 seeds, residual {res:.1e}, drift {drift:.1e}"))
}

fn unique_constant() -> Outcome {
    let params = p(1.0, 1.0, 1.0, 1.0, 40)?;
    let u = find_unique_constant(&params, 60, None).map_err(fail)?;
    let width = u.bracket_width / u.root;
    ensure(width < 1e-12, || format!("bracket width {width:e}"))?;
    for sign in [1.0, -1.0] {
        let a = constant_forward(u.root * (1.0 + sign * 1e-6), &params, 60).map_err(fail)?;
        ensure(!classify_growth(&normalized(&a, &params)).is_bounded(), || format!("perturbation {sign:+}e-6 stays bounded"))?;
    }
    let kp = find_unique_constant(&p(1.0, 1.0, 0.0, 1.0, 40)?, 60, None).map_err(fail)?;
    let c = 2f64.powf(-1.0 / 3.0);
    let err = kp
        .sequence
        .values()
        .iter()
        .enumerate()
        .map(|(n, &a)| (a - c * (n as f64).exp2().powf(-1.0 / 3.0)).abs())
        .fold(0.0, f64::max);
    ensure(err < 1e-12, || format!("pure KP profile off by {err:e}"))?;
    Ok(format!("a0 = {:.13}, width {width:.1e}, pure KP error {err:.1e}", u.root))
}

fn kp_strong(n_top: usize) -> Result<Vec<f64>, String> {
    let (_, weak) = find_l_star::<f64>(n_top, 1e-13).map_err(fail)?;
    let mut a = strong_from_weak(&weak.values);
    a[0] = 0.0;
    Ok(a)
}

fn kp_pull_back() -> Outcome {
    let (l_star, weak) = find_l_star::<f64>(40, 1e-12).map_err(fail)?;
    let m = 2f64.powf(-4.0 / 3.0) / (1.0 - 2f64.powf(-2.0 / 3.0));
    ensure(l_star <= m && weak.is_confined() && weak.values[0] < 1e-6, || format!("L* = {l_star}, weak a_0 = {:e}", weak.values[0]))?;
    let strong = strong_from_weak(&weak.values);
    ensure(weak_defect(&weak_from_strong(&strong)) < 1e-13, || "weak/strong round trip breaks the weak relation".into())?;
    let h3 = hs_profile(&strong, 0.3, 20, 40).map_err(fail)?;
    let h4 = hs_profile(&strong, 0.4, 20, 40).map_err(fail)?;
    ensure(h3.is_cauchy(1e-3) && h4.term_ratio >= 1.0, || format!("H^s ratios {} and {}", h3.term_ratio, h4.term_ratio))?;
    Ok(format!("L* = {l_star:.12}, H^0.3 ratio {:.4}, H^0.4 ratio {:.4}", h3.term_ratio, h4.term_ratio))
}

fn kp_uniqueness() -> Outcome {
    let params = p(1.0, 1.0, 0.0, 0.0, 40)?;
    let reference = kp_strong(120)?;
    let mut profiles = Vec::new();
    for sign in [1.0, -1.0] {
        let a = selfsimilar_forward(reference[1] * (1.0 + sign * 1e-8), &params, 40, 0).map_err(fail)?;
        let fit = divergence_fit(&a[1..=40], &reference[1..=40]).map_err(fail)?;
        ensure(fit.profile != DivergenceProfile::Converged, || format!("sign {sign:+} converged"))?;
        profiles.push(fit.profile);
    }
    ensure(profiles[0] != profiles[1], || format!("both signs give {:?}", profiles[0]))?;
    Ok(format!("a_1 = {:.12}, profiles {profiles:?}", reference[1]))
}

fn multi_solution_band() -> Outcome {
    let params = p(1.0, 0.08, 1.0, 0.0, 300)?;
    for a1 in [0.1, 1.0, 10.0] {
        let seq = build_selfsimilar(a1, &params, 300).map_err(fail)?;
        let a = seq.values();
        let res = selfsimilar_residual_relative(a, &params).into_iter().fold(0.0, f64::max);
        let b = a[300] / a[299] * params.k1_pow(1.0 / 3.0);
        let env = envelope_check(a, &params).map_err(fail)?;
        let g = c_growth_check(a, &params);
        ensure(res < 1e-12 && (b - 1.0).abs() < 1e-8 && env.holds() && g.monotone && g.m_fit > 1.0 && g.m_fit <= 4.0, || {
            format!("a1 = {a1}: residual {res:e}, b_300 {b}, envelope {}, M_fit {}", env.holds(), g.m_fit)
        })?;
    }
    Ok("a1 in {0.1, 1, 10}: residual, limit, envelope and growth hold".into())
}

fn unique_band_shooting() -> Outcome {
    let mut notes = Vec::new();
    for (d1, d2) in [(1.0, 1.0), (0.5, 1.0)] {
        let params = p(1.0, d1, d2, 0.0, 60)?;
        let shot = shoot_selfsimilar(&params, 60).map_err(fail)?;
        let res = selfsimilar_residual_relative(shot.sequence.values(), &params).into_iter().fold(0.0, f64::max);
        ensure(shot.bracket_width < 1e-12 * shot.root && res < 1e-8 && shot.k41.drift < 1e-4, || {
            format!("({d1}, {d2}): width {:e}, residual {res:e}, drift {:e}", shot.bracket_width, shot.k41.drift)
        })?;
        let depth = 300;
        let deep = params.with_shells(depth).map_err(fail)?;
        let reference: Vec<f64> = (0..=depth).map(|n| shot.k41.constant * deep.k(n).powf(-1.0 / 3.0)).collect();
        for sign in [1.0, -1.0] {
            let mut a = selfsimilar_forward(shot.root * (1.0 + sign * 1e-6), &deep, depth, 0).map_err(fail)?;
            a.resize(depth + 1, f64::NAN);
            let fit = divergence_fit(&a[1..], &reference[1..]).map_err(fail)?;
            ensure(fit.profile != DivergenceProfile::Converged, || format!("({d1}, {d2}): off-root seed converged"))?;
        }
        notes.push(format!("({d1},{d2}) a_1 = {:.10}", shot.root));
    }
    Ok(notes.join(", "))
}

fn ode_energy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let params = p(1.0, 1.0, 1.0, 0.0, 20)?;
    let y0: Vec<f64> = (0..=20).map(|n| rng.gen_range(0.5..1.5) * 0.5f64.powi(n)).collect();
    let init = ShellField::new(0.0, y0).map_err(fail)?;
    let traj = integrate_with(&init, &params, &IntegrateOptions::new(1.0, 1e-10, 1e-13)).map_err(fail)?;
    let e0 = energy(&init);
    let drift = traj.samples.iter().map(|s| (energy(s) - e0).abs() / e0).fold(0.0, f64::max);
    ensure(traj.end() == 1.0 && drift < 1e-8, || format!("drift {drift:e} up to t = {}", traj.end()))?;
    Ok(format!("relative energy drift {drift:.1e}"))
}

fn ode_selfsimilar() -> Outcome {
    let n = 20;
    let params = p(1.0, 1.0, 0.0, 0.0, n)?;
    let a = kp_strong(120)?;
    let t0 = -1.0;
    let init = ShellField::new(0.0, a[..=n].iter().map(|x| -x / t0).collect()).map_err(fail)?;
    let opts = IntegrateOptions::new(1.0, 1e-10, 1e-13).samples_every(0.05).boundary(Boundary::SelfSimilar { a: a[n + 1], t0 });
    let traj = integrate_with(&init, &params, &opts).map_err(fail)?;
    let e_ref: f64 = a[..=n].iter().map(|x| x * x).sum();
    let (mut track, mut scaling) = (0.0f64, 0.0f64);
    for s in &traj.samples {
        for m in 1..=n {
            track = track.max((s.values[m] * (s.time - t0) - a[m]).abs() / a[m]);
        }
        scaling = scaling.max((energy(s) * (s.time - t0).powi(2) - e_ref).abs() / e_ref);
    }
    ensure(traj.end() == 1.0 && track < 1e-6 && scaling < 1e-6, || format!("tracking {track:e}, energy scaling {scaling:e}"))?;
    Ok(format!("tracking {track:.1e}, E(t)(t - t0)^2 variation {scaling:.1e}"))
}

fn ode_constant() -> Outcome {
    let n = 20;
    let params = p(1.0, 1.0, 1.0, 1.0, n)?;
    let u = find_unique_constant(&params.with_shells(n + 1).map_err(fail)?, 60, None).map_err(fail)?;
    let c = u.sequence.values();
    let init = ShellField::new(0.0, c[..=n].to_vec()).map_err(fail)?;
    let opts = IntegrateOptions::new(1.0, 1e-10, 1e-13).boundary(Boundary::Constant(c[n + 1]));
    let traj = integrate_with(&init, &params, &opts).map_err(fail)?;
    let sup = traj.samples.iter().flat_map(|s| s.values.iter().zip(c).map(|(y, x)| (y - x).abs())).fold(0.0, f64::max);
    ensure(traj.end() == 1.0 && sup < 1e-7, || format!("sup deviation {sup:e}"))?;
    Ok(format!("sup deviation {sup:.1e}"))
}

fn cross_construction() -> Outcome {
    let pull_back = kp_strong(120)?[1];
    let shot = shoot_selfsimilar(&p(1.0, 1.0, 1e-12, 0.0, 60)?, 60).map_err(fail)?;
    let rel = (shot.root - pull_back).abs() / pull_back;
    ensure(rel < 1e-4, || format!("pull-back {pull_back} vs shooting {}", shot.root))?;
    Ok(format!("relative gap {rel:.1e}"))
}

fn config_energy_identity(params: &Params) -> Outcome {
    let unforced = params.with_forcing(0.0).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let y: Vec<f64> = (0..=params.n_shells()).map(|n| rng.gen_range(-1.0..1.0) * params.k(n).powf(-0.5)).collect();
        let f = ShellField::new(0.0, y).map_err(fail)?;
        let r = rhs(&f, &unforced).map_err(fail)?;
        let (s, m) = f.values.iter().zip(&r).fold((0.0, 0.0f64), |(s, m), (y, d)| (s + y * d, m + (y * d).abs()));
        worst = worst.max(s.abs() / (1.0 + m));
    }
    ensure(worst < 1e-12, || format!("sum Y_n rhs_n = {worst:e} relative"))?;
    Ok(format!("100 fields, |sum Y_n rhs_n| <= {worst:.1e}"))
}

fn config_regime(params: &Params) -> Outcome {
    let (low, crit, unit) = thresholds(params);
    let d2 = 1.0;
    let tag = |r: f64| -> Result<RegimeTag, String> { Ok(regime_classify(&params.with_deltas(r * d2, d2).map_err(fail)?).map_err(fail)?.tag) };
    let band = |r: f64| -> Result<SelfSimilarBand, String> { selfsimilar_band(&params.with_deltas(r * d2, d2).map_err(fail)?).map_err(fail) };
    let (lo, hi) = (1.0 - 1e-9, 1.0 + 1e-9);
    ensure(tag(crit * lo)? == RegimeTag::ObukhovDominant && tag(crit * hi)? == RegimeTag::KPDominant, || "tag flip at k1^(-4/3)".into())?;
    ensure(tag(unit * hi)? == RegimeTag::OutsideSelfSimilarBand && tag(unit)? == RegimeTag::KPDominant, || "tag flip at 1".into())?;
    ensure(band(low * lo)? == SelfSimilarBand::BelowBand && band(low * hi)? == SelfSimilarBand::MultiSolution, || "band flip at k1^(-4)".into())?;
    let here = regime_classify(params).map_err(fail)?;
    Ok(format!("thresholds {low:.6}, {crit:.6}, {unit}; configured ratio {} is {}", here.ratio, here.tag))
}

fn config_constant(params: &Params) -> Outcome {
    let forced = if params.forcing() > 0.0 { params.clone() } else { params.with_forcing(1.0).map_err(fail)? };
    let seq = match regime_classify(&forced).map_err(fail)?.tag {
        RegimeTag::ObukhovDominant | RegimeTag::PureObukhov => {
            build_constant_solution(k41_profile(&forced).map_err(fail)?.0, &forced).map_err(fail)?
        }
        _ => find_unique_constant(&forced, 60.min(forced.n_shells().max(4)), None).map_err(fail)?.sequence,
    };
    let res = max_relative_residual(seq.values(), &forced);
    ensure(res < 1e-8, || format!("residual {res:e}"))?;
    Ok(format!("F = {}, a0 = {:.12}, residual {res:.1e}", forced.forcing(), seq.values()[0]))
}

fn config_selfsimilar(params: &Params) -> Outcome {
    let band = selfsimilar_band(params).map_err(fail)?;
    let depth = params.n_shells().clamp(8, 60);
    let values = match band {
        SelfSimilarBand::MultiSolution => build_selfsimilar(1.0, params, depth).map_err(fail)?.values().to_vec(),
        SelfSimilarBand::Unique | SelfSimilarBand::AboveBand | SelfSimilarBand::PureKP => {
            shoot_selfsimilar(params, depth).map_err(fail)?.sequence.values().to_vec()
        }
        other => return Ok(format!("not applicable in band {other}")),
    };
    let res = selfsimilar_residual_relative(&values, params).into_iter().fold(0.0, f64::max);
    ensure(res < 1e-8, || format!("residual {res:e}"))?;
    Ok(format!("band {band}, a_1 = {:.12}, residual {res:.1e}", values[1]))
}
