//! One runner per scenario. Each fills a [`RunTrace`] with stage records,
//! observed-versus-expected tables (stage `summary`) and invariant checks.
//!
//! Check details end in a basis tag: `[analytic]` for closed-form
//! expectations, `[oracle]` for values computed independently of the code
//! path under test, `[invariant]` for structural properties.

use collapse_core::dynamics::{
    csl_run, grw_hit, grw_schedule, CslModel, CslRunConfig, CslSampling, GridWavefunction, GrwParams,
};
use collapse_core::exec::map_trials;
use collapse_core::linalg::{Complex64, Operator, StateVector};
use collapse_core::protocol::system::{down_down, product_z, singlet, triplet_z, two_particle, up_up, Spin};
use collapse_core::protocol::{NonlocalMeasurement, PreparedT2, PreparedTz, SignalingExperiment, T2Classification};
use collapse_core::relativistic::{
    evolve_sigma1_variant, pair_sums, right_outcome_probabilities, run_full_from, stage0, triple_index, triple_of,
    RunOptions, Variant,
};
use collapse_core::rng::seeded;
use collapse_core::spacetime::{
    counterfactual_classify, hv_counterfactual_demo, past_cone_union, property_at, state_on_surface,
    stats_parameter_independence, ClaimTarget, CounterfactualClaim, EventLog, HiddenVariableModel, Legitimacy,
    PropertyVerdict, ScenarioConfig, SpacetimePoint,
};
use collapse_core::stats::{binomial_sigma, chi_square_gof, chi_square_homogeneity, ks_test};
use collapse_core::trace::{state_digest, RunTrace, TraceRecord};
use statrs::distribution::{ContinuousCDF, Exp, Normal};

use crate::scenario::{field, parse_triple, ConfigError, Params, Result, ScenarioFile};

/// Significance level of every χ² and KS check.
pub const SIGNIFICANCE: f64 = 1e-3;
/// Frequencies must fall within this many standard errors.
pub const SIGMAS: f64 = 3.0;

struct Ctx<'a> {
    seed: u64,
    trials: usize,
    params: Params<'a>,
    record_trials: usize,
}

/// Run `file`, returning its trace. Configuration problems are errors;
/// failed invariants are recorded in the trace.
pub fn run_scenario(file: &ScenarioFile) -> Result<RunTrace> {
    file.validate()?;
    if file.seed.is_none() && file.seed_required() {
        return Err(field("seed", "required for stochastic scenarios"));
    }
    let params = file.params();
    let default_trials = match file.scenario.as_str() {
        "t2" | "tz" | "relativistic-t2" => 1000,
        "signaling" | "toy-one" | "toy-two" => 100_000,
        _ => 10_000,
    };
    let ctx = Ctx {
        seed: file.seed.unwrap_or(0),
        trials: file.trials.unwrap_or(default_trials),
        params,
        record_trials: params.usize_or("record_trials", 100)?,
    };
    let mut trace = RunTrace::new(&file.scenario, file.seed);
    match file.scenario.as_str() {
        "tz" => run_tz(&ctx, &mut trace)?,
        "t2" => run_t2(&ctx, &mut trace)?,
        "signaling" => run_signaling(&ctx, &mut trace)?,
        "grw" => run_grw(&ctx, &mut trace)?,
        "csl" => run_csl(&ctx, &mut trace)?,
        "toy-one" => run_toy_one(&ctx, &mut trace)?,
        "toy-two" => run_toy_two(&ctx, &mut trace)?,
        "toy-stats" => run_toy_stats(&ctx, &mut trace)?,
        "counterfactual" => run_counterfactual(&ctx, &mut trace)?,
        "relativistic-t2" => run_relativistic(&ctx, &mut trace)?,
        other => return Err(ConfigError::UnknownScenario { name: other.to_string() }),
    }
    Ok(trace)
}

fn system_state(params: Params<'_>) -> Result<StateVector> {
    if let Some(a) = params.amplitudes("amplitudes")? {
        let coeffs: [Complex64; 4] =
            a.try_into().map_err(|_| field("amplitudes", "expected four amplitudes (↑↑, ↑↓, ↓↑, ↓↓)"))?;
        return Ok(two_particle(&coeffs));
    }
    Ok(match params.str_or("input", "singlet")? {
        "singlet" => singlet(),
        "upup" => up_up(),
        "downdown" => down_down(),
        "tripletz" => triplet_z(),
        "updown" => product_z(Spin::Up, Spin::Down),
        "downup" => product_z(Spin::Down, Spin::Up),
        other => {
            return Err(field(
                "input",
                format!("unknown state {other:?}; use singlet, upup, downdown, tripletz, updown, downup or amplitudes"),
            ))
        }
    })
}

fn check_frequency(trace: &mut RunTrace, name: &str, count: usize, n: usize, p: f64, basis: &str) {
    let f = count as f64 / n as f64;
    let sigma = binomial_sigma(p, n);
    let passed = if p == 0.0 || p == 1.0 { f == p } else { (f - p).abs() <= SIGMAS * sigma };
    trace.check(name, passed, format!("observed {f:.6} expected {p:.6} (±{SIGMAS}σ, σ = {sigma:.2e}) [{basis}]"));
}

/// χ² goodness of fit over bins with nonzero expectation; bins expected to
/// be empty must be empty.
fn check_counts(trace: &mut RunTrace, name: &str, counts: &[u64], probs: &[f64], basis: &str) {
    let n: u64 = counts.iter().sum();
    let impossible: u64 = counts.iter().zip(probs).filter(|(_, &p)| p <= 0.0).map(|(c, _)| c).sum();
    let (obs, exp): (Vec<u64>, Vec<f64>) =
        counts.iter().zip(probs).filter(|(_, &p)| p > 0.0).map(|(&c, &p)| (c, p * n as f64)).unzip();
    if obs.len() < 2 {
        trace.check(
            name,
            impossible == 0,
            format!("single possible outcome, {impossible} impossible events [{basis}]"),
        );
        return;
    }
    let t = chi_square_gof(&obs, &exp);
    trace.check(
        name,
        impossible == 0 && t.passes(SIGNIFICANCE),
        format!(
            "χ² = {:.3}, dof {}, p = {:.4}, impossible events {impossible} [{basis}]",
            t.statistic, t.dof, t.p_value
        ),
    );
}

fn table(name: &str, entries: impl IntoIterator<Item = (String, f64)>) -> TraceRecord {
    entries.into_iter().fold(TraceRecord::new("summary", name), |r, (k, v)| r.probability(k, v))
}

fn run_tz(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let system = system_state(ctx.params)?;
    let prepared = PreparedTz::new(&system)?;
    let dist = prepared.tz_distribution();
    trace.push(TraceRecord::new("prepare", "system state before coupling").with_state(&system, true));
    let results = map_trials(ctx.trials, ctx.seed, |_, rng| prepared.sample(rng));
    let mut counts = [0u64; 3];
    for (i, r) in results.iter().enumerate() {
        counts[(r.inferred_tz + 1) as usize] += 1;
        if i < ctx.record_trials {
            trace.push(
                TraceRecord::new("trial", format!("trial {i}"))
                    .with_state(&r.reduced_system, false)
                    .outcome("omega3", r.omega3.into())
                    .outcome("omega6", r.omega6.into())
                    .outcome("tz", r.inferred_tz.into()),
            );
        }
    }
    let labels = ["-1", "0", "+1"];
    trace.push(table(
        "T_z frequencies",
        labels.iter().enumerate().flat_map(|(k, l)| {
            [(format!("observed.{l}"), counts[k] as f64 / ctx.trials as f64), (format!("expected.{l}"), dist[k])]
        }),
    ));
    check_counts(trace, "T_z distribution", &counts, &dist, "analytic");
    Ok(())
}

fn run_t2(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let system = system_state(ctx.params)?;
    let prepared = PreparedT2::new(&system)?;
    let probs = prepared.classification_probabilities();
    trace.push(TraceRecord::new("prepare", "system state before coupling").with_state(&system, true));
    let results = map_trials(ctx.trials, ctx.seed, |_, rng| prepared.sample(rng));
    let mut counts = [0u64; 4];
    for (i, r) in results.iter().enumerate() {
        let k = T2Classification::ALL.iter().position(|c| *c == r.classification).expect("known class");
        counts[k] += 1;
        if i < ctx.record_trials {
            let mut rec = TraceRecord::new("trial", format!("trial {i}: {}", r.classification.label()))
                .with_state(&r.reduced_system, false);
            for (name, v) in ["omega3", "omega6", "omega2*", "omega4*", "omega3*", "omega6*"].iter().zip(r.omegas) {
                rec = rec.outcome(*name, v.into());
            }
            trace.push(rec);
        }
    }
    let expected: Vec<f64> = T2Classification::ALL.iter().map(|c| probs.get(c).copied().unwrap_or(0.0)).collect();
    trace.push(table(
        "T² classification frequencies",
        T2Classification::ALL.iter().enumerate().flat_map(|(k, c)| {
            [
                (format!("observed.{}", c.label()), counts[k] as f64 / ctx.trials as f64),
                (format!("expected.{}", c.label()), expected[k]),
            ]
        }),
    ));
    check_counts(trace, "T² classification distribution", &counts, &expected, "analytic");
    Ok(())
}

fn run_signaling(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let mode: NonlocalMeasurement = ctx.params.str_or("mode", "t2")?.parse()?;
    let mut all_counts = Vec::new();
    for flip in [false, true] {
        let exp = SignalingExperiment::new(flip, mode)?;
        let seed = ctx.seed.wrapping_add(flip as u64);
        let plus = map_trials(ctx.trials, seed, |_, rng| exp.sample(rng)).into_iter().filter(|&o| o == 1).count();
        let p = exp.prob_plus();
        trace.push(table(
            &format!("T_2z with flip {}", if flip { "on" } else { "off" }),
            [("observed.+1".to_string(), plus as f64 / ctx.trials as f64), ("expected.+1".to_string(), p)],
        ));
        check_frequency(
            trace,
            &format!("P(T_2z = +1), flip {}", if flip { "on" } else { "off" }),
            plus,
            ctx.trials,
            p,
            "analytic",
        );
        all_counts.push([plus as u64, (ctx.trials - plus) as u64]);
    }
    let (a, b) = (all_counts[0], all_counts[1]);
    if a.iter().chain(&b).all(|&c| c > 0) {
        let t = chi_square_homogeneity(&a, &b);
        trace.push(table(
            "flip on/off homogeneity",
            [("chi2".to_string(), t.statistic), ("p_value".to_string(), t.p_value)],
        ));
        trace.check(
            "T_2z distribution independent of flip",
            t.passes(SIGNIFICANCE),
            format!("χ² = {:.3}, p = {:.4} [invariant]", t.statistic, t.p_value),
        );
    } else {
        trace.check(
            "T_2z distribution independent of flip",
            a == b,
            format!("deterministic counts {a:?} vs {b:?} [invariant]"),
        );
    }
    Ok(())
}

fn run_grw(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let p = ctx.params;
    let (d, s, alpha) = (p.f64_or("separation", 10.0)?, p.f64_or("width", 0.5)?, p.f64_or("alpha", 1.0)?);
    let (points, spacing, origin) =
        (p.usize_or("points", 2001)?, p.f64_or("spacing", 0.02)?, p.f64_or("origin", -20.0)?);
    let lump = move |x0: f64| move |x: f64| Complex64::new((-(x - x0).powi(2) / (4.0 * s * s)).exp(), 0.0);
    let (left, right) = (lump(-d), lump(d));
    let psi = GridWavefunction::single(points, spacing, origin, move |x| left(x) + right(x))?;
    let params = GrwParams::new(1.0, alpha, vec![1.0])?;
    let centers = map_trials(ctx.trials, ctx.seed, |_, rng| grw_hit(&psi, 0, &params, rng).map(|h| h.0))
        .into_iter()
        .collect::<collapse_core::Result<Vec<f64>>>()?;
    for (i, x) in centers.iter().take(ctx.record_trials).enumerate() {
        trace.push(TraceRecord::new("hit", format!("hit {i}")).probability("center", *x));
    }
    let right_count = centers.iter().filter(|&&x| x > 0.0).count();
    trace.push(table(
        "lump frequencies",
        [("observed.right".to_string(), right_count as f64 / ctx.trials as f64), ("expected.right".to_string(), 0.5)],
    ));
    check_frequency(trace, "collapse onto the right lump", right_count, ctx.trials, 0.5, "analytic");
    let sd = (s * s + 0.5 / alpha).sqrt();
    let (nl, nr) = (Normal::new(-d, sd).expect("positive sd"), Normal::new(d, sd).expect("positive sd"));
    let ks = ks_test(&centers, |x| 0.5 * (nl.cdf(x) + nr.cdf(x)));
    trace.check(
        "hit centers follow the center density",
        ks.passes(SIGNIFICANCE),
        format!("KS D = {:.4}, p = {:.4} [analytic]", ks.statistic, ks.p_value),
    );

    let (lambda, mass, duration) = (p.f64_or("lambda", 1e-2)?, p.f64_or("mass", 2.0)?, p.f64_or("duration", 1e4)?);
    let single = GrwParams::new(lambda, alpha, vec![mass])?;
    let schedule = grw_schedule(&single, duration, &mut seeded(ctx.seed ^ 0x5eed))?;
    let gaps: Vec<f64> = schedule.windows(2).map(|w| w[1].0 - w[0].0).collect();
    let exp = Exp::new(lambda * mass).map_err(|e| field("lambda", e.to_string()))?;
    let ks = ks_test(&gaps, |t| exp.cdf(t));
    trace.check(
        "inter-hit times exponential at λ·m",
        ks.passes(SIGNIFICANCE),
        format!("{} gaps, KS p = {:.4} [analytic]", gaps.len(), ks.p_value),
    );

    let n = p.usize_or("constituents", 1000)?;
    let many = GrwParams::new(lambda, alpha, vec![1.0; n])?;
    let horizon = p.f64_or("rate_duration", 100.0)?;
    let count = grw_schedule(&many, horizon, &mut seeded(ctx.seed ^ 0xa11))?.len() as f64;
    let mean = n as f64 * lambda * horizon;
    trace.push(table("total hit rate", [("observed.hits".to_string(), count), ("expected.hits".to_string(), mean)]));
    trace.check(
        "total hit rate N·λ",
        (count - mean).abs() <= SIGMAS * mean.sqrt(),
        format!("{count} hits, expected {mean} ± {:.1} [analytic]", SIGMAS * mean.sqrt()),
    );
    Ok(())
}

fn run_csl(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let p = ctx.params;
    let amps = p
        .amplitudes("amplitudes")?
        .unwrap_or_else(|| vec![Complex64::new(0.8f64.sqrt(), 0.0), Complex64::new(0.2f64.sqrt(), 0.0)]);
    if amps.len() != 2 {
        return Err(field("amplitudes", "expected two amplitudes"));
    }
    let initial = StateVector::from_amplitudes(amps)?.normalized()?;
    let weights: Vec<f64> = initial.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let gamma = p.f64_or("gamma", 1.0)?;
    let total_time = p.f64_or("total_time", 10.0)?;
    let dt = p.f64_or("dt", 0.002)?;
    let sampling = match p.str_or("sampling", "guided")? {
        "raw" => CslSampling::Raw,
        "guided" => CslSampling::Guided,
        "resampled" => CslSampling::Resampled { ess_fraction: p.f64_or("ess_fraction", 0.5)? },
        other => return Err(field("sampling", format!("unknown mode {other:?}; use raw, guided or resampled"))),
    };
    let steps = (total_time / dt).round().max(1.0) as usize;
    let config = CslRunConfig {
        total_time,
        dt,
        members: ctx.trials,
        record_every: p.usize_or("record_every", (steps / 20).max(1))?,
        sampling,
        record_members: p.get("trajectory").is_some(),
    };
    let sigma_z = Operator::real_diagonal(&[2], &[1.0, -1.0])?;
    let model = CslModel::new(None, vec![sigma_z], gamma)?;
    let run = csl_run(&initial, &model, &config, ctx.seed)?;
    if let Some(path) = p.get("trajectory") {
        let path = path.as_str().ok_or_else(|| field("trajectory", "expected a file path"))?;
        write_trajectory(path, &run.member_records)?;
    }
    for snap in &run.snapshots {
        trace.push(
            TraceRecord::new("snapshot", format!("t = {}", snap.t))
                .probability("raw_norm_mean", snap.raw_norm_mean)
                .probability("raw_norm_sem", snap.raw_norm_sem)
                .probability("p0", snap.manifold_probabilities[0])
                .probability("p1", snap.manifold_probabilities[1])
                .probability("ess_fraction", snap.ess_fraction),
        );
    }
    // Bonferroni band so the overall significance stays at SIGNIFICANCE.
    let m = run.snapshots.len().max(1) as f64;
    let z = Normal::standard().inverse_cdf(1.0 - SIGNIFICANCE / (2.0 * m));
    let martingale = run.snapshots.iter().all(|s| (s.raw_norm_mean - 1.0).abs() <= z * s.raw_norm_sem.max(1e-12));
    trace.check(
        "raw E[‖Ψ‖²] constant",
        martingale,
        format!("{m} snapshots within {z:.2} standard errors of 1 [invariant]"),
    );
    let threshold = p.f64_or("threshold", 0.99)?;
    let freqs = run.reduction_frequencies(threshold);
    trace.push(table(
        "reduction frequencies",
        freqs.iter().enumerate().flat_map(|(k, f)| {
            [
                (format!("observed.{k}"), f.frequency),
                (format!("sigma.{k}"), f.sigma),
                (format!("expected.{k}"), weights[k]),
            ]
        }),
    ));
    if gamma * total_time >= 10.0 {
        let reduced = run.reduced_fraction(threshold);
        trace.check("ensemble reduced", reduced > 0.999, format!("reduced fraction {reduced:.5} [invariant]"));
        for (k, f) in freqs.iter().enumerate() {
            trace.check(
                format!("reduction frequency {k}"),
                (f.frequency - weights[k]).abs() <= SIGMAS * f.sigma.max(1e-12),
                format!("observed {:.4} ± {:.4} expected {:.4} [analytic]", f.frequency, f.sigma, weights[k]),
            );
        }
    }
    Ok(())
}

fn write_trajectory(path: &str, records: &[collapse_core::dynamics::MemberRecord]) -> Result<()> {
    use std::io::Write;
    let io = |e: std::io::Error| ConfigError::Io { path: path.into(), message: e.to_string() };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| io(e.into()))?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)
}

fn run_toy_one(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let p = ctx.params;
    let amps = p.amplitudes("amplitudes")?.unwrap_or_else(|| vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]);
    let [alpha, beta]: [Complex64; 2] = amps.try_into().map_err(|_| field("amplitudes", "expected [α, β]"))?;
    let r = p.point_or("r", SpacetimePoint::new(0.0, 1.0))?;
    let on = p.bool_or("on", true)?;
    let cfg = ScenarioConfig::one_particle(alpha, beta, r, on)?;
    let p_plus = cfg.initial_state().amplitudes()[0].norm_sqr();
    let before = SpacetimePoint::new(r.x, r.t / 2.0);
    let after = SpacetimePoint::new(r.x, r.t + 1.0);
    let results = map_trials(
        ctx.trials,
        ctx.seed,
        |_, rng| -> collapse_core::Result<(Option<i8>, PropertyVerdict, PropertyVerdict)> {
            let mut log = EventLog::new();
            let v0 = property_at(&before, 0, &cfg, &mut log, rng)?;
            let v1 = property_at(&after, 0, &cfg, &mut log, rng)?;
            Ok((log.get("A").map(|e| e.outcome), v0, v1))
        },
    )
    .into_iter()
    .collect::<collapse_core::Result<Vec<_>>>()?;
    for (i, (o, v0, v1)) in results.iter().take(ctx.record_trials).enumerate() {
        let mut rec = TraceRecord::new("trial", format!("trial {i}: before {v0:?}, after {v1:?}"));
        if let Some(o) = o {
            rec = rec.outcome("A", (*o).into());
        }
        trace.push(rec);
    }
    let definite_initially = p_plus <= 1e-10 || p_plus >= 1.0 - 1e-10;
    let consistent = results.iter().all(|(o, v0, v1)| {
        let before_ok = definite_initially || *v0 == PropertyVerdict::Indefinite;
        let after_ok = match o {
            Some(o) => *v1 == PropertyVerdict::Definite(*o),
            None => !on && (definite_initially || *v1 == PropertyVerdict::Indefinite),
        };
        before_ok && after_ok
    });
    trace.check("property verdicts before and after R", consistent, "every trial [invariant]");
    if on {
        let plus = results.iter().filter(|r| r.0 == Some(1)).count();
        trace.push(table(
            "outcome frequencies",
            [("observed.+1".to_string(), plus as f64 / ctx.trials as f64), ("expected.+1".to_string(), p_plus)],
        ));
        check_frequency(trace, "P(+1) = |α|²", plus, ctx.trials, p_plus, "analytic");
    }
    Ok(())
}

fn pair_from(params: Params<'_>) -> Result<ScenarioConfig> {
    let r = params.point_or("r", SpacetimePoint::new(5.0, 1.0))?;
    let l = params.point_or("l", SpacetimePoint::new(-5.0, 2.0))?;
    Ok(ScenarioConfig::singlet_pair(r, l, params.bool_or("g_a", true)?, params.bool_or("g_b", true)?)?)
}

fn run_toy_two(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let cfg = pair_from(ctx.params)?;
    let (a, b) = (cfg.apparatus("A").expect("pair").clone(), cfg.apparatus("B").expect("pair").clone());
    let lifted: Vec<SpacetimePoint> =
        [&a, &b].iter().map(|x| SpacetimePoint::new(x.location.x, x.location.t + 1.0)).collect();
    let above = past_cone_union(&lifted, cfg.sigma0())?;
    let reach = a.location.t + (a.location.x - b.location.x).abs();
    let line = cfg.particles()[0];
    let results = map_trials(ctx.trials, ctx.seed, |_, rng| -> collapse_core::Result<(Option<i8>, Option<i8>, bool)> {
        let mut log = EventLog::new();
        let mut ok = true;
        if a.on && !b.on {
            let early = reach - 0.5;
            if early >= cfg.sigma0().eval(line.at_time(early).x) {
                ok &= property_at(&line.at_time(early), 0, &cfg, &mut log, rng)? == PropertyVerdict::Indefinite;
            }
            let late = property_at(&line.at_time(reach + 0.5), 0, &cfg, &mut log, rng)?;
            ok &= late == PropertyVerdict::Definite(-log.get("A").expect("crossed").outcome);
        }
        state_on_surface(&cfg, &above, &mut log, rng)?;
        Ok((log.get("A").map(|e| e.outcome), log.get("B").map(|e| e.outcome), ok))
    })
    .into_iter()
    .collect::<collapse_core::Result<Vec<_>>>()?;
    for (i, (oa, ob, _)) in results.iter().take(ctx.record_trials).enumerate() {
        let mut rec = TraceRecord::new("trial", format!("trial {i}"));
        if let Some(o) = oa {
            rec = rec.outcome("A", (*o).into());
        }
        if let Some(o) = ob {
            rec = rec.outcome("B", (*o).into());
        }
        trace.push(rec);
    }
    trace.check(
        "property attribution follows the future light cone of R",
        results.iter().all(|r| r.2),
        "every trial [invariant]",
    );
    if a.on && b.on {
        let same = results.iter().filter(|r| r.0 == r.1).count();
        trace.push(table("anticorrelation", [("same_outcome".to_string(), same as f64)]));
        trace.check(
            "outcomes at A and B opposite",
            same == 0,
            format!("{same} same-outcome trials of {} [analytic]", ctx.trials),
        );
    }
    if a.on || b.on {
        let first = |r: &(Option<i8>, Option<i8>, bool)| r.0.map(|o| -o).or(r.1) == Some(1);
        let count = results.iter().filter(|r| first(r)).count();
        trace.push(table(
            "reduction alternatives",
            [("observed.|1+,2->".to_string(), count as f64 / ctx.trials as f64), ("expected.|1+,2->".to_string(), 0.5)],
        ));
        check_frequency(trace, "alternative |1+,2->", count, ctx.trials, 0.5, "analytic");
    }
    Ok(())
}

fn run_toy_stats(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let cfg = pair_from(ctx.params)?;
    let stats = stats_parameter_independence(&cfg, ctx.trials, ctx.seed)?;
    trace.push(table(
        "parameter independence",
        stats.entries.iter().map(|e| {
            (format!("P_{:?}({:+}|g_{:?}={})", e.side, e.outcome, e.side.other(), e.other_on as u8), e.probability)
        }),
    ));
    for e in &stats.entries {
        let count = (e.probability * e.trials as f64).round() as usize;
        check_frequency(
            trace,
            &format!("P_{:?}({:+} | g_{:?} = {})", e.side, e.outcome, e.side.other(), e.other_on as u8),
            count,
            e.trials,
            0.5,
            "analytic",
        );
    }
    trace.check(
        "never the same outcome with both on",
        stats.both_on_same_outcome == 0,
        format!("{} of {} trials [analytic]", stats.both_on_same_outcome, stats.both_on_trials),
    );
    Ok(())
}

fn parse_claim(p: Params<'_>) -> Result<(CounterfactualClaim, Option<Legitimacy>, bool, bool)> {
    let vantage = p.point_or("vantage", SpacetimePoint::new(5.0, 3.0))?;
    let target = match p.get("target_point") {
        Some(v) => ClaimTarget::Hypothetical {
            particle: p.usize_or("target_particle", 0)?,
            at: crate::scenario::point(v).ok_or_else(|| field("target_point", "expected [x, t]"))?,
        },
        None => ClaimTarget::Actual { apparatus: p.str_or("target", "B")?.to_string() },
    };
    let expect = match p.get("expect").and_then(|v| v.as_str()) {
        None => None,
        Some("legitimate") => Some(Legitimacy::Legitimate),
        Some("illegitimate") => Some(Legitimacy::Illegitimate),
        Some(other) => return Err(field("expect", format!("{other:?} is not legitimate/illegitimate"))),
    };
    let outcome =
        i8::try_from(p.usize_or("outcome_abs", 1)?).unwrap_or(1) * if p.bool_or("negative", false)? { -1 } else { 1 };
    let claim =
        CounterfactualClaim { vantage, fact: p.str_or("fact", "A")?.to_string(), target, asserted_outcome: outcome };
    Ok((claim, expect, p.bool_or("g_a", true)?, p.bool_or("g_b", false)?))
}

fn default_claims() -> Vec<(CounterfactualClaim, Option<Legitimacy>, bool, bool)> {
    let vantage = SpacetimePoint::new(5.0, 3.0);
    let claim = |target| CounterfactualClaim { vantage, fact: "A".into(), target, asserted_outcome: 1 };
    vec![
        (claim(ClaimTarget::Actual { apparatus: "B".into() }), Some(Legitimacy::Legitimate), true, true),
        (
            claim(ClaimTarget::Hypothetical { particle: 0, at: SpacetimePoint::new(-5.0, 2.0) }),
            Some(Legitimacy::Illegitimate),
            true,
            false,
        ),
        (
            claim(ClaimTarget::Hypothetical { particle: 0, at: SpacetimePoint::new(-5.0, 20.0) }),
            Some(Legitimacy::Legitimate),
            true,
            false,
        ),
    ]
}

fn run_counterfactual(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let listed = ctx.params.table_list("claims")?;
    let claims = if listed.is_empty() {
        default_claims()
    } else {
        listed.into_iter().map(parse_claim).collect::<Result<Vec<_>>>()?
    };
    let r = ctx.params.point_or("r", SpacetimePoint::new(5.0, 1.0))?;
    let l = ctx.params.point_or("l", SpacetimePoint::new(-5.0, 2.0))?;
    let mut rng = seeded(ctx.seed);
    for (i, (claim, expect, g_a, g_b)) in claims.iter().enumerate() {
        let cfg = ScenarioConfig::singlet_pair(r, l, *g_a, *g_b)?;
        let verdict = counterfactual_classify(claim, &cfg, &mut EventLog::new(), &mut rng)?;
        trace.push(
            TraceRecord::new("claim", format!("claim {i}: {:?} -> {verdict:?}", claim.target))
                .outcome("legitimate", (verdict == Legitimacy::Legitimate).into()),
        );
        if let Some(e) = expect {
            trace.check(
                format!("claim {i} verdict"),
                verdict == *e,
                format!("got {verdict:?}, expected {e:?} [analytic]"),
            );
        }
    }
    let names: Vec<String> = (1..=4).map(|k| format!("λ{k}")).collect();
    let model = HiddenVariableModel::new(names, vec![1, 1, -1, -1], vec![(1, -1), (-1, 1), (1, -1), (-1, 1)])?;
    let report = hv_counterfactual_demo(&model)?;
    for d in &report.flagged {
        trace.push(
            TraceRecord::new(
                "hidden-variable",
                format!("{}: same-λ {:?}, same-outcome worlds {:?}", d.lambda, d.same_lambda, d.same_outcome_worlds),
            )
            .outcome("same_lambda_b", d.same_lambda.1.into())
            .outcome("same_outcome_b", d.same_outcome_b.into()),
        );
    }
    let all_flagged = model.lambda_1_2().len() == report.flagged.len()
        && report.flagged.iter().all(|d| d.same_lambda.1 != d.same_outcome_b);
    trace.check(
        "accessibility criteria disagree on every λ in Λ₁₋₂",
        all_flagged,
        format!("{} flagged [oracle]", report.flagged.len()),
    );
    Ok(())
}

/// Final state expected for a singlet run with right outcomes `t`: each
/// left probe carries minus its partner's value.
fn expected_final(t: [i8; 3]) -> Result<StateVector> {
    let ket = |a: i8, b: i8| -> Result<StateVector> {
        let pa = collapse_core::protocol::probes::probe_ket(a)?;
        let pb = collapse_core::protocol::probes::probe_ket(b)?;
        Ok(collapse_core::linalg::kron(&pa, &pb))
    };
    let parts = [singlet(), ket(-t[0], t[0])?, ket(-t[1], t[1])?, ket(-t[2], t[2])?];
    Ok(collapse_core::linalg::kron_all(parts.iter()).expect("four factors"))
}

fn run_relativistic(ctx: &Ctx<'_>, trace: &mut RunTrace) -> Result<()> {
    let system = system_state(ctx.params)?;
    let variant = match ctx.params.str_or("variant", "resolved")? {
        "resolved" => Variant::Resolved,
        "reversed-swapped" => Variant::ReversedSwapped,
        other => return Err(field("variant", format!("unknown variant {other:?}; use resolved or reversed-swapped"))),
    };
    let options = RunOptions { variant, amplitudes: ctx.params.bool_or("amplitudes", false)? };
    let is_singlet = system.approx_eq_up_to_phase(&singlet(), 1e-12);
    let forced = match ctx.params.get("forced") {
        None => None,
        Some(toml::Value::String(s)) => Some(parse_triple(s)?),
        Some(_) => return Err(field("forced", "expected \"ω6,ω4*,ω6*\"")),
    };
    if let Some(t) = forced {
        let (run, fin) = run_full_from(&system, Some(t), options, trace.metadata.seed, &mut seeded(ctx.seed))?;
        trace.records.extend(run.records);
        trace.invariants.extend(run.invariants);
        if is_singlet {
            let want = state_digest(&expected_final(t)?);
            let got = state_digest(&fin.state);
            trace.check("final digest", got == want, format!("{got} vs expected {want} [oracle]"));
        }
        return Ok(());
    }
    let s1 = evolve_sigma1_variant(&stage0(&system, variant)?.state, variant)?;
    let probs = right_outcome_probabilities(&s1)?;
    let runs = map_trials(ctx.trials, ctx.seed, |_, rng| run_full_from(&system, None, options, None, rng))
        .into_iter()
        .collect::<collapse_core::Result<Vec<_>>>()?;
    let mut counts = vec![0u64; 27];
    let mut failures = 0;
    for (i, (run, fin)) in runs.iter().enumerate() {
        let t = fin.right_outcomes.expect("completed run");
        counts[triple_index(t)?] += 1;
        failures += usize::from(!run.all_passed());
        if i < ctx.record_trials {
            let (omegas, _) = collapse_core::relativistic::split_final(fin)?;
            let sums = pair_sums(omegas);
            trace.push(
                TraceRecord::new("run", format!("run {i}"))
                    .with_state(&fin.state, false)
                    .outcome("omega6", t[0].into())
                    .outcome("omega4*", t[1].into())
                    .outcome("omega6*", t[2].into())
                    .outcome("sum36", sums[0].into())
                    .outcome("sum24*", sums[1].into())
                    .outcome("sum36*", sums[2].into()),
            );
        }
    }
    trace.push(table(
        "right-wing outcome frequencies",
        (0..27).flat_map(|k| {
            let t = triple_of(k);
            let key = format!("{},{},{}", t[0], t[1], t[2]);
            [(format!("observed.{key}"), counts[k] as f64 / ctx.trials as f64), (format!("expected.{key}"), probs[k])]
        }),
    ));
    check_counts(trace, "right-wing outcome distribution", &counts, &probs, "oracle");
    trace.check("every run passed its invariants", failures == 0, format!("{failures} failing runs [invariant]"));
    Ok(())
}
