//! Seeded property suites over the measure, its pictures and the local
//! channel machinery, plus the Werner parameter sweep.
//!
//! Each trial draws from its own `(seed, property, index)` stream, so reports
//! are bit-identical for a given config whatever the thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_local_kraus, apply_local_unitary, coherence_superoperator, random_local_povm_with, random_local_unitary_with,
    random_povm_with, unitary_superoperator, LocalKrausChannel,
};
use crate::coherence::{decode_matrix, encode};
use crate::error::{Error, Result};
use crate::flip::{flip, s_bar_diagonal, s_diagonal, universal_inverter};
use crate::gallery::{completely_mixed, ghz, random_density_with, random_separable_with, werner};
use crate::io::{ChannelFile, StateFile};
use crate::measure::{
    concurrence_sq_pure_two_qubit, eq_measure, f_coherence, f_coherence_with, f_density, MeasureReport, Picture,
};
use crate::random::{normalized_gaussian_vector, stream_id, trial_rng, TrialRng};
use crate::state::{DensityMatrix, Dims};

/// Thresholds used by the properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyTolerances {
    /// Closed-form values with no accumulated error (1e-12).
    pub tight: f64,
    /// Identities between matrices or traces (1e-10).
    pub strict: f64,
    /// Inequalities and cross-route agreement (1e-9).
    pub loose: f64,
}

impl Default for PropertyTolerances {
    fn default() -> Self {
        Self { tight: 1e-12, strict: 1e-10, loose: 1e-9 }
    }
}

/// Deliberate defects used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Negates `S + S̄` at one flat coherence index in the coherence picture.
    NegateGWeight { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Base trial count; each property scales it by a fixed factor.
    pub trials: usize,
    pub dims: Vec<Dims>,
    pub tolerances: PropertyTolerances,
    pub mutation: Option<Mutation>,
}

impl SuiteConfig {
    pub fn default_dims() -> Vec<Dims> {
        [&[2, 2][..], &[2, 3], &[3, 3], &[2, 2, 2]].iter().map(|d| Dims::new(d.to_vec()).expect("valid dims")).collect()
    }

    pub fn new(seed: u64, trials: usize) -> Self {
        Self { seed, trials, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.dims.is_empty() {
            return Err(Error::Parameter("dims list is empty".into()));
        }
        let t = self.tolerances;
        if [t.tight, t.strict, t.loose].iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Parameter("tolerances must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn scaled(&self, num: usize, den: usize) -> usize {
        (self.trials * num / den).max(1)
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 200,
            dims: Self::default_dims(),
            tolerances: PropertyTolerances::default(),
            mutation: None,
        }
    }
}

/// Everything needed to replay a failing trial without the RNG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub property: String,
    pub seed: u64,
    pub trial: u64,
    pub dims: Vec<usize>,
    pub state: StateFile,
    pub channel: Option<ChannelFile>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    /// Largest observed value of the checked quantity; passes iff `<= tolerance`.
    pub worst_violation: f64,
    pub tolerance: f64,
    pub worst_trial: Option<u64>,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<Dims>,
    pub mutation: Option<Mutation>,
    pub passed: bool,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyReport> {
        self.properties.iter().filter(|p| !p.passed)
    }
}

struct Outcome {
    deviation: f64,
    /// Every state the trial produced; the first one is the witness.
    states: Vec<DensityMatrix<f64>>,
    channel: Option<ChannelFile>,
    detail: String,
}

impl Outcome {
    fn new(deviation: f64, state: DensityMatrix<f64>, detail: String) -> Self {
        Self { deviation, states: vec![state], channel: None, detail }
    }

    fn with_channel(mut self, ch: ChannelFile) -> Self {
        self.channel = Some(ch);
        self
    }

    fn with_states(mut self, more: impl IntoIterator<Item = DensityMatrix<f64>>) -> Self {
        self.states.extend(more);
        self
    }
}

struct Run {
    report: PropertyReport,
    outcomes: Vec<Outcome>,
}

fn summarize(name: &str, seed: u64, tolerance: f64, outcomes: &[Outcome]) -> PropertyReport {
    let mut worst: Option<(usize, f64)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        // non-finite values would not survive a JSON round trip
        let d = if o.deviation.is_finite() { o.deviation } else { f64::MAX };
        if worst.is_none_or(|(_, w)| d > w) {
            worst = Some((i, d));
        }
    }
    let worst_violation = worst.map_or(0.0, |(_, w)| w);
    let passed = worst_violation <= tolerance;
    let counterexample = match worst {
        Some((i, _)) if !passed => {
            let o = &outcomes[i];
            Some(Counterexample {
                property: name.to_string(),
                seed,
                trial: i as u64,
                dims: o.states[0].dims().as_slice().to_vec(),
                state: StateFile::from_density(&o.states[0]),
                channel: o.channel.clone(),
                detail: o.detail.clone(),
            })
        }
        _ => None,
    };
    PropertyReport {
        name: name.to_string(),
        passed,
        trials: outcomes.len(),
        worst_violation,
        tolerance,
        worst_trial: worst.map(|(i, _)| i as u64),
        counterexample,
    }
}

/// Runs `count` trials of `trial` in parallel on streams keyed by `stream`.
fn run_property<F>(cfg: &SuiteConfig, name: &str, stream: &str, count: usize, tolerance: f64, trial: F) -> Run
where
    F: Fn(usize, &mut TrialRng) -> Result<Outcome> + Sync,
{
    let sid = stream_id(stream);
    let outcomes: Vec<Outcome> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, sid, i as u64);
            trial(i, &mut rng).unwrap_or_else(|e| Outcome {
                deviation: f64::INFINITY,
                states: vec![completely_mixed(&Dims::qubits(1).expect("one qubit"))],
                channel: None,
                detail: format!("trial raised an error: {e}"),
            })
        })
        .collect();
    Run { report: summarize(name, cfg.seed, tolerance, &outcomes), outcomes }
}

/// Random state of random rank over `dims`.
fn random_state(rng: &mut TrialRng, dims: &Dims) -> Result<DensityMatrix<f64>> {
    let rank = rng.random_range(1..=dims.total());
    random_density_with(dims, rank, rng)
}

fn f_of(rho: &DensityMatrix<f64>) -> Result<f64> {
    Ok(f_density(rho)?.f)
}

fn bipartite(cfg: &SuiteConfig) -> Vec<Dims> {
    cfg.dims.iter().filter(|d| d.len() == 2).cloned().collect()
}

/// Local dimensions appearing in the config, ascending and distinct.
fn local_dims(cfg: &SuiteConfig) -> Vec<usize> {
    let mut v: Vec<usize> = cfg.dims.iter().flat_map(|d| d.as_slice().iter().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn ghz_attainment(cfg: &SuiteConfig) -> Run {
    let ns = [2usize, 4];
    run_property(cfg, "ghz_attainment", "ghz_attainment", ns.len(), cfg.tolerances.strict, |i, _| {
        let g = ghz::<f64>(ns[i])?;
        let r = eq_measure(&g, None)?;
        Ok(Outcome::new((r.eq - 1.0).abs(), g, format!("n = {}, eq = {}", ns[i], r.eq)))
    })
}

fn completely_mixed_gross(cfg: &SuiteConfig) -> Run {
    run_property(cfg, "completely_mixed_gross", "completely_mixed_gross", 4, cfg.tolerances.tight, |i, _| {
        let n = i + 1;
        let rho = completely_mixed::<f64>(&Dims::qubits(n)?);
        let gross = f_density(&rho)?.gross;
        let want = 0.5f64.powi(n as i32);
        Ok(Outcome::new((gross - want).abs(), rho, format!("n = {n}, gross = {gross}, expected {want}")))
    })
}

fn completely_mixed_minimum(cfg: &SuiteConfig) -> Run {
    run_property(
        cfg,
        "completely_mixed_minimum",
        "completely_mixed_minimum",
        cfg.dims.len(),
        cfg.tolerances.tight,
        |i, _| {
            let dims = &cfg.dims[i];
            let rho = completely_mixed::<f64>(dims);
            let f = f_density(&rho)?.f;
            let want = 2.0 * (1.0 - 2f64.powi(dims.len() as i32 - 1)) / dims.total() as f64;
            Ok(Outcome::new((f - want).abs(), rho, format!("dims {dims}, f = {f}, expected {want}")))
        },
    )
}

fn product_states(cfg: &SuiteConfig) -> Run {
    let tol = cfg.tolerances.strict;
    run_property(cfg, "product_states_vanish", "product_states", cfg.trials, tol, |i, rng| {
        let dims = &cfg.dims[i % cfg.dims.len()];
        let (rho, _) = random_separable_with::<f64, _>(dims, 1, rng)?;
        let r = f_density(&rho)?;
        let dev = r.gross.abs().max((r.unflip_term - r.offset).abs());
        Ok(Outcome::new(dev, rho, format!("tr ρF(ρ) = {}, tr ρF̄(ρ) = {}, offset {}", r.gross, r.unflip_term, r.offset)))
    })
}

fn separable_nonpositive(cfg: &SuiteConfig) -> Run {
    let count = cfg.scaled(5, 2);
    run_property(cfg, "separable_nonpositive", "separable_nonpositive", count, cfg.tolerances.loose, |i, rng| {
        let dims = &cfg.dims[i % cfg.dims.len()];
        let terms = 1 + i % 6;
        let (rho, _) = random_separable_with::<f64, _>(dims, terms, rng)?;
        let fd = f_of(&rho)?;
        let fc = f_coherence(&encode(&rho)?).f;
        Ok(Outcome::new(fd.max(fc), rho, format!("{terms} terms, f (density) = {fd}, f (coherence) = {fc}")))
    })
}

fn local_unitary(cfg: &SuiteConfig) -> Run {
    let count = cfg.scaled(5, 2);
    run_property(cfg, "local_unitary_invariance", "local_unitary", count, cfg.tolerances.loose, |i, rng| {
        let dims = &cfg.dims[i % cfg.dims.len()];
        let rho = random_state(rng, dims)?;
        let u = random_local_unitary_with::<f64, _>(dims, rng);
        let out = apply_local_unitary(&rho, &u)?;
        let (before, after) = (f_of(&rho)?, f_of(&out)?);
        Ok(Outcome::new((after - before).abs(), rho, format!("f = {before} before, {after} after"))
            .with_channel(ChannelFile::from_unitary(&u))
            .with_states([out]))
    })
}

fn povm_pair(
    rng: &mut TrialRng,
    dims: &Dims,
) -> Result<(DensityMatrix<f64>, LocalKrausChannel<f64>, DensityMatrix<f64>)> {
    let rho = random_state(rng, dims)?;
    let ch = random_local_povm_with::<f64, _>(dims, rng);
    let out = apply_local_kraus(&rho, &ch)?;
    Ok((rho, ch, out))
}

fn local_povm(cfg: &SuiteConfig) -> Run {
    let count = cfg.scaled(5, 2);
    run_property(cfg, "local_povm_monotone", "local_povm", count, cfg.tolerances.loose, |i, rng| {
        let (rho, ch, out) = povm_pair(rng, &cfg.dims[i % cfg.dims.len()])?;
        let (before, after) = (f_of(&rho)?, f_of(&out)?);
        Ok(Outcome::new(after - before, rho, format!("f = {before} before, {after} after"))
            .with_channel(ChannelFile::from_channel(&ch))
            .with_states([out]))
    })
}

fn povm_purity(cfg: &SuiteConfig) -> Run {
    let count = cfg.scaled(5, 2);
    // same stream as the monotonicity property, so the same pairs are checked
    run_property(cfg, "povm_purity", "local_povm", count, cfg.tolerances.strict, |i, rng| {
        let (rho, ch, out) = povm_pair(rng, &cfg.dims[i % cfg.dims.len()])?;
        let (before, after) = (rho.purity(), out.purity());
        Ok(Outcome::new(after - before, rho, format!("purity {before} before, {after} after"))
            .with_channel(ChannelFile::from_channel(&ch)))
    })
}

/// Pairwise spread of f across every picture that applies to the state.
fn picture_spread(rho: &DensityMatrix<f64>, mutation: Option<Mutation>) -> Result<(f64, Vec<MeasureReport<f64>>)> {
    let dims = rho.dims();
    let mut reports = vec![f_density(rho)?];
    let v = encode(rho)?;
    reports.push(match mutation {
        None => f_coherence(&v),
        Some(Mutation::NegateGWeight { index }) => {
            let mut s = s_diagonal::<f64>(dims);
            let mut sb = s_bar_diagonal::<f64>(dims);
            let k = index % s.len();
            s[k] = -s[k];
            sb[k] = -sb[k];
            f_coherence_with(&v, &s, &sb)
        }
    });
    for p in [Picture::QubitFast, Picture::BipartiteMixedness] {
        if p.applies_to(dims) {
            reports.push(eq_measure(rho, Some(p))?);
        }
    }
    let mut spread = 0.0f64;
    for a in &reports {
        for b in &reports {
            spread = spread.max((a.f - b.f).abs());
        }
    }
    Ok((spread, reports))
}

fn picture_equivalence(cfg: &SuiteConfig) -> Run {
    let per = cfg.scaled(1, 2);
    let count = per * cfg.dims.len();
    run_property(cfg, "picture_equivalence", "picture_equivalence", count, cfg.tolerances.loose, |i, rng| {
        let rho = random_state(rng, &cfg.dims[i / per])?;
        let (spread, reports) = picture_spread(&rho, cfg.mutation)?;
        let detail = reports.iter().map(|r| format!("{}: {}", r.picture, r.f)).collect::<Vec<_>>().join(", ");
        Ok(Outcome::new(spread, rho, detail))
    })
}

fn inverter(cfg: &SuiteConfig) -> Run {
    let dims = bipartite(cfg);
    let per = cfg.scaled(1, 2);
    run_property(cfg, "universal_inverter", "universal_inverter", per * dims.len(), cfg.tolerances.strict, |i, rng| {
        let rho = random_state(rng, &dims[i / per])?;
        let dev = flip(&rho).max_abs_diff(&universal_inverter(&rho)?);
        Ok(Outcome::new(dev, rho, format!("max |flip - inverter| = {dev:e}")))
    })
}

fn concurrence(cfg: &SuiteConfig) -> Run {
    run_property(cfg, "concurrence", "concurrence", cfg.trials, cfg.tolerances.loose, |_, rng| {
        let dims = Dims::qubits(2)?;
        let psi = normalized_gaussian_vector::<f64, _>(rng, 4);
        let rho = DensityMatrix::from_pure(&psi, dims)?;
        let c2 = concurrence_sq_pure_two_qubit(&psi)?;
        let eq = eq_measure(&rho, None)?.eq;
        Ok(Outcome::new((eq - c2).abs(), rho, format!("eq = {eq}, C² = {c2}")))
    })
}

fn povm_block(cfg: &SuiteConfig) -> Run {
    let ns = local_dims(cfg);
    let count = cfg.scaled(1, 2);
    run_property(cfg, "povm_block_structure", "povm_block_structure", count, cfg.tolerances.loose, |i, rng| {
        let n = ns[i % ns.len()];
        let ch = random_povm_with::<f64, _>(n, rng)?;
        let sup = coherence_superoperator(&ch);
        let (defect, norm) = (sup.block_defect(), sup.block_norm());
        let probe = completely_mixed(ch.dims());
        Ok(Outcome::new(defect.max(norm - 1.0), probe, format!("block defect {defect:e}, max singular value {norm}"))
            .with_channel(ChannelFile::from_channel(&ch)))
    })
}

fn max_abs_vec_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn superoperator_faithfulness(cfg: &SuiteConfig) -> Run {
    let count = cfg.scaled(1, 4);
    run_property(
        cfg,
        "superoperator_faithfulness",
        "superoperator_faithfulness",
        count,
        cfg.tolerances.loose,
        |i, rng| {
            let dims = &cfg.dims[i % cfg.dims.len()];
            let rho = random_state(rng, dims)?;
            let ch = random_local_povm_with::<f64, _>(dims, rng);
            let u = random_local_unitary_with::<f64, _>(dims, rng);
            let m = encode(&rho)?;
            let via_channel = encode(&apply_local_kraus(&rho, &ch)?)?;
            let via_unitary = encode(&apply_local_unitary(&rho, &u)?)?;
            let dc = max_abs_vec_diff(via_channel.as_slice(), &coherence_superoperator(&ch).apply(m.as_slice()));
            let du = max_abs_vec_diff(via_unitary.as_slice(), &unitary_superoperator(&u).apply(m.as_slice()));
            Ok(Outcome::new(dc.max(du), rho, format!("channel {dc:e}, unitary {du:e}"))
                .with_channel(ChannelFile::from_channel(&ch)))
        },
    )
}

fn unitary_orthogonality(cfg: &SuiteConfig) -> Run {
    let count = cfg.scaled(1, 4);
    run_property(cfg, "unitary_orthogonality", "unitary_orthogonality", count, cfg.tolerances.loose, |i, rng| {
        let dims = &cfg.dims[i % cfg.dims.len()];
        let rho = random_state(rng, dims)?;
        let u = random_local_unitary_with::<f64, _>(dims, rng);
        let sup = unitary_superoperator(&u);
        let m = encode(&rho)?;
        let image: f64 = sup.apply(m.as_slice()).iter().map(|x| x * x).sum();
        let (orth, norm) = (sup.orthogonality_defect(), (image.sqrt() - m.norm_sqr().sqrt()).abs());
        Ok(Outcome::new(
            orth.max(norm).max(sup.block_defect()),
            rho,
            format!("OᵀO defect {orth:e}, norm change {norm:e}"),
        )
        .with_channel(ChannelFile::from_unitary(&u)))
    })
}

fn coherence_roundtrip(cfg: &SuiteConfig) -> Run {
    let count = cfg.scaled(1, 2);
    run_property(cfg, "coherence_roundtrip", "coherence_roundtrip", count, cfg.tolerances.strict, |i, rng| {
        let rho = random_state(rng, &cfg.dims[i % cfg.dims.len()])?;
        let v = encode(&rho)?;
        let back = decode_matrix(&v).max_abs_diff(rho.matrix());
        let norm = (v.norm_sqr() - rho.purity()).abs();
        Ok(Outcome::new(back.max(norm), rho, format!("round trip {back:e}, |‖m‖² − tr ρ²| = {norm:e}")))
    })
}

const WERNER_GRID: usize = 401;

fn werner_phi(i: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (WERNER_GRID - 1) as f64
}

fn werner_closed_form_property(cfg: &SuiteConfig) -> Run {
    run_property(cfg, "werner_closed_form", "werner", WERNER_GRID, cfg.tolerances.strict, |i, _| {
        let phi = werner_phi(i);
        let w = werner::<f64>(phi)?;
        let fd = f_of(&w)?;
        let fc = eq_measure(&w, None)?.f;
        let want = werner_closed_form(phi);
        Ok(Outcome::new(
            (fd - want).abs().max((fc - want).abs()),
            w,
            format!("Φ = {phi}, f = {fd}, closed form {want}"),
        ))
    })
}

fn werner_marginals(cfg: &SuiteConfig) -> Run {
    run_property(cfg, "werner_marginals", "werner", WERNER_GRID, cfg.tolerances.tight, |i, _| {
        let w = werner::<f64>(werner_phi(i))?;
        let half = completely_mixed::<f64>(&Dims::qubits(1)?);
        let mut dev = 0.0f64;
        for k in 0..2 {
            dev = dev.max(w.partial_trace(&[k])?.matrix().max_abs_diff(half.matrix()));
        }
        Ok(Outcome::new(dev, w, format!("max marginal deviation {dev:e}")))
    })
}

/// `0 ≤ eq ≤ 1` over every state the other properties produced.
fn eq_bounds(cfg: &SuiteConfig, runs: &[Run]) -> PropertyReport {
    let tol = cfg.tolerances.loose;
    let states: Vec<(&str, usize, &DensityMatrix<f64>)> = runs
        .iter()
        .flat_map(|r| {
            r.outcomes
                .iter()
                .enumerate()
                .flat_map(move |(i, o)| o.states.iter().map(move |s| (r.report.name.as_str(), i, s)))
        })
        .collect();
    let outcomes: Vec<Outcome> = states
        .par_iter()
        .map(|&(origin, i, rho)| match eq_measure(rho, None) {
            Ok(r) => {
                Outcome::new((r.eq - 1.0).max(-r.eq), rho.clone(), format!("from {origin} trial {i}, eq = {}", r.eq))
            }
            Err(e) => Outcome::new(f64::INFINITY, rho.clone(), format!("from {origin} trial {i}: {e}")),
        })
        .collect();
    summarize("eq_bounds", cfg.seed, tol, &outcomes)
}

/// Runs every property; failures are report content, only a bad config errors.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let properties: [fn(&SuiteConfig) -> Run; 17] = [
        ghz_attainment,
        completely_mixed_gross,
        completely_mixed_minimum,
        product_states,
        separable_nonpositive,
        local_unitary,
        local_povm,
        povm_purity,
        picture_equivalence,
        inverter,
        concurrence,
        povm_block,
        superoperator_faithfulness,
        unitary_orthogonality,
        coherence_roundtrip,
        werner_closed_form_property,
        werner_marginals,
    ];
    let runs: Vec<Run> = properties.iter().map(|p| p(cfg)).collect();
    let mut reports: Vec<PropertyReport> = runs.iter().map(|r| r.report.clone()).collect();
    reports.push(eq_bounds(cfg, &runs));
    Ok(SuiteReport {
        seed: cfg.seed,
        trials: cfg.trials,
        dims: cfg.dims.clone(),
        mutation: cfg.mutation,
        passed: reports.iter().all(|r| r.passed),
        properties: reports,
    })
}

/// `f(w(Φ)) = ((2Φ+1)² − 3)/6`.
pub fn werner_closed_form(phi: f64) -> f64 {
    let a = 2.0 * phi + 1.0;
    (a * a - 3.0) / 6.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    pub f: f64,
    pub eq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Linear interpolation between the bracketing grid points.
    pub phi: f64,
    pub lower: f64,
    pub upper: f64,
    pub rising: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WernerSweep {
    pub rows: Vec<SweepRow>,
    pub crossings: Vec<Crossing>,
    /// Roots of the closed form, `(−1 ± √3)/2`.
    pub closed_form_zeros: [f64; 2],
    /// Interval endpoints stated in the literature, `(−2 ± √6)/4`.
    pub stated_interval: [f64; 2],
    /// Whether some detected crossing bracket contains the stated upper endpoint.
    pub stated_interval_agrees: bool,
    pub note: String,
}

impl WernerSweep {
    /// Header `phi,f,eq`, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi,f,eq\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.phi, r.f, r.eq));
        }
        out
    }

    /// Human-readable crossing summary.
    pub fn crossing_report(&self) -> String {
        let mut out = String::new();
        for c in &self.crossings {
            let dir = if c.rising { "rising" } else { "falling" };
            out.push_str(&format!("crossing ({dir}) at phi ≈ {} in [{}, {}]\n", c.phi, c.lower, c.upper));
        }
        if self.crossings.is_empty() {
            out.push_str("no sign change of f on this grid\n");
        }
        out.push_str(&format!(
            "closed-form zeros: {} and {}\nstated interval endpoints: {} and {}\n{}\n",
            self.closed_form_zeros[0],
            self.closed_form_zeros[1],
            self.stated_interval[0],
            self.stated_interval[1],
            self.note
        ));
        out
    }
}

/// Evaluates the measure on `steps` evenly spaced Werner parameters.
pub fn werner_sweep(from: f64, to: f64, steps: usize) -> Result<WernerSweep> {
    if !(from >= -1.0 && to <= 1.0 && from < to) {
        return Err(Error::Parameter(format!("sweep range [{from}, {to}] must be increasing within [-1, 1]")));
    }
    if steps < 2 {
        return Err(Error::Parameter(format!("sweep needs at least 2 steps, got {steps}")));
    }
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let phi = if i == steps - 1 { to } else { from + (to - from) * i as f64 / (steps - 1) as f64 };
        let r = eq_measure(&werner::<f64>(phi)?, None)?;
        rows.push(SweepRow { phi, f: r.f, eq: r.eq });
    }
    let crossings: Vec<Crossing> = rows
        .windows(2)
        .filter(|w| (w[0].f < 0.0 && w[1].f >= 0.0) || (w[0].f > 0.0 && w[1].f <= 0.0))
        .map(|w| Crossing {
            phi: w[0].phi - w[0].f * (w[1].phi - w[0].phi) / (w[1].f - w[0].f),
            lower: w[0].phi,
            upper: w[1].phi,
            rising: w[1].f > w[0].f,
        })
        .collect();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let stated_interval = [(-2.0 - s6) / 4.0, (-2.0 + s6) / 4.0];
    let closed_root = (-1.0 + s3) / 2.0;
    let bracket = |x: f64| crossings.iter().position(|c| c.lower <= x && x <= c.upper);
    let stated_interval_agrees = bracket(stated_interval[1]).is_some();
    let note = match (bracket(stated_interval[1]), bracket(closed_root)) {
        (Some(a), Some(b)) if a == b => format!(
            "grid too coarse: one cell brackets both the stated endpoint {:.6} and the closed-form zero {closed_root:.6}",
            stated_interval[1]
        ),
        (Some(_), _) => "detected crossing agrees with the stated interval".to_string(),
        _ => format!(
            "MISMATCH: no detected crossing brackets the stated endpoint {:.6}; the closed form gives {closed_root:.6} (open question)",
            stated_interval[1]
        ),
    };
    Ok(WernerSweep {
        rows,
        crossings,
        closed_form_zeros: [(-1.0 - s3) / 2.0, (-1.0 + s3) / 2.0],
        stated_interval,
        stated_interval_agrees,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SuiteConfig {
        SuiteConfig { trials: 8, ..SuiteConfig::new(seed, 8) }
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_suite(&SuiteConfig::new(1, 0)).is_err());
        let cfg = SuiteConfig { dims: vec![], ..SuiteConfig::default() };
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn small_suite_passes_and_repeats() {
        let a = run_suite(&small(3)).unwrap();
        for p in &a.properties {
            assert!(p.passed, "{} failed: {:?}", p.name, p.counterexample);
        }
        let b = run_suite(&small(3)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn mutation_is_caught() {
        let cfg = SuiteConfig { mutation: Some(Mutation::NegateGWeight { index: 0 }), ..small(5) };
        let r = run_suite(&cfg).unwrap();
        assert!(!r.passed);
        let p = r.property("picture_equivalence").unwrap();
        assert!(!p.passed);
        let ce = p.counterexample.as_ref().unwrap();
        let rho = ce.state.to_density::<f64>(&Default::default()).unwrap();
        assert!(picture_spread(&rho, cfg.mutation).unwrap().0 > 1e-3);
        assert!(r.failures().all(|f| f.name == "picture_equivalence"));
    }

    #[test]
    fn sweep_endpoints_and_crossing() {
        let s = werner_sweep(-1.0, 1.0, 401).unwrap();
        assert_eq!(s.rows.len(), 401);
        assert!((s.rows[100].phi + 0.5).abs() < 1e-15);
        assert!((s.rows[100].f + 0.5).abs() < 1e-12);
        assert!((s.rows[400].f - 1.0).abs() < 1e-12);
        assert_eq!(s.crossings.len(), 1);
        let root = (3f64.sqrt() - 1.0) / 2.0;
        let c = s.crossings[0];
        assert!(c.rising && c.lower <= root && root <= c.upper);
        assert!(!s.stated_interval_agrees);
        assert!(s.to_csv().starts_with("phi,f,eq\n"));
        assert!(s.note.starts_with("MISMATCH"));
        let coarse = werner_sweep(-1.0, 1.0, 5).unwrap();
        assert!(coarse.stated_interval_agrees && coarse.note.starts_with("grid too coarse"));
        assert!(werner_sweep(-1.0, 1.0, 1).is_err());
        assert!(werner_sweep(-2.0, 1.0, 5).is_err());
        assert!(werner_sweep(0.5, 0.1, 5).is_err());
    }
}
