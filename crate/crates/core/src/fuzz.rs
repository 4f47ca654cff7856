//! Seeded sampling of valid parameter bundles on a rational grid, and property
//! harnesses that run generated datasets through the axioms, identification
//! and classification.
//!
//! Every trial derives its own seed from the suite seed and its index, so a
//! summary does not depend on how rayon schedules the trials.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::axioms::{
    applicable_axioms, check, check_many, recheck, AxiomId, AxiomReport, CheckOptions,
};
use crate::classify::{self, classify_from_reports, ClassificationReport, Membership};
use crate::error::{Error, Result};
use crate::identify::{identify, identify_ic, RecoveryResult};
use crate::io::params_to_value;
use crate::models::{
    eval_ar_item, generate_scc, ArAttribute, ArParams, Attribute, EbaParams, IcParams,
    LogitParams, ModelParams, ModelSpec, ModelTag, NestedLogitParams, NscParams, RcgParams,
    RrmParams,
};
use crate::primitives::{Mask, Mode, Prob, Scc, Universe, MAX_ITEMS};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Generic,
    /// Only singleton collections are ever chosen.
    Singleton,
    /// NSC with σ constant on the non-empty subsets of each nest.
    NestInvariant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n: usize,
    pub model: ModelTag,
    pub empty_variant: bool,
    pub seed: u64,
    /// Sampled rationals are k / rational_grid.
    pub rational_grid: u32,
    /// Inclusive range for the number of nests, clipped to n.
    pub nest_count: (usize, usize),
    /// Inclusive range for the number of attributes or categories.
    pub attribute_count: (usize, usize),
    /// Probability that y joins Q(x) for y ≠ x.
    pub constraint_density: f64,
    pub structure: Structure,
}

impl GenConfig {
    pub fn new(n: usize, model: ModelTag, seed: u64) -> GenConfig {
        GenConfig {
            n,
            model,
            empty_variant: false,
            seed,
            rational_grid: 64,
            nest_count: (1, 3),
            attribute_count: (1, 4),
            constraint_density: 0.5,
            structure: Structure::Generic,
        }
    }

    pub fn with_empty_variant(mut self, empty_variant: bool) -> GenConfig {
        self.empty_variant = empty_variant;
        self
    }

    pub fn with_structure(mut self, structure: Structure) -> GenConfig {
        self.structure = structure;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(msg.into()));
        if self.n == 0 || self.n > MAX_ITEMS {
            return bad("n must lie in 1..=MAX_ITEMS");
        }
        if self.rational_grid < 2 {
            return bad("rational_grid must be at least 2");
        }
        let ranges = [self.nest_count, self.attribute_count];
        if ranges.iter().any(|(lo, hi)| *lo == 0 || lo > hi) {
            return bad("count ranges must be non-empty and start at 1 or above");
        }
        if !(0.0..=1.0).contains(&self.constraint_density) {
            return bad("constraint_density must lie in [0, 1]");
        }
        if self.empty_variant && !self.model.has_empty_variant() {
            return Err(Error::InvalidParams(format!(
                "{} has no empty-collection variant",
                self.model
            )));
        }
        let structure_ok = match self.structure {
            Structure::Generic => true,
            Structure::Singleton => {
                !self.empty_variant
                    && !matches!(self.model, ModelTag::Logit | ModelTag::Ic)
            }
            Structure::NestInvariant => self.model == ModelTag::Nsc,
        };
        if !structure_ok {
            return Err(Error::InfeasibleStructure(format!(
                "{:?} structure is not available for {}",
                self.structure, self.model
            )));
        }
        Ok(())
    }
}

/// Seed of trial `index` under suite seed `seed` (splitmix64 finalizer).
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Sampler {
    rng: ChaCha8Rng,
    grid: i64,
}

impl Sampler {
    /// k / grid with k in 1..=grid.
    fn positive(&mut self) -> Prob {
        Prob::ratio(self.rng.gen_range(1..=self.grid), self.grid)
    }

    /// k / grid with k in 1..grid.
    fn unit(&mut self) -> Prob {
        Prob::ratio(self.rng.gen_range(1..self.grid), self.grid)
    }

    fn count(&mut self, (lo, hi): (usize, usize)) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    fn subset(&mut self, n: usize, allow_empty: bool) -> Mask {
        let lo = if allow_empty { 0 } else { 1 };
        Mask(self.rng.gen_range(lo..(1u32 << n)))
    }

    /// Adds every uncovered item to a randomly chosen carrier.
    fn repair_cover(&mut self, n: usize, carriers: &mut [Mask]) {
        let covered = carriers.iter().fold(Mask::EMPTY, |a, b| a.union(*b));
        for x in Mask::full(n).difference(covered).items() {
            let i = self.rng.gen_range(0..carriers.len());
            carriers[i] = carriers[i].with(x);
        }
    }

    /// A partition into `q` non-empty nests, sorted by mask value.
    fn partition(&mut self, n: usize, q: usize) -> Vec<Mask> {
        let mut items: Vec<usize> = (0..n).collect();
        items.shuffle(&mut self.rng);
        let mut nests = vec![Mask::EMPTY; q];
        for (k, x) in items.into_iter().enumerate() {
            let i = if k < q { k } else { self.rng.gen_range(0..q) };
            nests[i] = nests[i].with(x);
        }
        nests.sort();
        nests
    }

    fn weights(&mut self, k: usize) -> Vec<Prob> {
        normalized((0..k).map(|_| self.positive()).collect())
    }
}

fn normalized(values: Vec<Prob>) -> Vec<Prob> {
    let total: Prob = values.iter().sum();
    values.iter().map(|v| v / &total).collect()
}

/// A valid bundle for `config.model`, deterministic in the seed.
///
/// Categories and attribute carriers that leave an item uncovered are repaired
/// by adding the item to a random carrier. RRM constraint sets are resampled
/// until pairwise distinct, giving up after 100 attempts.
pub fn sample_params(config: &GenConfig) -> Result<ModelSpec> {
    config.validate()?;
    let n = config.n;
    let singleton = config.structure == Structure::Singleton;
    let mut s = Sampler {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        grid: i64::from(config.rational_grid),
    };
    let full = Mask::full(n);
    let params = match config.model {
        ModelTag::Logit => {
            let pi = full.nonempty_subsets().map(|t| (t, s.positive())).collect();
            let pi_empty = config.empty_variant.then(|| s.positive());
            ModelParams::Logit(LogitParams { pi, pi_empty })
        }
        ModelTag::Ic => ModelParams::Ic(IcParams {
            gamma: (0..n).map(|_| s.unit()).collect(),
        }),
        ModelTag::Rcg => {
            let carriers = carriers(&mut s, config, singleton);
            let weights = s.weights(carriers.len());
            let mut m: BTreeMap<Mask, Prob> = BTreeMap::new();
            for (c, w) in carriers.into_iter().zip(weights) {
                let slot = m.entry(c).or_insert_with(|| Prob::zero(Mode::Exact));
                *slot = &*slot + &w;
            }
            ModelParams::Rcg(RcgParams { m })
        }
        ModelTag::Eba => {
            let carriers = carriers(&mut s, config, singleton);
            let weights = s.weights(carriers.len());
            ModelParams::Eba(EbaParams {
                attributes: carriers
                    .into_iter()
                    .zip(weights)
                    .map(|(carrier, weight)| Attribute { weight, carrier })
                    .collect(),
            })
        }
        ModelTag::Ar => {
            let carriers = carriers(&mut s, config, singleton);
            let attributes = carriers
                .into_iter()
                .map(|carrier| ArAttribute {
                    theta: s.positive(),
                    carrier,
                    eta: carrier.items().map(|x| (x, s.rng.gen_range(1..=4))).collect(),
                })
                .collect();
            ModelParams::Ar(ArParams { attributes })
        }
        ModelTag::Rrm => {
            let constraints = constraint_sets(&mut s, config, singleton)?;
            let salience = s.weights(n);
            ModelParams::Rrm(RrmParams {
                salience,
                constraints,
            })
        }
        ModelTag::Nsc => {
            let nests = nests(&mut s, config, singleton);
            let mut sigma = BTreeMap::new();
            for nest in &nests {
                let constant = s.positive();
                for t in nest.nonempty_subsets() {
                    let w = if config.structure == Structure::NestInvariant {
                        constant.clone()
                    } else {
                        s.positive()
                    };
                    sigma.insert(t, w);
                }
            }
            ModelParams::Nsc(NscParams { nests, sigma })
        }
        ModelTag::NestedLogit => {
            let nests = nests(&mut s, config, singleton);
            let utility = (0..n).map(|_| s.positive()).collect();
            let exponents = nests.iter().map(|_| Prob::int(s.rng.gen_range(1..=3))).collect();
            ModelParams::NestedLogit(NestedLogitParams {
                nests,
                utility,
                exponents,
            })
        }
    };
    let spec = ModelSpec::new(params, config.empty_variant)?;
    spec.validate(n)?;
    Ok(spec)
}

fn carriers(s: &mut Sampler, config: &GenConfig, singleton: bool) -> Vec<Mask> {
    let n = config.n;
    if singleton {
        return (0..n).map(Mask::singleton).collect();
    }
    let k = s.count(config.attribute_count);
    let mut out: Vec<Mask> = (0..k).map(|_| s.subset(n, config.empty_variant)).collect();
    if !config.empty_variant {
        s.repair_cover(n, &mut out);
    }
    out
}

fn constraint_sets(s: &mut Sampler, config: &GenConfig, singleton: bool) -> Result<Vec<Mask>> {
    let n = config.n;
    if singleton {
        return Ok((0..n).map(Mask::singleton).collect());
    }
    for _ in 0..100 {
        let q: Vec<Mask> = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|y| *y == x || s.rng.gen_bool(config.constraint_density))
                    .fold(Mask::EMPTY, Mask::with)
            })
            .collect();
        let mut sorted = q.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() == n {
            return Ok(q);
        }
    }
    Err(Error::InfeasibleStructure(format!(
        "no pairwise-distinct constraint sets found at density {}",
        config.constraint_density
    )))
}

fn nests(s: &mut Sampler, config: &GenConfig, singleton: bool) -> Vec<Mask> {
    let n = config.n;
    let q = if singleton {
        n
    } else {
        let (lo, hi) = config.nest_count;
        s.count((lo.min(n), hi.min(n)))
    };
    s.partition(n, q)
}

/// The axioms that characterize a model's datasets.
pub fn characterizing_axioms(model: ModelTag, empty_variant: bool) -> Vec<AxiomId> {
    use AxiomId::*;
    match (model, empty_variant) {
        (ModelTag::Logit, false) => vec![FullSupport, Iis],
        (ModelTag::Logit, true) => vec![FullSupport, IisO],
        (ModelTag::Rcg, true) => vec![Additivity],
        (ModelTag::Ic, false) => vec![FullSupport, Iis, RelAdd],
        (ModelTag::Ic, true) => vec![FullSupport, IisO, Additivity],
        (ModelTag::Rcg | ModelTag::Eba | ModelTag::Ar, _) => vec![Pos1, RelAdd],
        (ModelTag::Rrm, _) => vec![DistinctQ, Pos3, RelAdd1, RelAdd2],
        (ModelTag::Nsc | ModelTag::NestedLogit, _) => vec![Piis, Partition, Pos4],
    }
}

/// The model whose identification recovers a dataset of `model`.
pub fn recovery_model(model: ModelTag) -> ModelTag {
    match model {
        ModelTag::Eba | ModelTag::Ar => ModelTag::Rcg,
        ModelTag::NestedLogit => ModelTag::Nsc,
        other => other,
    }
}

/// Exogenous carriers for POS2, when the model has attributes.
pub fn attribute_carriers(spec: &ModelSpec) -> Option<Vec<Mask>> {
    match &spec.params {
        ModelParams::Eba(p) => Some(p.carriers()),
        ModelParams::Ar(p) => Some(p.carriers()),
        _ => None,
    }
}

/// The parameters identification should return for data generated by `spec`:
/// the normalized π, m or s, the same γ or Q, and σ divided by σ({a}) for the
/// first item a of the first nest (σ ≡ 1 with a single nest).
pub fn expected_recovery(spec: &ModelSpec) -> Result<ModelSpec> {
    let ev = spec.empty_variant;
    let params = match &spec.params {
        ModelParams::Logit(p) => {
            let total: Prob = p.pi.values().chain(p.pi_empty.iter()).sum();
            ModelParams::Logit(LogitParams {
                pi: p.pi.iter().map(|(t, w)| (*t, w / &total)).collect(),
                pi_empty: p.pi_empty.as_ref().map(|w| w / &total),
            })
        }
        ModelParams::Rcg(p) => ModelParams::Rcg(RcgParams {
            m: p.m.iter().filter(|(_, w)| !w.is_exact_zero()).map(|(c, w)| (*c, w.clone())).collect(),
        }),
        ModelParams::Ic(p) => ModelParams::Ic(p.clone()),
        ModelParams::Eba(p) => ModelParams::Rcg(p.to_rcg()),
        ModelParams::Ar(p) => ModelParams::Rcg(p.to_eba().to_rcg()),
        ModelParams::Rrm(p) => ModelParams::Rrm(RrmParams {
            salience: normalized(p.salience.clone()),
            constraints: p.constraints.clone(),
        }),
        ModelParams::Nsc(p) => ModelParams::Nsc(anchored_sigma(p)),
        ModelParams::NestedLogit(p) => ModelParams::Nsc(anchored_sigma(&p.to_nsc()?)),
    };
    ModelSpec::new(params, ev)
}

fn anchored_sigma(p: &NscParams) -> NscParams {
    let mut nests = p.nests.clone();
    nests.sort();
    let sigma = if nests.len() == 1 {
        nests[0].nonempty_subsets().map(|t| (t, Prob::int(1))).collect()
    } else {
        let anchor = p.sigma[&Mask::singleton(nests[0].first().expect("nests are non-empty"))].clone();
        p.sigma.iter().map(|(t, w)| (*t, w / &anchor)).collect()
    };
    NscParams { nests, sigma }
}

/// The same bundle with π, s or σ multiplied by `c`; other models are returned
/// unchanged.
pub fn rescale(spec: &ModelSpec, c: &Prob) -> ModelSpec {
    let mut out = spec.clone();
    match &mut out.params {
        ModelParams::Logit(p) => {
            for w in p.pi.values_mut().chain(p.pi_empty.iter_mut()) {
                *w = &*w * c;
            }
        }
        ModelParams::Rrm(p) => {
            for w in &mut p.salience {
                *w = &*w * c;
            }
        }
        ModelParams::Nsc(p) => {
            for w in p.sigma.values_mut() {
                *w = &*w * c;
            }
        }
        _ => {}
    }
    out
}

/// A failed trial, with everything needed to replay it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reproducer {
    pub trial: usize,
    pub config: GenConfig,
    pub stage: String,
    pub detail: String,
    /// The sampled bundle as a parameter document, when sampling succeeded.
    pub params: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterizationSummary {
    pub model: ModelTag,
    pub empty_variant: bool,
    pub trials: usize,
    pub n_values: Vec<usize>,
    pub seed: u64,
    pub passed: usize,
    pub failures: usize,
    pub instances_checked: u64,
    pub scaling_checks: usize,
    pub reproducers: Vec<Reproducer>,
}

struct Failure {
    stage: &'static str,
    detail: String,
}

fn fail(stage: &'static str, detail: impl Into<String>) -> Failure {
    Failure {
        stage,
        detail: detail.into(),
    }
}

fn first_failure(reports: &[AxiomReport], u: &Universe) -> Option<String> {
    reports.iter().find(|r| !r.holds).map(|r| {
        let witness = r
            .witnesses
            .first()
            .map(|w| crate::io::witness_to_value(w, u).to_string())
            .unwrap_or_default();
        format!("{} fails: {witness}", r.axiom)
    })
}

struct TrialOutcome {
    checked: u64,
    scaled: bool,
}

fn characterization_trial(
    config: &GenConfig,
    spec: &ModelSpec,
    recover: bool,
) -> std::result::Result<TrialOutcome, Failure> {
    let u = Universe::letters(config.n).map_err(|e| fail("universe", e.to_string()))?;
    let scc = generate_scc(spec, &u).map_err(|e| fail("generate", e.to_string()))?;
    if scc.mode() != Mode::Exact {
        return Err(fail("generate", "dataset is not exact"));
    }
    let violations = scc.validate(&Default::default());
    if let Some(v) = violations.first() {
        return Err(fail("validate", v.detail.clone()));
    }
    let mut opts = CheckOptions::default();
    let mut axioms = characterizing_axioms(config.model, config.empty_variant);
    if let Some(carriers) = attribute_carriers(spec) {
        opts = opts.with_attributes(carriers);
        axioms.push(AxiomId::Pos2);
    }
    let reports = check_many(&scc, &axioms, &opts).map_err(|e| fail("axioms", e.to_string()))?;
    if let Some(detail) = first_failure(&reports, &u) {
        return Err(fail("axioms", detail));
    }
    let checked = reports.iter().map(|r| r.instances_checked).sum();
    if !recover {
        return Ok(TrialOutcome {
            checked,
            scaled: false,
        });
    }
    let model = recovery_model(config.model);
    let recovered = identify(&scc, model, &opts).map_err(|e| fail("identify", e.to_string()))?;
    if !recovered.round_trip_exact {
        return Err(fail("round_trip", "regenerated dataset differs"));
    }
    let expected = expected_recovery(spec).map_err(|e| fail("parameters", e.to_string()))?;
    if recovered.spec != expected {
        return Err(fail(
            "parameters",
            format!(
                "recovered {} but expected {}",
                params_to_value(&recovered.spec, &u),
                params_to_value(&expected, &u)
            ),
        ));
    }
    let scaled = matches!(config.model, ModelTag::Logit | ModelTag::Rrm | ModelTag::Nsc);
    if scaled {
        scaling_check(config, spec, &recovered, &u, &opts)?;
    }
    Ok(TrialOutcome { checked, scaled })
}

/// Uniformly rescaled inputs must give the same normalized recovery.
fn scaling_check(
    config: &GenConfig,
    spec: &ModelSpec,
    recovered: &RecoveryResult,
    u: &Universe,
    opts: &CheckOptions,
) -> std::result::Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, u64::MAX));
    let grid = i64::from(config.rational_grid);
    let c = Prob::ratio(rng.gen_range(2..=3 * grid), rng.gen_range(1..=grid));
    let scaled = rescale(spec, &c);
    let scc = generate_scc(&scaled, u).map_err(|e| fail("scaling", e.to_string()))?;
    let again = identify(&scc, recovery_model(config.model), opts)
        .map_err(|e| fail("scaling", e.to_string()))?;
    if again.spec != recovered.spec {
        return Err(fail("scaling", format!("rescaling by {c} changed the recovery")));
    }
    Ok(())
}

fn configs(model: ModelTag, empty_variant: bool, trials: usize, n_values: &[usize], seed: u64) -> Vec<GenConfig> {
    (0..trials)
        .map(|i| {
            let n = n_values[i % n_values.len()];
            GenConfig::new(n, model, trial_seed(seed, i as u64)).with_empty_variant(empty_variant)
        })
        .collect()
}

fn params_doc(spec: &ModelSpec, n: usize) -> Option<Value> {
    Universe::letters(n).ok().map(|u| params_to_value(spec, &u))
}

/// sample → generate → characterizing axioms → identify → exact round trip →
/// parameter comparison → rescaling, once per trial.
pub fn fuzz_characterization(
    model: ModelTag,
    empty_variant: bool,
    trials: usize,
    n_values: &[usize],
    seed: u64,
) -> Result<CharacterizationSummary> {
    run_characterization(model, empty_variant, trials, n_values, seed, true)
}

/// The same trials stopped after the characterizing axioms.
pub fn fuzz_necessity(
    model: ModelTag,
    empty_variant: bool,
    trials: usize,
    n_values: &[usize],
    seed: u64,
) -> Result<CharacterizationSummary> {
    run_characterization(model, empty_variant, trials, n_values, seed, false)
}

fn run_characterization(
    model: ModelTag,
    empty_variant: bool,
    trials: usize,
    n_values: &[usize],
    seed: u64,
    recover: bool,
) -> Result<CharacterizationSummary> {
    if n_values.is_empty() {
        return Err(Error::InvalidParams("at least one universe size is required".into()));
    }
    let configs = configs(model, empty_variant, trials, n_values, seed);
    let outcomes: Vec<_> = configs
        .par_iter()
        .enumerate()
        .map(|(i, config)| match sample_params(config) {
            Err(e) => Err((i, fail("sample", e.to_string()), None)),
            Ok(spec) => characterization_trial(config, &spec, recover)
                .map_err(|f| (i, f, params_doc(&spec, config.n))),
        })
        .collect();
    let mut summary = CharacterizationSummary {
        model,
        empty_variant,
        trials,
        n_values: n_values.to_vec(),
        seed,
        passed: 0,
        failures: 0,
        instances_checked: 0,
        scaling_checks: 0,
        reproducers: Vec::new(),
    };
    for outcome in outcomes {
        match outcome {
            Ok(t) => {
                summary.passed += 1;
                summary.instances_checked += t.checked;
                summary.scaling_checks += usize::from(t.scaled);
            }
            Err((i, f, params)) => {
                summary.failures += 1;
                summary.reproducers.push(Reproducer {
                    trial: i,
                    config: configs[i].clone(),
                    stage: f.stage.to_string(),
                    detail: f.detail,
                    params,
                });
            }
        }
    }
    Ok(summary)
}

/// Every (model, empty-variant) pair the library can generate.
pub fn all_variants() -> Vec<(ModelTag, bool)> {
    let mut out: Vec<(ModelTag, bool)> = ModelTag::ALL.iter().map(|m| (*m, false)).collect();
    out.extend([(ModelTag::Logit, true), (ModelTag::Rcg, true), (ModelTag::Ic, true)]);
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TargetedStats {
    pub trials: usize,
    pub mismatches: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub trials: usize,
    /// Logit bundles whose data satisfy REL_ADD.
    pub rel_add_candidates: usize,
    /// Candidates that independent-choice identification rejects.
    pub counterexamples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Issue {
    pub suite: &'static str,
    pub trial: usize,
    pub config: GenConfig,
    pub detail: String,
    pub params: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationshipSummary {
    pub trials: usize,
    pub n_values: Vec<usize>,
    pub seed: u64,
    pub relationship_violations: usize,
    pub membership_errors: usize,
    /// RRM or NSC datasets that nonetheless have full support.
    pub full_support_overlaps: usize,
    pub singleton: TargetedStats,
    pub nest_invariant: TargetedStats,
    pub logit_search: SearchStats,
    pub witnesses_rechecked: usize,
    pub witness_failures: usize,
    pub issues: Vec<Issue>,
}

impl RelationshipSummary {
    pub fn total_failures(&self) -> usize {
        self.relationship_violations
            + self.membership_errors
            + self.full_support_overlaps
            + self.singleton.mismatches
            + self.nest_invariant.mismatches
            + self.logit_search.counterexamples
            + self.witness_failures
    }
}

/// A generated dataset with its full battery and classification.
pub struct Classified {
    pub scc: Scc,
    pub reports: Vec<AxiomReport>,
    pub report: ClassificationReport,
    pub opts: CheckOptions,
}

pub fn classify_generated(spec: &ModelSpec, n: usize) -> Result<Classified> {
    let u = Universe::letters(n)?;
    let scc = generate_scc(spec, &u)?;
    let mut opts = CheckOptions::default();
    if let Some(carriers) = attribute_carriers(spec) {
        opts = opts.with_attributes(carriers);
    }
    let reports = check_many(&scc, &applicable_axioms(&scc, &opts), &opts)?;
    let report = classify_from_reports(&scc, opts.attributes.is_some(), &reports);
    Ok(Classified {
        scc,
        reports,
        report,
        opts,
    })
}

/// Class names the generating model must belong to.
pub fn generating_classes(model: ModelTag, empty_variant: bool, with_attributes: bool) -> Vec<&'static str> {
    use classify::*;
    match (model, empty_variant) {
        (ModelTag::Logit, true) => vec![LOGIT_O],
        (ModelTag::Rcg, true) => vec![RCG_O],
        (ModelTag::Ic, true) => vec![IC_O, LOGIT_O, RCG_O],
        (ModelTag::Logit, _) => vec![LOGIT],
        (ModelTag::Rcg, _) => vec![RCG, EBA_ENDOGENOUS, AR],
        (ModelTag::Ic, _) => vec![IC, LOGIT, RCG],
        (ModelTag::Eba | ModelTag::Ar, _) if with_attributes => {
            vec![RCG, EBA_ENDOGENOUS, EBA_EXOGENOUS, AR]
        }
        (ModelTag::Eba | ModelTag::Ar, _) => vec![RCG, EBA_ENDOGENOUS, AR],
        (ModelTag::Rrm, _) => vec![RRM],
        (ModelTag::Nsc | ModelTag::NestedLogit, _) => vec![NSC],
    }
}

/// Witnesses that do not re-evaluate to a violation.
fn bad_witnesses(c: &Classified) -> (usize, usize) {
    let mut total = 0;
    let mut bad = 0;
    for r in &c.reports {
        for w in &r.witnesses {
            total += 1;
            if !matches!(recheck(&c.scc, w, &c.opts), Ok(true)) {
                bad += 1;
            }
        }
    }
    (total, bad)
}

enum Suite {
    Mixed,
    Singleton,
    NestInvariant,
    LogitSearch,
}

struct RelOutcome {
    witnesses: usize,
    bad_witnesses: usize,
    relationship_violations: usize,
    membership_errors: usize,
    full_support_overlaps: usize,
    mismatches: usize,
    candidate: bool,
    counterexample: bool,
    details: Vec<String>,
}

impl RelOutcome {
    fn new() -> RelOutcome {
        RelOutcome {
            witnesses: 0,
            bad_witnesses: 0,
            relationship_violations: 0,
            membership_errors: 0,
            full_support_overlaps: 0,
            mismatches: 0,
            candidate: false,
            counterexample: false,
            details: Vec::new(),
        }
    }
}

fn membership_is(report: &ClassificationReport, class: &str, holds: bool) -> bool {
    report.holds(class) == Some(holds)
}

fn mixed_trial(config: &GenConfig, spec: &ModelSpec, out: &mut RelOutcome) -> Result<()> {
    let c = classify_generated(spec, config.n)?;
    (out.witnesses, out.bad_witnesses) = bad_witnesses(&c);
    out.relationship_violations = c.report.relationship_violations.len();
    for v in &c.report.relationship_violations {
        out.details.push(format!("relationship {v} contradicted"));
    }
    for class in generating_classes(config.model, config.empty_variant, c.opts.attributes.is_some()) {
        if !membership_is(&c.report, class, true) {
            out.membership_errors += 1;
            out.details.push(format!("generated by {} but {class} is {:?}", config.model, c.report.membership[class]));
        }
    }
    if config.model == ModelTag::NestedLogit {
        if let Some(Membership::Fails { .. }) = c.report.membership.get(classify::NESTED_LOGIT) {
            out.membership_errors += 1;
            out.details.push("nested-logit data rejected as nested logit".into());
        }
    }
    let structured = matches!(config.model, ModelTag::Rrm | ModelTag::Nsc | ModelTag::NestedLogit);
    if structured && config.n >= 2 && c.report.axioms.get(&AxiomId::FullSupport) != Some(&false) {
        out.full_support_overlaps += 1;
        out.details.push("RRM or NSC dataset with full support".into());
    }
    Ok(())
}

fn singleton_trial(config: &GenConfig, spec: &ModelSpec, out: &mut RelOutcome) -> Result<()> {
    use classify::*;
    let c = classify_generated(spec, config.n)?;
    (out.witnesses, out.bad_witnesses) = bad_witnesses(&c);
    out.relationship_violations = c.report.relationship_violations.len();
    let r = &c.report;
    let expected = [
        (RRM, true),
        (NSC, true),
        (RCG, true),
        (EBA_ENDOGENOUS, true),
        (AR, true),
        (NESTED_LOGIT, true),
        (LOGIT, false),
        (IC, false),
    ];
    for (class, holds) in expected {
        if !membership_is(r, class, holds) {
            out.mismatches += 1;
            out.details.push(format!("singleton data: {class} should be {holds}"));
        }
    }
    if r.special.get(AxiomId::Singleton.name()) != Some(&true) {
        out.mismatches += 1;
        out.details.push("singleton data without the SINGLETON flag".into());
    }
    Ok(())
}

fn nest_invariant_trial(config: &GenConfig, spec: &ModelSpec, out: &mut RelOutcome) -> Result<()> {
    use classify::*;
    let c = classify_generated(spec, config.n)?;
    (out.witnesses, out.bad_witnesses) = bad_witnesses(&c);
    out.relationship_violations = c.report.relationship_violations.len();
    let r = &c.report;
    let all_singletons = match &spec.params {
        ModelParams::Nsc(p) => p.nests.iter().all(|n| n.len() == 1),
        _ => false,
    };
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            out.mismatches += 1;
            out.details.push(format!("nest-invariant data: {what}"));
        }
    };
    expect(membership_is(r, NSC, true), "NSC should hold");
    expect(membership_is(r, RCG, true), "RCG should hold");
    expect(r.special.get(AxiomId::Paf.name()) == Some(&true), "PAF should hold");
    expect(r.special.get(NEST_INVARIANT) == Some(&true), "NEST_INVARIANT should be set");
    expect(
        r.special.get(AxiomId::Singleton.name()) == Some(&all_singletons),
        "SINGLETON should match singleton nests",
    );
    expect(membership_is(r, RRM, all_singletons), "RRM should match singleton nests");
    Ok(())
}

/// Logit data whose π is a product over items are IC; otherwise π is generic.
/// Any bundle passing REL_ADD must be identified as IC.
fn logit_search_trial(config: &GenConfig, out: &mut RelOutcome) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let grid = i64::from(config.rational_grid);
    let full = Mask::full(config.n);
    let product = rng.gen_bool(0.5);
    let pi: BTreeMap<Mask, Prob> = if product {
        let r: Vec<Prob> = (0..config.n).map(|_| Prob::ratio(rng.gen_range(1..=grid), 8)).collect();
        full.nonempty_subsets()
            .map(|t| (t, t.items().fold(Prob::int(1), |acc, x| acc * &r[x])))
            .collect()
    } else {
        full.nonempty_subsets()
            .map(|t| (t, Prob::ratio(rng.gen_range(1..=grid), grid)))
            .collect()
    };
    let spec = ModelSpec::standard(ModelParams::Logit(LogitParams { pi, pi_empty: None }));
    let u = Universe::letters(config.n)?;
    let scc = generate_scc(&spec, &u)?;
    let opts = CheckOptions::default();
    if !check(&scc, AxiomId::RelAdd, &opts)?.holds {
        if product {
            out.counterexample = true;
            out.details.push("product-form logit fails REL_ADD".into());
        }
        return Ok(());
    }
    out.candidate = true;
    match identify_ic(&scc, false, &opts) {
        Ok(r) if r.round_trip_exact => {}
        Ok(_) => {
            out.counterexample = true;
            out.details.push("IC recovery is not exact".into());
        }
        Err(e) => {
            out.counterexample = true;
            out.details.push(format!("logit data with REL_ADD is not IC: {e}"));
        }
    }
    Ok(())
}

/// Mixed trials over every model, plus targeted singleton, nest-invariant and
/// logit-with-REL_ADD trials, each `trials.div_ceil(5)` strong.
pub fn fuzz_relationships(trials: usize, n_values: &[usize], seed: u64) -> Result<RelationshipSummary> {
    if n_values.is_empty() {
        return Err(Error::InvalidParams("at least one universe size is required".into()));
    }
    let variants = all_variants();
    let singleton_models = [
        ModelTag::Rcg,
        ModelTag::Eba,
        ModelTag::Ar,
        ModelTag::Rrm,
        ModelTag::Nsc,
        ModelTag::NestedLogit,
    ];
    let targeted = trials.div_ceil(5);
    let mut jobs: Vec<(Suite, usize, GenConfig)> = Vec::new();
    let pick = |i: usize, salt: u64, len: usize| (trial_seed(seed ^ salt, i as u64) % len as u64) as usize;
    for i in 0..trials {
        let (model, ev) = variants[pick(i, 0x5eed, variants.len())];
        let n = n_values[i % n_values.len()];
        let cfg = GenConfig::new(n, model, trial_seed(seed, i as u64)).with_empty_variant(ev);
        jobs.push((Suite::Mixed, i, cfg));
    }
    for i in 0..targeted {
        let n = n_values[i % n_values.len()];
        let model = singleton_models[pick(i, 0x51, singleton_models.len())];
        let cfg = GenConfig::new(n, model, trial_seed(seed ^ 0x51, i as u64)).with_structure(Structure::Singleton);
        jobs.push((Suite::Singleton, i, cfg));
        let cfg = GenConfig::new(n, ModelTag::Nsc, trial_seed(seed ^ 0x1a, i as u64))
            .with_structure(Structure::NestInvariant);
        jobs.push((Suite::NestInvariant, i, cfg));
        let cfg = GenConfig::new(n, ModelTag::Logit, trial_seed(seed ^ 0x10, i as u64));
        jobs.push((Suite::LogitSearch, i, cfg));
    }

    let outcomes: Vec<(RelOutcome, Option<Value>, Option<String>)> = jobs
        .par_iter()
        .map(|(suite, _, cfg)| {
            let mut out = RelOutcome::new();
            let mut params = None;
            let result = match suite {
                Suite::LogitSearch => logit_search_trial(cfg, &mut out),
                _ => sample_params(cfg).and_then(|spec| {
                    params = params_doc(&spec, cfg.n);
                    match suite {
                        Suite::Mixed => mixed_trial(cfg, &spec, &mut out),
                        Suite::Singleton => singleton_trial(cfg, &spec, &mut out),
                        _ => nest_invariant_trial(cfg, &spec, &mut out),
                    }
                }),
            };
            (out, params, result.err().map(|e| e.to_string()))
        })
        .collect();

    let mut summary = RelationshipSummary {
        trials,
        n_values: n_values.to_vec(),
        seed,
        relationship_violations: 0,
        membership_errors: 0,
        full_support_overlaps: 0,
        singleton: TargetedStats::default(),
        nest_invariant: TargetedStats::default(),
        logit_search: SearchStats::default(),
        witnesses_rechecked: 0,
        witness_failures: 0,
        issues: Vec::new(),
    };
    for ((suite, i, cfg), (out, params, error)) in jobs.iter().zip(outcomes) {
        let name = match suite {
            Suite::Mixed => "mixed",
            Suite::Singleton => {
                summary.singleton.trials += 1;
                summary.singleton.mismatches += out.mismatches;
                "singleton"
            }
            Suite::NestInvariant => {
                summary.nest_invariant.trials += 1;
                summary.nest_invariant.mismatches += out.mismatches;
                "nest_invariant"
            }
            Suite::LogitSearch => {
                summary.logit_search.trials += 1;
                summary.logit_search.rel_add_candidates += usize::from(out.candidate);
                summary.logit_search.counterexamples += usize::from(out.counterexample);
                "logit_search"
            }
        };
        summary.relationship_violations += out.relationship_violations;
        summary.membership_errors += out.membership_errors;
        summary.full_support_overlaps += out.full_support_overlaps;
        summary.witnesses_rechecked += out.witnesses;
        summary.witness_failures += out.bad_witnesses;
        if out.bad_witnesses > 0 {
            summary.issues.push(Issue {
                suite: name,
                trial: *i,
                config: cfg.clone(),
                detail: format!("{} witnesses do not re-evaluate to a violation", out.bad_witnesses),
                params: params.clone(),
            });
        }
        let mut details = out.details;
        if let Some(e) = error {
            summary.membership_errors += 1;
            details.push(format!("trial error: {e}"));
        }
        for detail in details {
            summary.issues.push(Issue {
                suite: name,
                trial: *i,
                config: cfg.clone(),
                detail,
                params: params.clone(),
            });
        }
    }
    Ok(summary)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EquivalenceSummary {
    pub trials: usize,
    pub eba_equals_rcg: usize,
    pub ar_first_stage_equals_eba: usize,
    pub ar_item_identity: usize,
    pub ic_equals_product_logit: usize,
    pub nested_logit_equals_nsc: usize,
    /// Descriptions of the failed comparisons, with trial seeds.
    pub failures: Vec<String>,
}

/// π(T) = Π_{x∈T} γ(x) · Π_{y∈X∖T} (1 − γ(y)).
pub fn ic_as_logit(p: &IcParams, n: usize) -> LogitParams {
    let one = Prob::int(1);
    let full = Mask::full(n);
    let pi = full
        .nonempty_subsets()
        .map(|t| {
            let w = t
                .items()
                .map(|x| p.gamma[x].clone())
                .chain(full.difference(t).items().map(|y| &one - &p.gamma[y]))
                .fold(one.clone(), |acc, f| acc * f);
            (t, w)
        })
        .collect();
    LogitParams { pi, pi_empty: None }
}

/// Bit-exact comparisons between equivalent parameterizations, once per trial
/// and per identity.
pub fn fuzz_equivalences(trials: usize, n_values: &[usize], seed: u64) -> Result<EquivalenceSummary> {
    if n_values.is_empty() {
        return Err(Error::InvalidParams("at least one universe size is required".into()));
    }
    let results: Vec<Result<Vec<(&'static str, bool)>>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let n = n_values[i % n_values.len()];
            let u = Universe::letters(n)?;
            let cfg = |model| GenConfig::new(n, model, trial_seed(seed, i as u64));
            let mut checks = Vec::new();

            let eba = sample_params(&cfg(ModelTag::Eba))?;
            let ModelParams::Eba(e) = &eba.params else { unreachable!() };
            let rcg = ModelSpec::standard(ModelParams::Rcg(e.to_rcg()));
            checks.push(("eba_equals_rcg", generate_scc(&eba, &u)? == generate_scc(&rcg, &u)?));

            let ar = sample_params(&cfg(ModelTag::Ar))?;
            let ModelParams::Ar(a) = &ar.params else { unreachable!() };
            let as_eba = ModelSpec::standard(ModelParams::Eba(a.to_eba()));
            checks.push((
                "ar_first_stage_equals_eba",
                generate_scc(&ar, &u)? == generate_scc(&as_eba, &u)?,
            ));
            let mut identity = true;
            for s in u.menus() {
                let mut total = Prob::int(0);
                for x in s.items() {
                    let item = eval_ar_item(a, x, s)?;
                    identity &= item.p == item.recombined();
                    total = total + &item.p;
                }
                identity &= total == Prob::int(1);
            }
            checks.push(("ar_item_identity", identity));

            let ic = sample_params(&cfg(ModelTag::Ic))?;
            let ModelParams::Ic(g) = &ic.params else { unreachable!() };
            let logit = ModelSpec::standard(ModelParams::Logit(ic_as_logit(g, n)));
            checks.push(("ic_equals_product_logit", generate_scc(&ic, &u)? == generate_scc(&logit, &u)?));

            let nl = sample_params(&cfg(ModelTag::NestedLogit))?;
            let ModelParams::NestedLogit(p) = &nl.params else { unreachable!() };
            let nsc = ModelSpec::standard(ModelParams::Nsc(p.to_nsc()?));
            checks.push(("nested_logit_equals_nsc", generate_scc(&nl, &u)? == generate_scc(&nsc, &u)?));
            Ok(checks)
        })
        .collect();
    let mut summary = EquivalenceSummary {
        trials,
        ..Default::default()
    };
    for (i, r) in results.into_iter().enumerate() {
        for (name, ok) in r? {
            if !ok {
                summary.failures.push(format!("{name} fails at trial {i} (seed {})", trial_seed(seed, i as u64)));
                continue;
            }
            match name {
                "eba_equals_rcg" => summary.eba_equals_rcg += 1,
                "ar_first_stage_equals_eba" => summary.ar_first_stage_equals_eba += 1,
                "ar_item_identity" => summary.ar_item_identity += 1,
                "ic_equals_product_logit" => summary.ic_equals_product_logit += 1,
                _ => summary.nested_logit_equals_nsc += 1,
            }
        }
    }
    Ok(summary)
}
