//! Parameter recovery from a dataset that passes a model's characterizing
//! axioms, always followed by regeneration and comparison.

use std::collections::BTreeMap;

use crate::axioms::{check_many, derive_revealed_constraints, derive_revealed_nests, AxiomId, CheckOptions};
use crate::error::{Error, Result};
use crate::models::{
    generate_scc, IcParams, LogitParams, ModelParams, ModelSpec, ModelTag, NscParams, RcgParams,
    RrmParams,
};
use crate::primitives::{Mask, Mode, Prob, Scc, ToleranceConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryResult {
    pub model: ModelTag,
    pub spec: ModelSpec,
    /// Regenerated dataset equals the input value for value.
    pub round_trip_exact: bool,
    /// Regenerated dataset matches the input under the tolerance settings.
    pub round_trip_within_tolerance: bool,
    pub normalization_note: String,
}

/// Fails with the first report whose axiom does not hold.
fn require(scc: &Scc, axioms: &[AxiomId], opts: &CheckOptions) -> Result<()> {
    for report in check_many(scc, axioms, opts)? {
        if !report.holds {
            return Err(Error::PreconditionFailed(Box::new(report)));
        }
    }
    Ok(())
}

fn require_variant(scc: &Scc, axiom: AxiomId, empty_variant: bool) -> Result<()> {
    if scc.allows_empty() != empty_variant {
        return Err(Error::WrongVariant {
            axiom,
            expected: empty_variant,
        });
    }
    Ok(())
}

fn grand_row(scc: &Scc) -> Result<&BTreeMap<Mask, Prob>> {
    scc.row(scc.grand_set()).ok_or(Error::MissingGrandSet)
}

/// Regenerates and compares; in exact mode anything short of equality fails.
fn finish(scc: &Scc, model: ModelTag, spec: ModelSpec, note: &str, tol: &ToleranceConfig) -> Result<RecoveryResult> {
    let mut result = RecoveryResult {
        model,
        spec,
        round_trip_exact: false,
        round_trip_within_tolerance: false,
        normalization_note: note.to_string(),
    };
    let regenerated = generate_scc(&result.spec, scc.universe())?;
    result.round_trip_exact = scc.mode() == Mode::Exact
        && regenerated.mode() == Mode::Exact
        && regenerated.equivalent(scc, tol);
    result.round_trip_within_tolerance = regenerated.equivalent(scc, tol);
    let ok = match scc.mode() {
        Mode::Exact => result.round_trip_exact,
        Mode::Float => result.round_trip_within_tolerance,
    };
    if ok {
        Ok(result)
    } else {
        Err(Error::RoundTripFailed)
    }
}

/// π(T) = μ(T,X). The variant follows the dataset's `allows_empty` flag.
pub fn identify_logit(scc: &Scc, opts: &CheckOptions) -> Result<RecoveryResult> {
    let ev = scc.allows_empty();
    let iis = if ev { AxiomId::IisO } else { AxiomId::Iis };
    require(scc, &[AxiomId::FullSupport, iis], opts)?;
    let x = scc.grand_set();
    let pi = x
        .nonempty_subsets()
        .map(|t| (t, scc.get(t, x)))
        .collect();
    let pi_empty = ev.then(|| scc.get(Mask::EMPTY, x));
    let spec = ModelSpec::new(ModelParams::Logit(LogitParams { pi, pi_empty }), ev)?;
    finish(
        scc,
        ModelTag::Logit,
        spec,
        "π is unique up to uniform scaling; reported as π(T) = μ(T,X), which sums to 1",
        &opts.tol,
    )
}

/// m(C) = μ(C,X).
pub fn identify_rcg(scc: &Scc, empty_variant: bool, opts: &CheckOptions) -> Result<RecoveryResult> {
    if empty_variant {
        require_variant(scc, AxiomId::Additivity, true)?;
        require(scc, &[AxiomId::Additivity], opts)?;
    } else {
        require_variant(scc, AxiomId::RelAdd, false)?;
        require(scc, &[AxiomId::Pos1, AxiomId::RelAdd], opts)?;
    }
    let m = grand_row(scc)?
        .iter()
        .filter(|(_, p)| opts.tol.is_positive(p))
        .map(|(c, p)| (*c, p.clone()))
        .collect();
    let spec = ModelSpec::new(ModelParams::Rcg(RcgParams { m }), empty_variant)?;
    finish(scc, ModelTag::Rcg, spec, "m(C) = μ(C,X); the category distribution is unique", &opts.tol)
}

/// γ(x) = π(X) / (π(X) + π(X∖x)) with π(T) = μ(T,X).
pub fn identify_ic(scc: &Scc, empty_variant: bool, opts: &CheckOptions) -> Result<RecoveryResult> {
    let n = scc.n();
    if empty_variant {
        require_variant(scc, AxiomId::Additivity, true)?;
        require(scc, &[AxiomId::FullSupport, AxiomId::IisO, AxiomId::Additivity], opts)?;
    } else {
        require_variant(scc, AxiomId::RelAdd, false)?;
        if n < 2 {
            return Err(Error::InvalidParams(
                "independent choice needs at least two items to identify γ".into(),
            ));
        }
        require(scc, &[AxiomId::FullSupport, AxiomId::Iis, AxiomId::RelAdd], opts)?;
    }
    let x = scc.grand_set();
    let whole = scc.get(x, x);
    let gamma = (0..n)
        .map(|i| {
            let without = scc.get(x.without(i), x);
            &whole / &(&whole + &without)
        })
        .collect();
    let spec = ModelSpec::new(ModelParams::Ic(IcParams { gamma }), empty_variant)?;
    finish(scc, ModelTag::Ic, spec, "γ is unique", &opts.tol)
}

/// Q = Q^R and s_x = μ(Q^R(x),X), rescaled so the saliences sum to 1.
pub fn identify_rrm(scc: &Scc, opts: &CheckOptions) -> Result<RecoveryResult> {
    require_variant(scc, AxiomId::RelAdd1, false)?;
    require(
        scc,
        &[AxiomId::DistinctQ, AxiomId::Pos3, AxiomId::RelAdd1, AxiomId::RelAdd2],
        opts,
    )?;
    let q = derive_revealed_constraints(scc, &opts.tol)?;
    let x = scc.grand_set();
    let raw: Vec<Prob> = q.iter().map(|c| scc.get(*c, x)).collect();
    let total: Prob = raw.iter().sum();
    let salience = raw.iter().map(|s| s / &total).collect();
    let spec = ModelSpec::standard(ModelParams::Rrm(RrmParams {
        salience,
        constraints: q,
    }));
    finish(
        scc,
        ModelTag::Rrm,
        spec,
        "saliences are unique up to uniform scaling; reported with Σ s_x = 1",
        &opts.tol,
    )
}

/// Revealed nests with the cross-nest weights anchored at the first item of
/// the first two nests.
pub fn identify_nsc(scc: &Scc, opts: &CheckOptions) -> Result<RecoveryResult> {
    let nests = preconditions_nsc(scc, opts)?;
    let anchors = (nests.len() > 1).then(|| (nests[0].first().unwrap(), nests[1].first().unwrap()));
    nsc_from(scc, opts, nests, anchors)
}

/// Same construction with caller-chosen anchors `a` and `b`, which must sit in
/// different revealed nests.
pub fn identify_nsc_with_anchors(scc: &Scc, opts: &CheckOptions, a: usize, b: usize) -> Result<RecoveryResult> {
    let nests = preconditions_nsc(scc, opts)?;
    let home = |x: usize| nests.iter().position(|n| n.contains(x));
    match (home(a), home(b)) {
        (Some(i), Some(j)) if i != j => nsc_from(scc, opts, nests, Some((a, b))),
        _ => Err(Error::InvalidParams("anchors must lie in two different nests".into())),
    }
}

fn preconditions_nsc(scc: &Scc, opts: &CheckOptions) -> Result<Vec<Mask>> {
    require_variant(scc, AxiomId::Piis, false)?;
    require(scc, &[AxiomId::Piis, AxiomId::Partition, AxiomId::Pos4], opts)?;
    derive_revealed_nests(scc, &opts.tol)
}

fn nsc_from(scc: &Scc, opts: &CheckOptions, nests: Vec<Mask>, anchors: Option<(usize, usize)>) -> Result<RecoveryResult> {
    let mut sigma = BTreeMap::new();
    let note = match anchors {
        None => {
            for t in scc.grand_set().nonempty_subsets() {
                sigma.insert(t, Prob::one(Mode::Exact));
            }
            "a single nest: every σ gives the same data; reported as σ ≡ 1".to_string()
        }
        Some((a, b)) => {
            let (sa, sb) = (Mask::singleton(a), Mask::singleton(b));
            // σ(T)/σ({z}) read off the menu T ∪ {z}.
            let relative = |t: Mask, z: Mask| {
                let menu = t.union(z);
                &scc.get(t, menu) / &scc.get(z, menu)
            };
            let pair = sa.union(sb);
            let bridge = &scc.get(sb, pair) / &scc.get(sa, pair);
            for nest in &nests {
                let own = nest.contains(a);
                for t in nest.nonempty_subsets() {
                    let value = if own {
                        &relative(t, sb) * &bridge
                    } else {
                        relative(t, sa)
                    };
                    sigma.insert(t, value);
                }
            }
            let u = scc.universe();
            format!(
                "σ is unique up to uniform scaling; anchored at σ({{{}}}) = 1 via {}",
                u.label(a),
                u.label(b)
            )
        }
    };
    let spec = ModelSpec::standard(ModelParams::Nsc(NscParams { nests, sigma }));
    finish(scc, ModelTag::Nsc, spec, &note, &opts.tol)
}

/// Dispatch by model tag. Attribute-based models and nested logit are not
/// identified directly: use `rcg` and `nsc` for their datasets.
pub fn identify(scc: &Scc, model: ModelTag, opts: &CheckOptions) -> Result<RecoveryResult> {
    match model {
        ModelTag::Logit => identify_logit(scc, opts),
        ModelTag::Rcg => identify_rcg(scc, scc.allows_empty(), opts),
        ModelTag::Ic => identify_ic(scc, scc.allows_empty(), opts),
        ModelTag::Rrm => identify_rrm(scc, opts),
        ModelTag::Nsc => identify_nsc(scc, opts),
        other => Err(Error::InvalidParams(format!(
            "no direct identification for {other}; identify as rcg or nsc instead"
        ))),
    }
}

/// Tries ic, logit, rrm, nsc and rcg in that order (only the three models with
/// an empty-collection variant when the dataset allows it). Returns the first
/// success, or the last failure.
pub fn identify_auto(scc: &Scc, opts: &CheckOptions) -> Result<RecoveryResult> {
    let order: &[ModelTag] = if scc.allows_empty() {
        &[ModelTag::Ic, ModelTag::Logit, ModelTag::Rcg]
    } else {
        &[ModelTag::Ic, ModelTag::Logit, ModelTag::Rrm, ModelTag::Nsc, ModelTag::Rcg]
    };
    let mut last = None;
    for &model in order {
        match identify(scc, model, opts) {
            Ok(r) => return Ok(r),
            Err(e @ (Error::PreconditionFailed(_) | Error::RoundTripFailed | Error::InvalidParams(_))) => {
                last = Some(e)
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one model tried"))
}

/// Regenerates from the recovered parameters and compares with the dataset.
pub fn round_trip_verify(scc: &Scc, result: &RecoveryResult, tol: &ToleranceConfig) -> bool {
    match generate_scc(&result.spec, scc.universe()) {
        Ok(regenerated) => regenerated.equivalent(scc, tol),
        Err(_) => false,
    }
}
