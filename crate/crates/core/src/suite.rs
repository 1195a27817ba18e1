//! The full verification suite: every claim checked by the crate, grouped into numbered
//! criteria, each producing [`DesignReport`] records.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_complex::Complex64 as C64;

use crate::clifford::{
    a6_preimage_potentials, frame_potential_fixed_points, key_step_sweep, restricted_frame_potential, sample_positions,
    CliffordGroup, Rational,
};
use crate::covariance::{contradiction_flag, covariant_basis_search, is_covariant, triple_products, OperatorBasis, PhasePointBasis};
use crate::designs::{
    design_strength, fmt_sig, frame_potential_group, frame_potential_orbit_count, gamma, min_3design_size, projective_design_check,
    twirl_commutant_check, DesignReport,
};
use crate::error::{Error, Result};
use crate::ffield::prime_power;
use crate::groups::{derived_subgroup, orbits, point_stabilizer, primitivity, subgroup_scan, transitivity_rank, GroupTable};
use crate::linalg::seeded_rng;
use crate::stabilizer::{clifford_orbit, enumerate_stabilizer_states};
use crate::symplectic::{antiflag_transitive, sl2q_embedding, NonzeroVectorAction, SpGroup, SympMatrix};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Dimensions covered by the fixed-point path.
pub const FIXED_POINT_DIMS: [u32; 6] = [2, 3, 4, 5, 8, 9];
/// Dimensions small enough for dense unitary enumeration.
pub const DIRECT_DIMS: [u32; 4] = [2, 3, 4, 5];

const POTENTIAL_TOL: f64 = 1e-6;
const KEY_STEP_SAMPLES: usize = 1000;
const TWIRL_TOL: f64 = 1e-8;
const WITNESS_FLOOR: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, cache_dir: None, threads: None }
    }
}

/// Lazily enumerated groups, shared by all criteria of one run, plus the raw bits of every
/// floating-point value reported.
pub struct Context {
    seed: u64,
    cache_dir: Option<PathBuf>,
    sp: Mutex<BTreeMap<(u32, u32), Arc<SpGroup>>>,
    clifford: Mutex<BTreeMap<(u32, u32), Arc<CliffordGroup>>>,
    raw: Mutex<Vec<u64>>,
}

impl Context {
    pub fn new(seed: u64, cache_dir: Option<PathBuf>) -> Self {
        Self { seed, cache_dir, sp: Mutex::default(), clifford: Mutex::default(), raw: Mutex::default() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.cache_dir.as_deref()
    }

    pub fn sp(&self, p: u32, n: u32) -> Result<Arc<SpGroup>> {
        let mut map = self.sp.lock().expect("poisoned");
        if let Some(g) = map.get(&(p, n)) {
            return Ok(g.clone());
        }
        let g = Arc::new(SpGroup::load_or_enumerate(p, n, self.cache_dir())?);
        map.insert((p, n), g.clone());
        Ok(g)
    }

    pub fn clifford(&self, p: u32, n: u32) -> Result<Arc<CliffordGroup>> {
        let mut map = self.clifford.lock().expect("poisoned");
        if let Some(g) = map.get(&(p, n)) {
            return Ok(g.clone());
        }
        let g = Arc::new(CliffordGroup::load_or_enumerate(p, n, self.cache_dir())?);
        map.insert((p, n), g.clone());
        Ok(g)
    }

    fn record(&self, v: f64) -> f64 {
        self.raw.lock().expect("poisoned").push(v.to_bits());
        v
    }

    pub fn raw_values(&self) -> Vec<u64> {
        self.raw.lock().expect("poisoned").clone()
    }

    fn sub_seed(&self, k: u64) -> u64 {
        self.seed.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

pub fn split_dimension(d: u32) -> Result<(u32, u32)> {
    prime_power(d).ok_or_else(|| Error::Domain(format!("{d} is not a prime power")))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub reports: Vec<DesignReport>,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(|r| r.pass)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub criteria: Vec<CriterionResult>,
    pub raw: Vec<u64>,
}

impl SuiteOutcome {
    pub fn pass(&self) -> bool {
        self.criteria.iter().all(CriterionResult::pass)
    }

    pub fn reports(&self) -> impl Iterator<Item = &DesignReport> {
        self.criteria.iter().flat_map(|c| &c.reports)
    }

    /// Same reports up to runtime, and bit-identical floating-point values.
    pub fn same_outcome(&self, other: &Self) -> bool {
        self.raw == other.raw
            && self.criteria.len() == other.criteria.len()
            && self.criteria.iter().zip(&other.criteria).all(|(a, b)| {
                a.id == b.id && a.reports.len() == b.reports.len() && a.reports.iter().zip(&b.reports).all(|(x, y)| x.same_outcome(y))
            })
    }
}

pub const TITLES: [&str; 14] = [
    "second frame potential of the Clifford group",
    "third frame potential of the Clifford group",
    "fourth frame potential of the Clifford group",
    "Clifford design verdicts",
    "restricted Clifford closed form",
    "fixed-point key step",
    "suborbit lengths of point stabilizers",
    "rank-3 subgroup scan of Sp(4,2)",
    "divisibility arithmetic at n=3",
    "small 3-design subgroups",
    "stabilizer states and Clifford orbits",
    "no covariant operator basis",
    "twirl commutant",
    "determinism",
];

type CriterionFn = fn(&Context) -> Result<Vec<DesignReport>>;

const CRITERIA: [CriterionFn; 13] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9,
    criterion_10, criterion_11, criterion_12, criterion_13,
];

fn in_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs one criterion. Criterion 14 reruns the whole suite and is available through
/// [`verify_all`] only.
pub fn run_criterion(ctx: &Context, id: u32) -> Result<CriterionResult> {
    let f = CRITERIA.get((id as usize).wrapping_sub(1)).ok_or_else(|| Error::Domain(format!("no criterion {id}")))?;
    let start = Instant::now();
    let reports = f(ctx)?;
    let ms = start.elapsed().as_millis() as u64;
    let seed = ctx.seed;
    Ok(CriterionResult {
        id,
        title: TITLES[id as usize - 1].to_string(),
        reports: reports
            .into_iter()
            .map(|r| {
                let r = r.with_runtime(ms);
                if r.seed.is_some() { r } else { r.with_seed(seed) }
            })
            .collect(),
    })
}

/// Criteria 1 to 13 under `config`.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    in_pool(config.threads, || {
        let ctx = Context::new(config.seed, config.cache_dir.clone());
        let criteria = (1..=13).map(|id| run_criterion(&ctx, id)).collect::<Result<Vec<_>>>()?;
        Ok(SuiteOutcome { criteria, raw: ctx.raw_values() })
    })?
}

/// Criteria 1 to 13, then criterion 14: two reruns, one single-threaded into an empty
/// cache directory and one on eight threads reading that cache, both compared with the
/// first run.
pub fn verify_all(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut main = run_suite(config)?;
    let start = Instant::now();
    let scratch = scratch_dir(config.seed)?;
    let rerun = |threads| run_suite(&SuiteConfig { seed: config.seed, cache_dir: Some(scratch.clone()), threads: Some(threads) });
    let cold = rerun(1);
    let cache_files = std::fs::read_dir(&scratch).map(|d| d.count()).unwrap_or(0);
    let warm = rerun(8);
    std::fs::remove_dir_all(&scratch).ok();
    let (cold, warm) = (cold?, warm?);
    let ms = start.elapsed().as_millis() as u64;
    let reports = vec![
        DesignReport::new("determinism", "1 thread, cold cache", "vs first run", cold.same_outcome(&main), true, cold.same_outcome(&main)),
        DesignReport::new("determinism", "8 threads, warm cache", "vs cold run", warm.same_outcome(&cold), true, warm.same_outcome(&cold)),
        DesignReport::exact("determinism", "cache files written", "cold run", cache_files > 0, true),
        DesignReport::exact("determinism", "floating-point values compared bitwise", "count", cold.raw.len(), main.raw.len()),
    ];
    main.criteria.push(CriterionResult {
        id: 14,
        title: TITLES[13].to_string(),
        reports: reports.into_iter().map(|r| r.with_seed(config.seed).with_runtime(ms)).collect(),
    });
    Ok(main)
}

fn scratch_dir(seed: u64) -> Result<PathBuf> {
    let nanos = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_nanos());
    let dir = std::env::temp_dir().join(format!("tdesign-{}-{seed}-{nanos}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Clifford,
    Restricted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    FixedPoints,
    Orbits,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::FixedPoints => "fixed-points",
            Method::Orbits => "orbits",
        }
    }
}

/// A frame potential together with its Haar value, when known.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialValue {
    pub exact: Option<Rational>,
    pub approx: f64,
    pub gamma: Option<u128>,
}

impl PotentialValue {
    pub fn display(&self) -> String {
        match self.exact {
            Some(r) => r.to_string(),
            None => fmt_sig(self.approx),
        }
    }

    /// `Some(true)` iff the value attains `γ`; `None` when `γ` is unknown.
    pub fn is_design(&self) -> Option<bool> {
        let g = self.gamma?;
        Some(match self.exact {
            Some(r) => r == Rational::from(g),
            None => (self.approx - g as f64).abs() <= POTENTIAL_TOL * (g as f64).max(1.0),
        })
    }

    pub fn verdict(&self, t: u32) -> String {
        match self.is_design() {
            Some(true) => format!("{t}-design: yes"),
            Some(false) => format!("{t}-design: no"),
            None => "undetermined (γ unknown)".to_string(),
        }
    }
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `Φ_t` of the Clifford or restricted Clifford group in dimension `d` by one method.
pub fn frame_potential(ctx: &Context, d: u32, t: u32, group: GroupKind, method: Method) -> Result<PotentialValue> {
    if t == 0 {
        return Err(Error::Domain("t must be positive".into()));
    }
    let (p, n) = split_dimension(d)?;
    let gamma = gamma(t, d as u64).ok();
    let exact = match (group, method) {
        (GroupKind::Clifford, Method::Direct) => {
            if d > 5 {
                return Err(Error::SizeLimit { what: format!("direct unitary sum in dimension {d}"), limit: 5 });
            }
            let g = ctx.clifford(p, n)?;
            let v = ctx.record(frame_potential_group(&g.unitaries(), t, ctx.sub_seed(1000 + d as u64))?);
            return Ok(PotentialValue { exact: None, approx: v, gamma });
        }
        (GroupKind::Clifford, Method::FixedPoints) => frame_potential_fixed_points(ctx.sp(p, n)?.table().elements(), t)?,
        (GroupKind::Clifford, Method::Orbits) => Rational::from(frame_potential_orbit_count(ctx.sp(p, n)?.table(), t)? as u128),
        (GroupKind::Restricted, Method::FixedPoints) => restricted_frame_potential(d, t)?.explicit,
        (GroupKind::Restricted, Method::Orbits) => {
            let image = sl2q_embedding(d)?.embed()?;
            let table = GroupTable::closure(format!("SL(2,{d})"), image, usize::MAX)?;
            Rational::from(frame_potential_orbit_count(&table, t)? as u128)
        }
        (GroupKind::Restricted, Method::Direct) => {
            return Err(Error::Unsupported("the restricted group is only available through its symplectic image".into()))
        }
    };
    Ok(PotentialValue { exact: Some(exact), approx: to_f64(exact), gamma })
}

fn potential_report(ctx: &Context, claim: &str, d: u32, t: u32, method: Method, expected: u128) -> Result<DesignReport> {
    let v = frame_potential(ctx, d, t, GroupKind::Clifford, method)?;
    let params = format!("d={d} t={t}");
    Ok(match v.exact {
        Some(r) => DesignReport::exact(claim, method.name(), params, r, Rational::from(expected)),
        None => DesignReport::numeric(claim, method.name(), params, v.approx, expected as f64, POTENTIAL_TOL),
    })
}

fn criterion_1(ctx: &Context) -> Result<Vec<DesignReport>> {
    let mut out = Vec::new();
    for d in DIRECT_DIMS {
        out.push(potential_report(ctx, "Phi_2(Clifford)", d, 2, Method::Direct, 2)?);
    }
    for d in FIXED_POINT_DIMS {
        out.push(potential_report(ctx, "Phi_2(Clifford)", d, 2, Method::FixedPoints, 2)?);
    }
    Ok(out)
}

fn criterion_2(ctx: &Context) -> Result<Vec<DesignReport>> {
    let mut out = Vec::new();
    for (d, want) in [(2, 5), (3, 7), (4, 6), (5, 11), (8, 6), (9, 8)] {
        if DIRECT_DIMS.contains(&d) {
            out.push(potential_report(ctx, "Phi_3(Clifford)", d, 3, Method::Direct, want)?);
        }
        out.push(potential_report(ctx, "Phi_3(Clifford)", d, 3, Method::FixedPoints, want)?);
        out.push(potential_report(ctx, "Phi_3(Clifford)", d, 3, Method::Orbits, want)?);
    }
    Ok(out)
}

fn criterion_3(ctx: &Context) -> Result<Vec<DesignReport>> {
    let mut out = Vec::new();
    for (d, want) in [(2, 15), (3, 40), (4, 29), (8, 30), (9, 79)] {
        if DIRECT_DIMS.contains(&d) {
            out.push(potential_report(ctx, "Phi_4(Clifford)", d, 4, Method::Direct, want)?);
        }
        out.push(potential_report(ctx, "Phi_4(Clifford)", d, 4, Method::FixedPoints, want)?);
        out.push(potential_report(ctx, "Phi_4(Clifford)", d, 4, Method::Orbits, want)?);
    }
    Ok(out)
}

/// Largest `t ≤ 4` for which the Clifford group in dimension `d` is a unitary `t`-design.
pub fn clifford_design_strength(ctx: &Context, d: u32) -> Result<u32> {
    let (p, n) = split_dimension(d)?;
    let sp = ctx.sp(p, n)?;
    design_strength(d as u64, 4, |t| frame_potential_fixed_points(sp.table().elements(), t))
}

fn criterion_4(ctx: &Context) -> Result<Vec<DesignReport>> {
    FIXED_POINT_DIMS
        .iter()
        .map(|&d| {
            let want = if d.is_power_of_two() { 3 } else { 2 };
            let s = clifford_design_strength(ctx, d)?;
            Ok(DesignReport::exact("Clifford design strength", "fixed-points", format!("d={d}"), s, want))
        })
        .collect()
}

fn criterion_5(ctx: &Context) -> Result<Vec<DesignReport>> {
    let _ = ctx;
    let mut out = Vec::new();
    for q in [2u32, 3, 4, 5, 8, 9] {
        for t in 2..=4 {
            let r = restricted_frame_potential(q, t)?;
            let params = format!("q={q} t={t}");
            out.push(DesignReport::exact("restricted closed form", "SL(2,q) sum", params.clone(), r.explicit, r.closed_form));
            out.push(DesignReport::exact("restricted closed form", "Sp image sum", params, r.embedded, r.closed_form));
        }
        let is_3 = (2..=3).try_fold(true, |acc, t| {
            Ok::<_, Error>(acc && restricted_frame_potential(q, t)?.explicit == Rational::from(gamma(t, q as u64)?))
        })?;
        out.push(DesignReport::exact("restricted 3-design", "SL(2,q) sum", format!("q={q}"), is_3, q == 2));
    }
    Ok(out)
}

fn criterion_6(ctx: &Context) -> Result<Vec<DesignReport>> {
    let mut out = Vec::new();
    for (p, n, sampled) in [(2, 1, false), (3, 1, false), (2, 2, true)] {
        let g = ctx.clifford(p, n)?;
        let positions = if sampled {
            sample_positions(g.order(), KEY_STEP_SAMPLES, ctx.sub_seed(600))
        } else {
            (0..g.order()).collect()
        };
        let (checked, failure) = key_step_sweep(&g, &positions)?;
        let method = if sampled { "seeded sample" } else { "all elements" };
        let value = match &failure {
            None => format!("{checked} of {checked}"),
            Some((i, r)) => format!("element {i} fails: {} nonzero, expected {}, deviation {}", r.nonzero, r.expected_nonzero, fmt_sig(r.max_deviation)),
        };
        let mut rep = DesignReport::new("|tr(U D)|^2 in {0, f(F)}", method, format!("d={}", g.d()), value, format!("{checked} of {checked}"), failure.is_none());
        if sampled {
            rep = rep.with_seed(ctx.sub_seed(600));
        }
        out.push(rep);
    }
    Ok(out)
}

/// Orbit lengths of a point stabilizer of `Sp(2n, 2)` on nonzero vectors, without the fixed
/// point, and the rank of the action.
pub fn suborbit_lengths(ctx: &Context, n: u32) -> Result<(Vec<usize>, usize)> {
    let sp = ctx.sp(2, n)?;
    let action = NonzeroVectorAction::new(2, n);
    let stab = point_stabilizer(sp.table(), &action, 0)?;
    let mut sizes = orbits(&stab, &action)?.size_multiset();
    let pos = sizes.iter().position(|&s| s == 1).ok_or_else(|| Error::Consistency("stabilizer moves its point".into()))?;
    sizes.remove(pos);
    Ok((sizes, transitivity_rank(sp.table(), &action)?))
}

fn criterion_7(ctx: &Context) -> Result<Vec<DesignReport>> {
    let mut out = Vec::new();
    for (n, want) in [(2, vec![6usize, 8]), (3, vec![30, 32])] {
        let (sizes, rank) = suborbit_lengths(ctx, n)?;
        out.push(DesignReport::exact("suborbit lengths", "point stabilizer orbits", format!("Sp({},2)", 2 * n), format!("{sizes:?}"), format!("{want:?}")));
        out.push(DesignReport::exact("rank on nonzero vectors", "point stabilizer orbits", format!("Sp({},2)", 2 * n), rank, 3));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rank3Scan {
    pub subgroups: usize,
    /// Orders of proper transitive subgroups of rank 3.
    pub rank3_orders: Vec<usize>,
    pub perfect: bool,
    pub is_derived_subgroup: bool,
    pub primitive: bool,
    pub antiflag_transitive: bool,
}

/// Scans all subgroups of `Sp(4, 2)` for proper transitive rank-3 actions on nonzero
/// vectors and examines the first one found.
pub fn rank3_scan(ctx: &Context) -> Result<Rank3Scan> {
    let sp = ctx.sp(2, 2)?;
    let action = NonzeroVectorAction::new(2, 2);
    let mut nodes = subgroup_scan(sp.table(), sp.order() - 1)?;
    for node in &mut nodes {
        node.annotate(sp.table(), &action)?;
    }
    let hits: Vec<_> = nodes.iter().filter(|h| h.rank == Some(3)).collect();
    let rank3_orders = hits.iter().map(|h| h.order).collect();
    let (mut perfect, mut is_derived, mut primitive, mut antiflag) = (false, false, false, false);
    if let Some(h) = hits.first() {
        let table = h.to_table(sp.table(), "H")?;
        perfect = derived_subgroup(&table)?.order() == table.order();
        let derived = derived_subgroup(sp.table())?;
        let set = |g: &GroupTable<SympMatrix>| g.elements().iter().cloned().collect::<BTreeSet<_>>();
        is_derived = set(&derived) == set(&table);
        primitive = primitivity(&table, &action)?.primitive;
        antiflag = antiflag_transitive(&table)?;
    }
    Ok(Rank3Scan {
        subgroups: nodes.len() + 1,
        rank3_orders,
        perfect,
        is_derived_subgroup: is_derived,
        primitive,
        antiflag_transitive: antiflag,
    })
}

fn criterion_8(ctx: &Context) -> Result<Vec<DesignReport>> {
    let s = rank3_scan(ctx)?;
    let m = "subgroup scan";
    Ok(vec![
        DesignReport::exact("proper transitive rank-3 subgroups", m, "Sp(4,2)", s.rank3_orders.len(), 1),
        DesignReport::exact("order", m, "Sp(4,2)", s.rank3_orders.first().copied().unwrap_or(0), 360),
        DesignReport::exact("perfect", m, "Sp(4,2)", s.perfect, true),
        DesignReport::exact("equals the derived subgroup", m, "Sp(4,2)", s.is_derived_subgroup, true),
        DesignReport::exact("primitive", m, "Sp(4,2)", s.primitive, true),
        DesignReport::exact("antiflag transitive", m, "Sp(4,2)", s.antiflag_transitive, true),
    ])
}

/// `2^{2n−1}(2^{2n−2} − 1)(2^{2n} − 1)`.
pub fn rank3_divisor(n: u32) -> u128 {
    (1u128 << (2 * n - 1)) * ((1u128 << (2 * n - 2)) - 1) * ((1u128 << (2 * n)) - 1)
}

fn criterion_9(ctx: &Context) -> Result<Vec<DesignReport>> {
    let _ = ctx;
    let d = rank3_divisor(3);
    Ok(vec![
        DesignReport::exact("2^{2n-1}(2^{2n-2}-1)(2^{2n}-1)", "integer arithmetic", "n=3", d, 30240),
        DesignReport::exact("divides 6048", "integer arithmetic", "n=3", 6048 % d == 0, false),
        DesignReport::exact("divides 12096", "integer arithmetic", "n=3", 12096 % d == 0, false),
    ])
}

/// `Φ_3` of every proper subgroup of the projective qubit Clifford group, computed from
/// `|tr U|²`, which is an integer for Clifford unitaries.
pub fn qubit_subgroup_potentials(ctx: &Context) -> Result<Vec<(usize, Rational)>> {
    let g = ctx.clifford(2, 1)?;
    let sq: Vec<u128> = g
        .table()
        .elements()
        .iter()
        .map(|e| {
            let v = e.unitary().trace().norm_sqr();
            let r = v.round();
            if (v - r).abs() > POTENTIAL_TOL {
                return Err(Error::Consistency(format!("|tr U|^2 = {v} is not an integer")));
            }
            Ok(r as u128)
        })
        .collect::<Result<_>>()?;
    subgroup_scan(g.table(), g.order() - 1)?
        .iter()
        .map(|h| {
            let total: u128 = h.elements.iter().map(|&i| sq[i].pow(3)).sum();
            Ok((h.order, Rational::new(total, h.order as u128)))
        })
        .collect()
}

fn criterion_10(ctx: &Context) -> Result<Vec<DesignReport>> {
    let a6 = a6_preimage_potentials(&*ctx.sp(2, 2)?)?;
    let phi3 = a6.potentials.iter().find(|(t, _)| *t == 3).map(|(_, v)| *v).unwrap_or_default();
    let scan = qubit_subgroup_potentials(ctx)?;
    let attaining = scan.iter().filter(|(_, v)| *v == Rational::from(5)).count();
    let min = scan.iter().map(|(_, v)| *v).min().unwrap_or_default();
    Ok(vec![
        DesignReport::exact("Phi_3 of the A6 preimage", "fixed-points", "d=4", phi3, Rational::from(6)),
        DesignReport::exact("A6 preimage order", "d^2 |R|", "d=4", a6.preimage_order, 5760),
        DesignReport::exact("preimage order >= minimal 3-design size", "comparison", "d=4", a6.preimage_order >= min_3design_size(4), true),
        DesignReport::exact("minimal 3-design size", "closed form", "d=4", min_3design_size(4), 1712),
        DesignReport::exact("proper subgroups with Phi_3 = 5", "subgroup scan", format!("d=2, {} subgroups", scan.len()), attaining, 0),
        DesignReport::new("smallest Phi_3 over proper subgroups", "subgroup scan", "d=2", min, "> 5", min > Rational::from(5)),
        DesignReport::exact("24 >= minimal 3-design size", "closed form", "d=2", 24 >= min_3design_size(2), true),
        DesignReport::exact("minimal 3-design size", "closed form", "d=2", min_3design_size(2), 20),
    ])
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn criterion_11(ctx: &Context) -> Result<Vec<DesignReport>> {
    let mut out = Vec::new();
    for (n, count) in [(1u32, 6usize), (2, 60), (3, 1080)] {
        let d = 1u64 << n;
        let states: Vec<Vec<C64>> = enumerate_stabilizer_states(2, n)?.into_iter().map(|s| s.vector).collect();
        out.push(DesignReport::exact("stabilizer states", "Lagrangians x signs", format!("n={n}"), states.len(), count));
        let r = projective_design_check(&states, 3)?;
        ctx.record(r.frobenius_error);
        out.push(DesignReport::new(
            "symmetric-projector check",
            "t=3",
            format!("n={n}"),
            fmt_sig(r.frobenius_error / r.states as f64),
            "<= 1e-8",
            r.pass,
        ));
        let want = 1.0 / binomial(d + 2, 3);
        let v = ctx.record(r.frame_potential);
        out.push(DesignReport::new(
            "projective frame potential",
            "t=3",
            format!("n={n}"),
            fmt_sig(v),
            fmt_sig(want),
            (v - want).abs() <= 1e-10 * want,
        ));
    }
    let qutrit: Vec<Vec<C64>> = enumerate_stabilizer_states(3, 1)?.into_iter().map(|s| s.vector).collect();
    for (t, want) in [(2, true), (3, false)] {
        let r = projective_design_check(&qutrit, t)?;
        ctx.record(r.frobenius_error);
        out.push(DesignReport::exact("qutrit stabilizer design", format!("t={t}"), "12 states", r.pass, want));
    }
    for (p, n) in [(2, 1), (2, 2)] {
        let g = ctx.clifford(p, n)?;
        for k in 0..5 {
            let seed = ctx.sub_seed(1100 + k);
            let psi = crate::linalg::haar_state(g.d(), &mut seeded_rng(seed));
            let orbit = clifford_orbit(&g, &psi);
            let r = projective_design_check(&orbit, 3)?;
            ctx.record(r.frobenius_error);
            ctx.record(r.frame_potential);
            out.push(
                DesignReport::exact("Clifford orbit of a random state", "t=3", format!("d={} orbit={}", g.d(), orbit.len()), r.pass, true)
                    .with_seed(seed),
            );
        }
    }
    Ok(out)
}

fn criterion_12(ctx: &Context) -> Result<Vec<DesignReport>> {
    let g3 = ctx.clifford(3, 1)?;
    let pp = PhasePointBasis::new(3)?.basis;
    let cov3 = is_covariant(&pp, &g3.unitaries())?;
    let tp = triple_products(&pp);
    let g2 = ctx.clifford(2, 1)?;
    let seed = ctx.sub_seed(1200);
    let search2 = covariant_basis_search(&g2, 16, seed)?;
    let search3 = covariant_basis_search(&g3, 4, seed)?;

    // every (group, basis) pair examined, with the group's 3-design verdict
    let mut scenarios: Vec<(bool, bool)> = Vec::new();
    let strength = |d| clifford_design_strength(ctx, d);
    scenarios.push((strength(2)? >= 3, search2.found()));
    scenarios.push((strength(3)? >= 3, cov3.covariant()));
    scenarios.push((strength(3)? >= 3, search3.found()));
    for (p, n) in [(2, 1), (2, 2)] {
        let g = ctx.clifford(p, n)?;
        let cov = is_covariant(&OperatorBasis::displacements(p, n)?, &g.unitaries())?;
        scenarios.push((strength(g.d() as u32)? >= 3, cov.covariant()));
    }
    let fired = scenarios.iter().filter(|(a, b)| contradiction_flag(*a, *b)).count();

    Ok(vec![
        DesignReport::exact("phase-point basis covariant and transitive", "conjugation matching", "d=3", cov3.covariant() && cov3.exact, true),
        DesignReport::exact("phase-point triple products all real", "clustered traces", "d=3", tp.all_real, false),
        DesignReport::exact("index-4 subgroups searched", "subgroup scan", "d=2", search2.subgroups, 4),
        DesignReport::exact("covariant basis found", "fixed-space orbits", "d=2", search2.found(), false).with_seed(seed),
        DesignReport::exact("covariant basis found (control)", "fixed-space orbits", "d=3", search3.found(), true).with_seed(seed),
        DesignReport::exact("contradiction flags fired", "3-design and covariant", format!("{} scenarios", scenarios.len()), fired, 0),
    ])
}

fn criterion_13(ctx: &Context) -> Result<Vec<DesignReport>> {
    let mut out = Vec::new();
    for (p, n) in [(2, 1), (2, 2)] {
        let g = ctx.clifford(p, n)?;
        let seed = ctx.sub_seed(1300 + g.d() as u64);
        let r = twirl_commutant_check(&g, 3, 5, 20, seed);
        let v = ctx.record(r.max_defect);
        out.push(
            DesignReport::new("twirl commutes with V^{x3}", "factored twirl", format!("d={} t=3", g.d()), fmt_sig(v), "<= 1e-8", v <= TWIRL_TOL)
                .with_seed(seed),
        );
    }
    let g3 = ctx.clifford(3, 1)?;
    let seed = twirl_witness_seed(ctx.seed);
    let v = ctx.record(twirl_witness(&g3, seed));
    out.push(
        DesignReport::new("twirl fails to commute", "factored twirl", "d=3 t=3", fmt_sig(v), ">= 1e-3", v >= WITNESS_FLOOR).with_seed(seed),
    );
    Ok(out)
}

pub fn twirl_witness_seed(base: u64) -> u64 {
    Context::new(base, None).sub_seed(1303)
}

/// Commutant defect of one seeded operator against one seeded Haar unitary at `t = 3`.
pub fn twirl_witness(group: &CliffordGroup, seed: u64) -> f64 {
    twirl_commutant_check(group, 3, 1, 1, seed).max_defect
}

/// Enumerates every group used by the suite into `dir`, replacing existing cache files.
pub fn rebuild_cache(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for d in FIXED_POINT_DIMS {
        let (p, n) = split_dimension(d)?;
        let path = dir.join(SpGroup::cache_file_name(p, n));
        SpGroup::enumerate(p, n)?.write_cache(&path)?;
        written.push(path);
    }
    for d in DIRECT_DIMS {
        let (p, n) = split_dimension(d)?;
        let path = dir.join(CliffordGroup::cache_file_name(p, n));
        CliffordGroup::enumerate(p, n)?.write_cache(&path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_arithmetic() {
        assert_eq!(rank3_divisor(2), 8 * 3 * 15);
        assert_eq!(rank3_divisor(3), 30240);
    }

    #[test]
    fn potential_methods_agree_at_small_dimensions() {
        let ctx = Context::new(1, None);
        for d in [2, 3] {
            for t in 1..=3 {
                let a = frame_potential(&ctx, d, t, GroupKind::Clifford, Method::FixedPoints).unwrap();
                let b = frame_potential(&ctx, d, t, GroupKind::Clifford, Method::Orbits).unwrap();
                let c = frame_potential(&ctx, d, t, GroupKind::Clifford, Method::Direct).unwrap();
                assert_eq!(a.exact, b.exact);
                assert!((c.approx - a.approx).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn restricted_orbits_match_closed_form() {
        let ctx = Context::new(1, None);
        for q in [2, 3, 4] {
            let a = frame_potential(&ctx, q, 3, GroupKind::Restricted, Method::Orbits).unwrap();
            assert_eq!(a.exact, Some(Rational::from(2 * q as u128 + 1)));
        }
        assert!(frame_potential(&ctx, 9, 3, GroupKind::Restricted, Method::Direct).is_err());
    }

    #[test]
    fn verdicts() {
        let ctx = Context::new(1, None);
        let v = frame_potential(&ctx, 2, 4, GroupKind::Clifford, Method::FixedPoints).unwrap();
        assert_eq!(v.verdict(4), "4-design: no");
        let v = frame_potential(&ctx, 3, 4, GroupKind::Clifford, Method::FixedPoints).unwrap();
        assert_eq!(v.verdict(4), "undetermined (γ unknown)");
    }

    #[test]
    fn qubit_subgroups_fall_short_of_3_designs() {
        let ctx = Context::new(1, None);
        let scan = qubit_subgroup_potentials(&ctx).unwrap();
        assert!(scan.iter().all(|(_, v)| *v > Rational::from(5)));
    }

    #[test]
    fn criterion_ids() {
        let ctx = Context::new(1, None);
        assert!(run_criterion(&ctx, 14).is_err());
        let c9 = run_criterion(&ctx, 9).unwrap();
        assert!(c9.pass());
        assert!(c9.reports.iter().all(|r| r.seed == Some(1)));
    }
}
