//! Fixture builders and seeded experiment suites. Each suite returns one
//! `CheckReport`; the CLI and the acceptance tests call these directly.

use std::sync::Arc;

use rand::Rng;

use crate::bundle::{check_bundle_axioms, ConcreteBundle, FellBundle, FiberElement};
use crate::deaconu::{dr_view, FiniteMap, Graph, LocalSystem};
use crate::error::{input, Result};
use crate::group::GroupElem;
use crate::groupoid::{builders, check_axioms, ArrowId, FiniteGroupoidView, LengthFn, Payload, Point, UnitId};
use crate::growth::{self, classify_growth, Classification, GrowthClass, GrowthTable};
use crate::multiplier::{self, ArrowFunction, TupleConfig};
use crate::partial::{check_partial_action, shift_depth_sample, PartialActionSystem};
use crate::rd::{self, RdWitness};
use crate::reduction;
use crate::report::{CheckReport, CheckRow};
use crate::rng;
use crate::section::{ReducedOptions, Section};
use crate::shift::EvPeriodicPoint;
use crate::{CMat, C64};

/// A groupoid (or a truncation of one) with a length function.
#[derive(Clone, Debug)]
pub enum SystemSpec {
    Pair { n: u32 },
    Cyclic { n: u32 },
    Symmetric { n: u32 },
    /// Ball of the given radius in `Z`.
    Integer { radius: usize },
    FreeBall { rank: u32, radius: usize },
    FullShift { d: u32 },
    Af { k: usize },
    Graph(Graph),
}

impl SystemSpec {
    pub fn local_system(&self) -> Option<LocalSystem> {
        match self {
            SystemSpec::FullShift { d } => Some(LocalSystem::FullShift { d: *d }),
            SystemSpec::Af { k } => Some(LocalSystem::FiniteMap(FiniteMap::af(*k))),
            SystemSpec::Graph(g) => Some(LocalSystem::Graph(g.clone())),
            _ => None,
        }
    }
}

/// An enumerated view with its length function. For dynamical systems the
/// view is a truncation and `sample_units` are the seed points.
pub struct Fixture {
    pub name: String,
    pub view: Arc<FiniteGroupoidView>,
    pub length: LengthFn,
    pub truncated: bool,
    pub sample_units: Option<Vec<UnitId>>,
}

impl Fixture {
    pub fn reduced_options(&self) -> ReducedOptions<'_> {
        ReducedOptions {
            units: self.sample_units.as_deref(),
            ..Default::default()
        }
    }

    pub fn all_arrows(&self) -> Vec<ArrowId> {
        (0..self.view.num_arrows()).collect()
    }

    /// Arrows sourced at the sample units (or all arrows on finite views).
    pub fn section_support(&self) -> Vec<ArrowId> {
        match &self.sample_units {
            None => self.all_arrows(),
            Some(us) => us.iter().flat_map(|u| self.view.source_fiber(*u).iter().copied()).collect(),
        }
    }
}

/// Builds the view for `spec`. `radius` bounds dynamical truncations and
/// `unit_sample` picks their seed points.
pub fn build_fixture(spec: &SystemSpec, radius: usize, unit_sample: usize) -> Result<Fixture> {
    let finite = |view: FiniteGroupoidView, length: fn(&FiniteGroupoidView) -> LengthFn| {
        let length = length(&view);
        Fixture {
            name: view.describe().to_string(),
            view: Arc::new(view),
            length,
            truncated: false,
            sample_units: None,
        }
    };
    Ok(match spec {
        SystemSpec::Pair { n } => finite(builders::pair_groupoid(*n)?, LengthFn::discrete),
        SystemSpec::Cyclic { n } => finite(builders::cyclic(*n)?, LengthFn::word_length),
        SystemSpec::Symmetric { n } => finite(builders::symmetric(*n)?, LengthFn::word_length),
        SystemSpec::Integer { radius } => {
            let mut f = finite(builders::integer_ball(*radius), LengthFn::word_length);
            f.truncated = true;
            f
        }
        SystemSpec::FreeBall { rank, radius } => {
            let mut f = finite(builders::free_ball(*rank, *radius)?, LengthFn::word_length);
            f.truncated = *radius > 0;
            f
        }
        _ => {
            let system = spec.local_system().expect("dynamical spec");
            if unit_sample == 0 {
                return input("unit sample must be positive");
            }
            let seeds = system.sample_points(unit_sample);
            let (view, length, truncated) = dr_view(&system, &seeds, radius)?;
            let ids = seeds.iter().map(|p| view.unit_id(p)).collect::<Result<Vec<_>>>()?;
            Fixture {
                name: view.describe().to_string(),
                view: Arc::new(view),
                length,
                truncated: truncated || !matches!(system, LocalSystem::FiniteMap(_)),
                sample_units: Some(ids),
            }
        }
    })
}

#[derive(Clone, Copy, Debug)]
pub enum BundleSpec {
    Trivial { dim: usize },
    /// Line bundle over `Z/n` twisted by `σ(j,k) = (−1)^{⌊(j+k)/n⌋}`.
    Twisted,
    /// `Ad U` action on `M_dim` over a group view.
    Action { dim: usize },
}

fn group_element(view: &FiniteGroupoidView, a: ArrowId) -> Option<&GroupElem> {
    match view.payload(a) {
        Payload::Group { element, .. } => Some(element),
        _ => None,
    }
}

/// Unitary for an action bundle: characters for cyclic groups, permutation
/// matrices for symmetric groups, and fixed diagonal phases on the
/// generators for free groups.
fn action_unitary(g: &GroupElem, dim: usize) -> CMat {
    match g {
        GroupElem::Mod { k, n } => CMat::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (*k as f64) * (i as f64) / (*n as f64))
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        GroupElem::Perm(p) => CMat::from_fn(dim, dim, |i, j| {
            if p.get(j).is_some_and(|pj| *pj as usize == i) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        GroupElem::Word(w) => {
            let mut u = CMat::identity(dim, dim);
            for l in w.letters() {
                let gen = CMat::from_fn(dim, dim, |i, j| {
                    if i == j {
                        let angle = 0.7 * (l.unsigned_abs() as f64) * (i as f64 + 1.0);
                        C64::from_polar(1.0, angle * l.signum() as f64)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                u *= gen;
            }
            u
        }
    }
}

pub fn build_bundle(fixture: &Fixture, spec: BundleSpec) -> Result<ConcreteBundle> {
    let view = Arc::clone(&fixture.view);
    match spec {
        BundleSpec::Trivial { dim } => ConcreteBundle::trivial(view, dim),
        BundleSpec::Twisted => {
            let v = Arc::clone(&view);
            ConcreteBundle::twisted_line(view, move |a, b| {
                match (group_element(&v, a), group_element(&v, b)) {
                    (Some(GroupElem::Mod { k: j, n }), Some(GroupElem::Mod { k, .. })) if j + k >= *n => {
                        C64::new(-1.0, 0.0)
                    }
                    (Some(GroupElem::Mod { .. }), Some(GroupElem::Mod { .. })) => C64::new(1.0, 0.0),
                    _ => C64::new(1.0, 0.0),
                }
            })
        }
        BundleSpec::Action { dim } => {
            if let Some(GroupElem::Perm(p)) = group_element(&fixture.view, 0) {
                if p.len() != dim {
                    return input(format!("permutation action of S_{} needs dim {}", p.len(), p.len()));
                }
            }
            ConcreteBundle::action(view, dim, |g| action_unitary(g, dim))
        }
    }
}

fn named<'b>(prefix: &str, v: Vec<Section<'b>>) -> Vec<(String, Section<'b>)> {
    v.into_iter().enumerate().map(|(i, s)| (format!("{prefix} #{i:03}"), s)).collect()
}

/// Random sections whose supports vary: even-numbered samples use the full
/// support, odd ones a random unit-closed sub-support.
fn mixed_sections<'b>(bundle: &'b dyn FellBundle, seed: u64, count: usize, prefix: &str) -> Result<Vec<(String, Section<'b>)>> {
    let view = bundle.view();
    let all: Vec<ArrowId> = (0..view.num_arrows()).collect();
    (0..count)
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let support = if i % 2 == 0 { all.clone() } else { rd::random_support(view, &mut r) };
            Ok((format!("{prefix} #{i:03}"), Section::random(bundle, &support, &mut r)?))
        })
        .collect()
}

// ---------------------------------------------------------------- growth

fn zero_point() -> Point {
    Point::Seq(EvPeriodicPoint::constant(0))
}

fn class_name(c: &GrowthClass) -> String {
    match c {
        GrowthClass::Bounded { c } => format!("bounded (c = {c})"),
        GrowthClass::Polynomial { c, d } => format!("polynomial (c = {c:.6}, d = {d})"),
        GrowthClass::Exponential { base } => format!("exponential (base = {base:.6})"),
    }
}

fn record_classification(rep: &mut CheckReport, table: &GrowthTable, cls: &Classification) {
    rep.param("class", cls.class);
    rep.param("max_counts", &cls.max_counts);
    rep.note(format!("classified {}", class_name(&cls.class)));
    if table.any_lower_bound() {
        rep.note("some counts touched a truncation boundary and are lower bounds");
    }
    if cls.certificate().is_some() {
        rep.push(CheckRow::count("certificate", "count(n) <= c(1+n)^d", usize::from(!cls.certificate_holds)));
    }
}

/// Which ball counts a growth table tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthMode {
    Fiber,
    Kernel,
    Preimage,
}

/// Ball counts and classification for a dynamical system or finite view.
pub fn growth_report(spec: &SystemSpec, mode: GrowthMode, radius: usize, unit_sample: usize) -> Result<(CheckReport, GrowthTable, Classification)> {
    let mut rep = CheckReport::new("growth");
    rep.param("radius", radius).param("unit_sample", unit_sample).param("mode", format!("{mode:?}").to_lowercase());
    let table = match spec.local_system() {
        Some(sys) => {
            let units = sys.sample_points(unit_sample);
            rep.system = sys.describe();
            match mode {
                GrowthMode::Fiber => growth::dr_ball_counts(&sys, &units, radius),
                GrowthMode::Kernel => growth::kernel_ball_counts(&sys, &units, radius),
                GrowthMode::Preimage => growth::preimage_counts(&sys, &units, radius),
            }
        }
        None => {
            let fx = build_fixture(spec, radius, unit_sample)?;
            rep.system = fx.name.clone();
            growth::view_ball_counts(&fx.view, &fx.length, radius)
        }
    };
    rep.budget = table.budget.clone();
    let cls = classify_growth(&table)?;
    record_classification(&mut rep, &table, &cls);
    if let (Some(LocalSystem::FullShift { d }), GrowthMode::Fiber) = (spec.local_system(), mode) {
        // |B(N)| ≥ 1 + d + ... + d^N from the backward branches alone
        for row in &table.rows {
            let bound: u64 = (0..=row.radius as u32).map(|i| (d as u64).pow(i)).sum();
            rep.push(CheckRow::leq("backward-lower-bound", format!("{} N={}", row.unit_id, row.radius), bound as f64, row.count as f64, 0.0));
        }
    }
    rep.sort();
    Ok((rep, table, cls))
}

/// Full 2-shift at `0^∞`: `|B(N)| ≥ 2^{N+1} − 1` and an exponential
/// classification with base in `[1.8, 2.2]`.
pub fn cuntz_growth(radius: usize) -> Result<CheckReport> {
    let sys = LocalSystem::FullShift { d: 2 };
    let table = growth::dr_ball_counts(&sys, &[zero_point()], radius);
    let cls = classify_growth(&table)?;
    let mut rep = CheckReport::new("cuntz-growth");
    rep.system = sys.describe();
    rep.budget = table.budget.clone();
    record_classification(&mut rep, &table, &cls);
    for row in &table.rows {
        let bound = 2f64.powi(row.radius as i32 + 1) - 1.0;
        rep.push(CheckRow::leq("lower-bound", format!("N={}", row.radius), bound, row.count as f64, 0.0));
    }
    match cls.class {
        GrowthClass::Exponential { base } => {
            rep.push(CheckRow::leq("base-min", "1.8 <= base", 1.8, base, 0.0));
            rep.push(CheckRow::leq("base-max", "base <= 2.2", base, 2.2, 0.0));
        }
        _ => rep.push(CheckRow::count("exponential", class_name(&cls.class), 1)),
    }
    rep.sort();
    Ok(rep)
}

/// Kernel fiber counts of the full 2-shift at `0^∞`: `|B_R(2N)| = 2^N`.
pub fn kernel_growth(max_n: usize) -> Result<(CheckReport, GrowthTable)> {
    let sys = LocalSystem::FullShift { d: 2 };
    let table = growth::kernel_ball_counts(&sys, &[zero_point()], max_n);
    let mut rep = CheckReport::new("kernel-growth");
    rep.system = sys.describe();
    rep.budget = table.budget.clone();
    for row in &table.rows {
        let expect = 2f64.powi(row.radius as i32);
        rep.push(CheckRow::eq("count", format!("N={}", row.radius), row.count as f64, expect, 0.0));
    }
    rep.sort();
    Ok((rep, table))
}

/// The AF map: `|T^{-N}(a)| = N + 1` and a degree-1 polynomial
/// classification of the preimage table. The Deaconu-Renault fiber table
/// is recorded alongside (its counts are `(N+1)²`).
pub fn af_growth(max_n: usize) -> Result<CheckReport> {
    let sys = LocalSystem::FiniteMap(FiniteMap::af(max_n + 4));
    let a = Point::Index(0);
    let table = growth::preimage_counts(&sys, &[a.clone()], max_n);
    let cls = classify_growth(&table)?;
    let mut rep = CheckReport::new("af-growth");
    rep.system = sys.describe();
    rep.budget = table.budget.clone();
    record_classification(&mut rep, &table, &cls);
    for row in &table.rows {
        rep.push(CheckRow::eq("preimages", format!("N={}", row.radius), row.count as f64, row.radius as f64 + 1.0, 0.0));
    }
    let d = match cls.class {
        GrowthClass::Polynomial { d, .. } => d as f64,
        _ => f64::NAN,
    };
    rep.push(CheckRow::eq("degree", "polynomial d = 1", d, 1.0, 0.0));
    let dr = growth::dr_ball_counts(&sys, &[a], max_n);
    let dr_cls = classify_growth(&dr)?;
    rep.note(format!("dr fiber counts at a: {:?}, {}", dr.max_counts(), class_name(&dr_cls.class)));
    rep.sort();
    Ok(rep)
}

// ---------------------------------------------------------------- norms

fn small_fixtures() -> Vec<SystemSpec> {
    vec![
        SystemSpec::Pair { n: 2 },
        SystemSpec::Pair { n: 3 },
        SystemSpec::Pair { n: 5 },
        SystemSpec::Cyclic { n: 2 },
        SystemSpec::Cyclic { n: 4 },
    ]
}

/// `‖f‖_∞ ≤ ‖f‖_II ≤ ‖f‖_r ≤ ‖f‖_I` on the small finite fixtures with
/// trivial(1) and trivial(2) bundles.
pub fn norm_chain_suite(seed: u64, samples: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("norm-chain");
    rep.seed = seed;
    rep.param("samples", samples);
    for (i, spec) in small_fixtures().iter().enumerate() {
        let fx = build_fixture(spec, 0, 0)?;
        for dim in [1usize, 2] {
            let b = build_bundle(&fx, BundleSpec::Trivial { dim })?;
            let s = mixed_sections(&b, seed ^ ((i as u64) << 8 | dim as u64), samples, "f")?;
            rep.absorb(&format!("{} trivial({dim})", fx.name), rd::norm_chain_check(&s)?);
        }
    }
    rep.sort();
    Ok(rep)
}

/// The polynomial-growth bound `‖f‖_r ≤ √c₁‖f‖_{2,t+2,L}` with the
/// classifier's certificate, on every certified fixture.
pub fn poly_growth_suite(seed: u64, samples: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("poly-growth");
    rep.seed = seed;
    rep.param("samples", samples).param("S", rd::zeta4_bound());
    let specs: Vec<(SystemSpec, usize, BundleSpec)> = vec![
        (SystemSpec::Pair { n: 3 }, 4, BundleSpec::Trivial { dim: 1 }),
        (SystemSpec::Pair { n: 5 }, 4, BundleSpec::Trivial { dim: 2 }),
        (SystemSpec::Cyclic { n: 4 }, 4, BundleSpec::Twisted),
        (SystemSpec::Symmetric { n: 3 }, 4, BundleSpec::Action { dim: 3 }),
        (SystemSpec::Integer { radius: 6 }, 6, BundleSpec::Trivial { dim: 2 }),
        (SystemSpec::Af { k: 10 }, 6, BundleSpec::Trivial { dim: 1 }),
    ];
    for (i, (spec, radius, bspec)) in specs.iter().enumerate() {
        let fx = build_fixture(spec, *radius, 2)?;
        let table = growth::view_ball_counts(&fx.view, &fx.length, *radius);
        let cls = classify_growth(&table)?;
        let Some((c, t)) = cls.certificate() else {
            rep.note(format!("{}: not polynomially certified ({})", fx.name, class_name(&cls.class)));
            continue;
        };
        if !cls.certificate_holds {
            rep.push(CheckRow::count("certificate", fx.name.clone(), 1));
            continue;
        }
        let b = build_bundle(&fx, *bspec)?;
        let support = fx.section_support();
        let secs = named("f", rd::random_sections(&b, &support, seed ^ (i as u64) << 8, samples)?);
        let opts = fx.reduced_options();
        let sub = rd::poly_growth_rd_check(&secs, &fx.length, (c, t), &opts)?;
        rep.note(format!(
            "{} / {}: c = {c:.6}, t = {t}, c1 = {:.6}{}",
            fx.name,
            b.kind_name(),
            rd::c1_constant(c, t),
            if fx.truncated { " (reduced norms are lower bounds)" } else { "" }
        ));
        rep.absorb(&format!("{} {}", fx.name, b.kind_name()), sub);
    }
    rep.sort();
    Ok(rep)
}

/// BHM on random matrix-fiber sections and the operator Cauchy-Schwarz
/// inequality on random positive tuples.
pub fn bhm_suite(seed: u64, samples: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("bhm-cauchy-schwarz");
    rep.seed = seed;
    rep.param("samples", samples);
    let specs: Vec<(SystemSpec, BundleSpec)> = vec![
        (SystemSpec::Pair { n: 3 }, BundleSpec::Trivial { dim: 3 }),
        (SystemSpec::Pair { n: 2 }, BundleSpec::Trivial { dim: 2 }),
        (SystemSpec::Cyclic { n: 4 }, BundleSpec::Action { dim: 2 }),
        (SystemSpec::Symmetric { n: 3 }, BundleSpec::Action { dim: 3 }),
    ];
    for (i, (spec, bspec)) in specs.iter().enumerate() {
        let fx = build_fixture(spec, 0, 0)?;
        let b = build_bundle(&fx, *bspec)?;
        let secs = mixed_sections(&b, seed ^ (i as u64) << 8, samples, "f")?;
        rep.absorb(&format!("{} {}", fx.name, b.describe()), rd::bhm_check(&secs)?);
    }
    rep.absorb("impineq", rd::impineq_check(seed, samples, 3, 5));
    rep.sort();
    Ok(rep)
}

/// The weighted convolution lemma on `Z/2` with witness `(√2, 0)` and on
/// `pair(3)` with witness `(√3, 0)`, plus the weight inequality on the
/// full 2-shift truncation of radius 4.
pub fn convolution_suite(seed: u64, samples: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("weighted-convolution");
    rep.seed = seed;
    rep.param("samples", samples);
    for (i, (spec, c)) in [(SystemSpec::Cyclic { n: 2 }, 2f64.sqrt()), (SystemSpec::Pair { n: 3 }, 3f64.sqrt())]
        .into_iter()
        .enumerate()
    {
        let fx = build_fixture(&spec, 0, 0)?;
        let b = build_bundle(&fx, BundleSpec::Trivial { dim: 1 })?;
        let witness = RdWitness {
            c,
            p: 0.0,
            scope: format!("{} (Cauchy-Schwarz: sqrt of fiber size)", fx.name),
        };
        // the witness itself, on these sections
        let fs = mixed_sections(&b, seed ^ (i as u64) << 8, samples, "f")?;
        let gs = mixed_sections(&b, seed ^ (i as u64) << 8 ^ 0x5555, samples, "g")?;
        let scan = rd::rd_ratio_scan(&fs, &fx.length, 0.0, &ReducedOptions::default())?;
        rep.push(CheckRow::leq("witness", fx.name.clone(), scan.max_ratio, c, 1e-9));
        let pairs: Vec<(String, Section<'_>, Section<'_>)> = fs
            .into_iter()
            .zip(gs)
            .enumerate()
            .map(|(k, ((_, f), (_, g)))| (format!("pair #{k:03}"), f, g))
            .collect();
        for p in [0.0, 1.0, 2.0] {
            rep.absorb(&format!("{} p={p}", fx.name), rd::weighted_conv_check(&pairs, &fx.length, &witness, p)?);
        }
    }
    let (view, len, _) = dr_view(&LocalSystem::FullShift { d: 2 }, &[zero_point()], 4)?;
    let (bad, checked) = rd::weight_inequality_violations(&view, &len);
    rep.push(CheckRow::count("weight-inequality", format!("full 2-shift radius 4, {checked} pairs"), bad));
    rep.sort();
    Ok(rep)
}

// ---------------------------------------------------------------- reduction

fn reduction_pairs<'b>(b: &'b dyn FellBundle, seed: u64, count: usize) -> Result<Vec<(String, Section<'b>, Section<'b>)>> {
    let fs = mixed_sections(b, seed, count, "f")?;
    let hs = mixed_sections(b, seed ^ 0xabcd, count, "h")?;
    Ok(fs
        .into_iter()
        .zip(hs)
        .enumerate()
        .map(|(k, ((_, f), (_, h)))| (format!("pair #{k:03}"), f, h))
        .collect())
}

/// `Φ` on the `Z/2` swap fixture and the `F_2` shift fixture.
pub fn reduction_suite(seed: u64, samples: usize, radius: usize, depth: usize) -> Result<CheckReport> {
    let mut rep = CheckReport::new("reduction");
    rep.seed = seed;
    rep.param("samples", samples).param("radius", radius).param("depth", depth);
    let ps = [0u32, 1, 2, 3];
    let swap = reduction::swap_fixture()?;
    for dim in [1usize, 2] {
        let base = ConcreteBundle::trivial(Arc::clone(&swap.base_view), dim)?;
        let lifted = reduction::lift_to_group_bundle(&base, Arc::clone(&swap.group_view))?;
        let pairs = reduction_pairs(&base, seed ^ dim as u64, samples)?;
        rep.absorb(&format!("{} trivial({dim})", swap.name), reduction::reduction_equivalence_check(&lifted, &pairs, &ps)?);
    }
    let shift = reduction::shift_fixture(radius, depth)?;
    let base = ConcreteBundle::trivial(Arc::clone(&shift.base_view), 1)?;
    let lifted = reduction::lift_to_group_bundle(&base, Arc::clone(&shift.group_view))?;
    let axioms = check_bundle_axioms(&lifted, seed, 10);
    rep.absorb(&format!("{} lifted-axioms", shift.name), axioms);
    // supports in the half ball keep every product inside the view
    let len = LengthFn::word_length(&shift.base_view);
    let half: Vec<ArrowId> = (0..shift.base_view.num_arrows()).filter(|a| 2.0 * len.eval(*a) <= radius as f64).collect();
    let pairs: Vec<(String, Section<'_>, Section<'_>)> = (0..samples.min(25))
        .map(|k| {
            let mut r = rng::stream(seed ^ 0x77, k as u64);
            let f = Section::random(&base, &half, &mut r)?;
            let h = Section::random(&base, &half, &mut r)?;
            Ok((format!("pair #{k:03}"), f, h))
        })
        .collect::<Result<_>>()?;
    rep.absorb(&format!("{} trivial(1)", shift.name), reduction::reduction_equivalence_check(&lifted, &pairs, &ps)?);
    rep.sort();
    Ok(rep)
}

/// `Ψ` bijection, unique cocycle sign, forbidden subwords, and the
/// `Φ∘Ψ*` triangle identity.
pub fn steinberg_suite(radius: usize, depth: usize) -> Result<CheckReport> {
    let (mut rep, _) = reduction::steinberg_report(2, radius, depth);
    let fx = reduction::shift_fixture(radius.min(3), depth.min(5))?;
    let f = |p: &Payload| match p {
        Payload::Deaconu { range, lag, source } => {
            let h = range.to_string().len() as f64 + 0.1 * source.to_string().len() as f64;
            C64::new(*lag as f64, h)
        }
        _ => C64::new(0.0, 0.0),
    };
    let bad = reduction::steinberg_transport_mismatches(&fx, &f)?;
    rep.push(CheckRow::count("triangle", fx.name.clone(), bad));
    rep.sort();
    Ok(rep)
}

/// Kernel-block indicator ratios of the full 2-shift at `p = 2`, `N = 2..5`.
pub fn obstruction_suite(ns: &[usize], p: f64) -> Result<CheckReport> {
    let sys = LocalSystem::FullShift { d: 2 };
    Ok(rd::obstruction_trend(&sys, &zero_point(), ns, p)?.0)
}

// ---------------------------------------------------------------- multipliers

pub const SCHOENBERG_GRID: [f64; 5] = [2.0, 1.0, 0.5, 0.25, 0.125];

/// Negative type, Schoenberg positivity, multiplier bounds, the decay
/// trace and the local approximation experiment.
pub fn multiplier_suite(seed: u64, samples: usize) -> Result<(CheckReport, Vec<multiplier::TraceRow>)> {
    let tol = multiplier::NEG_TYPE_TOL;
    let mut rep = CheckReport::new("multiplier");
    rep.seed = seed;
    rep.param("samples", samples).param("t", SCHOENBERG_GRID.to_vec());

    // negative type and Schoenberg kernels
    let pair = build_fixture(&SystemSpec::Pair { n: 5 }, 0, 0)?;
    let eq = ArrowFunction::equilateral(&pair.view);
    let cfg = TupleConfig {
        seed,
        ..Default::default()
    };
    rep.absorb("equilateral pair(5)", multiplier::is_negative_type(&pair.view, &eq, None, &cfg, tol)?);
    rep.absorb("equilateral pair(5)", multiplier::schoenberg_family(&pair.view, &eq, &SCHOENBERG_GRID, None, &cfg, tol)?.0);
    let (fview, flen, fcfg) = multiplier::free_group_fixture(2, 3)?;
    let wl = ArrowFunction::from_length(&flen);
    rep.absorb("word-length F_2", multiplier::is_negative_type(&fview, &wl, Some(&flen), &fcfg, tol)?);
    rep.absorb(
        "word-length F_2",
        multiplier::schoenberg_family(&fview, &wl, &SCHOENBERG_GRID, Some(&flen), &fcfg, tol)?.0,
    );

    // multiplier contractivity and the Schwartz bound
    for (i, spec) in [SystemSpec::Pair { n: 3 }, SystemSpec::Pair { n: 4 }, SystemSpec::Cyclic { n: 4 }, SystemSpec::Cyclic { n: 5 }]
        .iter()
        .enumerate()
    {
        let fx = build_fixture(spec, 0, 0)?;
        let b = build_bundle(&fx, BundleSpec::Trivial { dim: 2 })?;
        let secs = mixed_sections(&b, seed ^ (i as u64) << 8, samples, "f")?;
        let mut pairs = Vec::new();
        for (k, (name, f)) in secs.into_iter().enumerate() {
            let mut r = rng::stream(seed ^ 0xface ^ (i as u64) << 8, k as u64);
            let h = match spec {
                SystemSpec::Pair { .. } => multiplier::random_pd_on_pair(&fx.view, 3, &mut r)?,
                _ => multiplier::random_pd_on_cyclic(&fx.view, &mut r)?,
            };
            pairs.push((name, h, f));
        }
        rep.absorb(&fx.name, multiplier::multiplier_check(&pairs, &fx.length, 2.0)?);
    }

    // decay trace for the equilateral ψ on an off-unit section
    let p3 = build_fixture(&SystemSpec::Pair { n: 3 }, 0, 0)?;
    let b3 = build_bundle(&p3, BundleSpec::Trivial { dim: 2 })?;
    let off: Vec<ArrowId> = p3.all_arrows().into_iter().filter(|a| !p3.view.is_unit_arrow(*a)).collect();
    let f = Section::random(&b3, &off, &mut rng::stream(seed, 0xdeca))?;
    let (hap, trace) = multiplier::hap_decay_check(&f, &SCHOENBERG_GRID)?;
    rep.absorb("pair(3) trivial(2)", hap);

    // local approximation: finite fixture with supp f ⊆ U
    let g = Section::random(&b3, &p3.all_arrows(), &mut rng::stream(seed, 0xa11))?;
    let in_u = |_: ArrowId| true;
    rep.absorb(
        "pair(3) U = G",
        multiplier::local_approximate(&g, &in_u, &ArrowFunction::equilateral(&p3.view), &SCHOENBERG_GRID)?.0,
    );

    // local approximation on the full-shift truncation: f = e^{-L} on the
    // radius-6 fiber ball at 0^∞, U = all but one arrow outside supp f
    let (view, len, _) = dr_view(&LocalSystem::FullShift { d: 2 }, &[zero_point()], 6)?;
    let view = Arc::new(view);
    let bundle = ConcreteBundle::trivial(Arc::clone(&view), 1)?;
    let x = view.unit_id(&zero_point())?;
    let ball: Vec<ArrowId> = view.source_fiber(x).to_vec();
    let f = Section::from_entries(&bundle, ball.iter().map(|a| (*a, FiberElement::scalar(C64::new((-len.eval(*a)).exp(), 0.0)))))?;
    let excluded = (0..view.num_arrows()).find(|a| !ball.contains(a));
    let in_u = move |a: ArrowId| Some(a) != excluded;
    let psi = ArrowFunction::from_length(&len);
    rep.absorb("full 2-shift radius 6", multiplier::local_approximate(&f, &in_u, &psi, &SCHOENBERG_GRID)?.0);
    rep.sort();
    Ok((rep, trace))
}

// ---------------------------------------------------------------- rdtest

/// RD ratios on one fixture, with every inequality that applies.
pub struct RdTestConfig {
    pub system: SystemSpec,
    pub bundle: BundleSpec,
    pub p: f64,
    pub samples: usize,
    pub seed: u64,
    pub radius: usize,
    pub unit_sample: usize,
}

pub fn rdtest(cfg: &RdTestConfig) -> Result<CheckReport> {
    let fx = build_fixture(&cfg.system, cfg.radius, cfg.unit_sample)?;
    let b = build_bundle(&fx, cfg.bundle)?;
    let mut rep = CheckReport::new("rdtest");
    rep.seed = cfg.seed;
    rep.system = b.describe();
    rep.budget = if fx.truncated { format!("radius {}, {} sample units", cfg.radius, cfg.unit_sample) } else { "full".into() };
    rep.param("p", cfg.p).param("samples", cfg.samples);
    let support = fx.section_support();
    let mut secs = named("random", rd::random_sections(&b, &support, cfg.seed, cfg.samples)?);
    secs.push(("indicator".into(), Section::indicator(&b, support.iter().copied())?));
    let opts = fx.reduced_options();
    let scan = rd::rd_ratio_scan(&secs, &fx.length, cfg.p, &opts)?;
    rep.param("max_ratio", scan.max_ratio).param("ratio_exact", scan.exact);
    rep.note(format!("max ratio {:.6} at {}", scan.max_ratio, scan.worst));

    let table = growth::view_ball_counts(&fx.view, &fx.length, cfg.radius.max(growth::MIN_RADIUS));
    match classify_growth(&table) {
        Ok(cls) => {
            rep.note(format!("view growth: {}", class_name(&cls.class)));
            if let (Some(cert), true) = (cls.certificate(), cls.certificate_holds) {
                rep.absorb("poly-growth", rd::poly_growth_rd_check(&secs, &fx.length, cert, &opts)?);
            }
        }
        Err(e) => rep.note(format!("no growth classification: {e}")),
    }
    if fx.view.is_closed() {
        rep.absorb("chain", rd::norm_chain_check(&secs)?);
        rep.absorb("bhm", rd::bhm_check(&secs)?);
        let witness = RdWitness {
            c: scan.max_ratio.max(f64::MIN_POSITIVE),
            p: cfg.p,
            scope: "max ratio over the scanned sections".into(),
        };
        rep.note(format!("scan witness C = {:.6} at p = {}", witness.c, witness.p));
    }
    if let SystemSpec::FullShift { d } = cfg.system {
        let sys = LocalSystem::FullShift { d };
        let (trend, _) = rd::obstruction_trend(&sys, &zero_point(), &[2, 3, 4, 5], cfg.p)?;
        rep.absorb("obstruction", trend);
    }
    rep.sort();
    Ok(rep)
}

// ---------------------------------------------------------------- axioms

/// Groupoid axioms, length-function axioms and bundle axioms on a fixture;
/// the partial-action law for the shift model when relevant.
pub fn axioms_report(spec: &SystemSpec, bundle: BundleSpec, radius: usize, unit_sample: usize, seed: u64) -> Result<CheckReport> {
    let fx = build_fixture(spec, radius, unit_sample)?;
    let mut rep = CheckReport::new("axioms");
    rep.seed = seed;
    rep.system = fx.name.clone();
    rep.absorb("groupoid", check_axioms(&fx.view, Some(&fx.length)));
    let b = build_bundle(&fx, bundle)?;
    rep.absorb("bundle", check_bundle_axioms(&b, seed, 20));
    if let SystemSpec::FullShift { d } = spec {
        let sys = PartialActionSystem::free_shift(*d)?;
        rep.absorb("partial-action", check_partial_action(&sys, &shift_depth_sample(*d, 3), 2));
    }
    rep.sort();
    Ok(rep)
}

/// A random complex scalar, used by callers that build ad-hoc sections.
pub fn random_scalar(r: &mut impl Rng) -> C64 {
    C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
}
