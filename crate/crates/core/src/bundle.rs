//! Fell bundles with finite-dimensional matrix fibers.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{input, Error, Result};
use crate::group::GroupElem;
use crate::groupoid::{ArrowId, Compose, FiniteGroupoidView, Payload};
use crate::linalg;
use crate::report::{CheckReport, CheckRow};
use crate::rng;
use crate::{CMat, C64};

/// Block shapes of a fiber: one `(rows, cols)` per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberShape(pub Vec<(usize, usize)>);

impl FiberShape {
    pub fn single(rows: usize, cols: usize) -> Self {
        FiberShape(vec![(rows, cols)])
    }

    /// Complex dimension of the fiber.
    pub fn dim(&self) -> usize {
        self.0.iter().map(|(r, c)| r * c).sum()
    }
}

impl fmt::Display for FiberShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(r, c)| format!("{r}x{c}")).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// An element of one fiber: a list of matrix blocks. Concrete bundles use a
/// single block; lifted bundles use one block per base point. Unit fibers
/// are block-diagonal C*-algebras.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberElement {
    pub blocks: Vec<CMat>,
}

impl FiberElement {
    pub fn single(m: CMat) -> Self {
        FiberElement { blocks: vec![m] }
    }

    pub fn scalar(z: C64) -> Self {
        FiberElement::single(CMat::from_element(1, 1, z))
    }

    pub fn zeros(shape: &FiberShape) -> Self {
        FiberElement {
            blocks: shape.0.iter().map(|(r, c)| CMat::zeros(*r, *c)).collect(),
        }
    }

    pub fn random(rng: &mut impl Rng, shape: &FiberShape) -> Self {
        FiberElement {
            blocks: shape.0.iter().map(|(r, c)| rng::gaussian_matrix(rng, *r, *c)).collect(),
        }
    }

    /// The `k`-th entry basis element (entries enumerated block by block,
    /// column-major within a block).
    pub fn basis(shape: &FiberShape, k: usize) -> Self {
        let mut e = FiberElement::zeros(shape);
        let mut k = k;
        for b in e.blocks.iter_mut() {
            let n = b.len();
            if k < n {
                b[k] = C64::new(1.0, 0.0);
                return e;
            }
            k -= n;
        }
        panic!("basis index out of range for shape {shape}");
    }

    pub fn shape(&self) -> FiberShape {
        FiberShape(self.blocks.iter().map(|b| (b.nrows(), b.ncols())).collect())
    }

    /// Entries in the order used by [`FiberElement::basis`].
    pub fn entries(&self) -> impl Iterator<Item = C64> + '_ {
        self.blocks.iter().flat_map(|b| b.iter().copied())
    }

    pub fn from_entries(shape: &FiberShape, entries: &[C64]) -> Self {
        let mut k = 0;
        let blocks = shape
            .0
            .iter()
            .map(|(r, c)| {
                let m = CMat::from_column_slice(*r, *c, &entries[k..k + r * c]);
                k += r * c;
                m
            })
            .collect();
        FiberElement { blocks }
    }

    pub fn scale(&self, z: C64) -> Self {
        FiberElement {
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    pub fn add(&self, other: &FiberElement) -> Self {
        FiberElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &FiberElement) -> Self {
        FiberElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &FiberElement) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b;
        }
    }

    /// Fiber norm: largest block operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::opnorm).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.entries().all(|z| z == C64::new(0.0, 0.0))
    }

    /// Largest entrywise difference; shape mismatch counts as infinite.
    pub fn max_diff(&self, other: &FiberElement) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| linalg::max_entry_distance(a, b))
            .fold(0.0, f64::max)
    }

    /// Top of the spectrum of a self-adjoint unit-fiber element.
    pub fn max_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.nrows() > 0)
            .map(linalg::max_eigenvalue)
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.nrows() > 0)
            .map(linalg::min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    /// Positive square root of a positive unit-fiber element.
    pub fn sqrt(&self) -> Self {
        FiberElement {
            blocks: self.blocks.iter().map(linalg::psd_sqrt).collect(),
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::max_entry_distance(b, &b.adjoint()))
            .fold(0.0, f64::max)
    }
}

/// The interface every Fell bundle implements: fiber shapes,
/// multiplication `E_g × E_h → E_{gh}`, and involution `E_g → E_{g⁻¹}`.
pub trait FellBundle: Send + Sync {
    fn view(&self) -> &FiniteGroupoidView;
    fn shape(&self, a: ArrowId) -> FiberShape;
    /// Returns the product arrow `gh` and `a·b ∈ E_{gh}`.
    fn mult(&self, g: ArrowId, h: ArrowId, a: &FiberElement, b: &FiberElement) -> Result<(ArrowId, FiberElement)>;
    /// Returns `g⁻¹` and `a* ∈ E_{g⁻¹}`.
    fn invol(&self, g: ArrowId, a: &FiberElement) -> Result<(ArrowId, FiberElement)>;
    fn describe(&self) -> String;

    /// `a*a ∈ E_{s(g)}`.
    fn star_mult(&self, g: ArrowId, a: &FiberElement) -> Result<FiberElement> {
        let (gi, astar) = self.invol(g, a)?;
        Ok(self.mult(gi, g, &astar, a)?.1)
    }

    /// `aa* ∈ E_{r(g)}`.
    fn mult_star(&self, g: ArrowId, a: &FiberElement) -> Result<FiberElement> {
        let (gi, astar) = self.invol(g, a)?;
        Ok(self.mult(g, gi, a, &astar)?.1)
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Trivial,
    TwistedLine { sigma: HashMap<(ArrowId, ArrowId), C64> },
    Action { unitaries: Vec<CMat> },
}

/// Trivial, twisted-line, and group-action bundles over a view.
#[derive(Clone, Debug)]
pub struct ConcreteBundle {
    view: Arc<FiniteGroupoidView>,
    ranks: Vec<usize>,
    kind: Kind,
}

const AXIOM_TOL: f64 = 1e-10;

fn composable_pairs(view: &FiniteGroupoidView) -> Vec<(ArrowId, ArrowId, ArrowId)> {
    let mut out = Vec::new();
    for b in 0..view.num_arrows() {
        for &a in view.source_fiber(view.rng(b)) {
            if let Compose::Arrow(ab) = view.compose(a, b) {
                out.push((a, b, ab));
            }
        }
    }
    out
}

impl ConcreteBundle {
    /// Trivial bundle with fiber `M_n` everywhere.
    pub fn trivial(view: Arc<FiniteGroupoidView>, n: usize) -> Result<Self> {
        let ranks = vec![n; view.num_units()];
        ConcreteBundle::trivial_ranks(view, ranks)
    }

    /// Trivial bundle with fiber `M_{rank(r(γ)) × rank(s(γ))}` over `γ`.
    pub fn trivial_ranks(view: Arc<FiniteGroupoidView>, ranks: Vec<usize>) -> Result<Self> {
        if ranks.len() != view.num_units() {
            return Err(Error::RankMismatch(ranks.len(), view.num_units()));
        }
        if ranks.contains(&0) {
            return input("ranks must be positive");
        }
        Ok(ConcreteBundle {
            view,
            ranks,
            kind: Kind::Trivial,
        })
    }

    /// Line bundle twisted by `σ` on composable pairs; validated to be a
    /// normalized unit-modulus 2-cocycle on every in-view instance.
    pub fn twisted_line(view: Arc<FiniteGroupoidView>, sigma: impl Fn(ArrowId, ArrowId) -> C64) -> Result<Self> {
        let b = ConcreteBundle::twisted_line_unchecked(view, sigma);
        b.validate_cocycle()?;
        Ok(b)
    }

    /// As [`twisted_line`](Self::twisted_line) without validation, for fault
    /// injection.
    pub fn twisted_line_unchecked(view: Arc<FiniteGroupoidView>, sigma: impl Fn(ArrowId, ArrowId) -> C64) -> Self {
        let table = composable_pairs(&view)
            .into_iter()
            .map(|(a, b, _)| ((a, b), sigma(a, b)))
            .collect();
        ConcreteBundle {
            ranks: vec![1; view.num_units()],
            view,
            kind: Kind::TwistedLine { sigma: table },
        }
    }

    fn sigma(&self, a: ArrowId, b: ArrowId) -> C64 {
        match &self.kind {
            Kind::TwistedLine { sigma } => sigma.get(&(a, b)).copied().unwrap_or(C64::new(1.0, 0.0)),
            _ => C64::new(1.0, 0.0),
        }
    }

    fn validate_cocycle(&self) -> Result<()> {
        let v = &self.view;
        let one = C64::new(1.0, 0.0);
        let pairs = composable_pairs(v);
        for &(a, b, _) in &pairs {
            let s = self.sigma(a, b);
            if (s.norm() - 1.0).abs() > AXIOM_TOL {
                return input(format!("sigma({}, {}) is not unimodular", v.label(a), v.label(b)));
            }
            if (v.is_unit_arrow(a) || v.is_unit_arrow(b)) && (s - one).norm() > AXIOM_TOL {
                return input(format!("sigma({}, {}) is not normalized", v.label(a), v.label(b)));
            }
        }
        if let Some((a, b, c)) = self.cocycle_failures().into_iter().next() {
            return input(format!(
                "cocycle identity fails on ({}, {}, {})",
                v.label(a),
                v.label(b),
                v.label(c)
            ));
        }
        Ok(())
    }

    /// Triples where `σ(a,b)σ(ab,c) ≠ σ(a,bc)σ(b,c)`.
    pub fn cocycle_failures(&self) -> Vec<(ArrowId, ArrowId, ArrowId)> {
        let v = &self.view;
        let mut out = Vec::new();
        for (a, b, ab) in composable_pairs(v) {
            for &c in v.range_fiber(v.src(b)) {
                let (Compose::Arrow(bc), Compose::Arrow(abc)) = (v.compose(b, c), v.compose(ab, c)) else {
                    continue;
                };
                if !matches!(v.compose(a, bc), Compose::Arrow(x) if x == abc) {
                    continue;
                }
                let lhs = self.sigma(a, b) * self.sigma(ab, c);
                let rhs = self.sigma(a, bc) * self.sigma(b, c);
                if (lhs - rhs).norm() > AXIOM_TOL {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    /// Action bundle over a group view: fibers `M_n`, product
    /// `a·α_g(b)` with `α_g = Ad U_g`. Validates that the `U_g` are unitary
    /// and that `α` is multiplicative on in-view pairs.
    pub fn action(view: Arc<FiniteGroupoidView>, n: usize, unitary: impl Fn(&GroupElem) -> CMat) -> Result<Self> {
        let b = ConcreteBundle::action_unchecked(view, n, unitary)?;
        for (g, u) in b.unitaries().iter().enumerate() {
            let defect = linalg::max_entry_distance(&(u.adjoint() * u), &CMat::identity(n, n));
            if defect > AXIOM_TOL {
                return input(format!("U at {} is not unitary", b.view.label(g)));
            }
        }
        for (g, h, gh) in composable_pairs(&b.view) {
            for k in 0..n * n {
                let e = FiberElement::basis(&FiberShape::single(n, n), k).blocks.remove(0);
                let lhs = b.alpha(g, &b.alpha(h, &e));
                let rhs = b.alpha(gh, &e);
                if linalg::max_entry_distance(&lhs, &rhs) > AXIOM_TOL {
                    return input(format!(
                        "alpha is not multiplicative on ({}, {})",
                        b.view.label(g),
                        b.view.label(h)
                    ));
                }
            }
        }
        Ok(b)
    }

    /// As [`action`](Self::action) without validation, for fault injection.
    pub fn action_unchecked(view: Arc<FiniteGroupoidView>, n: usize, unitary: impl Fn(&GroupElem) -> CMat) -> Result<Self> {
        if view.num_units() != 1 {
            return input("action bundles need a group view (one unit)");
        }
        let mut unitaries = Vec::with_capacity(view.num_arrows());
        for a in 0..view.num_arrows() {
            let Payload::Group { element, .. } = view.payload(a) else {
                return input("action bundles need group arrows");
            };
            let u = unitary(element);
            if u.nrows() != n || u.ncols() != n {
                return Err(Error::Shape {
                    arrow: view.label(a),
                    expected: format!("{n}x{n}"),
                    found: format!("{}x{}", u.nrows(), u.ncols()),
                });
            }
            unitaries.push(u);
        }
        Ok(ConcreteBundle {
            ranks: vec![n],
            view,
            kind: Kind::Action { unitaries },
        })
    }

    /// Action by permutation matrices: `U_g e_i = e_{perm(g)[i]}`.
    pub fn action_from_permutations(
        view: Arc<FiniteGroupoidView>,
        n: usize,
        perm: impl Fn(&GroupElem) -> Vec<usize>,
    ) -> Result<Self> {
        ConcreteBundle::action(view, n, |g| {
            let p = perm(g);
            let mut u = CMat::zeros(n, n);
            for (i, j) in p.iter().enumerate() {
                if *j < n && i < n {
                    u[(*j, i)] = C64::new(1.0, 0.0);
                }
            }
            u
        })
    }

    fn unitaries(&self) -> &[CMat] {
        match &self.kind {
            Kind::Action { unitaries } => unitaries,
            _ => &[],
        }
    }

    fn alpha(&self, g: ArrowId, b: &CMat) -> CMat {
        let u = &self.unitaries()[g];
        u * b * u.adjoint()
    }

    pub fn view_arc(&self) -> Arc<FiniteGroupoidView> {
        Arc::clone(&self.view)
    }

    pub fn rank(&self, unit: usize) -> usize {
        self.ranks[unit]
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Trivial => "trivial",
            Kind::TwistedLine { .. } => "twisted-line",
            Kind::Action { .. } => "action",
        }
    }

    fn check_shape(&self, g: ArrowId, a: &FiberElement) -> Result<()> {
        let expect = self.shape(g);
        if a.shape() != expect {
            return Err(Error::Shape {
                arrow: self.view.label(g),
                expected: expect.to_string(),
                found: a.shape().to_string(),
            });
        }
        Ok(())
    }
}

impl FellBundle for ConcreteBundle {
    fn view(&self) -> &FiniteGroupoidView {
        &self.view
    }

    fn shape(&self, a: ArrowId) -> FiberShape {
        FiberShape::single(self.ranks[self.view.rng(a)], self.ranks[self.view.src(a)])
    }

    fn mult(&self, g: ArrowId, h: ArrowId, a: &FiberElement, b: &FiberElement) -> Result<(ArrowId, FiberElement)> {
        let gh = self.view.compose_strict(g, h)?;
        self.check_shape(g, a)?;
        self.check_shape(h, b)?;
        let (x, y) = (&a.blocks[0], &b.blocks[0]);
        let prod = match &self.kind {
            Kind::Trivial => x * y,
            Kind::TwistedLine { .. } => (x * y) * self.sigma(g, h),
            Kind::Action { .. } => x * self.alpha(g, y),
        };
        Ok((gh, FiberElement::single(prod)))
    }

    fn invol(&self, g: ArrowId, a: &FiberElement) -> Result<(ArrowId, FiberElement)> {
        let gi = self.view.inverse_strict(g)?;
        self.check_shape(g, a)?;
        let x = &a.blocks[0];
        let out = match &self.kind {
            Kind::Trivial => x.adjoint(),
            Kind::TwistedLine { .. } => x.adjoint() * self.sigma(g, gi).conj(),
            Kind::Action { .. } => self.alpha(gi, &x.adjoint()),
        };
        Ok((gi, FiberElement::single(out)))
    }

    fn describe(&self) -> String {
        let ranks: Vec<usize> = {
            let mut r = self.ranks.clone();
            r.dedup();
            r
        };
        let rank = if ranks.len() == 1 {
            ranks[0].to_string()
        } else {
            format!("{:?}", self.ranks)
        };
        format!("{}({rank}) over {}", self.kind_name(), self.view.describe())
    }
}

/// Largest number of composable triples checked exhaustively before the
/// associativity sweep switches to an evenly strided subsample.
pub const TRIPLE_CAP: usize = 20_000;

/// Checks associativity, `(ab)* = b*a*`, `(a*)* = a`, `‖a*a‖ = ‖a‖²` and
/// positivity of `a*a` on seeded random fiber elements.
pub fn check_bundle_axioms(bundle: &dyn FellBundle, seed: u64, samples: usize) -> CheckReport {
    let v = bundle.view();
    let mut rep = CheckReport::new("bundle-axioms");
    rep.system = bundle.describe();
    rep.seed = seed;
    rep.param("samples", samples);

    let pairs = composable_pairs(v);
    let mut triples = Vec::new();
    for &(a, b, ab) in &pairs {
        for &c in v.range_fiber(v.src(b)) {
            if let (Compose::Arrow(bc), Compose::Arrow(abc)) = (v.compose(b, c), v.compose(ab, c)) {
                if v.compose(a, bc) == Compose::Arrow(abc) {
                    triples.push((a, b, c));
                }
            }
        }
    }
    let total_triples = triples.len();
    if triples.len() > TRIPLE_CAP {
        let step = triples.len().div_ceil(TRIPLE_CAP);
        triples = triples.into_iter().step_by(step).collect();
    }
    rep.budget = format!(
        "{} pairs, {} of {} triples, {} element samples",
        pairs.len(),
        triples.len(),
        total_triples,
        samples
    );

    let labels3 = |a, b, c| format!("{} . {} . {}", v.label(a), v.label(b), v.label(c));
    let assoc: Vec<(f64, String)> = triples
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b, c))| {
            let mut r = rng::stream(seed, i as u64);
            let x = FiberElement::random(&mut r, &bundle.shape(a));
            let y = FiberElement::random(&mut r, &bundle.shape(b));
            let z = FiberElement::random(&mut r, &bundle.shape(c));
            let dev = (|| -> Result<f64> {
                let (ab, xy) = bundle.mult(a, b, &x, &y)?;
                let (_, left) = bundle.mult(ab, c, &xy, &z)?;
                let (bc, yz) = bundle.mult(b, c, &y, &z)?;
                let (_, right) = bundle.mult(a, bc, &x, &yz)?;
                Ok(left.max_diff(&right))
            })()
            .unwrap_or(f64::INFINITY);
            (dev, labels3(a, b, c))
        })
        .collect();
    push_sweep(&mut rep, "associativity", &assoc);

    let star: Vec<(f64, String)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(a, b, _))| {
            let mut r = rng::stream(seed ^ 0x5eed_0001, i as u64);
            let x = FiberElement::random(&mut r, &bundle.shape(a));
            let y = FiberElement::random(&mut r, &bundle.shape(b));
            let dev = (|| -> Result<f64> {
                let (ab, xy) = bundle.mult(a, b, &x, &y)?;
                let (_, lhs) = bundle.invol(ab, &xy)?;
                let (bi, ys) = bundle.invol(b, &y)?;
                let (ai, xs) = bundle.invol(a, &x)?;
                let (_, rhs) = bundle.mult(bi, ai, &ys, &xs)?;
                Ok(lhs.max_diff(&rhs))
            })()
            .unwrap_or(f64::INFINITY);
            (dev, format!("{} . {}", v.label(a), v.label(b)))
        })
        .collect();
    push_sweep(&mut rep, "anti-multiplicative", &star);

    let n = v.num_arrows().max(1);
    let singles: Vec<(f64, f64, f64, String)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let g = k % n;
            let mut r = rng::stream(seed ^ 0x5eed_0002, k as u64);
            let x = FiberElement::random(&mut r, &bundle.shape(g));
            let res = (|| -> Result<(f64, f64, f64)> {
                let (gi, xs) = bundle.invol(g, &x)?;
                let (_, xss) = bundle.invol(gi, &xs)?;
                let xx = bundle.star_mult(g, &x)?;
                let nx = x.norm();
                let cstar = (xx.norm() - nx * nx).abs() / (nx * nx).max(1.0);
                let pos = (-xx.min_eigenvalue()).max(xx.hermitian_defect());
                Ok((xss.max_diff(&x), cstar, pos))
            })()
            .unwrap_or((f64::INFINITY, f64::INFINITY, f64::INFINITY));
            (res.0, res.1, res.2, v.label(g))
        })
        .collect();
    let inv: Vec<(f64, String)> = singles.iter().map(|s| (s.0, s.3.clone())).collect();
    let cst: Vec<(f64, String)> = singles.iter().map(|s| (s.1, s.3.clone())).collect();
    let pos: Vec<(f64, String)> = singles.iter().map(|s| (s.2, s.3.clone())).collect();
    push_sweep(&mut rep, "involutive", &inv);
    push_sweep(&mut rep, "c-star-identity", &cst);
    push_sweep(&mut rep, "positivity", &pos);
    rep.sort();
    rep
}

/// One summary row with the worst deviation, plus one row per violation.
fn push_sweep(rep: &mut CheckReport, check: &str, devs: &[(f64, String)]) {
    let worst = devs.iter().map(|d| d.0).fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    rep.push(CheckRow::leq(check, format!("max over {}", devs.len()), worst, 0.0, AXIOM_TOL));
    let mut bad: Vec<&(f64, String)> = devs.iter().filter(|d| !(d.0 <= AXIOM_TOL)).collect();
    bad.sort_by(|a, b| a.1.cmp(&b.1));
    bad.dedup_by(|a, b| a.1 == b.1);
    for (d, inst) in bad {
        rep.push(CheckRow::leq(check, inst.clone(), *d, 0.0, AXIOM_TOL));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::builders::{cyclic, pair_groupoid};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn swap() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    #[test]
    fn trivial_bundles_pass() {
        let v = Arc::new(pair_groupoid(3).unwrap());
        for n in [1, 2] {
            let b = ConcreteBundle::trivial(v.clone(), n).unwrap();
            assert!(check_bundle_axioms(&b, 1, 100).passed());
        }
        let mixed = ConcreteBundle::trivial_ranks(v, vec![1, 2, 3]).unwrap();
        let rep = check_bundle_axioms(&mixed, 2, 100);
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn action_bundle_multiplication() {
        let v = Arc::new(cyclic(2).unwrap());
        let b = ConcreteBundle::action(v.clone(), 2, |g| if g.is_identity() { CMat::identity(2, 2) } else { swap() })
            .unwrap();
        let g = v
            .find(&Payload::Group {
                element: GroupElem::Mod { k: 1, n: 2 },
                point: crate::Point::Index(0),
            })
            .unwrap();
        let a = FiberElement::single(CMat::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]));
        let bb = FiberElement::single(CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]));
        let (gg, prod) = b.mult(g, g, &a, &bb).unwrap();
        assert!(v.is_unit_arrow(gg));
        let expect = &a.blocks[0] * (swap() * &bb.blocks[0] * swap());
        assert!(linalg::max_entry_distance(&prod.blocks[0], &expect) < 1e-15);
        assert!(check_bundle_axioms(&b, 3, 100).passed());
    }

    #[test]
    fn non_multiplicative_action_is_flagged() {
        let v = Arc::new(cyclic(3).unwrap());
        // U_1 = swap, U_2 = identity: α_1 α_2 = Ad(swap) differs from α_0 = id
        let build = |g: &GroupElem| match g {
            GroupElem::Mod { k: 1, .. } => swap(),
            _ => CMat::identity(2, 2),
        };
        assert!(ConcreteBundle::action(v.clone(), 2, build).is_err());
        let bad = ConcreteBundle::action_unchecked(v, 2, build).unwrap();
        let rep = check_bundle_axioms(&bad, 0, 50);
        assert!(rep.rows_for("associativity").any(|r| !r.passed()));
    }

    #[test]
    fn twisted_line_over_z2() {
        let v = Arc::new(cyclic(2).unwrap());
        let sigma = |a: ArrowId, b: ArrowId| {
            if v.is_unit_arrow(a) || v.is_unit_arrow(b) {
                c(1.0)
            } else {
                c(-1.0)
            }
        };
        let b = ConcreteBundle::twisted_line(v.clone(), sigma).unwrap();
        assert!(check_bundle_axioms(&b, 0, 100).passed());
        // σ ≡ 1 agrees with trivial(1)
        let one = ConcreteBundle::twisted_line(v.clone(), |_, _| c(1.0)).unwrap();
        let triv = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let x = FiberElement::scalar(C64::new(0.3, -1.2));
        let y = FiberElement::scalar(C64::new(2.0, 0.5));
        for g in 0..2 {
            for h in 0..2 {
                assert_eq!(one.mult(g, h, &x, &y).unwrap(), triv.mult(g, h, &x, &y).unwrap());
            }
            assert_eq!(one.invol(g, &x).unwrap(), triv.invol(g, &x).unwrap());
        }
    }

    #[test]
    fn broken_cocycle_is_flagged() {
        let v = Arc::new(cyclic(3).unwrap());
        let g1 = 1;
        let sigma = |a: ArrowId, b: ArrowId| if a == g1 && b == g1 { C64::new(0.0, 1.0) } else { c(1.0) };
        let err = ConcreteBundle::twisted_line(v.clone(), sigma).unwrap_err();
        assert!(err.to_string().contains("cocycle"));
        let bad = ConcreteBundle::twisted_line_unchecked(v, sigma);
        assert!(!bad.cocycle_failures().is_empty());
        assert!(!check_bundle_axioms(&bad, 0, 10).passed());
    }
}
