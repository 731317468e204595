//! Sections over a transformation groupoid `Γ ⋉ X` as sections of a bundle
//! over `Γ`, and the Steinberg model of the Cuntz groupoid.
//!
//! The lifted fiber over `γ` is the direct sum of the base fibers
//! `E_{(γ,x)}` over the sampled points `x` in the domain of `θ_γ`, one block
//! per point, ordered by point.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::bundle::{FellBundle, FiberElement, FiberShape};
use crate::deaconu::{steinberg_check, steinberg_psi, SteinbergCheck};
use crate::error::{input, Error, Result};
use crate::group::GroupElem;
use crate::groupoid::{builders, ArrowId, FiniteGroupoidView, LengthFn, Payload, Point};
use crate::partial::PartialActionSystem;
use crate::report::{CheckReport, CheckRow};
use crate::section::{ReducedOptions, Section};
use crate::words::GeneratorSign;

/// `Ẽ` over a group view, assembled from a bundle over `Γ ⋉ X`.
pub struct LiftedBundle<'a> {
    base: &'a dyn FellBundle,
    group: Arc<FiniteGroupoidView>,
    /// Per group arrow: `(x, base arrow (γ, x))`, sorted by `x`.
    blocks: Vec<Vec<(Point, ArrowId)>>,
    /// Base arrow → (group arrow, block index).
    position: HashMap<ArrowId, (ArrowId, usize)>,
}

fn group_index(group: &FiniteGroupoidView) -> Result<HashMap<GroupElem, ArrowId>> {
    if group.num_units() != 1 {
        return input("the lifted bundle needs a group view (one unit)");
    }
    let mut idx = HashMap::new();
    for a in 0..group.num_arrows() {
        match group.payload(a) {
            Payload::Group { element, .. } => {
                idx.insert(element.clone(), a);
            }
            _ => return input("the lifted bundle needs group arrows"),
        }
    }
    Ok(idx)
}

/// Errors unless `θ_γ(x) ∈ sample` whenever it is defined, for every `γ`
/// in the group view and `x` in the sample.
pub fn check_action_closed(system: &PartialActionSystem, sample: &[Point], group: &FiniteGroupoidView) -> Result<()> {
    let pts: std::collections::BTreeSet<&Point> = sample.iter().collect();
    for a in 0..group.num_arrows() {
        let Payload::Group { element, .. } = group.payload(a) else { continue };
        for x in sample {
            if let Some(y) = system.act(element, x) {
                if !pts.contains(&y) {
                    return input(format!("sample is not action-closed: {element} sends {x} to {y}"));
                }
            }
        }
    }
    Ok(())
}

/// Builds `Ẽ` from a bundle over a transformation-groupoid view whose
/// group labels all lie in `group`.
pub fn lift_to_group_bundle<'a>(base: &'a dyn FellBundle, group: Arc<FiniteGroupoidView>) -> Result<LiftedBundle<'a>> {
    let idx = group_index(&group)?;
    let bv = base.view();
    let mut blocks: Vec<Vec<(Point, ArrowId)>> = vec![Vec::new(); group.num_arrows()];
    for a in 0..bv.num_arrows() {
        let Payload::Transformation { element, point } = bv.payload(a) else {
            return input(format!("{} is not a transformation arrow", bv.label(a)));
        };
        let Some(&g) = idx.get(element) else {
            return input(format!("group element {element} of {} is outside the group view", bv.label(a)));
        };
        blocks[g].push((point.clone(), a));
    }
    let mut position = HashMap::new();
    for (g, bl) in blocks.iter_mut().enumerate() {
        bl.sort();
        for (k, (_, a)) in bl.iter().enumerate() {
            position.insert(*a, (g, k));
        }
    }
    Ok(LiftedBundle {
        base,
        group,
        blocks,
        position,
    })
}

impl LiftedBundle<'_> {
    pub fn base(&self) -> &dyn FellBundle {
        self.base
    }

    /// Base points in the domain of the group arrow `g`.
    pub fn domain(&self, g: ArrowId) -> Vec<&Point> {
        self.blocks[g].iter().map(|(x, _)| x).collect()
    }

    fn block_of(&self, g: ArrowId, x: &Point) -> Option<usize> {
        self.blocks[g].binary_search_by(|(p, _)| p.cmp(x)).ok()
    }

    fn check(&self, g: ArrowId, a: &FiberElement) -> Result<()> {
        let expect = self.shape(g);
        if a.shape() != expect {
            return Err(Error::Shape {
                arrow: self.group.label(g),
                expected: expect.to_string(),
                found: a.shape().to_string(),
            });
        }
        Ok(())
    }
}

impl FellBundle for LiftedBundle<'_> {
    fn view(&self) -> &FiniteGroupoidView {
        &self.group
    }

    fn shape(&self, g: ArrowId) -> FiberShape {
        FiberShape(
            self.blocks[g]
                .iter()
                .flat_map(|(_, a)| self.base.shape(*a).0)
                .collect(),
        )
    }

    /// `(ξη)(γδ, x) = ξ(γ, θ_δ x)·η(δ, x)`.
    fn mult(&self, g: ArrowId, h: ArrowId, a: &FiberElement, b: &FiberElement) -> Result<(ArrowId, FiberElement)> {
        let gh = self.group.compose_strict(g, h)?;
        self.check(g, a)?;
        self.check(h, b)?;
        let mut out = FiberElement::zeros(&self.shape(gh));
        let bv = self.base.view();
        for (k, (_, d)) in self.blocks[h].iter().enumerate() {
            let y = bv.unit(bv.rng(*d));
            let Some(j) = self.block_of(g, y) else { continue };
            let c = self.blocks[g][j].1;
            let (cd, v) = self.base.mult(
                c,
                *d,
                &FiberElement::single(a.blocks[j].clone()),
                &FiberElement::single(b.blocks[k].clone()),
            )?;
            let Some(&(g2, slot)) = self.position.get(&cd) else {
                return Err(Error::Budget {
                    left: bv.label(c),
                    right: bv.label(*d),
                });
            };
            debug_assert_eq!(g2, gh);
            out.blocks[slot] = v.blocks[0].clone();
        }
        Ok((gh, out))
    }

    fn invol(&self, g: ArrowId, a: &FiberElement) -> Result<(ArrowId, FiberElement)> {
        let gi = self.group.inverse_strict(g)?;
        self.check(g, a)?;
        let mut out = FiberElement::zeros(&self.shape(gi));
        for (k, (_, c)) in self.blocks[g].iter().enumerate() {
            let (ci, v) = self.base.invol(*c, &FiberElement::single(a.blocks[k].clone()))?;
            let (_, slot) = self.position[&ci];
            out.blocks[slot] = v.blocks[0].clone();
        }
        Ok((gi, out))
    }

    fn describe(&self) -> String {
        format!("lift of {} to {}", self.base.describe(), self.group.describe())
    }
}

/// `(Φf)(γ) = f|_{G_γ}`: the block at `x` is `f(γ, x)`.
pub fn phi_transport<'a>(lifted: &'a LiftedBundle<'_>, f: &Section<'_>) -> Result<Section<'a>> {
    let mut out: BTreeMap<ArrowId, FiberElement> = BTreeMap::new();
    for (a, v) in f.entries() {
        let Some(&(g, slot)) = lifted.position.get(&a) else {
            return input(format!("support escapes the sample at {}", f.bundle().view().label(a)));
        };
        let e = out.entry(g).or_insert_with(|| FiberElement::zeros(&lifted.shape(g)));
        e.blocks[slot] = v.blocks[0].clone();
    }
    Section::from_entries(lifted, out)
}

/// `Φ⁻¹`: reads the blocks back as base-arrow values.
pub fn phi_inverse<'b>(lifted: &LiftedBundle<'b>, big: &Section<'_>) -> Result<Section<'b>> {
    let mut entries = Vec::new();
    for (g, v) in big.entries() {
        for (k, (_, a)) in lifted.blocks[g].iter().enumerate() {
            entries.push((*a, FiberElement::single(v.blocks[k].clone())));
        }
    }
    Section::from_entries(lifted.base, entries)
}

pub const ALG_TOL: f64 = 1e-12;
pub const SOBOLEV_TOL: f64 = 1e-10;
pub const REDUCED_TOL: f64 = 1e-8;

/// `Φ` is a `*`-homomorphism, preserves Sobolev norms (`L = ℓ∘c`) and the
/// reduced norm. On views that are not closed both reduced norms are the
/// same compression, so they are compared at the same tolerance and
/// labelled as lower bounds.
pub fn reduction_equivalence_check(
    lifted: &LiftedBundle<'_>,
    pairs: &[(String, Section<'_>, Section<'_>)],
    ps: &[u32],
) -> Result<CheckReport> {
    let base_len = LengthFn::word_length(lifted.base.view());
    let group_len = LengthFn::word_length(&lifted.group);
    let closed = lifted.base.view().is_closed() && lifted.group.is_closed();
    let mut rep = CheckReport::new("reduction");
    rep.system = lifted.describe();
    rep.param("p", ps.to_vec()).param("reduced_exact", closed);
    if !closed {
        rep.note("views are truncations: reduced norms on both sides are compressions (lower bounds)");
    }
    let opts = ReducedOptions::default();
    let rows: Vec<Result<Vec<CheckRow>>> = pairs
        .par_iter()
        .map(|(name, f, h)| {
            let pf = phi_transport(lifted, f)?;
            let ph = phi_transport(lifted, h)?;
            let mut rows = Vec::new();
            let round = phi_inverse(lifted, &pf)?;
            rows.push(CheckRow::eq("round-trip", name.clone(), round.max_diff(f), 0.0, 0.0));
            let conv = phi_transport(lifted, &f.convolve(h)?)?.max_diff(&pf.convolve(&ph)?);
            rows.push(CheckRow::leq("multiplicative", name.clone(), conv, 0.0, ALG_TOL));
            let star = phi_transport(lifted, &f.involve()?)?.max_diff(&pf.involve()?);
            rows.push(CheckRow::leq("involutive", name.clone(), star, 0.0, ALG_TOL));
            for &p in ps {
                let a = f.sobolev(&base_len, p as f64)?;
                let b = pf.sobolev(&group_len, p as f64)?;
                rows.push(CheckRow::eq(format!("sobolev-p{p}"), name.clone(), a, b, SOBOLEV_TOL));
            }
            let a = f.reduced_norm(&opts)?.value;
            let b = pf.reduced_norm(&opts)?.value;
            rows.push(CheckRow::eq("reduced", name.clone(), a, b, REDUCED_TOL));
            Ok(rows)
        })
        .collect();
    for r in rows {
        for row in r? {
            rep.push(row);
        }
    }
    rep.sort();
    Ok(rep)
}

/// A base bundle fixture: the transformation-groupoid view and its group
/// ball.
pub struct ReductionFixture {
    pub name: String,
    pub base_view: Arc<FiniteGroupoidView>,
    pub group_view: Arc<FiniteGroupoidView>,
}

/// `Z/2` swapping two points; the sample `{0, 1}` is action-closed.
pub fn swap_fixture() -> Result<ReductionFixture> {
    let sys = PartialActionSystem::swap_z2();
    let group = Arc::new(builders::cyclic(2)?);
    let sample = vec![Point::Index(0), Point::Index(1)];
    check_action_closed(&sys, &sample, &group)?;
    let (view, _) = crate::partial::build_transformation_groupoid(&sys, &sample, 1, false)?;
    Ok(ReductionFixture {
        name: "Z/2 swap".into(),
        base_view: Arc::new(view),
        group_view: group,
    })
}

/// `F_2` on the full 2-shift, restricted to the points `T^{-depth}(0^∞)`:
/// arrows `(w, x)` with `|w| ≤ radius` and both `x`, `w·x` sampled.
pub fn shift_fixture(radius: usize, depth: usize) -> Result<ReductionFixture> {
    let sys = PartialActionSystem::free_shift(2)?;
    let sample = crate::partial::shift_depth_sample(2, depth);
    let (view, _) = crate::partial::build_transformation_groupoid(&sys, &sample, radius, false)?;
    Ok(ReductionFixture {
        name: format!("F_2 shift radius {radius} depth {depth}"),
        base_view: Arc::new(view),
        group_view: Arc::new(builders::free_ball(2, radius)?),
    })
}

/// The Steinberg comparison as check rows: `Ψ` is a bijection onto the
/// in-budget arrows, exactly one sign satisfies `c∘Ψ = φ_s`, and words with
/// a subword `a_j⁻¹a_i` act nowhere.
pub fn steinberg_report(d: u32, radius: usize, depth: usize) -> (CheckReport, SteinbergCheck) {
    let s = steinberg_check(d, radius, depth);
    let mut rep = CheckReport::new("steinberg");
    rep.system = format!("full {d}-shift, F_{d} partial action");
    rep.budget = format!("word radius {radius}, depth {depth}");
    rep.param("d", d).param("radius", radius).param("depth", depth);
    rep.param("pairs", s.pairs).param("defined", s.defined).param("dr_arrows", s.dr_arrows);
    let signs: Vec<&str> = s
        .valid_signs
        .iter()
        .map(|g| match g {
            GeneratorSign::Plus => "+1",
            GeneratorSign::Minus => "-1",
        })
        .collect();
    rep.param("valid_signs", &signs);
    rep.push(CheckRow::count("injective", "psi", usize::from(!s.injective)));
    rep.push(CheckRow::count("surjective", "psi", usize::from(!s.surjective)));
    rep.push(CheckRow::count("lengths", "|w| = L(psi(w,x))", s.defined - s.lengths_match.min(s.defined)));
    rep.push(CheckRow::count("composition", "psi(w'w,x) = psi(w',wx)psi(w,x)", s.composition_failures));
    rep.push(CheckRow::count(
        "unique-sign",
        "c(psi(w,x)) = phi_s(w)",
        s.valid_signs.len().abs_diff(1),
    ));
    rep.push(CheckRow::count("forbidden-words", "a_j^-1 a_i subword", s.forbidden_defined));
    if let [only] = signs.as_slice() {
        rep.note(format!("validated cocycle sign: {only}"));
    }
    rep.sort();
    (rep, s)
}

/// The validated sign `s` with `c∘Ψ = φ_s`, if exactly one exists.
pub fn validated_sign(d: u32, radius: usize, depth: usize) -> Option<GeneratorSign> {
    match steinberg_check(d, radius, depth).valid_signs.as_slice() {
        [s] => Some(*s),
        _ => None,
    }
}

/// Triangle identity: a scalar function `f` on Deaconu-Renault arrows,
/// pulled back along `Ψ` and transported by `Φ`, has block `f(Ψ(w, x))` at
/// `(w, x)`. Returns the number of mismatches over the fixture.
pub fn steinberg_transport_mismatches(
    fixture: &ReductionFixture,
    f: &dyn Fn(&Payload) -> crate::C64,
) -> Result<usize> {
    let base = crate::bundle::ConcreteBundle::trivial(Arc::clone(&fixture.base_view), 1)?;
    let lifted = lift_to_group_bundle(&base, Arc::clone(&fixture.group_view))?;
    let bv = &fixture.base_view;
    let mut pulled = Vec::new();
    let mut psi_of = HashMap::new();
    for a in 0..bv.num_arrows() {
        let Payload::Transformation {
            element: GroupElem::Word(w),
            point: Point::Seq(x),
        } = bv.payload(a)
        else {
            return input("triangle check needs the shift fixture");
        };
        let Some(dr) = steinberg_psi(2, w, x) else {
            return input(format!("psi undefined on in-view arrow {}", bv.label(a)));
        };
        let z = f(&dr.payload());
        psi_of.insert(a, z);
        pulled.push((a, FiberElement::scalar(z)));
    }
    let sec = Section::from_entries(&base, pulled)?;
    let big = phi_transport(&lifted, &sec)?;
    let mut bad = 0;
    for g in 0..fixture.group_view.num_arrows() {
        let v = big.value(g);
        for (k, (_, a)) in lifted.blocks[g].iter().enumerate() {
            let expect = psi_of[a];
            let got = if v.blocks.is_empty() { crate::C64::new(0.0, 0.0) } else { v.blocks[k][(0, 0)] };
            if got != expect && !(expect.norm() == 0.0 && got.norm() == 0.0) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{check_bundle_axioms, ConcreteBundle};
    use crate::rng;

    fn pairs<'b>(b: &'b dyn FellBundle, seed: u64, n: usize) -> Vec<(String, Section<'b>, Section<'b>)> {
        let all: Vec<ArrowId> = (0..b.view().num_arrows()).collect();
        (0..n)
            .map(|i| {
                let f = Section::random(b, &all, &mut rng::stream(seed, 2 * i as u64)).unwrap();
                let h = Section::random(b, &all, &mut rng::stream(seed, 2 * i as u64 + 1)).unwrap();
                (format!("pair {i}"), f, h)
            })
            .collect()
    }

    #[test]
    fn swap_lift_dimensions_and_axioms() {
        let fx = swap_fixture().unwrap();
        let base = ConcreteBundle::trivial(fx.base_view.clone(), 1).unwrap();
        let lifted = lift_to_group_bundle(&base, fx.group_view.clone()).unwrap();
        for g in 0..2 {
            assert_eq!(lifted.shape(g).dim(), 2);
        }
        assert!(check_bundle_axioms(&lifted, 0, 30).passed());
        let rep = reduction_equivalence_check(&lifted, &pairs(&base, 1, 20), &[0, 1, 2, 3]).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().next());
    }

    #[test]
    fn degenerate_action_lifts_to_identity_only() {
        let elems = GroupElem::cyclic(3).unwrap();
        let sys = PartialActionSystem::degenerate("degenerate Z/3", elems.clone(), 2);
        let pts = vec![Point::Index(0), Point::Index(1)];
        let (view, _) = crate::partial::build_transformation_groupoid(&sys, &pts, 1, false).unwrap();
        let base = ConcreteBundle::trivial(Arc::new(view), 1).unwrap();
        let group = Arc::new(builders::cyclic(3).unwrap());
        let lifted = lift_to_group_bundle(&base, group.clone()).unwrap();
        for g in 0..3 {
            let dim = lifted.shape(g).dim();
            if group.is_unit_arrow(g) {
                assert_eq!(dim, 2);
            } else {
                assert_eq!(dim, 0);
            }
        }
    }

    #[test]
    fn not_action_closed_is_named() {
        let sys = PartialActionSystem::swap_z2();
        let err = check_action_closed(&sys, &[Point::Index(0)], &builders::cyclic(2).unwrap()).unwrap_err();
        assert!(err.to_string().contains("sends 0 to 1"), "{err}");
    }

    #[test]
    fn shift_lift_dims_match_domains() {
        let fx = shift_fixture(1, 2).unwrap();
        let base = ConcreteBundle::trivial(fx.base_view.clone(), 1).unwrap();
        let lifted = lift_to_group_bundle(&base, fx.group_view.clone()).unwrap();
        let sys = PartialActionSystem::free_shift(2).unwrap();
        let sample = crate::partial::shift_depth_sample(2, 2);
        for g in 0..fx.group_view.num_arrows() {
            let Payload::Group { element, .. } = fx.group_view.payload(g) else { panic!() };
            let dom = sample
                .iter()
                .filter(|x| sys.act(element, x).is_some_and(|y| sample.contains(&y)))
                .count();
            assert_eq!(lifted.shape(g).dim(), dom, "{element}");
        }
        assert!(check_bundle_axioms(&lifted, 0, 10).passed());
    }

    #[test]
    fn unit_sections_go_to_identity() {
        let fx = swap_fixture().unwrap();
        let base = ConcreteBundle::trivial(fx.base_view.clone(), 2).unwrap();
        let lifted = lift_to_group_bundle(&base, fx.group_view.clone()).unwrap();
        let units: Vec<ArrowId> = (0..2).map(|u| fx.base_view.unit_arrow(u)).collect();
        let f = Section::random(&base, &units, &mut rng::stream(0, 0)).unwrap();
        let pf = phi_transport(&lifted, &f).unwrap();
        let supp: Vec<_> = pf.support().collect();
        assert_eq!(supp.len(), 1);
        assert!(fx.group_view.is_unit_arrow(supp[0]));
        let r = pf.reduced_norm(&ReducedOptions::default()).unwrap().value;
        assert!((r - f.sup_norm()).abs() < 1e-9);
    }

    #[test]
    fn steinberg_sign_is_plus() {
        let (rep, s) = steinberg_report(2, 3, 4);
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert_eq!(s.valid_signs, vec![GeneratorSign::Plus]);
    }

    #[test]
    fn triangle_identity() {
        let fx = shift_fixture(2, 3).unwrap();
        let f = |p: &Payload| match p {
            Payload::Deaconu { lag, range, .. } => crate::C64::new(*lag as f64 + 0.5, range.to_string().len() as f64),
            _ => crate::C64::new(0.0, 0.0),
        };
        assert_eq!(steinberg_transport_mismatches(&fx, &f).unwrap(), 0);
    }
}
