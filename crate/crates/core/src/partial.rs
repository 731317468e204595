//! Partial actions and their transformation groupoids.
//!
//! The shift model lets `F_d` act on the full `d`-shift: the generator
//! `a_i` prepends the symbol `i mod d` (so for `d = 2`, `a_1` prepends `1`
//! and `a_2` prepends `0`), and `a_i⁻¹` deletes a leading `i mod d`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{input, Result};
use crate::group::GroupElem;
use crate::groupoid::{FiniteGroupoidView, LengthFn, Payload, Point, UnitKind};
use crate::report::{CheckReport, CheckRow};
use crate::shift::EvPeriodicPoint;
use crate::words::Word;

/// Symbol prepended by the generator `a_i` in the shift model.
pub fn generator_symbol(d: u32, i: i32) -> u32 {
    i.unsigned_abs() % d
}

/// Symbols spelled by a positive word.
pub fn spell(d: u32, w: &Word) -> Vec<u32> {
    w.letters().iter().map(|l| generator_symbol(d, *l)).collect()
}

#[derive(Clone, Debug)]
pub enum PartialActionSystem {
    /// `F_d` on the full `d`-shift.
    FreeShift { d: u32 },
    /// A finite group on `0..points`, given by an explicit table; missing
    /// entries are outside the domain.
    Finite {
        name: String,
        elements: Vec<GroupElem>,
        points: u32,
        table: BTreeMap<(GroupElem, u32), u32>,
    },
}

impl PartialActionSystem {
    pub fn free_shift(d: u32) -> Result<Self> {
        if d < 2 {
            return input("shift arity must be at least 2");
        }
        Ok(PartialActionSystem::FreeShift { d })
    }

    /// A global action given by `f(g, x)`.
    pub fn global(
        name: &str,
        elements: Vec<GroupElem>,
        points: u32,
        f: impl Fn(&GroupElem, u32) -> u32,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for g in &elements {
            for x in 0..points {
                let y = f(g, x);
                if y >= points {
                    return input(format!("{g} sends {x} outside 0..{points}"));
                }
                table.insert((g.clone(), x), y);
            }
        }
        Ok(PartialActionSystem::Finite {
            name: name.to_string(),
            elements,
            points,
            table,
        })
    }

    /// `Z/2` swapping two points.
    pub fn swap_z2() -> Self {
        PartialActionSystem::global("Z/2 swap on 2 points", GroupElem::cyclic(2).expect("n>0"), 2, |g, x| match g {
            GroupElem::Mod { k, .. } => (x + k) % 2,
            _ => x,
        })
        .expect("valid table")
    }

    /// The degenerate partial action: only the identity has nonempty domain.
    pub fn degenerate(name: &str, elements: Vec<GroupElem>, points: u32) -> Self {
        let mut table = BTreeMap::new();
        for g in elements.iter().filter(|g| g.is_identity()) {
            for x in 0..points {
                table.insert((g.clone(), x), x);
            }
        }
        PartialActionSystem::Finite {
            name: name.to_string(),
            elements,
            points,
            table,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PartialActionSystem::FreeShift { d } => format!("F_{d} on full {d}-shift"),
            PartialActionSystem::Finite { name, .. } => name.clone(),
        }
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            PartialActionSystem::FreeShift { d } => GroupElem::Word(Word::identity(*d)),
            PartialActionSystem::Finite { elements, .. } => elements[0].identity_like(),
        }
    }

    /// Group elements of length at most `radius`.
    pub fn ball(&self, radius: usize) -> Vec<GroupElem> {
        match self {
            PartialActionSystem::FreeShift { d } => GroupElem::free_ball(*d, radius),
            PartialActionSystem::Finite { elements, .. } => {
                let mut v: Vec<GroupElem> = elements.iter().filter(|g| g.length() <= radius).cloned().collect();
                v.sort();
                v
            }
        }
    }

    /// `θ_g(x)`, or `None` outside the domain.
    pub fn act(&self, g: &GroupElem, x: &Point) -> Option<Point> {
        match (self, g, x) {
            (PartialActionSystem::FreeShift { d }, GroupElem::Word(w), Point::Seq(p)) => {
                act_shift(*d, w, p).map(Point::Seq)
            }
            (PartialActionSystem::Finite { table, .. }, _, Point::Index(i)) => {
                table.get(&(g.clone(), *i)).map(|y| Point::Index(*y))
            }
            _ => None,
        }
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        a.mul(b)
    }
}

/// Shift-model action of a reduced word.
pub fn act_shift(d: u32, w: &Word, x: &EvPeriodicPoint) -> Option<EvPeriodicPoint> {
    let (u, v) = w.uv_normal_form()?;
    let vs = spell(d, &v);
    if !x.starts_with(&vs) {
        return None;
    }
    Some(x.shift_by(vs.len()).prepend_word(&spell(d, &u)))
}

/// Builds `Γ ⋉ X` over the points `base` (plus, when `extend` is set, their
/// images under the radius ball), with arrows `(g, x)` for `ℓ(g) ≤ radius`
/// whose source and range both lie in the point set. Length is `ℓ(g)`.
pub fn build_transformation_groupoid(
    system: &PartialActionSystem,
    base: &[Point],
    radius: usize,
    extend: bool,
) -> Result<(FiniteGroupoidView, LengthFn)> {
    if base.is_empty() {
        return input("need at least one base point");
    }
    let ball = system.ball(radius);
    let mut points: BTreeSet<Point> = base.iter().cloned().collect();
    if extend {
        for x in base {
            for g in &ball {
                if let Some(y) = system.act(g, x) {
                    points.insert(y);
                }
            }
        }
    }
    let mut arrows = Vec::new();
    for x in &points {
        for g in &ball {
            if let Some(y) = system.act(g, x) {
                if points.contains(&y) {
                    arrows.push((
                        Payload::Transformation {
                            element: g.clone(),
                            point: x.clone(),
                        },
                        x.clone(),
                        y,
                    ));
                }
            }
        }
    }
    let view = FiniteGroupoidView::from_arrows(
        format!("{} ltimes X, radius {radius}, {} points", system.describe(), points.len()),
        UnitKind::Transformation(system.identity()),
        points.into_iter().collect(),
        arrows,
    )?;
    let len = LengthFn::word_length(&view);
    Ok((view, len))
}

/// Exhaustive check of `θ_e = id` and of the partial-action law: if
/// `θ_b(x)` and `θ_a(θ_b(x))` are defined then `θ_{ab}(x)` is defined and
/// equal.
pub fn check_partial_action(system: &PartialActionSystem, points: &[Point], radius: usize) -> CheckReport {
    let mut rep = CheckReport::new("partial-action");
    rep.system = system.describe();
    rep.budget = format!("radius {radius}, {} points", points.len());
    let ball = system.ball(radius);
    let e = system.identity();
    let mut id_bad = 0;
    let mut law_bad = 0;
    let mut checked = 0usize;
    for x in points {
        if system.act(&e, x).as_ref() != Some(x) {
            id_bad += 1;
            rep.push(CheckRow::count("identity", x.to_string(), 1));
        }
        for b in &ball {
            let Some(bx) = system.act(b, x) else { continue };
            for a in &ball {
                let Some(abx) = system.act(a, &bx) else { continue };
                checked += 1;
                let ok = system
                    .mul(a, b)
                    .ok()
                    .and_then(|ab| system.act(&ab, x))
                    .is_some_and(|y| y == abx);
                if !ok {
                    law_bad += 1;
                    rep.push(CheckRow::count("law", format!("{a} . {b} @ {x}"), 1));
                }
            }
        }
    }
    rep.push(CheckRow::count("identity", "all", id_bad));
    rep.push(CheckRow::count("law", "all", law_bad));
    rep.note(format!("{checked} defined pairs checked"));
    rep.sort();
    rep
}

/// The preimage set `T^{-depth}(0^∞)` of the full shift: all points
/// `s_1…s_depth 0^∞`, in canonical order.
pub fn shift_depth_sample(d: u32, depth: usize) -> Vec<Point> {
    let mut out = vec![EvPeriodicPoint::constant(0)];
    for _ in 0..depth {
        out = out
            .iter()
            .flat_map(|p| (0..d).map(move |s| p.prepend(s)))
            .collect();
    }
    let mut pts: Vec<Point> = out.into_iter().map(Point::Seq).collect();
    pts.sort();
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::check_axioms;

    fn w(s: &str) -> GroupElem {
        GroupElem::Word(Word::parse(2, s).unwrap())
    }

    fn zero() -> Point {
        Point::Seq(EvPeriodicPoint::constant(0))
    }

    #[test]
    fn shift_action_examples() {
        let sys = PartialActionSystem::free_shift(2).unwrap();
        let y = sys.act(&w("a1"), &zero()).unwrap();
        assert_eq!(y.to_string(), "1(0)^inf");
        assert!(sys.act(&w("A1"), &zero()).is_none());
        let p = Point::Seq(EvPeriodicPoint::new(vec![], vec![1, 0]).unwrap());
        assert!(sys.act(&w("A2 a1"), &p).is_none());
        assert!(sys.act(&w("A2 a1"), &zero()).is_none());
    }

    #[test]
    fn swap_groupoid_has_four_arrows() {
        let sys = PartialActionSystem::swap_z2();
        let (v, l) = build_transformation_groupoid(&sys, &[Point::Index(0)], 1, true).unwrap();
        assert_eq!(v.num_arrows(), 4);
        assert!(check_axioms(&v, Some(&l)).passed());
        let (v0, _) = build_transformation_groupoid(&sys, &[Point::Index(0), Point::Index(1)], 0, false).unwrap();
        assert_eq!(v0.num_arrows(), 2);
    }

    #[test]
    fn shift_groupoid_radius_one() {
        let sys = PartialActionSystem::free_shift(2).unwrap();
        let (v, l) = build_transformation_groupoid(&sys, &[zero()], 1, true).unwrap();
        // points 0^∞ and 10^∞; at 0^∞ the arrows are e, a1, a2 and A2 (a2 and
        // A2 both fix 0^∞), while A1 is off-cylinder
        let at_zero: Vec<String> = v
            .source_fiber(v.unit_id(&zero()).unwrap())
            .iter()
            .map(|a| v.label(*a))
            .collect();
        assert_eq!(at_zero.len(), 4, "{at_zero:?}");
        assert!(!at_zero.iter().any(|l| l.starts_with("(A1")));
        assert!(check_axioms(&v, Some(&l)).passed());
    }

    #[test]
    fn partial_action_law_on_depth_sample() {
        let sys = PartialActionSystem::free_shift(2).unwrap();
        let pts = shift_depth_sample(2, 3);
        assert_eq!(pts.len(), 8);
        assert!(check_partial_action(&sys, &pts, 2).passed());
        let deg = PartialActionSystem::degenerate("degenerate Z/3", GroupElem::cyclic(3).unwrap(), 2);
        assert!(check_partial_action(&deg, &[Point::Index(0), Point::Index(1)], 1).passed());
    }

    #[test]
    fn fiber_injects_into_ball() {
        let sys = PartialActionSystem::free_shift(2).unwrap();
        let pts = shift_depth_sample(2, 4);
        let (v, _) = build_transformation_groupoid(&sys, &pts, 2, false).unwrap();
        let ball = Word::ball(2, 2).len();
        for u in 0..v.num_units() {
            assert!(v.source_fiber(u).len() <= ball);
        }
    }
}
