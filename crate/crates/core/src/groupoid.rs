//! Explicitly enumerated groupoids: units, arrows, composition, inverses,
//! fibers, and length functions.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::group::GroupElem;
use crate::report::{CheckReport, CheckRow};
use crate::shift::EvPeriodicPoint;

pub type UnitId = usize;
pub type ArrowId = usize;

/// A unit, encoded either by an index or by an exact shift-space point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Point {
    Index(u32),
    Seq(EvPeriodicPoint),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Index(i) => write!(f, "{i}"),
            Point::Seq(p) => write!(f, "{p}"),
        }
    }
}

/// Structural arrow data; two arrows are the same iff their payloads are
/// equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Payload {
    /// `(range, source)` in a pair groupoid.
    Pair { range: u32, source: u32 },
    /// `(g, x)` in a group bundle: a group acting trivially on a set.
    Group { element: GroupElem, point: Point },
    /// `(g, x)` in a transformation groupoid; source `x`, range `g·x`.
    Transformation { element: GroupElem, point: Point },
    /// `(x, k, y)` in a Deaconu-Renault groupoid.
    Deaconu { range: Point, lag: i64, source: Point },
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Pair { range, source } => write!(f, "({range}<-{source})"),
            Payload::Group { element, point } => write!(f, "({element} @ {point})"),
            Payload::Transformation { element, point } => write!(f, "({element}, {point})"),
            Payload::Deaconu { range, lag, source } => write!(f, "({range}, {lag}, {source})"),
        }
    }
}

impl Payload {
    fn compose(&self, other: &Payload) -> Result<Payload> {
        Ok(match (self, other) {
            (Payload::Pair { range, .. }, Payload::Pair { source, .. }) => Payload::Pair {
                range: *range,
                source: *source,
            },
            (Payload::Group { element: g, point }, Payload::Group { element: h, .. }) => {
                Payload::Group {
                    element: g.mul(h)?,
                    point: point.clone(),
                }
            }
            (
                Payload::Transformation { element: g, .. },
                Payload::Transformation { element: h, point },
            ) => Payload::Transformation {
                element: g.mul(h)?,
                point: point.clone(),
            },
            (
                Payload::Deaconu { range, lag: k, .. },
                Payload::Deaconu {
                    lag: l, source, ..
                },
            ) => Payload::Deaconu {
                range: range.clone(),
                lag: k + l,
                source: source.clone(),
            },
            _ => return input(format!("mixed payload kinds {self} and {other}")),
        })
    }

    fn inverse(&self, range: &Point) -> Payload {
        match self {
            Payload::Pair { range, source } => Payload::Pair {
                range: *source,
                source: *range,
            },
            Payload::Group { element, point } => Payload::Group {
                element: element.inverse(),
                point: point.clone(),
            },
            Payload::Transformation { element, .. } => Payload::Transformation {
                element: element.inverse(),
                point: range.clone(),
            },
            Payload::Deaconu { range, lag, source } => Payload::Deaconu {
                range: source.clone(),
                lag: -lag,
                source: range.clone(),
            },
        }
    }
}

/// How unit arrows are encoded for a given family of payloads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitKind {
    Pair,
    Group(GroupElem),
    Transformation(GroupElem),
    Deaconu,
}

impl UnitKind {
    fn unit(&self, x: &Point) -> Result<Payload> {
        Ok(match self {
            UnitKind::Pair => match x {
                Point::Index(i) => Payload::Pair {
                    range: *i,
                    source: *i,
                },
                Point::Seq(_) => return input("pair groupoid units must be indices"),
            },
            UnitKind::Group(e) => Payload::Group {
                element: e.identity_like(),
                point: x.clone(),
            },
            UnitKind::Transformation(e) => Payload::Transformation {
                element: e.identity_like(),
                point: x.clone(),
            },
            UnitKind::Deaconu => Payload::Deaconu {
                range: x.clone(),
                lag: 0,
                source: x.clone(),
            },
        })
    }
}

#[derive(Clone, Debug)]
pub struct Arrow {
    pub payload: Payload,
    pub src: UnitId,
    pub rng: UnitId,
}

/// Result of composing two arrows of a view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compose {
    Arrow(ArrowId),
    NotComposable,
    /// Composable, but the composite was not enumerated.
    OutOfView,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Source,
    Range,
}

/// An enumerated set of arrows closed under taking units, with
/// canonical (payload-sorted) ids.
#[derive(Clone, Debug)]
pub struct FiniteGroupoidView {
    description: String,
    unit_kind: UnitKind,
    units: Vec<Point>,
    unit_index: HashMap<Point, UnitId>,
    arrows: Vec<Arrow>,
    index: HashMap<Payload, ArrowId>,
    inverse: Vec<Option<ArrowId>>,
    unit_arrow: Vec<ArrowId>,
    src_fiber: Vec<Vec<ArrowId>>,
    rng_fiber: Vec<Vec<ArrowId>>,
    overrides: HashMap<(ArrowId, ArrowId), Compose>,
    closed: bool,
}

impl FiniteGroupoidView {
    /// Builds a view from units and `(payload, source, range)` triples.
    /// Unit arrows are added, duplicates merged, and ids assigned in
    /// payload order.
    pub fn from_arrows(
        description: impl Into<String>,
        unit_kind: UnitKind,
        units: Vec<Point>,
        arrows: Vec<(Payload, Point, Point)>,
    ) -> Result<Self> {
        let mut units = units;
        units.sort();
        units.dedup();
        let unit_index: HashMap<Point, UnitId> =
            units.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

        let mut triples: Vec<(Payload, UnitId, UnitId)> = Vec::with_capacity(arrows.len() + units.len());
        for x in &units {
            let u = unit_index[x];
            triples.push((unit_kind.unit(x)?, u, u));
        }
        for (p, s, r) in arrows {
            let s = *unit_index
                .get(&s)
                .ok_or_else(|| Error::UnknownUnit(s.to_string()))?;
            let r = *unit_index
                .get(&r)
                .ok_or_else(|| Error::UnknownUnit(r.to_string()))?;
            triples.push((p, s, r));
        }
        triples.sort_by(|a, b| a.0.cmp(&b.0));
        triples.dedup_by(|a, b| a.0 == b.0);

        let arrows: Vec<Arrow> = triples
            .into_iter()
            .map(|(payload, src, rng)| Arrow { payload, src, rng })
            .collect();
        let index: HashMap<Payload, ArrowId> = arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.payload.clone(), i))
            .collect();
        let mut src_fiber = vec![Vec::new(); units.len()];
        let mut rng_fiber = vec![Vec::new(); units.len()];
        for (i, a) in arrows.iter().enumerate() {
            src_fiber[a.src].push(i);
            rng_fiber[a.rng].push(i);
        }
        let inverse = arrows
            .iter()
            .map(|a| index.get(&a.payload.inverse(&units[a.rng])).copied())
            .collect();
        let unit_arrow = units
            .iter()
            .map(|x| Ok(index[&unit_kind.unit(x)?]))
            .collect::<Result<Vec<_>>>()?;

        let mut view = FiniteGroupoidView {
            description: description.into(),
            unit_kind,
            units,
            unit_index,
            arrows,
            index,
            inverse,
            unit_arrow,
            src_fiber,
            rng_fiber,
            overrides: HashMap::new(),
            closed: false,
        };
        view.closed = view.compute_closed();
        Ok(view)
    }

    fn compute_closed(&self) -> bool {
        if self.inverse.iter().any(Option::is_none) {
            return false;
        }
        (0..self.arrows.len()).into_par_iter().all(|b| {
            self.src_fiber[self.arrows[b].rng]
                .iter()
                .all(|&a| matches!(self.compose(a, b), Compose::Arrow(_)))
        })
    }

    pub fn describe(&self) -> &str {
        &self.description
    }

    pub fn unit_kind(&self) -> &UnitKind {
        &self.unit_kind
    }

    /// True when every composite and inverse lies in the view.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn units(&self) -> &[Point] {
        &self.units
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn unit(&self, u: UnitId) -> &Point {
        &self.units[u]
    }

    pub fn unit_id(&self, x: &Point) -> Result<UnitId> {
        self.unit_index
            .get(x)
            .copied()
            .ok_or_else(|| Error::UnknownUnit(x.to_string()))
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn payload(&self, a: ArrowId) -> &Payload {
        &self.arrows[a].payload
    }

    pub fn label(&self, a: ArrowId) -> String {
        self.arrows[a].payload.to_string()
    }

    pub fn src(&self, a: ArrowId) -> UnitId {
        self.arrows[a].src
    }

    pub fn rng(&self, a: ArrowId) -> UnitId {
        self.arrows[a].rng
    }

    pub fn find(&self, p: &Payload) -> Option<ArrowId> {
        self.index.get(p).copied()
    }

    pub fn inverse(&self, a: ArrowId) -> Option<ArrowId> {
        self.inverse[a]
    }

    /// Inverse, or a budget error when it was not enumerated.
    pub fn inverse_strict(&self, a: ArrowId) -> Result<ArrowId> {
        self.inverse[a].ok_or_else(|| Error::Budget {
            left: self.label(a),
            right: "inverse".into(),
        })
    }

    pub fn unit_arrow(&self, u: UnitId) -> ArrowId {
        self.unit_arrow[u]
    }

    pub fn is_unit_arrow(&self, a: ArrowId) -> bool {
        let arrow = &self.arrows[a];
        arrow.src == arrow.rng && self.unit_arrow[arrow.src] == a
    }

    /// `G_x` (source side) or `G^x` (range side), ascending ids.
    pub fn fiber(&self, x: &Point, side: Side) -> Result<&[ArrowId]> {
        let u = self.unit_id(x)?;
        Ok(match side {
            Side::Source => &self.src_fiber[u],
            Side::Range => &self.rng_fiber[u],
        })
    }

    pub fn source_fiber(&self, u: UnitId) -> &[ArrowId] {
        &self.src_fiber[u]
    }

    pub fn range_fiber(&self, u: UnitId) -> &[ArrowId] {
        &self.rng_fiber[u]
    }

    /// The product `a·b` (first `b`, then `a`).
    pub fn compose(&self, a: ArrowId, b: ArrowId) -> Compose {
        if let Some(c) = self.overrides.get(&(a, b)) {
            return *c;
        }
        if self.arrows[a].src != self.arrows[b].rng {
            return Compose::NotComposable;
        }
        match self.arrows[a].payload.compose(&self.arrows[b].payload) {
            Ok(p) => match self.index.get(&p) {
                Some(&c) => Compose::Arrow(c),
                None => Compose::OutOfView,
            },
            Err(_) => Compose::NotComposable,
        }
    }

    /// As [`compose`](Self::compose), with the two failure cases as errors.
    pub fn compose_strict(&self, a: ArrowId, b: ArrowId) -> Result<ArrowId> {
        match self.compose(a, b) {
            Compose::Arrow(c) => Ok(c),
            Compose::NotComposable => Err(Error::NotComposable {
                left: self.label(a),
                right: self.label(b),
            }),
            Compose::OutOfView => Err(Error::Budget {
                left: self.label(a),
                right: self.label(b),
            }),
        }
    }

    /// Replaces an entry of the inverse table (fault injection for tests).
    pub fn corrupt_inverse(&mut self, a: ArrowId, target: Option<ArrowId>) {
        self.inverse[a] = target;
        self.closed = self.compute_closed();
    }

    /// Overrides one composition result (fault injection for tests).
    pub fn corrupt_composition(&mut self, a: ArrowId, b: ArrowId, result: Compose) {
        self.overrides.insert((a, b), result);
        self.closed = self.compute_closed();
    }

    /// The subview spanned by all units and the arrows selected by `keep`.
    pub fn restrict(&self, description: impl Into<String>, keep: impl Fn(ArrowId) -> bool) -> Result<Self> {
        let arrows = (0..self.arrows.len())
            .filter(|a| keep(*a))
            .map(|a| {
                let arrow = &self.arrows[a];
                (
                    arrow.payload.clone(),
                    self.units[arrow.src].clone(),
                    self.units[arrow.rng].clone(),
                )
            })
            .collect();
        FiniteGroupoidView::from_arrows(description, self.unit_kind.clone(), self.units.clone(), arrows)
    }
}

/// A length function tabulated on the arrows of one view.
#[derive(Clone, Debug)]
pub struct LengthFn {
    name: String,
    values: Vec<f64>,
}

impl LengthFn {
    pub fn from_fn(view: &FiniteGroupoidView, name: impl Into<String>, f: impl Fn(ArrowId) -> f64) -> Self {
        LengthFn {
            name: name.into(),
            values: (0..view.num_arrows()).map(f).collect(),
        }
    }

    pub fn from_payload(
        view: &FiniteGroupoidView,
        name: impl Into<String>,
        f: impl Fn(&Payload) -> f64,
    ) -> Self {
        LengthFn::from_fn(view, name, |a| f(view.payload(a)))
    }

    pub fn zero(view: &FiniteGroupoidView) -> Self {
        LengthFn::from_fn(view, "zero", |_| 0.0)
    }

    /// `0` on unit arrows and `1` elsewhere.
    pub fn discrete(view: &FiniteGroupoidView) -> Self {
        LengthFn::from_fn(view, "discrete", |a| if view.is_unit_arrow(a) { 0.0 } else { 1.0 })
    }

    /// Word length of the group label, for group and transformation views.
    pub fn word_length(view: &FiniteGroupoidView) -> Self {
        LengthFn::from_payload(view, "word-length", |p| match p {
            Payload::Group { element, .. } | Payload::Transformation { element, .. } => {
                element.length() as f64
            }
            _ => 0.0,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, a: ArrowId) -> f64 {
        self.values[a]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

const LENGTH_TOL: f64 = 1e-12;

/// Exhaustive check of the groupoid and length-function axioms on every
/// in-view instance. Violations become failing rows; each check also has an
/// `all` row counting its violations.
pub fn check_axioms(view: &FiniteGroupoidView, length: Option<&LengthFn>) -> CheckReport {
    let mut rep = CheckReport::new("axioms");
    rep.system = view.describe().to_string();
    rep.budget = if view.is_closed() {
        "closed view".into()
    } else {
        "truncated view: associativity checked where both partial products are enumerated".into()
    };
    let label = |a: ArrowId| view.label(a);
    let mut violations: Vec<(&'static str, String)> = Vec::new();

    for a in 0..view.num_arrows() {
        let (s, r) = (view.src(a), view.rng(a));
        match view.inverse(a) {
            None => violations.push(("inverse-exists", label(a))),
            Some(i) => {
                if view.inverse(i) != Some(a) {
                    violations.push(("inverse-involutive", label(a)));
                }
                if view.src(i) != r || view.rng(i) != s {
                    violations.push(("inverse-endpoints", label(a)));
                }
                if view.compose(a, i) != Compose::Arrow(view.unit_arrow(r)) {
                    violations.push(("inverse-right", label(a)));
                }
                if view.compose(i, a) != Compose::Arrow(view.unit_arrow(s)) {
                    violations.push(("inverse-left", label(a)));
                }
            }
        }
        if view.compose(view.unit_arrow(r), a) != Compose::Arrow(a) {
            violations.push(("unit-left", label(a)));
        }
        if view.compose(a, view.unit_arrow(s)) != Compose::Arrow(a) {
            violations.push(("unit-right", label(a)));
        }
    }

    // composable pairs: source/range law, and triples for associativity
    let per_b: Vec<(Vec<(&'static str, String)>, usize, usize)> = (0..view.num_arrows())
        .into_par_iter()
        .map(|b| {
            let mut v = Vec::new();
            let (mut checked, mut skipped) = (0usize, 0usize);
            for &a in view.source_fiber(view.rng(b)) {
                let ab = match view.compose(a, b) {
                    Compose::Arrow(ab) => ab,
                    Compose::NotComposable => {
                        v.push(("composable", format!("{} . {}", label(a), label(b))));
                        continue;
                    }
                    Compose::OutOfView => {
                        skipped += view.range_fiber(view.src(b)).len();
                        continue;
                    }
                };
                if view.src(ab) != view.src(b) || view.rng(ab) != view.rng(a) {
                    v.push(("source-range-law", format!("{} . {}", label(a), label(b))));
                }
                for &c in view.range_fiber(view.src(b)) {
                    let (Compose::Arrow(bc), Compose::Arrow(abc)) = (view.compose(b, c), view.compose(ab, c)) else {
                        skipped += 1;
                        continue;
                    };
                    match view.compose(a, bc) {
                        Compose::Arrow(abc2) => {
                            checked += 1;
                            if abc2 != abc {
                                v.push((
                                    "associativity",
                                    format!("{} . {} . {}", label(a), label(b), label(c)),
                                ));
                            }
                        }
                        _ => skipped += 1,
                    }
                }
            }
            (v, checked, skipped)
        })
        .collect();
    let (mut checked, mut skipped) = (0, 0);
    for (v, c, s) in per_b {
        violations.extend(v);
        checked += c;
        skipped += s;
    }
    rep.note(format!(
        "associativity: {checked} triples checked, {skipped} skipped (composite outside view)"
    ));

    let mut checks = vec![
        "associativity",
        "composable",
        "inverse-endpoints",
        "inverse-exists",
        "inverse-involutive",
        "inverse-left",
        "inverse-right",
        "source-range-law",
        "unit-left",
        "unit-right",
    ];

    if let Some(len) = length {
        checks.extend(["length-nonnegative", "length-units", "length-symmetric", "length-subadditive"]);
        rep.param("length", len.name());
        for a in 0..view.num_arrows() {
            let l = len.eval(a);
            if l.is_nan() || l < 0.0 {
                violations.push(("length-nonnegative", label(a)));
            }
            if view.is_unit_arrow(a) && l.abs() > LENGTH_TOL {
                violations.push(("length-units", label(a)));
            }
            if let Some(i) = view.inverse(a) {
                if (len.eval(i) - l).abs() > LENGTH_TOL {
                    violations.push(("length-symmetric", label(a)));
                }
            }
            for &c in view.range_fiber(view.src(a)) {
                if let Compose::Arrow(ac) = view.compose(a, c) {
                    if len.eval(ac) > l + len.eval(c) + LENGTH_TOL {
                        violations.push(("length-subadditive", format!("{} . {}", label(a), label(c))));
                    }
                }
            }
        }
    }

    for check in checks {
        let n = violations.iter().filter(|(c, _)| *c == check).count();
        rep.push(CheckRow::count(check, "all", n));
    }
    for (check, inst) in violations {
        rep.push(CheckRow::count(check, inst, 1));
    }
    rep.sort();
    rep
}

/// Builders for the standard finite fixtures.
pub mod builders {
    use super::*;

    /// Pair groupoid `{0..n} × {0..n}`.
    pub fn pair_groupoid(n: u32) -> Result<FiniteGroupoidView> {
        if n == 0 {
            return input("pair groupoid needs n > 0");
        }
        let units = (0..n).map(Point::Index).collect();
        let mut arrows = Vec::new();
        for r in 0..n {
            for s in 0..n {
                arrows.push((Payload::Pair { range: r, source: s }, Point::Index(s), Point::Index(r)));
            }
        }
        FiniteGroupoidView::from_arrows(format!("pair({n})"), UnitKind::Pair, units, arrows)
    }

    /// Units only: `n` unit arrows.
    pub fn unit_space(n: u32) -> Result<FiniteGroupoidView> {
        if n == 0 {
            return input("unit space needs n > 0");
        }
        FiniteGroupoidView::from_arrows(
            format!("units({n})"),
            UnitKind::Pair,
            (0..n).map(Point::Index).collect(),
            Vec::new(),
        )
    }

    /// The group bundle `Γ × {0..points}` with trivial action, over the given
    /// elements (a whole finite group, or a ball in an infinite one).
    pub fn group_bundle(
        name: &str,
        elements: &[GroupElem],
        points: u32,
    ) -> Result<FiniteGroupoidView> {
        let Some(first) = elements.first() else {
            return input("group needs at least one element");
        };
        if points == 0 {
            return input("need at least one point");
        }
        let units: Vec<Point> = (0..points).map(Point::Index).collect();
        let mut arrows = Vec::new();
        for x in &units {
            for g in elements {
                arrows.push((
                    Payload::Group {
                        element: g.clone(),
                        point: x.clone(),
                    },
                    x.clone(),
                    x.clone(),
                ));
            }
        }
        let desc = if points == 1 {
            name.to_string()
        } else {
            format!("{name} x {points} points")
        };
        FiniteGroupoidView::from_arrows(desc, UnitKind::Group(first.identity_like()), units, arrows)
    }

    pub fn group_groupoid(name: &str, elements: &[GroupElem]) -> Result<FiniteGroupoidView> {
        group_bundle(name, elements, 1)
    }

    pub fn cyclic(n: u32) -> Result<FiniteGroupoidView> {
        group_groupoid(&format!("Z/{n}"), &GroupElem::cyclic(n)?)
    }

    pub fn symmetric(n: u32) -> Result<FiniteGroupoidView> {
        group_groupoid(&format!("S_{n}"), &GroupElem::symmetric(n)?)
    }

    /// The ball `{-radius..=radius}` in `Z`, written as words in `F_1`.
    pub fn integer_ball(radius: usize) -> FiniteGroupoidView {
        group_groupoid(&format!("Z ball({radius})"), &GroupElem::free_ball(1, radius))
            .expect("nonempty ball")
    }

    /// The ball of the given radius in `F_rank`.
    pub fn free_ball(rank: u32, radius: usize) -> Result<FiniteGroupoidView> {
        if rank == 0 {
            return input("free group rank must be positive");
        }
        group_groupoid(&format!("F_{rank} ball({radius})"), &GroupElem::free_ball(rank, radius))
    }
}

#[cfg(test)]
mod tests {
    use super::builders::*;
    use super::*;

    #[test]
    fn pair_composition() {
        let g = pair_groupoid(3).unwrap();
        assert_eq!(g.num_arrows(), 9);
        assert_eq!(g.num_units(), 3);
        let a = |r, s| g.find(&Payload::Pair { range: r, source: s }).unwrap();
        assert_eq!(g.compose(a(1, 2), a(2, 0)), Compose::Arrow(a(1, 0)));
        assert_eq!(g.compose(a(1, 0), a(2, 0)), Compose::NotComposable);
        assert_eq!(g.compose(g.unit_arrow(1), a(1, 2)), Compose::Arrow(a(1, 2)));
        assert!(g.is_closed());
    }

    #[test]
    fn fibers() {
        let g = pair_groupoid(3).unwrap();
        for x in g.units() {
            assert_eq!(g.fiber(x, Side::Source).unwrap().len(), 3);
        }
        assert!(g.fiber(&Point::Index(7), Side::Source).is_err());
        let z2 = cyclic(2).unwrap();
        assert_eq!(z2.fiber(&Point::Index(0), Side::Source).unwrap().len(), 2);
        let u = unit_space(2).unwrap();
        assert_eq!(u.fiber(&Point::Index(1), Side::Range).unwrap(), &[1]);
    }

    #[test]
    fn builder_sizes_and_axioms() {
        let p = group_bundle("Z/2", &GroupElem::cyclic(2).unwrap(), 3).unwrap();
        assert_eq!((p.num_arrows(), p.num_units()), (6, 3));
        for v in [
            pair_groupoid(4).unwrap(),
            cyclic(4).unwrap(),
            symmetric(3).unwrap(),
            p,
            unit_space(3).unwrap(),
        ] {
            let l = LengthFn::word_length(&v);
            assert!(check_axioms(&v, Some(&l)).passed(), "{}", v.describe());
        }
        assert!(pair_groupoid(0).is_err());
    }

    #[test]
    fn discrete_length_on_pair() {
        let g = pair_groupoid(4).unwrap();
        let rep = check_axioms(&g, Some(&LengthFn::discrete(&g)));
        assert!(rep.passed());
    }

    #[test]
    fn corrupted_inverse_is_reported() {
        let mut g = cyclic(4).unwrap();
        let one = g
            .find(&Payload::Group {
                element: GroupElem::Mod { k: 1, n: 4 },
                point: Point::Index(0),
            })
            .unwrap();
        g.corrupt_inverse(one, Some(one));
        let rep = check_axioms(&g, None);
        assert!(!rep.passed());
        assert!(rep.failures().any(|r| r.instance.contains("1 mod 4")));
    }

    #[test]
    fn truncated_integer_ball() {
        let z = integer_ball(2);
        assert_eq!(z.num_arrows(), 5);
        assert!(!z.is_closed());
        let rep = check_axioms(&z, Some(&LengthFn::word_length(&z)));
        assert!(rep.passed());
    }
}
