//! Deaconu-Renault groupoids of local homeomorphisms: full shifts,
//! finite-state maps, and path spaces of finite graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{input, Result};
use crate::group::GroupElem;
use crate::groupoid::{FiniteGroupoidView, LengthFn, Payload, Point, UnitKind};
use crate::partial::act_shift;
use crate::shift::EvPeriodicPoint;
use crate::words::{GeneratorSign, Word};

/// A finite map on named states. States flagged as `boundary` stand in for
/// a truncated infinite family: their preimages are not modelled.
#[derive(Clone, Debug)]
pub struct FiniteMap {
    pub name: String,
    pub states: Vec<String>,
    pub map: Vec<usize>,
    pub boundary: Vec<bool>,
}

impl FiniteMap {
    /// The map with a fixed point `a`, `b_0 ↦ a`, and `b_n ↦ b_{n-1}`,
    /// truncated at `b_k`.
    pub fn af(k: usize) -> Self {
        let mut states = vec!["a".to_string()];
        let mut map = vec![0];
        let mut boundary = vec![false];
        for n in 0..=k {
            states.push(format!("b{n}"));
            map.push(n);
            boundary.push(n == k);
        }
        FiniteMap {
            name: format!("AF map truncated at b{k}"),
            states,
            map,
            boundary,
        }
    }
}

/// A finite directed graph whose infinite paths form the space.
#[derive(Clone, Debug)]
pub struct Graph {
    pub vertices: Vec<String>,
    /// `(src, dst, label)`, indices into `vertices`.
    pub edges: Vec<(usize, usize, String)>,
}

#[derive(Deserialize)]
struct GraphJson {
    vertices: Vec<serde_json::Value>,
    edges: Vec<EdgeJson>,
}

#[derive(Deserialize)]
struct EdgeJson {
    src: serde_json::Value,
    dst: serde_json::Value,
    #[serde(default)]
    label: Option<serde_json::Value>,
}

fn id_string(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize, String)>) -> Result<Self> {
        if vertices.is_empty() {
            return input("graph has no vertices");
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v) {
                return input(format!("duplicate vertex {v}"));
            }
        }
        for (s, t, _) in &edges {
            if *s >= vertices.len() || *t >= vertices.len() {
                return input("edge endpoint out of range");
            }
        }
        for (i, v) in vertices.iter().enumerate() {
            if !edges.iter().any(|(s, _, _)| *s == i) {
                return input(format!("vertex {v} is a sink"));
            }
        }
        Ok(Graph { vertices, edges })
    }

    /// Parses `{"vertices": [...], "edges": [{"src", "dst", "label"}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        let vertices: Vec<String> = raw.vertices.iter().map(id_string).collect();
        let pos: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut edges = Vec::new();
        for (k, e) in raw.edges.iter().enumerate() {
            let s = id_string(&e.src);
            let t = id_string(&e.dst);
            let (Some(&si), Some(&ti)) = (pos.get(s.as_str()), pos.get(t.as_str())) else {
                return input(format!("edge {k} references an unknown vertex"));
            };
            let label = e.label.as_ref().map(id_string).unwrap_or_else(|| format!("e{k}"));
            edges.push((si, ti, label));
        }
        Graph::new(vertices, edges)
    }

    /// One vertex with `d` loops.
    pub fn bouquet(d: usize) -> Self {
        Graph::new(
            vec!["v".into()],
            (0..d).map(|i| (0, 0, format!("e{i}"))).collect(),
        )
        .expect("bouquet has no sinks")
    }

    fn is_path(&self, edges: &[u32]) -> bool {
        edges
            .windows(2)
            .all(|w| self.edges[w[0] as usize].1 == self.edges[w[1] as usize].0)
    }

    fn valid_point(&self, p: &EvPeriodicPoint) -> bool {
        let per = p.period();
        let mut seq: Vec<u32> = p.preperiod().to_vec();
        seq.extend_from_slice(per);
        seq.push(per[0]);
        self.is_path(&seq)
    }
}

/// A local homeomorphism `T` with finite fibers.
#[derive(Clone, Debug)]
pub enum LocalSystem {
    FullShift { d: u32 },
    FiniteMap(FiniteMap),
    Graph(Graph),
}

/// An arrow `(x, k, y)` with a minimal witness `(m, n)`: `k = m - n`,
/// `T^m x = T^n y`, `m + n` least.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DRArrow {
    pub range: Point,
    pub lag: i64,
    pub source: Point,
    pub m: usize,
    pub n: usize,
}

impl DRArrow {
    pub fn length(&self) -> usize {
        self.m + self.n
    }

    pub fn payload(&self) -> Payload {
        Payload::Deaconu {
            range: self.range.clone(),
            lag: self.lag,
            source: self.source.clone(),
        }
    }
}

/// Ball enumeration result: arrows plus whether a truncation boundary was
/// hit (in which case counts are lower bounds).
#[derive(Clone, Debug)]
pub struct Fiber {
    pub arrows: Vec<DRArrow>,
    pub truncated: bool,
}

impl Fiber {
    /// `|{γ : L(γ) ≤ r}|` for `r = 0..=radius`.
    pub fn ball_counts(&self, radius: usize) -> Vec<u64> {
        let mut hist = vec![0u64; radius + 1];
        for a in &self.arrows {
            if a.length() <= radius {
                hist[a.length()] += 1;
            }
        }
        let mut acc = 0;
        hist.iter()
            .map(|h| {
                acc += h;
                acc
            })
            .collect()
    }
}

impl LocalSystem {
    pub fn full_shift(d: u32) -> Result<Self> {
        if d < 1 {
            return input("shift arity must be positive");
        }
        Ok(LocalSystem::FullShift { d })
    }

    pub fn describe(&self) -> String {
        match self {
            LocalSystem::FullShift { d } => format!("full-shift({d})"),
            LocalSystem::FiniteMap(m) => m.name.clone(),
            LocalSystem::Graph(g) => format!(
                "graph paths ({} vertices, {} edges)",
                g.vertices.len(),
                g.edges.len()
            ),
        }
    }

    /// Human-readable unit name used in reports and CSV rows.
    pub fn point_name(&self, x: &Point) -> String {
        match (self, x) {
            (LocalSystem::FiniteMap(m), Point::Index(i)) => m
                .states
                .get(*i as usize)
                .cloned()
                .unwrap_or_else(|| i.to_string()),
            (LocalSystem::Graph(g), Point::Seq(p)) => {
                let name = |e: &u32| g.edges[*e as usize].2.clone();
                let pre: Vec<String> = p.preperiod().iter().map(name).collect();
                let per: Vec<String> = p.period().iter().map(name).collect();
                if pre.is_empty() {
                    format!("({})^inf", per.join(" "))
                } else {
                    format!("{} ({})^inf", pre.join(" "), per.join(" "))
                }
            }
            _ => x.to_string(),
        }
    }

    /// `T(x)`.
    pub fn apply(&self, x: &Point) -> Point {
        match (self, x) {
            (LocalSystem::FiniteMap(m), Point::Index(i)) => Point::Index(m.map[*i as usize] as u32),
            (_, Point::Seq(p)) => Point::Seq(p.shift()),
            (_, other) => other.clone(),
        }
    }

    pub fn iterate(&self, x: &Point, n: usize) -> Point {
        match x {
            Point::Seq(p) if !matches!(self, LocalSystem::FiniteMap(_)) => Point::Seq(p.shift_by(n)),
            _ => (0..n).fold(x.clone(), |acc, _| self.apply(&acc)),
        }
    }

    /// `T^{-1}(x)` in canonical order, and whether `x` is a truncation
    /// boundary whose preimages are not modelled.
    pub fn preimages(&self, x: &Point) -> (Vec<Point>, bool) {
        match (self, x) {
            (LocalSystem::FullShift { d }, Point::Seq(p)) => {
                let mut v: Vec<Point> = (0..*d).map(|s| Point::Seq(p.prepend(s))).collect();
                v.sort();
                (v, false)
            }
            (LocalSystem::FiniteMap(m), Point::Index(i)) => {
                let i = *i as usize;
                let v = (0..m.map.len())
                    .filter(|j| m.map[*j] == i)
                    .map(|j| Point::Index(j as u32))
                    .collect();
                (v, m.boundary[i])
            }
            (LocalSystem::Graph(g), Point::Seq(p)) => {
                let start = g.edges[p.symbol(0) as usize].0;
                let mut v: Vec<Point> = g
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.1 == start)
                    .map(|(k, _)| Point::Seq(p.prepend(k as u32)))
                    .collect();
                v.sort();
                (v, false)
            }
            _ => (Vec::new(), false),
        }
    }

    /// `T^n(x)` and the preimage levels `T^{-j}(x)`, `j = 0..=n`.
    pub fn iterate_and_preimages(&self, x: &Point, n: usize) -> (Point, Vec<Vec<Point>>, bool) {
        let (levels, truncated) = self.preimage_levels(x, n);
        (self.iterate(x, n), levels, truncated)
    }

    fn preimage_levels(&self, z: &Point, depth: usize) -> (Vec<Vec<Point>>, bool) {
        let mut levels = vec![vec![z.clone()]];
        let mut truncated = false;
        for _ in 0..depth {
            let mut next = BTreeSet::new();
            for p in levels.last().expect("nonempty") {
                let (pre, b) = self.preimages(p);
                truncated |= b;
                next.extend(pre);
            }
            levels.push(next.into_iter().collect());
        }
        (levels, truncated)
    }

    /// All arrows with source `y` and length at most `radius`.
    pub fn dr_fiber(&self, y: &Point, radius: usize) -> Fiber {
        let mut best: BTreeMap<(Point, i64), (usize, usize)> = BTreeMap::new();
        let mut truncated = false;
        for n in 0..=radius {
            let z = self.iterate(y, n);
            let (levels, t) = self.preimage_levels(&z, radius - n);
            truncated |= t;
            for (m, level) in levels.iter().enumerate() {
                for x in level {
                    let key = (x.clone(), m as i64 - n as i64);
                    let e = best.entry(key).or_insert((m, n));
                    if m + n < e.0 + e.1 {
                        *e = (m, n);
                    }
                }
            }
        }
        let arrows = best
            .into_iter()
            .map(|((x, k), (m, n))| DRArrow {
                range: x,
                lag: k,
                source: y.clone(),
                m,
                n,
            })
            .collect();
        Fiber { arrows, truncated }
    }

    /// Kernel arrows `(x, 0, y)` with length at most `2·half_radius`.
    pub fn kernel_fiber(&self, y: &Point, half_radius: usize) -> Fiber {
        let mut f = self.dr_fiber(y, 2 * half_radius);
        f.arrows.retain(|a| a.lag == 0);
        f
    }

    /// A deterministic sample of `count` points, simplest first.
    pub fn sample_points(&self, count: usize) -> Vec<Point> {
        match self {
            LocalSystem::FiniteMap(m) => (0..m.states.len().min(count) as u32).map(Point::Index).collect(),
            LocalSystem::FullShift { d } => {
                let alphabet: Vec<u32> = (0..*d).collect();
                sample_sequences(&alphabet, count, |_| true)
            }
            LocalSystem::Graph(g) => {
                let alphabet: Vec<u32> = (0..g.edges.len() as u32).collect();
                sample_sequences(&alphabet, count, |p| g.valid_point(p))
            }
        }
    }
}

fn words_up_to(alphabet: &[u32], max_len: usize, min_len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::new()];
    for len in 0..=max_len {
        if len >= min_len {
            out.extend(layer.iter().cloned());
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |s| {
                    let mut v = w.clone();
                    v.push(*s);
                    v
                })
            })
            .collect();
    }
    out
}

fn sample_sequences(alphabet: &[u32], count: usize, valid: impl Fn(&EvPeriodicPoint) -> bool) -> Vec<Point> {
    let mut found: BTreeSet<(usize, EvPeriodicPoint)> = BTreeSet::new();
    let mut size = 1;
    while found.len() < count && size <= 8 {
        for per in words_up_to(alphabet, size, 1) {
            for pre in words_up_to(alphabet, size - per.len(), 0) {
                let Ok(p) = EvPeriodicPoint::new(pre, per.clone()) else { continue };
                if valid(&p) {
                    found.insert((p.preperiod().len() + p.period().len(), p));
                }
            }
        }
        size += 1;
    }
    found.into_iter().take(count).map(|(_, p)| Point::Seq(p)).collect()
}

/// The truncation of the Deaconu-Renault groupoid spanned by the units
/// reachable within `radius` of `seeds`: every arrow of length at most
/// `radius` between two such units. Length is the minimal-witness length.
pub fn dr_view(system: &LocalSystem, seeds: &[Point], radius: usize) -> Result<(FiniteGroupoidView, LengthFn, bool)> {
    if seeds.is_empty() {
        return input("need at least one seed point");
    }
    let mut units: BTreeSet<Point> = BTreeSet::new();
    let mut truncated = false;
    for y in seeds {
        let f = system.dr_fiber(y, radius);
        truncated |= f.truncated;
        units.insert(y.clone());
        units.extend(f.arrows.into_iter().map(|a| a.range));
    }
    let unit_list: Vec<Point> = units.iter().cloned().collect();
    let fibers: Vec<Fiber> = unit_list.par_iter().map(|y| system.dr_fiber(y, radius)).collect();
    let mut lengths: HashMap<Payload, f64> = HashMap::new();
    let mut arrows = Vec::new();
    for f in fibers {
        truncated |= f.truncated;
        for a in f.arrows {
            if units.contains(&a.range) {
                lengths.insert(a.payload(), a.length() as f64);
                arrows.push((a.payload(), a.source.clone(), a.range.clone()));
            }
        }
    }
    let view = FiniteGroupoidView::from_arrows(
        format!("{} truncated at radius {radius}, {} units", system.describe(), unit_list.len()),
        UnitKind::Deaconu,
        unit_list,
        arrows,
    )?;
    let len = LengthFn::from_payload(&view, "dr-minimal-witness", |p| lengths.get(p).copied().unwrap_or(0.0));
    Ok((view, len, truncated))
}

/// `Ψ(w, x) = (w·x, |u| - |v|, x)` for `w = u v⁻¹`, or `None` where the
/// action is undefined. The returned witness is `(|u|, |v|)`.
pub fn steinberg_psi(d: u32, w: &Word, x: &EvPeriodicPoint) -> Option<DRArrow> {
    let (u, v) = w.uv_normal_form()?;
    let y = act_shift(d, w, x)?;
    Some(DRArrow {
        range: Point::Seq(y),
        lag: u.len() as i64 - v.len() as i64,
        source: Point::Seq(x.clone()),
        m: u.len(),
        n: v.len(),
    })
}

/// Outcome of the exhaustive Steinberg-model comparison.
#[derive(Clone, Debug)]
pub struct SteinbergCheck {
    pub pairs: usize,
    pub defined: usize,
    pub dr_arrows: usize,
    pub injective: bool,
    pub surjective: bool,
    pub lengths_match: usize,
    pub composition_failures: usize,
    /// Signs `s` for which `c(Ψ(w,x)) = φ_s(w)` on every defined pair.
    pub valid_signs: Vec<GeneratorSign>,
    /// Number of words with a subword `a_j⁻¹ a_i` (`i ≠ j`) and how many of
    /// them were defined somewhere (must be zero).
    pub forbidden_words: usize,
    pub forbidden_defined: usize,
}

/// Compares `Ψ` on words of length `≤ radius` and base points
/// `T^{-depth}(0^∞)` with the Deaconu-Renault arrows of length `≤ radius`
/// sourced there.
pub fn steinberg_check(d: u32, radius: usize, depth: usize) -> SteinbergCheck {
    let points: Vec<EvPeriodicPoint> = crate::partial::shift_depth_sample(d, depth)
        .into_iter()
        .filter_map(|p| match p {
            Point::Seq(s) => Some(s),
            Point::Index(_) => None,
        })
        .collect();
    let words = Word::ball(d, radius);
    let system = LocalSystem::FullShift { d };
    let mut images: BTreeMap<(Point, i64, Point), (Word, usize, usize)> = BTreeMap::new();
    let mut injective = true;
    let mut defined = 0;
    let mut sign_ok = [true, true];
    let mut forbidden_words = 0;
    let mut forbidden_defined = 0;
    for w in &words {
        let forbidden = w.letters().windows(2).any(|p| p[0] < 0 && p[1] > 0);
        if forbidden {
            forbidden_words += 1;
        }
        for x in &points {
            let Some(a) = steinberg_psi(d, w, x) else { continue };
            if forbidden {
                forbidden_defined += 1;
            }
            defined += 1;
            for (k, s) in GeneratorSign::ALL.iter().enumerate() {
                if a.lag != w.phi(*s) {
                    sign_ok[k] = false;
                }
            }
            let key = (a.range.clone(), a.lag, a.source.clone());
            if images.insert(key, (w.clone(), a.m, a.n)).is_some() {
                injective = false;
            }
        }
    }
    let mut dr_arrows = 0;
    let mut surjective = true;
    let mut lengths_match = 0;
    let mut dr_lengths: BTreeMap<(Point, i64, Point), usize> = BTreeMap::new();
    for x in &points {
        let px = Point::Seq(x.clone());
        for a in system.dr_fiber(&px, radius).arrows {
            dr_arrows += 1;
            let key = (a.range.clone(), a.lag, a.source.clone());
            match images.get(&key) {
                Some((w, _, _)) if w.len() == a.length() => lengths_match += 1,
                Some(_) => {}
                None => surjective = false,
            }
            dr_lengths.insert(key, a.length());
        }
    }
    // images of length ≤ radius must be among the enumerated arrows
    if images.keys().any(|k| !dr_lengths.contains_key(k)) {
        surjective = false;
    }
    // Ψ(w'w, x) = Ψ(w', w·x) ∘ Ψ(w, x)
    let mut composition_failures = 0;
    let short = Word::ball(d, radius / 2);
    for w in &short {
        for x in &points {
            let Some(a) = steinberg_psi(d, w, x) else { continue };
            let Point::Seq(y) = &a.range else { continue };
            for w2 in &short {
                let Some(b) = steinberg_psi(d, w2, y) else { continue };
                let prod = w2.multiply(w).expect("same rank");
                let c = steinberg_psi(d, &prod, x);
                let expect = (b.range.clone(), b.lag + a.lag, a.source.clone());
                if c.map(|c| (c.range, c.lag, c.source)) != Some(expect) {
                    composition_failures += 1;
                }
            }
        }
    }
    let valid_signs = GeneratorSign::ALL
        .iter()
        .zip(sign_ok)
        .filter(|(_, ok)| *ok)
        .map(|(s, _)| *s)
        .collect();
    SteinbergCheck {
        pairs: words.len() * points.len(),
        defined,
        dr_arrows,
        injective,
        surjective: surjective && images.len() == dr_arrows,
        lengths_match,
        composition_failures,
        valid_signs,
        forbidden_words,
        forbidden_defined,
    }
}

/// The transformation-groupoid payload corresponding to a DR arrow under
/// `Ψ⁻¹`, found by searching words of length `L(γ)`.
pub fn psi_inverse(d: u32, a: &DRArrow) -> Option<Payload> {
    let Point::Seq(x) = &a.source else { return None };
    let len = a.length();
    Word::ball(d, len)
        .into_iter()
        .filter(|w| w.len() == len)
        .find(|w| {
            steinberg_psi(d, w, x).is_some_and(|b| b.range == a.range && b.lag == a.lag)
        })
        .map(|w| Payload::Transformation {
            element: GroupElem::Word(w),
            point: a.source.clone(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> Point {
        Point::Seq(EvPeriodicPoint::constant(0))
    }

    #[test]
    fn preimage_counts() {
        let s = LocalSystem::full_shift(2).unwrap();
        let (_, levels, _) = s.iterate_and_preimages(&zero(), 3);
        assert_eq!(levels[3].len(), 8);
        assert_eq!(levels[0], vec![zero()]);
        let af = LocalSystem::FiniteMap(FiniteMap::af(10));
        let (_, levels, truncated) = af.iterate_and_preimages(&Point::Index(0), 3);
        let names: Vec<String> = levels[3].iter().map(|p| af.point_name(p)).collect();
        assert_eq!(names, vec!["a", "b0", "b1", "b2"]);
        assert!(!truncated);
    }

    #[test]
    fn full_shift_fiber_counts() {
        let s = LocalSystem::full_shift(2).unwrap();
        let f = s.dr_fiber(&zero(), 8);
        assert_eq!(f.ball_counts(8), vec![1, 4, 10, 22, 46, 94, 190, 382, 766]);
        assert_eq!(s.dr_fiber(&zero(), 0).arrows.len(), 1);
    }

    #[test]
    fn kernel_counts_are_powers() {
        for d in [2u32, 3] {
            let s = LocalSystem::full_shift(d).unwrap();
            for n in 0..4usize {
                assert_eq!(s.kernel_fiber(&zero(), n).arrows.len(), d.pow(n as u32) as usize);
            }
        }
    }

    #[test]
    fn loop_graph_is_linear_and_bouquet_is_full_shift() {
        let g = Graph::from_json(r#"{"vertices":["v"],"edges":[{"src":"v","dst":"v","label":"e"}]}"#).unwrap();
        let s = LocalSystem::Graph(g);
        let x = s.sample_points(1).remove(0);
        let counts = s.dr_fiber(&x, 6).ball_counts(6);
        assert_eq!(counts, (0..=6).map(|n| 2 * n + 1).collect::<Vec<u64>>());
        let b = LocalSystem::Graph(Graph::bouquet(2));
        let y = b.sample_points(1).remove(0);
        assert_eq!(b.dr_fiber(&y, 5).ball_counts(5), vec![1, 4, 10, 22, 46, 94]);
    }

    #[test]
    fn sinks_rejected() {
        let err = Graph::from_json(
            r#"{"vertices":["u","w"],"edges":[{"src":"u","dst":"w","label":"e"}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains('w'));
    }

    #[test]
    fn af_fiber_truncation_flag() {
        let af = LocalSystem::FiniteMap(FiniteMap::af(3));
        assert!(af.dr_fiber(&Point::Index(0), 8).truncated);
        let big = LocalSystem::FiniteMap(FiniteMap::af(20));
        assert!(!big.dr_fiber(&Point::Index(0), 8).truncated);
    }

    #[test]
    fn psi_single_generator() {
        let x = EvPeriodicPoint::constant(0);
        let a = steinberg_psi(2, &Word::parse(2, "a1").unwrap(), &x).unwrap();
        assert_eq!(a.range.to_string(), "1(0)^inf");
        assert_eq!(a.lag.abs(), 1);
        let e = steinberg_psi(2, &Word::identity(2), &x).unwrap();
        assert_eq!((e.range, e.lag), (Point::Seq(x.clone()), 0));
        assert!(steinberg_psi(2, &Word::parse(2, "A2 a1").unwrap(), &x).is_none());
    }

    #[test]
    fn small_steinberg_check() {
        let c = steinberg_check(2, 2, 3);
        assert!(c.injective && c.surjective, "{c:?}");
        assert_eq!(c.valid_signs.len(), 1);
        assert_eq!(c.composition_failures, 0);
        assert_eq!(c.forbidden_defined, 0);
    }

    #[test]
    fn dr_view_is_a_valid_truncation() {
        let s = LocalSystem::full_shift(2).unwrap();
        let (v, l, _) = dr_view(&s, &[zero()], 2).unwrap();
        let rep = crate::groupoid::check_axioms(&v, Some(&l));
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    }
}
