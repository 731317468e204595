//! Ball-count tables and growth classification.

use rayon::prelude::*;
use serde::Serialize;

use crate::deaconu::LocalSystem;
use crate::error::{input, Result};
use crate::groupoid::{FiniteGroupoidView, LengthFn, Point};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub unit_id: String,
    pub radius: usize,
    pub count: u64,
}

/// Exact ball counts per unit and radius. Rows flagged in `lower_bound`
/// touched a truncation boundary; their counts are lower bounds.
#[derive(Clone, Debug)]
pub struct GrowthTable {
    pub system: String,
    pub budget: String,
    pub radius: usize,
    pub rows: Vec<GrowthRow>,
    pub lower_bound: Vec<bool>,
}

impl GrowthTable {
    /// Builds a table from per-unit cumulative counts.
    pub fn from_counts(
        system: impl Into<String>,
        budget: impl Into<String>,
        radius: usize,
        per_unit: Vec<(String, Vec<u64>, Vec<bool>)>,
    ) -> Self {
        let mut rows = Vec::new();
        let mut lower_bound = Vec::new();
        for (unit, counts, lb) in per_unit {
            for (r, c) in counts.iter().enumerate().take(radius + 1) {
                rows.push(GrowthRow {
                    unit_id: unit.clone(),
                    radius: r,
                    count: *c,
                });
                lower_bound.push(lb.get(r).copied().unwrap_or(false));
            }
        }
        GrowthTable {
            system: system.into(),
            budget: budget.into(),
            radius,
            rows,
            lower_bound,
        }
    }

    /// `max_x |B_x(n)|` for `n = 0..=radius`.
    pub fn max_counts(&self) -> Vec<u64> {
        let mut m = vec![0; self.radius + 1];
        for row in &self.rows {
            m[row.radius] = m[row.radius].max(row.count);
        }
        m
    }

    pub fn count(&self, unit: &str, radius: usize) -> Option<u64> {
        self.rows
            .iter()
            .find(|r| r.unit_id == unit && r.radius == radius)
            .map(|r| r.count)
    }

    pub fn any_lower_bound(&self) -> bool {
        self.lower_bound.iter().any(|b| *b)
    }

    pub fn to_csv(&self) -> Result<String> {
        crate::report::to_csv(&self.rows)
    }
}

/// Deaconu-Renault fiber ball counts `|{γ ∈ G_x : L(γ) ≤ n}|`.
pub fn dr_ball_counts(system: &LocalSystem, units: &[Point], radius: usize) -> GrowthTable {
    let per_unit = units
        .par_iter()
        .map(|x| {
            let fiber = system.dr_fiber(x, radius);
            let counts = fiber.ball_counts(radius);
            // a radius is exact iff its own enumeration stayed clear of the
            // truncation boundary
            let lb = (0..=radius)
                .map(|r| fiber.truncated && system.dr_fiber(x, r).truncated)
                .collect();
            (system.point_name(x), counts, lb)
        })
        .collect();
    GrowthTable::from_counts(
        format!("{} dr fibers", system.describe()),
        format!("radius {radius}, {} units", units.len()),
        radius,
        per_unit,
    )
}

/// Kernel fiber counts `|{(x,0,y) : L ≤ 2n}|` indexed by `n`.
pub fn kernel_ball_counts(system: &LocalSystem, units: &[Point], half_radius: usize) -> GrowthTable {
    let per_unit = units
        .par_iter()
        .map(|x| {
            let f = system.kernel_fiber(x, half_radius);
            let counts = (0..=half_radius)
                .map(|n| f.arrows.iter().filter(|a| a.length() <= 2 * n).count() as u64)
                .collect();
            (system.point_name(x), counts, vec![f.truncated; half_radius + 1])
        })
        .collect();
    GrowthTable::from_counts(
        format!("{} kernel fibers", system.describe()),
        format!("radius 2x{half_radius}, {} units", units.len()),
        half_radius,
        per_unit,
    )
}

/// Preimage counts `|T^{-n}(x)|`.
pub fn preimage_counts(system: &LocalSystem, units: &[Point], depth: usize) -> GrowthTable {
    let per_unit = units
        .iter()
        .map(|x| {
            let (_, levels, truncated) = system.iterate_and_preimages(x, depth);
            let counts = levels.iter().map(|l| l.len() as u64).collect();
            (system.point_name(x), counts, vec![truncated; depth + 1])
        })
        .collect();
    GrowthTable::from_counts(
        format!("{} preimages", system.describe()),
        format!("depth {depth}, {} units", units.len()),
        depth,
        per_unit,
    )
}

/// Source-fiber ball counts on an enumerated view.
pub fn view_ball_counts(view: &FiniteGroupoidView, length: &LengthFn, radius: usize) -> GrowthTable {
    let per_unit = (0..view.num_units())
        .map(|u| {
            let counts = (0..=radius)
                .map(|r| {
                    view.source_fiber(u)
                        .iter()
                        .filter(|a| length.eval(**a) <= r as f64 + 1e-12)
                        .count() as u64
                })
                .collect();
            (view.unit(u).to_string(), counts, vec![!view.is_closed(); radius + 1])
        })
        .collect();
    GrowthTable::from_counts(
        view.describe(),
        format!("radius {radius}"),
        radius,
        per_unit,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum GrowthClass {
    Bounded { c: f64 },
    Polynomial { c: f64, d: u32 },
    Exponential { base: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub class: GrowthClass,
    pub max_counts: Vec<u64>,
    pub sse_polynomial: f64,
    pub sse_exponential: f64,
    pub polynomial_slope: f64,
    pub terminal_ratio: f64,
    /// `count(n) ≤ c(1+n)^d` on every tabulated radius (polynomial and
    /// bounded classes only).
    pub certificate_holds: bool,
}

impl Classification {
    /// `(c, d)` when the table is certified polynomial (bounded is `d = 0`).
    pub fn certificate(&self) -> Option<(f64, u32)> {
        match self.class {
            GrowthClass::Bounded { c } => Some((c, 0)),
            GrowthClass::Polynomial { c, d } => Some((c, d)),
            GrowthClass::Exponential { .. } => None,
        }
    }
}

/// Least-squares line `y = a + b x`; returns `(b, residual sum of squares)`.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let sse = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    (b, sse)
}

pub const EXP_RESIDUAL_MARGIN: f64 = 0.5;
pub const EXP_MIN_RATIO: f64 = 1.3;
pub const MIN_RADIUS: usize = 4;

/// Classifies the max-over-units counts.
///
/// Fits run over the tail radii `⌊R/2⌋..=R`, where the asymptotic regime
/// shows. Exponential: the exponential fit's residual is below
/// [`EXP_RESIDUAL_MARGIN`] times the polynomial one and the terminal ratio
/// exceeds [`EXP_MIN_RATIO`]. Bounded: the counts are constant on the tail.
/// Otherwise polynomial with `d` the rounded log-log slope and
/// `c = max_n count(n)/(1+n)^d`.
pub fn classify_growth(table: &GrowthTable) -> Result<Classification> {
    let r = table.radius;
    if r < MIN_RADIUS {
        return input(format!("need radii 0..R with R >= {MIN_RADIUS}, got R = {r}"));
    }
    let m = table.max_counts();
    if m.contains(&0) {
        return input("ball counts must be positive");
    }
    let tail: Vec<usize> = (r / 2..=r).collect();
    let ln_n: Vec<f64> = tail.iter().map(|n| ((1 + n) as f64).ln()).collect();
    let lin_n: Vec<f64> = tail.iter().map(|n| *n as f64).collect();
    let ln_c: Vec<f64> = tail.iter().map(|n| (m[*n] as f64).ln()).collect();
    let (poly_slope, sse_poly) = fit(&ln_n, &ln_c);
    let (exp_slope, sse_exp) = fit(&lin_n, &ln_c);
    let ratio = m[r] as f64 / m[r - 1] as f64;

    let cert = |d: u32| {
        let c = m
            .iter()
            .enumerate()
            .map(|(n, c)| *c as f64 / ((1 + n) as f64).powi(d as i32))
            .fold(0.0, f64::max);
        let holds = m
            .iter()
            .enumerate()
            .all(|(n, cnt)| (*cnt as f64) <= c * ((1 + n) as f64).powi(d as i32) * (1.0 + 1e-12));
        (c, holds)
    };

    let (class, certificate_holds) = if m[r / 2] == m[r] {
        let (c, holds) = cert(0);
        (GrowthClass::Bounded { c }, holds)
    } else if sse_exp < EXP_RESIDUAL_MARGIN * sse_poly && ratio > EXP_MIN_RATIO {
        (GrowthClass::Exponential { base: exp_slope.exp() }, false)
    } else {
        let d = poly_slope.round().max(0.0) as u32;
        let (c, holds) = cert(d);
        (GrowthClass::Polynomial { c, d }, holds)
    };
    Ok(Classification {
        class,
        max_counts: m,
        sse_polynomial: sse_poly,
        sse_exponential: sse_exp,
        polynomial_slope: poly_slope,
        terminal_ratio: ratio,
        certificate_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deaconu::FiniteMap;
    use crate::groupoid::builders::pair_groupoid;
    use crate::shift::EvPeriodicPoint;

    fn zero() -> Point {
        Point::Seq(EvPeriodicPoint::constant(0))
    }

    #[test]
    fn full_shift_is_exponential() {
        let s = LocalSystem::full_shift(2).unwrap();
        let t = dr_ball_counts(&s, &[zero()], 8);
        let c = classify_growth(&t).unwrap();
        match c.class {
            GrowthClass::Exponential { base } => assert!((1.8..=2.2).contains(&base), "{base}"),
            other => panic!("{other:?}"),
        }
        let m = t.max_counts();
        for n in 2..8 {
            let q = m[n + 1] as f64 / m[n] as f64;
            assert!((1.5..=2.5).contains(&q));
        }
    }

    #[test]
    fn af_preimages_linear_dr_fibers_quadratic() {
        let af = LocalSystem::FiniteMap(FiniteMap::af(16));
        let a = Point::Index(0);
        let pre = preimage_counts(&af, &[a.clone()], 8);
        assert_eq!(pre.max_counts(), (1..=9).collect::<Vec<u64>>());
        let c = classify_growth(&pre).unwrap();
        assert_eq!(c.certificate().map(|x| x.1), Some(1));
        assert!(c.certificate_holds);

        let dr = dr_ball_counts(&af, &[a], 8);
        let oracle: Vec<u64> = (0..=8u64).map(|r| (r + 1) * (r + 1)).collect();
        assert_eq!(dr.max_counts(), oracle);
        let c = classify_growth(&dr).unwrap();
        assert!(matches!(c.class, GrowthClass::Polynomial { d: 2, .. }), "{c:?}");
        assert!(!dr.any_lower_bound());
    }

    #[test]
    fn pair_groupoid_is_bounded() {
        let g = pair_groupoid(5).unwrap();
        let t = view_ball_counts(&g, &LengthFn::discrete(&g), 5);
        assert_eq!(t.max_counts(), vec![1, 5, 5, 5, 5, 5]);
        let c = classify_growth(&t).unwrap();
        assert!(matches!(c.class, GrowthClass::Bounded { .. }));
        assert!(classify_growth(&view_ball_counts(&g, &LengthFn::discrete(&g), 3)).is_err());
    }

    #[test]
    fn truncation_boundary_is_flagged() {
        let af = LocalSystem::FiniteMap(FiniteMap::af(3));
        let t = dr_ball_counts(&af, &[Point::Index(0)], 8);
        assert!(!t.lower_bound[0]);
        assert!(t.any_lower_bound());
    }

    #[test]
    fn csv_layout() {
        let af = LocalSystem::FiniteMap(FiniteMap::af(16));
        let t = preimage_counts(&af, &[Point::Index(0)], 4);
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("unit_id,radius,count\n"));
        assert!(csv.contains("a,3,4\n"));
    }
}
