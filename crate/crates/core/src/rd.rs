//! Rapid-decay ratios and the inequalities behind them: the norm chain, the
//! polynomial-growth bound with its explicit constant, the BHM and
//! Cauchy-Schwarz operator inequalities, the weighted convolution lemma,
//! restriction to subgroupoids, and the exponential-growth obstruction.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{ConcreteBundle, FellBundle, FiberElement};
use crate::deaconu::LocalSystem;
use crate::error::{input, Result};
use crate::groupoid::{builders, ArrowId, Compose, FiniteGroupoidView, LengthFn, Payload, Point, UnitKind};
use crate::linalg;
use crate::report::{CheckReport, CheckRow};
use crate::rng;
use crate::section::{ReducedOptions, Section};
use crate::{CMat, C64};

/// Constant `C` and exponent `p` with `‖f‖_r ≤ C‖f‖_{2,p,L}` on `scope`.
#[derive(Clone, Debug, Serialize)]
pub struct RdWitness {
    pub c: f64,
    pub p: f64,
    pub scope: String,
}

/// Seeded Gaussian sections on a fixed support; section `i` draws from
/// stream `i`, so the family does not depend on how it is split.
pub fn random_sections<'b>(
    bundle: &'b dyn FellBundle,
    support: &[ArrowId],
    seed: u64,
    count: usize,
) -> Result<Vec<Section<'b>>> {
    (0..count)
        .into_par_iter()
        .map(|i| Section::random(bundle, support, &mut rng::stream(seed, i as u64)))
        .collect()
}

/// Arrows whose range and source both lie in a random subset of units
/// (each unit kept with probability 1/2, at least one kept). Used to vary
/// the support shape across samples.
pub fn random_support(view: &FiniteGroupoidView, rng: &mut impl Rng) -> Vec<ArrowId> {
    let mut keep: Vec<bool> = (0..view.num_units()).map(|_| rng.random_bool(0.5)).collect();
    if !keep.iter().any(|k| *k) {
        let i = rng.random_range(0..keep.len());
        keep[i] = true;
    }
    (0..view.num_arrows())
        .filter(|a| keep[view.src(*a)] && keep[view.rng(*a)])
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioScan {
    pub max_ratio: f64,
    pub worst: String,
    /// Ratios are exact on closed views, lower bounds otherwise.
    pub exact: bool,
    pub ratios: Vec<(String, f64)>,
    pub skipped: usize,
}

/// `max ‖f‖_r / ‖f‖_{2,p,L}` over the named sections (zero sections are
/// skipped).
pub fn rd_ratio_scan(
    sections: &[(String, Section<'_>)],
    length: &LengthFn,
    p: f64,
    opts: &ReducedOptions<'_>,
) -> Result<RatioScan> {
    let vals: Vec<Result<Option<(String, f64, bool)>>> = sections
        .par_iter()
        .map(|(name, f)| {
            let den = f.sobolev(length, p)?;
            if den <= 0.0 {
                return Ok(None);
            }
            let r = f.reduced_norm(opts)?;
            Ok(Some((name.clone(), r.value / den, r.exact)))
        })
        .collect();
    let mut scan = RatioScan {
        max_ratio: 0.0,
        worst: String::new(),
        exact: true,
        ratios: Vec::new(),
        skipped: 0,
    };
    for v in vals {
        match v? {
            None => scan.skipped += 1,
            Some((name, ratio, exact)) => {
                scan.exact &= exact;
                if ratio > scan.max_ratio || scan.worst.is_empty() {
                    scan.max_ratio = scan.max_ratio.max(ratio);
                    scan.worst = name.clone();
                }
                scan.ratios.push((name, ratio));
            }
        }
    }
    Ok(scan)
}

pub const CHAIN_TOL: f64 = 1e-9;

/// `‖f‖_∞ ≤ ‖f‖_II ≤ ‖f‖_r ≤ ‖f‖_I` on every section (closed views).
pub fn norm_chain_check(sections: &[(String, Section<'_>)]) -> Result<CheckReport> {
    let mut rep = CheckReport::new("norm-chain");
    let rows: Vec<Result<Vec<CheckRow>>> = sections
        .par_iter()
        .map(|(name, f)| {
            let sup = f.sup_norm();
            let ii = f.ii_norm()?;
            let r = f.reduced_norm(&ReducedOptions::default())?;
            if !r.exact {
                return input("norm chain needs a closed view");
            }
            let i = f.i_norm();
            Ok(vec![
                CheckRow::leq("sup<=II", name.clone(), sup, ii, CHAIN_TOL),
                CheckRow::leq("II<=r", name.clone(), ii, r.value, CHAIN_TOL),
                CheckRow::leq("r<=I", name.clone(), r.value, i, CHAIN_TOL),
            ])
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

/// `S = Σ_{n≥0} (1+n)^{-4}`: exact partial sum to `10⁶` plus the integral
/// tail `∫_{10⁶}^∞ (1+x)^{-4} dx`, an upper bound for the remainder.
pub fn zeta4_bound() -> f64 {
    const N: u64 = 1_000_000;
    // summed smallest-first to limit roundoff
    let partial: f64 = (0..=N).rev().map(|n| (1.0 + n as f64).powi(-4)).sum();
    let tail = 1.0 / (3.0 * (1.0 + N as f64).powi(3));
    partial + tail
}

/// `c₁ = 2^t·c·S`.
pub fn c1_constant(c: f64, t: u32) -> f64 {
    2f64.powi(t as i32) * c * zeta4_bound()
}

pub const POLY_TOL: f64 = 1e-8;

/// `‖f‖_r ≤ √c₁·‖f‖_{2,t+2,L}` for the growth certificate `(c, t)`.
///
/// On views that are not closed the left side is a lower bound for the
/// true reduced norm, so a failure is still a genuine violation.
pub fn poly_growth_rd_check(
    sections: &[(String, Section<'_>)],
    length: &LengthFn,
    certificate: (f64, u32),
    opts: &ReducedOptions<'_>,
) -> Result<CheckReport> {
    let (c, t) = certificate;
    if !(c.is_finite() && c > 0.0) {
        return input(format!("growth certificate constant must be positive, got {c}"));
    }
    let c1 = c1_constant(c, t);
    let k = (t + 2) as f64;
    let mut rep = CheckReport::new("poly-growth-rd");
    rep.param("c", c).param("t", t).param("c1", c1).param("k", t + 2);
    let rows: Vec<Result<CheckRow>> = sections
        .par_iter()
        .map(|(name, f)| {
            let lhs = f.reduced_norm(opts)?.value;
            let rhs = c1.sqrt() * f.sobolev(length, k)?;
            Ok(CheckRow::leq("rd-bound", name.clone(), lhs, rhs, POLY_TOL))
        })
        .collect();
    for r in rows {
        rep.push(r?);
    }
    rep.sort();
    Ok(rep)
}

pub const BHM_TOL: f64 = 1e-8;

/// `‖f‖_r² ≤ sup_x‖Σ_{G_x}(f*f)^{1/2}‖ · sup_x‖Σ_{G^x}(ff*)^{1/2}‖`.
pub fn bhm_sides(f: &Section<'_>) -> Result<(f64, f64)> {
    let b = f.bundle();
    let view = b.view();
    let mut src: std::collections::BTreeMap<usize, FiberElement> = Default::default();
    let mut rng: std::collections::BTreeMap<usize, FiberElement> = Default::default();
    for (a, e) in f.entries() {
        let s = b.star_mult(a, e)?.sqrt();
        let r = b.mult_star(a, e)?.sqrt();
        match src.get_mut(&view.src(a)) {
            Some(acc) => acc.add_assign(&s),
            None => {
                src.insert(view.src(a), s);
            }
        }
        match rng.get_mut(&view.rng(a)) {
            Some(acc) => acc.add_assign(&r),
            None => {
                rng.insert(view.rng(a), r);
            }
        }
    }
    let top = |m: &std::collections::BTreeMap<usize, FiberElement>| m.values().map(FiberElement::norm).fold(0.0, f64::max);
    let lhs = f.reduced_norm(&ReducedOptions::default())?.value.powi(2);
    Ok((lhs, top(&src) * top(&rng)))
}

pub fn bhm_check(sections: &[(String, Section<'_>)]) -> Result<CheckReport> {
    let mut rep = CheckReport::new("bhm");
    let rows: Vec<Result<CheckRow>> = sections
        .par_iter()
        .map(|(name, f)| {
            let (lhs, rhs) = bhm_sides(f)?;
            Ok(CheckRow::leq("bhm", name.clone(), lhs, rhs, BHM_TOL * rhs.max(1.0)))
        })
        .collect();
    for r in rows {
        rep.push(r?);
    }
    rep.sort();
    Ok(rep)
}

/// Minimum eigenvalue of `(Σλ²)^{1/2}(Σa²)^{1/2} − Σλa` for one tuple.
pub fn impineq_defect(a: &[CMat], lambda: &[f64]) -> f64 {
    let n = a[0].nrows();
    let mut lhs = CMat::zeros(n, n);
    let mut sq = CMat::zeros(n, n);
    for (ai, li) in a.iter().zip(lambda) {
        lhs += ai * C64::new(*li, 0.0);
        sq += ai * ai;
    }
    let l2 = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
    let rhs = linalg::psd_sqrt(&sq) * C64::new(l2, 0.0);
    linalg::min_eigenvalue(&(rhs - lhs))
}

pub const IMPINEQ_TOL: f64 = 1e-8;

/// The operator Cauchy-Schwarz inequality on `count` random tuples of
/// `terms` positive `dim × dim` matrices with nonnegative weights.
pub fn impineq_check(seed: u64, count: usize, dim: usize, terms: usize) -> CheckReport {
    let mut rep = CheckReport::new("impineq");
    rep.seed = seed;
    rep.param("count", count).param("dim", dim).param("terms", terms);
    let rows: Vec<CheckRow> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let a: Vec<CMat> = (0..terms)
                .map(|_| {
                    let m = rng::gaussian_matrix(&mut r, dim, dim);
                    m.adjoint() * m
                })
                .collect();
            let lambda: Vec<f64> = (0..terms).map(|_| r.random_range(0.0..2.0)).collect();
            let scale = a.iter().map(linalg::opnorm).fold(1.0, f64::max);
            CheckRow::leq("impineq", format!("tuple {i:03}"), -impineq_defect(&a, &lambda), 0.0, IMPINEQ_TOL * scale)
        })
        .collect();
    for row in rows {
        rep.push(row);
    }
    rep.sort();
    rep
}

pub const CONV_TOL: f64 = 1e-8;

/// The weighted convolution lemma for each pair, plus the weight inequality
/// `1+L(γη) ≤ (1+L(γ))(1+L(η))` on every composable support pair.
pub fn weighted_conv_check(
    pairs: &[(String, Section<'_>, Section<'_>)],
    length: &LengthFn,
    witness: &RdWitness,
    p: f64,
) -> Result<CheckReport> {
    let mut rep = CheckReport::new("weighted-convolution");
    rep.param("C", witness.c).param("q", witness.p).param("p", p);
    rep.note(format!("witness scope: {}", witness.scope));
    let q = witness.p;
    let rows: Vec<Result<Vec<CheckRow>>> = pairs
        .par_iter()
        .map(|(name, f, g)| {
            let fg = f.convolve(g)?;
            let s_lhs = fg.sobolev_source(length, p)?;
            let s_rhs = witness.c * f.sobolev(length, p + q)? * g.sobolev_source(length, p)?;
            let r_lhs = fg.sobolev_range(length, p)?;
            let r_rhs = witness.c * g.sobolev(length, p + q)? * f.sobolev_range(length, p)?;
            let view = f.bundle().view();
            let mut weight_bad = 0;
            for a in f.support() {
                for b in g.support() {
                    if let Compose::Arrow(ab) = view.compose(a, b) {
                        let l = |x| length.eval(x);
                        if 1.0 + l(ab) > (1.0 + l(a)) * (1.0 + l(b)) + 1e-12 {
                            weight_bad += 1;
                        }
                    }
                }
            }
            Ok(vec![
                CheckRow::leq("source", name.clone(), s_lhs, s_rhs, CONV_TOL),
                CheckRow::leq("range", name.clone(), r_lhs, r_rhs, CONV_TOL),
                CheckRow::count("weight", name.clone(), weight_bad),
            ])
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

/// Exact integer check of `1+L(γη) ≤ (1+L(γ))(1+L(η))` on all composable
/// in-view pairs. Returns the number of violations and pairs checked.
pub fn weight_inequality_violations(view: &FiniteGroupoidView, length: &LengthFn) -> (usize, usize) {
    let mut bad = 0;
    let mut checked = 0;
    for b in 0..view.num_arrows() {
        for &a in view.source_fiber(view.rng(b)) {
            if let Compose::Arrow(ab) = view.compose(a, b) {
                checked += 1;
                if 1.0 + length.eval(ab) > (1.0 + length.eval(a)) * (1.0 + length.eval(b)) + 1e-12 {
                    bad += 1;
                }
            }
        }
    }
    (bad, checked)
}

/// Errors unless `keep` is closed under in-view composition and inverse.
pub fn check_subgroupoid(view: &FiniteGroupoidView, keep: &(dyn Fn(ArrowId) -> bool + Sync)) -> Result<()> {
    for u in 0..view.num_units() {
        if !keep(view.unit_arrow(u)) {
            return input(format!("subgroupoid misses the unit {}", view.unit(u)));
        }
    }
    for a in (0..view.num_arrows()).filter(|a| keep(*a)) {
        if let Some(ai) = view.inverse(a) {
            if !keep(ai) {
                return input(format!("subgroupoid is not closed under inverse at {}", view.label(a)));
            }
        }
        for &b in view.range_fiber(view.src(a)) {
            if !keep(b) {
                continue;
            }
            if let Compose::Arrow(ab) = view.compose(a, b) {
                if !keep(ab) {
                    return input(format!(
                        "subgroupoid is not closed: ({}, {})",
                        view.label(a),
                        view.label(b)
                    ));
                }
            }
        }
    }
    Ok(())
}

pub const RESTRICT_TOL: f64 = 1e-9;

/// For sections supported in `H`: `‖f‖_{r,H} ≤ ‖f‖_{r,G}` and
/// `‖f‖_{2,p,L|H} ≤ ‖f‖_{2,p,L}`, and an ambient witness transported to
/// `H` (`‖f‖_{r,H} ≤ C‖f‖_{2,p,L|H}`).
pub fn restriction_check(
    sections: &[(String, Section<'_>)],
    keep: &(dyn Fn(ArrowId) -> bool + Sync),
    length: &LengthFn,
    witness: Option<&RdWitness>,
    opts: &ReducedOptions<'_>,
) -> Result<CheckReport> {
    let Some((_, first)) = sections.first() else {
        return Ok(CheckReport::new("restriction"));
    };
    let view = first.bundle().view();
    check_subgroupoid(view, keep)?;
    let mut rep = CheckReport::new("restriction");
    let rows: Vec<Result<Vec<CheckRow>>> = sections
        .par_iter()
        .map(|(name, f)| {
            if let Some(a) = f.support().find(|a| !keep(*a)) {
                return input(format!("section {name} has support outside H at {}", view.label(a)));
            }
            let g = f.reduced_norm(opts)?.value;
            let h_opts = ReducedOptions {
                filter: Some(keep),
                ..*opts
            };
            let h = f.reduced_norm(&h_opts)?.value;
            let p = witness.map_or(0.0, |w| w.p);
            // f vanishes off H, so L|_H gives the same weighted sums
            let sob_h = f.restrict(keep).sobolev(length, p)?;
            let sob_g = f.sobolev(length, p)?;
            let mut rows = vec![
                CheckRow::leq("reduced", name.clone(), h, g, RESTRICT_TOL),
                CheckRow::leq("sobolev", name.clone(), sob_h, sob_g, RESTRICT_TOL),
            ];
            if let Some(w) = witness {
                rows.push(CheckRow::leq("witness", name.clone(), h, w.c * sob_h, RESTRICT_TOL));
            }
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

/// The block `P × P` of the kernel `c⁻¹(0)` with `P = T^{-n}(T^n x)`, with
/// length `L(y, 0, z) = 2·min{j : T^j y = T^j z}`.
pub fn kernel_block_view(system: &LocalSystem, x: &Point, n: usize) -> Result<(FiniteGroupoidView, LengthFn)> {
    let z = system.iterate(x, n);
    let (_, levels, truncated) = system.iterate_and_preimages(&z, n);
    if truncated {
        return input(format!("preimages of {} are truncated", system.point_name(&z)));
    }
    let block: Vec<Point> = levels[n].clone();
    let meet = |a: &Point, b: &Point| (0..=n).find(|j| system.iterate(a, *j) == system.iterate(b, *j)).unwrap_or(n);
    let mut arrows = Vec::with_capacity(block.len() * block.len());
    let mut lens = std::collections::HashMap::new();
    for y in &block {
        for w in &block {
            let p = Payload::Deaconu {
                range: y.clone(),
                lag: 0,
                source: w.clone(),
            };
            lens.insert(p.clone(), 2.0 * meet(y, w) as f64);
            arrows.push((p, w.clone(), y.clone()));
        }
    }
    let view = FiniteGroupoidView::from_arrows(
        format!("kernel block T^-{n}(T^{n} x) of {}", system.describe()),
        UnitKind::Deaconu,
        block,
        arrows,
    )?;
    let len = LengthFn::from_payload(&view, "kernel-ultrametric", |p| lens.get(p).copied().unwrap_or(0.0));
    Ok((view, len))
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendPoint {
    pub n: usize,
    pub block_size: usize,
    pub reduced: f64,
    pub sobolev: f64,
    pub ratio: f64,
    /// Ratio for the indicator of the single kernel fiber `R_x` at radius
    /// `2n` (for comparison; it stays below 1).
    pub fiber_ratio: f64,
}

pub const TREND_FACTOR: f64 = 1.5;

/// Kernel-ball indicator ratios `‖f‖_r/‖f‖_{2,p,L}` for `n` in `ns`:
/// rows assert the sequence is strictly increasing and that the last ratio
/// is at least [`TREND_FACTOR`] times the first.
pub fn obstruction_trend(system: &LocalSystem, x: &Point, ns: &[usize], p: f64) -> Result<(CheckReport, Vec<TrendPoint>)> {
    let mut points = Vec::new();
    for &n in ns {
        let (view, len) = kernel_block_view(system, x, n)?;
        let view = Arc::new(view);
        let bundle = ConcreteBundle::trivial(Arc::clone(&view), 1)?;
        let all: Vec<ArrowId> = (0..view.num_arrows()).collect();
        let f = Section::indicator(&bundle, all)?;
        let reduced = f.reduced_norm(&ReducedOptions::default())?;
        let sobolev = f.sobolev(&len, p)?;
        let x_id = view.unit_id(x).or_else(|_| view.unit_id(&view.units()[0].clone()))?;
        let fiber = Section::indicator(&bundle, view.source_fiber(x_id).to_vec())?;
        let fiber_ratio = fiber.reduced_norm(&ReducedOptions::default())?.value / fiber.sobolev(&len, p)?;
        points.push(TrendPoint {
            n,
            block_size: view.num_units(),
            reduced: reduced.value,
            sobolev,
            ratio: reduced.value / sobolev,
            fiber_ratio,
        });
    }
    let mut rep = CheckReport::new("obstruction-trend");
    rep.system = system.describe();
    rep.param("p", p).param("n", ns.to_vec());
    for w in points.windows(2) {
        // strict increase: ratio(n) < ratio(n+1)
        rep.push(CheckRow::leq(
            "increasing",
            format!("N={} -> N={}", w[0].n, w[1].n),
            w[0].ratio,
            w[1].ratio,
            -1e-15,
        ));
    }
    if let (Some(first), Some(last)) = (points.first(), points.last()) {
        rep.push(CheckRow::leq(
            "growth-factor",
            format!("N={} vs N={}", first.n, last.n),
            TREND_FACTOR * first.ratio,
            last.ratio,
            0.0,
        ));
    }
    for t in &points {
        rep.note(format!(
            "N={}: |P|={} reduced={:.6} sobolev={:.6} ratio={:.6} fiber-ratio={:.6}",
            t.n, t.block_size, t.reduced, t.sobolev, t.ratio, t.fiber_ratio
        ));
    }
    rep.sort();
    Ok((rep, points))
}

/// Trivial `Z/2`-actions on diagonal and full `2×2` matrices: the constant
/// found by scanning random sections at `p = 0` stays within the group
/// constant `√|G|` times the dimensional factor (1 for the commutative
/// algebra, `√n` for `M_n`). Scalar sections through the unit embedding
/// reproduce the group norms exactly.
pub fn trivial_action_check(seed: u64, samples: usize) -> Result<CheckReport> {
    let n = 2usize;
    let view = Arc::new(builders::cyclic(2)?);
    let len = LengthFn::word_length(&view);
    let bundle = ConcreteBundle::action(Arc::clone(&view), n, |_| CMat::identity(n, n))?;
    let scalar = ConcreteBundle::trivial(Arc::clone(&view), 1)?;
    let all: Vec<ArrowId> = (0..view.num_arrows()).collect();
    let group_c = (view.num_arrows() as f64).sqrt();
    let opts = ReducedOptions::default();
    let mut rep = CheckReport::new("trivial-action");
    rep.seed = seed;
    rep.param("samples", samples).param("group_constant", group_c);

    let make = |i: usize, diagonal: bool| -> Result<Section<'_>> {
        let mut r = rng::stream(seed, i as u64);
        let mut s = Section::zero(&bundle);
        for &a in &all {
            let mut m = rng::gaussian_matrix(&mut r, n, n);
            if diagonal {
                m = CMat::from_diagonal(&m.diagonal());
            }
            s.set(a, FiberElement::single(m))?;
        }
        Ok(s)
    };
    for (label, diagonal, factor) in [("diagonal", true, 1.0), ("matrix", false, (n as f64).sqrt())] {
        let base = if diagonal { 0 } else { samples };
        let sections: Vec<(String, Section<'_>)> = (0..samples)
            .map(|i| Ok((format!("{label} {i:03}"), make(base + i, diagonal)?)))
            .collect::<Result<_>>()?;
        let scan = rd_ratio_scan(&sections, &len, 0.0, &opts)?;
        rep.push(CheckRow::leq(
            "witness",
            label,
            scan.max_ratio,
            group_c * factor,
            1e-9,
        ));
        rep.note(format!("{label}: max ratio {:.6} at {}", scan.max_ratio, scan.worst));
    }
    // scalar sections embedded as z·1 have the group's norms
    let mut bad = 0usize;
    for i in 0..samples {
        let mut r = rng::stream(seed, (2 * samples + i) as u64);
        let coeffs: Vec<C64> = all.iter().map(|_| rng::complex_gaussian(&mut r)).collect();
        let g = Section::from_entries(&scalar, all.iter().zip(&coeffs).map(|(a, z)| (*a, FiberElement::scalar(*z))))?;
        let e = Section::from_entries(
            &bundle,
            all.iter()
                .zip(&coeffs)
                .map(|(a, z)| (*a, FiberElement::single(CMat::identity(n, n) * *z))),
        )?;
        let dr = (g.reduced_norm(&opts)?.value - e.reduced_norm(&opts)?.value).abs();
        let ds = (g.sobolev(&len, 1.0)? - e.sobolev(&len, 1.0)?).abs();
        if dr > 1e-9 || ds > 1e-9 {
            bad += 1;
        }
    }
    rep.push(CheckRow::count("unit-embedding", "scalar sections", bad));
    rep.sort();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::builders::{cyclic, pair_groupoid};

    fn named<'b>(v: Vec<Section<'b>>) -> Vec<(String, Section<'b>)> {
        v.into_iter().enumerate().map(|(i, s)| (format!("s{i}"), s)).collect()
    }

    #[test]
    fn zeta_four_constant() {
        // π⁴/90 is the exact value; the bound exceeds it by less than 1e-18
        let s = zeta4_bound();
        let exact = std::f64::consts::PI.powi(4) / 90.0;
        assert!((s - exact).abs() < 1e-12, "{s} vs {exact}");
        assert!((s - 1.082323).abs() < 1e-6);
        assert!((c1_constant(3.0, 0) - 3.0 * exact).abs() < 1e-11);
    }

    #[test]
    fn z2_ratio_is_sqrt_two() {
        let v = Arc::new(cyclic(2).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let len = LengthFn::word_length(&v);
        // δ_e + e^{iθ}δ_g has ratio |1 + e^{iθ}|/√2, maximal at θ = 0
        let mut fam = Vec::new();
        for k in 0..8 {
            let th = std::f64::consts::PI * k as f64 / 4.0;
            let s = Section::from_entries(
                &b,
                [(0, FiberElement::scalar(C64::new(1.0, 0.0))), (1, FiberElement::scalar(C64::from_polar(1.0, th)))],
            )
            .unwrap();
            fam.push((format!("theta {k}"), s));
        }
        let scan = rd_ratio_scan(&fam, &len, 0.0, &ReducedOptions::default()).unwrap();
        assert!((scan.max_ratio - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(scan.worst, "theta 0");
        assert!(scan.exact);
    }

    #[test]
    fn pair_indicator_ratio() {
        for n in [2u32, 3, 4] {
            let v = Arc::new(pair_groupoid(n).unwrap());
            let b = ConcreteBundle::trivial(v.clone(), 1).unwrap();
            let f = Section::indicator(&b, 0..v.num_arrows()).unwrap();
            let len = LengthFn::discrete(&v);
            let scan = rd_ratio_scan(&[("one".into(), f)], &len, 0.0, &ReducedOptions::default()).unwrap();
            assert!((scan.max_ratio - (n as f64).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn bhm_equality_cases() {
        let v = Arc::new(cyclic(2).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let f = Section::indicator(&b, [0, 1]).unwrap();
        let (l, r) = bhm_sides(&f).unwrap();
        assert!((l - 4.0).abs() < 1e-12 && (r - 4.0).abs() < 1e-12);
        let pv = Arc::new(pair_groupoid(2).unwrap());
        let pb = ConcreteBundle::trivial(pv.clone(), 3).unwrap();
        let a = FiberElement::random(&mut rng::stream(3, 0), &pb.shape(0));
        let g = Section::from_entries(&pb, [(0, a)]).unwrap();
        let (l, r) = bhm_sides(&g).unwrap();
        assert!((l - r).abs() < 1e-9 * r);
    }

    #[test]
    fn impineq_holds() {
        assert!(impineq_check(5, 20, 3, 4).passed());
    }

    #[test]
    fn sections_chain_on_pair() {
        let v = Arc::new(pair_groupoid(3).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 2).unwrap();
        let all: Vec<_> = (0..v.num_arrows()).collect();
        let secs = named(random_sections(&b, &all, 1, 20).unwrap());
        assert!(norm_chain_check(&secs).unwrap().passed());
        assert!(bhm_check(&secs).unwrap().passed());
    }

    #[test]
    fn restriction_to_units_and_not_closed() {
        let v = Arc::new(pair_groupoid(3).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let units: Vec<_> = (0..v.num_units()).map(|u| v.unit_arrow(u)).collect();
        let secs = named(random_sections(&b, &units, 2, 5).unwrap());
        let keep = |a: ArrowId| v.is_unit_arrow(a);
        let rep = restriction_check(&secs, &keep, &LengthFn::discrete(&v), None, &ReducedOptions::default()).unwrap();
        assert!(rep.passed());
        for (_, f) in &secs {
            let h = f
                .reduced_norm(&ReducedOptions {
                    filter: Some(&keep),
                    ..Default::default()
                })
                .unwrap()
                .value;
            assert!((h - f.sup_norm()).abs() < 1e-12);
        }
        // a single off-diagonal arrow without its inverse is not a subgroupoid
        let bad = |a: ArrowId| v.is_unit_arrow(a) || a == 1;
        let err = check_subgroupoid(&v, &bad).unwrap_err().to_string();
        assert!(err.contains("inverse"), "{err}");
    }

    #[test]
    fn kernel_block_matches_closed_form() {
        let sys = LocalSystem::full_shift(2).unwrap();
        let x = Point::Seq(crate::EvPeriodicPoint::constant(0));
        let (rep, pts) = obstruction_trend(&sys, &x, &[1, 2, 3], 2.0).unwrap();
        for t in &pts {
            // ‖1_{P×P}‖_r = |P|; Sobolev sum per unit 1 + Σ_j 2^{j-1}(1+2j)^4
            let sum: f64 = 1.0 + (1..=t.n).map(|j| 2f64.powi(j as i32 - 1) * (1.0 + 2.0 * j as f64).powi(4)).sum::<f64>();
            assert_eq!(t.block_size, 1 << t.n);
            assert!((t.reduced - t.block_size as f64).abs() < 1e-9);
            assert!((t.sobolev - sum.sqrt()).abs() < 1e-9);
        }
        // the ratios decrease at these scales
        assert!(!rep.passed());
    }

    #[test]
    fn trivial_actions_within_factor() {
        assert!(trivial_action_check(0, 20).unwrap().passed());
    }
}
