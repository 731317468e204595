//! Negative-type functions, Schoenberg exponentials, pointwise multipliers
//! and the local approximation experiment.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::groupoid::{builders, ArrowId, Compose, FiniteGroupoidView, LengthFn};
use crate::linalg;
use crate::report::{CheckReport, CheckRow};
use crate::rng;
use crate::section::{ReducedOptions, Section};
use crate::{CMat, C64};

/// A scalar function on the arrows of a view.
#[derive(Clone, Debug)]
pub struct ArrowFunction {
    name: String,
    values: Vec<C64>,
}

impl ArrowFunction {
    pub fn from_fn(view: &FiniteGroupoidView, name: impl Into<String>, f: impl Fn(ArrowId) -> C64) -> Self {
        ArrowFunction {
            name: name.into(),
            values: (0..view.num_arrows()).map(f).collect(),
        }
    }

    pub fn real(view: &FiniteGroupoidView, name: impl Into<String>, f: impl Fn(ArrowId) -> f64) -> Self {
        ArrowFunction::from_fn(view, name, |a| C64::new(f(a), 0.0))
    }

    pub fn zero(view: &FiniteGroupoidView) -> Self {
        ArrowFunction::real(view, "zero", |_| 0.0)
    }

    /// `0` on units, `1` elsewhere.
    pub fn equilateral(view: &FiniteGroupoidView) -> Self {
        ArrowFunction::real(view, "equilateral", |a| if view.is_unit_arrow(a) { 0.0 } else { 1.0 })
    }

    pub fn from_length(length: &LengthFn) -> Self {
        ArrowFunction {
            name: length.name().to_string(),
            values: length.values().iter().map(|v| C64::new(*v, 0.0)).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, a: ArrowId) -> C64 {
        self.values[a]
    }

    /// `‖h‖_∞` over every arrow of the view.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `e^{-tψ}`.
    pub fn schoenberg(&self, t: f64) -> Self {
        ArrowFunction {
            name: format!("exp(-{t} {})", self.name),
            values: self.values.iter().map(|z| (-t * z).exp()).collect(),
        }
    }

    /// Checks that `ψ` is real, vanishes on units and is symmetric.
    pub fn validate_psi(&self, view: &FiniteGroupoidView) -> Result<()> {
        for a in 0..view.num_arrows() {
            let v = self.values[a];
            if v.im.abs() > 1e-12 {
                return input(format!("{} is not real at {}", self.name, view.label(a)));
            }
            if view.is_unit_arrow(a) && v.re.abs() > 1e-12 {
                return input(format!("{} does not vanish on the unit {}", self.name, view.label(a)));
            }
            if let Some(ai) = view.inverse(a) {
                if (self.values[ai] - v).norm() > 1e-12 {
                    return input(format!("{} is not symmetric at {}", self.name, view.label(a)));
                }
            }
        }
        Ok(())
    }
}

/// How tuples `γ_1, …, γ_m ∈ G^x` are drawn.
#[derive(Clone, Debug, Serialize)]
pub struct TupleConfig {
    /// Pools up to this size are checked through the full pool matrix,
    /// which covers every tuple drawn from the pool.
    pub full_limit: usize,
    /// Tuple size for random tuples from larger pools.
    pub tuple_size: usize,
    pub random_tuples: usize,
    pub seed: u64,
    /// Only arrows with `L ≤ pool_radius` enter the pool.
    pub pool_radius: Option<f64>,
}

impl Default for TupleConfig {
    fn default() -> Self {
        TupleConfig {
            full_limit: 64,
            tuple_size: 6,
            random_tuples: 200,
            seed: 0,
            pool_radius: None,
        }
    }
}

/// Kernel matrix `[k(γ_i⁻¹γ_j)]` for a tuple in one range fiber.
fn kernel_matrix(view: &FiniteGroupoidView, k: &ArrowFunction, tuple: &[ArrowId]) -> Result<CMat> {
    let n = tuple.len();
    let mut m = CMat::zeros(n, n);
    for (i, &gi) in tuple.iter().enumerate() {
        let inv = view.inverse_strict(gi)?;
        for (j, &gj) in tuple.iter().enumerate() {
            match view.compose(inv, gj) {
                Compose::Arrow(a) => m[(i, j)] = k.eval(a),
                _ => {
                    return Err(Error::Budget {
                        left: view.label(inv),
                        right: view.label(gj),
                    })
                }
            }
        }
    }
    Ok(m)
}

/// Per-unit tuples: the whole pool when small, otherwise seeded random
/// subsets.
fn tuples(
    view: &FiniteGroupoidView,
    length: Option<&LengthFn>,
    cfg: &TupleConfig,
) -> Vec<(String, Vec<ArrowId>)> {
    let mut out = Vec::new();
    for x in 0..view.num_units() {
        let pool: Vec<ArrowId> = view
            .range_fiber(x)
            .iter()
            .copied()
            .filter(|a| match (cfg.pool_radius, length) {
                (Some(r), Some(l)) => l.eval(*a) <= r + 1e-12,
                _ => true,
            })
            .collect();
        if pool.len() <= cfg.full_limit {
            out.push((format!("{} full pool {}", view.unit(x), pool.len()), pool));
        } else {
            let mut r = rng::stream(cfg.seed, x as u64);
            let m = cfg.tuple_size.min(pool.len());
            for k in 0..cfg.random_tuples {
                let idx = sample(&mut r, pool.len(), m);
                out.push((format!("{} tuple {k:03}", view.unit(x)), idx.iter().map(|i| pool[i]).collect()));
            }
        }
    }
    out
}

pub const NEG_TYPE_TOL: f64 = 1e-9;

fn normalized(m: &CMat) -> CMat {
    let s = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if s > 0.0 {
        m / C64::new(s, 0.0)
    } else {
        m.clone()
    }
}

/// Largest eigenvalue of `Ψ` compressed to the sum-zero subspace, after
/// scaling `Ψ` to unit max entry.
pub fn compressed_top_eigenvalue(psi: &CMat) -> f64 {
    let n = psi.nrows();
    if n < 2 {
        return 0.0;
    }
    // Helmert basis of {c : Σc_i = 0}: column k is (1,…,1,−k,0,…)/√(k(k+1))
    let q = CMat::from_fn(n, n - 1, |i, j| {
        let k = (j + 1) as f64;
        let s = (k * (k + 1.0)).sqrt();
        match i.cmp(&(j + 1)) {
            std::cmp::Ordering::Less => C64::new(1.0 / s, 0.0),
            std::cmp::Ordering::Equal => C64::new(-k / s, 0.0),
            std::cmp::Ordering::Greater => C64::new(0.0, 0.0),
        }
    });
    let c = q.adjoint() * normalized(psi) * &q;
    linalg::max_eigenvalue(&linalg::hermitize(&c))
}

/// Negative type: on every tuple, `Σ c̄_i c_j ψ(γ_i⁻¹γ_j) ≤ 0` whenever
/// `Σ c_i = 0`.
pub fn is_negative_type(
    view: &FiniteGroupoidView,
    psi: &ArrowFunction,
    length: Option<&LengthFn>,
    cfg: &TupleConfig,
    tol: f64,
) -> Result<CheckReport> {
    psi.validate_psi(view)?;
    let mut rep = CheckReport::new("negative-type");
    rep.system = view.describe().to_string();
    rep.seed = cfg.seed;
    rep.param("psi", psi.name()).param("tuples", cfg).param("tol", tol);
    let ts = tuples(view, length, cfg);
    let rows: Vec<Result<CheckRow>> = ts
        .par_iter()
        .map(|(name, t)| {
            let m = kernel_matrix(view, psi, t)?;
            Ok(CheckRow::leq("compressed-form", name.clone(), compressed_top_eigenvalue(&m), 0.0, tol))
        })
        .collect();
    for r in rows {
        rep.push(r?);
    }
    rep.sort();
    Ok(rep)
}

/// Minimum eigenvalue of a kernel matrix scaled to unit max entry.
pub fn psd_defect(m: &CMat) -> f64 {
    linalg::min_eigenvalue(&linalg::hermitize(&normalized(m)))
}

/// Positive definiteness of `h` on the sampled tuples.
pub fn psd_check(
    view: &FiniteGroupoidView,
    h: &ArrowFunction,
    length: Option<&LengthFn>,
    cfg: &TupleConfig,
    tol: f64,
) -> Result<CheckReport> {
    let mut rep = CheckReport::new("positive-definite");
    rep.param("h", h.name());
    let rows: Vec<Result<CheckRow>> = tuples(view, length, cfg)
        .par_iter()
        .map(|(name, t)| {
            let m = kernel_matrix(view, h, t)?;
            Ok(CheckRow::leq("kernel-psd", name.clone(), -psd_defect(&m), 0.0, tol))
        })
        .collect();
    for r in rows {
        rep.push(r?);
    }
    rep.sort();
    Ok(rep)
}

/// `h_t = e^{-tψ}` for each `t` in the grid: PSD on the sampled tuples,
/// and `max |h_t − 1|` over the view nonincreasing as `t` decreases.
pub fn schoenberg_family(
    view: &FiniteGroupoidView,
    psi: &ArrowFunction,
    ts: &[f64],
    length: Option<&LengthFn>,
    cfg: &TupleConfig,
    tol: f64,
) -> Result<(CheckReport, Vec<ArrowFunction>)> {
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0)) {
        return input(format!("Schoenberg parameters must be positive, got {t}"));
    }
    let mut rep = CheckReport::new("schoenberg");
    rep.param("psi", psi.name()).param("t", ts.to_vec());
    let mut fam = Vec::new();
    for &t in ts {
        let h = psi.schoenberg(t);
        let sub = psd_check(view, &h, length, cfg, tol)?;
        rep.absorb(&format!("t={t}"), sub);
        fam.push(h);
    }
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|a, b| ts[*b].total_cmp(&ts[*a]));
    let dev = |h: &ArrowFunction| h.values.iter().map(|z| (z - C64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    for w in order.windows(2) {
        rep.push(CheckRow::leq(
            "uniform-convergence",
            format!("t={} -> t={}", ts[w[0]], ts[w[1]]),
            dev(&fam[w[1]]),
            dev(&fam[w[0]]),
            1e-15,
        ));
    }
    rep.sort();
    Ok((rep, fam))
}

/// `(M_h f)(γ) = h(γ) f(γ)`.
pub fn apply_multiplier<'b>(h: &ArrowFunction, f: &Section<'b>) -> Section<'b> {
    f.pointwise(|a| h.eval(a))
}

/// `B_p(h) = max |h(γ)|(1+L(γ))^p` over the view.
pub fn b_p(h: &ArrowFunction, length: &LengthFn, p: f64) -> f64 {
    (0..h.values.len())
        .map(|a| h.eval(a).norm() * (1.0 + length.eval(a)).powf(p))
        .fold(0.0, f64::max)
}

pub const MULT_TOL: f64 = 1e-9;

/// Contractivity `‖M_h f‖_r ≤ ‖h‖_∞‖f‖_r` and the Schwartz bound
/// `‖M_h f‖_{2,p,L} ≤ B_p(h)‖f‖_r` for each `(h, f)` pair.
pub fn multiplier_check(
    pairs: &[(String, ArrowFunction, Section<'_>)],
    length: &LengthFn,
    p: f64,
) -> Result<CheckReport> {
    let mut rep = CheckReport::new("multiplier");
    rep.param("p", p);
    let opts = ReducedOptions::default();
    let rows: Vec<Result<Vec<CheckRow>>> = pairs
        .par_iter()
        .map(|(name, h, f)| {
            let mf = apply_multiplier(h, f);
            let fr = f.reduced_norm(&opts)?.value;
            let mfr = mf.reduced_norm(&opts)?.value;
            let sob = mf.sobolev(length, p)?;
            Ok(vec![
                CheckRow::leq("contractive", name.clone(), mfr, h.sup_abs() * fr, MULT_TOL),
                CheckRow::leq("schwartz-bound", name.clone(), sob, b_p(h, length, p) * fr, MULT_TOL),
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

/// A positive-definite function of sup norm 1 on a pair groupoid:
/// `h(i, j) = ⟨v_i, v_j⟩` for random unit vectors.
pub fn random_pd_on_pair(view: &FiniteGroupoidView, dim: usize, rng: &mut impl Rng) -> Result<ArrowFunction> {
    let vs: Vec<Vec<C64>> = (0..view.num_units()).map(|_| rng::unit_vector(rng, dim)).collect();
    let mut vals = Vec::with_capacity(view.num_arrows());
    for a in 0..view.num_arrows() {
        let (r, s) = (view.rng(a), view.src(a));
        vals.push(vs[r].iter().zip(&vs[s]).map(|(x, y)| x.conj() * y).sum());
    }
    if vals.len() != view.num_arrows() {
        return input("arrow count changed");
    }
    Ok(ArrowFunction {
        name: "gram".into(),
        values: vals,
    })
}

/// A positive-definite function on `Z/n`: a convex combination of
/// characters, `h(k) = Σ_χ w_χ e^{2πiχk/n}`.
pub fn random_pd_on_cyclic(view: &FiniteGroupoidView, rng: &mut impl Rng) -> Result<ArrowFunction> {
    use crate::group::GroupElem;
    use crate::groupoid::Payload;
    let n = view.num_arrows();
    let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let mut vals = Vec::with_capacity(n);
    for a in 0..n {
        let k = match view.payload(a) {
            Payload::Group {
                element: GroupElem::Mod { k, .. },
                ..
            } => *k as f64,
            _ => return input("characters need a cyclic group view"),
        };
        let z: C64 = w
            .iter()
            .enumerate()
            .map(|(c, wc)| C64::from_polar(*wc, 2.0 * std::f64::consts::PI * c as f64 * k / n as f64))
            .sum();
        vals.push(z);
    }
    Ok(ArrowFunction {
        name: "characters".into(),
        values: vals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub error: f64,
    pub bound: f64,
}

/// `‖M_{h_t}f − f‖_r` for the equilateral `ψ`, against `(1−e^{−t})‖f‖_r`.
/// For `f` vanishing on units the two agree; in general the error is
/// `(1−e^{−t})` times the norm of the off-unit part.
pub fn hap_decay_trace(f: &Section<'_>, ts: &[f64]) -> Result<Vec<TraceRow>> {
    let view = f.bundle().view();
    let psi = ArrowFunction::equilateral(view);
    let opts = ReducedOptions::default();
    let fr = f.reduced_norm(&opts)?.value;
    ts.iter()
        .map(|&t| {
            let err = apply_multiplier(&psi.schoenberg(t), f).sub(f).reduced_norm(&opts)?.value;
            Ok(TraceRow {
                t,
                error: err,
                bound: (1.0 - (-t).exp()) * fr,
            })
        })
        .collect()
}

pub const HAP_TOL: f64 = 1e-9;

/// Checks the decay trace: `error ≤ bound` always, and `error = bound` for
/// sections without unit-arrow support.
pub fn hap_decay_check(f: &Section<'_>, ts: &[f64]) -> Result<(CheckReport, Vec<TraceRow>)> {
    let trace = hap_decay_trace(f, ts)?;
    let view = f.bundle().view();
    let off_unit = f.support().all(|a| !view.is_unit_arrow(a));
    let mut rep = CheckReport::new("hap-decay");
    rep.param("off_unit", off_unit);
    let off = f.restrict(|a| !view.is_unit_arrow(a));
    let off_r = off.reduced_norm(&ReducedOptions::default())?.value;
    for row in &trace {
        let inst = format!("t={}", row.t);
        let exact = (1.0 - (-row.t).exp()) * off_r;
        rep.push(CheckRow::eq("off-unit-factorization", inst.clone(), row.error, exact, HAP_TOL));
        if off_unit {
            rep.push(CheckRow::eq("matches-bound", inst, row.error, row.bound, HAP_TOL));
        }
    }
    rep.sort();
    Ok((rep, trace))
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxRow {
    pub t: f64,
    pub error: f64,
    pub bound: f64,
    /// True when `error` is the exact reduced norm, false when it is the
    /// I-norm upper bound.
    pub certified: bool,
}

/// Approximants `g_t = (M_{h_t} f)|_U`, their errors `‖f − g_t‖` and the
/// bound `‖f‖_I·max_supp|1−h_t| + ‖f|_{U^c}‖_I·max_{supp∖U}|h_t|`.
///
/// Rows check `error ≤ bound`, that errors do not increase as `t`
/// decreases, and, when `supp f ⊆ U`, that the `t → 0` limit (`h ≡ 1`)
/// reproduces `f`.
pub fn local_approximate(
    f: &Section<'_>,
    in_u: &(dyn Fn(ArrowId) -> bool + Sync),
    psi: &ArrowFunction,
    ts: &[f64],
) -> Result<(CheckReport, Vec<ApproxRow>)> {
    let view = f.bundle().view();
    let closed = view.is_closed();
    let err_norm = |g: &Section<'_>| -> Result<f64> {
        if closed {
            Ok(g.reduced_norm(&ReducedOptions::default())?.value)
        } else {
            Ok(g.i_norm())
        }
    };
    let supp: Vec<ArrowId> = f.support().collect();
    let f_i = f.i_norm();
    let outside = f.restrict(|a| !in_u(a));
    let out_i = outside.i_norm();
    let mut grid: Vec<f64> = ts.to_vec();
    grid.sort_by(|a, b| b.total_cmp(a));
    let rows: Vec<Result<ApproxRow>> = grid
        .par_iter()
        .map(|&t| {
            let h = psi.schoenberg(t);
            let g = apply_multiplier(&h, f).restrict(in_u);
            let error = err_norm(&f.sub(&g))?;
            let dev = supp.iter().map(|a| (h.eval(*a) - C64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
            let h_out = supp.iter().filter(|a| !in_u(**a)).map(|a| h.eval(*a).norm()).fold(0.0, f64::max);
            Ok(ApproxRow {
                t,
                error,
                bound: f_i * dev + out_i * h_out,
                certified: closed,
            })
        })
        .collect();
    let rows: Vec<ApproxRow> = rows.into_iter().collect::<Result<_>>()?;
    let mut rep = CheckReport::new("local-approximation");
    rep.param("psi", psi.name()).param("t", grid.clone()).param("certified", closed);
    for r in &rows {
        rep.push(CheckRow::leq("bound", format!("t={}", r.t), r.error, r.bound, MULT_TOL));
    }
    for w in rows.windows(2) {
        rep.push(CheckRow::leq(
            "nonincreasing",
            format!("t={} -> t={}", w[0].t, w[1].t),
            w[1].error,
            w[0].error,
            MULT_TOL,
        ));
    }
    let limit = err_norm(&f.sub(&f.restrict(in_u)))?;
    if supp.iter().all(|a| in_u(*a)) {
        rep.push(CheckRow::leq("limit", "t=0", limit, 0.0, MULT_TOL));
    } else {
        rep.note(format!("support leaves U; t -> 0 error tends to {limit:.6e}"));
    }
    rep.sort();
    Ok((rep, rows))
}

/// Word length on the group groupoid of the `F_rank` ball of radius
/// `2·pool_radius`, with the tuple pool restricted to `pool_radius` so
/// every product `γ_i⁻¹γ_j` stays in the ball.
pub fn free_group_fixture(rank: u32, pool_radius: usize) -> Result<(Arc<FiniteGroupoidView>, LengthFn, TupleConfig)> {
    let view = Arc::new(builders::free_ball(rank, 2 * pool_radius)?);
    let len = LengthFn::word_length(&view);
    let cfg = TupleConfig {
        pool_radius: Some(pool_radius as f64),
        ..Default::default()
    };
    Ok((view, len, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{ConcreteBundle, FellBundle, FiberElement};
    use crate::groupoid::builders::{cyclic, pair_groupoid};

    #[test]
    fn equilateral_and_zero_are_negative_type() {
        let v = pair_groupoid(4).unwrap();
        let cfg = TupleConfig::default();
        assert!(is_negative_type(&v, &ArrowFunction::zero(&v), None, &cfg, NEG_TYPE_TOL).unwrap().passed());
        let eq = ArrowFunction::equilateral(&v);
        assert!(is_negative_type(&v, &eq, None, &cfg, NEG_TYPE_TOL).unwrap().passed());
        // equilateral form on sum-zero c is −Σ|c|²
        let m = kernel_matrix(&v, &eq, v.range_fiber(0)).unwrap();
        assert!((compressed_top_eigenvalue(&m) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn word_length_on_free_group_ball() {
        let (v, len, cfg) = free_group_fixture(2, 3).unwrap();
        let psi = ArrowFunction::from_length(&len);
        let rep = is_negative_type(&v, &psi, Some(&len), &cfg, NEG_TYPE_TOL).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().next());
        assert!(rep.rows[0].instance.contains("full pool 53"));
        let (s, _) = schoenberg_family(&v, &psi, &[0.5], Some(&len), &cfg, NEG_TYPE_TOL).unwrap();
        assert!(s.passed());
    }

    #[test]
    fn non_negative_type_is_rejected() {
        // ψ = -equilateral violates the sign condition
        let v = pair_groupoid(3).unwrap();
        let psi = ArrowFunction::real(&v, "minus", |a| if v.is_unit_arrow(a) { 0.0 } else { -1.0 });
        assert!(!is_negative_type(&v, &psi, None, &TupleConfig::default(), NEG_TYPE_TOL).unwrap().passed());
        let asym = ArrowFunction::real(&v, "asym", |a| if v.is_unit_arrow(a) { 0.0 } else { a as f64 });
        assert!(is_negative_type(&v, &asym, None, &TupleConfig::default(), NEG_TYPE_TOL).is_err());
    }

    #[test]
    fn z2_multiplier_example() {
        let v = Arc::new(cyclic(2).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let h = ArrowFunction::real(&v, "h", |a| if a == 0 { 1.0 } else { 0.5 });
        let f = Section::indicator(&b, [0, 1]).unwrap();
        let mf = apply_multiplier(&h, &f);
        assert!((mf.reduced_norm(&ReducedOptions::default()).unwrap().value - 1.5).abs() < 1e-12);
        let one = ArrowFunction::real(&v, "one", |_| 1.0);
        assert!(apply_multiplier(&one, &f).max_diff(&f) == 0.0);
    }

    #[test]
    fn hap_trace_factorizes() {
        let v = Arc::new(pair_groupoid(3).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 2).unwrap();
        let off: Vec<_> = (0..v.num_arrows()).filter(|a| !v.is_unit_arrow(*a)).collect();
        let f = Section::random(&b, &off, &mut rng::stream(4, 0)).unwrap();
        let (rep, trace) = hap_decay_check(&f, &[2.0, 1.0, 0.5, 0.1]).unwrap();
        assert!(rep.passed());
        assert!(trace.windows(2).all(|w| w[1].error <= w[0].error));
        // J − 1.5I has norm 1.5 while its off-unit part J − I has norm 2
        let b1 = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let g = Section::from_entries(
            &b1,
            (0..v.num_arrows()).map(|a| {
                let z = if v.is_unit_arrow(a) { -0.5 } else { 1.0 };
                (a, FiberElement::scalar(C64::new(z, 0.0)))
            }),
        )
        .unwrap();
        let tr = hap_decay_trace(&g, &[1.0]).unwrap();
        assert!(tr[0].error > tr[0].bound);
        assert_eq!(b1.view().num_arrows(), 9);
    }

    #[test]
    fn local_approximation_inside_u() {
        let v = Arc::new(pair_groupoid(3).unwrap());
        let b = ConcreteBundle::trivial(v.clone(), 1).unwrap();
        let all: Vec<_> = (0..v.num_arrows()).collect();
        let f = Section::random(&b, &all, &mut rng::stream(9, 0)).unwrap();
        let psi = ArrowFunction::equilateral(&v);
        let in_u = |_: ArrowId| true;
        let (rep, rows) = local_approximate(&f, &in_u, &psi, &[4.0, 1.0, 0.25, 0.0625]).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert!(rows.iter().all(|r| r.certified));
    }

    #[test]
    fn random_pd_functions_are_pd() {
        let v = pair_groupoid(4).unwrap();
        let h = random_pd_on_pair(&v, 3, &mut rng::stream(1, 1)).unwrap();
        assert!(psd_check(&v, &h, None, &TupleConfig::default(), NEG_TYPE_TOL).unwrap().passed());
        assert!((h.sup_abs() - 1.0).abs() < 1e-12);
        let c = cyclic(5).unwrap();
        let h = random_pd_on_cyclic(&c, &mut rng::stream(1, 2)).unwrap();
        assert!(psd_check(&c, &h, None, &TupleConfig::default(), NEG_TYPE_TOL).unwrap().passed());
    }
}
