//! Finitely supported sections, their convolution algebra, and norms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{FellBundle, FiberElement, FiberShape};
use crate::error::{input, Error, Result};
use crate::groupoid::{ArrowId, Compose, LengthFn, UnitId};
use crate::linalg::{self, SpectralMethod};
use crate::{CMat, C64};

/// A finitely supported section of a Fell bundle. Absent arrows are zero.
#[derive(Clone)]
pub struct Section<'b> {
    bundle: &'b dyn FellBundle,
    entries: BTreeMap<ArrowId, FiberElement>,
}

impl std::fmt::Debug for Section<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(a, e)| (self.bundle.view().label(*a), e)))
            .finish()
    }
}

/// Which units and which part of each fiber the reduced norm uses.
#[derive(Clone, Copy, Default)]
pub struct ReducedOptions<'a> {
    /// Compress to arrows of length at most this radius.
    pub radius: Option<(&'a LengthFn, f64)>,
    /// Units to sample; `None` samples every unit.
    pub units: Option<&'a [UnitId]>,
    /// Restrict the regular representation to arrows passing this filter
    /// (for subgroupoids).
    pub filter: Option<&'a (dyn Fn(ArrowId) -> bool + Sync)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedNorm {
    pub value: f64,
    /// True when the value is the reduced norm itself rather than a lower
    /// bound from a compression.
    pub exact: bool,
    pub method: SpectralMethod,
    pub units_sampled: usize,
    pub max_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SobolevValue {
    pub p: u32,
    pub source: f64,
    pub range: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub sup_norm: f64,
    pub i_norm: f64,
    pub ii_norm: f64,
    pub l2_s: f64,
    pub l2_r: f64,
    pub sobolev: Vec<SobolevValue>,
    pub reduced: Option<ReducedNorm>,
    /// `‖T_f(x)‖` per unit touching the support.
    pub t_f: Vec<(String, f64)>,
    /// `‖S_f(x)‖` per unit touching the support.
    pub s_f: Vec<(String, f64)>,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl<'b> Section<'b> {
    pub fn zero(bundle: &'b dyn FellBundle) -> Self {
        Section {
            bundle,
            entries: BTreeMap::new(),
        }
    }

    pub fn bundle(&self) -> &'b dyn FellBundle {
        self.bundle
    }

    /// Sets `f(a)`, checking the shape; zero values are dropped.
    pub fn set(&mut self, a: ArrowId, value: FiberElement) -> Result<()> {
        if a >= self.bundle.view().num_arrows() {
            return input(format!("arrow id {a} outside the view"));
        }
        let expect = self.bundle.shape(a);
        if value.shape() != expect {
            return Err(Error::Shape {
                arrow: self.bundle.view().label(a),
                expected: expect.to_string(),
                found: value.shape().to_string(),
            });
        }
        if value.is_zero() {
            self.entries.remove(&a);
        } else {
            self.entries.insert(a, value);
        }
        Ok(())
    }

    pub fn from_entries(bundle: &'b dyn FellBundle, entries: impl IntoIterator<Item = (ArrowId, FiberElement)>) -> Result<Self> {
        let mut s = Section::zero(bundle);
        for (a, e) in entries {
            s.set(a, e)?;
        }
        Ok(s)
    }

    /// `Σ δ_a` over `arrows`, with value the block identity pattern (ones
    /// on each block diagonal).
    pub fn indicator(bundle: &'b dyn FellBundle, arrows: impl IntoIterator<Item = ArrowId>) -> Result<Self> {
        Section::from_entries(
            bundle,
            arrows.into_iter().map(|a| {
                let shape = bundle.shape(a);
                let e = FiberElement {
                    blocks: shape.0.iter().map(|(r, c)| CMat::identity(*r, *c)).collect(),
                };
                (a, e)
            }),
        )
    }

    /// Standard complex Gaussian values on `arrows`.
    pub fn random(bundle: &'b dyn FellBundle, arrows: &[ArrowId], rng: &mut impl Rng) -> Result<Self> {
        Section::from_entries(
            bundle,
            arrows.iter().map(|a| (*a, FiberElement::random(rng, &bundle.shape(*a)))),
        )
    }

    pub fn get(&self, a: ArrowId) -> Option<&FiberElement> {
        self.entries.get(&a)
    }

    /// Value at `a`, zero if absent.
    pub fn value(&self, a: ArrowId) -> FiberElement {
        self.entries
            .get(&a)
            .cloned()
            .unwrap_or_else(|| FiberElement::zeros(&self.bundle.shape(a)))
    }

    pub fn support(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (ArrowId, &FiberElement)> {
        self.entries.iter().map(|(a, e)| (*a, e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Convolution `(f*g)(ζ) = Σ_{γη=ζ} f(γ)g(η)`; every composite of
    /// support pairs must be enumerated.
    pub fn convolve(&self, g: &Section<'_>) -> Result<Section<'b>> {
        let view = self.bundle.view();
        let mut out: BTreeMap<ArrowId, FiberElement> = BTreeMap::new();
        for (&a, fa) in &self.entries {
            for (&b, gb) in &g.entries {
                if view.src(a) != view.rng(b) {
                    continue;
                }
                let (ab, v) = self.bundle.mult(a, b, fa, gb)?;
                match out.get_mut(&ab) {
                    Some(acc) => acc.add_assign(&v),
                    None => {
                        out.insert(ab, v);
                    }
                }
            }
        }
        Section::from_entries(self.bundle, out)
    }

    /// `f*(γ) = f(γ⁻¹)*`.
    pub fn involve(&self) -> Result<Section<'b>> {
        let mut out = Vec::new();
        for (&a, fa) in &self.entries {
            out.push(self.bundle.invol(a, fa)?);
        }
        Section::from_entries(self.bundle, out)
    }

    /// Pointwise scalar multiple `γ ↦ h(γ) f(γ)`.
    pub fn pointwise(&self, h: impl Fn(ArrowId) -> C64) -> Section<'b> {
        let entries = self
            .entries
            .iter()
            .map(|(a, e)| (*a, e.scale(h(*a))))
            .filter(|(_, e)| !e.is_zero())
            .collect();
        Section {
            bundle: self.bundle,
            entries,
        }
    }

    /// `f·(1+L)^p`.
    pub fn weighted(&self, length: &LengthFn, p: f64) -> Section<'b> {
        self.pointwise(|a| C64::new((1.0 + length.eval(a)).powf(p), 0.0))
    }

    pub fn restrict(&self, keep: impl Fn(ArrowId) -> bool) -> Section<'b> {
        Section {
            bundle: self.bundle,
            entries: self
                .entries
                .iter()
                .filter(|(a, _)| keep(**a))
                .map(|(a, e)| (*a, e.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, z: C64) -> Section<'b> {
        self.pointwise(|_| z)
    }

    pub fn add(&self, other: &Section<'_>) -> Section<'b> {
        let mut entries = self.entries.clone();
        for (a, e) in &other.entries {
            let v = match entries.get(a) {
                Some(x) => x.add(e),
                None => e.clone(),
            };
            if v.is_zero() {
                entries.remove(a);
            } else {
                entries.insert(*a, v);
            }
        }
        Section {
            bundle: self.bundle,
            entries,
        }
    }

    pub fn sub(&self, other: &Section<'_>) -> Section<'b> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Largest entrywise difference over the union of supports.
    pub fn max_diff(&self, other: &Section<'_>) -> f64 {
        let keys: BTreeSet<ArrowId> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        keys.into_iter()
            .map(|a| self.value(a).max_diff(&other.value(a)))
            .fold(0.0, f64::max)
    }

    /// `‖f‖_∞ = max_γ ‖f(γ)‖`.
    pub fn sup_norm(&self) -> f64 {
        self.entries.values().map(FiberElement::norm).fold(0.0, f64::max)
    }

    /// `‖f‖_I`: the larger of the worst source-fiber and range-fiber sums of
    /// `‖f(γ)‖`.
    pub fn i_norm(&self) -> f64 {
        let view = self.bundle.view();
        let mut src: HashMap<UnitId, f64> = HashMap::new();
        let mut rng: HashMap<UnitId, f64> = HashMap::new();
        for (&a, e) in &self.entries {
            let n = e.norm();
            *src.entry(view.src(a)).or_default() += n;
            *rng.entry(view.rng(a)).or_default() += n;
        }
        src.values().chain(rng.values()).copied().fold(0.0, f64::max)
    }

    /// `T_f(x) = Σ_{γ∈G_x} (1+L(γ))^{2p} f(γ)*f(γ)` for every unit `x`
    /// meeting the support (with `length = None`, the unweighted sum).
    pub fn source_sums(&self, weight: Option<(&LengthFn, f64)>) -> Result<BTreeMap<UnitId, FiberElement>> {
        let view = self.bundle.view();
        let mut out: BTreeMap<UnitId, FiberElement> = BTreeMap::new();
        for (&a, e) in &self.entries {
            let w = weight.map_or(1.0, |(l, p)| (1.0 + l.eval(a)).powf(2.0 * p));
            let term = self.bundle.star_mult(a, e)?.scale(C64::new(w, 0.0));
            match out.get_mut(&view.src(a)) {
                Some(acc) => acc.add_assign(&term),
                None => {
                    out.insert(view.src(a), term);
                }
            }
        }
        Ok(out)
    }

    /// `S_f(x) = Σ_{γ∈G^x} (1+L(γ))^{2p} f(γ)f(γ)*`.
    pub fn range_sums(&self, weight: Option<(&LengthFn, f64)>) -> Result<BTreeMap<UnitId, FiberElement>> {
        let view = self.bundle.view();
        let mut out: BTreeMap<UnitId, FiberElement> = BTreeMap::new();
        for (&a, e) in &self.entries {
            let w = weight.map_or(1.0, |(l, p)| (1.0 + l.eval(a)).powf(2.0 * p));
            let term = self.bundle.mult_star(a, e)?.scale(C64::new(w, 0.0));
            match out.get_mut(&view.rng(a)) {
                Some(acc) => acc.add_assign(&term),
                None => {
                    out.insert(view.rng(a), term);
                }
            }
        }
        Ok(out)
    }

    /// `‖f‖_{2,p,s,L}`.
    pub fn sobolev_source(&self, length: &LengthFn, p: f64) -> Result<f64> {
        let sums = self.source_sums(Some((length, p)))?;
        Ok(sums.values().map(|t| t.max_eigenvalue()).fold(0.0, f64::max).max(0.0).sqrt())
    }

    /// `‖f‖_{2,p,r,L} = ‖f*‖_{2,p,s,L}`.
    pub fn sobolev_range(&self, length: &LengthFn, p: f64) -> Result<f64> {
        let sums = self.range_sums(Some((length, p)))?;
        Ok(sums.values().map(|t| t.max_eigenvalue()).fold(0.0, f64::max).max(0.0).sqrt())
    }

    /// `‖f‖_{2,p,L} = max(‖f‖_{2,p,s,L}, ‖f‖_{2,p,r,L})`.
    pub fn sobolev(&self, length: &LengthFn, p: f64) -> Result<f64> {
        Ok(self.sobolev_source(length, p)?.max(self.sobolev_range(length, p)?))
    }

    /// `‖f‖_II`, the `p = 0` Sobolev norm.
    pub fn ii_norm(&self) -> Result<f64> {
        let s = self.source_sums(None)?;
        let r = self.range_sums(None)?;
        let top = |m: &BTreeMap<UnitId, FiberElement>| m.values().map(|t| t.max_eigenvalue()).fold(0.0, f64::max);
        Ok(top(&s).max(top(&r)).max(0.0).sqrt())
    }

    /// Norm of the left-regular representation, maximized over sampled
    /// units. On a closed view with every unit sampled and no radius this
    /// is `‖f‖_r` exactly; otherwise it is the norm of a compression and
    /// hence a lower bound.
    pub fn reduced_norm(&self, opts: &ReducedOptions<'_>) -> Result<ReducedNorm> {
        let view = self.bundle.view();
        if let Some((len, r)) = opts.radius {
            if let Some(a) = self.entries.keys().find(|a| len.eval(**a) > r + 1e-12) {
                return input(format!(
                    "budget radius {r} is smaller than L({}) = {}",
                    view.label(*a),
                    len.eval(*a)
                ));
            }
        }
        let all_units: Vec<UnitId> = (0..view.num_units()).collect();
        let units = opts.units.unwrap_or(&all_units);
        let exact = view.is_closed()
            && opts.radius.is_none()
            && opts.filter.is_none()
            && units.len() == view.num_units();

        let mut by_src: HashMap<UnitId, Vec<ArrowId>> = HashMap::new();
        for &a in self.entries.keys() {
            by_src.entry(view.src(a)).or_default().push(a);
        }
        let results: Vec<Result<(f64, SpectralMethod, usize)>> = units
            .par_iter()
            .map(|&x| self.regular_norm_at(x, &by_src, opts))
            .collect();
        let mut value: f64 = 0.0;
        let mut method = SpectralMethod::Empty;
        let mut max_dim = 0;
        for r in results {
            let (v, m, d) = r?;
            if v > value || method == SpectralMethod::Empty {
                value = value.max(v);
            }
            if m == SpectralMethod::PowerIteration || method == SpectralMethod::Empty {
                method = m;
            }
            max_dim = max_dim.max(d);
        }
        Ok(ReducedNorm {
            value,
            exact,
            method,
            units_sampled: units.len(),
            max_dim,
        })
    }

    fn regular_norm_at(
        &self,
        x: UnitId,
        by_src: &HashMap<UnitId, Vec<ArrowId>>,
        opts: &ReducedOptions<'_>,
    ) -> Result<(f64, SpectralMethod, usize)> {
        let view = self.bundle.view();
        let in_basis = |a: ArrowId| {
            opts.radius.is_none_or(|(l, r)| l.eval(a) <= r + 1e-12) && opts.filter.is_none_or(|f| f(a))
        };
        let basis: Vec<ArrowId> = view.source_fiber(x).iter().copied().filter(|a| in_basis(*a)).collect();
        if !basis.iter().any(|eta| by_src.contains_key(&view.rng(*eta))) {
            return Ok((0.0, SpectralMethod::Empty, 0));
        }
        let mut offset: HashMap<ArrowId, usize> = HashMap::new();
        let mut shapes: Vec<FiberShape> = Vec::new();
        let mut dim = 0;
        for &eta in &basis {
            offset.insert(eta, dim);
            let s = self.bundle.shape(eta);
            dim += s.dim();
            shapes.push(s);
        }
        let mut t = CMat::zeros(dim, dim);
        let mut gram = CMat::zeros(dim, dim);
        for (i, &eta) in basis.iter().enumerate() {
            let shape = &shapes[i];
            let col0 = offset[&eta];
            let inv = view.inverse_strict(eta)?;
            for k in 0..shape.dim() {
                let e = FiberElement::basis(shape, k);
                // Gram block: τ(e_k* e_l) with τ the trace on the unit fiber
                let (_, ek_star) = self.bundle.invol(eta, &e)?;
                for l in 0..shape.dim() {
                    let el = FiberElement::basis(shape, l);
                    let (_, p) = self.bundle.mult(inv, eta, &ek_star, &el)?;
                    let tr: C64 = p.blocks.iter().map(|b| b.trace()).sum();
                    gram[(col0 + k, col0 + l)] = tr;
                }
                let Some(gammas) = by_src.get(&view.rng(eta)) else { continue };
                for &g in gammas {
                    let zeta = match view.compose(g, eta) {
                        Compose::Arrow(z) => z,
                        _ => continue,
                    };
                    let Some(&row0) = offset.get(&zeta) else { continue };
                    let (_, v) = self.bundle.mult(g, eta, &self.entries[&g], &e)?;
                    for (r, z) in v.entries().enumerate() {
                        t[(row0 + r, col0 + k)] += z;
                    }
                }
            }
        }
        let identity_defect = linalg::max_entry_distance(&gram, &CMat::identity(dim, dim));
        let op = if identity_defect < 1e-12 {
            t
        } else {
            let g_half = linalg::psd_sqrt(&gram);
            let g_inv_half = linalg::hermitian_function(&gram, |l| if l > 1e-14 { 1.0 / l.sqrt() } else { 0.0 });
            g_half * t * g_inv_half
        };
        let s = linalg::spectral_norm(&op);
        Ok((s.value, s.method, dim))
    }

    /// All norms except the reduced one, which is added when `reduced` is
    /// given.
    pub fn norms(&self, length: &LengthFn, ps: &[u32], reduced: Option<&ReducedOptions<'_>>) -> Result<NormReport> {
        let view = self.bundle.view();
        let mut sobolev = Vec::new();
        for &p in ps {
            let s = self.sobolev_source(length, p as f64)?;
            let r = self.sobolev_range(length, p as f64)?;
            sobolev.push(SobolevValue {
                p,
                source: s,
                range: r,
                value: s.max(r),
            });
        }
        let t = self.source_sums(None)?;
        let s = self.range_sums(None)?;
        let top = |m: &BTreeMap<UnitId, FiberElement>| m.values().map(|t| t.max_eigenvalue()).fold(0.0, f64::max);
        let l2_s = top(&t).max(0.0).sqrt();
        let l2_r = top(&s).max(0.0).sqrt();
        Ok(NormReport {
            sup_norm: self.sup_norm(),
            i_norm: self.i_norm(),
            ii_norm: l2_s.max(l2_r),
            l2_s,
            l2_r,
            sobolev,
            reduced: reduced.map(|o| self.reduced_norm(o)).transpose()?,
            t_f: t.iter().map(|(u, e)| (view.unit(*u).to_string(), e.norm())).collect(),
            s_f: s.iter().map(|(u, e)| (view.unit(*u).to_string(), e.norm())).collect(),
        })
    }
}

/// Exact reduced norm on a closed view (all units, no compression).
pub fn exact_reduced(f: &Section<'_>) -> Result<f64> {
    Ok(f.reduced_norm(&ReducedOptions::default())?.value)
}

pub fn scalar(z: f64) -> FiberElement {
    FiberElement::scalar(C64::new(z, 0.0))
}

pub fn unit_scalar() -> FiberElement {
    FiberElement::scalar(one())
}
