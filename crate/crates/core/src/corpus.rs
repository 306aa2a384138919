//! Seeded random instances: a fiber product `R = S ×_k T` of monomial
//! algebras with modules `X, Y` over `S`, `Z, W` over `T` and `M, N` over `R`.
//!
//! Every instance is a pure function of `(params, index)`. Modules are
//! cokernels of presentation matrices with entries in the maximal ideal, so
//! the presentation is minimal and `β_0` equals the number of rows. The
//! resolution budget is enforced while sampling: a ring pair is kept only if
//! `k` resolves to length `depth` within `budget`, and a module only if it
//! (and `X ⊕ Z`) does.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{fiber_product, Element, FiberProductData, FiniteLocalAlgebra};
use crate::error::{Error, Result};
use crate::exactla::PrimeField;
use crate::fdmodule::{AlgebraMatrix, FdModule};
use crate::resolution::MinimalResolution;
use crate::rng::SplitMix64;

const RING_ATTEMPTS: usize = 10_000;
const MODULE_ATTEMPTS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusParams {
    pub seed: u64,
    pub count: usize,
    pub p: u32,
    /// Variables per factor, at most 3.
    pub max_vars: usize,
    /// Largest pure power `x^e` used to cap a variable, at most 4.
    pub max_exponent: u32,
    /// Largest `dim_k` of a factor, at most 6.
    pub max_dim: usize,
    pub max_rows: usize,
    pub max_cols: usize,
    /// Largest degree of a monomial in a presentation entry, at most 2.
    pub max_entry_degree: u32,
    /// Resolution length every sampled module must reach.
    pub depth: usize,
    /// Cap on `β_i · dim A` along those resolutions.
    pub budget: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            seed: 42,
            count: 200,
            p: 5,
            max_vars: 3,
            max_exponent: 4,
            max_dim: 6,
            max_rows: 3,
            max_cols: 4,
            max_entry_degree: 2,
            depth: 8,
            budget: 5000,
        }
    }
}

impl CorpusParams {
    pub fn validate(&self) -> Result<()> {
        PrimeField::new(self.p)?;
        let bad = |what: &str| Err(Error::Argument(format!("corpus parameter out of range: {what}")));
        if !(1..=3).contains(&self.max_vars) {
            return bad("max_vars must be in 1..=3");
        }
        if !(2..=4).contains(&self.max_exponent) {
            return bad("max_exponent must be in 2..=4");
        }
        if !(2..=6).contains(&self.max_dim) {
            return bad("max_dim must be in 2..=6");
        }
        if !(1..=3).contains(&self.max_rows) || self.max_cols > 4 {
            return bad("presentations are at most 3 x 4");
        }
        if !(1..=2).contains(&self.max_entry_degree) {
            return bad("max_entry_degree must be 1 or 2");
        }
        Ok(())
    }
}

/// One corpus item. The `_r` fields are the factor modules with scalars
/// restricted to `R`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub params: CorpusParams,
    pub fiber: FiberProductData,
    pub x: FdModule,
    pub y: FdModule,
    pub z: FdModule,
    pub w: FdModule,
    pub m: FdModule,
    pub n: FdModule,
    pub x_r: FdModule,
    pub y_r: FdModule,
    pub z_r: FdModule,
    pub w_r: FdModule,
}

impl Instance {
    pub fn s(&self) -> &Arc<FiniteLocalAlgebra> {
        &self.fiber.s
    }

    pub fn t(&self) -> &Arc<FiniteLocalAlgebra> {
        &self.fiber.t
    }

    pub fn r(&self) -> &Arc<FiniteLocalAlgebra> {
        &self.fiber.r
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    /// `X ⊕ Z` as an `R`-module.
    pub fn x_plus_z(&self) -> FdModule {
        self.x_r.direct_sum(&self.z_r).expect("both are R-modules")
    }

    fn named_modules(&self) -> [(&'static str, &FdModule); 6] {
        [
            ("X", &self.x),
            ("Y", &self.y),
            ("Z", &self.z),
            ("W", &self.w),
            ("M", &self.m),
            ("N", &self.n),
        ]
    }

    /// First 64 bits of SHA-256 over the rings and module actions, as hex.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.p().to_le_bytes());
        for a in [self.s(), self.t()] {
            h.update(a.presentation().to_string().as_bytes());
            h.update([0]);
        }
        for (name, m) in self.named_modules() {
            h.update(name.as_bytes());
            h.update((m.dim() as u64).to_le_bytes());
            for act in m.actions() {
                for &v in act.data() {
                    h.update(v.to_le_bytes());
                }
            }
        }
        let out = h.finalize();
        out[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `index dimS dimT dimR dimX dimY dimZ dimW dimM dimN digest`.
    pub fn manifest_line(&self) -> String {
        let mut parts = vec![
            self.index.to_string(),
            self.s().dim().to_string(),
            self.t().dim().to_string(),
            self.r().dim().to_string(),
        ];
        parts.extend(self.named_modules().iter().map(|(_, m)| m.dim().to_string()));
        parts.push(self.digest());
        parts.join(" ")
    }

    /// Everything needed to rebuild the instance without the generator.
    pub fn witness(&self) -> Value {
        let module = |m: &FdModule| {
            let action: Vec<Vec<Vec<u32>>> = m
                .actions()
                .iter()
                .map(|a| (0..a.rows()).map(|r| a.row(r).to_vec()).collect())
                .collect();
            json!({ "dim": m.dim(), "action": action })
        };
        let mut modules = serde_json::Map::new();
        for (name, m) in self.named_modules() {
            modules.insert(name.to_string(), module(m));
        }
        json!({
            "seed": self.params.seed,
            "index": self.index,
            "p": self.p(),
            "digest": self.digest(),
            "S": { "presentation": self.s().presentation(), "labels": self.s().labels() },
            "T": { "presentation": self.t().presentation(), "labels": self.t().labels() },
            "modules": modules,
        })
    }
}

/// Degree of each basis element, i.e. the largest `k` with `a_l ∈ 𝔪^k`.
/// Exact for monomial bases, which is what this module builds.
fn basis_degrees(a: &FiniteLocalAlgebra) -> Vec<u32> {
    let d = a.dim();
    let mut deg = vec![0u32; d];
    let mut k = 1;
    loop {
        let pow = a.max_ideal_power(k);
        if pow.dim() == 0 {
            return deg;
        }
        for (l, dl) in deg.iter_mut().enumerate() {
            if pow.contains(&a.basis_element(l)) {
                *dl = k;
            }
        }
        k += 1;
    }
}

fn sample_factor(rng: &mut SplitMix64, params: &CorpusParams, names: &[&str]) -> Result<FiniteLocalAlgebra> {
    let field = PrimeField::new(params.p)?;
    for _ in 0..RING_ATTEMPTS {
        let nv = rng.range(1, params.max_vars as u64) as usize;
        let mut rels: Vec<Vec<u32>> = Vec::new();
        for i in 0..nv {
            let mut e = vec![0; nv];
            e[i] = rng.range(2, params.max_exponent as u64) as u32;
            rels.push(e);
        }
        for i in 0..nv {
            for j in i + 1..nv {
                if rng.chance(1, 2) {
                    let mut e = vec![0; nv];
                    e[i] = rng.range(1, 2) as u32;
                    e[j] = rng.range(1, 2) as u32;
                    rels.push(e);
                }
            }
        }
        let a = FiniteLocalAlgebra::monomial_quotient(field, &names[..nv], &rels)?;
        if a.dim() <= params.max_dim {
            return Ok(a);
        }
    }
    Err(Error::Resource("no factor algebra within max_dim".into()))
}

fn fits(m: &FdModule, params: &CorpusParams) -> Result<bool> {
    match MinimalResolution::with_limit(m, params.depth, params.budget) {
        Ok(_) => Ok(true),
        Err(Error::Resource(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// A nonzero element of `𝔪` supported in degrees `1..=max_degree`.
fn sample_element(rng: &mut SplitMix64, degrees: &[u32], max_degree: u32, p: u32) -> Element {
    let support: Vec<usize> = (0..degrees.len())
        .filter(|&l| (1..=max_degree).contains(&degrees[l]))
        .collect();
    let mut e = vec![0u32; degrees.len()];
    let lead = support[rng.below(support.len() as u64) as usize];
    for &l in &support {
        if l == lead || rng.chance(1, 2) {
            e[l] = rng.range(1, p as u64 - 1) as u32;
        }
    }
    e
}

fn sample_module(rng: &mut SplitMix64, a: &Arc<FiniteLocalAlgebra>, params: &CorpusParams) -> Result<FdModule> {
    if rng.chance(1, 16) {
        return Ok(FdModule::zero(a.clone()));
    }
    let degrees = basis_degrees(a);
    let rows = rng.range(1, params.max_rows as u64) as usize;
    let cols = rng.range(0, params.max_cols as u64) as usize;
    let entries: Vec<Vec<Element>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.chance(1, 4) {
                        a.zero()
                    } else {
                        sample_element(rng, &degrees, params.max_entry_degree, params.p)
                    }
                })
                .collect()
        })
        .collect();
    let pres = if cols == 0 {
        AlgebraMatrix::new(a.dim(), rows, Vec::new())
    } else {
        AlgebraMatrix::from_entries(a.dim(), &entries)?
    };
    FdModule::from_presentation(a.clone(), &pres)
}

/// Samples until `accept` holds, falling back to `k` and then to zero.
fn sample_accepted(
    rng: &mut SplitMix64,
    a: &Arc<FiniteLocalAlgebra>,
    params: &CorpusParams,
    accept: &dyn Fn(&FdModule) -> Result<bool>,
) -> Result<FdModule> {
    for _ in 0..MODULE_ATTEMPTS {
        let m = sample_module(rng, a, params)?;
        if accept(&m)? {
            return Ok(m);
        }
    }
    let k = FdModule::residue_field(a.clone());
    if accept(&k)? {
        return Ok(k);
    }
    Ok(FdModule::zero(a.clone()))
}

pub fn generate(params: &CorpusParams, index: usize) -> Result<Instance> {
    params.validate()?;
    let mut rng = SplitMix64::for_index(params.seed, index as u64);
    let mut fiber = None;
    for _ in 0..RING_ATTEMPTS {
        let s = Arc::new(sample_factor(&mut rng, params, &["x", "u", "v"])?);
        let t = Arc::new(sample_factor(&mut rng, params, &["y", "z", "w"])?);
        let fp = fiber_product(s, t)?;
        if fits(&FdModule::residue_field(fp.r.clone()), params)? {
            fiber = Some(fp);
            break;
        }
    }
    let fiber = fiber.ok_or_else(|| Error::Resource("no ring pair within the resolution budget".into()))?;
    let up_s = |m: &FdModule| FdModule::restrict_scalars(&fiber.eta_s, m);
    let up_t = |m: &FdModule| FdModule::restrict_scalars(&fiber.eta_t, m);

    let via_s = |m: &FdModule| -> Result<bool> { fits(&up_s(m)?, params) };
    let via_t = |m: &FdModule| -> Result<bool> { fits(&up_t(m)?, params) };
    let x = sample_accepted(&mut rng, &fiber.s, params, &via_s)?;
    let y = sample_accepted(&mut rng, &fiber.s, params, &via_s)?;
    let x_r = up_s(&x)?;
    let with_x = |m: &FdModule| -> Result<bool> {
        let mr = up_t(m)?;
        Ok(fits(&mr, params)? && fits(&x_r.direct_sum(&mr)?, params)?)
    };
    let z = sample_accepted(&mut rng, &fiber.t, params, &with_x)?;
    let w = sample_accepted(&mut rng, &fiber.t, params, &via_t)?;
    let direct = |m: &FdModule| -> Result<bool> { fits(m, params) };
    let m = sample_accepted(&mut rng, &fiber.r, params, &direct)?;
    let n = sample_accepted(&mut rng, &fiber.r, params, &direct)?;
    let (y_r, z_r, w_r) = (up_s(&y)?, up_t(&z)?, up_t(&w)?);
    Ok(Instance {
        index,
        params: params.clone(),
        fiber,
        x,
        y,
        z,
        w,
        m,
        n,
        x_r,
        y_r,
        z_r,
        w_r,
    })
}

pub fn generate_all(params: &CorpusParams) -> Result<Vec<Instance>> {
    (0..params.count).map(|i| generate(params, i)).collect()
}

/// One manifest line per instance, in index order.
pub fn manifest(params: &CorpusParams) -> Result<Vec<String>> {
    Ok(generate_all(params)?.iter().map(Instance::manifest_line).collect())
}
