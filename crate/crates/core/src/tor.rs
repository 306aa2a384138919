//! `dim_k Tor^A_i(M, N)` from minimal resolutions, with both arguments
//! available for resolving so that each route checks the other.

use serde::{Deserialize, Serialize};

use crate::algebra::FiberProductData;
use crate::error::{Error, Result};
use crate::fdmodule::FdModule;
use crate::resolution::{MinimalResolution, DEFAULT_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorMethod {
    /// Resolve the first argument.
    Left,
    /// Resolve the second argument.
    Right,
    /// Both, with an entrywise comparison.
    Both,
}

/// `dims[i] = dim_k Tor_i(M, N)` for `0 ≤ i ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorTable {
    pub bound: usize,
    pub method: TorMethod,
    pub dims: Vec<usize>,
    /// Present for [`TorMethod::Both`]; a mismatch is reported as an error,
    /// so a returned table always has `true` here.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balanced: Option<bool>,
}

impl TorTable {
    pub fn get(&self, i: usize) -> usize {
        self.dims[i]
    }
}

/// Tor of the resolved module against `n`, read off from `d_i ⊗ N`; the
/// last rank comes from `Ω^{L+1}`, so a resolution of length `bound` suffices.
pub fn tor_from_resolution(res: &MinimalResolution, n: &FdModule, bound: usize) -> Result<Vec<usize>> {
    if res.length() < bound && !res.terminated() {
        return Err(Error::Argument(format!(
            "resolution of length {} cannot give Tor_{bound}",
            res.length()
        )));
    }
    let nd = n.dim();
    let rank = |i: usize| -> usize {
        if i == 0 {
            return 0;
        }
        let image = if i <= res.length() {
            res.differential(i).cloned()
        } else {
            res.syzygy_inclusion(i)
        };
        match image {
            Some(d) if d.cols() > 0 && d.rows() > 0 => d.tensor_rank(n),
            _ => 0,
        }
    };
    let ranks: Vec<usize> = (0..=bound + 1).map(rank).collect();
    Ok((0..=bound)
        .map(|i| res.betti_number(i).unwrap_or(0) * nd - ranks[i] - ranks[i + 1])
        .collect())
}

pub fn tor_dims(m: &FdModule, n: &FdModule, bound: usize, method: TorMethod) -> Result<TorTable> {
    tor_dims_with_limit(m, n, bound, method, DEFAULT_LIMIT)
}

pub fn tor_dims_with_limit(
    m: &FdModule,
    n: &FdModule,
    bound: usize,
    method: TorMethod,
    limit: usize,
) -> Result<TorTable> {
    let mut engine = TorEngine::new(limit);
    let (dims, balanced) = match method {
        TorMethod::Left => (engine.tor(m, n, bound)?, None),
        TorMethod::Right => (engine.tor(n, m, bound)?, None),
        TorMethod::Both => {
            let (l, r) = engine.tor_both(m, n, bound)?;
            if l != r {
                let bm = engine.resolution(m, bound)?.betti().to_vec();
                let bn = engine.resolution(n, bound)?.betti().to_vec();
                return Err(Error::Consistency(format!(
                    "Tor routes disagree: left {l:?} (betti {bm:?}), right {r:?} (betti {bn:?})"
                )));
            }
            (l, Some(true))
        }
    };
    Ok(TorTable {
        bound,
        method,
        dims,
        balanced,
    })
}

/// Resolutions kept for reuse across Tor computations, found by module
/// equality and extended on demand.
#[derive(Debug, Clone)]
pub struct TorEngine {
    limit: usize,
    cache: Vec<MinimalResolution>,
}

impl TorEngine {
    pub fn new(limit: usize) -> Self {
        TorEngine {
            limit,
            cache: Vec::new(),
        }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn resolutions(&self) -> &[MinimalResolution] {
        &self.cache
    }

    /// A resolution of `m` of length at least `length` (or terminated).
    pub fn resolution(&mut self, m: &FdModule, length: usize) -> Result<&MinimalResolution> {
        let pos = match self.cache.iter().position(|r| r.module() == m) {
            Some(k) => {
                let r = &mut self.cache[k];
                if r.length() < length && !r.terminated() {
                    r.extend_to(length)?;
                }
                k
            }
            None => {
                let r = MinimalResolution::with_limit(m, length, self.limit)?;
                self.cache.push(r);
                self.cache.len() - 1
            }
        };
        Ok(&self.cache[pos])
    }

    /// `dim Tor_i(m, n)` for `i ≤ bound`, resolving `m`.
    pub fn tor(&mut self, m: &FdModule, n: &FdModule, bound: usize) -> Result<Vec<usize>> {
        if **m.algebra() != **n.algebra() {
            return Err(Error::Argument("Tor of modules over different algebras".into()));
        }
        let r = self.resolution(m, bound)?;
        tor_from_resolution(r, n, bound)
    }

    /// Both routes, unchecked: `(resolving m, resolving n)`.
    pub fn tor_both(&mut self, m: &FdModule, n: &FdModule, bound: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        Ok((self.tor(m, n, bound)?, self.tor(n, m, bound)?))
    }
}

/// Closed forms for `Tor_1` over a fiber product in terms of data over the
/// factors: returns `(dim Tor_1^R(X, Y), dim Tor_1^R(Y, Z))` for `S`-modules
/// `X`, `Y` and a `T`-module `Z`.
pub fn tor_via_formula_tor1(
    x: &FdModule,
    y: &FdModule,
    z: &FdModule,
    data: &FiberProductData,
) -> Result<(usize, usize)> {
    if **x.algebra() != *data.s || **y.algebra() != *data.s || **z.algebra() != *data.t {
        return Err(Error::Argument("X, Y must be S-modules and Z a T-module".into()));
    }
    let tor1_s_xy = tor_dims(x, y, 1, TorMethod::Left)?.dims[1];
    let beta1_t_k = MinimalResolution::new(&FdModule::residue_field(data.t.clone()), 1)?.betti()[1];
    let y_top = y.betti0();
    let dim_xy = tor1_s_xy + y_top * beta1_t_k * x.betti0();

    let y_res = MinimalResolution::new(y, 1)?;
    let z_res = MinimalResolution::new(z, 1)?;
    let dim_yz = y_res.betti()[1] * z_res.betti()[0] + y_top * z_res.betti()[1];
    Ok((dim_xy, dim_yz))
}
