//! The graded ring `R = k[x,y]/(xy)`, the fiber product of `k[x]` and
//! `k[y]` over `k`. It is not artinian, so nothing here truncates it:
//! explicit periodic complexes are written down and their homology is
//! computed one degree at a time, for degrees below a bound `D`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
}

/// A monomial of `k[x,y]/(xy)`: `1`, `x^e` or `y^e` with `e ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mono {
    One,
    X(u32),
    Y(u32),
}

impl Mono {
    pub fn degree(self) -> u32 {
        match self {
            Mono::One => 0,
            Mono::X(e) | Mono::Y(e) => e,
        }
    }

    fn power(v: Var, e: u32) -> Mono {
        match (v, e) {
            (_, 0) => Mono::One,
            (Var::X, e) => Mono::X(e),
            (Var::Y, e) => Mono::Y(e),
        }
    }

    /// Product in `k[x,y]/(xy)`; `None` is zero.
    pub fn mul(self, other: Mono) -> Option<Mono> {
        match (self, other) {
            (Mono::One, m) | (m, Mono::One) => Some(m),
            (Mono::X(a), Mono::X(b)) => Some(Mono::X(a + b)),
            (Mono::Y(a), Mono::Y(b)) => Some(Mono::Y(a + b)),
            _ => None,
        }
    }
}

/// A matrix entry `c · v^e` with `e ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub coeff: u32,
    pub var: Var,
    pub exp: u32,
}

impl Entry {
    fn var(var: Var) -> Option<Entry> {
        Some(Entry { coeff: 1, var, exp: 1 })
    }
}

/// The cyclic modules handled here: `R`, `S = R/(y) = k[x]`,
/// `T = R/(x) = k[y]` and `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cyclic {
    R,
    S,
    T,
    K,
}

impl Cyclic {
    /// Monomial basis of the degree-`e` piece.
    pub fn basis(self, e: i64) -> Vec<Mono> {
        if e < 0 {
            return Vec::new();
        }
        let e = e as u32;
        match (self, e) {
            (_, 0) => vec![Mono::One],
            (Cyclic::R, e) => vec![Mono::X(e), Mono::Y(e)],
            (Cyclic::S, e) => vec![Mono::X(e)],
            (Cyclic::T, e) => vec![Mono::Y(e)],
            (Cyclic::K, _) => Vec::new(),
        }
    }

    fn contains(self, m: Mono) -> bool {
        match (self, m) {
            (_, Mono::One) | (Cyclic::R, _) => true,
            (Cyclic::S, Mono::X(_)) | (Cyclic::T, Mono::Y(_)) => true,
            _ => false,
        }
    }
}

/// `k[x,y]/(xy)` over `GF(p)`, examined in degrees `< degree_bound − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedHypersurfaceRing {
    field: PrimeField,
    degree_bound: usize,
}

impl GradedHypersurfaceRing {
    pub fn new(p: u32, degree_bound: usize) -> Result<Self> {
        if degree_bound < 2 {
            return Err(Error::Argument("degree bound must be at least 2".into()));
        }
        Ok(GradedHypersurfaceRing {
            field: PrimeField::new(p)?,
            degree_bound,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// Degrees `0 .. D − 1` in which homology is computed.
    pub fn window(&self) -> std::ops::Range<i64> {
        0..self.degree_bound as i64 - 1
    }

    pub fn piece_dim(&self, e: i64) -> usize {
        Cyclic::R.basis(e).len()
    }

    /// Whether multiplication by `Σ c·m` is injective on every piece in the window.
    pub fn is_nzd(&self, element: &[(u32, Mono)]) -> bool {
        let shift = element.iter().map(|(_, m)| m.degree()).max().unwrap_or(0);
        if element.iter().any(|(_, m)| m.degree() != shift) {
            return false;
        }
        self.window().all(|e| {
            let src = Cyclic::R.basis(e);
            let dst = Cyclic::R.basis(e + shift as i64);
            let mut m = Matrix::zeros(self.field, dst.len(), src.len());
            for (j, b) in src.iter().enumerate() {
                for &(c, g) in element {
                    if let Some(prod) = b.mul(g) {
                        let r = dst.iter().position(|&d| d == prod).expect("homogeneous");
                        m.set(r, j, self.field.add(m.get(r, j), c));
                    }
                }
            }
            m.rank() == src.len()
        })
    }
}

/// A complex of graded free modules `F_i = ⊕_j R(−shift_{i,j})` with
/// monomial differentials `d_i: F_i → F_{i−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedComplex {
    pub ring: GradedHypersurfaceRing,
    pub target: Cyclic,
    pub shifts: Vec<Vec<u32>>,
    /// `differentials[i − 1]` is `d_i`, stored row-major as `rank_{i−1} × rank_i`.
    pub differentials: Vec<Vec<Vec<Option<Entry>>>>,
}

impl GradedComplex {
    pub fn length(&self) -> usize {
        self.differentials.len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.shifts.iter().map(Vec::len).collect()
    }

    /// `d_i ⊗ N` in degree `e`.
    fn degree_matrix(&self, i: usize, n: Cyclic, e: i64) -> Matrix {
        let f = self.ring.field;
        let src: Vec<Vec<Mono>> = self.shifts[i].iter().map(|&s| n.basis(e - s as i64)).collect();
        let dst: Vec<Vec<Mono>> = self.shifts[i - 1].iter().map(|&s| n.basis(e - s as i64)).collect();
        let col_off: Vec<usize> = offsets(&src);
        let row_off: Vec<usize> = offsets(&dst);
        let mut m = Matrix::zeros(f, *row_off.last().unwrap(), *col_off.last().unwrap());
        for (r, row) in self.differentials[i - 1].iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                let Some(en) = entry else { continue };
                let g = Mono::power(en.var, en.exp);
                for (bi, b) in src[j].iter().enumerate() {
                    if let Some(prod) = b.mul(g).filter(|&p| n.contains(p)) {
                        let ri = dst[r].iter().position(|&d| d == prod).expect("homogeneous differential");
                        let (rr, cc) = (row_off[r] + ri, col_off[j] + bi);
                        m.set(rr, cc, f.add(m.get(rr, cc), en.coeff));
                    }
                }
            }
        }
        m
    }

    fn chain_dim(&self, i: usize, n: Cyclic, e: i64) -> usize {
        self.shifts[i].iter().map(|&s| n.basis(e - s as i64).len()).sum()
    }

    /// `dim H_i(F ⊗ N)` in degree `e`, for `0 ≤ i < length`.
    pub fn homology_dim(&self, i: usize, n: Cyclic, e: i64) -> usize {
        assert!(i < self.length());
        let out = if i == 0 { 0 } else { self.degree_matrix(i, n, e).rank() };
        let inc = self.degree_matrix(i + 1, n, e).rank();
        self.chain_dim(i, n, e) - out - inc
    }

    /// Entries are homogeneous of the right degree and never units.
    pub fn is_minimal_and_graded(&self) -> bool {
        self.differentials.iter().enumerate().all(|(k, d)| {
            let i = k + 1;
            d.iter().enumerate().all(|(r, row)| {
                row.iter().enumerate().all(|(j, en)| match en {
                    None => true,
                    Some(en) => {
                        en.exp >= 1 && self.shifts[i][j] == self.shifts[i - 1][r] + en.exp && en.coeff != 0
                    }
                })
            })
        })
    }

    /// `d_i ∘ d_{i+1} = 0` in every degree of the window.
    pub fn is_complex(&self) -> bool {
        (1..self.length()).all(|i| {
            self.ring
                .window()
                .all(|e| self.degree_matrix(i, Cyclic::R, e).mul(&self.degree_matrix(i + 1, Cyclic::R, e)).map(|m| m.is_zero()).unwrap_or(false))
        })
    }

    /// `H_0 = target` and `H_i = 0` for `0 < i < length`, degreewise in the window.
    pub fn is_resolution_in_window(&self) -> bool {
        self.ring.window().all(|e| {
            self.homology_dim(0, Cyclic::R, e) == self.target.basis(e).len()
                && (1..self.length()).all(|i| self.homology_dim(i, Cyclic::R, e) == 0)
        })
    }
}

fn offsets(blocks: &[Vec<Mono>]) -> Vec<usize> {
    let mut out = vec![0];
    for b in blocks {
        out.push(out.last().unwrap() + b.len());
    }
    out
}

fn build(ring: GradedHypersurfaceRing, target: Cyclic, length: usize) -> Result<GradedComplex> {
    let (x, y) = (Entry::var(Var::X), Entry::var(Var::Y));
    let mut shifts = vec![vec![0u32]];
    let mut differentials = Vec::with_capacity(length);
    for i in 1..=length as u32 {
        let d = match target {
            Cyclic::S => vec![vec![if i % 2 == 1 { y } else { x }]],
            Cyclic::T => vec![vec![if i % 2 == 1 { x } else { y }]],
            Cyclic::K if i == 1 => vec![vec![x, y]],
            Cyclic::K if i % 2 == 0 => vec![vec![y, None], vec![None, x]],
            Cyclic::K => vec![vec![x, None], vec![None, y]],
            Cyclic::R => return Err(Error::Argument("R is free; it has no periodic resolution".into())),
        };
        shifts.push(vec![i; d[0].len()]);
        differentials.push(d);
    }
    Ok(GradedComplex {
        ring,
        target,
        shifts,
        differentials,
    })
}

/// The closed-form minimal resolution of `S`, `T` or `k` up to `F_length`.
/// `F_i` is generated in degree `i`, so the length must stay below `D − 1`.
pub fn periodic_resolution(ring: GradedHypersurfaceRing, target: Cyclic, length: usize) -> Result<GradedComplex> {
    if length < 1 {
        return Err(Error::Argument("length must be at least 1".into()));
    }
    if length + 2 > ring.degree_bound() {
        return Err(Error::Resource(format!(
            "degree bound {} is too small for length {length}",
            ring.degree_bound()
        )));
    }
    build(ring, target, length)
}

/// `dim Tor_i(M, N)` for `1 ≤ i ≤ i_max` (entry `i − 1`), summed over the
/// degrees of the window; these Tor modules are killed by the maximal ideal
/// and live in degrees `≤ i + 1`.
pub fn graded_tor_dims(ring: GradedHypersurfaceRing, m: Cyclic, n: Cyclic, i_max: usize) -> Result<Vec<usize>> {
    if i_max + 2 > ring.degree_bound() {
        return Err(Error::Argument(format!(
            "i_max = {i_max} needs a degree bound of at least {}",
            i_max + 2
        )));
    }
    let c = build(ring, m, i_max + 1)?;
    Ok((1..=i_max)
        .map(|i| ring.window().map(|e| c.homology_dim(i, n, e)).sum())
        .collect())
}

/// The outcome of [`verify_dvr_example`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DvrReport {
    pub status: String,
    pub degree_bound: usize,
    pub i_max: usize,
    /// Named sub-checks and whether each held.
    pub checks: BTreeMap<String, bool>,
    /// `Tor_1 ..= Tor_{i_max}` dimensions.
    pub tor: BTreeMap<String, Vec<usize>>,
    /// Ranks of the verified minimal resolutions.
    pub betti: BTreeMap<String, Vec<usize>>,
}

impl DvrReport {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

pub const DVR_I_MAX: usize = 10;

/// Resolutions of `S`, `T`, `k` exact in the window with no zero rank;
/// `Tor(S,S)`, `Tor(T,T)` vanish in even degrees and `Tor(S,T)` in odd ones;
/// `x + y` is a nonzerodivisor and `x` is not; results agree with `D + 3`.
pub fn verify_dvr_example(p: u32, degree_bound: usize) -> Result<DvrReport> {
    if degree_bound < DVR_I_MAX + 2 {
        return Err(Error::Argument(format!(
            "the example needs a degree bound of at least {}",
            DVR_I_MAX + 2
        )));
    }
    let ring = GradedHypersurfaceRing::new(p, degree_bound)?;
    let wider = GradedHypersurfaceRing::new(p, degree_bound + 3)?;
    let mut checks = BTreeMap::new();
    let mut betti = BTreeMap::new();
    let len = degree_bound - 2;
    for (name, target) in [("S", Cyclic::S), ("T", Cyclic::T), ("k", Cyclic::K)] {
        let c = periodic_resolution(ring, target, len)?;
        checks.insert(format!("resolution.{name}.minimal"), c.is_minimal_and_graded());
        checks.insert(format!("resolution.{name}.complex"), c.is_complex());
        checks.insert(format!("resolution.{name}.exact"), c.is_resolution_in_window());
        let ranks = c.ranks();
        checks.insert(format!("resolution.{name}.no_zero_betti"), ranks.iter().all(|&b| b > 0));
        betti.insert(name.to_string(), ranks);
    }

    let mut tor = BTreeMap::new();
    let pattern = |odd: usize, even: usize| -> Vec<usize> {
        (1..=DVR_I_MAX).map(|i| if i % 2 == 1 { odd } else { even }).collect()
    };
    for (name, m, n, expect) in [
        ("S,S", Cyclic::S, Cyclic::S, pattern(1, 0)),
        ("S,T", Cyclic::S, Cyclic::T, pattern(0, 1)),
        ("T,T", Cyclic::T, Cyclic::T, pattern(1, 0)),
        ("T,S", Cyclic::T, Cyclic::S, pattern(0, 1)),
    ] {
        let dims = graded_tor_dims(ring, m, n, DVR_I_MAX)?;
        checks.insert(format!("tor.{name}.pattern"), dims == expect);
        checks.insert(
            format!("tor.{name}.stable"),
            graded_tor_dims(wider, m, n, DVR_I_MAX)? == dims,
        );
        tor.insert(name.to_string(), dims);
    }
    let ss = &tor["S,S"];
    checks.insert(
        "tor4_vanishes_with_infinite_pd".into(),
        ss[3] == 0 && betti["S"].iter().take(DVR_I_MAX + 1).all(|&b| b > 0),
    );
    checks.insert("depth.x_plus_y_nzd".into(), ring.is_nzd(&[(1, Mono::X(1)), (1, Mono::Y(1))]));
    checks.insert(
        "depth.x_zerodivisor".into(),
        !ring.is_nzd(&[(1, Mono::X(1))]) && Mono::X(1).mul(Mono::Y(1)).is_none(),
    );
    let status = if checks.values().all(|&v| v) { "pass" } else { "fail" };
    Ok(DvrReport {
        status: status.into(),
        degree_bound,
        i_max: DVR_I_MAX,
        checks,
        tor,
        betti,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(d: usize) -> GradedHypersurfaceRing {
        GradedHypersurfaceRing::new(5, d).unwrap()
    }

    #[test]
    fn differentials_alternate() {
        let s = periodic_resolution(ring(12), Cyclic::S, 3).unwrap();
        let vars: Vec<Var> = s.differentials.iter().map(|d| d[0][0].unwrap().var).collect();
        assert_eq!(vars, vec![Var::Y, Var::X, Var::Y]);
        let t = periodic_resolution(ring(12), Cyclic::T, 3).unwrap();
        let vars: Vec<Var> = t.differentials.iter().map(|d| d[0][0].unwrap().var).collect();
        assert_eq!(vars, vec![Var::X, Var::Y, Var::X]);
    }

    #[test]
    fn resolutions_are_exact() {
        for target in [Cyclic::S, Cyclic::T, Cyclic::K] {
            let c = periodic_resolution(ring(10), target, 8).unwrap();
            assert!(c.is_complex() && c.is_resolution_in_window() && c.is_minimal_and_graded());
        }
    }

    #[test]
    fn a_wrong_complex_is_caught() {
        let mut c = periodic_resolution(ring(8), Cyclic::S, 4).unwrap();
        c.differentials[1][0][0] = Entry::var(Var::Y);
        assert!(!c.is_complex());
        let mut c = periodic_resolution(ring(8), Cyclic::S, 4).unwrap();
        c.differentials[1][0][0] = Some(Entry { coeff: 1, var: Var::X, exp: 2 });
        c.shifts[2] = vec![3];
        c.shifts[3] = vec![4];
        c.shifts[4] = vec![5];
        assert!(!c.is_resolution_in_window());
    }

    #[test]
    fn tor_patterns() {
        assert_eq!(graded_tor_dims(ring(12), Cyclic::S, Cyclic::S, 4).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(graded_tor_dims(ring(12), Cyclic::S, Cyclic::T, 4).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(graded_tor_dims(ring(12), Cyclic::T, Cyclic::T, 4).unwrap(), vec![1, 0, 1, 0]);
        // k over R: Tor_i(k, k) has dimension 2 for i ≥ 1
        assert_eq!(graded_tor_dims(ring(12), Cyclic::K, Cyclic::K, 3).unwrap(), vec![2, 2, 2]);
    }

    #[test]
    fn window_errors() {
        assert!(matches!(graded_tor_dims(ring(3), Cyclic::S, Cyclic::S, 10), Err(Error::Argument(_))));
        assert!(matches!(periodic_resolution(ring(5), Cyclic::S, 4), Err(Error::Resource(_))));
        assert!(matches!(verify_dvr_example(5, 11), Err(Error::Argument(_))));
    }

    #[test]
    fn nzd_in_window() {
        let r = ring(12);
        assert!(r.is_nzd(&[(1, Mono::X(1)), (1, Mono::Y(1))]));
        assert!(!r.is_nzd(&[(1, Mono::X(1))]));
        assert!(!r.is_nzd(&[(1, Mono::X(1)), (1, Mono::Y(2))]));
    }

    #[test]
    fn dvr_example_passes() {
        let rep = verify_dvr_example(5, 12).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.betti["k"][..4], [1, 2, 2, 2]);
    }
}
