//! Tor-vanishing results over `R = S ×_k T` as predicates on concrete
//! instances, and the splitting `Ω²_R M = X ⊕ Z` with `X` an `S`-module and
//! `Z` a `T`-module.
//!
//! Implications are checked materially: a case counts as a hit when its
//! hypothesis holds and fails when the conclusion then does not. Tor
//! dimensions come from [`TorEngine`]; `pd ≤ 1` means `Ω² = 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraSurjection, FiberProductData, FiniteLocalAlgebra};
use crate::corpus::Instance;
use crate::error::{Error, Result};
use crate::exactla::Subspace;
use crate::fdmodule::{FdModule, IsoVerdict};
use crate::resolution::{MinimalResolution, ProjDim};
use crate::tor::TorEngine;

const MAX_DETAILS: usize = 8;
pub const ISO_TRIALS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub claim: String,
    pub status: CheckStatus,
    /// Cases examined.
    pub cases: usize,
    /// Cases whose hypothesis held.
    pub hits: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// On failure: the instance and the failing cases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

struct Check {
    name: &'static str,
    claim: &'static str,
    cases: usize,
    hits: usize,
    failures: usize,
    details: Vec<Value>,
    undetermined: Vec<String>,
}

impl Check {
    fn new(name: &'static str, claim: &'static str) -> Self {
        Check {
            name,
            claim,
            cases: 0,
            hits: 0,
            failures: 0,
            details: Vec::new(),
            undetermined: Vec::new(),
        }
    }

    fn implication(&mut self, hypothesis: bool, conclusion: bool, detail: impl FnOnce() -> Value) {
        self.cases += 1;
        if hypothesis {
            self.hits += 1;
            if !conclusion {
                self.failures += 1;
                if self.details.len() < MAX_DETAILS {
                    self.details.push(detail());
                }
            }
        }
    }

    fn holds(&mut self, conclusion: bool, detail: impl FnOnce() -> Value) {
        self.implication(true, conclusion, detail)
    }

    fn iso(&mut self, verdict: IsoVerdict, what: &str) {
        match verdict {
            IsoVerdict::Isomorphic => self.holds(true, || Value::Null),
            IsoVerdict::NotIsomorphic => self.holds(false, || json!({ "not_isomorphic": what })),
            IsoVerdict::Undetermined => {
                self.cases += 1;
                self.undetermined.push(what.to_string());
            }
        }
    }

    fn report(self, inst: &Instance) -> CheckReport {
        let status = if self.failures > 0 {
            CheckStatus::Fail
        } else if self.hits == 0 || !self.undetermined.is_empty() {
            CheckStatus::Inapplicable
        } else {
            CheckStatus::Pass
        };
        let note = (!self.undetermined.is_empty())
            .then(|| format!("undetermined: {}", self.undetermined.join(", ")));
        let witness = (status == CheckStatus::Fail).then(|| {
            json!({
                "instance": inst.witness(),
                "cases": self.details,
            })
        });
        CheckReport {
            name: self.name.to_string(),
            claim: self.claim.to_string(),
            status,
            cases: self.cases,
            hits: self.hits,
            failures: self.failures,
            note,
            witness,
        }
    }
}

/// `Ω²_R M = X ⊕ Z` with `X` over `S` and `Z` over `T`.
#[derive(Debug, Clone)]
pub struct Omega2Split {
    pub x: FdModule,
    pub z: FdModule,
    pub omega2_dim: usize,
}

/// Splits `W = Ω²_R M ⊆ F_1` as `(W ∩ I F_1) ⊕ (W ∩ J F_1)`.
pub fn dk_split(m: &FdModule, data: &FiberProductData) -> Result<Omega2Split> {
    let res = MinimalResolution::new(m, 1)?;
    split_from_resolution(&res, data)
}

pub fn split_from_resolution(res: &MinimalResolution, data: &FiberProductData) -> Result<Omega2Split> {
    if **res.algebra() != *data.r {
        return Err(Error::Argument("module is not over the fiber product".into()));
    }
    let w = res
        .syzygy_subspace(2)
        .ok_or_else(|| Error::Argument("resolution must have length at least 1".into()))?;
    let f = data.r.field();
    let d = data.r.dim();
    let b1 = res.betti()[1];
    let blockwise = |positions: Vec<usize>| {
        let idx: Vec<usize> = (0..b1).flat_map(|b| positions.iter().map(move |&l| b * d + l)).collect();
        Subspace::coordinate(f, b1 * d, &idx)
    };
    let wx = w.intersection(&blockwise(data.i_positions()))?;
    let wz = w.intersection(&blockwise(data.j_positions()))?;
    if wx.dim() + wz.dim() != w.dim() {
        return Err(Error::SplitFailure(format!(
            "dim Ω² = {} but the I- and J-parts have dims {} and {}",
            w.dim(),
            wx.dim(),
            wz.dim()
        )));
    }
    let free = FdModule::free(data.r.clone(), b1);
    let descend = |sub: &Subspace, phi: &AlgebraSurjection, which: &str| -> Result<FdModule> {
        let part = free.submodule(sub)?;
        FdModule::descend_scalars(phi, &part).map_err(|_| {
            Error::SplitFailure(format!("the {which}-part is not annihilated by the other ideal"))
        })
    };
    Ok(Omega2Split {
        x: descend(&wx, &data.eta_s, "I")?,
        z: descend(&wz, &data.eta_t, "J")?,
        omega2_dim: w.dim(),
    })
}

/// One factor's point of view: its modules, the other factor's modules, and
/// the ideal of `R` killing it.
struct View<'a> {
    own: &'a Arc<FiniteLocalAlgebra>,
    other: &'a Arc<FiniteLocalAlgebra>,
    eta_own: &'a AlgebraSurjection,
    eta_other: &'a AlgebraSurjection,
    /// `ker(R ↠ own)`, which is the other factor's maximal ideal inside `R`.
    kernel: &'a Subspace,
    modules: [(&'static str, &'a FdModule, &'a FdModule); 2],
    partners: [(&'static str, &'a FdModule, &'a FdModule); 2],
}

impl<'a> View<'a> {
    fn both(inst: &'a Instance) -> [View<'a>; 2] {
        let fp = &inst.fiber;
        [
            View {
                own: &fp.s,
                other: &fp.t,
                eta_own: &fp.eta_s,
                eta_other: &fp.eta_t,
                kernel: &fp.ideal_j,
                modules: [("X", &inst.x, &inst.x_r), ("Y", &inst.y, &inst.y_r)],
                partners: [("Z", &inst.z, &inst.z_r), ("W", &inst.w, &inst.w_r)],
            },
            View {
                own: &fp.t,
                other: &fp.s,
                eta_own: &fp.eta_t,
                eta_other: &fp.eta_s,
                kernel: &fp.ideal_i,
                modules: [("Z", &inst.z, &inst.z_r), ("W", &inst.w, &inst.w_r)],
                partners: [("X", &inst.x, &inst.x_r), ("Y", &inst.y, &inst.y_r)],
            },
        ]
    }
}

fn pairs<T: Copy>(items: &[T]) -> Vec<(T, T)> {
    let mut out = Vec::new();
    for i in 0..items.len() {
        for j in i..items.len() {
            out.push((items[i], items[j]));
        }
    }
    out
}

/// Route comparison for one pair of `R`-modules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceRecord {
    pub pair: [String; 2],
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub module: String,
    pub omega2_dim: usize,
    pub x_dim: usize,
    pub z_dim: usize,
}

/// Everything checked on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub digest: String,
    pub reports: Vec<CheckReport>,
    pub balance: Vec<BalanceRecord>,
    pub splits: Vec<SplitRecord>,
}

/// Runs checks on one instance, sharing resolutions and Tor tables.
pub struct Checker<'a> {
    inst: &'a Instance,
    bound: usize,
    engine: TorEngine,
    tables: Vec<(FdModule, FdModule, Vec<usize>)>,
}

impl<'a> Checker<'a> {
    /// Tor is examined in degrees `0..=bound`.
    pub fn new(inst: &'a Instance, bound: usize) -> Self {
        Checker {
            inst,
            bound,
            engine: TorEngine::new(inst.params.budget),
            tables: Vec::new(),
        }
    }

    fn tor_to(&mut self, a: &FdModule, b: &FdModule, bound: usize) -> Result<Vec<usize>> {
        if let Some((_, _, t)) = self
            .tables
            .iter()
            .find(|(x, y, t)| t.len() > bound && x == a && y == b)
        {
            return Ok(t[..=bound].to_vec());
        }
        let t = self.engine.tor(a, b, bound)?;
        self.tables.push((a.clone(), b.clone(), t.clone()));
        Ok(t)
    }

    fn tor(&mut self, a: &FdModule, b: &FdModule) -> Result<Vec<usize>> {
        self.tor_to(a, b, self.bound)
    }

    fn betti(&mut self, m: &FdModule, i: usize) -> Result<usize> {
        Ok(self.engine.resolution(m, i)?.betti_number(i).unwrap_or(0))
    }

    fn syzygy(&mut self, m: &FdModule, i: usize) -> Result<FdModule> {
        let len = i.saturating_sub(1);
        let r = self.engine.resolution(m, len)?;
        r.syzygy(i)
            .ok_or_else(|| Error::Invariant("syzygy beyond the computed range".into()))
    }

    fn pd_at_most_one(&mut self, m: &FdModule) -> Result<bool> {
        Ok(self.engine.resolution(m, 1)?.syzygy_dim(2) == Some(0))
    }

    fn split(&mut self, m: &FdModule) -> Result<Omega2Split> {
        let r = self.engine.resolution(m, 1)?;
        split_from_resolution(r, &self.inst.fiber)
    }

    /// Whether `Ω²P` is annihilated by `ker φ` and free over the target of `φ`.
    fn omega2_free_over(&mut self, m: &FdModule, phi: &AlgebraSurjection) -> Result<bool> {
        let w = self.syzygy(m, 2)?;
        Ok(w.annihilated_by(&phi.kernel()) && FdModule::descend_scalars(phi, &w)?.is_free())
    }

    fn iso_seed(&self, salt: u64) -> u64 {
        self.inst.params.seed ^ (self.inst.index as u64).rotate_left(32) ^ salt
    }

    pub fn structural(&mut self) -> Result<Vec<CheckReport>> {
        let inst = self.inst;
        let bound = self.bound;
        let r = inst.r().clone();
        let mut syz_dim = Check::new(
            "syzygy_lemma.dimension",
            "for Y over S with b = β_0 Y: dim Ω_R Y = b·dim 𝔫 + dim Ω_S Y and β_1^R Y = b·β_1^T k + β_1^S Y; symmetric over T",
        );
        let mut syz_iso = Check::new("syzygy_lemma.isomorphism", "Ω_R Y ≅ J^b ⊕ Ω_S Y; symmetric over T");
        let mut ideal_iso = Check::new("ideal_modules", "J ≅ 𝔫 and I ≅ 𝔪 as R-modules");
        let mut tor1_same = Check::new(
            "tor1_formula.same_factor",
            "dim Tor_1^R(X,Y) = dim Tor_1^S(X,Y) + β_0 Y · β_1^T k · β_0 X; symmetric over T",
        );
        let mut tor1_mixed = Check::new(
            "tor1_formula.mixed",
            "dim Tor_1^R(Y,Z) = β_1^S Y · β_0^T Z + β_0^S Y · β_1^T Z",
        );
        let mut free_fwd = Check::new("tor1_freeness.forward", "Y ≠ 0 and Tor_1^R(Y,Z) = 0 imply Z free over T");
        let mut free_conv = Check::new(
            "tor1_freeness.converse",
            "Y free over S and Z free over T imply Tor_1^R(Y,Z) = 0",
        );
        let mut free_sum = Check::new("tor1_free_summands", "dim Tor_1^R(S^a, Z) = a·β_1^T Z for a = 1, 2, 3");
        let mut shift_same = Check::new(
            "syzygy_shift.same_factor",
            "dim Tor_s(X,Y) = dim Tor_{s-1}(X, 𝔫^b) + dim Tor_{s-1}(X, Ω_S Y) for s ≥ 2, b = β_0 Y",
        );
        let mut shift_mixed = Check::new(
            "syzygy_shift.mixed",
            "dim Tor_s(Y,Z) = dim Tor_{s-1}(Y, 𝔪^c) + dim Tor_{s-1}(Y, Ω_T Z) for s ≥ 2, c = β_0 Z",
        );

        for (vi, v) in View::both(inst).into_iter().enumerate() {
            let other_max = FdModule::restrict_scalars(v.eta_other, &FdModule::max_ideal(v.other.clone()))?;
            let own_max = FdModule::restrict_scalars(v.eta_own, &FdModule::max_ideal(v.own.clone()))?;
            let kernel_module = FdModule::ideal(r.clone(), v.kernel)?;
            let seed = self.iso_seed(0x1DEA + vi as u64);
            ideal_iso.iso(kernel_module.iso_probably(&other_max, ISO_TRIALS, seed)?, "kernel ideal");
            let k_other = FdModule::residue_field(v.other.clone());
            let beta1_other_k = self.betti(&k_other, 1)?;

            let mut omega_own = Vec::new();
            for (ni, &(name, a, a_r)) in v.modules.iter().enumerate() {
                let b = a.betti0();
                let om = self.syzygy(a, 1)?;
                let om_r = FdModule::restrict_scalars(v.eta_own, &om)?;
                let beta1_own = self.betti(a, 1)?;
                let res = self.engine.resolution(a_r, 1)?;
                let (dim_r, beta1_r) = (res.syzygy_dim(1).unwrap_or(0), res.betti_number(1).unwrap_or(0));
                let expect_dim = b * other_max.dim() + om.dim();
                let expect_beta = b * beta1_other_k + beta1_own;
                syz_dim.holds(dim_r == expect_dim && beta1_r == expect_beta, || {
                    json!({ "module": name, "dim": [dim_r, expect_dim], "beta1": [beta1_r, expect_beta] })
                });
                let omega_r = self.syzygy(a_r, 1)?;
                let model = kernel_module.power(b).direct_sum(&om_r)?;
                let seed = self.iso_seed(0x5E2 + 2 * vi as u64 + ni as u64);
                syz_iso.iso(omega_r.iso_probably(&model, ISO_TRIALS, seed)?, name);
                omega_own.push(om_r);
            }

            for &(na, a, a_r) in &v.modules {
                for (j, &(nb, b, b_r)) in v.modules.iter().enumerate() {
                    let tor_r = self.tor(a_r, b_r)?;
                    let tor_own = self.tor_to(a, b, 1)?;
                    let expect = tor_own[1] + b.betti0() * beta1_other_k * a.betti0();
                    tor1_same.holds(tor_r[1] == expect, || {
                        json!({ "pair": [na, nb], "tor1": tor_r[1], "formula": expect })
                    });
                    let nb_pow = other_max.power(b.betti0());
                    let t1 = self.tor(a_r, &nb_pow)?;
                    let t2 = self.tor(a_r, &omega_own[j])?;
                    for s in 2..=bound {
                        shift_same.holds(tor_r[s] == t1[s - 1] + t2[s - 1], || {
                            json!({ "pair": [na, nb], "s": s, "tor": tor_r[s], "shifted": [t1[s - 1], t2[s - 1]] })
                        });
                    }
                }
            }

            for &(na, a, a_r) in &v.modules {
                for &(nc, c, c_r) in &v.partners {
                    let tor_r = self.tor(a_r, c_r)?;
                    let beta1_a = self.betti(a, 1)?;
                    let beta1_c = self.betti(c, 1)?;
                    let expect = beta1_a * c.betti0() + a.betti0() * beta1_c;
                    tor1_mixed.holds(tor_r[1] == expect, || {
                        json!({ "pair": [na, nc], "tor1": tor_r[1], "formula": expect })
                    });
                    free_fwd.implication(!a.is_zero() && tor_r[1] == 0, c.is_free(), || {
                        json!({ "pair": [na, nc], "tor1": 0, "partner_free": false })
                    });
                    free_conv.implication(a.is_free() && c.is_free(), tor_r[1] == 0, || {
                        json!({ "pair": [na, nc], "tor1": tor_r[1] })
                    });
                    let c_pow = own_max.power(c.betti0());
                    let om_c = FdModule::restrict_scalars(v.eta_other, &self.syzygy(c, 1)?)?;
                    let t1 = self.tor(a_r, &c_pow)?;
                    let t2 = self.tor(a_r, &om_c)?;
                    for s in 2..=bound {
                        shift_mixed.holds(tor_r[s] == t1[s - 1] + t2[s - 1], || {
                            json!({ "pair": [na, nc], "s": s, "tor": tor_r[s], "shifted": [t1[s - 1], t2[s - 1]] })
                        });
                    }
                }
            }

            for &(nc, c, c_r) in &v.partners {
                let beta1_c = self.betti(c, 1)?;
                for a in 1..=3 {
                    let own_free = FdModule::restrict_scalars(v.eta_own, &FdModule::free(v.own.clone(), a))?;
                    let t = self.tor_to(&own_free, c_r, 1)?;
                    free_sum.holds(t[1] == a * beta1_c, || {
                        json!({ "module": nc, "a": a, "tor1": t[1], "expected": a * beta1_c })
                    });
                }
            }
        }

        Ok(vec![
            syz_dim, syz_iso, ideal_iso, tor1_same, tor1_mixed, free_fwd, free_conv, free_sum, shift_same,
            shift_mixed,
        ]
        .into_iter()
        .map(|c| c.report(inst))
        .collect())
    }

    pub fn vanishing(&mut self) -> Result<Vec<CheckReport>> {
        let inst = self.inst;
        let bound = self.bound;
        let mut same = Check::new(
            "vanishing.same_factor",
            "X, Y nonzero over the same factor, other factor not a DVR: Tor_i^R(X,Y) ≠ 0 for every i",
        );
        let mut even = Check::new(
            "vanishing.mixed_even",
            "Y over S, Z over T, both nonzero: Tor_{2m}^R(Y,Z) ≠ 0",
        );
        let mut odd = Check::new(
            "vanishing.mixed_odd",
            "Y over S, Z over T, both nonzero, S not a DVR: Tor_i^R(Y,Z) ≠ 0 for odd i ≥ 3",
        );
        let mut tor1 = Check::new(
            "vanishing.mixed_tor1",
            "Y over S, Z over T, both nonzero: Tor_1^R(Y,Z) = 0 iff Y and Z are free",
        );
        let mut factors = Check::new("vanishing.factor_rings", "Tor_1^R(S, T) = 0");

        for v in View::both(inst) {
            let other_dvr = v.other.is_dvr();
            let own_dvr = v.own.is_dvr();
            for i in 0..2 {
                for j in 0..2 {
                    let (na, a, a_r) = v.modules[i];
                    let (nb, b, b_r) = v.modules[j];
                    let t = self.tor(a_r, b_r)?;
                    same.implication(!a.is_zero() && !b.is_zero() && !other_dvr, t.iter().all(|&x| x > 0), || {
                        json!({ "pair": [na, nb], "tor": t })
                    });
                }
            }
            for &(na, a, a_r) in &v.modules {
                for &(nc, c, c_r) in &v.partners {
                    let t = self.tor(a_r, c_r)?;
                    let nonzero = !a.is_zero() && !c.is_zero();
                    let detail = || json!({ "pair": [na, nc], "tor": t });
                    for i in (0..=bound).step_by(2) {
                        even.implication(nonzero, t[i] > 0, detail);
                    }
                    for i in (3..=bound).step_by(2) {
                        odd.implication(nonzero && !own_dvr, t[i] > 0, detail);
                    }
                    tor1.implication(nonzero, (t[1] == 0) == (a.is_free() && c.is_free()), detail);
                }
            }
        }
        let s_r = FdModule::restrict_scalars(&inst.fiber.eta_s, &FdModule::free(inst.s().clone(), 1))?;
        let t_r = FdModule::restrict_scalars(&inst.fiber.eta_t, &FdModule::free(inst.t().clone(), 1))?;
        let t = self.tor_to(&s_r, &t_r, 1)?;
        factors.holds(t[1] == 0, || json!({ "tor1": t[1] }));

        Ok([same, even, odd, tor1, factors].into_iter().map(|c| c.report(inst)).collect())
    }

    fn big_modules(&self) -> Vec<(&'static str, FdModule)> {
        vec![
            ("X+Z", self.inst.x_plus_z()),
            ("M", self.inst.m.clone()),
            ("N", self.inst.n.clone()),
        ]
    }

    pub fn higher(&mut self) -> Result<Vec<CheckReport>> {
        let inst = self.inst;
        let bound = self.bound;
        let fp = &inst.fiber;
        let non_dvr = !inst.s().is_dvr() && !inst.t().is_dvr();
        let mut tor4 = Check::new(
            "higher.factor_module",
            "Y ≠ 0 over S, Tor_m^R(Y,M) = 0 for some m ≥ 4, and T not a DVR or Y not free: pd M ≤ 1, and M free when R has depth 0; symmetric over T",
        );
        let mut tor5 = Check::new(
            "higher.tor5",
            "Tor_5^R(M,N) = 0: pd M ≤ 1, or pd N ≤ 1, or Ω²M free over S and Ω²N free over T, or the reverse",
        );
        let mut tor6 = Check::new(
            "higher.tor_m_ge6",
            "S, T not DVRs and Tor_m^R(M,N) = 0 for some m ≥ 6: pd M ≤ 1 or pd N ≤ 1, and Tor_i^R(M,N) = 0 for i ≥ 2",
        );
        let mut tor6_split = Check::new(
            "higher.tor_m_ge6_split",
            "Tor_m^R(M,N) = 0 for some m ≥ 6 with Ω²M = X ⊕ Z, Ω²N = Y ⊕ W, and X or Y not free, or Z or W not free, or one of X, Y and one of Z, W zero, or S, T not DVRs: same conclusion",
        );
        let mut even_odd = Check::new(
            "higher.even_odd",
            "Tor_{2i+1}^R(M,N) = 0 = Tor_{2j}^R(M,N) with i ≥ 2, j ≥ 3: pd M ≤ 1 or pd N ≤ 1",
        );
        let mut torsionless = Check::new(
            "higher.torsionless",
            "S, T not DVRs, M and N torsionless, Tor_4^R(M,N) = 0: pd M ≤ 1 or pd N ≤ 1",
        );
        let mut split = Check::new(
            "omega2_split",
            "Ω²_R M = (Ω² ∩ I F_1) ⊕ (Ω² ∩ J F_1), the parts being an S-module and a T-module",
        );
        let mut rigidity = Check::new("pd_rigidity", "pd_R M < ∞ implies M free");

        let big = self.big_modules();
        for (np, p, nq, q) in pairs(&[0usize, 1, 2]).into_iter().map(|(a, b)| (big[a].0, &big[a].1, big[b].0, &big[b].1)) {
            let t = self.tor(p, q)?;
            let pd_p = self.pd_at_most_one(p)?;
            let pd_q = self.pd_at_most_one(q)?;
            let pd_either = pd_p || pd_q;
            let detail = || json!({ "pair": [np, nq], "tor": t, "pd_at_most_one": [pd_p, pd_q] });

            if bound >= 5 {
                let concl = t[5] != 0
                    || pd_either
                    || (self.omega2_free_over(p, &fp.eta_s)? && self.omega2_free_over(q, &fp.eta_t)?)
                    || (self.omega2_free_over(p, &fp.eta_t)? && self.omega2_free_over(q, &fp.eta_s)?);
                tor5.implication(t[5] == 0, concl, detail);
            }

            let zero_ge6 = (6..=bound).any(|m| t[m] == 0);
            let tail_zero = (2..=bound).all(|i| t[i] == 0);
            tor6.implication(non_dvr && zero_ge6, pd_either && tail_zero, detail);

            let sp = self.split(p)?;
            let sq = self.split(q)?;
            let c1 = !sp.x.is_free() || !sq.x.is_free();
            let c2 = !sp.z.is_free() || !sq.z.is_free();
            let c3 = (sp.x.is_zero() || sq.x.is_zero()) && (sp.z.is_zero() || sq.z.is_zero());
            tor6_split.implication(zero_ge6 && (c1 || c2 || c3 || non_dvr), pd_either && tail_zero, detail);

            let odd_zero = (2..).map(|i| 2 * i + 1).take_while(|&d| d <= bound).any(|d| t[d] == 0);
            let even_zero = (3..).map(|j| 2 * j).take_while(|&d| d <= bound).any(|d| t[d] == 0);
            even_odd.implication(odd_zero && even_zero, pd_either, detail);
        }

        for v in View::both(inst) {
            let other_dvr = v.other.is_dvr();
            for &(na, a, a_r) in &v.modules {
                for (nq, q) in &big {
                    let t = self.tor(a_r, q)?;
                    let hyp = !a.is_zero() && (4..=bound).any(|m| t[m] == 0) && (!other_dvr || !a.is_free());
                    let pd_q = self.pd_at_most_one(q)?;
                    let depth_zero = inst.s().depth() == 0 || inst.t().depth() == 0;
                    let concl = pd_q && (!depth_zero || q.is_free());
                    tor4.implication(hyp, concl, || json!({ "pair": [na, nq], "tor": t, "pd_at_most_one": pd_q }));
                }
            }
        }

        let k = FdModule::residue_field(inst.r().clone());
        let mut candidates: Vec<(&'static str, FdModule)> = big.clone();
        candidates.push(("Omega1(M)", self.syzygy(&inst.m, 1)?));
        candidates.push(("Omega1(N)", self.syzygy(&inst.n, 1)?));
        candidates.push((
            "R+m",
            FdModule::free(inst.r().clone(), 1).direct_sum(&FdModule::max_ideal(inst.r().clone()))?,
        ));
        candidates.push(("Omega2(k)", self.syzygy(&k, 2)?));
        let mut torsionless_mods = Vec::new();
        for (name, c) in candidates {
            if c.biduality()?.injective {
                torsionless_mods.push((name, c));
            }
        }
        let idx: Vec<usize> = (0..torsionless_mods.len()).collect();
        for (i, j) in pairs(&idx) {
            let (np, p) = &torsionless_mods[i];
            let (nq, q) = &torsionless_mods[j];
            let t = self.tor_to(p, q, 4)?;
            let pd_p = self.pd_at_most_one(p)?;
            let pd_q = self.pd_at_most_one(q)?;
            torsionless.implication(non_dvr && t[4] == 0, pd_p || pd_q, || {
                json!({ "pair": [np, nq], "tor": t, "pd_at_most_one": [pd_p, pd_q] })
            });
        }

        for (name, m) in &big {
            match self.split(m) {
                Ok(s) => split.holds(s.x.dim() + s.z.dim() == s.omega2_dim, || {
                    json!({ "module": name, "omega2": s.omega2_dim, "x": s.x.dim(), "z": s.z.dim() })
                }),
                Err(Error::SplitFailure(msg)) => split.holds(false, || json!({ "module": name, "error": msg })),
                Err(e) => return Err(e),
            }
        }

        let mut resolved: Vec<(&'static str, FdModule)> = vec![
            ("X", inst.x_r.clone()),
            ("Y", inst.y_r.clone()),
            ("Z", inst.z_r.clone()),
            ("W", inst.w_r.clone()),
        ];
        resolved.extend(big);
        for (name, m) in &resolved {
            let pd = self.engine.resolution(m, bound)?.projective_dimension();
            rigidity.implication(pd.is_finite(), pd == ProjDim::Finite(0) && m.is_free(), || {
                json!({ "module": name, "pd": pd })
            });
        }

        Ok([tor4, tor5, tor6, tor6_split, even_odd, torsionless, split, rigidity]
            .into_iter()
            .map(|c| c.report(inst))
            .collect())
    }

    /// Both Tor routes for each pair of distinct modules among `X ⊕ Z, M, N`.
    pub fn balance(&mut self) -> Result<Vec<BalanceRecord>> {
        let big = self.big_modules();
        let mut out = Vec::new();
        for i in 0..big.len() {
            for j in i + 1..big.len() {
                let left = self.tor(&big[i].1, &big[j].1)?;
                let right = self.tor(&big[j].1, &big[i].1)?;
                out.push(BalanceRecord {
                    pair: [big[i].0.to_string(), big[j].0.to_string()],
                    left,
                    right,
                });
            }
        }
        Ok(out)
    }

    pub fn splits(&mut self) -> Result<Vec<SplitRecord>> {
        let mut out = Vec::new();
        for (name, m) in self.big_modules() {
            let s = self.split(&m)?;
            out.push(SplitRecord {
                module: name.to_string(),
                omega2_dim: s.omega2_dim,
                x_dim: s.x.dim(),
                z_dim: s.z.dim(),
            });
        }
        Ok(out)
    }
}

pub fn check_structural_formulas(inst: &Instance, bound: usize) -> Result<Vec<CheckReport>> {
    Checker::new(inst, bound).structural()
}

pub fn check_vanishing_theorems(inst: &Instance, bound: usize) -> Result<Vec<CheckReport>> {
    Checker::new(inst, bound).vanishing()
}

pub fn check_higher_theorems(inst: &Instance, bound: usize) -> Result<Vec<CheckReport>> {
    Checker::new(inst, bound).higher()
}

/// Every check on one instance, reports sorted by name. A computation error
/// becomes a failing `computation` report carrying the instance.
pub fn check_instance(inst: &Instance, bound: usize) -> InstanceOutcome {
    fn run(c: &mut Checker) -> Result<(Vec<CheckReport>, Vec<BalanceRecord>, Vec<SplitRecord>)> {
        let mut reports = c.structural()?;
        reports.extend(c.vanishing()?);
        reports.extend(c.higher()?);
        Ok((reports, c.balance()?, c.splits()?))
    }
    let mut c = Checker::new(inst, bound);
    let (mut reports, balance, splits) = match run(&mut c) {
        Ok(v) => v,
        Err(e) => (
            vec![CheckReport {
                name: "computation".into(),
                claim: "all checks run to completion".into(),
                status: CheckStatus::Fail,
                cases: 1,
                hits: 1,
                failures: 1,
                note: Some(e.to_string()),
                witness: Some(json!({ "instance": inst.witness(), "error": e.to_string() })),
            }],
            Vec::new(),
            Vec::new(),
        ),
    };
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    InstanceOutcome {
        index: inst.index,
        digest: inst.digest(),
        reports,
        balance,
        splits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::algebra::fiber_product;
    use crate::corpus::{generate, CorpusParams};
    use crate::exactla::PrimeField;

    fn mono(vars: &[&str], rels: &[Vec<u32>]) -> Arc<FiniteLocalAlgebra> {
        Arc::new(FiniteLocalAlgebra::monomial_quotient(PrimeField::new(5).unwrap(), vars, rels).unwrap())
    }

    fn square_zero_plane() -> FiberProductData {
        fiber_product(mono(&["x"], &[vec![2]]), mono(&["y"], &[vec![2]])).unwrap()
    }

    #[test]
    fn split_of_residue_field_over_square_zero_plane() {
        let fp = square_zero_plane();
        let k = FdModule::residue_field(fp.r.clone());
        let s = dk_split(&k, &fp).unwrap();
        assert_eq!(s.omega2_dim, 4);
        assert_eq!((s.x.dim(), s.z.dim()), (2, 2));
        let ks = FdModule::residue_field(fp.s.clone());
        assert_eq!(s.x.iso_probably(&ks.power(2), 16, 1).unwrap(), IsoVerdict::Isomorphic);
    }

    #[test]
    fn split_of_free_module_is_zero() {
        let fp = square_zero_plane();
        let s = dk_split(&FdModule::free(fp.r.clone(), 2), &fp).unwrap();
        assert_eq!((s.omega2_dim, s.x.dim(), s.z.dim()), (0, 0, 0));
    }

    #[test]
    fn split_of_factor_ring() {
        let fp = fiber_product(mono(&["x"], &[vec![3]]), mono(&["y", "z"], &[vec![2, 0], vec![1, 1], vec![0, 2]]))
            .unwrap();
        let s_r = FdModule::restrict_scalars(&fp.eta_s, &FdModule::free(fp.s.clone(), 1)).unwrap();
        let s = dk_split(&s_r, &fp).unwrap();
        assert_eq!(s.x.dim() + s.z.dim(), s.omega2_dim);
        assert!(s.omega2_dim > 0);
    }

    #[test]
    fn corpus_instances_pass_everything() {
        let params = CorpusParams {
            count: 3,
            ..CorpusParams::default()
        };
        for i in 0..params.count {
            let inst = generate(&params, i).unwrap();
            let out = check_instance(&inst, 8);
            for r in &out.reports {
                assert_ne!(r.status, CheckStatus::Fail, "{r:?}");
            }
            for b in &out.balance {
                assert_eq!(b.left, b.right);
            }
            assert_eq!(out.splits.len(), 3);
        }
    }
}
