//! Customs unions: disjoint blocs that set common external tariffs to
//! maximize the bloc's summed welfare.

use std::collections::BTreeSet;
use std::fmt;

use crate::economy::{self, TariffProfile};
use crate::error::{ModelError, Result};
use crate::numeric::{count, int, square, sum, Scalar};
use crate::params::ModelParams;
use crate::regime::{parse_blocs, render_bloc};

/// A partition of the countries into unions (singletons allowed).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CuRegime {
    n: usize,
    unions: Vec<Vec<usize>>,
    union_of: Vec<usize>,
}

impl CuRegime {
    /// Validates disjointness and completes the partition with singletons.
    pub fn new(n: usize, unions: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        for union in unions {
            if union.is_empty() {
                return Err(ModelError::InvalidPartition("empty union".into()));
            }
            let set: BTreeSet<usize> = union.into_iter().collect();
            for &c in &set {
                if c >= n {
                    return Err(ModelError::InvalidPartition(format!(
                        "country {} outside 1..={n}",
                        c + 1
                    )));
                }
                if owner[c].is_some() {
                    return Err(ModelError::InvalidPartition(format!(
                        "country {} belongs to two unions",
                        c + 1
                    )));
                }
                owner[c] = Some(sets.len());
            }
            sets.push(set);
        }
        for (c, slot) in owner.iter().enumerate() {
            if slot.is_none() {
                sets.push(BTreeSet::from([c]));
            }
        }
        let mut unions: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        unions.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut union_of = vec![0; n];
        for (l, u) in unions.iter().enumerate() {
            for &c in u {
                union_of[c] = l;
            }
        }
        Ok(CuRegime { n, unions, union_of })
    }

    pub fn singletons(n: usize) -> Self {
        Self::new(n, vec![]).expect("empty partition is valid")
    }

    /// Same syntax as FTA regimes; overlapping unions are rejected.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        Self::new(n, parse_blocs(text, n)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unions(&self) -> &[Vec<usize>] {
        &self.unions
    }

    /// Index of the union containing `country`.
    pub fn union_of(&self, country: usize) -> usize {
        self.union_of[country]
    }

    pub fn size_of(&self, union: usize) -> usize {
        self.unions[union].len()
    }

    pub fn same_union(&self, i: usize, j: usize) -> bool {
        self.union_of[i] == self.union_of[j]
    }
}

impl fmt::Display for CuRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .unions
            .iter()
            .map(|u| render_bloc(u.iter().copied()))
            .collect();
        f.write_str(&parts.join("|"))
    }
}

fn check_cu<T: Scalar>(params: &ModelParams<T>, cu: &CuRegime) -> Result<()> {
    if cu.n() != params.n() {
        return Err(ModelError::InvalidPartition(format!(
            "partition over {} countries but n = {}",
            cu.n(),
            params.n()
        )));
    }
    Ok(())
}

/// Equilibrium tariffs when every union maximizes its group welfare: the
/// members of union `l` levy
/// `a c_l lambda / (lambda^2 + 4 n lambda + 4 (n^2 - S_j))` on outsider `j`,
/// where `S_j` sums squared sizes of all unions not containing `j`.
pub fn cu_tariffs<T: Scalar>(params: &ModelParams<T>, cu: &CuRegime) -> Result<TariffProfile<T>> {
    check_cu(params, cu)?;
    let n = params.n();
    let l = params.lambda().clone();
    let a = params.a().clone();
    let base = square(&l) + int::<T>(4 * n as i64) * l.clone() + count::<T>(4 * n * n);
    let scale: Vec<T> = (0..n)
        .map(|j| {
            let s: usize = cu
                .unions()
                .iter()
                .enumerate()
                .filter(|&(u, _)| u != cu.union_of(j))
                .map(|(_, members)| members.len() * members.len())
                .sum();
            a.clone() * l.clone() / (base.clone() - count::<T>(4 * s))
        })
        .collect();
    TariffProfile::from_fn(n, |i, j| {
        if cu.same_union(i, j) {
            T::zero()
        } else {
            count::<T>(cu.size_of(cu.union_of(i))) * scale[j].clone()
        }
    })
}

/// `dW^{C_l}/dt_ij = -2 t_ij + (2 c_l/(2n+lambda)) (a - 2 p_j^J)` for a
/// member `i` of union `C_l` and an outsider `j`.
pub fn cu_group_welfare_gradient<T: Scalar>(
    params: &ModelParams<T>,
    cu: &CuRegime,
    t: &TariffProfile<T>,
    i: usize,
    j: usize,
) -> Result<T> {
    check_cu(params, cu)?;
    params.check_pair(i, j)?;
    if cu.same_union(i, j) {
        return Err(ModelError::Index { i, j, n: params.n() });
    }
    let denom = params.price_denominator();
    let a = params.a().clone();
    let world_price =
        (count::<T>(params.n()) * a.clone() - int::<T>(2) * t.sum_on(j, None)) / denom.clone();
    let size = count::<T>(cu.size_of(cu.union_of(i)));
    Ok(-int::<T>(2) * t.get(i, j).clone()
        + int::<T>(2) * size / denom * (a - int::<T>(2) * world_price))
}

/// Summed welfare of union `union` under profile `t`.
pub fn cu_group_welfare<T: Scalar>(
    params: &ModelParams<T>,
    cu: &CuRegime,
    t: &TariffProfile<T>,
    union: usize,
) -> Result<T> {
    check_cu(params, cu)?;
    let w = economy::welfare(params, t)?;
    Ok(sum(cu.unions()[union].iter().map(|&c| w.of(c).clone())))
}
