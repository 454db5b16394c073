//! Pairwise stability of networks of bilateral agreements.
//!
//! A network is pairwise stable when no country strictly gains by cutting
//! one of its links and no unlinked pair both strictly gain by adding one.

use std::collections::BTreeSet;

use crate::error::{ModelError, Result};
use crate::numeric::Scalar;
use crate::params::ModelParams;
use crate::regime::{self, FtaRegime};

/// Undirected links `(i, j)` with `i < j`.
pub type Links = BTreeSet<(usize, usize)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Severance<T> {
    pub country: usize,
    pub link: (usize, usize),
    pub before: T,
    pub after: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkAddition<T> {
    pub pair: (usize, usize),
    /// Welfare of `pair.0` before and after.
    pub first: (T, T),
    /// Welfare of `pair.1` before and after.
    pub second: (T, T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict<T> {
    pub links: Links,
    pub welfare: Vec<T>,
    pub severance_violations: Vec<Severance<T>>,
    pub link_violations: Vec<LinkAddition<T>>,
    pub is_pairwise_stable: bool,
}

fn normalized(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Generic checker: `payoff` maps a link set to every country's payoff.
pub fn pairwise_stability_with<T, F>(n: usize, links: &Links, mut payoff: F) -> Result<StabilityVerdict<T>>
where
    T: Scalar,
    F: FnMut(&Links) -> Result<Vec<T>>,
{
    for &(i, j) in links {
        if i >= j || j >= n {
            return Err(ModelError::InvalidRegime(format!(
                "link ({}, {}) is not a valid pair over 1..={n}",
                i + 1,
                j + 1
            )));
        }
    }
    let base = payoff(links)?;
    let mut severance_violations = Vec::new();
    for &link in links {
        let mut cut = links.clone();
        cut.remove(&link);
        let after = payoff(&cut)?;
        for country in [link.0, link.1] {
            if after[country] > base[country] {
                severance_violations.push(Severance {
                    country,
                    link,
                    before: base[country].clone(),
                    after: after[country].clone(),
                });
            }
        }
    }
    let mut link_violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let pair = normalized(i, j);
            if links.contains(&pair) {
                continue;
            }
            let mut grown = links.clone();
            grown.insert(pair);
            let after = payoff(&grown)?;
            if after[i] > base[i] && after[j] > base[j] {
                link_violations.push(LinkAddition {
                    pair,
                    first: (base[i].clone(), after[i].clone()),
                    second: (base[j].clone(), after[j].clone()),
                });
            }
        }
    }
    let is_pairwise_stable = severance_violations.is_empty() && link_violations.is_empty();
    Ok(StabilityVerdict {
        links: links.clone(),
        welfare: base,
        severance_violations,
        link_violations,
        is_pairwise_stable,
    })
}

/// Link network of a regime. Blocs with more than two members become all of
/// their pairwise links.
pub fn regime_links(regime: &FtaRegime) -> Links {
    if regime.blocs().iter().any(|b| b.len() > 2) {
        log::warn!("decomposing multilateral blocs of {regime} into bilateral links");
    }
    regime.links().into_iter().collect()
}

/// Pairwise stability of `regime` with payoffs from regime-equilibrium welfare.
pub fn pairwise_stability<T: Scalar>(
    params: &ModelParams<T>,
    regime: &FtaRegime,
) -> Result<StabilityVerdict<T>> {
    if regime.n() != params.n() {
        return Err(ModelError::InvalidRegime(format!(
            "regime over {} countries but n = {}",
            regime.n(),
            params.n()
        )));
    }
    let n = params.n();
    let links = regime_links(regime);
    pairwise_stability_with(n, &links, |l| {
        let edges: Vec<(usize, usize)> = l.iter().copied().collect();
        let r = FtaRegime::from_links(n, &edges)?;
        Ok(regime::regime_welfare(params, &r)?.welfare)
    })
}
