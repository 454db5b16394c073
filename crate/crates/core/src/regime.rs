//! FTA regimes: equilibrium tariffs, trade effects and welfare when groups of
//! countries (possibly overlapping) trade tariff-free among themselves.

use std::collections::BTreeSet;
use std::fmt;

use crate::economy::{self, TariffProfile, WelfareReport};
use crate::error::{ModelError, Result};
use crate::numeric::{count, int, square, sum, Scalar};
use crate::params::ModelParams;

/// A collection of agreements, none contained in another. Countries are
/// 0-based internally and 1-based in the text syntax.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FtaRegime {
    n: usize,
    blocs: Vec<Vec<usize>>,
}

impl FtaRegime {
    /// Validates and canonicalizes: uncovered countries become singleton
    /// blocs and blocs are sorted by size (descending), then smallest member.
    pub fn new(n: usize, blocs: Vec<Vec<usize>>) -> Result<Self> {
        let mut sets: Vec<BTreeSet<usize>> = Vec::with_capacity(blocs.len());
        for bloc in blocs {
            if bloc.is_empty() {
                return Err(ModelError::InvalidRegime("empty bloc".into()));
            }
            if let Some(&c) = bloc.iter().find(|&&c| c >= n) {
                return Err(ModelError::InvalidRegime(format!(
                    "country {} outside 1..={n}",
                    c + 1
                )));
            }
            sets.push(bloc.into_iter().collect());
        }
        for (x, a) in sets.iter().enumerate() {
            for (y, b) in sets.iter().enumerate() {
                if x != y && a.is_subset(b) {
                    return Err(ModelError::InvalidRegime(format!(
                        "bloc {} is contained in bloc {}",
                        render_bloc(a.iter().copied()),
                        render_bloc(b.iter().copied())
                    )));
                }
            }
        }
        let covered: BTreeSet<usize> = sets.iter().flatten().copied().collect();
        for c in (0..n).filter(|c| !covered.contains(c)) {
            sets.push(BTreeSet::from([c]));
        }
        let mut blocs: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        blocs.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(FtaRegime { n, blocs })
    }

    /// No agreements at all.
    pub fn singletons(n: usize) -> Self {
        FtaRegime {
            n,
            blocs: (0..n).map(|c| vec![c]).collect(),
        }
    }

    pub fn global(n: usize) -> Self {
        FtaRegime {
            n,
            blocs: vec![(0..n).collect()],
        }
    }

    /// One agreement among `members`; the rest stay outside.
    pub fn single(n: usize, members: &[usize]) -> Result<Self> {
        if members.len() <= 1 {
            return Self::new(n, vec![]);
        }
        Self::new(n, vec![members.to_vec()])
    }

    /// The agreement `{0, .., m-1}` with singletons.
    pub fn first_m(n: usize, m: usize) -> Result<Self> {
        Self::single(n, &(0..m).collect::<Vec<_>>())
    }

    /// A network of bilateral agreements.
    pub fn from_links(n: usize, links: &[(usize, usize)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(i, j) in links {
            if i == j {
                return Err(ModelError::InvalidRegime(format!("self-link at {}", i + 1)));
            }
            seen.insert((i.min(j), i.max(j)));
        }
        Self::new(n, seen.into_iter().map(|(i, j)| vec![i, j]).collect())
    }

    /// Parses `1-5|6|7|8` or `1,2|2,3|4` (1-based, ranges inclusive).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        Self::new(n, parse_blocs(text, n)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocs(&self) -> &[Vec<usize>] {
        &self.blocs
    }

    pub fn shares_fta(&self, i: usize, k: usize) -> bool {
        i != k && self.blocs.iter().any(|b| b.contains(&i) && b.contains(&k))
    }

    /// Every unordered pair `(i, j)`, `i < j`, that shares an agreement.
    pub fn links(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.shares_fta(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn largest_bloc(&self) -> &[usize] {
        &self.blocs[0]
    }
}

impl fmt::Display for FtaRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocs
            .iter()
            .map(|b| render_bloc(b.iter().copied()))
            .collect();
        f.write_str(&parts.join("|"))
    }
}

/// Renders a sorted set of 0-based countries 1-based, compressing runs of
/// three or more into ranges.
pub fn render_bloc(members: impl IntoIterator<Item = usize>) -> String {
    let members: Vec<usize> = members.into_iter().collect();
    let mut parts = Vec::new();
    let mut start = 0;
    while start < members.len() {
        let mut end = start;
        while end + 1 < members.len() && members[end + 1] == members[end] + 1 {
            end += 1;
        }
        if end - start >= 2 {
            parts.push(format!("{}-{}", members[start] + 1, members[end] + 1));
        } else {
            for c in &members[start..=end] {
                parts.push((c + 1).to_string());
            }
        }
        start = end + 1;
    }
    parts.join(",")
}

/// Shared bloc syntax for FTA regimes and customs-union partitions.
pub(crate) fn parse_blocs(text: &str, n: usize) -> Result<Vec<Vec<usize>>> {
    let mut blocs = Vec::new();
    let mut offset = 0;
    for bloc_text in text.split('|') {
        let mut bloc = Vec::new();
        let mut item_offset = offset;
        for item in bloc_text.split(',') {
            let lead = item.len() - item.trim_start().len();
            let pos = item_offset + lead;
            let trimmed = item.trim();
            if trimmed.is_empty() {
                return Err(ModelError::parse(item, pos, "empty member"));
            }
            let (lo, hi) = match trimmed.split_once('-') {
                Some((lo, hi)) => (
                    parse_country(lo, pos, n)?,
                    parse_country(hi, pos + lo.len() + 1, n)?,
                ),
                None => {
                    let c = parse_country(trimmed, pos, n)?;
                    (c, c)
                }
            };
            if lo > hi {
                return Err(ModelError::parse(trimmed, pos, "descending range"));
            }
            bloc.extend(lo..=hi);
            item_offset += item.len() + 1;
        }
        blocs.push(bloc);
        offset += bloc_text.len() + 1;
    }
    Ok(blocs)
}

fn parse_country(token: &str, pos: usize, n: usize) -> Result<usize> {
    let t = token.trim();
    let value: usize = t
        .parse()
        .map_err(|_| ModelError::parse(t, pos, "expected a country number"))?;
    if value == 0 || value > n {
        return Err(ModelError::parse(t, pos, format!("country outside 1..={n}")));
    }
    Ok(value - 1)
}

/// For each country `k`, the set `N_k` of countries sharing no agreement with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutsiderIndex {
    sets: Vec<BTreeSet<usize>>,
}

impl OutsiderIndex {
    pub fn of(&self, k: usize) -> &BTreeSet<usize> {
        &self.sets[k]
    }

    /// `n_k = |N_k|`.
    pub fn count(&self, k: usize) -> usize {
        self.sets[k].len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.sets.iter().map(BTreeSet::len).collect()
    }
}

pub fn outsider_sets(regime: &FtaRegime) -> OutsiderIndex {
    let n = regime.n();
    OutsiderIndex {
        sets: (0..n)
            .map(|k| {
                (0..n)
                    .filter(|&i| i != k && !regime.shares_fta(i, k))
                    .collect()
            })
            .collect(),
    }
}

/// The common external tariff on a country with `outsiders` non-partners.
pub fn external_tariff<T: Scalar>(params: &ModelParams<T>, outsiders: usize) -> T {
    params.a().clone() * params.lambda().clone() / params.tariff_denominator(outsiders)
}

fn check_regime<T: Scalar>(params: &ModelParams<T>, regime: &FtaRegime) -> Result<()> {
    if regime.n() != params.n() {
        return Err(ModelError::InvalidRegime(format!(
            "regime over {} countries but n = {}",
            regime.n(),
            params.n()
        )));
    }
    Ok(())
}

/// Equilibrium tariffs: zero between partners, [`external_tariff`] otherwise.
pub fn regime_tariffs<T: Scalar>(
    params: &ModelParams<T>,
    regime: &FtaRegime,
) -> Result<TariffProfile<T>> {
    check_regime(params, regime)?;
    let outsiders = outsider_sets(regime);
    let on: Vec<T> = (0..params.n())
        .map(|k| external_tariff(params, outsiders.count(k)))
        .collect();
    TariffProfile::from_fn(params.n(), |i, k| {
        if regime.shares_fta(i, k) {
            T::zero()
        } else {
            on[k].clone()
        }
    })
}

/// Welfare of every country at the regime's equilibrium tariffs.
pub fn regime_welfare<T: Scalar>(
    params: &ModelParams<T>,
    regime: &FtaRegime,
) -> Result<WelfareReport<T>> {
    economy::welfare(params, &regime_tariffs(params, regime)?)
}

/// Welfare from the regime-specialized polynomial, which depends on the
/// outsider counts `n_j` alone.
pub fn regime_welfare_structural<T: Scalar>(
    params: &ModelParams<T>,
    regime: &FtaRegime,
) -> Result<Vec<T>> {
    check_regime(params, regime)?;
    let n = params.n();
    let a = params.a().clone();
    let l = params.lambda().clone();
    let al4 = int::<T>(4) * a * l.clone();
    let outsiders = outsider_sets(regime);
    let nk = outsiders.counts();
    let tk: Vec<T> = nk.iter().map(|&c| external_tariff(params, c)).collect();
    let own_sq_coef = int::<T>(2) * square(&params.price_denominator()) - int::<T>(8);
    Ok((0..n)
        .map(|i| {
            let mut v = params.free_trade_scaled();
            let ni = outsiders.of(i);
            for &j in ni {
                let reduced = count::<T>(nk[j] - 1) * tk[j].clone();
                v = v + (al4.clone() + int::<T>(16) * reduced.clone()) * tk[j].clone();
                v = v - own_sq_coef.clone() * square(&tk[j]);
                v = v + al4.clone() * reduced.clone();
                v = v + int::<T>(8) * square(&reduced);
            }
            for j in (0..n).filter(|&j| j != i && !ni.contains(&j)) {
                let full = count::<T>(nk[j]) * tk[j].clone();
                v = v + al4.clone() * full.clone() + int::<T>(8) * square(&full);
            }
            let on_i = count::<T>(nk[i]) * tk[i].clone();
            v = v + int::<T>(4) * (int::<T>(2) + l.clone()) * square(&on_i);
            v = v - al4.clone() * count::<T>(n - 1) * on_i;
            v / params.r()
        })
        .collect())
}

/// Tariffs and welfare with a single agreement of size `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleFtaWelfare<T> {
    pub m: usize,
    /// Outsiders' tariff on a participant.
    pub participant_tariff: T,
    /// Everyone's tariff on a non-participant (the Nash tariff).
    pub outsider_tariff: T,
    pub participant_welfare: T,
    /// Absent when everyone participates.
    pub outsider_welfare: Option<T>,
}

/// Closed-form participant / non-participant welfare for one agreement of size `m`.
pub fn single_fta_welfare<T: Scalar>(params: &ModelParams<T>, m: usize) -> Result<SingleFtaWelfare<T>> {
    let n = params.n();
    if m == 0 || m > n {
        return Err(ModelError::Range {
            what: "FTA size",
            value: m,
            min: 1,
            max: n,
        });
    }
    let a = params.a().clone();
    let l = params.lambda().clone();
    let al = a * l.clone();
    let tp = external_tariff(params, n - m);
    let tnp = external_tariff(params, n - 1);
    let (ni, mi) = (n as i64, m as i64);
    let rest = count::<T>(n - m);
    let base = params.free_trade_scaled();
    let r = params.r();

    let wp = base.clone()
        + int::<T>(4) * (int::<T>(2 * mi) + l.clone()) * square(&rest) * square(&tp)
        - int::<T>(4) * al.clone() * square(&rest) * tp.clone()
        + int::<T>(2)
            * rest.clone()
            * (int::<T>(4 - 8 * ni) - int::<T>(4 * ni) * l.clone() - square(&l))
            * square(&tnp)
        + int::<T>(4) * al.clone() * rest.clone() * count::<T>(n - 1) * tnp.clone();

    let outsider_welfare = (m < n).then(|| {
        let c_p = square(&l) + int::<T>(4 * ni) * l.clone() + int::<T>(8 * mi * ni - 4 * mi * mi);
        let c_np = count::<T>(n - m - 1) * square(&l)
            - int::<T>(2 * (2 * mi * ni - ni * ni + 1)) * l.clone()
            + int::<T>(4 * (ni * ni - 2 * mi * ni - ni + mi));
        let w = base
            - int::<T>(2 * mi) * c_p * square(&tp)
            - int::<T>(2) * c_np * square(&tnp)
            + int::<T>(4 * mi) * al.clone() * rest.clone() * tp.clone()
            - int::<T>(4 * mi) * al * count::<T>(n - 1) * tnp.clone();
        w / r.clone()
    });

    Ok(SingleFtaWelfare {
        m,
        participant_tariff: tp,
        outsider_tariff: tnp,
        participant_welfare: wp / r,
        outsider_welfare,
    })
}

/// `W_p^m` for `m = 1..=n` (index `m - 1`).
pub fn participant_welfare_table<T: Scalar>(params: &ModelParams<T>) -> Vec<T> {
    (1..=params.n())
        .map(|m| {
            single_fta_welfare(params, m)
                .expect("m within range")
                .participant_welfare
        })
        .collect()
}

/// Prices and imports of one participant's good before (no agreement) and
/// after an agreement of size `m` forms.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeEffectReport<T> {
    pub m: usize,
    pub member_price_before: T,
    pub member_price_after: T,
    pub member_imports_before: T,
    pub member_imports_after: T,
    /// Absent when `m = n`.
    pub outsider: Option<OutsiderEffect<T>>,
    /// Descriptions of any expected strict inequality that failed.
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutsiderEffect<T> {
    pub price_before: T,
    pub price_after: T,
    pub imports_before: T,
    pub imports_after: T,
}

/// Compares regimes "no agreement" and "agreement `{0..m-1}`" for good 0
/// (a participant's export). Members gain cheaper imports of it; outsiders
/// pay more and import less.
pub fn trade_effect_report<T: Scalar>(params: &ModelParams<T>, m: usize) -> Result<TradeEffectReport<T>> {
    let n = params.n();
    if m < 2 || m > n {
        return Err(ModelError::Range {
            what: "FTA size",
            value: m,
            min: 2,
            max: n,
        });
    }
    let flows_for = |regime: &FtaRegime| -> Result<_> {
        let t = regime_tariffs(params, regime)?;
        let prices = economy::equilibrium_prices(params, &t)?;
        let flows = economy::trade_flows(params, &prices);
        Ok((prices, flows))
    };
    let (p0, f0) = flows_for(&FtaRegime::singletons(n))?;
    let (p1, f1) = flows_for(&FtaRegime::first_m(n, m)?)?;
    let good = 0;
    let member = 1;
    let mut violations = Vec::new();
    let member_price_before = p0.domestic(member, good).clone();
    let member_price_after = p1.domestic(member, good).clone();
    let member_imports_before = f0.imports.get(member, good).clone();
    let member_imports_after = f1.imports.get(member, good).clone();
    if !(member_price_before > member_price_after) {
        violations.push(format!("m={m}: member price did not fall"));
    }
    if !(member_imports_before < member_imports_after) {
        violations.push(format!("m={m}: member imports did not rise"));
    }
    let outsider = (m < n).then(|| {
        let k = n - 1;
        let effect = OutsiderEffect {
            price_before: p0.domestic(k, good).clone(),
            price_after: p1.domestic(k, good).clone(),
            imports_before: f0.imports.get(k, good).clone(),
            imports_after: f1.imports.get(k, good).clone(),
        };
        if !(effect.price_before < effect.price_after) {
            violations.push(format!("m={m}: outsider price did not rise"));
        }
        if !(effect.imports_before > effect.imports_after) {
            violations.push(format!("m={m}: outsider imports did not fall"));
        }
        effect
    });
    Ok(TradeEffectReport {
        m,
        member_price_before,
        member_price_after,
        member_imports_before,
        member_imports_after,
        outsider,
        violations,
    })
}

/// Sum of welfare over a group of countries.
pub fn group_welfare<T: Scalar>(report: &WelfareReport<T>, members: &[usize]) -> T {
    sum(members.iter().map(|&c| report.of(c).clone()))
}
