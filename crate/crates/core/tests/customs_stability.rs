mod common;

use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use tradebloc_core::customs::{cu_group_welfare, cu_group_welfare_gradient, cu_tariffs, CuRegime};
use tradebloc_core::economy::marginal_welfare;
use tradebloc_core::regime::{external_tariff, regime_tariffs, FtaRegime};
use tradebloc_core::stability::{pairwise_stability, pairwise_stability_with, Links};
use tradebloc_core::tariff_game::{best_response, nash_tariff};
use tradebloc_core::{Exact, ModelParams, Scalar, TariffProfile};

fn random_partition(n: usize, rng: &mut impl Rng) -> CuRegime {
    let mut countries: Vec<usize> = (0..n).collect();
    countries.shuffle(rng);
    let mut unions = Vec::new();
    let mut rest = &countries[..];
    while !rest.is_empty() {
        let k = rng.gen_range(1..=rest.len());
        unions.push(rest[..k].to_vec());
        rest = &rest[k..];
    }
    CuRegime::new(n, unions).unwrap()
}

#[test]
fn singleton_unions_reproduce_nash_tariff_on_grid() {
    for p in exact_grid() {
        let t = cu_tariffs(&p, &CuRegime::singletons(p.n())).unwrap();
        assert_eq!(t, TariffProfile::uniform(p.n(), nash_tariff(&p)).unwrap());
    }
}

#[test]
fn single_union_tariff_formula_and_comparison() {
    for p in exact_grid() {
        let n = p.n() as i64;
        let (a, l) = (p.a().clone(), p.lambda().clone());
        let tne = nash_tariff(&p);
        for m in 2..p.n() {
            let cu = CuRegime::new(p.n(), vec![(0..m).collect()]).unwrap();
            let t = cu_tariffs(&p, &cu).unwrap();
            let mi = m as i64;
            let want = &a * &l * Exact::of_int(mi)
                / (&l * &l + Exact::of_int(4 * n) * &l + Exact::of_int(4 * (n * n - mi * mi - n + mi + 1)));
            assert_eq!(t.get(0, p.n() - 1), &want);
            assert!(want > tne);
            // outsiders treat union members like FTA members of the same size
            assert_eq!(t.get(p.n() - 1, 0), &external_tariff(&p, p.n() - m));
            // a singleton union's tariffs are individual best responses
            for j in (0..p.n()).filter(|&j| j != p.n() - 1) {
                assert_eq!(t.get(p.n() - 1, j), &best_response(&p, &t, p.n() - 1, j).unwrap());
            }
        }
    }
}

#[test]
fn customs_union_raises_external_tariff_above_fta() {
    let p = ModelParams::example_exact();
    let cu = cu_tariffs(&p, &CuRegime::parse("1-5", 8).unwrap()).unwrap();
    let fta = regime_tariffs(&p, &FtaRegime::parse("1-5", 8).unwrap()).unwrap();
    for i in 0..5 {
        for j in 5..8 {
            assert!(cu.get(i, j) > fta.get(i, j));
            assert_eq!(fta.get(i, j), &nash_tariff(&p));
        }
    }
}

#[test]
fn group_welfare_is_stationary_at_union_tariffs() {
    let mut rng = rng(61);
    for p in exact_grid().into_iter().step_by(7) {
        for _ in 0..4 {
            let cu = random_partition(p.n(), &mut rng);
            let t = cu_tariffs(&p, &cu).unwrap();
            for i in 0..p.n() {
                for j in (0..p.n()).filter(|&j| !cu.same_union(i, j)) {
                    assert_eq!(cu_group_welfare_gradient(&p, &cu, &t, i, j).unwrap(), Exact::of_int(0));
                }
            }
        }
    }
    let p = ModelParams::example();
    let cu = CuRegime::parse("1-3|4,5|6-8", 8).unwrap();
    let t = cu_tariffs(&p, &cu).unwrap();
    for i in 0..8 {
        for j in (0..8).filter(|&j| !cu.same_union(i, j)) {
            assert!(cu_group_welfare_gradient(&p, &cu, &t, i, j).unwrap().abs() <= 1e-9);
        }
    }
}

#[test]
fn group_gradient_matches_exact_differences() {
    let mut rng = rng(62);
    let p = ModelParams::example_exact();
    let h = exact("1/10000");
    for _ in 0..10 {
        let cu = random_partition(8, &mut rng);
        if cu.unions().len() == 1 {
            continue;
        }
        let t = random_profile(&p, &mut rng);
        let (i, j) = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .find(|&(i, j)| !cu.same_union(i, j))
            .unwrap();
        let mut up = t.clone();
        let mut down = t.clone();
        up.set(i, j, t.get(i, j) + &h).unwrap();
        down.set(i, j, t.get(i, j) - &h).unwrap();
        let l = cu.union_of(i);
        let fd = (cu_group_welfare(&p, &cu, &up, l).unwrap() - cu_group_welfare(&p, &cu, &down, l).unwrap())
            / (Exact::of_int(2) * &h);
        assert_eq!(cu_group_welfare_gradient(&p, &cu, &t, i, j).unwrap(), fd);
    }
}

#[test]
fn singleton_gradient_is_own_marginal_welfare() {
    let mut rng = rng(63);
    let p = ModelParams::example_exact();
    let cu = CuRegime::parse("1-4", 8).unwrap();
    let t = random_profile(&p, &mut rng);
    assert_eq!(
        cu_group_welfare_gradient(&p, &cu, &t, 6, 2).unwrap(),
        marginal_welfare(&p, &t, 6, 2).unwrap().own
    );
    let zero = TariffProfile::zero(8);
    assert!(cu_group_welfare_gradient(&p, &cu, &zero, 0, 6).unwrap() > Exact::of_int(0));
}

fn fixture_payoff(links: &Links) -> tradebloc_core::Result<Vec<f64>> {
    let degree = |c: usize| links.iter().filter(|(i, j)| *i == c || *j == c).count();
    Ok(match links.len() {
        0 => vec![0.0; 3],
        1 => (0..3).map(|c| if degree(c) == 1 { 4.0 } else { -1.0 }).collect(),
        2 => (0..3).map(|c| if degree(c) == 2 { 5.0 } else { 2.0 }).collect(),
        _ => vec![3.0; 3],
    })
}

#[test]
fn three_country_fixture_verdicts() {
    let complete: Links = [(0, 1), (0, 2), (1, 2)].into_iter().collect();
    let hub: Links = [(0, 1), (0, 2)].into_iter().collect();
    let single: Links = [(0, 1)].into_iter().collect();
    let empty = Links::new();
    let v = |l: &Links| pairwise_stability_with(3, l, fixture_payoff).unwrap();
    let f1 = v(&complete);
    assert!(f1.is_pairwise_stable);
    assert_eq!(f1.welfare, vec![3.0, 3.0, 3.0]);
    let f2 = v(&hub);
    assert!(!f2.is_pairwise_stable);
    assert!(f2.severance_violations.is_empty());
    assert_eq!(f2.link_violations.len(), 1);
    assert_eq!(f2.link_violations[0].pair, (1, 2));
    let f3 = v(&single);
    assert!(!f3.is_pairwise_stable);
    assert_eq!(f3.link_violations.iter().map(|l| l.pair).collect::<Vec<_>>(), vec![(0, 2), (1, 2)]);
    let f4 = v(&empty);
    assert!(!f4.is_pairwise_stable);
    assert_eq!(f4.link_violations.len(), 3);
}

#[test]
fn two_bloc_network_is_not_pairwise_stable() {
    let p = ModelParams::example();
    let v = pairwise_stability(&p, &FtaRegime::parse("1-5|6-8", 8).unwrap()).unwrap();
    assert!(!v.is_pairwise_stable);
    assert_eq!(v.links.len(), 13);
    let cross = v.link_violations.iter().find(|l| l.pair == (0, 5)).expect("cross-bloc pair gains");
    assert!((cross.first.1 - 487.958).abs() < 1e-3);
    assert!((cross.second.1 - 487.091).abs() < 1e-3);
    assert!(v.link_violations.iter().all(|l| l.pair.0 < 5 && l.pair.1 >= 5));
}

#[test]
fn free_trade_network_and_empty_network() {
    let p = ModelParams::example_exact();
    let global = pairwise_stability(&p, &FtaRegime::global(8)).unwrap();
    assert!(global.severance_violations.is_empty());
    for s in &global.severance_violations {
        assert!(s.after > s.before);
    }
    assert!(global.is_pairwise_stable);
    let empty = pairwise_stability(&p, &FtaRegime::singletons(8)).unwrap();
    assert!(!empty.is_pairwise_stable);
    assert_eq!(empty.link_violations.len(), 28);
}

#[test]
fn verdicts_are_invariant_under_relabeling() {
    let mut rng = rng(64);
    let p = exact_params(6, "12", "4");
    for _ in 0..8 {
        let links: Vec<(usize, usize)> = (0..6)
            .flat_map(|i| (i + 1..6).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        let mut perm: Vec<usize> = (0..6).collect();
        perm.shuffle(&mut rng);
        let relabeled: Vec<(usize, usize)> = links.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        let a = pairwise_stability(&p, &FtaRegime::from_links(6, &links).unwrap()).unwrap();
        let b = pairwise_stability(&p, &FtaRegime::from_links(6, &relabeled).unwrap()).unwrap();
        assert_eq!(a.is_pairwise_stable, b.is_pairwise_stable);
        for (c, &pc) in perm.iter().enumerate() {
            assert_eq!(a.welfare[c], b.welfare[pc]);
        }
        let map = |(i, j): (usize, usize)| (perm[i].min(perm[j]), perm[i].max(perm[j]));
        let mut sa: Vec<_> = a.severance_violations.iter().map(|s| (perm[s.country], map(s.link))).collect();
        let mut sb: Vec<_> = b.severance_violations.iter().map(|s| (s.country, s.link)).collect();
        sa.sort();
        sb.sort();
        assert_eq!(sa, sb);
        let mut la: Vec<_> = a.link_violations.iter().map(|l| map(l.pair)).collect();
        let mut lb: Vec<_> = b.link_violations.iter().map(|l| l.pair).collect();
        la.sort();
        lb.sort();
        assert_eq!(la, lb);
    }
}
