//! One function per subcommand, generic over the numeric backend.

use tradebloc_core::customs::{cu_group_welfare_gradient, cu_tariffs, CuRegime};
use tradebloc_core::economy::{equilibrium_prices, trade_flows, TradeFlows};
use tradebloc_core::regime::{
    outsider_sets, regime_tariffs, render_bloc, regime_welfare, regime_welfare_structural, single_fta_welfare,
    trade_effect_report, FtaRegime,
};
use tradebloc_core::sequential::{
    backward_induction, optimal_size_with_tie, solve_closed_form, AccessRule, MoveOrder, SpeOutcome,
    Vote, ENUMERATION_LIMIT,
};
use tradebloc_core::stability::pairwise_stability;
use tradebloc_core::tariff_game::{
    nash_by_iteration, nash_closed_form, own_tariff_curvature, IterationSettings,
};
use tradebloc_core::{ModelError, ModelParams, Result, Scalar, TariffProfile};

use crate::args::{Rule, Solver};
use crate::report::{Cell, Report};

pub struct Context<T> {
    pub params: ModelParams<T>,
    pub sigfigs: usize,
}

impl<T: Scalar> Context<T> {
    fn num(&self, v: &T) -> Cell {
        Cell::num(v, self.sigfigs)
    }

    fn opt(&self, v: Option<&T>) -> Cell {
        Cell::opt_num(v, self.sigfigs)
    }

    fn n(&self) -> usize {
        self.params.n()
    }

    fn base_report(&self, command: &'static str, columns: Vec<&'static str>) -> Report {
        let mut r = Report::new(command, columns);
        r.summary.push("n", Cell::count(self.n()));
        r.summary.push("a", self.num(self.params.a()));
        r.summary.push("lambda", self.num(self.params.lambda()));
        r.summary.push("numeric_mode", Cell::text(if T::is_exact() { "exact" } else { "float64" }));
        r
    }

    fn flows(&self, regime: &FtaRegime) -> Result<TradeFlows<T>> {
        let t = regime_tariffs(&self.params, regime)?;
        Ok(trade_flows(&self.params, &equilibrium_prices(&self.params, &t)?))
    }

    /// Values are accepted as equal when exact, or within 1e-9 relative.
    fn close(&self, x: &T, y: &T) -> bool {
        if T::is_exact() {
            x == y
        } else {
            let (x, y) = (x.as_f64(), y.as_f64());
            (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
        }
    }
}

pub fn sweep<T: Scalar>(cx: &Context<T>) -> Result<Report> {
    let n = cx.n();
    let mut r = cx.base_report(
        "sweep",
        vec!["m", "t_p", "t_np", "m_p^p", "m_np^p", "m_p^np", "W_p", "W_np"],
    );
    let (m_star, tied) = optimal_size_with_tie(&cx.params);
    r.summary.push("m_star", Cell::count(m_star));
    r.summary.push("m_star_tied", Cell::Bool(tied));
    let mut prev_np: Option<T> = None;
    for m in 1..=n {
        let s = single_fta_welfare(&cx.params, m)?;
        let flows = cx.flows(&FtaRegime::first_m(n, m)?)?;
        let outside = m < n;
        r.push_row(vec![
            Cell::count(m),
            cx.num(&s.participant_tariff),
            cx.num(&s.outsider_tariff),
            cx.num(flows.imports.get(1, 0)),
            cx.opt(outside.then(|| flows.imports.get(n - 1, 0))),
            cx.opt(outside.then(|| flows.imports.get(0, n - 1))),
            cx.num(&s.participant_welfare),
            cx.opt(s.outsider_welfare.as_ref()),
        ]);
        if let (Some(prev), Some(cur)) = (&prev_np, &s.outsider_welfare) {
            if !(cur < prev) {
                r.violations.push(format!("W_np did not fall at m={m}"));
            }
        }
        prev_np = s.outsider_welfare.clone();
        if m >= 2 {
            r.violations.extend(trade_effect_report(&cx.params, m)?.violations);
        }
    }
    Ok(r)
}

pub fn two_fta<T: Scalar>(cx: &Context<T>, first: usize) -> Result<Report> {
    let n = cx.n();
    let mut r = cx.base_report(
        "two-fta",
        vec!["regime", "t_alpha", "t_beta", "t_gamma", "W_alpha", "W_beta", "W_gamma"],
    );
    if first < 2 || first >= n {
        return Err(ModelError::Range { what: "first FTA size", value: first, min: 2, max: n - 1 });
    }
    r.summary.push("first", Cell::count(first));
    for second in 1..=n - first {
        let mut blocs = vec![(0..first).collect::<Vec<_>>()];
        if second >= 2 {
            blocs.push((first..first + second).collect());
        }
        let regime = FtaRegime::new(n, blocs)?;
        let t = regime_tariffs(&cx.params, &regime)?;
        let w = regime_welfare(&cx.params, &regime)?;
        let beta = first;
        let gamma = (first + second < n).then_some(n - 1);
        let mut sizes = vec![first.to_string(), second.to_string()];
        sizes.extend((first + second..n).map(|_| "1".to_string()));
        // tariffs are those levied on each group by countries outside it
        let outsider_of = |c: usize| (0..n).find(|&k| k != c && !regime.shares_fta(k, c));
        let levied = |c: usize| outsider_of(c).map(|k| t.get(k, c).clone());
        r.push_row(vec![
            Cell::text(format!("({})", sizes.join(","))),
            cx.opt(levied(0).as_ref()),
            cx.opt(levied(beta).as_ref()),
            cx.opt(gamma.and_then(levied).as_ref()),
            cx.num(&w.welfare[0]),
            cx.num(&w.welfare[beta]),
            cx.opt(gamma.map(|g| &w.welfare[g])),
        ]);
    }
    Ok(r)
}

fn rule_of(rule: Rule) -> AccessRule {
    match rule {
        Rule::Consent => AccessRule::WithConsent,
        Rule::Open => AccessRule::WithoutConsent,
    }
}

fn votes_text(votes: &Option<Vec<(usize, Vote)>>) -> Cell {
    match votes {
        None => Cell::Empty,
        Some(v) => {
            let parts: Vec<String> = v
                .iter()
                .map(|(c, vote)| {
                    let tag = match vote {
                        Vote::Accept => "accept",
                        Vote::Reject => "reject",
                    };
                    format!("{}:{tag}", c + 1)
                })
                .collect();
            Cell::text(parts.join(" "))
        }
    }
}

pub fn spe<T: Scalar>(cx: &Context<T>, rule: Rule, order: &str, solver: Option<Solver>) -> Result<Report> {
    let n = cx.n();
    let rule = rule_of(rule);
    let order = MoveOrder::parse(order, n)?;
    let solver = solver.unwrap_or(if n <= ENUMERATION_LIMIT { Solver::Both } else { Solver::ClosedForm });
    let mut r = cx.base_report(
        "spe",
        vec!["stage", "mover", "participates", "votes", "admitted", "vote_tie", "v", "W_p_incumbent", "welfare"],
    );
    let (outcome, agreement): (SpeOutcome<T>, Option<bool>) = match solver {
        Solver::ClosedForm => (solve_closed_form(&cx.params, rule, &order)?, None),
        Solver::Tree => (backward_induction(&cx.params, rule, &order)?, None),
        Solver::Both => {
            let tree = backward_induction(&cx.params, rule, &order)?;
            let closed = solve_closed_form(&cx.params, rule, &order)?;
            let same = tree.same_play(&closed);
            (tree, Some(same))
        }
    };
    r.summary.push("rule", Cell::text(rule.to_string()));
    r.summary.push("order", Cell::text(order.to_string()));
    r.summary.push(
        "solver",
        Cell::text(match solver {
            Solver::ClosedForm => "closed-form",
            Solver::Tree => "tree",
            Solver::Both => "both",
        }),
    );
    r.summary.push("final_regime", Cell::text(outcome.final_regime.to_string()));
    r.summary.push("fta_size", Cell::count(outcome.members.len()));
    if let Some(m) = outcome.optimal_size {
        r.summary.push("m_star", Cell::count(m));
        r.summary.push("m_star_tied", Cell::Bool(outcome.optimal_size_tied));
    }
    r.summary.push("vote_tie", Cell::Bool(outcome.any_vote_tie()));
    if let Some(same) = agreement {
        r.summary.push("solvers_agree", Cell::Bool(same));
        if !same {
            r.violations.push("tree solve and closed form disagree".into());
        }
    }
    if !outcome.is_consistent() {
        r.violations.push("decision path does not replay to the final regime".into());
    }
    let mut cv = outcome.continuation_values.iter();
    for d in &outcome.decisions {
        let (v, current) = if d.votes.is_some() && rule == AccessRule::WithConsent {
            cv.next().map_or((Cell::Empty, Cell::Empty), |c| (cx.num(&c.value), cx.num(&c.current)))
        } else {
            (Cell::Empty, Cell::Empty)
        };
        r.push_row(vec![
            Cell::count(d.stage),
            Cell::count(d.mover + 1),
            Cell::Bool(d.participates),
            votes_text(&d.votes),
            Cell::Bool(d.admitted),
            Cell::Bool(d.vote_tie),
            v,
            current,
            cx.num(outcome.welfare.of(d.mover)),
        ]);
    }
    Ok(r)
}

pub fn nash<T: Scalar>(cx: &Context<T>) -> Result<Report> {
    let n = cx.n();
    let mut r = cx.base_report(
        "nash",
        vec!["t_ne", "welfare", "free_trade_welfare", "iterations", "max_abs_diff", "curvature"],
    );
    let ne = nash_closed_form(&cx.params);
    let settings = IterationSettings::default();
    let float = cx.params.to_f64();
    let (iterated, steps) = nash_by_iteration(&float, &TariffProfile::zero(n), settings)?;
    let closed_f64 = nash_closed_form(&float);
    let diff = iterated.profile.max_abs_diff(&closed_f64.profile);
    if diff > 10.0 * settings.tol {
        r.violations.push(format!("best-response iteration is {diff:e} away from the closed form"));
    }
    let curvature = own_tariff_curvature(&cx.params);
    if !(curvature < T::zero()) {
        r.violations.push("second-order condition fails".into());
    }
    r.summary.push("t_ne", cx.num(&ne.tariff));
    r.push_row(vec![
        cx.num(&ne.tariff),
        cx.num(&ne.welfare),
        cx.num(&cx.params.free_trade_welfare()),
        Cell::count(steps),
        Cell::Num(format!("{diff:.2e}")),
        cx.num(&curvature),
    ]);
    Ok(r)
}

pub fn regime<T: Scalar>(cx: &Context<T>, text: &str) -> Result<Report> {
    let n = cx.n();
    let regime = FtaRegime::parse(text, n)?;
    let mut r = cx.base_report(
        "regime",
        vec!["country", "outsiders", "tariff_faced", "W", "consumer_surplus", "producer_surplus", "tariff_revenue"],
    );
    r.summary.push("regime", Cell::text(regime.to_string()));
    let t = regime_tariffs(&cx.params, &regime)?;
    let w = regime_welfare(&cx.params, &regime)?;
    let structural = regime_welfare_structural(&cx.params, &regime)?;
    let idx = outsider_sets(&regime);
    let parts = w.components.clone().unwrap_or_default();
    for (c, structural_c) in structural.iter().enumerate() {
        if !cx.close(&w.welfare[c], structural_c) {
            r.violations.push(format!(
                "country {}: generic welfare {:?} differs from the outsider-count form {:?}",
                c + 1,
                w.welfare[c].as_f64(),
                structural[c].as_f64()
            ));
        }
        let faced = (0..n).find(|&k| k != c && !regime.shares_fta(k, c)).map(|k| t.get(k, c).clone());
        let part = parts.get(c);
        r.push_row(vec![
            Cell::count(c + 1),
            Cell::count(idx.count(c)),
            cx.opt(faced.as_ref()),
            cx.num(&w.welfare[c]),
            cx.opt(part.map(|p| &p.consumer_surplus)),
            cx.opt(part.map(|p| &p.producer_surplus)),
            cx.opt(part.map(|p| &p.tariff_revenue)),
        ]);
    }
    Ok(r)
}

pub fn cu<T: Scalar>(cx: &Context<T>, text: &str) -> Result<Report> {
    let n = cx.n();
    let cu = CuRegime::parse(text, n)?;
    let mut r = cx.base_report("cu", vec!["union", "size", "outsider", "tariff", "group_gradient"]);
    r.summary.push("partition", Cell::text(cu.to_string()));
    r.summary.push("nash_tariff", cx.num(&nash_closed_form(&cx.params).tariff));
    let t = cu_tariffs(&cx.params, &cu)?;
    for (l, members) in cu.unions().iter().enumerate() {
        let i = members[0];
        let label = render_bloc(members.iter().copied());
        for j in (0..n).filter(|&j| !cu.same_union(i, j)) {
            let g = cu_group_welfare_gradient(&cx.params, &cu, &t, i, j)?;
            let zero = if T::is_exact() { g == T::zero() } else { g.as_f64().abs() <= 1e-9 };
            if !zero {
                r.violations.push(format!("union {label}: gradient on {} is {:?}", j + 1, g.as_f64()));
            }
            r.push_row(vec![
                Cell::text(label.clone()),
                Cell::count(cu.size_of(l)),
                Cell::count(j + 1),
                cx.num(t.get(i, j)),
                cx.num(&g),
            ]);
        }
    }
    Ok(r)
}

pub fn stability<T: Scalar>(cx: &Context<T>, text: &str) -> Result<Report> {
    let regime = FtaRegime::parse(text, cx.n())?;
    let v = pairwise_stability(&cx.params, &regime)?;
    let mut r = cx.base_report(
        "stability",
        vec!["kind", "country", "partner", "welfare_before", "welfare_after", "partner_before", "partner_after"],
    );
    r.summary.push("regime", Cell::text(regime.to_string()));
    r.summary.push("links", Cell::count(v.links.len()));
    r.summary.push("pairwise_stable", Cell::Bool(v.is_pairwise_stable));
    for s in &v.severance_violations {
        let partner = if s.link.0 == s.country { s.link.1 } else { s.link.0 };
        r.push_row(vec![
            Cell::text("sever"),
            Cell::count(s.country + 1),
            Cell::count(partner + 1),
            cx.num(&s.before),
            cx.num(&s.after),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    for l in &v.link_violations {
        r.push_row(vec![
            Cell::text("link"),
            Cell::count(l.pair.0 + 1),
            Cell::count(l.pair.1 + 1),
            cx.num(&l.first.0),
            cx.num(&l.first.1),
            cx.num(&l.second.0),
            cx.num(&l.second.1),
        ]);
    }
    Ok(r)
}

pub fn figure<T: Scalar>(cx: &Context<T>) -> Result<Report> {
    let mut r = cx.base_report("figure", vec!["m", "W_p", "W_np", "argmax"]);
    let (m_star, tied) = optimal_size_with_tie(&cx.params);
    r.summary.push("m_star", Cell::count(m_star));
    r.summary.push("m_star_tied", Cell::Bool(tied));
    for m in 1..=cx.n() {
        let s = single_fta_welfare(&cx.params, m)?;
        r.push_row(vec![
            Cell::count(m),
            cx.num(&s.participant_welfare),
            cx.opt(s.outsider_welfare.as_ref()),
            Cell::Bool(m == m_star),
        ]);
    }
    Ok(r)
}
