//! The sequential FTA formation game.
//!
//! Countries move once each in a fixed order. A mover either stays out or
//! applies; the first applicant founds the agreement, and under the consent
//! rule later applicants are admitted only if every incumbent accepts. After
//! the last move, tariffs settle at the regime equilibrium.
//!
//! [`solve_closed_form`] plays the characterized equilibrium directly;
//! [`backward_induction`] enumerates the game tree and is its oracle.

use std::collections::HashMap;
use std::fmt;

use crate::economy::WelfareReport;
use crate::error::{ModelError, Result};
use crate::params::ModelParams;
use crate::regime::{self, FtaRegime};
use crate::numeric::Scalar;

/// Largest world the tree enumeration accepts.
pub const ENUMERATION_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessRule {
    /// Applicants need unanimous approval from incumbents.
    WithConsent,
    /// Any applicant joins.
    WithoutConsent,
}

impl fmt::Display for AccessRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessRule::WithConsent => "consent",
            AccessRule::WithoutConsent => "open",
        })
    }
}

/// A permutation of the countries: `order[s]` moves at stage `s + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MoveOrder(Vec<usize>);

impl MoveOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &c in &order {
            if c >= n || seen[c] {
                return Err(ModelError::InvalidParams(format!(
                    "move order {:?} is not a permutation of 1..={n}",
                    order.iter().map(|c| c + 1).collect::<Vec<_>>()
                )));
            }
            seen[c] = true;
        }
        Ok(MoveOrder(order))
    }

    pub fn identity(n: usize) -> Self {
        MoveOrder((0..n).collect())
    }

    pub fn reversed(n: usize) -> Self {
        MoveOrder((0..n).rev().collect())
    }

    /// `identity`, `reverse`, or a 1-based comma list such as `3,1,2`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        match text.trim() {
            "identity" => return Ok(Self::identity(n)),
            "reverse" => return Ok(Self::reversed(n)),
            _ => {}
        }
        let mut order = Vec::new();
        let mut pos = 0;
        for item in text.split(',') {
            let t = item.trim();
            let c: usize = t
                .parse()
                .map_err(|_| ModelError::parse(t, pos, "expected a country number"))?;
            if c == 0 || c > n {
                return Err(ModelError::parse(t, pos, format!("country outside 1..={n}")));
            }
            order.push(c - 1);
            pos += item.len() + 1;
        }
        if order.len() != n {
            return Err(ModelError::parse(
                text,
                0,
                format!("order lists {} countries, expected {n}", order.len()),
            ));
        }
        Self::new(order)
    }

    pub fn movers(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for MoveOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| (c + 1).to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vote {
    Accept,
    Reject,
}

/// What happened at one stage of play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    /// 1-based stage number.
    pub stage: usize,
    pub mover: usize,
    pub participates: bool,
    /// Incumbents' votes by country index; `None` when no vote was held.
    pub votes: Option<Vec<(usize, Vote)>>,
    /// Whether the mover ended the stage as a member.
    pub admitted: bool,
    /// Some voter was exactly indifferent between two outcomes with
    /// different final agreement sizes, so the accept-on-indifference rule
    /// decided the vote.
    pub vote_tie: bool,
}

impl Decision {
    /// Equality ignoring the tie annotation.
    pub fn same_play(&self, other: &Decision) -> bool {
        self.stage == other.stage
            && self.mover == other.mover
            && self.participates == other.participates
            && self.votes == other.votes
            && self.admitted == other.admitted
    }
}

/// Continuation value at a vote: `v(m, t)` against the incumbents' current
/// size value `W_p^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationValue<T> {
    pub incumbents: usize,
    pub stage: usize,
    pub value: T,
    pub current: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeOutcome<T> {
    pub rule: AccessRule,
    pub order: MoveOrder,
    pub final_regime: FtaRegime,
    /// Members in joining order.
    pub members: Vec<usize>,
    pub decisions: Vec<Decision>,
    pub welfare: WelfareReport<T>,
    /// Participant-optimal size; reported under the consent rule.
    pub optimal_size: Option<usize>,
    /// Whether the optimal size was an exact tie resolved to the largest.
    pub optimal_size_tied: bool,
    pub continuation_values: Vec<ContinuationValue<T>>,
}

impl<T: Scalar> SpeOutcome<T> {
    /// Same final regime and the same decision at every stage.
    pub fn same_play(&self, other: &SpeOutcome<T>) -> bool {
        self.final_regime == other.final_regime
            && self.decisions.len() == other.decisions.len()
            && self
                .decisions
                .iter()
                .zip(&other.decisions)
                .all(|(a, b)| a.same_play(b))
    }

    pub fn any_vote_tie(&self) -> bool {
        self.decisions.iter().any(|d| d.vote_tie)
    }

    /// Replays the decisions through the game rules and checks that they
    /// produce `final_regime`.
    pub fn is_consistent(&self) -> bool {
        let n = self.order.len();
        let mut members: Vec<usize> = Vec::new();
        for (d, &mover) in self.decisions.iter().zip(self.order.movers()) {
            if d.mover != mover {
                return false;
            }
            let admitted = if !d.participates {
                false
            } else if members.is_empty() || self.rule == AccessRule::WithoutConsent {
                d.votes.is_none()
            } else {
                match &d.votes {
                    Some(v) => {
                        v.len() == members.len() && v.iter().all(|(_, vote)| *vote == Vote::Accept)
                    }
                    None => return false,
                }
            };
            if admitted != d.admitted {
                return false;
            }
            if admitted {
                members.push(mover);
            }
        }
        members == self.members
            && FtaRegime::single(n, &members).is_ok_and(|r| r == self.final_regime)
    }
}

/// Size `m` in `2..=n` maximizing participant welfare `W_p^m`; exact ties go
/// to the largest size. The flag reports whether a tie occurred.
pub fn optimal_size_with_tie<T: Scalar>(params: &ModelParams<T>) -> (usize, bool) {
    let table = regime::participant_welfare_table(params);
    let mut best = 2;
    let mut tied = false;
    for m in 3..=params.n() {
        if table[m - 1] > table[best - 1] {
            best = m;
            tied = false;
        } else if table[m - 1] == table[best - 1] {
            best = m;
            tied = true;
        }
    }
    (best.min(params.n()), tied)
}

pub fn optimal_size<T: Scalar>(params: &ModelParams<T>) -> usize {
    optimal_size_with_tie(params).0
}

/// `v(m, t) = max { W_p^(m+1), .., W_p^(m+n-t+1) }`: the best size the `m`
/// incumbents can still reach if the stage-`t` applicant is admitted. The
/// upper index is capped at `n`.
pub fn continuation_value<T: Scalar>(params: &ModelParams<T>, m: usize, stage: usize) -> Result<T> {
    let n = params.n();
    if m == 0 || m >= n {
        return Err(ModelError::Range {
            what: "incumbents",
            value: m,
            min: 1,
            max: n - 1,
        });
    }
    if stage < m || stage > n {
        return Err(ModelError::Range {
            what: "stage",
            value: stage,
            min: m,
            max: n,
        });
    }
    let table = regime::participant_welfare_table(params);
    Ok(continuation_from_table(&table, n, m, stage))
}

fn continuation_from_table<T: Scalar>(table: &[T], n: usize, m: usize, stage: usize) -> T {
    let hi = (m + n - stage + 1).min(n);
    let mut best = table[m].clone();
    for size in m + 1..=hi {
        if table[size - 1] > best {
            best = table[size - 1].clone();
        }
    }
    best
}

fn check_order<T: Scalar>(params: &ModelParams<T>, order: &MoveOrder) -> Result<()> {
    if order.len() != params.n() {
        return Err(ModelError::InvalidParams(format!(
            "move order has {} countries but n = {}",
            order.len(),
            params.n()
        )));
    }
    Ok(())
}

/// The equilibrium path characterized in closed form. Under consent the
/// incumbents admit the stage-`t` applicant iff `v(m, t) >= W_p^m`, which
/// lets exactly the first `m*` movers in; without consent everyone joins.
pub fn solve_closed_form<T: Scalar>(
    params: &ModelParams<T>,
    rule: AccessRule,
    order: &MoveOrder,
) -> Result<SpeOutcome<T>> {
    check_order(params, order)?;
    let n = params.n();
    let table = regime::participant_welfare_table(params);
    let mut members: Vec<usize> = Vec::new();
    let mut decisions = Vec::with_capacity(n);
    let mut continuation_values = Vec::new();
    for (idx, &mover) in order.movers().iter().enumerate() {
        let stage = idx + 1;
        let mut decision = Decision {
            stage,
            mover,
            participates: true,
            votes: None,
            admitted: true,
            vote_tie: false,
        };
        if rule == AccessRule::WithConsent && !members.is_empty() {
            let m = members.len();
            let value = continuation_from_table(&table, n, m, stage);
            let current = table[m - 1].clone();
            let accept = value >= current;
            decision.vote_tie = value == current;
            let vote = if accept { Vote::Accept } else { Vote::Reject };
            let mut voters = members.clone();
            voters.sort_unstable();
            decision.votes = Some(voters.into_iter().map(|c| (c, vote)).collect());
            decision.admitted = accept;
            continuation_values.push(ContinuationValue {
                incumbents: m,
                stage,
                value,
                current,
            });
        }
        if decision.admitted {
            members.push(mover);
        }
        decisions.push(decision);
    }
    let (optimal_size, optimal_size_tied) = match rule {
        AccessRule::WithConsent => {
            let (m, tied) = optimal_size_with_tie(params);
            (Some(m), tied)
        }
        AccessRule::WithoutConsent => (None, false),
    };
    finish(params, rule, order, members, decisions, optimal_size, optimal_size_tied, continuation_values)
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Scalar>(
    params: &ModelParams<T>,
    rule: AccessRule,
    order: &MoveOrder,
    members: Vec<usize>,
    decisions: Vec<Decision>,
    optimal_size: Option<usize>,
    optimal_size_tied: bool,
    continuation_values: Vec<ContinuationValue<T>>,
) -> Result<SpeOutcome<T>> {
    let final_regime = FtaRegime::single(params.n(), &members)?;
    let welfare = regime::regime_welfare(params, &final_regime)?;
    Ok(SpeOutcome {
        rule,
        order: order.clone(),
        final_regime,
        members,
        decisions,
        welfare,
        optimal_size,
        optimal_size_tied,
        continuation_values,
    })
}

type Mask = u32;

/// Resulting outcome, incumbents' votes, admission and whether the vote tied.
type Application = (Mask, Option<Vec<(usize, Vote)>>, bool, bool);

/// Exhaustive game-tree solver. Payoffs come from the generic regime
/// welfare of every terminal membership set; votes are resolved by weak
/// dominance (accept iff the accept outcome is at least as good for the
/// voter) and indifferent movers participate.
struct TreeSolver<'a, T> {
    params: &'a ModelParams<T>,
    rule: AccessRule,
    movers: &'a [usize],
    /// Per agreement size: (member welfare, outsider welfare).
    payoffs: HashMap<usize, (T, T)>,
    outcomes: HashMap<(usize, Mask), Mask>,
}

/// Resolution of one decision node.
struct NodePlay {
    participates: bool,
    votes: Option<Vec<(usize, Vote)>>,
    admitted: bool,
    vote_tie: bool,
    outcome: Mask,
}

fn members_of(mask: Mask, n: usize) -> Vec<usize> {
    (0..n).filter(|&c| mask & (1 << c) != 0).collect()
}

impl<'a, T: Scalar> TreeSolver<'a, T> {
    fn new(params: &'a ModelParams<T>, rule: AccessRule, order: &'a MoveOrder) -> Self {
        TreeSolver {
            params,
            rule,
            movers: order.movers(),
            payoffs: HashMap::new(),
            outcomes: HashMap::new(),
        }
    }

    /// Welfare of `country` when `terminal` is the final membership. The
    /// engine is symmetric under relabeling, so the generic regime welfare is
    /// evaluated once per agreement size (members `0..k`) and mapped.
    fn payoff(&mut self, terminal: Mask, country: usize) -> Result<T> {
        let n = self.params.n();
        let size = terminal.count_ones() as usize;
        if !self.payoffs.contains_key(&size) {
            let w = regime::regime_welfare(self.params, &FtaRegime::first_m(n, size)?)?.welfare;
            let outsider = w[n - 1].clone();
            self.payoffs.insert(size, (w[0].clone(), outsider));
        }
        let (member, outsider) = &self.payoffs[&size];
        Ok(if size >= 2 && terminal & (1 << country) != 0 {
            member.clone()
        } else {
            outsider.clone()
        })
    }

    /// Terminal membership reached from `stage` (0-based) with `members`.
    fn outcome(&mut self, stage: usize, members: Mask) -> Result<Mask> {
        if stage == self.movers.len() {
            return Ok(members);
        }
        if let Some(&m) = self.outcomes.get(&(stage, members)) {
            return Ok(m);
        }
        let play = self.play(stage, members)?;
        self.outcomes.insert((stage, members), play.outcome);
        Ok(play.outcome)
    }

    /// Outcome if the stage's mover applies, with the vote that decides it.
    fn application(&mut self, stage: usize, members: Mask) -> Result<Application> {
        let mover = self.movers[stage];
        let joined = members | (1 << mover);
        if members == 0 || self.rule == AccessRule::WithoutConsent {
            return Ok((self.outcome(stage + 1, joined)?, None, true, false));
        }
        let accepted = self.outcome(stage + 1, joined)?;
        let rejected = self.outcome(stage + 1, members)?;
        let n = self.params.n();
        let mut votes = Vec::new();
        let mut tie = false;
        for voter in members_of(members, n) {
            let yes = self.payoff(accepted, voter)?;
            let no = self.payoff(rejected, voter)?;
            if yes == no && accepted.count_ones() != rejected.count_ones() {
                tie = true;
            }
            votes.push((voter, if yes >= no { Vote::Accept } else { Vote::Reject }));
        }
        let admitted = votes.iter().all(|(_, v)| *v == Vote::Accept);
        let outcome = if admitted { accepted } else { rejected };
        Ok((outcome, Some(votes), admitted, tie))
    }

    fn play(&mut self, stage: usize, members: Mask) -> Result<NodePlay> {
        let mover = self.movers[stage];
        let stay_out = self.outcome(stage + 1, members)?;
        let (applied, votes, admitted, vote_tie) = self.application(stage, members)?;
        let participates = self.payoff(applied, mover)? >= self.payoff(stay_out, mover)?;
        Ok(if participates {
            NodePlay {
                participates,
                votes,
                admitted,
                vote_tie,
                outcome: applied,
            }
        } else {
            NodePlay {
                participates,
                votes: None,
                admitted: false,
                vote_tie: false,
                outcome: stay_out,
            }
        })
    }
}

/// Solves the formation game by enumerating the whole game tree.
pub fn backward_induction<T: Scalar>(
    params: &ModelParams<T>,
    rule: AccessRule,
    order: &MoveOrder,
) -> Result<SpeOutcome<T>> {
    check_order(params, order)?;
    let n = params.n();
    if n > ENUMERATION_LIMIT {
        return Err(ModelError::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut solver = TreeSolver::new(params, rule, order);
    let table = regime::participant_welfare_table(params);
    let mut members: Mask = 0;
    let mut joined = Vec::new();
    let mut decisions = Vec::with_capacity(n);
    let mut continuation_values = Vec::new();
    for stage in 0..n {
        let play = solver.play(stage, members)?;
        let mover = order.movers()[stage];
        if play.votes.is_some() && rule == AccessRule::WithConsent {
            let m = members.count_ones() as usize;
            continuation_values.push(ContinuationValue {
                incumbents: m,
                stage: stage + 1,
                value: continuation_from_table(&table, n, m, stage + 1),
                current: table[m - 1].clone(),
            });
        }
        if play.participates && play.admitted {
            members |= 1 << mover;
            joined.push(mover);
        }
        decisions.push(Decision {
            stage: stage + 1,
            mover,
            participates: play.participates,
            votes: play.votes,
            admitted: play.participates && play.admitted,
            vote_tie: play.vote_tie,
        });
    }
    let (optimal_size, optimal_size_tied) = match rule {
        AccessRule::WithConsent => {
            let (m, tied) = optimal_size_with_tie(params);
            (Some(m), tied)
        }
        AccessRule::WithoutConsent => (None, false),
    };
    finish(params, rule, order, joined, decisions, optimal_size, optimal_size_tied, continuation_values)
}

/// A decision node where a single player could profit by changing only
/// their own action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub stage: usize,
    pub members: Vec<usize>,
    pub player: usize,
    pub description: String,
}

/// Checks every node of the game tree (on and off the equilibrium path)
/// for profitable one-shot deviations against the backward-induction play.
pub fn one_shot_deviations<T: Scalar>(
    params: &ModelParams<T>,
    rule: AccessRule,
    order: &MoveOrder,
) -> Result<Vec<Deviation>> {
    check_order(params, order)?;
    let n = params.n();
    if n > ENUMERATION_LIMIT {
        return Err(ModelError::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut solver = TreeSolver::new(params, rule, order);
    let mut found = Vec::new();
    let movers = order.movers().to_vec();
    for stage in 0..n {
        // Membership sets reachable at this stage: any subset of earlier movers.
        let earlier = &movers[..stage];
        for bits in 0u32..(1u32 << stage) {
            let members: Mask = earlier
                .iter()
                .enumerate()
                .filter(|(b, _)| bits & (1 << b) != 0)
                .fold(0, |acc, (_, &c)| acc | (1 << c));
            check_node(&mut solver, stage, members, &mut found)?;
        }
    }
    Ok(found)
}

fn check_node<T: Scalar>(
    solver: &mut TreeSolver<'_, T>,
    stage: usize,
    members: Mask,
    found: &mut Vec<Deviation>,
) -> Result<()> {
    let n = solver.params.n();
    let mover = solver.movers[stage];
    let play = solver.play(stage, members)?;
    let stay_out = solver.outcome(stage + 1, members)?;
    let (applied, votes, _, _) = solver.application(stage, members)?;
    let chosen = solver.payoff(play.outcome, mover)?;
    let flipped = if play.participates { stay_out } else { applied };
    if solver.payoff(flipped, mover)? > chosen {
        found.push(Deviation {
            stage: stage + 1,
            members: members_of(members, n),
            player: mover,
            description: "mover gains by flipping participation".into(),
        });
    }
    if let Some(votes) = votes {
        let accepted = solver.outcome(stage + 1, members | (1 << mover))?;
        let rejected = solver.outcome(stage + 1, members)?;
        for (idx, &(voter, vote)) in votes.iter().enumerate() {
            let others_accept = votes
                .iter()
                .enumerate()
                .all(|(k, (_, v))| k == idx || *v == Vote::Accept);
            if !others_accept {
                continue;
            }
            let (mine, alternative) = match vote {
                Vote::Accept => (accepted, rejected),
                Vote::Reject => (rejected, accepted),
            };
            if solver.payoff(alternative, voter)? > solver.payoff(mine, voter)? {
                found.push(Deviation {
                    stage: stage + 1,
                    members: members_of(members, n),
                    player: voter,
                    description: "pivotal voter gains by switching".into(),
                });
            }
        }
    }
    Ok(())
}
