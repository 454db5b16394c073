use clap::{Args, Parser, Subcommand, ValueEnum};

/// Competing-importers trade model: FTA regimes, tariff games and the
/// sequential formation game.
#[derive(Debug, Parser)]
#[command(name = "tradebloc", version)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Number of countries.
    #[arg(long, global = true, default_value_t = 8)]
    pub n: usize,
    /// Demand intercept (integer, decimal or p/q).
    #[arg(long, global = true, default_value = "12")]
    pub a: String,
    /// Degree of comparative advantage (integer, decimal or p/q).
    #[arg(long, global = true, default_value = "36")]
    pub lambda: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant figures in printed numbers.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(3..=40))]
    pub sigfigs: u8,
    /// Exact rational arithmetic instead of 64-bit floats.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Permit n = 2 (the formation-game results assume n >= 3).
    #[arg(long, global = true)]
    pub allow_two_countries: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Consent,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    /// Closed-form characterization.
    ClosedForm,
    /// Exhaustive game-tree backward induction.
    Tree,
    /// Both, checked against each other.
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tariffs, imports and welfare for a single FTA of every size.
    Sweep,
    /// A first FTA of fixed size next to a growing second FTA.
    TwoFta {
        /// Size of the first FTA.
        #[arg(long, default_value_t = 5)]
        first: usize,
    },
    /// Subgame-perfect outcome of the sequential formation game.
    Spe {
        #[arg(long, value_enum, default_value_t = Rule::Consent)]
        rule: Rule,
        /// `identity`, `reverse` or a comma list such as `3,1,2`.
        #[arg(long, default_value = "identity")]
        order: String,
        /// Defaults to `both` when the tree is small enough, else `closed-form`.
        #[arg(long, value_enum)]
        solver: Option<Solver>,
    },
    /// Nash equilibrium of the tariff game.
    Nash,
    /// Tariffs and welfare under an FTA regime such as `1-5|6|7|8`.
    Regime {
        #[arg(long)]
        regime: String,
    },
    /// Customs-union tariffs for a disjoint partition such as `1-5|6-8`.
    Cu {
        #[arg(long)]
        partition: String,
    },
    /// Pairwise stability of the link network of a regime.
    Stability {
        #[arg(long)]
        regime: String,
    },
    /// Participant / non-participant welfare series by FTA size.
    Figure,
}
