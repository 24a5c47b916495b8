use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "mstat", version, about = "Exact M-stationarity checks for problems with implicit variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One stationarity notion or qualification condition at a point.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// implicit, fuzzy, explicit or a qualification name such as mr-cq.
        #[arg(long)]
        kind: String,
    },
    /// All checks and the implications between them.
    Pipeline {
        #[command(flatten)]
        common: Common,
    },
    /// Tangent, regular normal and limiting normal cones of a set.
    Cones {
        #[command(flatten)]
        common: Common,
        /// For instance files: m, gph-f, gph-g, gph-h, gph-k or dom-k.
        #[arg(long)]
        map: Option<String>,
        /// Sample regular normals at nearby points and check them against
        /// the limiting cone.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Coderivative of a mapping at a graph point.
    Coderiv {
        #[command(flatten)]
        common: Common,
        /// f, g, h, k, k-hat, cal-h, cal-h-m, hat-h or aux; for a file
        /// holding a bare mapping this may be omitted.
        #[arg(long)]
        map: Option<String>,
        /// Output point; zero by default.
        #[arg(long, allow_hyphen_values = true)]
        value: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
    },
    /// Grid oracle relating minimizers with implicit and explicit variables.
    Relate {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value = "1/100")]
        grid_step: String,
        /// `lo..hi` for every coordinate, or one range per coordinate
        /// separated by commas (z first, then λ).
        #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
        r#box: String,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long)]
        json: bool,
    },
    /// Closed forms against engine output for the structured problem classes.
    Crosscheck {
        #[arg(long)]
        problem: String,
        /// Omit to sweep all feasible points of {−1,0,1}ⁿ (cardinality problems).
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, default_value = "1/4")]
        grid_step: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub problem: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    #[arg(long)]
    pub json: bool,
}
