//! `mixquiv`: build trace expressions and verify identities among invariants
//! of mixed quiver representations from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixquiv::field::MERSENNE_61;
use mixquiv::generators::DEFAULT_R_CAP;
use mixquiv::Flavor;

use commands::{Elements, Expect, RandomRun, Report, Res, Which};

#[derive(Parser, Debug)]
#[command(name = "mixquiv", version, about = "Invariants of mixed quiver representations")]
struct Cli {
    /// TOML file whose keys mirror long flags; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Also write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical cycles of the doubled quiver.
    Cycles {
        #[arg(long, default_value = "builtin:loops:1")]
        quiver: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        /// Only cycles through this vertex (`2` or `2*`).
        #[arg(long)]
        vertex: Option<String>,
    },
    /// The word `tr*(τ)` of a permutation in cycle notation.
    Trstar {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long)]
        perm: String,
        /// 1-based passive positions; selects the block algorithm.
        #[arg(long)]
        passive: Option<String>,
    },
    /// The expanded expression `σ_{r,s}` on the model quiver.
    SigmaRs {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = DEFAULT_R_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Emit::Expr)]
        emit: Emit,
    },
    /// Randomized checks on representation points.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Closed-form coefficient identities.
    Identities {
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Orthogonal and symplectic invariance suites.
    Ortho {
        /// `o` or `sp`; both when omitted and `d` is even.
        #[arg(long)]
        flavor: Option<Flavor>,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 4)]
        len: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower bound for the dimension of one graded component of the invariants.
    Span {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        multidegree: String,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long)]
        expect_rank: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Expr,
    Latex,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON file or `builtin:loops:<m>`, `builtin:model`, `builtin:ortho:<m>`.
    #[arg(long, default_value = "builtin:loops:1")]
    quiver: String,
    /// `1:2,2:2`, or one dimension for every vertex.
    #[arg(long)]
    dims: Option<String>,
    /// `q` or `fp:<prime>`.
    #[arg(long, default_value_t = format!("fp:{MERSENNE_61}"))]
    field: String,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Sampling {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Expect::Auto)]
    expect: Expect,
}

impl Sampling {
    fn run(&self) -> RandomRun<'_> {
        RandomRun {
            quiver: &self.common.quiver,
            dims: self.common.dims.as_deref(),
            field: &self.common.field,
            trials: self.trials,
            seed: self.common.seed,
            expect: self.expect,
        }
    }
}

#[derive(Args, Debug)]
struct PathArgs {
    /// Closed path element at the chosen vertex, e.g. `(a) + 2 (a a)`.
    #[arg(long)]
    f1: Option<String>,
    /// Path element from the vertex to its partner.
    #[arg(long)]
    f2: Option<String>,
    /// Path element from the partner back to the vertex.
    #[arg(long)]
    f3: Option<String>,
    #[arg(long)]
    vertex: Option<String>,
}

impl PathArgs {
    fn elements(&self) -> Elements<'_> {
        Elements { f1: self.f1.as_deref(), f2: self.f2.as_deref(), f3: self.f3.as_deref(), vertex: self.vertex.as_deref() }
    }
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// `σ_{r,s}(f1, f2, f3)` vanishes when `r` exceeds the dimension at the vertex.
    Relations {
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = DEFAULT_R_CAP)]
        cap: usize,
        #[command(flatten)]
        paths: PathArgs,
    },
    /// A suitable generator vanishes when its layout is sufficiently large.
    Suitable {
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        multidegree: String,
        /// Admissible permutation in 1-based cycle notation; the first one when omitted.
        #[arg(long)]
        sigma1: Option<String>,
        /// `full`, `singletons`, or per-cell run sizes such as `2,1;3`.
        #[arg(long, default_value = "full")]
        layout: String,
        #[arg(long, default_value_t = DEFAULT_R_CAP)]
        cap: usize,
    },
    /// Cycles, and optionally `σ_{r,s}`, are invariant under the group.
    Invariance {
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = DEFAULT_R_CAP)]
        cap: usize,
        #[command(flatten)]
        paths: PathArgs,
    },
}

fn dispatch(cmd: &Command) -> Res<Report> {
    match cmd {
        Command::Cycles { quiver, max_len, vertex } => commands::cycles(quiver, *max_len, vertex.as_deref()),
        Command::Trstar { r, s, perm, passive } => commands::trstar(*r, *s, perm, passive.as_deref()),
        Command::SigmaRs { r, s, cap, emit } => commands::sigma_rs_cmd(*r, *s, *cap, *emit == Emit::Latex),
        Command::Verify { what } => match what {
            Verify::Relations { sampling, r, s, cap, paths } => {
                commands::verify_relations(&sampling.run(), *r, *s, *cap, &paths.elements())
            }
            Verify::Suitable { sampling, multidegree, sigma1, layout, cap } => {
                commands::verify_suitable(&sampling.run(), multidegree, sigma1.as_deref(), layout, *cap)
            }
            Verify::Invariance { sampling, max_len, r, s, cap, paths } => {
                commands::verify_invariance_cmd(&sampling.run(), *max_len, r.map(|r| (r, *s)), *cap, &paths.elements())
            }
        },
        Command::Identities { which, big_n, n, r, trials, seed } => {
            commands::identities(*which, *big_n, *n, *r, *trials, *seed)
        }
        Command::Ortho { flavor, m, d, len, trials, seed } => commands::ortho(*flavor, *m, *d, *len, *trials, *seed),
        Command::Span { common, multidegree, samples, expect_rank } => {
            let run = RandomRun {
                quiver: &common.quiver,
                dims: common.dims.as_deref(),
                field: &common.field,
                trials: 0,
                seed: common.seed,
                expect: Expect::Auto,
            };
            commands::span(&run, multidegree, *samples, *expect_rank)
        }
    }
}

fn main() -> ExitCode {
    let argv = match config::inject(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let report = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let pretty = serde_json::to_string_pretty(&report.json).expect("json renders");
    match cli.format {
        Format::Text => println!("{}", report.text),
        Format::Json => println!("{pretty}"),
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{pretty}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
