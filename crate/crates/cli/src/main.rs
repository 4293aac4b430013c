//! `egfrec`: derive and verify recurrences for sequences with EGF
//! `g(x) * exp(h(x))`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use egfrec::egfmodel::{self, ExpRationalEGF};
use egfrec::holorec::{self, SequenceTerms};
use egfrec::oeisio::{
    default_cache_dir, serialize_bfile, BFileStore, DirTransport, FetchError, FetchPolicy,
    Fixtures, HttpTransport, NoNetwork, Transport,
};
use egfrec::oracles::{OracleError, Registry, Seeds, SequenceDescriptor};
use egfrec::verifyflow::{self, Source, VerifyError};
use egfrec::BigRat;

/// Set to any non-empty value to make every network request fail.
const NO_NETWORK_ENV: &str = "EGFREC_NO_NETWORK";

#[derive(Parser, Debug)]
#[command(
    name = "egfrec",
    version,
    about = "Exact recurrences from exponential generating functions"
)]
struct Cli {
    /// Use bundled or --fixtures-dir data only; never open a connection.
    #[arg(long, global = true)]
    offline: bool,
    /// Directory for downloaded b-files.
    #[arg(long, global = true, env = "EGFREC_CACHE_DIR", value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Read fixtures from DIR instead of the bundled snapshots.
    #[arg(long, global = true, value_name = "DIR")]
    fixtures_dir: Option<PathBuf>,
    /// Download b-files from a local mirror directory instead of oeis.org.
    #[arg(long, global = true, env = "EGFREC_MIRROR_DIR", value_name = "DIR")]
    mirror_dir: Option<PathBuf>,
    /// Extra sequence descriptors (TOML) added to the built-in registry.
    #[arg(long, global = true, value_name = "FILE")]
    registry: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive the ODE and recurrence from an EGF.
    Derive(EgfArgs),
    /// Verify a registered recurrence against oracles and b-file data.
    Check {
        #[arg(long)]
        seq: String,
        /// Last index to verify.
        #[arg(long, value_name = "N")]
        terms: i64,
        /// Comma-separated subset of oracle, series, bfile.
        #[arg(long, value_delimiter = ',', default_value = "oracle,series,bfile")]
        sources: Vec<String>,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print n! [x^n] F(x) for n < N as b-file lines.
    Series {
        #[command(flatten)]
        egf: EgfArgs,
        #[arg(long, value_name = "N")]
        n: usize,
    },
    /// Run a registered recurrence forward and print b-file lines.
    Run {
        #[arg(long)]
        seq: String,
        /// Last index to compute.
        #[arg(long, value_name = "N")]
        n: i64,
    },
    /// Download (or load) a b-file and report what was found.
    Fetch {
        #[arg(long)]
        seq: String,
        /// Bypass the cache.
        #[arg(long)]
        refresh: bool,
    },
}

#[derive(Args, Debug)]
struct EgfArgs {
    /// Registered OEIS id.
    #[arg(long, conflicts_with_all = ["g", "h"], required_unless_present_all = ["g", "h"])]
    seq: Option<String>,
    /// Prefactor g(x).
    #[arg(long, requires = "h", allow_hyphen_values = true)]
    g: Option<String>,
    /// Exponent h(x).
    #[arg(long, requires = "g", allow_hyphen_values = true)]
    h: Option<String>,
}

enum Failure {
    /// Checks ran and something failed.
    Verification(String),
    Usage(String),
    Environment(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Environment(_) => 3,
        }
    }
}

impl From<FetchError> for Failure {
    fn from(e: FetchError) -> Self {
        match e {
            FetchError::InvalidId(_) => Failure::Usage(e.to_string()),
            _ => Failure::Environment(e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Io { .. } => Failure::Environment(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Fetch(e) => e.into(),
            VerifyError::Registry(e) => e.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

struct Context {
    registry: Registry,
    store: BFileStore,
    offline: bool,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let mut registry = Registry::builtin();
        if let Some(path) = &cli.registry {
            registry.extend_from_file(path)?;
        }
        let network_disabled =
            cli.offline || std::env::var_os(NO_NETWORK_ENV).is_some_and(|v| !v.is_empty());
        let transport: Box<dyn Transport> = match (&cli.mirror_dir, network_disabled) {
            (_, true) => Box::new(NoNetwork),
            (Some(dir), false) => Box::new(DirTransport(dir.clone())),
            (None, false) => Box::new(HttpTransport),
        };
        let fixtures = cli
            .fixtures_dir
            .clone()
            .map_or(Fixtures::Bundled, Fixtures::Dir);
        let cache_dir = cli.cache_dir.clone().or_else(default_cache_dir);
        Ok(Context {
            registry,
            store: BFileStore::new(cache_dir, fixtures, transport),
            offline: cli.offline,
        })
    }

    fn policy(&self, refresh: bool) -> FetchPolicy {
        match (self.offline, refresh) {
            (true, _) => FetchPolicy::FixtureOnly,
            (false, true) => FetchPolicy::NetworkOnly,
            (false, false) => FetchPolicy::CacheFirst,
        }
    }

    fn descriptor(&self, id: &str) -> Result<&SequenceDescriptor, Failure> {
        Ok(self.registry.get(id)?)
    }

    fn egf(
        &self,
        args: &EgfArgs,
    ) -> Result<(ExpRationalEGF, Option<&SequenceDescriptor>), Failure> {
        match (&args.seq, &args.g, &args.h) {
            (Some(id), _, _) => {
                let desc = self.descriptor(id)?;
                let egf = desc
                    .egf
                    .clone()
                    .ok_or_else(|| Failure::Usage(format!("{id} has no registered EGF")))?;
                Ok((egf, Some(desc)))
            }
            (None, Some(g), Some(h)) => {
                let egf = ExpRationalEGF::parse(g, h).map_err(|e| Failure::Usage(e.to_string()))?;
                Ok((egf, None))
            }
            _ => Err(Failure::Usage("give --seq, or both --g and --h".into())),
        }
    }
}

fn derive(ctx: &Context, args: &EgfArgs) -> Result<(), Failure> {
    let (egf, desc) = ctx.egf(args)?;
    let ode = egfmodel::derive_ode(&egf);
    println!("EGF:        F(x) = {egf}");
    println!("ODE:        {ode}");
    let verdict =
        egfmodel::verify_ode(&egf, &ode).map_err(|e| Failure::Verification(e.to_string()))?;
    println!(
        "check:      {}",
        if verdict.is_pass() {
            "PASS".to_string()
        } else {
            verdict.to_string()
        }
    );
    let extracted =
        holorec::ode_to_recurrence(&ode).map_err(|e| Failure::Verification(e.to_string()))?;
    let rec = holorec::to_backward_form(&extracted);
    println!("extracted:  {extracted}");
    println!("recurrence: {rec}");
    let Some(desc) = desc else {
        return if verdict.is_pass() {
            Ok(())
        } else {
            Err(Failure::Verification("ODE check failed".into()))
        };
    };
    if desc.factored.iter().any(Option::is_some) {
        println!("factored:   {}", rec.render_with(&desc.factored));
    }
    match &desc.recurrence {
        Some(reg) if *reg == rec => println!("registered: MATCH"),
        Some(reg) => {
            println!("registered: MISMATCH ({reg})");
            return Err(Failure::Verification(format!(
                "derived recurrence differs from {}",
                desc.id
            )));
        }
        None => println!("registered: none"),
    }
    if verdict.is_pass() {
        Ok(())
    } else {
        Err(Failure::Verification("ODE check failed".into()))
    }
}

fn check(
    ctx: &Context,
    id: &str,
    last: i64,
    sources: &[String],
    json: bool,
) -> Result<(), Failure> {
    let mut set = BTreeSet::new();
    for name in sources {
        let s = Source::parse(name.trim()).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown source '{name}' (expected oracle, series, bfile)"
            ))
        })?;
        set.insert(s);
    }
    let report =
        verifyflow::run_verification(&ctx.registry, &ctx.store, ctx.policy(false), id, last, &set)?;
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{id}: verification FAILED")))
    }
}

fn series(ctx: &Context, args: &EgfArgs, len: usize) -> Result<(), Failure> {
    if len == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let (egf, _) = ctx.egf(args)?;
    let coeffs = egfmodel::series(&egf, len).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut fact = BigRat::one();
    let mut terms = Vec::with_capacity(len);
    for (n, c) in coeffs.iter().enumerate() {
        if n > 0 {
            fact = fact * BigRat::from_i64(n as i64);
        }
        let scaled = c * &fact;
        match scaled.to_integer() {
            Some(v) => terms.push(v),
            None => {
                print!("{}", serialize_bfile(&SequenceTerms::new(0, terms)));
                return Err(Failure::Verification(format!(
                    "n = {n}: n! * [x^n] F(x) = {scaled} is not an integer"
                )));
            }
        }
    }
    print!("{}", serialize_bfile(&SequenceTerms::new(0, terms)));
    Ok(())
}

fn run(ctx: &Context, id: &str, last: i64) -> Result<(), Failure> {
    let desc = ctx.descriptor(id)?;
    let rec = desc
        .recurrence
        .as_ref()
        .ok_or_else(|| Failure::Usage(format!("{id} has no registered recurrence")))?;
    let seeds = match &desc.seeds {
        Seeds::Given(s) => s.clone(),
        Seeds::FromBFile => ctx.store.fetch(id, ctx.policy(false))?.entries,
    };
    let terms = holorec::run_recurrence(rec, &seeds, last).map_err(|e| match e {
        holorec::RecurrenceError::SingularLeading { .. }
        | holorec::RecurrenceError::NonIntegral { .. } => Failure::Verification(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    print!("{}", serialize_bfile(&terms));
    Ok(())
}

fn fetch(ctx: &Context, id: &str, refresh: bool) -> Result<(), Failure> {
    let b = ctx.store.fetch(id, ctx.policy(refresh))?;
    let last = b.entries.last_index().unwrap_or(b.entries.offset() - 1);
    println!(
        "{}: {} terms, offset {}, n = {}..={} (source: {})",
        b.sequence_id,
        b.entries.len(),
        b.entries.offset(),
        b.entries.offset(),
        last,
        b.source
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Context::new(&cli).and_then(|ctx| match &cli.command {
        Command::Derive(args) => derive(&ctx, args),
        Command::Check {
            seq,
            terms,
            sources,
            json,
        } => check(&ctx, seq, *terms, sources, *json),
        Command::Series { egf, n } => series(&ctx, egf, *n),
        Command::Run { seq, n } => run(&ctx, seq, *n),
        Command::Fetch { seq, refresh } => fetch(&ctx, seq, *refresh),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Verification(m) | Failure::Usage(m) | Failure::Environment(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
