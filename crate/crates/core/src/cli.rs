//! The `negbio` command line.
//!
//! Exit codes: 0 accept / success, 1 reject, 2 usage, format or parameter
//! error, 3 chain budget refusal, 4 unknown identity claim.
//!
//! If `NEGBIO_CONFIG` names a `key=value` file, its `n`, `L`, `w`, `m`,
//! `seed`, `variant`, `budget` and `format` entries are used when the
//! matching flag is absent. Flags that disagree with a database's sidecar
//! are an error.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bio::{
    decide_with_blacklist, expansion_factor, log2_big, oracle_authorize, predicted_rates, revoke,
    size_bound, AuthNdb, BioNdb, BioNdbParams, BuildOptions, Decision, Sidecar, Variant,
    DEFAULT_CHAIN_BUDGET,
};
use crate::bits::BinaryTemplate;
use crate::error::Error;
use crate::kv::KeyValues;
use crate::lsh::{collision_prob, index_bits, parse_family, write_family, LshFamily};
use crate::ndb::{parse_ndb, write_ndb, write_tagged_ndb, NdbDocument, NegativeDatabase};
use crate::rng::derive_seed;
use crate::synth::{parse_templates, write_templates, DatasetSpec};

pub const CONFIG_ENV: &str = "NEGBIO_CONFIG";

const CONFIG_KEYS: [&str; 8] = ["n", "L", "w", "m", "seed", "variant", "budget", "format"];
const MORPH_DOMAIN: u64 = 0x4d4f_5250;

#[derive(Parser, Debug)]
#[command(
    name = "negbio",
    version,
    about = "Negative databases for binary biometric templates"
)]
struct Cli {
    /// Output style; `machine` prints one plain line per result.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Human,
    Machine,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Deterministic,
    Randomized,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Deterministic => Variant::Deterministic,
            VariantArg::Randomized => Variant::Randomized,
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
struct FamilyArgs {
    /// Number of hash functions.
    #[arg(long = "L")]
    l_count: Option<usize>,
    /// Bits sampled per hash function.
    #[arg(long)]
    w: Option<usize>,
    /// Chain order: functions that must agree.
    #[arg(long)]
    m: Option<usize>,
    /// Seed of the hash family.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// TPL file holding the capture(s) to check.
    #[arg(long)]
    query: PathBuf,
    /// Check only the template at this 0-based position.
    #[arg(long)]
    index: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate synthetic templates (references, genuine captures or impostors).
    Gen {
        #[arg(long)]
        n: Option<usize>,
        /// Number of templates.
        #[arg(long = "N")]
        population: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Per-bit flip probability of genuine captures.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Write noisy captures of every template in this TPL file.
        #[arg(long, conflicts_with = "impostors")]
        genuine_of: Option<PathBuf>,
        /// Write uniform impostor templates.
        #[arg(long)]
        impostors: bool,
        /// First draw index for genuine or impostor streams.
        #[arg(long, default_value_t = 0)]
        draw: u64,
        #[arg(long)]
        out: PathBuf,
        /// Manifest path; defaults to `<out>.manifest`.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Build a negative database from enrolled templates.
    Build {
        #[arg(long)]
        templates: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Per-user tagged database for authentication and identification.
        #[arg(long)]
        auth: bool,
        #[arg(long)]
        out: PathBuf,
        /// Sidecar path; defaults to `<out>.params`.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Largest number of hash chains to materialize.
        #[arg(long)]
        budget: Option<u64>,
        /// Seed of the randomized construction; defaults to the family seed.
        #[arg(long)]
        build_seed: Option<u64>,
        /// Random wildcard splits of the randomized construction.
        #[arg(long)]
        splits: Option<usize>,
        /// Also write the hash family as an LSH file.
        #[arg(long)]
        family_out: Option<PathBuf>,
    },
    /// Enroll more templates into an existing database.
    Enroll {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        templates: PathBuf,
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        build_seed: Option<u64>,
    },
    /// Add captures to a blacklist database, creating it from `--main` if needed.
    Revoke {
        #[arg(long)]
        blacklist: PathBuf,
        #[arg(long)]
        templates: PathBuf,
        /// Database whose parameters a new blacklist inherits.
        #[arg(long)]
        main: Option<PathBuf>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Remove subsumed entries.
    Cleanup {
        #[arg(long)]
        db: PathBuf,
    },
    /// Randomly rewrite entries without changing what they represent.
    Morph {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Authorization check against an untagged database.
    Check {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        /// Reject captures the blacklist accepts.
        #[arg(long)]
        blacklist: Option<PathBuf>,
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Authentication check of one claimed user.
    Auth {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        /// 0-based user index.
        #[arg(long)]
        claim: u64,
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// List every user whose database accepts the capture.
    Identify {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Error rates and size bounds from the closed-form model.
    Predict {
        /// The 2048-bit iris setting: L=128, w=10, m=4, then m=3 with N=100.
        #[arg(long, conflicts_with_all = ["n", "l_count", "w", "m", "population", "lambda_min", "lambda_max"])]
        paper_example: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "L")]
        l_count: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "N")]
        population: Option<u64>,
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
    },
    /// Direct m-of-L rule on plain templates, for differential testing.
    Oracle {
        #[arg(long)]
        templates: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        /// Take the family from this sidecar.
        #[arg(long, conflicts_with = "lsh")]
        params: Option<PathBuf>,
        /// Take the family from this LSH file (needs --m).
        #[arg(long)]
        lsh: Option<PathBuf>,
        #[command(flatten)]
        family: FamilyArgs,
    },
}

/// A failed command: exit code and message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Budget { .. } => 3,
            Error::UnknownClaim(_) => 4,
            _ => 2,
        };
        let mut message = e.to_string();
        if code == 3 {
            message.push_str("; use `negbio predict` for sizes and rates at this scale");
        }
        Failure { code, message }
    }
}

fn fail(message: impl Display) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: crate::Result<T>) -> CliResult<T> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        if f.code == 2 {
            f.message = format!("{}: {}", path.display(), f.message);
        }
        f
    })
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn sidecar_path(db: &Path, explicit: Option<&PathBuf>) -> PathBuf {
    explicit
        .cloned()
        .unwrap_or_else(|| with_suffix(db, ".params"))
}

struct Ctx<'a> {
    config: KeyValues,
    format: Format,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => Ok(self.config.get(key)?),
        }
    }

    fn need<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, name: &str) -> CliResult<T> {
        self.pick(flag, key)?
            .ok_or_else(|| fail(format!("missing required flag --{name}")))
    }

    fn budget(&self, flag: Option<u64>) -> CliResult<u64> {
        Ok(self.pick(flag, "budget")?.unwrap_or(DEFAULT_CHAIN_BUDGET))
    }

    fn line(&mut self, text: impl Display) -> CliResult<()> {
        writeln!(self.out, "{text}").map_err(|e| fail(format!("writing output: {e}")))
    }

    fn machine(&self) -> bool {
        self.format == Format::Machine
    }

    fn family_params(&self, family: &FamilyArgs, n: usize) -> CliResult<BioNdbParams> {
        let l_count = self.need(family.l_count, "L", "L")?;
        let w = self.need(family.w, "w", "w")?;
        let m = self.need(family.m, "m", "m")?;
        let seed = self.pick(family.seed, "seed")?.unwrap_or(0);
        Ok(BioNdbParams::new(LshFamily::new(n, l_count, w, seed)?, m)?)
    }
}

/// Fails when an explicit flag disagrees with the sidecar.
fn check_flags(family: &FamilyArgs, sidecar: &Sidecar, path: &Path) -> CliResult<()> {
    let pairs = [
        (
            "L",
            family.l_count.map(|v| v as u64),
            sidecar.l_count as u64,
        ),
        ("w", family.w.map(|v| v as u64), sidecar.w as u64),
        ("m", family.m.map(|v| v as u64), sidecar.m as u64),
        ("seed", family.seed, sidecar.seed),
    ];
    for (key, flag, stored) in pairs {
        if let Some(v) = flag {
            if v != stored {
                return Err(Failure::from(Error::Config(format!(
                    "--{key} {v} conflicts with {key}={stored} in {}",
                    path.display()
                ))));
            }
        }
    }
    Ok(())
}

struct Loaded {
    sidecar: Sidecar,
    params: BioNdbParams,
    doc: NdbDocument,
}

fn load_db(db: &Path, params: Option<&PathBuf>, family: &FamilyArgs) -> CliResult<Loaded> {
    let side_path = sidecar_path(db, params);
    let sidecar = in_file(&side_path, Sidecar::parse(&read(&side_path)?))?;
    check_flags(family, &sidecar, &side_path)?;
    let bio_params = in_file(&side_path, sidecar.params())?;
    let doc = in_file(db, parse_ndb(&read(db)?))?;
    if doc.record_length() != bio_params.chain_length() {
        return Err(fail(format!(
            "{}: record length {} does not match chain length {} from {}",
            db.display(),
            doc.record_length(),
            bio_params.chain_length(),
            side_path.display()
        )));
    }
    Ok(Loaded {
        sidecar,
        params: bio_params,
        doc,
    })
}

impl Loaded {
    fn authorization(self, db: &Path) -> CliResult<BioNdb> {
        match self.doc {
            NdbDocument::Untagged(ndb) => Ok(BioNdb::from_parts(
                self.params,
                ndb,
                self.sidecar.enrolled_count,
                self.sidecar.variant,
            )?),
            NdbDocument::Tagged { .. } => Err(fail(format!(
                "{} is a tagged authentication database; use `auth` or `identify`",
                db.display()
            ))),
        }
    }

    fn authentication(self, db: &Path) -> CliResult<AuthNdb> {
        match self.doc {
            NdbDocument::Tagged { users, .. } => Ok(AuthNdb::from_parts(self.params, users)?),
            NdbDocument::Untagged(_) => Err(fail(format!(
                "{} is an untagged authorization database; use `check`",
                db.display()
            ))),
        }
    }
}

fn load_templates(path: &Path) -> CliResult<(usize, Vec<BinaryTemplate>)> {
    in_file(path, parse_templates(&read(path)?))
}

fn load_queries(q: &QueryArgs, n: usize) -> CliResult<Vec<BinaryTemplate>> {
    let (qn, queries) = load_templates(&q.query)?;
    if qn != n {
        return Err(Failure::from(Error::Dimension {
            expected: n,
            found: qn,
        }));
    }
    match q.index {
        Some(i) => queries
            .get(i)
            .cloned()
            .map(|b| vec![b])
            .ok_or_else(|| fail(format!("{}: no template at index {i}", q.query.display()))),
        None if queries.is_empty() => Err(fail(format!("{}: no templates", q.query.display()))),
        None => Ok(queries),
    }
}

fn write_bio(path: &Path, side_path: &Path, db: &BioNdb) -> CliResult<()> {
    write(path, &write_ndb(db.ndb()))?;
    write(side_path, &db.sidecar().to_text())
}

fn write_auth(path: &Path, side_path: &Path, db: &AuthNdb) -> CliResult<()> {
    let text = write_tagged_ndb(
        db.params().chain_length(),
        db.users().iter().map(|(k, v)| (*k, v)),
    );
    write(path, &text)?;
    write(side_path, &db.sidecar().to_text())
}

fn report_decisions(ctx: &mut Ctx<'_>, decisions: &[Decision], total: u128) -> CliResult<i32> {
    for d in decisions {
        if ctx.machine() {
            ctx.line(d)?;
        } else {
            ctx.line(format!(
                "{d}  ({} of {total} combinations tested)",
                d.combinations_tested
            ))?;
        }
    }
    Ok(if decisions.iter().all(Decision::is_accept) {
        0
    } else {
        1
    })
}

pub fn run<I, T>(args: I, config: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli, config, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: Cli, config: Option<&Path>, out: &mut dyn Write) -> CliResult<i32> {
    let config = match config {
        Some(path) => {
            let kv = in_file(path, KeyValues::parse(&read(path)?))?;
            in_file(path, kv.only(&CONFIG_KEYS))?;
            kv
        }
        None => KeyValues::new(),
    };
    let format = match cli.format {
        Some(f) => f,
        None => match config.raw("format") {
            None | Some("human") => Format::Human,
            Some("machine") => Format::Machine,
            Some(other) => return Err(fail(format!("unknown format {other:?} in config"))),
        },
    };
    let mut ctx = Ctx {
        config,
        format,
        out,
    };
    match cli.command {
        Command::Gen {
            n,
            population,
            seed,
            lambda_min,
            lambda_max,
            epsilon,
            genuine_of,
            impostors,
            draw,
            out,
            manifest,
        } => {
            let seed = ctx.pick(seed, "seed")?.unwrap_or(0);
            let source = genuine_of.as_deref().map(load_templates).transpose()?;
            let n = match (&source, ctx.pick(n, "n")?) {
                (Some((sn, _)), Some(n)) if *sn != n => {
                    return Err(Failure::from(Error::Dimension {
                        expected: n,
                        found: *sn,
                    }))
                }
                (Some((sn, _)), _) => *sn,
                (None, Some(n)) => n,
                (None, None) => return Err(fail("missing required flag --n")),
            };
            let population = match (&source, population) {
                (Some((_, ts)), None) => ts.len(),
                (_, Some(p)) => p,
                (None, None) => return Err(fail("missing required flag --N")),
            };
            let lmin = lambda_min.unwrap_or(0.25 * n as f64);
            let lmax = lambda_max.unwrap_or(0.35 * n as f64);
            let spec = match epsilon {
                Some(e) => DatasetSpec::with_epsilon(n, population, lmin, lmax, e, seed)?,
                None => DatasetSpec::new(n, population, lmin, lmax, seed)?,
            };
            let templates = match &source {
                Some((_, refs)) => refs
                    .iter()
                    .enumerate()
                    .map(|(k, b)| spec.genuine(b, draw + k as u64))
                    .collect::<crate::Result<Vec<_>>>()?,
                None if impostors => (0..population as u64)
                    .map(|k| spec.impostor(draw + k))
                    .collect(),
                None => spec.references(),
            };
            write(&out, &write_templates(n, &templates)?)?;
            let manifest = manifest.unwrap_or_else(|| with_suffix(&out, ".manifest"));
            write(&manifest, &spec.manifest())?;
            if ctx.machine() {
                ctx.line(format!("templates={}", templates.len()))?;
            } else {
                ctx.line(format!(
                    "wrote {} templates of {n} bits to {}",
                    templates.len(),
                    out.display()
                ))?;
            }
            Ok(0)
        }

        Command::Build {
            templates,
            family,
            variant,
            auth,
            out,
            params,
            budget,
            build_seed,
            splits,
            family_out,
        } => {
            let (n, refs) = load_templates(&templates)?;
            let bio_params = ctx.family_params(&family, n)?;
            let variant: Variant = match variant {
                Some(v) => v.into(),
                None => ctx.pick(None, "variant")?.unwrap_or(if auth {
                    Variant::Randomized
                } else {
                    Variant::Deterministic
                }),
            };
            if auth && variant == Variant::Deterministic {
                return Err(fail(
                    "authentication databases use the randomized construction",
                ));
            }
            let options = BuildOptions {
                chain_budget: ctx.budget(budget)?,
                seed: build_seed.unwrap_or(bio_params.family().seed()),
                split_budget: splits,
            };
            if let Some(path) = &family_out {
                write(path, &write_family(bio_params.family()))?;
            }
            let side_path = sidecar_path(&out, params.as_ref());
            let (entries, kind) = if auth {
                let db = AuthNdb::build(bio_params, &refs, &options)?;
                write_auth(&out, &side_path, &db)?;
                (
                    db.users()
                        .values()
                        .map(NegativeDatabase::len)
                        .sum::<usize>(),
                    "authentication",
                )
            } else {
                let db = BioNdb::build(bio_params, &refs, variant, &options)?;
                write_bio(&out, &side_path, &db)?;
                (db.ndb().len(), "authorization")
            };
            if ctx.machine() {
                ctx.line(format!("entries={entries}"))?;
            } else {
                ctx.line(format!(
                    "built {kind} database: {} templates, {entries} entries, written to {}",
                    refs.len(),
                    out.display()
                ))?;
            }
            Ok(0)
        }

        Command::Enroll {
            db,
            templates,
            params,
            family,
            budget,
            build_seed,
        } => {
            let loaded = load_db(&db, params.as_ref(), &family)?;
            let side_path = sidecar_path(&db, params.as_ref());
            let (n, refs) = load_templates(&templates)?;
            if n != loaded.params.family().n() {
                return Err(Failure::from(Error::Dimension {
                    expected: loaded.params.family().n(),
                    found: n,
                }));
            }
            let chain_budget = ctx.budget(budget)?;
            if matches!(loaded.doc, NdbDocument::Tagged { .. }) {
                let seed = build_seed.unwrap_or(loaded.sidecar.seed);
                let mut auth_db = loaded.authentication(&db)?;
                let options = BuildOptions {
                    chain_budget,
                    seed,
                    split_budget: None,
                };
                let mut users = Vec::new();
                for b in &refs {
                    users.push(auth_db.enroll(b, &options)?);
                }
                write_auth(&db, &side_path, &auth_db)?;
                for u in users {
                    if ctx.machine() {
                        ctx.line(format!("USER {u}"))?;
                    } else {
                        ctx.line(format!("enrolled as user {u}"))?;
                    }
                }
            } else {
                let mut bio = loaded.authorization(&db)?;
                for b in &refs {
                    bio.enroll(b, chain_budget)?;
                }
                write_bio(&db, &side_path, &bio)?;
                if ctx.machine() {
                    ctx.line(format!("enrolled={}", bio.enrolled_count()))?;
                } else {
                    ctx.line(format!(
                        "enrolled {} templates, {} in total",
                        refs.len(),
                        bio.enrolled_count()
                    ))?;
                }
            }
            Ok(0)
        }

        Command::Revoke {
            blacklist,
            templates,
            main,
            budget,
        } => {
            let side_path = sidecar_path(&blacklist, None);
            let mut black = if blacklist.exists() {
                load_db(&blacklist, None, &FamilyArgs::default())?.authorization(&blacklist)?
            } else {
                let main = main.ok_or_else(|| {
                    fail(format!(
                        "{} does not exist; pass --main to create it",
                        blacklist.display()
                    ))
                })?;
                let main_side = sidecar_path(&main, None);
                let sidecar = in_file(&main_side, Sidecar::parse(&read(&main_side)?))?;
                BioNdb::empty(in_file(&main_side, sidecar.params())?, sidecar.variant)?
            };
            let (n, refs) = load_templates(&templates)?;
            if n != black.params().family().n() {
                return Err(Failure::from(Error::Dimension {
                    expected: black.params().family().n(),
                    found: n,
                }));
            }
            let chain_budget = ctx.budget(budget)?;
            for b in &refs {
                revoke(&mut black, b, chain_budget)?;
            }
            write_bio(&blacklist, &side_path, &black)?;
            if ctx.machine() {
                ctx.line(format!("revoked={}", black.enrolled_count()))?;
            } else {
                ctx.line(format!(
                    "{} captures blacklisted in {}",
                    black.enrolled_count(),
                    blacklist.display()
                ))?;
            }
            Ok(0)
        }

        Command::Cleanup { db } => {
            let mut doc = in_file(&db, parse_ndb(&read(&db)?))?;
            let (before, after) = match &mut doc {
                NdbDocument::Untagged(ndb) => {
                    let before = ndb.len();
                    (before, ndb.cleanup().entry_count)
                }
                NdbDocument::Tagged { users, .. } => {
                    let before = users.values().map(NegativeDatabase::len).sum();
                    (
                        before,
                        users.values_mut().map(|u| u.cleanup().entry_count).sum(),
                    )
                }
            };
            write(&db, &doc.to_text())?;
            if ctx.machine() {
                ctx.line(format!("entries={after}"))?;
            } else {
                ctx.line(format!("cleanup: {before} -> {after} entries"))?;
            }
            Ok(0)
        }

        Command::Morph { db, rounds, seed } => {
            let mut doc = in_file(&db, parse_ndb(&read(&db)?))?;
            let applied = match &mut doc {
                NdbDocument::Untagged(ndb) => ndb.morph(seed, rounds),
                NdbDocument::Tagged { users, .. } => users
                    .iter_mut()
                    .map(|(k, u)| u.morph(derive_seed(seed, MORPH_DOMAIN, *k), rounds))
                    .sum(),
            };
            write(&db, &doc.to_text())?;
            if ctx.machine() {
                ctx.line(format!("rounds={applied}"))?;
            } else {
                ctx.line(format!("morph: {applied} rewrites applied"))?;
            }
            Ok(0)
        }

        Command::Check {
            db,
            query,
            blacklist,
            params,
            family,
        } => {
            let main = load_db(&db, params.as_ref(), &family)?.authorization(&db)?;
            let black = match &blacklist {
                Some(path) => {
                    Some(load_db(path, None, &FamilyArgs::default())?.authorization(path)?)
                }
                None => None,
            };
            let queries = load_queries(&query, main.params().family().n())?;
            let mut decisions = Vec::with_capacity(queries.len());
            for q in &queries {
                decisions.push(match &black {
                    Some(bl) => decide_with_blacklist(&main, bl, q)?,
                    None => main.authorize(q)?,
                });
            }
            let total = main.params().chains_per_template();
            report_decisions(&mut ctx, &decisions, total)
        }

        Command::Auth {
            db,
            query,
            claim,
            params,
            family,
        } => {
            let auth_db = load_db(&db, params.as_ref(), &family)?.authentication(&db)?;
            let queries = load_queries(&query, auth_db.params().family().n())?;
            let decisions = queries
                .iter()
                .map(|q| auth_db.authenticate(q, claim))
                .collect::<crate::Result<Vec<_>>>()?;
            let total = auth_db.params().chains_per_template();
            report_decisions(&mut ctx, &decisions, total)
        }

        Command::Identify {
            db,
            query,
            params,
            family,
        } => {
            let auth_db = load_db(&db, params.as_ref(), &family)?.authentication(&db)?;
            let queries = load_queries(&query, auth_db.params().family().n())?;
            let mut all_found = true;
            for q in &queries {
                let users = auth_db.identify(q)?;
                all_found &= !users.is_empty();
                let list: Vec<String> = users.iter().map(ToString::to_string).collect();
                if ctx.machine() {
                    ctx.line(if list.is_empty() {
                        "NONE".to_string()
                    } else {
                        format!("IDENTIFIED {}", list.join(","))
                    })?;
                } else if list.is_empty() {
                    ctx.line("no matching user")?;
                } else {
                    ctx.line(format!("candidate users: {}", list.join(", ")))?;
                }
            }
            Ok(if all_found { 0 } else { 1 })
        }

        Command::Predict {
            paper_example,
            n,
            l_count,
            w,
            m,
            population,
            lambda_min,
            lambda_max,
        } => {
            let settings = if paper_example {
                vec![
                    Prediction::iris(4, 1),
                    Prediction::iris(4, 100),
                    Prediction::iris(3, 100),
                ]
            } else {
                let n = ctx.pick(n, "n")?.unwrap_or(2048);
                vec![Prediction {
                    n,
                    l_count: ctx.pick(l_count, "L")?.unwrap_or(128),
                    w: ctx.pick(w, "w")?.unwrap_or(10),
                    m: ctx.pick(m, "m")?.unwrap_or(4),
                    population: population.unwrap_or(1),
                    lambda_min: lambda_min.unwrap_or(0.25 * n as f64),
                    lambda_max: lambda_max.unwrap_or(0.35 * n as f64),
                }]
            };
            for (i, s) in settings.iter().enumerate() {
                if i > 0 {
                    ctx.line("")?;
                }
                let machine = ctx.machine();
                for (key, value) in s.report()? {
                    if machine {
                        ctx.line(format!("{key}={value}"))?;
                    } else {
                        ctx.line(format!("{key:<34}{value}"))?;
                    }
                }
            }
            Ok(0)
        }

        Command::Oracle {
            templates,
            query,
            params,
            lsh,
            family,
        } => {
            let (n, refs) = load_templates(&templates)?;
            let bio_params = match (&params, &lsh) {
                (Some(path), _) => {
                    let sidecar = in_file(path, Sidecar::parse(&read(path)?))?;
                    check_flags(&family, &sidecar, path)?;
                    in_file(path, sidecar.params())?
                }
                (None, Some(path)) => {
                    let f = in_file(path, parse_family(&read(path)?))?;
                    let m = ctx.need(family.m, "m", "m")?;
                    BioNdbParams::new(f, m)?
                }
                (None, None) => ctx.family_params(&family, n)?,
            };
            if bio_params.family().n() != n {
                return Err(Failure::from(Error::Dimension {
                    expected: bio_params.family().n(),
                    found: n,
                }));
            }
            let queries = load_queries(&query, n)?;
            let decisions = queries
                .iter()
                .map(|q| oracle_authorize(&refs, bio_params.family(), bio_params.order(), q))
                .collect::<crate::Result<Vec<_>>>()?;
            report_decisions(&mut ctx, &decisions, bio_params.chains_per_template())
        }
    }
}

fn rate(x: f64) -> String {
    if x == 0.0 || x >= 1e-3 {
        format!("{x:.6}")
    } else {
        format!("{x:.3e}")
    }
}

struct Prediction {
    n: usize,
    l_count: usize,
    w: usize,
    m: usize,
    population: u64,
    lambda_min: f64,
    lambda_max: f64,
}

impl Prediction {
    fn iris(m: usize, population: u64) -> Self {
        Prediction {
            n: 2048,
            l_count: 128,
            w: 10,
            m,
            population,
            lambda_min: 512.0,
            lambda_max: 716.8,
        }
    }

    fn report(&self) -> CliResult<Vec<(&'static str, String)>> {
        if self.l_count == 0 || self.w == 0 || self.w > self.n {
            return Err(fail(format!(
                "need 1 <= w <= n and L >= 1, got n={} L={} w={}",
                self.n, self.l_count, self.w
            )));
        }
        if self.lambda_min.partial_cmp(&self.lambda_max) != Some(std::cmp::Ordering::Less) {
            return Err(fail("lambda_min must be below lambda_max"));
        }
        let p1 = collision_prob(self.lambda_min, self.n, self.w)?;
        let p2 = collision_prob(self.lambda_max, self.n, self.w)?;
        let rates = predicted_rates(self.l_count, self.m, p1, p2, self.population)?;
        let single = predicted_rates(self.l_count, self.m, p1, p2, 1)?;
        let l = self.m * (index_bits(self.l_count) + self.w);
        let det = size_bound(
            self.population,
            self.l_count,
            self.m,
            l,
            Variant::Deterministic,
        );
        let rnd = size_bound(
            self.population,
            self.l_count,
            self.m,
            l,
            Variant::Randomized,
        );
        let log2 = |x: f64| format!("2^{x:.4}");
        let expansion = |size| {
            let e = expansion_factor(size, self.population, self.n);
            if e > 0.0 {
                log2(e.log2())
            } else {
                "0".to_string()
            }
        };
        let gib = |size| 2f64.powf(log2_big(size) - 33.0);
        let gb = |size| 2f64.powf(log2_big(size) - 3.0) / 1e9;
        Ok(vec![
            ("n", self.n.to_string()),
            ("L", self.l_count.to_string()),
            ("w", self.w.to_string()),
            ("m", self.m.to_string()),
            ("N", self.population.to_string()),
            ("lambda_min", self.lambda_min.to_string()),
            ("lambda_max", self.lambda_max.to_string()),
            ("p1", format!("{p1:.7}")),
            ("p2", format!("{p2:.7}")),
            ("P_fr", rate(single.false_not_member)),
            ("P_fa", rate(single.false_member)),
            ("system_false_not_member", rate(rates.false_not_member)),
            ("system_false_member", rate(rates.false_member)),
            ("chain_length", l.to_string()),
            ("size_deterministic_bits", det.to_string()),
            ("size_deterministic_GiB", format!("{:.3}", gib(&det))),
            ("size_deterministic_GB", format!("{:.3}", gb(&det))),
            ("size_randomized_bits", rnd.to_string()),
            ("size_randomized_GiB", format!("{:.3}", gib(&rnd))),
            ("expansion_deterministic", expansion(&det)),
            ("expansion_randomized", expansion(&rnd)),
        ])
    }
}
