//! `rdfmsg`: validate, convert, split, log, order-check and skolemize RDF
//! message streams.
//!
//! Exit status: 0 success, 1 validation or ordering failure, 2 usage error,
//! 3 I/O error or corruption.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use rdf_messages::log::{index_path_for, LogError, LogHandle, LogOptions, Mode};
use rdf_messages::nqm::{self, NqmReader};
use rdf_messages::profile::{GraphScope, OrderChecker, Profile, ProfileError, Which};
use rdf_messages::syntax::{Format, PrefixMap, SyntaxError, VERSION_LINE};
use rdf_messages::trigm::{write_trig_message, write_trigm, ParserEvent, TrigmParser};
use rdf_messages::vocab::prov;
use rdf_messages::{skolemize, Iri, Message};

const FORMAT_ENV: &str = "RDFMSG_DEFAULT_FORMAT";

#[derive(Parser)]
#[command(name = "rdfmsg", version, about = "Work with RDF message streams and logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Trigm,
    Nqm,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Trigm => Format::TrigMessages,
            FormatArg::Nqm => Format::NQuadsMessages,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IdTemplate {
    Seq,
    Hash,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pace {
    None,
    Chronology,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Default,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderBy {
    Chronology,
    Version,
}

#[derive(clap::Args)]
struct ProfileArgs {
    /// Predicate whose xsd:dateTime object orders the stream
    #[arg(long, value_name = "IRI")]
    chronology_predicate: Option<String>,
    /// Predicate defining version order
    #[arg(long, value_name = "IRI")]
    version_predicate: Option<String>,
    /// Which graphs to search for ordering metadata
    #[arg(long, value_enum)]
    scope: Option<ScopeArg>,
    /// Profile config file (chronology=, version=, scope= lines)
    #[arg(long, value_name = "FILE")]
    profile: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check syntax and print message, quad and empty-message counts
    Validate {
        #[arg(default_value = "-")]
        file: String,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Require the VERSION announcement (the default)
        #[arg(long, conflicts_with = "lenient")]
        strict_version: bool,
        /// Accept plain TriG or N-Quads as a single message
        #[arg(long)]
        lenient: bool,
    },
    /// Convert between TriG-Messages and N-Quads-Messages
    Convert {
        #[arg(default_value = "-")]
        input: String,
        #[arg(default_value = "-")]
        output: String,
        #[arg(long, value_enum)]
        from: Option<FormatArg>,
        #[arg(long, value_enum)]
        to: Option<FormatArg>,
    },
    /// Write each message to its own plain TriG file
    Split {
        file: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Manage an append-only message log
    Log {
        #[command(subcommand)]
        action: LogAction,
    },
    /// Report adjacent messages whose instants run backwards
    CheckOrder {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[command(flatten)]
        profile: ProfileArgs,
        /// Order to check
        #[arg(long, value_enum, default_value = "chronology")]
        by: OrderBy,
    },
    /// Replace blank nodes with well-known genid IRIs
    Skolemize {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, value_name = "IRI")]
        base: String,
        #[arg(long, value_enum, default_value = "seq")]
        id_template: IdTemplate,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long, short, default_value = "-")]
        output: String,
    },
}

#[derive(Subcommand)]
enum LogAction {
    /// Append N-Quads-Messages from standard input (creates the log if needed)
    Append {
        log: PathBuf,
        #[arg(long, default_value = "-")]
        input: String,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Print one message
    Read {
        log: PathBuf,
        #[arg(long)]
        seq: u64,
    },
    /// Stream a range of messages to standard output
    Replay {
        log: PathBuf,
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
        #[arg(long, value_enum, default_value = "none")]
        pace: Pace,
        /// Replay speed factor for --pace chronology
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Re-derive the index from the data file and compare
    Verify {
        log: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
    },
}

enum Failure {
    Invalid(String),
    Usage(String),
    Fatal(String),
}

impl Failure {
    fn status(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Fatal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Usage(m) | Failure::Fatal(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Fatal(e.to_string())
    }
}

impl From<LogError> for Failure {
    fn from(e: LogError) -> Self {
        match e {
            LogError::OutOfRange { .. } | LogError::BadRange { .. } | LogError::AlreadyExists(_) => {
                Failure::Usage(e.to_string())
            }
            LogError::NotFound(_) => Failure::Fatal(e.to_string()),
            e => Failure::Fatal(e.to_string()),
        }
    }
}

impl From<ProfileError> for Failure {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Config { .. } => Failure::Usage(e.to_string()),
            e => Failure::Invalid(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn syntax_failure(name: &str, e: SyntaxError) -> Failure {
    Failure::Invalid(format!("{name}:{e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file, format, strict_version: _, lenient } => validate(&file, format, !lenient),
        Command::Convert { input, output, from, to } => convert(&input, &output, from, to),
        Command::Split { file, out_dir, format } => split(&file, &out_dir, format),
        Command::Log { action } => log(action),
        Command::CheckOrder { input, format, profile, by } => check_order(&input, format, &profile, by),
        Command::Skolemize { input, base, id_template, format, output } => {
            skolemize_cmd(&input, &base, id_template, format, &output)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Fatal(m)) if m.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rdfmsg: {}", f.message());
            ExitCode::from(f.status())
        }
    }
}

/// `--format` flag, then file extension, then the environment, then TriG-Messages.
fn resolve_format(flag: Option<FormatArg>, path: &str) -> Result<Format, Failure> {
    if let Some(f) = flag {
        return Ok(f.into());
    }
    if path != "-" {
        let ext = Path::new(path).extension().and_then(|e| e.to_str()).unwrap_or("");
        match ext {
            "trigm" | "trig" => return Ok(Format::TrigMessages),
            "nqm" | "nq" => return Ok(Format::NQuadsMessages),
            _ => {}
        }
    }
    match std::env::var(FORMAT_ENV) {
        Ok(v) if !v.is_empty() => {
            Format::from_name(&v).ok_or_else(|| Failure::Usage(format!("{FORMAT_ENV}={v:?} is not trigm or nqm")))
        }
        _ => Ok(Format::TrigMessages),
    }
}

fn open_input(path: &str) -> Result<Box<dyn BufRead>, Failure> {
    if path == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    match File::open(path) {
        Ok(f) => Ok(Box::new(BufReader::new(f))),
        Err(e) => Err(Failure::Fatal(format!("{path}: {e}"))),
    }
}

fn open_output(path: &str) -> Result<Box<dyn Write>, Failure> {
    if path == "-" {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    match File::create(path) {
        Ok(f) => Ok(Box::new(BufWriter::new(f))),
        Err(e) => Err(Failure::Fatal(format!("{path}: {e}"))),
    }
}

/// Streams every message of `path` into `each`; returns the final prefix map.
fn for_each_message(
    path: &str,
    format: Format,
    strict: bool,
    mut each: impl FnMut(Message) -> Outcome,
) -> Result<PrefixMap, Failure> {
    let mut input = open_input(path)?;
    match format {
        Format::NQuadsMessages => {
            for record in NqmReader::with_version_check(input, strict) {
                each(record.map_err(|e| syntax_failure(path, e))?.message)?;
            }
            Ok(PrefixMap::new())
        }
        Format::TrigMessages => {
            let mut parser = TrigmParser::new(strict);
            let mut buf = vec![0u8; 64 * 1024];
            loop {
                let n = input.read(&mut buf).map_err(|e| Failure::Fatal(format!("{path}: {e}")))?;
                let events = if n == 0 { parser.finish() } else { parser.feed(&buf[..n]) };
                for event in events.map_err(|e| syntax_failure(path, e))? {
                    if let ParserEvent::MessageReady { message, .. } = event {
                        each(message)?;
                    }
                }
                if n == 0 {
                    return Ok(parser.prefixes().clone());
                }
            }
        }
    }
}

fn read_all(path: &str, format: Format, strict: bool) -> Result<(Vec<Message>, PrefixMap), Failure> {
    let mut messages = Vec::new();
    let prefixes = for_each_message(path, format, strict, |m| {
        messages.push(m);
        Ok(())
    })?;
    Ok((messages, prefixes))
}

fn write_messages(out: &mut dyn Write, messages: &[Message], format: Format, prefixes: &PrefixMap) -> io::Result<()> {
    match format {
        Format::TrigMessages => write_trigm(messages, &mut *out, prefixes)?,
        Format::NQuadsMessages => nqm::write_nqm(messages, &mut *out)?,
    };
    out.flush()
}

fn validate(file: &str, format: Option<FormatArg>, strict: bool) -> Outcome {
    let format = resolve_format(format, file)?;
    let (mut messages, mut quads, mut empty) = (0u64, 0u64, 0u64);
    for_each_message(file, format, strict, |m| {
        messages += 1;
        quads += m.len() as u64;
        empty += u64::from(m.is_empty());
        Ok(())
    })?;
    println!("messages={messages} quads={quads} empty={empty}");
    Ok(())
}

fn convert(input: &str, output: &str, from: Option<FormatArg>, to: Option<FormatArg>) -> Outcome {
    let from = resolve_format(from, input)?;
    let to = resolve_format(to, output)?;
    let (messages, prefixes) = read_all(input, from, true)?;
    let mut out = open_output(output)?;
    write_messages(&mut out, &messages, to, &prefixes)?;
    Ok(())
}

fn split(file: &str, out_dir: &Path, format: Option<FormatArg>) -> Outcome {
    let format = resolve_format(format, file)?;
    match fs::read_dir(out_dir) {
        Ok(mut entries) => {
            if entries.next().is_some() {
                return Err(Failure::Usage(format!("{} exists and is not empty", out_dir.display())));
            }
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => fs::create_dir_all(out_dir)?,
        Err(e) => return Err(Failure::Fatal(format!("{}: {e}", out_dir.display()))),
    }
    let mut seq = 0u64;
    let no_prefixes = PrefixMap::new();
    for_each_message(file, format, true, |m| {
        let path = out_dir.join(format!("msg-{seq:06}.trig"));
        let mut f = BufWriter::new(File::create(&path)?);
        write_trig_message(&m, &mut f, &no_prefixes)?;
        f.flush()?;
        seq += 1;
        Ok(())
    })?;
    Ok(())
}

fn build_profile(args: &ProfileArgs) -> Result<Profile, Failure> {
    let iri = |s: &str| Iri::new(s).map_err(|e| Failure::Usage(format!("{e}: {s:?}")));
    let mut profile = match &args.profile {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Fatal(format!("{}: {e}", path.display())))?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("profile");
            Profile::from_config(name, &text)?
        }
        None => Profile::new("default", iri(prov::GENERATED_AT_TIME)?),
    };
    if let Some(c) = &args.chronology_predicate {
        profile.chronology_predicate = iri(c)?;
    }
    if let Some(v) = &args.version_predicate {
        profile.version_predicate = Some(iri(v)?);
    }
    if let Some(s) = args.scope {
        profile.graph_scope = match s {
            ScopeArg::Default => GraphScope::DefaultGraphOnly,
            ScopeArg::All => GraphScope::AllGraphs,
        };
    }
    Ok(profile)
}

fn profile_given(args: &ProfileArgs) -> bool {
    args.chronology_predicate.is_some() || args.profile.is_some()
}

fn log_options(args: &ProfileArgs) -> Result<LogOptions, Failure> {
    let profile = if profile_given(args) { Some(build_profile(args)?) } else { None };
    Ok(LogOptions { profile, ..LogOptions::default() })
}

fn log(action: LogAction) -> Outcome {
    match action {
        LogAction::Append { log, input, profile } => {
            let options = log_options(&profile)?;
            let mut handle = if log.exists() {
                LogHandle::open(&log, Mode::Writer, options)?
            } else {
                LogHandle::create(&log, options)?
            };
            for record in NqmReader::new(open_input(&input)?) {
                let record = record.map_err(|e| syntax_failure(&input, e))?;
                handle.append(&record.message)?;
            }
            Ok(())
        }
        LogAction::Read { log, seq } => {
            let handle = LogHandle::open(&log, Mode::Reader, LogOptions::default())?;
            let message = handle.read(seq)?;
            let mut out = io::stdout().lock();
            nqm::write_nqm([&message], &mut out)?;
            Ok(())
        }
        LogAction::Replay { log, from, to, pace, speed, profile } => {
            if !(speed.is_finite() && speed > 0.0) {
                return Err(Failure::Usage(format!("--speed must be positive, got {speed}")));
            }
            let profile = build_profile(&profile)?;
            let handle = LogHandle::open(&log, Mode::Reader, LogOptions::default())?;
            let replay = handle.replay(from, to)?;
            let mut out = io::stdout().lock();
            out.write_all(VERSION_LINE.as_bytes())?;
            out.flush()?;
            let mut last = None;
            let mut buf = Vec::new();
            for item in replay {
                let (_, message) = item?;
                if let Pace::Chronology = pace {
                    let instant = rdf_messages::extract_instant(&message, &profile, Which::Chronology)?;
                    if let Some(t) = instant {
                        if let Some(prev) = &last {
                            let gap = t.since(prev).to_std().unwrap_or(Duration::ZERO);
                            std::thread::sleep(gap.div_f64(speed));
                        }
                        last = Some(t);
                    }
                }
                buf.clear();
                nqm::write_record(&message, &mut buf);
                out.write_all(&buf)?;
                out.flush()?;
            }
            Ok(())
        }
        LogAction::Verify { log, profile } => {
            let options = LogOptions { paranoid: false, ..log_options(&profile)? };
            let handle = LogHandle::open(&log, Mode::Reader, options)?;
            handle.verify()?;
            println!("ok messages={}", handle.len());
            Ok(())
        }
    }
}

fn check_order(input: &str, format: Option<FormatArg>, args: &ProfileArgs, by: OrderBy) -> Outcome {
    let profile = build_profile(args)?;
    let which = match by {
        OrderBy::Chronology => Which::Chronology,
        OrderBy::Version => {
            if profile.version_predicate.is_none() {
                return Err(Failure::Usage("--by version needs --version-predicate or a profile with version=".into()));
            }
            Which::Version
        }
    };
    let mut checker = OrderChecker::new();
    let mut seq = 0u64;
    let mut observe = |m: Message| -> Outcome {
        checker.observe(seq, &m, &profile, which)?;
        seq += 1;
        Ok(())
    };
    let is_log = input != "-" && index_path_for(Path::new(input)).exists();
    if is_log {
        let handle = LogHandle::open(input, Mode::Reader, LogOptions::default())?;
        for item in handle.replay(None, None)? {
            observe(item?.1)?;
        }
    } else {
        let format = resolve_format(format, input)?;
        for_each_message(input, format, true, observe)?;
    }
    let violations = checker.into_violations();
    if violations.is_empty() {
        return Ok(());
    }
    let mut out = io::stdout().lock();
    for v in &violations {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Err(Failure::Invalid(format!("{} ordering violation(s)", violations.len())))
}

fn skolemize_cmd(input: &str, base: &str, template: IdTemplate, format: Option<FormatArg>, output: &str) -> Outcome {
    let format = resolve_format(format, input)?;
    let (messages, prefixes) = read_all(input, format, true)?;
    let mut rewritten = Vec::with_capacity(messages.len());
    for (seq, m) in messages.iter().enumerate() {
        let id = match template {
            IdTemplate::Seq => format!("{seq:06}"),
            IdTemplate::Hash => content_hash(m),
        };
        rewritten.push(skolemize(m, base, &id).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    let mut out = open_output(output)?;
    write_messages(&mut out, &rewritten, format, &prefixes)?;
    Ok(())
}

/// First 16 bytes of the SHA-256 of the message's N-Quads record, in hex.
fn content_hash(m: &Message) -> String {
    let mut bytes = Vec::new();
    nqm::write_record(m, &mut bytes);
    let digest = Sha256::digest(&bytes);
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}
