use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use orientcorr::classify::{self, ClassifyError, ClassifyOptions, StreamOptions, StreamRecord};
use orientcorr::closed_form::{self, ClosedFormError, CycleTriple};
use orientcorr::dyadic::format_decimal;
use orientcorr::enumerate::{self, EnumConfig, EnumError, DEFAULT_CAP};
use orientcorr::graph::{self, Graph, GraphError};
use orientcorr::kn::{self, KnError, KnRow};
use orientcorr::monte_carlo::{self, McEstimate};
use orientcorr::{with_threads, TripleCorrelation, THREADS_ENV};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(name = "orientcorr", version, about = "Correlation of {a->s} and {s->b} in randomly oriented graphs")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
    /// Emit one JSON object per record instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest edge count to enumerate exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact P(A), P(A∩B) and relative covariance on K_n.
    Kn {
        #[arg(long)]
        n: usize,
    },
    /// Complete-graph table for n = 2..=max-n.
    Table {
        #[arg(long, default_value_t = 13)]
        max_n: usize,
    },
    /// Exhaustive exact correlation for one triple.
    Exact {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        triple: TripleArgs,
    },
    /// Closed-form correlation on a cycle, by arc lengths or by a labeled cycle.
    Cycle {
        #[arg(long, requires_all = ["c", "d"], conflicts_with_all = ["graph6", "edges"])]
        n: Option<usize>,
        #[arg(long)]
        c: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        graph6: Option<String>,
        #[arg(long)]
        edges: Option<String>,
        #[arg(long, requires_all = ["s", "b"])]
        a: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
    },
    /// Independence / mutual exclusion verdict on a forest.
    Forest {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        triple: TripleArgs,
    },
    /// Class I/II/III membership of one graph or a graph6 stream.
    Classify {
        #[arg(long, conflicts_with = "stream", required_unless_present = "stream")]
        graph6: Option<String>,
        /// graph6 file, one graph per line; "-" reads standard input.
        #[arg(long)]
        stream: Option<String>,
        /// Also test for K4 and K2,3 minors (graphs with at most 10 vertices).
        #[arg(long)]
        outerplanar: bool,
        /// Classify disconnected graphs instead of skipping them.
        #[arg(long)]
        allow_disconnected: bool,
    },
    /// Seeded Monte Carlo estimate for one triple.
    Mc {
        #[command(flatten)]
        graph: GraphInput,
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Envelope and auxiliary bound checks for n = 2..=max-n.
    Bounds {
        #[arg(long, default_value_t = 40)]
        max_n: usize,
    },
    /// Sample G(n, p) and print it as graph6.
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GraphInput {
    #[arg(long)]
    graph6: Option<String>,
    /// Edge-list file; "-" reads standard input.
    #[arg(long)]
    edges: Option<String>,
}

#[derive(Args, Debug)]
struct TripleArgs {
    #[arg(long)]
    a: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    b: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    OverCap(String),
    Io(io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::OverCap(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::OverCap(m) => write!(f, "refused: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvalidTriple { .. } | GraphError::CycleTooShort(_) => CliError::Usage(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::OverCap { .. } => CliError::OverCap(e.to_string()),
            EnumError::Graph(g) => g.into(),
        }
    }
}

impl From<KnError> for CliError {
    fn from(e: KnError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ClosedFormError> for CliError {
    fn from(e: ClosedFormError) -> Self {
        match e {
            ClosedFormError::InvalidCycleTriple { .. } => CliError::Usage(e.to_string()),
            ClosedFormError::Graph(g) => g.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Enum(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn read_source(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        io::Read::read_to_string(&mut io::stdin(), &mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
    }
}

fn load_graph(graph6: Option<&str>, edges: Option<&str>) -> Result<Graph, CliError> {
    match (graph6, edges) {
        (Some(text), None) => Ok(graph::parse_graph6(text)?),
        (None, Some(path)) => Ok(graph::parse_edge_list(&read_source(path)?)?),
        _ => Err(CliError::Usage("give exactly one of --graph6 or --edges".into())),
    }
}

impl GraphInput {
    fn load(&self) -> Result<Graph, CliError> {
        load_graph(self.graph6.as_deref(), self.edges.as_deref())
    }
}

fn graph_inputs(g: &Graph) -> Value {
    json!({ "graph6": graph::emit_graph6(g), "n": g.n(), "m": g.m() })
}

fn correlation_json(c: &TripleCorrelation) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("p_c".into(), json!(c.p_c.to_string()));
    m.insert("p_d".into(), json!(c.p_d.to_string()));
    m.insert("p_cd".into(), json!(c.p_cd.to_string()));
    m.insert("cov".into(), json!(c.cov.to_string()));
    m.insert("cov_sign".into(), json!(c.cov.sign().symbol()));
    m.insert("cov_magnitude".into(), json!(c.cov.magnitude().to_string()));
    m.insert("p_c_float".into(), json!(c.p_c.to_f64()));
    m.insert("p_d_float".into(), json!(c.p_d.to_f64()));
    m.insert("p_cd_float".into(), json!(c.p_cd.to_f64()));
    m.insert("cov_float".into(), json!(c.cov.to_f64()));
    m
}

fn kn_row_json(r: &KnRow) -> Value {
    let opt = |v: Option<String>| v.map_or(Value::Null, Value::String);
    json!({
        "n": r.n,
        "p_a": r.p_a.to_string(),
        "p_ab": opt(r.p_ab.as_ref().map(ToString::to_string)),
        "scaled_a": r.scaled_a.to_string(),
        "scaled_ab": opt(r.scaled_ab.as_ref().map(ToString::to_string)),
        "rel_cov": opt(r.rel_cov.as_ref().map(ToString::to_string)),
        "cov_sign": opt(r.covariance_sign().map(|s| s.symbol().to_string())),
        "p_a_float": format_decimal(&r.p_a.to_rational(), 4),
        "p_ab_float": opt(r.p_ab.as_ref().map(|p| format_decimal(&p.to_rational(), 7))),
        "rel_cov_float": opt(r.rel_cov.as_ref().map(|x| format_decimal(x, 6))),
    })
}

fn mc_json(e: &McEstimate) -> Value {
    serde_json::to_value(e).expect("estimate serializes")
}

/// Output sink: JSON lines or indented `key: value` text.
struct Out<W: Write> {
    w: W,
    json: bool,
}

impl<W: Write> Out<W> {
    fn record(&mut self, command: &str, inputs: Value, results: Value) -> io::Result<()> {
        if self.json {
            let rec = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "inputs": inputs,
                "results": results,
            });
            writeln!(self.w, "{rec}")
        } else {
            write_text(&mut self.w, &results, 0)
        }
    }
}

fn write_text<W: Write>(w: &mut W, v: &Value, indent: usize) -> io::Result<()> {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        writeln!(w, "{pad}{k}:")?;
                        write_text(w, v, indent + 1)?;
                    }
                    _ => writeln!(w, "{pad}{k}: {}", scalar(v))?,
                }
            }
            Ok(())
        }
        Value::Array(items) => {
            for item in items {
                writeln!(w, "{pad}-")?;
                write_text(w, item, indent + 1)?;
            }
            Ok(())
        }
        _ => writeln!(w, "{pad}{}", scalar(v)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = Out { w: io::BufWriter::new(stdout.lock()), json: cli.json };
    let cfg = EnumConfig::with_cap(cli.cap);
    match &cli.command {
        Command::Kn { n } => {
            let row = kn::table_row(*n)?;
            out.record("kn", json!({ "n": n }), kn_row_json(&row))?;
        }
        Command::Table { max_n } => {
            let rows = kn::table_rows(*max_n)?;
            if cli.json {
                let rows: Vec<Value> = rows.iter().map(kn_row_json).collect();
                out.record("table", json!({ "max_n": max_n }), json!({ "rows": rows }))?;
            } else {
                out.w.write_all(kn::render_table(&rows).as_bytes())?;
            }
        }
        Command::Exact { graph, triple } => {
            let g = graph.load()?;
            let t = g.triple(triple.a, triple.s, triple.b)?;
            let counts = enumerate::count_events(&g, t, cfg)?;
            let mut res = correlation_json(&counts.correlation());
            res.insert(
                "counts".into(),
                json!({
                    "m": counts.m,
                    "n_c": counts.n_c.to_string(),
                    "n_d": counts.n_d.to_string(),
                    "n_cd": counts.n_cd.to_string(),
                }),
            );
            let mut inputs = graph_inputs(&g);
            inputs["triple"] = json!([t.a, t.s, t.b]);
            out.record("exact", inputs, Value::Object(res))?;
        }
        Command::Cycle { n, c, d, graph6, edges, a, s, b } => {
            let (ct, inputs) = match (n, c, d) {
                (Some(n), Some(c), Some(d)) => {
                    (CycleTriple::new(*n, *c, *d)?, json!({ "n": n, "c": c, "d": d }))
                }
                _ => {
                    let g = load_graph(graph6.as_deref(), edges.as_deref())?;
                    let (Some(a), Some(s), Some(b)) = (a, s, b) else {
                        return Err(CliError::Usage("a labeled cycle needs --a, --s and --b".into()));
                    };
                    let t = g.triple(*a, *s, *b)?;
                    let ct = CycleTriple::from_labeled(&g, t)?;
                    let mut inputs = graph_inputs(&g);
                    inputs["triple"] = json!([a, s, b]);
                    (ct, inputs)
                }
            };
            let mut res = Map::new();
            res.insert("n".into(), json!(ct.n()));
            res.insert("c".into(), json!(ct.c()));
            res.insert("d".into(), json!(ct.d()));
            res.extend(correlation_json(&closed_form::cycle_correlation(ct)));
            out.record("cycle", inputs, Value::Object(res))?;
        }
        Command::Forest { graph, triple } => {
            let g = graph.load()?;
            let t = g.triple(triple.a, triple.s, triple.b)?;
            let v = closed_form::forest_correlation(&g, t)?;
            let res = json!({
                "kind": v.kind,
                "p_c": v.p_c.to_string(),
                "p_d": v.p_d.to_string(),
                "p_cd": v.p_cd.to_string(),
                "cov": v.cov.to_string(),
                "cov_sign": v.cov.sign().symbol(),
                "cov_float": v.cov.to_f64(),
            });
            let mut inputs = graph_inputs(&g);
            inputs["triple"] = json!([t.a, t.s, t.b]);
            out.record("forest", inputs, res)?;
        }
        Command::Classify { graph6, stream, outerplanar, allow_disconnected } => {
            let opts = StreamOptions {
                classify: ClassifyOptions {
                    enumeration: cfg,
                    allow_disconnected: *allow_disconnected,
                    per_triple: false,
                },
                outerplanar: *outerplanar,
            };
            match (graph6, stream) {
                (Some(text), _) => {
                    let g = graph::parse_graph6(text)?;
                    let flags = classify::classify(&g, &opts.classify)?;
                    let mut res = serde_json::to_value(flags).expect("flags serialize");
                    if *outerplanar {
                        res["outerplanar"] = json!(classify::is_outerplanar(&g)?);
                    }
                    out.record("classify", graph_inputs(&g), res)?;
                }
                (None, Some(path)) => {
                    let reader: Box<dyn BufRead> = if path == "-" {
                        Box::new(BufReader::new(io::stdin()))
                    } else {
                        let f = fs::File::open(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
                        Box::new(BufReader::new(f))
                    };
                    let json_mode = cli.json;
                    let w = &mut out.w;
                    let summary = classify::classify_stream(reader, &opts, |r| {
                        if json_mode {
                            writeln!(w, "{}", json!({ "schema_version": SCHEMA_VERSION, "command": "classify", "record": r }))
                        } else {
                            writeln!(w, "{}", stream_line(r))
                        }
                    })?;
                    if json_mode {
                        writeln!(out.w, "{}", json!({ "schema_version": SCHEMA_VERSION, "command": "classify", "summary": summary }))?;
                    } else {
                        writeln!(out.w, "summary:")?;
                        write_text(&mut out.w, &serde_json::to_value(summary).expect("summary serializes"), 1)?;
                    }
                }
                (None, None) => return Err(CliError::Usage("give --graph6 or --stream".into())),
            }
        }
        Command::Mc { graph, triple, samples, seed } => {
            let g = graph.load()?;
            let t = g.triple(triple.a, triple.s, triple.b)?;
            let est = monte_carlo::mc_estimate(&g, t, *samples, *seed)?;
            let mut inputs = graph_inputs(&g);
            inputs["triple"] = json!([t.a, t.s, t.b]);
            inputs["samples"] = json!(samples);
            inputs["seed"] = json!(seed);
            out.record("mc", inputs, mc_json(&est))?;
        }
        Command::Bounds { max_n } => {
            let report = kn::bound_report(*max_n)?;
            if cli.json {
                let res = json!({
                    "all_hold": report.all_hold(),
                    "c8_below_5": report.c8_below_5,
                    "records": report.records,
                });
                out.record("bounds", json!({ "max_n": max_n }), res)?;
            } else {
                out.w.write_all(kn::render_bounds(&report).as_bytes())?;
            }
        }
        Command::Gnp { n, p, seed } => {
            if !(0.0..=1.0).contains(p) {
                return Err(CliError::Usage(format!("p = {p} is not a probability")));
            }
            let g = monte_carlo::gnp_generate(*n, *p, *seed)?;
            if cli.json {
                out.record("gnp", json!({ "n": n, "p": p, "seed": seed }), graph_inputs(&g))?;
            } else {
                writeln!(out.w, "{}", graph::emit_graph6(&g))?;
            }
        }
    }
    out.w.flush()?;
    Ok(())
}

fn stream_line(r: &StreamRecord) -> String {
    match r {
        StreamRecord::Classified { id, graph6, n, m, flags, outerplanar } => {
            let classes: Vec<&str> = [(flags.class_i, "I"), (flags.class_ii, "II"), (flags.class_iii, "III")]
                .into_iter()
                .filter_map(|(b, s)| b.then_some(s))
                .collect();
            let mut line = format!(
                "{id}\t{graph6}\tn={n}\tm={m}\tclasses={}\tneg={}\tzero={}\tpos={}",
                classes.join(","),
                flags.neg_triples,
                flags.zero_triples,
                flags.pos_triples,
            );
            if let Some(op) = outerplanar {
                line.push_str(&format!("\touterplanar={op}"));
            }
            line
        }
        StreamRecord::Skipped { id, graph6, reason } => format!("{id}\t{graph6}\tskipped: {reason}"),
        StreamRecord::Error { id, message } => format!("{id}\terror: {message}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(cli.threads, || run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("orientcorr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
