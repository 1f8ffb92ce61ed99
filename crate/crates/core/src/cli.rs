//! Command-line front end.
//!
//! Exit codes: 0 success (an empty result is a success), 1 formula or
//! filter syntax error, 2 network file, format or usage error, 3 filter
//! evaluation type error. Standard output is written only on success.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Map, Value};

use crate::ctl::{CtlError, SatSet, Witness};
use crate::metrics::{self, DegreeHistogram, MetricsError};
use crate::network::Network;
use crate::xpath::parse_filter;
use crate::xpl::{parse_xpl, Prepared, XplError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_SYNTAX: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_TYPE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "xplcheck",
    version,
    about = "Check CTL formulas with XPath filters over XML-attributed networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the nodes satisfying a formula.
    Check(CheckArgs),
    /// Print the nodes whose payload satisfies a bare filter.
    Query(QueryArgs),
    /// Print the topology report.
    Metrics(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Network XML file.
    #[arg(long, value_name = "PATH")]
    pub network: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Lines)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(
        long,
        value_name = "STR",
        required_unless_present = "formula_file",
        conflicts_with = "formula_file"
    )]
    pub formula: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub formula_file: Option<PathBuf>,
    /// Also print a witness for this node.
    #[arg(long, value_name = "KEY")]
    pub witness_for: Option<String>,
    /// Threads used to evaluate filters.
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub parallel: u16,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_name = "STR")]
    pub filter: String,
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub parallel: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Lines,
    Json,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Check(args) => check(args),
        Command::Query(args) => query(args),
        Command::Metrics(args) => report(args),
    }
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read network file {}: {e}", path.display())))?;
    Network::parse(&bytes).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

/// Diagnostic with the offending line and a caret under `offset` (in chars).
fn point_at(text: &str, offset: usize, message: &str) -> String {
    let mut line_start = 0;
    let mut line_no = 1;
    for (i, c) in text.chars().enumerate() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line_start = i + 1;
            line_no += 1;
        }
    }
    let line: String = text.chars().skip(line_start).take_while(|&c| c != '\n').collect();
    let column = offset - line_start;
    let pad: String = line
        .chars()
        .take(column)
        .map(|c| if c == '\t' { '\t' } else { ' ' })
        .collect();
    format!("{message} (line {line_no}, column {})\n  {line}\n  {pad}^", column + 1)
}

fn evaluation_failure(e: XplError) -> Failure {
    match e {
        XplError::Syntax(_) => Failure::new(EXIT_SYNTAX, e.to_string()),
        XplError::Type { .. } => Failure::new(EXIT_TYPE, e.to_string()),
        XplError::Ctl(CtlError::Network(ref inner)) => Failure::new(EXIT_INPUT, inner.to_string()),
        other => Failure::new(EXIT_INPUT, other.to_string()),
    }
}

fn check(args: &CheckArgs) -> Result<String, Failure> {
    let text = match (&args.formula, &args.formula_file) {
        (Some(f), _) => f.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read formula file {}: {e}", path.display())))?,
        (None, None) => return Err(Failure::new(EXIT_INPUT, "no formula given")),
    };
    let formula = parse_xpl(&text).map_err(|e| Failure::new(EXIT_SYNTAX, point_at(&text, e.offset, &e.to_string())))?;
    let net = load_network(&args.common.network)?;
    let prepared = Prepared::new(&net, &formula, args.parallel.into()).map_err(evaluation_failure)?;
    let sat = prepared.satisfying(&net).map_err(evaluation_failure)?;
    let witness = match &args.witness_for {
        None => None,
        Some(key) => {
            net.index_of(key).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
            let w = match prepared.witness(&net, key) {
                Ok(w) => Some(w),
                Err(XplError::Ctl(CtlError::NotSatisfied(_))) => None,
                Err(e) => return Err(evaluation_failure(e)),
            };
            Some((key.as_str(), w, prepared.ctl.operator()))
        }
    };
    Ok(match args.common.format {
        OutputFormat::Lines => {
            let mut s = key_lines(&net, &sat);
            if let Some((key, w, op)) = witness {
                s.push_str(&witness_line(key, w.as_ref(), &op));
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let nodes = json!(sat.keys(&net));
            let value = match witness {
                None => nodes,
                Some((key, w, op)) => json!({ "nodes": nodes, "witness": witness_json(key, w.as_ref(), &op) }),
            };
            format!("{value}\n")
        }
    })
}

fn query(args: &QueryArgs) -> Result<String, Failure> {
    let filter = parse_filter(&args.filter)
        .map_err(|e| Failure::new(EXIT_SYNTAX, point_at(&args.filter, e.offset, &e.to_string())))?;
    let net = load_network(&args.common.network)?;
    let sat = crate::xpl::query(&net, &filter, args.parallel.into()).map_err(evaluation_failure)?;
    Ok(match args.common.format {
        OutputFormat::Lines => key_lines(&net, &sat),
        OutputFormat::Json => format!("{}\n", json!(sat.keys(&net))),
    })
}

fn key_lines(net: &Network, sat: &SatSet) -> String {
    sat.keys(net).iter().map(|k| format!("{k}\n")).collect()
}

fn witness_line(key: &str, w: Option<&Witness>, op: &str) -> String {
    match w {
        None => format!("witness {key}: none, the node does not satisfy the formula"),
        Some(Witness::Node(k)) => format!("witness {key}: {k}"),
        Some(Witness::Path { nodes, inverse: false }) => format!("witness {key}: {}", nodes.join(" -> ")),
        Some(Witness::Path { nodes, inverse: true }) => format!("witness {key}: {}", nodes.join(" <- ")),
        Some(Witness::NoneAvailable) => format!("witness {key}: unavailable, operator `{op}` has no path witness"),
    }
}

fn witness_json(key: &str, w: Option<&Witness>, op: &str) -> Value {
    match w {
        None => json!({ "for": key, "kind": "unsatisfied" }),
        Some(Witness::Node(k)) => json!({ "for": key, "kind": "node", "nodes": [k] }),
        Some(Witness::Path { nodes, inverse }) => {
            json!({ "for": key, "kind": "path", "nodes": nodes, "inverse": inverse })
        }
        Some(Witness::NoneAvailable) => json!({ "for": key, "kind": "unavailable", "operator": op }),
    }
}

/// Shortest round-trip decimal, with `.0` on integers.
fn decimal(r: Ratio<u64>) -> String {
    let x = *r.numer() as f64 / *r.denom() as f64;
    if r.is_integer() {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

fn histogram_text(h: &std::collections::BTreeMap<usize, usize>) -> String {
    h.iter().map(|(d, c)| format!("{d}:{c}")).collect::<Vec<_>>().join(" ")
}

fn histogram_json(h: &std::collections::BTreeMap<usize, usize>) -> Value {
    Value::Object(h.iter().map(|(d, c)| (d.to_string(), json!(c))).collect())
}

fn report(args: &CommonArgs) -> Result<String, Failure> {
    let net = load_network(&args.network)?;
    let clustering = metrics::clustering_coefficient(&net);
    let comps = metrics::components(&net);
    let geo = match metrics::geodesics(&net) {
        Ok(g) => Some(g),
        Err(MetricsError::EmptyNetwork) => None,
        Err(e) => return Err(Failure::new(EXIT_INPUT, e.to_string())),
    };
    let eulerian = metrics::eulerian_path_exists(&net).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;

    // (key, text form, JSON form), in report order.
    let mut rows: Vec<(&str, String, Value)> = vec![
        ("nodes", net.node_count().to_string(), json!(net.node_count())),
        ("edges", net.edge_count().to_string(), json!(net.edge_count())),
        ("directed", net.is_directed().to_string(), json!(net.is_directed())),
        (
            "triangles",
            clustering.triangles.to_string(),
            json!(clustering.triangles),
        ),
        (
            "connected_triples",
            clustering.triples.to_string(),
            json!(clustering.triples),
        ),
        ("clustering", decimal(clustering.ratio()), json!(clustering.value())),
        (
            "clustering_exact",
            clustering.ratio().to_string(),
            json!(clustering.ratio().to_string()),
        ),
        (
            "components",
            comps.components.len().to_string(),
            json!(comps.components.len()),
        ),
    ];
    let sizes: Vec<usize> = comps.components.iter().map(Vec::len).collect();
    rows.push((
        "component_sizes",
        sizes.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
        json!(sizes),
    ));
    match geo {
        Some(g) => {
            let mean = g.mean();
            rows.push(("diameter", g.diameter.to_string(), json!(g.diameter)));
            rows.push((
                "mean_geodesic",
                decimal(mean),
                json!(*mean.numer() as f64 / *mean.denom() as f64),
            ));
            rows.push(("mean_geodesic_exact", mean.to_string(), json!(mean.to_string())));
        }
        None => {
            for key in ["diameter", "mean_geodesic", "mean_geodesic_exact"] {
                rows.push((key, "undefined".into(), Value::Null));
            }
        }
    }
    match metrics::degree_histogram(&net) {
        DegreeHistogram::Undirected(h) => rows.push(("degree_histogram", histogram_text(&h), histogram_json(&h))),
        DegreeHistogram::Directed { out_degree, in_degree } => {
            rows.push((
                "out_degree_histogram",
                histogram_text(&out_degree),
                histogram_json(&out_degree),
            ));
            rows.push((
                "in_degree_histogram",
                histogram_text(&in_degree),
                histogram_json(&in_degree),
            ));
        }
    }
    rows.push(("eulerian_path", eulerian.to_string(), json!(eulerian)));

    Ok(match args.format {
        OutputFormat::Lines => rows.iter().map(|(k, v, _)| format!("{k}: {v}\n")).collect(),
        OutputFormat::Json => {
            let map: Map<String, Value> = rows.into_iter().map(|(k, _, v)| (k.to_owned(), v)).collect();
            format!("{}\n", Value::Object(map))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caret_points_at_offset() {
        let d = point_at("EX [", 3, "bad");
        assert_eq!(d, "bad (line 1, column 4)\n  EX [\n     ^");
        let d = point_at("EX\n  [a", 5, "bad");
        assert!(d.starts_with("bad (line 2, column 3)"), "{d}");
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal(Ratio::from_integer(1)), "1.0");
        assert_eq!(decimal(Ratio::new(3, 4)), "0.75");
        assert_eq!(decimal(Ratio::new(4, 3)), "1.3333333333333333");
    }

    #[test]
    fn syntax_errors_exit_one_without_stdout() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            ["xplcheck", "check", "--network", "missing.xml", "--formula", "EX ["],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_SYNTAX);
        assert!(out.is_empty());
        assert!(String::from_utf8(err).unwrap().contains("offset 3"));
    }

    #[test]
    fn missing_network_exits_two() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            ["xplcheck", "metrics", "--network", "/nonexistent.xml"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty());
    }
}
