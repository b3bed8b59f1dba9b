use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use modbound::certificate::CertificateDocument;
use modbound::certify::{certify, CertifyOptions, Method};
use modbound::chains::{ChainOptions, Strategy, DEFAULT_PATH_BUDGET};
use modbound::corpus;
use modbound::io::{parse_edge_list, write_edge_list};
use modbound::optimizer::{optimize, OptimizerConfig};
use modbound::planted::generate_planted;
use modbound::rational::{format_decimal, format_rational};
use modbound::report::{format_csv, format_table, run_benchmark, BenchInput, BenchRecord};
use modbound::scores::{Partition, ScoreMatrix};
use modbound::verify::{verify_against, verify_document};
use modbound::Network;

#[derive(Parser)]
#[command(
    name = "modbound",
    version,
    about = "Modularity optimization with certified upper bounds"
)]
struct Cli {
    /// Seed for restarts and randomized chain strategies.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Read edge lists as directed.
    #[arg(long, global = true)]
    directed: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Largest subnetwork size used by the subnets and both methods.
    #[arg(long, global = true, default_value_t = 6)]
    max_subnet_size: usize,
    /// Chain selection: best, random, mixed or mixed:<p>.
    #[arg(long, global = true, default_value = "best")]
    strategy: String,
    #[arg(long, global = true, default_value_t = 1)]
    tries_per_k: usize,
    /// Partial paths explored per chain length.
    #[arg(long, global = true, default_value_t = DEFAULT_PATH_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Chains,
    Subnets,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Chains => Method::Chains,
            MethodArg::Subnets => Method::Subnets,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Score summary, and the modularity of a partition if one is given.
    Score {
        /// Edge list, or @name for a bundled network.
        network: String,
        /// Lines of "<label> <community>".
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Search for a high-modularity partition.
    Optimize {
        network: String,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Upper bound on the maximum modularity.
    Bound {
        network: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Chains)]
        method: MethodArg,
    },
    /// Optimize, bound and write a verified certificate.
    Certify {
        network: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Certificate path; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a certificate. Exit status 0 if valid, 1 if not, 2 if unreadable.
    Verify {
        certificate: PathBuf,
        /// Also require the certificate to be about this network.
        #[arg(long)]
        network: Option<String>,
    },
    /// Certify bundled networks and print a results table.
    Bench {
        /// Networks to run; all bundled ones if omitted.
        names: Vec<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Chains)]
        method: MethodArg,
        /// Directory holding <name>.txt edge lists for unbundled networks.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Write a planted-partition network as an edge list.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        communities: usize,
        #[arg(long, default_value_t = 0.9)]
        p_in: f64,
        #[arg(long, default_value_t = 0.05)]
        p_out: f64,
        #[arg(long, default_value_t = 1)]
        weight_scale: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

type CliResult<T> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult<ExitCode> {
    match &cli.command {
        Command::Score { network, partition } => return score(cli, network, partition.as_deref()),
        Command::Optimize { network, restarts } => {
            let net = load(network, cli.directed)?;
            let sm = ScoreMatrix::from_network(&net).map_err(|e| e.to_string())?;
            let cfg = OptimizerConfig {
                seed: cli.seed,
                restarts: *restarts,
                ..OptimizerConfig::default()
            };
            let best = optimize(&sm, &cfg);
            print_partition(cli.format, &net, &best.partition, &best.modularity);
        }
        Command::Bound { network, method } => {
            let net = load(network, cli.directed)?;
            let start = std::time::Instant::now();
            let cert = certify(&net, &options(cli, *method)?).map_err(|e| e.to_string())?;
            let record = BenchRecord {
                name: network.trim_start_matches('@').to_string(),
                nodes: net.node_count(),
                edges: net.edge_count(),
                achieved: cert.achieved.modularity.clone(),
                bound: cert.bound(),
                status: cert.status(),
                seconds: start.elapsed().as_secs_f64(),
                reference: None,
            };
            print_records(cli.format, &[record]);
        }
        Command::Certify {
            network,
            method,
            output,
        } => {
            let net = load(network, cli.directed)?;
            let cert = certify(&net, &options(cli, *method)?).map_err(|e| e.to_string())?;
            let text = cert.document.to_json() + "\n";
            match output {
                Some(path) => {
                    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => print!("{text}"),
            }
            eprintln!(
                "achieved {}  bound {}  status {}  components {}",
                format_decimal(&cert.achieved.modularity, 6),
                format_decimal(&cert.bound(), 6),
                cert.status(),
                cert.document.components.len()
            );
        }
        Command::Verify {
            certificate,
            network,
        } => return verify(cli, certificate, network.as_deref()),
        Command::Bench {
            names,
            method,
            corpus,
        } => bench(cli, names, *method, corpus.as_deref())?,
        Command::Gen {
            nodes,
            communities,
            p_in,
            p_out,
            weight_scale,
            output,
        } => {
            let net =
                generate_planted(*nodes, *communities, *p_in, *p_out, *weight_scale, cli.seed)
                    .map_err(|e| e.to_string())?;
            let text = format!(
                "# planted partition: {nodes} nodes, {communities} communities, p_in {p_in}, p_out {p_out}, seed {}\n{}",
                cli.seed,
                write_edge_list(&net)
            );
            match output {
                Some(path) => {
                    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => print!("{text}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn options(cli: &Cli, method: MethodArg) -> CliResult<CertifyOptions> {
    let strategy: Strategy = cli
        .strategy
        .parse()
        .map_err(|e: modbound::Error| e.to_string())?;
    if cli.tries_per_k == 0 {
        return Err("--tries-per-k must be at least 1".into());
    }
    Ok(CertifyOptions {
        method: method.into(),
        max_subnet_size: cli.max_subnet_size,
        chains: ChainOptions {
            strategy,
            seed: cli.seed,
            tries_per_k: cli.tries_per_k,
            path_budget: cli.budget,
            ..ChainOptions::default()
        },
        optimizer: OptimizerConfig {
            seed: cli.seed,
            ..OptimizerConfig::default()
        },
        ..CertifyOptions::default()
    })
}

/// Reads an edge list from `source`, or a bundled network for `@name`.
fn load(source: &str, directed: bool) -> CliResult<Network> {
    if let Some(name) = source.strip_prefix('@') {
        let entry = corpus::find(name).ok_or_else(|| {
            let names: Vec<&str> = corpus::BUNDLED.iter().map(|e| e.name).collect();
            format!(
                "no bundled network {name:?}; available: {}",
                names.join(", ")
            )
        })?;
        return entry.network().map_err(|e| e.to_string());
    }
    let text = fs::read_to_string(source).map_err(|e| format!("{source}: {e}"))?;
    parse_edge_list(&text, directed).map_err(|e| format!("{source}: {e}"))
}

fn score(cli: &Cli, network: &str, partition: Option<&Path>) -> CliResult<ExitCode> {
    let net = load(network, cli.directed)?;
    let sm = ScoreMatrix::from_network(&net).map_err(|e| e.to_string())?;
    let n = net.node_count();
    let positive = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| sm.pair(a, b) > 0)
        .count();
    let mut rows = vec![
        ("nodes", n.to_string(), n.to_string()),
        (
            "edges",
            net.edge_count().to_string(),
            net.edge_count().to_string(),
        ),
        ("positive_pairs", positive.to_string(), positive.to_string()),
        (
            "diagonal_sum",
            format_decimal(&sm.value(sm.diag_total_units()), 6),
            format_rational(&sm.value(sm.diag_total_units())),
        ),
        (
            "trivial_bound",
            format_decimal(&sm.trivial_upper_bound(), 6),
            format_rational(&sm.trivial_upper_bound()),
        ),
    ];
    if let Some(path) = partition {
        let p = read_partition(path, &net)?;
        let q = sm.modularity(&p).map_err(|e| e.to_string())?;
        rows.push(("modularity", format_decimal(&q, 6), format_rational(&q)));
    }
    match cli.format {
        Format::Table => {
            for (k, v, exact) in rows {
                println!("{k:<16}{v:>12}  {exact}");
            }
        }
        Format::Csv => {
            println!("quantity,value,exact");
            for (k, v, exact) in rows {
                println!("{k},{v},{exact}");
            }
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows
                .into_iter()
                .map(|(k, _, exact)| (k.to_string(), json!(exact)))
                .collect();
            println!("{}", serde_json::to_string_pretty(&map).expect("json"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_partition(path: &Path, net: &Network) -> CliResult<Partition> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut raw = vec![usize::MAX; net.node_count()];
    let mut names: Vec<String> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(label), Some(community), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(format!(
                "{}:{}: expected \"<label> <community>\"",
                path.display(),
                i + 1
            ));
        };
        let v = net
            .id(label)
            .ok_or_else(|| format!("{}:{}: unknown node {label:?}", path.display(), i + 1))?;
        let c = names
            .iter()
            .position(|n| n == community)
            .unwrap_or_else(|| {
                names.push(community.to_string());
                names.len() - 1
            });
        raw[v] = c;
    }
    if let Some(v) = raw.iter().position(|&c| c == usize::MAX) {
        return Err(format!("node {:?} has no community", net.label(v)));
    }
    Ok(Partition::new(&raw))
}

fn print_partition(format: Format, net: &Network, p: &Partition, q: &modbound::Rational) {
    let communities: Vec<Vec<&str>> = p
        .communities()
        .into_iter()
        .map(|c| c.into_iter().map(|v| net.label(v)).collect())
        .collect();
    match format {
        Format::Table => {
            println!(
                "modularity {} ({})",
                format_decimal(q, 7),
                format_rational(q)
            );
            for (i, c) in communities.iter().enumerate() {
                println!("{:>3}: {}", i + 1, c.join(" "));
            }
        }
        Format::Csv => {
            println!("node,community");
            for (i, c) in communities.iter().enumerate() {
                for v in c {
                    println!("{v},{}", i + 1);
                }
            }
        }
        Format::Json => {
            let doc = json!({ "modularity": format_rational(q), "communities": communities });
            println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
        }
    }
}

fn print_records(format: Format, records: &[BenchRecord]) {
    match format {
        Format::Table => print!("{}", format_table(records)),
        Format::Csv => print!("{}", format_csv(records)),
        Format::Json => {
            let rows: Vec<_> = records
                .iter()
                .map(|r| {
                    json!({
                        "network": r.name,
                        "nodes": r.nodes,
                        "edges": r.edges,
                        "achieved": format_rational(&r.achieved),
                        "bound": format_rational(&r.bound),
                        "ratio_percent": r.ratio(),
                        "status": r.status.to_string(),
                        "seconds": r.seconds,
                        "reference": r.reference.as_ref().map(|(a, b)| json!({ "achieved": a, "bound": b })),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("json"));
        }
    }
}

fn verify(cli: &Cli, path: &Path, network: Option<&str>) -> CliResult<ExitCode> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Ok(ExitCode::from(2));
        }
    };
    let doc = match CertificateDocument::from_json(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Ok(ExitCode::from(2));
        }
    };
    let outcome = match network {
        Some(source) => verify_against(&doc, &load(source, doc.network.directed || cli.directed)?),
        None => verify_document(&doc),
    };
    match outcome {
        Ok(v) => {
            println!(
                "valid: bound {} ({}), achieved {}, status {}, {} components",
                format_decimal(&v.bound, 6),
                format_rational(&v.bound),
                format_rational(&v.achieved),
                v.status,
                v.components
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(violation) => {
            println!("invalid: {violation}");
            Ok(ExitCode::from(1))
        }
    }
}

fn bench(cli: &Cli, names: &[String], method: MethodArg, dir: Option<&Path>) -> CliResult<()> {
    let mut inputs = Vec::new();
    let reference = |a: Option<&str>, b: Option<&str>| Some((a?.to_string(), b?.to_string()));
    let wanted =
        |name: &str| names.is_empty() || names.iter().any(|n| n.eq_ignore_ascii_case(name));
    for entry in corpus::BUNDLED.iter().filter(|e| wanted(e.name)) {
        inputs.push(BenchInput {
            name: entry.name.to_string(),
            network: entry.network().map_err(|e| e.to_string())?,
            reference: reference(entry.reference_achieved, entry.reference_bound),
        });
    }
    for &(name, directed, achieved, bound) in corpus::EXTERNAL.iter().filter(|e| wanted(e.0)) {
        let path = dir.map(|d| d.join(format!("{name}.txt")));
        match path.filter(|p| p.exists()) {
            Some(p) => inputs.push(BenchInput {
                name: name.to_string(),
                network: load(&p.to_string_lossy(), directed)?,
                reference: reference(Some(achieved), Some(bound)),
            }),
            None if !names.is_empty() || dir.is_some() => {
                eprintln!("skipping {name}: {name}.txt not found")
            }
            None => {}
        }
    }
    for n in names {
        let known = corpus::BUNDLED
            .iter()
            .any(|e| e.name.eq_ignore_ascii_case(n))
            || corpus::EXTERNAL.iter().any(|e| e.0.eq_ignore_ascii_case(n));
        if !known {
            eprintln!("skipping {n}: not a benchmark network");
        }
    }
    let records = run_benchmark(&inputs, &options(cli, method)?).map_err(|e| e.to_string())?;
    print_records(cli.format, &records);
    Ok(())
}
