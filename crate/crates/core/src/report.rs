//! Benchmark records and their table and CSV renderings.

use std::time::Instant;

use num_traits::Zero;

use crate::certificate::Status;
use crate::certify::{certify, CertifyOptions};
use crate::error::Result;
use crate::network::Network;
use crate::rational::{format_decimal, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub achieved: Rational,
    pub bound: Rational,
    pub status: Status,
    pub seconds: f64,
    /// Published achieved modularity and bound, when known.
    pub reference: Option<(String, String)>,
}

impl BenchRecord {
    /// `100 * achieved / bound`, rounded half-even to two decimals.
    pub fn ratio(&self) -> String {
        if self.bound.is_zero() {
            return if self.achieved.is_zero() {
                "100.00".into()
            } else {
                "-".into()
            };
        }
        format_decimal(
            &(Rational::from_integer(100.into()) * &self.achieved / &self.bound),
            2,
        )
    }
}

#[derive(Clone, Debug)]
pub struct BenchInput {
    pub name: String,
    pub network: Network,
    pub reference: Option<(String, String)>,
}

/// Certifies each input in order.
pub fn run_benchmark(inputs: &[BenchInput], opts: &CertifyOptions) -> Result<Vec<BenchRecord>> {
    inputs
        .iter()
        .map(|input| {
            let start = Instant::now();
            let cert = certify(&input.network, opts)?;
            Ok(BenchRecord {
                name: input.name.clone(),
                nodes: input.network.node_count(),
                edges: input.network.edge_count(),
                achieved: cert.achieved.modularity.clone(),
                bound: cert.bound(),
                status: cert.status(),
                seconds: start.elapsed().as_secs_f64(),
                reference: input.reference.clone(),
            })
        })
        .collect()
}

const HEADER: [&str; 10] = [
    "Network",
    "Nodes",
    "Edges",
    "Achieved modularity",
    "Upper-bound modularity",
    "Ratio, %",
    "Status",
    "Time, s",
    "Reference achieved",
    "Reference bound",
];

fn cells(r: &BenchRecord) -> [String; 10] {
    let (ra, rb) = match &r.reference {
        Some((a, b)) => (a.clone(), b.clone()),
        None => ("-".into(), "-".into()),
    };
    [
        r.name.clone(),
        r.nodes.to_string(),
        r.edges.to_string(),
        format_decimal(&r.achieved, 6),
        format_decimal(&r.bound, 6),
        r.ratio(),
        r.status.to_string(),
        format!("{:.3}", r.seconds),
        ra,
        rb,
    ]
}

/// Aligned plain-text table.
pub fn format_table(records: &[BenchRecord]) -> String {
    let rows: Vec<[String; 10]> = records.iter().map(cells).collect();
    let mut width: Vec<usize> = HEADER.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |row: &[String]| {
        let mut s = String::new();
        for (i, (c, w)) in row.iter().zip(&width).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            if i == 0 || i == 6 {
                s.push_str(&format!("{c:<w$}"));
            } else {
                s.push_str(&format!("{c:>w$}"));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&HEADER.map(String::from));
    for row in &rows {
        out.push_str(&line(row));
    }
    out
}

/// CSV with exact rationals next to the rounded columns.
pub fn format_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(
        "network,nodes,edges,achieved,bound,ratio_percent,status,seconds,achieved_exact,bound_exact,reference_achieved,reference_bound\n",
    );
    for r in records {
        let c = cells(r);
        let reference = match &r.reference {
            Some((a, b)) => format!("{a},{b}"),
            None => ",".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            c[0],
            c[1],
            c[2],
            c[3],
            c[4],
            c[5],
            c[6],
            c[7],
            crate::rational::format_rational(&r.achieved),
            crate::rational::format_rational(&r.bound),
            reference
        ));
    }
    out
}
