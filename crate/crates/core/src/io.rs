//! Edge-list text format.
//!
//! One edge per line: `<labelA> <labelB> [weight]`, whitespace separated.
//! The weight defaults to 1 and may be an integer, a decimal or `n/d`; it is
//! read exactly. `#` starts a comment, blank lines are skipped.

use crate::error::{Error, Result};
use crate::network::{build_network, Network};
use crate::rational::{parse_rational, Rational};
use num_traits::{One, Signed};

pub fn parse_edge_list(text: &str, directed: bool) -> Result<Network> {
    let mut entries: Vec<(String, String, Rational)> = Vec::new();
    let mut lines = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let weight = match fields.len() {
            2 => Rational::one(),
            3 => parse_rational(fields[2]).ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("weight {:?} is not a number", fields[2]),
            })?,
            k => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 2 or 3 fields, found {k}"),
                })
            }
        };
        if weight.is_negative() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("negative weight {}", fields[2]),
            });
        }
        entries.push((fields[0].to_string(), fields[1].to_string(), weight));
        lines.push(line_no);
    }
    if entries.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no edges".into(),
        });
    }
    build_network(&entries, directed).map_err(|e| match e {
        Error::NegativeWeight { entry, weight, .. } => Error::Parse {
            line: lines[entry],
            message: format!("negative weight {weight}"),
        },
        other => other,
    })
}

/// Renders `net` back into the edge-list format. Undirected edges are
/// written once.
pub fn write_edge_list(net: &Network) -> String {
    let mut out = String::new();
    for (a, b, w) in net.edges() {
        if !net.is_directed() && a > b {
            continue;
        }
        let w = if w.is_integer() {
            w.to_integer().to_string()
        } else {
            crate::rational::format_rational(w)
        };
        out.push_str(&format!("{} {} {}\n", net.label(a), net.label(b), w));
    }
    out
}
