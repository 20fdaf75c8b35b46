//! Text formats for classes and aggregators.
//!
//! Class file: line 1 is `<domain_size> <member_count>`, then one line of
//! `domain_size` characters from {0,1} per member. Aggregator file: line 1
//! is the arity k, line 2 the 2^k-character truth table in input-index
//! order with the first input most significant.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::hclass::{Aggregator, Domain, Hypothesis, HypothesisClass};

#[derive(Debug)]
pub struct ParsedClass {
    pub class: HypothesisClass,
    /// True when the file listed duplicate rows that were merged.
    pub had_duplicates: bool,
}

pub fn parse_class_text(text: &str) -> Result<ParsedClass> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let mut parts = header.split_whitespace();
    let domain_size: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::Parse {
            line: 1,
            msg: "header must be `<domain_size> <member_count>`".into(),
        })?;
    let member_count: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::Parse {
            line: 1,
            msg: "header must be `<domain_size> <member_count>`".into(),
        })?;
    if parts.next().is_some() {
        return Err(Error::Parse {
            line: 1,
            msg: "trailing tokens after header".into(),
        });
    }
    let domain = Domain::new(domain_size).map_err(|_| Error::Parse {
        line: 1,
        msg: "domain size must be at least 1".into(),
    })?;

    let mut rows = Vec::with_capacity(member_count);
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let row = raw.trim_end();
        if row.is_empty() {
            continue;
        }
        if row.len() != domain_size {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("row has {} characters, expected {domain_size}", row.len()),
            });
        }
        let bits = Bits::from_str01(row).ok_or(Error::Parse {
            line: line_no,
            msg: "row contains characters outside {0,1}".into(),
        })?;
        rows.push(Hypothesis::new(bits));
    }
    if rows.len() != member_count {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "header promises {member_count} members, file has {}",
                rows.len()
            ),
        });
    }
    let n_rows = rows.len();
    let class = HypothesisClass::from_rows(domain, rows)?;
    Ok(ParsedClass {
        had_duplicates: class.len() != n_rows,
        class,
    })
}

pub fn class_to_text(class: &HypothesisClass) -> String {
    let mut out = format!("{} {}\n", class.domain().size(), class.len());
    for m in class.members() {
        out.push_str(&m.string01());
        out.push('\n');
    }
    out
}

/// Serialize raw rows (duplicates preserved) in the class file format.
pub fn rows_to_text(domain_size: usize, rows: &[Hypothesis]) -> String {
    let mut out = format!("{} {}\n", domain_size, rows.len());
    for m in rows {
        out.push_str(&m.string01());
        out.push('\n');
    }
    out
}

pub fn parse_aggregator_text(text: &str) -> Result<Aggregator> {
    let mut lines = text.lines();
    let arity: usize = lines
        .next()
        .and_then(|t| t.trim().parse().ok())
        .ok_or(Error::Parse {
            line: 1,
            msg: "first line must be the arity".into(),
        })?;
    let table_line = lines.next().ok_or(Error::Parse {
        line: 2,
        msg: "missing truth table line".into(),
    })?;
    let table = Bits::from_str01(table_line.trim_end()).ok_or(Error::Parse {
        line: 2,
        msg: "truth table contains characters outside {0,1}".into(),
    })?;
    Aggregator::new(arity, table).map_err(|e| Error::Parse {
        line: 2,
        msg: e.to_string(),
    })
}

pub fn aggregator_to_text(g: &Aggregator) -> String {
    format!("{}\n{}\n", g.arity(), g.truth_table().string01())
}
