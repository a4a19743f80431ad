//! Line-oriented instance files.
//!
//! Format: a header line `gas_limit gas_price min_tx_gas max_tx_gas`,
//! then one `gross_utility gas` pair per line in arrival order. Blank
//! lines and `#` comments are ignored.

use fifogap::{build_instance, BlockParams, ProblemInstance, Transaction};

use crate::error::CliError;

fn parse_floats(line: &str, line_no: usize, expected: usize) -> Result<Vec<f64>, CliError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expected {
        return Err(CliError::input(format!(
            "line {line_no}: expected {expected} numeric fields, found {}",
            fields.len()
        )));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>().map_err(|_| {
                CliError::input(format!("line {line_no}: {f:?} is not a number"))
            })
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<ProblemInstance, CliError> {
    let mut header: Option<(usize, BlockParams)> = None;
    let mut txs: Vec<Transaction> = Vec::new();
    let mut tx_lines: Vec<usize> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if header.is_none() {
            let v = parse_floats(line, line_no, 4)?;
            let params = BlockParams::new(v[0], v[1], v[2], v[3])
                .map_err(|e| CliError::input(format!("line {line_no}: {e}")))?;
            header = Some((line_no, params));
        } else {
            let v = parse_floats(line, line_no, 2)?;
            txs.push(Transaction::new(v[0], v[1]));
            tx_lines.push(line_no);
        }
    }

    let (_, params) = header.ok_or_else(|| {
        CliError::input("instance file is empty; expected a `gas_limit gas_price min_tx_gas max_tx_gas` header")
    })?;
    build_instance(&txs, params).map_err(|e| {
        // Model errors carry the transaction index; point at its line.
        let line = match e {
            fifogap::model::ModelError::GasOutOfBounds { index, .. }
            | fifogap::model::ModelError::InvalidGas { index, .. }
            | fifogap::model::ModelError::InvalidUtility { index, .. } => tx_lines.get(index),
            _ => None,
        };
        match line {
            Some(line) => CliError::input(format!("line {line}: {e}")),
            None => CliError::input(e.to_string()),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_transactions() {
        let inst = parse_instance("# demo\n5 0 3 4\n6 3\n4 4\n").unwrap();
        assert_eq!(inst.net_utilities(), &[6.0, 4.0]);
        assert_eq!(inst.gas(), &[3.0, 4.0]);
        assert_eq!(inst.gas_limit(), 5.0);
    }

    #[test]
    fn header_only_gives_empty_instance() {
        let inst = parse_instance("5 0 1 4\n").unwrap();
        assert!(inst.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_instance("5 0 1 4\n6 3\noops 4\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_instance("5 0 1 4\n6 3 9\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_instance("5 0 2 4\n6 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_instance("").is_err());
    }
}
