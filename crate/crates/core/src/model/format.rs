//! The `.bnet` text format.
//!
//! ```text
//! # comment
//! var <name> <cardinality> <value-name>...
//! cpt <child> | <parent>...
//! <row of cardinality decimals>      # one row per parent instantiation,
//!                                    # last parent varies fastest
//! ```
//!
//! Rows may be split over several lines; each row is checked to sum to 1.
//! Serialization writes every probability with 17 significant digits so
//! parsing it back is exact.

use crate::error::{Error, Result};
use crate::scalar::Prob;

use super::{Network, NetworkBuilder};

struct Token<'a> {
    line: usize,
    text: &'a str,
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses and validates a network.
pub fn parse_network<T: Prob>(text: &str) -> Result<Network<T>> {
    // One token list per line keeps line numbers and header boundaries.
    let lines: Vec<Vec<Token<'_>>> = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            content
                .split_whitespace()
                .map(|t| Token { line: i + 1, text: t })
                .collect()
        })
        .collect();

    let mut builder = NetworkBuilder::<T>::new();
    let mut i = 0;
    while i < lines.len() {
        let toks = &lines[i];
        let Some(head) = toks.first() else {
            i += 1;
            continue;
        };
        match head.text {
            "var" => {
                if toks.len() < 3 {
                    return Err(syntax(head.line, "expected `var <name> <cardinality> <values>...`"));
                }
                let name = toks[1].text;
                let card: usize = toks[2]
                    .text
                    .parse()
                    .map_err(|_| syntax(head.line, format!("bad cardinality `{}`", toks[2].text)))?;
                let values: Vec<String> = toks[3..].iter().map(|t| t.text.to_string()).collect();
                if values.len() != card {
                    return Err(syntax(
                        head.line,
                        format!("`{name}` declares {card} values but names {}", values.len()),
                    ));
                }
                if builder.find(name).is_some() {
                    return Err(syntax(head.line, format!("duplicate variable `{name}`")));
                }
                builder.add_variable(name, values);
                i += 1;
            }
            "cpt" => {
                if toks.len() < 3 || toks[2].text != "|" {
                    return Err(syntax(head.line, "expected `cpt <child> | <parents>...`"));
                }
                let child = builder
                    .find(toks[1].text)
                    .ok_or_else(|| Error::UnknownVariable(toks[1].text.to_string()))?;
                if builder.has_cpt(child) {
                    return Err(syntax(head.line, format!("second cpt for `{}`", toks[1].text)));
                }
                let parents = toks[3..]
                    .iter()
                    .map(|t| {
                        builder
                            .find(t.text)
                            .ok_or_else(|| Error::UnknownVariable(t.text.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let card = builder.cardinality(child);
                let rows: usize = parents.iter().map(|&p| builder.cardinality(p)).product();
                let wanted = rows * card;
                let mut table = Vec::with_capacity(wanted);
                let mut last_line = head.line;
                i += 1;
                while table.len() < wanted {
                    let Some(row_toks) = lines.get(i) else {
                        return Err(syntax(
                            last_line,
                            format!(
                                "cpt of `{}` ends after {} of {wanted} entries",
                                toks[1].text,
                                table.len()
                            ),
                        ));
                    };
                    if let Some(t) = row_toks.first() {
                        if t.text == "var" || t.text == "cpt" {
                            return Err(syntax(
                                t.line,
                                format!(
                                    "cpt of `{}` ends after {} of {wanted} entries",
                                    toks[1].text,
                                    table.len()
                                ),
                            ));
                        }
                    }
                    for t in row_toks {
                        if table.len() == wanted {
                            return Err(syntax(t.line, format!("unexpected token `{}`", t.text)));
                        }
                        let p: f64 = t
                            .text
                            .parse()
                            .map_err(|_| syntax(t.line, format!("bad probability `{}`", t.text)))?;
                        table.push(T::lit(p));
                        last_line = t.line;
                    }
                    i += 1;
                }
                builder.set_cpt(child, parents, table);
            }
            other => return Err(syntax(head.line, format!("unexpected token `{other}`"))),
        }
    }
    builder.build()
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn format_probability(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{v:.decimals$}");
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Canonical text form: variables in id order, then one cpt block each.
pub fn serialize_network<T: Prob>(net: &Network<T>) -> String {
    let mut out = String::new();
    for v in net.variables() {
        out.push_str(&format!("var {} {}", v.name, v.cardinality()));
        for name in &v.value_names {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
    }
    for cpt in net.cpts() {
        out.push_str(&format!("cpt {} |", net.name(cpt.child())));
        for &p in cpt.parents() {
            out.push(' ');
            out.push_str(net.name(p));
        }
        out.push('\n');
        for row in 0..cpt.row_count() {
            let cells: Vec<String> = cpt.row(row).iter().map(|p| format_probability(p.as_f64())).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Ten decimals with trailing zeros trimmed.
pub fn format_decimal(p: f64) -> String {
    let p = if p.abs() < 5e-11 { 0.0 } else { p };
    let s = format!("{p:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn smallest_file() {
        let net: Network = parse_network("var A 2 a1 a0\ncpt A |\n0.3 0.7\n").unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.edge_count(), 0);
    }

    #[test]
    fn net_a_text_matches_fixture() {
        let net: Network = parse_network(fixtures::NET_A).unwrap();
        assert_eq!(net, fixtures::net_a());
        assert_eq!(net.children(0), &[1]);
    }

    #[test]
    fn row_sum_error_names_row() {
        let text = "var A 2 a b\nvar B 2 x y\ncpt A |\n0.5 0.5\ncpt B | A\n0.5 0.5\n0.5 0.49\n";
        match parse_network::<f64>(text) {
            Err(Error::RowSum { child, row, .. }) => {
                assert_eq!(child, "B");
                assert_eq!(row, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line() {
        let text = "var A 2 a b\n\ncpt A |\n0.5 zero\n";
        assert!(matches!(parse_network::<f64>(text), Err(Error::Syntax { line: 4, .. })));
        assert!(matches!(
            parse_network::<f64>("bogus\n"),
            Err(Error::Syntax { line: 1, .. })
        ));
        let short = "var A 2 a b\ncpt A |\n0.5\n";
        assert!(matches!(parse_network::<f64>(short), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unknown_parent_and_cycle() {
        let text = "var A 2 a b\ncpt A | Q\n0.5 0.5\n";
        assert_eq!(parse_network::<f64>(text), Err(Error::UnknownVariable("Q".into())));
        let text = "var A 2 a b\nvar B 2 a b\ncpt A | B\n0.5 0.5\n0.5 0.5\ncpt B | A\n0.5 0.5\n0.5 0.5\n";
        assert!(matches!(parse_network::<f64>(text), Err(Error::Cycle(_))));
    }

    #[test]
    fn comments_and_split_rows() {
        let text = "# header\nvar A 2 a b # trailing\ncpt A |\n0.25\n0.75\n";
        let net: Network = parse_network(text).unwrap();
        assert_eq!(net.cpt(0).table(), &[0.25, 0.75]);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_probability(0.3), "0.29999999999999999");
        assert_eq!(format_probability(1.0), "1");
        assert_eq!(format_probability(0.5), "0.5");
        assert_eq!(format_probability(1e-7), "9.9999999999999995e-8");
        for v in [0.1, 0.7145, 1.0 / 3.0, 2.5e-9, 0.999999999] {
            assert_eq!(format_probability(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn serialize_is_fixpoint() {
        let net = fixtures::net_d();
        let text = serialize_network(&net);
        let back: Network = parse_network(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(serialize_network(&back), text);
    }

    #[test]
    fn probability_formatting() {
        assert_eq!(format_decimal(0.7145), "0.7145");
        assert_eq!(format_decimal(1.0), "1");
        assert_eq!(format_decimal(0.0), "0");
        assert_eq!(format_decimal(1e-13), "0");
        assert_eq!(format_decimal(0.12345678901234), "0.123456789");
    }
}
