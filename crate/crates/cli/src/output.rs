//! Number formatting and small table helpers.

use std::io::{self, Write};

/// Significant digits printed for proportions and metrics.
pub const SIG_DIGITS: usize = 6;

/// `x` with `sig` significant digits, switching to exponent notation for
/// very small or very large magnitudes.
pub fn sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&exp) {
        return format!("{:.*e}", sig.saturating_sub(1), x);
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn num(x: f64) -> String {
    sig(x, SIG_DIGITS)
}

/// Left-aligned first column, right-aligned others, two spaces apart.
pub fn write_aligned<W: Write + ?Sized>(out: &mut W, rows: &[Vec<String>]) -> io::Result<()> {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        writeln!(out, "{}", line.trim_end())?;
    }
    Ok(())
}

pub fn write_tsv<W: Write + ?Sized>(out: &mut W, rows: &[Vec<String>]) -> io::Result<()> {
    for row in rows {
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(num(std::f64::consts::LOG10_2), "0.301030");
        assert_eq!(num(0.25), "0.250000");
        assert_eq!(num(1.0), "1.00000");
        assert_eq!(num(123456.789), "123457");
        assert_eq!(num(0.0009988436967), "0.000998844");
        assert_eq!(num(2.5e-17), "2.50000e-17");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.5), "-0.500000");
    }

    #[test]
    fn aligned_columns() {
        let mut buf = Vec::new();
        let rows = vec![vec!["a".into(), "1".into()], vec!["bbb".into(), "22".into()]];
        write_aligned(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a     1\nbbb  22\n");
    }
}
