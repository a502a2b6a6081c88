//! Plain-text exchange formats.
//!
//! Every file starts with `# key: value` header lines. Floats are written in
//! Rust's shortest round-trip form except JSA amplitudes, which use 17
//! significant digits. Readers skip any other `#` lines.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::biphoton::JsaGrid;
use crate::error::{Error, Result};
use crate::grid::{FreqGrid1D, Grid2D};
use crate::spectrometer::{EventBatch, EventRecord, Histogram1D, Histogram2D};

/// Ordered `# key: value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header {
    pub entries: Vec<(String, String)>,
}

impl Header {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(())
    }

    fn absorb(&mut self, line: &str) {
        if let Some((k, v)) = line.trim_start_matches('#').split_once(':') {
            self.entries.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(e.to_string())
}

fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("line {line}: '{s}' is not a number")))
}

/// Named columns of equal length.
pub fn write_columns_csv(w: &mut impl Write, header: &Header, names: &[&str], columns: &[&[f64]]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.len());
    if names.len() != columns.len() {
        return Err(Error::LengthMismatch { expected: columns.len(), actual: names.len() });
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch { expected: n, actual: c.len() });
    }
    header.write(w).map_err(io_err)?;
    writeln!(w, "{}", names.join(",")).map_err(io_err)?;
    let mut line = String::new();
    for i in 0..n {
        line.clear();
        for (k, c) in columns.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            line.push_str(&format!("{:e}", c[i]));
        }
        writeln!(w, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// Real matrix with axis values: the first row holds the column axis after
/// `corner`, each following row starts with its row-axis value. A numeric
/// corner (the column count) makes the layout gnuplot's nonuniform matrix.
pub fn write_matrix_csv(
    w: &mut impl Write,
    header: &Header,
    corner: &str,
    rows: &[f64],
    cols: &[f64],
    values: &[f64],
) -> Result<()> {
    if values.len() != rows.len() * cols.len() {
        return Err(Error::LengthMismatch { expected: rows.len() * cols.len(), actual: values.len() });
    }
    header.write(w).map_err(io_err)?;
    let head: Vec<String> = std::iter::once(corner.to_string()).chain(cols.iter().map(|c| format!("{c:e}"))).collect();
    writeln!(w, "{}", head.join(",")).map_err(io_err)?;
    let mut line = String::new();
    for (i, r) in rows.iter().enumerate() {
        line.clear();
        line.push_str(&format!("{r:e}"));
        for v in &values[i * cols.len()..(i + 1) * cols.len()] {
            line.push(',');
            line.push_str(&full(*v));
        }
        writeln!(w, "{line}").map_err(io_err)?;
    }
    Ok(())
}

fn axis_entry(a: &FreqGrid1D) -> String {
    format!("{} {} {}", full(a.center()), full(a.span()), a.len())
}

fn parse_axis(s: &str) -> Result<FreqGrid1D> {
    let p: Vec<&str> = s.split_whitespace().collect();
    if p.len() != 3 {
        return Err(Error::Parse(format!("axis entry '{s}' needs center, span and length")));
    }
    let n = p[2].parse::<usize>().map_err(|_| Error::Parse(format!("bad axis length '{}'", p[2])))?;
    FreqGrid1D::new(parse_f64(p[0], 0)?, parse_f64(p[1], 0)?, n)
}

/// JSA as a signal × idler matrix of real parts, followed by a second
/// matrix of imaginary parts when the amplitude is complex. The axis
/// parameters go into the header so that the grid is rebuilt exactly.
pub fn write_jsa_csv(w: &mut impl Write, header: &Header, jsa: &JsaGrid) -> Result<()> {
    let g = jsa.grid();
    let (a1, a2) = (*g.axis1(), *g.axis2());
    let h = header
        .clone()
        .with("axis_signal", axis_entry(&a1))
        .with("axis_idler", axis_entry(&a2))
        .with("complex", !jsa.is_real())
        .with("rows", "nu_signal_thz")
        .with("cols", "nu_idler_thz");
    let corner = a2.len().to_string();
    let re: Vec<f64> = g.values().iter().map(|z| z.re).collect();
    write_matrix_csv(w, &h.clone().with("part", "re"), &corner, &a1.values(), &a2.values(), &re)?;
    if !jsa.is_real() {
        let im: Vec<f64> = g.values().iter().map(|z| z.im).collect();
        write_matrix_csv(w, &Header::new().with("part", "im"), &corner, &a1.values(), &a2.values(), &im)?;
    }
    Ok(())
}

/// Inverse of [`write_jsa_csv`].
pub fn read_jsa_csv(r: impl BufRead) -> Result<JsaGrid> {
    let mut header = Header::new();
    let mut parts: Vec<Vec<f64>> = Vec::new();
    let mut expect_axis_row = false;
    for (k, line) in r.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            header.absorb(line);
            if line.contains("part:") {
                parts.push(Vec::new());
                expect_axis_row = true;
            }
            continue;
        }
        if expect_axis_row {
            expect_axis_row = false;
            continue;
        }
        let cur = parts.last_mut().ok_or_else(|| Error::Parse("data before any 'part' header".into()))?;
        for field in line.split(',').skip(1) {
            cur.push(parse_f64(field, k + 1)?);
        }
    }
    let a1 = parse_axis(header.get("axis_signal").ok_or_else(|| Error::Parse("missing axis_signal".into()))?)?;
    let a2 = parse_axis(header.get("axis_idler").ok_or_else(|| Error::Parse("missing axis_idler".into()))?)?;
    let n = a1.len() * a2.len();
    let re = parts.first().ok_or_else(|| Error::Parse("no amplitude matrix".into()))?;
    if re.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: re.len() });
    }
    let values: Vec<Complex64> = match parts.get(1) {
        Some(im) if im.len() == n => re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        Some(im) => return Err(Error::LengthMismatch { expected: n, actual: im.len() }),
        None => re.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
    };
    JsaGrid::from_grid(Grid2D::from_values(a1, a2, values)?)
}

/// One row per bin with both edges.
pub fn write_histogram1d_csv(w: &mut impl Write, header: &Header, h: &Histogram1D, unit: &str) -> Result<()> {
    let hd = header.clone().with("total", h.total()).with("dropped", h.dropped);
    hd.write(w).map_err(io_err)?;
    writeln!(w, "bin_lo_{unit},bin_hi_{unit},count").map_err(io_err)?;
    let e = h.bins.edges();
    for (k, c) in h.counts.iter().enumerate() {
        writeln!(w, "{:e},{:e},{c}", e[k], e[k + 1]).map_err(io_err)?;
    }
    Ok(())
}

/// One row per cell, row-major, with all four edges.
pub fn write_histogram2d_csv(w: &mut impl Write, header: &Header, h: &Histogram2D, unit: &str) -> Result<()> {
    let hd = header.clone().with("total", h.total()).with("dropped", h.dropped);
    hd.write(w).map_err(io_err)?;
    writeln!(w, "nu1_lo_{unit},nu1_hi_{unit},nu2_lo_{unit},nu2_hi_{unit},count").map_err(io_err)?;
    let (ex, ey) = (h.x.edges(), h.y.edges());
    for i in 0..h.x.n {
        for j in 0..h.y.n {
            writeln!(w, "{:e},{:e},{:e},{:e},{}", ex[i], ex[i + 1], ey[j], ey[j + 1], h.get(i, j)).map_err(io_err)?;
        }
    }
    Ok(())
}

/// `trigger_index t1_ns t2_ns`, `-` for a missing click.
pub fn write_events(w: &mut impl Write, header: &Header, batch: &EventBatch) -> Result<()> {
    let mut hd = header.clone().with("seed", batch.seed).with("triggers", batch.triggers);
    if let Some(h) = &batch.config_hash {
        if header.get("config_hash").is_none() {
            hd = hd.with("config_hash", h);
        }
    }
    hd.write(w).map_err(io_err)?;
    let t = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:e}"));
    for r in &batch.records {
        writeln!(w, "{} {} {}", r.trigger, t(r.t1_ns), t(r.t2_ns)).map_err(io_err)?;
    }
    Ok(())
}

/// Reads the line format of [`write_events`]. Header fields `seed`,
/// `triggers` and `config_hash` are optional; without `triggers` the count
/// is one past the last trigger index.
pub fn read_events(r: impl BufRead) -> Result<EventBatch> {
    let mut header = Header::new();
    let mut records = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            header.absorb(line);
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 fields, found {}", k + 1, f.len())));
        }
        let trigger =
            f[0].parse::<u64>().map_err(|_| Error::Parse(format!("line {}: bad trigger '{}'", k + 1, f[0])))?;
        let t = |s: &str| -> Result<Option<f64>> {
            if s == "-" {
                return Ok(None);
            }
            let v = parse_f64(s, k + 1)?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("line {}: time must be finite", k + 1)));
            }
            Ok(Some(v))
        };
        records.push(EventRecord { trigger, t1_ns: t(f[1])?, t2_ns: t(f[2])? });
    }
    let num = |key: &str| -> Result<Option<u64>> {
        header.get(key).map(|v| v.parse::<u64>().map_err(|_| Error::Parse(format!("bad {key} '{v}'")))).transpose()
    };
    let triggers = match num("triggers")? {
        Some(t) => t,
        None => records.last().map_or(0, |r: &EventRecord| r.trigger + 1),
    };
    Ok(EventBatch {
        records,
        triggers,
        seed: num("seed")?.unwrap_or(0),
        config_hash: header.get("config_hash").map(str::to_string),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrometer::UniformBins;

    fn jsa(complex: bool) -> JsaGrid {
        let a = FreqGrid1D::new(189.262_915_404_040_4, 9.567, 7).unwrap();
        let b = FreqGrid1D::new(189.1, 3.3, 5).unwrap();
        let g = Grid2D::from_fn(a, b, |i, j| {
            let x = ((i * 5 + j) as f64 * 0.731).sin() / 3.0 + 1e-300 * i as f64;
            Complex64::new(x, if complex { x.cos() * 1e-7 } else { 0.0 })
        });
        JsaGrid::from_grid(g).unwrap()
    }

    #[test]
    fn jsa_round_trip_is_bit_exact() {
        for complex in [false, true] {
            let f = jsa(complex);
            let mut buf = Vec::new();
            write_jsa_csv(&mut buf, &Header::new().with("tool_version", "x"), &f).unwrap();
            let back = read_jsa_csv(buf.as_slice()).unwrap();
            assert_eq!(back.grid().axis1(), f.grid().axis1());
            assert_eq!(back.grid().axis2(), f.grid().axis2());
            for (a, b) in back.grid().values().iter().zip(f.grid().values()) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn events_round_trip() {
        let batch = EventBatch {
            records: vec![
                EventRecord { trigger: 0, t1_ns: Some(1.25), t2_ns: None },
                EventRecord { trigger: 3, t1_ns: Some(6.0 + 1e-12), t2_ns: Some(7.123_456_789_012_345) },
                EventRecord { trigger: 9, t1_ns: None, t2_ns: Some(0.5) },
            ],
            triggers: 12,
            seed: 42,
            config_hash: Some("abc".into()),
        };
        let mut buf = Vec::new();
        write_events(&mut buf, &Header::new(), &batch).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\n0 1.25e0 -\n"));
        assert_eq!(read_events(buf.as_slice()).unwrap(), batch);
    }

    #[test]
    fn events_without_header_and_bad_lines() {
        let b = read_events("5 1.0 2.0\n7 - 3\n".as_bytes()).unwrap();
        assert_eq!(b.triggers, 8);
        assert_eq!(b.coincidence_count(), 1);
        assert!(read_events("1 2\n".as_bytes()).is_err());
        assert!(read_events("x 1 2\n".as_bytes()).is_err());
        assert!(read_events("1 inf 2\n".as_bytes()).is_err());
    }

    #[test]
    fn histogram_csv_has_edges() {
        let mut h = Histogram1D::new(UniformBins::centered(10.0, 15.0).unwrap());
        h.fill(0.0);
        h.fill(12.0);
        let mut buf = Vec::new();
        write_histogram1d_csv(&mut buf, &Header::new().with("config_hash", "h"), &h, "ps").unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config_hash: h");
        assert_eq!(lines[3], "bin_lo_ps,bin_hi_ps,count");
        assert_eq!(lines[4], "-1.5e1,-5e0,0");
        assert_eq!(lines[5], "-5e0,5e0,1");
        assert_eq!(lines.len(), 4 + 3);
    }

    #[test]
    fn columns_reject_ragged_input() {
        let mut buf = Vec::new();
        assert!(write_columns_csv(&mut buf, &Header::new(), &["a", "b"], &[&[1.0, 2.0], &[1.0]]).is_err());
        write_columns_csv(&mut buf, &Header::new(), &["a"], &[&[0.5]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a\n5e-1\n");
    }
}
