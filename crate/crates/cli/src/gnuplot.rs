//! gnuplot scripts for the CSV files of an output directory.

use std::path::Path;

use crate::error::CliError;

fn script(name: &str) -> Option<String> {
    let stem = name.strip_suffix(".csv")?;
    let body = if name == "marginals.csv" {
        format!(
            "set xlabel 'wavelength (nm)'\nset ylabel 'S'\n\
             plot '{name}' every ::1 using 2:3 with lines title 'signal', \
             '' every ::1 using 2:4 with lines title 'idler'\n"
        )
    } else if name == "dip_scan.csv" {
        format!(
            "set xlabel 'delay (fs)'\nset ylabel 'P'\n\
             plot '{name}' every ::1 using ($1*1e3):3 with linespoints notitle\n"
        )
    } else if stem.starts_with("h_") {
        format!(
            "set xlabel 'Δν (THz)'\nset ylabel 'H'\n\
             plot '{name}' every ::1 using 1:2 with lines title 'H', \
             '' every ::1 using 1:3 with lines dashtype 2 title 'large delay'\n"
        )
    } else if stem.starts_with("toa_") {
        format!(
            "set xlabel 't2 - t1 (ps)'\nset ylabel 'counts'\n\
             plot '{name}' every ::1 using (($1+$2)/2):3 with steps notitle\n"
        )
    } else if stem.starts_with("csi_hist_") {
        format!(
            "set xlabel 'ν1 (THz)'\nset ylabel 'ν2 (THz)'\nset size square\n\
             plot '{name}' every ::1 using (($1+$2)/2):(($3+$4)/2):5 with points pt 5 ps 0.4 palette notitle\n"
        )
    } else if stem.starts_with("csi_") || name == "jsa.csv" {
        format!(
            "set xlabel 'ν1 (THz)'\nset ylabel 'ν2 (THz)'\nset size square\n\
             plot '{name}' nonuniform matrix with image notitle\n"
        )
    } else {
        return None;
    };
    Some(format!("set datafile separator ','\nset terminal pngcairo size 900,700\nset output '{stem}.png'\n{body}"))
}

/// Writes `<stem>.gp` next to every recognized CSV in `dir`; returns the
/// script names in sorted order.
pub fn write_scripts(dir: &Path) -> Result<Vec<String>, CliError> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir)?.filter_map(|e| e.ok()).filter_map(|e| e.file_name().into_string().ok()).collect();
    names.sort();
    let mut written = Vec::new();
    for name in names {
        if let Some(text) = script(&name) {
            let gp = format!("{}.gp", name.trim_end_matches(".csv"));
            std::fs::write(dir.join(&gp), text)?;
            written.push(gp);
        }
    }
    Ok(written)
}
