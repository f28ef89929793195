//! CSV emission and the drive-file reader.
//!
//! Numbers use Rust's shortest round-trip scientific form, so parsing a
//! written value gives back the identical `f64`.

use decoherence_core::coherence::CoherenceTrajectory;
use decoherence_core::drive::{Branch, DriveProfile, RootKind, RootPair};

use crate::CliError;

pub const DRIVE_HEADER: [&str; 8] = ["t", "x_plus", "x_minus", "x_chosen", "e_amplitude", "gated", "branch", "period_T"];

pub const EVOLVE_COLUMNS: [&str; 9] = [
    "re_rho_mp",
    "im_rho_mp",
    "abs_rho_mp",
    "re_c1",
    "im_c1",
    "c2",
    "det",
    "null_mode_abs",
    "other_mode_abs",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_records<I, R>(header: &[String], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    // writes into a Vec cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
}

pub fn drive_csv(profile: &DriveProfile) -> String {
    let header: Vec<String> = DRIVE_HEADER.iter().map(|h| h.to_string()).collect();
    let period = fmt_opt(profile.period_t);
    let rows = (0..profile.len()).map(|i| {
        let r = &profile.roots[i];
        [
            fmt_f64(profile.grid[i]),
            fmt_opt(r.x_plus),
            fmt_opt(r.x_minus),
            fmt_f64(profile.x_chosen[i]),
            fmt_f64(profile.e_amplitude[i]),
            u8::from(profile.gated[i]).to_string(),
            profile.branch[i].as_str().to_string(),
            period.clone(),
        ]
    });
    write_records(&header, rows)
}

fn parse_field(line: u64, field: &str) -> Result<Option<f64>, CliError> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| CliError::Config(format!("drive csv line {line}: bad number `{field}`")))
}

/// Reads a file written by [`drive_csv`]. The root kind is not stored, so
/// rows without roots come back as [`RootKind::Complex`].
pub fn read_drive_csv(text: &str) -> Result<DriveProfile, CliError> {
    let bad = |e: csv::Error| {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        CliError::Config(format!("drive csv line {line}: {e}"))
    };
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(bad)?;
    if header.is_empty() {
        return Err(CliError::Config("drive csv is empty".into()));
    }
    if header.iter().ne(DRIVE_HEADER) {
        return Err(CliError::Config("drive csv header does not match".into()));
    }
    let mut p = DriveProfile {
        grid: Vec::new(),
        roots: Vec::new(),
        x_chosen: Vec::new(),
        e_amplitude: Vec::new(),
        gated: Vec::new(),
        branch: Vec::new(),
        period_t: None,
    };
    for record in reader.records() {
        let f = record.map_err(bad)?;
        let line = f.position().map_or(0, |pos| pos.line());
        let need = |x: Option<f64>| x.ok_or_else(|| CliError::Config(format!("drive csv line {line}: missing value")));
        let t = need(parse_field(line, &f[0])?)?;
        let (x_plus, x_minus) = (parse_field(line, &f[1])?, parse_field(line, &f[2])?);
        let kind = if x_plus.is_some() && x_minus.is_some() { RootKind::Real } else { RootKind::Complex };
        p.grid.push(t);
        p.roots.push(RootPair { t, x_plus, x_minus, kind });
        p.x_chosen.push(need(parse_field(line, &f[3])?)?);
        p.e_amplitude.push(need(parse_field(line, &f[4])?)?);
        p.gated.push(match &f[5] {
            "1" => true,
            "0" => false,
            _ => return Err(CliError::Config(format!("drive csv line {line}: gated must be 0 or 1"))),
        });
        p.branch.push(match &f[6] {
            "plus" => Branch::Plus,
            "minus" => Branch::Minus,
            "none" => Branch::None,
            _ => return Err(CliError::Config(format!("drive csv line {line}: unknown branch"))),
        });
        p.period_t = parse_field(line, &f[7])?;
    }
    if p.is_empty() {
        return Err(CliError::Config("drive csv has no rows".into()));
    }
    Ok(p)
}

fn evolve_row(traj: &CoherenceTrajectory, i: usize) -> [f64; 9] {
    let s = &traj.states[i];
    let c = &traj.samples[i];
    let m = &traj.modes[i];
    [
        s.rho_mp.re,
        s.rho_mp.im,
        s.rho_mp.norm(),
        c.c1.re,
        c.c1.im,
        c.c2,
        c.det,
        m.null.norm(),
        m.other.norm(),
    ]
}

/// One or more trajectories on a shared grid. With several runs every column
/// except `t` carries the run's suffix.
pub fn evolve_csv(runs: &[(&str, &CoherenceTrajectory)]) -> String {
    let mut header = vec!["t".to_string()];
    for (suffix, _) in runs {
        for col in EVOLVE_COLUMNS {
            header.push(if runs.len() > 1 { format!("{col}_{suffix}") } else { col.to_string() });
        }
    }
    let grid = runs.first().map(|(_, t)| t.grid.as_slice()).unwrap_or(&[]);
    let rows = grid.iter().enumerate().map(|(i, &t)| {
        let values = runs.iter().flat_map(move |(_, traj)| evolve_row(traj, i));
        core::iter::once(t).chain(values).map(fmt_f64)
    });
    write_records(&header, rows)
}
