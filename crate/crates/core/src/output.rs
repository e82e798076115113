//! Text serialization of solutions: the interface curve, per-phase field
//! tables, and the summary report, plus the readers used by the `residuals`
//! command. All numbers carry 17 significant digits so files round-trip
//! bit-exactly.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::config::FORMAT_VERSION;
use crate::diagnostics::DiagnosticsReport;
use crate::eos::{FlowConstants, PhaseTag};
use crate::error::Error;
use crate::field::Field;
use crate::geometry::{build_grids, InterfaceCurve};
use crate::solver::{IterationHistory, PhaseState, Solution};
use crate::Result;

/// 17 significant digits: enough for exact f64 round-trips.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::LinearSolveFailed(format!(
            "refusing to serialize non-finite value in {what}"
        )))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Write a text file, surfacing I/O errors with the path.
pub fn write_file_text(path: &Path, contents: &str) -> Result<()> {
    write_file(path, contents)
}

/// Write the interface curve as two-column text.
pub fn write_interface(curve: &InterfaceCurve, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("# cdeuler interface curve\n");
    out.push_str(&format!("# format_version = {FORMAT_VERSION}\n"));
    out.push_str(&format!("# length = {}\n", fmt17(curve.length)));
    out.push_str("# columns: x f\n");
    for (x, f) in curve.x.iter().zip(&curve.f) {
        out.push_str(&fmt17(finite(*x, "interface x")?));
        out.push(' ');
        out.push_str(&fmt17(finite(*f, "interface f")?));
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn read_interface(path: &Path) -> Result<InterfaceCurve> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut length = None;
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("length =") {
                length = Some(v.trim().parse::<f64>().map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let x: f64 = it.next().unwrap().parse().map_err(|e: std::num::ParseFloatError| {
            Error::Parse {
                path: path.display().to_string(),
                reason: e.to_string(),
            }
        })?;
        let f: f64 = it.next().ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            reason: "expected two columns".into(),
        })?
        .parse()
        .map_err(|e: std::num::ParseFloatError| Error::Parse {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        xs.push(x);
        fs.push(f);
    }
    let length = length.ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        reason: "missing `# length =` header".into(),
    })?;
    let curve = InterfaceCurve {
        length,
        x: xs,
        f: fs,
    };
    curve.validate()?;
    Ok(curve)
}

const FIELD_COLUMNS: [&str; 11] = [
    "x", "r", "S", "Lambda", "phi", "psi", "rho", "u_x", "u_r", "u_theta", "p",
];

/// Write one phase's node fields, x-major then s, one row per node.
pub fn write_phase_fields(
    consts: &FlowConstants,
    phase: PhaseTag,
    st: &PhaseState,
    path: &Path,
) -> Result<()> {
    let g = &st.grid;
    let u0 = consts.u0(phase);
    let mut out = String::new();
    out.push_str("# cdeuler phase fields\n");
    out.push_str(&format!("# format_version = {FORMAT_VERSION}\n"));
    out.push_str(&format!("# phase = {phase}\n"));
    out.push_str(&format!("# n_x = {}\n", g.nx));
    out.push_str(&format!("# n_s = {}\n", g.ns));
    out.push_str(&format!("# length = {}\n", fmt17(g.length)));
    out.push_str(&format!("# columns: {}\n", FIELD_COLUMNS.join(" ")));
    for i in 0..=g.nx {
        for j in 0..=g.ns {
            let phi_full = u0 * g.x[i] + st.phi_hat.at(i, j);
            let row = [
                g.x[i],
                g.r_at(i, j),
                st.s.at(i, j),
                st.lambda.at(i, j),
                phi_full,
                st.psi.at(i, j),
                st.rho.at(i, j),
                st.u_x.at(i, j),
                st.u_r.at(i, j),
                st.u_theta.at(i, j),
                st.p.at(i, j),
            ];
            let mut first = true;
            for (v, name) in row.iter().zip(FIELD_COLUMNS.iter()) {
                if !first {
                    out.push(' ');
                }
                out.push_str(&fmt17(finite(*v, name)?));
                first = false;
            }
            out.push('\n');
        }
    }
    write_file(path, &out)
}

struct PhaseFile {
    n_x: usize,
    n_s: usize,
    length: f64,
    columns: Vec<Vec<f64>>,
}

fn read_phase_file(path: &Path) -> Result<PhaseFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut n_x = None;
    let mut n_s = None;
    let mut length = None;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); FIELD_COLUMNS.len()];
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("n_x =") {
                n_x = Some(v.trim().parse::<usize>().map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?);
            } else if let Some(v) = rest.strip_prefix("n_s =") {
                n_s = Some(v.trim().parse::<usize>().map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?);
            } else if let Some(v) = rest.strip_prefix("length =") {
                length = Some(v.trim().parse::<f64>().map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    reason: e.to_string(),
                })?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
        if values.len() != FIELD_COLUMNS.len() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                reason: format!("expected {} columns", FIELD_COLUMNS.len()),
            });
        }
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }
    let (n_x, n_s, length) = match (n_x, n_s, length) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => {
            return Err(Error::Parse {
                path: path.display().to_string(),
                reason: "missing n_x / n_s / length headers".into(),
            })
        }
    };
    if columns[0].len() != (n_x + 1) * (n_s + 1) {
        return Err(Error::Parse {
            path: path.display().to_string(),
            reason: format!(
                "row count {} does not match (n_x+1)(n_s+1) = {}",
                columns[0].len(),
                (n_x + 1) * (n_s + 1)
            ),
        });
    }
    Ok(PhaseFile {
        n_x,
        n_s,
        length,
        columns,
    })
}

/// Write the full output set of one solve into `dir`.
pub fn write_solution(sol: &Solution, report: &DiagnosticsReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    write_interface(&sol.f, &dir.join("interface.txt"))?;
    write_phase_fields(&sol.constants, PhaseTag::Plus, &sol.plus, &dir.join("fields_plus.txt"))?;
    write_phase_fields(
        &sol.constants,
        PhaseTag::Minus,
        &sol.minus,
        &dir.join("fields_minus.txt"),
    )?;
    write_summary(sol, report, &dir.join("summary.txt"))
}

/// Summary report: run section (iteration counts) plus every diagnostics
/// entry, all as `key = value` lines.
pub fn write_summary(sol: &Solution, report: &DiagnosticsReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("# cdeuler run summary\n");
    out.push_str(&format!("format_version = {FORMAT_VERSION}\n"));
    out.push_str("# run\n");
    out.push_str(&format!(
        "outer_iterations = {}\n",
        sol.history.outer_changes.len()
    ));
    out.push_str(&format!(
        "middle_iterations = {}\n",
        sol.history.total_middle_iterations
    ));
    out.push_str(&format!(
        "picard_iterations = {}\n",
        sol.history.total_picard_iterations
    ));
    if let Some(factor) = sol.history.middle_contraction_factor() {
        out.push_str(&format!("contraction_factor = {}\n", fmt17(factor)));
    }
    out.push_str("# diagnostics\n");
    for (k, v) in &report.entries {
        out.push_str(&format!("{k} = {}\n", fmt17(finite(*v, k)?)));
    }
    write_file(path, &out)
}

/// Key/value lines of a summary-format file (comments skipped).
pub fn read_key_values(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            if let Ok(parsed) = v.trim().parse::<f64>() {
                out.insert(k.trim().to_string(), parsed);
            }
        }
    }
    Ok(out)
}

/// Rebuild a solution from the files written by [`write_solution`]; the
/// iteration history is not stored in field files and comes back empty.
pub fn read_solution(consts: &FlowConstants, sigma: f64, dir: &Path) -> Result<Solution> {
    let curve = read_interface(&dir.join("interface.txt"))?;
    let plus_file = read_phase_file(&dir.join("fields_plus.txt"))?;
    let minus_file = read_phase_file(&dir.join("fields_minus.txt"))?;
    if plus_file.n_x != curve.nx() || minus_file.n_x != curve.nx() {
        return Err(Error::Parse {
            path: dir.display().to_string(),
            reason: "field files and interface curve disagree on n_x".into(),
        });
    }
    if plus_file.length != curve.length || minus_file.length != curve.length {
        return Err(Error::Parse {
            path: dir.display().to_string(),
            reason: "field files and interface curve disagree on length".into(),
        });
    }
    let (grid_plus, grid_minus) = build_grids(&curve, curve.nx(), plus_file.n_s)?;
    let plus = phase_state_from_file(consts, PhaseTag::Plus, grid_plus, &plus_file);
    let minus = phase_state_from_file(consts, PhaseTag::Minus, grid_minus, &minus_file);
    Ok(Solution {
        constants: *consts,
        sigma,
        f: curve,
        plus,
        minus,
        history: IterationHistory::default(),
    })
}

fn phase_state_from_file(
    consts: &FlowConstants,
    phase: PhaseTag,
    grid: crate::geometry::MappedGrid,
    file: &PhaseFile,
) -> PhaseState {
    let (nx, ns) = (file.n_x, file.n_s);
    let u0 = consts.u0(phase);
    let take = |col: usize| -> Field {
        Field {
            nx,
            ns,
            data: file.columns[col].clone(),
        }
    };
    // Column order matches FIELD_COLUMNS.
    let s = take(2);
    let lambda = take(3);
    let phi_full = take(4);
    let psi = take(5);
    let rho = take(6);
    let u_x = take(7);
    let u_r = take(8);
    let u_theta = take(9);
    let p = take(10);
    let phi_hat = Field::from_fn(nx, ns, |i, j| phi_full.at(i, j) - u0 * grid.x[i]);
    PhaseState {
        w: u_theta.clone(),
        grid,
        s,
        lambda,
        phi_hat,
        psi,
        rho,
        u_x,
        u_r,
        u_theta,
        p,
    }
}
