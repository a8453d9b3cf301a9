//! Versioned CSV emission.
//!
//! Layout: a `# schema:` line, a `# config:` line embedding the resolved
//! run configuration as JSON, a header row, then data rows. Numbers print
//! shortest-roundtrip with a `.` decimal separator; `NaN` marks cells no
//! distortion in the search interval can realize. Equivocation columns are
//! in the configured log base.

use std::fmt::Write as _;
use std::path::Path;

use semsec_core::inner::InnerTraceRow;
use semsec_core::outer::OuterTraceRow;

use crate::config::RunConfig;
use crate::CliError;

pub const OUTER_SCHEMA: &str = "semsec.outer-trace.v1";
pub const INNER_SCHEMA: &str = "semsec.inner-trace.v1";

fn preamble(schema: &str, cfg: &RunConfig) -> Result<String, CliError> {
    let json = serde_json::to_string(cfg)
        .map_err(|e| CliError::Io(format!("encoding config: {e}")))?;
    Ok(format!("# schema: {schema}\n# config: {json}\n"))
}

pub fn render_outer(cfg: &RunConfig, rows: &[OuterTraceRow]) -> Result<String, CliError> {
    let b = cfg.log_base;
    let mut s = preamble(OUTER_SCHEMA, cfg)?;
    s.push_str("r,d_u,d_s_boundary,delta_s_max,delta_u_max,delta_su_max\n");
    for row in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            row.r,
            row.d_u,
            row.d_s_boundary,
            b.from_nats(row.delta_s_max),
            b.from_nats(row.delta_u_max),
            b.from_nats(row.delta_su_max),
        );
    }
    Ok(s)
}

pub fn render_inner(cfg: &RunConfig, rows: &[InnerTraceRow]) -> Result<String, CliError> {
    let b = cfg.log_base;
    let mut s = preamble(INNER_SCHEMA, cfg)?;
    s.push_str(
        "r,d_u,d_s_boundary,delta_s,delta_u,delta_su,\
         alpha1,alpha2,gamma,p_ap,p_bp,p_qc,p_qp,p_wc,p_xt\n",
    );
    for row in rows {
        let _ = write!(
            s,
            "{},{},{},{},{},{}",
            row.r,
            row.d_u,
            row.d_s_boundary,
            b.from_nats(row.delta_s),
            b.from_nats(row.delta_u),
            b.from_nats(row.delta_su),
        );
        let p = row
            .params
            .map(|p| {
                [p.alpha1, p.alpha2, p.gamma, p.p_ap, p.p_bp, p.p_qc, p.p_qp, p.p_wc, p.p_xt]
            })
            .unwrap_or([f64::NAN; 9]);
        for v in p {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
