use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use rslab_core::verify::SuiteRow;
use serde_json::Value;

use crate::{Format, OutArgs};

pub const CSV_COLUMNS: [&str; 10] = ["inequality", "variant", "params", "lhs", "sigma_lhs", "rhs", "sigma_rhs", "ratio", "verdict", "pass"];

pub fn resolve_format(out: &OutArgs, default: Format) -> Result<Format> {
    let by_ext = out.out.as_deref().and_then(|p| p.extension()).and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let by_ext = match by_ext.as_deref() {
        Some("json") => Some(Format::Json),
        Some("csv") => Some(Format::Csv),
        _ => None,
    };
    match (out.format, by_ext) {
        (Some(f), Some(e)) if f != e => bail!("--format {} does not match the extension of {}", f.name(), out.out.as_ref().unwrap().display()),
        (Some(f), _) | (None, Some(f)) => Ok(f),
        (None, None) => Ok(default),
    }
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Writes to a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("cannot create a temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

/// JSON document: the payload's fields plus the argument echo and a
/// timestamp under `generated_at`.
pub fn write_json(out: &OutArgs, mut payload: Value) -> Result<()> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if !payload.is_object() {
        payload = serde_json::json!({ "results": payload });
    }
    let map = payload.as_object_mut().unwrap();
    map.insert("argv".into(), argv.into());
    map.insert("generated_at".into(), timestamp().into());
    let mut text = serde_json::to_string_pretty(&payload)?;
    text.push('\n');
    emit(out.out.as_deref(), text.as_bytes())
}

pub fn csv_bytes(rows: &[SuiteRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.inequality.clone(),
            r.variant.clone(),
            r.params.clone(),
            r.lhs.to_string(),
            r.lhs_se.to_string(),
            r.rhs.to_string(),
            r.rhs_se.to_string(),
            r.ratio.to_string(),
            r.verdict.clone(),
            r.pass.to_string(),
        ])?;
    }
    Ok(w.into_inner()?)
}

pub fn write_csv(out: &OutArgs, rows: &[SuiteRow]) -> Result<()> {
    let mut bytes = format!("# generated_at={}\n", timestamp()).into_bytes();
    bytes.extend(csv_bytes(rows)?);
    emit(out.out.as_deref(), &bytes)?;
    if let Some(script) = &out.plot {
        let Some(csv_path) = out.out.as_deref() else {
            bail!("--plot needs --out with a CSV file");
        };
        write_atomic(script, plot_script(csv_path).as_bytes())?;
    }
    Ok(())
}

/// A matplotlib script that plots both sides of every row, against the
/// swept value when the rows come from a sweep.
fn plot_script(csv_path: &Path) -> String {
    let name = csv_path.display().to_string().replace('\\', "\\\\").replace('\'', "\\'");
    format!(
        r#"import csv
import matplotlib.pyplot as plt

with open('{name}') as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith('#')))

def xval(i, row):
    key = row['params'].split(';')[0]
    if '=' in key:
        try:
            return float(key.split('=', 1)[1])
        except ValueError:
            pass
    return float(i)

xs = [xval(i, r) for i, r in enumerate(rows)]
for side, err in (('lhs', 'sigma_lhs'), ('rhs', 'sigma_rhs')):
    ys = [float(r[side]) for r in rows]
    es = [3 * float(r[err]) for r in rows]
    plt.errorbar(xs, ys, yerr=es, marker='o', capsize=3, label=side)
plt.xlabel(rows[0]['params'].split('=')[0] if rows and '=' in rows[0]['params'] else 'row')
plt.legend()
plt.title('{name}')
plt.savefig('{name}'.rsplit('.', 1)[0] + '.png', dpi=150)
"#
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_follows_extension() {
        let args = |out: &str, format| OutArgs { out: Some(out.into()), format, plot: None };
        assert_eq!(resolve_format(&args("r.csv", None), Format::Json).unwrap(), Format::Csv);
        assert_eq!(resolve_format(&args("r.json", Some(Format::Json)), Format::Csv).unwrap(), Format::Json);
        assert!(resolve_format(&args("r.json", Some(Format::Csv)), Format::Json).is_err());
        assert_eq!(resolve_format(&OutArgs::default(), Format::Csv).unwrap(), Format::Csv);
    }

    #[test]
    fn csv_layout() {
        let row = SuiteRow {
            inequality: "difference_body".into(),
            variant: "classical".into(),
            params: "n=2".into(),
            lhs: 3.0,
            lhs_se: 0.0,
            rhs: 3.0,
            rhs_se: 0.0,
            ratio: 1.0,
            verdict: "equality".into(),
            pass: true,
        };
        let text = String::from_utf8(csv_bytes(&[row]).unwrap()).unwrap();
        assert_eq!(text, "inequality,variant,params,lhs,sigma_lhs,rhs,sigma_rhs,ratio,verdict,pass\ndifference_body,classical,n=2,3,0,3,0,1,equality,true\n");
    }
}
