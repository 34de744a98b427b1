use std::fs;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};

use crate::CliError;

pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut writer = csv::Writer::from_path(&path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// JSON has no infinities; write them as the strings `"inf"`, `"-inf"` or `"nan"`.
pub fn float_or_sentinel<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        serializer.serialize_f64(*value)
    } else if value.is_nan() {
        serializer.serialize_str("nan")
    } else if *value > 0.0 {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_str("-inf")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        #[serde(serialize_with = "float_or_sentinel")]
        v: f64,
    }

    #[test]
    fn non_finite_values_become_strings() {
        let text = |v| serde_json::to_string(&Row { v }).unwrap();
        assert_eq!(text(1.5), r#"{"v":1.5}"#);
        assert_eq!(text(f64::INFINITY), r#"{"v":"inf"}"#);
        assert_eq!(text(f64::NEG_INFINITY), r#"{"v":"-inf"}"#);
        assert_eq!(text(f64::NAN), r#"{"v":"nan"}"#);
    }

    #[test]
    fn json_files_end_with_a_newline() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_json(dir.path(), "x.json", &Row { v: 2.0 }).unwrap();
        assert!(fs::read_to_string(path).unwrap().ends_with("}\n"));
    }
}
