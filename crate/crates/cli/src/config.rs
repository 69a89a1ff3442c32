//! Run configuration: TOML file merged under command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

/// Keys accepted in a config file. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub suite: Option<Suites>,
    pub grid: Option<String>,
    #[serde(rename = "box")]
    pub bbox: Option<[f64; 4]>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub timing: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Suites {
    One(String),
    Many(Vec<String>),
}

impl Suites {
    pub fn into_vec(self) -> Vec<String> {
        match self {
            Suites::One(s) => split_list(&s),
            Suites::Many(v) => v,
        }
    }
}

pub fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(String::from)
        .collect()
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// `NxM` with both sides at least 2.
pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s
        .to_ascii_lowercase()
        .split_once('x')
        .map(|(a, b)| (a.trim().parse::<usize>(), b.trim().parse::<usize>()))
        .ok_or_else(|| format!("grid '{s}' is not of the form NxM"))?;
    match (n, m) {
        (Ok(n), Ok(m)) if n >= 2 && m >= 2 => Ok((n, m)),
        _ => Err(format!("grid '{s}' needs integers N, M >= 2")),
    }
}

pub fn parse_floats<const K: usize>(s: &str, what: &str) -> Result<[f64; K], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("{what} '{s}' must be {K} comma-separated numbers"))?;
    v.try_into()
        .map_err(|_| format!("{what} '{s}' must be {K} comma-separated numbers"))
}

pub fn parse_box(s: &str) -> Result<[f64; 4], String> {
    parse_floats::<4>(s, "box")
}

/// `--out`, then the config file, then `SINMIN_OUT`, then `sinmin-out`.
pub fn output_dir(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or(file)
        .or_else(|| std::env::var_os("SINMIN_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("sinmin-out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_grid("30x20"), Ok((30, 20)));
        assert!(parse_grid("1x5").is_err());
        assert!(parse_grid("30").is_err());
        assert_eq!(parse_box("-1,1,0,2"), Ok([-1.0, 1.0, 0.0, 2.0]));
        assert!(parse_box("1,2,3").is_err());
    }

    #[test]
    fn file_keys() {
        let c: FileConfig = toml::from_str("suite = \"thm4,thm5\"\nseed = 3\nbox = [0.0, 1.0, 0.0, 1.0]").unwrap();
        assert_eq!(c.suite.unwrap().into_vec(), vec!["thm4", "thm5"]);
        assert_eq!(c.seed, Some(3));
        assert!(toml::from_str::<FileConfig>("nosuch = 1").is_err());
    }
}
