use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::path::{PathMeta, PathSample};

/// One produced file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Collects the files written under one output directory.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root, files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry { path: rel.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(rel, s.as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// File name of the ensemble CSV at time `t`.
pub fn time_file(t: f64) -> String {
    format!("t_{t}.csv")
}

/// CSV with columns `seed,x0,..,x{d-1}`, one row per sample, of the
/// ensemble at time `t`.
pub fn ensemble_csv(ensemble: &[PathSample], t: f64) -> Result<Vec<u8>> {
    let d = ensemble.first().map_or(0, PathSample::dim);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["seed".to_string()];
    header.extend((0..d).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for p in ensemble {
        let v = p
            .value_at(t)
            .ok_or_else(|| Error::GridMismatch(format!("time {t} missing from sample {}", p.meta.seed)))?;
        let mut row = vec![p.meta.seed.to_string()];
        row.extend(v.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Writes one CSV per record time under `dir`.
pub fn write_ensemble(out: &mut ArtifactWriter, dir: &str, ensemble: &[PathSample], record: &[f64]) -> Result<()> {
    for &t in record {
        let bytes = ensemble_csv(ensemble, t)?;
        out.write(&format!("{dir}/{}", time_file(t)), &bytes)?;
    }
    Ok(())
}

/// Reads the CSVs written by [`write_ensemble`] back into per-sample paths
/// over the times found in `dir`.
pub fn read_ensemble(dir: &Path) -> Result<Vec<PathSample>> {
    let mut times = Vec::new();
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name().to_string_lossy().to_string();
        if let Some(t) = name.strip_prefix("t_").and_then(|s| s.strip_suffix(".csv")) {
            if let Ok(t) = t.parse::<f64>() {
                times.push(t);
            }
        }
    }
    if times.is_empty() {
        return Err(Error::Config(format!("no t_*.csv files in {}", dir.display())));
    }
    times.sort_by(f64::total_cmp);
    let mut seeds: Vec<u64> = Vec::new();
    let mut columns: Vec<Vec<Vec<f64>>> = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let mut r = csv::Reader::from_path(dir.join(time_file(t)))?;
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let seed: u64 = rec[0].parse().map_err(|_| Error::Config(format!("bad seed in row {}", i + 1)))?;
            if k == 0 {
                seeds.push(seed);
            } else if seeds.get(i) != Some(&seed) {
                return Err(Error::GridMismatch(format!("row {} of {} has a different seed", i + 1, time_file(t))));
            }
            let vals = rec
                .iter()
                .skip(1)
                .map(|s| s.parse::<f64>().map_err(|_| Error::Config(format!("bad value {s:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(vals);
        }
        if rows.len() != seeds.len() {
            return Err(Error::GridMismatch(format!("{} has {} rows, expected {}", time_file(t), rows.len(), seeds.len())));
        }
        columns.push(rows);
    }
    (0..seeds.len())
        .map(|i| {
            let values = columns.iter().map(|c| c[i].clone()).collect();
            PathSample::new(times.clone(), values, PathMeta { eps: 0.0, seed: seeds[i], model: String::new() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path()).unwrap();
        let paths: Vec<PathSample> = (0..3)
            .map(|s| {
                PathSample::new(
                    vec![0.5, 1.0],
                    vec![vec![s as f64, 0.1], vec![-0.25, 1e-300]],
                    PathMeta { eps: 0.0, seed: s, model: String::new() },
                )
                .unwrap()
            })
            .collect();
        write_ensemble(&mut w, "ens", &paths, &[0.5, 1.0]).unwrap();
        assert_eq!(w.files().len(), 2);
        let back = read_ensemble(&dir.path().join("ens")).unwrap();
        for (a, b) in paths.iter().zip(&back) {
            assert_eq!(a.values, b.values);
            assert_eq!(a.meta.seed, b.meta.seed);
        }
    }
}
