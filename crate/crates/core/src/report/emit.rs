use super::config::Format;
use super::pipeline::{ReportBundle, ScopeReport};
use crate::lexical::RankedLexicon;
use crate::types::Gender;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Files written by one emit. Only `wall_clock_ms` varies between
/// identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub corpus_fingerprint: String,
    pub wall_clock_ms: u128,
    pub files: Vec<ManifestEntry>,
}

pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Writer {
    root: PathBuf,
    files: Vec<ManifestEntry>,
}

impl Writer {
    fn put(&mut self, rel: &str, bytes: &[u8]) -> Result<(), EmitError> {
        let path = self.root.join(rel);
        let io = |source| EmitError::Io { path: path.display().to_string(), source };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        std::fs::write(&path, bytes).map_err(io)?;
        self.files.push(ManifestEntry { path: rel.to_string(), bytes: bytes.len() as u64, sha256: sha256_hex(bytes) });
        Ok(())
    }

    fn csv<R: Serialize>(&mut self, rel: &str, rows: impl IntoIterator<Item = R>) -> Result<(), EmitError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut any = false;
        for r in rows {
            w.serialize(r)?;
            any = true;
        }
        if !any {
            return Ok(());
        }
        let bytes = w.into_inner().map_err(|e| EmitError::Io {
            path: rel.to_string(),
            source: std::io::Error::other(e.to_string()),
        })?;
        self.put(rel, &bytes)
    }
}

#[derive(Serialize)]
struct RankRow<'a> {
    gender: Gender,
    rank: usize,
    word: &'a str,
    score: f64,
}

fn rank_rows(lex: &RankedLexicon) -> Vec<RankRow<'_>> {
    Gender::BINARY
        .into_iter()
        .flat_map(|g| {
            lex.list(g).iter().enumerate().map(move |(i, s)| RankRow { gender: g, rank: i + 1, word: &s.word, score: s.score })
        })
        .collect()
}

#[derive(Serialize)]
struct TestRow {
    section: String,
    label: String,
    statistic: Option<f64>,
    df: String,
    p_value: Option<f64>,
    effect_size: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
}

/// Every test result in a JSON tree, keyed by its path.
fn collect_tests(v: &serde_json::Value, path: &str, out: &mut Vec<TestRow>) {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            if let (Some(Value::String(label)), true, true) =
                (map.get("label"), map.contains_key("statistic"), map.contains_key("p_value"))
            {
                let ci = map.get("ci95").and_then(Value::as_array);
                out.push(TestRow {
                    section: path.to_string(),
                    label: label.clone(),
                    statistic: map["statistic"].as_f64(),
                    df: match &map["df"] {
                        Value::Null => String::new(),
                        Value::Array(a) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
                        other => other.to_string(),
                    },
                    p_value: map["p_value"].as_f64(),
                    effect_size: map.get("effect_size").and_then(Value::as_f64),
                    ci_low: ci.and_then(|c| c.first()).and_then(Value::as_f64),
                    ci_high: ci.and_then(|c| c.get(1)).and_then(Value::as_f64),
                });
                return;
            }
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                collect_tests(x, &p, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                collect_tests(x, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

fn emit_scope_csv(w: &mut Writer, scope: &ScopeReport) -> Result<(), EmitError> {
    let dir = &scope.scope;
    if let Some(cov) = scope.coverage.as_ref().and_then(|o| o.ok()) {
        #[derive(Serialize)]
        struct Row {
            k: usize,
            ccdf: f64,
            gender: Gender,
        }
        let t = &cov.in_degrees;
        w.csv(
            &format!("{dir}/coverage_ccdf.csv"),
            Gender::BINARY.into_iter().flat_map(|g| t.ccdf(g).into_iter().map(move |p| Row { k: p.k, ccdf: p.ccdf, gender: g })),
        )?;
        w.csv(&format!("{dir}/coverage_in_degree.csv"), &t.entries)?;
    }
    if let Some(comb) = scope.combinatorial.as_ref().and_then(|o| o.ok()) {
        #[derive(Serialize)]
        struct Row<'a> {
            group: &'a str,
            cell: &'a str,
            lo: f64,
            hi: f64,
            count: usize,
        }
        let overall = comb.overall.histograms.iter().map(|h| ("all", h));
        let groups = comb
            .by_group
            .iter()
            .filter_map(|(g, o)| o.ok().map(|r| (g.as_str(), r)))
            .flat_map(|(g, r)| r.histograms.iter().map(move |h| (g, h)));
        w.csv(
            &format!("{dir}/combinatorial_null_histograms.csv"),
            overall.chain(groups).map(|(group, h)| Row { group, cell: &h.cell, lo: h.lo, hi: h.hi, count: h.count }),
        )?;
    }
    if let Some(nom) = scope.nominal.as_ref().and_then(|o| o.ok()) {
        #[derive(Serialize)]
        struct Row {
            honorifics_stripped: bool,
            gender: Gender,
            class: &'static str,
            count: u64,
            proportion: f64,
        }
        let rows = std::iter::once(&nom.primary).chain(nom.alternate.as_ref()).flat_map(|v| {
            v.proportions.iter().flat_map(move |(g, row)| {
                row.iter().map(move |(c, p)| Row {
                    honorifics_stripped: v.honorifics_stripped,
                    gender: *g,
                    class: c.as_str(),
                    count: v.table.count(*g, *c),
                    proportion: *p,
                })
            })
        });
        w.csv(&format!("{dir}/nominal_proportions.csv"), rows)?;
    }
    if let Some(sent) = scope.sentiment.as_ref().and_then(|o| o.ok()) {
        w.csv(&format!("{dir}/sentiment_affect_histograms.csv"), &sent.histograms)?;
    }
    if let Some(lex) = scope.lexical.as_ref().and_then(|o| o.ok()) {
        w.csv(&format!("{dir}/lexical_pmi.csv"), rank_rows(&lex.overall.traditional))?;
        w.csv(&format!("{dir}/lexical_pmie.csv"), rank_rows(&lex.overall.entity))?;
        #[derive(Serialize)]
        struct GroupRank<'a> {
            group: crate::types::Group,
            gender: Gender,
            rank: usize,
            word: &'a str,
            score: f64,
        }
        let by_group = lex
            .by_group
            .groups
            .iter()
            .filter_map(|(g, o)| o.ok().map(|l| (*g, l)))
            .flat_map(|(group, l)| {
                rank_rows(&l.entity).into_iter().map(move |r| GroupRank {
                    group,
                    gender: r.gender,
                    rank: r.rank,
                    word: r.word,
                    score: r.score,
                })
            });
        w.csv(&format!("{dir}/lexical_pmie_by_group.csv"), by_group)?;
        if let Some(senses) = lex.overall.senses.as_ref().and_then(|o| o.ok()) {
            #[derive(Serialize)]
            struct Row {
                sense: &'static str,
                female: u64,
                male: u64,
            }
            w.csv(
                &format!("{dir}/lexical_senses.csv"),
                senses.counts.iter().map(|(s, c)| Row { sense: s.as_str(), female: c[0], male: c[1] }),
            )?;
        }
    }
    Ok(())
}

/// Writes the bundle into `out` and returns the manifest, which is also
/// written as `manifest.json`.
pub fn emit_report(bundle: &ReportBundle, out: impl AsRef<Path>, formats: &BTreeSet<Format>) -> Result<Manifest, EmitError> {
    let mut w = Writer { root: out.as_ref().to_path_buf(), files: Vec::new() };
    let value = serde_json::to_value(bundle).expect("bundle serializes");
    if formats.contains(&Format::Json) {
        let mut bytes = serde_json::to_vec_pretty(&value).expect("bundle serializes");
        bytes.push(b'\n');
        w.put(REPORT_FILE, &bytes)?;
    }
    if formats.contains(&Format::Csv) {
        let mut tests = Vec::new();
        collect_tests(&value["scopes"], "scopes", &mut tests);
        w.csv("tests.csv", tests)?;
        for scope in &bundle.scopes {
            emit_scope_csv(&mut w, scope)?;
        }
    }
    let manifest = Manifest {
        tool: bundle.metadata.tool.clone(),
        version: bundle.metadata.version.clone(),
        config_hash: bundle.metadata.config_hash.clone(),
        corpus_fingerprint: bundle.metadata.corpus_fingerprint.clone(),
        wall_clock_ms: bundle.wall_clock.as_millis(),
        files: w.files.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    let path = w.root.join(MANIFEST_FILE);
    std::fs::write(&path, bytes).map_err(|source| EmitError::Io { path: path.display().to_string(), source })?;
    Ok(manifest)
}
