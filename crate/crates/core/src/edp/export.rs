use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{error_zoom, ConfusionDistribution, EdpResult, OutcomeCode};
use crate::ingest::SchemeDoc;

/// Machine-readable dump of an [`EdpResult`] and its error zoom.
///
/// Cell maps are keyed by outcome code string; JSON object keys sort as
/// strings, which puts the hit cell `"0"` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdpExport {
    pub predictor: String,
    pub scheme: SchemeDoc,
    pub bins: Vec<ExportBin>,
    pub global: ExportGlobal,
    pub missing: usize,
    pub zoom: ExportZoom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportBin {
    pub label: String,
    pub count: u64,
    pub share: f64,
    pub cells: BTreeMap<String, u64>,
    pub proportions: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportGlobal {
    pub count: u64,
    pub cells: BTreeMap<String, u64>,
    pub proportions: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportZoom {
    pub total_errors: u64,
    pub bins: Vec<ExportZoomBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportZoomBin {
    pub label: String,
    pub errors: u64,
    pub error_share: f64,
    pub cells: BTreeMap<String, u64>,
}

fn cell_maps(d: &ConfusionDistribution) -> (BTreeMap<String, u64>, BTreeMap<String, f64>) {
    let n = d.n_classes();
    d.cells()
        .into_iter()
        .map(|(c, k)| ((c.display(n), k), (c.display(n), d.proportion(c))))
        .unzip()
}

impl EdpExport {
    pub fn new(edp: &EdpResult) -> Self {
        let bins = edp
            .bins
            .iter()
            .map(|b| {
                let (cells, proportions) = cell_maps(&b.distribution);
                ExportBin {
                    label: b.bin.label.clone(),
                    count: b.count(),
                    share: b.share,
                    cells,
                    proportions,
                }
            })
            .collect();
        let (cells, proportions) = cell_maps(&edp.global);
        let zoom = error_zoom(edp);
        EdpExport {
            predictor: edp.predictor.clone(),
            scheme: edp.scheme.to_doc(),
            bins,
            global: ExportGlobal {
                count: edp.global.total(),
                cells,
                proportions,
            },
            missing: edp.missing,
            zoom: ExportZoom {
                total_errors: zoom.total_errors,
                bins: zoom
                    .bins
                    .iter()
                    .map(|z| ExportZoomBin {
                        label: z.bin.label.clone(),
                        errors: z.errors.total(),
                        error_share: z.error_share,
                        cells: cell_maps(&z.errors).0,
                    })
                    .collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("export serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// `bin,code,count,proportion` rows for every bin and then `GLOBAL`, one row
/// per code seen anywhere in the EDP, so empty cells appear with count 0.
pub fn edp_csv(edp: &EdpResult) -> String {
    let n = edp.global.n_classes();
    let codes: Vec<OutcomeCode> = edp.global.codes();
    let mut out = String::from("bin,code,count,proportion\n");
    let mut rows = |label: &str, d: &ConfusionDistribution| {
        for &c in &codes {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_field(label),
                c.display(n),
                d.count(c),
                d.proportion(c)
            );
        }
    };
    for b in &edp.bins {
        rows(&b.bin.label, &b.distribution);
    }
    rows("GLOBAL", &edp.global);
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl EdpResult {
    pub fn to_export(&self) -> EdpExport {
        EdpExport::new(self)
    }

    pub fn to_csv(&self) -> String {
        edp_csv(self)
    }
}
