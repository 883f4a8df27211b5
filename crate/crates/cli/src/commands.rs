use std::collections::BTreeMap;

use log::warn;
use serde::Serialize;
use serde_json::Value as Json;

use devperf::cv::{
    cross_val_predict, import_predictions, write_predictions, BuiltinLearner, PredictionSet,
    PredictionSidecar,
};
use devperf::edp::{compute_edps, error_zoom, render_edp_svg, render_zoom_svg, SvgOptions};
use devperf::ingest::{default_scheme, load_csv, BinScheme, ColumnKind, CsvOptions, Dataset};
use devperf::rules::{
    build_mining_table, format_rules, mine_rules, query_text, rules_to_json, SubgroupResult,
};
use devperf::Execution;

use crate::artifacts::{sanitize, Artifact, ArtifactWriter};
use crate::failure::Failure;
use crate::settings::{Format, Settings, Source};

pub struct Run {
    pub settings: Settings,
    pub dataset: Dataset,
}

impl Run {
    pub fn open(settings: Settings) -> Result<Run, Failure> {
        let mut opts = CsvOptions::new(settings.target.clone());
        for c in &settings.categorical {
            opts = opts.hint(c.clone(), ColumnKind::Categorical);
        }
        let loaded = load_csv(&settings.data, &opts).map_err(|e| match e {
            devperf::Error::Io { .. } => Failure::Config(e.to_string()),
            other => Failure::Data(other.to_string()),
        })?;
        if !loaded.rejected.is_empty() {
            warn!(
                "{} row(s) rejected while reading {}",
                loaded.rejected.len(),
                settings.data.display()
            );
        }
        for c in &settings.categorical {
            if loaded.dataset.column_index(c).is_none() {
                return Err(Failure::Data(format!(
                    "--categorical names unknown column `{c}`"
                )));
            }
        }
        Ok(Run {
            settings,
            dataset: loaded.dataset,
        })
    }

    pub fn predictions(&self) -> Result<PredictionSet, Failure> {
        match &self.settings.source {
            Source::CrossValidation { learner, k, seed } => {
                let learner = BuiltinLearner::by_name(learner).expect("validated learner");
                Ok(cross_val_predict(
                    &self.dataset,
                    &learner,
                    *k,
                    *seed,
                    Execution::Parallel,
                )?)
            }
            Source::Import(path) => Ok(import_predictions(&self.dataset, path)?),
        }
    }

    fn predictor_names(&self) -> Result<Vec<String>, Failure> {
        match &self.settings.predictors {
            None => Ok(self
                .dataset
                .predictor_names()
                .iter()
                .map(|s| s.to_string())
                .collect()),
            Some(list) => {
                for p in list {
                    self.dataset.predictor_index(p).map_err(|e| {
                        Failure::Data(format!("predictor `{p}` cannot be analysed: {e}"))
                    })?;
                }
                Ok(list.clone())
            }
        }
    }

    /// User bin overrides from `--bins`, then defaults for everything else.
    pub fn schemes(&self) -> Result<Vec<BinScheme>, Failure> {
        let mut out: Vec<BinScheme> = Vec::new();
        if let Some(path) = &self.settings.bins {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Config(format!("cannot read bins file {}: {e}", path.display()))
            })?;
            let map: BTreeMap<String, Vec<Json>> = serde_json::from_str(&text).map_err(|e| {
                Failure::Config(format!(
                    "bins file {} must map predictor names to lists: {e}",
                    path.display()
                ))
            })?;
            for (pred, values) in map {
                let col = self.dataset.predictor_index(&pred).map_err(|e| {
                    Failure::Data(format!("bins file names predictor `{pred}`: {e}"))
                })?;
                let scheme = match self.dataset.column(col).kind {
                    ColumnKind::Numeric => {
                        let edges: Option<Vec<f64>> = values.iter().map(Json::as_f64).collect();
                        let edges = edges.ok_or_else(|| {
                            Failure::Config(format!("bins for numeric `{pred}` must be numbers"))
                        })?;
                        BinScheme::from_edges(pred.clone(), edges)
                    }
                    ColumnKind::Categorical => {
                        let cats: Vec<String> = values
                            .iter()
                            .map(|v| {
                                v.as_str()
                                    .map(String::from)
                                    .unwrap_or_else(|| v.to_string())
                            })
                            .collect();
                        BinScheme::from_categories(pred.clone(), cats)
                    }
                }
                .map_err(|e| Failure::Config(e.to_string()))?;
                out.push(scheme);
            }
        }
        for name in self.dataset.predictor_names() {
            if out.iter().any(|s| s.predictor() == name) {
                continue;
            }
            match default_scheme(&self.dataset, name) {
                Ok(s) => out.push(s),
                Err(devperf::Error::EmptyValues) => warn!("predictor `{name}` has no values"),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(out)
    }

    pub fn write_predictions(
        &self,
        preds: &PredictionSet,
        w: &mut ArtifactWriter,
    ) -> Result<(), Failure> {
        let mut csv = Vec::new();
        write_predictions(preds, &mut csv)?;
        w.write("predictions.csv", csv).map_err(Failure::Internal)?;
        let sidecar = PredictionSidecar::new(preds, &self.dataset);
        let json =
            serde_json::to_string_pretty(&sidecar).map_err(|e| Failure::Internal(e.into()))?;
        w.write("predictions.json", json + "\n")
            .map_err(Failure::Internal)?;
        println!("{}", preds_summary(preds));
        Ok(())
    }

    pub fn edps(&self, preds: &PredictionSet, w: &mut ArtifactWriter) -> Result<(), Failure> {
        let names = self.predictor_names()?;
        let schemes = self.schemes()?;
        let results = compute_edps(&self.dataset, preds, &names, &schemes, Execution::Parallel);
        let opts = SvgOptions::default();
        let defaults = [Format::Svg, Format::Json];
        for (name, edp) in names.iter().zip(results) {
            let edp = edp.map_err(|e| Failure::Data(format!("EDP of `{name}`: {e}")))?;
            let stem = format!("edp_{}", sanitize(name));
            if self.settings.wants(Format::Svg, &defaults) {
                w.write(&format!("{stem}.svg"), render_edp_svg(&edp, &opts))
                    .map_err(Failure::Internal)?;
                w.write(
                    &format!("{stem}_zoom.svg"),
                    render_zoom_svg(&error_zoom(&edp), &opts),
                )
                .map_err(Failure::Internal)?;
            }
            if self.settings.wants(Format::Json, &defaults) {
                w.write(&format!("{stem}.json"), edp.to_export().to_json() + "\n")
                    .map_err(Failure::Internal)?;
            }
            if self.settings.wants(Format::Csv, &defaults) {
                w.write(&format!("{stem}.csv"), edp.to_csv())
                    .map_err(Failure::Internal)?;
            }
            let zoom = error_zoom(&edp);
            let parts: Vec<String> = zoom
                .bins
                .iter()
                .map(|b| format!("{}={}", b.bin.label, b.errors.total()))
                .collect();
            println!(
                "edp {name}: {} bins, {} missing; errors per bin: {}",
                edp.bins.len(),
                edp.missing,
                parts.join(", ")
            );
        }
        Ok(())
    }

    pub fn rules(&self, preds: &PredictionSet, w: &mut ArtifactWriter) -> Result<(), Failure> {
        let schemes = self.schemes()?;
        let table = build_mining_table(&self.dataset, preds, &schemes)?;
        println!("Global {}", table.global().cm_string());
        let rules = mine_rules(&table, &self.settings.mining)?;
        let text = format_rules(&rules);
        let defaults = [Format::Txt, Format::Json];
        if self.settings.wants(Format::Txt, &defaults) {
            w.write("rules.txt", &text).map_err(Failure::Internal)?;
        }
        if self.settings.wants(Format::Json, &defaults) {
            w.write("rules.json", rules_to_json(&rules) + "\n")
                .map_err(Failure::Internal)?;
        }
        if rules.is_empty() {
            let m = &self.settings.mining;
            println!(
                "0 rules (minsup {}, alpha {}, max_len {})",
                m.minsup, m.alpha, m.max_len
            );
        } else {
            println!("{} rules", rules.len());
            print!("{text}");
        }

        if let Some(q) = &self.settings.query {
            println!("\nQuery: {q}");
            match query_text(&table, q)? {
                SubgroupResult::Empty { .. } => {
                    println!("empty subgroup: no case satisfies the query")
                }
                SubgroupResult::Found(s) => {
                    let conds: Vec<String> = s.antecedent.iter().map(ToString::to_string).collect();
                    println!(
                        "Ant sup = {:.5}  pvalue = {:.22}  size = {}\n{}  <--  {}",
                        s.support,
                        s.test.p_value,
                        s.size,
                        s.distribution.cm_string(),
                        conds.join(" & ")
                    );
                }
            }
        }
        Ok(())
    }
}

fn preds_summary(preds: &PredictionSet) -> String {
    let d = devperf::edp::global_distribution(preds);
    format!(
        "{}\naccuracy {:.4} ({} errors of {})",
        d.cm_string(),
        preds.accuracy(),
        preds.errors(),
        preds.len()
    )
}

pub fn cmd_predict(settings: Settings) -> Result<(), Failure> {
    if matches!(settings.source, Source::Import(_)) {
        return Err(Failure::Config(
            "predict runs cross-validation; drop --predictions".into(),
        ));
    }
    let run = Run::open(settings)?;
    let preds = run.predictions()?;
    let mut w = ArtifactWriter::new(&run.settings.out).map_err(Failure::Internal)?;
    run.write_predictions(&preds, &mut w)
}

pub fn cmd_edp(settings: Settings) -> Result<(), Failure> {
    let run = Run::open(settings)?;
    run.predictor_names()?;
    let preds = run.predictions()?;
    let mut w = ArtifactWriter::new(&run.settings.out).map_err(Failure::Internal)?;
    run.edps(&preds, &mut w)
}

pub fn cmd_rules(settings: Settings) -> Result<(), Failure> {
    let run = Run::open(settings)?;
    let preds = run.predictions()?;
    let mut w = ArtifactWriter::new(&run.settings.out).map_err(Failure::Internal)?;
    run.rules(&preds, &mut w)
}

#[derive(Debug, Serialize)]
struct Step {
    name: &'static str,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    dataset: String,
    dataset_sha256: String,
    target: String,
    source: Json,
    steps: Vec<Step>,
    artifacts: Vec<Artifact>,
}

/// Predictions, every EDP and the rules in one directory, plus
/// `manifest.json` listing each artifact with its SHA-256. Later steps still
/// run when an earlier analysis step fails; the first failure decides the
/// exit code.
pub fn cmd_report(settings: Settings) -> Result<(), Failure> {
    let run = Run::open(settings)?;
    let mut w = ArtifactWriter::new(&run.settings.out).map_err(Failure::Internal)?;
    let mut steps = Vec::new();
    let mut first_failure: Option<Failure> = None;
    let mut record = |name: &'static str, r: Result<(), Failure>, steps: &mut Vec<Step>| {
        let (status, message) = match r {
            Ok(()) => ("ok", None),
            Err(f) => {
                let m = f.to_string();
                first_failure.get_or_insert(f);
                ("failed", Some(m))
            }
        };
        steps.push(Step {
            name,
            status,
            message,
        });
    };

    match run.predictions() {
        Ok(preds) => {
            record(
                "predictions",
                run.write_predictions(&preds, &mut w),
                &mut steps,
            );
            record("edp", run.edps(&preds, &mut w), &mut steps);
            record("rules", run.rules(&preds, &mut w), &mut steps);
        }
        Err(f) => record("predictions", Err(f), &mut steps),
    }

    let source = match &run.settings.source {
        Source::CrossValidation { learner, k, seed } => {
            serde_json::json!({ "mode": "builtin-cv", "learner": learner, "k": k, "seed": seed })
        }
        Source::Import(p) => {
            serde_json::json!({ "mode": "import", "predictions": p.display().to_string() })
        }
    };
    let manifest = Manifest {
        tool: "devperf",
        version: env!("CARGO_PKG_VERSION"),
        dataset: run.settings.data.display().to_string(),
        dataset_sha256: run.dataset.fingerprint(),
        target: run.settings.target.clone(),
        source,
        steps,
        artifacts: w.artifacts(),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Internal(e.into()))?;
    std::fs::write(w.root().join("manifest.json"), json + "\n")?;
    println!("manifest: {}", w.root().join("manifest.json").display());
    match first_failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}
