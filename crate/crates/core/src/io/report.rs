//! Markdown renderings of analysis artifacts.

use std::fmt::Write;

use serde_json::Value;

use super::artifact::RunManifest;
use crate::error::{Error, Result};
use crate::metrics::{ConfusionCurves, MetricCurves};
use crate::policy::AugPolicy;
use crate::sim::InterventionTable;
use crate::taxonomy::{Category, ConfusionReport};
use crate::types::LabelMode;

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "–".to_string(), |x| format!("{:.2}", 100.0 * x))
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "–".to_string(), |x| format!("{x:.2}"))
}

fn header(out: &mut String, title: &str, manifest: Option<&RunManifest>) {
    let _ = writeln!(out, "# {title}\n");
    if let Some(m) = manifest {
        let _ = writeln!(
            out,
            "Generated by `{}` (toolkit {}, config `{}`).\n",
            m.command,
            m.toolkit_version,
            &m.config_hash[..m.config_hash.len().min(12)]
        );
    }
}

/// One row of a group-accuracy table: `| label | all | affected | remaining |`,
/// values in percent with two decimals.
pub fn group_row(label: &str, all: Option<f64>, affected: Option<f64>, remaining: Option<f64>) -> String {
    format!("| {label} | {} | {} | {} |", pct(all), pct(affected), pct(remaining))
}

pub fn render_metrics(m: &MetricCurves, manifest: Option<&RunManifest>) -> String {
    let mut out = String::new();
    header(&mut out, "Per-class metrics", manifest);
    let strengths: Vec<String> = m.strengths.iter().map(|s| format!("acc@{s}")).collect();
    let _ = writeln!(
        out,
        "| class | Δa original | Δa multi-label | ΔFP | {} |",
        strengths.join(" | ")
    );
    let _ = writeln!(out, "|---|---|---|---|{}", "---|".repeat(strengths.len()));
    for c in &m.classes {
        let accs: Vec<String> = c.accuracy_curve(LabelMode::Original).into_iter().map(pct).collect();
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            c.class,
            pct(c.delta_acc_original),
            pct(c.delta_acc_real),
            num(c.delta_fp_original),
            accs.join(" | ")
        );
    }
    out
}

pub fn render_confusions(c: &ConfusionCurves, manifest: Option<&RunManifest>) -> String {
    let mut out = String::new();
    header(&mut out, "Confusion growth", manifest);
    let mut pairs: Vec<_> = c.pairs.iter().filter(|p| p.delta_cr.is_some_and(|d| d > 0.0)).collect();
    pairs.sort_by(|a, b| {
        b.delta_cr
            .unwrap_or(0.0)
            .total_cmp(&a.delta_cr.unwrap_or(0.0))
            .then_with(|| (&a.from, &a.to).cmp(&(&b.from, &b.to)))
    });
    if pairs.is_empty() {
        out.push_str("No confusion grows under the strongest augmentation.\n");
        return out;
    }
    out.push_str("| from | to | ΔCR | ΔCR* (reverse) | CR at strongest |\n|---|---|---|---|---|\n");
    for p in pairs {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} |",
            p.from,
            p.to,
            pct(p.delta_cr),
            pct(p.reverse_delta_cr_star),
            pct(p.cr.first().copied().flatten())
        );
    }
    out
}

pub fn render_confusion_report(r: &ConfusionReport, manifest: Option<&RunManifest>) -> String {
    let mut out = String::new();
    header(&mut out, "Confusion report", manifest);
    let d = &r.distribution;
    out.push_str("| category | pairs | share |\n|---|---|---|\n");
    for c in Category::ALL {
        let _ = writeln!(out, "| {} | {} | {} |", c.title(), d.get(c), pct(d.fraction(c)));
    }
    if d.uncategorized > 0 {
        let _ = writeln!(out, "| Uncategorized | {} | – |", d.uncategorized);
    }
    out.push('\n');

    for c in Category::ALL {
        let _ = writeln!(out, "## {}\n", c.title());
        let rows: Vec<_> = r.rows().filter(|(_, p)| p.category == Some(c)).collect();
        if rows.is_empty() {
            out.push_str("No pairs.\n\n");
            continue;
        }
        out.push_str("| class | partner | ΔCR | ΔCR* | C_kl | IoU | Wu-Palmer | embedding |\n");
        out.push_str("|---|---|---|---|---|---|---|---|\n");
        for (e, p) in rows {
            let s = &p.scores;
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} |",
                e.class,
                p.partner,
                pct(Some(p.delta_cr)),
                pct(p.delta_cr_star),
                num(s.c_kl),
                num(s.iou),
                num(s.wn_sim),
                num(s.embed_sim)
            );
        }
        out.push('\n');
    }

    let lonely: Vec<String> = r
        .entries
        .iter()
        .filter(|e| e.partners.is_empty())
        .map(|e| e.class.to_string())
        .collect();
    if !lonely.is_empty() {
        let _ = writeln!(
            out,
            "## Affected classes without a growing confusion\n\n{}\n",
            lonely.join(", ")
        );
    }
    out
}

pub fn render_policy(p: &AugPolicy, manifest: Option<&RunManifest>) -> String {
    let mut out = String::new();
    header(&mut out, "Augmentation policy", manifest);
    let _ = writeln!(out, "Default strength: {}\n", p.default_strength);
    let pv = &p.provenance;
    let _ = writeln!(
        out,
        "Built by `{}` with m = {}, selection by {}{}.\n",
        serde_json::to_value(pv.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        pv.m,
        pv.selection_metric,
        pv.label_mode.map(|m| format!(" ({m} labels)")).unwrap_or_default()
    );
    if p.overrides.is_empty() {
        out.push_str("No class overrides.\n");
    } else {
        out.push_str("| class | strength |\n|---|---|\n");
        for (c, s) in &p.overrides {
            let v = s.map_or_else(|| "no augmentation".to_string(), |s| s.to_string());
            let _ = writeln!(out, "| {c} | {v} |");
        }
    }
    out
}

pub fn render_intervention(t: &InterventionTable, manifest: Option<&RunManifest>) -> String {
    let mut out = String::new();
    header(&mut out, "Intervention comparison", manifest);
    let names: Vec<String> = t.affected.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "Affected classes: {}\n", names.join(", "));
    out.push_str("| policy | all | affected | remaining |\n|---|---|---|---|\n");
    for r in &t.rows {
        out.push_str(&group_row(&r.name, Some(r.overall), Some(r.affected), r.remaining));
        out.push('\n');
    }
    out
}

fn de<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Input(format!("malformed artifact: {e}")))
}

/// Renders any artifact JSON by its `kind`.
pub fn render_artifact(value: &Value) -> Result<String> {
    let kind = value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Input("document has no artifact `kind`".into()))?;
    let manifest: Option<RunManifest> = value.get("manifest").cloned().map(de).transpose()?;
    let data = value
        .get("data")
        .cloned()
        .ok_or_else(|| Error::Input("artifact has no `data`".into()))?;
    let m = manifest.as_ref();
    Ok(match kind {
        "metrics" => render_metrics(&de(data)?, m),
        "confusions" => render_confusions(&de(data)?, m),
        "confusion_report" => render_confusion_report(&de(data)?, m),
        "policy" => render_policy(&de(data)?, m),
        "intervention" => render_intervention(&de(data)?, m),
        other => return Err(Error::Input(format!("no markdown rendering for artifact kind `{other}`"))),
    })
}
