//! `eval` for single files and stem-paired directories.

use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use mattekit::compose::{list_pngs, pair_by_stem};
use mattekit::evalmetrics::{evaluate, MetricsReport, RegionMode};
use mattekit::imgcore::{load_alpha, load_trimap};

use crate::args::{EvalArgs, Region};
use crate::commands::{prepare_output, print_json, require_file};

struct Item {
    name: String,
    pred: PathBuf,
    gt: PathBuf,
    trimap: Option<PathBuf>,
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn region_mode(r: Region) -> RegionMode {
    match r {
        Region::Whole => RegionMode::Whole,
        Region::Unknown => RegionMode::Unknown,
    }
}

fn evaluate_item(item: &Item, mode: RegionMode) -> Result<MetricsReport> {
    let pred = load_alpha(&item.pred)?;
    let gt = load_alpha(&item.gt)?;
    let trimap = match &item.trimap {
        Some(p) => {
            let (t, snapped) = load_trimap(p)?;
            if snapped {
                log::warn!("{}: snapped non-trimap values to 0/128/255", p.display());
            }
            Some(t)
        }
        None => None,
    };
    Ok(evaluate(&pred, &gt, trimap.as_ref(), mode)?)
}

fn collect_items(a: &EvalArgs) -> Result<(Vec<Item>, bool)> {
    if a.pred.is_dir() {
        if !a.gt.is_dir() {
            bail!("--pred is a directory, so --gt must be one too");
        }
        let preds = list_pngs(&a.pred)?;
        let pairs = pair_by_stem(&preds, &list_pngs(&a.gt)?)?;
        let trimaps = match &a.trimap {
            Some(t) if t.is_dir() => pair_by_stem(&preds, &list_pngs(t)?)?
                .into_iter()
                .map(|(_, t)| Some(t))
                .collect(),
            Some(t) => bail!("{}: expected a trimap directory", t.display()),
            None => vec![None; pairs.len()],
        };
        let items = pairs
            .into_iter()
            .zip(trimaps)
            .map(|((pred, gt), trimap)| Item {
                name: stem(&pred),
                pred,
                gt,
                trimap,
            })
            .collect();
        Ok((items, true))
    } else {
        require_file(&a.pred)?;
        require_file(&a.gt)?;
        if let Some(t) = &a.trimap {
            require_file(t)?;
        }
        let item = Item {
            name: stem(&a.pred),
            pred: a.pred.clone(),
            gt: a.gt.clone(),
            trimap: a.trimap.clone(),
        };
        Ok((vec![item], false))
    }
}

fn mean_report(reports: &[&MetricsReport], region: RegionMode) -> Option<MeanRow> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    let avg = |f: fn(&MetricsReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / n;
    Some(MeanRow {
        sad: avg(|r| r.sad),
        mse: avg(|r| r.mse),
        mse_x100: avg(|r| r.mse_x100),
        grad: avg(|r| r.grad),
        conn: avg(|r| r.conn),
        region,
        pixels: avg(|r| r.pixel_count as f64),
    })
}

#[derive(Serialize)]
struct MeanRow {
    sad: f64,
    mse: f64,
    mse_x100: f64,
    grad: f64,
    conn: f64,
    region: RegionMode,
    pixels: f64,
}

#[derive(Serialize)]
struct NamedReport<'a> {
    name: &'a str,
    #[serde(flatten)]
    report: &'a MetricsReport,
}

#[derive(Serialize)]
struct Failure<'a> {
    name: &'a str,
    error: String,
}

#[derive(Serialize)]
struct BatchOutput<'a> {
    items: Vec<NamedReport<'a>>,
    mean: Option<MeanRow>,
    failed: Vec<Failure<'a>>,
}

const CSV_HEADER: [&str; 8] = [
    "name", "region", "pixels", "sad", "mse", "mse_x100", "grad", "conn",
];

fn append_csv(path: &Path, rows: &[NamedReport<'_>], mean: Option<&MeanRow>) -> Result<()> {
    prepare_output(path)?;
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let empty = file.metadata()?.len() == 0;
    let mut w = csv::Writer::from_writer(file);
    if empty {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        let m = r.report;
        w.write_record([
            r.name.to_string(),
            m.region.to_string(),
            m.pixel_count.to_string(),
            m.sad.to_string(),
            m.mse.to_string(),
            m.mse_x100.to_string(),
            m.grad.to_string(),
            m.conn.to_string(),
        ])?;
    }
    if let Some(m) = mean {
        w.write_record([
            "mean".to_string(),
            m.region.to_string(),
            m.pixels.to_string(),
            m.sad.to_string(),
            m.mse.to_string(),
            m.mse_x100.to_string(),
            m.grad.to_string(),
            m.conn.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Returns `false` when any pair failed.
pub fn run(a: &EvalArgs, pool: &rayon::ThreadPool) -> Result<bool> {
    let mode = region_mode(a.region);
    if mode == RegionMode::Unknown && a.trimap.is_none() {
        bail!("--region unknown requires --trimap");
    }
    let (items, batch) = collect_items(a)?;

    let results: Vec<Result<MetricsReport>> =
        pool.install(|| items.par_iter().map(|it| evaluate_item(it, mode)).collect());

    if !batch {
        let report = results.into_iter().next().expect("one item")?;
        if let Some(csv) = &a.csv {
            let row = NamedReport {
                name: &items[0].name,
                report: &report,
            };
            append_csv(csv, &[row], None)?;
        }
        print_json(&report)?;
        return Ok(true);
    }

    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (item, r) in items.iter().zip(&results) {
        match r {
            Ok(report) => ok.push(NamedReport {
                name: &item.name,
                report,
            }),
            Err(e) => {
                log::error!("{}: {e:#}", item.name);
                failed.push(Failure {
                    name: &item.name,
                    error: format!("{e:#}"),
                });
            }
        }
    }
    let reports: Vec<&MetricsReport> = ok.iter().map(|r| r.report).collect();
    let mean = mean_report(&reports, mode);
    if let Some(csv) = &a.csv {
        append_csv(csv, &ok, mean.as_ref())?;
    }
    let all_ok = failed.is_empty();
    print_json(&BatchOutput {
        items: ok,
        mean,
        failed,
    })?;
    Ok(all_ok)
}
