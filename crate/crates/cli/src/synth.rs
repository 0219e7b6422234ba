use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use serde_json::json;

use mattekit::compose::{render_to_dir, synthesize_manifest, write_manifest, SynthConfig};

use crate::args::SynthArgs;
use crate::commands::{prepare_output, print_json, require_dir};

/// Writes the manifest, then renders every record on the pool. Returns
/// `false` when any record failed to render.
pub fn run(a: &SynthArgs, seed: u64, pool: &rayon::ThreadPool) -> Result<bool> {
    require_dir(&a.fg_dir)?;
    require_dir(&a.alpha_dir)?;
    for d in &a.bg_dirs {
        require_dir(d)?;
    }
    ensure!(a.out_size > 0, "--out-size must be positive");
    ensure!(
        (0.0..=1.0).contains(&a.jitter),
        "--jitter must lie in [0, 1]"
    );
    prepare_output(&a.manifest)?;

    let config = SynthConfig {
        k_min: a.k_min,
        k_max: a.k_max,
        jitter_strength: a.jitter,
        out_size: a.out_size,
    };
    let records =
        synthesize_manifest(&a.fg_dir, &a.alpha_dir, &a.bg_dirs, a.per_fg, seed, &config)?;
    write_manifest(&records, &a.manifest)
        .with_context(|| format!("writing {}", a.manifest.display()))?;
    log::info!("{} records -> {}", records.len(), a.manifest.display());

    let failures: Vec<(usize, String)> = if a.no_render {
        Vec::new()
    } else {
        std::fs::create_dir_all(&a.out_dir)
            .with_context(|| format!("creating {}", a.out_dir.display()))?;
        let results: Vec<_> = pool.install(|| {
            records
                .par_iter()
                .enumerate()
                .map(|(i, r)| render_to_dir(r, i, &a.out_dir, &config))
                .collect()
        });
        results
            .into_iter()
            .enumerate()
            .filter_map(|(i, r)| r.err().map(|e| (i, e.to_string())))
            .collect()
    };
    for (i, e) in &failures {
        log::error!("record {i}: {e}");
    }

    print_json(&json!({
        "records": records.len(),
        "rendered": if a.no_render { 0 } else { records.len() - failures.len() },
        "manifest": a.manifest.display().to_string(),
        "failed": failures.iter().map(|(i, e)| json!({ "record": i, "error": e })).collect::<Vec<_>>(),
    }))?;
    Ok(failures.is_empty())
}
