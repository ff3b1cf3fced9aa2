//! Input expansion, output naming and the per-file processing loop.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use tmoz_core::hdr_io::{encode_png, read_hdr_file, HdrFormat};
use tmoz_core::{tonemap_pipeline, PipelineConfig, RunReport};

use crate::config::{apply_sweep, Config, StatsFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Report text for one run: `name=value` lines, or a CSV header and row.
pub fn emit_stats(report: &RunReport, format: StatsFormat) -> String {
    match format {
        StatsFormat::Kv => report.to_kv(),
        StatsFormat::Csv => format!("{}\n{}\n", RunReport::csv_header(), report.csv_row()),
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn is_hdr(path: &Path) -> bool {
    HdrFormat::from_path(path).is_some()
}

/// Files named on the command line, with directories replaced by the
/// `.hdr`/`.pfm` files they contain (sorted, not recursive).
pub fn expand_inputs(inputs: &[PathBuf]) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_hdr(p))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

/// One image to render.
#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub output: PathBuf,
    pub config: PipelineConfig,
}

/// Everything rendered from one input file.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub input: PathBuf,
    pub jobs: Vec<Job>,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

/// `<stem>_<param><value>.png` next to `base`.
fn sweep_name(base: &Path, param: impl std::fmt::Display, value: f64) -> PathBuf {
    base.with_file_name(format!("{}_{param}{value}.png", stem(base)))
}

/// Output paths: `-o` names the file for a single input file, and a
/// directory otherwise; without `-o` outputs land next to their inputs.
pub fn plan(cfg: &Config, inputs: &[PathBuf]) -> Vec<Task> {
    let single_file = inputs.len() == 1 && cfg.inputs.len() == 1 && !cfg.inputs[0].is_dir();
    let to_file = |o: &Path| {
        single_file && !o.is_dir() && o.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
    };
    inputs
        .iter()
        .map(|input| {
            let base = match &cfg.output {
                Some(o) if to_file(o) => o.clone(),
                Some(dir) => dir.join(format!("{}.png", stem(input))),
                None => input.with_extension("png"),
            };
            let jobs = match &cfg.sweep {
                None => vec![Job {
                    output: base,
                    config: cfg.pipeline,
                }],
                Some(s) => s
                    .values
                    .iter()
                    .map(|&v| {
                        let mut config = cfg.pipeline;
                        apply_sweep(&mut config, s.param, v);
                        Job {
                            output: sweep_name(&base, s.param, v),
                            config,
                        }
                    })
                    .collect(),
            };
            Task {
                input: input.clone(),
                jobs,
            }
        })
        .collect()
}

fn report_path(output: &Path) -> PathBuf {
    output.with_extension("txt")
}

fn run_task(task: &Task, stats: bool) -> Result<Vec<(PathBuf, RunReport)>, String> {
    let hdr = read_hdr_file(&task.input).map_err(|e| e.to_string())?;
    let mut done = Vec::new();
    for job in &task.jobs {
        let (sdr, report) = tonemap_pipeline(&hdr, &job.config).map_err(|e| e.to_string())?;
        let png = encode_png(&sdr).map_err(|e| e.to_string())?;
        if let Some(dir) = job.output.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        }
        write_atomic(&job.output, &png).map_err(|e| format!("{}: {e}", job.output.display()))?;
        if stats {
            let path = report_path(&job.output);
            write_atomic(&path, emit_stats(&report, StatsFormat::Kv).as_bytes())
                .map_err(|e| format!("{}: {e}", path.display()))?;
        }
        done.push((job.output.clone(), report));
    }
    Ok(done)
}

/// Processes every input independently and returns the exit status:
/// 0 when all succeeded, 1 when any failed, 2 when there was nothing to do.
pub fn run_batch(cfg: &Config) -> i32 {
    let inputs = match expand_inputs(&cfg.inputs) {
        Ok(i) if !i.is_empty() => i,
        Ok(_) => {
            eprintln!("tonemap: no .hdr or .pfm files found");
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("tonemap: {e}");
            return EXIT_USAGE;
        }
    };
    let tasks = plan(cfg, &inputs);
    let results: Vec<_> = tasks.par_iter().map(|t| run_task(t, cfg.stats)).collect();

    let mut failed = 0;
    let mut csv = format!("file,{}\n", RunReport::csv_header());
    for (task, result) in tasks.iter().zip(results) {
        match result {
            Ok(done) => {
                for (path, report) in done {
                    println!("{}", path.display());
                    csv.push_str(&format!("{},{}\n", path.display(), report.csv_row()));
                }
            }
            Err(e) => {
                failed += 1;
                let name = task.input.display().to_string();
                if e.starts_with(&name) {
                    eprintln!("tonemap: {e}");
                } else {
                    eprintln!("tonemap: {name}: {e}");
                }
            }
        }
    }
    if let Some(path) = &cfg.csv {
        if let Err(e) = write_atomic(path, csv.as_bytes()) {
            eprintln!("tonemap: {}: {e}", path.display());
            failed += 1;
        }
    }
    if failed > 0 {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Sweep, SweepParam};

    fn config(inputs: &[&str], output: Option<&str>) -> Config {
        Config {
            inputs: inputs.iter().map(PathBuf::from).collect(),
            output: output.map(PathBuf::from),
            pipeline: PipelineConfig::default(),
            sweep: None,
            stats: false,
            csv: None,
        }
    }

    #[test]
    fn output_naming() {
        let c = config(&["scenes/a.hdr"], None);
        let t = plan(&c, &c.inputs);
        assert_eq!(t[0].jobs[0].output, PathBuf::from("scenes/a.png"));

        let c = config(&["a.hdr"], Some("out/x.png"));
        assert_eq!(
            plan(&c, &c.inputs)[0].jobs[0].output,
            PathBuf::from("out/x.png")
        );

        let c = config(&["a.hdr", "b.pfm"], Some("out"));
        let t = plan(&c, &c.inputs);
        assert_eq!(t[1].jobs[0].output, PathBuf::from("out/b.png"));
    }

    #[test]
    fn sweep_naming() {
        let mut c = config(&["dir/mem.hdr"], None);
        c.sweep = Some(Sweep {
            param: SweepParam::Gamma,
            values: vec![0.1, 0.4, 1.0],
        });
        let t = plan(&c, &c.inputs);
        let names: Vec<_> = t[0].jobs.iter().map(|j| j.output.clone()).collect();
        assert_eq!(
            names,
            [
                "dir/mem_gamma0.1.png",
                "dir/mem_gamma0.4.png",
                "dir/mem_gamma1.png"
            ]
            .map(PathBuf::from)
        );
        assert_eq!(t[0].jobs[1].config.tone.gamma, Some(0.4));
    }

    #[test]
    fn stats_formats() {
        let r = RunReport::default();
        let kv = emit_stats(&r, StatsFormat::Kv);
        assert!(kv.lines().any(|l| l.starts_with("key=")));
        assert!(kv.lines().any(|l| l.starts_with("gamma=")));
        let csv = emit_stats(&r, StatsFormat::Csv);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
