//! `ssi-vtl` command line: `synth | analyze | estimate | evaluate | sweep`.
//!
//! Every subcommand accepts `--config <json>`; explicit flags override
//! the file, and the file overrides built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::corpus::{default_speakers, make_corpus, pair_demo_speakers, Manifest, Speaker, MANIFEST_NAME};
use crate::error::{Error, Result};
use crate::eval::{
    analyze_corpus, default_hmax_grid, estimate, estimates_csv, exclusion_trials, hmax_sweep, report_csv,
    scatter_csv, sweep_csv, trials_csv, write_csv, EvalReport,
};
use crate::pipeline::{analyze, AnalysisParams, F0Source, Representation, Utterance, UtteranceSource};
use crate::synth::Vowel;
use crate::vtl::channel_shift_to_ratio;

#[derive(Debug, Parser)]
#[command(name = "ssi-vtl", version, about = "Vocal tract length estimation with F0-adaptive spectral weighting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON experiment configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Representation id (Ep, Ep_SSI, F_log, F_SSI_0.4, M_log, ...); repeatable
    #[arg(long = "rep", global = true)]
    pub reps: Vec<String>,
    /// Upper limit h_max of the weight
    #[arg(long, global = true)]
    pub hmax: Option<f64>,
    /// F0 for the weight: auto, manifest, a value in Hz, or an F0 CSV (utterance_id,f0_hz)
    #[arg(long, global = true)]
    pub f0: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a vowel corpus with known vocal tract lengths
    Synth {
        /// Two-speaker /a/ corpus: 15.0 cm at 182 Hz and 18.5 cm at 101 Hz
        #[arg(long)]
        pair_demo: bool,
        /// Comma-separated VTL scale factors (one speaker each)
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alphas: Vec<f64>,
        /// Comma-separated F0 values matching --alphas
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        f0s: Vec<f64>,
        /// Comma-separated vowels (default: a,i,u,e,o)
        #[arg(long, value_delimiter = ',')]
        vowels: Vec<String>,
    },
    /// Compute one spectrum from a WAV file
    Analyze { audio: PathBuf },
    /// Estimate VTLs for every utterance in a manifest
    Estimate { manifest: Option<PathBuf> },
    /// Correlation, RMS and exclusion trials for several representations
    Evaluate { manifest: Option<PathBuf> },
    /// Correlation as a function of h_max
    Sweep { manifest: Option<PathBuf> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub speakers: Option<Vec<Speaker>>,
    pub vowels: Vec<Vowel>,
    pub pair_demo: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { speakers: None, vowels: Vowel::ALL.to_vec(), pair_demo: false }
    }
}

/// Serialized experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub representations: Vec<String>,
    pub hmax_grid: Vec<f64>,
    pub trials: usize,
    pub exclude: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub f0: String,
    pub analysis: AnalysisParams,
    pub synth: SynthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            representations: ["Ep", "Ep_SSI", "F_log", "F_SSI_log", "M_log", "M_SSI_log"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            hmax_grid: default_hmax_grid(),
            trials: 10,
            exclude: 3,
            seed: 0,
            out_dir: PathBuf::from("out"),
            f0: "auto".into(),
            analysis: AnalysisParams::default(),
            synth: SynthConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
    }

    /// Config file (if any) with command-line overrides applied.
    pub fn resolve(common: &CommonArgs) -> Result<Self> {
        let mut cfg = match &common.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if !common.reps.is_empty() {
            cfg.representations = common.reps.clone();
        }
        if let Some(h) = common.hmax {
            cfg.analysis.h_max = h;
        }
        if let Some(f) = &common.f0 {
            cfg.f0 = f.clone();
        }
        if let Some(s) = common.seed {
            cfg.seed = s;
        }
        if let Some(o) = &common.out {
            cfg.out_dir = o.clone();
        }
        if !(cfg.analysis.h_max >= 0.0) {
            return Err(Error::Config(format!("hmax must be >= 0, got {}", cfg.analysis.h_max)));
        }
        Ok(cfg)
    }

    pub fn representations(&self) -> Result<Vec<Representation>> {
        if self.representations.is_empty() {
            return Err(Error::Config("no representations selected".into()));
        }
        self.representations.iter().map(|s| s.parse()).collect()
    }

    fn manifest(&self, positional: &Option<PathBuf>) -> Result<Manifest> {
        let path = positional
            .as_ref()
            .or(self.manifest.as_ref())
            .ok_or_else(|| Error::Config("no manifest given (positional argument or config \"manifest\")".into()))?;
        Manifest::read(path)
    }

    fn single_rep(&self) -> Result<Representation> {
        let reps = self.representations()?;
        if reps.len() != 1 && self.representations != RunConfig::default().representations {
            return Err(Error::Config(format!("this command takes one --rep, got {}", reps.len())));
        }
        Ok(if reps.len() == 1 { reps[0] } else { "Ep_SSI".parse()? })
    }
}

/// Result of a subcommand: files written plus a short human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub summary: String,
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(&cli.common)?;
    match &cli.command {
        Command::Synth { pair_demo, alphas, f0s, vowels } => cmd_synth(&cfg, *pair_demo, alphas, f0s, vowels, cli.common.out.is_some()),
        Command::Analyze { audio } => cmd_analyze(&cfg, audio, cli.common.out.is_some()),
        Command::Estimate { manifest } => cmd_estimate(&cfg, manifest),
        Command::Evaluate { manifest } => cmd_evaluate(&cfg, manifest),
        Command::Sweep { manifest } => cmd_sweep(&cfg, manifest),
    }
}

fn cmd_synth(cfg: &RunConfig, pair_demo: bool, alphas: &[f64], f0s: &[f64], vowels: &[String], out_given: bool) -> Result<Outcome> {
    let pair_demo = pair_demo || cfg.synth.pair_demo;
    let speakers = if pair_demo {
        pair_demo_speakers()
    } else if !alphas.is_empty() {
        if alphas.len() != f0s.len() {
            return Err(Error::Config(format!(
                "--alphas has {} values but --f0s has {}",
                alphas.len(),
                f0s.len()
            )));
        }
        alphas
            .iter()
            .zip(f0s)
            .enumerate()
            .map(|(k, (a, f))| Speaker::new(format!("s{}", k + 1), *f, *a))
            .collect::<Result<Vec<_>>>()?
    } else if let Some(s) = &cfg.synth.speakers {
        s.iter().map(|s| Speaker::new(s.id.clone(), s.f0, s.alpha)).collect::<Result<Vec<_>>>()?
    } else {
        default_speakers()
    };
    let vowels: Vec<Vowel> = if !vowels.is_empty() {
        vowels.iter().map(|v| v.parse()).collect::<Result<_>>()?
    } else if pair_demo {
        vec![Vowel::A]
    } else {
        cfg.synth.vowels.clone()
    };
    let dir = if out_given { cfg.out_dir.clone() } else { PathBuf::from(if pair_demo { "pair_demo" } else { "corpus" }) };
    let m = make_corpus(&dir, &speakers, &vowels)?;
    let mut written: Vec<PathBuf> = m.rows.iter().map(|r| m.resolve(r)).collect();
    written.push(dir.join(MANIFEST_NAME));
    Ok(Outcome {
        summary: format!("{} utterances ({} speakers x {} vowels) in {}", m.rows.len(), speakers.len(), vowels.len(), dir.display()),
        written,
    })
}

fn cmd_analyze(cfg: &RunConfig, audio: &Path, out_given: bool) -> Result<Outcome> {
    let rep = cfg.single_rep()?;
    let f0 = F0Source::parse(&cfg.f0)?;
    let id = audio.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let is_csv = audio.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let utt = Utterance {
        id: id.clone(),
        speaker_id: id.clone(),
        vowel: Vowel::A,
        vtl_cm: 1.0,
        f0_hz: None,
        source: if is_csv { UtteranceSource::SpectrumCsv(audio.into()) } else { UtteranceSource::Wav(audio.into()) },
    };
    let (spectrum, f0_used) = analyze(&utt, rep, &cfg.analysis, &f0)?;
    let text = spectrum.to_csv_string();
    let summary = if rep.ssi { format!("{id}: {rep}, f0 {f0_used:.2} Hz, h_max {}", cfg.analysis.h_max) } else { format!("{id}: {rep}") };
    if !out_given {
        print!("{text}");
        return Ok(Outcome { written: vec![], summary });
    }
    let path = cfg.out_dir.join(format!("{id}_{rep}.csv"));
    write_csv(&path, &text)?;
    Ok(Outcome { written: vec![path], summary })
}

fn cmd_estimate(cfg: &RunConfig, manifest: &Option<PathBuf>) -> Result<Outcome> {
    let rep = cfg.single_rep()?;
    let m = cfg.manifest(manifest)?;
    let utts = Utterance::from_manifest(&m);
    let items = analyze_corpus(&utts, &[rep], &cfg.analysis, &F0Source::parse(&cfg.f0)?)?;
    let est = estimate(&items, rep, cfg.analysis.h_max, &cfg.analysis)?;
    let out = &cfg.out_dir;
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let p = out.join(name);
        write_csv(&p, &text)?;
        written.push(p);
        Ok(())
    };
    put("estimates.csv".into(), estimates_csv(&est))?;
    let mut speakers = String::from("speaker_id,L_est_mean_cm,L_meas_mean_cm\n");
    for (id, e, l) in est.speaker_means() {
        speakers.push_str(&format!("{id},{e},{l}\n"));
    }
    put("speakers.csv".into(), speakers)?;
    for (vowel, (ids, matrix)) in &est.matrices {
        let header = ids.join(",");
        put(format!("shift_matrix_{vowel}.csv"), format!("{header}\n{}", matrix.to_csv_string()))?;
    }
    put("report.csv".into(), report_csv(&[EvalReport::from_estimation(rep, cfg.analysis.h_max, &est, vec![])]))?;

    let mut summary = format!("{rep}: q = {:.6}, mean VTL {:.3} cm, RMS {:.4} cm", est.q, est.l_bar, est.rms_cm());
    if let Some(r) = est.all_r() {
        summary.push_str(&format!(", r = {r:.4}"));
    }
    if let Some((ids, matrix)) = est.matrices.values().next().filter(|(ids, _)| ids.len() == 2) {
        let axis = cfg.analysis.axis_for(rep.front)?;
        let ratio = channel_shift_to_ratio(&axis, -matrix.get(0, 1), 2000.0)?;
        summary.push_str(&format!(
            "; shift {} -> {}: {:.1} channels, length ratio {ratio:.4}",
            ids[0],
            ids[1],
            matrix.get(0, 1)
        ));
    }
    Ok(Outcome { written, summary })
}

fn cmd_evaluate(cfg: &RunConfig, manifest: &Option<PathBuf>) -> Result<Outcome> {
    let reps = cfg.representations()?;
    let m = cfg.manifest(manifest)?;
    let items = analyze_corpus(&Utterance::from_manifest(&m), &reps, &cfg.analysis, &F0Source::parse(&cfg.f0)?)?;
    let h = cfg.analysis.h_max;
    let mut reports = Vec::new();
    let mut estimations = Vec::new();
    for rep in &reps {
        let est = estimate(&items, *rep, h, &cfg.analysis)?;
        let trials = exclusion_trials(&items, *rep, h, &cfg.analysis, cfg.exclude, cfg.trials, cfg.seed)?;
        reports.push(EvalReport::from_estimation(*rep, h, &est, trials));
        estimations.push((*rep, est));
    }
    let out = &cfg.out_dir;
    let files = [
        ("report.csv", report_csv(&reports)),
        ("trials.csv", trials_csv(&reports)),
        ("scatter.csv", scatter_csv(&estimations.iter().map(|(r, e)| (*r, e)).collect::<Vec<_>>())),
    ];
    let mut written = Vec::new();
    for (name, text) in files {
        let p = out.join(name);
        write_csv(&p, &text)?;
        written.push(p);
    }
    let summary = reports
        .iter()
        .map(|r| {
            let (m, s) = r.trial_stats().unwrap_or((f64::NAN, f64::NAN));
            format!(
                "{:<12} r_all {:>7} RMS {:.4} cm  trials {:.4} ± {:.4} cm",
                r.representation_id,
                r.all_r.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
                r.rms_cm,
                m,
                s
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome { written, summary })
}

fn cmd_sweep(cfg: &RunConfig, manifest: &Option<PathBuf>) -> Result<Outcome> {
    let mut reps = cfg.representations()?;
    // one sweep per front end/compression pair
    reps.dedup_by_key(|r| r.base_key());
    let m = cfg.manifest(manifest)?;
    let items = analyze_corpus(
        &Utterance::from_manifest(&m),
        &reps.iter().map(|r| r.weighted()).collect::<Vec<_>>(),
        &cfg.analysis,
        &F0Source::parse(&cfg.f0)?,
    )?;
    let mut text = String::new();
    let mut summary = Vec::new();
    for rep in &reps {
        let rows = hmax_sweep(&items, *rep, &cfg.hmax_grid, &cfg.analysis)?;
        let csv = sweep_csv(*rep, &rows);
        if text.is_empty() {
            text = csv;
        } else {
            text.extend(csv.lines().skip(1).map(|l| format!("{l}\n")));
        }
        if let Some(best) = rows.iter().filter(|r| r.all_r.is_some()).max_by(|a, b| a.all_r.partial_cmp(&b.all_r).expect("finite r")) {
            summary.push(format!("{}: best r_all {:.4} at h_max {}", rep.weighted(), best.all_r.unwrap_or(f64::NAN), best.h_max));
        }
    }
    let p = cfg.out_dir.join("sweep.csv");
    write_csv(&p, &text)?;
    Ok(Outcome { written: vec![p], summary: summary.join("\n") })
}
