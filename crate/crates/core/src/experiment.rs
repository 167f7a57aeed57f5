//! Batch experiments behind the command-line front end: per-state spectrum
//! reports, pooled scatter data over a range of decay exponents, and scaling
//! curves with fits.
//!
//! Every command returns its files in memory. Rows are produced per disorder
//! sample in parallel and concatenated in sample order, so the bytes do not
//! depend on the worker count.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::basis::SectorBasis;
use crate::couplings::{sample_couplings, CouplingMatrix, CouplingModel, DisorderPlan};
use crate::ensembles::{self, Ensemble, EnsembleKind, EnsembleSpec, PairPolicy, Quantity};
use crate::entanglement::{column_statistics, concurrence_summary, participation_ratio, StateReport};
use crate::error::{Error, Result};
use crate::fitting::{scaling_pipeline, CurvePoint, Family, FitOptions};
use crate::ladder::{classify, localized_promotion_bound, Label, LadderTolerance, PromotionMap};
use crate::rng;
use crate::sector::{assemble, SectorMatrix};
use crate::spectrum::{default_degtol, diagonalize_with};
use crate::stats::{mean_stderr, pairwise_sum};
use crate::VERSION;

/// What the scaling command measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScalingTarget {
    /// Promoted two-particle eigenstates of the disordered Hamiltonian.
    #[default]
    Eigenstates,
    Random,
    RandomPromoted,
}

impl ScalingTarget {
    pub fn name(self) -> &'static str {
        match self {
            ScalingTarget::Eigenstates => "eigenstates",
            ScalingTarget::Random => "random",
            ScalingTarget::RandomPromoted => "random_promoted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: CouplingModel,
    /// Decay exponents for the phase diagram; `inf` means nearest neighbour.
    #[serde(with = "sigma_list")]
    pub sigmas: Vec<f64>,
    pub sizes: Vec<usize>,
    pub particles: usize,
    pub samples: usize,
    pub seed: u64,
    pub pairs: PairPolicy,
    /// Degeneracy tolerance; `None` uses `1e-8 · max(1, ‖H‖_F)` per matrix.
    pub degtol: Option<f64>,
    pub ladder_tol: LadderTolerance,
    pub target: ScalingTarget,
    pub dump_hamiltonian: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: CouplingModel::InfiniteRange,
            sigmas: vec![0.0, 0.5, 1.0, 2.0, 2.5, f64::INFINITY],
            sizes: vec![25],
            particles: 2,
            samples: 1,
            seed: 0,
            pairs: PairPolicy::SinglePair,
            degtol: None,
            ladder_tol: LadderTolerance::default(),
            target: ScalingTarget::Eigenstates,
            dump_hamiltonian: false,
        }
    }
}

mod sigma_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Sigma {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let items: Vec<Sigma> = v
            .iter()
            .map(|&x| {
                if x.is_finite() {
                    Sigma::Finite(x)
                } else {
                    Sigma::Named("inf".into())
                }
            })
            .collect();
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let items = Vec::<Sigma>::deserialize(d)?;
        items
            .into_iter()
            .map(|s| match s {
                Sigma::Finite(x) => Ok(x),
                Sigma::Named(n) if n == "inf" => Ok(f64::INFINITY),
                Sigma::Named(n) => Err(serde::de::Error::custom(format!("bad sigma {n:?}"))),
            })
            .collect()
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.ladder_tol.validate()?;
        if self.sizes.is_empty() {
            return Err(Error::InvalidConfig("no system sizes given".into()));
        }
        if let Some(&l) = self.sizes.iter().find(|&&l| l < 2) {
            return Err(Error::InvalidConfig(format!("system size {l} is below 2")));
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("at least one sample required".into()));
        }
        if let Some(t) = self.degtol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidConfig(format!("degtol must be positive, got {t}")));
            }
        }
        for &s in &self.sigmas {
            if s.is_nan() || s < 0.0 {
                return Err(Error::InvalidConfig(format!("sigma must be >= 0 or inf, got {s}")));
            }
        }
        Ok(())
    }

    fn plan(&self, model: CouplingModel) -> DisorderPlan {
        DisorderPlan {
            model,
            sizes: self.sizes.clone(),
            samples: self.samples,
            master_seed: self.seed,
        }
    }

    fn header(&self, command: &str) -> String {
        let config = serde_json::to_string(self).expect("config serializes");
        format!("# spinglass {VERSION}\n# command: {command}\n# seed: {}\n# config: {config}\n", self.seed)
    }

    fn json_header(&self, command: &str) -> serde_json::Value {
        json!({
            "version": VERSION,
            "command": command,
            "seed": self.seed,
            "config": self,
        })
    }
}

/// A named output document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Writes `files` under `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, files: &[OutputFile]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for f in files {
        std::fs::write(dir.join(&f.name), &f.contents)?;
    }
    Ok(())
}

/// `ir`, `nn` or `pl<sigma>`.
pub fn model_tag(model: &CouplingModel) -> String {
    match model {
        CouplingModel::PowerLaw { sigma } => format!("pl{sigma}"),
        m => m.short_name().to_string(),
    }
}

fn sigma_tag(sigma: f64) -> String {
    if sigma.is_finite() {
        format!("{sigma}")
    } else {
        "inf".into()
    }
}

/// Reports of one disorder sample.
#[derive(Clone, Debug)]
pub struct SampleAnalysis {
    pub couplings: CouplingMatrix<f64>,
    pub hamiltonian: SectorMatrix<f64>,
    pub rows: Vec<StateReport>,
}

/// Diagonalize one realization and report every eigenstate. Labels are
/// attached when the sector has a lower neighbour.
pub fn analyze_sample(
    model: CouplingModel,
    qubits: usize,
    particles: usize,
    seed: u64,
    degtol: Option<f64>,
    ladder_tol: LadderTolerance,
) -> Result<SampleAnalysis> {
    let couplings = sample_couplings::<f64>(model, qubits, seed)?;
    let basis = Arc::new(SectorBasis::new(qubits, particles)?);
    let hamiltonian = assemble(&couplings, basis.clone())?;
    let tol = degtol.unwrap_or_else(|| default_degtol(hamiltonian.frobenius_norm()));
    let mut spectrum = diagonalize_with(&hamiltonian, tol)?;
    let labels = if particles >= 1 {
        Some(classify(&mut spectrum, ladder_tol)?)
    } else {
        None
    };
    let stats = column_statistics(&basis, spectrum.eigenvectors());
    let sj = couplings.coupling_sum();
    let rows = (0..spectrum.len())
        .map(|k| {
            let e = spectrum.eigenvalues()[k];
            StateReport {
                index: k,
                eigenvalue: Some(e),
                energy_offset: Some(e - sj),
                avg_concurrence: stats[k].0,
                participation_ratio: stats[k].1,
                promoted: labels.as_ref().map(|c| c.labels[k].code()),
                degenerate: spectrum.is_degenerate(k),
            }
        })
        .collect();
    Ok(SampleAnalysis {
        couplings,
        hamiltonian,
        rows,
    })
}

fn analyze_all(cfg: &ExperimentConfig, model: CouplingModel, qubits: usize) -> Result<Vec<SampleAnalysis>> {
    let plan = cfg.plan(model);
    (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            analyze_sample(
                model,
                qubits,
                cfg.particles,
                plan.sample_seed(qubits, s),
                cfg.degtol,
                cfg.ladder_tol,
            )
        })
        .collect()
}

/// Per-eigenstate CSV, one file per size and disorder sample.
pub fn spectrum_report(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    cfg.validate()?;
    let header = cfg.header("spectrum");
    let tag = model_tag(&cfg.model);
    let mut files = Vec::new();
    for &l in &cfg.sizes {
        for (s, a) in analyze_all(cfg, cfg.model, l)?.into_iter().enumerate() {
            let stem = format!("{tag}_L{l}_m{}_s{s}", cfg.particles);
            let mut csv = header.clone();
            csv.push_str(StateReport::CSV_HEADER);
            csv.push('\n');
            for r in &a.rows {
                csv.push_str(&r.csv_row());
                csv.push('\n');
            }
            files.push(OutputFile {
                name: format!("spectrum_{stem}.csv"),
                contents: csv,
            });
            if cfg.dump_hamiltonian {
                let mut j = Vec::new();
                a.couplings.write_csv(&mut j)?;
                let mut h = Vec::new();
                a.hamiltonian.write_csv(&mut h)?;
                files.push(OutputFile {
                    name: format!("couplings_{stem}.csv"),
                    contents: header.clone() + &String::from_utf8(j).expect("utf8"),
                });
                files.push(OutputFile {
                    name: format!("hamiltonian_{stem}.csv"),
                    contents: header.clone() + &String::from_utf8(h).expect("utf8"),
                });
            }
        }
    }
    Ok(files)
}

/// Pooled promoted/new statistics of one decay exponent and size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudStats {
    pub sigma: f64,
    pub qubits: usize,
    pub samples: usize,
    pub promoted_per_sample: Vec<usize>,
    pub n_new: usize,
    pub n_ambiguous: usize,
    pub mean_c_promoted: f64,
    pub mean_c_new: f64,
}

impl CloudStats {
    /// Mean average concurrence of promoted over new states.
    pub fn ratio(&self) -> f64 {
        self.mean_c_promoted / self.mean_c_new
    }

    fn from_samples(sigma: f64, qubits: usize, samples: &[SampleAnalysis]) -> Self {
        let mut promoted = Vec::new();
        let mut new = Vec::new();
        let mut promoted_per_sample = Vec::with_capacity(samples.len());
        let mut n_ambiguous = 0;
        for a in samples {
            let mut count = 0;
            for r in &a.rows {
                match r.promoted {
                    Some(1) => {
                        promoted.push(r.avg_concurrence);
                        count += 1;
                    }
                    Some(0) => new.push(r.avg_concurrence),
                    _ => n_ambiguous += 1,
                }
            }
            promoted_per_sample.push(count);
        }
        let mean = |xs: &[f64]| {
            if xs.is_empty() {
                f64::NAN
            } else {
                pairwise_sum(xs) / xs.len() as f64
            }
        };
        CloudStats {
            sigma,
            qubits,
            samples: samples.len(),
            promoted_per_sample,
            n_new: new.len(),
            n_ambiguous,
            mean_c_promoted: mean(&promoted),
            mean_c_new: mean(&new),
        }
    }
}

/// Promoted/new cloud statistics for one model, without file output.
pub fn cloud_statistics(cfg: &ExperimentConfig, model: CouplingModel, qubits: usize) -> Result<CloudStats> {
    cfg.validate()?;
    model.validate()?;
    Ok(CloudStats::from_samples(model.sigma(), qubits, &analyze_all(cfg, model, qubits)?))
}

/// Scatter rows pooled over samples, one file per exponent and size, plus a
/// summary of the promoted and new clouds.
pub fn phase_diagram(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    cfg.validate()?;
    if cfg.sigmas.is_empty() {
        return Err(Error::InvalidConfig("no decay exponents given".into()));
    }
    if cfg.particles == 0 {
        return Err(Error::InvalidConfig("the phase diagram needs at least one particle".into()));
    }
    let header = cfg.header("phase-diagram");
    let mut files = Vec::new();
    let mut summary = header.clone();
    summary.push_str("sigma,L,m,samples,n_promoted,n_new,n_ambiguous,mean_c_promoted,mean_c_new,ratio\n");
    for &sigma in &cfg.sigmas {
        let model = CouplingModel::power_law(sigma)?;
        for &l in &cfg.sizes {
            let samples = analyze_all(cfg, model, l)?;
            let mut csv = header.clone();
            csv.push_str("sample,");
            csv.push_str(StateReport::CSV_HEADER);
            csv.push('\n');
            for (s, a) in samples.iter().enumerate() {
                for r in &a.rows {
                    let _ = writeln!(csv, "{s},{}", r.csv_row());
                }
            }
            files.push(OutputFile {
                name: format!("phase_sigma{}_L{l}_m{}.csv", sigma_tag(sigma), cfg.particles),
                contents: csv,
            });
            let c = CloudStats::from_samples(sigma, l, &samples);
            let _ = writeln!(
                summary,
                "{},{l},{},{},{},{},{},{:e},{:e},{:e}",
                sigma_tag(sigma),
                cfg.particles,
                c.samples,
                c.promoted_per_sample.iter().sum::<usize>(),
                c.n_new,
                c.n_ambiguous,
                c.mean_c_promoted,
                c.mean_c_new,
                c.ratio()
            );
        }
    }
    files.push(OutputFile {
        name: "phase_summary.csv".into(),
        contents: summary,
    });
    Ok(files)
}

/// One point of a scaling curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub qubits: usize,
    pub quantity: Quantity,
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub kind: String,
    pub pair_policy: PairPolicy,
}

impl CurveRow {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{},{},{}",
            self.qubits,
            self.quantity,
            self.mean,
            self.stderr,
            self.n_samples,
            self.kind,
            self.pair_policy.name()
        )
    }
}

/// Mean concurrence, fraction of entangled pairs and IPR of the promoted
/// two-particle eigenstates, obtained by promoting every one-particle
/// eigenstate of each disorder sample.
pub fn promoted_eigenstate_curve(cfg: &ExperimentConfig, qubits: usize) -> Result<[CurveRow; 3]> {
    let plan = cfg.plan(cfg.model);
    let per_sample: Vec<Vec<(f64, f64, f64)>> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| -> Result<Vec<(f64, f64, f64)>> {
            let j = plan.realize::<f64>(qubits, s)?;
            let one = Arc::new(SectorBasis::new(qubits, 1)?);
            let h = assemble(&j, one.clone())?;
            let tol = cfg.degtol.unwrap_or_else(|| default_degtol(h.frobenius_norm()));
            let spectrum = diagonalize_with(&h, tol)?;
            let map = PromotionMap::new(one.clone())?;
            let mut out = Vec::with_capacity(qubits);
            for k in 0..spectrum.len() {
                let state = crate::entanglement::DefiniteParticleState::normalized(
                    one.clone(),
                    spectrum.eigenvector(k).into_owned(),
                )?;
                let promoted = map.promote(&state)?;
                let (mean, frac) = concurrence_summary(&promoted);
                out.push((mean, frac, 1.0 / participation_ratio(&promoted)));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let flat: Vec<(f64, f64, f64)> = per_sample.into_iter().flatten().collect();
    let kind = format!("promoted_eigenstates_{}", model_tag(&cfg.model));
    let row = |quantity, f: fn(&(f64, f64, f64)) -> f64| {
        let m = mean_stderr(&flat.iter().map(f).collect::<Vec<_>>());
        CurveRow {
            qubits,
            quantity,
            mean: m.mean,
            stderr: m.stderr,
            n_samples: m.n,
            kind: kind.clone(),
            pair_policy: PairPolicy::AllPairs,
        }
    };
    Ok([
        row(Quantity::ProbPositiveC, |t| t.1),
        row(Quantity::MeanC, |t| t.0),
        row(Quantity::MeanIpr, |t| t.2),
    ])
}

fn ensemble_curve(cfg: &ExperimentConfig, kind: EnsembleKind, qubits: usize) -> Result<[CurveRow; 3]> {
    let spec = EnsembleSpec::new(kind, qubits, cfg.samples, rng::derive_seed(cfg.seed, qubits as u64))
        .with_pairs(cfg.pairs);
    let est = Ensemble::new(spec)?.estimate()?;
    Ok(est.map(|e| CurveRow {
        qubits,
        quantity: e.quantity,
        mean: e.mean,
        stderr: e.stderr,
        n_samples: e.n_samples,
        kind: kind.name().to_string(),
        pair_policy: e.pairs,
    }))
}

/// Scaling curves in `L`, reference overlays, and fits of the
/// concurrence (power law) and entangled-pair probability (power offset and
/// exponential saturation).
pub fn scaling(cfg: &ExperimentConfig) -> Result<Vec<OutputFile>> {
    cfg.validate()?;
    let opts = FitOptions::default();
    let fit_sizes = cfg.sizes.iter().filter(|&&l| l as f64 >= opts.l_min).count();
    if fit_sizes < 4 {
        return Err(Error::InvalidConfig(format!(
            "scaling needs at least 4 sizes >= {}, got {fit_sizes}",
            opts.l_min
        )));
    }
    if let Some(l) = cfg.sizes.iter().find(|&&l| l < 3) {
        return Err(Error::InvalidConfig(format!("scaling needs L >= 3, got {l}")));
    }
    let mut rows = Vec::new();
    for &l in &cfg.sizes {
        let curve = match cfg.target {
            ScalingTarget::Eigenstates => promoted_eigenstate_curve(cfg, l)?,
            ScalingTarget::Random => ensemble_curve(cfg, EnsembleKind::Random2p, l)?,
            ScalingTarget::RandomPromoted => ensemble_curve(cfg, EnsembleKind::RandomPromoted2p, l)?,
        };
        rows.extend(curve);
    }

    let header = cfg.header("scaling");
    let stem = match cfg.target {
        ScalingTarget::Eigenstates => format!("scaling_{}_{}", cfg.target.name(), model_tag(&cfg.model)),
        t => format!("scaling_{}", t.name()),
    };
    let mut csv = header.clone();
    csv.push_str(ensembles::McEstimate::CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }

    let mut reference = header.clone();
    reference.push_str(
        "L,localized_bound_mean_c,localized_bound_positive_fraction,promoted_mean_c,random_2p_mean_c,asymptotic_positive_probability\n",
    );
    for &l in &cfg.sizes {
        let b = localized_promotion_bound(l)?;
        let cf = ensembles::closed_forms(l)?;
        let _ = writeln!(
            reference,
            "{l},{:e},{:e},{:e},{:e},{:e}",
            b.mean_concurrence, b.positive_fraction, cf.mean_c_promoted, cf.mean_c_random_2p, cf.prob_positive_promoted
        );
    }

    let curve_of = |q: Quantity| -> Vec<CurvePoint> {
        rows.iter()
            .filter(|r| r.quantity == q)
            .map(|r| CurvePoint {
                l: r.qubits as f64,
                value: r.mean,
                stderr: r.stderr,
            })
            .collect()
    };
    let mut fits = Vec::new();
    for (q, family) in [
        (Quantity::MeanC, Family::PowerLaw),
        (Quantity::ProbPositiveC, Family::PowerOffset),
        (Quantity::ProbPositiveC, Family::ExpSaturation),
    ] {
        let entry = match scaling_pipeline(&curve_of(q), family, &opts) {
            Ok(f) => json!({
                "quantity": q,
                "family": family,
                "l_min": opts.l_min,
                "weighted": f.weighted,
                "unweighted": f.unweighted,
            }),
            Err(e) => json!({
                "quantity": q,
                "family": family,
                "l_min": opts.l_min,
                "error": e.to_string(),
            }),
        };
        fits.push(entry);
    }
    let doc = json!({
        "header": cfg.json_header("scaling"),
        "target": cfg.target,
        "fits": fits,
    });

    Ok(vec![
        OutputFile {
            name: format!("{stem}.csv"),
            contents: csv,
        },
        OutputFile {
            name: format!("{stem}_reference.csv"),
            contents: reference,
        },
        OutputFile {
            name: format!("{stem}_fits.json"),
            contents: serde_json::to_string_pretty(&doc).expect("fits serialize") + "\n",
        },
    ])
}

/// Reads the curve rows back out of a scaling CSV (header lines skipped).
pub fn parse_curve(csv: &str) -> Vec<(usize, String, f64, f64)> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("L,"))
        .filter_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Some((f.first()?.parse().ok()?, f.get(1)?.to_string(), f.get(2)?.parse().ok()?, f.get(3)?.parse().ok()?))
        })
        .collect()
}

/// Count of labels in a set of rows.
pub fn count_label(rows: &[StateReport], label: Label) -> usize {
    rows.iter().filter(|r| r.promoted == Some(label.code())).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            sizes: vec![6],
            samples: 3,
            seed: 9,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn spectrum_rows_and_header() {
        let files = spectrum_report(&small()).unwrap();
        assert_eq!(files.len(), 3);
        let f = &files[0];
        assert_eq!(f.name, "spectrum_ir_L6_m2_s0.csv");
        let lines: Vec<&str> = f.contents.lines().collect();
        assert!(lines[0].starts_with("# spinglass "));
        assert!(lines[3].starts_with("# config: {"));
        assert_eq!(lines[4], StateReport::CSV_HEADER);
        assert_eq!(lines.len() - 5, 15);
        let promoted = lines[5..].iter().filter(|l| l.split(',').nth(5) == Some("1")).count();
        assert_eq!(promoted, 6);
    }

    #[test]
    fn config_round_trips_with_infinite_sigma() {
        let cfg = small();
        let s = serde_json::to_string(&cfg).unwrap();
        assert!(s.contains("\"inf\""));
        let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn dump_includes_matrices() {
        let cfg = ExperimentConfig {
            dump_hamiltonian: true,
            samples: 1,
            ..small()
        };
        let files = spectrum_report(&cfg).unwrap();
        let names: Vec<&str> = files.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(
            names,
            ["spectrum_ir_L6_m2_s0.csv", "couplings_ir_L6_m2_s0.csv", "hamiltonian_ir_L6_m2_s0.csv"]
        );
    }

    #[test]
    fn phase_diagram_row_counts() {
        let cfg = ExperimentConfig {
            sigmas: vec![0.0, f64::INFINITY],
            ..small()
        };
        let files = phase_diagram(&cfg).unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(files[1].name, "phase_sigmainf_L6_m2.csv");
        for f in &files[..2] {
            let data = f.contents.lines().filter(|l| !l.starts_with('#')).count() - 1;
            assert_eq!(data, 3 * 15);
        }
        assert!(files[2].contents.lines().last().unwrap().starts_with("inf,6,2,3,18,27,0,"));
    }

    #[test]
    fn scaling_outputs() {
        let cfg = ExperimentConfig {
            sizes: vec![8, 9, 10, 11],
            samples: 2,
            ..small()
        };
        let files = scaling(&cfg).unwrap();
        assert_eq!(files[0].name, "scaling_eigenstates_ir.csv");
        let rows = parse_curve(&files[0].contents);
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[0].1, "prob_positive_c");
        let fits: serde_json::Value = serde_json::from_str(&files[2].contents).unwrap();
        assert_eq!(fits["fits"].as_array().unwrap().len(), 3);
        assert_eq!(fits["header"]["seed"], 9);
        let bound = localized_promotion_bound(10).unwrap();
        let line = files[1].contents.lines().find(|l| l.starts_with("10,")).unwrap();
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, bound.mean_concurrence);
    }

    #[test]
    fn config_errors() {
        let bad = ExperimentConfig {
            sizes: vec![],
            ..small()
        };
        assert!(spectrum_report(&bad).unwrap_err().is_config());
        let bad = ExperimentConfig {
            particles: 9,
            ..small()
        };
        assert!(spectrum_report(&bad).unwrap_err().is_config());
        let bad = ExperimentConfig {
            sizes: vec![8, 9, 10],
            ..small()
        };
        assert!(scaling(&bad).unwrap_err().is_config());
        let bad = ExperimentConfig {
            sigmas: vec![-1.0],
            ..small()
        };
        assert!(phase_diagram(&bad).unwrap_err().is_config());
    }
}
