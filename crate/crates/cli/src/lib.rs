//! Command-line surface: transforms, norms, paraproducts, commutators and
//! the experiment driver with reproducible records.
//!
//! Every experiment is fully determined by its configuration: the resolved
//! config is written next to the outputs, each CSV row carries the config
//! hash and seed, and re-running from the recorded config reproduces the
//! artifacts byte for byte.

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::Digest;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use torushaar::error::Error;
use torushaar::expansion::{haar_forward, haar_inverse};
use torushaar::io::{
    fmt_f64, read_coefficients_csv, read_signal, write_coefficients_csv, write_matrix_csv,
    write_signal, write_signal_csv,
};
use torushaar::norms::{
    bmo_norm, lmo_axis_norm, lmo_beta_norm, lmo_equiv_quantity, lmo_norm, product_bmo_norm,
    rect_bmo_norm,
};
use torushaar::opnorm::{
    commutator_bound_suite, core_lemma_suite, cotlar_decay_suite, equivalence_experiment,
    growth_suite, PureBasis,
};
use torushaar::para::{
    diagonal_paraproduct, mixed_paraproduct, paraproduct, partition_paraproduct, PartitionSpec,
    SignSpec,
};
use torushaar::rng::derive_rng;
use torushaar::shifts::{iterated_commutator, monte_carlo_shift_average};
use torushaar::Shape;

const SCHEMA_VERSION: &str = "1";

#[derive(Parser, Debug)]
#[command(name = "torushaar", version, about = "Multi-parameter dyadic Haar analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Forward/inverse Haar transform between signal and coefficient files.
    Transform(TransformArgs),
    /// Oscillation norms of a signal, reported as JSON with a witness.
    Norm(NormArgs),
    /// Apply a paraproduct to an input signal.
    Para(ParaArgs),
    /// Iterated shift commutator with multiplication by a symbol.
    Commutator(CommutatorArgs),
    /// Run a reproducible experiment and write CSV/JSON records.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = ["forward", "inverse"])]
    pub direction: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Emit the signal side as CSV instead of the native container.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Args, Debug)]
pub struct NormArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = ["bmo", "bmo-product", "rect", "lmo", "lmo-axis", "lmo-beta", "lmo-equiv"])]
    pub which: String,
    #[arg(long)]
    pub axis: Option<usize>,
    /// Suppressed-axis pattern for lmo-beta, e.g. `10`.
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ParaArgs {
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = ["main", "diag", "mixed", "partition"])]
    pub form: String,
    /// Output pattern bits for the mixed form, e.g. `10`.
    #[arg(long)]
    pub beta: Option<String>,
    /// Partition groups for the partition form, e.g. `0/1/2` for
    /// detail/indicator/averaged axes (comma-separated within groups).
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also dump the operator's dense matrix on pure coordinates.
    #[arg(long)]
    pub emit_matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CommutatorArgs {
    #[arg(long)]
    pub symbol: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated axis list, outermost first.
    #[arg(long)]
    pub axes: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// JSON config file; explicit flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub n_params: Option<usize>,
    /// Comma-separated depth list.
    #[arg(long)]
    pub depth: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub ensemble: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A fully resolved experiment description; identical configs produce
/// byte-identical outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: String,
    pub n_params: usize,
    pub depths: Vec<usize>,
    pub seed: u64,
    pub budget: usize,
    pub ensemble: usize,
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: "equivalence".into(),
            n_params: 2,
            depths: vec![2, 3],
            seed: 1,
            budget: 200,
            ensemble: 12,
            samples: 1000,
        }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NonConvergence { .. } => 3,
        _ => 2,
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>, Error> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidArgument(format!("bad bit '{c}' in pattern"))),
        })
        .collect()
}

fn parse_axis_list(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidArgument(format!("axis '{t}': {e}")))
        })
        .collect()
}

fn open_signal(path: &Path) -> Result<torushaar::GridSignal, Error> {
    let file = File::open(path)?;
    read_signal(&mut BufReader::new(file))
}

pub fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Transform(args) => run_transform(args),
        Command::Norm(args) => run_norm(args),
        Command::Para(args) => run_para(args),
        Command::Commutator(args) => run_commutator(args),
        Command::Experiment(args) => run_experiment(args),
    }
}

fn run_transform(args: TransformArgs) -> Result<(), Error> {
    match args.direction.as_str() {
        "forward" => {
            let sig = open_signal(&args.input)?;
            let exp = haar_forward(&sig);
            let defect = (exp.l2_norm_sq() - sig.l2_norm_sq()).abs();
            println!("parseval defect: {}", fmt_f64(defect));
            let mut out = BufWriter::new(File::create(&args.out)?);
            write_coefficients_csv(&mut out, &exp)?;
        }
        "inverse" => {
            let file = File::open(&args.input)?;
            let exp = read_coefficients_csv(&mut BufReader::new(file))?;
            let sig = haar_inverse(&exp);
            let defect = (exp.l2_norm_sq() - sig.l2_norm_sq()).abs();
            println!("parseval defect: {}", fmt_f64(defect));
            let mut out = BufWriter::new(File::create(&args.out)?);
            if args.csv {
                write_signal_csv(&mut out, &sig)?;
            } else {
                write_signal(&mut out, &sig)?;
            }
        }
        _ => unreachable!("clap validates"),
    }
    Ok(())
}

fn run_norm(args: NormArgs) -> Result<(), Error> {
    let sig = open_signal(&args.input)?;
    let exp = haar_forward(&sig);
    let report = match args.which.as_str() {
        "bmo" => bmo_norm(&sig),
        "bmo-product" => product_bmo_norm(&exp),
        "rect" => rect_bmo_norm(&exp),
        "lmo" => lmo_norm(&exp),
        "lmo-axis" => {
            let axis = args
                .axis
                .ok_or_else(|| Error::InvalidArgument("--axis required for lmo-axis".into()))?;
            lmo_axis_norm(&exp, axis)?
        }
        "lmo-beta" => {
            let delta = parse_bits(
                args.delta
                    .as_deref()
                    .ok_or_else(|| Error::InvalidArgument("--delta required".into()))?,
            )?;
            lmo_beta_norm(&exp, &delta)?
        }
        "lmo-equiv" => lmo_equiv_quantity(&exp),
        _ => unreachable!("clap validates"),
    };
    let json = report.to_json();
    match &args.out {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            writeln!(out, "{json}")?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn run_para(args: ParaArgs) -> Result<(), Error> {
    let symbol = haar_forward(&open_signal(&args.symbol)?);
    let input = haar_forward(&open_signal(&args.input)?);
    let n = symbol.shape().n_params();
    let (spec, out_exp) = match args.form.as_str() {
        "main" => (SignSpec::for_beta(&vec![false; n]), paraproduct(&symbol, &input)?),
        "diag" => (SignSpec::for_beta(&vec![true; n]), diagonal_paraproduct(&symbol, &input)?),
        "mixed" => {
            let beta = parse_bits(
                args.beta
                    .as_deref()
                    .ok_or_else(|| Error::InvalidArgument("--beta required for mixed".into()))?,
            )?;
            (SignSpec::for_beta(&beta), mixed_paraproduct(&symbol, &input, &beta)?)
        }
        "partition" => {
            let raw = args
                .partition
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("--partition required".into()))?;
            let groups: Vec<Vec<usize>> =
                raw.split('/').map(parse_axis_list).collect::<Result<_, _>>()?;
            if groups.len() != 3 {
                return Err(Error::InvalidPartition(
                    "expected detail/indicator/averaged groups".into(),
                ));
            }
            let pspec =
                PartitionSpec::new(groups[0].clone(), groups[1].clone(), groups[2].clone())?;
            let spec = pspec.sign_spec();
            (spec, partition_paraproduct(&symbol, &input, &pspec)?)
        }
        _ => unreachable!("clap validates"),
    };
    let mut out = BufWriter::new(File::create(&args.out)?);
    write_signal(&mut out, &haar_inverse(&out_exp))?;
    if let Some(path) = &args.emit_matrix {
        let basis = PureBasis::new(symbol.shape());
        let op = torushaar::opnorm::bilinear_operator(&basis, &spec, &symbol);
        let mut mat_out = BufWriter::new(File::create(path)?);
        write_matrix_csv(&mut mat_out, &op.to_dense())?;
    }
    println!("applied {} paraproduct on {} axes", args.form, n);
    Ok(())
}

fn run_commutator(args: CommutatorArgs) -> Result<(), Error> {
    let symbol = haar_forward(&open_signal(&args.symbol)?);
    let input = haar_forward(&open_signal(&args.input)?);
    let axes = parse_axis_list(&args.axes)?;
    let result = iterated_commutator(&symbol, &input, &axes)?;
    println!("truncated: {}", result.truncated);
    let mut out = BufWriter::new(File::create(&args.out)?);
    write_signal(&mut out, &haar_inverse(&result.output))?;
    Ok(())
}

fn resolve_config(args: &ExperimentArgs) -> Result<ExperimentConfig, Error> {
    let mut config = match &args.config {
        Some(path) => {
            let file = File::open(path)?;
            serde_json::from_reader(BufReader::new(file))
                .map_err(|e| Error::Parse(format!("config: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(kind) = &args.kind {
        config.kind = kind.clone();
    }
    if let Some(n) = args.n_params {
        config.n_params = n;
    }
    if let Some(depths) = &args.depth {
        config.depths = depths
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|e| Error::InvalidArgument(format!("depth '{t}': {e}")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(budget) = args.budget {
        config.budget = budget;
    }
    if let Some(ensemble) = args.ensemble {
        config.ensemble = ensemble;
    }
    if let Some(samples) = args.samples {
        config.samples = samples;
    }
    let known =
        ["equivalence", "core-lemmas", "cotlar", "growth", "commutator", "shift-average"];
    if !known.contains(&config.kind.as_str()) {
        return Err(Error::InvalidArgument(format!(
            "unknown experiment kind '{}' (expected one of {})",
            config.kind,
            known.join(", ")
        )));
    }
    if config.depths.is_empty() {
        return Err(Error::InvalidArgument("at least one depth".into()));
    }
    Ok(config)
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = sha2::Sha256::digest(canonical.as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    hex
}

struct CsvWriter {
    inner: BufWriter<File>,
}

impl CsvWriter {
    fn create(path: &Path, header: &str) -> Result<Self, Error> {
        let mut inner = BufWriter::new(File::create(path)?);
        writeln!(inner, "{header}")?;
        Ok(Self { inner })
    }

    fn row(&mut self, cols: &[String]) -> Result<(), Error> {
        writeln!(self.inner, "{}", cols.join(","))?;
        Ok(())
    }
}

/// Run the experiment named by the config and write its records.
pub fn run_experiment_config(config: &ExperimentConfig, out_dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out_dir)?;
    let hash = config_hash(config);
    // Record the resolved config for replay.
    let mut cfg_out = BufWriter::new(File::create(out_dir.join("resolved-config.json"))?);
    writeln!(
        cfg_out,
        "{}",
        serde_json::to_string_pretty(config).expect("config serializes")
    )?;

    let tag = |extra: &[String]| -> Vec<String> {
        let mut cols = vec![SCHEMA_VERSION.to_string(), hash.clone(), config.seed.to_string()];
        cols.extend_from_slice(extra);
        cols
    };

    let mut summary = serde_json::Map::new();
    summary.insert("schema_version".into(), SCHEMA_VERSION.into());
    summary.insert("config_hash".into(), hash.clone().into());
    summary.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );

    match config.kind.as_str() {
        "equivalence" => {
            let records = equivalence_experiment(
                config.n_params,
                &config.depths,
                config.ensemble,
                config.budget,
                config.seed,
            )?;
            let mut csv = CsvWriter::create(
                &out_dir.join("equivalence.csv"),
                "schema_version,config_hash,seed,depth,symbol,lmo_norm,lower_bound,log_bound,ratio,witness",
            )?;
            for r in &records {
                csv.row(&tag(&[
                    r.depth.to_string(),
                    r.symbol_id.clone(),
                    fmt_f64(r.lmo),
                    fmt_f64(r.lower_bound),
                    fmt_f64(r.log_bound),
                    fmt_f64(r.ratio),
                    r.witness_desc.clone(),
                ]))?;
            }
            let finite: Vec<&torushaar::opnorm::EquivalenceRecord> =
                records.iter().filter(|r| r.ratio.is_finite()).collect();
            for &depth in &config.depths {
                let per: Vec<f64> = finite
                    .iter()
                    .filter(|r| r.depth == depth)
                    .map(|r| r.ratio)
                    .collect();
                if per.is_empty() {
                    continue;
                }
                let lo = per.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = per.iter().cloned().fold(0.0f64, f64::max);
                summary.insert(format!("ratio_min_J{depth}"), lo.into());
                summary.insert(format!("ratio_max_J{depth}"), hi.into());
            }
        }
        "core-lemmas" => {
            let mut csv = CsvWriter::create(
                &out_dir.join("core_lemmas.csv"),
                "schema_version,config_hash,seed,depth,case,axis,level,sigma_rel_dev,core_ratio,tail_ratio,mixed_ratio",
            )?;
            for &depth in &config.depths {
                let report = core_lemma_suite(depth, config.ensemble, config.seed)?;
                for r in &report.rows {
                    csv.row(&tag(&[
                        r.depth.to_string(),
                        r.case.to_string(),
                        r.axis.to_string(),
                        r.level.to_string(),
                        fmt_f64(r.sigma_rel_dev),
                        fmt_f64(r.core_ratio),
                        fmt_f64(r.tail_ratio),
                        fmt_f64(r.mixed_ratio),
                    ]))?;
                }
                summary.insert(format!("sigma_max_rel_dev_J{depth}"), report.sigma_max_rel_dev.into());
                summary.insert(format!("core_fitted_J{depth}"), report.core_fitted.into());
                summary.insert(format!("tail_fitted_J{depth}"), report.tail_fitted.into());
                summary.insert(format!("mixed_fitted_J{depth}"), report.mixed_fitted.into());
            }
        }
        "cotlar" => {
            let report = cotlar_decay_suite(&config.depths, config.ensemble, config.seed)?;
            let mut csv = CsvWriter::create(
                &out_dir.join("cotlar.csv"),
                "schema_version,config_hash,seed,depth,case,block_a,block_b,cross_norm,envelope_ratio",
            )?;
            for r in &report.rows {
                csv.row(&tag(&[
                    r.depth.to_string(),
                    r.case.to_string(),
                    r.block_a.to_string(),
                    r.block_b.to_string(),
                    fmt_f64(r.cross_norm),
                    fmt_f64(r.envelope_ratio),
                ]))?;
            }
            summary.insert("max_range_cross".into(), report.max_range_cross.into());
            for (depth, fit) in &report.fitted {
                summary.insert(format!("envelope_fitted_J{depth}"), (*fit).into());
            }
        }
        "growth" => {
            let report = growth_suite(&config.depths, config.ensemble, config.seed)?;
            let mut csv = CsvWriter::create(
                &out_dir.join("growth.csv"),
                "schema_version,config_hash,seed,depth,family,mean_ratio,restricted_l2_ratio,partial_projection_ratio",
            )?;
            for r in &report.rows {
                csv.row(&tag(&[
                    r.depth.to_string(),
                    r.family.clone(),
                    fmt_f64(r.mean_ratio),
                    fmt_f64(r.restricted_l2_ratio),
                    fmt_f64(r.partial_projection_ratio),
                ]))?;
            }
            for (depth, f1, f2, f3) in &report.fitted {
                summary.insert(format!("mean_fitted_J{depth}"), (*f1).into());
                summary.insert(format!("restricted_fitted_J{depth}"), (*f2).into());
                summary.insert(format!("partial_fitted_J{depth}"), (*f3).into());
            }
        }
        "commutator" => {
            let report = commutator_bound_suite(&config.depths, config.ensemble, config.seed)?;
            let mut csv = CsvWriter::create(
                &out_dir.join("commutator.csv"),
                "schema_version,config_hash,seed,depth,case,output_density",
            )?;
            for r in &report.rows {
                csv.row(&tag(&[
                    r.depth.to_string(),
                    r.case.to_string(),
                    fmt_f64(r.output_density),
                ]))?;
            }
            for (depth, fit) in &report.fitted {
                summary.insert(format!("density_fitted_J{depth}"), (*fit).into());
            }
        }
        "shift-average" => {
            let depth = config.depths[0];
            let shape = Shape::new(vec![depth])?;
            let mut rng = derive_rng(config.seed, "shift-average-input", 0);
            let input = torushaar::rng::random_signal(&shape, &mut rng);
            let out = monte_carlo_shift_average(&input, config.samples, config.seed)?;
            let mut sig_out = BufWriter::new(File::create(out_dir.join("average.sig"))?);
            write_signal(&mut sig_out, &out.average)?;
            let mut csv = CsvWriter::create(
                &out_dir.join("shift_average.csv"),
                "schema_version,config_hash,seed,sample,alpha_bits,r_num",
            )?;
            for (i, spec) in out.specs.iter().enumerate() {
                let bits: String =
                    spec.alpha.iter().map(|&b| if b { '1' } else { '0' }).collect();
                csv.row(&tag(&[i.to_string(), bits, spec.r_num.to_string()]))?;
            }
            summary.insert("samples".into(), config.samples.into());
        }
        _ => unreachable!("validated in resolve_config"),
    }

    let mut sum_out = BufWriter::new(File::create(out_dir.join("summary.json"))?);
    writeln!(
        sum_out,
        "{}",
        serde_json::to_string_pretty(&serde_json::Value::Object(summary))
            .expect("summary serializes")
    )?;
    Ok(())
}

fn run_experiment(args: ExperimentArgs) -> Result<(), Error> {
    let config = resolve_config(&args)?;
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("experiment-out"));
    run_experiment_config(&config, &out_dir)?;
    println!("experiment '{}' written to {}", config.kind, out_dir.display());
    Ok(())
}
