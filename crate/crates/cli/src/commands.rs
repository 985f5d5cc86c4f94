use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde::Serialize;

use spinorbit_core::circuitfile::parse_document;
use spinorbit_core::correlations::{correlation_report, CorrelationReport, OptimizerConfig};
use spinorbit_core::figures::{
    scatter, sweep, sweep_header, Family, Rank3Region, SweepSpec, SweepVariable, SCATTER_HEADER,
};
use spinorbit_core::optics::{ensemble_density, mdms_circuit, run_circuit, Polarization, SourceProbabilities};
use spinorbit_core::profile::{intensity_map, polarization_resolved_map, GridConfig};
use spinorbit_core::qmath::{fidelity, ComplexMatrix, DensityMatrix4};
use spinorbit_core::tomography::{monte_carlo_correlations, perturb_and_measure, CorrelationStats, NoiseConfig};
use spinorbit_core::StateParams;

use crate::manifest::{manifest_path_for, OutputRecord, RunManifest};
use crate::{
    Cli, CliError, Command, CorrelationsArgs, FamilyArg, MapFormat, NoiseArgs, OptimizerArgs, OutputArgs, PolArg,
    ProfileArgs, RegionArg, ReplayArgs, ScatterArgs, StateArgs, SweepArgs, TomographyArgs, VarArg,
};

/// Bytes destined for a file, or standard output when `path` is `None`.
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub bytes: Vec<u8>,
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Rank2 => Family::Rank2,
        FamilyArg::Rank3 => Family::Rank3,
        FamilyArg::Mdms => Family::Mdms,
    }
}

fn optimizer(a: &OptimizerArgs) -> CliResult<OptimizerConfig> {
    if a.grid_theta < 2 || a.grid_phi < 1 {
        return Err(usage("optimizer grid needs --grid-theta ≥ 2 and --grid-phi ≥ 1"));
    }
    Ok(OptimizerConfig {
        grid_theta: a.grid_theta,
        grid_phi: a.grid_phi,
        refine: !a.no_refine,
        ..OptimizerConfig::default()
    })
}

fn noise(a: &NoiseArgs) -> CliResult<NoiseConfig> {
    let n = NoiseConfig {
        hwp_jitter: a.hwp_jitter,
        bs_r: a.bs_r,
        bs_t: a.bs_t,
        runs: a.runs,
        seed: a.seed,
    };
    n.validate()?;
    if n.runs < 2 {
        return Err(usage("--runs must be at least 2"));
    }
    Ok(n)
}

fn resolve_state(s: &StateArgs) -> CliResult<DensityMatrix4> {
    let eps = || {
        s.eps
            .ok_or_else(|| usage("--eps is required for --family and --builder"))
    };
    if let Some(f) = s.family {
        return Ok(family(f).state(&StateParams::new(s.p, s.m, eps()?)?)?);
    }
    if s.builder {
        let c = mdms_circuit(
            s.theta.to_radians(),
            s.phi.to_radians(),
            s.m,
            eps()?,
            SourceProbabilities::default(),
        )?;
        return Ok(ensemble_density(&run_circuit(&c)?)?);
    }
    if let Some(path) = &s.circuit {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let doc = parse_document(&text, Some(&path.display().to_string()))
            .map_err(|e| usage(format!("{}:{e}", path.display())))?;
        return Ok(ensemble_density(&run_circuit(&doc.to_circuit())?)?);
    }
    Err(usage("give one of --family, --builder or --circuit"))
}

fn matrix_json(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn correlations(a: &CorrelationsArgs) -> CliResult<Vec<Artifact>> {
    let rho = resolve_state(&a.state)?;
    let report = correlation_report(&rho, &optimizer(&a.optimizer)?);
    Ok(vec![Artifact {
        path: a.output.out.clone(),
        bytes: json_bytes(&report),
    }])
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

fn sweep_script(csv: &Path, var: &str) -> String {
    let f = file_name(csv);
    format!(
        "set datafile separator ','\n\
         set key top left\n\
         set xlabel '{var}'\n\
         set ylabel 'correlation (bits)'\n\
         plot '{f}' every ::1 using 1:2:3 with yerrorlines title 'C', \\\n\
         \x20    '{f}' every ::1 using 1:4:5 with yerrorlines title \"C'\", \\\n\
         \x20    '{f}' every ::1 using 1:6:7 with yerrorlines title 'Q'\n\
         pause -1\n"
    )
}

fn sweep_cmd(a: &SweepArgs) -> CliResult<Vec<Artifact>> {
    let variable = match a.variable {
        VarArg::Eps => SweepVariable::Eps,
        VarArg::P => SweepVariable::P,
        VarArg::M => SweepVariable::M,
    };
    let spec = SweepSpec {
        family: family(a.family),
        fixed: StateParams {
            p: a.p,
            m: a.m,
            epsilon: a.eps,
        },
        variable,
        start: a.from,
        stop: a.to,
        step: a.step,
        noise: if a.noise { Some(noise(&a.noise_config)?) } else { None },
    };
    let rows = sweep(&spec, &optimizer(&a.optimizer)?)?;
    let mut csv = sweep_header(variable);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv());
        csv.push('\n');
    }
    let mut out = vec![Artifact {
        path: a.output.out.clone(),
        bytes: csv.into_bytes(),
    }];
    if let Some(p) = &a.output.out {
        out.push(Artifact {
            path: Some(p.with_extension("gp")),
            bytes: sweep_script(p, variable.column()).into_bytes(),
        });
    }
    Ok(out)
}

fn scatter_script(csv: &Path) -> String {
    let f = file_name(csv);
    format!(
        "set datafile separator ','\n\
         set xlabel 'C'\n\
         set ylabel 'Q'\n\
         plot '{f}' every ::1 using (strcol(1) eq 'rank2' ? $4 : NaN):5 with points pt 7 ps 0.3 lc rgb 'gray' title 'rank-2', \\\n\
         \x20    '{f}' every ::1 using (strcol(1) eq 'rank3' ? $4 : NaN):5 with points pt 6 ps 0.6 lc rgb 'black' title 'rank-3'\n\
         pause -1\n"
    )
}

fn scatter_cmd(a: &ScatterArgs) -> CliResult<Vec<Artifact>> {
    let region = match a.rank3_region {
        RegionArg::Mdms => Rank3Region::Mdms,
        RegionArg::Full => Rank3Region::Full,
    };
    let pts = scatter(a.step, region, &optimizer(&a.optimizer)?)?;
    let mut csv = String::from(SCATTER_HEADER);
    csv.push('\n');
    for p in &pts {
        csv.push_str(&p.csv());
        csv.push('\n');
    }
    let mut out = vec![Artifact {
        path: a.output.out.clone(),
        bytes: csv.into_bytes(),
    }];
    if let Some(p) = &a.output.out {
        out.push(Artifact {
            path: Some(p.with_extension("gp")),
            bytes: scatter_script(p).into_bytes(),
        });
    }
    Ok(out)
}

fn profile_cmd(a: &ProfileArgs) -> CliResult<Vec<Artifact>> {
    let rho = resolve_state(&a.state)?;
    let grid = GridConfig::new(a.half_width, a.samples, a.waist)?;
    let map = match a.pol {
        None => intensity_map(&rho, &grid)?,
        Some(PolArg::H) => polarization_resolved_map(&rho, &grid, Polarization::H)?,
        Some(PolArg::V) => polarization_resolved_map(&rho, &grid, Polarization::V)?,
    };
    let mut bytes = Vec::new();
    match a.format {
        MapFormat::Pgm => map.write_pgm(&mut bytes)?,
        MapFormat::Csv => map.write_csv(&mut bytes)?,
    }
    Ok(vec![Artifact {
        path: a.output.out.clone(),
        bytes,
    }])
}

#[derive(Serialize)]
struct TomographyReport {
    noise: NoiseConfig,
    /// Reconstruction of run 0.
    reconstructed: Vec<Vec<[f64; 2]>>,
    /// Uhlmann fidelity of run 0 with the true state.
    fidelity: f64,
    fidelity_mean: f64,
    fidelity_min: f64,
    truth: CorrelationReport,
    stats: CorrelationStats,
}

fn tomography_cmd(a: &TomographyArgs) -> CliResult<Vec<Artifact>> {
    let rho = resolve_state(&a.state)?;
    let n = noise(&a.noise)?;
    let search = optimizer(&a.optimizer)?;
    let fids: Vec<f64> = (0..n.runs as u64)
        .map(|i| perturb_and_measure(&rho, &n, i).map(|r| fidelity(&r, &rho)))
        .collect::<Result<_, _>>()?;
    let first = perturb_and_measure(&rho, &n, 0)?;
    let report = TomographyReport {
        noise: n,
        reconstructed: matrix_json(first.matrix()),
        fidelity: fids[0],
        fidelity_mean: fids.iter().sum::<f64>() / fids.len() as f64,
        fidelity_min: fids.iter().copied().fold(f64::INFINITY, f64::min),
        truth: correlation_report(&rho, &search),
        stats: monte_carlo_correlations(&rho, &n, &search)?,
    };
    Ok(vec![Artifact {
        path: a.output.out.clone(),
        bytes: json_bytes(&report),
    }])
}

/// Computes every artifact of a (non-replay) command without writing anything.
pub fn run(command: &Command) -> CliResult<Vec<Artifact>> {
    match command {
        Command::Correlations(a) => correlations(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Scatter(a) => scatter_cmd(a),
        Command::Profile(a) => profile_cmd(a),
        Command::Tomography(a) => tomography_cmd(a),
        Command::Replay(_) => Err(usage("replay cannot be nested")),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Correlations(_) => "correlations",
        Command::Sweep(_) => "sweep",
        Command::Scatter(_) => "scatter",
        Command::Profile(_) => "profile",
        Command::Tomography(_) => "tomography",
        Command::Replay(_) => "replay",
    }
}

fn output_args(c: &Command) -> Option<&OutputArgs> {
    match c {
        Command::Correlations(a) => Some(&a.output),
        Command::Sweep(a) => Some(&a.output),
        Command::Scatter(a) => Some(&a.output),
        Command::Profile(a) => Some(&a.output),
        Command::Tomography(a) => Some(&a.output),
        Command::Replay(_) => None,
    }
}

fn seed_of(c: &Command) -> Option<u64> {
    match c {
        Command::Sweep(a) if a.noise => Some(a.noise_config.seed),
        Command::Tomography(a) => Some(a.noise.seed),
        _ => None,
    }
}

fn pin_seed(c: &mut Command, seed: u64) {
    match c {
        Command::Sweep(a) => a.noise_config.seed = seed,
        Command::Tomography(a) => a.noise.seed = seed,
        _ => {}
    }
}

fn write_artifacts(artifacts: &[Artifact]) -> CliResult<()> {
    use std::io::Write;
    for a in artifacts {
        match &a.path {
            Some(p) => fs::write(p, &a.bytes)?,
            None => std::io::stdout().lock().write_all(&a.bytes)?,
        }
    }
    Ok(())
}

pub fn execute(cli: &Cli, argv: &[String]) -> CliResult<()> {
    if let Command::Replay(r) = &cli.command {
        return replay(r);
    }
    let start = Instant::now();
    let artifacts = run(&cli.command)?;
    write_artifacts(&artifacts)?;

    let out = output_args(&cli.command).expect("non-replay command");
    let manifest_path = out
        .manifest
        .clone()
        .or_else(|| out.out.as_deref().map(manifest_path_for));
    if let Some(path) = manifest_path {
        let manifest = RunManifest {
            command: command_name(&cli.command).to_string(),
            argv: argv.to_vec(),
            parameters: serde_json::to_value(&cli.command).expect("serializable arguments"),
            seed: seed_of(&cli.command),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: artifacts
                .iter()
                .map(|a| OutputRecord::new(a.path.as_deref(), &a.bytes))
                .collect(),
            duration_seconds: start.elapsed().as_secs_f64(),
        };
        fs::write(path, json_bytes(&manifest))?;
    }
    Ok(())
}

fn replay(r: &ReplayArgs) -> CliResult<()> {
    let text =
        fs::read_to_string(&r.manifest).map_err(|e| usage(format!("cannot read {}: {e}", r.manifest.display())))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| usage(format!("malformed manifest: {e}")))?;
    let argv = std::iter::once("spinorbit".to_string()).chain(manifest.argv.iter().cloned());
    let mut cli = Cli::try_parse_from(argv).map_err(|e| usage(format!("manifest arguments: {e}")))?;
    if let Some(seed) = manifest.seed {
        // the seed may have come from the environment
        pin_seed(&mut cli.command, seed);
    }
    let artifacts = run(&cli.command)?;
    let records: Vec<OutputRecord> = artifacts
        .iter()
        .map(|a| OutputRecord::new(a.path.as_deref(), &a.bytes))
        .collect();
    let differing: Vec<&str> = records
        .iter()
        .zip(&manifest.outputs)
        .filter(|(a, b)| a.sha256 != b.sha256)
        .map(|(a, _)| a.path.as_str())
        .collect();
    if r.write {
        write_artifacts(&artifacts)?;
    }
    if records.len() != manifest.outputs.len() || !differing.is_empty() {
        return Err(CliError::Mismatch(format!(
            "replay differs from manifest: {} outputs recorded, {} produced, differing: {differing:?}",
            manifest.outputs.len(),
            records.len()
        )));
    }
    eprintln!("replay: {} output(s) identical to manifest", records.len());
    Ok(())
}
