use clap::Parser;
use halfplane_pml::experiments::{run_example, RunConfig, RunSummary, Sweep, SweepKind};
use std::path::PathBuf;
use std::process::ExitCode;

/// Time-domain PML scattering runs, parameter sweeps and Laplace-domain studies.
#[derive(Parser, Debug)]
#[command(name = "halfplane-pml", version)]
struct Args {
    /// Built-in parameter set: example1 or example2.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,

    /// Configuration file (`key = value`, `[section]` headers or dotted keys).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Swept parameter: sigma or thickness.
    #[arg(long)]
    sweep_param: Option<SweepKind>,

    /// Comma-separated sweep values, ascending.
    #[arg(long, value_delimiter = ',')]
    sweep_values: Option<Vec<f64>>,

    /// Compare Laplace-domain PML and DtN solutions instead of time stepping.
    #[arg(long)]
    frequency_domain: bool,
}

fn resolve(args: &Args) -> halfplane_pml::Result<RunConfig> {
    let mut cfg = match (&args.preset, &args.config) {
        (Some(p), _) => RunConfig::preset(p)?,
        (None, Some(path)) => RunConfig::parse(&std::fs::read_to_string(path)?)?,
        (None, None) => RunConfig::example1(),
    };
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if args.sweep_param.is_some() || args.sweep_values.is_some() {
        let prev = cfg.sweep.take();
        let kind = args.sweep_param.or(prev.as_ref().map(|s| s.kind)).unwrap_or(SweepKind::Sigma);
        let values = args.sweep_values.clone().or(prev.map(|s| s.values)).unwrap_or_default();
        cfg.sweep = Some(Sweep { kind, values });
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match resolve(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = cfg.output_dir.clone();
    match run_example(&cfg, &out, args.frequency_domain) {
        Ok(RunSummary::Single { functionals, max_abs_u }) => {
            println!("run `{}` finished; max |u| at T = {max_abs_u:.4e}", cfg.name);
            println!(
                "lhs_thm_gg = {:.4e}, rhs_thm_gg = {:.4e}, lhs_lem_sg = {:.4e}, rhs_lem_sg = {:.4e}",
                functionals.lhs_thm_gg, functionals.rhs_thm_gg, functionals.lhs_lem_sg, functionals.rhs_lem_sg
            );
        }
        Ok(RunSummary::Sweep(s)) => {
            for p in &s.points {
                println!("{} = {}: E_rel = {:.4e}", s.kind, p.param, p.e_rel);
            }
            match s.fit.fit {
                Some(f) => println!("fit vs {}: slope {:.4}, r2 {:.4}", s.fit.abscissa, f.slope, f.r2),
                None => println!("no fit"),
            }
            if let Some(n) = &s.fit.notice {
                println!("notice: {n}");
            }
        }
        Ok(RunSummary::Frequency(r)) => {
            for row in &r.rows {
                println!("sigma {} rho {}: relative L2 error {:.4e}", row.sigma, row.rho, row.error_l2);
            }
            if let Some(f) = r.fit {
                println!("fit vs predicted exponent: slope {:.4}, r2 {:.4}", f.slope, f.r2);
            }
            for n in &r.notes {
                println!("notice: {n}");
            }
        }
        Err(e) => {
            eprintln!("error: {e} (manifest written to {})", out.join("manifest.txt").display());
            return ExitCode::FAILURE;
        }
    }
    println!("artifacts in {}", out.display());
    ExitCode::SUCCESS
}
