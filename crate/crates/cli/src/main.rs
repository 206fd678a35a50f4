use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qfree::convergence::l2_sq_error_curve;
use qfree::ed::{energy_series, LanczosConfig, SpinModelSpec};
use qfree::forward::{synth_energy_series, synth_energy_series_both};
use qfree::io::{
    fmt_f64, load_energy_csv, parse_band_spec, parse_number, parse_sizes, write_energy_csv,
    write_samples_csv, BandFile,
};
use qfree::reconstruct::admissible_set;
use qfree::{
    b_coefficients, classify, criterion_check, mertens, moebius, reconstruct_band, Error,
    Hypothesis, ReconstructionParams, Result, SizeSet, Statistics, Twist, GRID_POINTS,
};

#[derive(Parser)]
#[command(
    name = "qfree",
    version,
    about = "Quasi-free dispersions from finite-size energies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Heisenberg,
    Dimerized,
    SingleIon,
}

#[derive(Clone, Copy, ValueEnum)]
enum TwistArg {
    Pbc,
    Abc,
    Both,
}

impl TwistArg {
    fn twists(self) -> Vec<Twist> {
        match self {
            TwistArg::Pbc => vec![Twist::Pbc],
            TwistArg::Abc => vec![Twist::Abc],
            TwistArg::Both => Twist::BOTH.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeSetArg {
    Auto,
    All,
    Even,
    From2,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Moebius,
    Mertens,
    BPbc,
    BAbc,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state energies of a spin chain by exact diagonalization.
    Ed {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long = "J", default_value = "1")]
        j: String,
        #[arg(long, default_value = "0")]
        delta: String,
        #[arg(long = "D", default_value = "0")]
        d: String,
        /// `start:end[:step]` or a comma list.
        #[arg(long)]
        sizes: String,
        #[arg(long, value_enum, default_value = "pbc")]
        twist: TwistArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct the band from an energy series.
    Reconstruct {
        #[arg(long)]
        energies: PathBuf,
        /// Bulk energy per site; falls back to the file's `e_inf` comment.
        #[arg(long = "e-inf", allow_hyphen_values = true)]
        e_inf: Option<String>,
        /// Falls back to the file's `nu` comment.
        #[arg(long)]
        nu: Option<String>,
        /// `auto` or one of boson-pbc, boson-abc, fermion-pbc, fermion-abc.
        #[arg(long, default_value = "auto")]
        hypothesis: String,
        #[arg(long = "size-set", value_enum, default_value = "auto")]
        size_set: SizeSetArg,
        /// Boundary twist of the rows used as data.
        #[arg(long = "data-twist", default_value = "pbc")]
        data_twist: Twist,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write `k,omega` samples (single hypothesis only).
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Energy series of a quasi-free model with the given band.
    Forward {
        /// e.g. `massive-sine:J=1,m=0.1`, `abs-sine:A=pi/2`, `band-file:PATH`.
        #[arg(long)]
        band: String,
        #[arg(long)]
        statistics: Statistics,
        #[arg(long, default_value = "1")]
        nu: String,
        #[arg(long, value_enum, default_value = "pbc")]
        twist: TwistArg,
        #[arg(long)]
        sizes: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check `E_2L(pbc) = E_L(pbc) + E_L(abc)`.
    Criterion {
        #[arg(long)]
        energies: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// `‖f_L − f‖²` against the number of exact residuals used.
    Convergence {
        /// Mass of the band `J√(sin²(k/2) + m²)` with `J = 1`.
        #[arg(long, default_value = "0")]
        mass: String,
        /// Any band spec; overrides `--mass`.
        #[arg(long)]
        band: Option<String>,
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value = "pbc")]
        twist: Twist,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate arithmetic functions.
    Kernel {
        #[arg(long, value_enum)]
        kind: KernelArg,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[allow(clippy::too_many_arguments)]
fn run_ed(
    model: ModelArg,
    j: &str,
    delta: &str,
    d: &str,
    sizes: &str,
    twist: TwistArg,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let j = parse_number(j)?;
    let spec = match model {
        ModelArg::Heisenberg => SpinModelSpec::heisenberg(j),
        ModelArg::Dimerized => SpinModelSpec::dimerized(j, parse_number(delta)?),
        ModelArg::SingleIon => SpinModelSpec::single_ion(j, parse_number(d)?),
    };
    spec.validate()?;
    let sizes = parse_sizes(sizes)?;
    let config = LanczosConfig::default().with_seed(seed);
    let series = energy_series(&spec, &sizes, &twist.twists(), &config)?;
    let mut w = open_out(out)?;
    write_energy_csv(&series, &mut w)?;
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_reconstruct(
    energies: &Path,
    e_inf: Option<&str>,
    nu: Option<&str>,
    hypothesis: &str,
    size_set: SizeSetArg,
    data_twist: Twist,
    out: Option<&Path>,
    samples: Option<&Path>,
) -> Result<()> {
    let series = load_energy_csv(energies)?;
    let e_inf = match e_inf {
        Some(s) => parse_number(s)?,
        None => series
            .metadata
            .e_inf
            .ok_or_else(|| Error::InvalidInput("--e-inf is required".into()))?,
    };
    let nu = match nu {
        Some(s) => parse_number(s)?,
        None => series.metadata.nu.unwrap_or(1.0),
    };
    let available = series.sizes(data_twist);
    let inferred = SizeSet::infer(&available)?;
    let size_set = match size_set {
        SizeSetArg::Auto => inferred,
        SizeSetArg::All => SizeSet::AllFrom1(inferred.max_size()),
        SizeSetArg::Even => SizeSet::EvenOnly(inferred.max_size() / 2),
        SizeSetArg::From2 => SizeSet::From2(inferred.max_size()),
    };
    let params = ReconstructionParams::new(e_inf, nu, size_set).with_data_twist(data_twist);

    let mut w = open_out(out)?;
    if hypothesis == "auto" {
        if samples.is_some() {
            return Err(Error::InvalidInput(
                "--samples needs a single --hypothesis".into(),
            ));
        }
        let results = classify(&series, &params)?;
        let files: Vec<BandFile> = results
            .iter()
            .map(|r| BandFile::from_result(r, nu))
            .collect();
        serde_json::to_writer_pretty(&mut w, &files)?;
        writeln!(w)?;
        let adm: Vec<String> = admissible_set(&results).iter().map(|h| h.label()).collect();
        eprintln!(
            "admissible: {}",
            if adm.is_empty() {
                "none".into()
            } else {
                adm.join(", ")
            }
        );
    } else {
        let h: Hypothesis = hypothesis.parse()?;
        let result = reconstruct_band(&series, &params, h)?;
        serde_json::to_writer_pretty(&mut w, &BandFile::from_result(&result, nu))?;
        writeln!(w)?;
        if let Some(p) = samples {
            let mut sw = BufWriter::new(File::create(p)?);
            write_samples_csv(&result.band, GRID_POINTS, &mut sw)?;
            sw.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run_forward(
    band: &str,
    statistics: Statistics,
    nu: &str,
    twist: TwistArg,
    sizes: &str,
    out: Option<&Path>,
) -> Result<()> {
    let spec = parse_band_spec(band)?;
    let nu = parse_number(nu)?;
    let sizes = parse_sizes(sizes)?;
    let series = match twist {
        TwistArg::Pbc => synth_energy_series(spec.as_band(), statistics, nu, Twist::Pbc, &sizes)?,
        TwistArg::Abc => synth_energy_series(spec.as_band(), statistics, nu, Twist::Abc, &sizes)?,
        TwistArg::Both => synth_energy_series_both(spec.as_band(), statistics, nu, &sizes, &sizes)?,
    };
    let mut w = open_out(out)?;
    write_energy_csv(&series, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run_criterion(energies: &Path, json: bool) -> Result<()> {
    let series = load_energy_csv(energies)?;
    let report = criterion_check(&series)?;
    let mut w = open_out(None)?;
    if json {
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
    } else {
        writeln!(w, "L,defect")?;
        for (l, d) in &report.per_l_defect {
            writeln!(w, "{l},{}", fmt_f64(*d))?;
        }
        writeln!(
            w,
            "# max_relative_defect={}",
            fmt_f64(report.max_relative_defect)
        )?;
    }
    w.flush()?;
    Ok(())
}

fn run_convergence(
    mass: &str,
    band: Option<&str>,
    sizes: &str,
    twist: Twist,
    out: Option<&Path>,
) -> Result<()> {
    let spec = match band {
        Some(b) => parse_band_spec(b)?,
        None => parse_band_spec(&format!("massive-sine:J=1,m={mass}"))?,
    };
    let cutoffs = parse_sizes(sizes)?;
    let curve = l2_sq_error_curve(spec.as_band(), twist, &cutoffs)?;
    let mut w = open_out(out)?;
    writeln!(w, "L,l2_sq_error")?;
    for (l, e) in curve {
        writeln!(w, "{l},{}", fmt_f64(e))?;
    }
    w.flush()?;
    Ok(())
}

fn run_kernel(kind: KernelArg, n: u64, out: Option<&Path>) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let mut w = open_out(out)?;
    writeln!(w, "n,value")?;
    match kind {
        KernelArg::Moebius => {
            for i in 1..=n {
                writeln!(w, "{i},{}", moebius(i)?)?;
            }
        }
        KernelArg::Mertens => {
            let mut m = 0i64;
            for i in 1..=n {
                m += i64::from(moebius(i)?);
                writeln!(w, "{i},{m}")?;
            }
            debug_assert_eq!(m, mertens(n)?);
        }
        KernelArg::BPbc | KernelArg::BAbc => {
            let twist = if matches!(kind, KernelArg::BPbc) {
                Twist::Pbc
            } else {
                Twist::Abc
            };
            let b = b_coefficients(twist, n as usize)?;
            for (i, v) in b.as_slice().iter().enumerate() {
                writeln!(w, "{},{v}", i + 1)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ed {
            model,
            j,
            delta,
            d,
            sizes,
            twist,
            seed,
            out,
        } => run_ed(model, &j, &delta, &d, &sizes, twist, seed, out.as_deref()),
        Command::Reconstruct {
            energies,
            e_inf,
            nu,
            hypothesis,
            size_set,
            data_twist,
            out,
            samples,
        } => run_reconstruct(
            &energies,
            e_inf.as_deref(),
            nu.as_deref(),
            &hypothesis,
            size_set,
            data_twist,
            out.as_deref(),
            samples.as_deref(),
        ),
        Command::Forward {
            band,
            statistics,
            nu,
            twist,
            sizes,
            out,
        } => run_forward(&band, statistics, &nu, twist, &sizes, out.as_deref()),
        Command::Criterion { energies, json } => run_criterion(&energies, json),
        Command::Convergence {
            mass,
            band,
            sizes,
            twist,
            out,
        } => run_convergence(&mass, band.as_deref(), &sizes, twist, out.as_deref()),
        Command::Kernel { kind, n, out } => run_kernel(kind, n, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
