//! File formats: energy-series CSV, band JSON, sampled band CSV, and the
//! small text syntaxes used on the command line.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::band::{Band, ClosedFormBand, FourierBand, SampleTable};
use crate::error::{Error, Result};
use crate::number::Twist;
use crate::reconstruct::{Hypothesis, ReconstructionResult};
use crate::series::{EnergySeries, SeriesMetadata, Source};

/// Round-trip-exact float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `L,twist,E_total` with `#` metadata lines in front.
pub fn write_energy_csv<W: Write>(series: &EnergySeries, mut out: W) -> Result<()> {
    let meta = &series.metadata;
    if let Some(model) = &meta.model {
        writeln!(out, "# model={model}")?;
    }
    if let Some(nu) = meta.nu {
        writeln!(out, "# nu={}", fmt_f64(nu))?;
    }
    if let Some(e_inf) = meta.e_inf {
        writeln!(out, "# e_inf={}", fmt_f64(e_inf))?;
    }
    writeln!(out, "L,twist,E_total")?;
    for (l, twist, e) in series.iter() {
        writeln!(out, "{l},{twist},{}", fmt_f64(e.e_total))?;
    }
    Ok(())
}

pub fn read_energy_csv<R: BufRead>(input: R) -> Result<EnergySeries> {
    let mut meta = SeriesMetadata::new(Source::File);
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.trim().split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "nu" => meta.nu = Some(parse_number(value)?),
                    "e_inf" => meta.e_inf = Some(parse_number(value)?),
                    "model" => meta.model = Some(value.to_string()),
                    _ => {}
                }
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        body.push_str(trimmed);
        body.push('\n');
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["L", "twist", "E_total"] {
        return Err(Error::Parse(format!(
            "expected header 'L,twist,E_total', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut series = EnergySeries::new(meta);
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        if record.len() != 3 {
            return Err(Error::Parse(format!("row {line}: expected 3 fields")));
        }
        let l: usize = record[0]
            .parse()
            .map_err(|_| Error::Parse(format!("row {line}: bad size '{}'", &record[0])))?;
        let twist: Twist = record[1].parse()?;
        let e: f64 = record[2]
            .parse()
            .map_err(|_| Error::Parse(format!("row {line}: bad energy '{}'", &record[2])))?;
        series.insert(l, twist, e)?;
    }
    if series.is_empty() {
        return Err(Error::Parse("energy file has no rows".into()));
    }
    Ok(series)
}

pub fn load_energy_csv(path: &Path) -> Result<EnergySeries> {
    let file = std::fs::File::open(path)?;
    read_energy_csv(std::io::BufReader::new(file))
}

/// JSON form of a reconstructed (or user-supplied) band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandFile {
    pub c0: f64,
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub undetermined_a1: bool,
    pub hypothesis: Hypothesis,
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissible: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_band_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2_residual_forward: Option<f64>,
}

impl BandFile {
    pub fn from_result(result: &ReconstructionResult, nu: f64) -> Self {
        BandFile {
            c0: result.band.c0,
            coeffs: result.band.coeffs.clone(),
            undetermined_a1: result.band.undetermined_a1,
            hypothesis: result.hypothesis,
            nu,
            admissible: Some(result.admissible),
            min_band_value: Some(result.min_band_value),
            l2_residual_forward: Some(result.l2_residual_forward),
        }
    }

    pub fn band(&self) -> FourierBand {
        FourierBand {
            c0: self.c0,
            coeffs: self.coeffs.clone(),
            undetermined_a1: self.undetermined_a1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.band().validate()?;
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidInput("band file nu must be positive".into()));
        }
        Ok(())
    }
}

/// `k,omega` on a uniform grid of `n` points.
pub fn write_samples_csv<W: Write>(band: &dyn Band, n: usize, mut out: W) -> Result<()> {
    writeln!(out, "k,omega")?;
    for k in crate::band::grid(n) {
        writeln!(out, "{},{}", fmt_f64(k), fmt_f64(band.value(k)))?;
    }
    Ok(())
}

/// Read `k,omega` samples; the grid must be uniform on `[0, 2π)`.
pub fn read_samples_csv<R: BufRead>(input: R) -> Result<SampleTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut values = Vec::new();
    let mut ks = Vec::new();
    for record in reader.records() {
        let record = record?;
        let k: f64 = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad k column".into()))?;
        let w: f64 = record
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad omega column".into()))?;
        ks.push(k);
        values.push(w);
    }
    let n = ks.len() as f64;
    for (j, &k) in ks.iter().enumerate() {
        let expected = 2.0 * std::f64::consts::PI * j as f64 / n;
        if (k - expected).abs() > 1e-9 {
            return Err(Error::Parse(format!(
                "samples are not on a uniform grid at row {}",
                j + 2
            )));
        }
    }
    SampleTable::new(values)
}

/// Parse `start:end[:step]` (inclusive), a comma list, or a single size.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad size range '{spec}'"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        match fields.as_slice() {
            [single] => out.push(num(single)?),
            [a, b] => out.extend(num(a)?..=num(b)?),
            [a, b, step] => {
                let step = num(step)?;
                if step == 0 {
                    return Err(bad());
                }
                out.extend((num(a)?..=num(b)?).step_by(step));
            }
            _ => return Err(bad()),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Parse a number, also accepting `pi`, `pi/2`, `2*pi`, `-pi/4`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Parse(format!("bad number '{s}'"));
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let mut value = 1.0;
    let mut saw_pi = false;
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    for factor in num.split('*') {
        match factor.trim() {
            "pi" | "π" => {
                value *= std::f64::consts::PI;
                saw_pi = true;
            }
            f => value *= f.parse::<f64>().map_err(|_| bad())?,
        }
    }
    if !saw_pi {
        return Err(bad());
    }
    if let Some(d) = den {
        value /= d.trim().parse::<f64>().map_err(|_| bad())?;
    }
    Ok(sign * value)
}

/// A band named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum BandSpec {
    Closed(ClosedFormBand),
    Fourier(FourierBand),
}

impl BandSpec {
    pub fn as_band(&self) -> &(dyn Band + Sync) {
        match self {
            BandSpec::Closed(b) => b,
            BandSpec::Fourier(b) => b,
        }
    }
}

/// Parse `kind:key=value,...`:
///
/// - `massive-sine:J=1,m=0.1`
/// - `abs-sine:A=pi/2`
/// - `constant:c=3`
/// - `fourier:c0=1,a=0;1;0.5`
/// - `band-file:PATH` (band JSON)
/// - `samples:PATH` (`k,omega` CSV, at least 4096 rows)
pub fn parse_band_spec(spec: &str) -> Result<BandSpec> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let params = || -> Result<Vec<(String, String)>> {
        rest.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| Error::Parse(format!("band parameter '{p}' needs key=value")))
            })
            .collect()
    };
    let get = |ps: &[(String, String)], keys: &[&str], default: Option<f64>| -> Result<f64> {
        match ps.iter().find(|(k, _)| keys.contains(&k.as_str())) {
            Some((_, v)) => parse_number(v),
            None => default.ok_or_else(|| Error::Parse(format!("band '{kind}' needs {}", keys[0]))),
        }
    };
    match kind.trim() {
        "massive-sine" => {
            let ps = params()?;
            Ok(BandSpec::Closed(ClosedFormBand::MassiveSine {
                j: get(&ps, &["J", "j"], Some(1.0))?,
                m: get(&ps, &["m"], None)?,
            }))
        }
        "abs-sine" => {
            let ps = params()?;
            Ok(BandSpec::Closed(ClosedFormBand::AbsSine {
                amplitude: get(&ps, &["A", "amplitude"], Some(1.0))?,
            }))
        }
        "constant" => {
            let ps = params()?;
            Ok(BandSpec::Fourier(FourierBand::constant(get(
                &ps,
                &["c", "c0"],
                None,
            )?)))
        }
        "fourier" => {
            let ps = params()?;
            let c0 = get(&ps, &["c0"], Some(0.0))?;
            let coeffs = match ps.iter().find(|(k, _)| k == "a") {
                Some((_, v)) => v.split(';').map(parse_number).collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            let band = FourierBand::new(c0, coeffs);
            band.validate()?;
            Ok(BandSpec::Fourier(band))
        }
        "band-file" => {
            let text = std::fs::read_to_string(rest)?;
            let file: BandFile = serde_json::from_str(&text)?;
            file.validate()?;
            Ok(BandSpec::Fourier(file.band()))
        }
        "samples" => {
            let f = std::fs::File::open(rest)?;
            let table = read_samples_csv(std::io::BufReader::new(f))?;
            Ok(BandSpec::Closed(ClosedFormBand::Custom(table)))
        }
        other => Err(Error::Parse(format!("unknown band kind '{other}'"))),
    }
}
