use std::io::{Read, Write};

use rand_distr::{Beta, Distribution, Geometric};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Smallest demand the generator emits; keeps draws inside (0, 1].
const MIN_DEMAND: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct VmRequest {
    pub cpu: f64,
    pub mem: f64,
    pub arrival: usize,
    /// Steps the VM stays; `None` keeps it until the episode ends.
    pub duration: Option<usize>,
}

/// Per-dimension Beta demand with the given mean and concentration
/// (`a = mean * k`, `b = (1 - mean) * k`), optional geometric durations.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandModel {
    pub cpu_mean: f64,
    pub mem_mean: f64,
    pub concentration: f64,
    pub mean_duration: Option<f64>,
}

impl Default for DemandModel {
    fn default() -> Self {
        Self { cpu_mean: 0.05, mem_mean: 0.05, concentration: 20.0, mean_duration: None }
    }
}

impl DemandModel {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("cpu_mean", self.cpu_mean), ("mem_mean", self.mem_mean)] {
            if !(m > 0.0 && m < 1.0) {
                return Err(Error::config(format!("{name} must lie in (0, 1), got {m}")));
            }
        }
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return Err(Error::config("concentration must be positive"));
        }
        if let Some(d) = self.mean_duration {
            if !(d >= 1.0 && d.is_finite()) {
                return Err(Error::config(format!("mean_duration must be at least 1, got {d}")));
            }
        }
        Ok(())
    }

    fn beta(&self, mean: f64) -> Beta<f64> {
        Beta::new(mean * self.concentration, (1.0 - mean) * self.concentration).expect("validated parameters")
    }
}

/// One request per step, drawn from `stream`.
pub fn generate_demand(stream: &mut RngStream, model: &DemandModel, steps: usize) -> Vec<VmRequest> {
    let cpu = model.beta(model.cpu_mean);
    let mem = model.beta(model.mem_mean);
    let life = model.mean_duration.map(|d| Geometric::new(1.0 / d).expect("validated mean"));
    (0..steps)
        .map(|t| VmRequest {
            cpu: cpu.sample(stream).clamp(MIN_DEMAND, 1.0),
            mem: mem.sample(stream).clamp(MIN_DEMAND, 1.0),
            arrival: t,
            duration: life.as_ref().map(|g| 1 + g.sample(stream) as usize),
        })
        .collect()
}

/// Reads a `step,cpu,mem,duration` trace; `inf` marks a permanent VM.
pub fn read_trace<R: Read>(input: R) -> Result<Vec<VmRequest>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["step", "cpu", "mem", "duration"] {
        return Err(Error::parse(1, format!("expected header step,cpu,mem,duration, got {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(csv_error)?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let step: usize = field(0).parse().map_err(|_| Error::parse(line, format!("bad step '{}'", field(0))))?;
        let cpu: f64 = field(1).parse().map_err(|_| Error::parse(line, format!("bad cpu '{}'", field(1))))?;
        let mem: f64 = field(2).parse().map_err(|_| Error::parse(line, format!("bad mem '{}'", field(2))))?;
        let duration = match field(3) {
            "inf" => None,
            d => Some(d.parse::<usize>().map_err(|_| Error::parse(line, format!("bad duration '{d}'")))?),
        };
        if !(cpu > 0.0 && cpu <= 1.0 && mem > 0.0 && mem <= 1.0) {
            return Err(Error::parse(line, format!("demands must lie in (0, 1], got ({cpu}, {mem})")));
        }
        if duration == Some(0) {
            return Err(Error::parse(line, "duration must be at least 1"));
        }
        out.push(VmRequest { cpu, mem, arrival: step, duration });
    }
    Ok(out)
}

pub fn write_trace<W: Write>(output: W, requests: &[VmRequest]) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    w.write_record(["step", "cpu", "mem", "duration"]).map_err(csv_error)?;
    for r in requests {
        let duration = r.duration.map_or_else(|| "inf".to_string(), |d| d.to_string());
        w.write_record([r.arrival.to_string(), r.cpu.to_string(), r.mem.to_string(), duration])
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::parse(line, e.to_string())
}
