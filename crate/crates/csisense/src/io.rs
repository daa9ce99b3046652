//! Binary dataset persistence.
//!
//! Layout (all little-endian):
//!
//! ```text
//! magic       "CSID"               4 bytes
//! version     u32 = 1
//! count       u32                  number of experiments
//! per experiment:
//!   label     u8   (1..=5)
//!   scenario  u8   (0 = LOS, 1 = NLOS)
//!   seed      u64
//!   F, M, N   u32 each
//!   timestamps  N x f64
//!   data        F*M*N x (f64 re, f64 im), f-major, then m, then n
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{CsiTensor, Dataset, Event, Experiment, Scenario};

pub const MAGIC: &[u8; 4] = b"CSID";
pub const VERSION: u32 = 1;

pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dataset(dataset, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let mut r = BufReader::new(File::open(path)?);
    read_dataset(&mut r)
}

pub fn write_dataset<W: Write>(dataset: &Dataset, w: &mut W) -> Result<()> {
    let count = u32::try_from(dataset.len())
        .map_err(|_| Error::format("experiment count", "more than u32::MAX experiments"))?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    for exp in &dataset.experiments {
        write_experiment(exp, w)?;
    }
    Ok(())
}

fn dim_u32(field: &'static str, v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::format(field, format!("{v} does not fit in u32")))
}

fn write_experiment<W: Write>(exp: &Experiment, w: &mut W) -> Result<()> {
    let (f, m, n) = exp.csi.dim();
    w.write_all(&[exp.label.code(), exp.scenario.code()])?;
    w.write_all(&exp.seed.to_le_bytes())?;
    w.write_all(&dim_u32("F", f)?.to_le_bytes())?;
    w.write_all(&dim_u32("M", m)?.to_le_bytes())?;
    w.write_all(&dim_u32("N", n)?.to_le_bytes())?;
    for t in exp.csi.timestamps() {
        w.write_all(&t.to_le_bytes())?;
    }
    // CsiTensor keeps standard layout, so logical iteration order is f, m, n.
    for z in exp.csi.data().iter() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_dataset<R: Read>(r: &mut R) -> Result<Dataset> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::format(
            "magic",
            format!("expected {:?}, found {:?}", MAGIC, magic),
        ));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::format(
            "version",
            format!("unsupported version {version} (expected {VERSION})"),
        ));
    }
    let count = read_u32(r)? as usize;
    let mut experiments = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        experiments.push(read_experiment(r)?);
    }
    Ok(Dataset::new(experiments))
}

fn read_dim<R: Read>(r: &mut R, field: &'static str) -> Result<usize> {
    match read_u32(r)? {
        0 => Err(Error::format(field, "dimension must be positive")),
        v => Ok(v as usize),
    }
}

fn read_experiment<R: Read>(r: &mut R) -> Result<Experiment> {
    let label_code = read_u8(r)?;
    let label = Event::from_code(label_code)
        .ok_or_else(|| Error::format("label", format!("{label_code} not in 1..=5")))?;
    let scenario_code = read_u8(r)?;
    let scenario = Scenario::from_code(scenario_code)
        .ok_or_else(|| Error::format("scenario", format!("{scenario_code} not in 0..=1")))?;
    let seed = read_u64(r)?;
    let f = read_dim(r, "F")?;
    let m = read_dim(r, "M")?;
    let n = read_dim(r, "N")?;
    let total = f
        .checked_mul(m)
        .and_then(|v| v.checked_mul(n))
        .filter(|&v| v.checked_mul(16).is_some())
        .ok_or_else(|| Error::format("F", format!("F*M*N overflows ({f}x{m}x{n})")))?;

    let mut timestamps = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        timestamps.push(read_f64(r)?);
    }
    // Grow as data arrives so a corrupt header cannot trigger a huge allocation.
    let mut values = Vec::with_capacity(total.min(1 << 20));
    for _ in 0..total {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        values.push(Complex64::new(re, im));
    }
    let data = Array3::from_shape_vec((f, m, n), values)
        .map_err(|e| Error::format("data", e.to_string()))?;
    let csi = CsiTensor::new(data, timestamps).map_err(|e| match e {
        Error::Argument(msg) if msg.contains("timestamp") => Error::format("timestamps", msg),
        Error::Argument(msg) => Error::format("data", msg),
        other => other,
    })?;
    Ok(Experiment {
        csi,
        label,
        scenario,
        seed,
    })
}
