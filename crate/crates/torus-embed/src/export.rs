//! Deterministic exports: sampled maps and spiral curves as CSV, and (for
//! n = 2 domains) quad meshes as Wavefront OBJ.
//!
//! CSV values carry 17 significant digits so files round-trip doubles
//! exactly. OBJ files get a comment header recording the config hash and the
//! exported coordinate triple.

use std::io::Write;

use crate::construct::AmbientMap;
use crate::error::{Error, Result};
use crate::sample::Sampler;
use crate::spiral::SpiralCurve;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV of sampled map values: header, then domain coordinates followed by
/// image coordinates, one sample per line.
pub fn write_map_csv<W: Write>(
    out: &mut W,
    map: &AmbientMap<f64>,
    seed: u64,
    window: f64,
    samples: u64,
) -> Result<()> {
    let n = map.dim();
    let d = map.ambient_dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.extend((1..=d).map(|i| format!("y{i}")));
    writeln!(out, "{}", header.join(","))?;
    let sampler = Sampler::symmetric(seed, n, window);
    for i in 0..samples {
        let x: Vec<f64> = sampler.point(i, samples);
        let y = map.eval(&x)?;
        let row: Vec<String> = x.iter().chain(y.iter()).map(|&v| fmt(v)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// CSV of spiral samples: columns s, x, y over [−window, window].
pub fn write_spiral_csv<W: Write>(
    out: &mut W,
    curve: &SpiralCurve<f64>,
    window: f64,
    samples: u64,
) -> Result<()> {
    writeln!(out, "s,x,y")?;
    let samples = samples.max(2);
    for i in 0..samples {
        let s = -window + 2.0 * window * i as f64 / (samples - 1) as f64;
        let p = curve.point(s);
        writeln!(out, "{},{},{}", fmt(s), fmt(p[0]), fmt(p[1]))?;
    }
    Ok(())
}

/// OBJ quad mesh of a map over [−window, window]² at `resolution`² vertices.
/// Image dimensions beyond three are handled by exporting the selected
/// coordinate triple, recorded in the header.
pub fn write_obj<W: Write>(
    out: &mut W,
    map: &AmbientMap<f64>,
    window: f64,
    resolution: usize,
    coords: [usize; 3],
    config_hash: &str,
) -> Result<()> {
    if map.dim() != 2 {
        return Err(Error::Config(format!(
            "OBJ export requires a 2-dimensional domain, map has n = {}",
            map.dim()
        )));
    }
    if resolution < 2 {
        return Err(Error::Config("mesh resolution must be at least 2".into()));
    }
    let d = map.ambient_dim();
    if coords.iter().any(|&c| c >= d) {
        return Err(Error::Config(format!(
            "export.coords {coords:?} out of range for ambient dimension {d}"
        )));
    }
    writeln!(out, "# torus-embed {} mesh", map.tag())?;
    writeln!(out, "# config-hash: {config_hash}")?;
    writeln!(out, "# coords: {} {} {}", coords[0], coords[1], coords[2])?;
    writeln!(out, "# grid: {resolution}x{resolution} over [-{window}, {window}]^2")?;
    for row in 0..resolution {
        for col in 0..resolution {
            let x = [
                -window + 2.0 * window * col as f64 / (resolution - 1) as f64,
                -window + 2.0 * window * row as f64 / (resolution - 1) as f64,
            ];
            let y = map.eval(&x)?;
            writeln!(out, "v {} {} {}", fmt(y[coords[0]]), fmt(y[coords[1]]), fmt(y[coords[2]]))?;
        }
    }
    let at = |r: usize, c: usize| r * resolution + c + 1;
    for row in 0..resolution - 1 {
        for col in 0..resolution - 1 {
            writeln!(
                out,
                "f {} {} {} {}",
                at(row, col),
                at(row, col + 1),
                at(row + 1, col + 1),
                at(row + 1, col)
            )?;
        }
    }
    Ok(())
}
