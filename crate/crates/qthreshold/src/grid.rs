//! Space–time density grids and their on-disk formats.
//!
//! Two encodings are supported: CSV with axis headers, and a flat binary
//! layout ("QTRD"): magic `QTRD`, u32 version, u64 nz, u64 nt, the z axis
//! then the t axis as 64-bit floats, then the values row-major with z as
//! the fast axis (row j holds the slice at t_axis[j]). All fields are
//! little-endian.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Which engine produced a density grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityProvenance {
    Quantum,
    Wigner,
}

/// Rectangular grid of probability density over (z, t).
#[derive(Debug, Clone)]
pub struct SpaceTimeDensity {
    pub z_axis: Vec<f64>,
    pub t_axis: Vec<f64>,
    /// Row-major, z fast: `values[j * nz + i]` is the density at
    /// (z_axis[i], t_axis[j]).
    pub values: Vec<f64>,
    pub provenance: DensityProvenance,
}

impl SpaceTimeDensity {
    pub fn new(
        z_axis: Vec<f64>,
        t_axis: Vec<f64>,
        values: Vec<f64>,
        provenance: DensityProvenance,
    ) -> Result<Self> {
        if values.len() != z_axis.len() * t_axis.len() {
            return Err(Error::Domain(format!(
                "grid size mismatch: {} values for {} x {} axes",
                values.len(),
                z_axis.len(),
                t_axis.len()
            )));
        }
        if !strictly_increasing(&z_axis) || !strictly_increasing(&t_axis) {
            return Err(Error::Domain("grid axes must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("grid values must be finite and nonnegative".into()));
        }
        Ok(SpaceTimeDensity {
            z_axis,
            t_axis,
            values,
            provenance,
        })
    }

    pub fn nz(&self) -> usize {
        self.z_axis.len()
    }

    pub fn nt(&self) -> usize {
        self.t_axis.len()
    }

    /// Density at (z index, t index).
    pub fn at(&self, iz: usize, it: usize) -> f64 {
        self.values[it * self.nz() + iz]
    }

    /// One time slice as a contiguous row.
    pub fn slice_at(&self, it: usize) -> &[f64] {
        &self.values[it * self.nz()..(it + 1) * self.nz()]
    }

    /// Index of the z grid point closest to `z`.
    pub fn nearest_z(&self, z: f64) -> usize {
        nearest(&self.z_axis, z)
    }

    /// Index of the t grid point closest to `t`.
    pub fn nearest_t(&self, t: f64) -> usize {
        nearest(&self.t_axis, t)
    }

    /// Global maximum over the grid.
    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// CSV with one row per time slice: header `t\z, z0, z1, ...`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t\\z")?;
        for z in &self.z_axis {
            write!(w, ",{}", fmt_g9(*z))?;
        }
        writeln!(w)?;
        for (j, t) in self.t_axis.iter().enumerate() {
            write!(w, "{}", fmt_g9(*t))?;
            for v in self.slice_at(j) {
                write!(w, ",{}", fmt_g9(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Write the binary QTRD layout.
    pub fn write_qtrd(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        w.write_all(b"QTRD")?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&(self.nz() as u64).to_le_bytes())?;
        w.write_all(&(self.nt() as u64).to_le_bytes())?;
        for v in self.z_axis.iter().chain(self.t_axis.iter()).chain(self.values.iter()) {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read the binary QTRD layout back.
    pub fn read_qtrd(path: &Path, provenance: DensityProvenance) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 24 || &bytes[0..4] != b"QTRD" {
            return Err(Error::Config(format!("{}: not a QTRD grid", path.display())));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != 1 {
            return Err(Error::Config(format!("unsupported QTRD version {version}")));
        }
        let nz = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let nt = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
        let need = 24 + 8 * (nz + nt + nz * nt);
        if bytes.len() != need {
            return Err(Error::Config(format!(
                "QTRD size mismatch: expected {need} bytes, found {}",
                bytes.len()
            )));
        }
        let mut off = 24;
        let mut take = |count: usize| -> Vec<f64> {
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                out.push(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
                off += 8;
            }
            out
        };
        let z_axis = take(nz);
        let t_axis = take(nt);
        let values = take(nz * nt);
        SpaceTimeDensity::new(z_axis, t_axis, values, provenance)
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn nearest(axis: &[f64], x: f64) -> usize {
    match axis.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
        Ok(i) => i,
        Err(0) => 0,
        Err(i) if i >= axis.len() => axis.len() - 1,
        Err(i) => {
            if (axis[i] - x).abs() < (x - axis[i - 1]).abs() {
                i
            } else {
                i - 1
            }
        }
    }
}

/// Uniformly spaced axis with n points over [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Number formatted with 9 significant digits, the convention for every
/// numeric output of the crate.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..=8).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.8e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qtrd_round_trip() {
        let g = SpaceTimeDensity::new(
            linspace(-1.0, 1.0, 5),
            linspace(0.0, 2.0, 3),
            (0..15).map(|i| i as f64 * 0.5).collect(),
            DensityProvenance::Quantum,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("qthreshold_grid_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("g.qtrd");
        g.write_qtrd(&path).unwrap();
        let back = SpaceTimeDensity::read_qtrd(&path, DensityProvenance::Quantum).unwrap();
        assert_eq!(g.z_axis, back.z_axis);
        assert_eq!(g.t_axis, back.t_axis);
        assert_eq!(g.values, back.values);
    }

    #[test]
    fn nearest_lookup() {
        let g = SpaceTimeDensity::new(
            linspace(0.0, 10.0, 11),
            linspace(0.0, 1.0, 2),
            vec![0.0; 22],
            DensityProvenance::Wigner,
        )
        .unwrap();
        assert_eq!(g.nearest_z(3.2), 3);
        assert_eq!(g.nearest_z(-5.0), 0);
        assert_eq!(g.nearest_z(50.0), 10);
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let r = SpaceTimeDensity::new(
            linspace(0.0, 1.0, 3),
            linspace(0.0, 1.0, 3),
            vec![0.0; 8],
            DensityProvenance::Quantum,
        );
        assert!(r.is_err());
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_g9(302.71643), "302.716430");
        assert_eq!(fmt_g9(3.0307969e10), "3.03079690e10");
        assert_eq!(fmt_g9(-0.6931472), "-0.693147200");
    }
}
