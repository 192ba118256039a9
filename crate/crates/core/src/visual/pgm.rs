//! Binary portable graymap (P5) import and export.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::{Heatmap, HeatmapSuggester, Raster};
use crate::error::VisualError;
use crate::fea::Analysis;
use crate::model::{Scenario, TrussDesign};
use crate::seed::AgentRng;

/// Encodes `raster` as 8-bit P5, intensities rounded to the nearest level.
pub fn write_pgm(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend(raster.pixels.iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn read_pgm(bytes: &[u8]) -> Result<Raster, VisualError> {
    let bad = |m: &str| VisualError::Pgm(m.to_string());
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ascii header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("missing P5 magic"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (width, height, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(bad("only 8-bit graymaps are supported"));
    }
    let data = bytes.get(pos + 1..).ok_or_else(|| bad("missing pixel data"))?;
    if data.len() < width * height {
        return Err(bad("pixel data shorter than header dimensions"));
    }
    let pixels = data[..width * height].iter().map(|&b| f64::from(b) / maxval as f64).collect();
    Ok(Raster { width, height, pixels })
}

fn channel_paths(base: &Path) -> (PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut s = base.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".add.pgm"), with(".rem.pgm"))
}

/// Writes `<base>.add.pgm` and `<base>.rem.pgm`.
pub fn write_heatmap(h: &Heatmap, base: &Path) -> io::Result<()> {
    let (add, rem) = channel_paths(base);
    let raster = |pixels: &Vec<f64>| Raster { width: h.width, height: h.height, pixels: pixels.clone() };
    fs::write(add, write_pgm(&raster(&h.add_intensity)))?;
    fs::write(rem, write_pgm(&raster(&h.remove_intensity)))
}

#[derive(Debug, thiserror::Error)]
pub enum HeatmapFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Format(#[from] VisualError),
}

pub fn read_heatmap(base: &Path) -> Result<Heatmap, HeatmapFileError> {
    let (add, rem) = channel_paths(base);
    let add = read_pgm(&fs::read(add)?)?;
    let rem = read_pgm(&fs::read(rem)?)?;
    if add.dims() != rem.dims() {
        return Err(VisualError::DimensionMismatch { left: add.dims(), right: rem.dims() }.into());
    }
    Ok(Heatmap { width: add.width, height: add.height, add_intensity: add.pixels, remove_intensity: rem.pixels })
}

/// Reads `<dir>/<iteration:04>.{add,rem}.pgm` for each step. A missing pair
/// yields an empty heatmap, which ends the agent's run.
#[derive(Debug, Clone)]
pub struct FileSuggester {
    pub dir: PathBuf,
    pub resolution: usize,
}

impl HeatmapSuggester for FileSuggester {
    fn suggest(&self, _: &TrussDesign, _: &Scenario, _: &Analysis, iteration: usize, _: &mut AgentRng) -> Heatmap {
        read_heatmap(&self.dir.join(format!("{iteration:04}")))
            .unwrap_or_else(|_| Heatmap::new(self.resolution, self.resolution))
    }
}
