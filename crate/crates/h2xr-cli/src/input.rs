//! Input files and output locations.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use h2xr::curve::{BoundaryCurve, CurvePair, FourierTerm};
use h2xr::mesh::MeshFormat;

use crate::{CliError, CliResult};

/// A curve is either a Fourier term list (`[{"k":0,"a_k":1.0}, …]`) or
/// explicit samples with their grid size stated — and checked — up front.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum CurveInput {
    Terms(Vec<FourierTerm>),
    Sampled { samples: Vec<f64>, grid_size: usize },
}

impl CurveInput {
    fn build(self, context: &str) -> CliResult<BoundaryCurve> {
        match self {
            CurveInput::Terms(terms) => Ok(BoundaryCurve::from_terms(&terms)?),
            CurveInput::Sampled { samples, grid_size } => {
                if samples.len() != grid_size {
                    return Err(CliError::Usage(format!(
                        "{context}: grid_size is {grid_size} but {} samples were given",
                        samples.len()
                    )));
                }
                if grid_size < 8 {
                    return Err(CliError::Usage(format!(
                        "{context}: sampled curves need at least 8 points"
                    )));
                }
                Ok(BoundaryCurve::from_samples(&samples))
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    upper: CurveInput,
    lower: CurveInput,
}

pub fn load_pair(path: &Path) -> CliResult<CurvePair> {
    let spec: PairFile = parse(path)?;
    Ok(CurvePair::new(
        spec.upper.build("upper curve")?,
        spec.lower.build("lower curve")?,
    ))
}

pub fn load_curve(path: &Path) -> CliResult<BoundaryCurve> {
    let spec: CurveInput = parse(path)?;
    spec.build(&path.display().to_string())
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{} is not a valid curve file: {e}", path.display())))
}

/// Relative output paths land under $H2XR_OUT_DIR when it is set.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os("H2XR_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Mesh format by extension: `.ply` writes ASCII PLY, anything else OBJ.
pub fn mesh_format(path: &Path) -> MeshFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("ply") => MeshFormat::Ply,
        _ => MeshFormat::Obj,
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Write(path.to_path_buf(), e))
}
