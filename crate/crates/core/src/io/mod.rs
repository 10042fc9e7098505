//! File formats: `.poly` PSLGs, JSON-lines refinement traces and SVG
//! snapshots of a triangulation.

mod poly;
mod svg;
mod trace;

use std::path::PathBuf;

use thiserror::Error;

use crate::cdt::CdtError;

pub use poly::{parse_poly, read_poly, to_poly_string, write_poly};
pub use svg::{overlays_from_trace, render_svg, svg_string, Overlay, PointRole, SvgStyle};
pub use trace::{parse_trace, read_trace, to_trace_string, write_trace};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Pslg(#[from] CdtError),
}

impl IoError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        IoError::Parse { line, message: message.into() }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }
}

/// Formats a double with 17 significant digits.
pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}
