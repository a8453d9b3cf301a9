//! Plain-text loading of joint PMFs, channels, and distortion tables.
//!
//! The format is a header line of alphabet sizes followed by the entries
//! in row-major order, separated by arbitrary whitespace. `#` starts a
//! comment running to the end of the line.

use ndarray::Array2;

use super::channel::Dmc;
use super::info::JointPMF;
use super::rdf::DistortionMatrix;
use super::DiscreteError;

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split_whitespace())
}

fn parse_header(text: &str) -> Result<(Vec<usize>, Vec<f64>), DiscreteError> {
    let header_line = text
        .lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .find(|line| !line.trim().is_empty())
        .ok_or_else(|| DiscreteError::Parse { reason: "empty input".into() })?;
    let dims: Vec<usize> = header_line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| DiscreteError::Parse {
                reason: format!("bad dimension {t:?} in header"),
            })
        })
        .collect::<Result<_, _>>()?;
    let values: Vec<f64> = tokens(text)
        .skip(dims.len())
        .map(|t| {
            t.parse::<f64>().map_err(|_| DiscreteError::Parse {
                reason: format!("bad number {t:?}"),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok((dims, values))
}

/// Joint PMF: header holds one size per axis.
pub fn parse_pmf(text: &str) -> Result<JointPMF, DiscreteError> {
    let (dims, values) = parse_header(text)?;
    JointPMF::new(dims, values)
}

fn parse_rect(text: &str) -> Result<Array2<f64>, DiscreteError> {
    let (dims, values) = parse_header(text)?;
    let [rows, cols] = dims[..] else {
        return Err(DiscreteError::Parse {
            reason: format!("expected two header dimensions, got {}", dims.len()),
        });
    };
    if values.len() != rows * cols {
        return Err(DiscreteError::DimensionMismatch { expected: rows * cols, got: values.len() });
    }
    Ok(Array2::from_shape_vec((rows, cols), values).expect("length checked"))
}

/// Channel matrix: header is `in_size out_size`, rows must be stochastic.
pub fn parse_dmc(text: &str) -> Result<Dmc, DiscreteError> {
    Dmc::new(parse_rect(text)?)
}

/// Distortion table: header is `source_size recon_size`.
pub fn parse_distortion(text: &str) -> Result<DistortionMatrix, DiscreteError> {
    DistortionMatrix::new(parse_rect(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_roundtrip_with_comments() {
        let text = "# a doubly symmetric pair\n2 2\n0.4 0.1  # first row\n0.1 0.4\n";
        let p = parse_pmf(text).unwrap();
        assert_eq!(p.dims(), &[2, 2]);
        assert!((p.prob(&[0, 0]) - 0.4).abs() < 1e-15);
        assert!((p.prob(&[1, 0]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn dmc_parses_and_validates() {
        let ch = parse_dmc("2 2\n0.9 0.1\n0.2 0.8\n").unwrap();
        assert!((ch.prob(1, 0) - 0.2).abs() < 1e-15);
        assert!(matches!(
            parse_dmc("2 2\n0.9 0.2\n0.2 0.8\n"),
            Err(DiscreteError::InvalidChannelRow { row: 0, .. })
        ));
    }

    #[test]
    fn shape_and_token_errors_are_reported() {
        assert!(matches!(
            parse_pmf("2 2\n0.5 0.5 0.0\n"),
            Err(DiscreteError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            parse_pmf("2 x\n0.5 0.5\n"),
            Err(DiscreteError::Parse { .. })
        ));
        assert!(matches!(
            parse_distortion("2\n0.0 1.0\n"),
            Err(DiscreteError::Parse { .. })
        ));
        assert!(matches!(parse_pmf("   \n# only comments\n"), Err(DiscreteError::Parse { .. })));
    }
}
