//! Data sets as CSV so experiments can be rerun on frozen data.
//!
//! | type               | header                 |
//! |--------------------|------------------------|
//! | `UnivariateSample` | `x`                    |
//! | `RegressionData`   | `x,y`                  |
//! | `CountSeries`      | `t,x_true,y`           |
//! | `DesignData`       | `y,x1,...,xp`          |

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::rng::{categorical, normal, shifted_exponential, RngState};

fn parse(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("not a number: {field:?}")))
}

fn check_header(
    reader: &mut csv::Reader<impl Read>,
    expected: &[&str],
) -> Result<csv::StringRecord> {
    let header = reader.headers()?.clone();
    if header.len() < expected.len() || expected.iter().zip(header.iter()).any(|(e, h)| e != &h) {
        return Err(Error::Format(format!(
            "expected header starting {expected:?}, found {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    Ok(header)
}

/// Independent scalar observations.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSample {
    pub x: Vec<f64>,
}

impl UnivariateSample {
    /// `n` draws from `1/3 N(-4,1) + 1/3 N(0,1) + 1/3 N(8,1)`.
    pub fn three_normal_mixture(rng: &mut RngState, n: usize) -> Result<Self> {
        const MEANS: [f64; 3] = [-4.0, 0.0, 8.0];
        let x = (0..n)
            .map(|_| {
                let j = categorical(rng, &[1.0, 1.0, 1.0])?;
                normal(rng, MEANS[j], 1.0)
            })
            .collect::<Result<_>>()?;
        Ok(UnivariateSample { x })
    }

    /// Density of the three-normal mixture above.
    pub fn three_normal_mixture_density(x: f64) -> f64 {
        [-4.0, 0.0, 8.0]
            .iter()
            .map(|m| (-0.5 * (x - m) * (x - m)).exp() / (2.0 * std::f64::consts::PI).sqrt() / 3.0)
            .sum()
    }

    /// `n` draws from Exponential(`rate`).
    pub fn exponential(rng: &mut RngState, n: usize, rate: f64) -> Result<Self> {
        let x = (0..n)
            .map(|_| shifted_exponential(rng, rate, 0.0))
            .collect::<Result<_>>()?;
        Ok(UnivariateSample { x })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x"])?;
        for v in &self.x {
            wr.write_record([v.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        check_header(&mut rd, &["x"])?;
        let x = rd
            .records()
            .map(|rec| parse(&rec?[0]))
            .collect::<Result<_>>()?;
        Ok(UnivariateSample { x })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RegressionData {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["x", "y"])?;
        for (a, b) in self.x.iter().zip(&self.y) {
            wr.write_record([a.to_string(), b.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        check_header(&mut rd, &["x", "y"])?;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            x.push(parse(&rec[0])?);
            y.push(parse(&rec[1])?);
        }
        Ok(RegressionData { x, y })
    }
}

/// Simulated latent path and its counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSeries {
    pub x_true: Vec<f64>,
    pub y: Vec<u64>,
}

impl CountSeries {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "x_true", "y"])?;
        for (t, (x, y)) in self.x_true.iter().zip(&self.y).enumerate() {
            wr.write_record([(t + 1).to_string(), x.to_string(), y.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        check_header(&mut rd, &["t", "x_true", "y"])?;
        let (mut x_true, mut y) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            x_true.push(parse(&rec[1])?);
            y.push(
                rec[2]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Format(format!("not a count: {:?}", &rec[2])))?,
            );
        }
        Ok(CountSeries { x_true, y })
    }
}

/// Response vector and row-major `n x p` design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignData {
    pub n: usize,
    pub p: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl DesignData {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["y".to_string()];
        header.extend((1..=self.p).map(|j| format!("x{j}")));
        wr.write_record(&header)?;
        for i in 0..self.n {
            let mut rec = vec![self.y[i].to_string()];
            rec.extend(
                self.x[i * self.p..(i + 1) * self.p]
                    .iter()
                    .map(|v| v.to_string()),
            );
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = check_header(&mut rd, &["y"])?;
        let p = header.len() - 1;
        for (j, h) in header.iter().skip(1).enumerate() {
            if h != format!("x{}", j + 1) {
                return Err(Error::Format(format!("unexpected column {h:?}")));
            }
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            y.push(parse(&rec[0])?);
            for j in 1..=p {
                x.push(parse(&rec[j])?);
            }
        }
        Ok(DesignData {
            n: y.len(),
            p,
            x,
            y,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{mean, sd};

    #[test]
    fn mixture_data_moments() {
        let mut rng = RngState::new(1);
        let d = UnivariateSample::three_normal_mixture(&mut rng, 400).unwrap();
        assert_eq!(d.x.len(), 400);
        // Mixture sd: sqrt(1 + var of means) = sqrt(1 + 224/9).
        let mix_sd = (1.0 + 224.0 / 9.0f64).sqrt();
        assert!((mean(&d.x) - 4.0 / 3.0).abs() < 3.0 * mix_sd / 20.0);
    }

    #[test]
    fn exponential_data_moments() {
        let mut rng = RngState::new(2);
        let d = UnivariateSample::exponential(&mut rng, 400, 3.0).unwrap();
        assert!((mean(&d.x) - 1.0 / 3.0).abs() < 3.0 / (3.0 * 20.0));
        assert!(sd(&d.x) > 0.0);
    }

    #[test]
    fn csv_round_trips() {
        let mut rng = RngState::new(3);
        let d = UnivariateSample::exponential(&mut rng, 20, 3.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(UnivariateSample::read_csv(&buf[..]).unwrap(), d);

        let design = DesignData {
            n: 2,
            p: 3,
            x: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.5],
            y: vec![0.25, -1.0],
        };
        let mut buf = Vec::new();
        design.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("y,x1,x2,x3\n"));
        assert_eq!(DesignData::read_csv(&buf[..]).unwrap(), design);

        let series = CountSeries {
            x_true: vec![0.5, -0.25],
            y: vec![3, 0],
        };
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        assert_eq!(CountSeries::read_csv(&buf[..]).unwrap(), series);
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(matches!(
            RegressionData::read_csv("a,b\n1,2\n".as_bytes()),
            Err(Error::Format(_))
        ));
        assert!(UnivariateSample::read_csv("x\nfoo\n".as_bytes()).is_err());
    }
}
