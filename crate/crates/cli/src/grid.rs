use std::str::FromStr;

use rug::Rational;
use transfinite::evaluator::LogPolar;
use transfinite::exact::parse_rational;
use transfinite::schedule::RadiiSequence;

const DEFAULT_SAMPLES: u32 = 64;

/// Sample points in the z-plane.
#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    /// `ring:a3[,samples=64]`: the circle `|z| = a_n`.
    Ring { n: usize, samples: u32 },
    /// `annulus:n=3[,samples=64]`: a spiral through `a_n < |z| ≤ a_(n+1)`.
    Annulus { n: usize, samples: u32 },
    /// `circle:r=1/2[,samples=64]`: the circle `|z| = r`.
    Circle { r: Rational, samples: u32 },
}

/// One grid point with its exact coordinates as printed.
pub struct GridPoint {
    pub log_r: String,
    pub turn: Rational,
    pub z: LogPolar,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected kind:params, got {s:?}"))?;
        let mut samples = DEFAULT_SAMPLES;
        let mut n = None;
        let mut r = None;
        for part in rest.split(',') {
            match part.split_once('=') {
                Some(("samples", v)) => samples = v.parse().map_err(|_| format!("bad sample count {v:?}"))?,
                Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|_| format!("bad ring index {v:?}"))?),
                Some(("r", v)) => r = Some(parse_rational(v).ok_or_else(|| format!("bad radius {v:?}"))?),
                None if kind == "ring" && part.starts_with('a') => {
                    n = Some(part[1..].parse().map_err(|_| format!("bad ring {part:?}"))?)
                }
                _ => return Err(format!("unknown grid parameter {part:?}")),
            }
        }
        if samples == 0 {
            return Err("samples must be positive".into());
        }
        let need_n = || {
            n.filter(|&k| k >= 1)
                .ok_or_else(|| "ring index must be at least 1".to_string())
        };
        match kind {
            "ring" => Ok(Grid::Ring { n: need_n()?, samples }),
            "annulus" => Ok(Grid::Annulus { n: need_n()?, samples }),
            "circle" => {
                let r = r.filter(|r| *r > 0).ok_or("circle needs r > 0")?;
                Ok(Grid::Circle { r, samples })
            }
            _ => Err(format!("unknown grid kind {kind:?}")),
        }
    }
}

impl Grid {
    pub fn points(&self, radii: &RadiiSequence, prec: u32) -> Vec<GridPoint> {
        let (samples, at): (u32, Box<dyn Fn(u32, Rational) -> GridPoint>) = match self {
            Grid::Ring { n, samples } => {
                let lr = radii.log_radius(*n);
                (
                    *samples,
                    Box::new(move |_, turn| GridPoint {
                        log_r: lr.to_string(),
                        z: LogPolar::from_log_turn(lr.clone(), turn.clone(), prec),
                        turn,
                    }),
                )
            }
            Grid::Annulus { n, samples } => {
                let lo = radii.log_radius(*n);
                let width = radii.log_radius(n + 1) - &lo;
                let s = *samples;
                (
                    s,
                    Box::new(move |i, turn| {
                        let lr = &lo + (&width * Rational::from((i + 1, s)));
                        GridPoint {
                            log_r: lr.to_string(),
                            z: LogPolar::from_log_turn(lr, turn.clone(), prec),
                            turn,
                        }
                    }),
                )
            }
            Grid::Circle { r, samples } => {
                let r = r.clone();
                (
                    *samples,
                    Box::new(move |_, turn| {
                        let z = LogPolar::exact(Rational::new(), r.clone(), turn.clone(), prec);
                        GridPoint {
                            log_r: super::fmt_float(&z.log_mag),
                            z,
                            turn,
                        }
                    }),
                )
            }
        };
        (0..samples).map(|i| at(i, Rational::from((i, samples)))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grids() {
        assert_eq!("ring:a3".parse::<Grid>().unwrap(), Grid::Ring { n: 3, samples: 64 });
        assert_eq!(
            "annulus:n=3,samples=16".parse::<Grid>().unwrap(),
            Grid::Annulus { n: 3, samples: 16 }
        );
        assert!("circle:r=1/2,samples=36".parse::<Grid>().is_ok());
        assert!("ring:a0".parse::<Grid>().is_err());
        assert!("disk:r=1".parse::<Grid>().is_err());
        assert!("ring:a3,samples=0".parse::<Grid>().is_err());
    }
}
