//! Evaluation grids given as `xmin:xmax:steps[:log]`.

use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub xmin: f64,
    pub xmax: f64,
    pub steps: usize,
    pub log: bool,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let log = match parts.get(3) {
            None => false,
            Some(&"log") => true,
            Some(&"linear") => false,
            Some(other) => return Err(format!("grid spacing must be `linear` or `log`, got `{other}`")),
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("grid `{s}` is not xmin:xmax:steps[:log]"));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| format!("cannot parse `{t}` in grid `{s}`"));
        let (xmin, xmax) = (num(parts[0])?, num(parts[1])?);
        let steps: usize = parts[2].parse().map_err(|_| format!("cannot parse step count `{}`", parts[2]))?;
        let grid = Grid { xmin, xmax, steps, log };
        grid.validate()?;
        Ok(grid)
    }
}

impl Grid {
    fn validate(&self) -> Result<(), String> {
        if !(self.xmin.is_finite() && self.xmax.is_finite()) || self.xmin < 0.0 {
            return Err(format!("grid bounds must be finite with xmin >= 0, got {}..{}", self.xmin, self.xmax));
        }
        if self.steps == 0 {
            return Err("grid needs at least one step".into());
        }
        // a single point only needs xmin
        if self.steps > 1 && self.xmax <= self.xmin {
            return Err(format!("grid needs xmax > xmin, got {}..{}", self.xmin, self.xmax));
        }
        if self.log && self.xmin == 0.0 {
            return Err("a log grid needs xmin > 0".into());
        }
        Ok(())
    }

    /// Largest abscissa actually visited.
    pub fn upper(&self) -> f64 {
        if self.steps == 1 {
            self.xmin
        } else {
            self.xmax
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.xmin];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                if i + 1 == self.steps {
                    self.xmax
                } else if self.log {
                    self.xmin * (self.xmax / self.xmin).powf(t)
                } else {
                    self.xmin + (self.xmax - self.xmin) * t
                }
            })
            .collect()
    }
}
