use serde::{Deserialize, Serialize};

/// Names of the calibrated parameters, in vector order.
pub const CALIBRATED_PARAMS: [&str; 7] = [
    "mu_ell", "sigma_nt", "kappa1", "kappa2", "beta_l", "beta_s", "theta_mm",
];

/// The seven calibrated behavioural parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTheta {
    /// Log-normal location of the limit price distance.
    pub mu_ell: f64,
    /// Noise trader aggregate activity.
    pub sigma_nt: f64,
    /// Linear fundamental demand coefficient.
    pub kappa1: f64,
    /// Cubic fundamental demand coefficient.
    pub kappa2: f64,
    /// Slow momentum demand scale.
    pub beta_l: f64,
    /// Fast momentum demand scale.
    pub beta_s: f64,
    /// Market maker quote probability.
    pub theta_mm: f64,
}

impl CalibrationTheta {
    pub fn to_array(self) -> [f64; 7] {
        [
            self.mu_ell,
            self.sigma_nt,
            self.kappa1,
            self.kappa2,
            self.beta_l,
            self.beta_s,
            self.theta_mm,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> CalibrationTheta {
        CalibrationTheta {
            mu_ell: a[0],
            sigma_nt: a[1],
            kappa1: a[2],
            kappa2: a[3],
            beta_l: a[4],
            beta_s: a[5],
            theta_mm: a[6],
        }
    }
}

/// Closed box bounds for the calibrated vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSpace {
    pub lower: [f64; 7],
    pub upper: [f64; 7],
}

impl CalibrationSpace {
    /// Default bounds: every parameter in [0, 2] except the quote
    /// probability, which is capped at 1.
    pub fn standard() -> CalibrationSpace {
        CalibrationSpace {
            lower: [0.0; 7],
            upper: [2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 1.0],
        }
    }

    pub fn contains(&self, theta: &CalibrationTheta) -> bool {
        theta
            .to_array()
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (lo, hi))| x >= lo && x <= hi)
    }

    pub fn clamp(&self, theta: &CalibrationTheta) -> CalibrationTheta {
        let mut a = theta.to_array();
        for (x, (lo, hi)) in a.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *x = x.clamp(*lo, *hi);
        }
        CalibrationTheta::from_array(a)
    }

    /// Map a unit-cube point into the box.
    pub fn scale(&self, unit: [f64; 7]) -> CalibrationTheta {
        let mut a = [0.0; 7];
        for i in 0..7 {
            a[i] = self.lower[i] + unit[i] * (self.upper[i] - self.lower[i]);
        }
        CalibrationTheta::from_array(a)
    }

    /// Box diameter (Euclidean length of the bound span).
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

const HALTON_BASES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// The `index`-th point of the 7-dimensional Halton low-discrepancy
/// sequence (index 0 maps to sequence element 1).
pub fn halton_point(index: usize) -> [f64; 7] {
    let mut point = [0.0; 7];
    for (slot, &base) in point.iter_mut().zip(HALTON_BASES.iter()) {
        let mut i = index as u64 + 1;
        let mut f = 1.0;
        let mut value = 0.0;
        while i > 0 {
            f /= base as f64;
            value += f * (i % base) as f64;
            i /= base;
        }
        *slot = value;
    }
    point
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_array_conversion() {
        let theta = CalibrationTheta::from_array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]);
        assert_eq!(theta.to_array(), [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]);
        assert_eq!(theta.theta_mm, 0.7);
    }

    #[test]
    fn standard_space_covers_reference_values() {
        let space = CalibrationSpace::standard();
        let reference = CalibrationTheta {
            mu_ell: 1.9349,
            sigma_nt: 0.3403,
            kappa1: 0.1390,
            kappa2: 0.4562,
            beta_l: 0.3017,
            beta_s: 0.1273,
            theta_mm: 0.6624,
        };
        assert!(space.contains(&reference));
    }

    #[test]
    fn clamp_projects_into_the_box() {
        let space = CalibrationSpace::standard();
        let wild = CalibrationTheta::from_array([-1.0, 5.0, 0.5, 0.5, 0.5, 0.5, 3.0]);
        let clamped = space.clamp(&wild);
        assert!(space.contains(&clamped));
        assert_eq!(clamped.mu_ell, 0.0);
        assert_eq!(clamped.sigma_nt, 2.0);
        assert_eq!(clamped.theta_mm, 1.0);
    }

    #[test]
    fn halton_points_fill_the_unit_cube() {
        let mut mins = [1.0f64; 7];
        let mut maxs = [0.0f64; 7];
        for i in 0..500 {
            let p = halton_point(i);
            for d in 0..7 {
                assert!((0.0..1.0).contains(&p[d]));
                mins[d] = mins[d].min(p[d]);
                maxs[d] = maxs[d].max(p[d]);
            }
        }
        for d in 0..7 {
            assert!(mins[d] < 0.1, "dimension {d} min {}", mins[d]);
            assert!(maxs[d] > 0.9, "dimension {d} max {}", maxs[d]);
        }
    }
}
