/// Bilinear story spring with kinematic hardening.
///
/// The force is confined to the band `alpha * k0 * d +/- (1 - alpha) * fy`;
/// inside the band the spring unloads and reloads with the elastic stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearSpring {
    pub k0: f64,
    pub fy: f64,
    pub alpha: f64,
}

/// Committed state of one spring.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpringState {
    pub drift: f64,
    pub force: f64,
    pub yielding: bool,
}

impl BilinearSpring {
    /// Force and tangent at `drift`, starting from the committed `state`.
    pub fn trial(&self, state: &SpringState, drift: f64) -> (f64, f64, bool) {
        let elastic = state.force + self.k0 * (drift - state.drift);
        let back = self.alpha * self.k0 * drift;
        let band = (1.0 - self.alpha) * self.fy;
        let upper = back + band;
        let lower = back - band;
        if elastic > upper {
            (upper, self.alpha * self.k0, true)
        } else if elastic < lower {
            (lower, self.alpha * self.k0, true)
        } else {
            (elastic, self.k0, false)
        }
    }

    pub fn tangent(&self, state: &SpringState) -> f64 {
        if state.yielding {
            self.alpha * self.k0
        } else {
            self.k0
        }
    }

    /// Elastic energy stored at the committed force.
    pub fn recoverable_energy(&self, state: &SpringState) -> f64 {
        0.5 * state.force * state.force / self.k0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotonic_then_unload() {
        let s = BilinearSpring { k0: 100.0, fy: 10.0, alpha: 0.1 };
        let mut st = SpringState::default();
        let (f, kt, y) = s.trial(&st, 0.05);
        assert_eq!((f, kt, y), (5.0, 100.0, false));
        // Yield at drift 0.1; at 0.2 the force is fy + alpha*k0*(0.2 - 0.1).
        let (f, kt, y) = s.trial(&st, 0.2);
        assert!((f - 11.0).abs() < 1e-12);
        assert!((kt - 10.0).abs() < 1e-12 && y);
        st = SpringState { drift: 0.2, force: f, yielding: y };
        // Unloading is elastic.
        let (f2, kt2, y2) = s.trial(&st, 0.15);
        assert!((f2 - 6.0).abs() < 1e-12);
        assert_eq!((kt2, y2), (100.0, false));
        // Reverse yielding occurs after a force change of 2 * fy * (1 - alpha) ... check the bound.
        let (f3, _, y3) = s.trial(&st, -0.2);
        assert!(y3);
        assert!((f3 - (0.1 * 100.0 * -0.2 - 0.9 * 10.0)).abs() < 1e-12);
    }

    #[test]
    fn infinite_strength_is_linear() {
        let s = BilinearSpring { k0: 3.0, fy: f64::INFINITY, alpha: 0.05 };
        let (f, kt, y) = s.trial(&SpringState::default(), 1e6);
        assert_eq!((f, kt, y), (3e6, 3.0, false));
    }
}
