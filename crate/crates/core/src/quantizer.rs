//! Saturating uniform quantizer with a zooming variable, the coupling law,
//! and the two-stage adjustable zoom schedule.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::Laplacian;

/// Mid-tread uniform quantizer with step `2 Delta` and symmetric saturation
/// at level `2 Delta * ceil(M / (2 Delta))`; ties round toward +infinity.
///
/// Axioms: `|y| <= M  =>  |q(y) - y| <= Delta` and
/// `|y| > M  =>  |q(y)| > M - Delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformQuantizer {
    delta: f64,
    m_range: f64,
    levels: f64,
}

impl UniformQuantizer {
    pub fn new(delta: f64, m_range: f64) -> Result<Self> {
        if !(delta > 0.0) || !(m_range > delta) {
            return Err(Error::RangeBelowDelta { m: m_range, delta });
        }
        Ok(Self {
            delta,
            m_range,
            levels: (m_range / (2.0 * delta)).ceil(),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn m_range(&self) -> f64 {
        self.m_range
    }

    /// Quantize at zoom one.
    pub fn apply_unit(&self, y: f64) -> f64 {
        let step = 2.0 * self.delta;
        let level = (y / step + 0.5).floor().clamp(-self.levels, self.levels);
        step * level
    }

    /// Zoomed quantization `q_mu(y) = mu q(y / mu)`.
    pub fn quantize(&self, mu: f64, y: f64) -> Result<f64> {
        if !(mu > 0.0) {
            return Err(Error::NonpositiveMu(mu));
        }
        Ok(mu * self.apply_unit(y / mu))
    }

    pub fn quantize_vec(&self, mu: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        if !(mu > 0.0) {
            return Err(Error::NonpositiveMu(mu));
        }
        Ok(v.map(|y| mu * self.apply_unit(y / mu)))
    }

    /// True iff some component saturates the zoomed range.
    pub fn saturates(&self, mu: f64, v: &DVector<f64>) -> bool {
        v.iter().any(|&y| y.abs() > mu * self.m_range)
    }
}

/// Coupling input `u = -L q` from quantized velocities; the zero row sums
/// of `L` make `u` invariant under adding a constant to all inputs, and the
/// left null vector gives `xi^T u = 0`.
pub fn coupling_input(l: &Laplacian, quantized_velocities: &DVector<f64>) -> DVector<f64> {
    -(l.matrix() * quantized_velocities)
}

/// Zoom-out termination test: all scaled samples fit with a two-step margin,
/// `max_i |v_i / mu| <= M - 2 Delta`.
pub fn zoom_out_trigger(v: &DVector<f64>, mu: f64, q: &UniformQuantizer) -> Result<bool> {
    if q.m_range() <= 2.0 * q.delta() {
        return Err(Error::RangeBelowTwoDelta {
            m: q.m_range(),
            delta: q.delta(),
        });
    }
    if !(mu > 0.0) {
        return Err(Error::NonpositiveMu(mu));
    }
    let peak = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(peak / mu <= q.m_range() - 2.0 * q.delta())
}

/// Stage of the zooming state machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoomStage {
    Fixed,
    ZoomingOut,
    ZoomingIn,
}

/// Per-sample outcome of advancing the schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZoomEvent {
    None,
    /// The zoom-out stage ended at this sample.
    Latched {
        k0: usize,
    },
    /// The zoom-in stage crossed into dwell `index` (mu was contracted).
    DwellAdvanced {
        index: usize,
    },
}

/// Zoom schedule: fixed `mu`, or the zoom-out / zoom-in state machine with
/// `mu(t) = k Delta` while zooming out and a contraction by `theta` every
/// `dwell_samples` samples after the latch.
///
/// Owned by a single simulation run; samples must be fed in order.
#[derive(Debug, Clone)]
pub struct ZoomSchedule {
    state: State,
}

#[derive(Debug, Clone)]
enum State {
    Fixed {
        mu: f64,
    },
    Out {
        delta: f64,
        theta: f64,
        dwell_samples: usize,
    },
    In {
        k0: usize,
        dwell: usize,
        mu: f64,
        theta: f64,
        dwell_samples: usize,
    },
}

impl ZoomSchedule {
    pub fn fixed(mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::NonpositiveMu(mu));
        }
        Ok(Self {
            state: State::Fixed { mu },
        })
    }

    pub fn adjustable(delta: f64, theta: f64, dwell_samples: usize) -> Result<Self> {
        if theta >= 1.0 || !(theta > 0.0) {
            return Err(Error::ThetaNotContractive(theta));
        }
        Ok(Self {
            state: State::Out {
                delta,
                theta,
                dwell_samples: dwell_samples.max(1),
            },
        })
    }

    pub fn stage(&self) -> ZoomStage {
        match self.state {
            State::Fixed { .. } => ZoomStage::Fixed,
            State::Out { .. } => ZoomStage::ZoomingOut,
            State::In { .. } => ZoomStage::ZoomingIn,
        }
    }

    /// Zoom value in effect on `[t_k, t_{k+1})`, advancing the state machine.
    ///
    /// While zooming out the sampled velocities decide, via the trigger,
    /// whether this very sample starts the zoom-in stage (the latched sample
    /// already applies quantized coupling at `mu = k0 Delta`). The zoom-in
    /// value is contracted sequentially so that consecutive dwells have the
    /// exact ratio `theta`.
    pub fn mu_for_sample(
        &mut self,
        k: usize,
        v: &DVector<f64>,
        q: &UniformQuantizer,
    ) -> Result<(f64, ZoomEvent)> {
        match &mut self.state {
            State::Fixed { mu } => Ok((*mu, ZoomEvent::None)),
            State::Out {
                delta,
                theta,
                dwell_samples,
            } => {
                let mu = k as f64 * *delta;
                if k >= 1 && zoom_out_trigger(v, mu, q)? {
                    let (theta, dwell_samples) = (*theta, *dwell_samples);
                    self.state = State::In {
                        k0: k,
                        dwell: 0,
                        mu,
                        theta,
                        dwell_samples,
                    };
                    return Ok((mu, ZoomEvent::Latched { k0: k }));
                }
                Ok((mu, ZoomEvent::None))
            }
            State::In {
                k0,
                dwell,
                mu,
                theta,
                dwell_samples,
            } => {
                let j = (k - *k0) / *dwell_samples;
                let mut event = ZoomEvent::None;
                while *dwell < j {
                    *mu *= *theta;
                    *dwell += 1;
                    event = ZoomEvent::DwellAdvanced { index: *dwell };
                }
                Ok((*mu, event))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;

    #[test]
    fn midtread_values() {
        let q = UniformQuantizer::new(0.5, 10.0).unwrap();
        // nearest level of {..., -1, 0, 1, ...}
        assert_eq!(q.quantize(1.0, 0.3).unwrap(), 0.0);
        assert_eq!(q.quantize(1.0, 0.6).unwrap(), 1.0);
        // saturation: q(12.7) clamps to the top level, still above M - Delta
        let qv = q.quantize(1.0, 12.7).unwrap();
        assert_eq!(qv, 10.0);
        assert!(qv.abs() > q.m_range() - q.delta());
        // odd symmetry away from tie points, zero at zero
        assert_eq!(q.quantize(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(
            q.quantize(2.0, -0.7).unwrap(),
            -q.quantize(2.0, 0.7).unwrap()
        );
        // ties round toward +infinity
        assert_eq!(q.apply_unit(0.5), 1.0);
        assert_eq!(q.apply_unit(-0.5), 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(UniformQuantizer::new(0.0, 1.0).is_err());
        assert!(UniformQuantizer::new(0.5, 0.4).is_err());
        let q = UniformQuantizer::new(0.5, 10.0).unwrap();
        assert!(q.quantize(0.0, 1.0).is_err());
        assert!(q.quantize(-1.0, 1.0).is_err());
    }

    #[test]
    fn coupling_vanishes_on_agreement() {
        let g = DirectedGraph::standin10();
        let l = g.laplacian();
        let v = DVector::from_element(10, 4.2);
        let u = coupling_input(&l, &v);
        assert!(u.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn coupling_single_edge() {
        let g = DirectedGraph::new(2, &[(1, 2, 1.0)]).unwrap();
        let l = g.laplacian();
        let u = coupling_input(&l, &DVector::from_vec(vec![3.0, 1.0]));
        assert_eq!(u[0], -(3.0 - 1.0));
        assert_eq!(u[1], 0.0);
    }

    #[test]
    fn trigger_threshold_arithmetic() {
        let q = UniformQuantizer::new(0.5, 10.0).unwrap();
        // threshold M - 2 Delta = 9 at mu = 1
        let v = DVector::from_vec(vec![9.4, 0.0]);
        assert!(!zoom_out_trigger(&v, 1.0, &q).unwrap());
        let v = DVector::from_vec(vec![8.9, 0.0]);
        assert!(zoom_out_trigger(&v, 1.0, &q).unwrap());
        // zero state triggers at the first positive zoom
        let v = DVector::zeros(2);
        assert!(zoom_out_trigger(&v, 0.5, &q).unwrap());
    }

    #[test]
    fn trigger_requires_headroom() {
        let q = UniformQuantizer::new(0.5, 0.9).unwrap();
        let v = DVector::zeros(2);
        assert!(matches!(
            zoom_out_trigger(&v, 1.0, &q),
            Err(Error::RangeBelowTwoDelta { .. })
        ));
    }

    #[test]
    fn schedule_zoom_out_then_in() {
        let q = UniformQuantizer::new(0.5, 10.0).unwrap();
        let mut sched = ZoomSchedule::adjustable(0.5, 0.7, 3).unwrap();
        // large state: keep zooming out until mu catches up
        let big = DVector::from_vec(vec![20.0, -20.0]);
        let small = DVector::from_vec(vec![0.5, -0.5]);
        let (mu0, _) = sched.mu_for_sample(0, &big, &q).unwrap();
        assert_eq!(mu0, 0.0);
        let (mu1, e1) = sched.mu_for_sample(1, &big, &q).unwrap();
        assert_eq!(mu1, 0.5);
        assert_eq!(e1, ZoomEvent::None); // 20 / 0.5 = 40 > 9
        let (mu5, e5) = sched.mu_for_sample(2, &small, &q).unwrap();
        assert_eq!(e5, ZoomEvent::Latched { k0: 2 });
        assert_eq!(mu5, 1.0); // k0 * Delta
                              // dwell boundaries every 3 samples with exact ratio
        let (m3, _) = sched.mu_for_sample(3, &small, &q).unwrap();
        let (m4, _) = sched.mu_for_sample(4, &small, &q).unwrap();
        assert_eq!(m3, 1.0);
        assert_eq!(m4, 1.0);
        let (m5, e) = sched.mu_for_sample(5, &small, &q).unwrap();
        assert_eq!(e, ZoomEvent::DwellAdvanced { index: 1 });
        assert_eq!(m5, 0.7 * 1.0);
        let (m8, _) = sched.mu_for_sample(8, &small, &q).unwrap();
        assert_eq!(m8, 0.7 * (0.7 * 1.0));
    }

    #[test]
    fn zoom_in_decays_geometrically() {
        let q = UniformQuantizer::new(0.5, 10.0).unwrap();
        let zero = DVector::zeros(2);
        let mut sched = ZoomSchedule::adjustable(0.5, 0.5, 1).unwrap();
        let _ = sched.mu_for_sample(0, &zero, &q).unwrap();
        let (mu, e) = sched.mu_for_sample(1, &zero, &q).unwrap();
        assert_eq!(e, ZoomEvent::Latched { k0: 1 });
        assert_eq!(mu, 0.5);
        let mut prev = mu;
        for k in 2..20 {
            let (mu, _) = sched.mu_for_sample(k, &zero, &q).unwrap();
            assert_eq!(mu, 0.5 * prev);
            prev = mu;
        }
        assert!(prev < 1e-5);
    }
}
