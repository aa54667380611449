//! Displaced-parity Wigner tomography.
//!
//! For each phase-space point the radial state is displaced by `−α`, read
//! out through the adiabatic sweep and the mapping channel, and converted
//! with `W(α) = 2⟨P⟩/π`.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::algebra::wigner::displaced;
use crate::algebra::{Basis, StateVector};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::protocols::measurement::{MeasurementModel, Shots};
use crate::protocols::parity::{AdiabaticReadout, Flags};

/// Default rectangle: 41×41 over `[−3, 3]²`.
pub const RECT_POINTS: usize = 41;
pub const RECT_HALF_WIDTH: f64 = 3.0;
/// Default radial cut: 61 radii over `[0, 3]`, averaged over 8 phases.
pub const CUT_POINTS: usize = 61;
pub const CUT_RADIUS: f64 = 3.0;
pub const CUT_PHASES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Rect {
        re: (f64, f64),
        im: (f64, f64),
        n_re: usize,
        n_im: usize,
    },
    /// Phase-averaged cut; each row is reported at `α = r`.
    RadialCut {
        r_max: f64,
        count: usize,
        phases: usize,
    },
    Points(Vec<C64>),
}

impl Grid {
    pub fn rect_default() -> Self {
        Grid::Rect {
            re: (-RECT_HALF_WIDTH, RECT_HALF_WIDTH),
            im: (-RECT_HALF_WIDTH, RECT_HALF_WIDTH),
            n_re: RECT_POINTS,
            n_im: RECT_POINTS,
        }
    }

    pub fn radial_cut_default() -> Self {
        Grid::RadialCut {
            r_max: CUT_RADIUS,
            count: CUT_POINTS,
            phases: CUT_PHASES,
        }
    }

    fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
        (0..n).map(move |i| lo + step * i as f64)
    }

    /// `(reported point, sampled points)` in output order. Rectangles run
    /// over the imaginary part fastest.
    pub fn layout(&self) -> Vec<(C64, Vec<C64>)> {
        match self {
            Grid::Rect { re, im, n_re, n_im } => Self::linspace(re.0, re.1, *n_re)
                .flat_map(|x| Self::linspace(im.0, im.1, *n_im).map(move |y| C64::new(x, y)))
                .map(|a| (a, vec![a]))
                .collect(),
            Grid::RadialCut { r_max, count, phases } => Self::linspace(0.0, *r_max, *count)
                .map(|r| {
                    let samples = (0..*phases)
                        .map(|j| C64::from_polar(r, 2.0 * PI * j as f64 / *phases as f64))
                        .collect();
                    (C64::new(r, 0.0), samples)
                })
                .collect(),
            Grid::Points(p) => p.iter().map(|&a| (a, vec![a])).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Grid::Rect { re, im, n_re, n_im } => {
                *n_re > 0
                    && *n_im > 0
                    && re.0 <= re.1
                    && im.0 <= im.1
                    && [re.0, re.1, im.0, im.1].iter().all(|v| v.is_finite())
            }
            Grid::RadialCut { r_max, count, phases } => *count > 0 && *phases > 0 && *r_max >= 0.0 && r_max.is_finite(),
            Grid::Points(p) => !p.is_empty() && p.iter().all(|a| a.re.is_finite() && a.im.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid grid {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerPoint {
    pub alpha: C64,
    pub p1_exact: f64,
    pub p1_sampled: f64,
    pub parity: f64,
    pub parity_exact: f64,
    pub wigner: f64,
    pub wigner_exact: f64,
    /// Standard error of `wigner`.
    pub stderr: f64,
    pub flags: Flags,
}

#[derive(Debug, Clone)]
pub struct WignerScan {
    pub state: String,
    pub points: Vec<WignerPoint>,
    pub eta: f64,
    pub shots: Shots,
    pub seed: u64,
    pub tau_rc: f64,
}

impl WignerScan {
    pub fn flags(&self) -> Flags {
        self.points.iter().fold(Flags::default(), |f, p| f.merge(p.flags))
    }

    /// Largest `|W|` allowed for `p1 ∈ [0, 1]`.
    pub fn estimate_bound(&self) -> f64 {
        2.0 / PI * (1.0 + 2.0 * (1.0 - self.eta) / self.eta)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "re_alpha,im_alpha,p1_exact,p1_sampled,parity,wigner,stderr,flags")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.6},{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e},{}",
                p.alpha.re, p.alpha.im, p.p1_exact, p.p1_sampled, p.parity, p.wigner, p.stderr, p.flags
            )?;
        }
        Ok(())
    }
}

/// Runs the tomography of a radial `state` over `grid`. Sampling stream of
/// sample `j` at row `i` is `i · samples_per_row + j`.
pub fn wigner_scan(
    state: &StateVector,
    descriptor: &str,
    grid: &Grid,
    readout: &AdiabaticReadout,
    model: &MeasurementModel,
) -> Result<WignerScan> {
    grid.validate()?;
    let radial = readout.space().radial;
    match state.basis() {
        Basis::Mode(d) if d == radial => {}
        Basis::Mode(d) => {
            return Err(Error::DimensionMismatch {
                expected: radial.dim(),
                found: d.dim(),
            })
        }
        Basis::TwoMode(_) => {
            return Err(Error::InvalidParameter("Wigner scan takes a radial-mode state".into()));
        }
    }
    let layout = grid.layout();
    let points = layout
        .par_iter()
        .enumerate()
        .map(|(i, (alpha, samples))| -> Result<WignerPoint> {
            let m = samples.len() as f64;
            let (mut p1e, mut p1s, mut par, mut pare, mut var) = (0.0, 0.0, 0.0, 0.0, 0.0);
            let mut flags = Flags::default();
            for (j, &a) in samples.iter().enumerate() {
                let phi = displaced(state, a)?;
                let stream = (i * samples.len() + j) as u64;
                let out = readout.parity(&phi, model, stream)?;
                let r = out.result;
                p1e += r.p1_exact;
                p1s += r.p1;
                par += r.parity_estimate;
                pare += r.parity_exact;
                var += r.stderr * r.stderr;
                flags = flags.merge(out.readout.flags);
            }
            let scale = 2.0 / PI;
            Ok(WignerPoint {
                alpha: *alpha,
                p1_exact: p1e / m,
                p1_sampled: p1s / m,
                parity: par / m,
                parity_exact: pare / m,
                wigner: scale * par / m,
                wigner_exact: scale * pare / m,
                stderr: scale * var.sqrt() / m,
                flags,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WignerScan {
        state: descriptor.to_string(),
        points,
        eta: model.eta,
        shots: model.shots,
        seed: model.seed,
        tau_rc: readout.ramp().tau_rc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_state, FockDim, StateSpec, TwoModeSpace};
    use crate::dynamics::StepPolicy;
    use crate::protocols::parity::default_parity_sweep;
    use crate::trap::ModeParams;

    #[test]
    fn layouts() {
        let g = Grid::rect_default().layout();
        assert_eq!(g.len(), 41 * 41);
        assert_eq!(g[0].0, C64::new(-3.0, -3.0));
        assert_eq!(g[1].0, C64::new(-3.0, -2.85));
        let c = Grid::radial_cut_default().layout();
        assert_eq!(c.len(), 61);
        assert_eq!(c[60].1.len(), 8);
        assert!((c[60].1[2] - C64::new(0.0, 3.0)).norm() < 1e-12);
        assert!(Grid::Points(vec![]).validate().is_err());
    }

    #[test]
    fn vacuum_origin_and_mismatch() {
        let space = TwoModeSpace::with_dims(10, 6).unwrap();
        let xi = ModeParams::reference().xi;
        let readout = AdiabaticReadout::new(&space, xi, default_parity_sweep(), &StepPolicy::default()).unwrap();
        let vac = make_state(space.radial, &StateSpec::Fock(0)).unwrap();
        let model = MeasurementModel::ideal();
        let scan = wigner_scan(
            &vac,
            "fock:0",
            &Grid::Points(vec![C64::new(0.0, 0.0)]),
            &readout,
            &model,
        )
        .unwrap();
        assert!((scan.points[0].wigner - 2.0 / PI).abs() < 1e-9);
        assert!(!scan.flags().any());

        let other = make_state(FockDim::new(12).unwrap(), &StateSpec::Fock(0)).unwrap();
        assert!(wigner_scan(&other, "", &Grid::Points(vec![C64::new(0.0, 0.0)]), &readout, &model).is_err());
    }
}
