//! One-dimensional Dirac wavepacket on a momentum grid (p along the 3-axis,
//! x = i d/dp₃), evolved with the exact per-point propagator
//! exp(−iHt) = cos(Et) − i sin(Et) H/E.

use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::algebra::{Mat4, Momentum, I};
use crate::dirac::{check_mass, gammas};
use crate::error::{Error, Result};
use crate::spincat::Catalog;

pub type Spinor = [Complex64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZbwConfig {
    pub mass: f64,
    pub p_min: f64,
    pub p_max: f64,
    /// Number of grid points.
    pub n: usize,
    /// Packet center p̄.
    pub center: f64,
    /// Momentum width σ_p (standard deviation of |ψ|²).
    pub width: f64,
    /// Amplitude fraction on the negative-energy subspace.
    pub eta: f64,
    pub t_max: f64,
    pub n_steps: usize,
}

impl Default for ZbwConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            p_min: -6.0,
            p_max: 6.0,
            n: 1024,
            center: 0.0,
            width: 0.2,
            eta: 0.5,
            t_max: 50.0,
            n_steps: 2000,
        }
    }
}

/// Largest allowed boundary amplitude relative to the packet peak.
pub const BOUNDARY_RATIO: f64 = 1e-12;
/// Minimum distance of the packet center from either boundary, in widths.
pub const SUPPORT_WIDTHS: f64 = 8.0;

impl ZbwConfig {
    pub fn validate(&self) -> Result<()> {
        check_mass(self.mass)?;
        let finite = [self.p_min, self.p_max, self.center, self.width, self.eta, self.t_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("non-finite parameter".into()));
        }
        if !(self.width > 0.0) {
            return Err(Error::InvalidConfig(format!("width must be positive, got {}", self.width)));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidConfig(format!("eta must lie in [0, 1], got {}", self.eta)));
        }
        if self.p_min >= self.p_max {
            return Err(Error::InvalidConfig("p_min must be below p_max".into()));
        }
        if self.n < 5 {
            return Err(Error::InvalidConfig("grid needs at least 5 points".into()));
        }
        if self.n_steps == 0 || self.t_max < 0.0 {
            return Err(Error::InvalidConfig("need n_steps >= 1 and t_max >= 0".into()));
        }
        let reach = SUPPORT_WIDTHS * self.width;
        if self.center - reach < self.p_min || self.center + reach > self.p_max {
            return Err(Error::GridTooNarrow(format!(
                "packet center {} must be at least {SUPPORT_WIDTHS} widths from [{}, {}]",
                self.center, self.p_min, self.p_max
            )));
        }
        let edge = [self.p_min, self.p_max]
            .iter()
            .map(|p| self.envelope(*p))
            .fold(0.0f64, f64::max);
        if edge >= BOUNDARY_RATIO {
            return Err(Error::GridTooNarrow(format!(
                "boundary amplitude {edge:.3e} of peak exceeds {BOUNDARY_RATIO:e}"
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|j| self.p_min + j as f64 * h).collect()
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// Gaussian amplitude g(p) = exp(−(p − p̄)²/(4σ²)), peak 1.
    pub fn envelope(&self, p: f64) -> f64 {
        let d = p - self.center;
        (-(d * d) / (4.0 * self.width * self.width)).exp()
    }
}

/// Fixed reference spinor projected onto the energy subspaces. It is never
/// annihilated by either projector for m > 0.
pub fn reference_spinor() -> Spinor {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [s, 0.0, s, 0.0].map(|v| Complex64::new(v, 0.0))
}

/// H(p) = α³p + βm for momentum p along the 3-axis.
pub fn hamiltonian_1d(m: f64, p: f64) -> Mat4 {
    let g = gammas();
    g.alpha[2] * p + g.beta * m
}

/// Λ±(p) = (I ± H/E)/2.
pub fn projector(m: f64, p: f64, positive: bool) -> Mat4 {
    let e = (p * p + m * m).sqrt();
    let s = if positive { 1.0 } else { -1.0 };
    (Mat4::identity() + hamiltonian_1d(m, p) * (s / e)) * 0.5
}

fn normalized(v: Spinor) -> Spinor {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.map(|c| c / n)
}

/// u±(p): normalized projection of the reference spinor.
pub fn energy_eigenspinor(m: f64, p: f64, positive: bool) -> Spinor {
    normalized(projector(m, p, positive).mul_vec(&reference_spinor()))
}

/// exp(−iHt) = cos(Et) − i sin(Et) H/E.
pub fn propagator(m: f64, p: f64, t: f64) -> Mat4 {
    let e = (p * p + m * m).sqrt();
    let (s, c) = (e * t).sin_cos();
    Mat4::identity() * c - hamiltonian_1d(m, p) * (I * (s / e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    pub cfg: ZbwConfig,
    pub grid: Vec<f64>,
    pub values: Vec<Spinor>,
    pub t: f64,
}

impl WavePacket {
    pub fn spacing(&self) -> f64 {
        self.cfg.spacing()
    }

    /// Σ |ψ(p_j)|² Δp.
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * self.spacing()
    }

    /// Σ ψ† H ψ Δp.
    pub fn energy(&self) -> f64 {
        let m = self.cfg.mass;
        self.grid
            .iter()
            .zip(&self.values)
            .map(|(&p, v)| inner(v, &hamiltonian_1d(m, p).mul_vec(v)).re)
            .sum::<f64>()
            * self.spacing()
    }
}

fn inner(a: &Spinor, b: &Spinor) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn init_packet(cfg: &ZbwConfig) -> Result<WavePacket> {
    cfg.validate()?;
    let m = cfg.mass;
    let grid = cfg.grid();
    let (a_pos, a_neg) = ((1.0 - cfg.eta).sqrt(), cfg.eta.sqrt());
    let mut values: Vec<Spinor> = grid
        .iter()
        .map(|&p| {
            let g = cfg.envelope(p);
            let up = energy_eigenspinor(m, p, true);
            let um = energy_eigenspinor(m, p, false);
            std::array::from_fn(|k| (up[k] * a_pos + um[k] * a_neg) * g)
        })
        .collect();
    let norm = (values
        .iter()
        .map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        * cfg.spacing())
    .sqrt();
    for v in values.iter_mut() {
        for c in v.iter_mut() {
            *c /= norm;
        }
    }
    Ok(WavePacket {
        cfg: *cfg,
        grid,
        values,
        t: 0.0,
    })
}

/// Advances the packet by `t` with the exact propagator.
pub fn evolve(pk: &WavePacket, t: f64) -> WavePacket {
    let m = pk.cfg.mass;
    let values = pk
        .grid
        .iter()
        .zip(&pk.values)
        .map(|(&p, v)| propagator(m, p, t).mul_vec(v))
        .collect();
    WavePacket {
        cfg: pk.cfg,
        grid: pk.grid.clone(),
        values,
        t: pk.t + t,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Representation {
    Dirac,
    Fw,
}

/// Fourth-order central difference; points outside the grid count as zero.
fn derivative(values: &[Spinor], h: f64) -> Vec<Spinor> {
    let n = values.len();
    let at = |j: isize| -> Spinor {
        if j < 0 || j >= n as isize {
            [Complex64::new(0.0, 0.0); 4]
        } else {
            values[j as usize]
        }
    };
    (0..n as isize)
        .map(|j| {
            let (m2, m1, p1, p2) = (at(j - 2), at(j - 1), at(j + 1), at(j + 2));
            std::array::from_fn(|k| (m2[k] - m1[k] * 8.0 + p1[k] * 8.0 - p2[k]) / (12.0 * h))
        })
        .collect()
}

fn position_of(values: &[Spinor], h: f64) -> f64 {
    let d = derivative(values, h);
    values
        .iter()
        .zip(&d)
        .map(|(v, dv)| inner(v, &dv.map(|c| c * I)).re)
        .sum::<f64>()
        * h
}

/// FW unitary restricted to the 3-axis.
pub fn fw_unitary_1d(m: f64, p: f64) -> Result<Mat4> {
    Catalog::with_defaults(m)?.fw_unitary().value(&Momentum::new([0.0, 0.0, p], m)?)
}

/// ⟨x⟩ for DIRAC, or ⟨x_FW⟩ = ⟨Uψ| x |Uψ⟩ for FW.
pub fn expect_position(pk: &WavePacket, rep: Representation) -> Result<f64> {
    let h = pk.spacing();
    match rep {
        Representation::Dirac => Ok(position_of(&pk.values, h)),
        Representation::Fw => {
            let u = fw_matrices(&pk.cfg, &pk.grid)?;
            Ok(position_of(&apply_pointwise(&u, &pk.values), h))
        }
    }
}

fn fw_matrices(cfg: &ZbwConfig, grid: &[f64]) -> Result<Vec<Mat4>> {
    let u = Catalog::with_defaults(cfg.mass)?.fw_unitary();
    grid.iter()
        .map(|&p| u.value(&Momentum::new([0.0, 0.0, p], cfg.mass)?))
        .collect()
}

fn apply_pointwise(mats: &[Mat4], values: &[Spinor]) -> Vec<Spinor> {
    mats.iter().zip(values).map(|(u, v)| u.mul_vec(v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub x_dirac: f64,
    pub x_fw: f64,
    pub norm: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub cfg: ZbwConfig,
    pub rows: Vec<Row>,
}

pub const CSV_HEADER: &str = "t,x_dirac,x_fw,norm,energy";

impl TimeSeries {
    pub fn column(&self, f: impl Fn(&Row) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 120);
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.t, r.x_dirac, r.x_fw, r.norm, r.energy
            );
        }
        s
    }
}

/// Evolves from t = 0 to t_max in n_steps equal steps. Every row uses the
/// exact propagator from the initial packet, so no error accumulates.
pub fn run_zbw(cfg: &ZbwConfig) -> Result<TimeSeries> {
    let pk0 = init_packet(cfg)?;
    let m = cfg.mass;
    let h = cfg.spacing();
    let u = fw_matrices(cfg, &pk0.grid)?;
    let hams: Vec<Mat4> = pk0.grid.iter().map(|&p| hamiltonian_1d(m, p)).collect();
    let energies: Vec<f64> = pk0.grid.iter().map(|&p| (p * p + m * m).sqrt()).collect();
    let dt = cfg.dt();
    let mut rows = Vec::with_capacity(cfg.n_steps + 1);
    let mut psi = vec![[Complex64::new(0.0, 0.0); 4]; cfg.n];
    for step in 0..=cfg.n_steps {
        let t = step as f64 * dt;
        for j in 0..cfg.n {
            let (s, c) = (energies[j] * t).sin_cos();
            let hv = hams[j].mul_vec(&pk0.values[j]);
            let f = I * (s / energies[j]);
            psi[j] = std::array::from_fn(|k| pk0.values[j][k] * c - hv[k] * f);
        }
        let mut norm = 0.0;
        let mut energy = 0.0;
        for j in 0..cfg.n {
            norm += psi[j].iter().map(|c| c.norm_sqr()).sum::<f64>();
            energy += inner(&psi[j], &hams[j].mul_vec(&psi[j])).re;
        }
        rows.push(Row {
            t,
            x_dirac: position_of(&psi, h),
            x_fw: position_of(&apply_pointwise(&u, &psi), h),
            norm: norm * h,
            energy: energy * h,
        });
    }
    Ok(TimeSeries { cfg: *cfg, rows })
}

/// Least-squares line y ≈ slope·t + intercept and the largest absolute
/// deviation from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_deviation: f64,
}

pub fn linear_fit(t: &[f64], y: &[f64]) -> Result<LinearFit> {
    if t.len() != y.len() || t.len() < 2 {
        return Err(Error::InvalidConfig("linear fit needs two or more paired points".into()));
    }
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|ti| (ti - tm) * (ti - tm)).sum();
    let sty: f64 = t.iter().zip(y).map(|(ti, yi)| (ti - tm) * (yi - ym)).sum();
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    let intercept = ym - slope * tm;
    let max_deviation = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| (yi - slope * ti - intercept).abs())
        .fold(0.0, f64::max);
    Ok(LinearFit {
        slope,
        intercept,
        max_deviation,
    })
}

/// Angular frequency of the largest non-DC FFT peak of the detrended
/// series, with the bin width 2π/(N·dt).
pub fn dominant_frequency(t: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let fit = linear_fit(t, y)?;
    let n = y.len();
    let dt = t[1] - t[0];
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig("time samples must increase".into()));
    }
    let mut buf: Vec<Complex64> = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| Complex64::new(yi - fit.slope * ti - fit.intercept, 0.0))
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let peak = (1..=n / 2)
        .max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm()))
        .unwrap_or(1);
    let bin = std::f64::consts::TAU / (n as f64 * dt);
    Ok((peak as f64 * bin, bin))
}

/// Summary numbers for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZbwAnalysis {
    pub dirac_fit: LinearFit,
    pub fw_fit: LinearFit,
    /// Oscillation amplitude of ⟨x⟩ about its linear trend.
    pub dirac_amplitude: f64,
    pub dominant_omega: f64,
    pub bin_width: f64,
    /// max |Δ⟨x⟩/Δt| over consecutive rows.
    pub max_speed: f64,
    pub norm_drift: f64,
    pub energy_drift: f64,
}

pub fn analyze(ts: &TimeSeries) -> Result<ZbwAnalysis> {
    let t = ts.column(|r| r.t);
    let xd = ts.column(|r| r.x_dirac);
    let xf = ts.column(|r| r.x_fw);
    let dirac_fit = linear_fit(&t, &xd)?;
    let fw_fit = linear_fit(&t, &xf)?;
    let (dominant_omega, bin_width) = dominant_frequency(&t, &xd)?;
    let max_speed = t
        .windows(2)
        .zip(xd.windows(2))
        .map(|(tw, xw)| ((xw[1] - xw[0]) / (tw[1] - tw[0])).abs())
        .fold(0.0, f64::max);
    let drift = |col: Vec<f64>| {
        let first = col[0];
        col.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
    };
    Ok(ZbwAnalysis {
        dirac_fit,
        fw_fit,
        dirac_amplitude: dirac_fit.max_deviation,
        dominant_omega,
        bin_width,
        max_speed,
        norm_drift: drift(ts.column(|r| r.norm)),
        energy_drift: drift(ts.column(|r| r.energy)),
    })
}

/// ⟨α³⟩(t) for the single-momentum state √(1−η)u₊ + √η u₋ by direct 4×4
/// products; the velocity whose time integral is the trembling motion.
pub fn single_momentum_velocity(m: f64, p: f64, eta: f64, t: f64) -> f64 {
    let up = energy_eigenspinor(m, p, true);
    let um = energy_eigenspinor(m, p, false);
    let psi: Spinor = std::array::from_fn(|k| up[k] * (1.0 - eta).sqrt() + um[k] * eta.sqrt());
    let psi_t = propagator(m, p, t).mul_vec(&psi);
    inner(&psi_t, &gammas().alpha[2].mul_vec(&psi_t)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ZbwConfig {
        ZbwConfig {
            n: 256,
            n_steps: 50,
            t_max: 5.0,
            ..Default::default()
        }
    }

    #[test]
    fn pure_energy_packets() {
        for (eta, killer) in [(0.0, false), (1.0, true)] {
            let cfg = ZbwConfig { eta, ..small() };
            let pk = init_packet(&cfg).unwrap();
            for (&p, v) in pk.grid.iter().zip(&pk.values) {
                let r = projector(1.0, p, killer).mul_vec(v);
                assert!(r.iter().all(|c| c.norm() < 1e-12));
            }
            assert!((pk.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_is_reversible() {
        let pk = init_packet(&small()).unwrap();
        let back = evolve(&evolve(&pk, 3.7), -3.7);
        for (a, b) in pk.values.iter().zip(&back.values) {
            for k in 0..4 {
                assert!((a[k] - b[k]).norm() < 1e-12);
            }
        }
        assert_eq!(evolve(&pk, 0.0).values, pk.values);
    }

    #[test]
    fn eigenspinor_only_gains_phase() {
        let (m, p, t) = (1.0, 0.75, 2.3);
        let u = energy_eigenspinor(m, p, true);
        let got = propagator(m, p, t).mul_vec(&u);
        let phase = Complex64::from_polar(1.0, -1.25 * t);
        for k in 0..4 {
            assert!((got[k] - u[k] * phase).norm() < 1e-14);
        }
    }

    #[test]
    fn propagator_is_unitary() {
        for p in [-3.0, 0.0, 0.4, 5.5] {
            for t in [0.0, 1.0, 17.3] {
                assert!(propagator(1.0, p, t).unitarity_defect() < 1e-13);
            }
        }
    }

    #[test]
    fn symmetric_packet_centered() {
        let cfg = ZbwConfig { eta: 0.0, ..small() };
        let pk = init_packet(&cfg).unwrap();
        assert!(expect_position(&pk, Representation::Dirac).unwrap().abs() < 1e-10);
    }

    #[test]
    fn narrow_grid_rejected() {
        let cfg = ZbwConfig { p_min: -1.0, ..small() };
        assert!(matches!(init_packet(&cfg), Err(Error::GridTooNarrow(_))));
        let cfg = ZbwConfig { eta: 1.5, ..small() };
        assert!(matches!(init_packet(&cfg), Err(Error::InvalidConfig(_))));
        let cfg = ZbwConfig { width: 0.0, ..small() };
        assert!(init_packet(&cfg).is_err());
    }

    #[test]
    fn two_point_velocity_oscillates_at_2e() {
        // ⟨α³⟩(t) = A + B cos(2Et) + C sin(2Et): fit from three times,
        // verify at others.
        let (m, p, eta): (f64, f64, f64) = (1.0, 0.6, 0.5);
        let e = (p * p + m * m).sqrt();
        let ts = [0.0, 0.3, 0.7];
        let rows: Vec<[f64; 3]> = ts
            .iter()
            .map(|&t| [1.0, (2.0 * e * t).cos(), (2.0 * e * t).sin()])
            .collect();
        let y: Vec<f64> = ts.iter().map(|&t| single_momentum_velocity(m, p, eta, t)).collect();
        let coef = solve3(&rows, &y);
        assert!(coef[1].hypot(coef[2]) > 0.1);
        for t in [1.1, 2.9, 7.4] {
            let model = coef[0] + coef[1] * (2.0 * e * t).cos() + coef[2] * (2.0 * e * t).sin();
            assert!((model - single_momentum_velocity(m, p, eta, t)).abs() < 1e-12);
        }
        // Steady part is the group velocity weighted by the positive share
        // minus the negative share.
        assert!((coef[0] - (p / e) * (1.0 - 2.0 * eta)).abs() < 1e-12);
    }

    fn solve3(a: &[[f64; 3]], y: &[f64]) -> [f64; 3] {
        let det = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let base = [a[0], a[1], a[2]];
        let d = det(base);
        std::array::from_fn(|c| {
            let mut m = base;
            for r in 0..3 {
                m[r][c] = y[r];
            }
            det(m) / d
        })
    }

    #[test]
    fn csv_shape() {
        let ts = run_zbw(&ZbwConfig { n_steps: 3, ..small() }).unwrap();
        let csv = ts.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1].split(',').count(), 5);
    }

    #[test]
    fn linear_fit_exact_line() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = linear_fit(&t, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept - 1.0).abs() < 1e-15);
        assert!(f.max_deviation < 1e-14);
    }
}
