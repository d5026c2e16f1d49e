//! Fiber, wave and Raman-gain physics: wave bookkeeping for the 48-wave
//! C-band setup (40 signal channels + 8 bidirectional pumps), the silica
//! Raman efficiency profile, and the coupled power-evolution right-hand side.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light expressed in nm·THz, so that `C_NM_THZ / lambda_nm` is THz.
pub const C_NM_THZ: f64 = 299_792.458;

/// ln(10)/10, the dB/km → 1/km (Neper) conversion factor.
pub const DB_TO_NEPER: f64 = core::f64::consts::LN_10 / 10.0;

/// Pump wavelengths in launch order `[p1..p8]` (co p1–p4, counter p5–p8).
pub const PUMP_WAVELENGTHS_NM: [f64; 8] = [
    1366.0, 1425.0, 1455.0, 1475.0, 1366.0, 1425.0, 1455.0, 1475.0,
];

/// Lower pump power limits in mW, launch order `[p1..p8]`.
pub const PUMP_POWER_MIN_MW: [f64; 8] = [200.0, 5.0, 5.0, 5.0, 200.0, 5.0, 5.0, 5.0];

/// Upper pump power limits in mW, launch order `[p1..p8]`.
pub const PUMP_POWER_MAX_MW: [f64; 8] = [1200.0, 150.0, 150.0, 150.0, 1200.0, 150.0, 150.0, 150.0];

/// Default relative search-box half-widths around a predicted pump set:
/// 0.35 for the second-order pumps (p1, p5), 0.5 for the first-order ones.
pub const DEFAULT_DELTA_P: [f64; 8] = [0.35, 0.5, 0.5, 0.5, 0.35, 0.5, 0.5, 0.5];

/// Number of signal channels in the standard C-band comb.
pub const STANDARD_SIGNAL_COUNT: usize = 40;
/// First signal channel frequency, THz.
pub const STANDARD_SIGNAL_START_THZ: f64 = 192.0;
/// Channel spacing, THz.
pub const STANDARD_SIGNAL_SPACING_THZ: f64 = 0.1;

/// Convert a vacuum wavelength in nm to frequency in THz.
pub fn wavelength_to_frequency(lambda_nm: f64) -> Result<f64> {
    if !(lambda_nm > 0.0) {
        return Err(Error::invalid_argument(format!(
            "wavelength must be positive, got {lambda_nm} nm"
        )));
    }
    Ok(C_NM_THZ / lambda_nm)
}

/// Fiber span parameters.
///
/// `effective_area_um2` and `nonlinear_coeff_per_w_km` are recorded for
/// completeness but play no role in the power evolution: the Raman
/// efficiency is already normalized to 1/(W·km).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub span_length_km: f64,
    pub alpha_signal_db_km: f64,
    pub alpha_pump_first_db_km: f64,
    pub alpha_pump_second_db_km: f64,
    pub raman_peak_efficiency_per_w_km: f64,
    pub effective_area_um2: f64,
    pub nonlinear_coeff_per_w_km: f64,
}

impl Default for FiberSpec {
    fn default() -> Self {
        FiberSpec {
            span_length_km: 80.0,
            alpha_signal_db_km: 0.2,
            alpha_pump_first_db_km: 0.25,
            alpha_pump_second_db_km: 0.32,
            raman_peak_efficiency_per_w_km: 0.4125,
            effective_area_um2: 80.0,
            nonlinear_coeff_per_w_km: 1.26,
        }
    }
}

impl FiberSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.span_length_km > 0.0) {
            return Err(Error::invalid_argument("span length must be positive"));
        }
        for (name, a) in [
            ("signal attenuation", self.alpha_signal_db_km),
            ("first-order pump attenuation", self.alpha_pump_first_db_km),
            ("second-order pump attenuation", self.alpha_pump_second_db_km),
        ] {
            if !(a > 0.0) {
                return Err(Error::invalid_argument(format!(
                    "{name} must be positive, got {a} dB/km"
                )));
            }
        }
        if !(self.raman_peak_efficiency_per_w_km > 0.0) {
            return Err(Error::invalid_argument(
                "Raman peak efficiency must be positive",
            ));
        }
        Ok(())
    }
}

/// Propagation direction along the span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Travels from z = 0 toward z = L (launched at the transmitter).
    Forward,
    /// Travels from z = L toward z = 0 (launched at the receiver).
    Backward,
}

impl Direction {
    /// +1 for forward, −1 for backward.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveRole {
    Signal,
    PumpFirstOrder,
    PumpSecondOrder,
}

/// One propagating wave: a signal channel or a pump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub frequency_thz: f64,
    pub direction: Direction,
    /// Attenuation in natural (Neper) units, 1/km.
    pub attenuation_np_km: f64,
    pub role: WaveRole,
}

impl Wave {
    pub fn new(frequency_thz: f64, direction: Direction, attenuation_db_km: f64, role: WaveRole) -> Result<Self> {
        if !(frequency_thz > 0.0) {
            return Err(Error::invalid_argument(format!(
                "frequency must be positive, got {frequency_thz} THz"
            )));
        }
        if !(attenuation_db_km > 0.0) {
            return Err(Error::invalid_argument(format!(
                "attenuation must be positive, got {attenuation_db_km} dB/km"
            )));
        }
        Ok(Wave {
            frequency_thz,
            direction,
            attenuation_np_km: attenuation_db_km * DB_TO_NEPER,
            role,
        })
    }

    pub fn is_pump(&self) -> bool {
        !matches!(self.role, WaveRole::Signal)
    }
}

/// Ordered collection of propagating waves.
///
/// For the standard C-band setup the order is: indices 0–39 the signal
/// channels ascending in frequency, 40–43 the co-propagating pumps p1–p4,
/// 44–47 the counter-propagating pumps p5–p8.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSet {
    waves: Vec<Wave>,
}

impl WaveSet {
    pub fn new(waves: Vec<Wave>) -> Result<Self> {
        if waves.is_empty() {
            return Err(Error::invalid_argument("wave set must not be empty"));
        }
        Ok(WaveSet { waves })
    }

    /// The 48-wave C-band layout: 40 signals at 100 GHz spacing from
    /// 192.0 THz, four co-propagating pumps (1366/1425/1455/1475 nm) and
    /// four counter-propagating pumps at the same wavelengths.
    pub fn standard_cband(fiber: &FiberSpec) -> Result<Self> {
        fiber.validate()?;
        let mut waves = Vec::with_capacity(STANDARD_SIGNAL_COUNT + 8);
        for k in 0..STANDARD_SIGNAL_COUNT {
            let f = STANDARD_SIGNAL_START_THZ + STANDARD_SIGNAL_SPACING_THZ * k as f64;
            waves.push(Wave::new(
                f,
                Direction::Forward,
                fiber.alpha_signal_db_km,
                WaveRole::Signal,
            )?);
        }
        for (idx, &lambda) in PUMP_WAVELENGTHS_NM.iter().enumerate() {
            let direction = if idx < 4 {
                Direction::Forward
            } else {
                Direction::Backward
            };
            let role = if lambda < 1400.0 {
                WaveRole::PumpSecondOrder
            } else {
                WaveRole::PumpFirstOrder
            };
            let alpha = match role {
                WaveRole::PumpSecondOrder => fiber.alpha_pump_second_db_km,
                _ => fiber.alpha_pump_first_db_km,
            };
            waves.push(Wave::new(wavelength_to_frequency(lambda)?, direction, alpha, role)?);
        }
        let set = WaveSet { waves };
        set.validate_standard()?;
        Ok(set)
    }

    /// Checks the standard-layout invariants: 40 signals spaced 100 GHz from
    /// 192.0 THz, 8 pumps, co-pumps forward and counter-pumps backward.
    pub fn validate_standard(&self) -> Result<()> {
        let signals = self.signal_indices();
        if signals.len() != STANDARD_SIGNAL_COUNT {
            return Err(Error::invalid_state(format!(
                "expected {STANDARD_SIGNAL_COUNT} signal channels, found {}",
                signals.len()
            )));
        }
        for (k, &i) in signals.iter().enumerate() {
            let expect = STANDARD_SIGNAL_START_THZ + STANDARD_SIGNAL_SPACING_THZ * k as f64;
            let w = &self.waves[i];
            if (w.frequency_thz - expect).abs() > 1e-9 {
                return Err(Error::invalid_state(format!(
                    "signal {k} at {} THz, expected {expect} THz",
                    w.frequency_thz
                )));
            }
            if w.direction != Direction::Forward {
                return Err(Error::invalid_state(format!("signal {k} must be forward")));
            }
        }
        let pumps = self.pump_indices();
        if pumps.len() != 8 {
            return Err(Error::invalid_state(format!(
                "expected 8 pumps, found {}",
                pumps.len()
            )));
        }
        for (k, &i) in pumps.iter().enumerate() {
            let expect_dir = if k < 4 { Direction::Forward } else { Direction::Backward };
            if self.waves[i].direction != expect_dir {
                return Err(Error::invalid_state(format!(
                    "pump p{} has wrong direction",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    pub fn waves(&self) -> &[Wave] {
        &self.waves
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    /// Indices of signal waves, in set order.
    pub fn signal_indices(&self) -> Vec<usize> {
        self.waves
            .iter()
            .enumerate()
            .filter(|(_, w)| w.role == WaveRole::Signal)
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of pump waves, in set order (p1..pN for the standard layout).
    pub fn pump_indices(&self) -> Vec<usize> {
        self.waves
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_pump())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn signal_frequencies_thz(&self) -> Vec<f64> {
        self.signal_indices()
            .iter()
            .map(|&i| self.waves[i].frequency_thz)
            .collect()
    }

    /// Boundary launch powers (W) for all waves: every signal at
    /// `signal_launch_dbm`, pump k at `pumps.powers_mw()[k]`.
    pub fn launch_vector_w(&self, signal_launch_dbm: f64, pumps: &PumpConfig) -> Result<Vec<f64>> {
        let pump_idx = self.pump_indices();
        if pump_idx.len() != pumps.powers_mw().len() {
            return Err(Error::invalid_argument(format!(
                "{} pump powers supplied for {} pump waves",
                pumps.powers_mw().len(),
                pump_idx.len()
            )));
        }
        let signal_w = crate::solver::dbm_to_mw(signal_launch_dbm) * 1e-3;
        let mut launch = vec![0.0; self.waves.len()];
        for (i, w) in self.waves.iter().enumerate() {
            if w.role == WaveRole::Signal {
                launch[i] = signal_w;
            }
        }
        for (k, &i) in pump_idx.iter().enumerate() {
            launch[i] = pumps.powers_mw()[k] * 1e-3;
        }
        Ok(launch)
    }
}

/// Launch powers for the 8 pumps, mW, ordered `[p1..p8]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    powers_mw: [f64; 8],
}

impl PumpConfig {
    pub fn new(powers_mw: [f64; 8]) -> Result<Self> {
        for (k, &p) in powers_mw.iter().enumerate() {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::invalid_argument(format!(
                    "pump p{} power must be positive and finite, got {p} mW",
                    k + 1
                )));
            }
        }
        Ok(PumpConfig { powers_mw })
    }

    pub fn from_slice(powers_mw: &[f64]) -> Result<Self> {
        let arr: [f64; 8] = powers_mw
            .try_into()
            .map_err(|_| Error::invalid_argument(format!("expected 8 pump powers, got {}", powers_mw.len())))?;
        PumpConfig::new(arr)
    }

    pub fn powers_mw(&self) -> &[f64; 8] {
        &self.powers_mw
    }

    /// True when every pump lies inside the standard power ranges.
    pub fn within_standard_ranges(&self) -> bool {
        self.powers_mw
            .iter()
            .zip(PUMP_POWER_MIN_MW.iter().zip(PUMP_POWER_MAX_MW.iter()))
            .all(|(&p, (&lo, &hi))| p >= lo && p <= hi)
    }
}

/// Raman efficiency profile g(Δf) in 1/(W·km) as a function of the frequency
/// down-shift Δf (THz) from the higher-frequency wave to the lower one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RamanGain {
    /// Piecewise-linear triangular profile: zero at Δf = 0, rising to
    /// `peak_per_w_km` at `peak_shift_thz`, falling back to zero at
    /// `cutoff_thz`, zero beyond.
    Triangular {
        peak_per_w_km: f64,
        peak_shift_thz: f64,
        cutoff_thz: f64,
    },
    /// Tabulated (Δf, efficiency) profile with linear interpolation between
    /// rows and zero outside the table domain.
    Table { points: Vec<(f64, f64)> },
}

impl Default for RamanGain {
    fn default() -> Self {
        RamanGain::Triangular {
            peak_per_w_km: 0.4125,
            peak_shift_thz: 13.2,
            cutoff_thz: 15.0,
        }
    }
}

impl RamanGain {
    pub fn triangular(peak_per_w_km: f64) -> Self {
        RamanGain::Triangular {
            peak_per_w_km,
            peak_shift_thz: 13.2,
            cutoff_thz: 15.0,
        }
    }

    /// Parses a two-column whitespace-separated table
    /// `delta_f_THz efficiency_per_W_km`. Lines starting with `#` are
    /// ignored. Column 1 must be strictly increasing.
    pub fn from_table_str(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let df: f64 = it
                .next()
                .ok_or_else(|| Error::invalid_argument(format!("line {}: missing Δf", lineno + 1)))?
                .parse()
                .map_err(|e| Error::invalid_argument(format!("line {}: {e}", lineno + 1)))?;
            let g: f64 = it
                .next()
                .ok_or_else(|| Error::invalid_argument(format!("line {}: missing efficiency", lineno + 1)))?
                .parse()
                .map_err(|e| Error::invalid_argument(format!("line {}: {e}", lineno + 1)))?;
            points.push((df, g));
        }
        if points.len() < 2 {
            return Err(Error::invalid_argument("gain table needs at least 2 rows"));
        }
        if !points.windows(2).all(|w| w[1].0 > w[0].0) {
            return Err(Error::invalid_argument("gain table Δf column must be strictly increasing"));
        }
        Ok(RamanGain::Table { points })
    }

    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_table_str(&text)
    }

    /// Efficiency at frequency shift `delta_f_thz`; zero for Δf ≤ 0.
    pub fn efficiency(&self, delta_f_thz: f64) -> f64 {
        if delta_f_thz <= 0.0 {
            return 0.0;
        }
        match self {
            RamanGain::Triangular {
                peak_per_w_km,
                peak_shift_thz,
                cutoff_thz,
            } => {
                if delta_f_thz <= *peak_shift_thz {
                    peak_per_w_km * delta_f_thz / peak_shift_thz
                } else if delta_f_thz < *cutoff_thz {
                    peak_per_w_km * (cutoff_thz - delta_f_thz) / (cutoff_thz - peak_shift_thz)
                } else {
                    0.0
                }
            }
            RamanGain::Table { points } => {
                let first = points[0];
                let last = points[points.len() - 1];
                if delta_f_thz < first.0 || delta_f_thz > last.0 {
                    return 0.0;
                }
                let pos = points.partition_point(|p| p.0 <= delta_f_thz);
                if pos == 0 {
                    return first.1;
                }
                if pos >= points.len() {
                    return last.1;
                }
                let (x0, y0) = points[pos - 1];
                let (x1, y1) = points[pos];
                y0 + (y1 - y0) * (delta_f_thz - x0) / (x1 - x0)
            }
        }
    }
}

/// Precomputed pairwise coupling for the power-evolution ODE.
///
/// For wave i with direction sign s_i the evolution is
///
/// ```text
/// s_i · dP_i/dz = P_i · ( −α_i + Σ_j C_ij · P_j )
/// ```
///
/// where C_ij = g(f_j−f_i) when f_j > f_i (gain from the higher-frequency
/// wave) and C_ij = −(f_i/f_j)·g(f_i−f_j) when f_j < f_i (photon-normalized
/// depletion toward the lower-frequency wave). All waves interact, including
/// signal–signal scattering.
#[derive(Debug, Clone)]
pub struct Coupling {
    n: usize,
    /// Row-major n×n coefficient matrix C.
    coeff: Vec<f64>,
    alpha_np_km: Vec<f64>,
    dir_sign: Vec<f64>,
}

impl Coupling {
    pub fn new(waves: &WaveSet, gain: &RamanGain) -> Self {
        let n = waves.len();
        let ws = waves.waves();
        let mut coeff = vec![0.0; n * n];
        for i in 0..n {
            let fi = ws[i].frequency_thz;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let fj = ws[j].frequency_thz;
                coeff[i * n + j] = if fj > fi {
                    gain.efficiency(fj - fi)
                } else if fj < fi {
                    -(fi / fj) * gain.efficiency(fi - fj)
                } else {
                    0.0
                };
            }
        }
        Coupling {
            n,
            coeff,
            alpha_np_km: ws.iter().map(|w| w.attenuation_np_km).collect(),
            dir_sign: ws.iter().map(|w| w.direction.sign()).collect(),
        }
    }

    pub fn n_waves(&self) -> usize {
        self.n
    }

    /// dP_i/dz for all waves, W/km, given instantaneous powers in W.
    /// Validates the input; the solver's inner loop uses
    /// [`Coupling::derivatives_into`] directly.
    pub fn derivatives(&self, powers_w: &[f64]) -> Result<Vec<f64>> {
        if powers_w.len() != self.n {
            return Err(Error::invalid_argument(format!(
                "expected {} powers, got {}",
                self.n,
                powers_w.len()
            )));
        }
        if powers_w.iter().any(|p| p.is_nan() || *p < 0.0) {
            return Err(Error::invalid_state(
                "power vector contains NaN or negative entries".into(),
            ));
        }
        let mut out = vec![0.0; self.n];
        self.derivatives_into(powers_w, &mut out);
        Ok(out)
    }

    /// Unchecked right-hand side evaluation into a caller-provided buffer.
    pub fn derivatives_into(&self, powers_w: &[f64], out: &mut [f64]) {
        debug_assert_eq!(powers_w.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let row = &self.coeff[i * self.n..(i + 1) * self.n];
            let net: f64 = row
                .iter()
                .zip(powers_w.iter())
                .map(|(c, p)| c * p)
                .sum();
            out[i] = self.dir_sign[i] * powers_w[i] * (net - self.alpha_np_km[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wavelength_conversion_matches_closed_form() {
        // c/λ with c = 299792458 m/s
        assert_relative_eq!(
            wavelength_to_frequency(1366.0).unwrap(),
            219.46738433,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            wavelength_to_frequency(1455.0).unwrap(),
            206.04292646,
            max_relative = 1e-8
        );
        // identity: λ numerically equal to c in nm·THz gives exactly 1 THz
        assert_eq!(wavelength_to_frequency(C_NM_THZ).unwrap(), 1.0);
    }

    #[test]
    fn wavelength_conversion_rejects_nonpositive() {
        assert!(wavelength_to_frequency(0.0).is_err());
        assert!(wavelength_to_frequency(-5.0).is_err());
    }

    #[test]
    fn gain_profile_peak_and_ramp() {
        let g = RamanGain::default();
        assert_relative_eq!(g.efficiency(13.2), 0.4125);
        assert_eq!(g.efficiency(0.0), 0.0);
        assert_relative_eq!(g.efficiency(6.6), 0.20625);
        assert_eq!(g.efficiency(15.0), 0.0);
        assert_eq!(g.efficiency(20.0), 0.0);
        assert_eq!(g.efficiency(-3.0), 0.0);
    }

    #[test]
    fn gain_profile_is_continuous_and_nonnegative() {
        let g = RamanGain::default();
        let mut prev = g.efficiency(0.0);
        let mut df = 0.0;
        while df < 16.0 {
            let v = g.efficiency(df);
            assert!(v >= 0.0);
            assert!((v - prev).abs() < 0.01, "jump at {df}");
            prev = v;
            df += 0.001;
        }
    }

    #[test]
    fn gain_table_interpolates_and_zeroes_outside() {
        let g = RamanGain::from_table_str("# comment\n1.0 0.1\n2.0 0.3\n4.0 0.3\n").unwrap();
        assert_eq!(g.efficiency(0.5), 0.0);
        assert_relative_eq!(g.efficiency(1.0), 0.1);
        assert_relative_eq!(g.efficiency(1.5), 0.2);
        assert_relative_eq!(g.efficiency(3.0), 0.3);
        assert_eq!(g.efficiency(4.5), 0.0);
    }

    #[test]
    fn gain_table_rejects_non_monotone() {
        assert!(RamanGain::from_table_str("1.0 0.1\n0.5 0.2\n").is_err());
        assert!(RamanGain::from_table_str("1.0 0.1\n").is_err());
    }

    #[test]
    fn attenuation_converts_to_neper() {
        let w = Wave::new(193.0, Direction::Forward, 0.2, WaveRole::Signal).unwrap();
        assert_relative_eq!(w.attenuation_np_km, 0.2 * 10f64.ln() / 10.0);
    }

    #[test]
    fn standard_cband_layout() {
        let set = WaveSet::standard_cband(&FiberSpec::default()).unwrap();
        assert_eq!(set.len(), 48);
        let signals = set.signal_indices();
        assert_eq!(signals, (0..40).collect::<Vec<_>>());
        assert_relative_eq!(set.waves()[0].frequency_thz, 192.0);
        assert_relative_eq!(set.waves()[39].frequency_thz, 195.9, max_relative = 1e-12);
        let pumps = set.pump_indices();
        assert_eq!(pumps, (40..48).collect::<Vec<_>>());
        // co-pumps forward, counter-pumps backward
        for k in 0..4 {
            assert_eq!(set.waves()[40 + k].direction, Direction::Forward);
            assert_eq!(set.waves()[44 + k].direction, Direction::Backward);
        }
        // 1366 nm pumps are second-order with the higher attenuation
        assert_eq!(set.waves()[40].role, WaveRole::PumpSecondOrder);
        assert_relative_eq!(set.waves()[40].attenuation_np_km, 0.32 * DB_TO_NEPER);
        assert_eq!(set.waves()[41].role, WaveRole::PumpFirstOrder);
        assert_relative_eq!(set.waves()[41].attenuation_np_km, 0.25 * DB_TO_NEPER);
    }

    #[test]
    fn pump_config_validation() {
        assert!(PumpConfig::new([1.0; 8]).is_ok());
        assert!(PumpConfig::new([1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(PumpConfig::from_slice(&[1.0; 7]).is_err());
        let p = PumpConfig::new([200.0, 5.0, 5.0, 5.0, 200.0, 5.0, 5.0, 5.0]).unwrap();
        assert!(p.within_standard_ranges());
        let p = PumpConfig::new([1300.0, 5.0, 5.0, 5.0, 200.0, 5.0, 5.0, 5.0]).unwrap();
        assert!(!p.within_standard_ranges());
    }

    #[test]
    fn rhs_attenuation_only_with_single_wave() {
        let fiber = FiberSpec::default();
        let waves = WaveSet::new(vec![
            Wave::new(193.4, Direction::Forward, fiber.alpha_signal_db_km, WaveRole::Signal).unwrap(),
        ])
        .unwrap();
        let c = Coupling::new(&waves, &RamanGain::default());
        let p = 1e-3;
        let d = c.derivatives(&[p]).unwrap();
        assert_relative_eq!(d[0], -0.2 * DB_TO_NEPER * p, max_relative = 1e-14);
    }

    #[test]
    fn rhs_pure_attenuation_beyond_cutoff() {
        // two waves separated by more than the 15 THz cutoff: no coupling
        let waves = WaveSet::new(vec![
            Wave::new(192.0, Direction::Forward, 0.2, WaveRole::Signal).unwrap(),
            Wave::new(219.0, Direction::Forward, 0.32, WaveRole::PumpSecondOrder).unwrap(),
        ])
        .unwrap();
        let c = Coupling::new(&waves, &RamanGain::default());
        let d = c.derivatives(&[2e-3, 2e-3]).unwrap();
        assert_relative_eq!(d[0], -0.2 * DB_TO_NEPER * 2e-3, max_relative = 1e-14);
        assert_relative_eq!(d[1], -0.32 * DB_TO_NEPER * 2e-3, max_relative = 1e-14);
    }

    #[test]
    fn rhs_conserves_photon_flux_without_attenuation() {
        // With α = 0 and all waves forward, Σ dP_i/dz / f_i must vanish
        // identically: the (f_i/f_j) depletion factor makes photon exchange
        // antisymmetric pair by pair.
        let alpha_tiny = 1e-30; // Wave requires positive attenuation
        let freqs = [193.0, 200.0, 206.0, 210.5];
        let waves = WaveSet::new(
            freqs
                .iter()
                .map(|&f| Wave::new(f, Direction::Forward, alpha_tiny, WaveRole::Signal).unwrap())
                .collect(),
        )
        .unwrap();
        let c = Coupling::new(&waves, &RamanGain::default());
        let powers = [0.5, 0.2, 0.8, 1.1];
        let d = c.derivatives(&powers).unwrap();
        let flux: f64 = d.iter().zip(freqs.iter()).map(|(di, fi)| di / fi).sum();
        let scale: f64 = d.iter().zip(freqs.iter()).map(|(di, fi)| (di / fi).abs()).sum();
        assert!(flux.abs() < 1e-15 * scale.max(1.0), "flux drift {flux}");
    }

    #[test]
    fn rhs_pairwise_exchange_antisymmetry() {
        // power j gives to i equals (f_j/f_i) times what i drains from j
        let g = RamanGain::default();
        let (fi, fj) = (193.0, 206.0);
        let waves = WaveSet::new(vec![
            Wave::new(fi, Direction::Forward, 1e-30, WaveRole::Signal).unwrap(),
            Wave::new(fj, Direction::Forward, 1e-30, WaveRole::PumpFirstOrder).unwrap(),
        ])
        .unwrap();
        let c = Coupling::new(&waves, &g);
        let (pi, pj) = (0.3, 0.7);
        let d = c.derivatives(&[pi, pj]).unwrap();
        // gain of i: g(Δf)·P_i·P_j; drain of j: (f_j/f_i)·g(Δf)·P_i·P_j... in
        // photon units d_i/f_i = -d_j/f_j
        assert_relative_eq!(d[0] / fi, -d[1] / fj, max_relative = 1e-12);
        assert_relative_eq!(d[0], g.efficiency(fj - fi) * pi * pj, max_relative = 1e-12);
    }

    #[test]
    fn rhs_is_degree_one_in_each_power() {
        // every term of dP_i/dz contains P_i exactly once: doubling P_i with
        // the others fixed doubles the P_i-linear part
        let waves = WaveSet::new(vec![
            Wave::new(193.0, Direction::Forward, 0.2, WaveRole::Signal).unwrap(),
            Wave::new(206.0, Direction::Forward, 0.25, WaveRole::PumpFirstOrder).unwrap(),
        ])
        .unwrap();
        let c = Coupling::new(&waves, &RamanGain::default());
        let d1 = c.derivatives(&[0.4, 0.9]).unwrap();
        let d2 = c.derivatives(&[0.8, 0.9]).unwrap();
        assert_relative_eq!(d2[0], 2.0 * d1[0], max_relative = 1e-12);
    }

    #[test]
    fn rhs_rejects_bad_inputs() {
        let waves = WaveSet::new(vec![
            Wave::new(193.0, Direction::Forward, 0.2, WaveRole::Signal).unwrap(),
        ])
        .unwrap();
        let c = Coupling::new(&waves, &RamanGain::default());
        assert!(c.derivatives(&[-1.0]).is_err());
        assert!(c.derivatives(&[f64::NAN]).is_err());
        assert!(c.derivatives(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn backward_wave_attenuates_toward_receiver() {
        // counter-propagating wave under pure attenuation: dP/dz = +αP in the
        // fixed z coordinate (power grows toward its launch point at z = L)
        let waves = WaveSet::new(vec![
            Wave::new(206.0, Direction::Backward, 0.25, WaveRole::PumpFirstOrder).unwrap(),
        ])
        .unwrap();
        let c = Coupling::new(&waves, &RamanGain::default());
        let d = c.derivatives(&[0.1]).unwrap();
        assert_relative_eq!(d[0], 0.25 * DB_TO_NEPER * 0.1, max_relative = 1e-14);
    }
}
