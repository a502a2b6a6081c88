use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::map::DispersionMap;
use super::sampling::{substream, CHUNK};

/// FWHM of a Gaussian over its standard deviation.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

fn default_jitter() -> f64 {
    80.0
}
fn default_efficiency() -> f64 {
    0.7
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    #[serde(default = "default_jitter")]
    pub jitter_fwhm_ps: f64,
    #[serde(default = "default_efficiency")]
    pub efficiency: f64,
    /// Mean number of uncorrelated clicks per trigger gate.
    #[serde(default)]
    pub accidental_rate: f64,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self { jitter_fwhm_ps: default_jitter(), efficiency: default_efficiency(), accidental_rate: 0.0 }
    }
}

impl DetectorSpec {
    /// Noise-free, lossless detector.
    pub fn ideal() -> Self {
        Self { jitter_fwhm_ps: 0.0, efficiency: 1.0, accidental_rate: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_fwhm_ps >= 0.0 && self.jitter_fwhm_ps.is_finite()) {
            return Err(Error::InvalidArgument(format!("jitter {} ps must be nonnegative", self.jitter_fwhm_ps)));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidArgument(format!("efficiency {} outside [0, 1]", self.efficiency)));
        }
        if !(self.accidental_rate >= 0.0 && self.accidental_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "accidental rate {} must be nonnegative",
                self.accidental_rate
            )));
        }
        Ok(())
    }

    pub fn jitter_sigma_ns(&self) -> f64 {
        1e-3 * self.jitter_fwhm_ps / FWHM_PER_SIGMA
    }
}

/// One trigger gate; a missing time means no click on that channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub trigger: u64,
    pub t1_ns: Option<f64>,
    pub t2_ns: Option<f64>,
}

impl EventRecord {
    pub fn coincidence(&self) -> Option<(f64, f64)> {
        Some((self.t1_ns?, self.t2_ns?))
    }
}

/// Time-tagged records in trigger order. Gates without any click are not
/// stored; `triggers` counts all gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventBatch {
    pub records: Vec<EventRecord>,
    pub triggers: u64,
    pub seed: u64,
    pub config_hash: Option<String>,
}

impl EventBatch {
    pub fn coincidences(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.records.iter().filter_map(EventRecord::coincidence)
    }

    pub fn coincidence_count(&self) -> usize {
        self.coincidences().count()
    }

    /// Channels exchanged.
    pub fn mirrored(&self) -> Self {
        let records = self.records.iter().map(|r| EventRecord { t1_ns: r.t2_ns, t2_ns: r.t1_ns, ..*r }).collect();
        Self { records, ..self.clone() }
    }
}

/// One fiber and one detector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    #[serde(default)]
    pub map: DispersionMap,
    #[serde(default)]
    pub detector: DetectorSpec,
}

impl Channel {
    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        self.detector.validate()
    }
}

/// Checks that every in-band arrival time fits inside `[0, period)`.
pub fn check_gate(map: &DispersionMap, period_ns: f64) -> Result<()> {
    if !(period_ns > 0.0 && period_ns.is_finite()) {
        return Err(Error::InvalidArgument(format!("trigger period {period_ns} ns must be positive")));
    }
    let (lo, hi) = map.time_range();
    if hi - lo >= period_ns {
        return Err(Error::Wraparound { period_ns, span_ns: hi - lo });
    }
    if lo < 0.0 || hi >= period_ns {
        return Err(Error::InvalidArgument(format!(
            "offset places arrival times [{lo:.4}, {hi:.4}] ns outside the {period_ns} ns gate"
        )));
    }
    Ok(())
}

struct ChannelSampler {
    jitter: Option<Normal<f64>>,
    efficiency: f64,
    accidentals: Option<Poisson<f64>>,
}

impl ChannelSampler {
    fn new(d: &DetectorSpec) -> Result<Self> {
        let sigma = d.jitter_sigma_ns();
        let jitter = (sigma > 0.0)
            .then(|| Normal::new(0.0, sigma))
            .transpose()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let accidentals = (d.accidental_rate > 0.0)
            .then(|| Poisson::new(d.accidental_rate))
            .transpose()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { jitter, efficiency: d.efficiency, accidentals })
    }

    /// Earliest click in the gate: the photon (if detected) or an accidental.
    fn click(&self, rng: &mut impl Rng, t_photon: f64, period: f64) -> Option<f64> {
        // fixed draw order keeps batches reproducible
        let detected = rng.random::<f64>() < self.efficiency;
        let noise = self.jitter.map_or(0.0, |n| n.sample(rng));
        let mut t = detected.then_some(t_photon + noise);
        if let Some(p) = &self.accidentals {
            let k = p.sample(rng) as u64;
            for _ in 0..k {
                let a = rng.random::<f64>() * period;
                t = Some(t.map_or(a, |x: f64| x.min(a)));
            }
        }
        t
    }
}

/// One trigger per pair: map each frequency to an arrival time, add
/// Gaussian jitter, drop photons with probability 1 − efficiency and add
/// Poisson accidentals uniform in the gate.
pub fn simulate_events(
    pairs: &[(f64, f64)],
    channels: [&Channel; 2],
    trigger_period_ns: f64,
    seed: u64,
) -> Result<EventBatch> {
    for c in channels {
        c.validate()?;
        check_gate(&c.map, trigger_period_ns)?;
    }
    let samplers = [ChannelSampler::new(&channels[0].detector)?, ChannelSampler::new(&channels[1].detector)?];
    let chunks: Vec<Vec<EventRecord>> = pairs
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(k, chunk)| {
            let mut rng = substream(seed, 1, k);
            let mut out = Vec::with_capacity(chunk.len());
            for (m, &(nu1, nu2)) in chunk.iter().enumerate() {
                let t1 = channels[0].map.freq_to_arrival_time(nu1)?;
                let t2 = channels[1].map.freq_to_arrival_time(nu2)?;
                let r = EventRecord {
                    trigger: (k * CHUNK + m) as u64,
                    t1_ns: samplers[0].click(&mut rng, t1, trigger_period_ns),
                    t2_ns: samplers[1].click(&mut rng, t2, trigger_period_ns),
                };
                if r.t1_ns.is_some() || r.t2_ns.is_some() {
                    out.push(r);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(EventBatch { records: chunks.concat(), triggers: pairs.len() as u64, seed, config_hash: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::SPEED_OF_LIGHT_NM_THZ;

    fn pairs(n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let x = (k % 97) as f64 / 97.0;
                (SPEED_OF_LIGHT_NM_THZ / (1570.0 + 20.0 * x), SPEED_OF_LIGHT_NM_THZ / (1598.0 - 20.0 * x))
            })
            .collect()
    }

    fn channel(d: DetectorSpec) -> Channel {
        Channel { map: DispersionMap::default(), detector: d }
    }

    #[test]
    fn ideal_detectors_invert_exactly() {
        let p = pairs(1000);
        let c = channel(DetectorSpec::ideal());
        let b = simulate_events(&p, [&c, &c], super::super::map::TRIGGER_PERIOD_NS, 1).unwrap();
        assert_eq!(b.records.len(), 1000);
        for (r, &(nu1, nu2)) in b.records.iter().zip(&p) {
            let (t1, t2) = r.coincidence().unwrap();
            assert!((c.map.invert_time_to_freq(t1).unwrap() - nu1).abs() < 1e-9);
            assert!((c.map.invert_time_to_freq(t2).unwrap() - nu2).abs() < 1e-9);
        }
    }

    #[test]
    fn half_efficiency_gives_quarter_coincidences() {
        let n = 100_000;
        let c = channel(DetectorSpec { efficiency: 0.5, ..DetectorSpec::ideal() });
        let b = simulate_events(&pairs(n), [&c, &c], super::super::map::TRIGGER_PERIOD_NS, 9).unwrap();
        let k = b.coincidence_count() as f64;
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        assert!((k - 0.25 * n as f64).abs() < 4.0 * sigma, "{k}");
    }

    #[test]
    fn short_period_wraps() {
        let c = channel(DetectorSpec::ideal());
        let r = simulate_events(&pairs(10), [&c, &c], 5.0, 1);
        assert!(matches!(r, Err(Error::Wraparound { .. })));
        assert!(check_gate(&c.map, super::super::map::TRIGGER_PERIOD_NS).is_ok());
    }

    #[test]
    fn accidentals_fill_empty_gates() {
        let c = channel(DetectorSpec { efficiency: 0.0, accidental_rate: 0.2, ..DetectorSpec::ideal() });
        let b = simulate_events(&pairs(20_000), [&c, &c], super::super::map::TRIGGER_PERIOD_NS, 5).unwrap();
        let clicks = b.records.iter().filter(|r| r.t1_ns.is_some()).count() as f64;
        // P(at least one) = 1 − e^{−0.2}
        let expected = 20_000.0 * (1.0 - (-0.2f64).exp());
        assert!((clicks - expected).abs() < 4.0 * expected.sqrt());
        assert!(b.records.iter().filter_map(|r| r.t1_ns).all(|t| (0.0..13.2).contains(&t)));
    }

    #[test]
    fn reproducible_from_seed() {
        let c = channel(DetectorSpec::default());
        let p = pairs(150_000);
        let a = simulate_events(&p, [&c, &c], super::super::map::TRIGGER_PERIOD_NS, 77).unwrap();
        let b = simulate_events(&p, [&c, &c], super::super::map::TRIGGER_PERIOD_NS, 77).unwrap();
        assert_eq!(a, b);
        let m = a.mirrored();
        assert_eq!(m.records[0].t1_ns, a.records[0].t2_ns);
    }
}
