use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaze_region::GazeRegion;
use crate::plane::Plane;

/// Two-class (skin / non-skin) colour model over a 2-D UV histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkinModel {
    pub bins_per_axis: usize,
    pub prior_skin: f64,
    /// Row-major counts indexed by `u_bin * bins_per_axis + v_bin`.
    pub skin_hist: Vec<u64>,
    pub nonskin_hist: Vec<u64>,
    /// Pseudo-count added to every bin when computing likelihoods.
    #[serde(default = "default_laplace")]
    pub laplace: f64,
}

fn default_laplace() -> f64 {
    1.0
}

pub fn train_skin_model(
    skin: &[(u8, u8)],
    nonskin: &[(u8, u8)],
    bins_per_axis: usize,
    prior_skin: f64,
) -> Result<SkinModel> {
    if skin.is_empty() {
        return Err(Error::EmptySamples("skin"));
    }
    if nonskin.is_empty() {
        return Err(Error::EmptySamples("non-skin"));
    }
    let mut model = SkinModel {
        bins_per_axis,
        prior_skin,
        skin_hist: vec![0; bins_per_axis * bins_per_axis],
        nonskin_hist: vec![0; bins_per_axis * bins_per_axis],
        laplace: default_laplace(),
    };
    model.validate()?;
    for &(u, v) in skin {
        let b = model.bin(u, v);
        model.skin_hist[b] += 1;
    }
    for &(u, v) in nonskin {
        let b = model.bin(u, v);
        model.nonskin_hist[b] += 1;
    }
    Ok(model)
}

impl SkinModel {
    pub fn validate(&self) -> Result<()> {
        if !(2..=256).contains(&self.bins_per_axis) {
            return Err(Error::Config(format!(
                "bins_per_axis must be in 2..=256, got {}",
                self.bins_per_axis
            )));
        }
        if !(self.prior_skin > 0.0 && self.prior_skin < 1.0) {
            return Err(Error::Config(format!(
                "prior_skin must be in (0, 1), got {}",
                self.prior_skin
            )));
        }
        let cells = self.bins_per_axis * self.bins_per_axis;
        if self.skin_hist.len() != cells || self.nonskin_hist.len() != cells {
            return Err(Error::Config(format!(
                "histograms must have {cells} cells for {} bins per axis",
                self.bins_per_axis
            )));
        }
        if !(self.laplace >= 0.0 && self.laplace.is_finite()) {
            return Err(Error::Config("laplace pseudo-count must be >= 0".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: SkinModel =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("skin model: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("skin model serialises")
    }

    /// Histogram cell of a UV pair; each axis bin is `256 / bins_per_axis` wide.
    pub fn bin(&self, u: u8, v: u8) -> usize {
        let b = self.bins_per_axis;
        let ub = usize::from(u) * b / 256;
        let vb = usize::from(v) * b / 256;
        ub * b + vb
    }

    fn likelihood(&self, hist: &[u64], cell: usize) -> f64 {
        let total: u64 = hist.iter().sum();
        let denom = total as f64 + self.laplace * hist.len() as f64;
        if denom == 0.0 {
            return 0.0;
        }
        (hist[cell] as f64 + self.laplace) / denom
    }

    /// `(L_skin, L_nonskin)` for the cell containing `(u, v)`.
    pub fn likelihoods(&self, u: u8, v: u8) -> (f64, f64) {
        let cell = self.bin(u, v);
        (
            self.likelihood(&self.skin_hist, cell),
            self.likelihood(&self.nonskin_hist, cell),
        )
    }

    pub fn nonskin_posterior(&self, u: u8, v: u8) -> f64 {
        let (ls, ln) = self.likelihoods(u, v);
        bayes_posterior(ln, ls, 1.0 - self.prior_skin)
    }

    /// Posterior per histogram cell, for scoring many pixels.
    pub fn posterior_table(&self) -> Vec<f64> {
        let skin_total: u64 = self.skin_hist.iter().sum();
        let nonskin_total: u64 = self.nonskin_hist.iter().sum();
        let cells = self.skin_hist.len() as f64;
        let ds = skin_total as f64 + self.laplace * cells;
        let dn = nonskin_total as f64 + self.laplace * cells;
        self.skin_hist
            .iter()
            .zip(&self.nonskin_hist)
            .map(|(&s, &n)| {
                let ls = if ds == 0.0 { 0.0 } else { (s as f64 + self.laplace) / ds };
                let ln = if dn == 0.0 { 0.0 } else { (n as f64 + self.laplace) / dn };
                bayes_posterior(ls, ln, self.prior_skin)
            })
            .collect()
    }
}

/// Two-class Bayes rule. When both likelihoods vanish the prior is returned.
pub fn bayes_posterior(likelihood: f64, other_likelihood: f64, prior: f64) -> f64 {
    let a = likelihood * prior;
    let b = other_likelihood * (1.0 - prior);
    if a + b == 0.0 {
        prior
    } else {
        a / (a + b)
    }
}

pub fn skin_posterior(u: u8, v: u8, model: &SkinModel) -> f64 {
    let (ls, ln) = model.likelihoods(u, v);
    bayes_posterior(ls, ln, model.prior_skin)
}

/// Per-pixel skin posterior over a region.
pub fn skin_map(region: &GazeRegion, model: &SkinModel) -> Plane<f64> {
    let table = model.posterior_table();
    Plane::from_vec(
        region.u.width(),
        region.u.height(),
        region
            .u
            .as_slice()
            .iter()
            .zip(region.v.as_slice())
            .map(|(&u, &v)| table[model.bin(u, v)])
            .collect(),
    )
}

/// Mean skin posterior over the region's pixels.
pub fn hand_score(region: &GazeRegion, model: &SkinModel) -> f64 {
    let map = skin_map(region, model);
    map.as_slice().iter().sum::<f64>() / map.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaze_region::REGION_SIZE;
    use proptest::prelude::*;

    fn region(u: impl Fn(usize, usize) -> u8, v: impl Fn(usize, usize) -> u8) -> GazeRegion {
        GazeRegion {
            frame_index: 0,
            origin_x: 0,
            origin_y: 0,
            y: Plane::filled(REGION_SIZE, REGION_SIZE, 128),
            u: Plane::from_fn(REGION_SIZE, REGION_SIZE, u),
            v: Plane::from_fn(REGION_SIZE, REGION_SIZE, v),
        }
    }

    #[test]
    fn training_accumulates_counts() {
        let skin = vec![(100u8, 150u8); 100];
        let m = train_skin_model(&skin, &[(10, 10)], 32, 0.5).unwrap();
        assert_eq!(m.skin_hist[12 * 32 + 18], 100);
        assert_eq!(m.skin_hist.iter().sum::<u64>(), 100);
        assert_eq!(m.nonskin_hist.iter().sum::<u64>(), 1);
    }

    #[test]
    fn empty_training_set_rejected() {
        assert!(matches!(
            train_skin_model(&[], &[(1, 1)], 32, 0.5),
            Err(Error::EmptySamples("skin"))
        ));
        assert!(train_skin_model(&[(1, 1)], &[], 32, 0.5).is_err());
        assert!(train_skin_model(&[(1, 1)], &[(1, 1)], 1, 0.5).is_err());
        assert!(train_skin_model(&[(1, 1)], &[(1, 1)], 32, 1.0).is_err());
    }

    #[test]
    fn identical_classes_give_prior() {
        let px: Vec<(u8, u8)> = (0..200).map(|i| ((i * 7 % 256) as u8, (i * 13 % 256) as u8)).collect();
        let m = train_skin_model(&px, &px, 32, 0.3).unwrap();
        for (u, v) in [(0, 0), (7, 13), (200, 100)] {
            assert!((skin_posterior(u, v, &m) - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn bayes_examples() {
        assert_eq!(bayes_posterior(0.01, 0.01, 0.5), 0.5);
        assert!((bayes_posterior(0.02, 0.01, 0.5) - 2.0 / 3.0).abs() < 1e-15);
        // only skin ever seen in the cell: close to 1 but bounded by smoothing
        let m = train_skin_model(&vec![(100, 150); 1000], &vec![(10, 10); 1000], 32, 0.5).unwrap();
        let p = skin_posterior(100, 150, &m);
        assert!(p > 0.99 && p < 1.0, "{p}");
    }

    #[test]
    fn hand_score_is_mean_posterior() {
        let m = train_skin_model(&vec![(100, 150); 1000], &vec![(10, 10); 1000], 32, 0.5).unwrap();
        let table = m.posterior_table();
        let p_skin = table[m.bin(100, 150)];
        let p_bg = table[m.bin(10, 10)];
        let r = region(|x, _| if x < 28 { 100 } else { 10 }, |x, _| if x < 28 { 150 } else { 10 });
        let expected = 0.5 * p_skin + 0.5 * p_bg;
        assert!((hand_score(&r, &m) - expected).abs() < 1e-12);

        // laplace disabled: posteriors are exactly 1 and 0
        let exact = SkinModel { laplace: 0.0, ..m };
        assert_eq!(hand_score(&region(|_, _| 100, |_, _| 150), &exact), 1.0);
        assert_eq!(hand_score(&region(|_, _| 10, |_, _| 10), &exact), 0.0);
        let half = hand_score(&r, &exact);
        assert_eq!(half, 0.5);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = train_skin_model(&[(1, 2), (3, 4)], &[(200, 200)], 16, 0.4).unwrap();
        assert_eq!(SkinModel::from_json(&m.to_json()).unwrap(), m);
        let bad = SkinModel { skin_hist: vec![0; 3], ..m };
        assert!(SkinModel::from_json(&serde_json::to_string(&bad).unwrap()).is_err());
    }

    fn arb_model() -> impl Strategy<Value = SkinModel> {
        (
            proptest::collection::vec(0u64..50, 64),
            proptest::collection::vec(0u64..50, 64),
            0.01f64..0.99,
        )
            .prop_map(|(s, n, prior)| SkinModel {
                bins_per_axis: 8,
                prior_skin: prior,
                skin_hist: s,
                nonskin_hist: n,
                laplace: 1.0,
            })
    }

    proptest! {
        #[test]
        fn posteriors_complement(m in arb_model(), u in any::<u8>(), v in any::<u8>()) {
            let p = skin_posterior(u, v, &m);
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((p + m.nonskin_posterior(u, v) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn more_skin_never_lowers_posterior(m in arb_model(), u in any::<u8>(), v in any::<u8>(), extra in 1u64..100) {
            let before = skin_posterior(u, v, &m);
            let mut more = m.clone();
            let cell = more.bin(u, v);
            more.skin_hist[cell] += extra;
            prop_assert!(skin_posterior(u, v, &more) >= before - 1e-15);
        }

        #[test]
        fn scaling_counts_is_neutral_without_smoothing(m in arb_model(), k in 2u64..10, u in any::<u8>(), v in any::<u8>()) {
            let base = SkinModel { laplace: 0.0, ..m };
            let scaled = SkinModel {
                skin_hist: base.skin_hist.iter().map(|c| c * k).collect(),
                nonskin_hist: base.nonskin_hist.iter().map(|c| c * k).collect(),
                ..base.clone()
            };
            let (a, b) = (skin_posterior(u, v, &base), skin_posterior(u, v, &scaled));
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
