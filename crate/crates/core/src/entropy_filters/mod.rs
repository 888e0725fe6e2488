//! Region filters that reject gaze regions unlikely to bound an action:
//! an edge-density ratio from a Canny edge map and a skin-colour hand score.

mod canny;
mod skin;

pub use canny::{canny, edge_ratio, CannyConfig, EdgeMap};
pub use skin::{bayes_posterior, hand_score, skin_map, skin_posterior, train_skin_model, SkinModel};
