use std::collections::BTreeSet;

use super::{mrmr_rank, rfe_rank, FeatureSubset, SelectionMethod};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::forest::ForestConfig;

pub const DEFAULT_IRM_TOP_N: usize = 25;

/// Outcome of the intersection selector, with both source rankings kept for
/// reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct IrmSelection {
    pub subset: FeatureSubset,
    pub rfe: FeatureSubset,
    pub mrmr: FeatureSubset,
}

impl IrmSelection {
    /// True when the two rankings share no feature.
    pub fn is_empty_intersection(&self) -> bool {
        self.subset.is_empty()
    }
}

/// Intersection of the top-`top_n` RFE and mRMR features, ascending by index.
pub fn irm_select(
    data: &Dataset,
    top_n: usize,
    forest_config: &ForestConfig,
    num_bins: usize,
) -> Result<IrmSelection> {
    let k = data.n_features();
    if top_n == 0 || top_n > k {
        return Err(Error::invalid(format!("top_n must be in 1..={k}, got {top_n}")));
    }
    let rfe = rfe_rank(data, top_n, forest_config)?;
    let mrmr = mrmr_rank(data, top_n, num_bins)?;
    let subset = intersect(&rfe, &mrmr, k)?;
    if subset.is_empty() {
        log::warn!("IRM: top-{top_n} RFE and mRMR rankings do not overlap");
    }
    Ok(IrmSelection { subset, rfe, mrmr })
}

pub(crate) fn intersect(a: &FeatureSubset, b: &FeatureSubset, k: usize) -> Result<FeatureSubset> {
    let left: BTreeSet<usize> = a.indices().iter().copied().collect();
    let right: BTreeSet<usize> = b.indices().iter().copied().collect();
    let indices = left.intersection(&right).copied().collect();
    FeatureSubset::new(indices, SelectionMethod::Irm, None, k)
}
