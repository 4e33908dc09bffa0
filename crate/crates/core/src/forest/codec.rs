//! Versioned binary encoding of a forest model.
//!
//! All integers are little-endian. Layout:
//!
//! ```text
//! magic        8 bytes  "IIDSRFM\0"
//! version      u32      MODEL_FORMAT_VERSION
//! num_trees    u32
//! max_depth    u32      0 = unlimited
//! min_leaf     u32
//! fps_kind     u8       0 = sqrt, 1 = all, 2 = explicit count
//! fps_count    u32
//! boot_kind    u8       0 = standard, 1 = balanced, 2 = disabled
//! boot_count   u32      balanced per-class count, 0 = minority count
//! seed         u64
//! n_classes    u32, then per class:   len u32, UTF-8 bytes
//! n_features   u32, then per feature: len u32, UTF-8 bytes
//! importances  n_features × f64
//! has_scaler   u8, then if 1: n_features × (mean f64, stddev f64)
//! tree_count   u32, then per tree:
//!   n_nodes    u32, then per node:
//!     kind     u8       0 = leaf, 1 = internal
//!     leaf:     n_classes × u64 class counts
//!     internal: feature u32, threshold f64, left u32, right u32
//! checksum     u64      FNV-1a over every preceding byte
//! ```
//!
//! Child offsets index the tree's own node array and always point forward.

use super::{BootstrapMode, FeaturesPerSplit, ForestConfig, ForestModel, Tree, TreeNode};
use crate::data::ScalerParams;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"IIDSRFM\0";

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        let v = u32::try_from(v).expect("model dimension fits in u32");
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u32(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::CorruptModel("unexpected end of data".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn str(&mut self) -> Result<String> {
        let len = self.u32()?;
        String::from_utf8(self.take(len)?.to_vec())
            .map_err(|_| Error::CorruptModel("name is not valid UTF-8".into()))
    }
    /// Element count, sanity-checked against the bytes left.
    fn count(&mut self, min_elem_size: usize) -> Result<usize> {
        let n = self.u32()?;
        if n.saturating_mul(min_elem_size) > self.bytes.len() - self.pos {
            return Err(Error::CorruptModel(format!("implausible element count {n}")));
        }
        Ok(n)
    }
}

pub fn encode_model(model: &ForestModel, scaler: Option<&ScalerParams>) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u32(MODEL_FORMAT_VERSION as usize);

    let c = &model.config;
    w.u32(c.num_trees);
    w.u32(c.max_depth.unwrap_or(0));
    w.u32(c.min_samples_leaf);
    match c.features_per_split {
        FeaturesPerSplit::Sqrt => (w.u8(0), w.u32(0)),
        FeaturesPerSplit::All => (w.u8(1), w.u32(0)),
        FeaturesPerSplit::Count(n) => (w.u8(2), w.u32(n)),
    };
    match c.bootstrap {
        BootstrapMode::Standard => (w.u8(0), w.u32(0)),
        BootstrapMode::Balanced { per_class } => (w.u8(1), w.u32(per_class.unwrap_or(0))),
        BootstrapMode::Disabled => (w.u8(2), w.u32(0)),
    };
    w.u64(c.seed);

    w.u32(model.class_names.len());
    model.class_names.iter().for_each(|s| w.str(s));
    w.u32(model.feature_names.len());
    model.feature_names.iter().for_each(|s| w.str(s));
    model.importances.iter().for_each(|&v| w.f64(v));

    match scaler {
        Some(s) => {
            w.u8(1);
            for (&m, &sd) in s.means.iter().zip(&s.stddevs) {
                w.f64(m);
                w.f64(sd);
            }
        }
        None => w.u8(0),
    }

    w.u32(model.trees.len());
    for tree in &model.trees {
        w.u32(tree.nodes().len());
        for node in tree.nodes() {
            match node {
                TreeNode::Leaf { class_counts } => {
                    w.u8(0);
                    class_counts.iter().for_each(|&n| w.u64(n));
                }
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    w.u8(1);
                    w.u32(*feature);
                    w.f64(*threshold);
                    w.u32(*left);
                    w.u32(*right);
                }
            }
        }
    }
    let checksum = fnv1a(&w.0);
    w.u64(checksum);
    w.0
}

pub fn decode_model(bytes: &[u8]) -> Result<(ForestModel, Option<ScalerParams>)> {
    if bytes.len() < MAGIC.len() + 4 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::CorruptModel("missing model header".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    if bytes.len() < 20 {
        return Err(Error::CorruptModel("file truncated".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    if fnv1a(body) != u64::from_le_bytes(tail.try_into().unwrap()) {
        return Err(Error::CorruptModel("checksum mismatch (truncated or damaged file)".into()));
    }

    let mut r = Reader { bytes: body, pos: 12 };
    let num_trees = r.u32()?;
    let max_depth = match r.u32()? {
        0 => None,
        d => Some(d),
    };
    let min_samples_leaf = r.u32()?;
    let features_per_split = match (r.u8()?, r.u32()?) {
        (0, _) => FeaturesPerSplit::Sqrt,
        (1, _) => FeaturesPerSplit::All,
        (2, n) => FeaturesPerSplit::Count(n),
        (t, _) => return Err(Error::CorruptModel(format!("unknown features_per_split tag {t}"))),
    };
    let bootstrap = match (r.u8()?, r.u32()?) {
        (0, _) => BootstrapMode::Standard,
        (1, 0) => BootstrapMode::Balanced { per_class: None },
        (1, n) => BootstrapMode::Balanced { per_class: Some(n) },
        (2, _) => BootstrapMode::Disabled,
        (t, _) => return Err(Error::CorruptModel(format!("unknown bootstrap tag {t}"))),
    };
    let seed = r.u64()?;
    let config = ForestConfig {
        num_trees,
        max_depth,
        min_samples_leaf,
        features_per_split,
        bootstrap,
        seed,
    };

    let n_classes = r.count(4)?;
    let class_names = (0..n_classes).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    let n_features = r.count(4)?;
    let feature_names = (0..n_features).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    let importances = (0..n_features).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;

    let scaler = match r.u8()? {
        0 => None,
        1 => {
            let mut means = Vec::with_capacity(n_features);
            let mut stddevs = Vec::with_capacity(n_features);
            for _ in 0..n_features {
                means.push(r.f64()?);
                stddevs.push(r.f64()?);
            }
            Some(ScalerParams { means, stddevs })
        }
        t => return Err(Error::CorruptModel(format!("unknown scaler tag {t}"))),
    };

    let tree_count = r.count(5)?;
    let mut trees = Vec::with_capacity(tree_count);
    for _ in 0..tree_count {
        let n_nodes = r.count(1)?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let node = match r.u8()? {
                0 => TreeNode::Leaf {
                    class_counts: (0..n_classes).map(|_| r.u64()).collect::<Result<_>>()?,
                },
                1 => {
                    let feature = r.u32()?;
                    let threshold = r.f64()?;
                    let left = r.u32()?;
                    let right = r.u32()?;
                    if feature >= n_features {
                        return Err(Error::CorruptModel(format!("feature index {feature} out of range")));
                    }
                    TreeNode::Internal {
                        feature,
                        threshold,
                        left,
                        right,
                    }
                }
                t => return Err(Error::CorruptModel(format!("unknown node tag {t}"))),
            };
            nodes.push(node);
        }
        trees.push(Tree::from_nodes(nodes).map_err(|e| Error::CorruptModel(e.to_string()))?);
    }
    if r.pos != body.len() {
        return Err(Error::CorruptModel("trailing bytes after tree data".into()));
    }
    if trees.len() != num_trees {
        return Err(Error::CorruptModel(format!(
            "header declares {num_trees} trees but {} are stored",
            trees.len()
        )));
    }
    Ok((
        ForestModel {
            trees,
            config,
            class_names,
            feature_names,
            importances,
        },
        scaler,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model() -> ForestModel {
        let tree = Tree::from_nodes(vec![
            TreeNode::Internal {
                feature: 1,
                threshold: 0.25,
                left: 1,
                right: 2,
            },
            TreeNode::Leaf {
                class_counts: vec![3, 0, 1],
            },
            TreeNode::Leaf {
                class_counts: vec![0, 4, 0],
            },
        ])
        .unwrap();
        ForestModel {
            trees: vec![tree],
            config: ForestConfig {
                num_trees: 1,
                max_depth: Some(7),
                min_samples_leaf: 2,
                features_per_split: FeaturesPerSplit::Count(2),
                bootstrap: BootstrapMode::Balanced { per_class: Some(9) },
                seed: u64::MAX,
            },
            class_names: vec!["a".into(), "b".into(), "ç".into()],
            feature_names: vec!["x".into(), "y".into()],
            importances: vec![0.0, 1.0],
        }
    }

    #[test]
    fn round_trip_with_scaler() {
        let m = tiny_model();
        let s = ScalerParams {
            means: vec![1.5, -2.0],
            stddevs: vec![0.0, 3.25],
        };
        let (back, scaler) = decode_model(&encode_model(&m, Some(&s))).unwrap();
        assert_eq!(back, m);
        assert_eq!(scaler, Some(s));
        let (_, none) = decode_model(&encode_model(&m, None)).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn truncation_and_damage_detected() {
        let bytes = encode_model(&tiny_model(), None);
        for cut in [0, 5, 12, 30, bytes.len() - 1] {
            assert!(matches!(
                decode_model(&bytes[..cut]),
                Err(Error::CorruptModel(_))
            ));
        }
        let mut flipped = bytes.clone();
        flipped[40] ^= 0xff;
        assert!(matches!(decode_model(&flipped), Err(Error::CorruptModel(_))));
    }

    #[test]
    fn version_mismatch() {
        let mut bytes = encode_model(&tiny_model(), None);
        bytes[8] = 9;
        assert!(matches!(
            decode_model(&bytes),
            Err(Error::UnsupportedVersion { found: 9, .. })
        ));
    }
}
