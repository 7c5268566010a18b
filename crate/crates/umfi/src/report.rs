//! Importance reports and their JSON serialization.

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Which importance estimator produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MciExact,
    MciSizeLimited { k: usize },
    UmfiLinear,
    UmfiTransport,
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::MciExact => "MCI_EXACT".to_owned(),
            Method::MciSizeLimited { k } => format!("MCI_K{k}"),
            Method::UmfiLinear => "UMFI_LR".to_owned(),
            Method::UmfiTransport => "UMFI_OT".to_owned(),
        }
    }
}

/// String-keyed f64 map that serializes in insertion order, so feature
/// columns appear in the JSON in the same order as in the data.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderedMap(pub Vec<(String, f64)>);

impl OrderedMap {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|(_, v)| *v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(k, _)| k.as_str())
    }
}

impl Serialize for OrderedMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for OrderedMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OrderedMap;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a map from string to number")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::with_capacity(access.size_hint().unwrap_or(0));
                while let Some((k, v)) = access.next_entry::<String, f64>()? {
                    out.push((k, v));
                }
                Ok(OrderedMap(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// Per-feature importance scores with bookkeeping for reproducibility.
///
/// `raw_scores` are the signed estimates; `scores` clamp negatives to zero
/// (a feature cannot remove information); `shares` rescale the clamped
/// scores to fractions of the total in [0, 1] summing to 1 (all zero when
/// nothing is important). `trainings` counts model fits consumed while
/// producing the report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ImportanceReport {
    pub method: String,
    pub scores: OrderedMap,
    pub raw_scores: OrderedMap,
    pub shares: OrderedMap,
    pub trainings: u64,
    pub wall_time_s: f64,
    pub seed: u64,
    pub standardized: bool,
}

impl ImportanceReport {
    pub fn new(
        method: Method,
        feature_names: &[String],
        raw_scores: &[f64],
        clamp_negative: bool,
        trainings: u64,
        wall_time_s: f64,
        seed: u64,
    ) -> Self {
        assert_eq!(feature_names.len(), raw_scores.len());
        let clamped: Vec<f64> = if clamp_negative {
            raw_scores.iter().map(|&v| v.max(0.0)).collect()
        } else {
            raw_scores.to_vec()
        };
        let shares = shares_from_scores(&clamped);
        let zip = |vals: &[f64]| {
            OrderedMap(
                feature_names
                    .iter()
                    .cloned()
                    .zip(vals.iter().copied())
                    .collect(),
            )
        };
        Self {
            method: method.label(),
            scores: zip(&clamped),
            raw_scores: zip(raw_scores),
            shares: zip(&shares),
            trainings,
            wall_time_s,
            seed,
            standardized: false,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Share of each nonnegative score as a fraction of the total, in [0, 1];
/// all zeros when the total is zero.
pub fn shares_from_scores(scores: &[f64]) -> Vec<f64> {
    let total: f64 = scores.iter().map(|&s| s.max(0.0)).sum();
    if total <= 0.0 {
        return vec![0.0; scores.len()];
    }
    scores.iter().map(|&s| s.max(0.0) / total).collect()
}
