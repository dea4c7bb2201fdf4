//! Extrinsic and intrinsic clustering quality measures.

mod cohesion;
mod extrinsic;
mod intrinsic;
mod rank;

pub use cohesion::{cohesion_components, cohesion_information, cohesion_ratio, CohesionComponents, MIN_GLOBAL_MEAN};
pub use extrinsic::{ari, contingency, fmi, nmi_family, relative_error_k, ContingencyTable, PairCounts};
pub use intrinsic::{calinski_harabasz, davies_bouldin, silhouette, silhouette_from_distances};
pub use rank::{average_ranks, pearson, spearman};

use serde::{Deserialize, Serialize};

use crate::cluster::Distance;
use crate::data::{Clustering, EmbeddingSet, LabelVector};
use crate::error::{Error, Result};
use crate::spectral::similarity_for;

/// JSON has no infinity; write it as the string `"inf"`.
mod json_real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if *x == f64::INFINITY => s.serialize_str("inf"),
            Some(x) if *x == f64::NEG_INFINITY => s.serialize_str("-inf"),
            Some(x) => x.serialize(s),
            None => s.serialize_none(),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            None => Ok(None),
            Some(Raw::Num(x)) => Ok(Some(x)),
            Some(Raw::Text(t)) => match t.as_str() {
                "inf" => Ok(Some(f64::INFINITY)),
                "-inf" => Ok(Some(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!("unexpected value {other:?}"))),
            },
        }
    }
}

/// Scores for one clustering. Fields that do not apply (no labels, or an
/// intrinsic index undefined for the partition) are omitted when serialized.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ari: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub homogeneity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub completeness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fmi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub re_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub silhouette: Option<f64>,
    #[serde(with = "json_real", skip_serializing_if = "Option::is_none", default)]
    pub dbi: Option<f64>,
    #[serde(with = "json_real", skip_serializing_if = "Option::is_none", default)]
    pub chi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cohesion_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_true: Option<usize>,
    pub k_pred: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub silhouette_distance: Distance,
    /// Use the z-score rectified similarity for the Cohesion Ratio.
    pub use_zscore: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { silhouette_distance: Distance::Euclidean, use_zscore: false }
    }
}

/// Extrinsic scores against `labels`.
pub fn extrinsic_scores(labels: &LabelVector, c: &Clustering, report: &mut MetricReport) -> Result<()> {
    let t = contingency(labels, c)?;
    let (nmi, hom, com) = nmi_family(&t);
    report.ari = Some(ari(&t)?);
    report.nmi = Some(nmi);
    report.homogeneity = Some(hom);
    report.completeness = Some(com);
    report.fmi = Some(fmi(&t));
    Ok(())
}

/// Every applicable metric. Intrinsic measures that are undefined for the
/// partition (one cluster, one point per cluster) are left empty.
pub fn evaluate(
    e: &EmbeddingSet,
    c: &Clustering,
    labels: Option<&LabelVector>,
    k_hat: Option<usize>,
    opts: &EvalOptions,
) -> Result<MetricReport> {
    if c.n() != e.n() {
        return Err(Error::LengthMismatch { expected: e.n(), found: c.n() });
    }
    let mut r = MetricReport { k_pred: c.k(), ..Default::default() };
    if let Some(l) = labels {
        extrinsic_scores(l, c, &mut r)?;
        r.k_true = Some(l.classes());
        r.re_k = Some(relative_error_k(k_hat.unwrap_or(c.k()), l.classes())?);
    }
    let optional = |x: Result<f64>| match x {
        Ok(v) => Ok(Some(v)),
        Err(Error::SingleCluster | Error::Saturated | Error::TooFewPoints { .. }) => Ok(None),
        Err(other) => Err(other),
    };
    r.silhouette = optional(silhouette(e, c, opts.silhouette_distance))?;
    r.dbi = optional(davies_bouldin(e, c))?;
    r.chi = optional(calinski_harabasz(e, c))?;
    r.cohesion_ratio = Some(cohesion_ratio(&similarity_for(e, opts.use_zscore)?, c)?);
    Ok(r)
}
