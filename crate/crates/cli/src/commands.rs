use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use specclust::cluster::{hac, kmeans_fit, HacConfig, KMeansConfig};
use specclust::data::{l2_normalize, Clustering, EmbeddingSet, LabelVector};
use specclust::kestimator::{analyze_spectrum, estimate_k, KEstimate};
use specclust::metrics::{evaluate, extrinsic_scores, relative_error_k, EvalOptions, MetricReport};
use specclust::spectral::compute_eigenvalues;
use specclust::sweep::{sweep, SweepConfig, SweepRow};
use specclust::synth::{generate_spherical_mixture, MixtureSpec};

use crate::args::*;
use crate::error::{CliError, Result};
use crate::io;
use crate::report::{RunReport, Timings, FORMAT_VERSION};

fn report<C: Serialize>(command: &str, config: &C, results: Value, t: Timings) -> Result<RunReport> {
    Ok(RunReport {
        format_version: FORMAT_VERSION,
        command: command.to_string(),
        config: serde_json::to_value(config)?,
        results,
        timings_ms: t.into_inner(),
    })
}

fn load_labels(path: &Path, n: usize) -> Result<LabelVector> {
    let raw = io::read_labels(path)?;
    if raw.len() != n {
        return Err(specclust::Error::LengthMismatch { expected: n, found: raw.len() }.into());
    }
    Ok(LabelVector::from_raw(&raw))
}

pub fn run(cmd: &Command) -> Result<RunReport> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::EstimateK(a) => estimate(a),
        Command::Cluster(a) => cluster(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Sweep(a) => sweep_cmd(a),
    }
}

pub fn gen(a: &GenArgs) -> Result<RunReport> {
    let mut t = Timings::default();
    let spec = MixtureSpec {
        k: a.k,
        n: a.n,
        d: a.d,
        sigma: a.sigma,
        min_sep: a.min_sep,
        balance: a.balance(),
        seed: a.seed,
    };
    let ds = t.time("generate", || generate_spherical_mixture(&spec))?;
    let labels = ds.labels.expect("generator attaches labels");
    let (name, bytes) = match a.format {
        FormatArg::Emb1 => ("embeddings.emb1", io::encode_emb1(ds.embeddings.data())),
        FormatArg::Csv => ("embeddings.csv", io::encode_csv(ds.embeddings.data()).into_bytes()),
    };
    let emb_path = a.out.join(name);
    let label_path = a.out.join("labels.txt");
    t.time("write", || -> Result<()> {
        io::write_bytes(&emb_path, &bytes)?;
        io::write_lines(&label_path, labels.as_slice())
    })?;
    let mut sizes = vec![0usize; labels.classes()];
    labels.as_slice().iter().for_each(|&l| sizes[l] += 1);
    let results = json!({
        "n": a.n,
        "d": a.d,
        "k": a.k,
        "class_sizes": sizes,
        "embeddings": emb_path,
        "labels": label_path,
    });
    report("gen", a, results, t)
}

#[derive(Serialize)]
struct EstimateResults<'a> {
    n: usize,
    d: usize,
    #[serde(flatten)]
    estimate: &'a KEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_true: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    re_k: Option<f64>,
}

pub fn estimate(a: &EstimateArgs) -> Result<RunReport> {
    let mut t = Timings::default();
    let e = t.time("read", || io::read_embeddings(&a.input))?;
    let labels = a.labels.as_deref().map(|p| load_labels(p, e.n())).transpose()?;
    let cfg = a.estimator.config(a.seed);
    let est = t.time("estimate", || estimate_k(&e, &cfg))?;
    let k_true = labels.as_ref().map(|l| l.classes());
    let re_k = k_true.map(|k| relative_error_k(est.k_hat, k)).transpose()?;
    let results = EstimateResults { n: e.n(), d: e.d(), estimate: &est, k_true, re_k };
    report("estimate-k", a, serde_json::to_value(results)?, t)
}

pub fn cluster(a: &ClusterArgs) -> Result<RunReport> {
    let mut t = Timings::default();
    let e = t.time("read", || io::read_embeddings(&a.input))?;
    let labels = a.labels.as_deref().map(|p| load_labels(p, e.n())).transpose()?;
    let estimate = match a.k {
        KArg::Fixed(_) => None,
        KArg::Auto => {
            let cfg = a.estimator.config(a.seed);
            Some(t.time("estimate", || estimate_k(&e, &cfg))?)
        }
    };
    let k = match a.k {
        KArg::Fixed(k) => k,
        KArg::Auto => estimate.as_ref().expect("estimated").k_hat,
    };
    let mut details = serde_json::Map::new();
    let clustering: Clustering = match a.algo {
        AlgoArg::Kmeans => {
            let input = if a.raw { e.clone() } else { l2_normalize(&e)? };
            let cfg = KMeansConfig { k, n_init: a.n_init, max_iter: a.max_iter, tol: a.tol, seed: a.seed };
            let fit = t.time("cluster", || kmeans_fit(&input, &cfg))?;
            details.insert("inertia".into(), json!(fit.inertia));
            details.insert("iterations".into(), json!(fit.iterations));
            fit.clustering
        }
        AlgoArg::Hac => {
            let cfg = HacConfig { k, linkage: a.linkage.into(), distance: a.distance.into() };
            t.time("cluster", || hac(&e, &cfg))?
        }
    };
    t.time("write", || io::write_lines(&a.out, clustering.assignment()))?;
    let mut results = json!({
        "n": e.n(),
        "k": clustering.k(),
        "sizes": clustering.sizes(),
        "assignment": a.out,
    });
    let obj = results.as_object_mut().expect("object");
    obj.extend(details);
    if let Some(est) = &estimate {
        obj.insert("estimate".into(), serde_json::to_value(est)?);
    }
    if let Some(l) = &labels {
        let mut m = MetricReport { k_pred: clustering.k(), k_true: Some(l.classes()), ..Default::default() };
        extrinsic_scores(l, &clustering, &mut m)?;
        m.re_k = Some(relative_error_k(clustering.k(), l.classes())?);
        obj.insert("metrics".into(), serde_json::to_value(m)?);
    }
    report("cluster", a, results, t)
}

pub fn evaluate_cmd(a: &EvaluateArgs) -> Result<RunReport> {
    let mut t = Timings::default();
    let e = t.time("read", || io::read_embeddings(&a.input))?;
    let c = io::read_assignment(&a.assignment)?;
    if c.n() != e.n() {
        return Err(specclust::Error::LengthMismatch { expected: e.n(), found: c.n() }.into());
    }
    let labels = a.labels.as_deref().map(|p| load_labels(p, e.n())).transpose()?;
    let space: EmbeddingSet = match a.space {
        SpaceArg::Raw => e,
        SpaceArg::Normalized => l2_normalize(&e)?,
    };
    let opts = EvalOptions { silhouette_distance: a.silhouette_distance.into(), use_zscore: a.zscore };
    let m = t.time("evaluate", || evaluate(&space, &c, labels.as_ref(), None, &opts))?;
    let results = json!({
        "n": space.n(),
        "space": a.space,
        "silhouette_distance": a.silhouette_distance,
        "cohesion_similarity": if a.zscore { "zscore_rectified" } else { "rectified_cosine" },
        "metrics": m,
    });
    report("evaluate", a, results, t)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<RunReport> {
    let mut t = Timings::default();
    let e = t.time("read", || io::read_embeddings(&a.input))?;
    if e.n() > a.estimator.tau && !a.force_full {
        return Err(CliError::Usage(format!(
            "input has {} points, more than --tau {}; pass --force-full to decompose it anyway",
            e.n(),
            a.estimator.tau
        )));
    }
    let cfg = a.estimator.config(0);
    cfg.validate()?;
    let sp = t.time("eigenvalues", || compute_eigenvalues(&e, cfg.use_zscore))?;
    let an = analyze_spectrum(&sp, &cfg)?;
    let mut csv = String::from("index,lambda,delta,threshold,detected_k\n");
    for (i, lambda) in sp.values().iter().enumerate() {
        let idx = i + 1;
        let delta = an.deltas.get(idx).map(|d| d.to_string()).unwrap_or_default();
        let mark = u8::from(idx == an.k);
        csv.push_str(&format!("{idx},{lambda},{delta},{},{mark}\n", an.threshold));
    }
    t.time("write", || io::write_bytes(&a.csv, csv.as_bytes()))?;
    let deltas: Vec<Option<f64>> = (1..=sp.len()).map(|i| an.deltas.get(i)).collect();
    let results = json!({
        "n": sp.len(),
        "k": an.k,
        "jump_index": an.jump_index,
        "fell_back": an.fell_back(),
        "threshold": an.threshold,
        "eigenvalues": sp.values(),
        "deltas": deltas,
        "csv": a.csv,
    });
    report("spectrum", a, results, t)
}

const SWEEP_COLUMNS: &str =
    "algo,k,noise,ari,nmi,homogeneity,completeness,fmi,re_k,silhouette,dbi,neg_dbi,chi,cohesion_ratio";

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_COLUMNS}\n");
    for r in rows {
        let m = &r.metrics;
        let fields = [
            r.algo.name().to_string(),
            r.k.to_string(),
            r.noise.to_string(),
            cell(m.ari),
            cell(m.nmi),
            cell(m.homogeneity),
            cell(m.completeness),
            cell(m.fmi),
            cell(m.re_k),
            cell(m.silhouette),
            cell(m.dbi),
            cell(m.dbi.map(|x| -x)),
            cell(m.chi),
            cell(m.cohesion_ratio),
        ];
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

pub fn sweep_cmd(a: &SweepArgs) -> Result<RunReport> {
    let mut t = Timings::default();
    let e = t.time("read", || io::read_embeddings(&a.input))?;
    let labels = load_labels(&a.labels, e.n())?;
    let cfg = SweepConfig {
        algos: a.algos.iter().map(|&x| x.into()).collect(),
        k_min: a.k_min,
        k_max: a.k_max,
        noise_rates: a.noise.clone(),
        kmeans_n_init: a.n_init,
        linkage: a.linkage.into(),
        hac_distance: a.hac_distance.into(),
        silhouette_distance: a.silhouette_distance.into(),
        use_zscore: a.zscore,
        seed: a.seed,
    };
    let res = t.time("sweep", || sweep(&e, &labels, &cfg))?;
    if let Some(path) = &a.csv {
        t.time("write", || io::write_bytes(path, sweep_csv(&res.rows).as_bytes()))?;
    }
    report("sweep", a, serde_json::to_value(&res)?, t)
}
