//! Seeded multi-trial experiments comparing active and random sampling.
//!
//! A [`Scenario`] fixes a graph family, filter design, true `alpha`, SNR,
//! sampler settings and a master seed. [`run_scenario`] draws one ground
//! truth per trial, runs every enabled method on it and aggregates relative
//! error per sample count. [`write_run`] lays the results out as
//!
//! ```text
//! <out>/scenario.toml          resolved scenario
//! <out>/metadata.toml          noise precision per trial, SNR convention
//! <out>/graph.txt              edge list (fixed-graph policy only)
//! <out>/traces/<method>/trial_<k>.csv
//! <out>/aggregate.csv
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_random_geometric, build_watts_strogatz, Graph, LaplacianKind};
use crate::model::{self, NoiseModel};
use crate::rng::{self, Purpose};
use crate::sampler::{self, SamplerConfig, SamplingContext, StepRecord, TrialTrace};
use crate::spectral::{design_highpass, eigendecompose, FilterDesign, GraphFilter};

pub const TRACE_HEADER: &str = "t,node,y,alpha_hat,beta_hat,em_iters,trace_C,rel_error";
pub const AGGREGATE_HEADER: &str = "method,M,mean_err,std_err,n_trials";
pub const SNR_DEFINITION: &str =
    "SNR = (tr(alpha^-1 H^-2) / N) / beta^-1, expected per-node signal power over noise variance";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Active,
    Random,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Active, Method::Random];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Active => "active",
            Method::Random => "random",
        }
    }

    fn id(self) -> u64 {
        match self {
            Method::Active => 0,
            Method::Random => 1,
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    WattsStrogatz {
        n: usize,
        mean_degree: usize,
        rewire_prob: f64,
    },
    RandomGeometric {
        n: usize,
        radius: f64,
        sigma: f64,
    },
    /// Load a fixed graph; relative paths resolve against the config file.
    EdgeList { path: PathBuf },
}

impl GraphSpec {
    pub fn build(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphSpec::WattsStrogatz {
                n,
                mean_degree,
                rewire_prob,
            } => build_watts_strogatz(*n, *mean_degree, *rewire_prob, seed),
            GraphSpec::RandomGeometric { n, radius, sigma } => build_random_geometric(*n, *radius, *sigma, seed),
            GraphSpec::EdgeList { path } => {
                let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
                Graph::read_edge_list(std::io::BufReader::new(file), &path.display().to_string())
            }
        }
    }
}

/// Whether all trials share one graph draw or each trial draws its own.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphPolicy {
    #[default]
    Fixed,
    PerTrial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub alpha_true: f64,
    pub snr_db: f64,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    /// Overrides the graph seed derived from `master_seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_seed: Option<u64>,
    #[serde(default)]
    pub graph_policy: GraphPolicy,
    #[serde(default)]
    pub laplacian: LaplacianKind,
    pub graph: GraphSpec,
    #[serde(default)]
    pub filter: FilterDesign,
    #[serde(default)]
    pub sampler: SamplerConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::Parameter(msg) => Error::Config(msg),
            other => other,
        };
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.alpha_true > 0.0 && self.alpha_true.is_finite()) {
            return Err(Error::Config(format!("alpha_true must be positive, got {}", self.alpha_true)));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::Config("snr_db must be finite".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must not be empty".into()));
        }
        let mut sorted = self.methods.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.methods.len() {
            return Err(Error::Config("methods contains duplicates".into()));
        }
        self.filter.validate().map_err(cfg)?;
        self.sampler.validate().map_err(cfg)?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Reads a config file; an edge-list path is made relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut s = Self::from_toml(&text)?;
        if let GraphSpec::EdgeList { path: graph_path } = &mut s.graph {
            if graph_path.is_relative() {
                if let Some(dir) = path.parent() {
                    *graph_path = dir.join(&*graph_path);
                }
            }
        }
        Ok(s)
    }

    fn graph_seed_for(&self, trial: usize) -> u64 {
        let base = self.graph_seed.unwrap_or_else(|| rng::derive_seed(self.master_seed, &[Purpose::Graph as u64]));
        match self.graph_policy {
            GraphPolicy::Fixed => base,
            GraphPolicy::PerTrial => rng::derive_seed(base, &[trial as u64]),
        }
    }
}

/// The four graph/SNR configurations of the reference study. Filter
/// parameters use [`FilterDesign::default`].
pub fn presets() -> Vec<Scenario> {
    let g1 = GraphSpec::WattsStrogatz {
        n: 300,
        mean_degree: 6,
        rewire_prob: 0.1,
    };
    let g2 = GraphSpec::RandomGeometric {
        n: 300,
        radius: 0.1,
        sigma: 0.05,
    };
    let make = |name: &str, graph: &GraphSpec, alpha: f64, snr: f64| Scenario {
        name: name.to_string(),
        alpha_true: alpha,
        snr_db: snr,
        trials: 100,
        methods: vec![Method::Active, Method::Random],
        master_seed: 1,
        graph_seed: None,
        graph_policy: GraphPolicy::Fixed,
        laplacian: LaplacianKind::Combinatorial,
        graph: graph.clone(),
        filter: FilterDesign::default(),
        sampler: SamplerConfig {
            m_max: 200,
            ..SamplerConfig::default()
        },
    };
    vec![
        make("g1-snr15", &g1, 10.0, 15.0),
        make("g1-snr10", &g1, 10.0, 10.0),
        make("g2-snr15", &g2, 0.1, 15.0),
        make("g2-snr10", &g2, 0.1, 10.0),
    ]
}

pub fn preset(name: &str) -> Option<Scenario> {
    presets().into_iter().find(|s| s.name == name)
}

/// Graph, filter and the derived quantities shared by the trials using it.
#[derive(Debug, Clone)]
pub struct Setup {
    pub graph: Graph,
    pub filter: GraphFilter,
    pub context: SamplingContext,
    pub beta: f64,
}

impl Setup {
    pub fn build(s: &Scenario, graph_seed: u64) -> Result<Self> {
        let graph = s.graph.build(graph_seed)?;
        if graph.n() < 2 {
            return Err(Error::Config("graph needs at least two nodes".into()));
        }
        let spectrum = eigendecompose(&graph.laplacian(s.laplacian))?;
        let filter = design_highpass(spectrum, &s.filter)?;
        let beta = model::beta_for_snr(&filter, s.alpha_true, s.snr_db)?;
        let context = SamplingContext::new(&filter);
        Ok(Setup {
            graph,
            filter,
            context,
            beta,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub method: Method,
    pub trace: TrialTrace,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    /// Present under the fixed-graph policy.
    pub setup: Option<Setup>,
    /// Noise precision used in each trial.
    pub betas: Vec<f64>,
    /// Ordered by trial, then by method.
    pub results: Vec<TrialResult>,
    pub aggregate: AggregateTable,
}

/// Seed of the sampler run for `(trial, method)`.
pub fn run_seed(master_seed: u64, trial: usize, method: Method) -> u64 {
    rng::derive_seed(master_seed, &[Purpose::Run as u64, trial as u64, method.id()])
}

fn run_trial(s: &Scenario, setup: &Setup, trial: usize) -> Result<Vec<TrialResult>> {
    let mut truth_rng = rng::substream(s.master_seed, &[Purpose::Truth as u64, trial as u64]);
    let truth = model::sample_prior_with(&setup.filter, s.alpha_true, &mut truth_rng)?;
    let noise = NoiseModel::new(setup.beta)?;
    let mut methods = s.methods.clone();
    methods.sort();
    methods
        .into_iter()
        .map(|method| {
            let seed = run_seed(s.master_seed, trial, method);
            let trace = match method {
                Method::Active => sampler::run_active(&setup.context, &truth, noise, &s.sampler, seed),
                Method::Random => sampler::run_random(&setup.context, &truth, noise, &s.sampler, seed),
            }
            .map_err(|e| match e {
                Error::Numerical(msg) => {
                    Error::Numerical(format!("trial {trial}, method {}: {msg}", method.as_str()))
                }
                other => other,
            })?;
            Ok(TrialResult { trial, method, trace })
        })
        .collect()
}

/// Runs every trial of `s` on up to `workers` threads. Output does not
/// depend on `workers`.
pub fn run_scenario(s: &Scenario, workers: usize) -> Result<ScenarioRun> {
    s.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let shared = match s.graph_policy {
        GraphPolicy::Fixed => Some(Setup::build(s, s.graph_seed_for(0))?),
        GraphPolicy::PerTrial => None,
    };

    let per_trial: Vec<(f64, Vec<TrialResult>)> = pool.install(|| {
        (0..s.trials)
            .into_par_iter()
            .map(|trial| match &shared {
                Some(setup) => Ok((setup.beta, run_trial(s, setup, trial)?)),
                None => {
                    let setup = Setup::build(s, s.graph_seed_for(trial))?;
                    Ok((setup.beta, run_trial(s, &setup, trial)?))
                }
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut betas = Vec::with_capacity(s.trials);
    let mut results = Vec::with_capacity(s.trials * s.methods.len());
    for (beta, rs) in per_trial {
        betas.push(beta);
        results.extend(rs);
    }
    let aggregate = AggregateTable::from_errors(
        results
            .iter()
            .map(|r| (r.method, r.trace.records.iter().map(|x| x.rel_error).collect())),
    );
    Ok(ScenarioRun {
        scenario: s.clone(),
        setup: shared,
        betas,
        results,
        aggregate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub method: Method,
    pub m: usize,
    pub mean_err: f64,
    pub std_err: f64,
    pub n_trials: usize,
}

/// Mean and sample standard deviation of the relative error per method and
/// sample count, over the trials that reached that sample count.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateTable {
    pub rows: Vec<AggregateRow>,
}

impl AggregateTable {
    /// Builds the table from per-trial error sequences, given in trial order.
    pub fn from_errors(traces: impl IntoIterator<Item = (Method, Vec<f64>)>) -> Self {
        let mut by_method: Vec<(Method, Vec<Vec<f64>>)> = Vec::new();
        for (method, errs) in traces {
            match by_method.iter_mut().find(|(m, _)| *m == method) {
                Some((_, v)) => v.push(errs),
                None => by_method.push((method, vec![errs])),
            }
        }
        by_method.sort_by_key(|(m, _)| *m);

        let mut rows = Vec::new();
        for (method, trials) in by_method {
            let steps = trials.iter().map(Vec::len).max().unwrap_or(0);
            for step in 0..steps {
                let vals: Vec<f64> = trials.iter().filter_map(|t| t.get(step).copied()).collect();
                let k = vals.len() as f64;
                let mean = vals.iter().sum::<f64>() / k;
                let std = if vals.len() > 1 {
                    (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
                } else {
                    0.0
                };
                rows.push(AggregateRow {
                    method,
                    m: step + 1,
                    mean_err: mean,
                    std_err: std,
                    n_trials: vals.len(),
                });
            }
        }
        AggregateTable { rows }
    }

    pub fn get(&self, method: Method, m: usize) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.method == method && r.m == m)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(AGGREGATE_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.method.as_str(),
                r.m,
                r.mean_err,
                r.std_err,
                r.n_trials
            );
        }
        s
    }

    pub fn parse_csv(text: &str, source: &str) -> Result<Self> {
        let perr = |line: usize, msg: &str| Error::Parse {
            path: source.to_string(),
            msg: format!("line {line}: {msg}"),
        };
        let mut lines = text.lines();
        if lines.next() != Some(AGGREGATE_HEADER) {
            return Err(perr(1, "unexpected header"));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(perr(i + 2, "expected 5 columns"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| perr(i + 2, "bad number"));
            let int = |s: &str| s.parse::<usize>().map_err(|_| perr(i + 2, "bad integer"));
            rows.push(AggregateRow {
                method: Method::parse(f[0]).ok_or_else(|| perr(i + 2, "unknown method"))?,
                m: int(f[1])?,
                mean_err: num(f[2])?,
                std_err: num(f[3])?,
                n_trials: int(f[4])?,
            });
        }
        Ok(AggregateTable { rows })
    }
}

pub fn trace_to_csv(trace: &TrialTrace) -> String {
    let mut s = String::from(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.t, r.node, r.y, r.alpha_hat, r.beta_hat, r.em_iters, r.trace_c, r.rel_error
        );
    }
    s
}

/// Parses and validates a trace file: header, column count, numeric fields,
/// and `t` running 1, 2, 3, ...
pub fn parse_trace_csv(text: &str, source: &str) -> Result<Vec<StepRecord>> {
    let perr = |line: usize, msg: &str| Error::Parse {
        path: source.to_string(),
        msg: format!("line {line}: {msg}"),
    };
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(perr(1, "unexpected header"));
    }
    let mut out: Vec<StepRecord> = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(perr(lineno, "expected 8 columns"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr(lineno, "bad number"));
        let int = |s: &str| s.parse::<usize>().map_err(|_| perr(lineno, "bad integer"));
        let rec = StepRecord {
            t: int(f[0])?,
            node: int(f[1])?,
            y: num(f[2])?,
            alpha_hat: num(f[3])?,
            beta_hat: num(f[4])?,
            em_iters: int(f[5])?,
            trace_c: num(f[6])?,
            rel_error: num(f[7])?,
        };
        if rec.t != out.len() + 1 {
            return Err(perr(lineno, "step index is not consecutive from 1"));
        }
        out.push(rec);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct Metadata<'a> {
    scenario: &'a str,
    snr_definition: &'a str,
    expected_signal_power: Option<f64>,
    noise_beta: &'a [f64],
}

pub fn trace_path(traces_dir: &Path, method: Method, trial: usize) -> PathBuf {
    traces_dir.join(method.as_str()).join(format!("trial_{trial:04}.csv"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the run under `out_dir`; see the module docs for the layout.
pub fn write_run(run: &ScenarioRun, out_dir: &Path) -> Result<()> {
    let s = &run.scenario;
    write_file(&out_dir.join("scenario.toml"), &s.to_toml())?;
    let meta = Metadata {
        scenario: &s.name,
        snr_definition: SNR_DEFINITION,
        expected_signal_power: run
            .setup
            .as_ref()
            .map(|st| model::expected_signal_power(&st.filter, s.alpha_true)),
        noise_beta: &run.betas,
    };
    write_file(
        &out_dir.join("metadata.toml"),
        &toml::to_string(&meta).expect("metadata serializes"),
    )?;
    if let Some(setup) = &run.setup {
        write_file(&out_dir.join("graph.txt"), &setup.graph.edge_list_string())?;
    }
    let traces = out_dir.join("traces");
    for r in &run.results {
        write_file(&trace_path(&traces, r.method, r.trial), &trace_to_csv(&r.trace))?;
    }
    write_file(&out_dir.join("aggregate.csv"), &run.aggregate.to_csv())
}

/// Reads every `<method>/trial_<k>.csv` under `traces_dir`, ordered by
/// method then trial index.
pub fn read_traces(traces_dir: &Path) -> Result<Vec<(Method, usize, Vec<StepRecord>)>> {
    let mut out = Vec::new();
    for method in Method::ALL {
        let dir = traces_dir.join(method.as_str());
        if !dir.is_dir() {
            continue;
        }
        let mut files = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let path = entry.map_err(|e| Error::io(&dir, e))?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            let Some(idx) = name
                .strip_prefix("trial_")
                .and_then(|r| r.strip_suffix(".csv"))
                .and_then(|r| r.parse::<usize>().ok())
            else {
                continue;
            };
            files.push((idx, path));
        }
        files.sort();
        for (idx, path) in files {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            out.push((method, idx, parse_trace_csv(&text, &path.display().to_string())?));
        }
    }
    if out.is_empty() {
        return Err(Error::Parse {
            path: traces_dir.display().to_string(),
            msg: "no trace files found".into(),
        });
    }
    Ok(out)
}

/// Recomputes the aggregate table from trace files alone.
pub fn aggregate_dir(traces_dir: &Path) -> Result<AggregateTable> {
    let traces = read_traces(traces_dir)?;
    Ok(AggregateTable::from_errors(
        traces
            .into_iter()
            .map(|(m, _, recs)| (m, recs.iter().map(|r| r.rel_error).collect())),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_presets() {
        let p = presets();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|s| s.trials == 100 && s.validate().is_ok()));
        let g2 = preset("g2-snr15").unwrap();
        assert_eq!(g2.alpha_true, 0.1);
        assert_eq!(
            g2.graph,
            GraphSpec::RandomGeometric { n: 300, radius: 0.1, sigma: 0.05 }
        );
        let g1 = preset("g1-snr10").unwrap();
        assert_eq!(g1.alpha_true, 10.0);
        assert_eq!(g1.snr_db, 10.0);
        assert_eq!(
            g1.graph,
            GraphSpec::WattsStrogatz { n: 300, mean_degree: 6, rewire_prob: 0.1 }
        );
    }

    #[test]
    fn preset_toml_round_trip() {
        for s in presets() {
            let back = Scenario::from_toml(&s.to_toml()).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = preset("g1-snr15").unwrap().to_toml();
        text = text.replacen("trials = 100", "trials = 100\nbogus = 1", 1);
        assert!(matches!(Scenario::from_toml(&text), Err(Error::Config(_))));

        let text = preset("g1-snr15").unwrap().to_toml().replacen("rewire_prob", "rewire_probability", 1);
        assert!(matches!(Scenario::from_toml(&text), Err(Error::Config(_))));

        let text = preset("g1-snr15").unwrap().to_toml().replacen("floor_eps", "floor", 1);
        assert!(matches!(Scenario::from_toml(&text), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_scenarios() {
        let base = preset("g1-snr15").unwrap();
        let cases = [
            Scenario { trials: 0, ..base.clone() },
            Scenario { alpha_true: 0.0, ..base.clone() },
            Scenario { methods: vec![], ..base.clone() },
            Scenario { methods: vec![Method::Active, Method::Active], ..base.clone() },
            Scenario {
                filter: FilterDesign { cutoff_frac: 1.5, ..Default::default() },
                ..base.clone()
            },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(Error::Config(_))));
        }
    }

    #[test]
    fn aggregate_math() {
        let t = AggregateTable::from_errors(vec![
            (Method::Random, vec![1.0, 0.5]),
            (Method::Active, vec![0.9]),
            (Method::Random, vec![3.0, 1.5, 0.2]),
        ]);
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[0].method, Method::Active);
        let r1 = t.get(Method::Random, 1).unwrap();
        assert_eq!((r1.mean_err, r1.n_trials), (2.0, 2));
        assert!((r1.std_err - 2f64.sqrt()).abs() < 1e-15);
        let r3 = t.get(Method::Random, 3).unwrap();
        assert_eq!((r3.mean_err, r3.std_err, r3.n_trials), (0.2, 0.0, 1));
        let back = AggregateTable::parse_csv(&t.to_csv(), "mem").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn trace_parse_validation() {
        let good = format!("{TRACE_HEADER}\n1,0,0.5,1,1,3,2.5,0.9\n2,4,0.1,1,1,3,2.5,0.8\n");
        assert_eq!(parse_trace_csv(&good, "mem").unwrap().len(), 2);
        let skip = format!("{TRACE_HEADER}\n1,0,0.5,1,1,3,2.5,0.9\n3,4,0.1,1,1,3,2.5,0.8\n");
        assert!(parse_trace_csv(&skip, "mem").is_err());
        let short = format!("{TRACE_HEADER}\n1,0,0.5\n");
        assert!(parse_trace_csv(&short, "mem").is_err());
        let nan = format!("{TRACE_HEADER}\n1,0,x,1,1,3,2.5,0.9\n");
        assert!(parse_trace_csv(&nan, "mem").is_err());
        assert!(parse_trace_csv("t,node\n", "mem").is_err());
    }
}
