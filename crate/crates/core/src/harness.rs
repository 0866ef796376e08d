//! Sweep configuration, ensemble orchestration and CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::deloc::{central_window, j_basis_frame, npc_columns, relative_npc, BasisFrame};
use crate::entangle::{
    default_partitions, EntanglementPlan, EntanglementRow, EntanglementSpec, PartitionScheme,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    build_sector_hamiltonian, realization_seed, sample_realization, DisorderLaw, ModelParams,
};
use crate::lattice::LatticeSpec;
use crate::linalg::{eigh, eigvalsh, Matrix};
use crate::rmt_baseline::{
    expected_purities, expected_purity_by_enumeration, monte_carlo_npc, monte_carlo_purities,
    Estimate, PURITY_ORDERS,
};
use crate::spectral::{lsi, unfold, SpacingSample, UnfoldingConfig};
use crate::symmetry::{decompose_sectors, find_sector, sz_basis, ParityMode, SectorBasis};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SPINCHAOS_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DisorderCase {
    /// Uniform coupling `J` against on-site disorder `δε`.
    #[serde(rename = "J_over_deps")]
    JOverDeps,
    /// Coupling disorder `δJ` around `J`, no on-site disorder.
    #[serde(rename = "dJ_over_J")]
    DjOverJ,
    /// Zero-mean coupling disorder `δJ` against on-site disorder `δε`.
    #[serde(rename = "dJ_over_deps")]
    DjOverDeps,
    /// The clean exchange Hamiltonian with `J = 1`; ratios are ignored.
    #[serde(rename = "clean")]
    Clean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorMode {
    /// Lowest `|S_z|`.
    #[default]
    Sz0,
    /// Lowest `|S_z|` and `S = 1`.
    Sz0S1,
    /// Lowest `|S_z|`, `S = 1`, and even parity under the selected reflections.
    #[serde(rename = "sz0_s1r")]
    Sz0S1R,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsiMode {
    /// η per realization, then averaged.
    #[default]
    PerRealization,
    /// One η from the spacings of all realizations together.
    Pooled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Measures {
    pub lsi: bool,
    pub npc_c: bool,
    pub npc_j: bool,
    pub npc_r: bool,
    pub concurrence: bool,
    /// Block sizes `n` of the n-local purities.
    pub purities: Vec<usize>,
    pub fermionic: bool,
    /// Linear and von Neumann entropies of a half-system block.
    pub entropies: bool,
}

impl Default for Measures {
    fn default() -> Self {
        Self {
            lsi: true,
            npc_c: true,
            npc_j: false,
            npc_r: false,
            concurrence: false,
            purities: Vec::new(),
            fermionic: false,
            entropies: false,
        }
    }
}

impl Measures {
    fn entanglement(&self) -> bool {
        self.concurrence || !self.purities.is_empty() || self.fermionic || self.entropies
    }

    fn needs_vectors(&self) -> bool {
        self.npc_c || self.npc_j || self.npc_r || self.entanglement()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub lattice: LatticeSpec,
    pub case: DisorderCase,
    #[serde(default)]
    pub ratios: Vec<f64>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub sector: SectorMode,
    #[serde(default)]
    pub parity: ParityMode,
    #[serde(default)]
    pub law: DisorderLaw,
    /// Number of mid-spectrum eigenstates for the central-band NPC averages.
    #[serde(default)]
    pub central_band: Option<usize>,
    #[serde(default)]
    pub lsi_mode: LsiMode,
    #[serde(default)]
    pub unfolding: UnfoldingConfig,
    #[serde(default)]
    pub measures: Measures,
    /// Block layouts keyed by block size, replacing the defaults.
    #[serde(default)]
    pub partitions: BTreeMap<String, Vec<Vec<usize>>>,
}

fn default_realizations() -> usize {
    20
}

impl SweepConfig {
    pub fn new(lattice: LatticeSpec, case: DisorderCase, ratios: Vec<f64>) -> Self {
        Self {
            lattice,
            case,
            ratios,
            realizations: default_realizations(),
            master_seed: 0,
            sector: SectorMode::default(),
            parity: ParityMode::default(),
            law: DisorderLaw::default(),
            central_band: None,
            lsi_mode: LsiMode::default(),
            unfolding: UnfoldingConfig::default(),
            measures: Measures::default(),
            partitions: BTreeMap::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        self.unfolding.validate()?;
        if self.realizations == 0 {
            return Err(Error::Config("realizations must be at least 1".into()));
        }
        if self.case != DisorderCase::Clean {
            if self.ratios.is_empty() {
                return Err(Error::Config("ratio grid is empty".into()));
            }
            if self.ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return Err(Error::Config("ratios must be positive and finite".into()));
            }
        }
        if self.central_band == Some(0) {
            return Err(Error::Config("central_band must be positive".into()));
        }
        let l = self.lattice.num_sites();
        for &n in &self.measures.purities {
            if n == 0 || l % n != 0 || n > crate::entangle::MAX_SUBSYSTEM {
                return Err(Error::Config(format!("cannot form {n}-site blocks on {l} sites")));
            }
        }
        if self.measures.entropies && (l % 2 != 0 || l / 2 > crate::entangle::MAX_SUBSYSTEM) {
            return Err(Error::Config("half-system entropies need an even L of at most 16".into()));
        }
        for (key, blocks) in &self.partitions {
            let n: usize =
                key.parse().map_err(|_| Error::Config(format!("partition key {key:?}")))?;
            let p = PartitionScheme::new(blocks.clone(), l)?;
            if p.block_size() != n {
                return Err(Error::Config(format!("partition {key:?} has blocks of {}", p.block_size())));
            }
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml_string()?.as_bytes());
        Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
    }

    /// Ratios in ascending order; a single placeholder for the clean case.
    pub fn sorted_ratios(&self) -> Vec<f64> {
        if self.case == DisorderCase::Clean {
            return vec![0.0];
        }
        let mut r = self.ratios.clone();
        r.sort_by(f64::total_cmp);
        r.dedup();
        r
    }

    fn partition(&self, n: usize) -> Result<PartitionScheme> {
        match self.partitions.get(&n.to_string()) {
            Some(blocks) => PartitionScheme::new(blocks.clone(), self.lattice.num_sites()),
            None => default_partitions(&self.lattice, n),
        }
    }

    fn entanglement_spec(&self) -> Result<EntanglementSpec> {
        let m = &self.measures;
        let l = self.lattice.num_sites();
        Ok(EntanglementSpec {
            concurrence: m.concurrence,
            partitions: m.purities.iter().map(|&n| self.partition(n)).collect::<Result<_>>()?,
            fermionic: m.fermionic,
            entropy_block: if m.entropies {
                Some(self.partition(l / 2)?.blocks[0].clone())
            } else {
                None
            },
        })
    }

    /// Realization count actually drawn: one for the clean case.
    pub fn effective_realizations(&self) -> usize {
        if self.case == DisorderCase::Clean {
            1
        } else {
            self.realizations
        }
    }
}

/// Model parameters of a disorder case at a given ratio. The denominator
/// scale is fixed to one and the mean field to `ε = 1`.
pub fn resolve_case(case: DisorderCase, ratio: f64, law: DisorderLaw) -> Result<ModelParams> {
    if case != DisorderCase::Clean && !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::Domain(format!("ratio must be positive, got {ratio}")));
    }
    let (j_mean, j_spread, eps_spread) = match case {
        DisorderCase::JOverDeps => (ratio, 0.0, 1.0),
        DisorderCase::DjOverJ => (1.0, ratio, 0.0),
        DisorderCase::DjOverDeps => (0.0, ratio, 1.0),
        DisorderCase::Clean => (1.0, 0.0, 0.0),
    };
    Ok(ModelParams { eps_mean: 1.0, eps_spread, j_mean, j_spread, law })
}

/// Fixed-`S_z` basis plus the optional restriction onto a symmetry sector.
#[derive(Clone, Debug)]
pub struct SectorSetup {
    pub basis: SectorBasis,
    /// Orthonormal sector columns in bitstring coordinates.
    pub projector: Option<Matrix>,
    pub label: String,
}

impl SectorSetup {
    pub fn dim(&self) -> usize {
        self.projector.as_ref().map_or(self.basis.dim(), Matrix::cols)
    }
}

pub fn prepare_sector(cfg: &SweepConfig) -> Result<SectorSetup> {
    let l = cfg.lattice.num_sites();
    let basis = sz_basis(l, (l % 2) as i32)?;
    let reflections = cfg.lattice.reflections();
    let selected = match cfg.sector {
        SectorMode::Sz0 => {
            let label = format!("sz={}", (l % 2) as f64 / 2.0);
            return Ok(SectorSetup { basis, projector: None, label });
        }
        SectorMode::Sz0S1 => &[][..],
        SectorMode::Sz0S1R => cfg.parity.select(&reflections),
    };
    for ratio in cfg.sorted_ratios() {
        let p = resolve_case(cfg.case, ratio, cfg.law)?;
        if p.eps_spread > 0.0 {
            return Err(Error::Config("on-site disorder breaks total-spin conservation".into()));
        }
        if !selected.is_empty() && p.j_spread > 0.0 {
            return Err(Error::Config("coupling disorder breaks reflection symmetry".into()));
        }
    }
    let sectors = decompose_sectors(&basis, true, selected)?;
    let parities = vec![1i8; selected.len()];
    let sector = find_sector(&sectors, Some(2), &parities)
        .ok_or_else(|| Error::Config("requested symmetry sector is empty".into()))?;
    Ok(SectorSetup {
        label: sector.label(),
        projector: Some(sector.basis_vectors.clone()),
        basis,
    })
}

/// Eigenvalues and, if requested, bitstring-coordinate eigenvectors of one
/// realization restricted to the sector.
pub fn solve_realization(
    cfg: &SweepConfig,
    setup: &SectorSetup,
    params: &ModelParams,
    seed: u64,
    vectors: bool,
) -> Result<(Vec<f64>, Option<Matrix>)> {
    let real = sample_realization(params, &cfg.lattice, seed)?;
    let mut h = build_sector_hamiltonian(&real, &cfg.lattice, &setup.basis)?;
    if let Some(b) = &setup.projector {
        h = h.project(b);
    }
    if !vectors {
        return Ok((eigvalsh(&h)?, None));
    }
    let spec = eigh(&h)?;
    let v = match &setup.projector {
        Some(b) => b.matmul(&spec.vectors),
        None => spec.vectors,
    };
    Ok((spec.values, Some(v)))
}

/// Ensemble mean with its standard error (absent for a single value).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std_error: Option<f64>,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let e = Estimate::from_samples(xs);
        Some(Self { mean: e.mean, std_error: (xs.len() > 1).then_some(e.std_error) })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRow {
    pub ratio: f64,
    pub params: ModelParams,
    pub sector: String,
    pub sector_dim: usize,
    pub seeds: Vec<u64>,
    pub metrics: BTreeMap<String, Summary>,
    /// Mean `ξ_r` of each consecutive realization pair.
    pub xi_r_pairs: Vec<f64>,
    pub degeneracies: usize,
    pub clamped: usize,
    /// Set when η could not be computed.
    pub lsi_flag: Option<String>,
}

impl DiagnosticsRow {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).map(|s| s.mean)
    }
}

/// Metric column names produced by a configuration, in output order.
pub fn metric_names(cfg: &SweepConfig) -> Vec<String> {
    let m = &cfg.measures;
    let mut names = Vec::new();
    if m.lsi {
        names.push("eta".to_string());
    }
    for (flag, base) in [(m.npc_c, "xi_c"), (m.npc_j, "xi_j")] {
        if flag {
            names.push(base.to_string());
            if cfg.central_band.is_some() {
                names.push(format!("{base}_central"));
            }
        }
    }
    if m.npc_r {
        names.push("xi_r".into());
    }
    if m.concurrence {
        names.push("C".into());
    }
    names.extend(m.purities.iter().map(|n| format!("P{n}")));
    if m.purities.contains(&1) {
        names.push("Q1".into());
    }
    if m.fermionic {
        names.push("Pu".into());
    }
    if m.entropies {
        names.push("S_lin".into());
        names.push("S_vn".into());
    }
    names
}

struct Outcome {
    seed: u64,
    spacings: Option<SpacingSample>,
    lsi_error: Option<String>,
    metrics: Vec<(String, f64)>,
    vectors: Option<Matrix>,
}

/// Shared per-sweep state.
struct Context<'a> {
    cfg: &'a SweepConfig,
    setup: SectorSetup,
    j_frame: Option<BasisFrame>,
    plan: Option<EntanglementPlan>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a SweepConfig) -> Result<Self> {
        cfg.validate()?;
        let setup = prepare_sector(cfg)?;
        let j_frame = if cfg.measures.npc_j {
            // Positive rescaling of H_J leaves its eigenbasis unchanged.
            Some(j_basis_frame(&cfg.lattice, &setup.basis, 1.0, cfg.parity)?)
        } else {
            None
        };
        let plan = if cfg.measures.entanglement() {
            Some(EntanglementPlan::new(&cfg.lattice, &setup.basis, &cfg.entanglement_spec()?)?)
        } else {
            None
        };
        Ok(Self { cfg, setup, j_frame, plan })
    }

    fn entanglement_rows(&self, values: &[f64], v: &Matrix) -> Result<Vec<EntanglementRow>> {
        let plan = self.plan.as_ref().expect("entanglement plan");
        (0..v.cols())
            .map(|k| plan.evaluate(values[k], &v.column(k), &self.setup.basis))
            .collect()
    }

    fn realization(&self, params: &ModelParams, seed: u64) -> Result<Outcome> {
        let cfg = self.cfg;
        let m = &cfg.measures;
        let (values, vectors) = solve_realization(cfg, &self.setup, params, seed, m.needs_vectors())?;
        let mut out = Outcome { seed, spacings: None, lsi_error: None, metrics: Vec::new(), vectors: None };
        if m.lsi {
            match unfold(&values, &cfg.unfolding) {
                Ok(s) => {
                    out.metrics.push(("eta".into(), lsi(&s)?));
                    out.spacings = Some(s);
                }
                Err(Error::Statistics(msg)) => out.lsi_error = Some(msg),
                Err(e) => return Err(e),
            }
        }
        let Some(v) = vectors else { return Ok(out) };
        let window = cfg.central_band.map(|c| central_window(values.len(), c));
        let mut push_npc = |name: &str, xi: Vec<f64>| {
            out.metrics.push((name.to_string(), mean(&xi)));
            if let Some(w) = &window {
                out.metrics.push((format!("{name}_central"), mean(&xi[w.clone()])));
            }
        };
        if m.npc_c {
            push_npc("xi_c", npc_columns(&v, &BasisFrame::computational())?);
        }
        if let Some(frame) = &self.j_frame {
            push_npc("xi_j", npc_columns(&v, frame)?);
        }
        if self.plan.is_some() {
            let rows = self.entanglement_rows(&values, &v)?;
            let avg = |f: &dyn Fn(&EntanglementRow) -> Option<f64>| {
                mean(&rows.iter().filter_map(f).collect::<Vec<_>>())
            };
            if m.concurrence {
                out.metrics.push(("C".into(), avg(&|r| r.concurrence)));
            }
            for &n in &m.purities {
                out.metrics.push((format!("P{n}"), avg(&|r| r.purity(n))));
            }
            if m.purities.contains(&1) {
                out.metrics.push(("Q1".into(), avg(&|r| r.meyer_wallach())));
            }
            if m.fermionic {
                out.metrics.push(("Pu".into(), avg(&|r| r.fermionic)));
            }
            if m.entropies {
                out.metrics.push(("S_lin".into(), avg(&|r| r.linear_entropy)));
                out.metrics.push(("S_vn".into(), avg(&|r| r.von_neumann)));
            }
        }
        if m.npc_r {
            out.vectors = Some(v);
        }
        Ok(out)
    }

    fn row(&self, ratio: f64) -> Result<DiagnosticsRow> {
        let cfg = self.cfg;
        let params = resolve_case(cfg.case, ratio, cfg.law)?;
        let count = cfg.effective_realizations();
        let seeds: Vec<u64> =
            (0..count as u64).map(|k| realization_seed(cfg.master_seed, k)).collect();
        // Chunks bound the number of eigenvector sets held for ξ_r.
        let chunk = rayon::current_num_threads().max(1);
        let mut outcomes = Vec::with_capacity(count);
        let mut xi_r_pairs = Vec::new();
        let mut previous: Option<Matrix> = None;
        for batch in seeds.chunks(chunk) {
            let mut done = batch
                .par_iter()
                .map(|&s| self.realization(&params, s))
                .collect::<Result<Vec<_>>>()?;
            if cfg.measures.npc_r {
                let mut chain: Vec<Matrix> = previous.take().into_iter().collect();
                chain.extend(done.iter_mut().map(|o| o.vectors.take().expect("vectors kept")));
                if chain.len() >= 2 {
                    xi_r_pairs.extend(relative_npc(&chain)?);
                }
                previous = chain.pop();
            }
            outcomes.extend(done);
        }

        let mut metrics = BTreeMap::new();
        let mut lsi_flag = None;
        for name in metric_names(cfg) {
            let summary = match name.as_str() {
                "eta" if cfg.lsi_mode == LsiMode::Pooled => {
                    let samples: Vec<&SpacingSample> =
                        outcomes.iter().filter_map(|o| o.spacings.as_ref()).collect();
                    if samples.is_empty() {
                        None
                    } else {
                        let eta = lsi(&SpacingSample::pooled(samples))?;
                        Some(Summary { mean: eta, std_error: None })
                    }
                }
                "xi_r" => Summary::of(&xi_r_pairs),
                _ => {
                    let xs: Vec<f64> = outcomes
                        .iter()
                        .flat_map(|o| o.metrics.iter().filter(|(k, _)| *k == name).map(|(_, x)| *x))
                        .collect();
                    Summary::of(&xs)
                }
            };
            match summary {
                Some(s) => {
                    metrics.insert(name, s);
                }
                None if name == "eta" => {
                    lsi_flag = outcomes.iter().find_map(|o| o.lsi_error.clone());
                }
                None if name == "xi_r" => {}
                None => {
                    return Err(Error::Statistics(format!("no samples for {name}")));
                }
            }
        }
        let spacing = || outcomes.iter().filter_map(|o| o.spacings.as_ref());
        Ok(DiagnosticsRow {
            ratio,
            params,
            sector: self.setup.label.clone(),
            sector_dim: self.setup.dim(),
            seeds: outcomes.iter().map(|o| o.seed).collect(),
            metrics,
            xi_r_pairs,
            degeneracies: spacing().map(|s| s.degeneracies).sum(),
            clamped: spacing().map(|s| s.clamped).sum(),
            lsi_flag,
        })
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Runs every ratio of the grid; rows come back in ascending ratio order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<DiagnosticsRow>> {
    let ctx = Context::new(cfg)?;
    cfg.sorted_ratios().into_iter().map(|r| ctx.row(r)).collect()
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

pub fn sweep_csv(cfg: &SweepConfig, rows: &[DiagnosticsRow]) -> Result<String> {
    let hash = cfg.hash()?;
    let names = metric_names(cfg);
    let mut out = String::from(
        "config_hash,case,ratio,eps_mean,eps_spread,j_mean,j_spread,sector,sector_dim,\
         realizations,seeds,degeneracies,clamped,flags",
    );
    for n in &names {
        let _ = write!(out, ",{n}_mean,{n}_se");
    }
    out.push('\n');
    let case = toml_name(&cfg.case);
    for r in rows {
        let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
        let flags = r.lsi_flag.as_ref().map(|_| "eta_omitted").unwrap_or("");
        let _ = write!(
            out,
            "{hash},{case},{},{},{},{},{},{},{},{},{},{},{},{flags}",
            fmt_f(r.ratio),
            fmt_f(r.params.eps_mean),
            fmt_f(r.params.eps_spread),
            fmt_f(r.params.j_mean),
            fmt_f(r.params.j_spread),
            r.sector.replace(',', ";"),
            r.sector_dim,
            r.seeds.len(),
            seeds.join(";"),
            r.degeneracies,
            r.clamped,
        );
        for n in &names {
            let s = r.metrics.get(n);
            let _ = write!(
                out,
                ",{},{}",
                fmt_opt(s.map(|s| s.mean)),
                fmt_opt(s.and_then(|s| s.std_error))
            );
        }
        out.push('\n');
    }
    Ok(out)
}

fn toml_name(case: &DisorderCase) -> &'static str {
    match case {
        DisorderCase::JOverDeps => "J_over_deps",
        DisorderCase::DjOverJ => "dJ_over_J",
        DisorderCase::DjOverDeps => "dJ_over_deps",
        DisorderCase::Clean => "clean",
    }
}

/// One eigenstate of one realization.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterRow {
    pub realization: usize,
    pub seed: u64,
    pub energy: f64,
    pub xi_c: f64,
    pub xi_j: Option<f64>,
    pub entanglement: Option<EntanglementRow>,
}

/// Per-eigenstate measures at a single ratio.
pub fn run_scatter(cfg: &SweepConfig, ratio: f64) -> Result<Vec<ScatterRow>> {
    let ctx = Context::new(cfg)?;
    let params = resolve_case(cfg.case, ratio, cfg.law)?;
    let per_realization = (0..cfg.effective_realizations())
        .into_par_iter()
        .map(|k| -> Result<Vec<ScatterRow>> {
            let seed = realization_seed(cfg.master_seed, k as u64);
            let (values, v) = solve_realization(cfg, &ctx.setup, &params, seed, true)?;
            let v = v.expect("vectors requested");
            let xi_c = npc_columns(&v, &BasisFrame::computational())?;
            let xi_j = ctx.j_frame.as_ref().map(|f| npc_columns(&v, f)).transpose()?;
            let ent = if ctx.plan.is_some() { Some(ctx.entanglement_rows(&values, &v)?) } else { None };
            Ok((0..values.len())
                .map(|i| ScatterRow {
                    realization: k,
                    seed,
                    energy: values[i],
                    xi_c: xi_c[i],
                    xi_j: xi_j.as_ref().map(|x| x[i]),
                    entanglement: ent.as_ref().map(|e| e[i].clone()),
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_realization.into_iter().flatten().collect())
}

pub fn scatter_csv(cfg: &SweepConfig, rows: &[ScatterRow]) -> Result<String> {
    let hash = cfg.hash()?;
    let purities = &cfg.measures.purities;
    let mut out = String::from("config_hash,realization,seed,energy,xi_c,xi_j,C");
    for n in purities {
        let _ = write!(out, ",P{n}");
    }
    out.push_str(",Q1,Pu,S_lin,S_vn\n");
    for r in rows {
        let e = r.entanglement.as_ref();
        let _ = write!(
            out,
            "{hash},{},{},{},{},{},{}",
            r.realization,
            r.seed,
            fmt_f(r.energy),
            fmt_f(r.xi_c),
            fmt_opt(r.xi_j),
            fmt_opt(e.and_then(|e| e.concurrence))
        );
        for &n in purities {
            let _ = write!(out, ",{}", fmt_opt(e.and_then(|e| e.purity(n))));
        }
        let _ = writeln!(
            out,
            ",{},{},{},{}",
            fmt_opt(e.and_then(EntanglementRow::meyer_wallach)),
            fmt_opt(e.and_then(|e| e.fermionic)),
            fmt_opt(e.and_then(|e| e.linear_entropy)),
            fmt_opt(e.and_then(|e| e.von_neumann)),
        );
    }
    Ok(out)
}

/// Raw sector eigenvalues of every realization at one ratio.
pub fn run_spectrum(cfg: &SweepConfig, ratio: f64) -> Result<Vec<(u64, Vec<f64>)>> {
    cfg.validate()?;
    let setup = prepare_sector(cfg)?;
    let params = resolve_case(cfg.case, ratio, cfg.law)?;
    (0..cfg.effective_realizations() as u64)
        .into_par_iter()
        .map(|k| {
            let seed = realization_seed(cfg.master_seed, k);
            Ok((seed, solve_realization(cfg, &setup, &params, seed, false)?.0))
        })
        .collect()
}

pub fn spectrum_csv(cfg: &SweepConfig, spectra: &[(u64, Vec<f64>)]) -> Result<String> {
    let hash = cfg.hash()?;
    let mut out = String::from("config_hash,realization,seed,index,energy\n");
    for (k, (seed, values)) in spectra.iter().enumerate() {
        for (i, e) in values.iter().enumerate() {
            let _ = writeln!(out, "{hash},{k},{seed},{i},{}", fmt_f(*e));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineRow {
    pub n: usize,
    pub analytic: f64,
    pub enumerated: f64,
    pub monte_carlo: Estimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineReport {
    pub sites: usize,
    pub samples: usize,
    pub purities: Vec<BaselineRow>,
    pub goe_npc: f64,
    pub npc_monte_carlo: Estimate,
}

/// Closed-form, enumerated and Monte-Carlo expected purities for the
/// `S_z = 0` subspace of `sites` spins, plus the random-vector NPC.
pub fn run_baseline(sites: usize, samples: usize, seed: u64) -> Result<BaselineReport> {
    let table = expected_purities(sites)?;
    let orders: Vec<usize> = PURITY_ORDERS.iter().copied().filter(|&n| table.get(n).is_some()).collect();
    let mc = monte_carlo_purities(sites, &orders, samples, seed)?;
    let purities = mc
        .into_iter()
        .map(|(n, est)| {
            Ok(BaselineRow {
                n,
                analytic: table.get(n).expect("order in table"),
                enumerated: expected_purity_by_enumeration(sites, n)?,
                monte_carlo: est,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (npc_monte_carlo, goe_npc) = monte_carlo_npc(table.n0, samples, seed)?;
    Ok(BaselineReport { sites, samples, purities, goe_npc, npc_monte_carlo })
}

impl BaselineReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("quantity,analytic,enumerated,monte_carlo_mean,std_error\n");
        for r in &self.purities {
            let _ = writeln!(
                out,
                "P{},{},{},{},{}",
                r.n,
                fmt_f(r.analytic),
                fmt_f(r.enumerated),
                fmt_f(r.monte_carlo.mean),
                fmt_f(r.monte_carlo.std_error)
            );
        }
        let _ = writeln!(
            out,
            "xi_goe,{},{},{},{}",
            fmt_f(self.goe_npc),
            fmt_f(self.goe_npc),
            fmt_f(self.npc_monte_carlo.mean),
            fmt_f(self.npc_monte_carlo.std_error)
        );
        out
    }
}
