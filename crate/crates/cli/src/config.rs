//! Line-based `key = value` run configuration with dotted sections.
//!
//! Recognized keys:
//!
//! ```text
//! sys.m, sys.a, sys.b
//! bc.kind  = neumann | dirichlet | robin
//! bc.alpha = one value or m comma-separated values (robin)
//! bc.beta  = m comma-separated values (robin)
//! region.l = comma-separated 1-based indices kept in L (default: all)
//! reaction.builtin_q = positive integer   (exclusive with reaction.file)
//! reaction.file      = path to a monomial file
//! lyapunov.p_m   = integer >= 2
//! lyapunov.theta = auto | m-1 comma-separated positive values
//! mesh.x, mesh.n_cells
//! time.t_final, time.dt (number | auto), time.sample_every
//! seed
//! init.w = m comma-separated constants (optional; default: seeded
//!          smooth in-region data driven by `seed`)
//! ```
//!
//! Unknown keys are rejected.

use rdtoeplitz::reactions::{builtin_family, parse_reaction_file, ReactionSpec};
use rdtoeplitz::regions::RegionSpec;
use rdtoeplitz::simulate::{BcKind, BoundarySpec, InitialData, Mesh1D};
use rdtoeplitz::spectral::ToeplitzSystem;
use std::collections::BTreeMap;

#[derive(Debug)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

#[derive(Debug)]
pub enum ThetaChoice {
    Auto,
    Explicit(Vec<f64>),
}

/// Parsed and validated configuration, still holding the theta choice
/// unresolved (the `auto` search needs the decomposition).
#[derive(Debug)]
pub struct RunConfig {
    pub sys: ToeplitzSystem,
    pub bc: BoundarySpec,
    pub region: RegionSpec,
    pub reaction: ReactionSpec,
    pub degree: u32,
    pub theta: ThetaChoice,
    pub mesh: Mesh1D,
    pub t_final: f64,
    pub dt: Option<f64>,
    pub sample_every: usize,
    pub initial: InitialData,
}

const KNOWN_KEYS: &[&str] = &[
    "sys.m",
    "sys.a",
    "sys.b",
    "bc.kind",
    "bc.alpha",
    "bc.beta",
    "region.l",
    "reaction.builtin_q",
    "reaction.file",
    "lyapunov.p_m",
    "lyapunov.theta",
    "mesh.x",
    "mesh.n_cells",
    "time.t_final",
    "time.dt",
    "time.sample_every",
    "seed",
    "init.w",
];

impl RawConfig {
    pub fn parse(src: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{key}`", lineno + 1));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
            }
        }
        Ok(Self { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&str, String> {
        self.get(key).ok_or_else(|| format!("missing key `{key}`"))
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str) -> Result<T, String> {
        self.require(key)?
            .parse()
            .map_err(|_| format!("key `{key}`: cannot parse `{}`", self.values[key]))
    }

    fn parse_list(&self, key: &str) -> Result<Vec<f64>, String> {
        self.require(key)?
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| format!("key `{key}`: bad number `{}`", t.trim()))
            })
            .collect()
    }
}

pub fn build_run_config(src: &str) -> Result<RunConfig, String> {
    let raw = RawConfig::parse(src)?;

    let m: usize = raw.parse_num("sys.m")?;
    let a: f64 = raw.parse_num("sys.a")?;
    let b: f64 = raw.parse_num("sys.b")?;
    let sys = ToeplitzSystem::new(m, a, b).map_err(|e| e.to_string())?;

    let bc = match raw.require("bc.kind")? {
        "neumann" => BoundarySpec::uniform(BcKind::Neumann, m),
        "dirichlet" => BoundarySpec::uniform(BcKind::Dirichlet, m),
        "robin" => {
            let alphas = raw.parse_list("bc.alpha")?;
            let alphas = match alphas.len() {
                1 => vec![alphas[0]; m],
                n if n == m => alphas,
                n => return Err(format!("bc.alpha: expected 1 or {m} values, got {n}")),
            };
            let betas = raw.parse_list("bc.beta")?;
            if betas.len() != m {
                return Err(format!("bc.beta: expected {m} values, got {}", betas.len()));
            }
            let kinds = alphas
                .into_iter()
                .zip(betas)
                .map(|(alpha, beta)| BcKind::Robin { alpha, beta })
                .collect();
            BoundarySpec::new(kinds)
        }
        other => return Err(format!("bc.kind: unknown kind `{other}`")),
    }
    .map_err(|e| e.to_string())?;

    let region = match raw.get("region.l") {
        None => RegionSpec::all_l(m),
        Some(spec) => {
            let indices: Vec<usize> = if spec.trim().is_empty() {
                Vec::new()
            } else {
                spec.split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| format!("region.l: bad index `{}`", t.trim()))
                    })
                    .collect::<Result<_, String>>()?
            };
            RegionSpec::from_l_indices(m, &indices)
        }
    }
    .map_err(|e| e.to_string())?;

    let reaction = match (raw.get("reaction.builtin_q"), raw.get("reaction.file")) {
        (Some(q), None) => {
            let q: u32 = q
                .parse()
                .map_err(|_| format!("reaction.builtin_q: bad integer `{q}`"))?;
            builtin_family(m, q).map_err(|e| e.to_string())?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("reaction.file `{path}`: {e}"))?;
            parse_reaction_file(&text, m).map_err(|e| e.to_string())?
        }
        (Some(_), Some(_)) => {
            return Err("reaction.builtin_q and reaction.file are exclusive".into())
        }
        (None, None) => return Err("missing reaction.builtin_q or reaction.file".into()),
    };

    let degree: u32 = raw.parse_num("lyapunov.p_m")?;
    if degree < 2 {
        return Err(format!("lyapunov.p_m must be >= 2, got {degree}"));
    }
    let theta = match raw.require("lyapunov.theta")? {
        "auto" => ThetaChoice::Auto,
        _ => {
            let list = raw.parse_list("lyapunov.theta")?;
            if list.len() != m - 1 {
                return Err(format!(
                    "lyapunov.theta: expected {} values, got {}",
                    m - 1,
                    list.len()
                ));
            }
            ThetaChoice::Explicit(list)
        }
    };

    let mesh = Mesh1D::new(raw.parse_num("mesh.x")?, raw.parse_num("mesh.n_cells")?)
        .map_err(|e| e.to_string())?;

    let t_final: f64 = raw.parse_num("time.t_final")?;
    let dt = match raw.get("time.dt") {
        None => None,
        Some("auto") => None,
        Some(v) => Some(
            v.parse::<f64>()
                .map_err(|_| format!("time.dt: bad number `{v}`"))?,
        ),
    };
    let sample_every: usize = match raw.get("time.sample_every") {
        None => 1,
        Some(v) => v
            .parse()
            .map_err(|_| format!("time.sample_every: bad integer `{v}`"))?,
    };
    let seed: u64 = match raw.get("seed") {
        None => 0,
        Some(v) => v.parse().map_err(|_| format!("seed: bad integer `{v}`"))?,
    };

    let initial = match raw.get("init.w") {
        Some(_) => {
            let vals = raw.parse_list("init.w")?;
            if vals.len() != m {
                return Err(format!("init.w: expected {m} values, got {}", vals.len()));
            }
            InitialData::UniformW(vals)
        }
        None => InitialData::SeededSmooth {
            seed,
            base: 1.0,
            amplitude: 0.5,
        },
    };

    Ok(RunConfig {
        sys,
        bc,
        region,
        reaction,
        degree,
        theta,
        mesh,
        t_final,
        dt,
        sample_every,
        initial,
    })
}
