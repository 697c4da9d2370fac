//! Flag/config-file resolution. A config file holds "key = value" lines
//! (keys match the long flag names); command-line flags override it. All
//! preconditions are checked here, before any computation starts.

use crate::{CliError, MapArg, MapOpts};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::path::Path;
use tsi_lab::map_orbits::{doubling_orbit_exact, MapKind, MapSpec};
use tsi_lab::tsi_state::FockVector;

pub type Result<T> = std::result::Result<T, CliError>;

/// A fully validated map + degree selection.
pub struct RunConfig {
    pub map: ResolvedMap,
    pub n: usize,
}

/// Either a plain map or the exact rational doubling mode.
pub enum ResolvedMap {
    Spec(MapSpec),
    ExactDoubling { numer: u64, denom: u64 },
}

impl ResolvedMap {
    pub fn build_state(&self, n: usize) -> Result<FockVector> {
        match self {
            ResolvedMap::Spec(map) => Ok(tsi_lab::tsi_state::build_tsi(map, n)?),
            ResolvedMap::ExactDoubling { numer, denom } => {
                let orbit = doubling_orbit_exact(*numer, *denom, n)?;
                Ok(FockVector::new(orbit.values().to_vec())?.normalized()?)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ResolvedMap::Spec(map) => format!(
                "{} mu={} seed={}",
                map.kind.name(),
                map.mu,
                map.seed
            ),
            ResolvedMap::ExactDoubling { numer, denom } => {
                format!("doubling seed={numer}/{denom} (exact)")
            }
        }
    }
}

fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config {}:{}: expected \"key = value\"",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolve the map options against an optional config file and validate.
pub fn resolve(opts: &MapOpts) -> Result<RunConfig> {
    let file = match &opts.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let get = |key: &str| file.get(key).cloned();

    let map_arg = match (&opts.map, get("map")) {
        (Some(m), _) => *m,
        (None, Some(s)) => parse_map_name(&s)?,
        (None, None) => return Err(CliError::Usage("missing --map".into())),
    };
    let mu = match (opts.mu, get("mu")) {
        (Some(v), _) => v,
        (None, Some(s)) => s
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("config mu: bad number {s:?}")))?,
        (None, None) => 0.0,
    };
    if mu == 0.0 && needs_mu(map_arg) && get("mu").is_none() && opts.mu.is_none() {
        return Err(CliError::Usage(format!(
            "--mu is required for the {} map",
            map_name(map_arg)
        )));
    }
    let seed_text = match (&opts.seed, get("seed")) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::Usage("missing --seed".into())),
    };
    let n = match (opts.n, get("n")) {
        (Some(v), _) => v,
        (None, Some(s)) => s
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("config n: bad integer {s:?}")))?,
        (None, None) => return Err(CliError::Usage("missing --n".into())),
    };

    let map = build_map(map_arg, mu, &seed_text)?;
    Ok(RunConfig { map, n })
}

fn needs_mu(map: MapArg) -> bool {
    !matches!(map, MapArg::Doubling)
}

fn map_name(map: MapArg) -> &'static str {
    map_kind(map).name()
}

fn map_kind(map: MapArg) -> MapKind {
    match map {
        MapArg::Doubling => MapKind::Doubling,
        MapArg::Logistic => MapKind::Logistic,
        MapArg::Quadratic => MapKind::Quadratic,
        MapArg::Sine => MapKind::Sine,
        MapArg::Exponential => MapKind::Exponential,
    }
}

fn parse_map_name(name: &str) -> Result<MapArg> {
    match name {
        "doubling" => Ok(MapArg::Doubling),
        "logistic" => Ok(MapArg::Logistic),
        "quadratic" => Ok(MapArg::Quadratic),
        "sine" => Ok(MapArg::Sine),
        "exponential" => Ok(MapArg::Exponential),
        other => Err(CliError::Usage(format!("config map: unknown map {other:?}"))),
    }
}

fn build_map(map: MapArg, mu: f64, seed_text: &str) -> Result<ResolvedMap> {
    if let Some((p, q)) = seed_text.split_once('/') {
        let numer = p
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("bad rational seed numerator {p:?}")))?;
        let denom = q
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("bad rational seed denominator {q:?}")))?;
        if map != MapArg::Doubling {
            return Err(CliError::Usage(
                "exact rational seeds are supported by the doubling map only".into(),
            ));
        }
        // validate eagerly so errors surface before any computation
        doubling_orbit_exact(numer, denom, 0)?;
        return Ok(ResolvedMap::ExactDoubling { numer, denom });
    }
    let seed = parse_complex(seed_text)?;
    Ok(ResolvedMap::Spec(MapSpec::new(map_kind(map), mu, seed)?))
}

pub fn parse_complex(text: &str) -> Result<Complex64> {
    if let Ok(re) = text.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    text.parse::<Complex64>()
        .map_err(|_| CliError::Usage(format!("cannot parse {text:?} as a number (try \"0.3\" or \"0.1+0.2i\")")))
}

/// Comma-separated f64 list ("0.99,0.95,0.9").
pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number {part:?} in list")))
        })
        .collect()
}

/// "lo:hi:steps" inclusive grid.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "bad grid {text:?}, expected \"lo:hi:steps\""
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid lower edge {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid upper edge {:?}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid step count {:?}", parts[2])))?;
    if steps < 2 || hi <= lo {
        return Err(CliError::Usage("grid needs hi > lo and steps >= 2".into()));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Permutation like "1,0,4,3,2".
pub fn parse_root_order(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad index {part:?} in root order")))
        })
        .collect()
}

/// Cutoff override: the flag wins, then TSI_LAB_CUTOFF, then the automatic
/// policy (None).
pub fn cutoff_override(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("TSI_LAB_CUTOFF") {
        Ok(text) => {
            let value = text.parse::<usize>().map_err(|_| {
                CliError::Usage(format!("TSI_LAB_CUTOFF: bad integer {text:?}"))
            })?;
            Ok(Some(value))
        }
        Err(_) => Ok(None),
    }
}
