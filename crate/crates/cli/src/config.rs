//! Run configuration: the JSON file consumed by every subcommand. Unknown
//! keys are rejected everywhere so typos surface as parse errors.

use serde::{Deserialize, Serialize};
use stpx_core::{
    standard_transition, LatticeSpec, ModelSpec64, Restriction, State, TransitionKind,
    TransitionSpec64,
};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Lattice length.
    pub n: usize,
    /// Logic arity: `m − 1` particle species, `m = 2` is single-species.
    pub m: usize,
    pub transitions: Vec<TransitionRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<RestrictionSection>,
}

/// One transition: a kind plus whichever parameters that kind needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species: Option<usize>,
    /// Second species of a `switch`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub species2: Option<usize>,
    /// Head site of a `footprint-hop`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<usize>,
    /// Block width of the `footprint-*` kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub footprint: Option<usize>,
    /// Jump length of a `long-range-hop` (may be negative).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<i64>,
    pub rate: f64,
    /// Optional label override; defaults to the canonical kind name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RestrictionSection {
    /// Reachability closure of the empty lattice; `r` is the block width.
    Footprint { r: usize },
    /// Explicit allowable states as digit strings (site 1 first).
    States { states: Vec<String> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub method: String,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { method: "power".into(), tol: 1e-10, max_iter: 1_000_000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub steps: u64,
    #[serde(default)]
    pub burn_in: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_chains")]
    pub chains: usize,
}

fn default_chains() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: String,
    pub tables: Vec<String>,
}

pub const ALL_TABLES: [&str; 3] = ["steady_state", "densities", "currents"];

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: "./out".into(),
            tables: ALL_TABLES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("config parse error: {e}")))?;
        for table in &cfg.output.tables {
            if !ALL_TABLES.contains(&table.as_str()) {
                return Err(CliError::Input(format!(
                    "output.tables contains unknown table `{table}` (choose from {ALL_TABLES:?})"
                )));
            }
        }
        Ok(cfg)
    }

    pub fn lattice(&self) -> Result<LatticeSpec, CliError> {
        LatticeSpec::new(self.model.n, self.model.m)
            .map_err(|e| CliError::Input(format!("model: {e}")))
    }

    /// Validates the model section into a solvable model.
    pub fn build_model(&self) -> Result<ModelSpec64, CliError> {
        let lattice = self.lattice()?;
        let mut transitions = Vec::with_capacity(self.model.transitions.len());
        for (i, record) in self.model.transitions.iter().enumerate() {
            transitions.push(build_transition(record, &lattice).map_err(|msg| {
                CliError::Input(format!("transitions[{i}] ({}): {msg}", record.kind))
            })?);
        }
        let restriction = match &self.model.restriction {
            None => Restriction::None,
            Some(RestrictionSection::Footprint { r }) => Restriction::Footprint { width: *r },
            Some(RestrictionSection::States { states }) => {
                let mut parsed = Vec::with_capacity(states.len());
                for (i, text) in states.iter().enumerate() {
                    parsed.push(parse_state(text, &lattice).map_err(|msg| {
                        CliError::Input(format!("restriction.states[{i}]: {msg}"))
                    })?);
                }
                Restriction::Explicit { states: parsed }
            }
        };
        ModelSpec64::new(lattice, transitions, restriction)
            .map_err(|e| CliError::Input(format!("model: {e}")))
    }
}

fn parse_state(text: &str, lattice: &LatticeSpec) -> Result<State, String> {
    let digits: Result<Vec<usize>, String> = if text.contains('.') {
        text.split('.')
            .map(|d| d.parse::<usize>().map_err(|_| format!("bad digit `{d}`")))
            .collect()
    } else {
        text.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or(format!("bad digit `{c}`")))
            .collect()
    };
    lattice.state(digits?).map_err(|e| e.to_string())
}

fn build_transition(
    record: &TransitionRecord,
    lattice: &LatticeSpec,
) -> Result<TransitionSpec64, String> {
    let kind = record_kind(record)?;
    let t = standard_transition(&kind, lattice, record.rate).map_err(|e| e.to_string())?;
    match &record.name {
        None => Ok(t),
        Some(name) => TransitionSpec64::new(
            name.clone(),
            t.rate(),
            *lattice,
            t.site_functions().to_vec(),
        )
        .map_err(|e| e.to_string()),
    }
}

fn record_kind(record: &TransitionRecord) -> Result<TransitionKind, String> {
    use TransitionKind::*;

    let need = |field: Option<usize>, what: &str| {
        field.ok_or_else(|| format!("`{}` needs a `{what}` field", record.kind))
    };
    let forbid = |absent: &[(&str, bool)]| -> Result<(), String> {
        for (what, present) in absent {
            if *present {
                return Err(format!("`{}` takes no `{what}` field", record.kind));
            }
        }
        Ok(())
    };
    let fields = [
        ("site", record.site.is_some()),
        ("species", record.species.is_some()),
        ("species2", record.species2.is_some()),
        ("head", record.head.is_some()),
        ("footprint", record.footprint.is_some()),
        ("length", record.length.is_some()),
    ];
    let only = |allowed: &[&str]| -> Result<(), String> {
        let extra: Vec<_> = fields
            .iter()
            .filter(|(name, present)| *present && !allowed.contains(name))
            .collect();
        forbid(&extra.iter().map(|(n, p)| (*n, *p)).collect::<Vec<_>>())
    };

    let kind = match record.kind.as_str() {
        "left-entry" => {
            only(&[])?;
            LeftEntry
        }
        "right-entry" => {
            only(&[])?;
            RightEntry
        }
        "left-exit" => {
            only(&[])?;
            LeftExit
        }
        "right-exit" => {
            only(&[])?;
            RightExit
        }
        "periodic-wrap-hop" => {
            only(&[])?;
            PeriodicWrapHop
        }
        "attach" => {
            only(&["site"])?;
            Attach { site: need(record.site, "site")? }
        }
        "detach" => {
            only(&["site"])?;
            Detach { site: need(record.site, "site")? }
        }
        "hop-right" => {
            only(&["site"])?;
            HopRight { site: need(record.site, "site")? }
        }
        "hop-left" => {
            only(&["site"])?;
            HopLeft { site: need(record.site, "site")? }
        }
        "generic-hop" => {
            only(&["site"])?;
            GenericHop { site: need(record.site, "site")? }
        }
        "long-range-hop" => {
            only(&["site", "length"])?;
            let length = record.length.ok_or("`long-range-hop` needs a `length` field")?;
            LongRangeHop { site: need(record.site, "site")?, length: length as isize }
        }
        "species-entry" => {
            only(&["species"])?;
            SpeciesEntry { species: need(record.species, "species")? }
        }
        "species-exit" => {
            only(&["species"])?;
            SpeciesExit { species: need(record.species, "species")? }
        }
        "species-attach" => {
            only(&["species", "site"])?;
            SpeciesAttach {
                species: need(record.species, "species")?,
                site: need(record.site, "site")?,
            }
        }
        "species-detach" => {
            only(&["species", "site"])?;
            SpeciesDetach {
                species: need(record.species, "species")?,
                site: need(record.site, "site")?,
            }
        }
        "switch" => {
            only(&["species", "species2", "site"])?;
            Switch {
                left: need(record.species, "species")?,
                right: need(record.species2, "species2")?,
                site: need(record.site, "site")?,
            }
        }
        "footprint-entry" => {
            only(&["footprint"])?;
            FootprintEntry { width: need(record.footprint, "footprint")? }
        }
        "footprint-exit" => {
            only(&["footprint"])?;
            FootprintExit { width: need(record.footprint, "footprint")? }
        }
        "footprint-hop" => {
            only(&["footprint", "head"])?;
            FootprintHop {
                width: need(record.footprint, "footprint")?,
                head: need(record.head, "head")?,
            }
        }
        other => return Err(format!("unknown transition kind `{other}`")),
    };
    Ok(kind)
}
