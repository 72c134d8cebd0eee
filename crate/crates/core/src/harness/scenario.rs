//! Scenario files: flat `key = value` text with dotted keys, or the same
//! tree as JSON.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::cycles::{simple_cycle_from_speed, simple_cycle_from_step, CycleSpec};
use crate::error::{Error, Result};
use crate::opt::OptimizerConfig;
use crate::params::{WalkerParams, WalkerSpec};
use crate::sim::{Controller, Gains, ImpulseEvent, ReferenceTrajectories, Replan, StartState, WalkSetup};
use crate::stabilizers::SplitPriority;

/// Benchmark starting CoM height and torso angle.
pub const BENCH_Y0: f64 = 0.95;
pub const BENCH_THETA0: f64 = -0.175;
/// Distance from the stance foot back to the trailing foot at the start.
pub const BENCH_FOOT_GAP: f64 = 0.2;

/// Boundary start used for each controller when a scenario gives none.
pub fn benchmark_start(controller: &str, backward: bool) -> (f64, f64) {
    match (controller, backward) {
        ("cop", false) => (-0.5, 0.3),
        ("steplen", false) => (-0.49, 0.29),
        ("steptime", false) => (-0.705, 0.505),
        ("steplen", true) => (0.49, -0.29),
        (_, true) => (0.57, -0.37),
        _ => (-0.67, 0.47),
    }
}

/// A validated, ready-to-run scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub setup: WalkSetup,
    pub controller: Controller,
    /// Reserved; runs are deterministic.
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::from_value(Value::Object(Map::new())).expect("defaults are valid")
    }
}

impl Scenario {
    /// Benchmark setup for a controller from its forward or backward
    /// boundary start, with the standard impulse scaled by `scale`.
    pub fn benchmark(controller: &str, backward: bool, scale: f64) -> Result<Self> {
        let (p, q) = benchmark_start(controller, backward);
        let mut root = Map::new();
        root.insert("controller".into(), controller.into());
        root.insert("start".into(), serde_json::json!({ "p": p, "q": q }));
        root.insert("impulse".into(), serde_json::json!({ "scale": scale }));
        Self::from_value(Value::Object(root))
    }

    /// Same scenario with the impulses replaced by one scaled standard push.
    pub fn with_impulse_scale(&self, scale: f64) -> Self {
        let mut s = self.clone();
        s.setup.impulses = if scale == 0.0 { Vec::new() } else { vec![ImpulseEvent::standard(scale)] };
        s
    }

    pub fn with_controller(&self, controller: Controller) -> Self {
        Self { controller, ..self.clone() }
    }

    pub fn params(&self) -> &WalkerParams {
        &self.setup.params
    }

    pub fn cycle(&self) -> &CycleSpec {
        &self.setup.cycle
    }

    /// Builds a scenario from a nested JSON tree, filling defaults.
    pub fn from_value(v: Value) -> Result<Self> {
        let raw: RawScenario = serde_path_to_error::deserialize(v).map_err(|e| Error::Scenario {
            field: e.path().to_string(),
            reason: e.inner().to_string(),
        })?;
        raw.build()
    }
}

/// Reads a scenario file. Files whose first non-blank character is `{` are
/// JSON; everything else is the flat text form.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, &path.display().to_string())
}

/// Reads a scenario file (or the defaults when `path` is `None`) with
/// dotted-key overrides replacing whatever the file sets.
pub fn load_scenario_with(path: Option<&Path>, overrides: &[(&str, Value)]) -> Result<Scenario> {
    let (text, origin) = match path {
        Some(p) => (
            std::fs::read_to_string(p)
                .map_err(|e| Error::Io { path: p.display().to_string(), message: e.to_string() })?,
            p.display().to_string(),
        ),
        None => (String::new(), "<defaults>".to_string()),
    };
    parse_scenario_with(&text, &origin, overrides)
}

/// Parses scenario text; `origin` labels error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    parse_scenario_with(text, origin, &[])
}

fn parse_scenario_with(text: &str, origin: &str, overrides: &[(&str, Value)]) -> Result<Scenario> {
    let (mut tree, mut lines) = parse_tree(text, origin)?;
    for (key, value) in overrides {
        remove_dotted(&mut tree, key);
        insert_dotted(&mut tree, key, value.clone()).map_err(|reason| Error::Scenario { field: key.to_string(), reason })?;
        lines.remove(*key);
    }
    Scenario::from_value(tree).map_err(|e| match e {
        Error::Scenario { field, reason } => match lines.get(&field) {
            Some(&line) => Error::Parse { path: origin.into(), line, message: format!("`{field}`: {reason}") },
            None => Error::Scenario { field, reason },
        },
        other => other,
    })
}

/// Parses either format into a nested tree plus the line of each flat key.
pub(crate) fn parse_tree(text: &str, origin: &str) -> Result<(Value, HashMap<String, usize>)> {
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.into(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if !v.is_object() {
            return Err(Error::Parse { path: origin.into(), line: 1, message: "expected a JSON object".into() });
        }
        return Ok((v, HashMap::new()));
    }
    let mut root = Value::Object(Map::new());
    let mut lines = HashMap::new();
    for (key, value, line) in flat_entries(text, origin)? {
        insert_dotted(&mut root, &key, value).map_err(|message| Error::Parse {
            path: origin.into(),
            line,
            message,
        })?;
        lines.insert(key, line);
    }
    Ok((root, lines))
}

/// `(key, value, line)` triples of a flat scenario text.
pub(crate) fn flat_entries(text: &str, origin: &str) -> Result<Vec<(String, Value, usize)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { path: origin.into(), line, message };
        let (key, value) = body.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{body}`")))?;
        let key = key.trim();
        let valid = !key.is_empty()
            && key.split('.').all(|seg| !seg.is_empty() && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
        if !valid {
            return Err(err(format!("malformed key `{key}`")));
        }
        let value = value.trim();
        if value.is_empty() {
            return Err(err(format!("missing value for `{key}`")));
        }
        out.push((key.to_string(), scalar(value), line));
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// JSON literal if it parses as one, otherwise a bare string.
fn scalar(v: &str) -> Value {
    serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()))
}

fn remove_dotted(root: &mut Value, key: &str) {
    let (parent, leaf) = match key.rsplit_once('.') {
        Some((parent, leaf)) => (root.pointer_mut(&format!("/{}", parent.replace('.', "/"))), leaf),
        None => (Some(root), key),
    };
    if let Some(Value::Object(map)) = parent {
        map.remove(leaf);
    }
}

pub(crate) fn insert_dotted(root: &mut Value, key: &str, value: Value) -> std::result::Result<(), String> {
    let mut node = root;
    let mut segs = key.split('.').peekable();
    while let Some(seg) = segs.next() {
        let Value::Object(map) = node else {
            return Err(format!("`{key}` nests under a key that already holds a value"));
        };
        if segs.peek().is_none() {
            if map.contains_key(seg) {
                return Err(format!("duplicate key `{key}`"));
            }
            map.insert(seg.to_string(), value);
            return Ok(());
        }
        node = map.entry(seg).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawScenario {
    params: WalkerSpec,
    cycle: RawCycle,
    start: RawStart,
    controller: Option<String>,
    cop: RawCop,
    combined: RawCombined,
    optimizer: OptimizerConfig,
    impulse: RawImpulse,
    impulses: Option<Vec<ImpulseEvent>>,
    refs: RawRefs,
    gains: RawGains,
    sim: RawSim,
    seed: u64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawCycle {
    l_c: Option<f64>,
    t_c: Option<f64>,
    v_c: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawStart {
    p: Option<f64>,
    q: Option<f64>,
    x0: Option<f64>,
    xdot0: Option<f64>,
    backward: bool,
    z_stance: Option<f64>,
    z_swing: Option<f64>,
    y0: Option<f64>,
    theta0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawCop {
    gain: f64,
}

impl Default for RawCop {
    fn default() -> Self {
        Self { gain: 5.0 }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawCombined {
    priority: SplitPriority,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawImpulse {
    scale: f64,
    step: usize,
    onset: f64,
    duration: f64,
}

impl Default for RawImpulse {
    fn default() -> Self {
        let s = ImpulseEvent::standard(1.0);
        Self { scale: 1.0, step: s.step_index, onset: s.onset_in_step, duration: s.duration }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawRefs {
    flat: bool,
    a_y: Option<f64>,
    phi_y: Option<f64>,
    a_h: Option<f64>,
    phi_h: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawGains {
    kp_y: f64,
    kv_y: f64,
    kp_theta: f64,
    kv_theta: f64,
}

impl Default for RawGains {
    fn default() -> Self {
        let g = Gains::default();
        Self { kp_y: g.kp_y, kv_y: g.kv_y, kp_theta: g.kp_theta, kv_theta: g.kv_theta }
    }
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSim {
    n_steps: usize,
    dt: f64,
    /// `default`, `step_start` or `periodic`.
    replan: String,
    replan_period: f64,
}

impl Default for RawSim {
    fn default() -> Self {
        Self { n_steps: 20, dt: 1e-4, replan: "default".into(), replan_period: 1e-3 }
    }
}

fn field_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Scenario { field: field.into(), reason: reason.into() }
}

fn both_or_neither(a: Option<f64>, b: Option<f64>, name_a: &str, name_b: &str) -> Result<Option<(f64, f64)>> {
    match (a, b) {
        (Some(a), Some(b)) => Ok(Some((a, b))),
        (None, None) => Ok(None),
        (None, Some(_)) => Err(field_err(name_a, format!("required together with `{name_b}`"))),
        (Some(_), None) => Err(field_err(name_b, format!("required together with `{name_a}`"))),
    }
}

impl RawScenario {
    fn build(self) -> Result<Scenario> {
        let params = self.params.build().map_err(|e| match e {
            Error::InvalidParam { field, reason } => field_err(&format!("params.{field}"), reason),
            other => other,
        })?;

        let l_c = self.cycle.l_c.unwrap_or(0.5);
        let cycle = match (self.cycle.v_c, self.cycle.t_c) {
            (Some(_), Some(_)) => return Err(field_err("cycle.v_c", "give either `cycle.t_c` or `cycle.v_c`, not both")),
            (Some(v), None) => simple_cycle_from_speed(v, l_c, &params),
            (None, t) => simple_cycle_from_step(l_c, t.unwrap_or(0.4), &params),
        }
        .map_err(|e| field_err("cycle", e.to_string()))?;

        let controller_name = self.controller.unwrap_or_else(|| "optimal".into());
        let controller = match controller_name.as_str() {
            "cop" => Controller::Cop { gain: self.cop.gain },
            "combined" => Controller::Combined { priority: self.combined.priority },
            "optimal" => Controller::Optimal(self.optimizer),
            other => Controller::from_name(other).map_err(|e| field_err("controller", e.to_string()))?,
        };

        let st = self.start;
        let pq = both_or_neither(st.p, st.q, "start.p", "start.q")?;
        let explicit = both_or_neither(st.x0, st.xdot0, "start.x0", "start.xdot0")?;
        let start = match (pq, explicit) {
            (Some(_), Some(_)) => return Err(field_err("start", "give either (p, q) or (x0, xdot0), not both")),
            (Some((p, q)), None) => StartState::Pq { p, q },
            (None, Some((x0, xdot0))) => StartState::Explicit { x0, xdot0 },
            (None, None) => {
                let (p, q) = benchmark_start(&controller_name, st.backward);
                StartState::Pq { p, q }
            }
        };
        let heading_back = match start {
            StartState::Pq { p, q } => q - p < 0.0,
            StartState::Explicit { xdot0, .. } => xdot0 < 0.0,
        };
        let z_stance = st.z_stance.unwrap_or(0.0);
        let gap = if heading_back { BENCH_FOOT_GAP } else { -BENCH_FOOT_GAP };
        let z_swing = st.z_swing.unwrap_or(z_stance + gap);

        let mut refs = if self.refs.flat {
            ReferenceTrajectories::flat(cycle.t_c)
        } else {
            ReferenceTrajectories::walking(cycle.t_c, cycle.v_c, &params)
        };
        refs.a_y = self.refs.a_y.unwrap_or(refs.a_y);
        refs.phi_y = self.refs.phi_y.unwrap_or(refs.phi_y);
        refs.a_h = self.refs.a_h.unwrap_or(refs.a_h);
        refs.phi_h = self.refs.phi_h.unwrap_or(refs.phi_h);

        let impulses = match self.impulses {
            Some(list) => list,
            None if self.impulse.scale == 0.0 => Vec::new(),
            None => vec![ImpulseEvent {
                step_index: self.impulse.step,
                onset_in_step: self.impulse.onset,
                duration: self.impulse.duration,
                ..ImpulseEvent::standard(self.impulse.scale)
            }],
        };

        let replan = match self.sim.replan.as_str() {
            "default" => None,
            "step_start" => Some(Replan::StepStart),
            "periodic" => Some(Replan::Periodic { period: self.sim.replan_period }),
            other => return Err(field_err("sim.replan", format!("expected default, step_start or periodic, got `{other}`"))),
        };

        let g = self.gains;
        let setup = WalkSetup {
            params,
            cycle,
            start,
            z_stance,
            z_swing,
            y0: st.y0.unwrap_or(BENCH_Y0),
            theta0: st.theta0.unwrap_or(BENCH_THETA0),
            n_steps: self.sim.n_steps,
            dt: self.sim.dt,
            refs,
            gains: Gains { kp_y: g.kp_y, kv_y: g.kv_y, kp_theta: g.kp_theta, kv_theta: g.kv_theta },
            impulses,
            replan,
        };
        setup.validate().map_err(|e| match e {
            Error::InvalidParam { field, reason } => field_err(&scenario_key(field), reason),
            other => field_err("scenario", other.to_string()),
        })?;
        Ok(Scenario { setup, controller, seed: self.seed })
    }
}

/// Maps a setup field name onto the scenario key that sets it.
fn scenario_key(field: &str) -> String {
    match field {
        "n_steps" | "dt" => format!("sim.{field}"),
        "replan.period" => "sim.replan_period".into(),
        other => other.into(),
    }
}
