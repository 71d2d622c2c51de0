//! Deterministic reactive execution of a plan against a primitive provider.
//!
//! The engine re-descends the tree from the drive collection every tick; the
//! only state carried across ticks is per-drive last-fired bookkeeping,
//! action-pattern cursors and retry budgets. Stub primitives are answered
//! from registry defaults and the provider is never consulted for them,
//! which is what keeps stub-gated sub-trees locked: a trigger atom that
//! needs a stub sense to deviate from its default can never pass.
//!
//! Semantics fixed here:
//! - Drives are scanned in priority order; a drive is eligible iff its
//!   trigger holds and `tick - last_fired > frequency_ticks` (or it has
//!   never fired). The first eligible drive fires. Triggers of scanned
//!   drives are evaluated in full (no short-circuit), so lock notes are
//!   complete for everything scanned up to the firing drive.
//! - A competence whose goal holds succeeds without executing and clears
//!   cursors and retry budgets beneath it. Otherwise its first element with
//!   a satisfied trigger and remaining retries runs; the choice is
//!   committed, there is no backtracking within a tick.
//! - An action pattern executes the step at its cursor: advance on succeed,
//!   hold on running, reset and fail the pattern on fail.
//! - At most one action executes per tick. A failure propagates up the
//!   descent path and decrements the retry budget of every competence
//!   element on it.
//! - On ticks where a drive fired, cursors and retry budgets stored under
//!   paths not on the taken descent chain are invalidated. Fallback and
//!   goal ticks leave them untouched, so a frequency-gated drive resumes
//!   its pattern across idle ticks.

use std::collections::BTreeMap;

use crate::model::{ActionResult, Plan, SenseValue, TargetKind, Trigger, ROOT_SEGMENT};
use crate::registry::{DefaultReturn, ImplStatus, PrimitiveRegistry};

/// Host-side implementation of the primitives a plan references. Consulted
/// only for primitives whose registry status is `implemented`.
pub trait PrimitiveProvider {
    /// `None` means the provider cannot answer for this sense; the engine
    /// turns that into an error naming the sense.
    fn read_sense(&mut self, name: &str) -> Option<SenseValue>;
    fn execute_action(&mut self, name: &str) -> ActionResult;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TickResult {
    Succeed,
    Fail,
    Running,
    Fallback,
}

impl TickResult {
    pub fn as_str(self) -> &'static str {
        match self {
            TickResult::Succeed => "succeed",
            TickResult::Fail => "fail",
            TickResult::Running => "running",
            TickResult::Fallback => "fallback",
        }
    }
}

impl From<ActionResult> for TickResult {
    fn from(r: ActionResult) -> TickResult {
        match r {
            ActionResult::Succeed => TickResult::Succeed,
            ActionResult::Fail => TickResult::Fail,
            ActionResult::Running => TickResult::Running,
        }
    }
}

/// What one tick decided and did.
#[derive(Debug, Clone, PartialEq)]
pub struct TickDecision {
    pub tick: u64,
    /// Name of the drive that fired; `None` on fallback and goal ticks.
    pub drive: Option<String>,
    /// Descent path to the deepest container visited, e.g.
    /// `DC/patrol/ap-patrol`.
    pub path: Option<String>,
    /// The action executed this tick, if any.
    pub action: Option<String>,
    pub result: TickResult,
    pub notes: Vec<String>,
}

impl TickDecision {
    /// One trace line:
    /// `tick=<n> drive=<name|-> path=<a/b/c|-> action=<name|-> result=<r> notes=<comma-list|->`
    pub fn render(&self) -> String {
        let dash = |o: &Option<String>| o.clone().unwrap_or_else(|| "-".to_string());
        let notes = if self.notes.is_empty() {
            "-".to_string()
        } else {
            self.notes.join(",")
        };
        format!(
            "tick={} drive={} path={} action={} result={} notes={}",
            self.tick,
            dash(&self.drive),
            dash(&self.path),
            dash(&self.action),
            self.result.as_str(),
            notes
        )
    }
}

/// Render a trace as LF-terminated lines.
pub fn render_trace(trace: &[TickDecision]) -> String {
    let mut out = String::new();
    for d in trace {
        out.push_str(&d.render());
        out.push('\n');
    }
    out
}

/// Mutable engine bookkeeping threaded between ticks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EngineState {
    /// Next tick number.
    pub tick: u64,
    last_fired: BTreeMap<String, u64>,
    /// Action-pattern cursors keyed by descent path.
    cursors: BTreeMap<String, usize>,
    /// Remaining retry budgets keyed by (competence path, element name).
    retries: BTreeMap<(String, String), u64>,
}

impl EngineState {
    pub fn new() -> EngineState {
        EngineState::default()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("provider could not answer implemented sense `{0}`")]
    SenseUnavailable(String),
    #[error("primitive `{0}` is missing from the registry")]
    UnknownPrimitive(String),
    #[error("`{0}` is registered as the wrong primitive kind")]
    WrongKind(String),
    #[error("no eligible drive and no fallback")]
    NoEligibleDrive,
}

/// An engine error tagged with the tick it happened on.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("tick {tick}: {source}")]
pub struct RunError {
    pub tick: u64,
    pub source: EngineError,
}

const GOAL_REACHED: &str = "goal-reached";

/// Ordered, deduplicated note list.
#[derive(Debug, Default)]
struct Notes(Vec<String>);

impl Notes {
    fn push(&mut self, note: String) {
        if !self.0.contains(&note) {
            self.0.push(note);
        }
    }
}

fn read_sense(
    name: &str,
    registry: &PrimitiveRegistry,
    provider: &mut dyn PrimitiveProvider,
) -> Result<(SenseValue, bool), EngineError> {
    let status = registry
        .status_of(name)
        .ok_or_else(|| EngineError::UnknownPrimitive(name.to_string()))?;
    match (status.status, status.default_return) {
        (ImplStatus::Stub, DefaultReturn::Sense(v)) => Ok((v, true)),
        (ImplStatus::Stub, DefaultReturn::Action(_)) => {
            Err(EngineError::WrongKind(name.to_string()))
        }
        (ImplStatus::Implemented, _) => provider
            .read_sense(name)
            .map(|v| (v, false))
            .ok_or_else(|| EngineError::SenseUnavailable(name.to_string())),
    }
}

fn execute_action(
    name: &str,
    registry: &PrimitiveRegistry,
    provider: &mut dyn PrimitiveProvider,
) -> Result<ActionResult, EngineError> {
    let status = registry
        .status_of(name)
        .ok_or_else(|| EngineError::UnknownPrimitive(name.to_string()))?;
    match (status.status, status.default_return) {
        (ImplStatus::Stub, DefaultReturn::Action(r)) => Ok(r),
        (ImplStatus::Stub, DefaultReturn::Sense(_)) => {
            Err(EngineError::WrongKind(name.to_string()))
        }
        (ImplStatus::Implemented, _) => Ok(provider.execute_action(name)),
    }
}

/// Evaluate a trigger as a conjunction. Every atom is read (stubs from
/// registry defaults, implemented senses from the provider) and compared to
/// its expected value; a `locked:<sense>` note is recorded for each atom
/// that failed while its sense is still a stub.
pub fn evaluate_trigger(
    trigger: &Trigger,
    registry: &PrimitiveRegistry,
    provider: &mut dyn PrimitiveProvider,
) -> Result<(bool, Vec<String>), EngineError> {
    let mut holds = true;
    let mut notes = Vec::new();
    for atom in &trigger.atoms {
        let (value, is_stub) = read_sense(&atom.sense, registry, provider)?;
        let ok = value.compare(atom.predicate, atom.expected);
        if !ok {
            holds = false;
            if is_stub {
                let note = format!("locked:{}", atom.sense);
                if !notes.contains(&note) {
                    notes.push(note);
                }
            }
        }
    }
    Ok((holds, notes))
}

enum Descent {
    Executed { action: String, result: ActionResult },
    NoAction { success: bool },
}

impl Descent {
    fn failed(&self) -> bool {
        matches!(
            self,
            Descent::Executed {
                result: ActionResult::Fail,
                ..
            } | Descent::NoAction { success: false }
        )
    }
}

struct Ctx<'a> {
    plan: &'a Plan,
    registry: &'a PrimitiveRegistry,
    provider: &'a mut dyn PrimitiveProvider,
    state: &'a mut EngineState,
    /// Container paths visited this tick, in descent order.
    chain: Vec<String>,
    notes: Notes,
}

impl<'a> Ctx<'a> {
    fn descend(&mut self, target: &str, parent_path: &str) -> Result<Descent, EngineError> {
        match self.plan.resolve_target(target) {
            Some(TargetKind::Action(a)) => {
                let result = execute_action(a, self.registry, self.provider)?;
                Ok(Descent::Executed {
                    action: a.to_string(),
                    result,
                })
            }
            Some(TargetKind::Pattern(ap)) => {
                let path = format!("{parent_path}/{}", ap.name);
                self.chain.push(path.clone());
                let mut cursor = self.state.cursors.get(&path).copied().unwrap_or(0);
                if cursor >= ap.steps.len() {
                    cursor = 0;
                }
                let step = ap.steps[cursor].clone();
                let result = execute_action(&step, self.registry, self.provider)?;
                match result {
                    ActionResult::Succeed => {
                        if cursor + 1 == ap.steps.len() {
                            self.state.cursors.remove(&path);
                        } else {
                            self.state.cursors.insert(path, cursor + 1);
                        }
                    }
                    ActionResult::Fail => {
                        self.state.cursors.remove(&path);
                    }
                    ActionResult::Running => {
                        self.state.cursors.insert(path, cursor);
                    }
                }
                Ok(Descent::Executed {
                    action: step,
                    result,
                })
            }
            Some(TargetKind::Competence(c)) => {
                let path = format!("{parent_path}/{}", c.name);
                self.chain.push(path.clone());
                if let Some(goal) = &c.goal {
                    let (holds, lock) =
                        evaluate_trigger(goal, self.registry, self.provider)?;
                    for n in lock {
                        self.notes.push(n);
                    }
                    if holds {
                        let prefix = format!("{path}/");
                        self.state.cursors.retain(|k, _| !k.starts_with(&prefix));
                        self.state
                            .retries
                            .retain(|(cp, _), _| cp != &path && !cp.starts_with(&prefix));
                        return Ok(Descent::NoAction { success: true });
                    }
                }
                for elem in &c.elements {
                    let (holds, lock) =
                        evaluate_trigger(&elem.trigger, self.registry, self.provider)?;
                    for n in lock {
                        self.notes.push(n);
                    }
                    if !holds {
                        continue;
                    }
                    let key = (path.clone(), elem.name.clone());
                    let remaining = match elem.retries {
                        None => None,
                        Some(budget) => {
                            Some(self.state.retries.get(&key).copied().unwrap_or(budget))
                        }
                    };
                    if remaining == Some(0) {
                        continue;
                    }
                    let outcome = self.descend(&elem.target, &path)?;
                    if outcome.failed() {
                        if let Some(r) = remaining {
                            self.state.retries.insert(key, r.saturating_sub(1));
                        }
                    }
                    return Ok(outcome);
                }
                Ok(Descent::NoAction { success: false })
            }
            None => Ok(Descent::NoAction { success: false }),
        }
    }
}

/// Advance the plan one tick, mutating `state` in place.
pub fn tick(
    plan: &Plan,
    registry: &PrimitiveRegistry,
    provider: &mut dyn PrimitiveProvider,
    state: &mut EngineState,
) -> Result<TickDecision, EngineError> {
    let t = state.tick;
    state.tick += 1;
    let dc = &plan.drive_collection;
    let mut ctx = Ctx {
        plan,
        registry,
        provider,
        state,
        chain: Vec::new(),
        notes: Notes::default(),
    };

    if let Some(goal) = &dc.goal {
        let (holds, lock) = evaluate_trigger(goal, ctx.registry, ctx.provider)?;
        for n in lock {
            ctx.notes.push(n);
        }
        if holds {
            ctx.notes.push(GOAL_REACHED.to_string());
            return Ok(TickDecision {
                tick: t,
                drive: None,
                path: None,
                action: None,
                result: TickResult::Succeed,
                notes: ctx.notes.0,
            });
        }
    }

    for drive in &dc.drives {
        let (holds, lock) = evaluate_trigger(&drive.trigger, ctx.registry, ctx.provider)?;
        for n in lock {
            ctx.notes.push(n);
        }
        if !holds {
            continue;
        }
        let eligible = match ctx.state.last_fired.get(&drive.name) {
            None => true,
            Some(last) => t - last > drive.frequency_ticks,
        };
        if !eligible {
            continue;
        }
        ctx.state.last_fired.insert(drive.name.clone(), t);
        let drive_path = format!("{ROOT_SEGMENT}/{}", drive.name);
        ctx.chain.push(drive_path.clone());
        let outcome = ctx.descend(&drive.target, &drive_path)?;

        let chain = std::mem::take(&mut ctx.chain);
        ctx.state.cursors.retain(|k, _| chain.contains(k));
        ctx.state
            .retries
            .retain(|(cp, _), _| chain.contains(cp));

        let path = chain.last().cloned();
        let (action, result) = match outcome {
            Descent::Executed { action, result } => (Some(action), result.into()),
            Descent::NoAction { success: true } => (None, TickResult::Succeed),
            Descent::NoAction { success: false } => (None, TickResult::Fail),
        };
        return Ok(TickDecision {
            tick: t,
            drive: Some(drive.name.clone()),
            path,
            action,
            result,
            notes: ctx.notes.0,
        });
    }

    match &dc.fallback_action {
        Some(fb) => {
            execute_action(fb, ctx.registry, ctx.provider)?;
            Ok(TickDecision {
                tick: t,
                drive: None,
                path: None,
                action: Some(fb.clone()),
                result: TickResult::Fallback,
                notes: ctx.notes.0,
            })
        }
        None => Err(EngineError::NoEligibleDrive),
    }
}

/// Run `ticks` sequential ticks threading one engine state. Stops early
/// when the drive collection goal is reached; the goal decision is the last
/// trace entry.
pub fn run(
    plan: &Plan,
    registry: &PrimitiveRegistry,
    provider: &mut dyn PrimitiveProvider,
    ticks: u64,
) -> Result<Vec<TickDecision>, RunError> {
    let mut state = EngineState::new();
    let mut trace = Vec::new();
    for _ in 0..ticks {
        let t = state.tick;
        let decision = tick(plan, registry, provider, &mut state)
            .map_err(|source| RunError { tick: t, source })?;
        let done = decision.notes.iter().any(|n| n == GOAL_REACHED);
        trace.push(decision);
        if done {
            break;
        }
    }
    Ok(trace)
}

// ---------------------------------------------------------------------------
// Naive reference interpreter
// ---------------------------------------------------------------------------

struct ValuationProvider<'a> {
    valuation: &'a BTreeMap<String, SenseValue>,
}

impl PrimitiveProvider for ValuationProvider<'_> {
    fn read_sense(&mut self, name: &str) -> Option<SenseValue> {
        self.valuation.get(name).copied()
    }

    fn execute_action(&mut self, _name: &str) -> ActionResult {
        ActionResult::Succeed
    }
}

/// Brute-force oracle: recompute the selected drive, path and action by a
/// plain exhaustive descent with fresh cursors and budgets, no caching, and
/// all action executions assumed to succeed. Implemented senses read from
/// the valuation, stubs from registry defaults, exactly as the engine does.
pub fn reference_tick(
    plan: &Plan,
    registry: &PrimitiveRegistry,
    valuation: &BTreeMap<String, SenseValue>,
) -> Result<TickDecision, EngineError> {
    let mut provider = ValuationProvider { valuation };
    let mut state = EngineState::new();
    tick(plan, registry, &mut provider, &mut state)
}

// ---------------------------------------------------------------------------
