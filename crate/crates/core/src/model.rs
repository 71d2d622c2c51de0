//! In-memory representation and structural validation of behaviour plans.
//!
//! A plan is a drive collection (the prioritized root layer), a set of
//! competences (goal-directed trigger→target element lists), a set of
//! action patterns (fixed action sequences), and the declared action/sense
//! primitives the tree is allowed to reference. Plans are immutable after
//! construction and safe to share read-only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Root segment used in element paths, e.g. `DC/patrol/ap-patrol`.
pub const ROOT_SEGMENT: &str = "DC";

// ---------------------------------------------------------------------------
// Core types
// ---------------------------------------------------------------------------

/// Comparison operator applied between an observed sense value and the
/// atom's expected value, as `observed PRED expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Predicate {
    pub fn symbol(self) -> &'static str {
        match self {
            Predicate::Eq => "==",
            Predicate::Ne => "!=",
            Predicate::Lt => "<",
            Predicate::Gt => ">",
            Predicate::Le => "<=",
            Predicate::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Predicate> {
        match s {
            "==" => Some(Predicate::Eq),
            "!=" => Some(Predicate::Ne),
            "<" => Some(Predicate::Lt),
            ">" => Some(Predicate::Gt),
            "<=" => Some(Predicate::Le),
            ">=" => Some(Predicate::Ge),
            _ => None,
        }
    }

    /// Ordering predicates may only be applied to numeric expectations.
    pub fn is_ordering(self) -> bool {
        !matches!(self, Predicate::Eq | Predicate::Ne)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A value a sense can produce or an atom can expect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SenseValue {
    Bool(bool),
    Num(f64),
}

/// Absolute tolerance for numeric equality on non-integer values.
pub const NUM_EQ_TOLERANCE: f64 = 1e-9;

impl SenseValue {
    /// Compare `self PRED expected`. Comparisons across mismatched types are
    /// false, except `!=` which is true. Numeric equality is exact on
    /// integers and uses a 1e-9 absolute tolerance otherwise.
    pub fn compare(self, predicate: Predicate, expected: SenseValue) -> bool {
        match (self, expected) {
            (SenseValue::Bool(a), SenseValue::Bool(b)) => match predicate {
                Predicate::Eq => a == b,
                Predicate::Ne => a != b,
                _ => false,
            },
            (SenseValue::Num(a), SenseValue::Num(b)) => {
                let eq = if a.fract() == 0.0 && b.fract() == 0.0 {
                    a == b
                } else {
                    (a - b).abs() <= NUM_EQ_TOLERANCE
                };
                match predicate {
                    Predicate::Eq => eq,
                    Predicate::Ne => !eq,
                    Predicate::Lt => a < b,
                    Predicate::Gt => a > b,
                    Predicate::Le => a < b || eq,
                    Predicate::Ge => a > b || eq,
                }
            }
            _ => matches!(predicate, Predicate::Ne),
        }
    }
}

impl fmt::Display for SenseValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SenseValue::Bool(b) => write!(f, "{b}"),
            SenseValue::Num(n) => {
                if n.fract() == 0.0 && n.abs() < 9.0e15 {
                    write!(f, "{}", *n as i64)
                } else {
                    write!(f, "{n}")
                }
            }
        }
    }
}

/// Outcome of executing an action primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionResult {
    Succeed,
    Fail,
    Running,
}

impl ActionResult {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionResult::Succeed => "succeed",
            ActionResult::Fail => "fail",
            ActionResult::Running => "running",
        }
    }

    pub fn from_str(s: &str) -> Option<ActionResult> {
        match s {
            "succeed" => Some(ActionResult::Succeed),
            "fail" => Some(ActionResult::Fail),
            "running" => Some(ActionResult::Running),
            _ => None,
        }
    }
}

impl fmt::Display for ActionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One condition in a trigger: a sense compared against an expected value.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseAtom {
    pub sense: String,
    pub expected: SenseValue,
    pub predicate: Predicate,
}

impl SenseAtom {
    /// Atom with the default expectation: sense must read `true`.
    pub fn truthy(sense: impl Into<String>) -> SenseAtom {
        SenseAtom {
            sense: sense.into(),
            expected: SenseValue::Bool(true),
            predicate: Predicate::Eq,
        }
    }

    pub fn is_default_expectation(&self) -> bool {
        self.predicate == Predicate::Eq && self.expected == SenseValue::Bool(true)
    }
}

/// A conjunction of sense atoms. Empty triggers are always satisfied.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trigger {
    pub atoms: Vec<SenseAtom>,
}

impl Trigger {
    pub fn empty() -> Trigger {
        Trigger { atoms: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// A fixed, non-empty sequence of action identifiers executed stepwise
/// across ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionPattern {
    pub name: String,
    pub steps: Vec<String>,
}

/// One prioritized entry of a competence: when `trigger` holds and the
/// retry budget is not exhausted, `target` is executed.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetenceElement {
    pub name: String,
    pub trigger: Trigger,
    pub target: String,
    /// `None` means unbounded retries (the default).
    pub retries: Option<u64>,
}

/// A goal-directed, priority-ordered set of elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Competence {
    pub name: String,
    pub goal: Option<Trigger>,
    pub elements: Vec<CompetenceElement>,
}

/// A top-level prioritized entry of the drive collection.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveElement {
    pub name: String,
    pub trigger: Trigger,
    pub target: String,
    /// Minimum number of ticks between firings; 0 means every tick.
    pub frequency_ticks: u64,
}

/// The root arbitration layer: drives in priority order (earlier = higher),
/// an optional goal that halts execution, and an optional fallback action
/// executed when no drive is eligible.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveCollection {
    pub name: String,
    pub goal: Option<Trigger>,
    pub drives: Vec<DriveElement>,
    pub fallback_action: Option<String>,
}

/// A complete behaviour plan.
///
/// Names are globally unique across actions, senses, competences and action
/// patterns; `validate` reports any violation. Competences and patterns are
/// name-keyed, so two plans that differ only in declaration order are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub declared_actions: BTreeSet<String>,
    pub declared_senses: BTreeSet<String>,
    pub drive_collection: DriveCollection,
    pub competences: BTreeMap<String, Competence>,
    pub action_patterns: BTreeMap<String, ActionPattern>,
}

/// What a target identifier resolves to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetKind<'a> {
    Action(&'a str),
    Competence(&'a Competence),
    Pattern(&'a ActionPattern),
}

impl Plan {
    pub fn resolve_target(&self, name: &str) -> Option<TargetKind<'_>> {
        if let Some(c) = self.competences.get(name) {
            return Some(TargetKind::Competence(c));
        }
        if let Some(ap) = self.action_patterns.get(name) {
            return Some(TargetKind::Pattern(ap));
        }
        if self.declared_actions.contains(name) {
            return Some(TargetKind::Action(
                self.declared_actions.get(name).unwrap().as_str(),
            ));
        }
        None
    }

    pub fn is_valid(&self) -> bool {
        validate(self).is_empty()
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticCategory {
    UnknownReference,
    DuplicateName,
    Cycle,
    EmptyElements,
    InvalidAtom,
}

impl DiagnosticCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCategory::UnknownReference => "unknown-reference",
            DiagnosticCategory::DuplicateName => "duplicate-name",
            DiagnosticCategory::Cycle => "cycle",
            DiagnosticCategory::EmptyElements => "empty-elements",
            DiagnosticCategory::InvalidAtom => "invalid-atom",
        }
    }
}

impl fmt::Display for DiagnosticCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One structural violation found by `validate`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub category: DiagnosticCategory,
    /// Slash-separated path to the offending element, e.g. `DC/guard/fly`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.category, self.path, self.message)
    }
}

fn atom_diagnostics(owner: &str, trigger: &Trigger, plan: &Plan, out: &mut Vec<Diagnostic>) {
    for atom in &trigger.atoms {
        let path = format!("{owner}/{}", atom.sense);
        if !plan.declared_senses.contains(&atom.sense) {
            out.push(Diagnostic {
                category: DiagnosticCategory::UnknownReference,
                path: path.clone(),
                message: format!("unknown sense `{}`", atom.sense),
            });
        }
        if atom.predicate.is_ordering() {
            if let SenseValue::Bool(_) = atom.expected {
                out.push(Diagnostic {
                    category: DiagnosticCategory::InvalidAtom,
                    path,
                    message: format!(
                        "predicate `{}` requires a numeric expected value",
                        atom.predicate
                    ),
                });
            }
        }
    }
}

fn target_diagnostic(owner: &str, target: &str, plan: &Plan, out: &mut Vec<Diagnostic>) {
    if plan.resolve_target(target).is_none() {
        out.push(Diagnostic {
            category: DiagnosticCategory::UnknownReference,
            path: format!("{owner}/{target}"),
            message: format!("unknown target `{target}`"),
        });
    }
}

/// Check every structural invariant of a plan. An empty result means the
/// plan is valid; each violation yields exactly one diagnostic carrying the
/// element path and category.
pub fn validate(plan: &Plan) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    // Global name uniqueness across every declaration kind. `DC` is the
    // reserved root path segment and may not be declared.
    let mut seen: BTreeMap<String, &'static str> = BTreeMap::new();
    let mut declare = |name: &str, kind: &'static str, out: &mut Vec<Diagnostic>| {
        if name == ROOT_SEGMENT {
            out.push(Diagnostic {
                category: DiagnosticCategory::DuplicateName,
                path: name.to_string(),
                message: format!("`{ROOT_SEGMENT}` is reserved for the drive collection root"),
            });
        } else if let Some(prev) = seen.insert(name.to_string(), kind) {
            out.push(Diagnostic {
                category: DiagnosticCategory::DuplicateName,
                path: name.to_string(),
                message: format!("`{name}` declared as both {prev} and {kind}"),
            });
        }
    };
    for a in &plan.declared_actions {
        declare(a, "action", &mut out);
    }
    for s in &plan.declared_senses {
        declare(s, "sense", &mut out);
    }
    for c in plan.competences.keys() {
        declare(c, "competence", &mut out);
    }
    for ap in plan.action_patterns.keys() {
        declare(ap, "action pattern", &mut out);
    }

    let dc = &plan.drive_collection;

    // Drive collection: non-empty, unique drive names, resolvable targets.
    if dc.drives.is_empty() {
        out.push(Diagnostic {
            category: DiagnosticCategory::EmptyElements,
            path: ROOT_SEGMENT.to_string(),
            message: "drive collection has no drives".to_string(),
        });
    }
    if let Some(goal) = &dc.goal {
        atom_diagnostics(ROOT_SEGMENT, goal, plan, &mut out);
    }
    if let Some(fb) = &dc.fallback_action {
        if !plan.declared_actions.contains(fb) {
            out.push(Diagnostic {
                category: DiagnosticCategory::UnknownReference,
                path: format!("{ROOT_SEGMENT}/{fb}"),
                message: format!("fallback `{fb}` is not a declared action"),
            });
        }
    }
    let mut drive_names = BTreeSet::new();
    for drive in &dc.drives {
        let path = format!("{ROOT_SEGMENT}/{}", drive.name);
        if !drive_names.insert(drive.name.as_str()) {
            out.push(Diagnostic {
                category: DiagnosticCategory::DuplicateName,
                path: path.clone(),
                message: format!("duplicate drive name `{}`", drive.name),
            });
        }
        atom_diagnostics(&path, &drive.trigger, plan, &mut out);
        target_diagnostic(&path, &drive.target, plan, &mut out);
    }

    // Competences: non-empty, unique element names, resolvable references.
    for (name, comp) in &plan.competences {
        if comp.elements.is_empty() {
            out.push(Diagnostic {
                category: DiagnosticCategory::EmptyElements,
                path: name.clone(),
                message: format!("competence `{name}` has no elements"),
            });
        }
        if let Some(goal) = &comp.goal {
            atom_diagnostics(name, goal, plan, &mut out);
        }
        let mut elem_names = BTreeSet::new();
        for elem in &comp.elements {
            let path = format!("{name}/{}", elem.name);
            if !elem_names.insert(elem.name.as_str()) {
                out.push(Diagnostic {
                    category: DiagnosticCategory::DuplicateName,
                    path: path.clone(),
                    message: format!("duplicate element name `{}`", elem.name),
                });
            }
            atom_diagnostics(&path, &elem.trigger, plan, &mut out);
            target_diagnostic(&path, &elem.target, plan, &mut out);
        }
    }

    // Action patterns: non-empty, steps name declared actions.
    for (name, ap) in &plan.action_patterns {
        if ap.steps.is_empty() {
            out.push(Diagnostic {
                category: DiagnosticCategory::EmptyElements,
                path: name.clone(),
                message: format!("action pattern `{name}` has no steps"),
            });
        }
        for step in &ap.steps {
            if !plan.declared_actions.contains(step) {
                out.push(Diagnostic {
                    category: DiagnosticCategory::UnknownReference,
                    path: format!("{name}/{step}"),
                    message: format!("step `{step}` is not a declared action"),
                });
            }
        }
    }

    // Cycle detection over the competence -> competence reference graph.
    // Each back edge is reported once, on the element that closes the cycle.
    let mut state: BTreeMap<&str, u8> = BTreeMap::new(); // 1 = visiting, 2 = done
    fn dfs<'p>(
        plan: &'p Plan,
        name: &'p str,
        state: &mut BTreeMap<&'p str, u8>,
        stack: &mut Vec<&'p str>,
        out: &mut Vec<Diagnostic>,
    ) {
        state.insert(name, 1);
        stack.push(name);
        if let Some(comp) = plan.competences.get(name) {
            for elem in &comp.elements {
                if plan.competences.contains_key(&elem.target) {
                    match state.get(elem.target.as_str()) {
                        Some(1) => {
                            let start = stack
                                .iter()
                                .position(|n| *n == elem.target.as_str())
                                .unwrap_or(0);
                            let mut cycle: Vec<&str> = stack[start..].to_vec();
                            cycle.push(&elem.target);
                            out.push(Diagnostic {
                                category: DiagnosticCategory::Cycle,
                                path: format!("{name}/{}/{}", elem.name, elem.target),
                                message: format!("competence cycle: {}", cycle.join(" -> ")),
                            });
                        }
                        Some(2) => {}
                        _ => dfs(plan, &elem.target, state, stack, out),
                    }
                }
            }
        }
        stack.pop();
        state.insert(name, 2);
    }
    for name in plan.competences.keys() {
        if !state.contains_key(name.as_str()) {
            let mut stack = Vec::new();
            dfs(plan, name, &mut state, &mut stack, &mut out);
        }
    }

    out
}

// ---------------------------------------------------------------------------
// Subtrees
// ---------------------------------------------------------------------------

/// What kind of plan element a subtree is rooted at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubtreeRootKind {
    Drive,
    Competence,
    Pattern,
}

/// One sub-tree of the plan: a drive element, or a reachable competence or
/// action pattern, together with the transitive set of primitives and
/// nested elements it references.
#[derive(Debug, Clone, PartialEq)]
pub struct Subtree {
    pub kind: SubtreeRootKind,
    /// `DC/<drive>` for drives; the bare element name otherwise.
    pub root_path: String,
    /// Name of the root element.
    pub title: String,
    /// Competences and patterns transitively contained under this root.
    pub elements: Vec<String>,
    pub actions: BTreeSet<String>,
    pub senses: BTreeSet<String>,
    /// Longest node distance from the root to an action reference.
    pub depth: u64,
}

impl Subtree {
    /// All referenced primitives, actions and senses together.
    pub fn primitives(&self) -> BTreeSet<String> {
        self.actions.union(&self.senses).cloned().collect()
    }
}

#[derive(Debug, Default)]
struct Gathered {
    elements: Vec<String>,
    actions: BTreeSet<String>,
    senses: BTreeSet<String>,
    depth: u64,
}

fn gather_target(plan: &Plan, target: &str, acc: &mut Gathered, visited: &mut BTreeSet<String>) {
    match plan.resolve_target(target) {
        Some(TargetKind::Action(a)) => {
            acc.actions.insert(a.to_string());
            acc.depth = acc.depth.max(1);
        }
        Some(TargetKind::Competence(c)) => {
            if visited.insert(c.name.clone()) {
                acc.elements.push(c.name.clone());
            }
            let mut inner = Gathered::default();
            gather_competence(plan, c, &mut inner, visited);
            acc.actions.extend(inner.actions);
            acc.senses.extend(inner.senses);
            for e in inner.elements {
                if !acc.elements.contains(&e) {
                    acc.elements.push(e);
                }
            }
            acc.depth = acc.depth.max(1 + inner.depth);
        }
        Some(TargetKind::Pattern(ap)) => {
            if visited.insert(ap.name.clone()) {
                acc.elements.push(ap.name.clone());
            }
            for step in &ap.steps {
                acc.actions.insert(step.clone());
            }
            acc.depth = acc.depth.max(2);
        }
        None => {}
    }
}

fn gather_competence(
    plan: &Plan,
    comp: &Competence,
    acc: &mut Gathered,
    visited: &mut BTreeSet<String>,
) {
    if let Some(goal) = &comp.goal {
        for atom in &goal.atoms {
            acc.senses.insert(atom.sense.clone());
        }
    }
    for elem in &comp.elements {
        for atom in &elem.trigger.atoms {
            acc.senses.insert(atom.sense.clone());
        }
        gather_target(plan, &elem.target, acc, visited);
    }
}

/// Decompose a plan into its sub-trees: one per drive element, then one per
/// reachable competence and action pattern in depth-first discovery order.
///
/// Fails with the validation diagnostics when the plan is invalid.
pub fn subtrees(plan: &Plan) -> Result<Vec<Subtree>, Vec<Diagnostic>> {
    let diags = validate(plan);
    if !diags.is_empty() {
        return Err(diags);
    }

    let mut out = Vec::new();
    let mut discovered: Vec<String> = Vec::new(); // reachable C/AP names, DFS order

    for drive in &plan.drive_collection.drives {
        let mut acc = Gathered::default();
        for atom in &drive.trigger.atoms {
            acc.senses.insert(atom.sense.clone());
        }
        let mut visited = BTreeSet::new();
        gather_target(plan, &drive.target, &mut acc, &mut visited);
        for name in &acc.elements {
            if !discovered.contains(name) {
                discovered.push(name.clone());
            }
        }
        out.push(Subtree {
            kind: SubtreeRootKind::Drive,
            root_path: format!("{ROOT_SEGMENT}/{}", drive.name),
            title: drive.name.clone(),
            elements: acc.elements,
            actions: acc.actions,
            senses: acc.senses,
            depth: acc.depth,
        });
    }

    for name in discovered {
        if let Some(comp) = plan.competences.get(&name) {
            let mut acc = Gathered::default();
            let mut visited = BTreeSet::new();
            visited.insert(name.clone());
            gather_competence(plan, comp, &mut acc, &mut visited);
            out.push(Subtree {
                kind: SubtreeRootKind::Competence,
                root_path: name.clone(),
                title: name.clone(),
                elements: acc.elements,
                actions: acc.actions,
                senses: acc.senses,
                depth: acc.depth,
            });
        } else if let Some(ap) = plan.action_patterns.get(&name) {
            out.push(Subtree {
                kind: SubtreeRootKind::Pattern,
                root_path: name.clone(),
                title: name.clone(),
                elements: Vec::new(),
                actions: ap.steps.iter().cloned().collect(),
                senses: BTreeSet::new(),
                depth: 1,
            });
        }
    }

    Ok(out)
}

// ---------------------------------------------------------------------------
// Path lookup
// ---------------------------------------------------------------------------

/// An element located by `lookup`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanElement<'a> {
    DriveCollection(&'a DriveCollection),
    Drive(&'a DriveElement),
    Competence(&'a Competence),
    CompetenceElement(&'a CompetenceElement),
    Pattern(&'a ActionPattern),
    /// A step or element target that resolves to a declared action.
    ActionRef(&'a str),
}

/// Lookup failure carrying the longest prefix that did resolve.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("path `{path}` not found (resolved prefix `{resolved_prefix}`)")]
pub struct LookupError {
    pub path: String,
    pub resolved_prefix: String,
}

/// Resolve a slash-separated descent path such as
/// `DC/patrol/ap-patrol/move-to-a`. Paths start at the literal `DC` root;
/// after a drive or element name comes the name of its target, after a
/// competence an element name, after a pattern a step name.
pub fn lookup<'a>(plan: &'a Plan, path: &str) -> Result<PlanElement<'a>, LookupError> {
    let segments: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
    let err = |resolved: &[&str]| LookupError {
        path: path.to_string(),
        resolved_prefix: resolved.join("/"),
    };

    let mut it = segments.iter().enumerate();
    match it.next() {
        Some((_, seg)) if *seg == ROOT_SEGMENT => {}
        _ => return Err(err(&[])),
    }
    if segments.len() == 1 {
        return Ok(PlanElement::DriveCollection(&plan.drive_collection));
    }

    let drive_name = segments[1];
    let drive = plan
        .drive_collection
        .drives
        .iter()
        .find(|d| d.name == drive_name)
        .ok_or_else(|| err(&segments[..1]))?;
    if segments.len() == 2 {
        return Ok(PlanElement::Drive(drive));
    }

    // Walk the remaining segments through the target chain.
    let mut current = PlanElement::Drive(drive);
    for (idx, seg) in segments.iter().enumerate().skip(2) {
        let next = match current {
            PlanElement::Drive(d) => follow_target(plan, &d.target, seg),
            PlanElement::CompetenceElement(e) => follow_target(plan, &e.target, seg),
            PlanElement::Competence(c) => c
                .elements
                .iter()
                .find(|e| e.name == *seg)
                .map(PlanElement::CompetenceElement),
            PlanElement::Pattern(ap) => ap
                .steps
                .iter()
                .find(|s| s.as_str() == *seg)
                .map(|s| PlanElement::ActionRef(s.as_str())),
            PlanElement::ActionRef(_) | PlanElement::DriveCollection(_) => None,
        };
        match next {
            Some(elem) => current = elem,
            None => return Err(err(&segments[..idx])),
        }
    }
    Ok(current)
}

fn follow_target<'a>(plan: &'a Plan, target: &str, seg: &str) -> Option<PlanElement<'a>> {
    if seg != target {
        return None;
    }
    match plan.resolve_target(target)? {
        TargetKind::Action(a) => Some(PlanElement::ActionRef(a)),
        TargetKind::Competence(c) => Some(PlanElement::Competence(c)),
        TargetKind::Pattern(ap) => Some(PlanElement::Pattern(ap)),
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl;

    fn stealth() -> Plan {
        dsl::parse(include_str!("../../../fixtures/stealth.abd")).expect("fixture parses")
    }

    #[test]
    fn stealth_fixture_is_valid() {
        assert_eq!(validate(&stealth()), vec![]);
    }

    #[test]
    fn self_cycle_is_reported_once() {
        let text = "(plan (actions (a)) (senses ())\
                    (DC main (drives ((d0 (trigger ()) c1))))\
                    (C c1 (elements ((e0 (trigger ()) c1)))))";
        let plan = dsl::parse_unvalidated(text).expect("parses");
        let diags = validate(&plan);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].category, DiagnosticCategory::Cycle);
        assert_eq!(diags[0].path, "c1/e0/c1");
    }

    #[test]
    fn two_competence_cycle_names_the_loop() {
        let text = "(plan (actions (a)) (senses ())\
                    (DC main (drives ((d0 (trigger ()) c1))))\
                    (C c1 (elements ((e0 (trigger ()) c2))))\
                    (C c2 (elements ((e0 (trigger ()) c1)))))";
        let plan = dsl::parse_unvalidated(text).expect("parses");
        let diags = validate(&plan);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].category, DiagnosticCategory::Cycle);
        assert!(diags[0].message.contains("c1 -> c2 -> c1"));
    }

    #[test]
    fn unknown_target_names_full_path() {
        let text = "(plan (actions (idle)) (senses ())\
                    (DC main (drives ((guard (trigger ()) fly)))))";
        let plan = dsl::parse_unvalidated(text).expect("parses");
        let diags = validate(&plan);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].category, DiagnosticCategory::UnknownReference);
        assert_eq!(diags[0].path, "DC/guard/fly");
    }

    #[test]
    fn unknown_sense_and_bool_ordering_are_flagged() {
        let text = "(plan (actions (idle)) (senses (s))\
                    (DC main (drives ((d0 (trigger ((ghost) (s true <))) idle)))))";
        let plan = dsl::parse_unvalidated(text).expect("parses");
        let diags = validate(&plan);
        let cats: Vec<_> = diags.iter().map(|d| d.category).collect();
        assert!(cats.contains(&DiagnosticCategory::UnknownReference));
        assert!(cats.contains(&DiagnosticCategory::InvalidAtom));
    }

    #[test]
    fn duplicate_names_across_kinds() {
        let text = "(plan (actions (x)) (senses ())\
                    (DC main (drives ((d0 (trigger ()) x))))\
                    (AP x (x)))";
        let plan = dsl::parse_unvalidated(text).expect("parses");
        let diags = validate(&plan);
        assert!(diags
            .iter()
            .any(|d| d.category == DiagnosticCategory::DuplicateName && d.path == "x"));
    }

    #[test]
    fn empty_structures_are_flagged() {
        let plan = Plan {
            declared_actions: ["a".to_string()].into(),
            declared_senses: BTreeSet::new(),
            drive_collection: DriveCollection {
                name: "main".into(),
                goal: None,
                drives: vec![],
                fallback_action: None,
            },
            competences: [(
                "c1".to_string(),
                Competence {
                    name: "c1".into(),
                    goal: None,
                    elements: vec![],
                },
            )]
            .into(),
            action_patterns: [(
                "p1".to_string(),
                ActionPattern {
                    name: "p1".into(),
                    steps: vec![],
                },
            )]
            .into(),
        };
        let cats: Vec<_> = validate(&plan).iter().map(|d| d.category).collect();
        assert_eq!(
            cats.iter()
                .filter(|c| **c == DiagnosticCategory::EmptyElements)
                .count(),
            3
        );
    }

    #[test]
    fn reserved_root_name_is_rejected() {
        let text = "(plan (actions (DC)) (senses ())\
                    (DC main (drives ((d0 (trigger ()) DC)))))";
        let plan = dsl::parse_unvalidated(text).expect("parses");
        assert!(validate(&plan)
            .iter()
            .any(|d| d.category == DiagnosticCategory::DuplicateName));
    }

    #[test]
    fn single_chain_subtrees() {
        let text = "(plan (actions (move-to-a move-to-b)) (senses ())\
                    (DC main (drives ((patrol (trigger ()) ap-patrol))))\
                    (AP ap-patrol (move-to-a move-to-b)))";
        let plan = dsl::parse(text).expect("valid");
        let subs = subtrees(&plan).expect("subtrees");
        assert_eq!(subs.len(), 2);
        assert_eq!(subs[0].root_path, "DC/patrol");
        assert_eq!(
            subs[0].actions,
            ["move-to-a".to_string(), "move-to-b".to_string()].into()
        );
        assert_eq!(subs[1].root_path, "ap-patrol");
        assert_eq!(subs[1].actions, subs[0].actions);
    }

    #[test]
    fn stealth_subtrees_match_hand_enumeration() {
        // Hand-derived from the fixture: three drive sub-trees plus the
        // reachable competences and patterns in discovery order.
        let subs = subtrees(&stealth()).expect("subtrees");
        let roots: Vec<&str> = subs.iter().map(|s| s.root_path.as_str()).collect();
        assert_eq!(
            roots,
            vec![
                "DC/dialogue",
                "DC/investigate",
                "DC/patrol",
                "c-dialogue",
                "ap-greet",
                "c-investigate",
                "ap-patrol"
            ]
        );

        let dialogue = &subs[0];
        assert_eq!(
            dialogue.senses,
            ["player-close".to_string(), "see-player".to_string()].into()
        );
        assert_eq!(dialogue.actions, ["trigger-dialogue".to_string()].into());
        assert_eq!(
            dialogue.elements,
            vec!["c-dialogue".to_string(), "ap-greet".to_string()]
        );

        let investigate = &subs[1];
        assert_eq!(
            investigate.senses,
            ["door-open".to_string(), "see-player".to_string()].into()
        );
        assert_eq!(
            investigate.actions,
            ["move-to-player".to_string(), "open-door".to_string()].into()
        );

        let patrol = &subs[2];
        assert_eq!(patrol.senses, ["door-open".to_string()].into());
        assert_eq!(
            patrol.actions,
            ["move-to-a".to_string(), "move-to-b".to_string()].into()
        );
    }

    #[test]
    fn shared_competence_listed_once() {
        let text = "(plan (actions (a)) (senses ())\
                    (DC main (drives ((d0 (trigger ()) shared) (d1 (trigger ()) shared))))\
                    (C shared (elements ((e0 (trigger ()) a)))))";
        let plan = dsl::parse(text).expect("valid");
        let subs = subtrees(&plan).expect("subtrees");
        let shared: Vec<_> = subs.iter().filter(|s| s.root_path == "shared").collect();
        assert_eq!(shared.len(), 1);
        // Both drive subtrees reference it.
        assert_eq!(subs[0].elements, vec!["shared".to_string()]);
        assert_eq!(subs[1].elements, vec!["shared".to_string()]);
    }

    #[test]
    fn lookup_resolves_spec_paths() {
        let plan = stealth();
        match lookup(&plan, "DC/patrol").expect("drive") {
            PlanElement::Drive(d) => assert_eq!(d.name, "patrol"),
            other => panic!("unexpected element: {other:?}"),
        }
        match lookup(&plan, "DC/patrol/ap-patrol/move-to-a").expect("step") {
            PlanElement::ActionRef(a) => assert_eq!(a, "move-to-a"),
            other => panic!("unexpected element: {other:?}"),
        }
        match lookup(&plan, "DC/investigate/c-investigate/approach").expect("element") {
            PlanElement::CompetenceElement(e) => assert_eq!(e.target, "move-to-player"),
            other => panic!("unexpected element: {other:?}"),
        }
    }

    #[test]
    fn lookup_not_found_carries_prefix() {
        let plan = stealth();
        let err = lookup(&plan, "DC/nope").unwrap_err();
        assert_eq!(err.resolved_prefix, "DC");
        let err = lookup(&plan, "DC/patrol/ap-patrol/fly").unwrap_err();
        assert_eq!(err.resolved_prefix, "DC/patrol/ap-patrol");
    }

    #[test]
    fn sense_value_comparisons() {
        use Predicate::*;
        use SenseValue::*;
        assert!(Num(1.0).compare(Le, Num(2.0)));
        assert!(Num(2.0).compare(Le, Num(2.0)));
        assert!(!Num(3.0).compare(Le, Num(2.0)));
        assert!(Bool(false).compare(Eq, Bool(false)));
        assert!(!Bool(false).compare(Eq, Bool(true)));
        // Mismatched types compare false except for `!=`.
        assert!(!Bool(false).compare(Lt, Num(2.0)));
        assert!(Bool(false).compare(Ne, Num(2.0)));
        // Non-integer equality uses the absolute tolerance.
        assert!(Num(0.3).compare(Eq, Num(0.1 + 0.2)));
        assert!(Num(2.0).compare(Eq, Num(2.0)));
    }
}
