//! The behaviour-library manifest: stub generation, clustering of
//! primitives into behaviours by shared state usage, and implementation
//! status tracking.
//!
//! Registry file format (`.abdreg`, UTF-8, LF, line-oriented):
//!
//! ```text
//! plan-hash <hex>
//! remark <free text>                                  ; zero or more
//! behaviour <name>
//!   state <var>                                       ; sorted
//!   action|sense <name> status=stub|implemented default=<value>
//! ```
//!
//! Behaviours are sorted by name, entries within a behaviour by primitive
//! name, so saving is deterministic and `save ∘ load ∘ save` is a byte
//! fixpoint. Sense defaults are `false`, `true` or a number; action
//! defaults are `fail`, `succeed` or `running`. `#` comments and blank
//! lines are tolerated on load and dropped on save.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dsl;
use crate::model::{ActionResult, Plan, SenseValue, Subtree, SubtreeRootKind};

/// Hex-encoded SHA-256 of the canonical plan text. Registries record this
/// to detect drift between the plan and the library manifest.
pub fn plan_hash(plan: &Plan) -> String {
    format!("{:x}", Sha256::digest(dsl::serialize(plan).as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveKind {
    Action,
    Sense,
}

impl PrimitiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PrimitiveKind::Action => "action",
            PrimitiveKind::Sense => "sense",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImplStatus {
    Stub,
    Implemented,
}

/// What a stub primitive answers with: senses yield a value, actions a
/// result. Generated defaults are `false` and `fail` so stub-gated triggers
/// stay unsatisfied; the file may override a default where the locking
/// polarity is inverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DefaultReturn {
    Sense(SenseValue),
    Action(ActionResult),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveStatus {
    pub name: String,
    pub kind: PrimitiveKind,
    pub status: ImplStatus,
    pub default_return: DefaultReturn,
}

/// A cluster of primitives sharing state, the unit of implementation work.
#[derive(Debug, Clone, PartialEq)]
pub struct Behaviour {
    pub name: String,
    pub state_vars: BTreeSet<String>,
    pub primitives: BTreeSet<String>,
}

/// Mapping primitive name → state variables it reads or writes, supplied
/// by the designer to steer clustering.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateUsageSpec {
    pub usage: BTreeMap<String, BTreeSet<String>>,
}

impl StateUsageSpec {
    /// Parse the usage file format: one `<primitive> <var> [<var>...]` per
    /// line, `;` comments, blank lines ignored.
    pub fn parse(text: &str) -> Result<StateUsageSpec, RegistryError> {
        let mut usage: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find(';') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let mut words = line.split_whitespace();
            let Some(name) = words.next() else { continue };
            let vars: BTreeSet<String> = words.map(str::to_string).collect();
            if vars.is_empty() {
                return Err(RegistryError::Malformed {
                    line: idx + 1,
                    message: format!("usage entry `{name}` lists no state variables"),
                });
            }
            if usage.insert(name.to_string(), vars).is_some() {
                return Err(RegistryError::Malformed {
                    line: idx + 1,
                    message: format!("duplicate usage entry `{name}`"),
                });
            }
        }
        Ok(StateUsageSpec { usage })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown primitives: {}", .0.join(", "))]
    UnknownPrimitives(Vec<String>),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("registry was generated from a different plan (registry hash {file_hash}, plan hash {plan_hash})")]
    StalePlanHash { file_hash: String, plan_hash: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The behaviour-library manifest for one plan.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveRegistry {
    pub plan_hash: String,
    pub remarks: Vec<String>,
    /// Sorted by name; the behaviours partition the plan's primitives.
    pub behaviours: Vec<Behaviour>,
    pub statuses: BTreeMap<String, PrimitiveStatus>,
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

/// Group plan primitives into behaviours.
///
/// Primitives with usage annotations form a graph with an edge wherever two
/// primitives share a state variable; each connected component becomes a
/// behaviour named after its lexicographically smallest state variable.
/// Un-annotated primitives join a behaviour named after the drive sub-tree
/// where they first appear (drives in document order); primitives reachable
/// from no drive join a behaviour named after the drive collection itself.
pub fn cluster(plan: &Plan, usage: &StateUsageSpec) -> Result<Vec<Behaviour>, RegistryError> {
    let declared: BTreeSet<&str> = plan
        .declared_actions
        .iter()
        .chain(plan.declared_senses.iter())
        .map(String::as_str)
        .collect();
    let unknown: Vec<String> = usage
        .usage
        .keys()
        .filter(|n| !declared.contains(n.as_str()))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(RegistryError::UnknownPrimitives(unknown));
    }

    let mut behaviours: BTreeMap<String, Behaviour> = BTreeMap::new();

    // Connected components via breadth-first search over the shared-variable
    // adjacency (var → primitives index). The union-find formulation is kept
    // to the test suite as an independent oracle.
    let mut by_var: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (prim, vars) in &usage.usage {
        for var in vars {
            by_var.entry(var).or_default().push(prim);
        }
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for prim in usage.usage.keys() {
        if seen.contains(prim.as_str()) {
            continue;
        }
        let mut members = BTreeSet::new();
        let mut vars = BTreeSet::new();
        let mut queue = vec![prim.as_str()];
        seen.insert(prim);
        while let Some(p) = queue.pop() {
            members.insert(p.to_string());
            for var in &usage.usage[p] {
                vars.insert(var.clone());
                for other in &by_var[var.as_str()] {
                    if seen.insert(other) {
                        queue.push(other);
                    }
                }
            }
        }
        let name = vars.iter().next().expect("usage entries have vars").clone();
        let entry = behaviours.entry(name.clone()).or_insert_with(|| Behaviour {
            name,
            state_vars: BTreeSet::new(),
            primitives: BTreeSet::new(),
        });
        entry.state_vars.extend(vars);
        entry.primitives.extend(members);
    }

    // Leftovers: first owning drive in document order, else the collection.
    let subs = crate::model::subtrees(plan).expect("cluster requires a valid plan");
    let drive_subs: Vec<&Subtree> = subs
        .iter()
        .filter(|s| s.kind == SubtreeRootKind::Drive)
        .collect();
    for prim in &declared {
        if usage.usage.contains_key(*prim) {
            continue;
        }
        let owner = drive_subs
            .iter()
            .find(|s| s.actions.contains(*prim) || s.senses.contains(*prim))
            .map(|s| s.title.clone())
            .unwrap_or_else(|| plan.drive_collection.name.clone());
        let entry = behaviours.entry(owner.clone()).or_insert_with(|| Behaviour {
            name: owner,
            state_vars: BTreeSet::new(),
            primitives: BTreeSet::new(),
        });
        entry.primitives.insert(prim.to_string());
    }

    Ok(behaviours.into_values().collect())
}

// ---------------------------------------------------------------------------
// Stub generation and status updates
// ---------------------------------------------------------------------------

/// Build the all-stub registry for a plan: every declared action and sense
/// gets a stub entry (senses default `false`, actions default `fail`),
/// behaviours come from `cluster`, and the fallback action is flagged with
/// a remark since the idle state needs an implementation in the beginning.
pub fn generate_stubs(
    plan: &Plan,
    usage: Option<&StateUsageSpec>,
) -> Result<PrimitiveRegistry, RegistryError> {
    let empty = StateUsageSpec::default();
    let behaviours = cluster(plan, usage.unwrap_or(&empty))?;
    let mut statuses = BTreeMap::new();
    for a in &plan.declared_actions {
        statuses.insert(
            a.clone(),
            PrimitiveStatus {
                name: a.clone(),
                kind: PrimitiveKind::Action,
                status: ImplStatus::Stub,
                default_return: DefaultReturn::Action(ActionResult::Fail),
            },
        );
    }
    for s in &plan.declared_senses {
        statuses.insert(
            s.clone(),
            PrimitiveStatus {
                name: s.clone(),
                kind: PrimitiveKind::Sense,
                status: ImplStatus::Stub,
                default_return: DefaultReturn::Sense(SenseValue::Bool(false)),
            },
        );
    }
    let remarks = match &plan.drive_collection.fallback_action {
        Some(fb) => vec![format!(
            "fallback `{fb}` needs an implementation in the beginning"
        )],
        None => Vec::new(),
    };
    Ok(PrimitiveRegistry {
        plan_hash: plan_hash(plan),
        remarks,
        behaviours,
        statuses,
    })
}

impl PrimitiveRegistry {
    pub fn status_of(&self, name: &str) -> Option<&PrimitiveStatus> {
        self.statuses.get(name)
    }

    pub fn is_implemented(&self, name: &str) -> bool {
        matches!(
            self.statuses.get(name),
            Some(PrimitiveStatus {
                status: ImplStatus::Implemented,
                ..
            })
        )
    }

    /// Flip the named primitives stub → implemented, yielding a new
    /// registry. Marking an implemented primitive again is a no-op. Unknown
    /// names fail the whole call; nothing is changed.
    pub fn mark_implemented<S: AsRef<str>>(
        &self,
        names: &[S],
    ) -> Result<PrimitiveRegistry, RegistryError> {
        let unknown: Vec<String> = names
            .iter()
            .map(|n| n.as_ref())
            .filter(|n| !self.statuses.contains_key(*n))
            .map(str::to_string)
            .collect();
        if !unknown.is_empty() {
            return Err(RegistryError::UnknownPrimitives(unknown));
        }
        let mut next = self.clone();
        for name in names {
            next.statuses.get_mut(name.as_ref()).unwrap().status = ImplStatus::Implemented;
        }
        Ok(next)
    }

    /// Check that this registry was generated from (a canonical rendering
    /// of) the given plan.
    pub fn check_plan(&self, plan: &Plan) -> Result<(), RegistryError> {
        let actual = plan_hash(plan);
        if actual == self.plan_hash {
            Ok(())
        } else {
            Err(RegistryError::StalePlanHash {
                file_hash: self.plan_hash.clone(),
                plan_hash: actual,
            })
        }
    }

    // -- file format --------------------------------------------------------

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("plan-hash {}\n", self.plan_hash));
        for remark in &self.remarks {
            out.push_str(&format!("remark {remark}\n"));
        }
        for b in &self.behaviours {
            out.push_str(&format!("behaviour {}\n", b.name));
            for var in &b.state_vars {
                out.push_str(&format!("  state {var}\n"));
            }
            for prim in &b.primitives {
                let st = &self.statuses[prim];
                let status = match st.status {
                    ImplStatus::Stub => "stub",
                    ImplStatus::Implemented => "implemented",
                };
                let default = match st.default_return {
                    DefaultReturn::Sense(SenseValue::Bool(v)) => v.to_string(),
                    DefaultReturn::Sense(SenseValue::Num(n)) => format!("{n}"),
                    DefaultReturn::Action(r) => r.to_string(),
                };
                out.push_str(&format!(
                    "  {} {prim} status={status} default={default}\n",
                    st.kind.as_str()
                ));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PrimitiveRegistry, RegistryError> {
        let err = |line: usize, message: String| RegistryError::Malformed { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

        let (first_no, first) = lines
            .next()
            .ok_or_else(|| err(1, "empty registry file".to_string()))?;
        let plan_hash = first
            .strip_prefix("plan-hash ")
            .ok_or_else(|| err(first_no, "expected `plan-hash <hex>` on line 1".to_string()))?
            .trim()
            .to_string();

        let mut remarks = Vec::new();
        let mut behaviours: Vec<Behaviour> = Vec::new();
        let mut statuses: BTreeMap<String, PrimitiveStatus> = BTreeMap::new();
        let mut last_line = first_no;

        for (no, raw) in lines {
            last_line = no;
            let line = raw.trim_start();
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            match head {
                "remark" => {
                    if !behaviours.is_empty() {
                        return Err(err(no, "remarks must precede behaviours".to_string()));
                    }
                    remarks.push(line["remark".len()..].trim_start().to_string());
                }
                "behaviour" => {
                    let name = words
                        .next()
                        .ok_or_else(|| err(no, "behaviour line is missing a name".to_string()))?;
                    if let Some(b) = behaviours.last() {
                        if b.primitives.is_empty() {
                            return Err(err(
                                no,
                                format!("behaviour `{}` lists no primitives", b.name),
                            ));
                        }
                    }
                    behaviours.push(Behaviour {
                        name: name.to_string(),
                        state_vars: BTreeSet::new(),
                        primitives: BTreeSet::new(),
                    });
                }
                "state" => {
                    let var = words
                        .next()
                        .ok_or_else(|| err(no, "state line is missing a variable".to_string()))?;
                    behaviours
                        .last_mut()
                        .ok_or_else(|| err(no, "state line outside a behaviour".to_string()))?
                        .state_vars
                        .insert(var.to_string());
                }
                "action" | "sense" => {
                    let kind = if head == "action" {
                        PrimitiveKind::Action
                    } else {
                        PrimitiveKind::Sense
                    };
                    let name = words
                        .next()
                        .ok_or_else(|| err(no, format!("{head} line is missing a name")))?;
                    let status_word = words
                        .next()
                        .and_then(|w| w.strip_prefix("status="))
                        .ok_or_else(|| err(no, "expected `status=stub|implemented`".to_string()))?;
                    let status = match status_word {
                        "stub" => ImplStatus::Stub,
                        "implemented" => ImplStatus::Implemented,
                        other => {
                            return Err(err(no, format!("unknown status `{other}`")));
                        }
                    };
                    let default_word = words
                        .next()
                        .and_then(|w| w.strip_prefix("default="))
                        .ok_or_else(|| err(no, "expected `default=<value>`".to_string()))?;
                    let default_return = match (kind, default_word) {
                        (PrimitiveKind::Action, w) => DefaultReturn::Action(
                            ActionResult::from_str(w).ok_or_else(|| {
                                err(
                                    no,
                                    format!(
                                        "action default must be fail, succeed or running, got `{w}`"
                                    ),
                                )
                            })?,
                        ),
                        (PrimitiveKind::Sense, "true") => {
                            DefaultReturn::Sense(SenseValue::Bool(true))
                        }
                        (PrimitiveKind::Sense, "false") => {
                            DefaultReturn::Sense(SenseValue::Bool(false))
                        }
                        (PrimitiveKind::Sense, w) => DefaultReturn::Sense(SenseValue::Num(
                            w.parse::<f64>().map_err(|_| {
                                err(
                                    no,
                                    format!("sense default must be true, false or a number, got `{w}`"),
                                )
                            })?,
                        )),
                    };
                    if words.next().is_some() {
                        return Err(err(no, "trailing tokens on entry line".to_string()));
                    }
                    let b = behaviours
                        .last_mut()
                        .ok_or_else(|| err(no, "entry line outside a behaviour".to_string()))?;
                    b.primitives.insert(name.to_string());
                    if statuses
                        .insert(
                            name.to_string(),
                            PrimitiveStatus {
                                name: name.to_string(),
                                kind,
                                status,
                                default_return,
                            },
                        )
                        .is_some()
                    {
                        return Err(err(no, format!("primitive `{name}` listed twice")));
                    }
                }
                other => {
                    return Err(err(no, format!("unrecognized line `{other} ...`")));
                }
            }
        }
        if let Some(b) = behaviours.last() {
            if b.primitives.is_empty() {
                return Err(err(
                    last_line,
                    format!("behaviour `{}` lists no primitives", b.name),
                ));
            }
        }
        behaviours.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(PrimitiveRegistry {
            plan_hash,
            remarks,
            behaviours,
            statuses,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), RegistryError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PrimitiveRegistry, RegistryError> {
        let text = std::fs::read_to_string(path)?;
        PrimitiveRegistry::from_text(&text)
    }

    /// The primitive names of every behaviour, flattened.
    pub fn primitive_names(&self) -> BTreeSet<String> {
        self.behaviours
            .iter()
            .flat_map(|b| b.primitives.iter().cloned())
            .collect()
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn stealth() -> Plan {
        parse(include_str!("../../../fixtures/stealth.abd")).expect("fixture parses")
    }

    fn behaviour_map(behaviours: &[Behaviour]) -> BTreeMap<&str, Vec<&str>> {
        behaviours
            .iter()
            .map(|b| {
                (
                    b.name.as_str(),
                    b.primitives.iter().map(String::as_str).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn empty_usage_clusters_by_first_drive() {
        let plan = stealth();
        let behaviours = cluster(&plan, &StateUsageSpec::default()).expect("clusters");
        let map = behaviour_map(&behaviours);
        assert_eq!(
            map,
            BTreeMap::from([
                ("dialogue", vec!["player-close", "see-player", "trigger-dialogue"]),
                ("guard", vec!["idle"]),
                ("investigate", vec!["door-open", "move-to-player", "open-door"]),
                ("patrol", vec!["move-to-a", "move-to-b"]),
            ])
        );
    }

    #[test]
    fn shared_state_merges_components() {
        // see-player/player-close share player-pos with each other and
        // guard-pos with the movement actions, so all five merge into one
        // component named after guard-pos (lexicographically smallest var).
        let plan = stealth();
        let usage = StateUsageSpec::parse(
            "see-player guard-pos player-pos\n\
             player-close guard-pos player-pos\n\
             move-to-a guard-pos\n\
             move-to-b guard-pos\n\
             move-to-player guard-pos\n",
        )
        .expect("usage parses");
        let behaviours = cluster(&plan, &usage).expect("clusters");
        let map = behaviour_map(&behaviours);
        assert_eq!(
            map,
            BTreeMap::from([
                ("dialogue", vec!["trigger-dialogue"]),
                ("guard", vec!["idle"]),
                (
                    "guard-pos",
                    vec!["move-to-a", "move-to-b", "move-to-player", "player-close", "see-player"]
                ),
                ("investigate", vec!["door-open", "open-door"]),
            ])
        );
        let guard_pos = behaviours.iter().find(|b| b.name == "guard-pos").unwrap();
        assert_eq!(
            guard_pos.state_vars,
            BTreeSet::from(["guard-pos".to_string(), "player-pos".to_string()])
        );
    }

    #[test]
    fn two_components_and_singletons() {
        let plan = parse(
            "(plan (actions (a b c)) (senses ())\
             (DC main (drives ((d0 (trigger ()) a) (d1 (trigger ()) b) (d2 (trigger ()) c)))))",
        )
        .expect("valid");
        let usage = StateUsageSpec::parse("a s1\nb s1\nc s2\n").unwrap();
        let map_owned = cluster(&plan, &usage).unwrap();
        let map = behaviour_map(&map_owned);
        assert_eq!(map["s1"], vec!["a", "b"]);
        assert_eq!(map["s2"], vec!["c"]);

        let usage = StateUsageSpec::parse("a s1\nb s2\n").unwrap();
        let map_owned = cluster(&plan, &usage).unwrap();
        let map = behaviour_map(&map_owned);
        assert_eq!(map["s1"], vec!["a"]);
        assert_eq!(map["s2"], vec!["b"]);
        // c is un-annotated and first appears under drive d2.
        assert_eq!(map["d2"], vec!["c"]);
    }

    #[test]
    fn unknown_usage_primitive_is_an_error() {
        let plan = stealth();
        let usage = StateUsageSpec::parse("teleport warp-state\n").unwrap();
        match cluster(&plan, &usage) {
            Err(RegistryError::UnknownPrimitives(names)) => {
                assert_eq!(names, vec!["teleport".to_string()]);
            }
            other => panic!("expected unknown-primitives error, got {other:?}"),
        }
    }

    #[test]
    fn generated_registry_matches_golden_bytes() {
        let reg = generate_stubs(&stealth(), None).expect("stubs");
        assert_eq!(reg.to_text(), include_str!("../../../fixtures/stealth.abdreg"));
    }

    #[test]
    fn generation_is_deterministic() {
        let plan = stealth();
        let a = generate_stubs(&plan, None).unwrap().to_text();
        let b = generate_stubs(&plan, None).unwrap().to_text();
        assert_eq!(a, b);
    }

    #[test]
    fn fallback_gets_a_remark() {
        let reg = generate_stubs(&stealth(), None).unwrap();
        assert_eq!(reg.remarks.len(), 1);
        assert!(reg.remarks[0].contains("needs an implementation in the beginning"));
        assert!(reg.remarks[0].contains("idle"));
    }

    #[test]
    fn mark_flips_status_and_is_idempotent() {
        let reg = generate_stubs(&stealth(), None).unwrap();
        let once = reg.mark_implemented(&["move-to-a"]).unwrap();
        assert!(once.is_implemented("move-to-a"));
        assert!(!once.is_implemented("move-to-b"));
        let twice = once.mark_implemented(&["move-to-a", "move-to-a"]).unwrap();
        assert_eq!(once, twice);
        // Membership and defaults never change.
        assert_eq!(reg.behaviours, twice.behaviours);
        assert_eq!(
            reg.statuses["move-to-a"].default_return,
            twice.statuses["move-to-a"].default_return
        );
    }

    #[test]
    fn mark_unknown_name_changes_nothing() {
        let reg = generate_stubs(&stealth(), None).unwrap();
        match reg.mark_implemented(&["nope"]) {
            Err(RegistryError::UnknownPrimitives(names)) => {
                assert_eq!(names, vec!["nope".to_string()]);
            }
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn save_load_save_is_a_fixpoint() {
        let reg = generate_stubs(&stealth(), None)
            .unwrap()
            .mark_implemented(&["idle", "move-to-a"])
            .unwrap();
        let first = reg.to_text();
        let second = PrimitiveRegistry::from_text(&first).unwrap().to_text();
        assert_eq!(first, second);
    }

    #[test]
    fn file_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("stealth.abdreg");
        let reg = generate_stubs(&stealth(), None).unwrap();
        reg.save(&path).unwrap();
        let loaded = PrimitiveRegistry::load(&path).unwrap();
        assert_eq!(reg, loaded);
    }

    #[test]
    fn stale_hash_detected_after_plan_edit() {
        let mut plan = stealth();
        let reg = generate_stubs(&plan, None).unwrap();
        assert!(reg.check_plan(&plan).is_ok());
        plan.drive_collection.drives[2].frequency_ticks = 5;
        match reg.check_plan(&plan) {
            Err(RegistryError::StalePlanHash { .. }) => {}
            other => panic!("expected staleness, got {other:?}"),
        }
    }

    #[test]
    fn truncated_file_reports_line_number() {
        let reg = generate_stubs(&stealth(), None).unwrap();
        let text = reg.to_text();
        // Cut mid-way through the final entry line.
        let cut = &text[..text.len() - 10];
        match PrimitiveRegistry::from_text(cut) {
            Err(RegistryError::Malformed { line, .. }) => {
                assert_eq!(line, cut.lines().count());
            }
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn hand_edited_numeric_default_round_trips() {
        let text = "plan-hash abc123\n\
                    behaviour nav\n  \
                    state pos\n  \
                    sense dist status=stub default=0\n";
        let reg = PrimitiveRegistry::from_text(text).unwrap();
        assert_eq!(
            reg.statuses["dist"].default_return,
            DefaultReturn::Sense(SenseValue::Num(0.0))
        );
        assert_eq!(reg.to_text(), text);
    }

    #[test]
    fn bad_status_word_is_rejected() {
        let text = "plan-hash abc\nbehaviour b\n  action a status=done default=fail\n";
        match PrimitiveRegistry::from_text(text) {
            Err(RegistryError::Malformed { line: 3, message }) => {
                assert!(message.contains("done"));
            }
            other => panic!("expected malformed line 3, got {other:?}"),
        }
    }

    #[test]
    fn usage_entry_without_vars_is_rejected() {
        match StateUsageSpec::parse("a\n") {
            Err(RegistryError::Malformed { line: 1, .. }) => {}
            other => panic!("expected malformed line 1, got {other:?}"),
        }
    }
}
