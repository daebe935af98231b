//! From satisfying assignments back to profiles, and from profiles to
//! witness reports showing that no candidate set of size `k - 1` wins.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, VariableRegistry};
use crate::model::{
    format_ranking, AlternativeSet, CoverageThreshold, ModelError, PreferenceProfile,
};
use crate::subsets::KSubsets;

/// Schema identifier carried by structured reports.
pub const REPORT_SCHEMA: &str = "condim.witness-report/v1";

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("assignment covers {found} variables, registry needs {needed}")]
    ShortAssignment { found: usize, needed: usize },
    #[error("agent {agent}: preference variables do not form a linear order")]
    NotLinear { agent: usize },
    #[error("{set} is a Condorcet winning set of size {size}, so the dimension bound fails")]
    WinningSetFound { set: AlternativeSet, size: usize },
    #[error("dimension bound k={k} must satisfy 2 <= k <= m (m={m})")]
    Dimension { k: usize, m: usize },
    #[error("structured report: {0}")]
    Structured(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Reads agent rankings off the `r(i, a, b)` block of `assignment`.
///
/// Agent `i` ranks `a` at place `m - |{b : r(i, a, b)}|`; the result is then
/// checked against every preference variable.
pub fn decode_profile(
    assignment: &Assignment,
    registry: &VariableRegistry,
) -> Result<PreferenceProfile, DecodeError> {
    let (n, m) = (registry.agents(), registry.alternatives());
    let needed = *registry.pref_range().end() as usize;
    if assignment.len() < needed {
        return Err(DecodeError::ShortAssignment {
            found: assignment.len(),
            needed,
        });
    }
    let mut rankings = Vec::with_capacity(n);
    for agent in 0..n {
        let mut ranking = vec![usize::MAX; m];
        for a in 0..m {
            let wins = (0..m)
                .filter(|&b| assignment.value(registry.pref(agent, a, b)))
                .count();
            let place = m.checked_sub(wins).filter(|&p| p < m);
            match place {
                Some(p) if ranking[p] == usize::MAX => ranking[p] = a,
                _ => return Err(DecodeError::NotLinear { agent }),
            }
        }
        rankings.push(ranking);
    }
    let profile = PreferenceProfile::new(rankings)?;
    for agent in 0..n {
        for a in 0..m {
            for b in 0..m {
                if profile.prefers_unchecked(agent, a, b)
                    != assignment.value(registry.pref(agent, a, b))
                {
                    return Err(DecodeError::NotLinear { agent });
                }
            }
        }
    }
    Ok(profile)
}

/// Alternatives a candidate set fails to cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub set: AlternativeSet,
    pub uncovered: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub profile: PreferenceProfile,
    pub dimension: usize,
    pub theta: CoverageThreshold,
    /// One entry per candidate set of size `dimension - 1`, ascending mask order.
    pub witnesses: Vec<Witness>,
}

/// Checks that no set of size `k - 1` is a θ-winning set of `profile` and
/// lists, per set, every alternative it leaves uncovered.
pub fn verify_at_least_dimension(
    profile: &PreferenceProfile,
    k: usize,
    theta: CoverageThreshold,
) -> Result<WitnessReport, DecodeError> {
    let m = profile.alternative_count();
    if k < 2 || k > m {
        return Err(DecodeError::Dimension { k, m });
    }
    let mut witnesses = Vec::new();
    for mask in KSubsets::new(m as u32, (k - 1) as u32).expect("k <= m") {
        let set = AlternativeSet::from_mask(mask);
        let uncovered = profile.uncovered(set, theta)?;
        if uncovered.is_empty() {
            return Err(DecodeError::WinningSetFound { set, size: k - 1 });
        }
        witnesses.push(Witness { set, uncovered });
    }
    Ok(WitnessReport {
        profile: profile.clone(),
        dimension: k,
        theta,
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Structured,
}

#[derive(Serialize, Deserialize)]
struct StructuredReport {
    schema: String,
    agents: usize,
    alternatives: usize,
    k: usize,
    theta: String,
    rankings: Vec<Vec<usize>>,
    witnesses: Vec<StructuredWitness>,
}

#[derive(Serialize, Deserialize)]
struct StructuredWitness {
    set: Vec<usize>,
    uncovered: Vec<usize>,
}

impl WitnessReport {
    pub fn to_text(&self) -> String {
        let p = &self.profile;
        let mut out = String::from("Model (decoding of satisfying assignment) found:\n");
        for (agent, ranking) in p.rankings().iter().enumerate() {
            let _ = writeln!(out, "Agent {agent}: {}", format_ranking(ranking));
        }
        let _ = writeln!(
            out,
            "does not have a Condorcet winning set of size {}",
            self.dimension - 1
        );
        let _ = writeln!(
            out,
            "({} agents and {} alternatives).",
            p.agent_count(),
            p.alternative_count()
        );
        out.push_str("Witnesses:\n");
        for w in &self.witnesses {
            let uncovered: Vec<String> = w.uncovered.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "{} does not cover alternative(s): {}",
                w.set,
                uncovered.join(", ")
            );
        }
        out
    }

    pub fn to_structured(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    /// The structured document as a JSON value, for embedding.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = StructuredReport {
            schema: REPORT_SCHEMA.into(),
            agents: self.profile.agent_count(),
            alternatives: self.profile.alternative_count(),
            k: self.dimension,
            theta: self.theta.to_string(),
            rankings: self.profile.rankings().to_vec(),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| StructuredWitness {
                    set: w.set.iter().collect(),
                    uncovered: w.uncovered.clone(),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable")
    }

    pub fn from_structured(text: &str) -> Result<Self, DecodeError> {
        let doc: StructuredReport =
            serde_json::from_str(text).map_err(|e| DecodeError::Structured(e.to_string()))?;
        if doc.schema != REPORT_SCHEMA {
            return Err(DecodeError::Structured(format!(
                "unknown schema {:?}",
                doc.schema
            )));
        }
        let profile = PreferenceProfile::new(doc.rankings)?;
        if profile.agent_count() != doc.agents || profile.alternative_count() != doc.alternatives {
            return Err(DecodeError::Structured(
                "size fields disagree with rankings".into(),
            ));
        }
        let theta = parse_theta(&doc.theta)
            .ok_or_else(|| DecodeError::Structured(format!("bad theta {:?}", doc.theta)))?;
        Ok(Self {
            profile,
            dimension: doc.k,
            theta,
            witnesses: doc
                .witnesses
                .into_iter()
                .map(|w| Witness {
                    set: AlternativeSet::from_members(w.set),
                    uncovered: w.uncovered,
                })
                .collect(),
        })
    }

    pub fn render(&self, format: ReportFormat, mut sink: impl Write) -> io::Result<()> {
        let text = match format {
            ReportFormat::Text => self.to_text(),
            ReportFormat::Structured => self.to_structured(),
        };
        sink.write_all(text.as_bytes())
    }
}

pub(crate) fn parse_theta(text: &str) -> Option<CoverageThreshold> {
    let (num, den) = text.split_once('/')?;
    CoverageThreshold::new(num.trim().parse().ok()?, den.trim().parse().ok()?).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::VariableRegistry;

    fn fig1() -> PreferenceProfile {
        include_str!("../data/fig1.profile").parse().unwrap()
    }

    fn fig4() -> PreferenceProfile {
        include_str!("../data/fig4.profile").parse().unwrap()
    }

    // Assignment built straight from the rank positions of `profile`.
    fn assignment_of(profile: &PreferenceProfile, registry: &VariableRegistry) -> Assignment {
        let mut a = Assignment::all_false(registry.variable_count());
        for (agent, ranking) in profile.rankings().iter().enumerate() {
            for (pa, &x) in ranking.iter().enumerate() {
                for &y in &ranking[pa..] {
                    a.set(registry.pref(agent, x, y), true);
                }
            }
        }
        a
    }

    #[test]
    fn decodes_synthesized_assignment() {
        let p = fig4();
        let reg = VariableRegistry::new(6, 6, 3).unwrap();
        let decoded = decode_profile(&assignment_of(&p, &reg), &reg).unwrap();
        assert_eq!(decoded, p);
        assert_eq!(format_ranking(decoded.ranking(0)), "0 > 1 > 2 > 3 > 4 > 5");
    }

    #[test]
    fn single_alternative() {
        let reg = VariableRegistry::new(2, 1, 1).unwrap();
        let mut a = Assignment::all_false(reg.variable_count());
        a.set(reg.pref(0, 0, 0), true);
        a.set(reg.pref(1, 0, 0), true);
        let p = decode_profile(&a, &reg).unwrap();
        assert_eq!(p.rankings(), &[vec![0], vec![0]]);
    }

    #[test]
    fn rejects_cyclic_preferences() {
        let reg = VariableRegistry::new(2, 3, 2).unwrap();
        let two = PreferenceProfile::new(fig1().rankings()[..2].to_vec()).unwrap();
        let mut a = assignment_of(&two, &reg);
        // Agent 1 (1 > 2 > 0): make 0 beat 1 as well, creating a cycle.
        a.set(reg.pref(1, 0, 1), true);
        a.set(reg.pref(1, 1, 0), false);
        assert!(matches!(
            decode_profile(&a, &reg),
            Err(DecodeError::NotLinear { agent: 1 })
        ));
    }

    #[test]
    fn report_for_six_by_six() {
        let report = verify_at_least_dimension(&fig4(), 3, CoverageThreshold::half()).unwrap();
        assert_eq!(report.witnesses.len(), 15);
        assert_eq!(
            report.witnesses[0].set,
            AlternativeSet::from_members([0, 1])
        );
        assert!(report.witnesses[0].uncovered.contains(&5));
        assert_eq!(report.to_text(), include_str!("../data/fig4_report.txt"));
    }

    #[test]
    fn winning_set_fails_verification() {
        let err = verify_at_least_dimension(&fig4(), 4, CoverageThreshold::half()).unwrap_err();
        assert!(matches!(err, DecodeError::WinningSetFound { size: 3, .. }));
        assert!(verify_at_least_dimension(&fig4(), 7, CoverageThreshold::half()).is_err());
    }

    #[test]
    fn cyclic_profile_singletons() {
        let report = verify_at_least_dimension(&fig1(), 2, CoverageThreshold::half()).unwrap();
        let got: Vec<(AlternativeSet, Vec<usize>)> = report
            .witnesses
            .iter()
            .map(|w| (w.set, w.uncovered.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (AlternativeSet::from_members([0]), vec![2]),
                (AlternativeSet::from_members([1]), vec![0]),
                (AlternativeSet::from_members([2]), vec![1]),
            ]
        );
    }

    #[test]
    fn structured_round_trip() {
        let report = verify_at_least_dimension(&fig4(), 3, CoverageThreshold::half()).unwrap();
        let doc = report.to_structured();
        assert!(doc.contains(REPORT_SCHEMA));
        assert_eq!(WitnessReport::from_structured(&doc).unwrap(), report);
        assert!(WitnessReport::from_structured("{}").is_err());
        let wrong = doc.replace(REPORT_SCHEMA, "other/v0");
        assert!(WitnessReport::from_structured(&wrong).is_err());
    }
}
