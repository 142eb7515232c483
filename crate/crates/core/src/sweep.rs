//! Parameter sweeps over preset families and the golden-envelope regression store.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::ratio_thm01;
use crate::error::{Error, Result};
use crate::gallery::{Mode, Solved};
use crate::geometry::presets;
use crate::heat::check_e510_ratio;
use crate::output::{fmt_f64, to_json_string};
use crate::spectral::{counting_function, EigenData, Request, COUNT_TOL};

/// Allowed excess over a stored envelope.
pub const ENVELOPE_MARGIN: f64 = 0.05;

pub const FAMILIES: [&str; 3] = ["dumbbell", "disjoint_balls", "packed_cubes"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCheck {
    Thm01,
    E510,
}

impl SweepCheck {
    pub fn name(&self) -> &'static str {
        match self {
            SweepCheck::Thm01 => "thm01",
            SweepCheck::E510 => "e510",
        }
    }

    pub fn parse_list(text: &str) -> Result<Vec<SweepCheck>> {
        let mut out = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            out.push(match item {
                "thm01" | "ratio_thm01" | "cor25" => SweepCheck::Thm01,
                "e510" | "ratio_e510" => SweepCheck::E510,
                other => return Err(Error::UnknownCheck(other.into())),
            });
        }
        if out.is_empty() {
            return Err(Error::Config("no sweep checks selected".into()));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

/// Members of a family, as preset expressions in parameter order.
pub fn family_members(family: &str, m: &[usize], eps: &[f64], k: &[usize]) -> Result<Vec<String>> {
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("family `{family}` needs {what}")))
        }
    };
    match family {
        "dumbbell" => {
            need(m.len() == 1 && !eps.is_empty(), "one --m value and an --eps list")?;
            Ok(eps.iter().map(|e| format!("dumbbell({}, {e})", m[0])).collect())
        }
        "disjoint_balls" => {
            need(!m.is_empty(), "an --m list")?;
            Ok(m.iter().map(|v| format!("disjoint_balls({v})")).collect())
        }
        "packed_cubes" => {
            need(!k.is_empty(), "a --k list")?;
            Ok(k.iter().map(|v| format!("packed_cubes({v})")).collect())
        }
        other => Err(Error::UnknownFamily(other.into())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub member: String,
    pub check: SweepCheck,
    pub lambda1: f64,
    /// Largest `||Phi||_1^2 / ||Phi||_2^2` over the ground-state eigenspace.
    pub l1_sq: f64,
    /// `N_{2 lambda_1}`
    pub n_2l1: usize,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Largest `||Phi||_1^2 / ||Phi||_2^2` over the ground-state eigenspace. Modes carried by
/// distinct components combine to the sum of their squared `L^1` norms.
pub fn eigenspace_l1_sq(eig: &EigenData) -> (f64, Option<&'static str>) {
    let l1 = eig.eigenvalues[0];
    let group: Vec<usize> = (0..eig.len())
        .take_while(|&k| eig.eigenvalues[k] <= l1 * (1.0 + COUNT_TOL))
        .collect();
    let sq = |k: usize| (eig.norms[k].l1 / eig.norms[k].l2).powi(2);
    let mut comps: Vec<usize> = group.iter().filter_map(|&k| eig.components.get(k).copied()).collect();
    comps.sort_unstable();
    comps.dedup();
    if comps.len() == group.len() {
        (group.iter().map(|&k| sq(k)).sum(), None)
    } else {
        let worst = group.iter().map(|&k| sq(k)).fold(0.0, f64::max);
        (worst, Some("degenerate modes share a component; largest single mode used"))
    }
}

/// Ratio rows for each member: `thm01` at `k = 1, theta = 1`, `e510` at `t = 1 / lambda_1`.
pub fn run_sweep(members: &[String], h: f64, checks: &[SweepCheck]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for member in members {
        let spec = presets::preset(member)?;
        let mut solved = Solved::solve(spec, Mode::Grid(h), Request::Count(1))?;
        let l1 = solved.lambda1().ok_or_else(|| Error::Config(format!("{member}: empty spectrum")))?;
        let mut level = 2.0 * l1;
        if checks.contains(&SweepCheck::E510) {
            level = level.max(16.0 * l1);
        }
        solved.ensure(level, 1)?;
        let eig = &solved.eig;
        let (l1_sq, note) = eigenspace_l1_sq(eig);
        let n_2l1 = counting_function(eig, 2.0 * l1)?;
        for &check in checks {
            let mut r = match check {
                SweepCheck::Thm01 => {
                    let mut r = ratio_thm01(eig, 1, 1.0)?;
                    r.lhs = l1_sq;
                    r.ratio = l1_sq / r.rhs;
                    r
                }
                SweepCheck::E510 => check_e510_ratio(eig, 1.0 / l1)?,
            };
            if let Some(n) = note {
                r.notes.push(n.into());
            }
            if !(r.ratio.is_finite() && r.ratio > 0.0) {
                return Err(Error::Solver {
                    message: format!("{member}: non-positive or non-finite {} ratio", check.name()),
                    max_residual: f64::NAN,
                });
            }
            rows.push(SweepRow {
                member: member.clone(),
                check,
                lambda1: l1,
                l1_sq,
                n_2l1,
                ratio: r.ratio,
                notes: r.notes,
            });
        }
    }
    Ok(rows)
}

/// Upper envelopes keyed by `family:check`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Envelopes(pub BTreeMap<String, f64>);

impl Envelopes {
    pub fn load(path: &Path) -> Result<Envelopes> {
        if !path.exists() {
            return Ok(Envelopes::default());
        }
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, to_json_string(self)?)?;
        Ok(())
    }

    pub fn key(family: &str, check: SweepCheck) -> String {
        format!("{family}:{}", check.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeStatus {
    Within,
    Exceeded,
    /// No stored envelope; this run establishes it.
    Established,
    Updated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: String,
    pub h: f64,
    pub rows: Vec<SweepRow>,
    pub envelopes: BTreeMap<String, f64>,
    pub status: Vec<EnvelopeStatus>,
}

impl SweepReport {
    /// Compare rows with the stored envelopes. Missing envelopes are established from this
    /// run; existing ones are only rewritten when `update` is set. Returns whether the store changed.
    pub fn compare(family: &str, h: f64, rows: Vec<SweepRow>, store: &mut Envelopes, update: bool) -> (SweepReport, bool) {
        let mut changed = false;
        let mut status = vec![EnvelopeStatus::Within; rows.len()];
        let mut checks: Vec<SweepCheck> = rows.iter().map(|r| r.check).collect();
        checks.sort();
        checks.dedup();
        let mut used = BTreeMap::new();
        for check in checks {
            let key = Envelopes::key(family, check);
            let peak = rows.iter().filter(|r| r.check == check).map(|r| r.ratio).fold(0.0, f64::max);
            let stored = store.0.get(&key).copied();
            let fresh = match stored {
                None => Some(EnvelopeStatus::Established),
                Some(_) if update => Some(EnvelopeStatus::Updated),
                Some(_) => None,
            };
            if let Some(s) = fresh {
                store.0.insert(key.clone(), peak);
                changed = true;
                for (i, r) in rows.iter().enumerate() {
                    if r.check == check {
                        status[i] = s;
                    }
                }
            } else if let Some(env) = stored {
                for (i, r) in rows.iter().enumerate() {
                    if r.check == check && r.ratio > env * (1.0 + ENVELOPE_MARGIN) {
                        status[i] = EnvelopeStatus::Exceeded;
                    }
                }
            }
            used.insert(key.clone(), store.0[&key]);
        }
        (
            SweepReport {
                family: family.into(),
                h,
                rows,
                envelopes: used,
                status,
            },
            changed,
        )
    }

    pub fn ok(&self) -> bool {
        !self.status.contains(&EnvelopeStatus::Exceeded)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<22} {:<6} {:>12} {:>12} {:>8} {:>12} {:>12}  status",
            "member", "check", "lambda1", "l1_sq", "N_2l1", "ratio", "envelope"
        );
        for (r, s) in self.rows.iter().zip(&self.status) {
            let env = self.envelopes[&Envelopes::key(&self.family, r.check)];
            let _ = writeln!(
                out,
                "{:<22} {:<6} {:>12.6} {:>12.6} {:>8} {:>12.5e} {:>12.5e}  {}",
                r.member,
                r.check.name(),
                r.lambda1,
                r.l1_sq,
                r.n_2l1,
                r.ratio,
                env,
                status_name(*s)
            );
        }
        out
    }

    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["member", "check", "lambda1", "l1_sq", "N_2l1", "ratio", "envelope", "status"])?;
        for (r, s) in self.rows.iter().zip(&self.status) {
            let env = self.envelopes[&Envelopes::key(&self.family, r.check)];
            w.write_record([
                r.member.as_str(),
                r.check.name(),
                &fmt_f64(r.lambda1),
                &fmt_f64(r.l1_sq),
                &r.n_2l1.to_string(),
                &fmt_f64(r.ratio),
                &fmt_f64(env),
                status_name(*s),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
    }
}

fn status_name(s: EnvelopeStatus) -> &'static str {
    match s {
        EnvelopeStatus::Within => "within",
        EnvelopeStatus::Exceeded => "exceeded",
        EnvelopeStatus::Established => "established",
        EnvelopeStatus::Updated => "updated",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ratio: f64) -> SweepRow {
        SweepRow {
            member: "x".into(),
            check: SweepCheck::Thm01,
            lambda1: 1.0,
            l1_sq: 1.0,
            n_2l1: 1,
            ratio,
            notes: Vec::new(),
        }
    }

    #[test]
    fn envelope_lifecycle() {
        let mut store = Envelopes::default();
        let (rep, changed) = SweepReport::compare("f", 0.1, vec![row(1.0), row(2.0)], &mut store, false);
        assert!(changed && rep.ok());
        assert_eq!(store.0["f:thm01"], 2.0);
        let (rep, changed) = SweepReport::compare("f", 0.1, vec![row(2.09)], &mut store, false);
        assert!(!changed && rep.ok());
        let (rep, _) = SweepReport::compare("f", 0.1, vec![row(2.2)], &mut store, false);
        assert!(!rep.ok());
        assert_eq!(store.0["f:thm01"], 2.0);
        let (rep, changed) = SweepReport::compare("f", 0.1, vec![row(2.2)], &mut store, true);
        assert!(changed && rep.ok());
        assert_eq!(store.0["f:thm01"], 2.2);
    }

    #[test]
    fn members_and_unknown_family() {
        assert_eq!(
            family_members("dumbbell", &[2], &[0.4, 0.2], &[]).unwrap(),
            vec!["dumbbell(2, 0.4)", "dumbbell(2, 0.2)"]
        );
        assert!(family_members("dumbbell", &[2, 3], &[0.4], &[]).is_err());
        assert!(matches!(family_members("torus", &[1], &[], &[]), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn balls_count_equals_m() {
        let members = family_members("disjoint_balls", &[1, 2], &[], &[]).unwrap();
        let rows = run_sweep(&members, 1.0 / 16.0, &[SweepCheck::Thm01]).unwrap();
        assert_eq!(rows.iter().map(|r| r.n_2l1).collect::<Vec<_>>(), vec![1, 2]);
        assert!((rows[1].l1_sq / rows[0].l1_sq - 2.0).abs() < 1e-9);
    }
}
