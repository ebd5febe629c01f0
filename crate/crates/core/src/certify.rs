//! Degree bounds of the skein polynomial and the certificates they imply.

use serde::Serialize;

use crate::braid::{locally_twisted_check, Sign, TwistMode};
use crate::error::{Error, Result};
use crate::planar::{Diagram, DiagramStats};
use crate::poly::Laurent2;
use crate::seifert::{classify, DiagramClass};
use crate::skein::{homfly, Leaf, ResolutionTree};

#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MfwReport {
    pub e: i64,
    pub E: i64,
    pub m: i64,
    pub M: i64,
    pub s: usize,
    pub writhe: i64,
    pub crossing_count: usize,
    /// `e = −ω − s + 1`
    pub eq2_lower_sharp: bool,
    /// `E = −ω + s − 1`
    pub eq2_upper_sharp: bool,
    pub mfw_sharp: bool,
    /// `M = |D| − s + 1`
    pub eq5_sharp: bool,
}

impl MfwReport {
    pub fn lower_bound(&self) -> i64 {
        -self.writhe - self.s as i64 + 1
    }

    pub fn upper_bound(&self) -> i64 {
        -self.writhe + self.s as i64 - 1
    }
}

pub fn mfw_report(d: &Diagram) -> Result<MfwReport> {
    mfw_report_for(d, &homfly(d))
}

/// Same as [`mfw_report`] with a polynomial computed elsewhere. Fails if the
/// degree bounds are violated, which can only mean an engine bug.
#[allow(non_snake_case)]
pub fn mfw_report_for(d: &Diagram, p: &Laurent2) -> Result<MfwReport> {
    if d.segment_count() == 0 {
        return Err(Error::Precondition("empty diagram".into()));
    }
    let missing = || Error::Invariant("skein polynomial vanished".into());
    let (e, E) = (p.e().ok_or_else(missing)? as i64, p.E().ok_or_else(missing)? as i64);
    let (m, M) = (p.m().ok_or_else(missing)? as i64, p.M().ok_or_else(missing)? as i64);
    let s = d.seifert_circle_count();
    let writhe = d.writhe();
    let crossing_count = d.crossing_count();
    let lo = -writhe - s as i64 + 1;
    let hi = -writhe + s as i64 - 1;
    let m_cap = crossing_count as i64 - s as i64 + 1;
    if e < lo || E > hi {
        return Err(Error::Invariant(format!("a-degrees [{e}, {E}] escape [{lo}, {hi}]")));
    }
    if M > m_cap {
        return Err(Error::Invariant(format!("z-degree {M} above {m_cap}")));
    }
    Ok(MfwReport {
        e,
        E,
        m,
        M,
        s,
        writhe,
        crossing_count,
        eq2_lower_sharp: e == lo,
        eq2_upper_sharp: E == hi,
        mfw_sharp: (E - e) / 2 + 1 == s as i64,
        eq5_sharp: M == m_cap,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub holds: bool,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Certified,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub optimal: Claim,
    pub minimal: Claim,
    pub braid_index: Option<usize>,
    pub crossing_number: Option<usize>,
    pub outcome: Outcome,
    pub criteria: Vec<String>,
}

pub fn certify(d: &Diagram) -> Result<Certificate> {
    let report = mfw_report(d)?;
    Ok(certify_with(d, &report, &classify(d)))
}

pub fn certify_with(d: &Diagram, report: &MfwReport, class: &DiagramClass) -> Certificate {
    let s = report.s;
    let breadth = report.E - report.e;
    let mut criteria = vec![];
    let optimal = if report.mfw_sharp {
        criteria.push("mfw-sharp".to_string());
        Claim { holds: true, reason: format!("a-breadth {breadth} gives (E-e)/2+1 = {s} = s(D)") }
    } else {
        Claim { holds: false, reason: format!("(E-e)/2+1 = {} is below s(D) = {s}", breadth / 2 + 1) }
    };
    let minimal = match (optimal.holds, class.homogeneous) {
        (true, true) => {
            criteria.push("homogeneous-and-optimal".to_string());
            if class.lth {
                criteria.push("locally-twisted-homogeneous".to_string());
            }
            Claim { holds: true, reason: "homogeneous and optimal".to_string() }
        }
        (true, false) => Claim { holds: false, reason: "optimal but not homogeneous".to_string() },
        (false, _) => Claim { holds: false, reason: "no optimality certificate".to_string() },
    };
    Certificate {
        braid_index: optimal.holds.then_some(s),
        crossing_number: minimal.holds.then_some(d.crossing_count()),
        outcome: if minimal.holds { Outcome::Certified } else { Outcome::Inconclusive },
        optimal,
        minimal,
        criteria,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem2Verdict {
    Confirmed,
    Refuted,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem2Check {
    pub minus_twisted: bool,
    pub plus_twisted: bool,
    /// `E = −ω + s − 1`, checked when every word is locally −twisted.
    pub upper_sharp: Option<bool>,
    /// `e = −ω − s + 1`, checked when every word is locally +twisted.
    pub lower_sharp: Option<bool>,
    pub verdict: Theorem2Verdict,
}

pub fn verify_theorem2(d: &Diagram) -> Result<Theorem2Check> {
    if !d.template().is_knitted() {
        return Err(Error::Precondition("template is not knitted".into()));
    }
    let report = mfw_report(d)?;
    Ok(theorem2_from(d, &report))
}

pub fn theorem2_from(d: &Diagram, report: &MfwReport) -> Theorem2Check {
    let all = |mode| d.words().iter().all(|w| locally_twisted_check(w, mode).holds);
    let (minus_twisted, plus_twisted) = (all(TwistMode::Minus), all(TwistMode::Plus));
    let upper_sharp = minus_twisted.then_some(report.eq2_upper_sharp);
    let lower_sharp = plus_twisted.then_some(report.eq2_lower_sharp);
    let checks: Vec<bool> = [upper_sharp, lower_sharp].into_iter().flatten().collect();
    let verdict = if checks.is_empty() {
        Theorem2Verdict::NotApplicable
    } else if checks.iter().all(|&b| b) {
        Theorem2Verdict::Confirmed
    } else {
        Theorem2Verdict::Refuted
    };
    Theorem2Check { minus_twisted, plus_twisted, upper_sharp, lower_sharp, verdict }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafRow {
    pub writhe: i64,
    pub components: usize,
    pub t: usize,
    pub t_minus: usize,
    pub t_plus: usize,
    /// Highest a-degree of the leaf term.
    pub top_a: i64,
    pub tight: bool,
    /// Tight with the largest z-degree among tight leaves.
    pub top_contributor: bool,
    /// `(−1)^{t⁻}`
    pub sign: i8,
    pub all_positive_smoothed: bool,
    pub self_crossing_free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafSpectrum {
    pub bound: i64,
    pub rows: Vec<LeafRow>,
}

impl LeafSpectrum {
    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.top_a <= self.bound)
    }

    pub fn tight(&self) -> impl Iterator<Item = &LeafRow> {
        self.rows.iter().filter(|r| r.tight)
    }

    /// Every top contributor carries the same sign, so the top term cannot cancel.
    pub fn top_sign_uniform(&self) -> bool {
        let mut signs = self.rows.iter().filter(|r| r.top_contributor).map(|r| r.sign);
        match signs.next() {
            Some(first) => signs.all(|s| s == first),
            None => false,
        }
    }
}

fn leaf_self_crossing_free(root: &Diagram, leaf: &Leaf) -> bool {
    let comps = root.components_in(&leaf.state);
    (0..comps.count).all(|k| {
        let Some(start) = comps.of_segment.iter().position(|&c| c == k) else {
            return true;
        };
        let mut seen: Vec<usize> = root.walk(&leaf.state, start).visits.iter().map(|v| v.crossing).collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    })
}

pub fn leaf_spectrum(tree: &ResolutionTree) -> LeafSpectrum {
    let d = &tree.root;
    let w = d.writhe();
    let s = d.seifert_circle_count() as i64;
    let bound = -w + s - 1;
    let positive: Vec<usize> = (0..d.crossing_count()).filter(|&g| d.sign(g) == Sign::Pos).collect();
    let mut rows: Vec<LeafRow> = tree
        .leaves()
        .map(|l| {
            let top_a = l.writhe - w + l.components as i64 - 1;
            LeafRow {
                writhe: l.writhe,
                components: l.components,
                t: l.t,
                t_minus: l.t_minus,
                t_plus: l.t_plus,
                top_a,
                tight: top_a == bound,
                top_contributor: false,
                sign: if l.t_minus % 2 == 0 { 1 } else { -1 },
                all_positive_smoothed: positive.iter().all(|&g| l.state.get(g) == crate::planar::Cross::Smooth),
                self_crossing_free: leaf_self_crossing_free(d, l),
            }
        })
        .collect();
    let z_top = |r: &LeafRow| r.t as i64 - r.components as i64 + 1;
    if let Some(best) = rows.iter().filter(|r| r.tight).map(z_top).max() {
        for r in rows.iter_mut() {
            r.top_contributor = r.tight && z_top(r) == best;
        }
    }
    LeafSpectrum { bound, rows }
}

/// Everything the CLI prints for one certification run.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub input: String,
    pub stats: DiagramStats,
    pub polynomial: Laurent2,
    pub polynomial_text: String,
    pub e: i64,
    #[serde(rename = "E")]
    pub upper_e: i64,
    pub m: i64,
    #[serde(rename = "M")]
    pub upper_m: i64,
    pub flags: DiagramClass,
    pub report: MfwReport,
    pub certificate: Certificate,
    pub theorem2: Option<Theorem2Check>,
    pub reasons: Vec<String>,
    pub paper_criteria: Vec<String>,
}

pub fn certificate_report(input: &str, d: &Diagram) -> Result<CertificateReport> {
    let polynomial = homfly(d);
    let report = mfw_report_for(d, &polynomial)?;
    let flags = classify(d);
    let certificate = certify_with(d, &report, &flags);
    let theorem2 = d.template().is_knitted().then(|| theorem2_from(d, &report));
    let reasons = vec![
        format!("optimal: {}", certificate.optimal.reason),
        format!("minimal: {}", certificate.minimal.reason),
    ];
    Ok(CertificateReport {
        input: input.to_string(),
        stats: d.stats(),
        polynomial_text: polynomial.to_string(),
        polynomial,
        e: report.e,
        upper_e: report.E,
        m: report.m,
        upper_m: report.M,
        flags,
        report,
        paper_criteria: certificate.criteria.clone(),
        certificate,
        theorem2,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::castle::build_special_tree;
    use crate::skein::{build_tree, Chooser, Strategy};

    fn d(s: &str) -> Diagram {
        Diagram::parse_braid(s).unwrap()
    }

    #[test]
    fn trefoil_report() {
        let r = mfw_report(&d("1 1 1")).unwrap();
        assert_eq!((r.e, r.E, r.m, r.M, r.s), (-4, -2, 0, 2, 2));
        assert!(r.mfw_sharp && r.eq5_sharp && r.eq2_lower_sharp && r.eq2_upper_sharp);
        let r = mfw_report(&d("")).unwrap();
        assert_eq!((r.e, r.E, r.s), (0, 0, 1));
        assert!(r.mfw_sharp);
        // two-component unlink: sharp, but the diagram is not homogeneous
        let r = mfw_report(&d("1 -1")).unwrap();
        assert_eq!((r.e, r.E, r.s), (-1, 1, 2));
        assert!(r.mfw_sharp);
        let r = mfw_report(&d("1 1 1 2")).unwrap();
        assert!(!r.mfw_sharp);
        assert!(mfw_report(&Diagram::empty()).is_err());
    }

    #[test]
    fn certificates() {
        let c = certify(&d("1 1 1")).unwrap();
        assert!(c.optimal.holds && c.minimal.holds);
        assert_eq!((c.braid_index, c.crossing_number), (Some(2), Some(3)));
        let c = certify(&d("1 -1")).unwrap();
        assert_eq!(c.outcome, Outcome::Inconclusive);
        assert!(c.optimal.holds && !c.minimal.holds);
        assert_eq!((c.braid_index, c.crossing_number), (Some(2), None));
        let c = certify(&d("1 1 1 2")).unwrap();
        assert_eq!(c.outcome, Outcome::Inconclusive);
        assert_eq!((c.braid_index, c.crossing_number), (None, None));
        let c = certify(&d("-2 -3 -2 1 -2 1 -3 -2 1")).unwrap();
        assert!(c.minimal.holds);
        assert_eq!((c.braid_index, c.crossing_number), (Some(4), Some(9)));
    }

    #[test]
    fn theorem2_examples() {
        let t = verify_theorem2(&d("1 1")).unwrap();
        assert_eq!((t.upper_sharp, t.lower_sharp), (Some(true), Some(true)));
        assert_eq!(t.verdict, Theorem2Verdict::Confirmed);
        let r = mfw_report(&d("1 1")).unwrap();
        assert_eq!((r.E, r.e), (-1, -3));
        let fig = d("-2 -3 -2 1 -2 1 -3 -2 1");
        let r = mfw_report(&fig).unwrap();
        assert_eq!((r.writhe, r.E, r.e), (-3, 6, 0));
        assert_eq!(verify_theorem2(&fig).unwrap().verdict, Theorem2Verdict::Confirmed);
        assert!(verify_theorem2(&crate::castle::trap_example()).is_err());
    }

    #[test]
    fn spectrum_of_small_trees() {
        let tree = build_special_tree(&d("1 1 1"), Strategy::XCoherent).unwrap();
        let sp = leaf_spectrum(&tree);
        assert!(sp.bound_holds());
        assert!(sp.rows.iter().all(|r| r.tight == (r.writhe == 0 && r.components == 2)));
        assert!(sp.tight().count() > 0);
        let tree = build_tree(&d(""), Strategy::Descending, Chooser::First);
        let sp = leaf_spectrum(&tree);
        assert_eq!(sp.rows.len(), 1);
        assert!(sp.rows[0].tight && sp.top_sign_uniform());
    }
}
