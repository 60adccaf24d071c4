//! Rationality verdicts for norm one tori.
//!
//! A norm one torus with character lattice `J_{G/H}` is `p`-retract rational
//! exactly when `ρ_G(J_{G/H})` is `p`-invertible, and retract rational when this
//! holds for every prime. For Galois extensions (`H` normal) the answer is whether
//! a Sylow `p`-subgroup of `G/H` is cyclic.

use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{is_prime, prime_divisors, Family, FiniteGroup, Subgroup};
use crate::invertibility::{decide_p_invertibility, Decision, RuleApplication, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rationality {
    PRetractRational,
    NotPRetractRational,
    RetractRational,
    NotRetractRational,
    Unknown,
}

impl Rationality {
    /// `Some(true)` for the rational verdicts, `None` for `Unknown`.
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Rationality::PRetractRational | Rationality::RetractRational => Some(true),
            Rationality::NotPRetractRational | Rationality::NotRetractRational => Some(false),
            Rationality::Unknown => None,
        }
    }

    fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::PInvertible => Rationality::PRetractRational,
            Verdict::NotPInvertible => Rationality::NotPRetractRational,
            Verdict::Unknown => Rationality::Unknown,
        }
    }
}

impl fmt::Display for Rationality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rationality::PRetractRational => "p-retract rational",
            Rationality::NotPRetractRational => "not p-retract rational",
            Rationality::RetractRational => "retract rational",
            Rationality::NotRetractRational => "not retract rational",
            Rationality::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeSpec {
    Prime(u64),
    All,
}

impl Serialize for PrimeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PrimeSpec::Prime(p) => s.serialize_u64(*p),
            PrimeSpec::All => s.serialize_str("all"),
        }
    }
}

impl fmt::Display for PrimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSpec::Prime(p) => write!(f, "{p}"),
            PrimeSpec::All => f.write_str("all"),
        }
    }
}

impl std::str::FromStr for PrimeSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(PrimeSpec::All);
        }
        let p: u64 = s.trim().parse().map_err(|_| Error::Parse(format!("expected a prime or \"all\", got {s:?}")))?;
        if !is_prime(p) {
            return Err(Error::Argument(format!("{p} is not prime")));
        }
        Ok(PrimeSpec::Prime(p))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Subject {
    Family { family: Family, n: usize },
    Pair { group: String, subgroup: String },
}

/// The reasoning for one prime.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeTrace {
    pub p: u64,
    pub verdict: Rationality,
    pub rules: Vec<RuleApplication>,
    /// Certificate of a negative engine verdict.
    pub certificate: Option<Value>,
    /// Proposition cited by the deciding rule.
    pub cites: Option<String>,
}

impl PrimeTrace {
    fn from_decision(p: u64, d: &Decision) -> Self {
        PrimeTrace {
            p,
            verdict: Rationality::from_verdict(d.verdict),
            rules: d.rules.clone(),
            certificate: d.certificate.as_ref().map(|c| c.to_json()),
            cites: d.deciding_reference().map(str::to_string),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalityVerdict {
    pub subject: Subject,
    pub p: PrimeSpec,
    pub verdict: Rationality,
    /// The closed form "n prime or gcd(p, n) = 1", for family subjects.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<bool>,
    pub notes: Vec<String>,
    pub trace: Vec<PrimeTrace>,
}

impl RationalityVerdict {
    /// Whether every per-prime verdict came from a rule rather than the closed form.
    pub fn engine_decided(&self) -> bool {
        self.trace.iter().all(|t| t.verdict != Rationality::Unknown)
    }
}

/// `n` is prime, or `gcd(p, n) = 1`.
pub fn closed_form(n: usize, p: u64) -> bool {
    is_prime(n as u64) || n as u64 % p != 0
}

/// `(S_n, S_{n-1})` or `(A_n, A_{n-1})`, with `H` the stabilizer of `n`.
pub fn family_pair(family: Family, n: usize) -> Result<(FiniteGroup, Subgroup)> {
    let g = match family {
        Family::Symmetric => FiniteGroup::symmetric(n)?,
        Family::Alternating => FiniteGroup::alternating(n)?,
    };
    let h = g.point_stabilizer(n)?;
    Ok((g, h))
}

fn family_notes(family: Family, n: usize) -> Result<Vec<String>> {
    if n < 2 {
        return Err(Error::Size(format!("n = {n} must be at least 2")));
    }
    if family == Family::Alternating && n <= 3 {
        return Err(Error::Unsupported(format!(
            "A_{n} is degenerate: A_{n} acting on {n} letters does not give a non-Galois extension of degree {n}"
        )));
    }
    let mut notes = Vec::new();
    if family == Family::Symmetric && n == 2 {
        notes.push("S_2: the extension is Galois (quadratic); the Galois-case criterion applies".into());
    }
    Ok(notes)
}

/// The main classification for `(family, n, p)`, checked against the closed form.
pub fn classify_norm_one_family(family: Family, n: usize, p: u64) -> Result<RationalityVerdict> {
    if !is_prime(p) {
        return Err(Error::Argument(format!("{p} is not prime")));
    }
    let mut notes = family_notes(family, n)?;
    let (g, h) = family_pair(family, n)?;
    let general = classify_general(&g, &h, p)?;
    let expected = closed_form(n, p);
    let verdict = match general.verdict.as_bool() {
        Some(v) if v != expected => {
            return Err(Error::Internal(format!(
                "{family}_{n}, p = {p}: engine says {} but the closed form says {expected}",
                general.verdict
            )))
        }
        Some(_) => general.verdict,
        None => {
            notes.push("engine undecided; verdict taken from the closed form".into());
            if expected {
                Rationality::PRetractRational
            } else {
                Rationality::NotPRetractRational
            }
        }
    };
    notes.extend(general.notes);
    Ok(RationalityVerdict {
        subject: Subject::Family { family, n },
        p: PrimeSpec::Prime(p),
        verdict,
        closed_form: Some(expected),
        notes,
        trace: general.trace,
    })
}

/// Retract rationality for `(family, n)`: all primes dividing `|G|`.
pub fn classify_norm_one_family_all(family: Family, n: usize) -> Result<RationalityVerdict> {
    let mut notes = family_notes(family, n)?;
    let (g, h) = family_pair(family, n)?;
    let mut summary = retract_summary(&g, &h)?;
    let expected = is_prime(n as u64);
    if let Some(v) = summary.verdict.as_bool() {
        if v != expected {
            return Err(Error::Internal(format!("{family}_{n}: retract verdict {} contradicts n prime = {expected}", summary.verdict)));
        }
    }
    notes.append(&mut summary.notes);
    summary.notes = notes;
    summary.subject = Subject::Family { family, n };
    summary.closed_form = Some(expected);
    Ok(summary)
}

fn pair_subject(g: &FiniteGroup, h: &Subgroup) -> Subject {
    Subject::Pair { group: g.to_string(), subgroup: h.to_string() }
}

/// `(G, H, p)` for any subgroup `H <= G`.
pub fn classify_general(g: &FiniteGroup, h: &Subgroup, p: u64) -> Result<RationalityVerdict> {
    if !is_prime(p) {
        return Err(Error::Argument(format!("{p} is not prime")));
    }
    if !h.is_subgroup_of(g) {
        return Err(Error::NotSubgroup(format!("{h} is not a subgroup of {g}")));
    }
    let mut notes = Vec::new();
    let trace = if h.is_normal_in(g) {
        if h.order() == g.order() {
            notes.push("H = G: the extension is trivial".into());
        }
        galois_trace(g, h, p)?
    } else {
        PrimeTrace::from_decision(p, &decide_p_invertibility(g, h, p)?)
    };
    Ok(RationalityVerdict {
        subject: pair_subject(g, h),
        p: PrimeSpec::Prime(p),
        verdict: trace.verdict,
        closed_form: None,
        notes,
        trace: vec![trace],
    })
}

/// Galois case: a Sylow `p`-subgroup of `G/H` is `PH/H ≅ P/(P ∩ H)`, cyclic iff
/// some `x ∈ P` has order `|P : P ∩ H|` modulo `H`.
fn galois_trace(g: &FiniteGroup, h: &Subgroup, p: u64) -> Result<PrimeTrace> {
    let sylow = g.sylow_subgroup(p)?;
    let els = sylow.elements()?;
    let meet = els.iter().filter(|x| h.contains(x)).count() as u128;
    let quotient_order = sylow.order() / meet;
    let order_mod_h = |x: &crate::perm::Permutation| {
        let mut y = x.clone();
        let mut k: u128 = 1;
        while !h.contains(&y) {
            y = y.compose(x);
            k += 1;
        }
        k
    };
    let cyclic = quotient_order == 1 || els.iter().any(|x| order_mod_h(x) == quotient_order);
    let rule = RuleApplication {
        name: "galois_cyclic_sylow".into(),
        paper_ref: "§3 Galois case (Sylow p-subgroup of Gal(K/k) cyclic)".into(),
        witness: json!({ "p": p, "sylow_quotient_order": quotient_order.to_string(), "cyclic": cyclic }),
    };
    Ok(PrimeTrace {
        p,
        verdict: if cyclic { Rationality::PRetractRational } else { Rationality::NotPRetractRational },
        cites: Some(rule.paper_ref.clone()),
        rules: vec![rule],
        certificate: None,
    })
}

/// Retract rationality: the conjunction of `p`-retract rationality over the primes
/// dividing `|G|` (all other primes are coprime to the index).
pub fn retract_summary(g: &FiniteGroup, h: &Subgroup) -> Result<RationalityVerdict> {
    let mut trace = Vec::new();
    let mut notes = Vec::new();
    for p in prime_divisors(g.order()) {
        let v = classify_general(g, h, p)?;
        notes.extend(v.notes);
        trace.extend(v.trace);
    }
    notes.dedup();
    let verdicts: Vec<Rationality> = trace.iter().map(|t| t.verdict).collect();
    let verdict = if verdicts.contains(&Rationality::NotPRetractRational) {
        Rationality::NotRetractRational
    } else if verdicts.contains(&Rationality::Unknown) {
        Rationality::Unknown
    } else {
        Rationality::RetractRational
    };
    Ok(RationalityVerdict { subject: pair_subject(g, h), p: PrimeSpec::All, verdict, closed_form: None, notes, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!(!closed_form(4, 2));
        assert!(closed_form(4, 3));
        assert!(closed_form(7, 7));
        assert!(!closed_form(6, 3));
    }

    #[test]
    fn family_verdicts() {
        let v = classify_norm_one_family(Family::Symmetric, 4, 2).unwrap();
        assert_eq!(v.verdict, Rationality::NotPRetractRational);
        let v = classify_norm_one_family(Family::Alternating, 6, 3).unwrap();
        assert_eq!(v.verdict, Rationality::NotPRetractRational);
        assert!(classify_norm_one_family(Family::Alternating, 3, 3).is_err());
    }
}
