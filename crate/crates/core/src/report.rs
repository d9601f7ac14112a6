//! Line-oriented text serialization of attack reports.
//!
//! ```text
//! schema_version: 1
//! environment: TOL_HERM=1e-10,...
//! report
//! function_id: det-two-3x3:010/001/100
//! ...
//! end
//! ```
//!
//! Reals are written with 17 significant digits, so parsing gives back the
//! same bits.

use num_complex::Complex64;

use crate::attacks::{AttackReport, InputUsed, Scenario};
use crate::discrim::CertificateResiduals;
use crate::error::{Error, Result};
use crate::funcspec::Prior;
use crate::tol::{tol, Tolerances};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub schema_version: String,
    pub environment: Tolerances,
    pub reports: Vec<AttackReport>,
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn reals(xs: &[f64]) -> String {
    xs.iter().map(|x| real(*x)).collect::<Vec<_>>().join(",")
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\n', "\\n")
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some(other) => out.push(other),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

impl ReportDocument {
    /// A document stamped with the tolerances in effect.
    pub fn new(reports: Vec<AttackReport>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            environment: *tol(),
            reports,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("schema_version: {}\nenvironment: {}\n", self.schema_version, self.environment);
        for r in &self.reports {
            out.push_str("report\n");
            out.push_str(&format!("function_id: {}\n", r.function_id));
            out.push_str(&format!("scenario: {}\n", r.scenario));
            out.push_str(&format!("prior: {}\n", reals(r.prior.weights())));
            let input = match &r.input_used {
                InputUsed::Honest(i) => format!("honest {i}"),
                InputUsed::Superposition(a) => format!(
                    "superposition {}",
                    a.iter()
                        .map(|z| format!("{}:{}", real(z.re), real(z.im)))
                        .collect::<Vec<_>>()
                        .join(",")
                ),
            };
            out.push_str(&format!("input_used: {input}\n"));
            out.push_str(&format!("p_honest: {}\n", real(r.p_honest)));
            out.push_str(&format!("p_attack: {}\n", real(r.p_attack)));
            let opt = r.p_optimized.map_or_else(|| "none".to_string(), real);
            out.push_str(&format!("p_optimized: {opt}\n"));
            out.push_str(&format!("advantage: {}\n", real(r.advantage)));
            out.push_str(&format!("certified: {}\n", r.certified));
            let res = &r.residuals;
            out.push_str(&format!(
                "residuals: {}\n",
                reals(&[res.stationarity, res.min_eigenvalue, res.anti_hermitian])
            ));
            out.push_str(&format!("notes: {}\n", escape(&r.notes)));
            out.push_str("end\n");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cur = Cursor {
            lines: text.lines().enumerate().map(|(n, l)| (n + 1, l)).collect(),
            at: 0,
        };
        let (n, schema_version) = cur.field("schema_version")?;
        if schema_version != SCHEMA_VERSION {
            return Err(Error::parse(n, format!("unsupported schema version `{schema_version}`")));
        }
        let (n, env) = cur.field("environment")?;
        let environment = Tolerances::with_overrides(env).map_err(|e| Error::parse(n, e.to_string()))?;
        let mut reports = Vec::new();
        while let Some((n, line)) = cur.next_nonblank() {
            if line != "report" {
                return Err(Error::parse(n, "expected `report`"));
            }
            reports.push(parse_report(&mut cur)?);
        }
        Ok(Self {
            schema_version: schema_version.to_string(),
            environment,
            reports,
        })
    }
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Cursor<'a> {
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let l = self.lines.get(self.at).copied();
        self.at += 1;
        l
    }

    fn next_nonblank(&mut self) -> Option<(usize, &'a str)> {
        loop {
            let (n, l) = self.next_line()?;
            if !l.trim().is_empty() {
                return Some((n, l));
            }
        }
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.0)
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let last = self.last_line();
        let (n, line) = self
            .next_line()
            .ok_or_else(|| Error::parse(last, format!("document ends before `{key}:`")))?;
        let rest = line
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| Error::parse(n, format!("expected `{key}:`")))?;
        Ok((n, rest.strip_prefix(' ').unwrap_or(rest)))
    }
}

fn num(n: usize, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::parse(n, format!("bad number `{s}`")))
}

fn nums(n: usize, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| num(n, x)).collect()
}

fn parse_report(cur: &mut Cursor) -> Result<AttackReport> {
    let (_, function_id) = cur.field("function_id")?;
    let (n, s) = cur.field("scenario")?;
    let scenario = Scenario::parse(s).ok_or_else(|| Error::parse(n, format!("unknown scenario `{s}`")))?;
    let (n, s) = cur.field("prior")?;
    let prior = Prior::new(nums(n, s)?).map_err(|e| Error::parse(n, e.to_string()))?;

    let (n, s) = cur.field("input_used")?;
    let input_used = if let Some(i) = s.strip_prefix("honest ") {
        InputUsed::Honest(i.trim().parse().map_err(|_| Error::parse(n, "bad honest index"))?)
    } else if let Some(a) = s.strip_prefix("superposition ") {
        let amps = a
            .split(',')
            .map(|z| {
                let (re, im) = z.split_once(':').ok_or_else(|| Error::parse(n, "amplitude must be re:im"))?;
                Ok(Complex64::new(num(n, re)?, num(n, im)?))
            })
            .collect::<Result<Vec<_>>>()?;
        InputUsed::Superposition(amps)
    } else {
        return Err(Error::parse(n, "input_used must be `honest <i>` or `superposition <amps>`"));
    };

    let (n, s) = cur.field("p_honest")?;
    let p_honest = num(n, s)?;
    let (n, s) = cur.field("p_attack")?;
    let p_attack = num(n, s)?;
    let (n, s) = cur.field("p_optimized")?;
    let p_optimized = if s == "none" { None } else { Some(num(n, s)?) };
    let (n, s) = cur.field("advantage")?;
    let advantage = num(n, s)?;
    let (n, s) = cur.field("certified")?;
    let certified = s.parse::<bool>().map_err(|_| Error::parse(n, "certified must be true or false"))?;
    let (n, s) = cur.field("residuals")?;
    let res = nums(n, s)?;
    let [stationarity, min_eigenvalue, anti_hermitian] = res[..] else {
        return Err(Error::parse(n, "residuals need three values"));
    };
    let (_, notes) = cur.field("notes")?;
    match cur.next_line() {
        Some((_, "end")) => {}
        Some((n, _)) => return Err(Error::parse(n, "expected `end`")),
        None => return Err(Error::parse(cur.last_line(), "report block is not closed with `end`")),
    }
    Ok(AttackReport {
        function_id: function_id.to_string(),
        scenario,
        prior,
        input_used,
        p_honest,
        p_attack,
        p_optimized,
        advantage,
        certified,
        residuals: CertificateResiduals {
            stationarity,
            min_eigenvalue,
            anti_hermitian,
        },
        notes: unescape(notes),
    })
}
