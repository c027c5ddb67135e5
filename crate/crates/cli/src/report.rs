use std::collections::BTreeSet;
use std::time::Instant;

use bk_core::bkmodel::Source;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Corrected,
    ConsistentWithClaim,
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Corrected => "corrected",
            Status::ConsistentWithClaim => "consistent-with-claim",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub id: String,
    pub anchor: String,
    pub source: Source,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Claim {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, source: Source, status: Status) -> Self {
        Claim {
            id: id.into(),
            anchor: anchor.into(),
            source,
            status,
            residual: None,
            metric: None,
            note: None,
            details: Value::Null,
            wall_time_s: None,
        }
    }

    pub fn residual(mut self, r: impl Into<String>) -> Self {
        self.residual = Some(r.into());
        self
    }

    pub fn metric(mut self, m: f64) -> Self {
        self.metric = Some(m);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }

    pub fn details(mut self, d: impl Serialize) -> Self {
        self.details = serde_json::to_value(d).expect("details serialize");
        self
    }

    pub fn pass_if(id: impl Into<String>, anchor: impl Into<String>, source: Source, ok: bool) -> Self {
        Claim::new(id, anchor, source, if ok { Status::Pass } else { Status::Fail })
    }
}

/// Runs `f` and stamps the claims it returns with the elapsed time.
pub fn timed(f: impl FnOnce() -> Vec<Claim>) -> Vec<Claim> {
    let t = Instant::now();
    let mut out = f();
    let dt = t.elapsed().as_secs_f64();
    for c in &mut out {
        c.wall_time_s.get_or_insert(dt);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub assumptions: Vec<String>,
    pub claims: Vec<Claim>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

impl Report {
    pub fn new(claims: Vec<Claim>, assumptions: impl IntoIterator<Item = String>) -> Self {
        let mut claims = claims;
        claims.sort_by(|a, b| a.id.cmp(&b.id));
        let mut seen = BTreeSet::new();
        for c in &claims {
            assert!(seen.insert(c.id.clone()), "duplicate claim id {}", c.id);
        }
        let assumptions: BTreeSet<String> = assumptions.into_iter().collect();
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            assumptions: assumptions.into_iter().collect(),
            claims,
        }
    }

    pub fn without_timings(mut self) -> Self {
        for c in &mut self.claims {
            c.wall_time_s = None;
        }
        self
    }

    pub fn get(&self, id: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.id == id)
    }

    /// 3 if an internal check failed, 1 if a printed claim failed, else 0.
    pub fn exit_code(&self) -> i32 {
        let failed = |src: &dyn Fn(Source) -> bool| self.claims.iter().any(|c| c.status == Status::Fail && src(c.source));
        if failed(&|s| s != Source::Paper) {
            EXIT_INTERNAL
        } else if failed(&|s| s == Source::Paper) {
            EXIT_CLAIM_FAILED
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let width = self.claims.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.claims {
            let what = match (&c.residual, c.metric) {
                (_, Some(m)) => format!("{m:.3e}"),
                (Some(r), None) if r.len() > 80 => format!("{}...", &r[..r.char_indices().nth(77).map_or(r.len(), |(i, _)| i)]),
                (Some(r), None) => r.clone(),
                (None, None) => String::new(),
            };
            let time = c.wall_time_s.map(|t| format!("  [{t:.3}s]")).unwrap_or_default();
            out.push_str(&format!("{:<22} {:<width$}  {}{}\n", c.status.label(), c.id, what, time));
        }
        let count = |s: Status| self.claims.iter().filter(|c| c.status == s).count();
        out.push_str(&format!(
            "{} claims: {} pass, {} corrected, {} consistent-with-claim, {} fail, {} skipped\n",
            self.claims.len(),
            count(Status::Pass),
            count(Status::Corrected),
            count(Status::ConsistentWithClaim),
            count(Status::Fail),
            count(Status::Skipped)
        ));
        out
    }
}
