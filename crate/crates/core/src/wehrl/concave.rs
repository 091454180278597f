//! Concave functions `G : [0,1] → ℝ` with `G(0) = 0`: a few built-ins and a
//! small expression language of sums of `c·t^k` and `c·t^k·log(t)` terms.

use std::fmt;

use crate::error::{Error, Result};

/// Grid used by the sampled concavity check.
const GRID: usize = 200;
const CONCAVITY_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    NegTLogT,
    TMinusTSquared,
    /// `sin(πt)/π`, a smooth strictly concave stand-in for `min(t, 1−t)`.
    SinePi,
    Linear(f64),
    Expr(Vec<Term>),
}

/// `coef · t^power · log(t)^{log as u8}`.
#[derive(Clone, Debug, PartialEq)]
struct Term {
    coef: f64,
    power: u32,
    log: bool,
}

impl Term {
    fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return if self.power == 0 && !self.log { self.coef } else { 0.0 };
        }
        let mut v = self.coef * t.powi(self.power as i32);
        if self.log {
            v *= t.ln();
        }
        v
    }
}

/// A validated concave function on `[0,1]` with `G(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcaveFn {
    name: String,
    kind: Kind,
    strictly_concave: bool,
    linear: bool,
}

impl ConcaveFn {
    /// `G(t) = −t log t`.
    pub fn neg_t_log_t() -> Self {
        ConcaveFn {
            name: "-t*log(t)".into(),
            kind: Kind::NegTLogT,
            strictly_concave: true,
            linear: false,
        }
    }

    /// `G(t) = t − t²`.
    pub fn t_minus_t_squared() -> Self {
        ConcaveFn {
            name: "t-t^2".into(),
            kind: Kind::TMinusTSquared,
            strictly_concave: true,
            linear: false,
        }
    }

    /// `G(t) = sin(πt)/π`.
    pub fn sine() -> Self {
        ConcaveFn {
            name: "sin(pi*t)/pi".into(),
            kind: Kind::SinePi,
            strictly_concave: true,
            linear: false,
        }
    }

    /// `G(t) = a·t`.
    pub fn linear(a: f64) -> Self {
        ConcaveFn {
            name: format!("{a}*t"),
            kind: Kind::Linear(a),
            strictly_concave: false,
            linear: true,
        }
    }

    /// The built-in family used by the test suites.
    pub fn builtins() -> Vec<ConcaveFn> {
        vec![Self::neg_t_log_t(), Self::t_minus_t_squared(), Self::sine()]
    }

    /// Parses a G-spec: a built-in name (`entropy`, `quadratic`, `sine`) or an
    /// expression such as `-t*log(t)`, `t - t^2`, `3/2*t - 1/2*t^3`.
    pub fn parse(spec: &str) -> Result<Self> {
        let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        match compact.as_str() {
            "entropy" | "-t*log(t)" | "-tlog(t)" => return Ok(Self::neg_t_log_t()),
            "quadratic" | "t-t^2" => return Ok(Self::t_minus_t_squared()),
            "sine" | "sin(pi*t)/pi" => return Ok(Self::sine()),
            _ => {}
        }
        let terms = parse_terms(&compact).map_err(|m| Error::InvalidConcaveFn(format!("`{spec}`: {m}")))?;
        Self::from_terms(spec.trim().to_string(), terms)
    }

    fn from_terms(name: String, terms: Vec<Term>) -> Result<Self> {
        let mut f = ConcaveFn {
            name,
            kind: Kind::Expr(terms),
            strictly_concave: false,
            linear: false,
        };
        if f.eval(0.0).abs() > CONCAVITY_SLACK {
            return Err(Error::InvalidConcaveFn(format!("{}: G(0) = {} ≠ 0", f.name, f.eval(0.0))));
        }
        let samples: Vec<f64> = (0..=GRID).map(|i| f.eval(i as f64 / GRID as f64)).collect();
        let mut min_gap = f64::INFINITY;
        let mut max_gap = 0.0f64;
        for i in 0..=GRID {
            for j in (i + 2..=GRID).step_by(2) {
                let mid = samples[(i + j) / 2];
                let gap = mid - (samples[i] + samples[j]) / 2.0;
                if gap < -CONCAVITY_SLACK {
                    return Err(Error::InvalidConcaveFn(format!(
                        "{}: not concave near t = {}",
                        f.name,
                        (i + j) as f64 / (2 * GRID) as f64
                    )));
                }
                min_gap = min_gap.min(gap);
                max_gap = max_gap.max(gap.abs());
            }
        }
        f.linear = max_gap <= CONCAVITY_SLACK;
        f.strictly_concave = !f.linear && min_gap > 0.0;
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_strictly_concave(&self) -> bool {
        self.strictly_concave
    }

    pub fn is_linear(&self) -> bool {
        self.linear
    }

    pub fn value_at_0(&self) -> f64 {
        self.eval(0.0)
    }

    pub fn value_at_1(&self) -> f64 {
        self.eval(1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::NegTLogT => {
                if t <= 0.0 {
                    0.0
                } else {
                    -t * t.ln()
                }
            }
            Kind::TMinusTSquared => t - t * t,
            Kind::SinePi => {
                if t >= 1.0 {
                    0.0
                } else {
                    (std::f64::consts::PI * t).sin() / std::f64::consts::PI
                }
            }
            Kind::Linear(a) => a * t,
            Kind::Expr(terms) => terms.iter().map(|term| term.eval(t)).sum(),
        }
    }
}

impl fmt::Display for ConcaveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn parse_coef(s: &str) -> std::result::Result<f64, String> {
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.parse().map_err(|_| format!("bad numerator `{num}`"))?;
        let d: f64 = den.parse().map_err(|_| format!("bad denominator `{den}`"))?;
        if d == 0.0 {
            return Err("zero denominator".into());
        }
        Ok(n / d)
    } else {
        s.parse().map_err(|_| format!("bad coefficient `{s}`"))
    }
}

fn parse_monomial(s: &str) -> std::result::Result<(u32, bool), String> {
    let mut power = 0u32;
    let mut log = false;
    for factor in s.split('*') {
        match factor {
            "t" => power += 1,
            "log(t)" | "ln(t)" if !log => log = true,
            f if f.starts_with("t^") => {
                power += f[2..].parse::<u32>().map_err(|_| format!("bad exponent in `{f}`"))?;
            }
            f => return Err(format!("unsupported factor `{f}`")),
        }
    }
    if log && power == 0 {
        return Err("log(t) must be multiplied by a positive power of t".into());
    }
    Ok((power, log))
}

fn parse_terms(s: &str) -> std::result::Result<Vec<Term>, String> {
    if s.is_empty() {
        return Err("empty expression".into());
    }
    let mut pieces = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'(' {
            pieces.push(&s[start..i]);
            start = i;
        }
    }
    pieces.push(&s[start..]);
    pieces
        .into_iter()
        .map(|piece| {
            let (sign, body) = match piece.as_bytes()[0] {
                b'-' => (-1.0, &piece[1..]),
                b'+' => (1.0, &piece[1..]),
                _ => (1.0, piece),
            };
            if body.is_empty() {
                return Err("dangling sign".to_string());
            }
            let first_t = body.find(|c: char| c == 't' || c == 'l').unwrap_or(body.len());
            let (coef_part, mono) = body.split_at(first_t);
            let coef_part = coef_part.strip_suffix('*').unwrap_or(coef_part);
            let coef = if coef_part.is_empty() { 1.0 } else { parse_coef(coef_part)? };
            let (power, log) = if mono.is_empty() { (0, false) } else { parse_monomial(mono)? };
            Ok(Term {
                coef: sign * coef,
                power,
                log,
            })
        })
        .collect()
}
