//! Parameter sweeps over families of monomial R-ideals.
//!
//! A recipe names integer parameters with inclusive ranges and a family
//! template whose generator exponents and component exponents are
//! arithmetic expressions in those parameters. Each parameter tuple gives
//! one row; engine failures are recorded on the row and never stop the
//! sweep.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::germ::CyclicQuotientGerm;
use crate::ideal::{IdealComponent, MonomialIdeal, RIdeal};
use crate::mld::{alc_threshold, is_semistable_type, is_special, lct, mld_at_origin, MldConfig, MldStatus, PairSpec, Threshold};
use crate::par::{self, Execution};
use crate::poly::ExponentVector;
use crate::rational::{serde_rational_matrix, serde_rational_opt, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    Mld,
    Lct,
    Alct,
    Semistable,
    Special,
}

/// One factor of the family: either explicit generators or a power of the
/// maximal ideal, raised to `exp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentTemplate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximal: Option<Value>,
    #[serde(default = "one_value")]
    pub exp: Value,
}

fn one_value() -> Value {
    Value::from(1)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecipe {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub germ: Option<CyclicQuotientGerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Inclusive ranges, swept in name order with the last name fastest.
    pub params: BTreeMap<String, (i64, i64)>,
    pub family: Vec<ComponentTemplate>,
    pub invariant: Invariant,
    /// Second ideal for `lct` and `alct`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub against: Option<Vec<ComponentTemplate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Value>,
    #[serde(default)]
    pub config: ScanSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub params: BTreeMap<String, i64>,
    /// `ok`, `minus-infinity`, `uncertified`, `unreachable` or `error`.
    pub status: String,
    #[serde(with = "serde_rational_opt")]
    pub value: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(with = "serde_rational_matrix")]
    pub witnesses: Vec<Vec<Rational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub distinct_values: Vec<Rational>,
    /// Longest strictly increasing run of consecutive values.
    pub longest_increasing_run: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub invariant: Invariant,
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanOptions {
    pub execution: Execution,
    pub timing: bool,
}

// ---- expressions --------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(i64),
    Name(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token::Num(text.parse().map_err(|_| Error::invalid(format!("number too large in {s:?}")))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Name(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::invalid(format!("unexpected {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a BTreeMap<String, i64>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Rational> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc += self.product()?;
            } else if self.eat('-') {
                acc -= self.product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Rational> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc *= self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(Error::invalid("division by zero"));
                }
                acc /= d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Rational> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Rational> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = self.unary()?;
        if !e.is_integer() || e.abs() > Rational::from_integer(64.into()) {
            return Err(Error::invalid("exponents must be integers of size at most 64"));
        }
        let n = e.to_integer();
        let k: usize = n.magnitude().try_into().unwrap_or(0);
        let p = num_traits::pow(base.clone(), k);
        if n.is_negative() {
            if p.is_zero() {
                return Err(Error::invalid("division by zero"));
            }
            return Ok(Rational::one() / p);
        }
        Ok(p)
    }

    fn atom(&mut self) -> Result<Rational> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Rational::from_integer(n.into()))
            }
            Some(Token::Name(name)) => {
                self.pos += 1;
                self.vars
                    .get(&name)
                    .map(|&v| Rational::from_integer(v.into()))
                    .ok_or_else(|| Error::invalid(format!("unknown parameter {name:?}")))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::invalid("missing ')'"));
                }
                Ok(v)
            }
            other => Err(Error::invalid(format!("unexpected token {other:?}"))),
        }
    }
}

/// Evaluates an exact rational expression with `+ - * / ^` and parentheses.
pub fn evaluate(expr: &str, vars: &BTreeMap<String, i64>) -> Result<Rational> {
    let mut p = Parser { tokens: tokenize(expr)?, pos: 0, vars };
    let v = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(Error::invalid(format!("trailing input in {expr:?}")));
    }
    Ok(v)
}

fn eval_value(v: &Value, vars: &BTreeMap<String, i64>) -> Result<Rational> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|x| Rational::from_integer(x.into()))
            .ok_or_else(|| Error::invalid(format!("{n} is not an integer"))),
        Value::String(s) => evaluate(s, vars),
        other => Err(Error::invalid(format!("expected a number or expression, got {other}"))),
    }
}

fn eval_exponent(v: &Value, vars: &BTreeMap<String, i64>) -> Result<u32> {
    let q = eval_value(v, vars)?;
    if !q.is_integer() || q.is_negative() {
        return Err(Error::invalid(format!("generator exponent {q} is not a nonnegative integer")));
    }
    u32::try_from(q.to_integer()).map_err(|_| Error::invalid("generator exponent too large"))
}

fn instantiate(
    family: &[ComponentTemplate],
    dim: usize,
    germ: Option<&CyclicQuotientGerm>,
    vars: &BTreeMap<String, i64>,
) -> Result<RIdeal> {
    let mut comps = Vec::new();
    for t in family {
        let ideal = match (&t.gens, &t.maximal) {
            (Some(gens), None) => {
                let mut out = Vec::new();
                for g in gens {
                    if g.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
                    }
                    out.push(ExponentVector(g.iter().map(|x| eval_exponent(x, vars)).collect::<Result<_>>()?));
                }
                MonomialIdeal::with_quotient(dim, out, germ.cloned())?
            }
            (None, Some(k)) => {
                let k = eval_exponent(k, vars)?;
                match germ {
                    Some(g) if !g.is_smooth() => MonomialIdeal::invariant_maximal(g).power(k),
                    _ => MonomialIdeal::maximal_power(dim, k),
                }
            }
            _ => return Err(Error::invalid("a component needs exactly one of \"gens\" or \"maximal\"")),
        };
        let exp = eval_value(&t.exp, vars)?;
        if exp.is_zero() {
            continue;
        }
        comps.push((IdealComponent::Monomial(ideal), exp));
    }
    RIdeal::new(comps)
}

impl ScanRecipe {
    fn dimension(&self) -> Result<usize> {
        match (&self.germ, self.dim) {
            (Some(g), Some(d)) if g.dim() != d => Err(Error::DimensionMismatch { expected: g.dim(), found: d }),
            (Some(g), _) => Ok(g.dim()),
            (None, Some(d)) => Ok(d),
            (None, None) => Ok(3),
        }
    }

    /// Every parameter tuple in sweep order.
    pub fn tuples(&self) -> Result<Vec<BTreeMap<String, i64>>> {
        let mut out = vec![BTreeMap::new()];
        for (name, &(lo, hi)) in &self.params {
            if lo > hi {
                return Err(Error::invalid(format!("empty range for {name}: {lo}..={hi}")));
            }
            out = out
                .into_iter()
                .flat_map(|t| {
                    (lo..=hi).map(move |v| {
                        let mut t = t.clone();
                        t.insert(name.clone(), v);
                        t
                    })
                })
                .collect();
        }
        Ok(out)
    }

    fn pair(&self, vars: &BTreeMap<String, i64>) -> Result<PairSpec> {
        let d = self.dimension()?;
        let a = instantiate(&self.family, d, self.germ.as_ref(), vars)?;
        match &self.germ {
            Some(g) => PairSpec::new(g.clone(), a),
            None => PairSpec::smooth(d, a),
        }
    }

    fn engine_config(&self) -> MldConfig {
        let mut cfg = MldConfig::default();
        cfg.bound = self.config.bound;
        if let Some(c) = self.config.certify {
            cfg.certify = c;
        }
        // rows are already spread over the pool
        cfg.execution = Execution::Sequential;
        cfg
    }

    fn run_row(&self, vars: &BTreeMap<String, i64>) -> Result<ScanRow> {
        let cfg = self.engine_config();
        let pair = self.pair(vars)?;
        let mut row = ScanRow {
            params: vars.clone(),
            status: "ok".into(),
            value: None,
            verdict: None,
            witnesses: Vec::new(),
            error: None,
            elapsed_us: None,
        };
        let against = || -> Result<RIdeal> {
            let t = self.against.as_ref().ok_or_else(|| Error::invalid("lct and alct need \"against\""))?;
            instantiate(t, pair.dim(), self.germ.as_ref(), vars)
        };
        match self.invariant {
            Invariant::Mld => {
                let rep = mld_at_origin(&pair, &cfg)?;
                row.status = match rep.status {
                    MldStatus::Value => "ok",
                    MldStatus::MinusInfinity => "minus-infinity",
                    MldStatus::UncertifiedAboveBound => "uncertified",
                }
                .into();
                row.value = rep.value;
                row.witnesses = rep.witnesses;
            }
            Invariant::Lct => match lct(&pair, &against()?)? {
                Threshold::Finite(t) => row.value = Some(t),
                Threshold::Infinite => row.verdict = Some("+inf".into()),
            },
            Invariant::Alct => {
                let target = self.target.as_ref().ok_or_else(|| Error::invalid("alct needs \"target\""))?;
                let target = eval_value(target, vars)?;
                match alc_threshold(&pair, &against()?, &target, &cfg)? {
                    Some(t) => row.value = Some(t),
                    None => row.status = "unreachable".into(),
                }
            }
            Invariant::Semistable => {
                let rep = is_semistable_type(&pair, &cfg)?;
                row.verdict = Some(rep.verdict.to_string());
                row.value = rep.mld.certified_value().cloned();
                row.witnesses = rep.minimizers;
            }
            Invariant::Special => {
                let rep = is_special(&pair, &cfg)?;
                row.verdict = Some(rep.verdict.to_string());
                row.value = rep.mld;
            }
        }
        Ok(row)
    }
}

fn summarize(rows: &[ScanRow]) -> ScanSummary {
    let mut distinct: Vec<Rational> = rows.iter().filter_map(|r| r.value.clone()).collect();
    distinct.sort();
    distinct.dedup();
    let mut best = 0;
    let mut run = 0;
    let mut prev: Option<&Rational> = None;
    for r in rows {
        match (&r.value, prev) {
            (Some(v), Some(p)) if v > p => run += 1,
            (Some(_), _) => run = 1,
            (None, _) => run = 0,
        }
        prev = r.value.as_ref();
        best = best.max(run);
    }
    ScanSummary { distinct_values: distinct, longest_increasing_run: best }
}

/// Runs every row of the recipe. Row order and content do not depend on
/// the execution mode.
pub fn run_scan(recipe: &ScanRecipe, opts: ScanOptions) -> Result<ScanTable> {
    recipe.dimension()?;
    let tuples = recipe.tuples()?;
    let rows = par::map(opts.execution, &tuples, |vars| {
        let start = Instant::now();
        let mut row = recipe.run_row(vars).unwrap_or_else(|e| ScanRow {
            params: vars.clone(),
            status: "error".into(),
            value: None,
            verdict: None,
            witnesses: Vec::new(),
            error: Some(e.to_string()),
            elapsed_us: None,
        });
        if opts.timing {
            row.elapsed_us = Some(start.elapsed().as_micros());
        }
        row
    });
    let summary = summarize(&rows);
    Ok(ScanTable { invariant: recipe.invariant, rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn vars(pairs: &[(&str, i64)]) -> BTreeMap<String, i64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn expressions() {
        let v = vars(&[("i", 4), ("j", 3)]);
        assert_eq!(evaluate("3 - 1/i", &v).unwrap(), frac(11, 4));
        assert_eq!(evaluate("(i + j) * 2 ^ 2", &v).unwrap(), int(28));
        assert_eq!(evaluate("-i/-j", &v).unwrap(), frac(4, 3));
        assert_eq!(evaluate("2^-2", &v).unwrap(), frac(1, 4));
        assert!(evaluate("1/(i-4)", &v).is_err());
        assert!(evaluate("k", &v).is_err());
        assert!(evaluate("1 +", &v).is_err());
        assert!(evaluate("(1", &v).is_err());
    }

    fn recipe(json: &str) -> ScanRecipe {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn decreasing_mld_family() {
        let r = recipe(r#"{"params": {"i": [1, 20]}, "family": [{"maximal": 1, "exp": "3 - 1/i"}], "invariant": "mld"}"#);
        let t = run_scan(&r, ScanOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 20);
        for (i, row) in t.rows.iter().enumerate() {
            assert_eq!(row.value, Some(frac(1, i as i64 + 1)), "{row:?}");
        }
        assert_eq!(t.summary.distinct_values.len(), 20);
        assert_eq!(t.summary.longest_increasing_run, 1);
    }

    #[test]
    fn constant_alct_column() {
        let r = recipe(
            r#"{"params": {"i": [1, 4]}, "family": [], "invariant": "alct",
                "against": [{"maximal": 1}], "target": "0"}"#,
        );
        let t = run_scan(&r, ScanOptions::default()).unwrap();
        assert!(t.rows.iter().all(|row| row.value == Some(int(3))));
        assert_eq!(t.summary.distinct_values, vec![int(3)]);
    }

    #[test]
    fn errors_stay_on_their_row() {
        let r = recipe(r#"{"params": {"i": [0, 2]}, "family": [{"gens": [["i - 1", 0, 0]], "exp": "1"}], "invariant": "mld"}"#);
        let t = run_scan(&r, ScanOptions::default()).unwrap();
        assert_eq!(t.rows[0].status, "error");
        assert_eq!(t.rows.len(), 3);
        assert_eq!(t.rows[2].value, Some(int(2)));
    }

    #[test]
    fn tuples_sweep_last_name_fastest() {
        let r = recipe(r#"{"params": {"a": [1, 2], "b": [5, 6]}, "family": [], "invariant": "mld"}"#);
        let t: Vec<(i64, i64)> = r.tuples().unwrap().iter().map(|m| (m["a"], m["b"])).collect();
        assert_eq!(t, vec![(1, 5), (1, 6), (2, 5), (2, 6)]);
    }

    #[test]
    fn run_lengths() {
        let row = |v: Option<i64>| ScanRow {
            params: BTreeMap::new(),
            status: "ok".into(),
            value: v.map(int),
            verdict: None,
            witnesses: vec![],
            error: None,
            elapsed_us: None,
        };
        let rows: Vec<ScanRow> = [Some(1), Some(2), Some(2), Some(3), Some(4), Some(5), None, Some(6)].into_iter().map(row).collect();
        let s = summarize(&rows);
        assert_eq!(s.longest_increasing_run, 4);
        assert_eq!(s.distinct_values.len(), 6);
    }
}
