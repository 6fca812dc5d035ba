//! The algebra file format.
//!
//! Line-oriented, deterministic, with `#` comments:
//!
//! ```text
//! name = heis_riem
//! dim = 3
//! basis = e1,e2,e3
//! bracket e1 e2 = e3              # rational coefficients: 1/2*e3 + -1*e1
//! distribution = span(e1,e2,e3)
//! grading V1 = span(e1,e2)        # optional, repeated per layer
//! grading V2 = span(e3)
//! norm = euclidean                # l1 | linf | form(...) | polytope(...)
//! expect alpha_inf = 1            # asserted by `analyze`
//! ```
//!
//! The norm is expressed in the coordinates of the distribution's canonical
//! (reduced row-echelon) basis. `form(a,b;c,d)` lists matrix rows separated
//! by `;`, `polytope((1,0),(0,1))` lists vertices. Unknown keys are
//! rejected; brackets are checked against the Jacobi identity on load.

use lie_core::rat::Rat;
use lie_core::subspace::Subspace;
use lie_core::tensor::StructureTensor;
use lie_metrics::NormSpec;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

pub const EXPECT_KEYS: &[&str] = &[
    "step",
    "alpha1_inf",
    "alpha2_inf",
    "alpha_inf",
    "alpha0",
    "beta",
    "beta_tangent",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraFile {
    pub name: Option<String>,
    pub dim: usize,
    pub basis: Vec<String>,
    /// `(i, j, targets)` with `i < j`, sorted by `(i, j)`.
    pub brackets: Vec<(usize, usize, Vec<(usize, Rat)>)>,
    /// Spanning vectors of the distribution, as written.
    pub distribution: Vec<Vec<Rat>>,
    /// Optional grading: spanning vectors per layer, layers 1..s in order.
    pub grading: Option<Vec<Vec<Vec<Rat>>>>,
    pub norm: NormSpec,
    pub expects: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

fn parse_rat(s: &str, line: usize) -> Result<Rat, ParseError> {
    match Rat::from_str(s.trim()) {
        Ok(r) => Ok(r),
        Err(_) => err(line, format!("malformed rational `{s}`")),
    }
}

struct Ctx {
    dim: usize,
    basis: Vec<String>,
}

impl Ctx {
    fn index(&self, name: &str, line: usize) -> Result<usize, ParseError> {
        self.basis
            .iter()
            .position(|b| b == name.trim())
            .ok_or(ParseError {
                line,
                message: format!("unknown basis name `{}`", name.trim()),
            })
    }

    /// `1/2*e1 + -1*e3 + e4` as a coordinate vector.
    fn parse_vector(&self, s: &str, line: usize) -> Result<Vec<Rat>, ParseError> {
        let mut v = lie_core::rat::vzero(self.dim);
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return err(line, "empty term in vector expression");
            }
            let (coeff, name) = match term.split_once('*') {
                Some((c, n)) => (parse_rat(c, line)?, n),
                None => (Rat::one(), term),
            };
            let idx = self.index(name, line)?;
            v[idx] += coeff;
        }
        Ok(v)
    }

    /// Comma-separated vector expressions inside `span(...)`.
    fn parse_span(&self, s: &str, line: usize) -> Result<Vec<Vec<Rat>>, ParseError> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix("span(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or(ParseError {
                line,
                message: format!("expected span(...), got `{s}`"),
            })?;
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(Vec::new());
        }
        inner
            .split(',')
            .map(|part| self.parse_vector(part, line))
            .collect()
    }
}

fn parse_tuple_list(s: &str, line: usize) -> Result<Vec<Vec<Rat>>, ParseError> {
    // `(1,0),(0,1),(-1,0)`
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let Some(open) = rest.find('(') else {
            return err(line, "expected `(` in vertex list");
        };
        let Some(close) = rest[open..].find(')') else {
            return err(line, "unbalanced `(` in vertex list");
        };
        let body = &rest[open + 1..open + close];
        let v: Result<Vec<Rat>, _> = body.split(',').map(|c| parse_rat(c, line)).collect();
        out.push(v?);
        rest = rest[open + close + 1..].trim_start_matches([',', ' ']);
    }
    if out.is_empty() {
        return err(line, "empty vertex list");
    }
    Ok(out)
}

fn parse_norm(s: &str, line: usize) -> Result<NormSpec, ParseError> {
    let s = s.trim();
    match s {
        "euclidean" => return Ok(NormSpec::Euclidean),
        "l1" => return Ok(NormSpec::L1),
        "linf" => return Ok(NormSpec::Linf),
        _ => {}
    }
    if let Some(body) = s.strip_prefix("form(").and_then(|r| r.strip_suffix(')')) {
        let rows: Result<Vec<Vec<Rat>>, _> = body
            .split(';')
            .map(|row| row.split(',').map(|c| parse_rat(c, line)).collect())
            .collect();
        return Ok(NormSpec::Quadratic(rows?));
    }
    if let Some(body) = s.strip_prefix("polytope(").and_then(|r| r.strip_suffix(')')) {
        return Ok(NormSpec::Polytope(parse_tuple_list(body, line)?));
    }
    err(line, format!("unknown norm `{s}`"))
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut name = None;
        let mut dim: Option<usize> = None;
        let mut basis: Option<Vec<String>> = None;
        let mut brackets: Vec<(usize, usize, Vec<(usize, Rat)>)> = Vec::new();
        let mut distribution: Option<Vec<Vec<Rat>>> = None;
        let mut grading: Vec<(usize, Vec<Vec<Rat>>)> = Vec::new();
        let mut norm: Option<NormSpec> = None;
        let mut expects = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return err(line, "expected `key = value`");
            };
            let key = key.trim();
            let value = value.trim();
            let ctx = || -> Result<Ctx, ParseError> {
                match (&dim, &basis) {
                    (Some(d), Some(b)) => Ok(Ctx {
                        dim: *d,
                        basis: b.clone(),
                    }),
                    _ => err(line, "dim and basis must be declared first"),
                }
            };
            match key.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["name"] => name = Some(value.to_string()),
                ["dim"] => {
                    let d: usize = value
                        .parse()
                        .map_err(|_| ParseError {
                            line,
                            message: format!("bad dimension `{value}`"),
                        })?;
                    if d == 0 {
                        return err(line, "dimension must be positive");
                    }
                    dim = Some(d);
                }
                ["basis"] => {
                    let names: Vec<String> =
                        value.split(',').map(|s| s.trim().to_string()).collect();
                    if names.iter().any(String::is_empty) {
                        return err(line, "empty basis name");
                    }
                    let mut dedup = names.clone();
                    dedup.sort();
                    dedup.dedup();
                    if dedup.len() != names.len() {
                        return err(line, "duplicate basis names");
                    }
                    if let Some(d) = dim {
                        if names.len() != d {
                            return err(line, "basis length does not match dim");
                        }
                    }
                    basis = Some(names);
                }
                ["bracket", a, b] => {
                    let ctx = ctx()?;
                    let i = ctx.index(a, line)?;
                    let j = ctx.index(b, line)?;
                    if i == j {
                        return err(line, "bracket of a basis vector with itself");
                    }
                    let v = ctx.parse_vector(value, line)?;
                    let (i, j, v) = if i < j {
                        (i, j, v)
                    } else {
                        (j, i, lie_core::rat::vneg(&v))
                    };
                    if brackets.iter().any(|(bi, bj, _)| (*bi, *bj) == (i, j)) {
                        return err(line, format!("duplicate bracket for ({a}, {b})"));
                    }
                    let targets: Vec<(usize, Rat)> = v
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .collect();
                    brackets.push((i, j, targets));
                }
                ["distribution"] => {
                    let ctx = ctx()?;
                    distribution = Some(ctx.parse_span(value, line)?);
                }
                ["grading", layer] => {
                    let ctx = ctx()?;
                    let Some(k) = layer
                        .strip_prefix('V')
                        .or_else(|| layer.strip_prefix('W'))
                        .and_then(|n| n.parse::<usize>().ok())
                    else {
                        return err(line, format!("bad grading layer `{layer}`"));
                    };
                    if k != grading.len() + 1 {
                        return err(line, "grading layers must appear in order V1, V2, ...");
                    }
                    grading.push((k, ctx.parse_span(value, line)?));
                }
                ["norm"] => norm = Some(parse_norm(value, line)?),
                ["expect", what] => {
                    if !EXPECT_KEYS.contains(what) {
                        return err(line, format!("unknown expect key `{what}`"));
                    }
                    expects.insert(what.to_string(), value.to_string());
                }
                _ => return err(line, format!("unknown key `{key}`")),
            }
        }

        let Some(dim) = dim else {
            return err(0, "missing `dim`");
        };
        let basis = basis.unwrap_or_else(|| (1..=dim).map(|i| format!("e{i}")).collect());
        let Some(distribution) = distribution else {
            return err(0, "missing `distribution`");
        };
        brackets.sort_by_key(|(i, j, _)| (*i, *j));
        let file = AlgebraFile {
            name,
            dim,
            basis,
            brackets,
            distribution,
            grading: if grading.is_empty() {
                None
            } else {
                Some(grading.into_iter().map(|(_, s)| s).collect())
            },
            norm: norm.unwrap_or(NormSpec::Euclidean),
            expects,
        };
        // Structural validation: Jacobi and norm shape.
        let tensor = file.tensor().map_err(|e| ParseError {
            line: 0,
            message: e.to_string(),
        })?;
        if !tensor.jacobi_ok() {
            return err(0, "brackets violate the Jacobi identity");
        }
        let delta = file.delta().map_err(|e| ParseError {
            line: 0,
            message: e.to_string(),
        })?;
        file.norm.validate(delta.dim()).map_err(|e| ParseError {
            line: 0,
            message: e.to_string(),
        })?;
        Ok(file)
    }

    /// Parse a `span(...)` expression against this file's basis names.
    pub fn parse_span_expr(&self, s: &str) -> Result<Vec<Vec<Rat>>, ParseError> {
        let ctx = Ctx {
            dim: self.dim,
            basis: self.basis.clone(),
        };
        ctx.parse_span(s, 0)
    }

    pub fn tensor(&self) -> Result<StructureTensor, lie_core::AlgebraError> {
        let mut t = StructureTensor::new(self.dim, Some(self.basis.clone()));
        for (i, j, targets) in &self.brackets {
            t.set_bracket(*i, *j, targets.clone())?;
        }
        Ok(t)
    }

    pub fn delta(&self) -> Result<Subspace, lie_core::AlgebraError> {
        Subspace::span(self.dim, &self.distribution)
    }

    pub fn grading_layers(&self) -> Result<Option<Vec<Subspace>>, lie_core::AlgebraError> {
        match &self.grading {
            None => Ok(None),
            Some(layers) => {
                let mut out = Vec::with_capacity(layers.len());
                for l in layers {
                    out.push(Subspace::span(self.dim, l)?);
                }
                Ok(Some(out))
            }
        }
    }

    fn write_vector(&self, out: &mut String, v: &[Rat]) {
        let mut first = true;
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                out.push_str(" + ");
            }
            first = false;
            if c.is_one() {
                out.push_str(&self.basis[i]);
            } else {
                let _ = write!(out, "{}*{}", c, self.basis[i]);
            }
        }
        if first {
            out.push('0');
        }
    }

    fn write_span(&self, out: &mut String, vectors: &[Vec<Rat>]) {
        out.push_str("span(");
        for (k, v) in vectors.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            self.write_vector(out, v);
        }
        out.push(')');
    }

    /// Canonical text form; `parse(serialize(f)) == f`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "name = {name}");
        }
        let _ = writeln!(out, "dim = {}", self.dim);
        let _ = writeln!(out, "basis = {}", self.basis.join(","));
        for (i, j, targets) in &self.brackets {
            let mut v = lie_core::rat::vzero(self.dim);
            for (k, c) in targets {
                v[*k] = c.clone();
            }
            let _ = write!(out, "bracket {} {} = ", self.basis[*i], self.basis[*j]);
            self.write_vector(&mut out, &v);
            out.push('\n');
        }
        out.push_str("distribution = ");
        self.write_span(&mut out, &self.distribution);
        out.push('\n');
        if let Some(layers) = &self.grading {
            for (k, layer) in layers.iter().enumerate() {
                let _ = write!(out, "grading V{} = ", k + 1);
                self.write_span(&mut out, layer);
                out.push('\n');
            }
        }
        match &self.norm {
            NormSpec::Euclidean => out.push_str("norm = euclidean\n"),
            NormSpec::L1 => out.push_str("norm = l1\n"),
            NormSpec::Linf => out.push_str("norm = linf\n"),
            NormSpec::Quadratic(rows) => {
                out.push_str("norm = form(");
                for (r, row) in rows.iter().enumerate() {
                    if r > 0 {
                        out.push(';');
                    }
                    for (c, x) in row.iter().enumerate() {
                        if c > 0 {
                            out.push(',');
                        }
                        let _ = write!(out, "{x}");
                    }
                }
                out.push_str(")\n");
            }
            NormSpec::Polytope(verts) => {
                out.push_str("norm = polytope(");
                for (k, v) in verts.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('(');
                    for (c, x) in v.iter().enumerate() {
                        if c > 0 {
                            out.push(',');
                        }
                        let _ = write!(out, "{x}");
                    }
                    out.push(')');
                }
                out.push_str(")\n");
            }
        }
        for (k, v) in &self.expects {
            let _ = writeln!(out, "expect {k} = {v}");
        }
        out
    }
}
