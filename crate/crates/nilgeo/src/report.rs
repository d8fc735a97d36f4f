//! Machine-readable reports: JSON with a fixed key order, doubles with 17
//! significant digits, rationals as `"p/q"` strings.

use std::fmt::Write;

use nilgeo_core::Q;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Rational(Q),
    Int(i64),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<Q> for Value {
    fn from(x: Q) -> Self {
        Value::Rational(x)
    }
}

impl From<&Q> for Value {
    fn from(x: &Q) -> Self {
        Value::Rational(x.clone())
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Value::Int(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl<T: Into<Value>> From<Vec<T>> for Value {
    fn from(x: Vec<T>) -> Self {
        Value::List(x.into_iter().map(Into::into).collect())
    }
}

pub fn rational_string(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn float_json(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no infinities; keep them readable and stable.
        format!("\"{x}\"")
    }
}

fn string_json(s: &str) -> String {
    serde_json::Value::String(s.to_string()).to_string()
}

impl Value {
    fn write_json(&self, out: &mut String) {
        match self {
            Value::Float(x) => out.push_str(&float_json(*x)),
            Value::Rational(q) => out.push_str(&string_json(&rational_string(q))),
            Value::Int(i) => write!(out, "{i}").unwrap(),
            Value::Bool(b) => write!(out, "{b}").unwrap(),
            Value::Text(s) => out.push_str(&string_json(s)),
            Value::List(xs) => {
                out.push('[');
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    x.write_json(out);
                }
                out.push(']');
            }
        }
    }
}

/// One checked condition.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub criterion: u8,
    pub name: String,
    pub values: Vec<(String, Value)>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub note: String,
}

impl CheckLine {
    pub fn new(criterion: u8, name: &str, pass: bool) -> Self {
        CheckLine {
            criterion,
            name: name.to_string(),
            values: Vec::new(),
            tolerance: None,
            pass,
            note: String::new(),
        }
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.push((key.to_string(), v.into()));
        self
    }

    pub fn tol(mut self, t: f64) -> Self {
        self.tolerance = Some(t);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = n.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub version: String,
    pub manifolds: Vec<String>,
    pub checks: Vec<CheckLine>,
    pub wall_time: f64,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Everything except the trailing `wall_time` field; byte-identical for
    /// identical seed, version and flags.
    pub fn body(&self) -> String {
        let mut o = String::new();
        o.push_str("{\n");
        writeln!(o, "  \"suite\": {},", string_json(&self.suite)).unwrap();
        writeln!(o, "  \"seed\": {},", self.seed).unwrap();
        writeln!(o, "  \"version\": {},", string_json(&self.version)).unwrap();
        let ms: Vec<String> = self.manifolds.iter().map(|m| string_json(m)).collect();
        writeln!(o, "  \"manifolds\": [{}],", ms.join(", ")).unwrap();
        o.push_str("  \"checks\": [");
        for (i, c) in self.checks.iter().enumerate() {
            o.push_str(if i == 0 { "\n" } else { ",\n" });
            o.push_str("    {");
            write!(
                o,
                "\"criterion\": {}, \"name\": {}, \"values\": {{",
                c.criterion,
                string_json(&c.name)
            )
            .unwrap();
            for (j, (k, v)) in c.values.iter().enumerate() {
                if j > 0 {
                    o.push_str(", ");
                }
                write!(o, "{}: ", string_json(k)).unwrap();
                v.write_json(&mut o);
            }
            o.push_str("}, \"tolerance\": ");
            match c.tolerance {
                Some(t) => o.push_str(&float_json(t)),
                None => o.push_str("null"),
            }
            write!(
                o,
                ", \"pass\": {}, \"note\": {}}}",
                c.pass,
                string_json(&c.note)
            )
            .unwrap();
        }
        if !self.checks.is_empty() {
            o.push_str("\n  ");
        }
        o.push_str("],\n");
        write!(o, "  \"pass\": {}", self.pass()).unwrap();
        o
    }

    pub fn to_json(&self) -> String {
        format!(
            "{},\n  \"wall_time\": {}\n}}\n",
            self.body(),
            float_json(self.wall_time)
        )
    }
}
