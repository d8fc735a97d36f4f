//! Plain-text tangent-state records: `v: ...; z: ...; V: ...; Z: ...`.

use nilgeo_core::TangentState;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}` expects {expected} numbers, got {got}")]
    Length {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("bad number `{0}`")]
    Number(String),
    #[error("unknown or repeated field `{0}`")]
    Field(String),
}

const LABELS: [&str; 4] = ["v", "z", "V", "Z"];

/// Parses a record with `dim_v` and `dim_z` entries in the v- and z-fields.
pub fn parse_state(text: &str, dim_v: usize, dim_z: usize) -> Result<TangentState, StateError> {
    let mut fields: [Option<Vec<f64>>; 4] = [None, None, None, None];
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (label, nums) = part
            .split_once(':')
            .ok_or_else(|| StateError::Field(part.to_string()))?;
        let label = label.trim();
        let idx = LABELS
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| StateError::Field(label.to_string()))?;
        if fields[idx].is_some() {
            return Err(StateError::Field(label.to_string()));
        }
        let vals = nums
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| StateError::Number(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        fields[idx] = Some(vals);
    }
    let mut out = Vec::with_capacity(4);
    for (i, f) in fields.into_iter().enumerate() {
        let want = if i % 2 == 0 { dim_v } else { dim_z };
        let f = f.ok_or(StateError::Missing(LABELS[i]))?;
        if f.len() != want {
            return Err(StateError::Length {
                field: LABELS[i],
                expected: want,
                got: f.len(),
            });
        }
        out.push(f);
    }
    let mut it = out.into_iter();
    let (v, z, fv, fz) = (
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    );
    Ok(TangentState::new(v, z, fv, fz))
}

fn join(x: &[f64]) -> String {
    x.iter()
        .map(|y| format!("{y:.16e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn format_state(st: &TangentState) -> String {
    format!(
        "v: {}; z: {}; V: {}; Z: {}",
        join(&st.base.v),
        join(&st.base.z),
        join(&st.fiber_v),
        join(&st.fiber_z)
    )
}
