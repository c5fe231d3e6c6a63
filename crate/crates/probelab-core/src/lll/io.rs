//! LLL instance file format: JSON listing variables (id, domain) and events
//! (id, scope, violating assignments as value tuples).

use super::{Event, LllError, LllInstance, Variable};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceFormatError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Instance(#[from] LllError),
    #[error("invalid file: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    version: u32,
    variables: Vec<(u64, u32)>,
    events: Vec<EventFile>,
}

#[derive(Serialize, Deserialize)]
struct EventFile {
    id: u64,
    vbl: Vec<u64>,
    bad: Vec<Vec<u32>>,
}

pub fn instance_to_json(inst: &LllInstance) -> String {
    let file = InstanceFile {
        version: 1,
        variables: inst.variables().iter().map(|v| (v.id, v.domain)).collect(),
        events: inst
            .events()
            .iter()
            .map(|e| EventFile { id: e.id, vbl: e.vbl.clone(), bad: e.bad.clone() })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_json(text: &str) -> Result<LllInstance, InstanceFormatError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(InstanceFormatError::Invalid(format!("unsupported version {}", file.version)));
    }
    let variables =
        file.variables.into_iter().map(|(id, domain)| Variable { id, domain }).collect();
    let events = file
        .events
        .into_iter()
        .map(|e| Event { id: e.id, vbl: e.vbl, bad: e.bad })
        .collect();
    Ok(LllInstance::new(variables, events)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lll::testutil::tiny_instance;

    #[test]
    fn instance_round_trip() {
        let inst = tiny_instance(
            vec![(0, vec![0, 1], vec![vec![1, 1]]), (3, vec![1, 2], vec![vec![0, 0]])],
            3,
        );
        let s = instance_to_json(&inst);
        let inst2 = instance_from_json(&s).unwrap();
        assert_eq!(instance_to_json(&inst2), s);
    }
}
