//! JSON-lines traces of toppling and event sequences.

use std::io::Write;

use serde::Serialize;

use crate::field::Instruction;

/// One executed instruction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub step: u64,
    pub site: Vec<i64>,
    pub instruction: Instruction,
    /// Site state after the instruction, in snapshot encoding.
    pub state: i32,
}

/// One continuous-time event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimedEvent {
    pub t: f64,
    pub kind: &'static str,
    pub id: Vec<i64>,
    pub instruction: Option<Instruction>,
}

pub fn write_jsonl<T: Serialize>(out: &mut impl Write, events: &[T]) -> std::io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut *out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
