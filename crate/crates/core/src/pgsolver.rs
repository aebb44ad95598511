//! PGSolver text format.
//!
//! ```text
//! parity <maxid>;
//! <id> <priority> <owner> <succ>,<succ>,... ["name"];
//! ```
//!
//! Owner 0 is Even, 1 is Odd. A `start <id>;` line is accepted and ignored.
//! Files may use priority 0; such games are shifted up by 2 so that every
//! priority is at least 1, which keeps winners unchanged. The shift is kept in
//! the game and reported through [`NormalizationNote`].

use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::game::{GameBuilder, ParityGame, Player, Priority, Vertex};

/// Which priorities [`serialize_pgsolver`] writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PriorityMode {
    /// Priorities as they were read, undoing the normalization shift.
    #[default]
    Original,
    /// Internal priorities in `1..=d`.
    Normalized,
}

/// Sidecar describing how a parsed file was normalized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationNote {
    pub priority_shift: Priority,
    pub d: Priority,
    pub vertices: usize,
}

impl NormalizationNote {
    pub fn of(game: &ParityGame) -> Self {
        NormalizationNote { priority_shift: game.priority_shift(), d: game.d(), vertices: game.len() }
    }
}

struct Record {
    id: usize,
    priority: u64,
    owner: Player,
    succ: Vec<usize>,
    name: Option<String>,
}

fn syntax(line: usize, message: impl Into<String>) -> GameError {
    GameError::Syntax { line, message: message.into() }
}

fn parse_record(line_no: usize, body: &str) -> Result<Record, GameError> {
    let (fields, name) = match body.find('"') {
        Some(start) => {
            let rest = &body[start + 1..];
            let end = rest.find('"').ok_or_else(|| syntax(line_no, "unterminated vertex name"))?;
            if !rest[end + 1..].trim().is_empty() {
                return Err(syntax(line_no, "unexpected text after vertex name"));
            }
            (&body[..start], Some(rest[..end].to_string()))
        }
        None => (body, None),
    };
    let mut parts = fields.split_whitespace();
    let mut number = |what: &str| -> Result<u64, GameError> {
        let tok = parts.next().ok_or_else(|| syntax(line_no, format!("missing {what}")))?;
        tok.parse::<u64>().map_err(|_| syntax(line_no, format!("bad {what} {tok:?}")))
    };
    let id = number("vertex id")? as usize;
    let priority = number("priority")?;
    let owner = match number("owner")? {
        0 => Player::Even,
        1 => Player::Odd,
        o => return Err(syntax(line_no, format!("owner must be 0 or 1, found {o}"))),
    };
    let succ_text: String = parts.collect::<Vec<_>>().join("");
    let mut succ = Vec::new();
    if !succ_text.is_empty() {
        for tok in succ_text.split(',') {
            let s = tok.parse::<usize>().map_err(|_| syntax(line_no, format!("bad successor {tok:?}")))?;
            succ.push(s);
        }
    }
    if succ.is_empty() {
        return Err(GameError::Sink { id });
    }
    Ok(Record { id, priority, owner, succ, name })
}

/// Parses a PGSolver file.
pub fn parse_pgsolver(text: &str) -> Result<ParityGame, GameError> {
    let mut records: Vec<Record> = Vec::new();
    let mut index_of: HashMap<usize, usize> = HashMap::new();
    let mut seen_record = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let body = line.strip_suffix(';').ok_or_else(|| syntax(line_no, "record must end with ';'"))?.trim();
        let first = body.split_whitespace().next().unwrap_or("");
        if first == "parity" || first == "start" {
            if seen_record || (first == "parity" && !records.is_empty()) {
                return Err(syntax(line_no, format!("'{first}' header after vertex records")));
            }
            let arg = body[first.len()..].trim();
            arg.parse::<usize>().map_err(|_| syntax(line_no, format!("bad {first} header argument {arg:?}")))?;
            continue;
        }
        seen_record = true;
        let rec = parse_record(line_no, body)?;
        if index_of.insert(rec.id, records.len()).is_some() {
            return Err(GameError::DuplicateId { line: line_no, id: rec.id });
        }
        records.push(rec);
    }

    let min = records.iter().map(|r| r.priority).min().unwrap_or(1);
    let mut shift = 0u64;
    while min + shift < 1 {
        shift += 2;
    }
    let mut builder = GameBuilder {
        owner: Vec::with_capacity(records.len()),
        priority: Vec::with_capacity(records.len()),
        succ: Vec::with_capacity(records.len()),
        names: Vec::with_capacity(records.len()),
        ids: Vec::with_capacity(records.len()),
        priority_shift: shift as Priority,
    };
    for rec in records.iter() {
        let succ: Vec<Vertex> = rec
            .succ
            .iter()
            .map(|s| index_of.get(s).copied().ok_or(GameError::DanglingSuccessor { id: rec.id, successor: *s }))
            .collect::<Result<_, _>>()?;
        let p = rec.priority + shift;
        let p =
            Priority::try_from(p).map_err(|_| GameError::PriorityOutOfRange { id: rec.id, priority: Priority::MAX })?;
        builder.owner.push(rec.owner);
        builder.priority.push(p);
        builder.succ.push(succ);
        builder.names.push(rec.name.clone());
        builder.ids.push(rec.id);
    }
    builder.build()
}

/// Writes a game in PGSolver format. The header carries the largest vertex id.
pub fn serialize_pgsolver(game: &ParityGame, mode: PriorityMode) -> String {
    let mut out = String::new();
    let max_id = game.vertices().map(|v| game.external_id(v)).max();
    if let Some(m) = max_id {
        let _ = writeln!(out, "parity {m};");
    }
    for v in game.vertices() {
        let p = match mode {
            PriorityMode::Original => game.priority(v) - game.priority_shift(),
            PriorityMode::Normalized => game.priority(v),
        };
        let succ: Vec<String> = game.successors(v).iter().map(|&w| game.external_id(w).to_string()).collect();
        let _ = write!(out, "{} {} {} {}", game.external_id(v), p, game.owner(v).code(), succ.join(","));
        if let Some(name) = game.name(v) {
            let _ = write!(out, " \"{name}\"");
        }
        out.push_str(";\n");
    }
    out
}
