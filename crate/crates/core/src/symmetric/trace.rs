//! Event log of a symmetric run, with a JSON-lines dump and an SVG rendering
//! of the Even × Odd grid.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::interleaving::{scope, InterleavingNode, SpacePair};
use crate::game::{Player, Vertex};
use crate::lazy::{Pos, PositionInfo};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub vertex: Vertex,
    pub from: PositionInfo,
    pub to: PositionInfo,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    Init {
        even: Vec<Pos>,
        odd: Vec<Pos>,
    },
    CallEnter {
        node: InterleavingNode,
    },
    CallExit {
        node: InterleavingNode,
    },
    Lift {
        axis: Player,
        #[serde(flatten)]
        step: Move,
    },
    Acceleration {
        node: InterleavingNode,
        winner: Player,
        moves: Vec<Move>,
    },
    Reset {
        node: InterleavingNode,
        axis: Player,
        moves: Vec<Move>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCounters {
    pub calls: u64,
    pub lifts: u64,
    pub accelerations: u64,
    pub resets: u64,
}

/// Append-only. Counters are kept even when events are not recorded.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub recording: bool,
    pub events: Vec<TraceEvent>,
    pub counters: TraceCounters,
}

impl Trace {
    pub fn new(recording: bool) -> Self {
        Trace { recording, ..Default::default() }
    }

    pub fn push(&mut self, event: TraceEvent) {
        match &event {
            TraceEvent::CallEnter { .. } => self.counters.calls += 1,
            TraceEvent::Lift { .. } => self.counters.lifts += 1,
            TraceEvent::Acceleration { .. } => self.counters.accelerations += 1,
            TraceEvent::Reset { .. } => self.counters.resets += 1,
            TraceEvent::Init { .. } | TraceEvent::CallExit { .. } => {}
        }
        if self.recording {
            self.events.push(event);
        }
    }

    /// Recounts the recorded events.
    pub fn recount(&self) -> TraceCounters {
        let mut t = Trace::new(false);
        for e in &self.events {
            t.push(e.clone());
        }
        t.counters
    }

    /// One JSON object per event, then one with the counters.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        let counters = serde_json::json!({ "event": "counters", "counters": self.counters });
        out.push_str(&counters.to_string());
        out.push('\n');
        out
    }

    /// Parses the events back from [`Trace::to_jsonl`] output.
    pub fn from_jsonl(text: &str) -> Result<Trace, serde_json::Error> {
        let mut trace = Trace::new(true);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let value: serde_json::Value = serde_json::from_str(line)?;
            if value.get("event").and_then(|e| e.as_str()) == Some("counters") {
                continue;
            }
            trace.push(serde_json::from_value(value)?);
        }
        Ok(trace)
    }
}

const CELL: f64 = 14.0;
const MARGIN: f64 = 24.0;

fn panel_size(spaces: &SpacePair<'_>) -> (f64, f64) {
    (2.0 * MARGIN + CELL * spaces.odd.len() as f64, 2.0 * MARGIN + CELL * spaces.even.len() as f64)
}

/// Centre of grid cell `(even, odd)` within a panel; Odd runs right, Even up.
fn cell_xy(spaces: &SpacePair<'_>, even: Pos, odd: Pos) -> (f64, f64) {
    let (_, h) = panel_size(spaces);
    (MARGIN + CELL * (odd as f64 + 0.5), h - MARGIN - CELL * (even as f64 + 0.5))
}

/// Renders the trace as a column of panels, each covering `window` events
/// (at least one). Each panel shows the grid axes, the scope of the last call
/// entered so far, vertex positions at the end of the window, and one arrow
/// per lift, acceleration move or reset move inside the window.
pub fn trace_to_svg(trace: &Trace, spaces: &SpacePair<'_>, window: usize) -> String {
    let window = window.max(1);
    let chunks: Vec<&[TraceEvent]> =
        if trace.events.is_empty() { vec![&[][..]] } else { trace.events.chunks(window).collect() };
    let (pw, ph) = panel_size(spaces);
    let total_h = ph * chunks.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pw}" height="{total_h}" viewBox="0 0 {pw} {total_h}">"#
    );
    svg.push_str(
        r#"<defs><marker id="head" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z"/></marker></defs>"#,
    );
    svg.push('\n');

    let mut even: Vec<Pos> = Vec::new();
    let mut odd: Vec<Pos> = Vec::new();
    let mut current: Option<InterleavingNode> = None;
    for (k, chunk) in chunks.iter().enumerate() {
        let mut arrows = String::new();
        for e in chunk.iter() {
            match e {
                TraceEvent::Init { even: e0, odd: o0 } => {
                    even = e0.clone();
                    odd = o0.clone();
                }
                TraceEvent::CallEnter { node } => current = Some(*node),
                TraceEvent::CallExit { .. } => {}
                TraceEvent::Lift { axis, step } => {
                    arrow(&mut arrows, spaces, "lift", *axis, step, &mut even, &mut odd);
                }
                TraceEvent::Acceleration { winner, moves, .. } => {
                    for m in moves {
                        arrow(&mut arrows, spaces, "acceleration", winner.opponent(), m, &mut even, &mut odd);
                    }
                }
                TraceEvent::Reset { axis, moves, .. } => {
                    for m in moves {
                        arrow(&mut arrows, spaces, "reset", *axis, m, &mut even, &mut odd);
                    }
                }
            }
        }
        let _ = writeln!(svg, r#"<g class="panel" transform="translate(0,{})">"#, ph * k as f64);
        axes(&mut svg, spaces);
        if let Some(n) = current {
            let r = scope(spaces, n);
            if !r.is_empty() {
                let (x0, y0) = cell_xy(spaces, r.even.end - 1, r.odd.start);
                let _ = writeln!(
                    svg,
                    r##"<rect class="scope" x="{}" y="{}" width="{}" height="{}" fill="#e8f0ff" stroke="#6080c0"/>"##,
                    x0 - CELL / 2.0,
                    y0 - CELL / 2.0,
                    CELL * r.odd.len() as f64,
                    CELL * r.even.len() as f64
                );
            }
        }
        for (v, (&e, &o)) in even.iter().zip(&odd).enumerate() {
            let (x, y) = cell_xy(spaces, e, o);
            let _ = writeln!(svg, r#"<circle class="vertex" data-vertex="{v}" cx="{x}" cy="{y}" r="3"/>"#);
        }
        svg.push_str(&arrows);
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

fn axes(svg: &mut String, spaces: &SpacePair<'_>) {
    let (pw, ph) = panel_size(spaces);
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{MARGIN}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/>"#,
        y = ph - MARGIN,
        x2 = pw - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{y2}" stroke="black"/>"#,
        y2 = ph - MARGIN
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10">Odd</text>"#, pw - MARGIN, ph - 8.0);
    let _ = writeln!(svg, r#"<text x="2" y="{}" font-size="10">Even</text>"#, MARGIN - 8.0);
}

fn arrow(
    out: &mut String,
    spaces: &SpacePair<'_>,
    class: &str,
    axis: Player,
    m: &Move,
    even: &mut [Pos],
    odd: &mut [Pos],
) {
    let v = m.vertex;
    if v >= even.len() {
        return;
    }
    let (from, to) = match axis {
        Player::Even => ((m.from.index, odd[v]), (m.to.index, odd[v])),
        Player::Odd => ((even[v], m.from.index), (even[v], m.to.index)),
    };
    let (x1, y1) = cell_xy(spaces, from.0, from.1);
    let (x2, y2) = cell_xy(spaces, to.0, to.1);
    let color = match class {
        "lift" => "black",
        "acceleration" => "green",
        _ => "red",
    };
    let _ = writeln!(
        out,
        r#"<line class="{class}" data-vertex="{v}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}" marker-end="url(#head)"/>"#
    );
    match axis {
        Player::Even => even[v] = m.to.index,
        Player::Odd => odd[v] = m.to.index,
    }
}

/// Pixel centre of grid cell `(even, odd)` in the first panel.
pub fn svg_cell_center(spaces: &SpacePair<'_>, even: Pos, odd: Pos) -> (f64, f64) {
    cell_xy(spaces, even, odd)
}
