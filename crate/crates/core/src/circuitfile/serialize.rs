use std::fmt::Write;

use crate::optics::{Circuit, Element, ElementKind, Source};

use super::{CircuitDocument, Statement, FORMAT_VERSION};

fn degrees(rad: f64) -> String {
    let d = format!("{:.6}", rad.to_degrees());
    // avoid "-0.000000"
    if d.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        return "0.000000deg".into();
    }
    format!("{d}deg")
}

fn element_line(e: &Element) -> String {
    let name = e.kind.name();
    let args = match &e.kind {
        ElementKind::Hwp { angle } | ElementKind::DovePrism { angle } => degrees(*angle),
        ElementKind::Phase { phi } => degrees(*phi),
        ElementKind::NeutralFilter { t } => format!("{t}"),
        ElementKind::BeamSplitter { r, t, .. } => format!("{r}, {t}"),
        ElementKind::Mask { mode } => mode.to_string(),
        ElementKind::PolPrep { pol } => pol.to_string(),
        ElementKind::Pbs { .. } | ElementKind::Block => String::new(),
    };
    let mut line = format!("element {name}({args}) on {}", e.placement);
    if let Some((t, r)) = e.kind.routes() {
        let _ = write!(line, " routes {}->{t},{r}", e.placement);
    }
    line
}

fn source_line(s: &Source) -> String {
    format!("source {} weight={} pol={} mode={}", s.path, s.weight, s.pol, s.mode)
}

pub fn serialize_document(doc: &CircuitDocument) -> String {
    let mut out = format!("version {}\n", doc.version);
    for st in doc.statements() {
        let line = match st {
            Statement::Path(ps) => format!("path {}", ps.join(" ")),
            Statement::Source(s) => source_line(s),
            Statement::Element(e) => element_line(e),
            Statement::Sink(s) => format!("sink {s}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Canonical text: version header, one `path` line with every declared path,
/// then sources, elements and sinks. Angles are written in degrees with six
/// decimals, other reals in shortest round-trip form.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut doc = CircuitDocument::from_circuit(circuit);
    doc.version = FORMAT_VERSION;
    serialize_document(&doc)
}
