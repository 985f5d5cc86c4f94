use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, DensityMatrix4};

use super::element::{apply_element, Branch, Element};
use super::ket::{Polarization, SpinOrbitKet, TransverseMode};

/// Detection probability below which no state can be post-selected.
pub const MIN_DETECTION_PROBABILITY: f64 = 1e-12;

/// Independent single-photon source emitting |pol, mode⟩ with probability `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub path: String,
    pub weight: f64,
    pub pol: Polarization,
    pub mode: TransverseMode,
}

impl Source {
    pub fn new(path: &str, weight: f64, pol: Polarization, mode: TransverseMode) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::invalid(format!("source weight {weight} outside [0, 1]")));
        }
        Ok(Self {
            path: path.to_string(),
            weight,
            pol,
            mode,
        })
    }

    pub fn ket(&self) -> SpinOrbitKet {
        SpinOrbitKet::basis(self.pol, self.mode)
    }
}

/// Ordered optical elements over named paths.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    /// Declared paths in declaration order (source paths included).
    pub paths: Vec<String>,
    pub sources: Vec<Source>,
    pub elements: Vec<Element>,
    pub sinks: Vec<String>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_path(&mut self, path: &str) -> &mut Self {
        if !self.paths.iter().any(|p| p == path) {
            self.paths.push(path.to_string());
        }
        self
    }

    pub fn add_source(&mut self, source: Source) -> &mut Self {
        self.declare_path(&source.path.clone());
        self.sources.push(source);
        self
    }

    pub fn add_element(&mut self, element: Element) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn add_sink(&mut self, path: &str) -> &mut Self {
        self.sinks.push(path.to_string());
        self
    }

    pub fn is_declared(&self, path: &str) -> bool {
        self.paths.iter().any(|p| p == path)
    }

    /// Checks that every referenced path is declared and that routing is acyclic.
    pub fn validate(&self) -> Result<()> {
        let undeclared = |what: &str, p: &str| Error::invalid(format!("{what} refers to undeclared path `{p}`"));
        for s in &self.sources {
            if !self.is_declared(&s.path) {
                return Err(undeclared("source", &s.path));
            }
        }
        for e in &self.elements {
            if !self.is_declared(&e.placement) {
                return Err(undeclared(e.kind.name(), &e.placement));
            }
            if let Some((t, r)) = e.kind.routes() {
                for p in [t, r] {
                    if !self.is_declared(p) {
                        return Err(undeclared(e.kind.name(), p));
                    }
                }
            }
        }
        for s in &self.sinks {
            if !self.is_declared(s) {
                return Err(undeclared("sink", s));
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<()> {
        let mut edges: HashMap<&str, Vec<&str>> = HashMap::new();
        for e in &self.elements {
            if let Some((t, r)) = e.kind.routes() {
                edges.entry(e.placement.as_str()).or_default().extend([t, r]);
            }
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: HashMap<&str, u8> = HashMap::new();
        fn visit<'a>(
            node: &'a str,
            edges: &HashMap<&'a str, Vec<&'a str>>,
            state: &mut HashMap<&'a str, u8>,
        ) -> Option<&'a str> {
            match state.get(node) {
                Some(1) => return Some(node),
                Some(2) => return None,
                _ => {}
            }
            state.insert(node, 1);
            for &next in edges.get(node).map(Vec::as_slice).unwrap_or(&[]) {
                if let Some(p) = visit(next, edges, state) {
                    return Some(p);
                }
            }
            state.insert(node, 2);
            None
        }
        for p in &self.paths {
            if let Some(on) = visit(p, &edges, &mut state) {
                return Err(Error::invalid(format!("cyclic routing through path `{on}`")));
            }
        }
        Ok(())
    }
}

/// Incoherent collection of branches reaching the sinks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ensemble {
    pub branches: Vec<Branch>,
}

impl Ensemble {
    /// Σ weight · ‖ket‖²
    pub fn detection_probability(&self) -> f64 {
        self.branches.iter().map(Branch::probability).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }
}

/// Propagates every source through the elements in order.
///
/// After each element, branches of the same source on the same path are
/// summed coherently; branches of different sources never interfere.
pub fn run_circuit(circuit: &Circuit) -> Result<Ensemble> {
    circuit.validate()?;
    let mut live: Vec<(usize, Branch)> = circuit
        .sources
        .iter()
        .enumerate()
        .map(|(i, s)| {
            (
                i,
                Branch {
                    weight: s.weight,
                    path: s.path.clone(),
                    ket: s.ket(),
                },
            )
        })
        .collect();

    for element in &circuit.elements {
        let mut next = Vec::with_capacity(live.len() + 1);
        for (src, branch) in live {
            if branch.path == element.placement {
                next.extend(apply_element(element, &branch)?.into_iter().map(|b| (src, b)));
            } else {
                next.push((src, branch));
            }
        }
        live = merge_coherent(next);
    }

    let sinks: HashSet<&str> = circuit.sinks.iter().map(String::as_str).collect();
    let branches = live
        .into_iter()
        .filter(|(_, b)| sinks.contains(b.path.as_str()) && b.ket.norm_sqr() > 0.0)
        .map(|(_, b)| b)
        .collect();
    Ok(Ensemble { branches })
}

fn merge_coherent(branches: Vec<(usize, Branch)>) -> Vec<(usize, Branch)> {
    let mut out: Vec<(usize, Branch)> = Vec::with_capacity(branches.len());
    let mut slot: HashMap<(usize, String), usize> = HashMap::new();
    for (src, b) in branches {
        match slot.get(&(src, b.path.clone())) {
            Some(&k) => out[k].1.ket = out[k].1.ket + b.ket,
            None => {
                slot.insert((src, b.path.clone()), out.len());
                out.push((src, b));
            }
        }
    }
    out
}

/// Post-selected state Σ wᵢ|ψᵢ⟩⟨ψᵢ| / Σ wᵢ‖ψᵢ‖².
pub fn ensemble_density(ensemble: &Ensemble) -> Result<DensityMatrix4> {
    let total = ensemble.detection_probability();
    if total <= MIN_DETECTION_PROBABILITY {
        return Err(Error::DegenerateState(format!(
            "total detection probability {total:.3e} is zero"
        )));
    }
    let mut rho = ComplexMatrix::zeros(4);
    for b in &ensemble.branches {
        rho = &rho + &b.ket.projector().scale_real(b.weight / total);
    }
    DensityMatrix4::new(rho)
}
