//! Variable-ordering selectors: priority expression trees over job
//! features.

mod features;
mod text;
mod tree;

pub use features::{extract_features, FeatureVector};
pub use text::{
    format_selector, format_selector_file, parse_expr, parse_selector, parse_selector_file,
    SelectorParseError,
};
pub use tree::{Expr, Op, Terminal, TreeMethod};

use crate::instance::Instance;

/// Where an evolved selector came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub fitness: f64,
    pub generation: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selector {
    pub root: Expr,
    pub provenance: Option<Provenance>,
}

impl Selector {
    pub fn new(root: Expr) -> Self {
        Selector {
            root,
            provenance: None,
        }
    }

    /// `(- PT PT)`: every job gets priority 0, so ties fall to the lowest id.
    pub fn constant() -> Self {
        Selector::new(Expr::op(
            Op::Sub,
            Expr::Terminal(Terminal::Pt),
            Expr::Terminal(Terminal::Pt),
        ))
    }

    pub fn evaluate(&self, features: &FeatureVector) -> f64 {
        self.root.evaluate(features)
    }
}

pub fn evaluate(selector: &Selector, features: &FeatureVector) -> f64 {
    selector.evaluate(features)
}

/// One priority per job; the solver computes these once per instance.
pub fn priorities_for(selector: &Selector, instance: &Instance) -> Vec<f64> {
    extract_features(instance)
        .iter()
        .map(|f| selector.evaluate(f))
        .collect()
}
