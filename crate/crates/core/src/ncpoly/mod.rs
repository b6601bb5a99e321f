//! Finitely presented *-algebras over a coefficient ring, with normal forms
//! computed by a terminating rewrite system.

mod confluence;
mod element;
mod morphism;
mod presentation;
mod word;

pub use confluence::{check_presentation, CriticalPairWitness, PresentationReport};
pub use element::Element;
pub(crate) use element::write_term;
pub use morphism::{Morphism, Violation};
pub(crate) use presentation::add_into;
pub use presentation::{NormalForm, Presentation, PresentationBuilder, Rule, DEFAULT_REWRITE_BUDGET};
pub use word::{Gen, Word};

#[cfg(test)]
mod tests;
