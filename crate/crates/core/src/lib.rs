pub mod error;
pub mod morphisms;
pub mod products;
pub mod rational;
pub mod report;
pub mod search;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use morphisms::{FactorSet, UniformMorphism};
pub use rational::{PowerThreshold, Rational};
pub use report::{ClaimReport, ClaimVerdict};
pub use words::{RepetitionWitness, Symbol, Verdict, Word};
