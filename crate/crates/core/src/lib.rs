//! Grammar-driven generation of small Python programs.
//!
//! The pipeline picks a complexity level, derives a program from a BNF
//! grammar by leftmost expansion, runs it through an embedded interpreter
//! for the generated Python subset, drops failing and duplicate snippets and
//! writes each survivor with its captured output.
//!
//! ```
//! use tinypy_core::derive::{derive, DerivationConfig, LevelId};
//! use tinypy_core::grammar::builtin_tinypy;
//! use tinypy_core::interp::{run, Limits};
//! use tinypy_core::rng::stream;
//!
//! let grammar = builtin_tinypy();
//! let config = DerivationConfig::default();
//! let mut rng = stream(7, 0);
//! let program = derive(&grammar, LevelId::L3_1, &mut rng, &config).unwrap();
//! let output = run(&program.code, &Limits::default()).unwrap();
//! assert_eq!(output.lines().count() as u32, program.loop_execution_count.unwrap());
//! ```

pub mod corpus;
pub mod derive;
pub mod grammar;
pub mod interp;
pub mod rng;
