//! Bundled fixture corpus. Every worked example ships with the crate so the
//! whole test and selftest surface runs offline.

use crate::recursion::{self, RecursionSystem};
use crate::transducer::{self, Transducer};

pub const NAF_FST: &str = include_str!("../fixtures/naf.fst");
pub const SIGNFLIP_FST: &str = include_str!("../fixtures/signflip.fst");
pub const SIXPERIODIC_FST: &str = include_str!("../fixtures/sixperiodic.fst");
pub const SUMDIGITS_Q2_FST: &str = include_str!("../fixtures/sumdigits-q2.fst");
pub const SUMDIGITS_Q3_FST: &str = include_str!("../fixtures/sumdigits-q3.fst");
pub const SUMDIGITS_Q4_FST: &str = include_str!("../fixtures/sumdigits-q4.fst");
pub const SUMDIGITS_Q5_FST: &str = include_str!("../fixtures/sumdigits-q5.fst");
pub const PAPERFOLDING_REC: &str = include_str!("../fixtures/paperfolding.rec");
pub const ILLPOSED_REC: &str = include_str!("../fixtures/illposed.rec");

/// `(name, contents)` pairs for every bundled fixture file.
pub const ALL: &[(&str, &str)] = &[
    ("naf.fst", NAF_FST),
    ("signflip.fst", SIGNFLIP_FST),
    ("sixperiodic.fst", SIXPERIODIC_FST),
    ("sumdigits-q2.fst", SUMDIGITS_Q2_FST),
    ("sumdigits-q3.fst", SUMDIGITS_Q3_FST),
    ("sumdigits-q4.fst", SUMDIGITS_Q4_FST),
    ("sumdigits-q5.fst", SUMDIGITS_Q5_FST),
    ("paperfolding.rec", PAPERFOLDING_REC),
    ("illposed.rec", ILLPOSED_REC),
];

/// Hamming weight of the non-adjacent form.
pub fn naf() -> Transducer {
    transducer::parse(NAF_FST).expect("bundled fixture parses")
}

/// The `T(n) = (-1)^n` transducer with a degenerate limit law.
pub fn signflip() -> Transducer {
    transducer::parse(SIGNFLIP_FST).expect("bundled fixture parses")
}

/// Two final components with periods 2 and 3.
pub fn sixperiodic() -> Transducer {
    transducer::parse(SIXPERIODIC_FST).expect("bundled fixture parses")
}

/// The one-state q-ary sum-of-digits transducer, q in 2..=5.
pub fn sumdigits(q: u32) -> Transducer {
    let text = match q {
        2 => SUMDIGITS_Q2_FST,
        3 => SUMDIGITS_Q3_FST,
        4 => SUMDIGITS_Q4_FST,
        5 => SUMDIGITS_Q5_FST,
        _ => panic!("no bundled sum-of-digits fixture for q = {q}"),
    };
    transducer::parse(text).expect("bundled fixture parses")
}

/// Recursion system for the abelian complexity of the paperfolding sequence.
pub fn paperfolding_system() -> RecursionSystem {
    recursion::parse_recursion(PAPERFOLDING_REC).expect("bundled fixture parses")
}

/// Compiled paperfolding transducer.
pub fn paperfolding() -> Transducer {
    let sys = paperfolding_system();
    recursion::compile(&sys).expect("paperfolding is well-posed").0
}
