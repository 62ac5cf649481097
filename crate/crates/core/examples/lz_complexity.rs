//! Score binary strings with the symmetric LZ76 complexity and its rescaled
//! form `K~`.
//!
//! ```text
//! cargo run --example lz_complexity -- 0101010101 0001101001000101
//! ```

use simbias::complexity::{c_lz, k_tilde, lz76_phrase_count, ComplexityScale, MaxMethod, MAX_EXHAUSTIVE_LEN};
use simbias::symbolizer::SymbolString;

fn main() -> simbias::Result<()> {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "0000000000000000000000000",
            "0101010101010101010101010",
            "0010010010010010010010010",
            "0110100110010110100101100",
        ]
        .map(String::from)
        .to_vec();
    }
    println!("{:<28} {:>7} {:>9} {:>8}", "pattern", "phrases", "C_LZ", "K~");
    for text in inputs {
        let s: SymbolString = text.parse()?;
        let (c, k) = if s.len() < 2 {
            ("-".to_string(), "-".to_string())
        } else {
            let method = if s.len() <= MAX_EXHAUSTIVE_LEN {
                MaxMethod::Exhaustive
            } else {
                MaxMethod::default_corpus()
            };
            let scale = ComplexityScale::cached(s.len(), method)?;
            (format!("{:.3}", c_lz(&s)?), format!("{:.3}", k_tilde(&s, &scale)?))
        };
        println!("{:<28} {:>7} {:>9} {:>8}", s, lz76_phrase_count(&s), c, k);
    }
    Ok(())
}
