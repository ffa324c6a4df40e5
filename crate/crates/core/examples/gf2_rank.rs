//! Packed GF(2) vectors: combine, rank and solve.

use chunknet::gf2::{solve, xor_combine, BinaryMatrix, BinaryVector, SolveOutcome};

fn bits(s: &str) -> BinaryVector {
    BinaryVector::parse_bits(s).expect("bit string")
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = bits("1010");
    let b = bits("0110");
    let sum = xor_combine(&[a.clone(), b.clone()], &bits("11"))?;
    println!("{a} + {b} = {sum}");
    assert_eq!(sum, bits("1100"));

    // columns e0+e1, e1+e2, e2+e3, e3: full rank
    let m = BinaryMatrix::from_columns(4, vec![bits("1100"), bits("0110"), bits("0011"), bits("0001")])?;
    println!("rank = {}", m.rank());
    assert_eq!(m.rank(), 4);

    let message = vec![bits("10"), bits("01"), bits("11"), bits("00")];
    let symbols: Vec<BinaryVector> = m
        .columns()
        .iter()
        .map(|c| chunknet::code::encode_symbol(&message, c))
        .collect();
    match solve(&m, &symbols)? {
        SolveOutcome::Solved(x) => {
            println!("recovered {:?}", x.iter().map(ToString::to_string).collect::<Vec<_>>());
            assert_eq!(x, message);
        }
        SolveOutcome::Underdetermined { rank } => return Err(format!("rank {rank}").into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
