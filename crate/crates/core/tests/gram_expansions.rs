//! The transcribed expansions of D_1, D_2, D_3 in the cyclotomic constants
//! (with their repeated monomials) against the read-off Gram coefficients.

use sextic_core::circulant::{printed_form_check, CoefficientVector};
use sextic_core::cyclotomy::table_for;
use sextic_core::field::{Field, Gf4};

#[test]
fn expansions_agree_exhaustively() {
    for p in [7u64, 19, 31, 43, 67] {
        let table = table_for(p).unwrap();
        for field in [Field::Gf2, Field::Gf4] {
            let q = field.q() as usize;
            for idx in 0..q.pow(7) {
                let mut x = idx;
                let m: [Gf4; 7] = std::array::from_fn(|_| {
                    let c = Gf4::from_bits((x % q) as u8);
                    x /= q;
                    c
                });
                let v = CoefficientVector::pure(field, m).unwrap();
                let check = printed_form_check(&table, &v).unwrap();
                assert!(
                    check.disagreements.is_empty(),
                    "p = {p}, {v}: printed {:?} vs computed {:?}",
                    check.printed,
                    check.computed
                );
            }
        }
    }
}
