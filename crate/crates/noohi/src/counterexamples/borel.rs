//! The Borel coset obstruction: the untwisted word lands in the integral Borel subgroup
//! while its `p`-twisted counterpart leaves it once `n` exceeds `v_ℓ(p(u₁ᵖ − u₁))`.

use serde::Serialize;

use crate::error::{input, Result};
use crate::padics::{
    in_integral_borel, is_prime, psi_word, twisted_word, unit_generator, valuation_i128, BorelElement, ScalarRecord,
};

#[derive(Clone, Debug, Serialize)]
pub struct BorelReport {
    pub ell: u64,
    pub p: u64,
    pub n: i64,
    pub u1: u64,
    pub untwisted_in_integral: bool,
    pub twisted_upper: ScalarRecord,
    pub twisted_valuation: Option<i64>,
    /// `v_ℓ(p(u₁ᵖ − u₁)) − n`
    pub predicted_valuation: i64,
    pub obstruction: bool,
}

pub fn borel_obstruction(ell: u64, p: u64, n: i64, prec: u32) -> Result<BorelReport> {
    if !is_prime(p) || p == ell {
        return input(format!("p = {p} must be a prime different from ℓ"));
    }
    if n < 1 {
        return input("n must be positive");
    }
    let u1 = unit_generator(ell, prec)?;
    let floor = 1;
    let plain = psi_word(&twisted_word(1, n, &u1), &u1, floor)?;
    let untwisted_in_integral = in_integral_borel(&plain)?;
    let twisted: BorelElement = psi_word(&twisted_word(p as i64, n, &u1), &u1, floor)?;
    let inside = in_integral_borel(&twisted)?;
    let m = (ell as i128).pow(prec);
    let up = u1.pow(p as i64).residue as i128;
    let diff = (up - u1.residue as i128).rem_euclid(m);
    // u₁ᵖ − u₁ is known modulo ℓ^prec; a zero residue means the valuation is at least prec
    let v_diff = if diff == 0 { prec as i64 } else { valuation_i128(diff, ell) as i64 };
    let predicted_valuation = v_diff + valuation_i128(p as i128, ell) as i64 - n;
    Ok(BorelReport {
        ell,
        p,
        n,
        u1: u1.residue,
        untwisted_in_integral,
        twisted_upper: twisted.b.to_record(),
        twisted_valuation: twisted.b.valuation(),
        predicted_valuation,
        obstruction: !inside,
    })
}
