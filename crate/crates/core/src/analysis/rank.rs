use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};

/// `⌊lg q⌋` for a positive rational, computed exactly.
///
/// With `p/q` in lowest terms, `k = bits(p) - bits(q)` puts the ratio in
/// `(2^(k-1), 2^(k+1))`; one comparison against `2^k` settles it.
pub fn floor_log2(value: &BigRational) -> Result<i64> {
    if !value.is_positive() {
        return Err(Error::UndefinedRank);
    }
    let p = value.numer();
    let q = value.denom();
    let k = p.bits() as i64 - q.bits() as i64;
    // p >= q * 2^k  <=>  ratio >= 2^k
    let at_least = if k >= 0 { *p >= (q.clone() << k as usize) } else { (p.clone() << (-k) as usize) >= *q };
    Ok(if at_least { k } else { k - 1 })
}

/// `⌊lg x⌋` for a positive integer.
pub fn floor_log2_int(x: u64) -> i64 {
    assert!(x > 0, "log of zero");
    63 - x.leading_zeros() as i64
}

#[cfg(test)]
pub(crate) fn ratio(p: i64, q: i64) -> BigRational {
    use num_bigint::BigInt;
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
