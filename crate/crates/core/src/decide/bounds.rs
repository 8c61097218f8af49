//! Exact bound arithmetic: `k^{≤n}`, the rank and block recurrences, and
//! iterated exponentials.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::limits::LimitError;

/// Largest bit length a materialized bound may have.
pub const MAX_BOUND_BITS: u64 = 1 << 22;

fn too_large(what: impl Into<String>) -> LimitError {
    LimitError::BoundTooLarge(what.into())
}

/// `⌈log2 k⌉`.
fn ceil_log2(k: u64) -> u64 {
    if k <= 1 {
        0
    } else {
        64 - u64::from((k - 1).leading_zeros())
    }
}

/// `k^{≤n} = Σ_{i≤n} k^i`, with `0^0 = 1`.
pub fn k_leq(k: u64, n: &BigUint) -> Result<BigUint, LimitError> {
    match k {
        0 => Ok(BigUint::one()),
        1 => Ok(n + 1u32),
        _ => {
            let n = n
                .to_u64()
                .filter(|&n| n.saturating_add(1).saturating_mul(ceil_log2(k)) <= MAX_BOUND_BITS)
                .ok_or_else(|| too_large(format!("{k}^{{<={n}}}")))?;
            let top = BigUint::from(k).pow(n as u32 + 1);
            Ok((top - 1u32) / (k - 1))
        }
    }
}

pub fn k_leq_u64(k: u64, n: u64) -> BigUint {
    k_leq(k, &BigUint::from(n)).expect("small geometric sum")
}

/// `t_k(n)`: `t_k(0) = 0`, `t_k(n+1) = k^{≤t_k(n)+1} + t_k(n) + 1`.
pub fn t_rank(k: u64, n: u64) -> Result<BigUint, LimitError> {
    t_block(k, n, 1)
}

/// `t_k(n, q)`: `t_k(0, q) = 0`, `t_k(n+1, q) = q·k^{≤t_k(n,q)+1} + t_k(n,q) + 1`.
pub fn t_block(k: u64, n: u64, q: u64) -> Result<BigUint, LimitError> {
    let mut t = BigUint::zero();
    for _ in 0..n {
        t = BigUint::from(q) * k_leq(k, &(&t + 1u32))? + &t + 1u32;
    }
    Ok(t)
}

/// `2^x_n`: `2^x_0 = x`, `2^x_{n+1} = 2^{2^x_n}`.
pub fn supexp(x: &BigUint, n: u64) -> Result<BigUint, LimitError> {
    let mut v = x.clone();
    for _ in 0..n {
        let e = v
            .to_u64()
            .filter(|&e| e <= MAX_BOUND_BITS)
            .ok_or_else(|| too_large(format!("2^{v}")))?;
        v = BigUint::one() << e;
    }
    Ok(v)
}

/// Whether `t ≤ 2^x_h`, without materializing the tower.
pub fn leq_tower(t: &BigUint, x: &BigUint, h: u64) -> bool {
    if h == 0 {
        return t <= x;
    }
    if *t <= BigUint::one() {
        return true;
    }
    // t ≤ 2^T  iff  ⌈log2 t⌉ ≤ T
    let ceil_log = BigUint::from((t - 1u32).bits());
    leq_tower(&ceil_log, x, h - 1)
}

/// `c_k = ⌈(k+3)·log2 k + log2 log2 k + 2⌉` for `k ≥ 2`.
pub fn c_k(k: u64) -> u64 {
    assert!(k >= 2, "c_k is defined for k >= 2");
    let lk = (k as f64).log2();
    let v = (k as f64 + 3.0) * lk + lk.log2() + 2.0;
    // Powers of two give exact integers; keep them exact.
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r as u64
    } else {
        v.ceil() as u64
    }
}

/// Block exponent `⌈4qk·log2 k⌉`.
pub fn block_exponent(k: u64, q: u64) -> u64 {
    let v = 4.0 * q as f64 * k as f64 * (k as f64).log2();
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r as u64
    } else {
        v.ceil() as u64
    }
}

/// Upper bound on `⌈log2 t_k(n+1, q)⌉` from `T = t_k(n, q)`:
/// `t_k(n+1,q) ≤ 2q·k^{T+2}`.
fn log_upper(k: u64, q: u64, t: &BigUint) -> BigUint {
    (t + 2u32) * ceil_log2(k) + ceil_log2(q) + 1u32
}

/// Checks `t_k(n) ≤ 2^{c_k}_{n-1}` (`k ≥ 2`, `n ≥ 1`).
pub fn bound_check(k: u64, n: u64) -> Result<bool, LimitError> {
    tower_check(k, n, 1, BigUint::from(c_k(k)))
}

/// Checks `t_k(n, q) ≤ 2^{4qk log k}_{n-1}` (`k ≥ 2`, `n ≥ 1`, `q ≥ 1`).
pub fn bound_check_block(k: u64, n: u64, q: u64) -> Result<bool, LimitError> {
    tower_check(k, n, q, BigUint::from(block_exponent(k, q)))
}

fn tower_check(k: u64, n: u64, q: u64, x: BigUint) -> Result<bool, LimitError> {
    assert!(k >= 2 && n >= 1 && q >= 1);
    if let Ok(t) = t_block(k, n, q) {
        return Ok(leq_tower(&t, &x, n - 1));
    }
    // One level too large: bound its logarithm instead.
    let prev = t_block(k, n - 1, q)?;
    if n == 1 {
        return Err(too_large("t_k(1, q)"));
    }
    if leq_tower(&log_upper(k, q, &prev), &x, n - 2) {
        Ok(true)
    } else {
        Err(too_large(format!("t_{k}({n}, {q}) is inconclusive")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn geometric_sums() {
        assert_eq!(k_leq_u64(2, 4), big(31));
        assert_eq!(k_leq_u64(1, 7), big(8));
        assert_eq!(k_leq_u64(0, 3), big(1));
        assert_eq!(k_leq_u64(3, 0), big(1));
    }

    #[test]
    fn recurrences() {
        assert_eq!(t_rank(2, 2).unwrap(), big(68));
        assert_eq!(t_rank(1, 3).unwrap(), big(21));
        assert_eq!(t_rank(5, 1).unwrap(), big(7));
        assert_eq!(t_block(2, 1, 4).unwrap(), big(13));
        assert_eq!(t_block(2, 2, 2).unwrap(), big(1030));
        assert_eq!(t_rank(0, 3).unwrap(), big(6));
    }

    #[test]
    fn towers() {
        assert_eq!(supexp(&big(3), 1).unwrap(), big(8));
        assert_eq!(supexp(&big(2), 2).unwrap(), big(16));
        assert!(leq_tower(&big(68), &big(7), 1));
        assert!(!leq_tower(&big(129), &big(7), 1));
        assert!(leq_tower(&big(128), &big(7), 1));
        assert!(!leq_tower(&big(1 << 40), &big(3), 2));
        assert!(leq_tower(&big(256), &big(3), 2));
    }

    #[test]
    fn constants() {
        assert_eq!(c_k(2), 7);
        assert_eq!(c_k(4), 17);
        assert_eq!(c_k(3), 13);
        assert_eq!(block_exponent(2, 2), 16);
    }

    #[test]
    fn tower_bounds_hold() {
        assert!(bound_check(2, 2).unwrap());
        assert!(bound_check_block(2, 2, 2).unwrap());
    }
}
