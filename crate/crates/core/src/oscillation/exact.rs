//! Exact rational geometry of the support squares `Q_i = (κ^{-i}/2, κ^{-i})²`
//! against grid-aligned squares, for integer `κ ≥ 4`.

use num_bigint::BigInt;
use num_rational::BigRational;

/// The square `[i0/n, (i0+side)/n) × [j0/n, (j0+side)/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSquare {
    pub i0: u64,
    pub j0: u64,
    pub side: u64,
    pub n: u64,
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn zero() -> BigRational {
    ratio(0, 1)
}

fn kappa_pow(kappa: u64, i: u32) -> BigInt {
    BigInt::from(kappa).pow(i)
}

/// Upper edge `κ^{-i}` of `Q_i`.
fn upper(kappa: u64, i: u32) -> BigRational {
    BigRational::new(BigInt::from(1), kappa_pow(kappa, i))
}

fn overlap_1d(a: &BigRational, b: &BigRational, c: &BigRational, d: &BigRational) -> BigRational {
    let lo = if a > c { a } else { c };
    let hi = if b < d { b } else { d };
    if hi > lo {
        hi - lo
    } else {
        zero()
    }
}

impl GridSquare {
    pub fn x0(&self) -> BigRational {
        ratio(self.i0, self.n)
    }

    pub fn y0(&self) -> BigRational {
        ratio(self.j0, self.n)
    }

    pub fn side_length(&self) -> BigRational {
        ratio(self.side, self.n)
    }

    pub fn measure(&self) -> BigRational {
        let s = self.side_length();
        &s * &s
    }

    fn touches_origin(&self) -> bool {
        self.i0 == 0 && self.j0 == 0
    }

    /// `|Q ∩ Q_i|`.
    pub fn overlap(&self, kappa: u64, i: u32) -> BigRational {
        let hi = upper(kappa, i);
        let lo = &hi / BigInt::from(2);
        let s = self.side_length();
        let (x0, y0) = (self.x0(), self.y0());
        let ox = overlap_1d(&x0, &(&x0 + &s), &lo, &hi);
        let oy = overlap_1d(&y0, &(&y0 + &s), &lo, &hi);
        ox * oy
    }

    /// Every `i` with `κ^{-i} ≤ max(x0, y0)` gives `Q ∩ Q_i = ∅`. Returns the
    /// first such `i`, or `None` when the square touches the origin.
    fn last_possible(&self, kappa: u64) -> Option<u32> {
        if self.touches_origin() {
            return None;
        }
        let m = if self.i0 > self.j0 { self.x0() } else { self.y0() };
        let mut i = 0;
        while upper(kappa, i) > m {
            i += 1;
        }
        Some(i)
    }

    /// Least `k ≥ 0` with `Q ∩ Q_k ≠ ∅`.
    pub fn tau(&self, kappa: u64) -> Option<u32> {
        let stop = self.last_possible(kappa);
        let mut k = 0;
        loop {
            if let Some(s) = stop {
                if k >= s {
                    return None;
                }
            }
            if self.overlap(kappa, k) > zero() {
                return Some(k);
            }
            k += 1;
        }
    }
}

/// Exact tail analysis for one square.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCheck {
    pub tau: u32,
    /// `Σ_{i>τ} |Q ∩ Q_i|`.
    pub tail: BigRational,
    /// `4(κ²−1)^{-1}|Q|`.
    pub bound: BigRational,
    pub holds: bool,
    /// `|Q ∩ Q_i| ≤ 4κ^{2τ−2i}|Q|` for every `i > τ`.
    pub per_term_holds: bool,
    /// Side of `Q` at least `κ^{-τ}/4` whenever some `Q_i`, `i > τ`, meets `Q`.
    pub geometry_holds: bool,
}

/// `4κ^{2τ−2i}|Q|`.
fn per_term_bound(kappa: u64, tau: u32, i: u32, measure: &BigRational) -> BigRational {
    let k2 = kappa_pow(kappa, 2 * (i - tau));
    measure * BigInt::from(4) / k2
}

/// Tail sum and its bounds, or `None` when `Q` meets no `Q_k`.
pub fn tail_check(sq: &GridSquare, kappa: u64) -> Option<TailCheck> {
    assert!(kappa >= 4, "kappa must be at least 4");
    let tau = sq.tau(kappa)?;
    let measure = sq.measure();
    let k2m1 = BigInt::from(kappa * kappa - 1);
    let bound = &measure * BigInt::from(4) / &k2m1;
    let mut tail = zero();
    let mut per_term_holds = true;
    let mut any_meets = false;
    let mut i = tau + 1;
    match sq.last_possible(kappa) {
        Some(stop) => {
            while i < stop {
                let o = sq.overlap(kappa, i);
                if o > zero() {
                    any_meets = true;
                }
                per_term_holds &= o <= per_term_bound(kappa, tau, i, &measure);
                tail += o;
                i += 1;
            }
        }
        None => {
            // Q = [0, s)²: Q_i ⊂ Q as soon as κ^{-i} ≤ s.
            let s = sq.side_length();
            while upper(kappa, i) > s {
                let o = sq.overlap(kappa, i);
                per_term_holds &= o <= per_term_bound(kappa, tau, i, &measure);
                tail += o;
                i += 1;
            }
            // Σ_{j≥i} κ^{-2j}/4 = κ^{-2i}/4 · κ²/(κ²−1).
            let first = BigRational::new(BigInt::from(1), kappa_pow(kappa, 2 * i) * BigInt::from(4));
            tail += first * BigInt::from(kappa * kappa) / &k2m1;
            any_meets = true;
            // |Q_j| ≤ 4κ^{2τ−2j}|Q| for all j ⟺ |Q| ≥ κ^{-2τ}/16.
            let needed = BigRational::new(BigInt::from(1), kappa_pow(kappa, 2 * tau) * BigInt::from(16));
            per_term_holds &= measure >= needed;
        }
    }
    let geometry_holds = if any_meets {
        sq.side_length() >= upper(kappa, tau) / BigInt::from(4)
    } else {
        true
    };
    Some(TailCheck {
        tau,
        holds: tail <= bound,
        tail,
        bound,
        per_term_holds,
        geometry_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn tau_of_simple_squares() {
        // Q_0 itself on a grid of 8: [4/8, 8/8)².
        let q0 = GridSquare { i0: 4, j0: 4, side: 4, n: 8 };
        assert_eq!(q0.tau(4), Some(0));
        // whole unit square touches the origin and Q_0.
        let unit = GridSquare { i0: 0, j0: 0, side: 8, n: 8 };
        assert_eq!(unit.tau(8), Some(0));
        // [0,1/8)² with κ = 8: Q_1 = (1/16, 1/8)² meets it.
        let small = GridSquare { i0: 0, j0: 0, side: 1, n: 8 };
        assert_eq!(small.tau(8), Some(1));
        // off-diagonal square meets nothing.
        let off = GridSquare { i0: 4, j0: 0, side: 2, n: 8 };
        assert_eq!(off.tau(4), None);
        assert!(tail_check(&off, 4).is_none());
    }

    #[test]
    fn unit_square_tail_is_geometric() {
        let unit = GridSquare { i0: 0, j0: 0, side: 1, n: 1 };
        let t = tail_check(&unit, 4).unwrap();
        // Σ_{i≥1} 4^{-2i}/4 = (1/4)(1/15)
        assert_eq!(t.tail, BigRational::new(1.into(), 60.into()));
        assert!(t.holds && t.per_term_holds && t.geometry_holds);
        assert!((t.bound.to_f64().unwrap() - 4.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn all_small_grid_squares_pass() {
        for kappa in [4u64, 5, 8] {
            let n = 256;
            let mut side = n;
            while side >= 1 {
                for j0 in (0..n).step_by(side as usize) {
                    for i0 in (0..n).step_by(side as usize) {
                        let sq = GridSquare { i0, j0, side, n };
                        if let Some(t) = tail_check(&sq, kappa) {
                            assert!(t.holds && t.per_term_holds && t.geometry_holds, "{sq:?}");
                        }
                    }
                }
                side /= 2;
            }
        }
    }
}
