//! Indefinite binary quadratic forms and the narrow class group.

use std::collections::HashMap;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};

/// The form a·x² + b·xy + c·y².
pub type Form = (i64, i64, i64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroupData {
    pub h: u64,
    pub elementary_divisors: Vec<u64>,
    /// One reduced form per wide class.
    pub representatives: Vec<Form>,
}

#[derive(Clone, Debug)]
pub struct Forms {
    pub disc: i64,
    sq: i64,
}

impl Forms {
    pub fn new(disc: i64) -> Self {
        assert!(disc > 0);
        let sq = disc.sqrt();
        assert!(sq * sq != disc, "square discriminant");
        Forms { disc, sq }
    }

    /// Gauss reduced: |√D − 2|a|| < b < √D.
    pub fn is_reduced(&self, f: Form) -> bool {
        let (a, b, _) = f;
        if b <= 0 || b * b >= self.disc {
            return false;
        }
        let a2 = 2 * a.abs();
        let upper = a2 - b < 0 || (a2 - b) * (a2 - b) < self.disc;
        let lower = self.disc < (a2 + b) * (a2 + b);
        upper && lower
    }

    /// One step of the reduction operator ρ.
    pub fn rho(&self, f: Form) -> Form {
        let (_, b, c) = f;
        let cc = c.abs();
        let r = if cc > self.sq {
            let mut r = (-b).rem_euclid(2 * cc);
            if r > cc {
                r -= 2 * cc;
            }
            r
        } else {
            self.sq - (self.sq + b).rem_euclid(2 * cc)
        };
        (c, r, (r * r - self.disc) / (4 * c))
    }

    pub fn reduce(&self, mut f: Form) -> Form {
        let mut n = 0;
        while !self.is_reduced(f) {
            f = self.rho(f);
            n += 1;
            assert!(n < 100_000, "reduction did not terminate");
        }
        f
    }

    pub fn cycle(&self, f: Form) -> Vec<Form> {
        let f = self.reduce(f);
        let mut cyc = vec![f];
        let mut g = self.rho(f);
        while g != f {
            cyc.push(g);
            g = self.rho(g);
        }
        cyc
    }

    /// Canonical representative of the proper equivalence class.
    pub fn canon(&self, f: Form) -> Form {
        *self.cycle(f).iter().min().unwrap()
    }

    /// Composition by Buell's formulas.
    pub fn compose(&self, f1: Form, f2: Form) -> Form {
        let (a1, b1, _) = (f1.0 as i128, f1.1 as i128, f1.2 as i128);
        let (a2, b2, _) = (f2.0 as i128, f2.1 as i128, f2.2 as i128);
        let d = self.disc as i128;
        let beta = (b1 + b2) / 2;
        let e1 = a1.extended_gcd(&a2);
        let (g1, x1, y1) = (e1.gcd, e1.x, e1.y);
        let e2 = g1.extended_gcd(&beta);
        let (m, u, z) = (e2.gcd, e2.x, e2.y);
        let (x, y) = (u * x1, u * y1);
        debug_assert_eq!(a1 * x + a2 * y + beta * z, m);
        let aa = a1 * a2 / (m * m);
        let bb = (a1 * b2 * x + a2 * b1 * y + z * (b1 * b2 + d) / 2) / m;
        let bb = bb.rem_euclid(2 * aa.abs());
        let cc = (bb * bb - d) / (4 * aa);
        debug_assert_eq!(bb * bb - 4 * aa * cc, d);
        self.canon((aa as i64, bb as i64, cc as i64))
    }

    pub fn identity(&self) -> Form {
        let b = self.disc % 2;
        self.canon((1, b, (b - self.disc) / 4))
    }

    /// The class of (−1, b, ·), which is the class of the ideal √D in the narrow sense.
    pub fn neg_identity(&self) -> Form {
        let b = self.disc % 2;
        self.canon((-1, b, -(b - self.disc) / 4))
    }

    pub fn inverse(&self, f: Form) -> Form {
        self.canon((f.0, -f.1, f.2))
    }

    /// All reduced forms, grouped into cycles, one canonical form per cycle.
    pub fn cycle_representatives(&self) -> Vec<Form> {
        let mut seen = std::collections::HashSet::new();
        let mut reps = Vec::new();
        for b in 1..=self.sq {
            if (b - self.disc).rem_euclid(2) != 0 {
                continue;
            }
            let n4 = self.disc - b * b;
            if n4 % 4 != 0 {
                continue;
            }
            let n = n4 / 4;
            for a in 1..=n {
                if n % a != 0 {
                    continue;
                }
                let c = -n / a;
                for f in [(a, b, c), (-a, b, -c)] {
                    if self.is_reduced(f) && !seen.contains(&f) {
                        let cyc = self.cycle(f);
                        seen.extend(cyc.iter().copied());
                        reps.push(*cyc.iter().min().unwrap());
                    }
                }
            }
        }
        reps.sort();
        reps
    }
}

/// Narrow class group Cl⁺ of discriminant D with explicit elements.
#[derive(Clone, Debug)]
pub struct NarrowClassGroup {
    pub forms: Forms,
    pub elements: Vec<Form>,
    index: HashMap<Form, usize>,
    table: Vec<Vec<usize>>,
    pub identity: usize,
    pub delta: usize,
}

impl NarrowClassGroup {
    pub fn new(disc: i64) -> Self {
        let forms = Forms::new(disc);
        let elements = forms.cycle_representatives();
        let index: HashMap<Form, usize> = elements.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let n = elements.len();
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in i..n {
                let k = index[&forms.compose(elements[i], elements[j])];
                table[i][j] = k;
                table[j][i] = k;
            }
        }
        let identity = index[&forms.identity()];
        let delta = index[&forms.neg_identity()];
        NarrowClassGroup { forms, elements, index, table, identity, delta }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, f: Form) -> usize {
        self.index[&self.forms.canon(f)]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn pow(&self, i: usize, e: i64) -> usize {
        let base = if e < 0 { self.inv(i) } else { i };
        let mut r = self.identity;
        for _ in 0..e.unsigned_abs() {
            r = self.mul(r, base);
        }
        r
    }

    pub fn inv(&self, i: usize) -> usize {
        (0..self.order()).find(|&j| self.mul(i, j) == self.identity).unwrap()
    }

    /// Subgroup generated by `gens`, as a membership mask.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.order()];
        mask[self.identity] = true;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !mask[y] {
                    mask[y] = true;
                    frontier.push(y);
                }
            }
        }
        mask
    }

    pub fn squares(&self) -> Vec<usize> {
        let mut s: Vec<usize> = (0..self.order()).map(|i| self.mul(i, i)).collect();
        s.sort();
        s.dedup();
        s
    }

    /// |Cl⁺ / ⟨gens⟩|
    pub fn quotient_order(&self, gens: &[usize]) -> usize {
        let sub = self.closure(gens).iter().filter(|&&b| b).count();
        self.order() / sub
    }

    /// Equality in the wide class group Cl = Cl⁺/⟨δ⟩.
    pub fn wide_eq(&self, i: usize, j: usize) -> bool {
        i == j || self.mul(i, self.delta) == j
    }

    pub fn is_wide_principal(&self, i: usize) -> bool {
        self.wide_eq(i, self.identity)
    }

    /// Wide class number h = |Cl⁺/⟨δ⟩|.
    pub fn wide_order(&self) -> usize {
        let mut keys: Vec<usize> = (0..self.order()).map(|i| self.wide_key(i)).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    }

    /// |Cl/Cl²| for the wide class group.
    pub fn wide_square_quotient(&self) -> usize {
        let mut gens = self.squares();
        gens.push(self.delta);
        self.quotient_order(&gens)
    }

    fn wide_key(&self, i: usize) -> usize {
        i.min(self.mul(i, self.delta))
    }

    pub fn wide_data(&self, unit_norm_sign: i32) -> ClassGroupData {
        let mut keys: Vec<usize> = (0..self.order()).map(|i| self.wide_key(i)).collect();
        keys.sort();
        keys.dedup();
        let h = keys.len() as u64;
        debug_assert_eq!(
            h as usize * if unit_norm_sign == 1 { 2 } else { 1 },
            self.order()
        );
        let representatives = keys.iter().map(|&i| self.elements[i]).collect();
        ClassGroupData { h, elementary_divisors: self.wide_invariants(&keys), representatives }
    }

    /// Invariant factors d₁ | d₂ | … of the wide class group.
    fn wide_invariants(&self, keys: &[usize]) -> Vec<u64> {
        let h = keys.len() as u64;
        let mut per_prime: Vec<Vec<u64>> = Vec::new();
        for (p, _) in crate::arith::factor(h) {
            // r_j = number of cyclic factors of order ≥ p^j
            let mut counts = vec![1u64];
            let mut pk = 1i64;
            loop {
                pk *= p as i64;
                let c = keys
                    .iter()
                    .filter(|&&x| self.is_wide_principal(self.pow(x, pk)))
                    .count() as u64;
                if c == *counts.last().unwrap() {
                    break;
                }
                counts.push(c);
            }
            let mut ranks = Vec::new();
            for j in 1..counts.len() {
                let ratio = counts[j] / counts[j - 1];
                let mut r = 0;
                let mut x = 1;
                while x < ratio {
                    x *= p;
                    r += 1;
                }
                ranks.push(r);
            }
            // factor orders p^j, one per cyclic factor, largest first
            let mut orders = Vec::new();
            let total = ranks.first().copied().unwrap_or(0);
            for i in 0..total {
                let e = ranks.iter().filter(|&&r| r > i).count() as u32;
                orders.push(p.pow(e));
            }
            per_prime.push(orders);
        }
        let width = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut inv = vec![1u64; width];
        for orders in &per_prime {
            for (i, o) in orders.iter().enumerate() {
                inv[i] *= o;
            }
        }
        inv.reverse();
        inv
    }
}

pub fn class_group(field: &crate::field::RealQuadraticField) -> ClassGroupData {
    field.class_group.clone()
}

/// Narrow class number by counting cycles, without building the group table.
pub fn narrow_class_number(disc: i64) -> usize {
    Forms::new(disc).cycle_representatives().len()
}
