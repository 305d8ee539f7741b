//! Square classes: the groups V(T) = {a ∈ k* : ord_w(a) even for w ∉ T}/k*² and
//! H(S,B)/k*² = V(R_f ∪ S) ∩ k₊.

use crate::error::Result;
use crate::field::{FieldElement, RealQuadraticField};
use crate::linalg::{echelon, rank, span_elements, Vector};
use crate::place::{ord_v, places_above, residue, residue_is_square, FinitePlace, SplitKind};
use crate::units::{place_class, principal_generator, reduce_square_class, size_key};

/// Exponents e_j ∈ [0, ord_j) with Σ e_j·c_j equal to `target` in the wide class group.
fn wide_relation(field: &RealQuadraticField, target: usize, classes: &[usize]) -> Option<Vec<u32>> {
    let g = &field.narrow;
    let orders: Vec<u32> = classes
        .iter()
        .map(|&c| (1..=g.order() as u32).find(|&k| g.is_wide_principal(g.pow(c, k as i64))).unwrap())
        .collect();
    let mut e = vec![0u32; classes.len()];
    loop {
        let cls = classes.iter().zip(&e).fold(g.identity, |acc, (&c, &k)| g.mul(acc, g.pow(c, k as i64)));
        if g.wide_eq(cls, target) {
            return Some(e);
        }
        let mut i = 0;
        loop {
            if i == e.len() {
                return None;
            }
            e[i] += 1;
            if e[i] < orders[i] {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

/// Generators of V(T) modulo squares: −1, ε, a basis of the T-units and lifts
/// of the 2-torsion of the T-class group. Returns the generators and dim V(T).
fn selmer_generators(field: &RealQuadraticField, t: &[FinitePlace]) -> Result<(Vec<FieldElement>, usize)> {
    let g = &field.narrow;
    let mut gens = vec![FieldElement::from_ints(-1, 0), field.eps().clone()];
    let classes: Vec<usize> = t.iter().map(|v| place_class(field, v)).collect();
    for i in 0..t.len() {
        for k in 1..=g.order() as u32 {
            let target = g.inv(g.pow(classes[i], k as i64));
            if let Some(rel) = wide_relation(field, target, &classes[..i]) {
                let mut ideal: Vec<(FinitePlace, u32)> = vec![(t[i].clone(), k)];
                for (j, &e) in rel.iter().enumerate() {
                    if e > 0 {
                        ideal.push((t[j].clone(), e));
                    }
                }
                gens.push(principal_generator(field, &ideal)?.expect("relation gives a principal ideal"));
                break;
            }
        }
    }
    // 2-torsion of Cl⁺/⟨T, δ⟩
    let mut sub_gens = classes.clone();
    sub_gens.push(g.delta);
    let tsub = g.closure(&sub_gens);
    let extra: Vec<usize> = (0..g.order())
        .filter(|&c| !tsub[c] && tsub[g.mul(c, c)])
        .collect();
    for &c in &extra {
        let j = find_prime_in_coset(field, c, &tsub, t);
        let target = g.inv(g.pow(place_class(field, &j), 2));
        let rel = wide_relation(field, target, &classes).expect("square class lies in ⟨T⟩");
        let mut ideal: Vec<(FinitePlace, u32)> = vec![(j, 2)];
        for (i, &e) in rel.iter().enumerate() {
            if e > 0 {
                ideal.push((t[i].clone(), e));
            }
        }
        gens.push(principal_generator(field, &ideal)?.expect("relation gives a principal ideal"));
    }
    let mut all = sub_gens.clone();
    all.extend(extra.iter().copied());
    let tsub_size = tsub.iter().filter(|&&b| b).count();
    let big = g.closure(&all).iter().filter(|&&b| b).count();
    let cl2_rank = (big / tsub_size).trailing_zeros() as usize;
    Ok((gens, 2 + t.len() + cl2_rank))
}

fn find_prime_in_coset(field: &RealQuadraticField, c: usize, tsub: &[bool], t: &[FinitePlace]) -> FinitePlace {
    let g = &field.narrow;
    let mut p = 2;
    loop {
        for v in places_above(field, p) {
            if v.kind != SplitKind::Inert && !t.contains(&v) {
                let q = place_class(field, &v);
                // q ∈ c·⟨T,δ⟩
                if tsub[g.mul(q, g.inv(c))] {
                    return v;
                }
            }
        }
        p = crate::arith::next_prime(p);
    }
}

/// F₂ characters separating V(T): signs, parities at T, quadratic residue
/// symbols at auxiliary split primes.
#[derive(Clone, Debug)]
pub struct Characters {
    pub places: Vec<FinitePlace>,
    pub aux: Vec<FinitePlace>,
}

impl Characters {
    pub fn vector(&self, field: &RealQuadraticField, x: &FieldElement) -> Vector {
        let (s1, s2) = field.signs(x);
        let mut v = vec![(s1 < 0) as u8, (s2 < 0) as u8];
        for w in &self.places {
            v.push(ord_v(field, w, x).rem_euclid(2) as u8);
        }
        for w in &self.aux {
            let e = ord_v(field, w, x);
            assert!(e % 2 == 0, "element outside V(T)");
            let y = if e == 0 {
                x.clone()
            } else {
                field.mul(x, &field.pow(&FieldElement::from_ints(w.p as i64, 0), -e))
            };
            let r = residue(field, w, &y);
            v.push(!residue_is_square(field, w, r) as u8);
        }
        v
    }

    pub fn len(&self) -> usize {
        2 + self.places.len() + self.aux.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The group H(S,B)/k*² of totally positive square classes supported on T = R_f ∪ S.
#[derive(Clone, Debug)]
pub struct SquareClassGroup {
    pub places: Vec<FinitePlace>,
    pub generators: Vec<FieldElement>,
    /// All elements; index 0 is the class of 1.
    pub elements: Vec<FieldElement>,
    pub order: usize,
    pub vectors: Vec<Vector>,
    pub dim_v: usize,
    chars: Characters,
}

impl SquareClassGroup {
    pub fn build(field: &RealQuadraticField, t: &[FinitePlace]) -> Result<Self> {
        let (gens, dim_v) = selmer_generators(field, t)?;
        let mut chars = Characters { places: t.to_vec(), aux: Vec::new() };
        let mut p = 2;
        loop {
            let vecs: Vec<Vector> = gens.iter().map(|x| chars.vector(field, x)).collect();
            let r = rank(&vecs);
            assert!(r <= dim_v, "characters exceed the dimension of V(T)");
            if r == dim_v {
                break;
            }
            loop {
                p = crate::arith::next_prime(p);
                let w = places_above(field, p).into_iter().next().unwrap();
                if w.kind == SplitKind::Split && gens.iter().all(|x| ord_v(field, &w, x) == 0) {
                    chars.aux.push(w);
                    break;
                }
            }
            assert!(chars.aux.len() < 80, "no separating characters found");
        }
        let vecs: Vec<Vector> = gens.iter().map(|x| chars.vector(field, x)).collect();
        // basis of V(T)
        let rows: Vec<(Vector, Vec<usize>)> = vecs.iter().cloned().enumerate().map(|(i, v)| (v, vec![i])).collect();
        let basis = echelon(&rows, |a, b| symmetric_difference(a, b));
        let basis_el: Vec<(Vector, FieldElement)> = basis
            .iter()
            .map(|(v, comb, _)| (v.clone(), field.product(comb.iter().map(|&i| &gens[i]))))
            .collect();
        debug_assert_eq!(basis_el.len(), dim_v);
        // kernel of the sign projection, tracked by combination masks
        let n = basis_el.len();
        let mut kernel_rows: Vec<(Vector, u64)> = Vec::new();
        for mask in 1u64..(1u64 << n) {
            let mut v = vec![0u8; chars.len()];
            for (i, (bv, _)) in basis_el.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v = crate::linalg::add(&v, bv);
                }
            }
            if v[0] == 0 && v[1] == 0 {
                kernel_rows.push((v, mask));
            }
        }
        let kb = echelon(&kernel_rows, |a, b| a ^ b);
        let mut cands: Vec<(Vector, FieldElement)> = kb
            .iter()
            .map(|(v, mask, _)| {
                let x = field.product(basis_el.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, (_, e))| e));
                (v.clone(), reduce_square_class(field, &x))
            })
            .collect();
        // prefer small generators: greedy over all elements by size
        let all_vecs = span_elements(&cands.iter().map(|c| c.0.clone()).collect::<Vec<_>>(), chars.len());
        let mut all_els = span_products(field, &cands);
        all_els.remove(0);
        let mut order: Vec<usize> = (0..all_els.len()).collect();
        order.sort_by_key(|&i| size_key(field, &all_els[i]));
        let mut chosen: Vec<(Vector, FieldElement)> = Vec::new();
        for i in order {
            let v = &all_vecs[i + 1];
            let mut tmp: Vec<Vector> = chosen.iter().map(|c| c.0.clone()).collect();
            let r = rank(&tmp);
            tmp.push(v.clone());
            if rank(&tmp) > r {
                chosen.push((v.clone(), all_els[i].clone()));
            }
        }
        debug_assert_eq!(chosen.len(), cands.len());
        cands = chosen;
        let vectors = span_elements(&cands.iter().map(|c| c.0.clone()).collect::<Vec<_>>(), chars.len());
        let elements = span_products(field, &cands);
        Ok(SquareClassGroup {
            places: t.to_vec(),
            generators: cands.into_iter().map(|c| c.1).collect(),
            order: elements.len(),
            elements,
            vectors,
            dim_v,
            chars,
        })
    }

    /// Index of the class of x in `elements`, if x lies in H.
    pub fn class_index(&self, field: &RealQuadraticField, x: &FieldElement) -> Option<usize> {
        if !field.is_totally_positive(x) {
            return None;
        }
        let supp = crate::place::support(field, x);
        if supp.iter().any(|w| !self.places.contains(w) && ord_v(field, w, x) % 2 != 0) {
            return None;
        }
        let v = self.chars.vector(field, x);
        self.vectors.iter().position(|w| w == &v)
    }

    pub fn characters(&self) -> &Characters {
        &self.chars
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().filter(|x| !b.contains(x)).copied().collect();
    out.extend(b.iter().filter(|x| !a.contains(x)).copied());
    out.sort();
    out
}

fn span_products(field: &RealQuadraticField, gens: &[(Vector, FieldElement)]) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::one()];
    for (_, g) in gens {
        let n = out.len();
        for i in 0..n {
            let y = reduce_square_class(field, &field.mul(&out[i], g));
            out.push(y);
        }
    }
    out
}

/// H(S,B)/k*² for T = R_f ∪ S.
pub fn h_group(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace]) -> Result<SquareClassGroup> {
    let mut t: Vec<FinitePlace> = rf.iter().chain(s.iter()).cloned().collect();
    t.sort();
    t.dedup();
    SquareClassGroup::build(field, &t)
}
