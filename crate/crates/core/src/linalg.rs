//! Linear algebra over F₂ on byte vectors.

pub type Vector = Vec<u8>;

fn xor_into(a: &mut [u8], b: &[u8]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// Reduced row echelon form of tagged rows. Dependent rows are dropped;
/// tags are combined alongside the row operations.
pub fn echelon<T: Clone>(rows: &[(Vector, T)], combine: impl Fn(&T, &T) -> T) -> Vec<(Vector, T, usize)> {
    let mut basis: Vec<(Vector, T, usize)> = Vec::new();
    for (v, tag) in rows {
        let mut v = v.clone();
        let mut tag = tag.clone();
        for (bv, bt, pc) in &basis {
            if v[*pc] == 1 {
                xor_into(&mut v, bv);
                tag = combine(&tag, bt);
            }
        }
        if let Some(pc) = v.iter().position(|&x| x == 1) {
            for (bv, bt, _) in basis.iter_mut() {
                if bv[pc] == 1 {
                    xor_into(bv, &v);
                    *bt = combine(bt, &tag);
                }
            }
            basis.push((v, tag, pc));
        }
    }
    basis
}

pub fn rank(vecs: &[Vector]) -> usize {
    let rows: Vec<(Vector, ())> = vecs.iter().map(|v| (v.clone(), ())).collect();
    echelon(&rows, |_, _| ()).len()
}

/// Whether v lies in the span of `vecs`.
pub fn in_span(vecs: &[Vector], v: &Vector) -> bool {
    let mut all = vecs.to_vec();
    let r = rank(&all);
    all.push(v.clone());
    rank(&all) == r
}

/// All 2^n combinations of the given vectors, in binary counting order.
pub fn span_elements(basis: &[Vector], len: usize) -> Vec<Vector> {
    let mut out = vec![vec![0u8; len]];
    for b in basis {
        let n = out.len();
        for i in 0..n {
            let mut w = out[i].clone();
            xor_into(&mut w, b);
            out.push(w);
        }
    }
    out
}

pub fn add(a: &Vector, b: &Vector) -> Vector {
    let mut c = a.clone();
    xor_into(&mut c, b);
    c
}
