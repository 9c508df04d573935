use super::matrix::{mod_floor, BigMatrix, JsonInt};
use super::snf::smith_normal_form;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Solution set of a linear system `A·x = b` over the integers, or of
/// `A·x ≡ b (mod m)` when `modulus` is set.
///
/// Every solution is `particular + Σ cᵢ·kernel_basis[i]` for integer
/// coefficients (taken mod `m` when a modulus is present), and conversely every
/// such vector solves the system. `particular == None` means no solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "AffineSolutionSetWire", from = "AffineSolutionSetWire")]
pub struct AffineSolutionSet {
    pub particular: Option<Vec<BigInt>>,
    pub kernel_basis: Vec<Vec<BigInt>>,
    pub modulus: Option<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct AffineSolutionSetWire {
    particular: Option<Vec<JsonInt>>,
    kernel_basis: Vec<Vec<JsonInt>>,
    modulus: Option<JsonInt>,
}

impl From<AffineSolutionSet> for AffineSolutionSetWire {
    fn from(s: AffineSolutionSet) -> Self {
        AffineSolutionSetWire {
            particular: s.particular.map(|v| v.into_iter().map(JsonInt).collect()),
            kernel_basis: s
                .kernel_basis
                .into_iter()
                .map(|v| v.into_iter().map(JsonInt).collect())
                .collect(),
            modulus: s.modulus.map(JsonInt),
        }
    }
}

impl From<AffineSolutionSetWire> for AffineSolutionSet {
    fn from(w: AffineSolutionSetWire) -> Self {
        AffineSolutionSet {
            particular: w.particular.map(|v| v.into_iter().map(|x| x.0).collect()),
            kernel_basis: w
                .kernel_basis
                .into_iter()
                .map(|v| v.into_iter().map(|x| x.0).collect())
                .collect(),
            modulus: w.modulus.map(|x| x.0),
        }
    }
}

impl AffineSolutionSet {
    pub fn empty(modulus: Option<BigInt>) -> Self {
        AffineSolutionSet {
            particular: None,
            kernel_basis: Vec::new(),
            modulus,
        }
    }

    pub fn is_solvable(&self) -> bool {
        self.particular.is_some()
    }

    /// Number of unknowns, when known from the particular solution or kernel.
    pub fn dim(&self) -> Option<usize> {
        self.particular
            .as_ref()
            .map(|p| p.len())
            .or_else(|| self.kernel_basis.first().map(|k| k.len()))
    }

    /// Membership test: does `x` solve the system this set describes?
    pub fn contains(&self, x: &[BigInt]) -> bool {
        let Some(p) = &self.particular else {
            return false;
        };
        assert_eq!(p.len(), x.len());
        let diff: Vec<BigInt> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        in_lattice_span(&diff, &self.kernel_basis, self.modulus.as_ref())
    }
}

/// Solves `a·x = b` over ℤ, or `a·x ≡ b (mod m)`.
///
/// The kernel basis spans all solution differences; with a modulus, scalar
/// multiples of `m` on each coordinate are already inside the span.
pub fn solve_linear(a: &BigMatrix, b: &[BigInt], modulus: Option<&BigInt>) -> AffineSolutionSet {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    if let Some(m) = modulus {
        assert!(m.is_positive(), "modulus must be positive");
        let aug = a.hstack(&BigMatrix::identity(a.rows()).scale(m));
        let sol = solve_linear(&aug, b, None);
        let n = a.cols();
        let particular = sol
            .particular
            .map(|p| p[..n].iter().map(|x| mod_floor(x, m)).collect::<Vec<_>>());
        let mut kernel: Vec<Vec<BigInt>> = Vec::new();
        for k in &sol.kernel_basis {
            let proj: Vec<BigInt> = k[..n].iter().map(|x| mod_floor(x, m)).collect();
            if proj.iter().any(|x| !x.is_zero()) {
                kernel.push(proj);
            }
        }
        return AffineSolutionSet {
            particular,
            kernel_basis: kernel,
            modulus: Some(m.clone()),
        };
    }
    let d = smith_normal_form(a);
    let c = d.u.mul_vec(b);
    let n = a.cols();
    let k = a.rows().min(n);
    let mut y = vec![BigInt::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        if i < k {
            let di = d.s.get(i, i);
            if di.is_zero() {
                if !ci.is_zero() {
                    return AffineSolutionSet::empty(None);
                }
            } else {
                let (q, r) = ci.div_rem(di);
                if !r.is_zero() {
                    return AffineSolutionSet::empty(None);
                }
                y[i] = q;
            }
        } else if !ci.is_zero() {
            return AffineSolutionSet::empty(None);
        }
    }
    let x = d.v.mul_vec(&y);
    let mut kernel = Vec::new();
    for i in 0..n {
        let free = i >= k || d.s.get(i, i).is_zero();
        if free {
            kernel.push(d.v.col(i));
        }
    }
    AffineSolutionSet {
        particular: Some(x),
        kernel_basis: kernel,
        modulus: None,
    }
}

/// Basis of `{x : a·x = 0}` over ℤ, or a generating set of
/// `{x mod m : a·x ≡ 0 (mod m)}`.
pub fn integer_kernel(a: &BigMatrix, modulus: Option<&BigInt>) -> Vec<Vec<BigInt>> {
    solve_linear(a, &vec![BigInt::zero(); a.rows()], modulus).kernel_basis
}

/// Generating set of the preimage lattice `{x : f·x ∈ column span of rels}`,
/// over ℤ or mod `m`.
pub fn preimage_lattice(f: &BigMatrix, rels: &BigMatrix, modulus: Option<&BigInt>) -> Vec<Vec<BigInt>> {
    assert_eq!(f.rows(), rels.rows());
    let stacked = f.hstack(&rels.neg());
    let n = f.cols();
    let mut out = Vec::new();
    for k in integer_kernel(&stacked, modulus) {
        let proj: Vec<BigInt> = k[..n].to_vec();
        if proj.iter().any(|x| !x.is_zero()) {
            out.push(proj);
        }
    }
    out
}

/// Is `x` an integer (resp. mod-`m`) combination of the given lattice generators?
pub fn in_lattice_span(x: &[BigInt], gens: &[Vec<BigInt>], modulus: Option<&BigInt>) -> bool {
    if gens.is_empty() {
        return match modulus {
            Some(m) => x.iter().all(|v| (v % m).is_zero()),
            None => x.iter().all(|v| v.is_zero()),
        };
    }
    let mat = BigMatrix::from_cols(gens.to_vec());
    solve_linear(&mat, x, modulus).is_solvable()
}

/// Is every generator of `sub` inside the span of `ambient` (mod `m`)?
pub fn lattice_contained(sub: &[Vec<BigInt>], ambient: &[Vec<BigInt>], modulus: Option<&BigInt>) -> bool {
    sub.iter().all(|g| in_lattice_span(g, ambient, modulus))
}

/// Solves the matrix equation `r_b · Y = f · r_a` column by column.
///
/// This is the well-definedness test for a candidate morphism matrix `f`
/// between presentations with relation matrices `r_a` (domain) and `r_b`
/// (codomain): a witness `Y` expresses each pushed-forward relator inside the
/// codomain's relation span. The result is the full solution set over the
/// stacked columns of `Y`.
pub fn solve_bilinear_membership(
    f: &BigMatrix,
    r_a: &BigMatrix,
    r_b: &BigMatrix,
    modulus: Option<&BigInt>,
) -> AffineSolutionSet {
    assert_eq!(f.cols(), r_a.rows(), "f and r_a are not composable");
    assert_eq!(f.rows(), r_b.rows(), "f and r_b live over different generator counts");
    let rhs = f.mul(r_a);
    let cols = r_a.cols();
    let ycols = r_b.cols();
    let kernel_per_col = integer_kernel(r_b, modulus);
    let mut particular = Vec::with_capacity(cols * ycols);
    for j in 0..cols {
        let sol = solve_linear(r_b, &rhs.col(j), modulus);
        match sol.particular {
            Some(p) => particular.extend(p),
            None => return AffineSolutionSet::empty(modulus.cloned()),
        }
    }
    let mut kernel = Vec::new();
    for j in 0..cols {
        for k in &kernel_per_col {
            let mut v = vec![BigInt::zero(); cols * ycols];
            v[j * ycols..(j + 1) * ycols].clone_from_slice(k);
            kernel.push(v);
        }
    }
    AffineSolutionSet {
        particular: Some(particular),
        kernel_basis: kernel,
        modulus: modulus.cloned(),
    }
}

/// Column Hermite form of the lattice spanned by `gens` (vectors of length `n`):
/// column echelon with positive pivots, entries left of each pivot reduced into
/// `[0, pivot)`. Deterministic, and unique for a given lattice, so it doubles as
/// a canonical key for lattices and as the engine for canonical coset
/// representatives.
pub fn hermite_columns(n: usize, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut cols: Vec<Vec<BigInt>> = gens
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    cols.iter().for_each(|g| assert_eq!(g.len(), n));
    let mut fixed = 0usize;
    for r in 0..n {
        loop {
            let mut active: Vec<usize> = (fixed..cols.len()).filter(|&j| !cols[j][r].is_zero()).collect();
            if active.is_empty() {
                break;
            }
            if active.len() == 1 {
                let j = active[0];
                cols.swap(fixed, j);
                if cols[fixed][r].is_negative() {
                    cols[fixed].iter_mut().for_each(|x| *x = -&*x);
                }
                // reduce previously fixed columns at this row
                let pivot = cols[fixed][r].clone();
                for j in 0..fixed {
                    let q = cols[j][r].div_floor(&pivot);
                    if !q.is_zero() {
                        for i in 0..n {
                            let sub = &q * &cols[fixed][i];
                            cols[j][i] -= sub;
                        }
                    }
                }
                fixed += 1;
                break;
            }
            // gcd-combine: reduce everything by the minimal entry
            active.sort_by_key(|&j| cols[j][r].abs());
            let base = active[0];
            for &j in &active[1..] {
                let q = {
                    let (b, x) = (&cols[base][r], &cols[j][r]);
                    x / b
                };
                if !q.is_zero() {
                    for i in 0..n {
                        let sub = &q * &cols[base][i];
                        cols[j][i] -= sub;
                    }
                }
            }
        }
    }
    cols.truncate(fixed);
    cols
}

/// Canonical representative of the coset `x + span(gens)` (over ℤ, with the
/// modulus folded into the generators by the caller when needed): reduce `x`
/// greedily against the Hermite form of the lattice. Representatives are unique
/// per coset.
pub fn reduce_mod_lattice(x: &[BigInt], gens: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = x.len();
    let h = hermite_columns(n, gens);
    let mut out = x.to_vec();
    for col in &h {
        let r = col.iter().position(|v| !v.is_zero()).expect("zero column in hermite form");
        let q = out[r].div_floor(&col[r]);
        if !q.is_zero() {
            for i in 0..n {
                let sub = &q * &col[i];
                out[i] -= sub;
            }
        }
    }
    out
}

/// Lattice generators for a mod-`m` problem: the given generators plus `m·eᵢ`.
pub fn with_modulus_gens(n: usize, gens: &[Vec<BigInt>], modulus: Option<&BigInt>) -> Vec<Vec<BigInt>> {
    let mut out = gens.to_vec();
    if let Some(m) = modulus {
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = m.clone();
            out.push(e);
        }
    }
    out
}

/// Builder for systems over several vector unknowns where each equation block
/// holds modulo the column span of a per-block lattice. The auxiliary lattice
/// coefficients are eliminated from the reported solution set, which ranges
/// over the concatenation of the named unknowns.
pub struct BlockSystem {
    unknown_sizes: Vec<usize>,
    rows: Vec<BlockRow>,
}

struct BlockRow {
    coeffs: Vec<(usize, BigMatrix)>,
    lattice: BigMatrix,
    rhs: Vec<BigInt>,
}

impl BlockSystem {
    pub fn new(unknown_sizes: Vec<usize>) -> Self {
        BlockSystem {
            unknown_sizes,
            rows: Vec::new(),
        }
    }

    /// Add the equation `sum_i coeff_i · x_i ≡ rhs` modulo the columns of
    /// `lattice`. All coefficient matrices must agree on the row count.
    pub fn add_row(&mut self, coeffs: Vec<(usize, BigMatrix)>, lattice: BigMatrix, rhs: Vec<BigInt>) {
        let nrows = rhs.len();
        for (idx, m) in &coeffs {
            assert_eq!(m.rows(), nrows, "coefficient block row count mismatch");
            assert_eq!(
                m.cols(),
                self.unknown_sizes[*idx],
                "coefficient block column count mismatch"
            );
        }
        assert!(lattice.rows() == nrows || lattice.cols() == 0);
        self.rows.push(BlockRow {
            coeffs,
            lattice,
            rhs,
        });
    }

    pub fn solve(&self) -> AffineSolutionSet {
        let total_unknowns: usize = self.unknown_sizes.iter().sum();
        let offsets: Vec<usize> = self
            .unknown_sizes
            .iter()
            .scan(0usize, |acc, s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        let aux_total: usize = self.rows.iter().map(|r| r.lattice.cols()).sum();
        let width = total_unknowns + aux_total;
        let mut assembled: Option<BigMatrix> = None;
        let mut rhs_all = Vec::new();
        let mut aux_used = 0usize;
        for row in &self.rows {
            let nrows = row.rhs.len();
            if nrows == 0 {
                aux_used += row.lattice.cols();
                continue;
            }
            let mut mat = BigMatrix::zeros(nrows, width);
            for (idx, m) in &row.coeffs {
                let off = offsets[*idx];
                for i in 0..nrows {
                    for j in 0..m.cols() {
                        mat.set(i, off + j, m.get(i, j).clone());
                    }
                }
            }
            let aux_off = total_unknowns + aux_used;
            for i in 0..row.lattice.rows().min(nrows) {
                for j in 0..row.lattice.cols() {
                    mat.set(i, aux_off + j, -row.lattice.get(i, j));
                }
            }
            aux_used += row.lattice.cols();
            assembled = Some(match assembled {
                None => mat,
                Some(prev) => prev.vstack(&mat),
            });
            rhs_all.extend(row.rhs.iter().cloned());
        }
        let Some(mat) = assembled else {
            // no equations: everything is a solution
            let mut kernel = Vec::new();
            for i in 0..total_unknowns {
                let mut e = vec![BigInt::zero(); total_unknowns];
                e[i] = BigInt::from(1);
                kernel.push(e);
            }
            return AffineSolutionSet {
                particular: Some(vec![BigInt::zero(); total_unknowns]),
                kernel_basis: kernel,
                modulus: None,
            };
        };
        let sol = solve_linear(&mat, &rhs_all, None);
        let particular = sol.particular.map(|p| p[..total_unknowns].to_vec());
        let mut kernel = Vec::new();
        for k in sol.kernel_basis {
            let proj = k[..total_unknowns].to_vec();
            if proj.iter().any(|x| !x.is_zero()) {
                kernel.push(proj);
            }
        }
        AffineSolutionSet {
            particular,
            kernel_basis: kernel,
            modulus: None,
        }
    }

    /// Project a full-width vector onto one named unknown.
    pub fn extract<'a>(&self, idx: usize, v: &'a [BigInt]) -> &'a [BigInt] {
        let off: usize = self.unknown_sizes[..idx].iter().sum();
        &v[off..off + self.unknown_sizes[idx]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_mod(a: &BigMatrix, b: &[BigInt], m: i64) -> Vec<Vec<i64>> {
        // enumerate all x in (Z/m)^n with A x = b mod m
        let n = a.cols();
        let mut sols = Vec::new();
        let total = (m as u64).pow(n as u32);
        for code in 0..total {
            let mut x = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                x.push((c % m as u64) as i64);
                c /= m as u64;
            }
            let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            let ax = a.mul_vec(&xb);
            let ok = ax
                .iter()
                .zip(b)
                .all(|(l, r)| ((l - r) % BigInt::from(m)).is_zero());
            if ok {
                sols.push(x);
            }
        }
        sols
    }

    #[test]
    fn congruence_single_equation() {
        // 2x ≡ 2 (mod 4): solutions {1, 3}
        let a = BigMatrix::from_i64_rows(&[&[2]]);
        let b = vec![BigInt::from(2)];
        let m = BigInt::from(4);
        let sol = solve_linear(&a, &b, Some(&m));
        let p = sol.particular.clone().unwrap();
        assert!((BigInt::from(2) * &p[0] - BigInt::from(2)) % &m == BigInt::from(0) % &m);
        assert!(sol.contains(&[BigInt::from(1)]));
        assert!(sol.contains(&[BigInt::from(3)]));
        assert!(!sol.contains(&[BigInt::from(0)]));
        assert!(!sol.contains(&[BigInt::from(2)]));
    }

    #[test]
    fn inconsistent_over_z() {
        // 2x = 3 has no integer solution
        let a = BigMatrix::from_i64_rows(&[&[2]]);
        let sol = solve_linear(&a, &[BigInt::from(3)], None);
        assert!(!sol.is_solvable());
    }

    #[test]
    fn underdetermined_over_z() {
        // x + 2y = 5: kernel spanned by (2, -1) up to sign
        let a = BigMatrix::from_i64_rows(&[&[1, 2]]);
        let sol = solve_linear(&a, &[BigInt::from(5)], None);
        let p = sol.particular.clone().unwrap();
        assert_eq!(&p[0] + BigInt::from(2) * &p[1], BigInt::from(5));
        assert_eq!(sol.kernel_basis.len(), 1);
        assert!(sol.contains(&[BigInt::from(1), BigInt::from(2)]));
        assert!(sol.contains(&[BigInt::from(5), BigInt::from(0)]));
        assert!(!sol.contains(&[BigInt::from(0), BigInt::from(0)]));
    }

    #[test]
    fn solver_agrees_with_enumeration() {
        let cases: Vec<(BigMatrix, Vec<i64>, i64)> = vec![
            (BigMatrix::from_i64_rows(&[&[2, 3], &[1, 1]]), vec![1, 0], 6),
            (BigMatrix::from_i64_rows(&[&[4, 2]]), vec![2], 8),
            (BigMatrix::from_i64_rows(&[&[3, 0], &[0, 3]]), vec![0, 0], 9),
            (BigMatrix::from_i64_rows(&[&[2, 4, 6]]), vec![3], 12),
            (BigMatrix::from_i64_rows(&[&[5]]), vec![1], 7),
        ];
        for (a, b, m) in cases {
            let bb: Vec<BigInt> = b.iter().map(|&v| BigInt::from(v)).collect();
            let expected = brute_force_mod(&a, &bb, m);
            let mb = BigInt::from(m);
            let sol = solve_linear(&a, &bb, Some(&mb));
            assert_eq!(sol.is_solvable(), !expected.is_empty(), "solvability mismatch");
            // every enumerated solution is in the described set, and the
            // particular solution is among the enumerated ones
            for e in &expected {
                let ev: Vec<BigInt> = e.iter().map(|&v| BigInt::from(v)).collect();
                assert!(sol.contains(&ev), "missing enumerated solution {e:?}");
            }
            if let Some(p) = &sol.particular {
                let pv: Vec<i64> = p
                    .iter()
                    .map(|x| {
                        let r = mod_floor(x, &mb);
                        let (_, digits) = r.to_u64_digits();
                        digits.first().map_or(0i64, |&d| d as i64)
                    })
                    .collect();
                assert!(expected.contains(&pv), "particular {pv:?} not a solution");
            }
        }
    }

    #[test]
    fn bilinear_membership_witness() {
        // f = x2 : Z/2 -> Z/4 given on presentations: r_a = [2], r_b = [4], f = [2]
        // witness Y must satisfy 4*Y = 2*2 = 4, e.g. Y = [1]
        let f = BigMatrix::from_i64_rows(&[&[2]]);
        let ra = BigMatrix::from_i64_rows(&[&[2]]);
        let rb = BigMatrix::from_i64_rows(&[&[4]]);
        let sol = solve_bilinear_membership(&f, &ra, &rb, None);
        assert!(sol.is_solvable());
        let y = sol.particular.unwrap();
        assert_eq!(BigInt::from(4) * &y[0], BigInt::from(4));
        // a non-morphism: candidate [1] : Z/2 -> Z/4 needs 4 | 2, impossible
        let bad = BigMatrix::from_i64_rows(&[&[1]]);
        assert!(!solve_bilinear_membership(&bad, &ra, &rb, None).is_solvable());
    }

    #[test]
    fn block_system_matches_direct_congruence_solve() {
        // one unknown x of length 1, equation 2x = 2 mod 4, phrased with the
        // modulus as an explicit lattice block
        let mut sys = BlockSystem::new(vec![1]);
        sys.add_row(
            vec![(0, BigMatrix::from_i64_rows(&[&[2]]))],
            BigMatrix::from_i64_rows(&[&[4]]),
            vec![BigInt::from(2)],
        );
        let sol = sys.solve();
        assert!(sol.contains(&[BigInt::from(1)]));
        assert!(sol.contains(&[BigInt::from(3)]));
        assert!(!sol.contains(&[BigInt::from(2)]));

        // two unknowns coupled across blocks: x - y = 0 mod 5, x + y = 2
        let mut sys = BlockSystem::new(vec![1, 1]);
        sys.add_row(
            vec![
                (0, BigMatrix::from_i64_rows(&[&[1]])),
                (1, BigMatrix::from_i64_rows(&[&[-1]])),
            ],
            BigMatrix::from_i64_rows(&[&[5]]),
            vec![BigInt::zero()],
        );
        sys.add_row(
            vec![
                (0, BigMatrix::from_i64_rows(&[&[1]])),
                (1, BigMatrix::from_i64_rows(&[&[1]])),
            ],
            BigMatrix::zeros(1, 0),
            vec![BigInt::from(2)],
        );
        let sol = sys.solve();
        assert!(sol.contains(&[BigInt::from(1), BigInt::from(1)]));
        // x = 6, y = -4: x - y = 10 ≡ 0 mod 5 and x + y = 2
        assert!(sol.contains(&[BigInt::from(6), BigInt::from(-4)]));
        assert!(!sol.contains(&[BigInt::from(2), BigInt::from(1)]));

        // no equations at all: every assignment works
        let sys = BlockSystem::new(vec![2]);
        let sol = sys.solve();
        assert!(sol.contains(&[BigInt::from(7), BigInt::from(-3)]));
    }

    #[test]
    fn hermite_canonical_for_same_lattice() {
        // two generating sets of the same lattice give identical hermite forms
        let g1 = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
        ];
        let g2 = vec![
            vec![BigInt::from(2), BigInt::from(3)],
            vec![BigInt::from(2), BigInt::from(-3)],
            vec![BigInt::from(4), BigInt::from(3)],
        ];
        let h1 = hermite_columns(2, &g1);
        let h2 = hermite_columns(2, &g2);
        assert_eq!(h1, h2);
        let r1 = reduce_mod_lattice(&[BigInt::from(7), BigInt::from(8)], &g1);
        let r2 = reduce_mod_lattice(&[BigInt::from(7), BigInt::from(8)], &g2);
        assert_eq!(r1, r2);
        assert_eq!(r1, vec![BigInt::from(1), BigInt::from(2)]);
    }
}
