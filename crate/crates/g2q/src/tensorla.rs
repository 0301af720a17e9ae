//! Sparse exact linear algebra on tensor powers of the 7-dimensional space.
//!
//! - [`LegIndex`]: a word in the ordered weight-basis alphabet, encoded base-7
//! - [`SparseTensor`]: finitely supported element of V^{⊗n}
//! - [`LinMap`]: sparse exact linear map V^{⊗a} -> V^{⊗b}
//! - [`EchelonBasis`]: reduced row-echelon spans, kernels, ranks, canonical
//!   reduction
//!
//! The global monomial order is lexicographic on leg words in the fixed basis
//! order `(1, 2, 3, 0, -3, -2, -1)`; every canonical form in the system
//! derives from it.  All values are immutable after construction.

use crate::exactq::RatFunc;
use std::collections::BTreeMap;
use std::fmt;

/// Dimension of the standard module V.
pub const DIM: usize = 7;

/// The ordered weight-basis labels of V: index k of this array is the symbol
/// of basis vector number k.
pub const LABELS: [i8; 7] = [1, 2, 3, 0, -3, -2, -1];

/// Powers of 7 for leg-index arithmetic.
pub(crate) fn pow7(n: usize) -> u64 {
    7u64.pow(n as u32)
}

/// Translate a basis label (one of 1, 2, 3, 0, -3, -2, -1) to its digit in
/// the fixed alphabet order.
pub fn digit_of_label(label: i8) -> u8 {
    LABELS
        .iter()
        .position(|&l| l == label)
        .unwrap_or_else(|| panic!("unknown basis label {}", label)) as u8
}

/// A multi-index into V^{⊗n}: a word of n basis symbols, encoded as a base-7
/// integer with leg 1 most significant.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LegIndex {
    n: usize,
    code: u64,
}

impl LegIndex {
    /// The empty word (the scalar leg count 0).
    pub fn empty() -> Self {
        LegIndex { n: 0, code: 0 }
    }

    pub fn from_code(n: usize, code: u64) -> Self {
        debug_assert!(code < pow7(n));
        LegIndex { n, code }
    }

    /// Build from alphabet digits (0..7), leg 1 first.
    pub fn from_digits(digits: &[u8]) -> Self {
        let mut code = 0u64;
        for &d in digits {
            debug_assert!((d as usize) < DIM);
            code = code * 7 + d as u64;
        }
        LegIndex {
            n: digits.len(),
            code,
        }
    }

    /// Build from basis labels, leg 1 first.
    pub fn from_labels(labels: &[i8]) -> Self {
        let digits: Vec<u8> = labels.iter().map(|&l| digit_of_label(l)).collect();
        Self::from_digits(&digits)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// Alphabet digit of leg `k` (0-based).
    pub fn digit(&self, k: usize) -> u8 {
        debug_assert!(k < self.n);
        ((self.code / pow7(self.n - 1 - k)) % 7) as u8
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.n).map(|k| self.digit(k)).collect()
    }

    pub fn labels(&self) -> Vec<i8> {
        self.digits().iter().map(|&d| LABELS[d as usize]).collect()
    }

    /// Concatenate two words.
    pub fn concat(&self, other: &LegIndex) -> LegIndex {
        LegIndex {
            n: self.n + other.n,
            code: self.code * pow7(other.n) + other.code,
        }
    }

    /// Split into the first `k` legs and the rest.
    pub fn split_at(&self, k: usize) -> (LegIndex, LegIndex) {
        debug_assert!(k <= self.n);
        let tail = pow7(self.n - k);
        (
            LegIndex {
                n: k,
                code: self.code / tail,
            },
            LegIndex {
                n: self.n - k,
                code: self.code % tail,
            },
        )
    }
}

impl fmt::Debug for LegIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.labels())
    }
}

/// A finitely supported element of V^{⊗n} with exact coefficients.
///
/// No zero coefficients are stored, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseTensor {
    n: usize,
    entries: BTreeMap<u64, RatFunc>,
}

impl SparseTensor {
    pub fn zero(n: usize) -> Self {
        SparseTensor {
            n,
            entries: BTreeMap::new(),
        }
    }

    /// The basis vector at the given index, with coefficient 1.
    pub fn basis(idx: LegIndex) -> Self {
        let mut t = Self::zero(idx.len());
        t.entries.insert(idx.code(), RatFunc::one());
        t
    }

    /// The 0-leg tensor with the given scalar value.
    pub fn scalar(value: RatFunc) -> Self {
        let mut t = Self::zero(0);
        if !value.is_zero() {
            t.entries.insert(0, value);
        }
        t
    }

    pub fn legs(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// The coefficient at an index (zero if absent).
    pub fn coeff(&self, idx: &LegIndex) -> RatFunc {
        debug_assert_eq!(idx.len(), self.n);
        self.entries
            .get(&idx.code())
            .cloned()
            .unwrap_or_else(RatFunc::zero)
    }

    pub(crate) fn coeff_code(&self, code: u64) -> Option<&RatFunc> {
        self.entries.get(&code)
    }

    /// Iterate entries in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (LegIndex, &RatFunc)> {
        let n = self.n;
        self.entries
            .iter()
            .map(move |(&code, c)| (LegIndex::from_code(n, code), c))
    }

    /// Smallest index with nonzero coefficient.
    pub fn leading_index(&self) -> Option<LegIndex> {
        self.entries
            .keys()
            .next()
            .map(|&code| LegIndex::from_code(self.n, code))
    }

    /// Add `coeff * e_idx` in place.
    pub fn add_term(&mut self, idx: LegIndex, coeff: &RatFunc) {
        debug_assert_eq!(idx.len(), self.n);
        self.add_term_code(idx.code(), coeff);
    }

    pub(crate) fn add_term_code(&mut self, code: u64, coeff: &RatFunc) {
        if coeff.is_zero() {
            return;
        }
        match self.entries.get_mut(&code) {
            Some(c) => {
                let s = c.add(coeff);
                if s.is_zero() {
                    self.entries.remove(&code);
                } else {
                    *c = s;
                }
            }
            None => {
                self.entries.insert(code, coeff.clone());
            }
        }
    }

    /// In-place `self += scale * other`.
    pub fn add_scaled(&mut self, other: &SparseTensor, scale: &RatFunc) {
        debug_assert_eq!(self.n, other.n);
        if scale.is_zero() {
            return;
        }
        for (&code, c) in &other.entries {
            self.add_term_code(code, &c.mul(scale));
        }
    }

    pub fn add(&self, other: &SparseTensor) -> SparseTensor {
        let mut out = self.clone();
        out.add_scaled(other, &RatFunc::one());
        out
    }

    pub fn sub(&self, other: &SparseTensor) -> SparseTensor {
        let mut out = self.clone();
        out.add_scaled(other, &RatFunc::from_int(-1));
        out
    }

    pub fn scale(&self, scale: &RatFunc) -> SparseTensor {
        let mut out = SparseTensor::zero(self.n);
        out.add_scaled(self, scale);
        out
    }

    pub fn neg(&self) -> SparseTensor {
        self.scale(&RatFunc::from_int(-1))
    }

    /// Tensor product: `self ⊗ other`.
    pub fn tensor(&self, other: &SparseTensor) -> SparseTensor {
        let mut out = SparseTensor::zero(self.n + other.n);
        let tail = pow7(other.n);
        for (&a, ca) in &self.entries {
            for (&b, cb) in &other.entries {
                out.add_term_code(a * tail + b, &ca.mul(cb));
            }
        }
        out
    }

    /// The scalar value of a 0-leg tensor.
    pub fn scalar_value(&self) -> RatFunc {
        assert_eq!(self.n, 0, "scalar_value on a tensor with legs");
        self.entries.get(&0).cloned().unwrap_or_else(RatFunc::zero)
    }
}

impl fmt::Debug for SparseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .iter()
            .map(|(idx, c)| format!("({}) {:?}", c, idx.labels()))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// A sparse exact linear map V^{⊗in} -> V^{⊗out}, stored column-wise.
#[derive(Clone, PartialEq, Eq)]
pub struct LinMap {
    in_legs: usize,
    out_legs: usize,
    columns: BTreeMap<u64, SparseTensor>,
}

impl LinMap {
    pub fn zero(in_legs: usize, out_legs: usize) -> Self {
        LinMap {
            in_legs,
            out_legs,
            columns: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for code in 0..pow7(n) {
            m.columns
                .insert(code, SparseTensor::basis(LegIndex::from_code(n, code)));
        }
        m
    }

    /// Build from a function giving the image of every basis vector.
    pub fn from_fn(in_legs: usize, out_legs: usize, f: impl Fn(LegIndex) -> SparseTensor) -> Self {
        let mut m = Self::zero(in_legs, out_legs);
        for code in 0..pow7(in_legs) {
            let img = f(LegIndex::from_code(in_legs, code));
            debug_assert_eq!(img.legs(), out_legs);
            if !img.is_zero() {
                m.columns.insert(code, img);
            }
        }
        m
    }

    /// Build from explicit columns; zero columns are dropped.
    pub fn from_columns(
        in_legs: usize,
        out_legs: usize,
        cols: impl IntoIterator<Item = (LegIndex, SparseTensor)>,
    ) -> Self {
        let mut m = Self::zero(in_legs, out_legs);
        for (idx, t) in cols {
            assert_eq!(idx.len(), in_legs);
            assert_eq!(t.legs(), out_legs);
            if !t.is_zero() {
                m.columns.insert(idx.code(), t);
            }
        }
        m
    }

    pub fn in_legs(&self) -> usize {
        self.in_legs
    }

    pub fn out_legs(&self) -> usize {
        self.out_legs
    }

    pub fn is_zero(&self) -> bool {
        self.columns.is_empty()
    }

    /// The image of a basis vector.
    pub fn column(&self, idx: &LegIndex) -> SparseTensor {
        debug_assert_eq!(idx.len(), self.in_legs);
        self.columns
            .get(&idx.code())
            .cloned()
            .unwrap_or_else(|| SparseTensor::zero(self.out_legs))
    }

    pub(crate) fn column_code(&self, code: u64) -> Option<&SparseTensor> {
        self.columns.get(&code)
    }

    /// Iterate nonzero columns in increasing index order.
    pub fn iter_columns(&self) -> impl Iterator<Item = (LegIndex, &SparseTensor)> {
        let n = self.in_legs;
        self.columns
            .iter()
            .map(move |(&code, t)| (LegIndex::from_code(n, code), t))
    }

    /// Apply to a tensor (full-width application).
    pub fn apply(&self, x: &SparseTensor) -> SparseTensor {
        assert_eq!(x.legs(), self.in_legs, "leg-count mismatch in apply");
        let mut out = SparseTensor::zero(self.out_legs);
        for (&code, c) in &x.entries {
            if let Some(col) = self.columns.get(&code) {
                out.add_scaled(col, c);
            }
        }
        out
    }

    pub fn add(&self, other: &LinMap) -> LinMap {
        assert_eq!(self.in_legs, other.in_legs);
        assert_eq!(self.out_legs, other.out_legs);
        let mut out = self.clone();
        for (&code, t) in &other.columns {
            let mut cur = out
                .columns
                .remove(&code)
                .unwrap_or_else(|| SparseTensor::zero(self.out_legs));
            cur.add_scaled(t, &RatFunc::one());
            if !cur.is_zero() {
                out.columns.insert(code, cur);
            }
        }
        out
    }

    pub fn sub(&self, other: &LinMap) -> LinMap {
        self.add(&other.scale(&RatFunc::from_int(-1)))
    }

    pub fn scale(&self, scale: &RatFunc) -> LinMap {
        let mut out = LinMap::zero(self.in_legs, self.out_legs);
        if scale.is_zero() {
            return out;
        }
        for (&code, t) in &self.columns {
            out.columns.insert(code, t.scale(scale));
        }
        out
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LinMap) -> LinMap {
        assert_eq!(other.out_legs, self.in_legs, "leg-count mismatch in compose");
        let mut out = LinMap::zero(other.in_legs, self.out_legs);
        for (&code, t) in &other.columns {
            let img = self.apply(t);
            if !img.is_zero() {
                out.columns.insert(code, img);
            }
        }
        out
    }

    /// Tensor product of maps: `self ⊗ other`.
    pub fn tensor(&self, other: &LinMap) -> LinMap {
        let mut out = LinMap::zero(
            self.in_legs + other.in_legs,
            self.out_legs + other.out_legs,
        );
        let tail = pow7(other.in_legs);
        for (&a, ta) in &self.columns {
            for (&b, tb) in &other.columns {
                out.columns.insert(a * tail + b, ta.tensor(tb));
            }
        }
        out
    }

    /// A 0-leg -> 0-leg map holding a scalar.
    pub fn scalar(value: RatFunc) -> LinMap {
        LinMap::from_columns(
            0,
            0,
            [(LegIndex::empty(), SparseTensor::scalar(value))],
        )
    }

    /// Is this map the identity scaled by `c`?
    pub fn is_scalar_multiple_of_identity(&self, c: &RatFunc) -> bool {
        self.in_legs == self.out_legs && *self == LinMap::identity(self.in_legs).scale(c)
    }
}

impl fmt::Debug for LinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LinMap({} -> {} legs, {} nonzero columns)",
            self.in_legs,
            self.out_legs,
            self.columns.len()
        )
    }
}

/// Apply `f` to a contiguous ascending run of legs of `x`, identity elsewhere.
///
/// `at` lists 1-based leg positions; it must be a contiguous ascending run of
/// length `f.in_legs()` inside `x`.  The output leg count is adjusted by
/// `f.out_legs() - f.in_legs()`.
pub fn apply_on_legs(f: &LinMap, at: &[usize], x: &SparseTensor) -> SparseTensor {
    assert_eq!(
        at.len(),
        f.in_legs(),
        "leg-position list length differs from the map's input legs"
    );
    for w in at.windows(2) {
        assert_eq!(w[1], w[0] + 1, "leg positions must be contiguous ascending");
    }
    let start = if at.is_empty() { 1 } else { at[0] };
    assert!(start >= 1, "leg positions are 1-based");
    assert!(
        start - 1 + f.in_legs() <= x.legs(),
        "leg positions exceed the tensor's legs"
    );
    apply_at(f, start - 1, x)
}

/// Apply `f` to legs `[start, start + f.in_legs())` (0-based) of `x`.
pub fn apply_at(f: &LinMap, start: usize, x: &SparseTensor) -> SparseTensor {
    let pre = start;
    let mid = f.in_legs();
    let suf = x.legs() - pre - mid;
    let mut out = SparseTensor::zero(pre + f.out_legs() + suf);
    let p_mid_suf = pow7(mid + suf);
    let p_suf = pow7(suf);
    let p_out_suf = pow7(f.out_legs() + suf);
    for (&code, c) in &x.entries {
        let prefix = code / p_mid_suf;
        let rest = code % p_mid_suf;
        let midcode = rest / p_suf;
        let sufcode = rest % p_suf;
        if let Some(col) = f.columns.get(&midcode) {
            for (&ocode, oc) in &col.entries {
                out.add_term_code(
                    prefix * p_out_suf + ocode * p_suf + sufcode,
                    &c.mul(oc),
                );
            }
        }
    }
    out
}

/// A list of tensors in reduced row-echelon form with respect to the global
/// index order: pivot entries equal 1, pivot columns vanish in every other
/// row, and pivots are strictly increasing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EchelonBasis {
    n: usize,
    rows: Vec<SparseTensor>,
    pivots: Vec<LegIndex>,
}

impl EchelonBasis {
    /// The empty basis in V^{⊗n}.
    pub fn empty(n: usize) -> Self {
        EchelonBasis {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Reduced row-echelon span of arbitrary vectors (must share leg counts).
    pub fn from_vectors(n: usize, vectors: impl IntoIterator<Item = SparseTensor>) -> Self {
        let mut basis = Self::empty(n);
        for v in vectors {
            basis.insert(v);
        }
        basis
    }

    pub fn legs(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseTensor] {
        &self.rows
    }

    pub fn pivots(&self) -> &[LegIndex] {
        &self.pivots
    }

    /// Insert a vector, keeping the reduced-echelon invariant.  Returns true
    /// if the vector enlarged the span.
    pub fn insert(&mut self, v: SparseTensor) -> bool {
        assert_eq!(v.legs(), self.n, "mixed leg counts in echelon basis");
        let v = self.reduce(&v);
        let pivot = match v.leading_index() {
            Some(p) => p,
            None => return false,
        };
        let inv = v
            .coeff(&pivot)
            .inv()
            .expect("nonzero leading coefficient");
        let v = v.scale(&inv);
        // Eliminate the new pivot from all existing rows.
        let pcode = pivot.code();
        for row in &mut self.rows {
            if let Some(c) = row.coeff_code(pcode).cloned() {
                row.add_scaled(&v, &c.neg());
            }
        }
        // Keep rows sorted by pivot.
        let pos = self
            .pivots
            .binary_search(&pivot)
            .expect_err("duplicate pivot after reduction");
        self.pivots.insert(pos, pivot);
        self.rows.insert(pos, v);
        true
    }

    /// The unique representative of `x + span(self)` with zero entries at all
    /// pivot indices.  Linear and idempotent.
    pub fn reduce(&self, x: &SparseTensor) -> SparseTensor {
        assert_eq!(x.legs(), self.n, "mixed leg counts in reduce");
        let mut out = x.clone();
        for (row, pivot) in self.rows.iter().zip(&self.pivots) {
            if let Some(c) = out.coeff_code(pivot.code()).cloned() {
                out.add_scaled(row, &c.neg());
            }
        }
        out
    }

    /// Membership test for the span.
    pub fn contains(&self, x: &SparseTensor) -> bool {
        self.reduce(x).is_zero()
    }
}

/// Exact rank of a list of tensors via elimination.
///
/// # Panics
///
/// Panics on mixed leg counts.
pub fn rank(vectors: &[SparseTensor]) -> usize {
    let n = match vectors.first() {
        Some(v) => v.legs(),
        None => return 0,
    };
    EchelonBasis::from_vectors(n, vectors.iter().cloned()).dim()
}

/// Incremental elimination that remembers how each echelon row was obtained
/// from the inserted vectors.
///
/// Inserting a vector that is dependent on the previous ones returns the
/// linear combination witnessing the dependency; this is the workhorse for
/// computing nullspaces of spans (kernels of maps restricted to a span) and
/// for expressing vectors in a given generating set.
#[derive(Clone, Debug)]
pub struct SpanTracker {
    n: usize,
    /// Echelon rows paired with their expression in the inserted vectors.
    rows: Vec<(SparseTensor, Vec<RatFunc>)>,
    pivots: Vec<LegIndex>,
    inserted: usize,
}

impl SpanTracker {
    pub fn new(n: usize) -> Self {
        SpanTracker {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
            inserted: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Insert the next vector.  If it is independent, the span grows and
    /// `None` is returned.  If it is dependent, returns coefficients `c` of
    /// length `inserted()` (after the call) with `Σ c_k · v_k = 0`, where
    /// `v_k` is the k-th inserted vector; the last coefficient is 1.
    pub fn insert(&mut self, v: &SparseTensor) -> Option<Vec<RatFunc>> {
        assert_eq!(v.legs(), self.n, "mixed leg counts in span tracker");
        let mut rem = v.clone();
        let mut combo = vec![RatFunc::zero(); self.inserted + 1];
        combo[self.inserted] = RatFunc::one();
        self.inserted += 1;
        for ((row, expr), pivot) in self.rows.iter().zip(&self.pivots) {
            if let Some(c) = rem.coeff_code(pivot.code()).cloned() {
                rem.add_scaled(row, &c.neg());
                for (k, e) in expr.iter().enumerate() {
                    combo[k] = combo[k].sub(&c.mul(e));
                }
            }
        }
        let pivot = match rem.leading_index() {
            Some(p) => p,
            None => return Some(combo),
        };
        let inv = rem
            .coeff(&pivot)
            .inv()
            .expect("nonzero leading coefficient");
        let rem = rem.scale(&inv);
        let combo: Vec<RatFunc> = combo.iter().map(|c| c.mul(&inv)).collect();
        let pcode = pivot.code();
        for (row, expr) in &mut self.rows {
            if let Some(c) = row.coeff_code(pcode).cloned() {
                row.add_scaled(&rem, &c.neg());
                for (k, e) in combo.iter().enumerate() {
                    let delta = c.mul(e);
                    if k < expr.len() {
                        expr[k] = expr[k].sub(&delta);
                    } else if !delta.is_zero() {
                        expr.resize(k, RatFunc::zero());
                        expr.push(delta.neg());
                    }
                }
            }
        }
        let pos = self
            .pivots
            .binary_search(&pivot)
            .expect_err("duplicate pivot after reduction");
        self.pivots.insert(pos, pivot);
        self.rows.insert(pos, (rem, combo));
        None
    }

    /// Express `x` in the inserted vectors, if it lies in their span.
    /// Returned coefficients have length `inserted()`.
    pub fn express(&self, x: &SparseTensor) -> Option<Vec<RatFunc>> {
        assert_eq!(x.legs(), self.n, "mixed leg counts in span tracker");
        let mut rem = x.clone();
        let mut combo = vec![RatFunc::zero(); self.inserted];
        for ((row, expr), pivot) in self.rows.iter().zip(&self.pivots) {
            if let Some(c) = rem.coeff_code(pivot.code()).cloned() {
                rem.add_scaled(row, &c.neg());
                for (k, e) in expr.iter().enumerate() {
                    combo[k] = combo[k].add(&c.mul(e));
                }
            }
        }
        if rem.is_zero() {
            Some(combo)
        } else {
            None
        }
    }
}

/// Reduced echelon basis of the kernel of `f`, restricted to the subspace
/// spanned by the basis vectors listed in `domain`.
///
/// The result is deterministic given the global index order.
pub fn kernel_restricted(f: &LinMap, domain: &[LegIndex]) -> EchelonBasis {
    let n = f.in_legs();
    // Constraint rows: for each output index, the linear functional it
    // induces on the span of `domain`.
    let mut rows: BTreeMap<u64, BTreeMap<usize, RatFunc>> = BTreeMap::new();
    for (j, idx) in domain.iter().enumerate() {
        assert_eq!(idx.len(), n);
        if let Some(col) = f.column_code(idx.code()) {
            for (ocode, c) in col.iter().map(|(i, c)| (i.code(), c)) {
                rows.entry(ocode).or_default().insert(j, c.clone());
            }
        }
    }
    // Row-reduce the constraints over the domain positions.
    let mut reduced: Vec<(usize, BTreeMap<usize, RatFunc>)> = Vec::new();
    for (_, mut row) in rows {
        loop {
            let &p = match row.keys().next() {
                Some(p) => p,
                None => break,
            };
            match reduced.binary_search_by_key(&p, |(pv, _)| *pv) {
                Ok(i) => {
                    let (_, pivot_row) = &reduced[i];
                    let c = row[&p].clone();
                    let pivot_row = pivot_row.clone();
                    for (j, pc) in pivot_row {
                        let entry = row.entry(j).or_insert_with(RatFunc::zero);
                        *entry = entry.sub(&c.mul(&pc));
                        if entry.is_zero() {
                            row.remove(&j);
                        }
                    }
                }
                Err(_) => break,
            }
        }
        if let Some(&p) = row.keys().next() {
            let inv = row[&p].inv().expect("nonzero pivot");
            let row: BTreeMap<usize, RatFunc> =
                row.into_iter().map(|(j, c)| (j, c.mul(&inv))).collect();
            let pos = reduced
                .binary_search_by_key(&p, |(pv, _)| *pv)
                .expect_err("duplicate pivot");
            reduced.insert(pos, (p, row));
        }
    }
    // Back-substitute so pivot columns are clean, then read off the kernel.
    let pivot_set: std::collections::BTreeSet<usize> =
        reduced.iter().map(|(p, _)| *p).collect();
    for i in (0..reduced.len()).rev() {
        let (p, row) = reduced[i].clone();
        for k in 0..i {
            if let Some(c) = reduced[k].1.get(&p).cloned() {
                for (j, pc) in &row {
                    let entry = reduced[k].1.entry(*j).or_insert_with(RatFunc::zero);
                    *entry = entry.sub(&c.mul(pc));
                    if entry.is_zero() {
                        let j = *j;
                        reduced[k].1.remove(&j);
                    }
                }
            }
        }
    }
    let mut kernel_vectors = Vec::new();
    for (j0, idx0) in domain.iter().enumerate() {
        if pivot_set.contains(&j0) {
            continue;
        }
        let mut v = SparseTensor::basis(*idx0);
        for (p, row) in &reduced {
            if let Some(c) = row.get(&j0) {
                v.add_term(domain[*p], &c.neg());
            }
        }
        kernel_vectors.push(v);
    }
    EchelonBasis::from_vectors(n, kernel_vectors)
}

/// Reduced echelon basis of the kernel of `f` on its full domain.
pub fn kernel(f: &LinMap) -> EchelonBasis {
    let n = f.in_legs();
    let domain: Vec<LegIndex> = (0..pow7(n)).map(|c| LegIndex::from_code(n, c)).collect();
    kernel_restricted(f, &domain)
}

/// Serialize an echelon basis in the kernel-cache text format.
///
/// Header `G2Q-KERNEL v1 n=<n> dim=<d>`, then one row per line as
/// space-separated `idx:coeff` pairs with coefficients rendered canonically.
pub fn render_kernel_cache(basis: &EchelonBasis) -> String {
    let mut out = format!("G2Q-KERNEL v1 n={} dim={}\n", basis.legs(), basis.dim());
    for row in basis.rows() {
        let terms: Vec<String> = row
            .iter()
            .map(|(idx, c)| format!("{}:{}", idx.code(), c))
            .collect();
        out.push_str(&terms.join(" "));
        out.push('\n');
    }
    out
}

/// Parse the kernel-cache text format produced by [`render_kernel_cache`].
///
/// Returns `None` on any malformed content (treated as a cache miss).
pub fn parse_kernel_cache(text: &str) -> Option<EchelonBasis> {
    let mut lines = text.lines();
    let header = lines.next()?;
    let rest = header.strip_prefix("G2Q-KERNEL v1 n=")?;
    let (n_str, dim_str) = rest.split_once(" dim=")?;
    let n: usize = n_str.parse().ok()?;
    let dim: usize = dim_str.trim().parse().ok()?;
    let mut vectors = Vec::with_capacity(dim);
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        // Coefficients rendered canonically may themselves contain spaces
        // (`q^2 + 1`), so a new pair starts only at a `<digits>:` token.
        let mut pairs: Vec<(u64, String)> = Vec::new();
        for token in line.split(' ') {
            match token.split_once(':') {
                Some((code_str, coeff_start)) if code_str.bytes().all(|b| b.is_ascii_digit()) => {
                    pairs.push((code_str.parse().ok()?, coeff_start.to_string()));
                }
                _ => {
                    let (_, coeff) = pairs.last_mut()?;
                    coeff.push(' ');
                    coeff.push_str(token);
                }
            }
        }
        let mut v = SparseTensor::zero(n);
        for (code, coeff_str) in pairs {
            if code >= pow7(n) {
                return None;
            }
            let coeff = RatFunc::parse(&coeff_str)?;
            v.add_term_code(code, &coeff);
        }
        vectors.push(v);
    }
    if vectors.len() != dim {
        return None;
    }
    let basis = EchelonBasis::from_vectors(n, vectors);
    if basis.dim() != dim {
        return None;
    }
    Some(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::{qint, LaurentPoly};

    fn rf(terms: &[(i64, i64)]) -> RatFunc {
        RatFunc::from_poly(LaurentPoly::from_terms(terms))
    }

    #[test]
    fn leg_index_roundtrip() {
        let idx = LegIndex::from_labels(&[1, 0, -1, 3]);
        assert_eq!(idx.labels(), vec![1, 0, -1, 3]);
        assert_eq!(idx.len(), 4);
        let (a, b) = idx.split_at(1);
        assert_eq!(a.labels(), vec![1]);
        assert_eq!(b.labels(), vec![0, -1, 3]);
        assert_eq!(a.concat(&b), idx);
        // Leg 1 is most significant: [1, ...] sorts before [2, ...].
        assert!(LegIndex::from_labels(&[1, -1]) < LegIndex::from_labels(&[2, 1]));
    }

    #[test]
    fn alphabet_order_is_fixed() {
        let codes: Vec<u64> = LABELS
            .iter()
            .map(|&l| LegIndex::from_labels(&[l]).code())
            .collect();
        assert_eq!(codes, vec![0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn tensor_arithmetic() {
        let a = SparseTensor::basis(LegIndex::from_labels(&[1]));
        let b = SparseTensor::basis(LegIndex::from_labels(&[-1]));
        let sum = a.add(&b.scale(&rf(&[(4, 1)])));
        assert_eq!(sum.coeff(&LegIndex::from_labels(&[-1])), rf(&[(4, 1)]));
        let prod = sum.tensor(&a);
        assert_eq!(
            prod.coeff(&LegIndex::from_labels(&[-1, 1])),
            rf(&[(4, 1)])
        );
        assert!(sum.sub(&sum).is_zero());
    }

    #[test]
    fn apply_on_legs_identity_and_mismatch() {
        let x = SparseTensor::basis(LegIndex::from_labels(&[1, 2, 3]));
        let id = LinMap::identity(1);
        assert_eq!(apply_on_legs(&id, &[2], &x), x);
    }

    #[test]
    #[should_panic]
    fn apply_on_legs_rejects_bad_positions() {
        let x = SparseTensor::basis(LegIndex::from_labels(&[1, 2]));
        let id = LinMap::identity(2);
        apply_on_legs(&id, &[2, 4], &x);
    }

    #[test]
    fn compose_and_tensor_of_maps() {
        // f = E_{12} pattern: sends v_2 to v_1.
        let f = LinMap::from_columns(
            1,
            1,
            [(
                LegIndex::from_labels(&[2]),
                SparseTensor::basis(LegIndex::from_labels(&[1])),
            )],
        );
        let x = SparseTensor::basis(LegIndex::from_labels(&[2, 2]));
        let fx = apply_at(&f.tensor(&LinMap::identity(1)), 0, &x);
        assert_eq!(
            fx,
            SparseTensor::basis(LegIndex::from_labels(&[1, 2]))
        );
        let ff = f.compose(&f);
        assert!(ff.is_zero());
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        assert_eq!(kernel(&LinMap::zero(2, 1)).dim(), 49);
        assert_eq!(kernel(&LinMap::identity(2)).dim(), 0);
    }

    #[test]
    fn kernel_reduce_rank_consistency() {
        // Map V⊗V -> V collapsing to the first leg: kernel has dim 42.
        let f = LinMap::from_fn(2, 1, |idx| {
            let (a, _) = idx.split_at(1);
            SparseTensor::basis(a)
        });
        // f(e_ab) = e_a, so the kernel is spanned by e_ab - e_a0 differences.
        let ker = kernel(&f);
        assert_eq!(ker.dim(), 42);
        for row in ker.rows() {
            assert!(f.apply(row).is_zero());
        }
        // reduce of a row is zero; reduce is idempotent.
        let x = SparseTensor::basis(LegIndex::from_labels(&[2, 3]))
            .add(&SparseTensor::basis(LegIndex::from_labels(&[1, 1])).scale(&rf(&[(1, 2)])));
        let r = ker.reduce(&x);
        assert_eq!(ker.reduce(&r), r);
        assert!(ker.contains(&ker.rows()[0].scale(&rf(&[(-3, 5)]))));
    }

    #[test]
    fn echelon_invariants() {
        let v1 = SparseTensor::basis(LegIndex::from_labels(&[1]))
            .add(&SparseTensor::basis(LegIndex::from_labels(&[2])).scale(&rf(&[(1, 1)])));
        let v2 = SparseTensor::basis(LegIndex::from_labels(&[1]))
            .add(&SparseTensor::basis(LegIndex::from_labels(&[3])).scale(&rf(&[(0, 5)])));
        let basis = EchelonBasis::from_vectors(1, vec![v1.clone(), v2.clone()]);
        assert_eq!(basis.dim(), 2);
        let pivots = basis.pivots();
        assert!(pivots.windows(2).all(|w| w[0] < w[1]));
        for (i, row) in basis.rows().iter().enumerate() {
            assert!(row.coeff(&pivots[i]).is_one());
            for (j, p) in pivots.iter().enumerate() {
                if i != j {
                    assert!(row.coeff(p).is_zero());
                }
            }
        }
        assert_eq!(rank(&[v1.clone(), v2.clone(), v1.add(&v2)]), 2);
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[v1.clone(), v1.scale(&rf(&[(2, 7)]))]), 1);
    }

    #[test]
    fn disjoint_leg_applications_commute() {
        let f = LinMap::from_fn(1, 1, |idx| {
            SparseTensor::basis(idx).scale(&rf(&[(1, 1), (0, 1)]))
        });
        let g = LinMap::from_fn(1, 1, |idx| {
            let l = idx.labels()[0];
            if l == 1 {
                SparseTensor::basis(LegIndex::from_labels(&[2]))
            } else {
                SparseTensor::basis(idx)
            }
        });
        let x = SparseTensor::basis(LegIndex::from_labels(&[1, 0, 1]))
            .add(&SparseTensor::basis(LegIndex::from_labels(&[3, 2, 1])).scale(&rf(&[(0, 2)])));
        let a = apply_at(&g, 2, &apply_at(&f, 0, &x));
        let b = apply_at(&f, 0, &apply_at(&g, 2, &x));
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_cache_roundtrip() {
        let f = LinMap::from_fn(2, 1, |idx| {
            let (a, b) = idx.split_at(1);
            let mut t = SparseTensor::basis(a);
            t.add_scaled(
                &SparseTensor::basis(b),
                &RatFunc::new(qint(2), qint(3)),
            );
            t
        });
        let ker = kernel(&f);
        let text = render_kernel_cache(&ker);
        assert!(text.starts_with(&format!("G2Q-KERNEL v1 n=2 dim={}\n", ker.dim())));
        let back = parse_kernel_cache(&text).expect("cache parses");
        assert_eq!(back, ker);
        assert_eq!(parse_kernel_cache("garbage"), None);
    }
}
